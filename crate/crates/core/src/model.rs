//! Physical constants, input parameters and derived quantities.
//!
//! All frequencies are angular frequencies in rad/s. The published
//! parameter set quotes them in "Hz" but every formula uses them as
//! angular frequencies without 2π factors, so the values are taken
//! as printed.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CODATA 2018 exact values.
pub mod constants {
    /// Reduced Planck constant (J s).
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Boltzmann constant (J/K).
    pub const K_B: f64 = 1.380_649e-23;
    /// Speed of light in vacuum (m/s).
    pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
}

use constants::{HBAR, SPEED_OF_LIGHT};

/// Minimum `gamma_c / max(omega_S, eta/m)` before the broadband-cavity
/// warning fires.
pub const BROADBAND_RATIO: f64 = 2.0;

/// Maximum `omega_S / (c / 2L)` before the adiabatic-regime warning fires.
pub const ADIABATIC_RATIO: f64 = 0.01;

/// Upper frequency of the reservoir oscillator spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum Cutoff {
    /// Coarse-grained limit, `Omega -> infinity`.
    #[default]
    Infinite,
    /// Finite cutoff in rad/s.
    Finite(f64),
}

impl Cutoff {
    pub fn finite(self) -> Option<f64> {
        match self {
            Cutoff::Infinite => None,
            Cutoff::Finite(w) => Some(w),
        }
    }
}

/// Primitive physical inputs, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Mirror mass (kg).
    pub m: f64,
    /// Mechanical angular frequency (rad/s).
    pub omega_s: f64,
    /// Friction coefficient (kg/s); the damping rate is `eta / m`.
    pub eta: f64,
    /// Cavity angular frequency (rad/s).
    pub omega_c: f64,
    /// Drive angular frequency (rad/s).
    pub omega_0: f64,
    /// Cavity decay rate (rad/s).
    pub gamma_c: f64,
    /// Cavity length (m).
    pub length: f64,
    /// Input laser power (W).
    pub power: f64,
    /// Bath temperature (K).
    pub temperature: f64,
    /// Reservoir cutoff.
    pub cutoff: Cutoff,
}

impl PhysicalParams {
    /// Parameter set of the reference phase-noise figure: `omega_S = 1.3e5`,
    /// `eta/m = 3e-2`, `omega_c = 1.8e15`, `gamma_c = 4.7e5` (all rad/s),
    /// `m = 1e-5 kg`, `L = 1e-2 m`, `T = 4.2 K`, `P = 1e-5 W`. The drive is
    /// set to the cavity frequency.
    pub fn fig2() -> Self {
        PhysicalParams {
            m: 1e-5,
            omega_s: 1.3e5,
            // eta / m = 3e-2 rad/s
            eta: 3e-7,
            omega_c: 1.8e15,
            omega_0: 1.8e15,
            gamma_c: 4.7e5,
            length: 1e-2,
            power: 1e-5,
            temperature: 4.2,
            cutoff: Cutoff::Infinite,
        }
    }

    /// Mechanical damping rate `eta / m` (rad/s).
    pub fn damping_rate(&self) -> f64 {
        self.eta / self.m
    }

    /// Bare detuning `omega_c - omega_0`.
    pub fn bare_detuning(&self) -> f64 {
        self.omega_c - self.omega_0
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }

    pub fn derive(&self) -> DerivedParams {
        derive(self)
    }

    /// Returns `self` if there are no hard errors.
    pub fn checked(&self) -> Result<&Self> {
        let report = validate(self);
        if report.is_ok() {
            Ok(self)
        } else {
            Err(Error::InvalidParams(report))
        }
    }
}

/// Quantities computed from [`PhysicalParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// Drive amplitude `sqrt(P gamma_c / (hbar omega_0))` (s^-1/2 photon^1/2).
    pub drive: f64,
    /// Static optomechanical shift per photon `hbar omega_c^2 / (m omega_S^2 L^2)` (rad/s).
    pub shift_per_photon: f64,
    /// Mechanical quality factor `m omega_S / eta`.
    pub q_mech: f64,
}

impl DerivedParams {
    /// Input power reconstructed from the drive amplitude.
    pub fn power_from_drive(&self, params: &PhysicalParams) -> f64 {
        self.drive * self.drive * HBAR * params.omega_0 / params.gamma_c
    }
}

/// Drive amplitude for a given drive frequency.
pub fn drive_amplitude(power: f64, gamma_c: f64, omega_0: f64) -> f64 {
    (power * gamma_c / (HBAR * omega_0)).sqrt()
}

pub fn derive(params: &PhysicalParams) -> DerivedParams {
    let p = params;
    DerivedParams {
        drive: drive_amplitude(p.power, p.gamma_c, p.omega_0),
        shift_per_photon: HBAR * p.omega_c * p.omega_c
            / (p.m * p.omega_s * p.omega_s * p.length * p.length),
        q_mech: if p.eta > 0.0 {
            p.m * p.omega_s / p.eta
        } else {
            f64::INFINITY
        },
    }
}

/// Hard errors and regime warnings for a parameter set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.errors.join("; "))?;
        if !self.warnings.is_empty() {
            write!(f, " (warnings: {})", self.warnings.join("; "))?;
        }
        Ok(())
    }
}

pub fn validate(params: &PhysicalParams) -> ValidationReport {
    let mut report = ValidationReport::default();
    let p = params;

    let positive = [
        ("mass", p.m),
        ("omega_S", p.omega_s),
        ("gamma_c", p.gamma_c),
        ("L", p.length),
        ("omega_c", p.omega_c),
        ("omega_0", p.omega_0),
    ];
    for (name, value) in positive {
        if !(value.is_finite() && value > 0.0) {
            report.errors.push(format!("{name} must be positive"));
        }
    }
    let non_negative = [("eta", p.eta), ("P", p.power), ("T", p.temperature)];
    for (name, value) in non_negative {
        if !(value.is_finite() && value >= 0.0) {
            report.errors.push(format!("{name} must be non-negative"));
        }
    }
    if let Cutoff::Finite(w) = p.cutoff {
        if !(w.is_finite() && w > 0.0) {
            report.errors.push("Omega_cutoff must be positive".into());
        }
    }
    if !report.errors.is_empty() {
        return report;
    }

    let free_spectral_range = SPEED_OF_LIGHT / (2.0 * p.length);
    if p.omega_s > ADIABATIC_RATIO * free_spectral_range {
        report
            .warnings
            .push("adiabatic condition omega_S << c/2L violated".into());
    }
    let slowest = p.omega_s.max(p.damping_rate());
    if p.gamma_c < BROADBAND_RATIO * slowest {
        report
            .warnings
            .push("broadband-cavity condition violated".into());
    }
    report
}
