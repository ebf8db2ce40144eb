//! Reservoir kernels, Langevin-force correlations and the thermal factor.
//!
//! With the flat coupling density `2 eta / pi` up to a cutoff `Omega`, the
//! Langevin force has the symmetric correlation
//! `(hbar eta / pi) F_r(tau)` and antisymmetric part `(hbar eta / pi) F_i(tau)`,
//! where
//!
//! ```text
//! F_r(tau) =  int_0^Omega w cos(w tau) coth(hbar w / 2kT) dw
//! F_i(tau) = -int_0^Omega w sin(w tau) dw = pi d/dtau delta~(tau)
//! delta~(t) = (1/pi) int_0^Omega cos(w t) dw
//! ```
//!
//! The finite-cutoff functions are exposed for tests and studies only; the
//! spectrum and the simulator work in the infinite-cutoff limit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::constants::{HBAR, K_B};
use crate::model::{Cutoff, PhysicalParams};
use crate::quad;

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub cutoff: Cutoff,
    /// Relative quadrature tolerance, in `(0, 1e-3]`.
    pub quad_tol: f64,
}

impl KernelConfig {
    pub fn new(cutoff: Cutoff, quad_tol: f64) -> Result<Self> {
        if let Cutoff::Finite(w) = cutoff {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Domain("cutoff must be positive".into()));
            }
        }
        if !(quad_tol > 0.0 && quad_tol <= 1e-3) {
            return Err(Error::Domain("quad_tol must lie in (0, 1e-3]".into()));
        }
        Ok(KernelConfig { cutoff, quad_tol })
    }

    pub fn finite(omega: f64) -> Result<Self> {
        Self::new(Cutoff::Finite(omega), 1e-10)
    }

    fn omega(&self) -> Result<f64> {
        self.cutoff.finite().ok_or_else(|| {
            Error::Domain("infinite cutoff: the kernel is a distribution, not a function".into())
        })
    }
}

/// `sin(Omega t) / (pi t)`, even in `t`.
pub fn delta_tilde(t: f64, cfg: &KernelConfig) -> Result<f64> {
    let omega = cfg.omega()?;
    let x = omega * t.abs();
    if x < 1e-3 {
        let x2 = x * x;
        return Ok(omega / PI * (1.0 - x2 / 6.0 + x2 * x2 / 120.0));
    }
    Ok(x.sin() / (PI * t.abs()))
}

/// `int_0^Omega w cos(w tau) dw`.
fn ramp_cosine(omega: f64, tau: f64) -> f64 {
    let tau = tau.abs();
    let x = omega * tau;
    if x < 0.1 {
        let x2 = x * x;
        let series = 0.5 - x2 / 8.0 + x2 * x2 / 144.0 - x2 * x2 * x2 / 5760.0
            + x2 * x2 * x2 * x2 / 403_200.0;
        return omega * omega * series;
    }
    omega * x.sin() / tau + (x.cos() - 1.0) / (tau * tau)
}

/// `int_0^Omega w sin(w tau) dw`.
fn ramp_sine(omega: f64, tau: f64) -> f64 {
    let x = omega * tau;
    if x.abs() < 0.1 {
        let x2 = x * x;
        let series = 1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0 - x2 * x2 * x2 / 45_360.0;
        return omega * omega * x * series;
    }
    x.sin() / (tau * tau) - omega * x.cos() / tau
}

/// Symmetric correlation kernel `F_r(tau)` at temperature `temperature`.
pub fn f_r(tau: f64, temperature: f64, cfg: &KernelConfig) -> Result<f64> {
    let omega = cfg.omega()?;
    if temperature < 0.0 {
        return Err(Error::Domain("temperature must be non-negative".into()));
    }
    let tau = tau.abs();
    let vacuum = ramp_cosine(omega, tau);
    if temperature == 0.0 {
        return Ok(vacuum);
    }
    // w coth(a w) = w + 2w / (exp(2 a w) - 1); the second part is smooth
    // with the limit 1/a at w = 0 and decays exponentially.
    let a = HBAR / (2.0 * K_B * temperature);
    let thermal = |w: f64| {
        let z = 2.0 * a * w;
        let occupation = if z < 1e-8 { 1.0 / a - w } else { 2.0 * w / z.exp_m1() };
        occupation * (w * tau).cos()
    };
    let upper = omega.min(40.0 / a);
    let panels = ((upper * tau / PI).ceil() as usize).clamp(1, 100_000) + 1;
    let scale = 0.5 * omega * omega + upper / a;
    let est = quad::integrate(thermal, 0.0, upper, cfg.quad_tol * 1e-3 * scale, cfg.quad_tol * 1e-3, panels)?;
    Ok(vacuum + est.value)
}

/// Antisymmetric kernel `F_i(tau)`, odd in `tau`.
pub fn f_i(tau: f64, cfg: &KernelConfig) -> Result<f64> {
    let omega = cfg.omega()?;
    let value = -ramp_sine(omega, tau.abs());
    Ok(if tau < 0.0 { -value } else { value })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NoiseKind {
    Exact,
    Diosi,
    Classical,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 3] = [NoiseKind::Exact, NoiseKind::Diosi, NoiseKind::Classical];

    pub fn as_str(self) -> &'static str {
        match self {
            NoiseKind::Exact => "exact",
            NoiseKind::Diosi => "diosi",
            NoiseKind::Classical => "classical",
        }
    }
}

impl std::str::FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(NoiseKind::Exact),
            "diosi" => Ok(NoiseKind::Diosi),
            "classical" => Ok(NoiseKind::Classical),
            other => Err(Error::Domain(format!(
                "unknown noise model `{other}` (expected exact, diosi or classical)"
            ))),
        }
    }
}

/// Thermal noise model of the mirror bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NoiseModel {
    /// `hbar w coth(hbar w / 2kT)`, valid at any temperature.
    ExactQle { temperature: f64 },
    /// High-temperature Lindblad-form correction
    /// `2kT + hbar^2 (w^2 + eta^2/m^2) / 6kT`.
    Diosi {
        temperature: f64,
        eta: f64,
        mass: f64,
    },
    /// White `2kT`.
    ClassicalWhite { temperature: f64 },
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, params: &PhysicalParams) -> Self {
        let temperature = params.temperature;
        match kind {
            NoiseKind::Exact => NoiseModel::ExactQle { temperature },
            NoiseKind::Diosi => NoiseModel::Diosi {
                temperature,
                eta: params.eta,
                mass: params.m,
            },
            NoiseKind::Classical => NoiseModel::ClassicalWhite { temperature },
        }
    }

    pub fn kind(&self) -> NoiseKind {
        match self {
            NoiseModel::ExactQle { .. } => NoiseKind::Exact,
            NoiseModel::Diosi { .. } => NoiseKind::Diosi,
            NoiseModel::ClassicalWhite { .. } => NoiseKind::Classical,
        }
    }

    pub fn temperature(&self) -> f64 {
        match *self {
            NoiseModel::ExactQle { temperature }
            | NoiseModel::Diosi { temperature, .. }
            | NoiseModel::ClassicalWhite { temperature } => temperature,
        }
    }

    /// Same model at another temperature.
    pub fn with_temperature(self, temperature: f64) -> Self {
        match self {
            NoiseModel::ExactQle { .. } => NoiseModel::ExactQle { temperature },
            NoiseModel::Diosi { eta, mass, .. } => NoiseModel::Diosi {
                temperature,
                eta,
                mass,
            },
            NoiseModel::ClassicalWhite { .. } => NoiseModel::ClassicalWhite { temperature },
        }
    }

    pub fn check(&self) -> Result<()> {
        let t = self.temperature();
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::Domain("temperature must be non-negative".into()));
        }
        if let NoiseModel::Diosi { eta, mass, .. } = *self {
            if t == 0.0 {
                return Err(Error::Domain("Diósi correction undefined at T=0".into()));
            }
            if !(eta >= 0.0 && mass > 0.0) {
                return Err(Error::Domain("Diósi model needs eta >= 0 and m > 0".into()));
            }
        }
        Ok(())
    }
}

/// `x coth x` for `x >= 0`.
pub(crate) fn x_coth_x(x: f64) -> f64 {
    if x < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 3.0 - x2 * x2 / 45.0 + 2.0 * x2 * x2 * x2 / 945.0
    } else {
        x * (1.0 + 2.0 / (2.0 * x).exp_m1())
    }
}

/// `x coth x - 1` without cancellation near `x = 0`.
fn x_coth_x_minus_one(x: f64) -> f64 {
    if x < 0.1 {
        let x2 = x * x;
        x2 * (1.0 / 3.0
            + x2 * (-1.0 / 45.0 + x2 * (2.0 / 945.0 + x2 * (-1.0 / 4725.0 + x2 * 2.0 / 93_555.0))))
    } else {
        x_coth_x(x) - 1.0
    }
}

/// Thermal spectral factor (J) multiplying the friction coefficient in the
/// symmetrized Langevin-force density. Even in `omega`.
pub fn thermal_factor(omega: f64, model: &NoiseModel) -> Result<f64> {
    model.check()?;
    let w = omega.abs();
    Ok(match *model {
        NoiseModel::ExactQle { temperature } => {
            if temperature == 0.0 {
                HBAR * w
            } else {
                let kt2 = 2.0 * K_B * temperature;
                kt2 * x_coth_x(HBAR * w / kt2)
            }
        }
        NoiseModel::Diosi {
            temperature,
            eta,
            mass,
        } => {
            let kt = K_B * temperature;
            let rate = eta / mass;
            2.0 * kt + HBAR * HBAR * (w * w + rate * rate) / (6.0 * kt)
        }
        NoiseModel::ClassicalWhite { temperature } => 2.0 * K_B * temperature,
    })
}

/// `thermal_factor - 2kT`, evaluated without cancellation.
pub fn thermal_excess(omega: f64, model: &NoiseModel) -> Result<f64> {
    model.check()?;
    let w = omega.abs();
    Ok(match *model {
        NoiseModel::ExactQle { temperature } => {
            if temperature == 0.0 {
                HBAR * w
            } else {
                let kt2 = 2.0 * K_B * temperature;
                kt2 * x_coth_x_minus_one(HBAR * w / kt2)
            }
        }
        NoiseModel::Diosi {
            temperature,
            eta,
            mass,
        } => {
            let rate = eta / mass;
            HBAR * HBAR * (w * w + rate * rate) / (6.0 * K_B * temperature)
        }
        NoiseModel::ClassicalWhite { .. } => 0.0,
    })
}

/// Non-symmetrized density of the Langevin force, the coefficient of
/// `2 pi delta(w + w')` in `<Q(w) Q(w')>`: `eta * thermal_factor + eta hbar w`.
///
/// The even part is the symmetrized density; the odd part `eta hbar w`
/// comes from the force commutator.
pub fn q_spectrum(omega: f64, eta: f64, model: &NoiseModel) -> Result<f64> {
    if eta < 0.0 {
        return Err(Error::Domain("eta must be non-negative".into()));
    }
    Ok(eta * thermal_factor(omega, model)? + eta * HBAR * omega)
}
