//! Closed-form homodyne phase-noise spectrum at zero detuning.
//!
//! Normalized to the shot-noise level, the output phase-quadrature
//! spectrum is
//!
//! ```text
//! S_Y(w) = 1
//!        + 4 (hbar wc^2 gc I / m L^2)^2 / [((gc/2)^2 + w^2) |D(w)|^2]
//!        + 4 (wc^2 eta gc I / m^2 L^2) Theta(w) / |D(w)|^2
//! D(w)   = (i w - gc/2) (wS^2 - w^2 - i eta w / m)
//! ```
//!
//! with `I = |B_st|^2` and `Theta` the thermal factor of the chosen
//! [`NoiseModel`]. The terms are shot noise, radiation pressure and
//! thermal noise.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernels::{thermal_excess, thermal_factor, NoiseKind, NoiseModel};
use crate::model::{constants::HBAR, PhysicalParams};
use crate::steady_state::SteadyState;

/// Largest `|Delta| / gamma_c` accepted as resonant.
pub const RESONANCE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumComponents {
    pub shot: f64,
    pub radiation_pressure: f64,
    pub thermal: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub omega: Vec<f64>,
    pub components: Vec<SpectrumComponents>,
    pub model: NoiseModel,
    pub operating_point: SteadyState,
}

/// `(i w - gamma_c/2)(omega_S^2 - w^2 - i eta w / m)`.
pub fn d_of_omega(omega: f64, params: &PhysicalParams) -> Complex64 {
    let cavity = Complex64::new(-0.5 * params.gamma_c, omega);
    let mech = Complex64::new(
        params.omega_s * params.omega_s - omega * omega,
        -params.damping_rate() * omega,
    );
    cavity * mech
}

/// Precomputed coefficients of the three spectrum terms.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Terms {
    kappa2: f64,
    omega_s2: f64,
    rate: f64,
    /// `hbar wc^2 gc I / (m L^2)`
    back_action: f64,
    /// `wc^2 eta gc I / (m^2 L^2)`
    thermal: f64,
}

impl Terms {
    pub(crate) fn new(params: &PhysicalParams, op: &SteadyState) -> Result<Self> {
        params.checked()?;
        if op.detuning.abs() > RESONANCE_TOL * params.gamma_c {
            return Err(Error::NonResonant {
                delta: op.detuning,
            });
        }
        let p = params;
        let i = op.intensity;
        let wc2_over_ml2 = p.omega_c * p.omega_c / (p.m * p.length * p.length);
        Ok(Terms {
            kappa2: 0.25 * p.gamma_c * p.gamma_c,
            omega_s2: p.omega_s * p.omega_s,
            rate: p.damping_rate(),
            back_action: HBAR * wc2_over_ml2 * p.gamma_c * i,
            thermal: wc2_over_ml2 * (p.eta / p.m) * p.gamma_c * i,
        })
    }

    fn cavity(&self, w: f64) -> f64 {
        self.kappa2 + w * w
    }

    fn mechanical(&self, w: f64) -> f64 {
        let detune = self.omega_s2 - w * w;
        detune * detune + self.rate * self.rate * w * w
    }

    /// Coefficient multiplying the thermal factor: `4 C / |D|^2`.
    pub(crate) fn thermal_weight(&self, w: f64) -> f64 {
        4.0 * (self.thermal / self.cavity(w)) / self.mechanical(w)
    }

    pub(crate) fn radiation_pressure(&self, w: f64) -> f64 {
        let a = self.back_action / self.cavity(w);
        4.0 * a * a / self.mechanical(w)
    }

    fn components(&self, w: f64, theta: f64) -> SpectrumComponents {
        let radiation_pressure = self.radiation_pressure(w);
        let thermal = self.thermal_weight(w) * theta;
        SpectrumComponents {
            shot: 1.0,
            radiation_pressure,
            thermal,
            total: 1.0 + radiation_pressure + thermal,
        }
    }
}

/// Spectrum components at one frequency. The operating point must be
/// resonant (`Delta = 0`).
pub fn spectrum_at(
    omega: f64,
    params: &PhysicalParams,
    op: &SteadyState,
    model: &NoiseModel,
) -> Result<SpectrumComponents> {
    let terms = Terms::new(params, op)?;
    Ok(terms.components(omega, thermal_factor(omega, model)?))
}

pub fn spectrum_grid(
    params: &PhysicalParams,
    op: &SteadyState,
    model: &NoiseModel,
    grid: &Grid,
) -> Result<SpectrumResult> {
    let omega = grid.nodes()?;
    let terms = Terms::new(params, op)?;
    model.check()?;
    let components = omega
        .par_iter()
        .map(|&w| Ok(terms.components(w, thermal_factor(w, model)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumResult {
        omega,
        components,
        model: *model,
        operating_point: *op,
    })
}

/// One row of a cross-model comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub omega: f64,
    pub exact: f64,
    pub diosi: f64,
    pub classical: f64,
    /// `|S_exact - S_diosi| / S_exact`
    pub rel_diosi: f64,
    /// `|S_exact - S_classical| / S_exact`
    pub rel_classical: f64,
}

/// Totals under the three noise models and their relative differences.
///
/// Differences are formed from the thermal excess over `2kT`, so they stay
/// accurate even when they sit far below double-precision resolution of
/// the totals.
pub fn compare_models(
    params: &PhysicalParams,
    op: &SteadyState,
    grid: &Grid,
) -> Result<Vec<ModelComparison>> {
    if !(params.temperature > 0.0) {
        return Err(Error::Domain("model comparison needs T > 0".into()));
    }
    let omega = grid.nodes()?;
    let terms = Terms::new(params, op)?;
    let models = NoiseKind::ALL.map(|k| NoiseModel::new(k, params));
    omega
        .par_iter()
        .map(|&w| {
            let weight = terms.thermal_weight(w);
            let totals: Vec<f64> = models
                .iter()
                .map(|m| Ok(terms.components(w, thermal_factor(w, m)?).total))
                .collect::<Result<_>>()?;
            let ex: Vec<f64> = models
                .iter()
                .map(|m| thermal_excess(w, m))
                .collect::<Result<_>>()?;
            Ok(ModelComparison {
                omega: w,
                exact: totals[0],
                diosi: totals[1],
                classical: totals[2],
                rel_diosi: (weight * (ex[0] - ex[1])).abs() / totals[0],
                rel_classical: (weight * (ex[0] - ex[2])).abs() / totals[0],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steady_state::solve_resonant;
    use approx::assert_relative_eq;

    fn fig2() -> (PhysicalParams, SteadyState) {
        let p = PhysicalParams::fig2();
        let op = solve_resonant(&p).unwrap();
        (p, op)
    }

    #[test]
    fn d_at_zero_frequency() {
        let p = PhysicalParams::fig2();
        let d = d_of_omega(0.0, &p);
        assert_relative_eq!(d.re, -0.5 * p.gamma_c * p.omega_s * p.omega_s, max_relative = 1e-15);
        assert_eq!(d.im, 0.0);
    }

    #[test]
    fn d_vanishes_at_undamped_resonance() {
        let mut p = PhysicalParams::fig2();
        p.eta = 0.0;
        assert_eq!(d_of_omega(p.omega_s, &p).norm(), 0.0);
    }

    #[test]
    fn d_modulus_even() {
        let p = PhysicalParams::fig2();
        for w in [1.0, 3.3e3, 1.2e5, 1.31e5, 7e6] {
            assert_relative_eq!(
                d_of_omega(w, &p).norm_sqr(),
                d_of_omega(-w, &p).norm_sqr(),
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn undriven_is_shot_noise() {
        let mut p = PhysicalParams::fig2();
        p.power = 0.0;
        let op = solve_resonant(&p).unwrap();
        let model = NoiseModel::new(NoiseKind::Exact, &p);
        for w in [0.0, 1e3, 1.3e5, 1e8] {
            let s = spectrum_at(w, &p, &op, &model).unwrap();
            assert_eq!(s.total, 1.0);
        }
    }

    #[test]
    fn far_tail_is_shot_noise() {
        let (p, op) = fig2();
        let model = NoiseModel::new(NoiseKind::Exact, &p);
        let w = 100.0 * p.gamma_c.max(p.omega_s);
        let s = spectrum_at(w, &p, &op, &model).unwrap();
        assert!((s.total - 1.0).abs() < 0.01);
    }

    #[test]
    fn thermal_over_back_action_at_resonance() {
        // Hand evaluation of the two closed-form terms at w = omega_S gives
        // thermal ~ 8.7e12 and radiation pressure ~ 2.6e11.
        let (p, op) = fig2();
        let model = NoiseModel::new(NoiseKind::Exact, &p);
        let s = spectrum_at(p.omega_s, &p, &op, &model).unwrap();
        let ratio = s.thermal / s.radiation_pressure;
        assert!((10.0..=100.0).contains(&ratio), "{ratio}");
        assert_relative_eq!(ratio, 33.0, max_relative = 0.05);
    }

    #[test]
    fn refuses_detuned_operating_point() {
        let (p, mut op) = fig2();
        op.detuning = 1e3;
        let model = NoiseModel::new(NoiseKind::Exact, &p);
        assert!(matches!(
            spectrum_at(1.0, &p, &op, &model),
            Err(Error::NonResonant { .. })
        ));
    }

    #[test]
    fn two_node_grid() {
        let (p, op) = fig2();
        let model = NoiseModel::new(NoiseKind::Classical, &p);
        let r = spectrum_grid(&p, &op, &model, &Grid::linear(1e5, 2e5, 2)).unwrap();
        assert_eq!(r.components.len(), 2);
    }

    #[test]
    fn component_scaling_with_intensity() {
        let (p, op) = fig2();
        let model = NoiseModel::new(NoiseKind::Exact, &p);
        let mut op2 = op;
        op2.intensity *= 2.0;
        for w in [5e4, 1.3e5, 4e5] {
            let a = spectrum_at(w, &p, &op, &model).unwrap();
            let b = spectrum_at(w, &p, &op2, &model).unwrap();
            assert_relative_eq!(b.thermal / a.thermal, 2.0, max_relative = 1e-14);
            assert_relative_eq!(b.radiation_pressure / a.radiation_pressure, 4.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn thermal_grows_with_temperature() {
        let (p, op) = fig2();
        let mut prev = 0.0;
        for t in [0.0, 1e-6, 1e-3, 0.1, 4.2, 300.0] {
            let model = NoiseModel::ExactQle { temperature: t };
            let s = spectrum_at(1.1e5, &p, &op, &model).unwrap();
            assert!(s.thermal > prev);
            prev = s.thermal;
        }
    }

    #[test]
    fn shot_floor_rate() {
        // total - 1 falls at least as fast as 1/w^2 on a geometric grid
        let (p, op) = fig2();
        let model = NoiseModel::new(NoiseKind::Exact, &p);
        let mut w = 10.0 * p.gamma_c;
        let mut prev = spectrum_at(w, &p, &op, &model).unwrap().total - 1.0;
        for _ in 0..8 {
            w *= 2.0;
            let cur = spectrum_at(w, &p, &op, &model).unwrap().total - 1.0;
            assert!(cur <= prev / 4.0 * (1.0 + 1e-12));
            prev = cur;
        }
    }

    #[test]
    fn comparison_needs_temperature() {
        let (mut p, op) = fig2();
        p.temperature = 0.0;
        assert!(compare_models(&p, &op, &Grid::linear(1.0, 2.0, 2)).is_err());
    }

    #[test]
    fn classical_converges_at_high_temperature() {
        let (p, op) = fig2();
        let grid = Grid::linear(0.5 * p.omega_s, 1.5 * p.omega_s, 11);
        let mut prev = f64::INFINITY;
        for t in [1e-3, 1e-1, 10.0, 1e3] {
            let mut hot = p;
            hot.temperature = t;
            let rows = compare_models(&hot, &op, &grid).unwrap();
            let worst = rows.iter().map(|r| r.rel_classical).fold(0.0, f64::max);
            assert!(worst < prev);
            prev = worst;
        }
    }

    #[test]
    fn diosi_without_friction_term() {
        // eta = 0 inside the correction: the difference is the pure w-series remainder
        let (p, op) = fig2();
        let terms = Terms::new(&p, &op).unwrap();
        let exact = NoiseModel::new(NoiseKind::Exact, &p);
        let diosi = NoiseModel::Diosi {
            temperature: p.temperature,
            eta: 0.0,
            mass: p.m,
        };
        let w = 3.0 * p.omega_s;
        let diff = thermal_excess(w, &diosi).unwrap() - thermal_excess(w, &exact).unwrap();
        let kt2 = 2.0 * crate::model::constants::K_B * p.temperature;
        let x = HBAR * w / kt2;
        assert_relative_eq!(diff, kt2 * x.powi(4) / 45.0, max_relative = 1e-6);
        assert!(terms.thermal_weight(w) * diff >= 0.0);
    }

    proptest::proptest! {
        #[test]
        fn even_in_frequency(w in 0.0f64..2e6) {
            let (p, op) = fig2();
            for kind in NoiseKind::ALL {
                let model = NoiseModel::new(kind, &p);
                let a = spectrum_at(w, &p, &op, &model).unwrap();
                let b = spectrum_at(-w, &p, &op, &model).unwrap();
                proptest::prop_assert!(((a.total - b.total) / a.total).abs() < 1e-12);
                let sum = a.shot + a.radiation_pressure + a.thermal;
                proptest::prop_assert!(((a.total - sum) / a.total).abs() < 1e-14);
                proptest::prop_assert!(a.radiation_pressure >= 0.0 && a.thermal >= 0.0);
            }
        }
    }
}
