//! Semiclassical operating point of the driven cavity.
//!
//! The steady intracavity intensity `I = |B_st|^2` solves the real cubic
//!
//! ```text
//! I [ (gamma_c/2)^2 + (Delta0 - g I)^2 ] = E^2,   Delta0 = omega_c - omega_0,
//! ```
//!
//! with `g = hbar omega_c^2 / (m omega_S^2 L^2)`. In the scaled variables
//! `x = g I / kappa`, `delta = Delta0 / kappa`, `y = g E^2 / kappa^3`
//! (`kappa = gamma_c / 2`) it reads `x (1 + (delta - x)^2) = y`, which is
//! what the solver works with. The field phase is chosen so that `B_st`
//! is real and non-negative.
//!
//! Stability uses the slope criterion `d(E^2)/dI > 0`. No stability rule
//! comes with the model itself; this is the usual choice for dispersive
//! bistability.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, constants::HBAR, PhysicalParams};

/// Relative slope below which a root counts as a fold point.
const MARGINAL_SLOPE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Marginal => "marginal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    /// Intracavity amplitude `B_st`, real and non-negative.
    pub amplitude: f64,
    /// Intracavity photon number `|B_st|^2`.
    pub intensity: f64,
    /// Static mirror displacement (m).
    pub displacement: f64,
    /// Effective detuning including the radiation-pressure shift (rad/s).
    pub detuning: f64,
    pub stability: Stability,
    /// Drive frequency used for this operating point (rad/s).
    pub drive_frequency: f64,
    /// Drive amplitude `E`.
    pub drive: f64,
}

impl SteadyState {
    /// Operating point with no intracavity field.
    pub fn dark(params: &PhysicalParams) -> Self {
        SteadyState {
            amplitude: 0.0,
            intensity: 0.0,
            displacement: 0.0,
            detuning: params.bare_detuning(),
            stability: Stability::Stable,
            drive_frequency: params.omega_0,
            drive: 0.0,
        }
    }
}

/// One row of a detuning sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Bare detuning `omega_c - omega_0` (rad/s).
    pub delta0: f64,
    /// Roots sorted by ascending intensity.
    pub roots: Vec<SteadyState>,
}

/// Real roots of `x^3 + a2 x^2 + a1 x + a0`, ascending, unpolished.
///
/// Trigonometric form when all three roots are real, Cardano otherwise.
pub fn monic_cubic_roots(a2: f64, a1: f64, a0: f64) -> Vec<f64> {
    let shift = a2 / 3.0;
    let p = a1 - a2 * a2 / 3.0;
    let q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);

    let mut roots = if p < 0.0 && disc <= 0.0 {
        let r = (-p / 3.0).sqrt();
        let cos_arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let phi = cos_arg.acos() / 3.0;
        (0..3)
            .map(|k| 2.0 * r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - shift)
            .collect::<Vec<_>>()
    } else {
        let s = disc.max(0.0).sqrt();
        let u = (-q / 2.0 + s).cbrt();
        let v = (-q / 2.0 - s).cbrt();
        vec![u + v - shift]
    };
    roots.sort_by(|a, b| a.total_cmp(b));
    roots
}

/// `x (1 + (delta - x)^2)`.
fn scaled_drive(x: f64, delta: f64) -> f64 {
    let d = delta - x;
    x * (1.0 + d * d)
}

/// Derivative of [`scaled_drive`] with respect to `x`.
fn scaled_slope(x: f64, delta: f64) -> f64 {
    3.0 * x * x - 4.0 * delta * x + 1.0 + delta * delta
}

fn polish(mut x: f64, delta: f64, y: f64) -> f64 {
    for _ in 0..8 {
        let f = scaled_drive(x, delta) - y;
        let df = scaled_slope(x, delta);
        if df == 0.0 {
            break;
        }
        let step = f / df;
        let next = x - step;
        if !next.is_finite() {
            break;
        }
        // keep the better of the two iterates so fold points cannot diverge
        if (scaled_drive(next, delta) - y).abs() > f.abs() {
            break;
        }
        x = next;
        if step.abs() <= 1e-16 * x.abs() {
            break;
        }
    }
    x
}

/// Scaled roots `x` of `x (1 + (delta - x)^2) = y` with their stability.
pub fn scaled_roots(delta: f64, y: f64) -> Vec<(f64, Stability)> {
    if y <= 0.0 {
        return vec![(0.0, Stability::Stable)];
    }
    let raw = monic_cubic_roots(-2.0 * delta, 1.0 + delta * delta, -y);
    let mut out: Vec<(f64, Stability)> = Vec::with_capacity(3);
    for r in raw {
        let x = polish(r.max(0.0), delta, y);
        let slope = scaled_slope(x, delta);
        let scale = 1.0 + delta * delta + 3.0 * x * x;
        let stability = if slope.abs() <= MARGINAL_SLOPE * scale {
            Stability::Marginal
        } else if slope > 0.0 {
            Stability::Stable
        } else {
            Stability::Unstable
        };
        // merge coalescing roots at a fold
        if let Some(last) = out.last_mut() {
            if (x - last.0).abs() <= 1e-7 * x.abs().max(1.0) {
                last.1 = Stability::Marginal;
                continue;
            }
        }
        out.push((x, stability));
    }
    out
}

fn state_from_intensity(
    params: &PhysicalParams,
    intensity: f64,
    delta0: f64,
    shift: f64,
    drive_frequency: f64,
    drive: f64,
    stability: Stability,
) -> SteadyState {
    let p = params;
    SteadyState {
        amplitude: intensity.sqrt(),
        intensity,
        displacement: HBAR * p.omega_c * intensity / (p.m * p.omega_s * p.omega_s * p.length),
        detuning: delta0 - shift * intensity,
        stability,
        drive_frequency,
        drive,
    }
}

fn solve_at(
    params: &PhysicalParams,
    delta0: f64,
    drive_frequency: f64,
    drive: f64,
) -> Vec<SteadyState> {
    let p = params;
    let shift = p.derive().shift_per_photon;
    let kappa = 0.5 * p.gamma_c;
    let y = shift * drive * drive / (kappa * kappa * kappa);
    scaled_roots(delta0 / kappa, y)
        .into_iter()
        .map(|(x, stability)| {
            let intensity = kappa * x / shift;
            state_from_intensity(p, intensity, delta0, shift, drive_frequency, drive, stability)
        })
        .collect()
}

/// All steady states for a bare detuning `delta0`, i.e. drive frequency
/// `omega_c - delta0`.
pub fn solve_with_detuning(params: &PhysicalParams, delta0: f64) -> Vec<SteadyState> {
    let drive_frequency = params.omega_c - delta0;
    let drive = model::drive_amplitude(params.power, params.gamma_c, drive_frequency);
    solve_at(params, delta0, drive_frequency, drive)
}

/// All real non-negative steady states, ascending in intensity.
pub fn solve_all(params: &PhysicalParams) -> Result<Vec<SteadyState>> {
    params.checked()?;
    let drive = params.derive().drive;
    Ok(solve_at(params, params.bare_detuning(), params.omega_0, drive))
}

/// Drive frequency that makes the effective detuning vanish.
///
/// The intracavity intensity at zero detuning is `4 E^2 / gamma_c^2`, and
/// `E^2` itself depends on `omega_0`; this solves
/// `omega_c - omega_0 = g * 4 P / (gamma_c hbar omega_0)` for the root
/// next to `omega_c`.
pub fn locking_frequency(params: &PhysicalParams) -> Result<f64> {
    let p = params;
    let shift = p.derive().shift_per_photon;
    let k = 4.0 * p.power / (p.gamma_c * HBAR);
    let disc = p.omega_c * p.omega_c - 4.0 * shift * k;
    if disc < 0.0 {
        return Err(Error::Domain(
            "no drive frequency locks the cavity to resonance".into(),
        ));
    }
    Ok(0.5 * (p.omega_c + disc.sqrt()))
}

/// Operating point at zero effective detuning, reached by retuning the drive.
pub fn solve_resonant(params: &PhysicalParams) -> Result<SteadyState> {
    params.checked()?;
    let p = params;
    let drive_frequency = locking_frequency(p)?;
    let drive = model::drive_amplitude(p.power, p.gamma_c, drive_frequency);
    let amplitude = 2.0 * drive / p.gamma_c;
    let intensity = amplitude * amplitude;
    let shift = p.derive().shift_per_photon;
    let mut state = state_from_intensity(
        p,
        intensity,
        shift * intensity,
        shift,
        drive_frequency,
        drive,
        Stability::Stable,
    );
    state.amplitude = amplitude;
    state.detuning = 0.0;
    Ok(state)
}

/// Relative residual of a steady state in the intensity cubic.
pub fn residual(params: &PhysicalParams, state: &SteadyState) -> f64 {
    let p = params;
    let kappa = 0.5 * p.gamma_c;
    let delta0 = p.omega_c - state.drive_frequency;
    let shift = p.derive().shift_per_photon;
    let i = state.intensity;
    let e2 = state.drive * state.drive;
    let d = delta0 - shift * i;
    let lhs = i * (kappa * kappa + d * d);
    if e2 == 0.0 {
        lhs.abs()
    } else {
        ((lhs - e2) / e2).abs()
    }
}

/// Steady states on a uniform grid of bare detunings.
pub fn sweep_bistability(
    params: &PhysicalParams,
    detuning_min: f64,
    detuning_max: f64,
    n_points: usize,
) -> Result<Vec<SweepRow>> {
    params.checked()?;
    if n_points < 2 {
        return Err(Error::Domain("sweep needs at least two points".into()));
    }
    if !(detuning_min.is_finite() && detuning_max.is_finite()) || detuning_max <= detuning_min {
        return Err(Error::Domain("sweep range must be increasing".into()));
    }
    let step = (detuning_max - detuning_min) / (n_points - 1) as f64;
    Ok((0..n_points)
        .into_par_iter()
        .map(|k| {
            let delta0 = if k == n_points - 1 {
                detuning_max
            } else {
                detuning_min + step * k as f64
            };
            SweepRow {
                delta0,
                roots: solve_with_detuning(params, delta0),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bistable_params() -> PhysicalParams {
        // 500x the reference power puts y = g E^2 / kappa^3 near 19
        let mut p = PhysicalParams::fig2();
        p.power = 5e-3;
        p
    }

    #[test]
    fn cubic_three_roots() {
        // (x-1)(x-2)(x-3)
        let r = monic_cubic_roots(-6.0, 11.0, -6.0);
        assert_eq!(r.len(), 3);
        for (a, b) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cubic_one_root() {
        // (x-2)(x^2+1)
        let r = monic_cubic_roots(-2.0, 1.0, -2.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_total_detuning_root() {
        // x (1 + (delta - x)^2) = y with delta = y has the root x = y
        let roots = scaled_roots(0.5, 0.5);
        assert_eq!(roots.len(), 1);
        assert!((roots[0].0 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_shift_limit_is_two_e_over_gamma() {
        // delta0 = 0 and negligible coupling: B_st = 2E/gamma_c
        let mut p = PhysicalParams::fig2();
        p.m = 1e6; // suppress the radiation-pressure shift
        p.omega_0 = p.omega_c;
        let s = solve_all(&p).unwrap();
        assert_eq!(s.len(), 1);
        let e = p.derive().drive;
        assert_relative_eq!(s[0].amplitude, 2.0 * e / p.gamma_c, max_relative = 1e-9);
    }

    #[test]
    fn undriven_cavity() {
        let mut p = PhysicalParams::fig2();
        p.power = 0.0;
        let s = solve_all(&p).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].amplitude, 0.0);
        let r = solve_resonant(&p).unwrap();
        assert_eq!(r.amplitude, 0.0);
        assert_eq!(r.displacement, 0.0);
    }

    #[test]
    fn resonant_fig2_values() {
        let p = PhysicalParams::fig2();
        let s = solve_resonant(&p).unwrap();
        // 2E/gamma_c with E = 4.976e9
        assert_relative_eq!(s.amplitude, 2.1175e4, max_relative = 1e-3);
        assert_relative_eq!(s.intensity, 4.484e8, max_relative = 1e-3);
        assert_eq!(s.detuning, 0.0);
        assert_eq!(s.stability, Stability::Stable);
    }

    #[test]
    fn doubling_power_doubles_intensity() {
        let p = PhysicalParams::fig2();
        let mut p2 = p;
        p2.power *= 2.0;
        let a = solve_resonant(&p).unwrap();
        let b = solve_resonant(&p2).unwrap();
        // the locking frequency moves by ~1e-11 relative, which enters E^2
        assert_relative_eq!(b.intensity / a.intensity, 2.0, max_relative = 1e-10);
    }

    #[test]
    fn resonant_agrees_with_general_solver() {
        let p = PhysicalParams::fig2();
        let r = solve_resonant(&p).unwrap();
        let mut locked = p;
        locked.omega_0 = r.drive_frequency;
        let all = solve_all(&locked).unwrap();
        assert_eq!(all.len(), 1);
        assert!(((all[0].amplitude - r.amplitude) / r.amplitude).abs() < 1e-12);
    }

    #[test]
    fn bistable_roots_and_residuals() {
        let p = bistable_params();
        let kappa = 0.5 * p.gamma_c;
        let states = solve_with_detuning(&p, 6.0 * kappa);
        assert_eq!(states.len(), 3);
        assert_eq!(states[0].stability, Stability::Stable);
        assert_eq!(states[1].stability, Stability::Unstable);
        assert_eq!(states[2].stability, Stability::Stable);
        for s in &states {
            assert!(residual(&p, s) < 1e-10, "{}", residual(&p, s));
        }
    }

    #[test]
    fn sweep_rejects_short_grid() {
        let p = PhysicalParams::fig2();
        assert!(sweep_bistability(&p, 0.0, 1.0, 1).is_err());
    }

    #[test]
    fn sweep_at_zero_detuning_single_rooted() {
        let p = bistable_params();
        let rows = sweep_bistability(&p, -1e-9, 1e-9, 5).unwrap();
        assert!(rows.iter().all(|r| r.roots.len() == 1));
    }

    proptest::proptest! {
        #[test]
        fn roots_satisfy_cubic(delta in -20.0f64..20.0, y in 1e-6f64..200.0) {
            let roots = scaled_roots(delta, y);
            proptest::prop_assert!(roots.len() == 1 || roots.len() == 3 || roots.iter().any(|r| r.1 == Stability::Marginal));
            for (x, _) in roots {
                proptest::prop_assert!(x >= 0.0);
                let res = ((scaled_drive(x, delta) - y) / y).abs();
                proptest::prop_assert!(res < 1e-12, "residual {res}");
            }
        }
    }
}
