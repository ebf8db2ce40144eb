//! Monte-Carlo integration of the linearized Langevin equations at zero
//! detuning, used to cross-check the closed-form spectrum.
//!
//! Internally time is measured in units of `1/omega_S`, the mirror
//! position in `q0 = sqrt(hbar / m omega_S)` and its momentum in
//! `m omega_S q0`. With `lambda = omega_c B q0 / (L omega_S)` and rates
//! scaled by `omega_S` the system reads
//!
//! ```text
//! q' = p
//! p' = -q - g_m p + lambda X + f
//! X' = -(g_c/2) X + sqrt(g_c) X_in
//! Y' = -(g_c/2) Y + 2 lambda q + sqrt(g_c) Y_in
//! Y_out = sqrt(g_c) Y - Y_in
//! ```
//!
//! `X_in`, `Y_in` are white with unit two-sided density and `f` has the
//! symmetrized thermal density of the chosen [`NoiseModel`]. The linear
//! drift is integrated exactly with inputs held constant over each step.

mod discrete;
mod noise;
mod psd;

use std::io::{Read, Write};

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{thermal_factor, NoiseModel};
use crate::model::{constants::HBAR, PhysicalParams};
use crate::spectrum::{SpectrumComponents, RESONANCE_TOL};
use crate::steady_state::SteadyState;

use discrete::Discrete;
pub use noise::{synthesize_noise, synthesize_noise_with};
pub use psd::{combine_records, welch, PsdEstimate, Welch};

/// Largest `dt * max(gamma_c, omega_S)` accepted, in internal units.
pub const MAX_STEP: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Time step in units of `1/omega_S`.
    pub dt: f64,
    pub n_steps: usize,
    pub n_traj: usize,
    pub seed: u64,
    /// Fraction of each trajectory discarded before spectral estimation.
    pub burn_in: f64,
    pub welch_segment: usize,
    /// Eliminate the cavity adiabatically instead of integrating it.
    pub adiabatic: bool,
    pub thermal: bool,
    pub vacuum: bool,
    /// Multiplies every noise amplitude.
    pub noise_scale: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 0.02,
            n_steps: 1 << 16,
            n_traj: 1,
            seed: 0,
            burn_in: 0.1,
            welch_segment: 8192,
            adiabatic: false,
            thermal: true,
            vacuum: true,
            noise_scale: 1.0,
        }
    }
}

impl SimConfig {
    pub fn burn_steps(&self) -> usize {
        (self.n_steps as f64 * self.burn_in).ceil() as usize
    }

    pub fn kept_steps(&self) -> usize {
        self.n_steps.saturating_sub(self.burn_steps())
    }

    pub fn validate(&self, model: &SimModel) -> Result<()> {
        let fail = |m: String| Err(Error::Domain(m));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return fail("dt must be positive".into());
        }
        let fastest = model.cavity.max(1.0).max(model.damping);
        if self.dt * fastest >= MAX_STEP {
            return fail(format!(
                "dt = {} too coarse: dt * max(gamma_c, omega_S) = {:.3} must stay below {MAX_STEP}",
                self.dt,
                self.dt * fastest
            ));
        }
        if self.n_traj == 0 {
            return fail("at least one trajectory required".into());
        }
        if !(0.0..1.0).contains(&self.burn_in) {
            return fail("burn_in must lie in [0, 1)".into());
        }
        if self.welch_segment > self.kept_steps() {
            return fail(format!(
                "Welch segment {} longer than the {} steps kept after burn-in",
                self.welch_segment,
                self.kept_steps()
            ));
        }
        if !(self.noise_scale >= 0.0 && self.noise_scale.is_finite()) {
            return fail("noise_scale must be finite and non-negative".into());
        }
        Ok(())
    }
}

/// Dimensionless coefficients of the linearized system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimModel {
    /// rad/s; sets the time unit.
    pub omega_s: f64,
    /// `q0` in metres.
    pub q_scale: f64,
    /// `m omega_S q0` in kg m/s.
    pub p_scale: f64,
    /// `eta / (m omega_S)`
    pub damping: f64,
    /// `omega_c B q0 / (L omega_S)`
    pub coupling: f64,
    /// `gamma_c / omega_S`
    pub cavity: f64,
    /// Converts the force density `eta * thermal_factor` to internal units.
    pub force_scale: f64,
    pub noise: NoiseModel,
}

impl SimModel {
    pub fn new(params: &PhysicalParams, op: &SteadyState, model: &NoiseModel) -> Result<Self> {
        params.checked()?;
        model.check()?;
        if op.detuning.abs() > RESONANCE_TOL * params.gamma_c {
            return Err(Error::NonResonant {
                delta: op.detuning,
            });
        }
        let w = params.omega_s;
        let q_scale = (HBAR / (params.m * w)).sqrt();
        Ok(SimModel {
            omega_s: w,
            q_scale,
            p_scale: params.m * w * q_scale,
            damping: params.damping_rate() / w,
            coupling: params.omega_c * op.amplitude * q_scale / (params.length * w),
            cavity: params.gamma_c / w,
            force_scale: params.eta / (params.m * HBAR * w * w),
            noise: *model,
        })
    }

    /// Two-sided density of the thermal force at internal frequency `w`.
    pub fn thermal_density(&self, w: f64) -> Result<f64> {
        Ok(self.force_scale * thermal_factor(w * self.omega_s, &self.noise)?)
    }

    fn mechanical(&self, w: f64) -> f64 {
        let d = 1.0 - w * w;
        d * d + self.damping * self.damping * w * w
    }

    /// Closed-form output spectrum of the full system in internal units.
    pub fn analytic_spectrum(&self, w: f64) -> Result<SpectrumComponents> {
        let lorentz = 0.25 * self.cavity * self.cavity + w * w;
        let l2g = self.coupling * self.coupling * self.cavity;
        let mech = self.mechanical(w);
        let radiation_pressure = 4.0 * l2g * l2g / (lorentz * lorentz * mech);
        let thermal = 4.0 * l2g * self.thermal_density(w)? / (lorentz * mech);
        Ok(SpectrumComponents {
            shot: 1.0,
            radiation_pressure,
            thermal,
            total: 1.0 + radiation_pressure + thermal,
        })
    }

    /// Thermal part of the position spectrum `|chi|^2 S_f`, internal units.
    pub fn thermal_position_spectrum(&self, w: f64) -> Result<f64> {
        Ok(self.thermal_density(w)? / self.mechanical(w))
    }

    fn discrete(&self, dt: f64, adiabatic: bool) -> Discrete {
        let (g, l, c) = (self.damping, self.coupling, self.cavity);
        let k = 0.5 * c;
        let sc = c.sqrt();
        if adiabatic {
            // X = 2 X_in / sqrt(g_c), Y_out = (4 lambda / sqrt(g_c)) q + Y_in
            let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, -g]);
            let b = DMatrix::from_row_slice(2, 3, &[0.0, 0.0, 0.0, 1.0, 2.0 * l / sc, 0.0]);
            Discrete::new(&a, &b, &[4.0 * l / sc, 0.0], &[0.0, 0.0, 1.0], dt)
        } else {
            #[rustfmt::skip]
            let a = DMatrix::from_row_slice(4, 4, &[
                0.0, 1.0, 0.0, 0.0,
                -1.0, -g, l, 0.0,
                0.0, 0.0, -k, 0.0,
                2.0 * l, 0.0, 0.0, -k,
            ]);
            #[rustfmt::skip]
            let b = DMatrix::from_row_slice(4, 3, &[
                0.0, 0.0, 0.0,
                1.0, 0.0, 0.0,
                0.0, sc, 0.0,
                0.0, 0.0, sc,
            ]);
            Discrete::new(&a, &b, &[0.0, 0.0, 0.0, sc], &[0.0, 0.0, -1.0], dt)
        }
    }
}

/// One sampled trajectory in physical units. `x_quad`, `y_quad` are the
/// dimensionless cavity quadratures, `y_out` is in s^-1/2 and averaged over
/// each step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub x_quad: Vec<f64>,
    pub y_quad: Vec<f64>,
    pub y_out: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Physical sample spacing.
    pub fn dt(&self) -> f64 {
        if self.t.len() < 2 {
            0.0
        } else {
            self.t[1] - self.t[0]
        }
    }

    fn columns(&self) -> [&Vec<f64>; 6] {
        [&self.t, &self.q, &self.p, &self.x_quad, &self.y_quad, &self.y_out]
    }

    /// Columnar dump: six blocks of little-endian f64 in the order
    /// t, q, p, X, Y, Y_out, each `len()` values long.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        for col in self.columns() {
            for v in col {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() % 48 != 0 {
            return Err(Error::Domain(format!(
                "trajectory dump of {} bytes is not six f64 columns",
                bytes.len()
            )));
        }
        let n = bytes.len() / 48;
        let mut cols = bytes
            .chunks_exact(8 * n.max(1))
            .map(|chunk| {
                chunk
                    .chunks_exact(8)
                    .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>();
        cols.resize(6, Vec::new());
        let mut it = cols.into_iter();
        let mut next = || it.next().unwrap_or_default();
        Ok(Trajectory {
            t: next(),
            q: next(),
            p: next(),
            x_quad: next(),
            y_quad: next(),
            y_out: next(),
        })
    }
}

/// Random stream of trajectory `index`: independent of scheduling.
fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Integrates trajectory `index` of the ensemble described by `cfg`.
pub fn integrate_model(model: &SimModel, cfg: &SimConfig, index: u64) -> Result<Trajectory> {
    cfg.validate(model)?;
    let n = cfg.n_steps;
    let dt = cfg.dt;
    let mut rng = trajectory_rng(cfg.seed, index);
    let s = cfg.noise_scale;

    let force = if cfg.thermal && s > 0.0 {
        synthesize_noise_with(
            |w| model.thermal_density(w).unwrap_or(f64::NAN),
            n,
            dt,
            &mut rng,
        )?
    } else {
        vec![0.0; n]
    };
    let vacuum_amp = if cfg.vacuum { s / dt.sqrt() } else { 0.0 };

    let disc = model.discrete(dt, cfg.adiabatic);
    let mut state = vec![0.0; disc.nx];
    let mut scratch = vec![0.0; disc.nx];
    let mut traj = Trajectory {
        t: Vec::with_capacity(n),
        q: Vec::with_capacity(n),
        p: Vec::with_capacity(n),
        x_quad: Vec::with_capacity(n),
        y_quad: Vec::with_capacity(n),
        y_out: Vec::with_capacity(n),
    };
    let sc = model.cavity.sqrt();
    let k = 0.5 * model.cavity;
    let out_scale = model.omega_s.sqrt();
    for (step, f) in force.iter().enumerate() {
        let (xi, yi) = if cfg.vacuum {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            (a * vacuum_amp, b * vacuum_amp)
        } else {
            (0.0, 0.0)
        };
        let u = [s * f, xi, yi];
        let (xq, yq) = if cfg.adiabatic {
            (2.0 * xi / sc, (2.0 * model.coupling * state[0] + sc * yi) / k)
        } else {
            (state[2], state[3])
        };
        traj.t.push(step as f64 * dt / model.omega_s);
        traj.q.push(state[0] * model.q_scale);
        traj.p.push(state[1] * model.p_scale);
        traj.x_quad.push(xq);
        traj.y_quad.push(yq);
        let y = disc.step(&mut state, &u, &mut scratch);
        if !y.is_finite() || state.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "trajectory {index}: non-finite state at step {step}"
            )));
        }
        traj.y_out.push(y * out_scale);
    }
    Ok(traj)
}

/// Single trajectory (index 0) for the given operating point.
pub fn integrate(
    params: &PhysicalParams,
    op: &SteadyState,
    model: &NoiseModel,
    cfg: &SimConfig,
) -> Result<Trajectory> {
    integrate_model(&SimModel::new(params, op, model)?, cfg, 0)
}

/// Welch estimate of `Y_out` after burn-in, averaged over trajectories.
pub fn estimate_psd(trajectories: &[Trajectory], cfg: &SimConfig) -> Result<PsdEstimate> {
    let first = trajectories
        .first()
        .ok_or_else(|| Error::Domain("no trajectories to analyse".into()))?;
    let dt = first.dt();
    let burn = cfg.burn_steps();
    if trajectories.len() == 1 {
        return welch(first.y_out.get(burn..).unwrap_or(&[]), dt, cfg.welch_segment);
    }
    let w = Welch::new(cfg.welch_segment)?;
    let records = trajectories
        .iter()
        .map(|tr| w.average(tr.y_out.get(burn..).unwrap_or(&[]), dt))
        .collect::<Result<Vec<_>>>()?;
    combine_records(w.frequencies(dt), &records)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub psd: PsdEstimate,
    /// Diagnostics of trajectories dropped for non-finite values.
    pub rejected: Vec<String>,
}

/// Runs the ensemble in parallel and reduces each trajectory to its
/// spectrum as soon as it is done. Results do not depend on the thread
/// schedule.
pub fn simulate_model(model: &SimModel, cfg: &SimConfig) -> Result<SimulationResult> {
    cfg.validate(model)?;
    let welch = Welch::new(cfg.welch_segment)?;
    let burn = cfg.burn_steps();
    let outcomes: Vec<Result<Vec<Vec<f64>>>> = (0..cfg.n_traj as u64)
        .into_par_iter()
        .map(|i| {
            let tr = integrate_model(model, cfg, i)?;
            let kept = &tr.y_out[burn..];
            let dt = cfg.dt / model.omega_s;
            if cfg.n_traj == 1 {
                welch.periodograms(kept, dt)
            } else {
                Ok(vec![welch.average(kept, dt)?])
            }
        })
        .collect();
    let mut records = Vec::new();
    let mut rejected = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => records.extend(r),
            Err(Error::Numerical(msg)) => rejected.push(msg),
            Err(e) => return Err(e),
        }
    }
    if records.is_empty() {
        return Err(Error::Numerical(format!(
            "all trajectories rejected: {}",
            rejected.join("; ")
        )));
    }
    let mut psd = combine_records(welch.frequencies(cfg.dt / model.omega_s), &records)?;
    if cfg.n_traj == 1 {
        psd.n_records = records.len();
    }
    Ok(SimulationResult { psd, rejected })
}

pub fn simulate_psd(
    params: &PhysicalParams,
    op: &SteadyState,
    model: &NoiseModel,
    cfg: &SimConfig,
) -> Result<SimulationResult> {
    simulate_model(&SimModel::new(params, op, model)?, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::NoiseKind;
    use crate::spectrum::spectrum_at;
    use crate::steady_state::solve_resonant;
    use approx::assert_relative_eq;

    fn fig2_model() -> (PhysicalParams, SteadyState, SimModel) {
        let p = PhysicalParams::fig2();
        let op = solve_resonant(&p).unwrap();
        let m = SimModel::new(&p, &op, &NoiseModel::new(NoiseKind::Exact, &p)).unwrap();
        (p, op, m)
    }

    #[test]
    fn fig2_coefficients() {
        let (_, _, m) = fig2_model();
        assert_relative_eq!(m.cavity, 4.7e5 / 1.3e5, max_relative = 1e-12);
        assert_relative_eq!(m.damping, 3e-2 / 1.3e5, max_relative = 1e-12);
        assert!((0.2..0.3).contains(&m.coupling), "{}", m.coupling);
    }

    #[test]
    fn internal_spectrum_matches_physical() {
        let (p, op, m) = fig2_model();
        let model = NoiseModel::new(NoiseKind::Exact, &p);
        for w in [0.1, 0.5, 0.999, 1.0, 1.3, 7.0, 150.0] {
            let a = m.analytic_spectrum(w).unwrap();
            let b = spectrum_at(w * p.omega_s, &p, &op, &model).unwrap();
            assert_relative_eq!(a.radiation_pressure, b.radiation_pressure, max_relative = 1e-10);
            assert_relative_eq!(a.thermal, b.thermal, max_relative = 1e-10);
        }
    }

    #[test]
    fn config_guards() {
        let (_, _, m) = fig2_model();
        let ok = SimConfig::default();
        assert!(ok.validate(&m).is_ok());
        let coarse = SimConfig { dt: 0.05, ..ok.clone() };
        assert!(coarse.validate(&m).is_err());
        let long = SimConfig { welch_segment: 1 << 17, ..ok.clone() };
        assert!(long.validate(&m).is_err());
        let none = SimConfig { n_traj: 0, ..ok };
        assert!(none.validate(&m).is_err());
    }

    #[test]
    fn trajectory_rng_streams_differ() {
        let mut a = trajectory_rng(5, 0);
        let mut b = trajectory_rng(5, 1);
        assert_ne!(a.random::<u64>(), b.random::<u64>());
    }

    #[test]
    fn binary_round_trip() {
        let tr = Trajectory {
            t: vec![0.0, 1.0],
            q: vec![1e-20, -2e-20],
            p: vec![3.0, 4.0],
            x_quad: vec![0.5, f64::MIN_POSITIVE],
            y_quad: vec![-0.25, 1e300],
            y_out: vec![7.0, 8.0],
        };
        let mut buf = Vec::new();
        tr.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 2 * 48);
        assert_eq!(&buf[16..24], &1e-20f64.to_le_bytes());
        assert_eq!(Trajectory::read_binary(buf.as_slice()).unwrap(), tr);
        assert!(Trajectory::read_binary(&buf[..50]).is_err());
    }
}
