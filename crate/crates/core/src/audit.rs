//! Commutator bookkeeping for the harmonically bound Brownian particle.
//!
//! Every commutator of this linear system is a c-number, so the operator
//! identities can be checked with propagators and quadrature. Times are
//! measured from the initial time `t0`; the Langevin force obeys
//! `[Q(t), Q(t')] = 2 i hbar eta d/dt delta(t - t')` in the infinite-cutoff
//! limit. Derivatives of the delta function are moved onto the smooth
//! Green functions by integration by parts, with `theta(0) = 1/2` at the
//! window edges and `S(0) = 0` for the sign function.
//!
//! With the force commutator, `[q(t), p(t)] / (i hbar)` reads
//!
//! ```text
//! c(u) = det G(u) + (2 eta / m) int_0^u G_pp(s)^2 ds - eta G_qp(u) G_pp(u)
//! ```
//!
//! where `det G(u) = exp(-eta u / m)` is all that survives when the force
//! commutator is dropped.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::linspace;
use crate::kernels::{delta_tilde, KernelConfig};
use crate::model::PhysicalParams;
use crate::quad;

/// Absolute quadrature tolerance for dimensionless commutators.
const QUAD_TOL: f64 = 1e-13;

/// Fundamental solution of `q' = p/m`, `p' = -m wS^2 q - (eta/m) p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenFunctions {
    pub qq: f64,
    pub qp: f64,
    pub pq: f64,
    pub pp: f64,
}

impl GreenFunctions {
    pub fn determinant(&self) -> f64 {
        self.qq * self.pp - self.qp * self.pq
    }
}

/// Closed-form propagator entries after `elapsed` seconds. Under-, over-
/// and critically damped cases share one expression through
/// `c = cos(w t)`/`cosh`, `s = sin(w t)/w`/`sinh(w t)/w`.
pub fn green(params: &PhysicalParams, elapsed: f64) -> GreenFunctions {
    let m = params.m;
    let w2 = params.omega_s * params.omega_s;
    let half = 0.5 * params.damping_rate();
    let disc = w2 - half * half;
    let t = elapsed;
    let (c, s) = if (disc * t * t).abs() < 1e-10 {
        let z = disc * t * t;
        (1.0 - z / 2.0 + z * z / 24.0, t * (1.0 - z / 6.0 + z * z / 120.0))
    } else if disc > 0.0 {
        let w = disc.sqrt();
        ((w * t).cos(), (w * t).sin() / w)
    } else {
        let w = (-disc).sqrt();
        ((w * t).cosh(), (w * t).sinh() / w)
    };
    let e = (-half * t).exp();
    GreenFunctions {
        qq: e * (c + half * s),
        qp: e * s / m,
        pq: -m * w2 * e * s,
        pp: e * (c - half * s),
    }
}

/// Heaviside step with `theta(0) = 1/2`.
pub fn theta(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// Sign function with `S(0) = 0`.
pub fn sign(x: f64) -> f64 {
    theta(x) - theta(-x)
}

/// Support function of the mixed commutators.
pub fn xi(t: f64, t_prime: f64, t0: f64) -> f64 {
    theta(t - t0) * theta(t - t_prime) * theta(t_prime - t0)
        - theta(t0 - t) * theta(t_prime - t) * theta(t0 - t_prime)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutatorReport {
    pub t: Vec<f64>,
    /// `[q(t), p(t)] / (i hbar)`, real part.
    pub c_real: Vec<f64>,
    pub c_imag: Vec<f64>,
    pub deviation: Vec<f64>,
    pub max_deviation: f64,
    /// Residuals of `[q(t), Q(t)] = (eta/m) S(t - t0) [q(t), p(t)]` per node.
    pub xi_residuals: Vec<f64>,
}

fn check_params(params: &PhysicalParams) -> Result<()> {
    params.checked()?;
    Ok(())
}

/// `[q(t), p(t)] / (i hbar)` on `n_grid` points of `[t0, t0 + t_max]`.
pub fn audit_qp_commutator(
    params: &PhysicalParams,
    t_max: f64,
    n_grid: usize,
) -> Result<CommutatorReport> {
    audit_qp_commutator_with(params, t_max, n_grid, true)
}

/// As [`audit_qp_commutator`]; `noise_commutator = false` drops the
/// force commutator and leaves only the propagator determinant.
pub fn audit_qp_commutator_with(
    params: &PhysicalParams,
    t_max: f64,
    n_grid: usize,
    noise_commutator: bool,
) -> Result<CommutatorReport> {
    check_params(params)?;
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::Domain("t_max must be positive".into()));
    }
    if n_grid < 2 {
        return Err(Error::Domain("audit grid needs at least two points".into()));
    }
    let t = linspace(0.0, t_max, n_grid);
    let eta = params.eta;
    let m = params.m;
    let period = 2.0 * std::f64::consts::PI / params.omega_s;

    let mut integral = 0.0;
    let mut c_real = Vec::with_capacity(n_grid);
    let mut xi_residuals = Vec::with_capacity(n_grid);
    for (k, &u) in t.iter().enumerate() {
        if k > 0 && noise_commutator {
            let lo = t[k - 1];
            let panels = ((u - lo) / period * 4.0).ceil().max(1.0) as usize;
            let est = quad::integrate(
                |s| green(params, s).pp.powi(2),
                lo,
                u,
                QUAD_TOL * (u - lo),
                QUAD_TOL,
                panels,
            )?;
            integral += est.value;
        }
        let g = green(params, u);
        let mut c = g.determinant();
        if noise_commutator {
            c += 2.0 * eta / m * integral - eta * g.qp * g.pp;
        }
        c_real.push(c);
        let residual = if noise_commutator && k > 0 {
            let audit = audit_xi_relation(params, u, u, 0.0)?;
            let target = params.damping_rate() * sign(u) * c;
            (audit.direct - target).abs() / target.abs().max(f64::MIN_POSITIVE)
        } else {
            0.0
        };
        xi_residuals.push(residual);
    }
    let deviation: Vec<f64> = c_real.iter().map(|c| (c - 1.0).abs()).collect();
    let max_deviation = deviation.iter().copied().fold(0.0, f64::max);
    Ok(CommutatorReport {
        c_imag: vec![0.0; t.len()],
        t,
        c_real,
        deviation,
        max_deviation,
        xi_residuals,
    })
}

/// `[q(t), q(t')] / (i hbar)` for `t >= t' >= t0` in elapsed times
/// `u = t - t0`, `u' = t' - t0`.
fn position_commutator_forward(params: &PhysicalParams, u: f64, u_prime: f64) -> Result<f64> {
    let eta = params.eta;
    let m = params.m;
    let g = green(params, u);
    let gp = green(params, u_prime);
    let homogeneous = g.qq * gp.qp - g.qp * gp.qq;
    let period = 2.0 * std::f64::consts::PI / params.omega_s;
    let panels = (u_prime / period * 4.0).ceil().max(1.0) as usize;
    let scale = u_prime / m;
    let conv = quad::integrate(
        |s| green(params, u_prime - s).qp * green(params, u - s).pp,
        0.0,
        u_prime,
        QUAD_TOL * scale * u_prime.max(f64::MIN_POSITIVE) / m.max(f64::MIN_POSITIVE),
        QUAD_TOL,
        panels,
    )?;
    Ok(homogeneous + 2.0 * eta * (conv.value / m - 0.5 * g.qp * gp.qp))
}

/// `d/du' [q(t), q(t')] / (i hbar)` for `u >= u' >= 0`.
fn position_commutator_forward_slope(params: &PhysicalParams, u: f64, u_prime: f64) -> Result<f64> {
    let eta = params.eta;
    let m = params.m;
    let g = green(params, u);
    let gp = green(params, u_prime);
    let homogeneous = (g.qq * gp.pp - g.qp * gp.pq) / m;
    let period = 2.0 * std::f64::consts::PI / params.omega_s;
    let panels = (u_prime / period * 4.0).ceil().max(1.0) as usize;
    let conv = quad::integrate(
        |s| green(params, u_prime - s).pp * green(params, u - s).pp,
        0.0,
        u_prime,
        QUAD_TOL * u_prime,
        QUAD_TOL,
        panels,
    )?;
    Ok(homogeneous + 2.0 * eta / (m * m) * conv.value - eta / m * g.qp * gp.pp)
}

/// `[q(t), q(t')] / (i hbar)` from the propagator, including the force
/// commutator. Both times must lie on the same side of `t0`.
pub fn position_commutator(params: &PhysicalParams, t: f64, t_prime: f64, t0: f64) -> Result<f64> {
    check_params(params)?;
    let (a, b) = (t - t0, t_prime - t0);
    if a * b < 0.0 {
        return Err(Error::Domain("times must lie on the same side of t0".into()));
    }
    // before t0 the evolution is the time reverse of the forward one,
    // which flips the sign of every commutator
    let (u, v, flip) = if a >= 0.0 && b >= 0.0 {
        (a, b, 1.0)
    } else {
        (-a, -b, -1.0)
    };
    if u >= v {
        Ok(flip * position_commutator_forward(params, u, v)?)
    } else {
        Ok(-flip * position_commutator_forward(params, v, u)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiAudit {
    /// `[q(t), Q(t')] / (i hbar)` from the equations of motion.
    pub direct: f64,
    /// `2 eta d/dt' { [q(t), q(t')] Xi(t, t', t0) } / (i hbar)`.
    pub relation: f64,
    pub residual: f64,
    /// Set when `t'` had to be moved off a discontinuity.
    pub note: Option<String>,
}

/// Fixed-step RK4 for the mixed commutator `(X, Y)` with sign `s` on the
/// damping term, from `from` to `to` (either direction).
fn evolve_mixed(params: &PhysicalParams, state: [f64; 2], from: f64, to: f64, s: f64) -> [f64; 2] {
    let m = params.m;
    let w2 = params.omega_s * params.omega_s;
    let rate = params.damping_rate();
    let span = to - from;
    let stiffness = params.omega_s.max(rate);
    let n = ((span.abs() * stiffness * 400.0).ceil() as usize).max(2000);
    let h = span / n as f64;
    let f = |x: [f64; 2]| [x[1] / m, -m * w2 * x[0] - rate * s * x[1]];
    let mut x = state;
    for _ in 0..n {
        let k1 = f(x);
        let k2 = f([x[0] + 0.5 * h * k1[0], x[1] + 0.5 * h * k1[1]]);
        let k3 = f([x[0] + 0.5 * h * k2[0], x[1] + 0.5 * h * k2[1]]);
        let k4 = f([x[0] + h * k3[0], x[1] + h * k3[1]]);
        x[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        x[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    }
    x
}

/// `[q(t), Q(t')] / (i hbar)` by integrating the mixed-commutator equations
/// with their `delta'` source, starting from zero at `t0`.
fn mixed_commutator_direct(params: &PhysicalParams, t: f64, t_prime: f64, t0: f64) -> f64 {
    let strength = 2.0 * params.eta;
    let m = params.m;
    let rate = params.damping_rate();
    let side = sign(t - t0);
    if side == 0.0 {
        return 0.0;
    }
    // the source acts only between t0 and t
    let inside = if side > 0.0 {
        t_prime > t0 && t_prime <= t
    } else {
        t_prime < t0 && t_prime >= t
    };
    if !inside {
        return 0.0;
    }
    // across t' the delta' source makes X jump by strength/m and the
    // damping term turns the delta part of Y into a jump of -rate*S*strength
    if t_prime == t {
        return side * 0.5 * strength / m;
    }
    let start = if side > 0.0 {
        [strength / m, -rate * strength]
    } else {
        [-strength / m, -rate * strength]
    };
    evolve_mixed(params, start, t_prime, t, side)[0]
}

/// Checks the representation of `[q(t), Q(t')]` through `[q(t), q(t')]`
/// and the support function `Xi`.
pub fn audit_xi_relation(params: &PhysicalParams, t: f64, t_prime: f64, t0: f64) -> Result<XiAudit> {
    check_params(params)?;
    let mut note = None;
    let mut tp = t_prime;
    if tp == t0 && t != t0 {
        let step = 1e-6 * (t - t0).abs().min(1.0 / params.omega_s);
        tp = t0 + step * sign(t - t0);
        note = Some(format!("t' = t0 is a discontinuity of Xi; evaluated at t' = {tp:e}"));
    }
    let direct = mixed_commutator_direct(params, t, tp, t0);
    let support = xi(t, tp, t0);
    let relation = if support == 0.0 {
        0.0
    } else {
        // [q(t), q(t)] = 0 removes the delta from d Xi / dt' at t' = t
        let slope = if t > t0 {
            position_commutator_forward_slope(params, t - t0, tp - t0)?
        } else {
            // u' = t0 - t' so d/dt' = -d/du' and the reversal flips the sign once more
            position_commutator_forward_slope(params, t0 - t, t0 - tp)?
        };
        2.0 * params.eta * support * slope
    };
    let scale = direct.abs().max(relation.abs());
    let residual = if scale == 0.0 {
        0.0
    } else {
        (direct - relation).abs() / scale
    };
    Ok(XiAudit {
        direct,
        relation,
        residual,
        note,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignIdentityAudit {
    /// `int_{t0}^{t} delta~(t - t') p(t') dt'` with a finite cutoff.
    pub integral: f64,
    /// `S(t - t0) p(t) / 2`.
    pub expected: f64,
    /// `|integral - expected| / |p(t)|`.
    pub residual: f64,
}

/// Smooth test momentum: a free damped oscillation started at `t0`.
pub fn test_momentum(params: &PhysicalParams, t: f64, t0: f64) -> f64 {
    let g = green(params, t - t0);
    g.pp + params.m * params.omega_s * g.qp
}

/// Finite-cutoff check of `int_{t0}^{t} delta(t - t') p(t') dt' = S(t - t0) p(t) / 2`.
pub fn audit_sign_identity(params: &PhysicalParams, t: f64, t0: f64, cutoff: f64) -> Result<SignIdentityAudit> {
    check_params(params)?;
    let cfg = KernelConfig::finite(cutoff)?;
    let p_t = test_momentum(params, t, t0);
    let expected = sign(t - t0) * p_t / 2.0;
    if t == t0 {
        return Ok(SignIdentityAudit {
            integral: 0.0,
            expected,
            residual: 0.0,
        });
    }
    let span = (t - t0).abs();
    let panels = ((cutoff * span / std::f64::consts::PI).ceil() as usize + 1).min(1_000_000);
    let kernel_scale = cutoff / std::f64::consts::PI;
    // integrate over the lag v = t - t' in [0, span]
    let direction = sign(t - t0);
    let est = quad::integrate(
        |v| {
            let tp = t - direction * v;
            delta_tilde(v, &cfg).unwrap_or(f64::NAN) * test_momentum(params, tp, t0)
        },
        0.0,
        span,
        1e-12 * kernel_scale * span * p_t.abs().max(1e-300),
        1e-12,
        panels,
    )?;
    let integral = direction * est.value;
    Ok(SignIdentityAudit {
        integral,
        expected,
        residual: (integral - expected).abs() / p_t.abs(),
    })
}

/// Largest sign-identity residual over one oscillation period of the
/// cutoff, `cutoff .. cutoff + 2 pi / |t - t0|`, sampled at `samples` points.
/// Removes the oscillatory factor from the `1/cutoff` convergence.
pub fn sign_identity_envelope(
    params: &PhysicalParams,
    t: f64,
    t0: f64,
    cutoff: f64,
    samples: usize,
) -> Result<f64> {
    let span = (t - t0).abs();
    if span == 0.0 {
        return Ok(0.0);
    }
    let period = 2.0 * std::f64::consts::PI / span;
    let mut worst: f64 = 0.0;
    for k in 0..samples.max(1) {
        let omega = cutoff + period * k as f64 / samples.max(1) as f64;
        worst = worst.max(audit_sign_identity(params, t, t0, omega)?.residual);
    }
    Ok(worst)
}
