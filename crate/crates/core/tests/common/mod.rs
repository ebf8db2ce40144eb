//! Brute-force oracles shared by the integration tests and the acceptance
//! harness. Near zeros of an oscillating kernel a relative error is
//! meaningless, so errors are measured against the larger of the value
//! and a fixed fraction of the integrand's absolute integral.

#![allow(dead_code)]

use mirrornoise::kernels::{delta_tilde, f_i, f_r, KernelConfig};
use mirrornoise::model::constants::{HBAR, K_B};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Fraction of the absolute integral used as the error floor.
pub const FLOOR: f64 = 1e-2;

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = 2 * panels;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, nodes: usize) -> f64 {
    let h = (b - a) / (nodes - 1) as f64;
    let mut acc = 0.5 * (f(a) + f(b));
    for i in 1..nodes - 1 {
        acc += f(a + i as f64 * h);
    }
    acc * h
}

pub struct OracleSummary {
    pub worst: f64,
    pub samples: usize,
}

/// Worst normalized error of `delta_tilde` against Simpson quadrature of
/// `(1/pi) int_0^Omega cos(w t) dw`; must stay below `quad_tol`.
pub fn delta_tilde_oracle(seed: u64, samples: usize) -> OracleSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let omega = 10f64.powf(rng.random_range(3.0..14.0));
        let t = rng.random_range(-100.0..100.0) / omega;
        let cfg = KernelConfig::finite(omega).unwrap();
        let value = delta_tilde(t, &cfg).unwrap();
        let panels = 200_000;
        let oracle = simpson(|w| (w * t).cos() / PI, 0.0, omega, panels);
        let l1 = simpson(|w| (w * t).cos().abs() / PI, 0.0, omega, panels);
        let scale = oracle.abs().max(FLOOR * l1);
        worst = worst.max((value - oracle).abs() / scale / cfg.quad_tol);
    }
    OracleSummary { worst, samples }
}

/// Worst normalized error of `F_r` against a 10^6-node trapezoid rule
/// applied to `w coth(hbar w / 2kT) cos(w tau)`; must stay below 1e-6.
pub fn f_r_oracle(seed: u64, samples: usize) -> OracleSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let omega = 10f64.powf(rng.random_range(11.0..14.0));
        let temperature = 10f64.powf(rng.random_range(-0.5..2.5));
        let tau = rng.random_range(-50.0..50.0) / omega;
        let cfg = KernelConfig::finite(omega).unwrap();
        let value = f_r(tau, temperature, &cfg).unwrap();
        let a = HBAR / (2.0 * K_B * temperature);
        let integrand = |w: f64| {
            let occ = if w == 0.0 { 1.0 / a } else { w / (a * w).tanh() };
            occ * (w * tau).cos()
        };
        let nodes = 1_000_001;
        let oracle = trapezoid(integrand, 0.0, omega, nodes);
        let l1 = trapezoid(|w| integrand(w).abs(), 0.0, omega, nodes);
        let scale = oracle.abs().max(FLOOR * l1);
        worst = worst.max((value - oracle).abs() / scale / 1e-6);
    }
    OracleSummary { worst, samples }
}

/// Worst normalized error of `F_i` against `pi` times a central difference
/// of `delta_tilde` with step `1e-6 / Omega`; must stay below 1e-6.
pub fn f_i_oracle(seed: u64, samples: usize) -> OracleSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let omega = 10f64.powf(rng.random_range(3.0..14.0));
        let tau = rng.random_range(-100.0..100.0) / omega;
        let cfg = KernelConfig::finite(omega).unwrap();
        let value = f_i(tau, &cfg).unwrap();
        let h = 1e-6 / omega;
        let fd = PI * (delta_tilde(tau + h, &cfg).unwrap() - delta_tilde(tau - h, &cfg).unwrap())
            / (2.0 * h);
        // int_0^Omega w |sin(w tau)| dw ~ Omega^2 / pi for many periods
        let l1 = simpson(|w| w * (w * tau).sin().abs(), 0.0, omega, 20_000);
        let scale = value.abs().max(FLOOR * l1);
        worst = worst.max((value - fd).abs() / scale / 1e-6);
        assert_eq!(f_i(-tau, &cfg).unwrap(), -value);
    }
    OracleSummary { worst, samples }
}
