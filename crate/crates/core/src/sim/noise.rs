//! Gaussian series with a prescribed two-sided spectral density.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Real stationary Gaussian series of `n` samples spaced `dt` whose
/// periodogram expectation equals `target(w)` on the FFT grid.
///
/// The density is two-sided, `S(w) = int <x(t) x(0)> e^{iwt} dt`, so a
/// constant target `S` gives sample variance `S / dt`.
pub fn synthesize_noise<F>(target: F, n: usize, dt: f64, seed: u64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    synthesize_noise_with(target, n, dt, &mut rng)
}

pub fn synthesize_noise_with<F, R>(target: F, n: usize, dt: f64, rng: &mut R) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64,
    R: Rng + ?Sized,
{
    if n == 0 {
        return Ok(Vec::new());
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain("time step must be positive".into()));
    }
    let d_omega = 2.0 * std::f64::consts::PI / (n as f64 * dt);
    let half = n / 2;
    let mut density = Vec::with_capacity(half + 1);
    for k in 0..=half {
        let w = k as f64 * d_omega;
        let (plus, minus) = (target(w), target(-w));
        if !(plus >= 0.0 && minus >= 0.0) || !plus.is_finite() {
            return Err(Error::Domain(format!(
                "target density must be finite and non-negative, got {plus} at w = {w}"
            )));
        }
        if (plus - minus).abs() > 1e-12 * plus.abs().max(minus.abs()) {
            return Err(Error::Domain(format!("target density is not even at w = {w}")));
        }
        density.push(plus);
    }
    if density.iter().all(|&s| s == 0.0) {
        return Ok(vec![0.0; n]);
    }

    let scale = n as f64 / dt;
    let mut spec = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..=half {
        let amp = (density[k] * scale).sqrt();
        let self_conjugate = k == 0 || 2 * k == n;
        if self_conjugate {
            let a: f64 = rng.sample(StandardNormal);
            spec[k] = Complex64::new(amp * a, 0.0);
        } else {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            let z = Complex64::new(a, b) * (amp * std::f64::consts::FRAC_1_SQRT_2);
            spec[k] = z;
            spec[n - k] = z.conj();
        }
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(n).process(&mut spec);
    let norm = 1.0 / n as f64;
    Ok(spec.iter().map(|z| z.re * norm).collect())
}
