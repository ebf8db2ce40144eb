//! Welch spectral estimation.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Spectral estimate on the non-negative FFT frequencies. Values are
/// two-sided densities: unit white noise reads 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdEstimate {
    /// rad/s
    pub omega: Vec<f64>,
    pub s_hat: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Number of independent records averaged (trajectories, or segments
    /// for a single trajectory).
    pub n_records: usize,
}

impl PsdEstimate {
    /// Indices with `lo <= omega <= hi`.
    pub fn band(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let start = self.omega.partition_point(|&w| w < lo);
        let end = self.omega.partition_point(|&w| w <= hi);
        start..end
    }
}

/// Reusable Welch estimator for one segment length.
pub struct Welch {
    segment: usize,
    window: Vec<f64>,
    power: f64,
    fft: Arc<dyn Fft<f64>>,
}

impl Welch {
    pub fn new(segment: usize) -> Result<Self> {
        if segment < 4 {
            return Err(Error::Domain("Welch segment must have at least 4 samples".into()));
        }
        let window: Vec<f64> = (0..segment)
            .map(|j| {
                let x = 2.0 * std::f64::consts::PI * j as f64 / segment as f64;
                0.5 * (1.0 - x.cos())
            })
            .collect();
        let power = window.iter().map(|w| w * w).sum::<f64>() / segment as f64;
        let fft = FftPlanner::new().plan_fft_forward(segment);
        Ok(Welch {
            segment,
            window,
            power,
            fft,
        })
    }

    pub fn segment(&self) -> usize {
        self.segment
    }

    pub fn bins(&self) -> usize {
        self.segment / 2 + 1
    }

    /// Angular frequencies of the bins for sample spacing `dt`.
    pub fn frequencies(&self, dt: f64) -> Vec<f64> {
        let step = 2.0 * std::f64::consts::PI / (self.segment as f64 * dt);
        (0..self.bins()).map(|k| k as f64 * step).collect()
    }

    /// Per-segment periodograms with 50% overlap. Errors when the series
    /// is shorter than one segment.
    pub fn periodograms(&self, series: &[f64], dt: f64) -> Result<Vec<Vec<f64>>> {
        if series.len() < self.segment {
            return Err(Error::Domain(format!(
                "Welch segment of {} samples longer than the {} available",
                self.segment,
                series.len()
            )));
        }
        let hop = self.segment / 2;
        let scale = dt / (self.segment as f64 * self.power);
        let mut buf = vec![Complex64::new(0.0, 0.0); self.segment];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        let mut out = Vec::new();
        let mut start = 0;
        while start + self.segment <= series.len() {
            for (j, b) in buf.iter_mut().enumerate() {
                *b = Complex64::new(series[start + j] * self.window[j], 0.0);
            }
            self.fft.process_with_scratch(&mut buf, &mut scratch);
            out.push(buf[..self.bins()].iter().map(|z| z.norm_sqr() * scale).collect());
            start += hop;
        }
        Ok(out)
    }

    /// Segment-averaged periodogram.
    pub fn average(&self, series: &[f64], dt: f64) -> Result<Vec<f64>> {
        let segs = self.periodograms(series, dt)?;
        Ok(mean_rows(&segs))
    }
}

fn mean_rows(rows: &[Vec<f64>]) -> Vec<f64> {
    let n = rows.len() as f64;
    let mut acc = vec![0.0; rows[0].len()];
    for r in rows {
        for (a, v) in acc.iter_mut().zip(r) {
            *a += v;
        }
    }
    acc.iter_mut().for_each(|a| *a /= n);
    acc
}

/// Mean and standard error of the mean across records, summed in order.
pub(crate) fn combine(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let mean = mean_rows(rows);
    let n = rows.len();
    if n < 2 {
        return (mean, vec![0.0; rows[0].len()]);
    }
    let mut var = vec![0.0; mean.len()];
    for r in rows {
        for ((v, x), m) in var.iter_mut().zip(r).zip(&mean) {
            *v += (x - m) * (x - m);
        }
    }
    let denom = (n - 1) as f64 * n as f64;
    let stderr = var.iter().map(|v| (v / denom).sqrt()).collect();
    (mean, stderr)
}

/// Welch estimate of one series; the error bar comes from the spread of
/// the segments.
pub fn welch(series: &[f64], dt: f64, segment: usize) -> Result<PsdEstimate> {
    let w = Welch::new(segment)?;
    let segs = w.periodograms(series, dt)?;
    let (s_hat, stderr) = combine(&segs);
    Ok(PsdEstimate {
        omega: w.frequencies(dt),
        s_hat,
        stderr,
        n_records: segs.len(),
    })
}

/// Averages per-record spectra on a shared grid; the error bar is the
/// across-record standard error (segment spread when only one record).
pub fn combine_records(omega: Vec<f64>, records: &[Vec<f64>]) -> Result<PsdEstimate> {
    if records.is_empty() {
        return Err(Error::Domain("no records to average".into()));
    }
    let (s_hat, stderr) = combine(records);
    Ok(PsdEstimate {
        omega,
        s_hat,
        stderr,
        n_records: records.len(),
    })
}
