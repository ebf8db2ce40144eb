//! Frequency and time grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Grid {
    Linear { min: f64, max: f64, n: usize },
    Log { min: f64, max: f64, n: usize },
    Points(Vec<f64>),
}

impl Grid {
    pub fn linear(min: f64, max: f64, n: usize) -> Self {
        Grid::Linear { min, max, n }
    }

    pub fn log(min: f64, max: f64, n: usize) -> Self {
        Grid::Log { min, max, n }
    }

    /// Linear grid over `[0.5, 1.5] omega_s` (2001 nodes) followed by a
    /// 200-node logarithmic tail up to `200 omega_s`.
    pub fn fig2_default(omega_s: f64) -> Self {
        let mut nodes = linspace(0.5 * omega_s, 1.5 * omega_s, 2001);
        let tail = logspace(1.5 * omega_s, 200.0 * omega_s, 201);
        nodes.extend_from_slice(&tail[1..]);
        Grid::Points(nodes)
    }

    pub fn nodes(&self) -> Result<Vec<f64>> {
        let nodes = match *self {
            Grid::Linear { min, max, n } => {
                check_range(min, max, n)?;
                linspace(min, max, n)
            }
            Grid::Log { min, max, n } => {
                check_range(min, max, n)?;
                if min <= 0.0 {
                    return Err(Error::Domain("log grid needs a positive lower bound".into()));
                }
                logspace(min, max, n)
            }
            Grid::Points(ref pts) => pts.clone(),
        };
        if nodes.is_empty() {
            return Err(Error::Domain("grid has no nodes".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) || nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("grid must be finite and strictly increasing".into()));
        }
        Ok(nodes)
    }
}

impl std::str::FromStr for Grid {
    type Err = Error;

    /// `lin:MIN:MAX:N` or `log:MIN:MAX:N`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("bad grid spec `{s}` (expected lin:MIN:MAX:N or log:MIN:MAX:N)"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(bad());
        }
        let min: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let max: f64 = parts[2].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[3].trim().parse().map_err(|_| bad())?;
        let grid = match parts[0].trim() {
            "lin" => Grid::Linear { min, max, n },
            "log" => Grid::Log { min, max, n },
            _ => return Err(bad()),
        };
        grid.nodes()?;
        Ok(grid)
    }
}

impl std::fmt::Display for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Grid::Linear { min, max, n } => write!(f, "lin:{min:e}:{max:e}:{n}"),
            Grid::Log { min, max, n } => write!(f, "log:{min:e}:{max:e}:{n}"),
            Grid::Points(p) => write!(f, "points[{}]", p.len()),
        }
    }
}

fn check_range(min: f64, max: f64, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain("grid needs n >= 2".into()));
    }
    if !(min.is_finite() && max.is_finite() && max > min) {
        return Err(Error::Domain("grid bounds must satisfy min < max".into()));
    }
    Ok(())
}

/// `n` evenly spaced points, endpoints included exactly.
pub fn linspace(min: f64, max: f64, n: usize) -> Vec<f64> {
    let step = (max - min) / (n - 1) as f64;
    (0..n)
        .map(|k| if k + 1 == n { max } else { min + step * k as f64 })
        .collect()
}

pub fn logspace(min: f64, max: f64, n: usize) -> Vec<f64> {
    let (a, b) = (min.ln(), max.ln());
    let step = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|k| match k {
            0 => min,
            k if k + 1 == n => max,
            k => (a + step * k as f64).exp(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_specs() {
        let g: Grid = "lin:0:10:11".parse().unwrap();
        assert_eq!(g.nodes().unwrap()[3], 3.0);
        let g: Grid = "log:1:1000:4".parse().unwrap();
        let n = g.nodes().unwrap();
        assert_eq!(n[0], 1.0);
        assert_eq!(n[3], 1000.0);
        assert!((n[1] - 10.0).abs() < 1e-12);
        assert!("log:0:10:5".parse::<Grid>().is_err());
        assert!("lin:0:10:1".parse::<Grid>().is_err());
        assert!("cubic:0:1:3".parse::<Grid>().is_err());
    }

    #[test]
    fn two_point_grid() {
        assert_eq!(Grid::linear(1.0, 2.0, 2).nodes().unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn fig2_grid_monotone() {
        let n = Grid::fig2_default(1.3e5).nodes().unwrap();
        assert_eq!(n.len(), 2201);
    }
}
