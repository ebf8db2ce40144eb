//! Plain-text configuration and comma-separated result tables.
//!
//! Configuration files hold one `key = value` per line in SI units; `#`
//! starts a comment. Physical keys:
//!
//! | key            | meaning                       | unit  |
//! |----------------|-------------------------------|-------|
//! | `m`            | mirror mass                   | kg    |
//! | `omega_S`      | mechanical frequency          | rad/s |
//! | `eta`          | friction coefficient          | kg/s  |
//! | `omega_c`      | cavity frequency              | rad/s |
//! | `omega_0`      | drive frequency               | rad/s |
//! | `gamma_c`      | cavity decay rate             | rad/s |
//! | `L`            | cavity length                 | m     |
//! | `P`            | input power                   | W     |
//! | `T`            | bath temperature              | K     |
//! | `Omega_cutoff` | reservoir cutoff (optional)   | rad/s |
//!
//! Optional run keys: `model`, `grid`, `seed`, `traj`, `dt`, `steps`,
//! `burn_in`, `welch_segment`, `adiabatic`, `t_max`, `n_grid`,
//! `delta_min`, `delta_max`, `n_delta`.
//!
//! Tables are written with 17 significant digits so that parsing them
//! back recovers every value exactly.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::audit::CommutatorReport;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernels::NoiseKind;
use crate::model::{Cutoff, PhysicalParams};
use crate::sim::PsdEstimate;
use crate::spectrum::{ModelComparison, SpectrumResult};
use crate::steady_state::{SteadyState, SweepRow};

pub const REQUIRED_KEYS: [&str; 9] = [
    "m", "omega_S", "eta", "omega_c", "omega_0", "gamma_c", "L", "P", "T",
];

const OPTIONAL_KEYS: [&str; 15] = [
    "Omega_cutoff",
    "model",
    "grid",
    "seed",
    "traj",
    "dt",
    "steps",
    "burn_in",
    "welch_segment",
    "adiabatic",
    "t_max",
    "n_grid",
    "delta_min",
    "delta_max",
    "n_delta",
];

/// Command options that may appear in a configuration file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub model: Option<NoiseKind>,
    pub grid: Option<Grid>,
    pub seed: Option<u64>,
    pub traj: Option<usize>,
    pub dt: Option<f64>,
    pub steps: Option<usize>,
    pub burn_in: Option<f64>,
    pub welch_segment: Option<usize>,
    pub adiabatic: Option<bool>,
    /// Audit horizon (s).
    pub t_max: Option<f64>,
    pub n_grid: Option<usize>,
    /// Sweep range of the bare detuning (rad/s).
    pub delta_min: Option<f64>,
    pub delta_max: Option<f64>,
    pub n_delta: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub params: PhysicalParams,
    pub options: RunOptions,
}

pub fn parse_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<Config> {
    // key -> (value, line)
    let mut entries: HashMap<String, (String, usize)> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected `key = value`, found `{content}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(Error::Parse {
                line,
                message: format!("expected `key = value`, found `{content}`"),
            });
        }
        if !REQUIRED_KEYS.contains(&key) && !OPTIONAL_KEYS.contains(&key) {
            return Err(Error::UnknownKey {
                key: key.to_string(),
                line,
            });
        }
        if let Some((_, first)) = entries.get(key) {
            return Err(Error::DuplicateKey {
                key: key.to_string(),
                first: *first,
                second: line,
            });
        }
        entries.insert(key.to_string(), (value.to_string(), line));
    }

    let missing: Vec<String> = REQUIRED_KEYS
        .iter()
        .filter(|k| !entries.contains_key(**k))
        .map(|k| k.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingKeys(missing));
    }

    fn get<T: FromStr>(entries: &HashMap<String, (String, usize)>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match entries.get(key) {
            None => Ok(None),
            Some((value, line)) => value.parse::<T>().map(Some).map_err(|e| Error::Parse {
                line: *line,
                message: format!("bad value `{value}` for `{key}`: {e}"),
            }),
        }
    }
    let req = |key: &str| -> Result<f64> {
        get::<f64>(&entries, key).map(|v| v.expect("required key checked above"))
    };

    let params = PhysicalParams {
        m: req("m")?,
        omega_s: req("omega_S")?,
        eta: req("eta")?,
        omega_c: req("omega_c")?,
        omega_0: req("omega_0")?,
        gamma_c: req("gamma_c")?,
        length: req("L")?,
        power: req("P")?,
        temperature: req("T")?,
        cutoff: match get::<f64>(&entries, "Omega_cutoff")? {
            Some(w) => Cutoff::Finite(w),
            None => Cutoff::Infinite,
        },
    };
    let options = RunOptions {
        model: get(&entries, "model")?,
        grid: get(&entries, "grid")?,
        seed: get(&entries, "seed")?,
        traj: get(&entries, "traj")?,
        dt: get(&entries, "dt")?,
        steps: get(&entries, "steps")?,
        burn_in: get(&entries, "burn_in")?,
        welch_segment: get(&entries, "welch_segment")?,
        adiabatic: get(&entries, "adiabatic")?,
        t_max: get(&entries, "t_max")?,
        n_grid: get(&entries, "n_grid")?,
        delta_min: get(&entries, "delta_min")?,
        delta_max: get(&entries, "delta_max")?,
        n_delta: get(&entries, "n_delta")?,
    };
    Ok(Config { params, options })
}

/// Formats `v` with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// A header row and string cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&v| fmt_f64(v)).collect());
    }

    pub fn write<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.headers).map_err(csv_error)?;
        for row in &self.rows {
            out.write_record(row).map_err(csv_error)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        self.write(&mut buf)?;
        Ok(buf)
    }

    pub fn read<R: Read>(r: R) -> Result<Self> {
        let mut input = csv::Reader::from_reader(r);
        let headers = input
            .headers()
            .map_err(csv_error)?
            .iter()
            .map(String::from)
            .collect();
        let rows = input
            .records()
            .map(|rec| rec.map(|r| r.iter().map(String::from).collect()).map_err(csv_error))
            .collect::<Result<_>>()?;
        Ok(Table { headers, rows })
    }

    /// Column `name` parsed as numbers.
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self
            .headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Domain(format!("no column `{name}`")))?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row[idx].parse::<f64>().map_err(|e| Error::Parse {
                    line: i + 2,
                    message: format!("column `{name}`: {e}"),
                })
            })
            .collect()
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Domain(format!("csv: {other:?}")),
    }
}

pub fn spectrum_table(result: &SpectrumResult) -> Table {
    let mut t = Table::new(&["omega", "shot", "radiation_pressure", "thermal", "total"]);
    for (w, c) in result.omega.iter().zip(&result.components) {
        t.push_numbers(&[*w, c.shot, c.radiation_pressure, c.thermal, c.total]);
    }
    t
}

pub fn comparison_table(rows: &[ModelComparison]) -> Table {
    let mut t = Table::new(&[
        "omega",
        "exact",
        "diosi",
        "classical",
        "rel_diosi",
        "rel_classical",
    ]);
    for r in rows {
        t.push_numbers(&[r.omega, r.exact, r.diosi, r.classical, r.rel_diosi, r.rel_classical]);
    }
    t
}

pub fn psd_table(est: &PsdEstimate) -> Table {
    let mut t = Table::new(&["omega", "S_hat", "stderr"]);
    for ((w, s), e) in est.omega.iter().zip(&est.s_hat).zip(&est.stderr) {
        t.push_numbers(&[*w, *s, *e]);
    }
    t
}

pub fn commutator_table(report: &CommutatorReport) -> Table {
    let mut t = Table::new(&["t", "c_real", "c_imag", "deviation"]);
    for i in 0..report.t.len() {
        t.push_numbers(&[report.t[i], report.c_real[i], report.c_imag[i], report.deviation[i]]);
    }
    t
}

const STATE_HEADERS: [&str; 7] = [
    "amplitude",
    "intensity",
    "displacement",
    "detuning",
    "drive_frequency",
    "drive",
    "stability",
];

fn state_cells(s: &SteadyState) -> Vec<String> {
    let mut cells: Vec<String> = [
        s.amplitude,
        s.intensity,
        s.displacement,
        s.detuning,
        s.drive_frequency,
        s.drive,
    ]
    .iter()
    .map(|&v| fmt_f64(v))
    .collect();
    cells.push(s.stability.as_str().to_string());
    cells
}

pub fn steady_state_table(states: &[SteadyState]) -> Table {
    let mut t = Table::new(&STATE_HEADERS);
    t.rows = states.iter().map(state_cells).collect();
    t
}

/// One row per root; `root` numbers the roots of a detuning in ascending
/// intensity, and detunings without roots do not appear.
pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut headers = vec!["delta0", "n_roots", "root"];
    headers.extend(STATE_HEADERS);
    let mut t = Table::new(&headers);
    for r in rows {
        for (k, s) in r.roots.iter().enumerate() {
            let mut cells = vec![fmt_f64(r.delta0), r.roots.len().to_string(), k.to_string()];
            cells.extend(state_cells(s));
            t.rows.push(cells);
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG2: &str = "\
# reference parameters
m = 1e-5
omega_S = 1.3e5
eta = 3e-7   # kg/s
omega_c = 1.8e15
omega_0 = 1.8e15
gamma_c = 4.7e5
L = 1e-2
P = 1e-5
T = 4.2
";

    #[test]
    fn parses_reference_file() {
        let cfg = parse_config_str(FIG2).unwrap();
        assert_eq!(cfg.params, PhysicalParams::fig2());
        assert_eq!(cfg.options, RunOptions::default());
    }

    #[test]
    fn empty_file_lists_all_keys() {
        match parse_config_str("").unwrap_err() {
            Error::MissingKeys(keys) => assert_eq!(keys, REQUIRED_KEYS.map(String::from).to_vec()),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn missing_mass_named() {
        let text = FIG2.replace("m = 1e-5\n", "");
        let err = parse_config_str(&text).unwrap_err();
        assert!(matches!(&err, Error::MissingKeys(k) if k == &vec!["m".to_string()]));
        assert!(err.to_string().contains('m'));
    }

    #[test]
    fn duplicate_key_names_both_lines() {
        let text = format!("{FIG2}T = 300\n");
        match parse_config_str(&text).unwrap_err() {
            Error::DuplicateKey { key, first, second } => {
                assert_eq!((key.as_str(), first, second), ("T", 10, 11));
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn unknown_key_rejected() {
        let text = format!("{FIG2}mass = 2\n");
        assert!(matches!(
            parse_config_str(&text).unwrap_err(),
            Error::UnknownKey { line: 11, .. }
        ));
    }

    #[test]
    fn bad_lines_report_line_numbers() {
        let text = FIG2.replace("T = 4.2", "T = warm");
        assert!(matches!(parse_config_str(&text).unwrap_err(), Error::Parse { line: 10, .. }));
        let text = format!("{FIG2}just words\n");
        assert!(matches!(parse_config_str(&text).unwrap_err(), Error::Parse { line: 11, .. }));
    }

    #[test]
    fn options_parsed() {
        let text = format!(
            "{FIG2}model = diosi\ngrid = log:1e3:1e7:50\nseed = 42\nadiabatic = true\nOmega_cutoff = 1e9\n"
        );
        let cfg = parse_config_str(&text).unwrap();
        assert_eq!(cfg.options.model, Some(NoiseKind::Diosi));
        assert_eq!(cfg.options.grid, Some(Grid::log(1e3, 1e7, 50)));
        assert_eq!(cfg.options.seed, Some(42));
        assert_eq!(cfg.options.adiabatic, Some(true));
        assert_eq!(cfg.params.cutoff, Cutoff::Finite(1e9));
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.718281828459045e-300, 6.02214076e23, f64::MAX, 5e-324] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }
}
