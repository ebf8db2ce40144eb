use std::io::Write;
use std::path::Path;

use mirrornoise::audit::audit_qp_commutator;
use mirrornoise::io::{
    comparison_table, commutator_table, parse_config_str, psd_table, spectrum_table,
    steady_state_table, sweep_table, Config, Table,
};
use mirrornoise::sim::{integrate_model, simulate_model, SimConfig, SimModel};
use mirrornoise::spectrum::{compare_models, spectrum_grid};
use mirrornoise::steady_state::{solve_all, solve_resonant, sweep_bistability};
use mirrornoise::{Error, Grid, NoiseKind, NoiseModel, PhysicalParams};
use serde_json::{json, Value};

use crate::output::{manifest_path, unix_seconds, write_atomic, Manifest};
use crate::{Cli, Command, Failure};

const FIG2_CFG: &str = include_str!("../configs/fig2.cfg");

/// Result of one command before anything touches the disk.
struct Artifact {
    table: Table,
    resolved: Value,
    summary: Value,
    dump: Option<(std::path::PathBuf, Vec<u8>)>,
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Spectrum => "spectrum",
        Command::SteadyState { .. } => "steady-state",
        Command::Sweep(_) => "sweep",
        Command::Simulate(_) => "simulate",
        Command::Audit(_) => "audit",
        Command::CompareModels => "compare-models",
        Command::Fig2 => "fig2",
    }
}

fn load(cli: &Cli) -> Result<(Config, Option<String>), Failure> {
    match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Failure::Config(Error::Domain(format!("cannot read {}: {e}", path.display())))
            })?;
            Ok((parse_config_str(&text)?, Some(path.display().to_string())))
        }
        None if matches!(cli.command, Command::Fig2) => Ok((parse_config_str(FIG2_CFG)?, None)),
        None => Err(Failure::Config(Error::Domain(format!(
            "--config is required for `{}`",
            command_name(&cli.command)
        )))),
    }
}

fn grid_or_default(cli: &Cli, cfg: &Config) -> (Grid, String) {
    match cli.grid.clone().or_else(|| cfg.options.grid.clone()) {
        Some(g) => {
            let label = g.to_string();
            (g, label)
        }
        None => (
            Grid::fig2_default(cfg.params.omega_s),
            "default: 2001 linear nodes on [0.5, 1.5] omega_S, 200 log nodes up to 200 omega_S".into(),
        ),
    }
}

fn spectrum(cli: &Cli, cfg: &Config, kind: NoiseKind) -> Result<Artifact, Failure> {
    let p = &cfg.params;
    let op = solve_resonant(p)?;
    let model = NoiseModel::new(kind, p);
    let (grid, label) = grid_or_default(cli, cfg);
    let result = spectrum_grid(p, &op, &model, &grid)?;
    let at = mirrornoise::spectrum::spectrum_at(p.omega_s, p, &op, &model)?;
    Ok(Artifact {
        table: spectrum_table(&result),
        resolved: json!({ "model": kind.as_str(), "grid": label }),
        summary: json!({
            "operating_point": op,
            "thermal_over_radiation_pressure_at_omega_S": at.thermal / at.radiation_pressure,
        }),
        dump: None,
    })
}

fn steady(cfg: &Config, resonant: bool) -> Result<Artifact, Failure> {
    let states = if resonant {
        vec![solve_resonant(&cfg.params)?]
    } else {
        solve_all(&cfg.params)?
    };
    Ok(Artifact {
        table: steady_state_table(&states),
        resolved: json!({ "resonant": resonant }),
        summary: json!({ "roots": states.len() }),
        dump: None,
    })
}

fn sweep(cfg: &Config, args: &crate::SweepArgs) -> Result<Artifact, Failure> {
    let kappa = 0.5 * cfg.params.gamma_c;
    let lo = args.delta_min.or(cfg.options.delta_min).unwrap_or(0.0);
    let hi = args.delta_max.or(cfg.options.delta_max).unwrap_or(40.0 * kappa);
    let n = args.n_delta.or(cfg.options.n_delta).unwrap_or(401);
    let rows = sweep_bistability(&cfg.params, lo, hi, n)?;
    let multi: Vec<f64> = rows.iter().filter(|r| r.roots.len() == 3).map(|r| r.delta0).collect();
    let window = match (multi.first(), multi.last()) {
        (Some(a), Some(b)) => json!([a, b]),
        _ => Value::Null,
    };
    Ok(Artifact {
        table: sweep_table(&rows),
        resolved: json!({ "delta_min": lo, "delta_max": hi, "n_delta": n }),
        summary: json!({ "three_root_window": window }),
        dump: None,
    })
}

fn simulate(cli: &Cli, cfg: &Config, kind: NoiseKind, args: &crate::SimulateArgs) -> Result<Artifact, Failure> {
    let p = &cfg.params;
    let op = solve_resonant(p)?;
    let model = SimModel::new(p, &op, &NoiseModel::new(kind, p))?;
    let o = &cfg.options;
    let fastest = model.cavity.max(1.0).max(model.damping);
    let dt = cli.dt.or(o.dt).unwrap_or((0.05 / fastest).min(0.02));
    let steps = cli.steps.or(o.steps).unwrap_or(1 << 16);
    let burn_in = args.burn_in.or(o.burn_in).unwrap_or(0.1);
    let kept = steps - (steps as f64 * burn_in).ceil() as usize;
    let default_segment = {
        let target = (kept / 4).max(16);
        1usize << (usize::BITS - 1 - target.leading_zeros())
    };
    let sim = SimConfig {
        dt,
        n_steps: steps,
        n_traj: cli.traj.or(o.traj).unwrap_or(8),
        seed: cli.seed.or(o.seed).unwrap_or(0),
        burn_in,
        welch_segment: args.segment.or(o.welch_segment).unwrap_or(default_segment),
        adiabatic: args.adiabatic || o.adiabatic.unwrap_or(false),
        ..SimConfig::default()
    };
    sim.validate(&model)?;
    let result = simulate_model(&model, &sim)?;
    for r in &result.rejected {
        eprintln!("warning: rejected {r}");
    }
    let dump = match &args.dump {
        Some(path) => {
            let mut bytes = Vec::new();
            integrate_model(&model, &sim, 0)?.write_binary(&mut bytes)?;
            Some((path.clone(), bytes))
        }
        None => None,
    };
    Ok(Artifact {
        table: psd_table(&result.psd),
        resolved: json!({ "model": kind.as_str(), "sim": sim }),
        summary: json!({
            "records": result.psd.n_records,
            "rejected": result.rejected,
            "internal_coefficients": model,
            "operating_point": op,
        }),
        dump,
    })
}

fn audit(cfg: &Config, args: &crate::AuditArgs) -> Result<Artifact, Failure> {
    let p = &cfg.params;
    let t_max = args.t_max.or(cfg.options.t_max).unwrap_or(10.0 / p.omega_s);
    let n = args.n_grid.or(cfg.options.n_grid).unwrap_or(201);
    let report = audit_qp_commutator(p, t_max, n)?;
    let worst_xi = report.xi_residuals.iter().copied().fold(0.0, f64::max);
    Ok(Artifact {
        table: commutator_table(&report),
        resolved: json!({ "t_max": t_max, "n_grid": n }),
        summary: json!({ "max_deviation": report.max_deviation, "max_xi_residual": worst_xi }),
        dump: None,
    })
}

fn compare(cli: &Cli, cfg: &Config) -> Result<Artifact, Failure> {
    let p = &cfg.params;
    let op = solve_resonant(p)?;
    let (grid, label) = grid_or_default(cli, cfg);
    let rows = compare_models(p, &op, &grid)?;
    let max_d = rows.iter().map(|r| r.rel_diosi).fold(0.0, f64::max);
    let max_c = rows.iter().map(|r| r.rel_classical).fold(0.0, f64::max);
    Ok(Artifact {
        table: comparison_table(&rows),
        resolved: json!({ "grid": label }),
        summary: json!({ "max_rel_diosi": max_d, "max_rel_classical": max_c }),
        dump: None,
    })
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    write_atomic(path, bytes).map_err(|e| {
        Failure::Config(Error::Domain(format!("cannot write {}: {e}", path.display())))
    })
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let started = unix_seconds();
    let (cfg, config_label) = load(cli)?;
    let params: PhysicalParams = *cfg.params.checked()?;
    for w in params.validate().warnings {
        eprintln!("warning: {w}");
    }
    let kind = cli.model.or(cfg.options.model).unwrap_or(NoiseKind::Exact);
    let artifact = match &cli.command {
        Command::Spectrum | Command::Fig2 => spectrum(cli, &cfg, kind)?,
        Command::SteadyState { resonant } => steady(&cfg, *resonant)?,
        Command::Sweep(a) => sweep(&cfg, a)?,
        Command::Simulate(a) => simulate(cli, &cfg, kind, a)?,
        Command::Audit(a) => audit(&cfg, a)?,
        Command::CompareModels => compare(cli, &cfg)?,
    };
    let bytes = artifact.table.to_bytes()?;

    let mut outputs = Vec::new();
    match &cli.out {
        Some(path) => {
            write_output(path, &bytes)?;
            outputs.push(path.clone());
        }
        None => {
            std::io::stdout().write_all(&bytes).map_err(|e| Failure::Numerical(e.into()))?;
        }
    }
    if let Some((path, data)) = &artifact.dump {
        write_output(path, data)?;
        outputs.push(path.clone());
    }
    if outputs.is_empty() {
        return Ok(());
    }
    let manifest = Manifest {
        tool: "mirrornoise",
        version: env!("CARGO_PKG_VERSION"),
        command: command_name(&cli.command),
        argv: std::env::args().collect(),
        config: config_label,
        params: &params,
        resolved: &artifact.resolved,
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        summary: &artifact.summary,
        started_unix: started,
        finished_unix: unix_seconds(),
    };
    let text = serde_json::to_vec_pretty(&manifest)
        .map_err(|e| Failure::Numerical(Error::Numerical(format!("manifest: {e}"))))?;
    for path in &outputs {
        write_output(&manifest_path(path), &text)?;
    }
    Ok(())
}
