//! Shared fixtures for the benchmarks.

use mirrornoise::sim::SimConfig;
use mirrornoise::steady_state::solve_resonant;
use mirrornoise::{NoiseKind, NoiseModel, PhysicalParams, SteadyState};

pub struct Fixture {
    pub params: PhysicalParams,
    pub op: SteadyState,
    pub model: NoiseModel,
}

pub fn reference(kind: NoiseKind) -> Fixture {
    let params = PhysicalParams::fig2();
    let op = solve_resonant(&params).expect("reference set locks");
    let model = NoiseModel::new(kind, &params);
    Fixture { params, op, model }
}

/// Bright drive inside the bistable window.
pub fn bistable() -> PhysicalParams {
    PhysicalParams {
        power: 5e-3,
        ..PhysicalParams::fig2()
    }
}

pub fn short_run(n_traj: usize) -> SimConfig {
    SimConfig {
        dt: 0.01,
        n_steps: 16384,
        n_traj,
        welch_segment: 2048,
        ..SimConfig::default()
    }
}
