//! The fit -> compile -> simulate -> measure pipeline and the seeded sweep
//! driver behind `bench`.
//!
//! Seed discipline: every stage seed is derived as
//! `splitmix64(splitmix64(master ^ STAGE * 0xA0761D6478BD642F) + point)`,
//! so sweep points are independent and reordering their execution cannot
//! change any result. `--seed` replaces both config masters.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use ttprep::circuit::{grover_rudolph_baseline, merge_gates, tt_to_circuit, CircuitPlan};
use ttprep::cross::{tt_cross, CrossConfig, CrossReport};
use ttprep::metrics::{fidelity, kl_divergence, ks_distance, to_complex};
use ttprep::quantize::{cdf_1d, discretize, ordering_bitmap, DiscreteDistribution};
use ttprep::sim::{run, StateVector};
use ttprep::tensor::{pad_ranks_pow2, tt_round, TensorTrain};

use crate::config::ExperimentConfig;
use crate::error::AppError;

pub const STAGE_CROSS: u64 = 1;
pub const STAGE_SAMPLE: u64 = 2;

/// Largest register whose exact target distribution is materialized densely
/// for KS/KL/fidelity; larger runs report the cross validation error only.
pub const METRICS_DENSE_CAP: usize = 22;

const KL_FLOOR: f64 = 1e-300;

/// One output of the splitmix64 stream whose state is `x`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-stage, per-point seed; see the module docs.
pub fn stage_seed(master: u64, stage: u64, point: u64) -> u64 {
    let mixed = master ^ stage.wrapping_mul(0xA076_1D64_78BD_642F);
    splitmix64(splitmix64(mixed).wrapping_add(point))
}

#[derive(Debug, Clone, Default)]
pub struct PipelineOptions {
    /// Record wall times; off for byte-reproducible reports.
    pub timing: bool,
    /// Replaces the config's cross and simulate master seeds.
    pub seed_override: Option<u64>,
}

/// One benchmark row. Optional metrics stay empty when gated off (dense
/// target too large, univariate-only KS) or when the point failed; `error`
/// then carries the stage message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub d_total: usize,
    pub qubits_per_dim: usize,
    pub dims: usize,
    pub scheme: String,
    pub chi: usize,
    pub ks: Option<f64>,
    pub kl: Option<f64>,
    pub fidelity: Option<f64>,
    pub gate_count: Option<u64>,
    pub depth: Option<u64>,
    pub baseline_gate_count: Option<u64>,
    pub function_evaluations: Option<u64>,
    pub wall_time_ms: f64,
    pub seed: u64,
    pub cross_validation_error: Option<f64>,
    pub error: Option<String>,
}

pub struct FitOutcome {
    pub dd: DiscreteDistribution,
    pub tt: TensorTrain,
    pub report: CrossReport,
}

fn numeric<E: std::fmt::Display>(e: E) -> AppError {
    AppError::Numeric(format!("{e}"))
}

/// Discretize the target and learn a tensor train of its amplitudes.
pub fn fit_point(
    cfg: &ExperimentConfig,
    qubits: usize,
    cross_seed: u64,
) -> Result<FitOutcome, AppError> {
    let dist = cfg.distribution_spec();
    let grid = cfg.grid_for(qubits)?;
    let ordering = ordering_bitmap(cfg.scheme(), cfg.dims(), qubits).map_err(numeric)?;
    let dd = discretize(dist, &grid, &ordering).map_err(numeric)?;
    let shape = vec![2usize; dd.total_qubits()];
    let cross_cfg = CrossConfig {
        max_rank: cfg.cross.max_rank,
        rel_tol: cfg.cross.rel_tol,
        max_sweeps: cfg.cross.max_sweeps,
        rank_increment: cfg.cross.rank_increment,
        rng_seed: cross_seed,
        validation_samples: cfg.cross.validation_samples,
    };
    let (tt, report) =
        tt_cross(|idx| dd.amplitude_at_bits(idx), &shape, &cross_cfg).map_err(numeric)?;
    Ok(FitOutcome { dd, tt, report })
}

/// Round, pad, and compile the learned train into a gate plan.
pub fn compile_plan(cfg: &ExperimentConfig, tt: &TensorTrain) -> Result<CircuitPlan, AppError> {
    let rounded = tt_round(tt, cfg.cross.rel_tol, cfg.chi_cap()).map_err(numeric)?;
    let padded = pad_ranks_pow2(&rounded);
    let plan = tt_to_circuit(&padded, cfg.chi_cap()).map_err(numeric)?;
    Ok(if cfg.compile.merge {
        merge_gates(&plan)
    } else {
        plan
    })
}

pub struct EvalOutcome {
    pub state: StateVector,
    pub ks: Option<f64>,
    pub kl: Option<f64>,
    pub fidelity: Option<f64>,
}

/// Simulate the plan and compare against the exact discrete target when it
/// is small enough to materialize.
pub fn evaluate_plan(
    dd: &DiscreteDistribution,
    plan: &CircuitPlan,
) -> Result<EvalOutcome, AppError> {
    let state = run(plan).map_err(numeric)?;
    let mut out = EvalOutcome {
        ks: None,
        kl: None,
        fidelity: None,
        state,
    };
    if dd.total_qubits() > METRICS_DENSE_CAP {
        return Ok(out);
    }
    let target_probs = dd.materialize_probs(1 << METRICS_DENSE_CAP).map_err(numeric)?;
    let target_amps: Vec<f64> = target_probs.iter().map(|p| p.sqrt()).collect();
    out.fidelity = Some(fidelity(out.state.amps(), &to_complex(&target_amps)).map_err(numeric)?);

    let sim_probs = out.state.probs();
    out.kl = Some(kl_divergence(&target_probs, &sim_probs, KL_FLOOR).map_err(numeric)?);
    if dd.dims() == 1 {
        let target_cdf = cdf_1d(dd).map_err(numeric)?;
        let mut acc = 0.0;
        let sim_cdf: Vec<f64> = sim_probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        out.ks = Some(ks_distance(&sim_cdf, &target_cdf).map_err(numeric)?);
    }
    Ok(out)
}

fn blank_row(cfg: &ExperimentConfig, qubits: usize, seed: u64) -> ReportRow {
    ReportRow {
        d_total: cfg.dims() * qubits,
        qubits_per_dim: qubits,
        dims: cfg.dims(),
        scheme: cfg.ordering.scheme.clone(),
        chi: cfg.chi_cap(),
        ks: None,
        kl: None,
        fidelity: None,
        gate_count: None,
        depth: None,
        baseline_gate_count: None,
        function_evaluations: None,
        wall_time_ms: 0.0,
        seed,
        cross_validation_error: None,
        error: None,
    }
}

pub struct PointArtifacts {
    pub dd: DiscreteDistribution,
    pub plan: CircuitPlan,
    pub state: StateVector,
}

/// Full pipeline for one sweep point; stage failures land in `row.error`
/// instead of propagating, so sibling points always run.
pub fn run_point_with_artifacts(
    cfg: &ExperimentConfig,
    qubits: usize,
    point: u64,
    opts: &PipelineOptions,
) -> (ReportRow, Option<PointArtifacts>) {
    let cross_master = opts.seed_override.unwrap_or(cfg.cross.seed);
    let cross_seed = stage_seed(cross_master, STAGE_CROSS, point);
    let mut row = blank_row(cfg, qubits, cross_seed);
    let start = Instant::now();

    let result = (|| -> Result<PointArtifacts, AppError> {
        let fit = fit_point(cfg, qubits, cross_seed)?;
        let plan = compile_plan(cfg, &fit.tt)?;
        let eval = evaluate_plan(&fit.dd, &plan)?;

        row.function_evaluations = Some(fit.report.function_evaluations);
        row.cross_validation_error = Some(fit.report.final_validation_error);
        row.gate_count = Some(plan.total_gate_count() as u64);
        row.depth = Some(plan.depth() as u64);
        row.ks = eval.ks;
        row.kl = eval.kl;
        row.fidelity = eval.fidelity;
        if cfg.compile.baseline
            && fit.dd.dims() == 1
            && fit.dd.total_qubits() <= METRICS_DENSE_CAP
        {
            let baseline = grover_rudolph_baseline(&fit.dd).map_err(numeric)?;
            row.baseline_gate_count = Some(baseline.total_gate_count() as u64);
        }
        Ok(PointArtifacts {
            dd: fit.dd,
            plan,
            state: eval.state,
        })
    })();

    if opts.timing {
        row.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    }
    match result {
        Ok(artifacts) => (row, Some(artifacts)),
        Err(e) => {
            row.error = Some(format!("{e}"));
            (row, None)
        }
    }
}

pub fn run_point(
    cfg: &ExperimentConfig,
    qubits: usize,
    point: u64,
    opts: &PipelineOptions,
) -> ReportRow {
    run_point_with_artifacts(cfg, qubits, point, opts).0
}

/// One row per sweep point (or a single row for the grid's qubit count).
/// With timing on, each point is re-run `repeats` times on identical seeds
/// and the row carries the mean wall time.
pub fn run_sweep(cfg: &ExperimentConfig, opts: &PipelineOptions) -> Vec<ReportRow> {
    let points: Vec<usize> = match &cfg.sweep {
        Some(sweep) => sweep.qubits.clone(),
        None => vec![cfg.grid.qubits],
    };
    let repeats = match (&cfg.sweep, opts.timing) {
        (Some(sweep), true) => sweep.repeats,
        _ => 1,
    };
    points
        .iter()
        .enumerate()
        .map(|(i, &q)| {
            let mut row = run_point(cfg, q, i as u64, opts);
            if repeats > 1 {
                let mut total = row.wall_time_ms;
                for _ in 1..repeats {
                    total += run_point(cfg, q, i as u64, opts).wall_time_ms;
                }
                row.wall_time_ms = total / repeats as f64;
            }
            row
        })
        .collect()
}
