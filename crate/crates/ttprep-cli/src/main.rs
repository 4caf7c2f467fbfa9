use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use ttprep::circuit::depth_report;
use ttprep::sim::sample;
use ttprep_cli::config::{parse_config, ExperimentConfig};
use ttprep_cli::error::AppError;
use ttprep_cli::export::{export_circuit, import_circuit};
use ttprep_cli::pipeline::{
    compile_plan, fit_point, run_point_with_artifacts, run_sweep, stage_seed, PipelineOptions,
    STAGE_CROSS, STAGE_SAMPLE,
};
use ttprep_cli::report::{rows_to_csv, rows_to_json};

#[derive(Parser)]
#[command(
    name = "ttprep",
    version,
    about = "Tensor-train state preparation: fit, compile, simulate, benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a tensor train for the configured distribution.
    Fit(RunArgs),
    /// Fit, then compile the train into a gate plan and summarize it.
    Compile(RunArgs),
    /// Full pipeline on one configuration: fit, compile, simulate, measure.
    Simulate(RunArgs),
    /// Sweep qubit counts per the config and emit one report row per point.
    Bench(RunArgs),
    /// Fit, compile, and write the circuit interchange document.
    Export(RunArgs),
    /// Validate a circuit document and print its summary.
    ImportCheck {
        /// Circuit JSON produced by `export`.
        file: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format: csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Master seed, replacing the config's cross and simulate seeds.
    #[arg(long)]
    seed: Option<u64>,
    /// Zero out wall times for byte-reproducible output.
    #[arg(long)]
    no_timing: bool,
}

impl RunArgs {
    fn load(&self) -> Result<(ExperimentConfig, PipelineOptions), AppError> {
        let text = std::fs::read_to_string(&self.config)
            .map_err(|e| AppError::io(&self.config, e))?;
        let cfg = parse_config(&text)?;
        let opts = PipelineOptions {
            timing: !self.no_timing,
            seed_override: self.seed,
        };
        Ok((cfg, opts))
    }

    fn format(&self, cfg: &ExperimentConfig) -> Result<String, AppError> {
        let fmt = self
            .format
            .clone()
            .or_else(|| cfg.output.as_ref().and_then(|o| o.format.clone()))
            .unwrap_or_else(|| "csv".into());
        if fmt != "csv" && fmt != "json" {
            return Err(AppError::Config(format!(
                "--format {fmt:?} is not one of: csv, json"
            )));
        }
        Ok(fmt)
    }

    fn out_path(&self, cfg: &ExperimentConfig) -> Option<PathBuf> {
        self.out
            .clone()
            .or_else(|| cfg.output.as_ref().and_then(|o| o.path.clone().map(Into::into)))
    }
}

/// Prints to stdout with a trailing newline, treating a closed pipe as a
/// normal exit the way any well-behaved unix filter does.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let res = out
        .write_all(text.as_bytes())
        .and_then(|()| {
            if text.ends_with('\n') {
                Ok(())
            } else {
                out.write_all(b"\n")
            }
        })
        .and_then(|()| out.flush());
    if let Err(e) = res {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("stdout: {e}");
        std::process::exit(AppError::Io(String::new()).exit_code());
    }
}

fn write_output(text: &str, out: Option<&Path>) -> Result<(), AppError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| AppError::io(path, e)),
        None => {
            emit(text);
            Ok(())
        }
    }
}

fn cmd_fit(args: &RunArgs) -> Result<(), AppError> {
    let (cfg, opts) = args.load()?;
    let cross_seed = stage_seed(
        opts.seed_override.unwrap_or(cfg.cross.seed),
        STAGE_CROSS,
        0,
    );
    let start = Instant::now();
    let fit = fit_point(&cfg, cfg.grid.qubits, cross_seed)?;
    let wall = if opts.timing {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    let doc = json!({
        "d_total": fit.dd.total_qubits(),
        "qubits_per_dim": cfg.grid.qubits,
        "dims": fit.dd.dims(),
        "ranks": fit.tt.ranks(),
        "sweeps_run": fit.report.sweeps_run,
        "function_evaluations": fit.report.function_evaluations,
        "final_validation_error": fit.report.final_validation_error,
        "converged": fit.report.converged,
        "seed": cross_seed,
        "wall_time_ms": wall,
    });
    write_output(&serde_json::to_string_pretty(&doc).unwrap(), args.out_path(&cfg).as_deref())
}

fn cmd_compile(args: &RunArgs) -> Result<(), AppError> {
    let (cfg, opts) = args.load()?;
    let cross_seed = stage_seed(
        opts.seed_override.unwrap_or(cfg.cross.seed),
        STAGE_CROSS,
        0,
    );
    let start = Instant::now();
    let fit = fit_point(&cfg, cfg.grid.qubits, cross_seed)?;
    let plan = compile_plan(&cfg, &fit.tt)?;
    let wall = if opts.timing {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    let sizes = depth_report(&plan);
    let doc = json!({
        "num_qubits": plan.num_qubits(),
        "normalizer": plan.normalizer(),
        "gate_count": sizes.gate_count,
        "depth": sizes.depth,
        "max_gate_width": sizes.max_gate_width,
        "two_level_decomposed_depth_estimate": sizes.two_level_decomposed_depth_estimate,
        "merged": cfg.compile.merge,
        "wall_time_ms": wall,
    });
    write_output(&serde_json::to_string_pretty(&doc).unwrap(), args.out_path(&cfg).as_deref())
}

fn cmd_simulate(args: &RunArgs) -> Result<(), AppError> {
    let (cfg, opts) = args.load()?;
    let (row, artifacts) = run_point_with_artifacts(&cfg, cfg.grid.qubits, 0, &opts);
    let Some(artifacts) = artifacts else {
        return Err(AppError::Numeric(
            row.error.unwrap_or_else(|| "pipeline failed".into()),
        ));
    };
    let mut doc = json!({ "row": row });
    if cfg.simulate.shots > 0 {
        let sample_seed = stage_seed(
            opts.seed_override.unwrap_or(cfg.simulate.seed),
            STAGE_SAMPLE,
            0,
        );
        let hist = sample(&artifacts.state, cfg.simulate.shots, sample_seed);
        doc["histogram"] = json!(hist);
        doc["shots"] = json!(cfg.simulate.shots);
        doc["sample_seed"] = json!(sample_seed);
    }
    write_output(&serde_json::to_string_pretty(&doc).unwrap(), args.out_path(&cfg).as_deref())
}

fn cmd_bench(args: &RunArgs) -> Result<(), AppError> {
    let (cfg, opts) = args.load()?;
    let fmt = args.format(&cfg)?;
    let rows = run_sweep(&cfg, &opts);
    let text = if fmt == "json" {
        rows_to_json(&rows)?
    } else {
        rows_to_csv(&rows)
    };
    match args.out_path(&cfg) {
        // reports are data files: exact bytes, no trailing newline games
        Some(path) => std::fs::write(&path, &text).map_err(|e| AppError::io(&path, e)),
        None => {
            emit(&text);
            Ok(())
        }
    }
}

fn cmd_export(args: &RunArgs) -> Result<(), AppError> {
    let (cfg, opts) = args.load()?;
    let Some(out) = args.out_path(&cfg) else {
        return Err(AppError::Config(
            "export needs an output path (--out or [output] path)".into(),
        ));
    };
    let cross_seed = stage_seed(
        opts.seed_override.unwrap_or(cfg.cross.seed),
        STAGE_CROSS,
        0,
    );
    let fit = fit_point(&cfg, cfg.grid.qubits, cross_seed)?;
    let plan = compile_plan(&cfg, &fit.tt)?;
    export_circuit(&plan, &out)
}

fn cmd_import_check(file: &Path) -> Result<(), AppError> {
    let plan = import_circuit(file)?;
    let sizes = depth_report(&plan);
    let doc = json!({
        "num_qubits": plan.num_qubits(),
        "gate_count": sizes.gate_count,
        "depth": sizes.depth,
        "max_gate_width": sizes.max_gate_width,
        "normalizer": plan.normalizer(),
    });
    emit(&serde_json::to_string_pretty(&doc).unwrap());
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Compile(args) => cmd_compile(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Export(args) => cmd_export(args),
        Command::ImportCheck { file } => cmd_import_check(file),
    };
    if let Err(e) = result {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
