//! The `bankdyn` command-line tool.
//!
//! Every subcommand reads inputs, runs one library capability, and
//! prints a deterministic report to stdout: a `#` provenance line with
//! the resolved parameters (never a timestamp), then CSV. Identical
//! invocations produce identical bytes.
//!
//! On failure nothing reaches stdout; exactly one diagnostic line goes
//! to stderr and the exit code states the failure class:
//!
//! * 1: bad usage or run controls (arguments, step/grid rules)
//! * 2: unreadable or invalid input (parse errors, model violations)
//! * 3: numeric failure (negative levels, singularities, no unique
//!   steady state)
//! * 4: cross-validation failure (`validate` found a mismatch)

use crate::analysis::{self, AnalysisError};
use crate::interaction::{self, DdeError};
use crate::io;
use crate::kolmogorov::{self, EngineError};
use crate::model::{summarize_violations, uniform_grid, DelayCostModel, Matrix};
use crate::ssa::{self, SsaError};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "bankdyn",
    version,
    about = "Deterministic and stochastic simulation of client/service dynamics",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate expected state levels over time
    Simulate {
        /// Model description file
        model: PathBuf,
        /// Horizon of the run
        #[arg(long = "t-end")]
        t_end: f64,
        /// Number of output sample times, endpoints included
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Integration step (default: resolves the fastest transition)
        #[arg(long)]
        dt: Option<f64>,
        /// Run a stochastic ensemble instead of the expectation equations
        #[arg(long)]
        stochastic: bool,
        /// Ensemble size for --stochastic
        #[arg(long, default_value_t = 100)]
        replications: u64,
        /// Ensemble seed for --stochastic
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Solve for the steady occupancy of a closed model
    Steady {
        /// Model description file
        model: PathBuf,
    },
    /// Integrate the delayed bank/client interaction
    Interact {
        /// Interaction config file
        config: PathBuf,
        /// Horizon of the run
        #[arg(long = "t-end")]
        t_end: f64,
        /// Number of output sample times, endpoints included
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Integration step (default: resolves rates and lags; must not
        /// exceed the smallest positive lag)
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Total and per-operation time and money costs
    Cost {
        /// CSV of time costs, one row per meta-operation
        #[arg(long)]
        delays: PathBuf,
        /// CSV of unit costs, same shape as the delays
        #[arg(long)]
        costs: PathBuf,
    },
    /// Utilization flags per meta-operation
    Bottleneck {
        /// CSV vector of arrival rates
        #[arg(long)]
        arrivals: PathBuf,
        /// CSV vector of service rates
        #[arg(long)]
        services: PathBuf,
        /// Warning threshold in (0, 1]
        #[arg(long, default_value_t = analysis::DEFAULT_WARN_THRESHOLD)]
        threshold: f64,
    },
    /// Cross-check a stochastic ensemble against the expectations
    Validate {
        /// Model description file
        model: PathBuf,
        /// Horizon of the run
        #[arg(long = "t-end")]
        t_end: f64,
        /// Number of comparison sample times, endpoints included
        #[arg(long, default_value_t = 21)]
        points: usize,
        /// Integration step for the deterministic side
        #[arg(long)]
        dt: Option<f64>,
        /// Ensemble size, at least two
        #[arg(long, default_value_t = 500)]
        replications: u64,
        /// Ensemble seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

type CliResult = Result<(), Failure>;

fn engine_failure(err: EngineError) -> Failure {
    let code = match err {
        EngineError::InvalidModel(_) | EngineError::SourceForbidden { .. } => 2,
        EngineError::BadGrid(_) | EngineError::BadStep(_) => 1,
        _ => 3,
    };
    Failure::new(code, err.to_string())
}

fn dde_failure(err: DdeError) -> Failure {
    let code = match err {
        DdeError::InvalidConfig(_) => 2,
        DdeError::BadGrid(_) | DdeError::BadStep(_) | DdeError::StepExceedsLag { .. } => 1,
        _ => 3,
    };
    Failure::new(code, err.to_string())
}

fn ssa_failure(err: SsaError) -> Failure {
    let code = match err {
        SsaError::InvalidModel(_) | SsaError::NonIntegerInitial { .. } => 2,
        SsaError::BadGrid(_) | SsaError::NoReplications => 1,
        _ => 3,
    };
    Failure::new(code, err.to_string())
}

fn analysis_failure(err: AnalysisError) -> Failure {
    let code = match err {
        AnalysisError::BadThreshold(_) => 1,
        _ => 2,
    };
    Failure::new(code, err.to_string())
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(2, format!("cannot read {}: {e}", path.display())))
}

fn parse_model_file(path: &Path) -> Result<io::ModelDocument, Failure> {
    let text = read_file(path)?;
    let doc = io::parse_model(&text)
        .map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))?;
    let report = doc.graph.validate();
    if !report.is_ok() {
        return Err(Failure::new(
            2,
            format!("invalid model {}: {}", path.display(), summarize_violations(&report.violations)),
        ));
    }
    Ok(doc)
}

fn parse_matrix_file(path: &Path) -> Result<Matrix, Failure> {
    let text = read_file(path)?;
    io::parse_matrix_csv(&text).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))
}

fn parse_vector_file(path: &Path, what: &str) -> Result<Vec<f64>, Failure> {
    parse_matrix_file(path)?.as_vector().ok_or_else(|| {
        Failure::new(2, format!("{what} in {} must be a single row or column", path.display()))
    })
}

fn check_run_controls(t_end: f64, points: usize, dt: Option<f64>) -> CliResult {
    if !t_end.is_finite() || t_end <= 0.0 {
        return Err(Failure::new(1, format!("--t-end must be positive and finite, got {t_end}")));
    }
    if points < 2 {
        return Err(Failure::new(1, format!("--points must be at least 2, got {points}")));
    }
    if let Some(dt) = dt {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Failure::new(1, format!("--dt must be positive and finite, got {dt}")));
        }
    }
    Ok(())
}

fn check_replications(replications: u64) -> CliResult {
    if replications < 2 {
        return Err(Failure::new(
            1,
            format!("--replications must be at least 2, got {replications}"),
        ));
    }
    Ok(())
}

/// Runs the CLI against explicit argv and output streams; returns the
/// exit code. `args[0]` is the binary name. This is the whole tool:
/// `main` only wires it to the process environment.
pub fn run(args: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => match err.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                let _ = write!(stdout, "{err}");
                return 0;
            }
            _ => {
                let line = err
                    .to_string()
                    .lines()
                    .next()
                    .unwrap_or("invalid arguments")
                    .trim_start_matches("error: ")
                    .to_string();
                let _ = writeln!(stderr, "bankdyn: {line}");
                return 1;
            }
        },
    };

    let mut out = String::new();
    let result = match cli.command {
        Command::Simulate { model, t_end, points, dt, stochastic, replications, seed } => {
            run_simulate(&mut out, &model, t_end, points, dt, stochastic, replications, seed)
        }
        Command::Steady { model } => run_steady(&mut out, &model),
        Command::Interact { config, t_end, points, dt } => {
            run_interact(&mut out, &config, t_end, points, dt)
        }
        Command::Cost { delays, costs } => run_cost(&mut out, &delays, &costs),
        Command::Bottleneck { arrivals, services, threshold } => {
            run_bottleneck(&mut out, &arrivals, &services, threshold)
        }
        Command::Validate { model, t_end, points, dt, replications, seed } => {
            run_validate(&mut out, &model, t_end, points, dt, replications, seed)
        }
    };

    match result {
        Ok(()) => {
            let _ = stdout.write_all(out.as_bytes());
            0
        }
        Err(failure) => {
            let _ = writeln!(stderr, "bankdyn: {}", failure.message);
            failure.code
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_simulate(
    out: &mut String,
    model: &Path,
    t_end: f64,
    points: usize,
    dt: Option<f64>,
    stochastic: bool,
    replications: u64,
    seed: u64,
) -> CliResult {
    check_run_controls(t_end, points, dt)?;
    let doc = parse_model_file(model)?;
    let grid = uniform_grid(t_end, points).expect("run controls already checked");

    if stochastic {
        check_replications(replications)?;
        let summary = ssa::ensemble_mean(&doc.graph, &grid, seed, replications)
            .map_err(ssa_failure)?;
        let _ = writeln!(
            out,
            "# bankdyn simulate model={} method=ensemble t_end={t_end} points={points} replications={replications} seed={seed}",
            doc.name
        );
        let stderr = summary.stderr.as_ref().expect("two or more replications");
        let n = summary.n_states;
        let mut columns: Vec<String> = doc.graph.states.clone();
        columns.extend(doc.graph.states.iter().map(|s| format!("{s}.se")));
        let mut values = Vec::with_capacity(grid.len() * 2 * n);
        for k in 0..grid.len() {
            values.extend_from_slice(&summary.mean[k * n..(k + 1) * n]);
            values.extend_from_slice(&stderr[k * n..(k + 1) * n]);
        }
        out.push_str(&io::table_csv(&summary.times, &columns, &values));
    } else {
        let dt = dt.unwrap_or_else(|| kolmogorov::default_step(&doc.graph, t_end));
        let trajectory = kolmogorov::integrate(&doc.graph, &grid, dt).map_err(engine_failure)?;
        let _ = writeln!(
            out,
            "# bankdyn simulate model={} method=expectation t_end={t_end} points={points} dt={dt}",
            doc.name
        );
        out.push_str(&io::trajectory_csv(&trajectory, &doc.graph.states));
    }
    Ok(())
}

fn run_steady(out: &mut String, model: &Path) -> CliResult {
    let doc = parse_model_file(model)?;
    let levels = kolmogorov::steady_state(&doc.graph).map_err(engine_failure)?;
    let _ = writeln!(out, "# bankdyn steady model={}", doc.name);
    out.push_str("state,level\n");
    for (name, level) in doc.graph.states.iter().zip(levels.iter()) {
        let _ = writeln!(out, "{name},{level}");
    }
    Ok(())
}

fn run_interact(
    out: &mut String,
    config: &Path,
    t_end: f64,
    points: usize,
    dt: Option<f64>,
) -> CliResult {
    check_run_controls(t_end, points, dt)?;
    let text = read_file(config)?;
    let cfg = io::parse_interaction(&text)
        .map_err(|e| Failure::new(2, format!("{}: {e}", config.display())))?;
    let grid = uniform_grid(t_end, points).expect("run controls already checked");
    let dt = dt.unwrap_or_else(|| interaction::default_step(&cfg, t_end));
    let trajectory = interaction::integrate(&cfg, &grid, dt).map_err(dde_failure)?;
    let _ = writeln!(out, "# bankdyn interact t_end={t_end} points={points} dt={dt}");
    let columns = vec!["bank".to_string(), "client".to_string()];
    out.push_str(&io::trajectory_csv(&trajectory, &columns));
    Ok(())
}

fn run_cost(out: &mut String, delays: &Path, costs: &Path) -> CliResult {
    let d = parse_matrix_file(delays)?;
    let v = parse_matrix_file(costs)?;
    let staff_columns = d.cols();
    let model = DelayCostModel::new(d, v, staff_columns, 0)
        .map_err(|e| Failure::new(2, e.to_string()))?;
    let per = analysis::per_meta_operation(&model);
    let time = analysis::total_delay(&model);
    let cost = analysis::unit_cost(&model);
    let _ = writeln!(
        out,
        "# bankdyn cost operations={} columns={}",
        model.meta_operations(),
        model.staff_columns() + model.external_columns()
    );
    if time < 0.0 {
        out.push_str("# net amplification: negative total time cost\n");
    }
    out.push_str("op,time,cost\n");
    for (i, op) in per.iter().enumerate() {
        let _ = writeln!(out, "{i},{},{}", op.time, op.cost);
    }
    let _ = writeln!(out, "total,{time},{cost}");
    Ok(())
}

fn run_bottleneck(
    out: &mut String,
    arrivals: &Path,
    services: &Path,
    threshold: f64,
) -> CliResult {
    let a = parse_vector_file(arrivals, "arrival rates")?;
    let s = parse_vector_file(services, "service rates")?;
    let rows = analysis::utilization(&a, &s, threshold).map_err(analysis_failure)?;
    let _ = writeln!(out, "# bankdyn bottleneck operations={} threshold={threshold}", rows.len());
    out.push_str("op,utilization,flag\n");
    for row in &rows {
        let _ = writeln!(out, "{},{},{}", row.index, row.rho, row.flag);
    }
    Ok(())
}

fn run_validate(
    out: &mut String,
    model: &Path,
    t_end: f64,
    points: usize,
    dt: Option<f64>,
    replications: u64,
    seed: u64,
) -> CliResult {
    check_run_controls(t_end, points, dt)?;
    check_replications(replications)?;
    let doc = parse_model_file(model)?;
    let grid = uniform_grid(t_end, points).expect("run controls already checked");
    let dt = dt.unwrap_or_else(|| kolmogorov::default_step(&doc.graph, t_end));

    let expected = kolmogorov::integrate(&doc.graph, &grid, dt).map_err(engine_failure)?;
    let summary =
        ssa::ensemble_mean(&doc.graph, &grid, seed, replications).map_err(ssa_failure)?;
    let comparison = ssa::compare_to_ode(&summary, &expected).map_err(ssa_failure)?;

    if !comparison.pass {
        return Err(Failure::new(
            4,
            format!(
                "validation failed: {} of {} cells within tolerance (worst ratio {})",
                comparison.within, comparison.cells, comparison.worst_ratio
            ),
        ));
    }
    let _ = writeln!(
        out,
        "# bankdyn validate model={} t_end={t_end} points={points} dt={dt} replications={replications} seed={seed}",
        doc.name
    );
    let _ = writeln!(out, "cells={}", comparison.cells);
    let _ = writeln!(out, "within={}", comparison.within);
    let _ = writeln!(out, "worst_ratio={}", comparison.worst_ratio);
    let _ = writeln!(out, "result=PASS");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(parts: &[&str]) -> Vec<String> {
        parts.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn unknown_subcommand_is_a_usage_error() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(&argv(&["bankdyn", "frobnicate"]), &mut out, &mut err);
        assert_eq!(code, 1);
        assert!(out.is_empty());
        let text = String::from_utf8(err).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("bankdyn: "));
    }

    #[test]
    fn help_goes_to_stdout_with_success() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(&argv(&["bankdyn", "--help"]), &mut out, &mut err);
        assert_eq!(code, 0);
        assert!(err.is_empty());
        assert!(String::from_utf8(out).unwrap().contains("simulate"));
    }

    #[test]
    fn missing_file_is_an_input_error() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            &argv(&["bankdyn", "simulate", "/nonexistent.model", "--t-end", "1"]),
            &mut out,
            &mut err,
        );
        assert_eq!(code, 2);
        assert!(out.is_empty());
        assert!(String::from_utf8(err).unwrap().contains("cannot read"));
    }
}
