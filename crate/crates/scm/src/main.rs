//! Command-line interface: `solve` runs the sequential constraint method
//! and emits a JSONL trace plus a summary; `oracle` computes the exact
//! desk-scale reference solution; `verify` runs the numerical certification
//! suite.
//!
//! Exit codes are a stable contract: 0 success, 1 input error, 2 iteration
//! budget exhausted, 3 infeasible, 4 verification failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use scm::diagnostics::run_full_suite;
use scm::io::{
    write_json_atomic, write_jsonl_trace, ConfigFile, OracleOutput, OracleStatus, Problem,
    ProblemFile, Summary, SCHEMA_VERSION,
};
use scm::operators::FneOperator;
use scm::oracle::{
    project_intersection, project_polyhedron_exact, solve_vip_reference, Polyhedron,
    PolyhedralProjection,
};
use scm::solver::{solve_observed, SolveStatus};
use scm::{Error, Result};

const EXIT_INPUT_ERROR: u8 = 1;
const EXIT_MAX_ITERS: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_VERIFY_FAILED: u8 = 4;

#[derive(Parser)]
#[command(
    name = "scm",
    about = "Sequential constraint method solver for variational inequalities \
             over intersections of fixed-point sets",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the solver on a problem/config pair.
    Solve {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// JSONL trace output (one iteration record per line).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Summary JSON output; printed to stdout when omitted.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Admit non-summable error models (q <= 1), outside the
        /// convergence hypotheses. Exploration only.
        #[arg(long = "unsafe-error")]
        unsafe_error: bool,
    },
    /// Compute the exact reference solution (projection-kind operators
    /// only).
    Oracle {
        #[arg(long)]
        problem: PathBuf,
        /// Solution JSON output; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the numerical certification suite and write a report.
    Verify {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Report JSON output (array of check reports); printed to stdout
        /// when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve {
            problem,
            config,
            trace,
            summary,
            unsafe_error,
        } => cmd_solve(
            &problem,
            &config,
            trace.as_deref(),
            summary.as_deref(),
            unsafe_error,
        ),
        Command::Oracle { problem, out } => cmd_oracle(&problem, out.as_deref()),
        Command::Verify {
            problem,
            config,
            report,
        } => cmd_verify(&problem, &config, report.as_deref()),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::Infeasible => EXIT_INFEASIBLE,
                _ => EXIT_INPUT_ERROR,
            };
            ExitCode::from(code)
        }
    }
}

fn cmd_solve(
    problem_path: &std::path::Path,
    config_path: &std::path::Path,
    trace_path: Option<&std::path::Path>,
    summary_path: Option<&std::path::Path>,
    unsafe_error: bool,
) -> Result<u8> {
    let problem = ProblemFile::parse(problem_path)?.build()?;
    let cfg = ConfigFile::parse(config_path)?.build(unsafe_error)?;
    cfg.resolve_mu(&problem.f)?;

    let x0 = vec![0.0; problem.dim];
    let result = solve_observed(
        &problem.stack,
        &problem.f,
        &x0,
        &cfg,
        problem.known_solution.as_deref(),
        |_, _| {},
    )?;

    if let Some(path) = trace_path {
        write_jsonl_trace(path, &result.trace)?;
    }
    let final_residual = problem.stack.fixed_point_residual(&result.x_final)?;
    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        dist_to_known: problem
            .known_solution
            .as_deref()
            .map(|z| scm::linalg::dist(&result.x_final, z)),
        x_final: result.x_final,
        status: result.status,
        iters: result.iters,
        final_residual,
    };
    emit(summary_path, &summary)?;
    Ok(match result.status {
        SolveStatus::ResidualMet => 0,
        SolveStatus::MaxIters => EXIT_MAX_ITERS,
    })
}

fn cmd_oracle(problem_path: &std::path::Path, out_path: Option<&std::path::Path>) -> Result<u8> {
    let problem = ProblemFile::parse(problem_path)?.build()?;
    if !problem.stack.ops().iter().all(FneOperator::is_projection) {
        return Err(Error::Unsupported(
            "oracle requires projection-kind operators (halfspace, hyperplane, ball, box); \
             soft_threshold and linear_resolvent fixed sets have no exact set oracle"
                .into(),
        ));
    }

    let solution = match solve_reference_for(&problem) {
        Ok(x) => x,
        Err(Error::Infeasible) => {
            let output = OracleOutput {
                schema_version: SCHEMA_VERSION,
                status: OracleStatus::Infeasible,
                x: None,
                active_set: None,
                multipliers: None,
            };
            emit(out_path, &output)?;
            return Ok(EXIT_INFEASIBLE);
        }
        Err(e) => return Err(e),
    };

    // For all-halfspace problems, recover the active set and the
    // variational-inequality multipliers from the KKT projection at the
    // solution: x* = P(x* − γ F(x*)) makes the projection multipliers,
    // scaled by 1/γ, the multipliers of F(x*) + Σ λ_i a_i = 0.
    let (active_set, multipliers) = match Polyhedron::from_stack(&problem.stack) {
        Some(poly) => {
            let gamma = problem.f.auto_mu();
            let fx = problem.f.eval(&solution)?;
            let shifted = scm::linalg::add_scaled(&solution, -gamma, &fx);
            match project_polyhedron_exact(&poly, &shifted)? {
                PolyhedralProjection::Feasible {
                    active_set,
                    multipliers,
                    ..
                } => (
                    Some(active_set),
                    Some(multipliers.iter().map(|l| l / gamma).collect()),
                ),
                PolyhedralProjection::Infeasible => (None, None),
            }
        }
        None => (None, None),
    };

    let output = OracleOutput {
        schema_version: SCHEMA_VERSION,
        status: OracleStatus::Ok,
        x: Some(solution),
        active_set,
        multipliers,
    };
    emit(out_path, &output)?;
    Ok(0)
}

fn solve_reference_for(problem: &Problem) -> Result<Vec<f64>> {
    if let Some(poly) = Polyhedron::from_stack(&problem.stack) {
        // feasibility check up front so empty systems exit cleanly
        if matches!(
            project_polyhedron_exact(&poly, &vec![0.0; problem.dim])?,
            PolyhedralProjection::Infeasible
        ) {
            return Err(Error::Infeasible);
        }
        let project = |y: &[f64]| {
            project_polyhedron_exact(&poly, y).and_then(|p| p.point().map(<[f64]>::to_vec))
        };
        solve_vip_reference(&problem.f, project, &vec![0.0; problem.dim])
    } else {
        let project = |y: &[f64]| project_intersection(&problem.stack, y);
        solve_vip_reference(&problem.f, project, &vec![0.0; problem.dim])
    }
}

fn cmd_verify(
    problem_path: &std::path::Path,
    config_path: &std::path::Path,
    report_path: Option<&std::path::Path>,
) -> Result<u8> {
    let problem = ProblemFile::parse(problem_path)?.build()?;
    let cfg = ConfigFile::parse(config_path)?.build(false)?;
    let reports = run_full_suite(&problem, &cfg);
    emit(report_path, &reports)?;
    let failures: Vec<&str> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.name.as_str())
        .collect();
    if failures.is_empty() {
        eprintln!("verify: all {} checks passed", reports.len());
        Ok(0)
    } else {
        eprintln!(
            "verify: {} of {} checks failed: {}",
            failures.len(),
            reports.len(),
            failures.join(", ")
        );
        Ok(EXIT_VERIFY_FAILED)
    }
}

fn emit<T: serde::Serialize>(path: Option<&std::path::Path>, value: &T) -> Result<()> {
    match path {
        Some(p) => write_json_atomic(p, value),
        None => {
            let text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
                path: "<stdout>".into(),
                source,
            })?;
            println!("{text}");
            Ok(())
        }
    }
}
