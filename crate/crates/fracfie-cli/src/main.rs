//! Command-line front end: solve the integral equation, check the existence
//! hypotheses, and run measure-of-noncompactness diagnostics, emitting
//! machine-readable reports whose headers carry the full run manifest.
//!
//! Exit codes: 0 success, 1 input error, 2 non-convergence, 3 infeasible
//! hypotheses, 4 diagnostic violation.

use clap::{Parser, Subcommand};
use fracfie::mnc::{darbo_iteration_diagnostic, family_modulus, sample_family};
use fracfie::problems::{builtin, load_problem, BUILTIN_NAMES};
use fracfie::solver::{
    apply_h, check_assumption_v, contraction_estimate, hypothesis_report, picard_solve,
    ContractionEstimate, FieProblem, PhatMode, SolveResult,
};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 1;
const EXIT_NO_CONVERGENCE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_DIAGNOSTIC: u8 = 4;

/// Slack for the nonincreasing check on the gamma sequence. At finite theta
/// the sequence can rebound after an initial collapse while still obeying
/// the one-step bound gamma' <= p1 * gamma + c(theta), so a step counts as a
/// violation only when it breaks both the monotone and the one-step bound.
const MONOTONE_SLACK: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "fracfie",
    version,
    about = "Fractional integral equation toolkit: solver, hypothesis checks, MNC diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run Picard iteration on a problem and report the solution
    Solve {
        /// Built-in problem name or path to a problem JSON file
        #[arg(long)]
        problem: String,
        /// Number of grid nodes
        #[arg(long, default_value_t = 1025)]
        grid: usize,
        /// Sup-norm step tolerance
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Iteration cap
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        /// Write the JSON report here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the per-iteration residual CSV here
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check the self-map hypothesis and report feasible ball radii
    Check {
        #[arg(long)]
        problem: String,
        /// Which P-hat enters the inequality: "definition" or "paper"
        #[arg(long, default_value = "paper")]
        mode: String,
        /// Check this single radius instead of scanning
        #[arg(long)]
        e0: Option<f64>,
        /// Scan range and step count: LO HI STEPS
        #[arg(long, num_args = 3, value_names = ["LO", "HI", "STEPS"])]
        scan: Option<Vec<String>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Iterate a seeded family under the operator and track its modulus
    Mnc {
        #[arg(long)]
        problem: String,
        /// Members in the seeded family
        #[arg(long, default_value_t = 8)]
        family_size: usize,
        /// Modulus window
        #[arg(long, default_value_t = 0.05)]
        theta: f64,
        /// Iterations of the Darbo diagnostic
        #[arg(long, default_value_t = 6)]
        iters: usize,
        /// Random convex combinations added per generation
        #[arg(long, default_value_t = 16)]
        hull_samples: usize,
        /// Seed for all randomness in this run
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Grid nodes for the family members
        #[arg(long, default_value_t = 257)]
        grid: usize,
        /// Operator to iterate: "h" (the problem operator) or "identity"
        #[arg(long, default_value = "h")]
        operator: String,
        /// Write the gamma-sequence CSV here instead of standard output
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also write a JSON report here
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Everything needed to reproduce a run; embedded in every output header.
#[derive(Clone, Serialize)]
struct RunManifest {
    command: String,
    problem: String,
    grid_n: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
    mode: Option<String>,
    theta: Option<f64>,
    family_size: Option<usize>,
    hull_samples: Option<usize>,
    iters: Option<usize>,
    operator: Option<String>,
    out: Option<String>,
    csv: Option<String>,
    version: String,
}

impl RunManifest {
    fn new(command: &str, problem: &str, grid_n: usize) -> Self {
        RunManifest {
            command: command.into(),
            problem: problem.into(),
            grid_n,
            tol: 1e-10,
            max_iter: 200,
            seed: 42,
            mode: None,
            theta: None,
            family_size: None,
            hull_samples: None,
            iters: None,
            operator: None,
            out: None,
            csv: None,
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

fn load(problem: &str) -> Result<FieProblem, fracfie::Error> {
    if BUILTIN_NAMES.contains(&problem) {
        builtin(problem)
    } else {
        load_problem(problem)
    }
}

fn emit(path: &Option<PathBuf>, content: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn json_report<T: Serialize>(manifest: &RunManifest, key: &str, payload: &T) -> String {
    let mut root = serde_json::Map::new();
    root.insert(
        "manifest".into(),
        serde_json::to_value(manifest).expect("manifest serialization"),
    );
    root.insert(
        key.into(),
        serde_json::to_value(payload).expect("payload serialization"),
    );
    let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(root))
        .expect("report serialization");
    s.push('\n');
    s
}

fn csv_header(manifest: &RunManifest) -> String {
    format!(
        "# manifest: {}\n",
        serde_json::to_string(manifest).expect("manifest serialization")
    )
}

fn path_str(p: &Option<PathBuf>) -> Option<String> {
    p.as_ref().map(|p| p.display().to_string())
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("FRACFIE_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("warning: could not configure thread pool: {e}");
                }
            }
            _ => {
                eprintln!("error: FRACFIE_THREADS must be a positive integer, got {threads:?}");
                return ExitCode::from(EXIT_INPUT);
            }
        }
    }
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(CommandError { code, message }) => {
            eprintln!("error: {message}");
            code
        }
    };
    ExitCode::from(code)
}

struct CommandError {
    code: u8,
    message: String,
}

fn input_err(e: impl std::fmt::Display) -> CommandError {
    CommandError {
        code: EXIT_INPUT,
        message: e.to_string(),
    }
}

fn run_err(e: impl std::fmt::Display) -> CommandError {
    CommandError {
        code: EXIT_NO_CONVERGENCE,
        message: e.to_string(),
    }
}

fn run(command: Command) -> Result<u8, CommandError> {
    match command {
        Command::Solve {
            problem,
            grid,
            tol,
            max_iter,
            out,
            csv,
        } => cmd_solve(&problem, grid, tol, max_iter, out, csv),
        Command::Check {
            problem,
            mode,
            e0,
            scan,
            out,
        } => cmd_check(&problem, &mode, e0, scan, out),
        Command::Mnc {
            problem,
            family_size,
            theta,
            iters,
            hull_samples,
            seed,
            grid,
            operator,
            csv,
            out,
        } => cmd_mnc(
            &problem,
            family_size,
            theta,
            iters,
            hull_samples,
            seed,
            grid,
            &operator,
            csv,
            out,
        ),
    }
}

fn cmd_solve(
    problem_src: &str,
    grid: usize,
    tol: f64,
    max_iter: usize,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
) -> Result<u8, CommandError> {
    let problem = load(problem_src).map_err(input_err)?;
    let mut manifest = RunManifest::new("solve", problem_src, grid);
    manifest.tol = tol;
    manifest.max_iter = max_iter;
    manifest.out = path_str(&out);
    manifest.csv = path_str(&csv);

    let y0 = problem.zero_iterate(grid).map_err(input_err)?;
    let result: SolveResult = picard_solve(&problem, &y0, tol, max_iter).map_err(run_err)?;

    emit(&out, &json_report(&manifest, "result", &result)).map_err(input_err)?;
    if let Some(csv_path) = &csv {
        let mut body = csv_header(&manifest);
        body.push_str("iteration,step_diff,residual\n");
        for (i, (step, res)) in result
            .step_history
            .iter()
            .zip(&result.residual_history)
            .enumerate()
        {
            writeln!(body, "{},{},{}", i + 1, step, res).expect("string write");
        }
        std::fs::write(csv_path, body).map_err(input_err)?;
    }
    if result.converged {
        Ok(EXIT_OK)
    } else {
        eprintln!(
            "did not converge in {} iterations (last step {:.3e})",
            result.iterations,
            result.step_history.last().copied().unwrap_or(f64::NAN)
        );
        Ok(EXIT_NO_CONVERGENCE)
    }
}

fn cmd_check(
    problem_src: &str,
    mode_str: &str,
    e0: Option<f64>,
    scan: Option<Vec<String>>,
    out: Option<PathBuf>,
) -> Result<u8, CommandError> {
    let problem = load(problem_src).map_err(input_err)?;
    let mode: PhatMode = mode_str.parse().map_err(input_err)?;
    let scan_range = match &scan {
        None => (1e-3, 2.0, 400),
        Some(parts) => {
            let lo: f64 = parts[0].parse().map_err(input_err)?;
            let hi: f64 = parts[1].parse().map_err(input_err)?;
            let steps: usize = parts[2].parse().map_err(input_err)?;
            (lo, hi, steps)
        }
    };
    let mut manifest = RunManifest::new("check", problem_src, problem.default_grid_n);
    manifest.mode = Some(mode_str.into());
    manifest.out = path_str(&out);

    if let Some(radius) = e0 {
        let check = check_assumption_v(&problem, radius, mode).map_err(input_err)?;
        let feasible = check.satisfied;
        emit(&out, &json_report(&manifest, "check", &check)).map_err(input_err)?;
        if feasible {
            Ok(EXIT_OK)
        } else {
            eprintln!("hypothesis (V) fails at e0 = {radius}: lhs = {}", check.lhs);
            Ok(EXIT_INFEASIBLE)
        }
    } else {
        let report = hypothesis_report(&problem, mode, scan_range).map_err(input_err)?;
        let feasible = report.e0_feasible_interval.is_some();
        emit(&out, &json_report(&manifest, "report", &report)).map_err(input_err)?;
        if feasible {
            Ok(EXIT_OK)
        } else {
            eprintln!(
                "no feasible e0 in [{}, {}] ({} mode)",
                scan_range.0, scan_range.1, mode_str
            );
            Ok(EXIT_INFEASIBLE)
        }
    }
}

#[derive(Serialize)]
struct MncReport {
    gammas: Vec<f64>,
    seed_modulus: f64,
    contraction: Option<ContractionEstimate>,
    nonincreasing: bool,
}

#[allow(clippy::too_many_arguments)]
fn cmd_mnc(
    problem_src: &str,
    family_size: usize,
    theta: f64,
    iters: usize,
    hull_samples: usize,
    seed: u64,
    grid: usize,
    operator: &str,
    csv: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Result<u8, CommandError> {
    let problem = load(problem_src).map_err(input_err)?;
    let mut manifest = RunManifest::new("mnc", problem_src, grid);
    manifest.seed = seed;
    manifest.theta = Some(theta);
    manifest.family_size = Some(family_size);
    manifest.hull_samples = Some(hull_samples);
    manifest.iters = Some(iters);
    manifest.operator = Some(operator.into());
    manifest.out = path_str(&out);
    manifest.csv = path_str(&csv);

    let radius = problem.e0.unwrap_or(0.5);
    let family = sample_family(problem.kernel.interval, grid, family_size, radius, seed)
        .map_err(input_err)?;
    let seed_modulus = family_modulus(&family, theta).map_err(input_err)?;

    let (gammas, contraction) = match operator {
        "h" => {
            let gammas =
                darbo_iteration_diagnostic(|g| apply_h(&problem, g), &family, iters, theta,
                    hull_samples, seed)
                .map_err(run_err)?;
            let est = contraction_estimate(&problem, &family, theta).map_err(run_err)?;
            (gammas, Some(est))
        }
        "identity" => {
            let gammas = darbo_iteration_diagnostic(
                |g| Ok(g.clone()),
                &family,
                iters,
                theta,
                hull_samples,
                seed,
            )
            .map_err(run_err)?;
            (gammas, None)
        }
        other => {
            return Err(input_err(format!(
                "unknown operator {other:?}; expected \"h\" or \"identity\""
            )))
        }
    };

    // A step is a violation only if it is both above the previous value and
    // above the one-step contraction bound (when that bound is available).
    let nonincreasing = gammas.windows(2).all(|w| {
        let monotone = w[1] <= w[0] + MONOTONE_SLACK;
        let bounded = contraction
            .as_ref()
            .map(|c| w[1] <= c.p1 * w[0] + c.c_theta + MONOTONE_SLACK)
            .unwrap_or(false);
        monotone || bounded
    });

    let report = MncReport {
        gammas: gammas.clone(),
        seed_modulus,
        contraction,
        nonincreasing,
    };
    let mut body = csv_header(&manifest);
    body.push_str("generation,gamma\n");
    for (q, g) in gammas.iter().enumerate() {
        writeln!(body, "{q},{g}").expect("string write");
    }
    emit(&csv, &body).map_err(input_err)?;
    if let Some(out_path) = &out {
        std::fs::write(out_path, json_report(&manifest, "report", &report)).map_err(input_err)?;
    }
    if report.nonincreasing {
        Ok(EXIT_OK)
    } else {
        eprintln!("gamma sequence increased beyond the contraction bound: {gammas:?}");
        Ok(EXIT_DIAGNOSTIC)
    }
}
