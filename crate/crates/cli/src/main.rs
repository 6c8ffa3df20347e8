use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sdlab_core::checks::{run_checks, CheckOptions, SuiteFilter};
use sdlab_core::reduction::sign_table;
use sdlab_core::systems::{GridSpec, System, SystemSpec};
use sdlab_core::timestep::{integrate, IntegratorConfig, Method};
use sdlab_core::systems::HamiltonianSystem;

/// Verification suites and simulations for gauge-reduced Stokes-Dirac
/// structures on periodic grids.
#[derive(Parser, Debug)]
#[command(name = "sdlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run property suites and report residuals against tolerances.
    Check {
        /// all, dec, dirac, reduction, fluid or systems.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Multiplies every exactness tolerance.
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Integrate a system described by a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        /// Grid sizes, e.g. `16` or `8,8,8`; spacings reset to `2π / N`.
        #[arg(long)]
        grid: Option<String>,
        /// rk4 or implicit_midpoint.
        #[arg(long)]
        integrator: Option<String>,
        #[arg(long, env = "SDLAB_OUT", default_value = "sdlab-out")]
        out: PathBuf,
    },
    /// Print the sign table of the reduced structure.
    Signs {
        #[arg(long, default_value_t = 3)]
        nmax: usize,
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        match self {
            Failure::Usage(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
            Failure::Runtime(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(1)
            }
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { suite, seed, tol_scale, json } => cmd_check(&suite, seed, tol_scale, json),
        Command::Simulate { config, dt, steps, grid, integrator, out } => {
            cmd_simulate(&config, dt, steps, grid.as_deref(), integrator.as_deref(), &out)
        }
        Command::Signs { nmax, json } => cmd_signs(nmax, json),
    };
    match result {
        Ok(code) => code,
        Err(f) => f.report(),
    }
}

fn cmd_check(suite: &str, seed: u64, tol_scale: f64, json: bool) -> Result<ExitCode, Failure> {
    let filter: SuiteFilter = suite.parse().map_err(usage)?;
    if !(tol_scale > 0.0 && tol_scale.is_finite()) {
        return Err(usage(format!("--tol-scale must be positive, got {tol_scale}")));
    }
    let results = run_checks(filter, CheckOptions { seed, tol_scale }).map_err(runtime)?;
    let failed = results.iter().filter(|r| !r.passed).count();
    if json {
        println!("{}", serde_json::to_string_pretty(&results).map_err(runtime)?);
    } else {
        for r in &results {
            println!("{r}");
        }
        println!("{} passed, {failed} failed (seed {seed})", results.len() - failed);
    }
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn parse_sizes(text: &str) -> Result<Vec<usize>, Failure> {
    text.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| usage(format!("bad --grid entry `{p}`: {e}"))))
        .collect()
}

fn cmd_simulate(
    config: &Path,
    dt: Option<f64>,
    steps: Option<usize>,
    grid: Option<&str>,
    integrator: Option<&str>,
    out: &Path,
) -> Result<ExitCode, Failure> {
    let text = fs::read_to_string(config).map_err(|e| usage(format!("cannot read {}: {e}", config.display())))?;
    let mut spec: SystemSpec =
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", config.display())))?;

    if let Some(g) = grid {
        let sizes = parse_sizes(g)?;
        let n = spec.system.signature().0;
        let sizes = if sizes.len() == 1 { vec![sizes[0]; n] } else { sizes };
        spec.grid = GridSpec {
            sizes,
            spacings: None,
            metric: spec.grid.metric.take(),
        };
    }
    let method = integrator.map(|m| m.parse::<Method>()).transpose().map_err(usage)?;
    let mut cfg = match (spec.integrator.clone(), dt, steps) {
        (Some(cfg), _, _) => cfg,
        (None, Some(dt), Some(steps)) => IntegratorConfig::new(Method::ImplicitMidpoint, dt, steps),
        (None, _, _) => {
            return Err(usage("no integrator settings: add an `integrator` section or pass --dt and --steps"));
        }
    };
    if let Some(dt) = dt {
        cfg.dt = dt;
    }
    if let Some(steps) = steps {
        cfg.steps = steps;
    }
    if let Some(m) = method {
        cfg.method = m;
    }
    spec.integrator = Some(cfg.clone());
    spec.validate().map_err(usage)?;

    let system = System::from_spec(&spec).map_err(usage)?;
    let state = system.initial_state(&spec.initial).map_err(usage)?;
    let output = integrate(&system, state, &cfg).map_err(runtime)?;
    let written = output.write_to(out).map_err(runtime)?;

    let last = output.trace.rows.last().expect("trace has the initial row");
    println!(
        "{}: {} steps of {:?} (dt = {}), t = {}, H = {:.12e}, drift = {:.3e}, conserved drift = {:.3e}",
        system.name(),
        cfg.steps,
        cfg.method,
        cfg.dt,
        last.t,
        last.h,
        last.drift,
        output.trace.conserved_drift()
    );
    println!("wrote {} files to {}", written.len(), out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_signs(nmax: usize, json: bool) -> Result<ExitCode, Failure> {
    if !(1..=3).contains(&nmax) {
        return Err(usage(format!("--nmax must be between 1 and 3, got {nmax}")));
    }
    let rows = sign_table(nmax).map_err(runtime)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&rows).map_err(runtime)?);
        return Ok(ExitCode::SUCCESS);
    }
    let yn = |b: bool| if b { "yes" } else { "no" };
    println!(
        "{:>2} {:>2} {:>2} {:>2} {:>2}  {:>8} {:>10} {:>8}  {:>16} {:>14}  {:>5} {:>5}  {:>11}  system",
        "n", "k", "p", "q", "r", "composed", "closed", "matrix", "closed_agrees", "matrix_agrees", "f_p", "f_q", "flow_matrix"
    );
    for r in rows {
        let system = match (r.n, r.k) {
            (1, 0) => "telegrapher, string",
            (3, 1) => "maxwell",
            _ => "-",
        };
        println!(
            "{:>2} {:>2} {:>2} {:>2} {:>2}  {:>8} {:>10} {:>8}  {:>16} {:>14}  {:>5} {:>5}  {:>11}  {}",
            r.n,
            r.k,
            r.p,
            r.q,
            r.r,
            r.composed_sign,
            r.redpoisson_sign,
            r.matform_sign,
            yn(r.redpoisson_agrees),
            yn(r.matform_agrees),
            r.fp_sign,
            r.fq_sign,
            yn(r.flow_matrix_reproduced),
            system
        );
    }
    Ok(ExitCode::SUCCESS)
}
