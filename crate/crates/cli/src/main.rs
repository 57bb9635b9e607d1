use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use m2ch_cli::commands;
use m2ch_cli::{CliError, RunConfig};

/// Conservative solutions of the modified two-component Camassa–Holm system.
///
/// Exit codes: 0 success, 1 config error, 2 numerical failure, 3 IO error.
#[derive(Parser)]
#[command(name = "m2ch", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured problem and write snapshots.
    Run { config: PathBuf },
    /// Differences between the snapshots of two runs; with a third run, the
    /// observed convergence order.
    Compare { dir_a: PathBuf, dir_b: PathBuf, dir_c: Option<PathBuf> },
    /// Distance bounds between the configured data and perturbations of it.
    Metric { config: PathBuf },
    /// Invariant-set check of a Lagrangian snapshot CSV.
    Check {
        snapshot: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

fn execute(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run { config } => {
            let cfg = RunConfig::load(&config)?;
            let s = commands::run(&cfg)?;
            println!("snapshots: {}", s.snapshots);
            println!("energy drift: {:.3e}", s.energy_drift);
            println!("max constraint residual: {:.3e}", s.max_residual);
            for e in &s.events {
                println!("breaking at t = {:.6} for labels [{:.4}, {:.4}]", e.time, e.xi_start, e.xi_end);
            }
            for w in &s.warnings {
                eprintln!("warning: {w}");
            }
        }
        Command::Compare { dir_a, dir_b, dir_c } => {
            let mut dirs = vec![dir_a, dir_b];
            dirs.extend(dir_c);
            print!("{}", commands::format_diffs(&commands::compare(&dirs)?));
        }
        Command::Metric { config } => {
            let cfg = RunConfig::load(&config)?;
            println!("epsilon,t,distance,ratio");
            for r in commands::metric(&cfg)? {
                let ratio = r.row.ratio.map(|v| format!("{v:.6}")).unwrap_or_default();
                println!("{:e},{},{:.6e},{ratio}", r.epsilon, r.row.t, r.row.distance);
            }
        }
        Command::Check { snapshot, tol } => {
            let g = commands::check(&snapshot, tol)?;
            println!("min_nu {:.6e}", g.min_nu);
            println!("min_delta {:.6e}", g.min_delta);
            println!("res_218 {:.6e}", g.res_218);
            println!("res_219 {:.6e}", g.res_219);
            if !g.passes() {
                return Err(CliError::Numerical(format!("snapshot fails the invariant-set check at {tol:e}")));
            }
            println!("ok");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("m2ch: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
