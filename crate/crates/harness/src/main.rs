use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sqg_harness::config::RunConfig;
use sqg_harness::sweep::{execute_sweep, parse_epsilons, RegimeKind, SweepSpec};
use sqg_harness::verify::{run_suite, Suite};
use sqg_harness::{exit, out_root, run, run_name, HarnessError, Result};

#[derive(Parser)]
#[command(name = "sqg", version, about = "Dispersive SQG runs, epsilon sweeps and verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one trajectory and write its outputs.
    Run { config: PathBuf },
    /// Run an epsilon ladder and compare horizontal means with the limit model.
    Sweep {
        config: PathBuf,
        /// Comma-separated, strictly decreasing.
        #[arg(long)]
        epsilons: String,
        #[arg(long, default_value = "fixed")]
        regime: String,
        /// Combined-regime exponent (`nu = eps^alpha`).
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Execute the property suites and print a pass/fail table.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Also write a JSON summary to this path.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run { config } => {
            let cfg = RunConfig::load(&config)?;
            let dir = out_root().join(run_name(&config));
            let outcome = run::execute(&cfg, &dir)?;
            let m = &outcome.manifest;
            println!("run {}: {}", dir.display(), m.run.status);
            if let Some(l) = &m.energy_ledger {
                println!("energy ledger: max defect {:.3e} {}", l.max_defect, if l.pass { "PASS" } else { "FAIL" });
            }
            if !m.validity.boundary_mass {
                eprintln!(
                    "boundary mass fraction {:.3e} exceeds {:.3e}",
                    m.validity.boundary_mass_fraction, m.validity.boundary_mass_limit
                );
            }
            if !m.validity.regularity {
                eprintln!("run invalid: {}", m.run.status);
            }
            Ok(outcome.exit_code())
        }
        Command::Sweep { config, epsilons, regime, alpha } => {
            let spec = SweepSpec { epsilons: parse_epsilons(&epsilons)?, regime: regime.parse::<RegimeKind>()?, alpha };
            spec.validate()?;
            let cfg = RunConfig::load(&config)?;
            let dir = out_root().join(format!("{}-sweep-{regime}", run_name(&config)));
            let outcome = execute_sweep(&cfg, &spec, &dir)?;
            let v = &outcome.verdict;
            println!("epsilon,D");
            for (e, d) in v.epsilons.iter().zip(&v.deviations) {
                println!("{e},{d:.6e}");
            }
            println!("D strictly decreasing: {}; constraint residual decreasing: {}", v.strictly_decreasing, v.constraint_decreasing);
            println!("verdict: {}", v.verdict);
            if !v.members_valid {
                eprintln!("sweep has invalid members; see member manifests under {}", dir.display());
            }
            Ok(outcome.exit_code())
        }
        Command::Verify { suite, json } => {
            let report = run_suite(suite.parse::<Suite>()?)?;
            print!("{}", report.table());
            if let Some(p) = json {
                let text = serde_json::to_string_pretty(&report).expect("report serializes");
                std::fs::write(&p, text + "\n").map_err(|e| HarnessError::Io { path: p.display().to_string(), source: e })?;
            }
            Ok(if report.pass { exit::OK } else { exit::VERDICT_FAIL })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = dispatch(cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
