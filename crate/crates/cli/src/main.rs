use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use sqg_cli::{orchestrate, THREADS_ENV};
use sqg_core::{parse_config, parse_sweep, ExperimentConfig};

/// Dissipative SQG experiments in Gevrey-Sobolev norms.
///
/// Exit status: 0 when every asserted invariant holds, 1 when one is
/// violated, 2 on configuration, solver or I/O errors.
#[derive(Parser)]
#[command(name = "sqg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment (or sweep) document.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "sqg-out")]
    out: PathBuf,

    /// Overrides every seed in the document.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Suppress progress and result lines.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run,
    /// Run the cross product of all array-valued keys.
    Sweep {
        /// Worker threads (0 = one per core).
        #[arg(long, env = THREADS_ENV, default_value_t = 0)]
        threads: usize,
    },
    /// Run the inequality probes only.
    Verify,
    /// Picard iteration of the mild formulation.
    Picard,
    /// Compare regularized runs against the unregularized baseline.
    KatoCompare,
    /// Re-summarize existing series files.
    Report {
        /// Series files or run directories (default: --out).
        inputs: Vec<PathBuf>,
    },
}

// probe defaults when `verify` is given no document
const VERIFY_DEFAULTS: &str = r#"
grid.n = 16
init.kind = "random_band"
init.band_max = 4.0
params.a = 0.1
params.alpha = 0.25
params.s = 2.5
solver.dt = 1e-3
solver.t_end = 0.0
"#;

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let path = cli.config.as_deref().context("--config PATH is required")?;
    let cfg = parse_config(&read_text(path)?).with_context(|| format!("in {}", path.display()))?;
    Ok(seeded(cfg, cli.seed))
}

fn seeded(cfg: ExperimentConfig, seed: Option<u64>) -> ExperimentConfig {
    match seed {
        Some(s) => cfg.with_seed(s),
        None => cfg,
    }
}

fn verdict(passed: bool) -> ExitCode {
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn execute(cli: &Cli) -> Result<ExitCode> {
    let say = |msg: String| {
        if !cli.quiet {
            println!("{msg}");
        }
    };
    match &cli.command {
        Command::Run => {
            let cfg = load_config(cli)?;
            let s = orchestrate::run_experiment(&cfg, &cli.out, None)?;
            say(format!(
                "{}: t = {}, {} steps, hs_gevrey {:e}, budget residual {:e}",
                s.status, s.t_final, s.steps, s.final_norms.hs_gevrey, s.max_budget_residual
            ));
            for c in s.checks.iter().filter(|c| !c.passed) {
                say(format!(
                    "violated {}: {:e} > {:e}",
                    c.name, c.value, c.tolerance
                ));
            }
            Ok(verdict(s.passed()))
        }
        Command::Sweep { threads } => {
            let path = cli.config.as_deref().context("--config PATH is required")?;
            let mut members =
                parse_sweep(&read_text(path)?).with_context(|| format!("in {}", path.display()))?;
            if let Some(seed) = cli.seed {
                for m in &mut members {
                    m.config = seeded(m.config.clone(), Some(seed));
                }
            }
            if !cli.quiet {
                eprintln!("sweep: {} members", members.len());
            }
            let s = orchestrate::sweep(&members, &cli.out, *threads)?;
            for m in &s.members {
                say(format!("{} [{}] {}", m.dir, m.label, m.status));
                if let Some(e) = &m.error {
                    eprintln!("{}: {e}", m.dir);
                }
            }
            Ok(if s.any_error() {
                ExitCode::from(2)
            } else {
                verdict(s.all_passed())
            })
        }
        Command::Verify => {
            let cfg = match &cli.config {
                Some(_) => load_config(cli)?,
                None => seeded(parse_config(VERIFY_DEFAULTS)?, cli.seed),
            };
            let s = orchestrate::verify(&cfg, &cli.out)?;
            for p in &s.probes {
                say(serde_json::to_string(p)?);
            }
            Ok(verdict(s.status == "ok"))
        }
        Command::Picard => {
            let doc = orchestrate::picard(&load_config(cli)?, &cli.out)?;
            say(serde_json::to_string(&doc)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::KatoCompare => {
            let doc = orchestrate::kato(&load_config(cli)?, &cli.out)?;
            say(serde_json::to_string(&doc)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Report { inputs } => {
            let inputs = if inputs.is_empty() {
                vec![cli.out.clone()]
            } else {
                inputs.clone()
            };
            // report.csv goes to --out unless --out is itself the input
            let out = (inputs.as_slice() != [cli.out.clone()]).then_some(cli.out.as_path());
            for s in orchestrate::report(&inputs, out)? {
                say(format!(
                    "{}: {} rows, t = {}, hs_gevrey {:e} -> {:e} (max {:e}), budget {:e}, non-increasing {}",
                    s.path,
                    s.rows,
                    s.t_final,
                    s.hs_gevrey_initial,
                    s.hs_gevrey_final,
                    s.hs_gevrey_max,
                    s.max_abs_budget_residual,
                    s.hs_gevrey_non_increasing
                ));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
