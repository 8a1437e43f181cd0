use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fracalign_cli::config::MocMode;
use fracalign_cli::error::{CliError, CliResult};
use fracalign_cli::output::{render_report, write_outputs};
use fracalign_cli::selftest::run_selftest;
use fracalign_cli::sweep::{parse_grid, run_sweep, write_sweep};
use fracalign_cli::{emit_config, exit, parse_config, run_scenario, Outcome, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "fracalign",
    version,
    about = "Fractional Euler alignment simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunOpts {
    /// Scenario file (TOML).
    config: PathBuf,
    /// Overrides `output.dir`.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Overrides `stepper.record_every`.
    #[arg(long)]
    record_every: Option<usize>,
    /// Print nothing but errors.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its outputs.
    Run(RunOpts),
    /// Run a scenario over the cartesian product of parameter overrides.
    Sweep {
        #[command(flatten)]
        opts: RunOpts,
        /// Overrides such as `model.alpha=0.3,0.5;grid.n=128,256`.
        #[arg(long)]
        grid: String,
    },
    /// Run a scenario with the modulus of continuity check enabled.
    VerifyMoc(RunOpts),
    /// Validate a scenario file and print it with all defaults filled in.
    Check { config: PathBuf },
    /// Quick checks of the installation.
    Selftest,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn load(opts: &RunOpts) -> CliResult<ScenarioConfig> {
    let mut c = parse_config(&read(&opts.config)?)?;
    if let Some(dir) = &opts.output_dir {
        c.output.dir = dir.clone();
    }
    if let Some(k) = opts.record_every {
        if k == 0 {
            return Err(CliError::config("--record-every must be positive"));
        }
        c.stepper.record_every = k;
    }
    Ok(c)
}

fn summarize(o: &Outcome) {
    let r = &o.result;
    println!(
        "{}: {} at t = {} after {} steps",
        o.config.model.name(),
        r.termination.name(),
        r.final_state.time(),
        r.steps
    );
    for c in &o.checks {
        println!(
            "  {} {}: {}",
            if c.ok { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    if let Some(m) = &o.moc {
        let verdict = if m.obeys {
            "PASS"
        } else if m.gating {
            "FAIL"
        } else {
            "INFO"
        };
        println!(
            "  {verdict} moc: delta {}, gamma {}, lambda {:?}, worst margin {:?}, functional max {} {}",
            m.delta, m.gamma, m.lambda, m.worst_margin, m.functional_max, m.note
        );
    }
    println!("  exit code {}", o.exit_code);
}

fn run_one(opts: &RunOpts, force_moc: bool) -> CliResult<i32> {
    let mut c = load(opts)?;
    if force_moc && c.moc.mode == MocMode::Off {
        if !c.model.is_alignment() {
            return Err(CliError::config("verify-moc needs an alignment model"));
        }
        c.moc.mode = MocMode::Auto;
    }
    let o = run_scenario(&c)?;
    write_outputs(&c.output.dir, &o)?;
    if !opts.quiet {
        summarize(&o);
        if force_moc {
            print!("{}", render_report(&o));
        }
    }
    Ok(o.exit_code)
}

fn sweep(opts: &RunOpts, grid: &str) -> CliResult<i32> {
    let base = read(&opts.config)?;
    let axes = parse_grid(grid)?;
    let base_config = load(opts)?;
    let rows = run_sweep(&base, &axes, opts.record_every);
    write_sweep(&base_config.output.dir, &axes, &rows)?;
    let failed = rows.iter().filter(|r| r.exit_code() != exit::OK).count();
    if !opts.quiet {
        for r in &rows {
            let status = match &r.outcome {
                Ok(o) => format!("{} (exit {})", o.termination().name(), o.exit_code),
                Err(e) => format!(
                    "error (exit {}): {}",
                    r.exit_code(),
                    e.to_string().replace('\n', " ")
                ),
            };
            println!("row {:03} [{}]: {status}", r.index, r.labels.join(", "));
        }
        println!("{} of {} rows succeeded", rows.len() - failed, rows.len());
    }
    Ok(if failed == rows.len() {
        exit::CHECK_FAILED
    } else {
        exit::OK
    })
}

fn dispatch(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Run(opts) => run_one(&opts, false),
        Command::VerifyMoc(opts) => run_one(&opts, true),
        Command::Sweep { opts, grid } => sweep(&opts, &grid),
        Command::Check { config } => {
            print!("{}", emit_config(&parse_config(&read(&config)?)?));
            Ok(exit::OK)
        }
        Command::Selftest => {
            let checks = run_selftest();
            for c in &checks {
                println!(
                    "{} {}: {} [{:.2}s]",
                    if c.ok { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail,
                    c.seconds
                );
            }
            Ok(if checks.iter().all(|c| c.ok) {
                exit::OK
            } else {
                exit::CHECK_FAILED
            })
        }
    }
}

fn main() -> ExitCode {
    // clap's own usage status (2) would collide with the blow-up status
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { 0 });
        }
    };
    let code = dispatch(cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        exit::for_error(&e)
    });
    ExitCode::from(code as u8)
}
