use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use dcarp::report::{render_text, summarize, write_summary_csv};
use dcarp::scenario::{read_log, write_log, StopReason};
use dcarp::solution_text::{parse_solution, write_solution};
use dcarp::{load_instance, run_scenario, write_instance, ScenarioConfig, WallClock};
use dcarp_core::{gofvt_solve, Clock, NoClock, SolverBudget, SolverKind, Strategy};

#[derive(Parser)]
#[command(name = "dcarp", version, about = "Dynamic capacitated arc routing: solve, simulate, report")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print the executable solution.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value = "restart")]
        strategy: Strategy,
        #[arg(long, default_value = "memetic")]
        solver: SolverKind,
        /// Time budget in seconds.
        #[arg(long, default_value_t = 5.0)]
        budget: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stop after this many evaluations (reproducible regardless of machine speed).
        #[arg(long)]
        max_evaluations: Option<u64>,
        /// Previous best solution, used by the transfer strategy.
        #[arg(long)]
        previous: Option<PathBuf>,
        /// Instance the previous solution was written against.
        #[arg(long, requires = "previous")]
        previous_instance: Option<PathBuf>,
    },
    /// Run a scenario described by a TOML config and write its CSV log.
    Scenario {
        config: PathBuf,
        /// Also print the summary table to stderr.
        #[arg(long)]
        summary: bool,
    },
    /// Convert an egl/gdb/val file into the dcarp text format.
    Convert {
        egl_file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Summarize a scenario log.
    Report {
        log: PathBuf,
        #[arg(long)]
        baseline: Option<String>,
        /// Emit CSV instead of an aligned table.
        #[arg(long)]
        csv: bool,
    },
}

fn output(path: Option<&PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Solve { instance, strategy, solver, budget, seed, max_evaluations, previous, previous_instance } => {
            let named = load_instance(&instance)?;
            let prev = match previous {
                Some(p) => {
                    let against = match &previous_instance {
                        Some(pi) => load_instance(pi)?.instance,
                        None => named.instance.clone(),
                    };
                    let text = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
                    Some(parse_solution(&text, &against).with_context(|| format!("parsing {}", p.display()))?)
                }
                None => None,
            };
            let mut b = SolverBudget::new(budget, seed);
            b.max_evaluations = max_evaluations;
            let wall = WallClock::start();
            let clock: &dyn Clock = if max_evaluations.is_some() { &NoClock } else { &wall };
            let out = gofvt_solve(&named.instance, strategy, solver, prev.as_ref(), &b, clock)?;
            print!("{}", write_solution(&out.solution, &named.instance, out.cost));
        }
        Command::Scenario { config, summary } => {
            let cfg = ScenarioConfig::load(&config)?;
            let initial = load_instance(&cfg.instance)?.instance;
            let outcome = run_scenario(&cfg, initial)?;
            write_log(&outcome.rows, output(cfg.output_csv.as_ref())?)?;
            match &outcome.stop {
                StopReason::Length | StopReason::Complete => {}
                StopReason::NoFeasibleRun(m) => anyhow::bail!("no feasible solution for instance {m}"),
                StopReason::Simulation(e) => eprintln!("scenario stopped early: {e}"),
            }
            if summary {
                eprint!("{}", render_text(&summarize(&outcome.rows, cfg.baseline.as_deref()), cfg.baseline.as_deref()));
            }
        }
        Command::Convert { egl_file, output: out } => {
            let named = load_instance(&egl_file)?;
            output(out.as_ref())?.write_all(write_instance(&named.name, &named.instance).as_bytes())?;
        }
        Command::Report { log, baseline, csv } => {
            let file = File::open(&log).with_context(|| format!("opening {}", log.display()))?;
            let rows = read_log(file).with_context(|| format!("parsing {}", log.display()))?;
            anyhow::ensure!(!rows.is_empty(), "{} has no rows", log.display());
            if let Some(b) = &baseline {
                anyhow::ensure!(rows.iter().any(|r| &r.arm == b), "baseline `{b}` does not appear in the log");
            }
            let summaries = summarize(&rows, baseline.as_deref());
            if csv {
                write_summary_csv(&summaries, io::stdout().lock())?;
            } else {
                print!("{}", render_text(&summaries, baseline.as_deref()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
