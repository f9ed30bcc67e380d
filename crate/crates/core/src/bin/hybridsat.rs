use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hybridsat::agent::bind_actions;
use hybridsat::lang::parse_program;
use hybridsat::orchestrator::{plot_series, replay, run_scenario, Engine, ReplayOutcome, ScenarioConfig, Signatures};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  replay found a divergence
  2  usage error
  3  invalid scenario, program or unbound action
  4  an engine exhausted its per-tick cycle budget
  5  apply_controls named an unknown maneuver plan
  6  controller synthesis found an axis with no working thruster
  7  file i/o error

Environment:
  HYBRIDSAT_OUT  overrides the output directory of `run`";

#[derive(Parser)]
#[command(name = "hybridsat", version, about = "Hybrid agent station-keeping co-simulation", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Abstraction,
    Reasoning,
    Any,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write trace files.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Parse a plan program and check its actions.
    Check {
        program: PathBuf,
        /// Which engine's actions the program may call.
        #[arg(long, value_enum, default_value = "any")]
        engine: EngineArg,
    },
    /// Recompute a trace from its header and compare.
    Replay {
        #[arg(long)]
        trace: PathBuf,
    },
    /// Print time and position norm from a trace, downsampled.
    Plotdata {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, default_value_t = 500)]
        points: usize,
    },
}

fn read(path: &Path) -> Result<String, ExitCode> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(7)
    })
}

fn run(scenario: &Path, out: Option<PathBuf>, seed: Option<u64>) -> Result<(), ExitCode> {
    let fail = |e: hybridsat::orchestrator::RunError| {
        eprintln!("error: {e}");
        ExitCode::from(e.exit_code() as u8)
    };
    let mut cfg = ScenarioConfig::load(scenario).map_err(fail)?;
    if let Some(seed) = seed {
        cfg.set_seed(seed);
    }
    let dir = std::env::var_os("HYBRIDSAT_OUT")
        .map(PathBuf::from)
        .or(out)
        .unwrap_or_else(|| cfg.out_dir.clone());
    let outcome = run_scenario(&cfg);
    outcome.trace.write_to_dir(&dir).map_err(fail)?;
    println!("{} ticks written to {}", outcome.trace.ticks.len(), dir.display());
    match outcome.error {
        Some(e) => Err(fail(e)),
        None => Ok(()),
    }
}

fn check(program: &Path, engine: EngineArg) -> Result<(), ExitCode> {
    let text = read(program)?;
    let plans = parse_program(&text).map_err(|e| {
        eprintln!("{}:{e}", program.display());
        ExitCode::from(3)
    })?;
    let engine = match engine {
        EngineArg::Abstraction => Some(Engine::Abstraction),
        EngineArg::Reasoning => Some(Engine::Reasoning),
        EngineArg::Any => None,
    };
    let lib = bind_actions(plans, &Signatures(engine)).map_err(|e| {
        eprintln!("{}: {e}", program.display());
        ExitCode::from(3)
    })?;
    println!("{} plans", lib.len());
    Ok(())
}

fn replay_cmd(trace: &Path) -> Result<(), ExitCode> {
    let text = read(trace)?;
    match replay(&text) {
        Ok(ReplayOutcome::Identical { lines }) => {
            println!("identical ({lines} lines)");
            Ok(())
        }
        Ok(ReplayOutcome::Diverged {
            line,
            tick,
            expected,
            actual,
        }) => {
            match tick {
                Some(t) => println!("first divergence at tick {t} (line {line})"),
                None => println!("first divergence at line {line}"),
            }
            println!("expected: {}", expected.as_deref().unwrap_or("<end of trace>"));
            println!("found:    {}", actual.as_deref().unwrap_or("<end of trace>"));
            Err(ExitCode::from(1))
        }
        Err(e) => {
            eprintln!("error: {e}");
            Err(ExitCode::from(e.exit_code() as u8))
        }
    }
}

fn plotdata(trace: &Path, points: usize) -> Result<(), ExitCode> {
    let text = read(trace)?;
    let series = plot_series(&text, points).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(e.exit_code() as u8)
    })?;
    println!("t r_norm");
    for (t, r) in series {
        println!("{t} {r}");
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { scenario, out, seed } => run(&scenario, out, seed),
        Command::Check { program, engine } => check(&program, engine),
        Command::Replay { trace } => replay_cmd(&trace),
        Command::Plotdata { trace, points } => plotdata(&trace, points),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
