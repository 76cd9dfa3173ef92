use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use proxipoint_cli::error::EXIT_USAGE;
use proxipoint_cli::{load_instance, registry, Outcome, Result, Scheme, TraceFormat};
use proxipoint_core::relations::DEFAULT_SEED;
use proxipoint_core::RelationClass;

#[derive(Parser)]
#[command(name = "proxipoint", version, about = "Best proximity points of non-self mappings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Record wall-clock time in the report (makes reports differ between runs).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    #[value(name = "A")]
    A,
    #[value(name = "Aprime")]
    Aprime,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a best proximity point.
    Solve {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(long)]
        scheme: Option<Scheme>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the iteration trace here (overrides output.trace_path).
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        trace_format: Option<TraceFormat>,
    },
    /// Search for violations of the instance's contraction definition.
    Certify {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(long)]
        quadruples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a relation f(r, s, t) against class A or A'.
    ClassifyRelation {
        #[arg(short, long)]
        expression: String,
        #[arg(long, value_enum)]
        class: ClassArg,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// dist(G, H) with its witnesses and the sampled G0, H0.
    Distance {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Run a registered example end to end.
    RunExample {
        name: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the iteration trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        trace_format: TraceFormat,
    },
    /// List registered examples.
    ListExamples,
}

fn load(path: &PathBuf, seed: Option<u64>) -> Result<proxipoint_cli::LoadedConfig> {
    let mut cfg = load_instance(path)?;
    if let Some(seed) = seed {
        cfg.instance.seed = seed;
    }
    Ok(cfg)
}

fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Solve {
            config,
            scheme,
            seed,
            trace,
            trace_format,
        } => {
            let cfg = load(&config, seed)?;
            let out = proxipoint_cli::solve(&cfg, scheme.unwrap_or(cfg.scheme))?;
            let path = trace.or_else(|| cfg.output.trace_path.as_ref().map(PathBuf::from));
            if let (Some(path), Some(t)) = (path, &out.trace) {
                proxipoint_cli::emit_trace(t, trace_format.unwrap_or(cfg.output.format), &path)?;
            }
            Ok(out)
        }
        Command::Certify {
            config,
            quadruples,
            seed,
        } => proxipoint_cli::certify(&load(&config, seed)?, quadruples),
        Command::ClassifyRelation {
            expression,
            class,
            seed,
        } => {
            let class = match class {
                ClassArg::A => RelationClass::A,
                ClassArg::Aprime => RelationClass::Aprime,
            };
            proxipoint_cli::classify_relation(&expression, class, seed)
        }
        Command::Distance { config } => proxipoint_cli::distance(&load(&config, None)?),
        Command::RunExample {
            name,
            seed,
            trace,
            trace_format,
        } => {
            let out = proxipoint_cli::run_example(&name, seed)?;
            if let (Some(path), Some(t)) = (trace, &out.trace) {
                proxipoint_cli::emit_trace(t, trace_format, &path)?;
            }
            Ok(out)
        }
        Command::ListExamples => unreachable!("handled before dispatch"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    if let Command::ListExamples = cli.command {
        for fx in registry::fixtures() {
            println!("{}\t{}", fx.name, fx.description);
        }
        return ExitCode::SUCCESS;
    }
    let start = Instant::now();
    match run(cli.command) {
        Ok(mut out) => {
            if cli.timing {
                out.report.wall_time_s = Some(start.elapsed().as_secs_f64());
            }
            print!("{}", out.report.to_json());
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
