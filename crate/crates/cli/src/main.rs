use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;

use radiole::beep::Variant;
use radiole::harness::{run_experiment, ExperimentConfig, Format, GraphKind, GraphSource};
use radiole::{Constants, Model};

/// Run seeded leader-election trials on a radio network and report the
/// results.
#[derive(Debug, Parser)]
#[command(name = "radiole", version)]
struct Args {
    /// Collision model: nocd or beep.
    #[arg(long, default_value = "nocd")]
    model: Model,

    /// Read the graph from a file (first line `n`, then one `u v` edge per line).
    #[arg(long, conflicts_with = "gen")]
    graph: Option<PathBuf>,

    /// Generate the graph: path, cycle, star, complete, grid, random_connected or two_copies.
    #[arg(long, requires = "n")]
    gen: Option<GraphKind>,

    /// Node count for generated graphs.
    #[arg(long)]
    n: Option<usize>,

    /// Edge probability for random_connected.
    #[arg(long)]
    p: Option<f64>,

    #[arg(long, default_value_t = 1)]
    trials: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Beep debate variant: full or fast.
    #[arg(long, default_value = "fast")]
    variant: Variant,

    /// Round limit as a multiple of the election's round budget.
    #[arg(long)]
    round_limit_mult: Option<f64>,

    /// Report path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, default_value = "csv")]
    format: Format,

    /// Constant override, e.g. `--const alpha=8`. Repeatable.
    #[arg(long = "const", value_name = "KEY=VALUE")]
    constants: Vec<String>,
}

fn config(args: &Args) -> Result<ExperimentConfig> {
    let graph = match (&args.graph, args.gen) {
        (Some(path), None) => GraphSource::File(path.clone()),
        (None, Some(kind)) => GraphSource::Generated {
            kind,
            n: args.n.context("--gen needs --n")?,
            p: args.p,
        },
        _ => bail!("give exactly one of --graph FILE or --gen KIND"),
    };
    let mut constants = Constants::default();
    for c in &args.constants {
        constants.set(c)?;
    }
    if let Some(m) = args.round_limit_mult {
        constants.set(&format!("round_limit_mult={m}"))?;
    }
    Ok(ExperimentConfig {
        model: args.model,
        graph,
        trials: args.trials,
        seed: args.seed,
        variant: args.variant,
        constants,
    })
}

fn run(args: &Args) -> Result<()> {
    let config = config(args)?;
    let records = run_experiment(&config)?;
    let mut text = radiole::harness::report::render(&records, args.format)?;
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &args.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    let ok = records.iter().filter(|r| r.success).count();
    eprintln!("{ok}/{} trials elected a unique leader", records.len());
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
