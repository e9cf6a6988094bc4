mod format;
mod input;

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mtype::{
    bound_report, bound_sweep, brute_force, divergence_rate, evaluate, graph_preserved, quantize,
    quantize_markov, stationary_distribution, CostKind, Markov64, Target64,
};
use serde_json::{json, Value};

use format::{fixed, json_number, json_numbers};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Core(mtype::Error),
    Output(io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use mtype::Error as E;
        match self {
            CliError::Input(_) => 2,
            CliError::Output(_) => 1,
            CliError::Core(E::InfeasibleSupport { .. } | E::InfeasiblePrealloc { .. } | E::EmptySimplex { .. }) => 3,
            CliError::Core(E::TooLarge { .. }) => 4,
            CliError::Core(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Output(e) => write!(f, "cannot write output: {e}"),
        }
    }
}

impl From<mtype::Error> for CliError {
    fn from(e: mtype::Error) -> Self {
        CliError::Core(e)
    }
}

/// Optimal M-type approximation of probability distributions.
#[derive(Parser, Debug)]
#[command(name = "mtype", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quantize a distribution to precision M under one cost
    Quantize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "M", value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        #[arg(long)]
        cost: CostKind,
        /// Rescale the input to sum to one
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact D(t||p) and both error bounds for every M in a range, as CSV
    Sweep {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "M-min", value_parser = clap::value_parser!(u64).range(1..))]
        m_min: u64,
        #[arg(long = "M-max", value_parser = clap::value_parser!(u64).range(1..))]
        m_max: u64,
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quantize each row of a transition matrix and report the divergence rate
    Markov {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "M", value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive search over all M-type distributions, compared with greedy
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "M", value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        #[arg(long)]
        cost: CostKind,
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn precision(m: u64) -> Result<usize, CliError> {
    usize::try_from(m).map_err(|_| CliError::Input(format!("M = {m} does not fit in memory")))
}

fn load_target(path: &Path, normalize: bool) -> Result<Target64, CliError> {
    Ok(Target64::new(input::read_vector(path)?, normalize)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(CliError::Output),
        None => io::stdout().lock().write_all(text.as_bytes()).map_err(CliError::Output),
    }
}

fn emit_json(out: Option<&Path>, record: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(record).expect("serializable record");
    text.push('\n');
    emit(out, &text)
}

fn cmd_quantize(path: &Path, m: usize, kind: CostKind, normalize: bool) -> Result<Value, CliError> {
    let t = load_target(path, normalize)?;
    let p = quantize(&t, m, kind)?;
    let cost = evaluate(kind, &t, &p)?;
    let mut record = json!({
        "M": m,
        "cost": kind.name(),
        "counts": p.counts(),
        "probabilities": json_numbers(&p.probs::<f64>()),
        "cost_value": json_number(cost),
    });
    if kind == CostKind::KlTargetFirst {
        let bounds = bound_report(&t, m)?;
        record["bound_eq12"] = json_number(bounds.projection_bound);
        record["bound_eq7"] = json_number(bounds.vd_bound);
        record["bound_eq7_valid"] = Value::from(bounds.vd_bound_valid);
    }
    Ok(record)
}

fn cmd_sweep(path: &Path, m_min: usize, m_max: usize, normalize: bool) -> Result<String, CliError> {
    let t = load_target(path, normalize)?;
    let reports = bound_sweep(&t, m_min, m_max)?;
    let mut csv = String::from("M,exact,bound_eq12,bound_eq7,bound_eq7_valid\n");
    for r in reports {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.precision,
            fixed(r.exact),
            fixed(r.projection_bound),
            fixed(r.vd_bound),
            r.vd_bound_valid
        ));
    }
    Ok(csv)
}

fn cmd_markov(path: &Path, m: usize) -> Result<Value, CliError> {
    let chain = Markov64::new(input::read_matrix(path)?)?;
    if !chain.is_irreducible() {
        return Err(mtype::Error::NotIrreducible.into());
    }
    let q = quantize_markov(&chain, m)?;
    let mu = stationary_distribution(&chain)?;
    let rate = divergence_rate(&chain, &q)?;
    Ok(json!({
        "M": m,
        "counts": q.count_rows(),
        "stationary": json_numbers(mu.probs()),
        "divergence_rate": json_number(rate),
        "graph_preserved": graph_preserved(&chain, &q),
    }))
}

fn cmd_oracle(path: &Path, m: usize, kind: CostKind, normalize: bool) -> Result<Value, CliError> {
    let t = load_target(path, normalize)?;
    let oracle = brute_force(&t, m, kind)?;
    let p = quantize(&t, m, kind)?;
    let greedy = evaluate(kind, &t, &p)?;
    Ok(json!({
        "M": m,
        "cost": kind.name(),
        "counts": oracle.best_counts,
        "cost_value": json_number(oracle.best_cost),
        "candidates": u64::try_from(oracle.num_candidates).expect("guarded candidate count"),
        "greedy_counts": p.counts(),
        "greedy_cost": json_number(greedy),
        "gap": json_number(greedy - oracle.best_cost),
    }))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Quantize { input, m, cost, normalize, out } => {
            let record = cmd_quantize(&input, precision(m)?, cost, normalize)?;
            emit_json(out.as_deref(), &record)
        }
        Command::Sweep { input, m_min, m_max, normalize, out } => {
            let csv = cmd_sweep(&input, precision(m_min)?, precision(m_max)?, normalize)?;
            emit(out.as_deref(), &csv)
        }
        Command::Markov { input, m, out } => {
            let record = cmd_markov(&input, precision(m)?)?;
            emit_json(out.as_deref(), &record)
        }
        Command::Oracle { input, m, cost, normalize, out } => {
            let record = cmd_oracle(&input, precision(m)?, cost, normalize)?;
            emit_json(out.as_deref(), &record)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
