use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hintlearn::adversaries::{export_trace, gen_alpha_lower, gen_logk_lower, ScenarioKind};
use hintlearn::bench::{
    build_learner, mean, metadata, run_experiment, write_csv, write_metadata, ExperimentConfig,
    LearnerSpec, ProblemShape, TheoremBound, LEARNER_NAMES,
};
use hintlearn::combiners::ZooKind;
use hintlearn::propcheck;
use hintlearn::{run_learner, Error};

const EXIT_CONFIG: u8 = 2;
const EXIT_PROPCHECK: u8 = 3;

#[derive(Parser)]
#[command(name = "hintbench", version, about = "Regret experiments for online linear optimization with hints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write the result table.
    Run {
        config: PathBuf,
        /// CSV destination; overrides `output.path` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Skip the JSON metadata file.
        #[arg(long)]
        no_sidecar: bool,
        /// Do not print the summary table.
        #[arg(long, short)]
        quiet: bool,
    },
    /// Run the randomized property suites.
    Propcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        cases: usize,
    },
    /// Generate a lower-bound instance and measure learners on it.
    Lowerbound {
        kind: LowerBoundKind,
        /// Horizon; defaults to 48 for `logk` and 4096 for `alpha`.
        #[arg(long = "T")]
        horizon: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        /// Write the first seed's sequence as a CSV trace.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// List learner, scenario and bound names.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum LowerBoundKind {
    /// log K construction (d = 1, many hint sequences).
    Logk,
    /// 1/α construction (d = 2, one hint sequence).
    Alpha,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            no_sidecar,
            quiet,
        } => cmd_run(config, out, no_sidecar, quiet),
        Command::Propcheck { seed, cases } => return cmd_propcheck(seed, cases),
        Command::Lowerbound {
            kind,
            horizon,
            alpha,
            seeds,
            trace,
        } => cmd_lowerbound(kind, horizon, alpha, seeds, trace),
        Command::List => cmd_list(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::UnknownName { .. } | Error::InvalidParameter(_) => ExitCode::from(EXIT_CONFIG),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn cmd_run(config: PathBuf, out: Option<PathBuf>, no_sidecar: bool, quiet: bool) -> Result<(), Error> {
    let cfg = ExperimentConfig::load(&config)?;
    let rows = run_experiment(&cfg)?;
    let path = out.or_else(|| cfg.output.path.clone());
    match &path {
        Some(p) => write_csv(&rows, BufWriter::new(File::create(p)?))?,
        None => write_csv(&rows, io::stdout().lock())?,
    }
    let meta = metadata(&cfg, &rows);
    if let (Some(p), true) = (&path, cfg.output.sidecar && !no_sidecar) {
        write_metadata(&meta, BufWriter::new(File::create(p.with_extension("json"))?))?;
    }
    if !quiet {
        let mut err = io::stderr().lock();
        writeln!(err, "{:<24} {:>7} {:>12} {:>12} {:>25} {:>12}", "learner", "round", "mean", "median", "95% ci", "mean bound")?;
        for s in &meta.summary {
            writeln!(
                err,
                "{:<24} {:>7} {:>12.4} {:>12.4} {:>25} {:>12.4}",
                s.learner,
                s.round,
                s.mean,
                s.median,
                format!("[{:.4}, {:.4}]", s.ci_low, s.ci_high),
                s.mean_bound
            )?;
        }
    }
    Ok(())
}

fn cmd_propcheck(seed: u64, cases: usize) -> ExitCode {
    let outcomes = propcheck::run_all(seed, cases);
    let mut failed = 0;
    for o in &outcomes {
        match &o.failure {
            None => println!("PASS {}", o.name),
            Some(msg) => {
                failed += 1;
                println!("FAIL {}: {msg}", o.name);
            }
        }
    }
    println!("{} suites, {failed} failed", outcomes.len());
    if failed > 0 {
        ExitCode::from(EXIT_PROPCHECK)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_lowerbound(
    kind: LowerBoundKind,
    horizon: Option<usize>,
    alpha: Option<f64>,
    seeds: u64,
    trace: Option<PathBuf>,
) -> Result<(), Error> {
    if seeds == 0 {
        return Err(Error::InvalidParameter("--seeds must be >= 1".into()));
    }
    let mut out = io::stdout().lock();
    let (horizon, alpha, learners): (usize, f64, &[&str]) = match kind {
        LowerBoundKind::Logk => (horizon.unwrap_or(48), alpha.unwrap_or(0.25), &["k-hints", "mwu"]),
        LowerBoundKind::Alpha => (
            horizon.unwrap_or(4096),
            alpha.unwrap_or(0.1),
            &["one-hint", "k-hints", "mwu", "adaptive-ogd", "diagonal-adagrad"],
        ),
    };
    let mut totals = vec![Vec::new(); learners.len()];
    for seed in 0..seeds {
        let s = match kind {
            LowerBoundKind::Logk => gen_logk_lower(horizon, alpha, seed)?,
            LowerBoundKind::Alpha => gen_alpha_lower(horizon, alpha, seed)?,
        };
        if seed == 0 {
            writeln!(out, "T = {}, d = {}, K = {}", s.horizon(), s.dim(), s.k())?;
            if let Some(w) = &s.witness {
                writeln!(out, "witness: {} nonzero weights, correlation {alpha} verified every round", w.iter().filter(|v| **v > 0.0).count())?;
            }
            if let Some(p) = &trace {
                export_trace(&s, BufWriter::new(File::create(p)?))?;
            }
        }
        let shape = ProblemShape {
            dim: s.dim(),
            k: s.k(),
            horizon: s.horizon(),
            alpha,
        };
        for (i, name) in learners.iter().enumerate() {
            let (mut l, _) = build_learner(&LearnerSpec::new(name), shape, seed, i as u64 + 1)?;
            let ledger = run_learner(&mut l, &s.hints, &s.costs, |_, _, _| {})?;
            totals[i].push(ledger.worst_case_regret());
        }
    }
    match kind {
        LowerBoundKind::Logk => {
            let b = (alpha * horizon as f64).round();
            let ln_k = (horizon as f64 / b).ln() + b * 2f64.ln();
            writeln!(out, "floor sqrt(ln K / (2 alpha)) = {:.3}", (ln_k / (2.0 * alpha)).sqrt())?
        }
        LowerBoundKind::Alpha => writeln!(out, "floor 1/(2 alpha) = {:.3}", 0.5 / alpha)?,
    }
    writeln!(out, "{:<20} {:>12}", "learner", "mean regret")?;
    for (name, v) in learners.iter().zip(&totals) {
        writeln!(out, "{:<20} {:>12.4}", name, mean(v))?;
    }
    Ok(())
}

fn cmd_list() -> Result<(), Error> {
    let mut out = io::stdout().lock();
    writeln!(out, "learners:")?;
    for n in LEARNER_NAMES {
        writeln!(out, "  {n}")?;
    }
    writeln!(out, "combiner members:")?;
    for n in ZooKind::NAMES {
        writeln!(out, "  {n}")?;
    }
    writeln!(out, "scenarios:")?;
    for n in ScenarioKind::NAMES {
        writeln!(out, "  {n}")?;
    }
    writeln!(out, "bounds:")?;
    for n in TheoremBound::NAMES {
        writeln!(out, "  {n}")?;
    }
    writeln!(out, "property suites:")?;
    for n in propcheck::suite_names() {
        writeln!(out, "  {n}")?;
    }
    Ok(())
}
