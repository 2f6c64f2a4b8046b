//! Command-line front end. Exit codes: 0 success, 1 data error, 2 usage.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::beings::{slot_file_name, Being};
use crate::bpn::{init_network, recall_accuracy, residual_fitness, train_until_recognized, NetworkShape, Sample, TrainConfig};
use crate::corpus::{class_code, generate_synthetic, load_corpus, save_corpus};
use crate::error::{Error, Result};
use crate::ga_core::{run_onemax_scaled, run_quad, GaConfig, ONEMAX_DEFAULT_POWER};
use crate::pbm;
use crate::pipeline::{export_history, run_selection_with, SelectionConfig};

#[derive(Debug, Parser)]
#[command(name = "beingsel", version, about = "Genetic selection of neural-network training sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Binary GA on OneMax; history CSV on stdout.
    Onemax(OnemaxArgs),
    /// Binary GA maximizing -x² over [lo, hi]; history CSV on stdout.
    Quad(QuadArgs),
    /// Write a synthetic glyph corpus directory.
    GenCorpus(GenCorpusArgs),
    /// Evolve the best training set for a corpus.
    Select(SelectArgs),
    /// Print the best being of a finished `select` run.
    DumpBeing(DumpBeingArgs),
    /// Baseline: train one network on the whole corpus.
    TrainFull(TrainFullArgs),
}

#[derive(Debug, Args)]
pub struct GaFlags {
    #[arg(long = "pop")]
    pub pop: Option<usize>,
    #[arg(long)]
    pub pc: Option<f64>,
    #[arg(long)]
    pub pm: Option<f64>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct OnemaxArgs {
    #[arg(long, default_value_t = 100)]
    pub bits: usize,
    #[command(flatten)]
    pub ga: GaFlags,
    /// Stop once the best fitness reaches this value.
    #[arg(long)]
    pub target: Option<f64>,
    /// Roulette spins on ones^K; 1 is plain fitness-proportional selection.
    #[arg(long, default_value_t = ONEMAX_DEFAULT_POWER)]
    pub scaling_power: i32,
}

#[derive(Debug, Args)]
pub struct QuadArgs {
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub hi: f64,
    #[arg(long, default_value_t = 12)]
    pub bits: usize,
    #[command(flatten)]
    pub ga: GaFlags,
}

#[derive(Debug, Args)]
pub struct GenCorpusArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 12)]
    pub classes: usize,
    #[arg(long, default_value_t = 9)]
    pub variants: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainFlags {
    #[arg(long, default_value_t = 0.05)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 0.5)]
    pub lr: f64,
    #[arg(long, default_value_t = 2000)]
    pub max_epochs: usize,
    /// Seed of the shared initial network weights.
    #[arg(long, default_value_t = 0)]
    pub init_seed: u64,
    #[arg(long, default_value_t = 0.5)]
    pub init_range: f64,
}

impl TrainFlags {
    fn config(&self) -> TrainConfig {
        TrainConfig {
            tolerance: self.tolerance,
            learning_rate: self.lr,
            max_epochs: self.max_epochs,
            init_seed: self.init_seed,
            init_range: self.init_range,
        }
    }
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 40)]
    pub generations: usize,
    #[arg(long, default_value_t = 9)]
    pub pop: usize,
    #[arg(long, default_value_t = 0.25)]
    pub pc: f64,
    #[arg(long, default_value_t = 0.1)]
    pub pm: f64,
    #[command(flatten)]
    pub train: TrainFlags,
    #[arg(long)]
    pub halt_on_tolerance: bool,
    /// Evaluation threads (0 = all cores). Output does not depend on it.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, short)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct DumpBeingArgs {
    /// Output directory of a `select` run.
    #[arg(long)]
    pub run: PathBuf,
    /// Only this slot.
    #[arg(long)]
    pub slot: Option<usize>,
    /// Emit raw PBM text instead of ASCII art.
    #[arg(long)]
    pub pbm: bool,
}

#[derive(Debug, Args)]
pub struct TrainFullArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Alias for --init-seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub train: TrainFlags,
    /// Write the trained weights to this file.
    #[arg(long)]
    pub save_weights: Option<PathBuf>,
}

fn ga_config(flags: &GaFlags, pop: usize, pc: f64, pm: f64, generations: usize) -> GaConfig {
    GaConfig {
        population_size: flags.pop.unwrap_or(pop),
        p_crossover: flags.pc.unwrap_or(pc),
        p_mutation: flags.pm.unwrap_or(pm),
        max_generations: flags.generations.unwrap_or(generations),
        seed: flags.seed,
        elitism: 1,
        target_fitness: None,
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn onemax(args: &OnemaxArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let mut cfg = ga_config(&args.ga, 100, 0.8, 0.01, 200);
    cfg.target_fitness = args.target;
    let h = run_onemax_scaled(&cfg, args.bits, args.scaling_power)?;
    h.write_csv(&mut *out).map_err(io_err)?;
    writeln!(err, "best fitness {} ({})", h.best_fitness, h.best).map_err(io_err)?;
    Ok(())
}

fn quad(args: &QuadArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let cfg = ga_config(&args.ga, 50, 0.8, 0.01, 100);
    let q = run_quad(&cfg, args.bits, args.lo, args.hi)?;
    q.history.write_csv(&mut *out).map_err(io_err)?;
    writeln!(err, "best x {} (fitness {}, chromosome {})", q.best_x, q.history.best_fitness, q.history.best)
        .map_err(io_err)?;
    Ok(())
}

fn gen_corpus(args: &GenCorpusArgs, err: &mut dyn Write) -> Result<()> {
    let corpus = generate_synthetic(args.seed, args.classes, args.variants)?;
    save_corpus(&corpus, &args.out)?;
    writeln!(err, "wrote {} patterns to {}", corpus.len(), args.out.display()).map_err(io_err)?;
    Ok(())
}

fn select(args: &SelectArgs, err: &mut dyn Write) -> Result<()> {
    let corpus = load_corpus(&args.corpus)?;
    let defaults = SelectionConfig::default();
    let cfg = SelectionConfig {
        ga: GaConfig {
            population_size: args.pop,
            p_crossover: args.pc,
            p_mutation: args.pm,
            max_generations: args.generations,
            seed: args.seed,
            ..defaults.ga.clone()
        },
        train: args.train.config(),
        halt_on_tolerance: args.halt_on_tolerance,
        workers: args.workers,
        ..defaults
    };
    let started = Instant::now();
    let history = run_selection_with(&corpus, &cfg, |g| {
        if !args.quiet {
            let _ = writeln!(
                err,
                "generation {:>3}  best {:.6}  mean {:.6}  pure {}  epochs {}  [{:.1?}]",
                g.generation,
                g.best_error,
                g.mean_error,
                g.best_is_pure,
                g.best.train_epochs,
                started.elapsed()
            );
        }
    })?;
    export_history(&history, &args.out)?;
    if args.quiet {
        return Ok(());
    }
    let best = history.best();
    writeln!(
        err,
        "best error {} (converged {}, {} epochs) in {:.2?}; results in {}",
        best.residual_error,
        best.train_converged,
        best.train_epochs,
        started.elapsed(),
        args.out.display()
    )
    .map_err(io_err)?;
    Ok(())
}

fn dump_being(args: &DumpBeingArgs, out: &mut dyn Write) -> Result<()> {
    let dir = args.run.join("best_being");
    let being = Being::load(&dir)?;
    let slots: Vec<usize> = match args.slot {
        Some(s) if s >= being.n_classes() => {
            return Err(Error::IndexOutOfRange {
                index: s,
                limit: being.n_classes(),
            })
        }
        Some(s) => vec![s],
        None => (0..being.n_classes()).collect(),
    };
    for slot in slots {
        let glyph = being.pattern(slot)?;
        if args.pbm {
            write!(out, "{}", pbm::render(16, 16, glyph.bits())).map_err(io_err)?;
        } else {
            writeln!(out, "{}\n{glyph}", slot_file_name(slot)).map_err(io_err)?;
        }
    }
    Ok(())
}

fn train_full(args: &TrainFullArgs, out: &mut dyn Write) -> Result<()> {
    let corpus = load_corpus(&args.corpus)?;
    let mut cfg = args.train.config();
    if let Some(seed) = args.seed {
        cfg.init_seed = seed;
    }
    cfg.validate()?;
    let shape = NetworkShape::default();
    let samples: Vec<Sample> = corpus
        .iter()
        .map(|(class, _, p)| Ok(Sample::new(p, &class_code(class, shape.n_output)?)))
        .collect::<Result<_>>()?;
    let net = init_network(shape, cfg.init_seed, cfg.init_range)?;
    let started = Instant::now();
    let outcome = train_until_recognized(net, &samples, &cfg)?;
    let elapsed = started.elapsed();
    let residual = residual_fitness(&outcome.network, &corpus)?;
    let accuracy = recall_accuracy(&outcome.network, &corpus)?;
    writeln!(out, "patterns={}", corpus.len()).map_err(io_err)?;
    writeln!(out, "epochs={}", outcome.epochs).map_err(io_err)?;
    writeln!(out, "converged={}", outcome.converged).map_err(io_err)?;
    writeln!(out, "residual_error={residual}").map_err(io_err)?;
    writeln!(out, "recall_accuracy={accuracy}").map_err(io_err)?;
    writeln!(out, "seconds={:.3}", elapsed.as_secs_f64()).map_err(io_err)?;
    if let Some(path) = &args.save_weights {
        std::fs::write(path, outcome.network.to_snapshot()).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Onemax(a) => onemax(a, out, err),
        Command::Quad(a) => quad(a, out, err),
        Command::GenCorpus(a) => gen_corpus(a, err),
        Command::Select(a) => select(a, err),
        Command::DumpBeing(a) => dump_being(a, out),
        Command::TrainFull(a) => train_full(a, out),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(err, "{}", e.render());
            return if code == 0 { 0 } else { 2 };
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => 0,
        Err(e @ Error::InvalidConfig(_)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
