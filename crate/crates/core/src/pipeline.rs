//! The training-set selection experiment.
//!
//! Every being is scored the same way: a network is built from one fixed
//! seed, trained on the being's glyphs until each is recognized, and then
//! tested on the whole corpus. The score is the worst residual error over
//! the corpus (lower is better). Beings whose training stalls land in a
//! penalty band `[penalty_base, penalty_base + 1]` above every convergent
//! being. The tribe evolves by elitism, roulette selection on
//! `1 / (error + epsilon)`, being crossover and single-pixel mutation.

use std::collections::HashMap;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use rand::Rng as _;
use rayon::prelude::*;

use crate::beings::{being_crossover, is_pure, mutate_being_in_place, pure_beings_from_corpus, Being};
use crate::bpn::{init_network, residual_fitness, train_until_recognized, Network, NetworkShape, Sample, TrainConfig};
use crate::corpus::{class_code, Corpus};
use crate::error::{Error, Result};
use crate::ga_core::{roulette_probabilities, roulette_select, GaConfig};
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionConfig {
    pub ga: GaConfig,
    pub train: TrainConfig,
    pub shape: NetworkShape,
    pub selection_epsilon: f64,
    pub penalty_base: f64,
    /// Stop once the best being's error drops below the training tolerance.
    pub halt_on_tolerance: bool,
    /// Evaluation threads; 0 lets rayon decide. Results never depend on it.
    pub workers: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            ga: GaConfig {
                population_size: 9,
                p_crossover: 0.25,
                p_mutation: 0.1,
                max_generations: 40,
                seed: 0,
                elitism: 1,
                target_fitness: None,
            },
            train: TrainConfig::default(),
            shape: NetworkShape::default(),
            selection_epsilon: 1e-3,
            penalty_base: 1.0,
            halt_on_tolerance: false,
            workers: 0,
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        self.ga.validate()?;
        self.train.validate()?;
        if !(self.selection_epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "selection epsilon {} must be positive",
                self.selection_epsilon
            )));
        }
        if !(self.penalty_base >= 1.0 && self.penalty_base.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "penalty base {} must be at least 1 to sit above every residual error",
                self.penalty_base
            )));
        }
        Ok(())
    }

    fn check_corpus(&self, corpus: &Corpus) -> Result<()> {
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        if self.shape.n_input != crate::corpus::PIXELS {
            return Err(Error::ShapeMismatch(format!(
                "network expects {} inputs, glyphs have 256 pixels",
                self.shape.n_input
            )));
        }
        if corpus.n_classes() > 1 << self.shape.n_output.min(30) {
            return Err(Error::ShapeMismatch(format!(
                "{} classes do not fit in {} output bits",
                corpus.n_classes(),
                self.shape.n_output
            )));
        }
        Ok(())
    }

    /// The network every being starts training from.
    pub fn initial_network(&self) -> Result<Network> {
        init_network(self.shape, self.train.init_seed, self.train.init_range)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedBeing {
    pub being: Being,
    /// Lower is better.
    pub residual_error: f64,
    pub train_epochs: usize,
    pub train_converged: bool,
    /// Fingerprint of the network training started from.
    pub initial_network: u64,
}

pub fn selection_weight(residual_error: f64, epsilon: f64) -> f64 {
    1.0 / (residual_error + epsilon)
}

/// Trains a fresh copy of `cfg.initial_network()` on the being and scores
/// it against the corpus.
pub fn evaluate_being(x: &Being, corpus: &Corpus, cfg: &SelectionConfig) -> Result<EvaluatedBeing> {
    cfg.validate()?;
    cfg.check_corpus(corpus)?;
    evaluate_from(&cfg.initial_network()?, x, corpus, cfg)
}

fn evaluate_from(init: &Network, x: &Being, corpus: &Corpus, cfg: &SelectionConfig) -> Result<EvaluatedBeing> {
    if x.n_classes() != corpus.n_classes() || x.gene_count() != init.shape.n_input {
        return Err(Error::ShapeMismatch(format!(
            "being {}x{} vs corpus of {} classes and network input {}",
            x.n_classes(),
            x.gene_count(),
            corpus.n_classes(),
            init.shape.n_input
        )));
    }
    let samples: Vec<Sample> = (0..x.n_classes())
        .map(|slot| {
            let code = class_code(slot, init.shape.n_output)?;
            Ok(Sample {
                input: x.chromosome(slot).genes().iter().map(|&g| if g { 1.0 } else { 0.0 }).collect(),
                target: code.code,
            })
        })
        .collect::<Result<_>>()?;
    let outcome = train_until_recognized(init.clone(), &samples, &cfg.train)?;
    let residual_error = if outcome.converged {
        residual_fitness(&outcome.network, corpus)?
    } else {
        cfg.penalty_base + outcome.best_max_error
    };
    Ok(EvaluatedBeing {
        being: x.clone(),
        residual_error,
        train_epochs: outcome.epochs,
        train_converged: outcome.converged,
        initial_network: init.fingerprint(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_error: f64,
    pub mean_error: f64,
    pub best_is_pure: bool,
    pub best: EvaluatedBeing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionHistory {
    pub seed: u64,
    pub generations: Vec<GenerationRecord>,
    pub final_tribe: Vec<EvaluatedBeing>,
}

impl SelectionHistory {
    /// Best being of the last generation; with elitism also the best overall.
    pub fn best(&self) -> &EvaluatedBeing {
        &self.generations.last().expect("at least one generation").best
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "# seed={}", self.seed)?;
        writeln!(out, "generation,best_error,mean_error,best_is_pure")?;
        for g in &self.generations {
            writeln!(out, "{},{},{},{}", g.generation, g.best_error, g.mean_error, g.best_is_pure)?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// Lowest error first, ties to the lower index.
fn ranking(evaluated: &[EvaluatedBeing]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..evaluated.len()).collect();
    order.sort_by(|&i, &j| {
        evaluated[i]
            .residual_error
            .total_cmp(&evaluated[j].residual_error)
            .then(i.cmp(&j))
    });
    order
}

struct Evaluator<'a> {
    init: Network,
    corpus: &'a Corpus,
    cfg: &'a SelectionConfig,
    pool: rayon::ThreadPool,
    // Evaluation is a pure function of the being, so repeats (elites,
    // unchanged clones) are looked up instead of retrained.
    cache: HashMap<Being, EvaluatedBeing>,
}

impl Evaluator<'_> {
    fn evaluate(&mut self, tribe: &[Being]) -> Result<Vec<EvaluatedBeing>> {
        let mut pending: Vec<&Being> = Vec::new();
        for b in tribe {
            if !self.cache.contains_key(b) && !pending.contains(&b) {
                pending.push(b);
            }
        }
        let (init, corpus, cfg) = (&self.init, self.corpus, self.cfg);
        let fresh: Vec<Result<EvaluatedBeing>> = self
            .pool
            .install(|| pending.par_iter().map(|b| evaluate_from(init, b, corpus, cfg)).collect());
        for e in fresh {
            let e = e?;
            self.cache.insert(e.being.clone(), e);
        }
        Ok(tribe.iter().map(|b| self.cache[b].clone()).collect())
    }
}

fn breed(evaluated: &[EvaluatedBeing], cfg: &SelectionConfig, generation: usize) -> Result<Vec<Being>> {
    let size = cfg.ga.population_size;
    let mut rng = rng::stream(cfg.ga.seed, generation as u64);
    let weights: Vec<f64> = evaluated
        .iter()
        .map(|e| selection_weight(e.residual_error, cfg.selection_epsilon))
        .collect();
    let probs = roulette_probabilities(&weights)?;

    let mut next: Vec<Being> = ranking(evaluated)
        .into_iter()
        .take(cfg.ga.elitism)
        .map(|i| evaluated[i].being.clone())
        .collect();
    while next.len() < size {
        let a = &evaluated[roulette_select(&probs, &mut rng)].being;
        let b = &evaluated[roulette_select(&probs, &mut rng)].being;
        let genome = a.genome_len();
        let (mut c1, mut c2) = if genome >= 2 && rng.gen_bool(cfg.ga.p_crossover) {
            let point = rng.gen_range(1..genome);
            let (c1, c2, _) = being_crossover(a, b, point)?;
            (c1, c2)
        } else {
            (a.clone(), b.clone())
        };
        mutate_being_in_place(&mut c1, cfg.ga.p_mutation, &mut rng);
        mutate_being_in_place(&mut c2, cfg.ga.p_mutation, &mut rng);
        next.push(c1);
        if next.len() < size {
            next.push(c2);
        }
    }
    Ok(next)
}

pub fn run_selection(corpus: &Corpus, cfg: &SelectionConfig) -> Result<SelectionHistory> {
    run_selection_with(corpus, cfg, |_| {})
}

/// [`run_selection`] with a callback after each generation is scored.
///
/// Generation 1 is the pure tribe, one being per corpus variant. The
/// configured population size applies from generation 2 on.
pub fn run_selection_with<F>(corpus: &Corpus, cfg: &SelectionConfig, mut on_generation: F) -> Result<SelectionHistory>
where
    F: FnMut(&GenerationRecord),
{
    cfg.validate()?;
    cfg.check_corpus(corpus)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let mut evaluator = Evaluator {
        init: cfg.initial_network()?,
        corpus,
        cfg,
        pool,
        cache: HashMap::new(),
    };

    let mut tribe = pure_beings_from_corpus(corpus)?.beings;
    let mut generations = Vec::with_capacity(cfg.ga.max_generations);
    let mut generation = 1;
    loop {
        let evaluated = evaluator.evaluate(&tribe)?;
        let best = &evaluated[ranking(&evaluated)[0]];
        let record = GenerationRecord {
            generation,
            best_error: best.residual_error,
            mean_error: evaluated.iter().map(|e| e.residual_error).sum::<f64>() / evaluated.len() as f64,
            best_is_pure: is_pure(&best.being, corpus)?,
            best: best.clone(),
        };
        on_generation(&record);
        let done = generation >= cfg.ga.max_generations
            || (cfg.halt_on_tolerance && record.best_error < cfg.train.tolerance);
        generations.push(record);
        if done {
            return Ok(SelectionHistory {
                seed: cfg.ga.seed,
                generations,
                final_tribe: evaluated,
            });
        }
        tribe = breed(&evaluated, cfg, generation)?;
        generation += 1;
    }
}

/// Writes `history.csv` and `best_being/slotXX.pbm` into `out_dir`.
pub fn export_history(h: &SelectionHistory, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let csv = out_dir.join("history.csv");
    fs::write(&csv, h.to_csv()).map_err(|e| Error::io(&csv, e))?;
    h.best().being.save(&out_dir.join("best_being"))
}
