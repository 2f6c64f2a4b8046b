//! Python bindings for `beingsel`.
//!
//! Glyphs cross the boundary as flat lists of 0/1 ints (row-major, 256
//! long), chromosomes of the binary GA as `"0101…"` strings.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyIndexError, PyValueError};
use pyo3::prelude::*;

use beingsel::beings::{self as core_beings, CrossoverKind};
use beingsel::bpn::{self as core_bpn, NetworkShape, Sample, TrainConfig};
use beingsel::corpus::{self as core_corpus};
use beingsel::ga_core::{self as ga, BitChromosome, GaConfig};
use beingsel::pipeline::{self as core_pipeline, SelectionConfig};
use beingsel::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        Error::IndexOutOfRange { .. } => PyIndexError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_chromosome(s: &str) -> PyResult<BitChromosome> {
    BitChromosome::parse(s).map_err(to_py)
}

fn bits_to_ints(bits: &[bool]) -> Vec<u8> {
    bits.iter().map(|&b| b as u8).collect()
}

#[pyclass(module = "beingsel", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct Corpus {
    inner: core_corpus::Corpus,
}

#[pymethods]
impl Corpus {
    /// Seeded synthetic corpus of `classes` x `variants` glyphs.
    #[staticmethod]
    #[pyo3(signature = (seed=1, classes=12, variants=9))]
    fn synthetic(seed: u64, classes: usize, variants: usize) -> PyResult<Self> {
        let inner = core_corpus::generate_synthetic(seed, classes, variants).map_err(to_py)?;
        Ok(Corpus { inner })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let inner = core_corpus::load_corpus(&path).map_err(to_py)?;
        Ok(Corpus { inner })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        core_corpus::save_corpus(&self.inner, &path).map_err(to_py)
    }

    #[getter]
    fn n_classes(&self) -> usize {
        self.inner.n_classes()
    }

    #[getter]
    fn n_variants(&self) -> usize {
        self.inner.n_variants()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn pattern(&self, class_index: usize, variant: usize) -> PyResult<Vec<u8>> {
        if class_index >= self.inner.n_classes() || variant >= self.inner.n_variants() {
            return Err(PyIndexError::new_err(format!("no pattern ({class_index}, {variant})")));
        }
        Ok(bits_to_ints(self.inner.pattern(class_index, variant).bits()))
    }

    fn label(&self, class_index: usize) -> Option<String> {
        self.inner.label(class_index).map(str::to_string)
    }

    /// One pure being per variant.
    fn pure_beings(&self) -> PyResult<Vec<Being>> {
        let tribe = core_beings::pure_beings_from_corpus(&self.inner).map_err(to_py)?;
        Ok(tribe.beings.into_iter().map(|inner| Being { inner }).collect())
    }

    fn __repr__(&self) -> String {
        format!("Corpus(classes={}, variants={})", self.inner.n_classes(), self.inner.n_variants())
    }
}

#[pyclass(module = "beingsel", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct Being {
    inner: core_beings::Being,
}

#[pymethods]
impl Being {
    #[new]
    fn new(chromosomes: Vec<Vec<bool>>) -> PyResult<Self> {
        let inner = core_beings::Being::new(chromosomes.into_iter().map(BitChromosome::new).collect())
            .map_err(to_py)?;
        Ok(Being { inner })
    }

    #[getter]
    fn n_classes(&self) -> usize {
        self.inner.n_classes()
    }

    #[getter]
    fn gene_count(&self) -> usize {
        self.inner.gene_count()
    }

    #[getter]
    fn genome_len(&self) -> usize {
        self.inner.genome_len()
    }

    fn chromosome(&self, slot: usize) -> PyResult<Vec<u8>> {
        if slot >= self.inner.n_classes() {
            return Err(PyIndexError::new_err(format!("no slot {slot}")));
        }
        Ok(bits_to_ints(self.inner.chromosome(slot).genes()))
    }

    /// Returns `(offspring1, offspring2, kind)`; `kind` is `"boundary"` or
    /// `("in_chromosome", slot, offset)`.
    fn crossover(&self, py: Python<'_>, other: &Being, point: usize) -> PyResult<(Being, Being, Py<PyAny>)> {
        let (a, b, kind) = core_beings::being_crossover(&self.inner, &other.inner, point).map_err(to_py)?;
        let kind = match kind {
            CrossoverKind::Boundary => "boundary".into_pyobject(py)?.into_any().unbind(),
            CrossoverKind::InChromosome { slot, offset } => {
                ("in_chromosome", slot, offset).into_pyobject(py)?.into_any().unbind()
            }
        };
        Ok((Being { inner: a }, Being { inner: b }, kind))
    }

    fn mutate(&self, p: f64, seed: u64) -> Being {
        let mut rng = beingsel::rng::stream(seed, 0);
        Being {
            inner: core_beings::mutate_being(&self.inner, p, &mut rng),
        }
    }

    fn is_pure(&self, corpus: &Corpus) -> PyResult<bool> {
        core_beings::is_pure(&self.inner, &corpus.inner).map_err(to_py)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save(&path).map_err(to_py)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Being {
            inner: core_beings::Being::load(&path).map_err(to_py)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Being(classes={}, genes={})", self.inner.n_classes(), self.inner.genome_len())
    }
}

#[pyclass(module = "beingsel", skip_from_py_object)]
#[derive(Clone)]
pub struct Network {
    inner: core_bpn::Network,
}

#[pymethods]
impl Network {
    /// Seeded uniform initialization on `[-init_range, init_range]`.
    #[new]
    #[pyo3(signature = (seed=0, init_range=0.5, shape=(256, 32, 4)))]
    fn new(seed: u64, init_range: f64, shape: (usize, usize, usize)) -> PyResult<Self> {
        let shape = NetworkShape::new(shape.0, shape.1, shape.2).map_err(to_py)?;
        Ok(Network {
            inner: core_bpn::init_network(shape, seed, init_range).map_err(to_py)?,
        })
    }

    #[getter]
    fn shape(&self) -> (usize, usize, usize) {
        let s = self.inner.shape;
        (s.n_input, s.n_hidden, s.n_output)
    }

    fn forward(&self, input: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.forward(&input).map_err(to_py)
    }

    fn backprop_step(&mut self, input: Vec<f64>, target: Vec<f64>, lr: f64) -> PyResult<()> {
        self.inner.backprop_step(&input, &target, lr).map_err(to_py)
    }

    /// Trains in place on `(input, target)` pairs; returns
    /// `(epochs, converged)`.
    #[pyo3(signature = (samples, tolerance=0.05, lr=0.5, max_epochs=2000))]
    fn train(
        &mut self,
        samples: Vec<(Vec<f64>, Vec<f64>)>,
        tolerance: f64,
        lr: f64,
        max_epochs: usize,
    ) -> PyResult<(usize, bool)> {
        let cfg = TrainConfig {
            tolerance,
            learning_rate: lr,
            max_epochs,
            ..TrainConfig::default()
        };
        cfg.validate().map_err(to_py)?;
        let samples: Vec<Sample> = samples
            .into_iter()
            .map(|(input, target)| Sample { input, target })
            .collect();
        let out = core_bpn::train_until_recognized(self.inner.clone(), &samples, &cfg).map_err(to_py)?;
        self.inner = out.network;
        Ok((out.epochs, out.converged))
    }

    fn residual_fitness(&self, corpus: &Corpus) -> PyResult<f64> {
        core_bpn::residual_fitness(&self.inner, &corpus.inner).map_err(to_py)
    }

    fn recall_class(&self, input: Vec<f64>, n_classes: usize) -> PyResult<usize> {
        core_bpn::recall_class(&self.inner, &input, n_classes).map_err(to_py)
    }

    fn to_snapshot(&self) -> String {
        self.inner.to_snapshot()
    }

    #[staticmethod]
    fn from_snapshot(text: &str) -> PyResult<Self> {
        Ok(Network {
            inner: core_bpn::Network::from_snapshot(text).map_err(to_py)?,
        })
    }
}

#[pyclass(module = "beingsel", frozen, skip_from_py_object)]
pub struct SelectionHistory {
    inner: core_pipeline::SelectionHistory,
}

#[pymethods]
impl SelectionHistory {
    /// `(generation, best_error, mean_error, best_is_pure)` per generation.
    #[getter]
    fn rows(&self) -> Vec<(usize, f64, f64, bool)> {
        self.inner
            .generations
            .iter()
            .map(|g| (g.generation, g.best_error, g.mean_error, g.best_is_pure))
            .collect()
    }

    #[getter]
    fn best_error(&self) -> f64 {
        self.inner.best().residual_error
    }

    #[getter]
    fn best_being(&self) -> Being {
        Being {
            inner: self.inner.best().being.clone(),
        }
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    /// Writes `history.csv` and `best_being/` into `out_dir`.
    fn export(&self, out_dir: PathBuf) -> PyResult<()> {
        core_pipeline::export_history(&self.inner, &out_dir).map_err(to_py)
    }
}

#[pyfunction]
#[pyo3(signature = (
    corpus, seed=0, generations=40, population=9, pc=0.25, pm=0.1,
    tolerance=0.05, lr=0.5, max_epochs=2000, init_seed=0, halt_on_tolerance=false, workers=0
))]
#[allow(clippy::too_many_arguments)]
fn run_selection(
    py: Python<'_>,
    corpus: &Corpus,
    seed: u64,
    generations: usize,
    population: usize,
    pc: f64,
    pm: f64,
    tolerance: f64,
    lr: f64,
    max_epochs: usize,
    init_seed: u64,
    halt_on_tolerance: bool,
    workers: usize,
) -> PyResult<SelectionHistory> {
    let defaults = SelectionConfig::default();
    let cfg = SelectionConfig {
        ga: GaConfig {
            population_size: population,
            p_crossover: pc,
            p_mutation: pm,
            max_generations: generations,
            seed,
            ..defaults.ga.clone()
        },
        train: TrainConfig {
            tolerance,
            learning_rate: lr,
            max_epochs,
            init_seed,
            ..defaults.train.clone()
        },
        halt_on_tolerance,
        workers,
        ..defaults
    };
    let corpus = corpus.inner.clone();
    let inner = py
        .detach(|| core_pipeline::run_selection(&corpus, &cfg))
        .map_err(to_py)?;
    Ok(SelectionHistory { inner })
}

/// `(residual_error, epochs, converged)` for one being under default training.
#[pyfunction]
#[pyo3(signature = (being, corpus, init_seed=0, max_epochs=2000))]
fn evaluate_being(being: &Being, corpus: &Corpus, init_seed: u64, max_epochs: usize) -> PyResult<(f64, usize, bool)> {
    let mut cfg = SelectionConfig::default();
    cfg.train.init_seed = init_seed;
    cfg.train.max_epochs = max_epochs;
    let e = core_pipeline::evaluate_being(&being.inner, &corpus.inner, &cfg).map_err(to_py)?;
    Ok((e.residual_error, e.train_epochs, e.train_converged))
}

#[pyfunction]
fn roulette_probabilities(fitnesses: Vec<f64>) -> PyResult<Vec<f64>> {
    ga::roulette_probabilities(&fitnesses).map_err(to_py)
}

#[pyfunction]
fn one_point_crossover(a: &str, b: &str, point: usize) -> PyResult<(String, String)> {
    let (o1, o2) = ga::one_point_crossover(&parse_chromosome(a)?, &parse_chromosome(b)?, point).map_err(to_py)?;
    Ok((o1.to_string(), o2.to_string()))
}

#[pyfunction]
fn onemax_fitness(x: &str) -> PyResult<f64> {
    Ok(ga::onemax_fitness(&parse_chromosome(x)?))
}

#[pyfunction]
fn decode_scalar(x: &str, lo: f64, hi: f64) -> PyResult<f64> {
    ga::decode_scalar(&parse_chromosome(x)?, lo, hi).map_err(to_py)
}

fn ga_config(pop: usize, pc: f64, pm: f64, generations: usize, seed: u64) -> GaConfig {
    GaConfig {
        population_size: pop,
        p_crossover: pc,
        p_mutation: pm,
        max_generations: generations,
        seed,
        ..GaConfig::default()
    }
}

/// OneMax demo; returns `(best_chromosome, [(generation, best, mean), ...])`.
#[pyfunction]
#[pyo3(signature = (bits=100, population=100, pc=0.8, pm=0.01, generations=200, seed=1, scaling_power=ga::ONEMAX_DEFAULT_POWER))]
fn run_onemax(
    bits: usize,
    population: usize,
    pc: f64,
    pm: f64,
    generations: usize,
    seed: u64,
    scaling_power: i32,
) -> PyResult<(String, Vec<(usize, f64, f64)>)> {
    let cfg = ga_config(population, pc, pm, generations, seed);
    let h = ga::run_onemax_scaled(&cfg, bits, scaling_power).map_err(to_py)?;
    let rows = h
        .generations
        .iter()
        .map(|g| (g.generation, g.best_fitness, g.mean_fitness))
        .collect();
    Ok((h.best.to_string(), rows))
}

/// `-x²` demo; returns `(best_x, best_chromosome)`.
#[pyfunction]
#[pyo3(signature = (lo=-2.0, hi=2.0, bits=12, population=50, pc=0.8, pm=0.01, generations=100, seed=1))]
#[allow(clippy::too_many_arguments)]
fn run_quad(
    lo: f64,
    hi: f64,
    bits: usize,
    population: usize,
    pc: f64,
    pm: f64,
    generations: usize,
    seed: u64,
) -> PyResult<(f64, String)> {
    let cfg = ga_config(population, pc, pm, generations, seed);
    let q = ga::run_quad(&cfg, bits, lo, hi).map_err(to_py)?;
    Ok((q.best_x, q.history.best.to_string()))
}

#[pyfunction]
fn sigmoid(x: f64) -> f64 {
    core_bpn::sigmoid(x)
}

#[pyfunction]
#[pyo3(signature = (class_index, n_outputs=4))]
fn class_code(class_index: usize, n_outputs: usize) -> PyResult<Vec<f64>> {
    Ok(core_corpus::class_code(class_index, n_outputs).map_err(to_py)?.code)
}

#[pyfunction]
fn pattern_error(output: Vec<f64>, target: Vec<f64>) -> PyResult<f64> {
    core_bpn::pattern_error(&output, &target).map_err(to_py)
}

#[pymodule]
#[pyo3(name = "beingsel")]
pub fn beingsel_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Corpus>()?;
    m.add_class::<Being>()?;
    m.add_class::<Network>()?;
    m.add_class::<SelectionHistory>()?;
    m.add_function(wrap_pyfunction!(run_selection, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_being, m)?)?;
    m.add_function(wrap_pyfunction!(roulette_probabilities, m)?)?;
    m.add_function(wrap_pyfunction!(one_point_crossover, m)?)?;
    m.add_function(wrap_pyfunction!(onemax_fitness, m)?)?;
    m.add_function(wrap_pyfunction!(decode_scalar, m)?)?;
    m.add_function(wrap_pyfunction!(run_onemax, m)?)?;
    m.add_function(wrap_pyfunction!(run_quad, m)?)?;
    m.add_function(wrap_pyfunction!(sigmoid, m)?)?;
    m.add_function(wrap_pyfunction!(class_code, m)?)?;
    m.add_function(wrap_pyfunction!(pattern_error, m)?)?;
    Ok(())
}
