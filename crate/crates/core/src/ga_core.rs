//! Classic binary genetic algorithm: roulette-wheel selection, one-point
//! crossover, per-gene bit mutation and an elitist generational loop,
//! plus the OneMax and `-x²` toy problems.

use std::fmt;
use std::io::{self, Write};

use rand::Rng as _;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{self, Rng};

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitChromosome {
    genes: Vec<bool>,
}

impl BitChromosome {
    pub fn new(genes: Vec<bool>) -> Self {
        BitChromosome { genes }
    }

    pub fn zeros(len: usize) -> Self {
        BitChromosome {
            genes: vec![false; len],
        }
    }

    pub fn ones(len: usize) -> Self {
        BitChromosome {
            genes: vec![true; len],
        }
    }

    pub fn random(len: usize, rng: &mut Rng) -> Self {
        BitChromosome {
            genes: (0..len).map(|_| rng.gen_bool(0.5)).collect(),
        }
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidShape(format!("invalid gene {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    pub fn genes(&self) -> &[bool] {
        &self.genes
    }

    pub fn into_genes(self) -> Vec<bool> {
        self.genes
    }

    pub fn count_ones(&self) -> usize {
        self.genes.iter().filter(|&&g| g).count()
    }

    pub fn hamming(&self, other: &BitChromosome) -> usize {
        self.genes
            .iter()
            .zip(&other.genes)
            .filter(|(a, b)| a != b)
            .count()
    }
}

impl fmt::Display for BitChromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &g in &self.genes {
            f.write_str(if g { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitChromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitChromosome({self})")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub population_size: usize,
    pub p_crossover: f64,
    pub p_mutation: f64,
    pub max_generations: usize,
    pub seed: u64,
    pub elitism: usize,
    /// Stop as soon as the best fitness reaches this value.
    pub target_fitness: Option<f64>,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 100,
            p_crossover: 0.8,
            p_mutation: 0.01,
            max_generations: 200,
            seed: 0,
            elitism: 1,
            target_fitness: None,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        for (name, p) in [("p_crossover", self.p_crossover), ("p_mutation", self.p_mutation)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} is not a probability"));
            }
        }
        if self.population_size < 2 {
            return bad(format!("population size {} < 2", self.population_size));
        }
        if self.max_generations == 0 {
            return bad("max_generations must be at least 1".into());
        }
        if self.elitism >= self.population_size {
            return bad(format!(
                "elitism {} must be below population size {}",
                self.elitism, self.population_size
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPopulation {
    pub members: Vec<(BitChromosome, f64)>,
    pub generation: usize,
}

impl ScoredPopulation {
    /// Index of the fittest member; ties go to the lower index.
    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for (i, (_, f)) in self.members.iter().enumerate() {
            if *f > self.members[best].1 {
                best = i;
            }
        }
        best
    }

    pub fn mean_fitness(&self) -> f64 {
        self.members.iter().map(|(_, f)| f).sum::<f64>() / self.members.len() as f64
    }
}

/// `f_i / Σ f`. Every fitness must be strictly positive.
pub fn roulette_probabilities(fitnesses: &[f64]) -> Result<Vec<f64>> {
    if fitnesses.is_empty() {
        return Err(Error::InvalidConfig("no fitness values".into()));
    }
    if let Some((index, &value)) = fitnesses
        .iter()
        .enumerate()
        .find(|(_, &f)| !(f > 0.0 && f.is_finite()))
    {
        return Err(Error::NonPositiveFitness { index, value });
    }
    let total: f64 = fitnesses.iter().sum();
    Ok(fitnesses.iter().map(|f| f / total).collect())
}

/// Spins the wheel once. Rounding slack at the top end falls to the last
/// slot with non-zero probability.
pub fn roulette_select(probs: &[f64], rng: &mut Rng) -> usize {
    let spin: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if spin < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Offspring #1 takes `b`'s prefix and `a`'s suffix, offspring #2 the
/// reverse.
pub fn one_point_crossover(
    a: &BitChromosome,
    b: &BitChromosome,
    point: usize,
) -> Result<(BitChromosome, BitChromosome)> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if point > a.len() {
        return Err(Error::PointOutOfRange {
            point,
            len: a.len(),
        });
    }
    let (a, b) = (&a.genes, &b.genes);
    let first = [&b[..point], &a[point..]].concat();
    let second = [&a[..point], &b[point..]].concat();
    Ok((BitChromosome::new(first), BitChromosome::new(second)))
}

/// Flips each gene independently with probability `p`.
pub fn bit_mutate(c: &BitChromosome, p: f64, rng: &mut Rng) -> BitChromosome {
    let mut out = c.clone();
    bit_mutate_in_place(&mut out, p, rng);
    out
}

pub fn bit_mutate_in_place(c: &mut BitChromosome, p: f64, rng: &mut Rng) {
    if p <= 0.0 {
        return;
    }
    for g in c.genes.iter_mut() {
        if p >= 1.0 || rng.gen_bool(p) {
            *g = !*g;
        }
    }
}

/// Number of set genes.
pub fn onemax_fitness(x: &BitChromosome) -> f64 {
    x.count_ones() as f64
}

/// Maps the big-endian integer value of the genes linearly onto `[lo, hi]`.
pub fn decode_scalar(x: &BitChromosome, lo: f64, hi: f64) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptyChromosome);
    }
    if !(lo < hi) {
        return Err(Error::InvalidConfig(format!("empty range [{lo}, {hi}]")));
    }
    let mut value = 0.0f64;
    for &g in &x.genes {
        value = value * 2.0 + if g { 1.0 } else { 0.0 };
    }
    let max = 2f64.powi(x.len() as i32) - 1.0;
    Ok(lo + value / max * (hi - lo))
}

pub fn neg_square_fitness(x: &BitChromosome, lo: f64, hi: f64) -> Result<f64> {
    let v = decode_scalar(x, lo, hi)?;
    Ok(-(v * v))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunHistory {
    pub generations: Vec<GenerationStats>,
    pub best: BitChromosome,
    pub best_fitness: f64,
    pub final_population: ScoredPopulation,
}

impl RunHistory {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "generation,best_fitness,mean_fitness")?;
        for g in &self.generations {
            writeln!(out, "{},{},{}", g.generation, g.best_fitness, g.mean_fitness)?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

fn score<F>(population: Vec<BitChromosome>, fitness: &F, generation: usize) -> Result<ScoredPopulation>
where
    F: Fn(&BitChromosome) -> f64 + Sync,
{
    let scores: Vec<f64> = population.par_iter().map(fitness).collect();
    if let Some(index) = scores.iter().position(|f| !f.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "fitness of member {index} is not finite"
        )));
    }
    Ok(ScoredPopulation {
        members: population.into_iter().zip(scores).collect(),
        generation,
    })
}

/// Indices of the `n` fittest members, best first, ties to the lower index.
fn elite_indices(pop: &ScoredPopulation, n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pop.members.len()).collect();
    order.sort_by(|&i, &j| pop.members[j].1.total_cmp(&pop.members[i].1).then(i.cmp(&j)));
    order.truncate(n);
    order
}

/// Generational GA. Generation 1 is `init`; each later generation keeps the
/// `elitism` best unchanged and fills the rest with roulette-selected pairs,
/// crossed over with probability `p_crossover` at a point in `[1, L-1]` and
/// then bit-mutated. Fitness must be strictly positive and is evaluated in
/// parallel; the result does not depend on the thread count.
pub fn run_ga<F>(cfg: &GaConfig, fitness: F, init: Vec<BitChromosome>) -> Result<RunHistory>
where
    F: Fn(&BitChromosome) -> f64 + Sync,
{
    run_ga_weighted(cfg, fitness, |f| f, init)
}

/// [`run_ga`] where the wheel spins on `weight(fitness)` instead of the raw
/// fitness, which is what the history records. `weight` must be strictly
/// positive and order-preserving.
pub fn run_ga_weighted<F, W>(
    cfg: &GaConfig,
    fitness: F,
    weight: W,
    init: Vec<BitChromosome>,
) -> Result<RunHistory>
where
    F: Fn(&BitChromosome) -> f64 + Sync,
    W: Fn(f64) -> f64,
{
    cfg.validate()?;
    if init.len() != cfg.population_size {
        return Err(Error::InvalidConfig(format!(
            "initial population has {} members, expected {}",
            init.len(),
            cfg.population_size
        )));
    }
    let len = init[0].len();
    if let Some(bad) = init.iter().find(|c| c.len() != len) {
        return Err(Error::LengthMismatch(len, bad.len()));
    }

    let mut pop = score(init, &fitness, 1)?;
    // Reject unusable fitness up front, even for single-generation runs.
    let weights: Vec<f64> = pop.members.iter().map(|(_, f)| weight(*f)).collect();
    roulette_probabilities(&weights)?;
    let mut generations = Vec::with_capacity(cfg.max_generations);
    loop {
        let best = pop.best_index();
        let best_fitness = pop.members[best].1;
        generations.push(GenerationStats {
            generation: pop.generation,
            best_fitness,
            mean_fitness: pop.mean_fitness(),
        });
        let reached = cfg.target_fitness.is_some_and(|t| best_fitness >= t);
        if reached || pop.generation >= cfg.max_generations {
            break;
        }

        let mut rng = rng::stream(cfg.seed, pop.generation as u64);
        let weights: Vec<f64> = pop.members.iter().map(|(_, f)| weight(*f)).collect();
        let probs = roulette_probabilities(&weights)?;
        let mut next: Vec<BitChromosome> = elite_indices(&pop, cfg.elitism)
            .into_iter()
            .map(|i| pop.members[i].0.clone())
            .collect();
        while next.len() < cfg.population_size {
            let a = &pop.members[roulette_select(&probs, &mut rng)].0;
            let b = &pop.members[roulette_select(&probs, &mut rng)].0;
            let (mut c1, mut c2) = if len >= 2 && rng.gen_bool(cfg.p_crossover) {
                let point = rng.gen_range(1..len);
                one_point_crossover(a, b, point)?
            } else {
                (a.clone(), b.clone())
            };
            bit_mutate_in_place(&mut c1, cfg.p_mutation, &mut rng);
            bit_mutate_in_place(&mut c2, cfg.p_mutation, &mut rng);
            next.push(c1);
            if next.len() < cfg.population_size {
                next.push(c2);
            }
        }
        pop = score(next, &fitness, pop.generation + 1)?;
    }

    let best = pop.best_index();
    Ok(RunHistory {
        generations,
        best: pop.members[best].0.clone(),
        best_fitness: pop.members[best].1,
        final_population: pop,
    })
}

pub fn random_population(size: usize, len: usize, seed: u64) -> Vec<BitChromosome> {
    let mut rng = rng::stream(seed, u64::MAX);
    (0..size).map(|_| BitChromosome::random(len, &mut rng)).collect()
}

/// Roulette weight for OneMax: `(ones + 1e-9)^power`. The floor keeps the
/// all-zero string selectable; `power = 1` is plain fitness-proportional
/// selection, which stalls in the high 80s at pm = 0.01 because the
/// ones-count varies too little across a converged population.
pub fn onemax_weight(fitness: f64, power: i32) -> f64 {
    (fitness + ONEMAX_FLOOR).powi(power)
}

pub const ONEMAX_FLOOR: f64 = 1e-9;
pub const ONEMAX_DEFAULT_POWER: i32 = 4;

/// OneMax from a uniformly random initial population, roulette on
/// [`onemax_weight`] with the default power.
pub fn run_onemax(cfg: &GaConfig, bits: usize) -> Result<RunHistory> {
    run_onemax_scaled(cfg, bits, ONEMAX_DEFAULT_POWER)
}

pub fn run_onemax_scaled(cfg: &GaConfig, bits: usize, power: i32) -> Result<RunHistory> {
    if bits == 0 {
        return Err(Error::EmptyChromosome);
    }
    if power < 1 {
        return Err(Error::InvalidConfig(format!("scaling power {power} must be at least 1")));
    }
    let init = random_population(cfg.population_size, bits, cfg.seed);
    run_ga_weighted(cfg, onemax_fitness, |f| onemax_weight(f, power), init)
}

/// Result of maximizing `-x²` over `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadOutcome {
    pub history: RunHistory,
    pub best_x: f64,
    /// Constant added to `-x²` to make every fitness positive.
    pub shift: f64,
}

/// Maximizes `-x²` with roulette selection on `shift - x²`, where
/// `shift = max(lo², hi²) + 1e-6` keeps the endpoints selectable. The
/// history records the untransformed `-x²`.
pub fn run_quad(cfg: &GaConfig, bits: usize, lo: f64, hi: f64) -> Result<QuadOutcome> {
    if bits == 0 {
        return Err(Error::EmptyChromosome);
    }
    if !(lo < hi) {
        return Err(Error::InvalidConfig(format!("empty range [{lo}, {hi}]")));
    }
    let shift = lo.powi(2).max(hi.powi(2)) + 1e-6;
    let init = random_population(cfg.population_size, bits, cfg.seed);
    let history = run_ga_weighted(
        cfg,
        |x| neg_square_fitness(x, lo, hi).expect("validated range and length"),
        |f| f + shift,
        init,
    )?;
    let best_x = decode_scalar(&history.best, lo, hi)?;
    Ok(QuadOutcome {
        history,
        best_x,
        shift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn chrom(s: &str) -> BitChromosome {
        BitChromosome::parse(s).unwrap()
    }

    #[test]
    fn roulette_table() {
        let p = roulette_probabilities(&[169.0, 576.0, 64.0, 361.0]).unwrap();
        for (got, want) in p.iter().zip([0.144, 0.492, 0.055, 0.309]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-3);
        }
        assert_eq!(roulette_probabilities(&[3.0; 4]).unwrap(), vec![0.25; 4]);
        assert_eq!(roulette_probabilities(&[1.0]).unwrap(), vec![1.0]);
        assert!(matches!(
            roulette_probabilities(&[1.0, 0.0]),
            Err(Error::NonPositiveFitness { index: 1, .. })
        ));
        assert!(roulette_probabilities(&[1.0, -2.0]).is_err());
    }

    #[test]
    fn roulette_select_singleton() {
        let mut rng = rng::stream(1, 0);
        for _ in 0..100 {
            assert_eq!(roulette_select(&[1.0], &mut rng), 0);
        }
    }

    #[test]
    fn roulette_select_two_way_frequencies() {
        let mut rng = rng::stream(42, 0);
        let n = 10_000;
        let ones = (0..n).filter(|_| roulette_select(&[0.5, 0.5], &mut rng) == 1).count();
        let freq = ones as f64 / n as f64;
        assert!((0.47..=0.53).contains(&freq), "{freq}");
    }

    #[test]
    fn crossover_examples() {
        let (a, b) = (chrom("11010111101"), chrom("10100000100"));
        let (o1, o2) = one_point_crossover(&a, &b, 4).unwrap();
        assert_eq!(o1.to_string(), "10100111101");
        assert_eq!(o2.to_string(), "11010000100");

        let (o1, o2) = one_point_crossover(&a, &a, 6).unwrap();
        assert_eq!((&o1, &o2), (&a, &a));
        let (o1, o2) = one_point_crossover(&a, &b, 0).unwrap();
        assert_eq!((o1, o2), (a.clone(), b.clone()));

        assert!(matches!(one_point_crossover(&a, &chrom("10"), 1), Err(Error::LengthMismatch(11, 2))));
        assert!(matches!(one_point_crossover(&a, &b, 12), Err(Error::PointOutOfRange { .. })));
    }

    #[test]
    fn mutation_extremes() {
        let mut rng = rng::stream(3, 0);
        let c = chrom("1100101");
        assert_eq!(bit_mutate(&c, 0.0, &mut rng), c);
        assert_eq!(bit_mutate(&c, 1.0, &mut rng).to_string(), "0011010");
    }

    #[test]
    fn mutation_mean_flips() {
        let mut rng = rng::stream(5, 0);
        let c = BitChromosome::zeros(100);
        let trials = 10_000;
        let total: usize = (0..trials).map(|_| bit_mutate(&c, 0.01, &mut rng).count_ones()).sum();
        let mean = total as f64 / trials as f64;
        // sd of the mean = sqrt(100 * 0.01 * 0.99 / 10_000) ≈ 0.00995
        assert!((mean - 1.0).abs() <= 0.1, "{mean}");
    }

    #[test]
    fn onemax_values() {
        assert_eq!(onemax_fitness(&BitChromosome::zeros(100)), 0.0);
        assert_eq!(onemax_fitness(&BitChromosome::ones(100)), 100.0);
        assert_eq!(onemax_fitness(&chrom(&"10".repeat(50))), 50.0);
    }

    #[test]
    fn decode_and_neg_square() {
        assert_eq!(decode_scalar(&BitChromosome::zeros(12), -1.0, 1.0).unwrap(), -1.0);
        assert_eq!(decode_scalar(&BitChromosome::ones(12), -1.0, 1.0).unwrap(), 1.0);
        assert_eq!(decode_scalar(&chrom("01"), 0.0, 3.0).unwrap(), 1.0);
        assert!(matches!(decode_scalar(&chrom(""), 0.0, 1.0), Err(Error::EmptyChromosome)));
        assert!(decode_scalar(&chrom("1"), 1.0, 1.0).is_err());

        assert_eq!(neg_square_fitness(&BitChromosome::ones(8), -1.0, 1.0).unwrap(), -1.0);
        // 3 bits over [-3.5, 3.5]: value v decodes to -3.5 + v.
        assert_eq!(neg_square_fitness(&chrom("011"), -3.5, 3.5).unwrap(), -0.25);
        assert_eq!(neg_square_fitness(&BitChromosome::zeros(4), -2.0, 2.0).unwrap(), -4.0);
        // Over [0, 15] with 4 bits the decode is the integer itself.
        assert_eq!(neg_square_fitness(&chrom("0000"), 0.0, 15.0).unwrap(), 0.0);
        assert_eq!(neg_square_fitness(&chrom("0010"), 0.0, 15.0).unwrap(), -4.0);
    }

    #[test]
    fn no_variation_keeps_initial_members() {
        let init = random_population(10, 20, 9);
        let cfg = GaConfig {
            population_size: 10,
            p_crossover: 0.0,
            p_mutation: 0.0,
            max_generations: 15,
            seed: 4,
            ..GaConfig::default()
        };
        let h = run_ga(&cfg, |x| onemax_fitness(x) + 1.0, init.clone()).unwrap();
        assert_eq!(h.generations.len(), 15);
        let first = h.generations[0].best_fitness;
        assert!(h.generations.iter().all(|g| g.best_fitness == first));
        assert!(h.final_population.members.iter().all(|(c, _)| init.contains(c)));
    }

    #[test]
    fn homogeneous_population_is_fixed_point() {
        let c = random_population(1, 30, 2).pop().unwrap();
        let cfg = GaConfig {
            population_size: 8,
            p_crossover: 0.9,
            p_mutation: 0.0,
            max_generations: 20,
            seed: 1,
            ..GaConfig::default()
        };
        let h = run_ga(&cfg, |x| onemax_fitness(x) + 1.0, vec![c.clone(); 8]).unwrap();
        assert!(h.final_population.members.iter().all(|(m, _)| *m == c));
    }

    #[test]
    fn target_fitness_halts_early() {
        let cfg = GaConfig {
            population_size: 20,
            max_generations: 500,
            seed: 3,
            target_fitness: Some(10.0),
            ..GaConfig::default()
        };
        let h = run_onemax(&cfg, 10).unwrap();
        assert!(h.generations.len() < 500);
        assert!(h.best_fitness >= 10.0);
    }

    #[test]
    fn run_rejects_bad_input() {
        let cfg = GaConfig {
            population_size: 4,
            ..GaConfig::default()
        };
        let init = random_population(4, 8, 0);
        assert!(matches!(
            run_ga(&cfg, |_| 0.0, init.clone()),
            Err(Error::NonPositiveFitness { .. })
        ));
        assert!(run_ga(&cfg, |_| 1.0, init[..3].to_vec()).is_err());
        let bad = GaConfig { elitism: 4, ..cfg.clone() };
        assert!(run_ga(&bad, |_| 1.0, init.clone()).is_err());
        let bad = GaConfig { p_mutation: 1.5, ..cfg };
        assert!(run_ga(&bad, |_| 1.0, init).is_err());
    }

    #[test]
    fn csv_layout() {
        let cfg = GaConfig {
            population_size: 4,
            max_generations: 3,
            ..GaConfig::default()
        };
        let csv = run_onemax(&cfg, 8).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "generation,best_fitness,mean_fitness");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("1,"));
    }

    fn arb_pair() -> impl Strategy<Value = (Vec<bool>, Vec<bool>, usize)> {
        (1usize..64).prop_flat_map(|len| {
            (
                proptest::collection::vec(any::<bool>(), len),
                proptest::collection::vec(any::<bool>(), len),
                0..=len,
            )
        })
    }

    proptest! {
        #[test]
        fn crossover_conserves_positions((a, b, point) in arb_pair()) {
            let (a, b) = (BitChromosome::new(a), BitChromosome::new(b));
            let (o1, o2) = one_point_crossover(&a, &b, point).unwrap();
            for i in 0..a.len() {
                let mut parents = [a.genes()[i], b.genes()[i]];
                let mut kids = [o1.genes()[i], o2.genes()[i]];
                parents.sort();
                kids.sort();
                prop_assert_eq!(parents, kids);
            }
        }

        #[test]
        fn roulette_normalizes_and_keeps_order(f in proptest::collection::vec(1e-6f64..1e6, 1..50)) {
            let p = roulette_probabilities(&f).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for i in 0..f.len() {
                for j in 0..f.len() {
                    if f[i] < f[j] {
                        prop_assert!(p[i] <= p[j]);
                    }
                }
            }
        }

        #[test]
        fn mutation_hamming_is_flip_count(len in 1usize..200, p in 0.0f64..=1.0, seed in any::<u64>()) {
            let mut rng = rng::stream(seed, 0);
            let c = BitChromosome::random(len, &mut rng);
            let m = bit_mutate(&c, p, &mut rng);
            prop_assert_eq!(m.len(), c.len());
            if p == 0.0 { prop_assert_eq!(m.hamming(&c), 0); }
        }

        #[test]
        fn elitist_best_never_drops(seed in 0u64..50) {
            let cfg = GaConfig {
                population_size: 12,
                max_generations: 25,
                seed,
                ..GaConfig::default()
            };
            let h = run_onemax(&cfg, 24).unwrap();
            for w in h.generations.windows(2) {
                prop_assert!(w[1].best_fitness >= w[0].best_fitness);
            }
            prop_assert_eq!(&h, &run_onemax(&cfg, 24).unwrap());
        }
    }
}
