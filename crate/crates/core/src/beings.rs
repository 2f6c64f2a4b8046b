//! Beings: ordered sets of class-typed glyph chromosomes that compete as
//! whole candidate training sets.
//!
//! Slot `i` of a being always holds a glyph for class `i`. Crossover cuts
//! the concatenated genome of two beings at a single global point, so a
//! cut on a chromosome boundary swaps whole glyphs between parents while a
//! cut inside a chromosome produces one hybrid glyph. Mutation is noise: at
//! most one flipped pixel per chromosome.

use std::fs;
use std::path::Path;

use rand::Rng as _;

use crate::corpus::{BitPattern, Corpus, SIDE};
use crate::error::{Error, Result};
use crate::ga_core::{one_point_crossover, BitChromosome};
use crate::pbm;
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Being {
    chromosomes: Vec<BitChromosome>,
}

impl Being {
    /// All chromosomes must share one non-zero length.
    pub fn new(chromosomes: Vec<BitChromosome>) -> Result<Self> {
        let Some(first) = chromosomes.first() else {
            return Err(Error::ShapeMismatch("a being needs at least one chromosome".into()));
        };
        let len = first.len();
        if len == 0 {
            return Err(Error::EmptyChromosome);
        }
        if let Some((slot, c)) = chromosomes.iter().enumerate().find(|(_, c)| c.len() != len) {
            return Err(Error::ShapeMismatch(format!(
                "chromosome {slot} has {} genes, expected {len}",
                c.len()
            )));
        }
        Ok(Being { chromosomes })
    }

    pub fn from_patterns(patterns: &[&BitPattern]) -> Result<Self> {
        Being::new(
            patterns
                .iter()
                .map(|p| BitChromosome::new(p.bits().to_vec()))
                .collect(),
        )
    }

    pub fn n_classes(&self) -> usize {
        self.chromosomes.len()
    }

    pub fn gene_count(&self) -> usize {
        self.chromosomes[0].len()
    }

    pub fn genome_len(&self) -> usize {
        self.n_classes() * self.gene_count()
    }

    pub fn chromosomes(&self) -> &[BitChromosome] {
        &self.chromosomes
    }

    pub fn chromosome(&self, slot: usize) -> &BitChromosome {
        &self.chromosomes[slot]
    }

    /// Slot glyph as a 16×16 pattern; fails unless the gene count is 256.
    pub fn pattern(&self, slot: usize) -> Result<BitPattern> {
        BitPattern::from_bits(self.chromosomes[slot].genes().to_vec())
    }

    pub fn same_shape(&self, other: &Being) -> bool {
        self.n_classes() == other.n_classes() && self.gene_count() == other.gene_count()
    }

    fn check_shape(&self, other: &Being) -> Result<()> {
        if !self.same_shape(other) {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.n_classes(),
                self.gene_count(),
                other.n_classes(),
                other.gene_count()
            )));
        }
        Ok(())
    }

    /// The genome as one flat chromosome, slots in order.
    pub fn flatten(&self) -> BitChromosome {
        BitChromosome::new(
            self.chromosomes
                .iter()
                .flat_map(|c| c.genes().iter().copied())
                .collect(),
        )
    }

    fn split(flat: BitChromosome, gene_count: usize) -> Being {
        let chromosomes = flat
            .into_genes()
            .chunks(gene_count)
            .map(|c| BitChromosome::new(c.to_vec()))
            .collect();
        Being { chromosomes }
    }

    /// Writes `slotXX.pbm` for every slot into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        if self.gene_count() != SIDE * SIDE {
            return Err(Error::InvalidShape(format!(
                "cannot write {}-gene chromosomes as 16x16 images",
                self.gene_count()
            )));
        }
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (slot, c) in self.chromosomes.iter().enumerate() {
            pbm::write(&dir.join(slot_file_name(slot)), SIDE, SIDE, c.genes())?;
        }
        Ok(())
    }

    /// Reads consecutive `slotXX.pbm` files from `dir` until one is missing.
    pub fn load(dir: &Path) -> Result<Being> {
        let mut chromosomes = Vec::new();
        loop {
            let path = dir.join(slot_file_name(chromosomes.len()));
            if !path.is_file() {
                break;
            }
            let bmp = pbm::read(&path)?;
            if bmp.width != SIDE || bmp.height != SIDE {
                return Err(Error::MalformedPbm {
                    file: path,
                    reason: format!("expected 16x16, found {}x{}", bmp.width, bmp.height),
                });
            }
            chromosomes.push(BitChromosome::new(bmp.bits));
        }
        if chromosomes.is_empty() {
            return Err(Error::io(
                dir.join(slot_file_name(0)),
                std::io::Error::new(std::io::ErrorKind::NotFound, "no slot files"),
            ));
        }
        Being::new(chromosomes)
    }
}

pub fn slot_file_name(slot: usize) -> String {
    format!("slot{slot:02}.pbm")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CrossoverKind {
    /// Cut between two chromosomes: whole glyphs change hands.
    Boundary,
    /// Cut inside chromosome `slot` after `offset` genes: one hybrid glyph.
    InChromosome { slot: usize, offset: usize },
}

impl CrossoverKind {
    pub fn classify(point: usize, gene_count: usize) -> Self {
        match point % gene_count {
            0 => CrossoverKind::Boundary,
            offset => CrossoverKind::InChromosome {
                slot: point / gene_count,
                offset,
            },
        }
    }
}

/// Single-point crossover over the concatenated genomes. Offspring #1 takes
/// `b`'s genes before `point` and `a`'s after, offspring #2 the reverse.
pub fn being_crossover(a: &Being, b: &Being, point: usize) -> Result<(Being, Being, CrossoverKind)> {
    a.check_shape(b)?;
    let (o1, o2) = one_point_crossover(&a.flatten(), &b.flatten(), point)?;
    let g = a.gene_count();
    Ok((Being::split(o1, g), Being::split(o2, g), CrossoverKind::classify(point, g)))
}

/// Each chromosome, with probability `p`, gets one uniformly chosen gene
/// flipped.
pub fn mutate_being(x: &Being, p: f64, rng: &mut Rng) -> Being {
    let mut out = x.clone();
    mutate_being_in_place(&mut out, p, rng);
    out
}

pub fn mutate_being_in_place(x: &mut Being, p: f64, rng: &mut Rng) {
    if p <= 0.0 {
        return;
    }
    for c in x.chromosomes.iter_mut() {
        if p >= 1.0 || rng.gen_bool(p) {
            let mut genes = std::mem::take(c).into_genes();
            let i = rng.gen_range(0..genes.len());
            genes[i] = !genes[i];
            *c = BitChromosome::new(genes);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tribe {
    pub beings: Vec<Being>,
    pub generation: usize,
}

/// One pure being per variant: being `v` carries `pattern[class][v]` in
/// every slot `class`.
pub fn pure_beings_from_corpus(corpus: &Corpus) -> Result<Tribe> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let beings = (0..corpus.n_variants())
        .map(|v| {
            let glyphs: Vec<&BitPattern> = (0..corpus.n_classes()).map(|c| corpus.pattern(c, v)).collect();
            Being::from_patterns(&glyphs)
        })
        .collect::<Result<_>>()?;
    Ok(Tribe { beings, generation: 1 })
}

/// True when every slot holds some corpus variant of its own class.
pub fn is_pure(x: &Being, corpus: &Corpus) -> Result<bool> {
    if x.n_classes() != corpus.n_classes() || x.gene_count() != SIDE * SIDE {
        return Err(Error::ShapeMismatch(format!(
            "being {}x{} vs corpus with {} classes of 256 pixels",
            x.n_classes(),
            x.gene_count(),
            corpus.n_classes()
        )));
    }
    Ok(x.chromosomes.iter().enumerate().all(|(class, c)| {
        corpus
            .class_patterns(class)
            .iter()
            .any(|p| p.bits() == c.genes())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::generate_synthetic;
    use crate::rng;

    fn constant(n_classes: usize, gene_count: usize, value: bool) -> Being {
        let c = if value { BitChromosome::ones(gene_count) } else { BitChromosome::zeros(gene_count) };
        Being::new(vec![c; n_classes]).unwrap()
    }

    #[test]
    fn boundary_cut_swaps_whole_glyphs() {
        let (a, b) = (constant(12, 256, false), constant(12, 256, true));
        let (o1, o2, kind) = being_crossover(&a, &b, 256).unwrap();
        assert_eq!(kind, CrossoverKind::Boundary);
        assert_eq!(o1.chromosome(0), &BitChromosome::ones(256));
        assert!(o1.chromosomes()[1..].iter().all(|c| *c == BitChromosome::zeros(256)));
        assert_eq!(o2.chromosome(0), &BitChromosome::zeros(256));
        assert!(o2.chromosomes()[1..].iter().all(|c| *c == BitChromosome::ones(256)));
    }

    #[test]
    fn inner_cut_makes_hybrid() {
        let (a, b) = (constant(12, 256, false), constant(12, 256, true));
        let (o1, _, kind) = being_crossover(&a, &b, 128).unwrap();
        assert_eq!(kind, CrossoverKind::InChromosome { slot: 0, offset: 128 });
        let glyph = o1.pattern(0).unwrap();
        for r in 0..SIDE {
            for c in 0..SIDE {
                assert_eq!(glyph.get(r, c), r < 8);
            }
        }
        assert!(o1.chromosomes()[1..].iter().all(|c| *c == BitChromosome::zeros(256)));
    }

    #[test]
    fn zero_point_keeps_parents() {
        let corpus = generate_synthetic(4, 3, 2).unwrap();
        let tribe = pure_beings_from_corpus(&corpus).unwrap();
        let (a, b) = (&tribe.beings[0], &tribe.beings[1]);
        let (o1, o2, kind) = being_crossover(a, b, 0).unwrap();
        assert_eq!((&o1, &o2, kind), (a, b, CrossoverKind::Boundary));
        let end = a.genome_len();
        assert!(being_crossover(a, b, end + 1).is_err());
        assert!(being_crossover(a, &constant(2, 256, true), 3).is_err());
    }

    #[test]
    fn mutation_extremes() {
        let corpus = generate_synthetic(6, 12, 1).unwrap();
        let being = pure_beings_from_corpus(&corpus).unwrap().beings.remove(0);
        let mut rng = rng::stream(0, 0);
        assert_eq!(mutate_being(&being, 0.0, &mut rng), being);
        let m = mutate_being(&being, 1.0, &mut rng);
        for (x, y) in m.chromosomes().iter().zip(being.chromosomes()) {
            assert_eq!(x.hamming(y), 1);
        }
    }

    #[test]
    fn pure_tribe_shapes() {
        let corpus = generate_synthetic(1, 12, 9).unwrap();
        let tribe = pure_beings_from_corpus(&corpus).unwrap();
        assert_eq!(tribe.beings.len(), 9);
        assert!(tribe.beings.iter().all(|b| b.n_classes() == 12 && b.gene_count() == 256));
        assert!(tribe.beings.iter().all(|b| is_pure(b, &corpus).unwrap()));

        let lone = generate_synthetic(1, 1, 1).unwrap();
        let t = pure_beings_from_corpus(&lone).unwrap();
        assert_eq!(t.beings.len(), 1);
        assert_eq!(t.beings[0].pattern(0).unwrap(), *lone.pattern(0, 0));
    }

    #[test]
    fn purity_is_per_slot() {
        let corpus = generate_synthetic(2, 12, 9).unwrap();
        let glyphs: Vec<&BitPattern> = (0..12)
            .map(|c| corpus.pattern(c, if c % 2 == 0 { 0 } else { 3 }))
            .collect();
        let mixed = Being::from_patterns(&glyphs).unwrap();
        assert!(is_pure(&mixed, &corpus).unwrap());

        // A glyph from the wrong class in a slot is not pure.
        let mut swapped = glyphs.clone();
        swapped.swap(0, 1);
        assert!(!is_pure(&Being::from_patterns(&swapped).unwrap(), &corpus).unwrap());
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = generate_synthetic(3, 4, 2).unwrap();
        let being = pure_beings_from_corpus(&corpus).unwrap().beings.remove(1);
        being.save(dir.path()).unwrap();
        assert!(dir.path().join("slot03.pbm").is_file());
        assert_eq!(Being::load(dir.path()).unwrap(), being);
        assert!(constant(2, 10, true).save(dir.path()).is_err());
    }
}
