//! Genetic selection of a small training set for a back-propagation network.
//!
//! A candidate training set is a [`beings::Being`]: one 16×16 glyph
//! chromosome per character class. A tribe of beings evolves under roulette
//! selection, single-point crossover over the concatenated genome and
//! single-pixel noise mutation. Each being is scored by training a fresh
//! network (always from the same initial weights) on its glyphs and then
//! measuring the worst residual error over the whole corpus.
//!
//! The crate also carries the classic binary GA ([`ga_core`]) with the
//! OneMax and `-x²` demos, the network itself ([`bpn`]) and corpus tooling
//! ([`corpus`]) with PBM I/O and a synthetic glyph generator.

pub mod beings;
pub mod bpn;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod ga_core;
pub mod pbm;
pub mod pipeline;
pub mod rng;

pub use error::{Error, Result};
