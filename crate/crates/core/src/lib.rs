//! Counting, ranking, approximate counting and uniform random generation of
//! words in formal languages and of elements of ambiguously described
//! combinatorial structures, plus a conditional-expectation toolkit for
//! pseudo-boolean optimization.
//!
//! The crate is organised bottom-up:
//!
//! * [`numutil`]: exact arithmetic, the [`CoinSource`] bit stream and the base
//!   numeric procedures (uniform integers, bit sizes, `lcm{1..n}`).
//! * [`framework`]: the ambiguous-description engine: a generic uniform
//!   sampler, census estimator and exact counter for any [`Description`],
//!   amplifiers, union/product combinators and the DNF example.
//! * [`regular`]: deterministic automata: census tables, the per-state
//!   sampler and rank/unrank.
//! * [`rankauto`]: slice ranking for bounded-ambiguity nondeterministic
//!   automata through Kronecker powers of the transition matrices.
//! * [`cfl`]: Chomsky-normal-form grammars, derivation-tree census and
//!   sampling, and multiplicity Earley parsing.
//! * [`pdagram`]: the per-length grammar of a pushdown automaton.
//! * [`traces`]: trace monoids and rational trace languages.
//! * [`pseudobool`]: arithmetic circuits, the permanent identities and the
//!   derandomized local-search pipeline.
//!
//! Counting code is generic over the count type through [`Count`]; samplers
//! and every public entry point that needs exact big numbers use the
//! aliases below.
//!
//! Ranks follow the length-then-lexicographic order and are **1-based** on
//! members: the least member of a language has rank 1.

pub mod alphabet;
pub mod cfl;
pub mod error;
pub mod framework;
pub mod numutil;
pub mod pdagram;
pub mod pseudobool;
pub mod rankauto;
pub mod regular;
mod text;
pub mod traces;

pub use error::{Error, Result};
pub use framework::{Description, SampleReport};
pub use numutil::{CoinSource, Count, Field};

/// Arbitrary-precision natural number.
pub type Nat = num_bigint::BigUint;
/// Arbitrary-precision signed integer.
pub type Int = num_bigint::BigInt;
/// Exact rational in lowest terms.
pub type Rat = num_rational::BigRational;

/// A symbol is its index in an ordered alphabet; the index order is the
/// lexicographic order.
pub type Symbol = usize;
/// Words are symbol sequences.
pub type Word = Vec<Symbol>;

/// Census table of a DFA with exact counts.
pub type DfaCensus = regular::CensusTable<Nat>;
/// Derivation-tree census of a CNF grammar with exact counts.
pub type GrammarCensus = cfl::TreeCensus<Nat>;
/// Square matrix with exact natural entries.
pub type NatMatrix = rankauto::Matrix<Nat>;
