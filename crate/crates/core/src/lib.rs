//! Synthesis of local-search neighborhood operators.
//!
//! The pipeline: a constraint [`model`] yields a problem-specific grammar
//! ([`grammar`]); grammatical [`evolution`] maps codon genomes through it to
//! [`ndl`] programs, scores each by how many constraint kinds its neighbors
//! keep satisfied, and the best operator drives a hill climber in
//! [`search`].

pub mod evolution;
pub mod grammar;
pub mod model;
pub mod ndl;
pub mod search;

pub use evolution::{evaluate_fitness, evolve, EvolutionConfig, EvolutionReport, Fitness, Tier};
pub use grammar::{derive_grammar, map_genome, Genome, Grammar, MappingOutcome};
pub use model::{Assignment, ConstraintId, ConstraintKind, Model, ModelError, VarId, Violations};
pub use ndl::{analyze, neighbors, optimize, parse, Limits, NeighborSet, Program};
pub use search::{hill_climb, hill_climb_observed, is_local_optimum, solve, SearchConfig, SearchResult};
