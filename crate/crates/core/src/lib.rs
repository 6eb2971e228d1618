//! Rooted dependency structures over a linear arrangement: exhaustive and
//! uniform-random generation via Prüfer codes, membership in formal
//! dependency-grammar classes (planar, projective, WG1, 1EC), and exact
//! per-length dependency-distance statistics against the random-linear-
//! arrangement baseline. CoNLL-U treebanks can be ingested to produce the
//! attested counterpart of the artificial ensembles.
//!
//! All generation and aggregation is deterministic: a survey run with the
//! same configuration and seed produces identical results for any number of
//! worker threads (see [`exec::Executor`]).

pub mod classes;
pub mod exec;
pub mod prufer;
pub mod rational;
pub mod stats;
pub mod tree;
pub mod treebank;

pub use classes::{classify, ClassId, ClassMask};
pub use exec::Executor;
pub use prufer::{enumerate_all, sample_uniform, GenConfig, PruferCode, UndirectedTree};
pub use rational::Rational;
pub use stats::{survey, LengthClassStats, Source, SurveyRow};
pub use tree::{baseline_rla, DepStructure, DistanceSummary, Edge};
