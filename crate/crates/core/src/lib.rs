//! Template-free symbolic regression.
//!
//! Models are linear combinations of basis functions, where every basis is a
//! derivation tree of a small canonical-form grammar: a product of variable
//! combos and nonlinear operators at the root, weighted sums inside each
//! operator, and so on recursively. A multi-objective evolutionary search
//! (NSGA-II) trades training error against an expression complexity score and
//! returns a nondominated set of models. After the run, each model is pruned
//! with PRESS-driven forward regression and the set is filtered against
//! held-out test data.
//!
//! Module map:
//!
//! * [`dataset`]: CSV ingestion, design-of-experiments sampling, target scaling,
//!   synthetic benchmark functions.
//! * [`expr`]: basis trees, models, evaluation, complexity and rendering.
//! * [`grammar`]: grammar file parsing, random tree generation, validation.
//! * [`fit`]: least squares, error measures, PRESS and forward regression.
//! * [`evolve`]: nondominated sorting, crowding, variation operators, archive.
//! * [`pipeline`]: run configuration and the end-to-end modeling flow.

pub mod dataset;
pub mod evolve;
pub mod expr;
pub mod fit;
pub mod grammar;
pub mod pipeline;

pub use dataset::Dataset;

pub use expr::{BasisTree, Model};
pub use grammar::Grammar;
pub use pipeline::{RunConfig, TradeoffSet};

