//! Canonical-form models: basis trees, evaluation, complexity and rendering.
//!
//! A [`Model`] is an offset plus a least-squares weighted sum of
//! [`BasisTree`]s. Each tree is a full derivation tree of the active grammar:
//! interior nodes carry the nonterminal and the alternative used, leaves carry
//! variable combos ([`Vc`]), evolved weights ([`Weight`]), operator names
//! ([`OpId`]) or punctuation. Evaluation reads the punctuation back, so a tree
//! is interpretable without the grammar it came from.

mod eval;
mod model;
mod ops;
mod text;
mod tree;
mod vc;
mod weight;

pub use eval::{eval_basis, eval_basis_columns};
pub use model::{complexity, eval_model, Model};
pub use ops::OpId;
pub use text::{format_sig, render_basis, to_canonical_text, TextOptions};
pub use tree::{BasisTree, Node, NodePath, Punct};
pub use vc::{vc_value, Vc};
pub use weight::{interpret_weight, Weight};
