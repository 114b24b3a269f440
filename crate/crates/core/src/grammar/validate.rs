use std::fmt;

use super::{Grammar, Symbol, TreeLimits};
use crate::expr::{BasisTree, Node, NodePath};

#[derive(Clone, Debug, PartialEq)]
pub enum ViolationKind {
    WrongRoot { expected: String, found: String },
    UnknownNonterminal(String),
    NoSuchAlternative { symbol: String, alt: usize },
    DisabledAlternative { symbol: String, alt: usize },
    ChildCount { symbol: String, expected: usize, found: usize },
    ChildMismatch { expected: String, found: String },
    Depth { depth: usize, max: usize },
    WeightBound { stored: f64 },
    ZeroVc,
    VcLength { expected: usize, found: usize },
    ExponentCap { exponent: i32, cap: i32 },
}

/// A grammar or limit violation at a node.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub path: NodePath,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {:?}: ", self.path)?;
        match &self.kind {
            ViolationKind::WrongRoot { expected, found } => write!(f, "root is {found}, expected {expected}"),
            ViolationKind::UnknownNonterminal(s) => write!(f, "unknown nonterminal {s}"),
            ViolationKind::NoSuchAlternative { symbol, alt } => write!(f, "{symbol} has no alternative {alt}"),
            ViolationKind::DisabledAlternative { symbol, alt } => write!(f, "{symbol} alternative {alt} is disabled"),
            ViolationKind::ChildCount { symbol, expected, found } => {
                write!(f, "{symbol} expects {expected} children, found {found}")
            }
            ViolationKind::ChildMismatch { expected, found } => write!(f, "expected {expected}, found {found}"),
            ViolationKind::Depth { depth, max } => write!(f, "depth {depth} exceeds {max}"),
            ViolationKind::WeightBound { stored } => write!(f, "weight bound: stored value {stored}"),
            ViolationKind::ZeroVc => write!(f, "variable combo has no nonzero exponent"),
            ViolationKind::VcLength { expected, found } => {
                write!(f, "variable combo has {found} exponents, expected {expected}")
            }
            ViolationKind::ExponentCap { exponent, cap } => write!(f, "exponent {exponent} exceeds cap {cap}"),
        }
    }
}

fn describe_symbol(g: &Grammar, sym: &Symbol) -> String {
    match sym {
        Symbol::Nonterminal(r) => g.rule(*r).name.clone(),
        Symbol::Vc => "'VC'".into(),
        Symbol::Weight => "'W'".into(),
        Symbol::Op(op) => format!("'{}'", op.name().to_uppercase()),
        Symbol::Punct(p) => format!("'{}'", p.as_str()),
    }
}

fn describe_node(node: &Node) -> String {
    match node {
        Node::Nonterminal { symbol, .. } => symbol.clone(),
        Node::Vc(_) => "'VC'".into(),
        Node::Weight(_) => "'W'".into(),
        Node::Op { op } => format!("'{}'", op.name().to_uppercase()),
        Node::Token { token } => format!("'{}'", token.as_str()),
    }
}

struct Checker<'a> {
    g: &'a Grammar,
    limits: &'a TreeLimits,
    out: Vec<Violation>,
}

impl Checker<'_> {
    fn push(&mut self, path: &NodePath, kind: ViolationKind) {
        self.out.push(Violation { path: path.clone(), kind });
    }

    fn leaf(&mut self, node: &Node, path: &NodePath) {
        match node {
            Node::Weight(w) => {
                if !w.in_bounds(self.limits.weight_bound) {
                    self.push(path, ViolationKind::WeightBound { stored: w.stored });
                }
            }
            Node::Vc(vc) => {
                if vc.len() != self.limits.n_vars {
                    self.push(path, ViolationKind::VcLength { expected: self.limits.n_vars, found: vc.len() });
                }
                if vc.is_zero() {
                    self.push(path, ViolationKind::ZeroVc);
                }
                let cap = self.limits.exp_cap;
                if let Some(&e) = vc.exponents.iter().find(|e| e.abs() > cap) {
                    self.push(path, ViolationKind::ExponentCap { exponent: e, cap });
                }
            }
            _ => {}
        }
    }

    fn nonterminal(&mut self, node: &Node, path: &mut NodePath) {
        let Node::Nonterminal { symbol, alt, children } = node else {
            return;
        };
        let Some(rule) = self.g.rule_index(symbol) else {
            self.push(path, ViolationKind::UnknownNonterminal(symbol.clone()));
            return;
        };
        let Some(alternative) = self.g.rule(rule).alternatives.get(*alt) else {
            self.push(path, ViolationKind::NoSuchAlternative { symbol: symbol.clone(), alt: *alt });
            return;
        };
        if !alternative.enabled {
            self.push(path, ViolationKind::DisabledAlternative { symbol: symbol.clone(), alt: *alt });
        }
        if alternative.symbols.len() != children.len() {
            self.push(
                path,
                ViolationKind::ChildCount {
                    symbol: symbol.clone(),
                    expected: alternative.symbols.len(),
                    found: children.len(),
                },
            );
        }
        for (i, child) in children.iter().enumerate() {
            path.push(i);
            let matches = match (alternative.symbols.get(i), child) {
                (None, _) => true,
                (Some(Symbol::Nonterminal(r)), Node::Nonterminal { symbol: s, .. }) => self.g.rule(*r).name == *s,
                (Some(Symbol::Vc), Node::Vc(_)) | (Some(Symbol::Weight), Node::Weight(_)) => true,
                (Some(Symbol::Op(a)), Node::Op { op }) => a == op,
                (Some(Symbol::Punct(a)), Node::Token { token }) => a == token,
                _ => false,
            };
            if !matches {
                let expected = describe_symbol(self.g, &alternative.symbols[i]);
                self.push(path, ViolationKind::ChildMismatch { expected, found: describe_node(child) });
            }
            match child {
                Node::Nonterminal { .. } => self.nonterminal(child, path),
                leaf => self.leaf(leaf, path),
            }
            path.pop();
        }
    }
}

/// Checks a tree against the grammar and limits; an empty list means valid.
pub fn validate(tree: &BasisTree, g: &Grammar, limits: &TreeLimits) -> Vec<Violation> {
    let mut checker = Checker { g, limits, out: Vec::new() };
    let root_ok = tree.root.symbol() == Some(g.start_name());
    if !root_ok {
        checker.push(
            &Vec::new(),
            ViolationKind::WrongRoot { expected: g.start_name().to_string(), found: describe_node(&tree.root) },
        );
    }
    let depth = tree.depth();
    if depth > limits.max_depth {
        checker.push(&Vec::new(), ViolationKind::Depth { depth, max: limits.max_depth });
    }
    checker.nonterminal(&tree.root, &mut Vec::new());
    checker.out
}
