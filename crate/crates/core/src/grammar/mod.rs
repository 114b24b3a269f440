//! Basis grammar: parsing, random derivation, validation and crossover sites.
//!
//! The text format is one rule per logical line, `LHS => alt | alt | ...`,
//! with single-quoted terminals and `#` comments. A physical line without `=>`
//! continues the previous rule. An alternative that starts with `...` is an
//! elision and is dropped together with whatever follows it up to the next `|`.
//! Repeating a left-hand side appends alternatives to the existing rule.

mod generate;
mod parse;
mod validate;

use std::collections::HashMap;

use thiserror::Error;

use crate::expr::{BasisTree, NodePath, OpId, Punct, Vc};

pub use generate::random_tree;
pub use validate::{validate, Violation, ViolationKind};

/// The grammar shipped as the default basis grammar.
pub const DEFAULT_GRAMMAR: &str = include_str!("../../grammars/default.grammar");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("grammar defines no rules")]
    Empty,
    #[error("line {line}: unterminated quote")]
    UnterminatedQuote { line: usize },
    #[error("line {line}: text before the first rule (expected 'LHS => ...')")]
    MissingArrow { line: usize },
    #[error("line {line}: invalid left-hand side {text:?}")]
    BadLhs { line: usize, text: String },
    #[error("line {line}: unexpected character {ch:?}")]
    UnexpectedChar { line: usize, ch: char },
    #[error("line {line}: unknown terminal '{text}'")]
    UnknownTerminal { line: usize, text: String },
    #[error("line {line}: empty alternative in rule {rule}")]
    EmptyAlternative { line: usize, rule: String },
    #[error("undefined nonterminal {name} (used in rule {by})")]
    Undefined { name: String, by: String },
    #[error("nonterminal {0} has no enabled alternative that terminates")]
    NoTermination(String),
    #[error("unknown nonterminal {0}")]
    UnknownNonterminal(String),
    #[error("rule {rule} has no alternative {alt}")]
    NoSuchAlternative { rule: String, alt: usize },
}

/// One symbol of an alternative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    Nonterminal(usize),
    Vc,
    Weight,
    Op(OpId),
    Punct(Punct),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Alternative {
    pub symbols: Vec<Symbol>,
    pub enabled: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub name: String,
    pub alternatives: Vec<Alternative>,
}

/// Limits every generated or validated tree must respect.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreeLimits {
    pub n_vars: usize,
    pub max_depth: usize,
    /// `B`: stored weights live in `[-2B, 2B]`.
    pub weight_bound: f64,
    pub exp_cap: i32,
}

impl TreeLimits {
    pub fn new(n_vars: usize) -> Self {
        Self { n_vars, max_depth: 8, weight_bound: 10.0, exp_cap: 5 }
    }
}

/// A parsed basis grammar. The start symbol is the first rule's left-hand side.
#[derive(Clone, Debug)]
pub struct Grammar {
    rules: Vec<Rule>,
    index: HashMap<String, usize>,
    /// Shortest derivation depth per rule over enabled alternatives.
    min_depth: Vec<Option<usize>>,
    source: String,
}

impl Grammar {
    pub fn parse(text: &str) -> Result<Self, GrammarError> {
        parse::parse(text)
    }

    pub fn default_grammar() -> Self {
        Self::parse(DEFAULT_GRAMMAR).expect("bundled grammar parses")
    }

    fn from_rules(rules: Vec<Rule>, source: String) -> Result<Self, GrammarError> {
        if rules.is_empty() {
            return Err(GrammarError::Empty);
        }
        let index = rules.iter().enumerate().map(|(i, r)| (r.name.clone(), i)).collect();
        let mut g = Self { rules, index, min_depth: Vec::new(), source };
        g.refresh_depths()?;
        Ok(g)
    }

    fn refresh_depths(&mut self) -> Result<(), GrammarError> {
        let mut depth: Vec<Option<usize>> = vec![None; self.rules.len()];
        loop {
            let mut changed = false;
            for (i, rule) in self.rules.iter().enumerate() {
                let best = rule
                    .alternatives
                    .iter()
                    .filter(|a| a.enabled)
                    .filter_map(|a| alt_depth(a, &depth))
                    .min();
                if best.is_some() && (depth[i].is_none() || best < depth[i]) {
                    depth[i] = best;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if let Some(i) = depth.iter().position(Option::is_none) {
            return Err(GrammarError::NoTermination(self.rules[i].name.clone()));
        }
        self.min_depth = depth;
        Ok(())
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, i: usize) -> &Rule {
        &self.rules[i]
    }

    pub fn rule_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn start(&self) -> usize {
        0
    }

    pub fn start_name(&self) -> &str {
        &self.rules[0].name
    }

    pub fn nonterminal_names(&self) -> Vec<&str> {
        self.rules.iter().map(|r| r.name.as_str()).collect()
    }

    /// Shortest derivation depth of a rule (a rule with only terminal
    /// alternatives has depth 1).
    pub fn min_depth(&self, rule: usize) -> usize {
        self.min_depth[rule].expect("depths are complete after construction")
    }

    /// Shortest derivation depth through one alternative.
    pub fn alt_min_depth(&self, rule: usize, alt: usize) -> Option<usize> {
        alt_depth(&self.rules[rule].alternatives[alt], &self.min_depth)
    }

    /// Original grammar text.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn set_enabled(&mut self, rule: &str, alt: usize, enabled: bool) -> Result<(), GrammarError> {
        let i = self.rule_index(rule).ok_or_else(|| GrammarError::UnknownNonterminal(rule.to_string()))?;
        let a = self.rules[i]
            .alternatives
            .get_mut(alt)
            .ok_or_else(|| GrammarError::NoSuchAlternative { rule: rule.to_string(), alt })?;
        let before = a.enabled;
        a.enabled = enabled;
        if let Err(e) = self.refresh_depths() {
            self.rules[i].alternatives[alt].enabled = before;
            self.refresh_depths().expect("previous state was consistent");
            return Err(e);
        }
        Ok(())
    }

    /// Disables every alternative that mentions `op`; returns how many.
    pub fn disable_operator(&mut self, op: OpId) -> Result<usize, GrammarError> {
        let mut hits = Vec::new();
        for (i, rule) in self.rules.iter().enumerate() {
            for (j, alt) in rule.alternatives.iter().enumerate() {
                if alt.enabled && alt.symbols.contains(&Symbol::Op(op)) {
                    hits.push((i, j));
                }
            }
        }
        for &(i, j) in &hits {
            self.rules[i].alternatives[j].enabled = false;
        }
        if let Err(e) = self.refresh_depths() {
            for &(i, j) in &hits {
                self.rules[i].alternatives[j].enabled = true;
            }
            self.refresh_depths().expect("previous state was consistent");
            return Err(e);
        }
        Ok(hits.len())
    }

    /// Index of the start rule's `'VC'`-only alternative, if it has one.
    pub fn single_vc_alt(&self) -> Option<usize> {
        self.rules[0]
            .alternatives
            .iter()
            .position(|a| a.enabled && a.symbols == [Symbol::Vc])
    }

    /// A basis consisting of a single variable combo.
    pub fn vc_basis(&self, vc: Vc) -> Option<BasisTree> {
        self.single_vc_alt().map(|alt| BasisTree::single_vc(self.start_name(), alt, vc))
    }
}

fn alt_depth(alt: &Alternative, depth: &[Option<usize>]) -> Option<usize> {
    let mut deepest = 0;
    for s in &alt.symbols {
        if let Symbol::Nonterminal(r) = s {
            deepest = deepest.max(depth[*r]?);
        }
    }
    Some(1 + deepest)
}

/// Parses grammar text.
pub fn parse_grammar(text: &str) -> Result<Grammar, GrammarError> {
    Grammar::parse(text)
}

/// All nodes expanding `symbol`, in preorder.
pub fn crossover_sites(tree: &BasisTree, symbol: &str) -> Vec<NodePath> {
    tree.paths_where(|n| n.symbol() == Some(symbol))
}
