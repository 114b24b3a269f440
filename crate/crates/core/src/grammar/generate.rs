use rand::Rng;

use super::{Grammar, Symbol, TreeLimits};
use crate::expr::{BasisTree, Node, Vc, Weight};

impl Grammar {
    /// Grows a derivation of `rule` using at most `remaining` nonterminal levels.
    ///
    /// Alternatives are chosen uniformly among the enabled ones that can still
    /// terminate within the remaining depth.
    pub fn grow<R: Rng + ?Sized>(&self, rule: usize, remaining: usize, limits: &TreeLimits, rng: &mut R) -> Node {
        let alts = &self.rules[rule].alternatives;
        let feasible: Vec<usize> = (0..alts.len())
            .filter(|&j| alts[j].enabled && self.alt_min_depth(rule, j).is_some_and(|d| d <= remaining))
            .collect();
        let alt = if feasible.is_empty() {
            // remaining depth is below the rule's minimum; take the shallowest
            (0..alts.len())
                .filter(|&j| alts[j].enabled)
                .min_by_key(|&j| self.alt_min_depth(rule, j).unwrap_or(usize::MAX))
                .expect("every rule has an enabled alternative")
        } else {
            feasible[rng.random_range(0..feasible.len())]
        };
        let children = alts[alt]
            .symbols
            .iter()
            .map(|sym| match *sym {
                Symbol::Nonterminal(r) => self.grow(r, remaining.saturating_sub(1), limits, rng),
                Symbol::Vc => Node::Vc(Vc::random(limits.n_vars, limits.exp_cap, rng)),
                Symbol::Weight => {
                    let b = limits.weight_bound;
                    Node::Weight(Weight::new(rng.random_range(-2.0 * b..=2.0 * b)))
                }
                Symbol::Op(op) => Node::Op { op },
                Symbol::Punct(token) => Node::Token { token },
            })
            .collect();
        Node::Nonterminal { symbol: self.rules[rule].name.clone(), alt, children }
    }
}

/// Random basis tree derived from the start symbol, depth ≤ `limits.max_depth`.
pub fn random_tree<R: Rng + ?Sized>(g: &Grammar, limits: &TreeLimits, rng: &mut R) -> BasisTree {
    BasisTree::new(g.grow(g.start(), limits.max_depth, limits, rng))
}
