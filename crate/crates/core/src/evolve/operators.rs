use std::collections::BTreeSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::Cauchy;

use crate::expr::{BasisTree, Model, Node, Vc, Weight};
use crate::grammar::{crossover_sites, Grammar, TreeLimits};

/// The nine variation operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operator {
    BasisSetCrossover,
    BasisDelete,
    BasisAdd,
    BasisCopyIn,
    SubtreeCrossover,
    SubtreeMutate,
    WeightCauchyMutate,
    VcOnepointCrossover,
    VcExponentMutate,
}

impl Operator {
    pub const ALL: [Operator; 9] = [
        Operator::BasisSetCrossover,
        Operator::BasisDelete,
        Operator::BasisAdd,
        Operator::BasisCopyIn,
        Operator::SubtreeCrossover,
        Operator::SubtreeMutate,
        Operator::WeightCauchyMutate,
        Operator::VcOnepointCrossover,
        Operator::VcExponentMutate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Operator::BasisSetCrossover => "basis_set_crossover",
            Operator::BasisDelete => "basis_delete",
            Operator::BasisAdd => "basis_add",
            Operator::BasisCopyIn => "basis_copy_in",
            Operator::SubtreeCrossover => "subtree_crossover",
            Operator::SubtreeMutate => "subtree_mutate",
            Operator::WeightCauchyMutate => "weight_cauchy_mutate",
            Operator::VcOnepointCrossover => "vc_onepoint_crossover",
            Operator::VcExponentMutate => "vc_exponent_mutate",
        }
    }

    pub fn from_name(name: &str) -> Option<Operator> {
        Operator::ALL.into_iter().find(|op| op.name() == name)
    }
}

/// Selection weight per operator.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorTable {
    weights: [f64; 9],
}

impl Default for OperatorTable {
    /// Equal weights, except weight mutation is five times as likely.
    fn default() -> Self {
        let mut weights = [1.0; 9];
        weights[Operator::WeightCauchyMutate as usize] = 5.0;
        Self { weights }
    }
}

impl OperatorTable {
    pub fn weight(&self, op: Operator) -> f64 {
        self.weights[op as usize]
    }

    /// Sets a weight; it must be positive and finite.
    pub fn set_weight(&mut self, op: Operator, w: f64) -> Result<(), String> {
        if !(w > 0.0 && w.is_finite()) {
            return Err(format!("weight for {} must be positive, got {w}", op.name()));
        }
        self.weights[op as usize] = w;
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = (Operator, f64)> + '_ {
        Operator::ALL.into_iter().map(|op| (op, self.weight(op)))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Operator {
        let dist = WeightedIndex::new(self.weights).expect("operator weights are positive");
        Operator::ALL[dist.sample(rng)]
    }
}

/// Adds `scale` times a standard Cauchy draw, clamped to `[-2B, 2B]`.
pub fn weight_cauchy_mutate<R: Rng + ?Sized>(w: Weight, scale: f64, bound: f64, rng: &mut R) -> Weight {
    let c: f64 = Cauchy::new(0.0, 1.0).expect("unit scale").sample(rng);
    let lim = 2.0 * bound;
    Weight::new((w.stored + scale * c).clamp(-lim, lim))
}

/// Swaps suffixes of `a` and `b` starting at index `k`. No repair.
pub fn vc_crossover_at(a: &Vc, b: &Vc, k: usize) -> (Vc, Vc) {
    assert_eq!(a.len(), b.len(), "combos must have equal length");
    let mut c1 = a.exponents[..k].to_vec();
    c1.extend_from_slice(&b.exponents[k..]);
    let mut c2 = b.exponents[..k].to_vec();
    c2.extend_from_slice(&a.exponents[k..]);
    (Vc::new(c1), Vc::new(c2))
}

/// One-point crossover with the cut uniform in `1..d`; all-zero children are repaired.
pub fn vc_onepoint_crossover<R: Rng + ?Sized>(a: &Vc, b: &Vc, rng: &mut R) -> (Vc, Vc) {
    if a.len() < 2 {
        return (a.clone(), b.clone());
    }
    let k = rng.random_range(1..a.len());
    let (mut c1, mut c2) = vc_crossover_at(a, b, k);
    c1.repair(rng);
    c2.repair(rng);
    (c1, c2)
}

/// Adds or subtracts one on a random exponent, clamps to `±exp_cap`, repairs.
pub fn vc_exponent_mutate<R: Rng + ?Sized>(vc: &Vc, exp_cap: i32, rng: &mut R) -> Vc {
    let mut out = vc.clone();
    if out.is_empty() {
        return out;
    }
    let dim = rng.random_range(0..out.len());
    let step = if rng.random_bool(0.5) { 1 } else { -1 };
    out.exponents[dim] = (out.exponents[dim] + step).clamp(-exp_cap, exp_cap);
    out.repair(rng);
    out
}

fn nonempty_subset<R: Rng + ?Sized>(bases: &[BasisTree], rng: &mut R) -> Vec<BasisTree> {
    // uniform over the 2^n - 1 nonempty subsets by rejection
    loop {
        let picked: Vec<BasisTree> = bases.iter().filter(|_| rng.random_bool(0.5)).cloned().collect();
        if !picked.is_empty() {
            return picked;
        }
    }
}

/// Child made of a nonempty random subset of each parent's bases.
///
/// `None` when either parent has no bases.
pub fn basis_set_crossover<R: Rng + ?Sized>(p1: &Model, p2: &Model, max_bases: usize, rng: &mut R) -> Option<Model> {
    if p1.bases.is_empty() || p2.bases.is_empty() {
        return None;
    }
    let mut bases = nonempty_subset(&p1.bases, rng);
    bases.extend(nonempty_subset(&p2.bases, rng));
    if bases.len() > max_bases {
        let mut keep = sample(rng, bases.len(), max_bases).into_vec();
        keep.sort_unstable();
        bases = keep.into_iter().map(|i| bases[i].clone()).collect();
    }
    Some(Model::unfitted(bases))
}

/// Appends a freshly grown basis. `None` when the model is full.
pub fn basis_add<R: Rng + ?Sized>(
    m: &Model,
    g: &Grammar,
    limits: &TreeLimits,
    max_bases: usize,
    rng: &mut R,
) -> Option<Model> {
    if m.n_bases() >= max_bases {
        return None;
    }
    let mut bases = m.bases.clone();
    bases.push(crate::grammar::random_tree(g, limits, rng));
    Some(Model::unfitted(bases))
}

/// Removes a random basis. `None` when there is nothing to remove.
pub fn basis_delete<R: Rng + ?Sized>(m: &Model, rng: &mut R) -> Option<Model> {
    if m.bases.is_empty() {
        return None;
    }
    let mut bases = m.bases.clone();
    bases.remove(rng.random_range(0..bases.len()));
    Some(Model::unfitted(bases))
}

/// Copies a random start-symbol subtree of the donor in as a new basis.
pub fn basis_copy_in<R: Rng + ?Sized>(
    m: &Model,
    donor: &Model,
    g: &Grammar,
    max_bases: usize,
    rng: &mut R,
) -> Option<Model> {
    if donor.bases.is_empty() || m.n_bases() >= max_bases {
        return None;
    }
    let tree = &donor.bases[rng.random_range(0..donor.bases.len())];
    let sites = crossover_sites(tree, g.start_name());
    let site = &sites[rng.random_range(0..sites.len())];
    let node = tree.get(site).expect("site exists").clone();
    let mut bases = m.bases.clone();
    bases.push(BasisTree::new(node));
    Some(Model::unfitted(bases))
}

fn nonterminal_symbols(t: &BasisTree) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    t.for_each(|_, n| {
        if let Some(s) = n.symbol() {
            out.insert(s.to_string());
        }
    });
    out
}

/// Swaps same-symbol subtrees between two trees.
///
/// Children deeper than `max_depth` cause a retry; after ten failed tries, or
/// when no symbol is shared, the parents come back unchanged.
pub fn subtree_crossover<R: Rng + ?Sized>(
    t1: &BasisTree,
    t2: &BasisTree,
    max_depth: usize,
    rng: &mut R,
) -> (BasisTree, BasisTree) {
    let shared: Vec<String> = nonterminal_symbols(t1).intersection(&nonterminal_symbols(t2)).cloned().collect();
    if shared.is_empty() {
        return (t1.clone(), t2.clone());
    }
    for _ in 0..10 {
        let sym = &shared[rng.random_range(0..shared.len())];
        let s1 = crossover_sites(t1, sym);
        let s2 = crossover_sites(t2, sym);
        let p1 = &s1[rng.random_range(0..s1.len())];
        let p2 = &s2[rng.random_range(0..s2.len())];
        let n1 = t1.get(p1).expect("site exists").clone();
        let n2 = t2.get(p2).expect("site exists").clone();
        let mut c1 = t1.clone();
        let mut c2 = t2.clone();
        c1.replace(p1, n2);
        c2.replace(p2, n1);
        if c1.depth() <= max_depth && c2.depth() <= max_depth {
            return (c1, c2);
        }
    }
    (t1.clone(), t2.clone())
}

/// Regrows the subtree at a uniformly chosen nonterminal within the remaining depth.
pub fn subtree_mutate<R: Rng + ?Sized>(t: &BasisTree, g: &Grammar, limits: &TreeLimits, rng: &mut R) -> BasisTree {
    let sites = t.paths_where(|n| n.symbol().is_some());
    let site = &sites[rng.random_range(0..sites.len())];
    let sym = t.get(site).and_then(Node::symbol).expect("nonterminal site");
    let rule = g.rule_index(sym).expect("tree symbols come from the grammar");
    let remaining = limits.max_depth.saturating_sub(site.len()).max(1);
    let mut out = t.clone();
    out.replace(site, g.grow(rule, remaining, limits, rng));
    out
}

/// Everything an operator needs besides its parents.
#[derive(Clone, Copy, Debug)]
pub struct Variation<'a> {
    pub grammar: &'a Grammar,
    pub limits: TreeLimits,
    pub max_bases: usize,
    /// Scale of the Cauchy weight step, in stored units.
    pub cauchy_scale: f64,
}

impl Variation<'_> {
    /// Applies `op` to `parent` (with `donor` as second parent where needed).
    ///
    /// `None` means a precondition failed and another operator should be drawn.
    pub fn apply<R: Rng + ?Sized>(&self, op: Operator, parent: &Model, donor: &Model, rng: &mut R) -> Option<Model> {
        let limits = &self.limits;
        match op {
            Operator::BasisSetCrossover => basis_set_crossover(parent, donor, self.max_bases, rng),
            Operator::BasisDelete => basis_delete(parent, rng),
            Operator::BasisAdd => basis_add(parent, self.grammar, limits, self.max_bases, rng),
            Operator::BasisCopyIn => basis_copy_in(parent, donor, self.grammar, self.max_bases, rng),
            Operator::SubtreeCrossover => {
                if parent.bases.is_empty() || donor.bases.is_empty() {
                    return None;
                }
                let i = rng.random_range(0..parent.bases.len());
                let j = rng.random_range(0..donor.bases.len());
                let (c, _) = subtree_crossover(&parent.bases[i], &donor.bases[j], limits.max_depth, rng);
                Some(with_basis(parent, i, c))
            }
            Operator::SubtreeMutate => {
                if parent.bases.is_empty() {
                    return None;
                }
                let i = rng.random_range(0..parent.bases.len());
                let c = subtree_mutate(&parent.bases[i], self.grammar, limits, rng);
                Some(with_basis(parent, i, c))
            }
            Operator::WeightCauchyMutate => {
                let (i, path) = pick_leaf(parent, |n| matches!(n, Node::Weight(_)), rng)?;
                let mut tree = parent.bases[i].clone();
                if let Some(Node::Weight(w)) = tree.get_mut(&path) {
                    *w = weight_cauchy_mutate(*w, self.cauchy_scale, limits.weight_bound, rng);
                }
                Some(with_basis(parent, i, tree))
            }
            Operator::VcOnepointCrossover => {
                let (i, path) = pick_leaf(parent, |n| matches!(n, Node::Vc(_)), rng)?;
                let (j, dpath) = pick_leaf(donor, |n| matches!(n, Node::Vc(_)), rng)?;
                let other = match donor.bases[j].get(&dpath) {
                    Some(Node::Vc(v)) => v.clone(),
                    _ => return None,
                };
                let mut tree = parent.bases[i].clone();
                if let Some(Node::Vc(v)) = tree.get_mut(&path) {
                    let (c, _) = vc_onepoint_crossover(v, &other, rng);
                    *v = c;
                }
                Some(with_basis(parent, i, tree))
            }
            Operator::VcExponentMutate => {
                let (i, path) = pick_leaf(parent, |n| matches!(n, Node::Vc(_)), rng)?;
                let mut tree = parent.bases[i].clone();
                if let Some(Node::Vc(v)) = tree.get_mut(&path) {
                    *v = vc_exponent_mutate(v, limits.exp_cap, rng);
                }
                Some(with_basis(parent, i, tree))
            }
        }
    }

    /// Draws operators until one applies; falls back to a copy of `parent`
    /// after many failed draws.
    pub fn vary<R: Rng + ?Sized>(&self, table: &OperatorTable, parent: &Model, donor: &Model, rng: &mut R) -> Model {
        for _ in 0..64 {
            let op = table.sample(rng);
            if let Some(child) = self.apply(op, parent, donor, rng) {
                return child;
            }
        }
        Model::unfitted(parent.bases.clone())
    }
}

fn with_basis(m: &Model, i: usize, tree: BasisTree) -> Model {
    let mut bases = m.bases.clone();
    bases[i] = tree;
    Model::unfitted(bases)
}

/// Uniform choice over all matching leaves of all bases.
fn pick_leaf<R: Rng + ?Sized>(
    m: &Model,
    pred: impl Fn(&Node) -> bool + Copy,
    rng: &mut R,
) -> Option<(usize, Vec<usize>)> {
    let all: Vec<(usize, Vec<usize>)> = m
        .bases
        .iter()
        .enumerate()
        .flat_map(|(i, b)| b.paths_where(pred).into_iter().map(move |p| (i, p)))
        .collect();
    if all.is_empty() {
        return None;
    }
    Some(all[rng.random_range(0..all.len())].clone())
}
