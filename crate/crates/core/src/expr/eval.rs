//! Column-wise interpretation of derivation trees.
//!
//! Each nonterminal's children are read as a small infix expression:
//! `list := sum (',' sum)*`, `sum := prod ('+' prod)*`,
//! `prod := atom ('*' atom)*`, and an operator followed by `'(' list ')'` is a
//! call. A child nonterminal may yield several values (e.g. `2ARGS`), which
//! only make sense as call arguments.

use super::ops::OpId;
use super::tree::{BasisTree, Node, Punct};
use super::vc::Vc;

#[derive(Clone, Debug)]
enum Col {
    Const(f64),
    Vals(Vec<f64>),
}

impl Col {
    fn zip(self, other: Col, f: impl Fn(f64, f64) -> f64) -> Col {
        match (self, other) {
            (Col::Const(a), Col::Const(b)) => Col::Const(f(a, b)),
            (Col::Const(a), Col::Vals(mut v)) => {
                v.iter_mut().for_each(|b| *b = f(a, *b));
                Col::Vals(v)
            }
            (Col::Vals(mut v), Col::Const(b)) => {
                v.iter_mut().for_each(|a| *a = f(*a, b));
                Col::Vals(v)
            }
            (Col::Vals(mut a), Col::Vals(b)) => {
                a.iter_mut().zip(b).for_each(|(x, y)| *x = f(*x, y));
                Col::Vals(a)
            }
        }
    }

    fn get(&self, t: usize) -> f64 {
        match self {
            Col::Const(c) => *c,
            Col::Vals(v) => v[t],
        }
    }

    fn into_vec(self, n: usize) -> Vec<f64> {
        match self {
            Col::Const(c) => vec![c; n],
            Col::Vals(v) => v,
        }
    }
}

struct Ctx<'a> {
    columns: &'a [Vec<f64>],
    n: usize,
    bound: f64,
}

impl Ctx<'_> {
    fn vc(&self, vc: &Vc) -> Col {
        let mut out: Option<Vec<f64>> = None;
        for (dim, &e) in vc.exponents.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let Some(col) = self.columns.get(dim) else {
                return Col::Const(f64::NAN);
            };
            match out.as_mut() {
                None => out = Some(col.iter().map(|x| x.powi(e)).collect()),
                Some(acc) => acc.iter_mut().zip(col).for_each(|(a, x)| *a *= x.powi(e)),
            }
        }
        out.map_or(Col::Const(1.0), Col::Vals)
    }

    fn call(&self, op: OpId, args: Vec<Col>) -> Option<Col> {
        if args.len() != op.arity() {
            return None;
        }
        if args.iter().all(|a| matches!(a, Col::Const(_))) {
            let vals: Vec<f64> = args.iter().map(|a| a.get(0)).collect();
            return Some(Col::Const(op.apply(&vals)));
        }
        let mut buf = vec![0.0; args.len()];
        let out = (0..self.n)
            .map(|t| {
                for (slot, a) in buf.iter_mut().zip(&args) {
                    *slot = a.get(t);
                }
                op.apply(&buf)
            })
            .collect();
        Some(Col::Vals(out))
    }
}

enum Value {
    List(Vec<Col>),
    Op(OpId),
}

fn eval_node(children: &[Node], ctx: &Ctx) -> Option<Value> {
    if let [Node::Op { op }] = children {
        return Some(Value::Op(*op));
    }
    let mut seq = Seq { items: children, pos: 0, ctx };
    let out = seq.list()?;
    (seq.pos == children.len()).then_some(Value::List(out))
}

struct Seq<'t, 'c> {
    items: &'t [Node],
    pos: usize,
    ctx: &'c Ctx<'c>,
}

impl Seq<'_, '_> {
    fn eat(&mut self, p: Punct) -> bool {
        match self.items.get(self.pos) {
            Some(Node::Token { token }) if *token == p => {
                self.pos += 1;
                true
            }
            _ => false,
        }
    }

    fn peek_is(&self, p: Punct) -> bool {
        matches!(self.items.get(self.pos), Some(Node::Token { token }) if *token == p)
    }

    fn list(&mut self) -> Option<Vec<Col>> {
        let mut out = self.sum()?;
        while self.eat(Punct::Comma) {
            out.extend(self.sum()?);
        }
        Some(out)
    }

    fn sum(&mut self) -> Option<Vec<Col>> {
        self.chain(Punct::Plus, |a, b| a + b, Self::prod)
    }

    fn prod(&mut self) -> Option<Vec<Col>> {
        self.chain(Punct::Star, |a, b| a * b, Self::atom)
    }

    fn chain(
        &mut self,
        sep: Punct,
        f: fn(f64, f64) -> f64,
        next: fn(&mut Self) -> Option<Vec<Col>>,
    ) -> Option<Vec<Col>> {
        let first = next(self)?;
        if !self.peek_is(sep) {
            return Some(first);
        }
        let mut acc = single(first)?;
        while self.eat(sep) {
            acc = acc.zip(single(next(self)?)?, f);
        }
        Some(vec![acc])
    }

    fn atom(&mut self) -> Option<Vec<Col>> {
        let node = self.items.get(self.pos)?;
        self.pos += 1;
        match node {
            Node::Token { token: Punct::LParen } => {
                let inner = self.list()?;
                self.eat(Punct::RParen).then_some(inner)
            }
            Node::Token { .. } => None,
            Node::Vc(vc) => Some(vec![self.ctx.vc(vc)]),
            Node::Weight(w) => {
                if !w.in_bounds(self.ctx.bound) {
                    return None;
                }
                Some(vec![Col::Const(w.value(self.ctx.bound))])
            }
            Node::Op { op } => self.call(*op),
            Node::Nonterminal { children, .. } => match eval_node(children, self.ctx)? {
                Value::List(v) => Some(v),
                Value::Op(op) => self.call(op),
            },
        }
    }

    fn call(&mut self, op: OpId) -> Option<Vec<Col>> {
        if !self.eat(Punct::LParen) {
            return None;
        }
        let args = self.list()?;
        if !self.eat(Punct::RParen) {
            return None;
        }
        Some(vec![self.ctx.call(op, args)?])
    }
}

fn single(mut v: Vec<Col>) -> Option<Col> {
    (v.len() == 1).then(|| v.pop().unwrap())
}

/// Evaluates a basis over `n` samples given per-variable columns.
///
/// Samples where evaluation is undefined come back as non-finite values; a
/// structurally malformed tree yields all-NaN.
pub fn eval_basis_columns(tree: &BasisTree, columns: &[Vec<f64>], n: usize, bound: f64) -> Vec<f64> {
    let ctx = Ctx { columns, n, bound };
    let result = match &tree.root {
        Node::Nonterminal { children, .. } => match eval_node(children, &ctx) {
            Some(Value::List(v)) => single(v),
            _ => None,
        },
        _ => None,
    };
    match result {
        Some(col) => {
            let mut v = col.into_vec(n);
            v.iter_mut().filter(|x| !x.is_finite()).for_each(|x| *x = f64::NAN);
            v
        }
        None => vec![f64::NAN; n],
    }
}

/// Evaluates a basis at a single design point.
pub fn eval_basis(tree: &BasisTree, x: &[f64], bound: f64) -> f64 {
    let columns: Vec<Vec<f64>> = x.iter().map(|&v| vec![v]).collect();
    eval_basis_columns(tree, &columns, 1, bound)[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Weight;

    fn nt(symbol: &str, alt: usize, children: Vec<Node>) -> Node {
        Node::Nonterminal { symbol: symbol.into(), alt, children }
    }
    fn tok(p: Punct) -> Node {
        Node::Token { token: p }
    }
    fn w(stored: f64) -> Node {
        Node::Weight(Weight::new(stored))
    }
    fn vc(e: Vec<i32>) -> Node {
        nt("REPVC", 0, vec![Node::Vc(Vc::new(e))])
    }

    /// REPVC -> REPOP -> op '(' W '+' REPADD ')' with REPADD -> W '*' REPVC
    fn unary(op: OpId, w0: f64, w1: f64, e: Vec<i32>) -> BasisTree {
        let repadd = nt("REPADD", 0, vec![w(w1), tok(Punct::Star), vc(e)]);
        let repop = nt(
            "REPOP",
            1,
            vec![
                nt("1OP", 0, vec![Node::Op { op }]),
                tok(Punct::LParen),
                w(w0),
                tok(Punct::Plus),
                repadd,
                tok(Punct::RParen),
            ],
        );
        BasisTree::new(nt("REPVC", 2, vec![repop]))
    }

    #[test]
    fn single_vc() {
        let t = BasisTree::single_vc("REPVC", 0, Vc::new(vec![1, 0, -2, 1]));
        assert_eq!(eval_basis(&t, &[2.0, 5.0, 2.0, 3.0], 10.0), 1.5);
    }

    #[test]
    fn relu_and_sqrt() {
        // stored 0 -> 0, stored 10 -> 1 with B = 10
        let t = unary(OpId::Relu, 0.0, 10.0, vec![1]);
        assert_eq!(eval_basis(&t, &[-3.0], 10.0), 0.0);
        assert_eq!(eval_basis(&t, &[3.0], 10.0), 3.0);
        let s = unary(OpId::Sqrt, 0.0, 10.0, vec![1]);
        assert!(eval_basis(&s, &[-1.0], 10.0).is_nan());
        assert_eq!(eval_basis(&s, &[4.0], 10.0), 2.0);
    }

    #[test]
    fn two_arg_pow_with_constant_exponent() {
        // 2OP '(' 2ARGS ')', 2ARGS -> 'W' '+' REPADD ',' MAYBEW, MAYBEW -> 'W'
        let repadd = nt("REPADD", 0, vec![w(10.0), tok(Punct::Star), vc(vec![1])]);
        let args = nt(
            "2ARGS",
            0,
            vec![w(0.0), tok(Punct::Plus), repadd, tok(Punct::Comma), nt("MAYBEW", 0, vec![w(10.0 + 2f64.log10())])],
        );
        let repop = nt(
            "REPOP",
            2,
            vec![
                nt("2OP", 1, vec![Node::Op { op: OpId::Pow }]),
                tok(Punct::LParen),
                args,
                tok(Punct::RParen),
            ],
        );
        let t = BasisTree::new(nt("REPVC", 2, vec![repop]));
        assert!((eval_basis(&t, &[3.0], 10.0) - 9.0).abs() < 1e-9);
    }

    #[test]
    fn product_chain_and_sum_chain() {
        // REPVC -> REPVC '*' REPOP, the inner REPADD a sum of two weighted terms
        let t1 = nt("REPADD", 0, vec![w(10.0), tok(Punct::Star), vc(vec![1, 0])]);
        let t2 = nt("REPADD", 0, vec![w(10.0), tok(Punct::Star), vc(vec![0, 1])]);
        let sum = nt("REPADD", 1, vec![t1, tok(Punct::Plus), t2]);
        let repop = nt(
            "REPOP",
            1,
            vec![
                nt("1OP", 0, vec![Node::Op { op: OpId::Sq }]),
                tok(Punct::LParen),
                w(0.0),
                tok(Punct::Plus),
                sum,
                tok(Punct::RParen),
            ],
        );
        let t = BasisTree::new(nt("REPVC", 1, vec![vc(vec![1, 0]), tok(Punct::Star), repop]));
        // x1 * (x1 + x2)^2
        assert_eq!(eval_basis(&t, &[2.0, 3.0], 10.0), 50.0);
        let cols = vec![vec![2.0, 1.0], vec![3.0, 1.0]];
        assert_eq!(eval_basis_columns(&t, &cols, 2, 10.0), vec![50.0, 4.0]);
    }

    #[test]
    fn malformed_is_nan_not_panic() {
        let t = BasisTree::new(nt("REPVC", 0, vec![tok(Punct::Star)]));
        assert!(eval_basis(&t, &[1.0], 10.0).is_nan());
        let bad_weight = BasisTree::new(nt("REPVC", 0, vec![w(99.0)]));
        assert!(eval_basis(&bad_weight, &[1.0], 10.0).is_nan());
    }
}
