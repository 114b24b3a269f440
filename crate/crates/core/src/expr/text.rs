use super::model::Model;
use super::tree::{BasisTree, Node};
use super::vc::Vc;

/// Rendering settings for [`to_canonical_text`].
#[derive(Clone, Debug)]
pub struct TextOptions {
    pub var_names: Vec<String>,
    pub sig_figs: usize,
    pub weight_bound: f64,
    /// Wrap the whole expression as `10^(...)`.
    pub log_scaled: bool,
}

/// Formats `v` to `sig` significant figures: plain notation for magnitudes in
/// `[1e-2, 1e5)`, otherwise `m.mme±x`.
pub fn format_sig(v: f64, sig: usize) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-2..5).contains(&exp) {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        let mut s = format!("{v:.decimals$}");
        if s.contains('.') {
            s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        }
        if s == "-0" {
            s = "0".to_string();
        }
        s
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{}", exp.abs())
    }
}

fn var_name(names: &[String], dim: usize) -> String {
    names.get(dim).cloned().unwrap_or_else(|| format!("x{}", dim + 1))
}

fn factor(names: &[String], dim: usize, e: i32) -> String {
    let name = var_name(names, dim);
    if e == 1 {
        name
    } else {
        format!("{name}^{e}")
    }
}

/// Numerator and denominator factor lists of a combo.
fn vc_parts(vc: &Vc, names: &[String]) -> (Vec<String>, Vec<String>) {
    let mut num = Vec::new();
    let mut den = Vec::new();
    for (dim, &e) in vc.exponents.iter().enumerate() {
        if e > 0 {
            num.push(factor(names, dim, e));
        } else if e < 0 {
            den.push(factor(names, dim, -e));
        }
    }
    (num, den)
}

fn join_den(den: &[String]) -> String {
    if den.len() == 1 {
        den[0].clone()
    } else {
        format!("({})", den.join(" * "))
    }
}

fn vc_text(vc: &Vc, names: &[String]) -> String {
    let (num, den) = vc_parts(vc, names);
    let num = if num.is_empty() { "1".to_string() } else { num.join(" * ") };
    if den.is_empty() {
        num
    } else {
        format!("{num} / {}", join_den(&den))
    }
}

fn render_node(node: &Node, opts: &TextOptions, out: &mut String) {
    match node {
        Node::Nonterminal { children, .. } => {
            for child in children {
                render_node(child, opts, out);
            }
        }
        Node::Vc(vc) => out.push_str(&vc_text(vc, &opts.var_names)),
        Node::Weight(w) => {
            let v = if w.in_bounds(opts.weight_bound) { w.value(opts.weight_bound) } else { f64::NAN };
            out.push_str(&format_sig(v, opts.sig_figs));
        }
        Node::Op { op } => out.push_str(op.name()),
        Node::Token { token } => match token.as_str() {
            "(" | ")" => out.push_str(token.as_str()),
            "," => out.push_str(", "),
            other => {
                out.push(' ');
                out.push_str(other);
                out.push(' ');
            }
        },
    }
}

/// Infix text of one basis function.
pub fn render_basis(tree: &BasisTree, opts: &TextOptions) -> String {
    let mut s = String::new();
    render_node(&tree.root, opts, &mut s);
    s.replace("+ -", "- ")
}

fn bare_vc(tree: &BasisTree) -> Option<&Vc> {
    match tree.root.children() {
        [Node::Vc(vc)] => Some(vc),
        _ => None,
    }
}

/// Deterministic infix rendering: offset first, then one signed term per basis
/// in stored order.
pub fn to_canonical_text(m: &Model, opts: &TextOptions) -> String {
    let mut s = format_sig(m.offset(), opts.sig_figs);
    for (basis, &c) in m.bases.iter().zip(m.coeffs.iter().skip(1)) {
        let sign = if c < 0.0 { " - " } else { " + " };
        let coeff = format_sig(c.abs(), opts.sig_figs);
        s.push_str(sign);
        match bare_vc(basis) {
            Some(vc) => {
                let (num, den) = vc_parts(vc, &opts.var_names);
                s.push_str(&coeff);
                if !num.is_empty() {
                    s.push_str(" * ");
                    s.push_str(&num.join(" * "));
                }
                if !den.is_empty() {
                    s.push_str(" / ");
                    s.push_str(&join_den(&den));
                }
            }
            None => {
                s.push_str(&coeff);
                s.push_str(" * ");
                s.push_str(&render_basis(basis, opts));
            }
        }
    }
    if opts.log_scaled {
        format!("10^({s})")
    } else {
        s
    }
}
