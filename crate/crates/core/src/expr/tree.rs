use serde::{Deserialize, Serialize};

use super::ops::OpId;
use super::vc::Vc;
use super::weight::Weight;

/// Punctuation terminals of the grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Punct {
    #[serde(rename = "*")]
    Star,
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "(")]
    LParen,
    #[serde(rename = ")")]
    RParen,
    #[serde(rename = ",")]
    Comma,
}

impl Punct {
    pub fn from_terminal(text: &str) -> Option<Punct> {
        Some(match text {
            "*" => Punct::Star,
            "+" => Punct::Plus,
            "(" => Punct::LParen,
            ")" => Punct::RParen,
            "," => Punct::Comma,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Punct::Star => "*",
            Punct::Plus => "+",
            Punct::LParen => "(",
            Punct::RParen => ")",
            Punct::Comma => ",",
        }
    }
}

/// One node of a derivation tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    /// A nonterminal expanded with alternative `alt`; `children` mirror the
    /// alternative's symbols one to one, punctuation included.
    Nonterminal {
        symbol: String,
        alt: usize,
        children: Vec<Node>,
    },
    Vc(Vc),
    Weight(Weight),
    Op { op: OpId },
    Token { token: Punct },
}

impl Node {
    pub fn symbol(&self) -> Option<&str> {
        match self {
            Node::Nonterminal { symbol, .. } => Some(symbol),
            _ => None,
        }
    }

    pub fn children(&self) -> &[Node] {
        match self {
            Node::Nonterminal { children, .. } => children,
            _ => &[],
        }
    }

    /// Number of nonterminal levels below and including this node.
    pub fn depth(&self) -> usize {
        match self {
            Node::Nonterminal { children, .. } => {
                1 + children.iter().map(Node::depth).max().unwrap_or(0)
            }
            _ => 0,
        }
    }

    /// Expression-level node count: combos, weights and operators.
    pub fn nnodes(&self) -> usize {
        match self {
            Node::Nonterminal { children, .. } => children.iter().map(Node::nnodes).sum(),
            Node::Vc(_) | Node::Weight(_) | Node::Op { .. } => 1,
            Node::Token { .. } => 0,
        }
    }

    fn visit<'a>(&'a self, path: &mut NodePath, f: &mut impl FnMut(&NodePath, &'a Node)) {
        f(path, self);
        if let Node::Nonterminal { children, .. } = self {
            for (i, child) in children.iter().enumerate() {
                path.push(i);
                child.visit(path, f);
                path.pop();
            }
        }
    }
}

/// Child indices from the root to a node.
pub type NodePath = Vec<usize>;

/// The derivation tree of one basis function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BasisTree {
    pub root: Node,
}

impl BasisTree {
    pub fn new(root: Node) -> Self {
        Self { root }
    }

    /// A tree deriving a single variable combo from `start`.
    pub fn single_vc(start: &str, alt: usize, vc: Vc) -> Self {
        Self::new(Node::Nonterminal {
            symbol: start.to_string(),
            alt,
            children: vec![Node::Vc(vc)],
        })
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn nnodes(&self) -> usize {
        self.root.nnodes()
    }

    /// Preorder visit of every node with its path.
    pub fn for_each<'a>(&'a self, mut f: impl FnMut(&NodePath, &'a Node)) {
        let mut path = Vec::new();
        self.root.visit(&mut path, &mut f);
    }

    /// Paths of all nodes satisfying `pred`, in preorder.
    pub fn paths_where(&self, pred: impl Fn(&Node) -> bool) -> Vec<NodePath> {
        let mut out = Vec::new();
        self.for_each(|path, node| {
            if pred(node) {
                out.push(path.clone());
            }
        });
        out
    }

    pub fn vcs(&self) -> Vec<&Vc> {
        let mut out = Vec::new();
        self.for_each(|_, node| {
            if let Node::Vc(vc) = node {
                out.push(vc);
            }
        });
        out
    }

    pub fn weights(&self) -> Vec<&Weight> {
        let mut out = Vec::new();
        self.for_each(|_, node| {
            if let Node::Weight(w) = node {
                out.push(w);
            }
        });
        out
    }

    pub fn get(&self, path: &[usize]) -> Option<&Node> {
        let mut node = &self.root;
        for &i in path {
            node = node.children().get(i)?;
        }
        Some(node)
    }

    pub fn get_mut(&mut self, path: &[usize]) -> Option<&mut Node> {
        let mut node = &mut self.root;
        for &i in path {
            node = match node {
                Node::Nonterminal { children, .. } => children.get_mut(i)?,
                _ => return None,
            };
        }
        Some(node)
    }

    /// Replaces the subtree at `path`, returning the old one.
    pub fn replace(&mut self, path: &[usize], with: Node) -> Option<Node> {
        self.get_mut(path).map(|slot| std::mem::replace(slot, with))
    }
}
