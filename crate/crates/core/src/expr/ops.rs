use std::fmt;

use serde::{Deserialize, Serialize};

/// Nonlinear operators available to `1OP`, `2OP`, `3OP` and `4OP` rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpId {
    Sqrt,
    Ln,
    Log10,
    Inv,
    Abs,
    Sq,
    Sin,
    Cos,
    Tan,
    /// `max(0, x)`
    Relu,
    /// `min(0, x)`
    Negrelu,
    Exp2,
    Exp10,
    Add,
    Mul,
    Max,
    Min,
    Pow,
    Div,
    /// `lte(t, c, a, b)`: `a` if `t < c` else `b`
    Lte4,
    /// `lte(t, 0, a, b)`
    Lte0,
}

impl OpId {
    pub const ALL: [OpId; 21] = [
        OpId::Sqrt,
        OpId::Ln,
        OpId::Log10,
        OpId::Inv,
        OpId::Abs,
        OpId::Sq,
        OpId::Sin,
        OpId::Cos,
        OpId::Tan,
        OpId::Relu,
        OpId::Negrelu,
        OpId::Exp2,
        OpId::Exp10,
        OpId::Add,
        OpId::Mul,
        OpId::Max,
        OpId::Min,
        OpId::Pow,
        OpId::Div,
        OpId::Lte4,
        OpId::Lte0,
    ];

    pub fn arity(self) -> usize {
        use OpId::*;
        match self {
            Sqrt | Ln | Log10 | Inv | Abs | Sq | Sin | Cos | Tan | Relu | Negrelu | Exp2
            | Exp10 => 1,
            Add | Mul | Max | Min | Pow | Div => 2,
            Lte0 => 3,
            Lte4 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        use OpId::*;
        match self {
            Sqrt => "sqrt",
            Ln => "ln",
            Log10 => "log10",
            Inv => "inv",
            Abs => "abs",
            Sq => "sq",
            Sin => "sin",
            Cos => "cos",
            Tan => "tan",
            Relu => "relu",
            Negrelu => "negrelu",
            Exp2 => "exp2",
            Exp10 => "exp10",
            Add => "add",
            Mul => "mul",
            Max => "max",
            Min => "min",
            Pow => "pow",
            Div => "div",
            Lte4 => "lte4",
            Lte0 => "lte0",
        }
    }

    /// Resolves a grammar terminal such as `'LOG10'` or `'DIVIDE'`.
    /// Matching is case-insensitive.
    pub fn from_terminal(text: &str) -> Option<OpId> {
        let lower = text.to_ascii_lowercase();
        let alias = match lower.as_str() {
            "divide" => Some(OpId::Div),
            "power" => Some(OpId::Pow),
            "loge" | "log" => Some(OpId::Ln),
            "max0" => Some(OpId::Relu),
            "min0" => Some(OpId::Negrelu),
            "lte" => Some(OpId::Lte4),
            "square" => Some(OpId::Sq),
            _ => None,
        };
        alias.or_else(|| OpId::ALL.into_iter().find(|op| op.name() == lower))
    }

    /// Applies the operator. Any non-finite argument or result is reported as NaN.
    pub fn apply(self, args: &[f64]) -> f64 {
        use OpId::*;
        if args.len() != self.arity() || args.iter().any(|a| !a.is_finite()) {
            return f64::NAN;
        }
        let a = args[0];
        let out = match self {
            Sqrt => a.sqrt(),
            Ln => a.ln(),
            Log10 => a.log10(),
            Inv => 1.0 / a,
            Abs => a.abs(),
            Sq => a * a,
            Sin => a.sin(),
            Cos => a.cos(),
            Tan => a.tan(),
            Relu => a.max(0.0),
            Negrelu => a.min(0.0),
            Exp2 => a.exp2(),
            Exp10 => 10f64.powf(a),
            Add => a + args[1],
            Mul => a * args[1],
            Max => a.max(args[1]),
            Min => a.min(args[1]),
            Pow => a.powf(args[1]),
            Div => a / args[1],
            Lte4 => {
                if a < args[1] {
                    args[2]
                } else {
                    args[3]
                }
            }
            Lte0 => {
                if a < 0.0 {
                    args[1]
                } else {
                    args[2]
                }
            }
        };
        if out.is_finite() {
            out
        } else {
            f64::NAN
        }
    }
}

impl fmt::Display for OpId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terminal_names_round_trip() {
        for op in OpId::ALL {
            assert_eq!(OpId::from_terminal(&op.name().to_uppercase()), Some(op));
        }
        assert_eq!(OpId::from_terminal("DIVIDE"), Some(OpId::Div));
        assert_eq!(OpId::from_terminal("nope"), None);
    }

    #[test]
    fn domain_errors_are_non_finite() {
        assert!(OpId::Sqrt.apply(&[-1.0]).is_nan());
        assert!(OpId::Ln.apply(&[0.0]).is_nan());
        assert!(OpId::Inv.apply(&[0.0]).is_nan());
        assert!(OpId::Pow.apply(&[-2.0, 0.5]).is_nan());
        assert_eq!(OpId::Pow.apply(&[-2.0, 3.0]), -8.0);
        assert!(OpId::Max.apply(&[f64::NAN, 1.0]).is_nan());
    }

    #[test]
    fn conditionals() {
        assert_eq!(OpId::Lte4.apply(&[1.0, 2.0, 10.0, 20.0]), 10.0);
        assert_eq!(OpId::Lte4.apply(&[2.0, 2.0, 10.0, 20.0]), 20.0);
        assert_eq!(OpId::Lte0.apply(&[-1.0, 10.0, 20.0]), 10.0);
        assert_eq!(OpId::Relu.apply(&[-3.0]), 0.0);
        assert_eq!(OpId::Negrelu.apply(&[3.0]), 0.0);
    }
}
