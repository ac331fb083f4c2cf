//! Deformation functions `D_q(n)` and the q-factorial.
//!
//! A scheme is one of the undeformed oscillator (`D(n) = n`), the
//! Biedenharn-Macfarlane function `(q^n - q^-n)/(q - q^-1)`, or a custom
//! expression parsed from text. Every scheme satisfies `D(0) = 0` and
//! `D(1) = 1`; custom expressions are probed for this at construction.

mod expr;

use std::fmt;
use std::sync::Arc;

pub use expr::{parse_deformation, BinOp, EvalError, Expr, Func, ParseError, ParseErrorKind, Var};

use crate::error::{Error, Result};

/// Below this distance from `q = 1` the Biedenharn-Macfarlane ratio is
/// replaced by its limit `n`.
pub const BM_LIMIT_WINDOW: f64 = 1e-8;

/// Allowed deviation of a custom scheme from `D(0) = 0`, `D(1) = 1`.
pub const PROBE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Undeformed,
    BiedenharnMacfarlane,
    Custom,
}

#[derive(Debug, Clone)]
pub struct DeformationScheme {
    kind: SchemeKind,
    q: f64,
    expr: Option<Arc<(Expr, String)>>,
}

fn check_q(q: f64) -> Result<()> {
    if q.is_finite() && q > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidQ(q))
    }
}

impl DeformationScheme {
    /// Ordinary boson, `D(n) = n`. `q` is carried along but unused.
    pub fn undeformed() -> Self {
        DeformationScheme {
            kind: SchemeKind::Undeformed,
            q: 1.0,
            expr: None,
        }
    }

    pub fn biedenharn_macfarlane(q: f64) -> Result<Self> {
        check_q(q)?;
        Ok(DeformationScheme {
            kind: SchemeKind::BiedenharnMacfarlane,
            q,
            expr: None,
        })
    }

    /// Parses `source` and validates `D(0) = 0` and `D(1) = 1` at this `q`.
    pub fn custom(source: &str, q: f64) -> Result<Self> {
        check_q(q)?;
        let expr = parse_deformation(source)?;
        let scheme = DeformationScheme {
            kind: SchemeKind::Custom,
            q,
            expr: Some(Arc::new((expr, source.to_string()))),
        };
        for (n, want) in [(0u32, 0.0), (1, 1.0)] {
            let value = scheme.eval_d(n)?;
            if (value - want).abs() > PROBE_TOL {
                return Err(Error::BoundaryProbe { n, value });
            }
        }
        Ok(scheme)
    }

    /// Builds a scheme from a CLI-style descriptor: `undeformed`, `bm`, or
    /// `expr:<text>`.
    pub fn from_descriptor(descriptor: &str, q: f64) -> Result<Self> {
        match descriptor {
            "undeformed" => {
                check_q(q)?;
                Ok(DeformationScheme {
                    q,
                    ..DeformationScheme::undeformed()
                })
            }
            "bm" => DeformationScheme::biedenharn_macfarlane(q),
            other => match other.strip_prefix("expr:") {
                Some(src) => DeformationScheme::custom(src, q),
                None => Err(Error::InvalidArgument(format!(
                    "unknown scheme '{other}' (expected undeformed, bm or expr:<text>)"
                ))),
            },
        }
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn expr(&self) -> Option<&Expr> {
        self.expr.as_deref().map(|(e, _)| e)
    }

    /// Inverse of [`from_descriptor`](Self::from_descriptor).
    pub fn descriptor(&self) -> String {
        match self.kind {
            SchemeKind::Undeformed => "undeformed".into(),
            SchemeKind::BiedenharnMacfarlane => "bm".into(),
            SchemeKind::Custom => {
                let src = self.expr.as_deref().map(|(_, s)| s.as_str()).unwrap_or("");
                format!("expr:{src}")
            }
        }
    }

    /// `D_q(n)`.
    pub fn eval_d(&self, n: u32) -> Result<f64> {
        let x = f64::from(n);
        let value = match self.kind {
            SchemeKind::Undeformed => return Ok(x),
            SchemeKind::BiedenharnMacfarlane => {
                let q = self.q;
                if (q - 1.0).abs() < BM_LIMIT_WINDOW {
                    return Ok(x);
                }
                // Same operation sequence as the parsed text
                // "(q^n - q^(-n))/(q - q^(-1))", so both agree bitwise.
                (q.powf(x) - q.powf(-x)) / (q - q.powf(-1.0))
            }
            SchemeKind::Custom => {
                let (expr, _) = self.expr.as_deref().expect("custom scheme carries an expression");
                match expr.eval(self.q, x) {
                    Ok(v) => v,
                    Err(EvalError::DivisionByZero) => return Err(Error::DivisionByZero { n }),
                    Err(EvalError::NonFinite) => {
                        return Err(Error::NonFinite {
                            n,
                            value: f64::NAN,
                        })
                    }
                }
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::NonFinite { n, value })
        }
    }

    /// `D_q(n)! = D_q(1) D_q(2) ... D_q(n)`, with `D_q(0)! = 1`.
    pub fn d_factorial(&self, n: u32) -> Result<f64> {
        let mut acc = 1.0;
        for k in 1..=n {
            acc *= self.eval_d(k)?;
            if !acc.is_finite() {
                return Err(Error::FactorialOverflow { n: k });
            }
        }
        Ok(acc)
    }
}

impl fmt::Display for DeformationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (q = {})", self.descriptor(), self.q)
    }
}
