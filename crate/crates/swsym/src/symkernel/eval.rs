//! IEEE double evaluation with domain checking.
//!
//! Evaluation order is the normal-form order: sums left to right over the
//! ordered summands, products likewise, powers via `powi` for integer
//! exponents and `powf` otherwise. Domain violations (log of a non-positive
//! number, non-integer power of a negative base, Lambert W below -1/e)
//! report the offending subtree.

use std::collections::BTreeMap;

use num::ToPrimitive;
use thiserror::Error;

use super::expr::{Expr, ExprNode, Func};
use super::symbol::Symbol;
use crate::numerics::lambert::{lambert_w, WBranch};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("unassigned symbol `{0}`")]
    Unassigned(String),
    #[error("domain error in `{subtree}`: {reason}")]
    Domain { subtree: String, reason: String },
    #[error("cannot evaluate an opaque function marker `{0}` numerically")]
    Opaque(String),
}

fn domain(e: &Expr, reason: impl Into<String>) -> EvalError {
    EvalError::Domain {
        subtree: format!("{e}"),
        reason: reason.into(),
    }
}

pub fn eval(e: &Expr, assignment: &BTreeMap<Symbol, f64>) -> Result<f64, EvalError> {
    match e.node() {
        ExprNode::Num(r) => Ok(r.to_f64().unwrap_or(f64::NAN)),
        ExprNode::Sym(s) => assignment
            .get(s)
            .copied()
            .ok_or_else(|| EvalError::Unassigned(s.name().to_string())),
        ExprNode::Add(ts) => {
            let mut acc = 0.0;
            for t in ts {
                acc += eval(t, assignment)?;
            }
            Ok(acc)
        }
        ExprNode::Mul(fs) => {
            let mut acc = 1.0;
            for f in fs {
                acc *= eval(f, assignment)?;
            }
            Ok(acc)
        }
        ExprNode::Pow(b, x) => {
            let bv = eval(b, assignment)?;
            if let Some(n) = x.as_integer() {
                if bv == 0.0 && n < 0 {
                    return Err(domain(e, "zero base with negative exponent"));
                }
                return Ok(bv.powi(n as i32));
            }
            let xv = eval(x, assignment)?;
            if bv < 0.0 {
                return Err(domain(e, "negative base under non-integer exponent"));
            }
            if bv == 0.0 && xv < 0.0 {
                return Err(domain(e, "zero base with negative exponent"));
            }
            Ok(bv.powf(xv))
        }
        ExprNode::Call(f, a) => {
            let av = eval(a, assignment)?;
            match f {
                Func::Sin => Ok(av.sin()),
                Func::Cos => Ok(av.cos()),
                Func::Tan => Ok(av.tan()),
                Func::Arctan => Ok(av.atan()),
                Func::Exp => Ok(av.exp()),
                Func::Ln => {
                    if av <= 0.0 {
                        Err(domain(e, format!("ln of non-positive value {av}")))
                    } else {
                        Ok(av.ln())
                    }
                }
                Func::Sqrt => {
                    if av < 0.0 {
                        Err(domain(e, "sqrt of negative value"))
                    } else {
                        Ok(av.sqrt())
                    }
                }
                Func::LambertW => lambert_w(WBranch::Zero, av)
                    .map_err(|err| domain(e, err.to_string())),
            }
        }
        ExprNode::Opaque(f) => Err(EvalError::Opaque(f.name.clone())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cos_zero_is_one() {
        let e = Expr::call(Func::Cos, Expr::zero());
        assert_eq!(eval(&e, &BTreeMap::new()).unwrap(), 1.0);
    }

    #[test]
    fn ln_of_negative_is_domain_error() {
        let e = Expr::call(Func::Ln, Expr::int(-1));
        let err = eval(&e, &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, EvalError::Domain { .. }));
    }

    #[test]
    fn unassigned_symbol_reported() {
        let e = Expr::sym(Symbol::param("gamma"));
        assert!(matches!(
            eval(&e, &BTreeMap::new()),
            Err(EvalError::Unassigned(_))
        ));
    }
}
