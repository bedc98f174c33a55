//! Simultaneous substitution.
//!
//! Substitution is simultaneous: `{x -> y, y -> x}` swaps. When a binding
//! replaces a dependent variable and the expression mentions jets of it, the
//! jets are rewritten by repeated partial differentiation of the bound
//! expression, provided that expression contains no dependent or jet symbols
//! itself (so its total and partial derivatives agree). Ansatz substitutions
//! whose right side contains reduced dependent variables go through the
//! change-of-variables machinery in the jet module instead.

use std::collections::BTreeMap;

use thiserror::Error;

use super::diff::diff;
use super::expr::{Expr, ExprNode};
use super::symbol::{Symbol, SymbolKind};

#[derive(Debug, Error)]
pub enum SubstError {
    #[error(
        "cannot chain jets of `{dep}` through a binding that contains dependent symbols; \
         use the jet-space change of variables instead"
    )]
    UnsupportedChaining { dep: String },
}

fn apply_map(e: &Expr, map: &BTreeMap<Symbol, Expr>) -> Expr {
    match e.node() {
        ExprNode::Sym(s) => map.get(s).cloned().unwrap_or_else(|| e.clone()),
        ExprNode::Num(_) | ExprNode::Opaque(_) => e.clone(),
        ExprNode::Add(ts) => Expr::add(ts.iter().map(|t| apply_map(t, map)).collect()),
        ExprNode::Mul(fs) => Expr::mul(fs.iter().map(|f| apply_map(f, map)).collect()),
        ExprNode::Pow(b, x) => Expr::pow(apply_map(b, map), apply_map(x, map)),
        ExprNode::Call(f, a) => Expr::call(*f, apply_map(a, map)),
    }
}

/// Plain simultaneous substitution; unbound symbols pass through.
pub fn substitute_symbols(e: &Expr, bindings: &BTreeMap<Symbol, Expr>) -> Expr {
    apply_map(e, bindings)
}

fn expr_mentions_dependents(e: &Expr) -> bool {
    e.free_symbols()
        .iter()
        .any(|s| s.is_dependent() || s.is_jet())
}

/// Substitution with jet chaining: bindings of dependent variables also
/// rewrite every jet of that variable appearing in `e`, as long as the bound
/// expression is a pure function of independent variables and parameters.
pub fn substitute(e: &Expr, bindings: &BTreeMap<Symbol, Expr>) -> Result<Expr, SubstError> {
    // collect jets present in e whose base is bound
    let mut full: BTreeMap<Symbol, Expr> = bindings.clone();
    for s in e.free_symbols() {
        if let SymbolKind::Jet { base, wrt } = s.kind() {
            // find a binding for the base dependent variable
            let bound = bindings
                .iter()
                .find(|(k, _)| k.is_dependent() && k.name() == base);
            if let Some((_, rhs)) = bound {
                if expr_mentions_dependents(rhs) {
                    return Err(SubstError::UnsupportedChaining {
                        dep: base.clone(),
                    });
                }
                let mut d = rhs.clone();
                for var in wrt {
                    d = diff(&d, &Symbol::indep(var));
                }
                full.insert(s.clone(), d);
            }
        }
    }
    Ok(apply_map(e, &full))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::expr::Func;

    #[test]
    fn simultaneous_swap() {
        let x = Symbol::param("x");
        let y = Symbol::param("y");
        let e = Expr::add(vec![Expr::sym(x.clone()), Expr::sym(y.clone())]);
        let mut m = BTreeMap::new();
        m.insert(x.clone(), Expr::sym(y.clone()));
        m.insert(y, Expr::sym(x));
        assert_eq!(substitute_symbols(&e, &m), e);
    }

    #[test]
    fn jet_chaining_kills_the_oscillator() {
        // v_tt + v with v -> cos(t) gives 0
        let v = Symbol::dep("v", &["t", "x"]);
        let vtt = Symbol::jet(&v, &["t", "t"]);
        let t = Symbol::indep("t");
        let e = Expr::add(vec![Expr::sym(vtt), Expr::sym(v.clone())]);
        let mut m = BTreeMap::new();
        m.insert(v, Expr::call(Func::Cos, Expr::sym(t)));
        let r = substitute(&e, &m).unwrap();
        assert!(r.is_zero_expr(), "got {r}");
    }

    #[test]
    fn chaining_rejects_dependent_right_sides() {
        let v = Symbol::dep("v", &["t", "x"]);
        let h = Symbol::dep("h", &["t", "x"]);
        let vt = Symbol::jet(&v, &["t"]);
        let e = Expr::sym(vt);
        let mut m = BTreeMap::new();
        m.insert(v, Expr::sym(h));
        assert!(substitute(&e, &m).is_err());
    }
}
