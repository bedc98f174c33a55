//! Exact partial differentiation.
//!
//! Differentiation is partial: jet coordinates are mutually independent, so
//! `d(v_t)/d(v) = 0` and `d(v_t)/d(v_t) = 1`. The chain, product and power
//! rules are exact over the rational coefficient field. Differentiating with
//! respect to a parameter is allowed (the adjoint identities need d/d eps);
//! parameters simply never appear as another symbol's derivative.

use super::expr::{Expr, ExprNode, Func};
use super::symbol::Symbol;

/// d e / d s, treating every other symbol (including other jets of the same
/// dependent variable) as constant.
pub fn diff(e: &Expr, s: &Symbol) -> Expr {
    match e.node() {
        ExprNode::Num(_) => Expr::zero(),
        ExprNode::Sym(t) => {
            if t == s {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        ExprNode::Add(ts) => Expr::add(ts.iter().map(|t| diff(t, s)).collect()),
        ExprNode::Mul(fs) => {
            let mut terms = Vec::with_capacity(fs.len());
            for (i, f) in fs.iter().enumerate() {
                let df = diff(f, s);
                if df.is_zero_expr() {
                    continue;
                }
                let mut parts = vec![df];
                for (j, g) in fs.iter().enumerate() {
                    if i != j {
                        parts.push(g.clone());
                    }
                }
                terms.push(Expr::mul(parts));
            }
            Expr::add(terms)
        }
        ExprNode::Pow(b, x) => {
            let db = diff(b, s);
            let dx = diff(x, s);
            let mut terms = Vec::new();
            if !db.is_zero_expr() {
                // x * b^(x-1) * db
                let xm1 = Expr::add(vec![x.clone(), Expr::int(-1)]);
                terms.push(Expr::mul(vec![x.clone(), Expr::pow(b.clone(), xm1), db]));
            }
            if !dx.is_zero_expr() {
                // b^x * ln(b) * dx
                terms.push(Expr::mul(vec![
                    e.clone(),
                    Expr::call(Func::Ln, b.clone()),
                    dx,
                ]));
            }
            Expr::add(terms)
        }
        ExprNode::Call(f, a) => {
            let da = diff(a, s);
            if da.is_zero_expr() {
                return Expr::zero();
            }
            let outer = match f {
                Func::Sin => Expr::call(Func::Cos, a.clone()),
                Func::Cos => Expr::call(Func::Sin, a.clone()).neg(),
                Func::Tan => {
                    // 1 + tan^2
                    Expr::add(vec![
                        Expr::one(),
                        Expr::pow(Expr::call(Func::Tan, a.clone()), Expr::int(2)),
                    ])
                }
                Func::Arctan => Expr::pow(
                    Expr::add(vec![Expr::one(), Expr::pow(a.clone(), Expr::int(2))]),
                    Expr::int(-1),
                ),
                Func::Exp => e.clone(),
                Func::Ln => a.clone().inv(),
                Func::Sqrt => unreachable!("sqrt normalizes to a power"),
                Func::LambertW => {
                    // W'(x) = W(x) / (x (1 + W(x)))
                    let w = e.clone();
                    Expr::mul(vec![
                        w.clone(),
                        a.clone().inv(),
                        Expr::add(vec![Expr::one(), w]).inv(),
                    ])
                }
            };
            Expr::mul(vec![outer, da])
        }
        ExprNode::Opaque(f) => {
            // marker increment on the matching argument; zero otherwise
            for (i, arg) in f.args.iter().enumerate() {
                if arg == s {
                    let mut g = f.clone();
                    g.derivs[i] += 1;
                    return Expr::opaque(g);
                }
            }
            Expr::zero()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::symbol::Symbol;

    #[test]
    fn cos_derivative() {
        let t = Symbol::indep("t");
        let e = Expr::call(Func::Cos, Expr::sym(t.clone()));
        let want = Expr::call(Func::Sin, Expr::sym(t.clone())).neg();
        assert_eq!(diff(&e, &t), want);
    }

    #[test]
    fn power_rule_with_symbolic_exponent() {
        // d/dh [ h^(gamma-1) h_x ] = (gamma-1) h^(gamma-2) h_x
        let h = Symbol::dep("h", &["t", "x"]);
        let hx = Symbol::jet(&h, &["x"]);
        let g = Symbol::param("gamma");
        let gm1 = Expr::add(vec![Expr::sym(g.clone()), Expr::int(-1)]);
        let e = Expr::mul(vec![
            Expr::pow(Expr::sym(h.clone()), gm1.clone()),
            Expr::sym(hx.clone()),
        ]);
        let want = Expr::mul(vec![
            gm1,
            Expr::pow(
                Expr::sym(h.clone()),
                Expr::add(vec![Expr::sym(g), Expr::int(-2)]),
            ),
            Expr::sym(hx),
        ]);
        assert_eq!(diff(&e, &h), want);
    }

    #[test]
    fn jets_are_mutually_independent() {
        let v = Symbol::dep("v", &["t", "x"]);
        let vt = Symbol::jet(&v, &["t"]);
        let e = Expr::sym(vt.clone());
        assert!(diff(&e, &v).is_zero_expr());
        assert!(diff(&e, &vt).is_one_expr());
    }

    #[test]
    fn diff_is_linear_in_parameters() {
        let t = Symbol::indep("t");
        let a = Expr::sym(Symbol::param("a"));
        let b = Expr::sym(Symbol::param("b"));
        let e1 = Expr::call(Func::Sin, Expr::sym(t.clone()));
        let e2 = Expr::pow(Expr::sym(t.clone()), Expr::int(3));
        let combo = Expr::add(vec![
            Expr::mul(vec![a.clone(), e1.clone()]),
            Expr::mul(vec![b.clone(), e2.clone()]),
        ]);
        let want = Expr::add(vec![
            Expr::mul(vec![a, diff(&e1, &t)]),
            Expr::mul(vec![b, diff(&e2, &t)]),
        ]);
        assert_eq!(diff(&combo, &t), want);
    }

    #[test]
    fn lambertw_derivative_shape() {
        let z = Symbol::param("z");
        let w = Expr::call(Func::LambertW, Expr::sym(z.clone()));
        let d = diff(&w, &z);
        // W / (z (1+W))
        let want = Expr::mul(vec![
            w.clone(),
            Expr::sym(z).inv(),
            Expr::add(vec![Expr::one(), w]).inv(),
        ]);
        assert_eq!(d, want);
    }
}
