//! Lie brackets of vector fields.

use std::collections::BTreeMap;

use crate::symkernel::{diff, simplify, Expr, Symbol};

use super::field::{FieldError, ProlongedField, VectorField};

/// Commutator of two point-symmetry generators on the same space:
/// `[X,Y]^k = X(Y^k) - Y(X^k)` componentwise.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField, FieldError> {
    if x.space() != y.space() {
        return Err(FieldError::SpaceMismatch(
            x.space().name().to_string(),
            y.space().name().to_string(),
        ));
    }
    let mut coeffs = BTreeMap::new();
    for var in x.space().base_vars() {
        let c = simplify(&(x.apply(&y.coeff(&var)) - y.apply(&x.coeff(&var))));
        if !c.is_zero_expr() {
            coeffs.insert(var, c);
        }
    }
    VectorField::new(x.space().clone(), coeffs)
}

/// Bracket of two general vector fields on jet space, given as coefficient
/// maps over jet coordinates. Used to check that prolongation is a Lie
/// algebra morphism.
pub fn jet_space_bracket(
    a: &BTreeMap<Symbol, Expr>,
    b: &BTreeMap<Symbol, Expr>,
) -> BTreeMap<Symbol, Expr> {
    let apply = |field: &BTreeMap<Symbol, Expr>, f: &Expr| -> Expr {
        let mut terms = Vec::new();
        for (var, c) in field {
            if c.is_zero_expr() {
                continue;
            }
            let d = diff(f, var);
            if !d.is_zero_expr() {
                terms.push(Expr::mul(vec![c.clone(), d]));
            }
        }
        Expr::add(terms)
    };
    let mut vars: Vec<Symbol> = a.keys().cloned().collect();
    for k in b.keys() {
        if !vars.contains(k) {
            vars.push(k.clone());
        }
    }
    let mut out = BTreeMap::new();
    for var in vars {
        let bc = b.get(&var).cloned().unwrap_or_else(Expr::zero);
        let ac = a.get(&var).cloned().unwrap_or_else(Expr::zero);
        let c = simplify(&(apply(a, &bc) - apply(b, &ac)));
        if !c.is_zero_expr() {
            out.insert(var, c);
        }
    }
    out
}

/// Does prolongation commute with the bracket, to the given order?
pub fn prolong_commutes_with_bracket(
    x: &VectorField,
    y: &VectorField,
    order: usize,
) -> Result<bool, FieldError> {
    let bxy = lie_bracket(x, y)?;
    let lhs = bxy.prolong(order).map_err(FieldError::Space)?.coeff_map();
    let px = x.prolong(order).map_err(FieldError::Space)?;
    let py = y.prolong(order).map_err(FieldError::Space)?;
    let rhs = jet_space_bracket(&px.coeff_map(), &py.coeff_map());
    // compare on every coordinate mentioned by either side
    let mut vars: Vec<Symbol> = lhs.keys().cloned().collect();
    for k in rhs.keys() {
        if !vars.contains(k) {
            vars.push(k.clone());
        }
    }
    for var in vars {
        let l = lhs.get(&var).cloned().unwrap_or_else(Expr::zero);
        let r = rhs.get(&var).cloned().unwrap_or_else(Expr::zero);
        if !crate::symkernel::is_zero(&(l - r)).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Cyclic Jacobi sum `[X,[Y,Z]] + [Y,[Z,X]] + [Z,[X,Y]]`.
pub fn jacobi_sum(
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
) -> Result<VectorField, FieldError> {
    let a = lie_bracket(x, &lie_bracket(y, z)?)?;
    let b = lie_bracket(y, &lie_bracket(z, x)?)?;
    let c = lie_bracket(z, &lie_bracket(x, y)?)?;
    let ab = VectorField::linear_combination(&Expr::one(), &a, &Expr::one(), &b)?;
    VectorField::linear_combination(&Expr::one(), &ab, &Expr::one(), &c)
}

/// `prolonged.coeff_map()` helper re-export for callers working with maps.
pub fn prolonged_map(p: &ProlongedField) -> BTreeMap<Symbol, Expr> {
    p.coeff_map()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetfield::space::VariableSpace;
    use crate::symkernel::Func;

    fn space_i() -> VariableSpace {
        VariableSpace::new(
            "I",
            vec![Symbol::indep("t"), Symbol::indep("x")],
            vec![Symbol::dep("h", &["t", "x"]), Symbol::dep("v", &["t", "x"])],
            2,
        )
        .unwrap()
    }

    fn field(space: &VariableSpace, coeffs: Vec<(Symbol, Expr)>) -> VectorField {
        VectorField::new(space.clone(), coeffs.into_iter().collect()).unwrap()
    }

    #[test]
    fn bracket_is_antisymmetric_on_itself() {
        let sp = space_i();
        let t = Symbol::indep("t");
        let v = sp.dependent("v").unwrap().clone();
        let x = field(
            &sp,
            vec![(
                v,
                Expr::call(Func::Cos, Expr::sym(t.clone())),
            )],
        );
        let b = lie_bracket(&x, &x).unwrap();
        assert!(b.is_zero());
    }

    #[test]
    fn time_shift_against_cosine_shift() {
        // [d_t, cos(t) d_v] = -sin(t) d_v
        let sp = space_i();
        let t = Symbol::indep("t");
        let v = sp.dependent("v").unwrap().clone();
        let x1 = field(&sp, vec![(t.clone(), Expr::one())]);
        let x3 = field(&sp, vec![(v.clone(), Expr::call(Func::Cos, Expr::sym(t.clone())))]);
        let b = lie_bracket(&x1, &x3).unwrap();
        let want = Expr::call(Func::Sin, Expr::sym(t)).neg();
        assert_eq!(b.coeff(&v), want);
    }

    #[test]
    fn space_mismatch_is_an_error() {
        let sp1 = space_i();
        let sp2 = VariableSpace::new(
            "J",
            vec![Symbol::indep("t")],
            vec![Symbol::dep("u", &["t"])],
            1,
        )
        .unwrap();
        let x = field(&sp1, vec![(Symbol::indep("t"), Expr::one())]);
        let y = VectorField::zero(sp2);
        assert!(matches!(
            lie_bracket(&x, &y),
            Err(FieldError::SpaceMismatch(_, _))
        ));
    }
}
