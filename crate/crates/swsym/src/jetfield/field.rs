//! Vector fields on a variable space and their jet-space prolongations.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::symkernel::{diff, simplify, Expr, Symbol, SymbolKind};

use super::space::{SpaceError, VariableSpace};

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("coefficient on `{var}` depends on jet coordinate `{jet}`: not a point symmetry")]
    JetCoefficient { var: String, jet: String },
    #[error("`{0}` is not a base variable of the space")]
    NotBase(String),
    #[error("vector fields live on different spaces (`{0}` vs `{1}`)")]
    SpaceMismatch(String, String),
}

/// Total derivative along an independent variable: the partial derivative
/// plus the chain over every dependent/jet coordinate present (including the
/// dependent arguments of opaque function markers).
pub fn total_derivative(
    e: &Expr,
    y: &Symbol,
    space: &VariableSpace,
) -> Result<Expr, SpaceError> {
    let mut terms = vec![diff(e, y)];
    for s in e.free_symbols() {
        let chain = match s.kind() {
            SymbolKind::Dependent { args } => args.iter().any(|a| a == y.name()),
            SymbolKind::Jet { base, .. } => space.depends_on(base, y),
            _ => false,
        };
        if !chain {
            continue;
        }
        let partial = diff(e, &s);
        if partial.is_zero_expr() {
            continue;
        }
        let lifted = Symbol::jet(&s, &[y.name()]);
        if lifted.jet_order() > space.max_order() + 1 {
            return Err(SpaceError::OrderOverflow {
                got: lifted.jet_order(),
                max: space.max_order(),
            });
        }
        terms.push(Expr::mul(vec![Expr::sym(lifted), partial]));
    }
    Ok(Expr::add(terms))
}

/// Infinitesimal generator of a one-parameter point transformation:
/// coefficients on the base variables, functions of base variables only.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    space: VariableSpace,
    coeffs: BTreeMap<Symbol, Expr>,
}

impl VectorField {
    pub fn new(
        space: VariableSpace,
        coeffs: BTreeMap<Symbol, Expr>,
    ) -> Result<VectorField, FieldError> {
        for (var, c) in &coeffs {
            if !space.contains_base(var) {
                return Err(FieldError::NotBase(var.name().to_string()));
            }
            for s in c.free_symbols() {
                if s.is_jet() {
                    return Err(FieldError::JetCoefficient {
                        var: var.name().to_string(),
                        jet: s.name().to_string(),
                    });
                }
            }
        }
        Ok(VectorField { space, coeffs })
    }

    pub fn zero(space: VariableSpace) -> VectorField {
        VectorField {
            space,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn space(&self) -> &VariableSpace {
        &self.space
    }

    pub fn coeff(&self, var: &Symbol) -> Expr {
        self.coeffs.get(var).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<Symbol, Expr> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.is_zero_expr())
    }

    /// Directional derivative X(f) over the base variables.
    pub fn apply(&self, f: &Expr) -> Expr {
        let mut terms = Vec::new();
        for (var, c) in &self.coeffs {
            if c.is_zero_expr() {
                continue;
            }
            let d = diff(f, var);
            if d.is_zero_expr() {
                continue;
            }
            terms.push(Expr::mul(vec![c.clone(), d]));
        }
        Expr::add(terms)
    }

    /// Componentwise linear combination a*X + b*Y.
    pub fn linear_combination(
        a: &Expr,
        x: &VectorField,
        b: &Expr,
        y: &VectorField,
    ) -> Result<VectorField, FieldError> {
        if x.space != y.space {
            return Err(FieldError::SpaceMismatch(
                x.space.name().to_string(),
                y.space.name().to_string(),
            ));
        }
        let mut coeffs = BTreeMap::new();
        for var in x.space.base_vars() {
            let c = Expr::add(vec![
                Expr::mul(vec![a.clone(), x.coeff(&var)]),
                Expr::mul(vec![b.clone(), y.coeff(&var)]),
            ]);
            if !c.is_zero_expr() {
                coeffs.insert(var, c);
            }
        }
        Ok(VectorField {
            space: x.space.clone(),
            coeffs,
        })
    }

    pub fn scale(&self, a: &Expr) -> VectorField {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, v)| (k.clone(), Expr::mul(vec![a.clone(), v.clone()])))
            .collect();
        VectorField {
            space: self.space.clone(),
            coeffs,
        }
    }

    /// Prolong to the given jet order via the standard recursion
    /// `eta^[J,i] = D_i eta^[J] - sum_k u^A_{J,k} D_i xi^k`.
    pub fn prolong(&self, order: usize) -> Result<ProlongedField, SpaceError> {
        let space = &self.space;
        let indeps = space.independents().to_vec();
        let mut jet_coeffs: BTreeMap<Symbol, Expr> = BTreeMap::new();

        for dep in space.dependents() {
            let args: Vec<String> = match dep.kind() {
                SymbolKind::Dependent { args } => args.clone(),
                _ => continue,
            };
            // order-0 coefficient
            let mut frontier: Vec<(Symbol, Expr)> = vec![(dep.clone(), self.coeff(dep))];
            for _ in 0..order {
                let mut next: Vec<(Symbol, Expr)> = Vec::new();
                for (jet, eta) in &frontier {
                    for a in &args {
                        let y = Symbol::indep(a);
                        let lifted = Symbol::jet(jet, &[a.as_str()]);
                        if jet_coeffs.contains_key(&lifted)
                            || next.iter().any(|(s, _)| s == &lifted)
                        {
                            continue;
                        }
                        // D_i eta^[J]
                        let mut v = total_derivative(eta, &y, space)?;
                        // - sum_k u^A_{J,k} D_i xi^k
                        for k in &indeps {
                            let xi = self.coeff(k);
                            if xi.is_zero_expr() {
                                continue;
                            }
                            let u_jk = Symbol::jet(jet, &[k.name()]);
                            let dxi = total_derivative(&xi, &y, space)?;
                            v = v - Expr::mul(vec![Expr::sym(u_jk), dxi]);
                        }
                        let v = simplify(&v);
                        next.push((lifted, v));
                    }
                }
                for (s, v) in &next {
                    jet_coeffs.insert(s.clone(), v.clone());
                }
                frontier = next;
            }
        }

        Ok(ProlongedField {
            base: self.clone(),
            jet_coeffs,
            order,
        })
    }
}

/// A generator together with its extended coefficients on jet coordinates.
#[derive(Debug, Clone)]
pub struct ProlongedField {
    base: VectorField,
    jet_coeffs: BTreeMap<Symbol, Expr>,
    order: usize,
}

impl ProlongedField {
    pub fn base(&self) -> &VectorField {
        &self.base
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Extended coefficient on a jet coordinate (zero when absent).
    pub fn jet_coeff(&self, jet: &Symbol) -> Expr {
        self.jet_coeffs.get(jet).cloned().unwrap_or_else(Expr::zero)
    }

    /// Coefficient on any coordinate, base or jet.
    pub fn coeff(&self, var: &Symbol) -> Expr {
        if var.is_jet() {
            self.jet_coeff(var)
        } else {
            self.base.coeff(var)
        }
    }

    /// Full coefficient map over the jet-space coordinates.
    pub fn coeff_map(&self) -> BTreeMap<Symbol, Expr> {
        let mut m = self.base.coeffs().clone();
        for (k, v) in &self.jet_coeffs {
            if !v.is_zero_expr() {
                m.insert(k.clone(), v.clone());
            }
        }
        m
    }

    /// Lie derivative of a scalar on jet space.
    pub fn apply(&self, f: &Expr) -> Expr {
        let mut terms = vec![self.base.apply(f)];
        for (jet, c) in &self.jet_coeffs {
            if c.is_zero_expr() {
                continue;
            }
            let d = diff(f, jet);
            if d.is_zero_expr() {
                continue;
            }
            terms.push(Expr::mul(vec![c.clone(), d]));
        }
        Expr::add(terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::{Expr, Func};

    fn space_i() -> VariableSpace {
        VariableSpace::new(
            "I",
            vec![Symbol::indep("t"), Symbol::indep("x")],
            vec![Symbol::dep("h", &["t", "x"]), Symbol::dep("v", &["t", "x"])],
            2,
        )
        .unwrap()
    }

    #[test]
    fn total_derivative_lifts_jets() {
        let sp = space_i();
        let v = sp.dependent("v").unwrap().clone();
        let t = Symbol::indep("t");
        // D_t v = v_t
        let d = total_derivative(&Expr::sym(v.clone()), &t, &sp).unwrap();
        assert_eq!(d, Expr::sym(Symbol::jet(&v, &["t"])));
    }

    #[test]
    fn total_derivative_chain_rule() {
        let sp = space_i();
        let h = sp.dependent("h").unwrap().clone();
        let g = Symbol::param("gamma");
        let x = Symbol::indep("x");
        // D_x h^(gamma-1) = (gamma-1) h^(gamma-2) h_x
        let gm1 = Expr::add(vec![Expr::sym(g.clone()), Expr::int(-1)]);
        let e = Expr::pow(Expr::sym(h.clone()), gm1.clone());
        let d = total_derivative(&e, &x, &sp).unwrap();
        let want = Expr::mul(vec![
            gm1,
            Expr::pow(
                Expr::sym(h.clone()),
                Expr::add(vec![Expr::sym(g), Expr::int(-2)]),
            ),
            Expr::sym(Symbol::jet(&h, &["x"])),
        ]);
        assert_eq!(d, want);
    }

    #[test]
    fn prolongation_of_translation_is_zero() {
        let sp = space_i();
        let t = Symbol::indep("t");
        let mut coeffs = BTreeMap::new();
        coeffs.insert(t, Expr::one());
        let x1 = VectorField::new(sp, coeffs).unwrap();
        let px = x1.prolong(2).unwrap();
        assert!(px.jet_coeffs.values().all(|c| c.is_zero_expr()));
    }

    #[test]
    fn prolongation_of_zero_is_zero() {
        let sp = space_i();
        let z = VectorField::zero(sp);
        let pz = z.prolong(2).unwrap();
        assert!(pz.jet_coeffs.values().all(|c| c.is_zero_expr()));
    }

    #[test]
    fn oscillatory_shift_prolongation() {
        // X3 = cos(t) d_v has first extension -sin(t) on v_t
        let sp = space_i();
        let v = sp.dependent("v").unwrap().clone();
        let t = Symbol::indep("t");
        let mut coeffs = BTreeMap::new();
        coeffs.insert(v.clone(), Expr::call(Func::Cos, Expr::sym(t.clone())));
        let x3 = VectorField::new(sp, coeffs).unwrap();
        let px = x3.prolong(1).unwrap();
        let vt = Symbol::jet(&v, &["t"]);
        let want = Expr::call(Func::Sin, Expr::sym(t)).neg();
        assert_eq!(px.jet_coeff(&vt), want);
    }

    #[test]
    fn point_symmetry_rejects_jet_coefficients() {
        let sp = space_i();
        let v = sp.dependent("v").unwrap().clone();
        let vt = Symbol::jet(&v, &["t"]);
        let mut coeffs = BTreeMap::new();
        coeffs.insert(v, Expr::sym(vt));
        assert!(matches!(
            VectorField::new(sp, coeffs),
            Err(FieldError::JetCoefficient { .. })
        ));
    }
}
