//! Canonical univariate rational functions over the rationals.
//!
//! Power-collection needs exponent arithmetic to be canonical: the scaling
//! ansätze produce exponents such as `(gamma+3)/(gamma+1)` through several
//! different routes, and those must compare equal structurally. Exponents in
//! this engine are (at most) rational functions of a single parameter, so a
//! reduced polynomial fraction is a complete normal form for them.

use num::BigRational;
use num::{One, Zero};

use super::expr::Expr;
use super::symbol::Symbol;

type Poly = Vec<BigRational>; // coefficients, index = degree, trimmed

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
    p
}

fn p_zero() -> Poly {
    vec![BigRational::zero()]
}

fn p_const(c: BigRational) -> Poly {
    vec![c]
}

fn p_is_zero(p: &Poly) -> bool {
    p.iter().all(|c| c.is_zero())
}

fn p_add(a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    trim(out)
}

fn p_mul(a: &Poly, b: &Poly) -> Poly {
    if p_is_zero(a) || p_is_zero(b) {
        return p_zero();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            out[i + j] += ca * cb;
        }
    }
    trim(out)
}

fn p_scale(a: &Poly, c: &BigRational) -> Poly {
    trim(a.iter().map(|x| x * c).collect())
}

/// Remainder of a by b (b nonzero).
fn p_rem(a: &Poly, b: &Poly) -> Poly {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lb = b.last().unwrap().clone();
    while !p_is_zero(&r) && r.len() - 1 >= db {
        let dr = r.len() - 1;
        let q = r.last().unwrap() / &lb;
        // r -= q * x^(dr-db) * b
        for (i, cb) in b.iter().enumerate() {
            r[dr - db + i] -= &q * cb;
        }
        r = trim(r);
        if dr == 0 {
            break;
        }
        if r.len() - 1 == dr && !r.last().unwrap().is_zero() {
            break; // no progress; numerically impossible over exact rationals
        }
    }
    r
}

fn p_gcd(a: &Poly, b: &Poly) -> Poly {
    let mut x = a.clone();
    let mut y = b.clone();
    while !p_is_zero(&y) {
        let r = p_rem(&x, &y);
        x = y;
        y = r;
    }
    if p_is_zero(&x) {
        return p_const(BigRational::one());
    }
    // make monic
    let lead = x.last().unwrap().clone();
    p_scale(&x, &(BigRational::one() / lead))
}

fn p_divexact(a: &Poly, b: &Poly) -> Poly {
    // exact division (used only when b divides a)
    let mut r = a.clone();
    let db = b.len() - 1;
    let lb = b.last().unwrap().clone();
    let mut q = vec![BigRational::zero(); a.len().saturating_sub(db)];
    while !p_is_zero(&r) && r.len() - 1 >= db {
        let dr = r.len() - 1;
        let c = r.last().unwrap() / &lb;
        q[dr - db] = c.clone();
        for (i, cb) in b.iter().enumerate() {
            r[dr - db + i] -= &c * cb;
        }
        r = trim(r);
        if dr == 0 {
            break;
        }
    }
    trim(q)
}

/// A reduced fraction of univariate polynomials. `var == None` means both
/// polynomials are constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFunc {
    var: Option<Symbol>,
    num: Poly,
    den: Poly, // monic, coprime with num
}

impl RatFunc {
    pub fn constant(c: BigRational) -> Self {
        RatFunc {
            var: None,
            num: p_const(c),
            den: p_const(BigRational::one()),
        }
    }

    pub fn variable(s: Symbol) -> Self {
        RatFunc {
            var: Some(s),
            num: trim(vec![BigRational::zero(), BigRational::one()]),
            den: p_const(BigRational::one()),
        }
    }

    fn unify_var(a: &RatFunc, b: &RatFunc) -> Option<Option<Symbol>> {
        match (&a.var, &b.var) {
            (None, v) | (v, None) => Some(v.clone()),
            (Some(x), Some(y)) if x == y => Some(Some(x.clone())),
            _ => None,
        }
    }

    fn reduce(var: Option<Symbol>, num: Poly, den: Poly) -> Option<RatFunc> {
        if p_is_zero(&den) {
            return None;
        }
        if p_is_zero(&num) {
            return Some(RatFunc {
                var: None,
                num: p_zero(),
                den: p_const(BigRational::one()),
            });
        }
        let g = p_gcd(&num, &den);
        let mut num = p_divexact(&num, &g);
        let mut den = p_divexact(&den, &g);
        let lead = den.last().unwrap().clone();
        num = p_scale(&num, &(BigRational::one() / &lead));
        den = p_scale(&den, &(BigRational::one() / &lead));
        let var = if num.len() == 1 && den.len() == 1 {
            None
        } else {
            var
        };
        Some(RatFunc { var, num, den })
    }

    pub fn add(a: &RatFunc, b: &RatFunc) -> Option<RatFunc> {
        let var = Self::unify_var(a, b)?;
        let num = p_add(&p_mul(&a.num, &b.den), &p_mul(&b.num, &a.den));
        let den = p_mul(&a.den, &b.den);
        Self::reduce(var, num, den)
    }

    pub fn mul(a: &RatFunc, b: &RatFunc) -> Option<RatFunc> {
        let var = Self::unify_var(a, b)?;
        let num = p_mul(&a.num, &b.num);
        let den = p_mul(&a.den, &b.den);
        Self::reduce(var, num, den)
    }

    pub fn powi(&self, n: i64) -> Option<RatFunc> {
        if n == 0 {
            return Some(RatFunc::constant(BigRational::one()));
        }
        let (mut num, mut den) = if n > 0 {
            (self.num.clone(), self.den.clone())
        } else {
            if p_is_zero(&self.num) {
                return None;
            }
            (self.den.clone(), self.num.clone())
        };
        let k = n.unsigned_abs();
        let (bn, bd) = (num.clone(), den.clone());
        for _ in 1..k {
            num = p_mul(&num, &bn);
            den = p_mul(&den, &bd);
        }
        Self::reduce(self.var.clone(), num, den)
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num.len() == 1 && self.den.len() == 1 {
            Some(&self.num[0] / &self.den[0])
        } else {
            None
        }
    }

    /// Rebuild a canonical expression: expanded numerator polynomial times an
    /// inverse denominator power when the denominator is nontrivial.
    pub fn to_expr(&self) -> Expr {
        if let Some(r) = self.as_rational() {
            return Expr::num(r);
        }
        let var = self.var.as_ref().expect("nonconstant ratfunc carries a var");
        let poly_expr = |p: &Poly| -> Expr {
            let mut terms = Vec::new();
            for (i, c) in p.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mono = if i == 0 {
                    Expr::num(c.clone())
                } else {
                    Expr::mul(vec![
                        Expr::num(c.clone()),
                        Expr::pow(Expr::sym(var.clone()), Expr::int(i as i64)),
                    ])
                };
                terms.push(mono);
            }
            Expr::add(terms)
        };
        let num = poly_expr(&self.num);
        if self.den.len() == 1 && self.den[0].is_one() {
            num
        } else {
            Expr::mul(vec![num, Expr::pow(poly_expr(&self.den), Expr::int(-1))])
        }
    }
}

/// Interpret an expression as a univariate rational function, if it is one.
pub fn ratfunc_of(e: &Expr) -> Option<RatFunc> {
    use super::expr::ExprNode;
    match e.node() {
        ExprNode::Num(r) => Some(RatFunc::constant(r.clone())),
        ExprNode::Sym(s) => Some(RatFunc::variable(s.clone())),
        ExprNode::Add(ts) => {
            let mut acc = RatFunc::constant(BigRational::zero());
            for t in ts {
                acc = RatFunc::add(&acc, &ratfunc_of(t)?)?;
            }
            Some(acc)
        }
        ExprNode::Mul(fs) => {
            let mut acc = RatFunc::constant(BigRational::one());
            for f in fs {
                acc = RatFunc::mul(&acc, &ratfunc_of(f)?)?;
            }
            Some(acc)
        }
        ExprNode::Pow(b, x) => {
            let n = x.as_integer()?;
            let rb = ratfunc_of(b)?;
            rb.powi(n)
        }
        _ => None,
    }
}

/// Canonicalize an exponent expression. Anything that is a univariate
/// rational function is replaced by its reduced form; other expressions pass
/// through unchanged. Negative signs never hide in the denominator.
pub fn canonical_exponent(e: &Expr) -> Expr {
    match ratfunc_of(e) {
        Some(rf) => rf.to_expr(),
        None => e.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::expr::Expr;

    fn g() -> Expr {
        Expr::sym(Symbol::param("gamma"))
    }

    #[test]
    fn exponent_identities_canonicalize() {
        // (gamma+3)/(gamma+1)  ==  2*gamma/(gamma+1) + 4/(gamma+1) - 1
        let gp1 = Expr::add(vec![g(), Expr::int(1)]);
        let a = Expr::mul(vec![
            Expr::add(vec![g(), Expr::int(3)]),
            Expr::pow(gp1.clone(), Expr::int(-1)),
        ]);
        let b = Expr::add(vec![
            Expr::mul(vec![Expr::int(2), g(), Expr::pow(gp1.clone(), Expr::int(-1))]),
            Expr::mul(vec![Expr::int(4), Expr::pow(gp1, Expr::int(-1))]),
            Expr::int(-1),
        ]);
        assert_eq!(canonical_exponent(&a), canonical_exponent(&b));
    }

    #[test]
    fn gcd_cancels() {
        // (gamma^2-1)/(gamma+1) == gamma-1
        let gp1 = Expr::add(vec![g(), Expr::int(1)]);
        let g2m1 = Expr::add(vec![Expr::pow(g(), Expr::int(2)), Expr::int(-1)]);
        let a = Expr::mul(vec![g2m1, Expr::pow(gp1, Expr::int(-1))]);
        let expect = Expr::add(vec![g(), Expr::int(-1)]);
        assert_eq!(canonical_exponent(&a), canonical_exponent(&expect));
    }
}
