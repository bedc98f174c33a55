//! Immutable symbolic expressions over exact rationals.
//!
//! Every constructor normalizes, so any `Expr` you can hold is already in
//! normal form: recursively flattened sums of products of powers, rational
//! coefficients collected per term, summands and factors ordered by a fixed
//! total order. The term language is deliberately small (rationals, symbols,
//! sums, products, powers, the elementary calls used by the shallow-water
//! model, and opaque function markers for determining equations).
//!
//! Two domain conventions are baked in and documented in `docs/grammar.md`:
//! powers with non-integer exponents assume a positive base (heights and
//! similarity coordinates are positive), and even powers of `cos` are
//! rewritten through the Pythagorean identity so trigonometric polynomials
//! have a canonical form.

use std::fmt;
use std::sync::Arc;

use num::bigint::BigInt;
use num::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use super::ratfunc::canonical_exponent;
use super::symbol::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Arctan,
    Exp,
    Ln,
    Sqrt,
    LambertW,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Arctan => "arctan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::LambertW => "lambertW",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "arctan" => Func::Arctan,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "lambertW" => Func::LambertW,
            _ => return None,
        })
    }
}

/// An unknown scalar function of declared arguments, with partial-derivative
/// markers (one counter per argument). These stand for the undetermined
/// generator coefficients in determining equations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpaqueFn {
    pub name: String,
    pub args: Vec<Symbol>,
    pub derivs: Vec<u32>,
}

impl OpaqueFn {
    pub fn new(name: &str, args: Vec<Symbol>) -> Self {
        let derivs = vec![0; args.len()];
        OpaqueFn {
            name: name.to_string(),
            args,
            derivs,
        }
    }

    pub fn order(&self) -> u32 {
        self.derivs.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExprNode {
    Num(BigRational),
    Sym(Symbol),
    Pow(Expr, Expr),
    Call(Func, Expr),
    Opaque(OpaqueFn),
    Mul(Vec<Expr>),
    Add(Vec<Expr>),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<ExprNode>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::render::render(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::render::render(self))
    }
}

/// Expansion bound for integer powers of sums; larger powers stay symbolic.
const EXPAND_POW_LIMIT: i64 = 8;

impl Expr {
    fn raw(node: ExprNode) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &ExprNode {
        &self.0
    }

    // ---- constructors (all normalizing) ----

    pub fn num(r: BigRational) -> Expr {
        Expr::raw(ExprNode::Num(r))
    }

    pub fn int(n: i64) -> Expr {
        Expr::num(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn rat(n: i64, d: i64) -> Expr {
        assert!(d != 0, "zero denominator");
        Expr::num(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn sym(s: Symbol) -> Expr {
        Expr::raw(ExprNode::Sym(s))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn add(terms: Vec<Expr>) -> Expr {
        norm_add(terms)
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        norm_mul(factors)
    }

    pub fn pow(base: Expr, exp: Expr) -> Expr {
        norm_pow(base, exp)
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        norm_call(f, arg)
    }

    pub fn opaque(f: OpaqueFn) -> Expr {
        Expr::raw(ExprNode::Opaque(f))
    }

    pub fn neg(&self) -> Expr {
        Expr::mul(vec![Expr::int(-1), self.clone()])
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        Expr::add(vec![self.clone(), other.neg()])
    }

    pub fn div(&self, other: &Expr) -> Expr {
        Expr::mul(vec![self.clone(), Expr::pow(other.clone(), Expr::int(-1))])
    }

    pub fn inv(&self) -> Expr {
        Expr::pow(self.clone(), Expr::int(-1))
    }

    // ---- inspectors ----

    pub fn as_num(&self) -> Option<&BigRational> {
        match self.node() {
            ExprNode::Num(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_integer(&self) -> Option<i64> {
        match self.node() {
            ExprNode::Num(r) if r.is_integer() => r.numer().to_i64(),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&Symbol> {
        match self.node() {
            ExprNode::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_zero_expr(&self) -> bool {
        matches!(self.node(), ExprNode::Num(r) if r.is_zero())
    }

    pub fn is_one_expr(&self) -> bool {
        matches!(self.node(), ExprNode::Num(r) if r.is_one())
    }

    /// Terms of a sum (a non-sum is a single term).
    pub fn terms(&self) -> Vec<Expr> {
        match self.node() {
            ExprNode::Add(ts) => ts.clone(),
            _ => vec![self.clone()],
        }
    }

    /// Factors of a product (a non-product is a single factor).
    pub fn factors(&self) -> Vec<Expr> {
        match self.node() {
            ExprNode::Mul(fs) => fs.clone(),
            _ => vec![self.clone()],
        }
    }

    /// Split into (rational coefficient, remaining factor product).
    pub fn coeff_split(&self) -> (BigRational, Expr) {
        match self.node() {
            ExprNode::Num(r) => (r.clone(), Expr::one()),
            ExprNode::Mul(fs) => {
                if let ExprNode::Num(r) = fs[0].node() {
                    let rest: Vec<Expr> = fs[1..].to_vec();
                    let key = if rest.len() == 1 {
                        rest[0].clone()
                    } else {
                        Expr::raw(ExprNode::Mul(rest))
                    };
                    (r.clone(), key)
                } else {
                    (BigRational::one(), self.clone())
                }
            }
            _ => (BigRational::one(), self.clone()),
        }
    }

    /// Base and exponent view (non-powers have exponent 1).
    pub fn base_exp(&self) -> (Expr, Expr) {
        match self.node() {
            ExprNode::Pow(b, e) => (b.clone(), e.clone()),
            _ => (self.clone(), Expr::one()),
        }
    }

    pub fn free_symbols(&self) -> std::collections::BTreeSet<Symbol> {
        let mut out = std::collections::BTreeSet::new();
        self.visit(&mut |e| {
            match e.node() {
                ExprNode::Sym(s) => {
                    out.insert(s.clone());
                }
                ExprNode::Opaque(f) => {
                    for a in &f.args {
                        out.insert(a.clone());
                    }
                }
                _ => {}
            }
            true
        });
        out
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        let mut found = false;
        self.visit(&mut |e| {
            if let ExprNode::Sym(t) = e.node() {
                if t == s {
                    found = true;
                }
            }
            !found
        });
        found
    }

    pub fn contains_opaque(&self) -> bool {
        let mut found = false;
        self.visit(&mut |e| {
            if matches!(e.node(), ExprNode::Opaque(_)) {
                found = true;
            }
            !found
        });
        found
    }

    /// Pre-order visit; the callback returns false to stop descending.
    pub fn visit<F: FnMut(&Expr) -> bool>(&self, f: &mut F) {
        if !f(self) {
            return;
        }
        match self.node() {
            ExprNode::Add(xs) | ExprNode::Mul(xs) => {
                for x in xs {
                    x.visit(f);
                }
            }
            ExprNode::Pow(b, e) => {
                b.visit(f);
                e.visit(f);
            }
            ExprNode::Call(_, a) => a.visit(f),
            _ => {}
        }
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add(vec![self, rhs])
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::add(vec![self, rhs.neg()])
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(vec![self, rhs])
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

// ---------------------------------------------------------------------------
// normalization
// ---------------------------------------------------------------------------

fn norm_add(terms: Vec<Expr>) -> Expr {
    use std::collections::BTreeMap;
    let mut acc: BTreeMap<Expr, BigRational> = BTreeMap::new();
    let mut stack = terms;
    stack.reverse();
    while let Some(t) = stack.pop() {
        match t.node() {
            ExprNode::Add(ts) => {
                for x in ts.iter().rev() {
                    stack.push(x.clone());
                }
            }
            _ => {
                let (c, key) = t.coeff_split();
                if c.is_zero() {
                    continue;
                }
                let entry = acc.entry(key).or_insert_with(BigRational::zero);
                *entry += c;
            }
        }
    }
    let mut collected: Vec<(Expr, BigRational)> =
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    // constant term last, everything else in expression order
    collected.sort_by(|(a, _), (b, _)| {
        (a.is_one_expr(), a).cmp(&(b.is_one_expr(), b))
    });
    let mut out: Vec<Expr> = Vec::with_capacity(collected.len());
    for (key, c) in collected {
        let term = if key.is_one_expr() {
            Expr::num(c)
        } else if c.is_one() {
            key
        } else {
            // rebuild Num * key without re-entering norm_mul
            let mut fs = vec![Expr::num(c)];
            fs.extend(key.factors());
            Expr::raw(ExprNode::Mul(fs))
        };
        out.push(term);
    }
    match out.len() {
        0 => Expr::zero(),
        1 => out.into_iter().next().unwrap(),
        _ => Expr::raw(ExprNode::Add(out)),
    }
}

fn norm_mul(factors: Vec<Expr>) -> Expr {
    use std::collections::BTreeMap;
    let mut coeff = BigRational::one();
    // base -> exponents (summed at the end)
    let mut powers: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
    let mut exp_args: Vec<Expr> = Vec::new(); // exp() factors collected additively

    let mut stack = factors;
    stack.reverse();
    while let Some(f) = stack.pop() {
        match f.node() {
            ExprNode::Mul(fs) => {
                for x in fs.iter().rev() {
                    stack.push(x.clone());
                }
            }
            ExprNode::Num(r) => {
                if r.is_zero() {
                    return Expr::zero();
                }
                coeff *= r;
            }
            ExprNode::Call(Func::Exp, a) => exp_args.push(a.clone()),
            ExprNode::Pow(b, e) => powers.entry(b.clone()).or_default().push(e.clone()),
            _ => powers.entry(f.clone()).or_default().push(Expr::one()),
        }
    }

    let mut built: Vec<Expr> = Vec::new();
    if !exp_args.is_empty() {
        let a = norm_add(exp_args);
        let e = norm_call(Func::Exp, a);
        if !e.is_one_expr() {
            built.push(e);
        }
    }
    for (base, exps) in powers {
        let exp = canonical_exponent(&norm_add(exps));
        if exp.is_zero_expr() {
            continue;
        }
        built.push(norm_pow(base, exp));
    }

    // norm_pow may have produced numbers, nested products, or sums; fold back.
    let mut flat: Vec<Expr> = Vec::new();
    let mut adds: Vec<Expr> = Vec::new();
    let mut stack = built;
    stack.reverse();
    while let Some(f) = stack.pop() {
        match f.node() {
            ExprNode::Num(r) => {
                if r.is_zero() {
                    return Expr::zero();
                }
                coeff *= r;
            }
            ExprNode::Mul(fs) => {
                for x in fs.iter().rev() {
                    stack.push(x.clone());
                }
            }
            ExprNode::Add(_) => adds.push(f),
            _ => flat.push(f),
        }
    }

    if !adds.is_empty() {
        // Distribute one sum at a time, keeping the rest of the product
        // intact: inverse powers of a sum must collect against the whole sum
        // in the recursive call, not against its scattered summands. The
        // widest sum goes first.
        let (idx, _) = adds
            .iter()
            .enumerate()
            .max_by_key(|(_, a)| a.terms().len())
            .unwrap();
        let split = adds.remove(idx);
        let mut sum_terms = Vec::new();
        for term in split.terms() {
            let mut fs = vec![Expr::num(coeff.clone())];
            fs.extend(flat.iter().cloned());
            fs.extend(adds.iter().cloned());
            fs.push(term);
            sum_terms.push(norm_mul(fs));
        }
        return norm_add(sum_terms);
    }

    flat.sort();
    if flat.is_empty() {
        return Expr::num(coeff);
    }
    if coeff.is_one() && flat.len() == 1 {
        return flat.into_iter().next().unwrap();
    }
    let mut out = Vec::with_capacity(flat.len() + 1);
    if !coeff.is_one() {
        out.push(Expr::num(coeff));
    }
    out.extend(flat);
    if out.len() == 1 {
        out.into_iter().next().unwrap()
    } else {
        Expr::raw(ExprNode::Mul(out))
    }
}

/// Positivity certificate for the power rules. Symbols count as positive by
/// the domain convention: anything raised to a non-integer power is a height,
/// a similarity coordinate, or an exponential, all positive.
fn positive_safe(e: &Expr) -> bool {
    match e.node() {
        ExprNode::Num(r) => r.is_positive(),
        ExprNode::Sym(_) => true,
        ExprNode::Pow(b, _) => positive_safe(b),
        ExprNode::Call(Func::Exp, _) => true,
        ExprNode::Mul(fs) => fs.iter().all(positive_safe),
        _ => false,
    }
}

/// Exact integer n-th root, if it exists.
fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if k == 1 {
        return Some(n.clone());
    }
    if n.is_negative() {
        return None;
    }
    let r = n.nth_root(k);
    if num::pow::pow(r.clone(), k as usize) == *n {
        Some(r)
    } else {
        None
    }
}

fn norm_pow(base: Expr, exp: Expr) -> Expr {
    let exp = canonical_exponent(&exp);
    if exp.is_zero_expr() {
        return Expr::one();
    }
    if exp.is_one_expr() {
        return base;
    }
    if base.is_one_expr() {
        return Expr::one();
    }

    if let ExprNode::Num(b) = base.node() {
        if let Some(n) = exp.as_integer() {
            if b.is_zero() {
                if n > 0 {
                    return Expr::zero();
                }
                // 0^negative left in place; numeric evaluation reports it
                return Expr::raw(ExprNode::Pow(base, exp));
            }
            let mag = num::pow::pow(b.clone(), n.unsigned_abs() as usize);
            return Expr::num(if n >= 0 { mag } else { mag.recip() });
        }
        if let ExprNode::Num(e) = exp.node() {
            if b.is_zero() {
                return if e.is_positive() {
                    Expr::zero()
                } else {
                    Expr::raw(ExprNode::Pow(base, exp))
                };
            }
            // try exact rational root: b^(p/q)
            if b.is_positive() {
                let q = e.denom().to_u32().unwrap_or(0);
                if q > 1 && q <= 64 {
                    if let (Some(rn), Some(rd)) = (exact_root(b.numer(), q), exact_root(b.denom(), q))
                    {
                        let root = BigRational::new(rn, rd);
                        let p = e.numer().to_i64();
                        if let Some(p) = p {
                            let mag = num::pow::pow(root, p.unsigned_abs() as usize);
                            return Expr::num(if p >= 0 { mag } else { mag.recip() });
                        }
                    }
                }
            }
        }
    }

    match base.node() {
        ExprNode::Pow(b2, e2) => {
            let outer_int = exp.as_integer().is_some();
            if outer_int || positive_safe(b2) {
                let merged = canonical_exponent(&norm_mul(vec![e2.clone(), exp]));
                return norm_pow(b2.clone(), merged);
            }
        }
        ExprNode::Call(Func::Exp, a) => {
            return norm_call(Func::Exp, norm_mul(vec![a.clone(), exp]));
        }
        ExprNode::Mul(fs) => {
            if exp.as_integer().is_some() {
                let parts: Vec<Expr> = fs
                    .iter()
                    .map(|f| norm_pow(f.clone(), exp.clone()))
                    .collect();
                return norm_mul(parts);
            }
            let (safe, unsafe_): (Vec<_>, Vec<_>) = fs.iter().cloned().partition(positive_safe);
            if unsafe_.is_empty() {
                let parts: Vec<Expr> = safe
                    .into_iter()
                    .map(|f| norm_pow(f, exp.clone()))
                    .collect();
                return norm_mul(parts);
            }
            if !safe.is_empty() {
                let mut parts: Vec<Expr> = safe
                    .into_iter()
                    .map(|f| norm_pow(f, exp.clone()))
                    .collect();
                let grouped = if unsafe_.len() == 1 {
                    unsafe_.into_iter().next().unwrap()
                } else {
                    Expr::raw(ExprNode::Mul(unsafe_))
                };
                parts.push(Expr::raw(ExprNode::Pow(grouped, exp)));
                return norm_mul(parts);
            }
        }
        ExprNode::Add(_) => {
            if let Some(n) = exp.as_integer() {
                if (2..=EXPAND_POW_LIMIT).contains(&n) {
                    let mut acc = base.clone();
                    for _ in 1..n {
                        acc = norm_mul(vec![acc, base.clone()]);
                    }
                    return acc;
                }
            }
        }
        ExprNode::Call(Func::Cos, u) => {
            // canonical trig polynomials: cos^n -> (1 - sin^2)^(n/2) * cos^(n mod 2)
            if let Some(n) = exp.as_integer() {
                if n >= 2 {
                    let s2 = norm_pow(norm_call(Func::Sin, u.clone()), Expr::int(2));
                    let body = norm_add(vec![Expr::one(), s2.neg()]);
                    let even = norm_pow(body, Expr::int(n / 2));
                    return if n % 2 == 0 {
                        even
                    } else {
                        norm_mul(vec![even, base.clone()])
                    };
                }
            }
        }
        _ => {}
    }

    Expr::raw(ExprNode::Pow(base, exp))
}

/// Leading sign of a normalized expression (by its first term).
fn leading_negative(e: &Expr) -> bool {
    match e.node() {
        ExprNode::Num(r) => r.is_negative(),
        ExprNode::Mul(fs) => matches!(fs[0].node(), ExprNode::Num(r) if r.is_negative()),
        ExprNode::Add(ts) => leading_negative(&ts[0]),
        _ => false,
    }
}

fn norm_call(f: Func, arg: Expr) -> Expr {
    match f {
        Func::Sqrt => return norm_pow(arg, Expr::rat(1, 2)),
        Func::Exp => {
            if arg.is_zero_expr() {
                return Expr::one();
            }
            if let ExprNode::Call(Func::Ln, u) = arg.node() {
                return u.clone();
            }
        }
        Func::Ln => {
            if arg.is_one_expr() {
                return Expr::zero();
            }
            if let ExprNode::Call(Func::Exp, u) = arg.node() {
                return u.clone();
            }
        }
        Func::Sin | Func::Tan | Func::Arctan => {
            if arg.is_zero_expr() {
                return Expr::zero();
            }
            if leading_negative(&arg) {
                return norm_mul(vec![Expr::int(-1), Expr::raw(ExprNode::Call(f, arg.neg()))]);
            }
        }
        Func::Cos => {
            if arg.is_zero_expr() {
                return Expr::one();
            }
            if leading_negative(&arg) {
                return Expr::raw(ExprNode::Call(f, arg.neg()));
            }
        }
        Func::LambertW => {
            if arg.is_zero_expr() {
                return Expr::zero();
            }
        }
    }
    Expr::raw(ExprNode::Call(f, arg))
}

/// Re-normalize an arbitrary tree bottom-up. Constructors already normalize,
/// so this is the identity on anything built through the public API; it is
/// the public `simplify` entry point and is idempotent.
pub fn simplify(e: &Expr) -> Expr {
    match e.node() {
        ExprNode::Num(_) | ExprNode::Sym(_) | ExprNode::Opaque(_) => e.clone(),
        ExprNode::Add(ts) => norm_add(ts.iter().map(simplify).collect()),
        ExprNode::Mul(fs) => norm_mul(fs.iter().map(simplify).collect()),
        ExprNode::Pow(b, x) => norm_pow(simplify(b), simplify(x)),
        ExprNode::Call(f, a) => norm_call(*f, simplify(a)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::symbol::Symbol;

    fn s(name: &str) -> Expr {
        Expr::sym(Symbol::param(name))
    }

    #[test]
    fn sums_collect_and_cancel() {
        let g = s("gamma");
        let x = s("x");
        // (gamma+1)x - gamma*x - x == 0
        let e = Expr::add(vec![
            Expr::mul(vec![Expr::add(vec![g.clone(), Expr::one()]), x.clone()]),
            Expr::mul(vec![g, x.clone()]).neg(),
            x.neg(),
        ]);
        assert!(e.is_zero_expr());
    }

    #[test]
    fn pythagorean_identity_is_canonical() {
        let t = Expr::sym(Symbol::indep("t"));
        let e = Expr::add(vec![
            Expr::pow(Expr::call(Func::Sin, t.clone()), Expr::int(2)),
            Expr::pow(Expr::call(Func::Cos, t), Expr::int(2)),
        ]);
        assert!(e.is_one_expr());
    }

    #[test]
    fn power_collection_merges_exponents() {
        let h = s("h");
        let g = s("gamma");
        // h^(gamma-2) * h = h^(gamma-1)
        let e = Expr::mul(vec![
            Expr::pow(h.clone(), Expr::add(vec![g.clone(), Expr::int(-2)])),
            h.clone(),
        ]);
        let want = Expr::pow(h, Expr::add(vec![g, Expr::int(-1)]));
        assert_eq!(e, want);
    }

    #[test]
    fn exponent_fraction_routes_agree() {
        let sig = s("sigma");
        let g = s("gamma");
        let gp1 = Expr::add(vec![g.clone(), Expr::one()]);
        let q = Expr::mul(vec![Expr::int(2), gp1.clone().inv()]);
        let p = Expr::mul(vec![
            Expr::add(vec![g.clone(), Expr::int(-1)]),
            gp1.clone().inv(),
        ]);
        // sigma^(2q) * sigma^(p-1)  ==  sigma^q, two routes to 2/(gamma+1)
        let lhs = Expr::mul(vec![
            Expr::pow(sig.clone(), Expr::mul(vec![Expr::int(2), q.clone()])),
            Expr::pow(sig.clone(), Expr::add(vec![p, Expr::int(-1)])),
        ]);
        let rhs = Expr::pow(sig, q);
        let _ = gp1;
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn products_distribute_over_sums() {
        let a = s("a");
        let b = s("b");
        let c = s("c");
        let e = Expr::mul(vec![Expr::add(vec![a.clone(), b.clone()]), c.clone()]);
        let want = Expr::add(vec![
            Expr::mul(vec![a, c.clone()]),
            Expr::mul(vec![b, c]),
        ]);
        assert_eq!(e, want);
    }

    #[test]
    fn inverse_collects_against_sum_base() {
        let g = s("gamma");
        let gp1 = Expr::add(vec![g, Expr::one()]);
        let e = Expr::mul(vec![gp1.clone(), gp1.inv()]);
        assert!(e.is_one_expr());
    }

    #[test]
    fn exp_factors_merge() {
        let t = Expr::sym(Symbol::indep("t"));
        let a = Expr::call(Func::Exp, t.clone());
        let b = Expr::call(Func::Exp, t.neg());
        assert!(Expr::mul(vec![a, b]).is_one_expr());
    }

    #[test]
    fn nested_power_contracts_for_positive_base() {
        let z = s("Z");
        let g = s("gamma");
        // (Z^-1)^gamma = Z^-gamma
        let e = Expr::pow(Expr::pow(z.clone(), Expr::int(-1)), g.clone());
        let want = Expr::pow(z, g.neg());
        assert_eq!(e, want);
    }

    #[test]
    fn rational_powers_evaluate_exactly() {
        assert_eq!(Expr::pow(Expr::int(4), Expr::rat(1, 2)), Expr::int(2));
        assert_eq!(Expr::pow(Expr::int(8), Expr::rat(2, 3)), Expr::int(4));
        assert_eq!(Expr::pow(Expr::rat(1, 4), Expr::rat(-1, 2)), Expr::int(2));
        // no exact root: stays symbolic
        let e = Expr::pow(Expr::int(2), Expr::rat(1, 2));
        assert!(matches!(e.node(), ExprNode::Pow(_, _)));
    }

    #[test]
    fn simplify_is_idempotent() {
        let t = Expr::sym(Symbol::indep("t"));
        let g = s("gamma");
        let e = Expr::add(vec![
            Expr::pow(Expr::call(Func::Cos, t.clone()), Expr::int(3)),
            Expr::mul(vec![g, Expr::call(Func::Sin, t)]),
        ]);
        assert_eq!(simplify(&e), e);
        assert_eq!(simplify(&simplify(&e)), simplify(&e));
    }
}
