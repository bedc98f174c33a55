//! Zero-equivalence testing.
//!
//! Structural normalization alone cannot cancel sums of fractions with
//! polynomial denominators, so the structural test clears denominators first:
//! any sum-base carrying a negative power is multiplied out (a nonzero
//! factor, harmless for a zero test) until the expression is denominator-free,
//! then re-normalized. If that still fails, the verdict falls back to random
//! numeric sampling at 20 points with relative tolerance 1e-10, drawing all
//! symbols from a positive box so that symbolic powers and logarithms stay in
//! domain.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::eval::eval;
use super::expr::{simplify, Expr, ExprNode};
use super::symbol::Symbol;

pub const SAMPLE_POINTS: usize = 20;
pub const SAMPLE_TOL: f64 = 1e-10;
pub const DEFAULT_SEED: u64 = 0x5357_5359_4d31; // stable default for reports

#[derive(Debug, Clone, PartialEq)]
pub enum ZeroVerdict {
    /// Normal form (after denominator clearing) is literally zero.
    StructuralZero,
    /// Indistinguishable from zero at 20 random points, tolerance 1e-10.
    SampledZero { max_rel: f64 },
    /// A witness point where the expression is clearly nonzero.
    NonZero {
        witness: BTreeMap<Symbol, f64>,
        value: f64,
    },
    /// Sampling kept leaving the function domain.
    Indeterminate,
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        matches!(
            self,
            ZeroVerdict::StructuralZero | ZeroVerdict::SampledZero { .. }
        )
    }

    pub fn is_structural(&self) -> bool {
        matches!(self, ZeroVerdict::StructuralZero)
    }
}

/// Collect sum-bases that occur with "denominator-like" exponents: a numeric
/// negative exponent, or a symbolic one that samples negative.
fn denominator_bases(e: &Expr) -> Vec<(Expr, Expr)> {
    let mut found: Vec<(Expr, Expr)> = Vec::new();
    e.visit(&mut |sub| {
        if let ExprNode::Pow(b, x) = sub.node() {
            if matches!(b.node(), ExprNode::Add(_)) {
                let negative = if let Some(r) = x.as_num() {
                    use num::Signed;
                    r.is_negative()
                } else {
                    // probe symbolic exponents at a generic positive point
                    let mut asg = BTreeMap::new();
                    for s in x.free_symbols() {
                        asg.insert(s, 2.37);
                    }
                    matches!(eval(x, &asg), Ok(v) if v < 0.0)
                };
                if negative && !found.iter().any(|(fb, fx)| fb == b && fx == x) {
                    found.push((b.clone(), x.clone()));
                }
            }
        }
        true
    });
    found
}

/// Multiply away polynomial denominators and re-normalize. Returns the
/// cleared expression; zero-ness is preserved because every factor used is
/// generically nonzero.
pub fn clear_denominators(e: &Expr) -> Expr {
    let mut cur = simplify(e);
    for _ in 0..8 {
        if cur.is_zero_expr() {
            return cur;
        }
        let dens = denominator_bases(&cur);
        if dens.is_empty() {
            return cur;
        }
        let mut factors = vec![cur.clone()];
        for (b, x) in dens {
            factors.push(Expr::pow(b, x.neg()));
        }
        let next = Expr::mul(factors);
        if next == cur {
            return cur;
        }
        cur = next;
    }
    cur
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn draw(&mut self) -> f64 {
        self.rng.gen_range(0.2..2.2)
    }

    /// Assign every free symbol a random positive value.
    pub fn assignment(&mut self, e: &Expr) -> BTreeMap<Symbol, f64> {
        e.free_symbols()
            .into_iter()
            .map(|s| (s, self.draw()))
            .collect()
    }
}

/// Magnitude scale of a sum at an assignment: sum of |term| values. Used to
/// make the zero tolerance relative.
fn scale_at(e: &Expr, asg: &BTreeMap<Symbol, f64>) -> f64 {
    let mut total = 0.0;
    for t in e.terms() {
        if let Ok(v) = eval(&t, asg) {
            total += v.abs();
        }
    }
    total
}

pub fn is_zero_seeded(e: &Expr, seed: u64) -> ZeroVerdict {
    let cleared = clear_denominators(e);
    if cleared.is_zero_expr() {
        return ZeroVerdict::StructuralZero;
    }
    if cleared.contains_opaque() {
        // opaque markers cannot be sampled; a nonzero normal form is the answer
        return ZeroVerdict::NonZero {
            witness: BTreeMap::new(),
            value: f64::NAN,
        };
    }
    let mut sampler = Sampler::new(seed);
    let mut max_rel: f64 = 0.0;
    let mut good_points = 0;
    let mut attempts = 0;
    while good_points < SAMPLE_POINTS && attempts < 40 * SAMPLE_POINTS {
        attempts += 1;
        let asg = sampler.assignment(&cleared);
        match eval(&cleared, &asg) {
            Ok(v) => {
                let scale = scale_at(&cleared, &asg);
                let rel = v.abs() / (1.0 + scale);
                if rel > SAMPLE_TOL {
                    return ZeroVerdict::NonZero {
                        witness: asg,
                        value: v,
                    };
                }
                max_rel = max_rel.max(rel);
                good_points += 1;
            }
            Err(_) => continue,
        }
    }
    if good_points == SAMPLE_POINTS {
        ZeroVerdict::SampledZero { max_rel }
    } else {
        ZeroVerdict::Indeterminate
    }
}

pub fn is_zero(e: &Expr) -> ZeroVerdict {
    is_zero_seeded(e, DEFAULT_SEED)
}

/// Convenience: equality as zero-ness of the difference.
pub fn equivalent(a: &Expr, b: &Expr) -> ZeroVerdict {
    is_zero(&a.sub(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::expr::Func;

    fn p(name: &str) -> Expr {
        Expr::sym(Symbol::param(name))
    }

    #[test]
    fn clearing_cancels_fraction_identities() {
        // gamma/(gamma+1) + 1/(gamma+1) - 1 == 0
        let g = p("gamma");
        let gp1 = Expr::add(vec![g.clone(), Expr::one()]);
        let e = Expr::add(vec![
            Expr::mul(vec![g, gp1.clone().inv()]),
            gp1.inv(),
            Expr::int(-1),
        ]);
        assert_eq!(is_zero(&e), ZeroVerdict::StructuralZero);
    }

    #[test]
    fn clearing_handles_symbolic_exponents() {
        // (H0-w)^(-gamma) * (H0-w)^gamma - 1 == 0
        let base = Expr::add(vec![p("H0"), p("w").neg()]);
        let g = p("gamma");
        let e = Expr::add(vec![
            Expr::mul(vec![
                Expr::pow(base.clone(), g.clone().neg()),
                Expr::pow(base, g),
            ]),
            Expr::int(-1),
        ]);
        assert!(is_zero(&e).is_structural());
    }

    #[test]
    fn sampling_catches_true_nonzero() {
        let e = Expr::add(vec![p("x"), Expr::int(1)]);
        assert!(matches!(is_zero(&e), ZeroVerdict::NonZero { .. }));
    }

    #[test]
    fn sampled_zero_for_transcendental_identity() {
        // tan(t) * cos(t) - sin(t) == 0 (not covered by the rewrite table)
        let t = Expr::sym(Symbol::indep("t"));
        let e = Expr::add(vec![
            Expr::mul(vec![
                Expr::call(Func::Tan, t.clone()),
                Expr::call(Func::Cos, t.clone()),
            ]),
            Expr::call(Func::Sin, t).neg(),
        ]);
        let v = is_zero(&e);
        assert!(v.is_zero(), "verdict {v:?}");
    }
}
