//! Small numeric helpers shared across the crate: log-domain arithmetic,
//! stable hyperbolic functions, and unit-ball volumes.

/// Volume of the unit ball in `R^d`, so that `d * unit_ball_volume(d)` is the
/// surface area of the unit sphere `S^{d-1}`.
///
/// Uses the recursion `w(d) = 2 pi w(d-2) / d` with `w(1) = 2`, `w(2) = pi`.
pub fn unit_ball_volume(dim: u32) -> f64 {
    assert!(dim >= 1, "dimension must be at least 1");
    match dim {
        1 => 2.0,
        2 => std::f64::consts::PI,
        d => 2.0 * std::f64::consts::PI * unit_ball_volume(d - 2) / d as f64,
    }
}

/// Surface area of the unit sphere `S^{d-1}` in `R^d`.
pub fn unit_sphere_area(dim: u32) -> f64 {
    dim as f64 * unit_ball_volume(dim)
}

/// `log(sinh(x))` without overflow for large `x`.
///
/// For `x >= 1` uses `x + log((1 - e^{-2x})/2)`; for small `x` the direct
/// formula is accurate.
pub fn log_sinh(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x >= 1.0 {
        x + ((-(-2.0 * x).exp()).ln_1p() - std::f64::consts::LN_2)
    } else {
        x.sinh().ln()
    }
}

/// `log(cosh(x))` without overflow for large `x`.
pub fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + ((-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2)
}

/// `log(sinh(sqrt(c) r) / sqrt(c))` for constant curvature `c > 0`, handling
/// large arguments in the log domain. For `c = 0` this degenerates to
/// `log(r)` (the Euclidean comparison function).
pub fn log_sinh_ratio(c: f64, r: f64) -> f64 {
    debug_assert!(c >= 0.0 && r >= 0.0);
    if r == 0.0 {
        return f64::NEG_INFINITY;
    }
    let sc = c.sqrt();
    let x = sc * r;
    if x < 1e-4 {
        // sinh(x)/x = 1 + x^2/6 + x^4/120 + ...
        r.ln() + (x * x / 6.0 * (1.0 + x * x / 20.0)).ln_1p()
    } else {
        log_sinh(x) - sc.ln()
    }
}

/// `sinh(sqrt(c) r) / sqrt(c)` with the continuous `c -> 0` limit `r`.
/// Overflows to `+inf` for very large arguments; use [`log_sinh_ratio`]
/// when that matters.
pub fn sinh_ratio(c: f64, r: f64) -> f64 {
    debug_assert!(c >= 0.0 && r >= 0.0);
    let sc = c.sqrt();
    let x = sc * r;
    if x < 1e-4 {
        r * (1.0 + x * x / 6.0 * (1.0 + x * x / 20.0))
    } else {
        x.sinh() / sc
    }
}

/// `log(sum_i w_i exp(g_i))` evaluated stably. Weights must be non-negative.
pub fn log_weighted_sum_exp(terms: impl Iterator<Item = (f64, f64)> + Clone) -> f64 {
    let gmax = terms
        .clone()
        .filter(|(w, _)| *w > 0.0)
        .map(|(_, g)| g)
        .fold(f64::NEG_INFINITY, f64::max);
    if gmax == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if gmax == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = terms
        .filter(|(w, _)| *w > 0.0)
        .map(|(w, g)| w * (g - gmax).exp())
        .sum();
    gmax + sum.ln()
}

/// A real number stored as sign and log of absolute value, for quantities
/// (energy bounds along spreading scans) far outside the `f64` range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedLog {
    sign: i8,
    log_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0,
        log_abs: f64::NEG_INFINITY,
    };

    pub fn new(sign: i8, log_abs: f64) -> Self {
        if sign == 0 || log_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self {
                sign: sign.signum(),
                log_abs,
            }
        }
    }

    pub fn from_f64(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            Self {
                sign: if v > 0.0 { 1 } else { -1 },
                log_abs: v.abs().ln(),
            }
        }
    }

    /// Positive number from its log.
    pub fn from_log(log_abs: f64) -> Self {
        Self::new(1, log_abs)
    }

    pub fn neg(self) -> Self {
        Self {
            sign: -self.sign,
            log_abs: self.log_abs,
        }
    }

    /// Multiply by a positive factor.
    pub fn scale(self, factor: f64) -> Self {
        debug_assert!(factor > 0.0);
        if self.sign == 0 {
            self
        } else {
            Self {
                sign: self.sign,
                log_abs: self.log_abs + factor.ln(),
            }
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn log_abs(&self) -> f64 {
        self.log_abs
    }

    /// Back to `f64`; saturates to `±inf` outside the representable range.
    pub fn to_f64(self) -> f64 {
        self.sign as f64 * self.log_abs.exp()
    }

    pub fn add(self, other: Self) -> Self {
        if self.sign == 0 {
            return other;
        }
        if other.sign == 0 {
            return self;
        }
        let (big, small) = if self.log_abs >= other.log_abs {
            (self, other)
        } else {
            (other, self)
        };
        let delta = (small.log_abs - big.log_abs).exp();
        if big.sign == small.sign {
            Self::new(big.sign, big.log_abs + delta.ln_1p())
        } else if delta == 1.0 {
            Self::ZERO
        } else {
            Self::new(big.sign, big.log_abs + (-delta).ln_1p())
        }
    }
}

impl PartialOrd for SignedLog {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering;
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => {}
            ord => return Some(ord),
        }
        match self.sign {
            0 => Some(Ordering::Equal),
            1 => self.log_abs.partial_cmp(&other.log_abs),
            _ => other.log_abs.partial_cmp(&self.log_abs),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ball_volumes_match_closed_forms() {
        assert_relative_eq!(unit_ball_volume(2), std::f64::consts::PI, max_relative = 1e-15);
        assert_relative_eq!(
            unit_ball_volume(3),
            4.0 * std::f64::consts::PI / 3.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            unit_ball_volume(4),
            std::f64::consts::PI * std::f64::consts::PI / 2.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(unit_sphere_area(2), 2.0 * std::f64::consts::PI, max_relative = 1e-15);
    }

    #[test]
    fn log_sinh_stable_and_accurate() {
        assert_relative_eq!(log_sinh(0.5), 0.5f64.sinh().ln(), max_relative = 1e-14);
        assert_relative_eq!(log_sinh(30.0), 30.0f64.sinh().ln(), max_relative = 1e-14);
        // far beyond overflow: log sinh(x) ~ x - log 2
        assert_relative_eq!(log_sinh(1e4), 1e4 - std::f64::consts::LN_2, max_relative = 1e-14);
    }

    #[test]
    fn sinh_ratio_euclidean_limit() {
        // series tail: sinh(x)/x - 1 ~ x^2/6
        assert_relative_eq!(sinh_ratio(1e-12, 1.0), 1.0, epsilon = 1e-12);
        assert_relative_eq!(sinh_ratio(0.0, 5.0), 5.0, max_relative = 1e-15);
        assert_relative_eq!(sinh_ratio(4.0, 2.0), 4.0f64.sinh() / 2.0, max_relative = 1e-14);
        assert_relative_eq!(
            log_sinh_ratio(4.0, 2.0),
            (4.0f64.sinh() / 2.0).ln(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn signed_log_arithmetic() {
        let a = SignedLog::from_f64(-3.0);
        let b = SignedLog::from_f64(5.0);
        assert_relative_eq!(a.add(b).to_f64(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(b.add(a).to_f64(), 2.0, max_relative = 1e-14);
        assert!(a < b);
        assert!(SignedLog::from_f64(-1e4) < SignedLog::from_f64(-1.0));
        // magnitudes far outside f64 range still compare correctly
        let huge_neg = SignedLog::new(-1, 5000.0);
        let huger_neg = SignedLog::new(-1, 6000.0);
        assert!(huger_neg < huge_neg);
        assert_eq!(SignedLog::from_f64(2.0).add(SignedLog::from_f64(-2.0)), SignedLog::ZERO);
    }

    #[test]
    fn weighted_logsumexp_matches_direct_sum() {
        let terms: [(f64, f64); 3] = [(0.5, 1.0), (0.25, -2.0), (1.5, 3.0)];
        let direct: f64 = terms.iter().map(|(w, g)| w * g.exp()).sum();
        let lse = log_weighted_sum_exp(terms.iter().copied());
        assert_relative_eq!(lse, direct.ln(), max_relative = 1e-14);
        // extreme magnitudes
        let terms: [(f64, f64); 2] = [(1.0, 5000.0), (2.0, 4990.0)];
        let lse = log_weighted_sum_exp(terms.iter().copied());
        assert_relative_eq!(lse, 5000.0 + (1.0 + 2.0 * (-10.0f64).exp()).ln(), max_relative = 1e-14);
    }
}
