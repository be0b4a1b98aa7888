//! Quadrature rules: Gauss–Legendre panels for radial integrals and
//! Gauss–Gegenbauer rules for the angular weight `(1-u^2)^{(d-3)/2}` that
//! appears when the sphere average is reduced to one angle.

use crate::error::{Error, Result};
use crate::numeric::log_weighted_sum_exp;

/// Nodes and weights of an n-point Gauss–Legendre rule on `[-1, 1]`.
///
/// Newton iteration on the Legendre recurrence; standard Chebyshev-based
/// initial guesses converge in a handful of steps for any practical `n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_with_derivative(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A reusable Gauss–Legendre rule mapped onto arbitrary intervals.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut sum = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        sum * half
    }

    /// `log( integral_a^b exp(g(t)) dt )`, for integrands far outside the
    /// `f64` range. `g` returns the log of the (positive) integrand.
    pub fn integrate_log<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut g: F) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let terms: Vec<(f64, f64)> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| (w * half, g(mid + half * x)))
            .collect();
        log_weighted_sum_exp(terms.iter().copied())
    }
}

/// Composite 32-node Gauss–Legendre over `[a, b]`, doubling the panel count
/// until two successive levels agree to `rel_tol` (relative, floored by a
/// small absolute tolerance). Smooth integrands converge in 2-3 levels.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(a: f64, b: f64, rel_tol: f64, mut f: F) -> Result<f64> {
    if !(b >= a) {
        return Err(Error::InvalidParameter(format!(
            "integration bounds out of order: [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    let rule = GaussLegendre::new(32);
    let mut panels = 1usize;
    let mut previous = composite(&rule, a, b, panels, &mut f);
    for _ in 0..16 {
        panels *= 2;
        let current = composite(&rule, a, b, panels, &mut f);
        let scale = current.abs().max(previous.abs()).max(1e-300);
        if (current - previous).abs() <= rel_tol * scale + 1e-305 {
            return Ok(current);
        }
        previous = current;
    }
    Err(Error::Divergent(format!(
        "panel refinement did not converge on [{a}, {b}]"
    )))
}

fn composite<F: FnMut(f64) -> f64>(rule: &GaussLegendre, a: f64, b: f64, panels: usize, f: &mut F) -> f64 {
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for i in 0..panels {
        let lo = a + i as f64 * h;
        sum += rule.integrate(lo, lo + h, &mut *f);
    }
    sum
}

/// Log-domain variant of [`integrate_adaptive`]: returns
/// `log(integral exp(g))` for positive integrands given by their log.
pub fn integrate_adaptive_log<F: FnMut(f64) -> f64>(
    a: f64,
    b: f64,
    rel_tol: f64,
    mut g: F,
) -> Result<f64> {
    if !(b >= a) {
        return Err(Error::InvalidParameter(format!(
            "integration bounds out of order: [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(f64::NEG_INFINITY);
    }
    let rule = GaussLegendre::new(32);
    let mut panels = 1usize;
    let mut previous = composite_log(&rule, a, b, panels, &mut g);
    for _ in 0..16 {
        panels *= 2;
        let current = composite_log(&rule, a, b, panels, &mut g);
        // agreement of logs to rel_tol means relative agreement of values
        if (current - previous).abs() <= rel_tol.max(1e-14)
            || (current == f64::NEG_INFINITY && previous == f64::NEG_INFINITY)
        {
            return Ok(current);
        }
        previous = current;
    }
    Err(Error::Divergent(format!(
        "log-domain panel refinement did not converge on [{a}, {b}]"
    )))
}

fn composite_log<F: FnMut(f64) -> f64>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    panels: usize,
    g: &mut F,
) -> f64 {
    let h = (b - a) / panels as f64;
    let parts: Vec<(f64, f64)> = (0..panels)
        .map(|i| {
            let lo = a + i as f64 * h;
            (1.0, rule.integrate_log(lo, lo + h, &mut *g))
        })
        .collect();
    log_weighted_sum_exp(parts.iter().copied())
}

/// Gauss–Gegenbauer rule: nodes `u_i` and weights `w_i` so that
/// `sum w_i f(u_i)` approximates `integral_{-1}^{1} f(u) (1-u^2)^alpha du`,
/// with `alpha = (d-3)/2` coming from the angular substitution `u = cos(phi)`.
///
/// Weights are produced up to a common positive factor; the caller is
/// expected to normalize by their sum (every use here divides by the weight
/// of the constant function).
#[derive(Clone, Debug)]
pub struct GaussGegenbauer {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussGegenbauer {
    pub fn new(n: usize, alpha: f64) -> Self {
        assert!(n >= 2);
        assert!(alpha > -1.0);
        // closed forms for the two half-integer cases used most often
        if (alpha + 0.5).abs() < 1e-14 {
            // Chebyshev, first kind: weight (1-u^2)^{-1/2}
            let nodes: Vec<f64> = (0..n)
                .map(|i| (std::f64::consts::PI * (2.0 * i as f64 + 1.0) / (2.0 * n as f64)).cos())
                .collect();
            let weights = vec![std::f64::consts::PI / n as f64; n];
            return Self { nodes, weights };
        }
        if (alpha - 0.5).abs() < 1e-14 {
            // Chebyshev, second kind: weight (1-u^2)^{1/2}
            let mut nodes = Vec::with_capacity(n);
            let mut weights = Vec::with_capacity(n);
            for i in 0..n {
                let t = std::f64::consts::PI * (i as f64 + 1.0) / (n as f64 + 1.0);
                nodes.push(t.cos());
                weights.push(std::f64::consts::PI / (n as f64 + 1.0) * t.sin() * t.sin());
            }
            return Self { nodes, weights };
        }
        if alpha.abs() < 1e-14 {
            let (nodes, weights) = gauss_legendre(n);
            return Self { nodes, weights };
        }
        // general ultraspherical case: roots of the Jacobi polynomial
        // P_n^{(alpha,alpha)} by bracketing + Newton, weights from the
        // derivative (up to a constant factor, normalized by the caller)
        let mut roots = Vec::with_capacity(n);
        let grid = 8 * n;
        let mut prev_x = -1.0 + 1e-12;
        let mut prev_v = jacobi_with_derivative(n, alpha, prev_x).0;
        for i in 1..=grid {
            let x = -1.0 + 2.0 * i as f64 / grid as f64 - 1e-12;
            let v = jacobi_with_derivative(n, alpha, x).0;
            if prev_v == 0.0 {
                roots.push(prev_x);
            } else if prev_v * v < 0.0 {
                roots.push(refine_root(n, alpha, prev_x, x));
            }
            prev_x = x;
            prev_v = v;
        }
        assert_eq!(roots.len(), n, "failed to bracket all Jacobi roots");
        let weights: Vec<f64> = roots
            .iter()
            .map(|&x| {
                let (_, d) = jacobi_with_derivative(n, alpha, x);
                1.0 / ((1.0 - x * x) * d * d)
            })
            .collect();
        Self { nodes: roots, weights }
    }

    /// Sum of the weights, i.e. the rule applied to the constant 1.
    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

fn refine_root(n: usize, alpha: f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (p, d) = jacobi_with_derivative(n, alpha, x);
        if p == 0.0 {
            return x;
        }
        if jacobi_with_derivative(n, alpha, lo).0 * p < 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let newton = x - p / d;
        x = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-15 {
            break;
        }
    }
    x
}

/// Value and derivative of the Jacobi polynomial `P_n^{(a,a)}` at `x`.
///
/// Derivative from the equal-parameter case of the mixed relation
/// `(2n+2a)(1-x^2) P_n' = -n(2n+2a) x P_n + 2(n+a)^2 P_{n-1}`.
fn jacobi_with_derivative(n: usize, a: f64, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p0 = 1.0;
    let mut p1 = (a + 1.0) * x;
    for k in 2..=n {
        let kf = k as f64;
        let c1 = 2.0 * kf * (kf + 2.0 * a) * (2.0 * kf + 2.0 * a - 2.0);
        let c2 = (2.0 * kf + 2.0 * a - 1.0) * (2.0 * kf + 2.0 * a) * (2.0 * kf + 2.0 * a - 2.0);
        let c4 = 2.0 * (kf + a - 1.0) * (kf + a - 1.0) * (2.0 * kf + 2.0 * a);
        let p2 = (c2 * x * p1 - c4 * p0) / c1;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let denom = (2.0 * nf + 2.0 * a) * (1.0 - x * x);
    let d = if denom.abs() < 1e-300 {
        0.0
    } else {
        (-nf * (2.0 * nf + 2.0 * a) * x * p1 + 2.0 * (nf + a) * (nf + a) * p0) / denom
    };
    (p1, d)
}
