//! Explicit constants and numerical verification of the functional
//! inequalities: the sinh-weighted interpolation inequality bounding
//! `integral rho^q` by mass and a weighted moment (with the constant
//! `C_1`), its generalization to solved comparison functions (constant
//! `C_1~` built from the profile value at the origin), the centred-measure
//! convexity inequality, the reversed-HLS Euclidean limit, tail bounds, and
//! the resulting energy lower bound.

use crate::energy::{
    growth_condition_check, total_energy, GrowthMode, InteractionKernel, InteractionOpts, Measure,
    TrendClass,
};
use crate::error::{Error, Result};
use crate::geometry::PsiSolution;
use crate::measures::{DiscreteMeasure, Moment, Potential, RadialDensity};
use crate::numeric::{log_sinh_ratio, sinh_ratio, unit_ball_volume, SignedLog};

/// Default relative tolerance separating numerical noise from a genuine
/// violation.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// The explicit constants of the interpolation inequality
/// `integral rho^q <= C_1 (integral rho)^{(1-p)q} (sinh-moment_lambda)^{pq}`.
#[derive(Clone, Copy, Debug)]
pub struct CarlsonLevinConstants {
    pub lambda: f64,
    pub q: f64,
    pub c_m: f64,
    pub dim: u32,
    /// `p = (d-1)(1-q)/(lambda q)`, in `(0,1)` exactly when `lambda` clears
    /// the threshold
    pub p: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub c1: f64,
}

/// `(d-1)(1-q)/q`: the admissible-moment threshold for `lambda`.
pub use crate::energy::lambda_threshold;

/// Closed-form evaluation of the constants; `c_m` is the (constant)
/// curvature-bound parameter, which must be positive.
pub fn cl_constants(lambda: f64, q: f64, c_m: f64, dim: u32) -> Result<CarlsonLevinConstants> {
    if !(0.0 < q && q < 1.0) {
        return Err(Error::InvalidParameter(format!("need 0 < q < 1, got {q}")));
    }
    if dim < 2 {
        return Err(Error::InvalidParameter(format!("need dim >= 2, got {dim}")));
    }
    if !(c_m > 0.0) {
        return Err(Error::InvalidParameter(format!("need c_m > 0, got {c_m}")));
    }
    let threshold = lambda_threshold(dim, q);
    if !(lambda > threshold) {
        return Err(Error::InvalidParameter(format!(
            "need lambda > (d-1)(1-q)/q = {threshold}, got {lambda}"
        )));
    }
    let d = dim as f64;
    let area = d * unit_ball_volume(dim);
    let alpha1 = (area / (c_m.sqrt() * (d - 1.0))).powf(1.0 - q);
    let alpha2 = (area * (1.0 - q) / (c_m.sqrt() * (lambda * q - (1.0 - q) * (d - 1.0)))).powf(1.0 - q);
    let beta1 = (1.0 - q) * (d - 1.0);
    let beta2 = lambda * q - (1.0 - q) * (d - 1.0);
    let p = beta1 / (beta1 + beta2);
    let c1 = (alpha1.powf(beta2) * alpha2.powf(beta1)).powf(1.0 / (beta1 + beta2))
        * ((beta2 / beta1).powf(beta1 / (beta1 + beta2))
            + (beta1 / beta2).powf(beta2 / (beta1 + beta2)));
    Ok(CarlsonLevinConstants {
        lambda,
        q,
        c_m,
        dim,
        p,
        alpha1,
        alpha2,
        beta1,
        beta2,
        c1,
    })
}

/// Variant of the constants for a solved comparison function: identical
/// formulas with `sqrt(c_m)` replaced by `sqrt(c_m(0))`, the profile value
/// at the origin (which must be positive for the constants to be finite).
pub fn cl_constants_general(
    lambda: f64,
    q: f64,
    profile_at_origin: f64,
    dim: u32,
) -> Result<CarlsonLevinConstants> {
    if !(profile_at_origin > 0.0) {
        return Err(Error::InvalidParameter(
            "the generalized constants need c(0) > 0; use a profile with a positive floor".into(),
        ));
    }
    cl_constants(lambda, q, profile_at_origin, dim)
}

/// Outcome of one inequality check: `passed` holds exactly when
/// `ratio = lhs/rhs <= 1 + tolerance` (degenerate cases pass with the flag
/// set).
#[derive(Clone, Copy, Debug)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub constant_used: f64,
    pub passed: bool,
    pub tolerance: f64,
    pub degenerate: bool,
}

impl InequalityReport {
    fn from_logs(log_lhs: f64, log_rhs: f64, constant_used: f64, tolerance: f64) -> Self {
        if log_lhs == f64::NEG_INFINITY {
            // zero left side: trivially true
            return Self {
                lhs: 0.0,
                rhs: log_rhs.exp(),
                ratio: 0.0,
                constant_used,
                passed: true,
                tolerance,
                degenerate: true,
            };
        }
        if log_rhs == f64::INFINITY {
            return Self {
                lhs: log_lhs.exp(),
                rhs: f64::INFINITY,
                ratio: 0.0,
                constant_used,
                passed: true,
                tolerance,
                degenerate: true,
            };
        }
        let ratio = (log_lhs - log_rhs).exp();
        Self {
            lhs: log_lhs.exp(),
            rhs: log_rhs.exp(),
            ratio,
            constant_used,
            passed: ratio <= 1.0 + tolerance,
            tolerance,
            degenerate: false,
        }
    }
}

/// Checks `integral rho^q dV <= C_1 (integral rho dV)^{(1-p)q} (sinh-moment)^{pq}`
/// on a constant-curvature manifold with `c > 0` playing the role of the
/// curvature bound. The density need not be normalized.
pub fn verify_carlson_levin(rho: &RadialDensity, lambda: f64, q: f64) -> Result<InequalityReport> {
    let c = rho.manifold().constant_curvature().ok_or_else(|| {
        Error::UnsupportedManifold("the inequality check needs constant curvature".into())
    })?;
    if !(c > 0.0) {
        return Err(Error::Precondition(
            "the constant-curvature inequality needs c > 0 (see the reversed-HLS check for the Euclidean limit)"
                .into(),
        ));
    }
    let constants = cl_constants(lambda, q, c, rho.dim())?;
    let moment = rho.sinh_moment(lambda)?;
    carlson_levin_report(rho, &constants, moment, DEFAULT_TOLERANCE)
}

/// Generalized version: the moment weight is a solved comparison function
/// `psi` and the constant uses the profile value at the origin.
pub fn verify_carlson_levin_general(
    rho: &RadialDensity,
    lambda: f64,
    q: f64,
    psi: &PsiSolution,
    profile_at_origin: f64,
) -> Result<InequalityReport> {
    let constants = cl_constants_general(lambda, q, profile_at_origin, rho.dim())?;
    let moment = rho.psi_moment(lambda, psi)?;
    carlson_levin_report(rho, &constants, moment, DEFAULT_TOLERANCE)
}

fn carlson_levin_report(
    rho: &RadialDensity,
    constants: &CarlsonLevinConstants,
    moment: Moment,
    tolerance: f64,
) -> Result<InequalityReport> {
    let q = constants.q;
    let p = constants.p;
    let lhs = rho.weighted_integral(|_, v| if v > 0.0 { v.powf(q) } else { 0.0 });
    let log_lhs = if lhs > 0.0 { lhs.ln() } else { f64::NEG_INFINITY };
    let mass = rho.mass();
    let log_rhs = match moment {
        Moment::Divergent => f64::INFINITY,
        Moment::Finite(_, log_m) => {
            if mass <= 0.0 {
                f64::NEG_INFINITY
            } else {
                constants.c1.ln() + (1.0 - p) * q * mass.ln() + p * q * log_m
            }
        }
    };
    Ok(InequalityReport::from_logs(log_lhs, log_rhs, constants.c1, tolerance))
}

/// Solves `(sinh(sqrt(c_m) R)/sqrt(c_m))^{beta1+beta2} =
/// (alpha2 beta2 / (alpha1 beta1)) (moment/mass)^q` for the balancing
/// radius by bisection on the monotone left side.
pub fn optimal_radius(constants: &CarlsonLevinConstants, mass: f64, sinh_moment: f64) -> Result<f64> {
    if !(mass > 0.0) || !(sinh_moment > 0.0) {
        return Err(Error::InvalidParameter("optimal radius needs positive mass and moment".into()));
    }
    let log_target = ((constants.alpha2 * constants.beta2) / (constants.alpha1 * constants.beta1))
        .ln()
        + constants.q * (sinh_moment.ln() - mass.ln());
    let c = constants.c_m;
    let exponent = constants.beta1 + constants.beta2;
    let g = |r: f64| exponent * log_sinh_ratio(c, r) - log_target;
    let mut lo = 1e-300;
    let mut hi = 1.0;
    while g(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::InvalidParameter("optimal radius bracket exploded".into()));
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if g(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if (hi - lo) <= 1e-14 * hi {
            break;
        }
    }
    let r = 0.5 * (lo + hi);
    debug_assert!(g(r).abs() < 1e-9, "bisection residual too large");
    Ok(r)
}

/// Right-hand side of the pre-optimization two-term bound at radius `R`:
/// `alpha1 s(R)^{beta1} mass^q + alpha2 s(R)^{-beta2} moment^q` with
/// `s(R) = sinh(sqrt(c) R)/sqrt(c)`. The balancing radius minimizes this.
pub fn two_term_bound(constants: &CarlsonLevinConstants, mass: f64, sinh_moment: f64, r: f64) -> f64 {
    let s = sinh_ratio(constants.c_m, r);
    constants.alpha1 * s.powf(constants.beta1) * mass.powf(constants.q)
        + constants.alpha2 * s.powf(-constants.beta2) * sinh_moment.powf(constants.q)
}

/// Checks the centred-measure convexity inequality
/// `double-sum H(d(x,y)) >= sum H(r_x)` for a centred probability measure
/// and a non-negative, non-decreasing, convex profile.
pub fn verify_convexity(mu: &DiscreteMeasure, cal_h: &Potential) -> Result<InequalityReport> {
    if !mu.is_centred() {
        return Err(Error::Precondition(
            "the convexity inequality needs a centred measure (tangent mean zero)".into(),
        ));
    }
    if (mu.total_mass() - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition(
            "this form needs a probability measure; see the unnormalized variant".into(),
        ));
    }
    convexity_report(mu, cal_h, false)
}

/// Unnormalized variant:
/// `double-sum H(d) >= (sum H(r_x)) (total mass)`.
pub fn verify_convexity_unnormalized(mu: &DiscreteMeasure, cal_h: &Potential) -> Result<InequalityReport> {
    if !mu.is_centred() {
        return Err(Error::Precondition(
            "the convexity inequality needs a centred measure (tangent mean zero)".into(),
        ));
    }
    convexity_report(mu, cal_h, true)
}

fn convexity_report(mu: &DiscreteMeasure, cal_h: &Potential, unnormalized: bool) -> Result<InequalityReport> {
    check_convex_profile(cal_h)?;
    let n = mu.len();
    let w = mu.weights();
    let h0 = cal_h.eval(0.0);
    let mut double_sum = 0.0;
    for i in 0..n {
        double_sum += w[i] * w[i] * h0;
        for j in i + 1..n {
            double_sum += 2.0 * w[i] * w[j] * cal_h.eval(mu.distance(i, j));
        }
    }
    let mut single_sum = 0.0;
    for i in 0..n {
        single_sum += w[i] * cal_h.eval(mu.radius(i));
    }
    let lhs = if unnormalized {
        single_sum * mu.total_mass()
    } else {
        single_sum
    };
    let log_lhs = if lhs > 0.0 { lhs.ln() } else { f64::NEG_INFINITY };
    let log_rhs = if double_sum > 0.0 {
        double_sum.ln()
    } else if lhs <= 0.0 {
        // both sides zero (e.g. a point mass at the pole): degenerate pass
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    };
    Ok(InequalityReport::from_logs(log_lhs, log_rhs, 1.0, DEFAULT_TOLERANCE))
}

fn check_convex_profile(cal_h: &Potential) -> Result<()> {
    if !cal_h.nondecreasing {
        return Err(Error::Precondition("the profile must be non-decreasing".into()));
    }
    if cal_h.eval(0.0) < 0.0 {
        return Err(Error::Precondition("the profile must be non-negative".into()));
    }
    if !cal_h.convex_on_samples(10.0) {
        return Err(Error::Precondition("the profile failed the sampled convexity check".into()));
    }
    Ok(())
}

/// The Euclidean-limit check: evaluates the constant
/// `C_1(c)^{-1/(pq)}` along a decreasing curvature sequence, extrapolates
/// to zero, and checks
/// `C_ext (integral rho^q)^{1/(pq)} (integral rho)^{-(1-2p)/p} <=
///  double-integral |x-y|^lambda rho rho`
/// for a radial density on Euclidean space.
#[derive(Clone, Debug)]
pub struct ReversedHlsReport {
    /// the curvature sequence used
    pub c_sequence: Vec<f64>,
    /// `C_1(c)^{-1/(pq)}` along the sequence
    pub constants: Vec<f64>,
    /// successive differences shrink monotonically
    pub cauchy_ok: bool,
    pub extrapolated_constant: f64,
    pub report: InequalityReport,
}

pub fn reversed_hls_check(rho: &RadialDensity, lambda: f64, q: f64) -> Result<ReversedHlsReport> {
    let c0 = rho.manifold().constant_curvature().ok_or_else(|| {
        Error::UnsupportedManifold("the reversed-HLS check needs a Euclidean manifold".into())
    })?;
    if c0 != 0.0 {
        return Err(Error::Precondition("the reversed-HLS check is the c = 0 limit".into()));
    }
    let dim = rho.dim();
    let threshold = lambda_threshold(dim, q);
    if !(lambda > threshold) {
        return Err(Error::InvalidParameter(format!(
            "need lambda > (d-1)(1-q)/q = {threshold}, got {lambda}"
        )));
    }
    let c_sequence = vec![1e-1, 1e-2, 1e-3, 1e-4];
    let mut constants = Vec::with_capacity(c_sequence.len());
    let mut p = 0.0;
    for &c in &c_sequence {
        let k = cl_constants(lambda, q, c, dim)?;
        p = k.p;
        constants.push((-k.c1.ln() / (k.p * q)).exp());
    }
    let diffs: Vec<f64> = constants.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let cauchy_ok = diffs.windows(2).all(|w| w[1] <= w[0]);
    // one step of Richardson extrapolation on the assumed power law,
    // clamped into the monotone bracket [0, last value]
    let extrapolated_constant = {
        let (a, b, c_) = (constants[1], constants[2], constants[3]);
        let denom = a - 2.0 * b + c_;
        let raw = if denom.abs() > 1e-300 { c_ - (c_ - b) * (c_ - b) / denom } else { c_ };
        raw.clamp(0.0, *constants.last().unwrap())
    };

    // left side
    let lhs_q = rho.weighted_integral(|_, v| if v > 0.0 { v.powf(q) } else { 0.0 });
    let mass = rho.mass();
    let log_lhs = if lhs_q > 0.0 && mass > 0.0 && extrapolated_constant > 0.0 {
        extrapolated_constant.ln() + lhs_q.ln() / (p * q) - (1.0 - 2.0 * p) / p * mass.ln()
    } else {
        f64::NEG_INFINITY
    };

    // right side: the lambda-power interaction energy (without the 1/2)
    let power = Potential::power(lambda)?;
    let kernel = InteractionKernel::new(0.0, dim, &power, 64);
    let double_integral = lambda * radial_pairwise_integral(rho, &kernel);
    let log_rhs = if double_integral > 0.0 {
        double_integral.ln()
    } else {
        f64::NEG_INFINITY
    };
    let report = InequalityReport::from_logs(log_lhs, log_rhs, extrapolated_constant, DEFAULT_TOLERANCE);
    Ok(ReversedHlsReport {
        c_sequence,
        constants,
        cauchy_ok,
        extrapolated_constant,
        report,
    })
}

/// `double-integral K(r,s) rho rho dV dV` (no 1/2 factor), through the
/// kernel reduction.
fn radial_pairwise_integral(rho: &RadialDensity, kernel: &InteractionKernel) -> f64 {
    let opts = InteractionOpts::default();
    let end = rho.support_end();
    let (base_nodes, base_weights) = crate::quad::gauss_legendre(opts.nodes_per_panel);
    let mut nodes = Vec::new();
    let mut factors = Vec::new();
    let h = end / opts.panels as f64;
    let area = crate::numeric::unit_sphere_area(rho.dim());
    for panel in 0..opts.panels {
        let lo = panel as f64 * h;
        let mid = lo + 0.5 * h;
        for (&x, &w) in base_nodes.iter().zip(&base_weights) {
            let r = mid + 0.5 * h * x;
            nodes.push(r);
            factors.push(0.5 * h * w * rho.eval(r) * rho.jacobian(r));
        }
    }
    let n = nodes.len();
    let mut sum = 0.0;
    for i in 0..n {
        if factors[i] == 0.0 {
            continue;
        }
        sum += factors[i] * factors[i] * kernel.eval(nodes[i], nodes[i]);
        for j in i + 1..n {
            sum += 2.0 * factors[i] * factors[j] * kernel.eval(nodes[i], nodes[j]);
        }
    }
    area * area * sum
}

/// Tail bound from the weighted moment: the mass at radii `>= R` is at most
/// `moment / (sinh(sqrt(c_m) R)/sqrt(c_m))^lambda`.
#[derive(Clone, Copy, Debug)]
pub struct TailBound {
    pub tail_mass: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn tightness_tail_bound(mu: Measure<'_>, lambda: f64, c_m: f64, radius: f64) -> Result<TailBound> {
    if !(c_m > 0.0) || !(lambda > 0.0) || !(radius >= 0.0) {
        return Err(Error::InvalidParameter("tail bound needs c_m > 0, lambda > 0, R >= 0".into()));
    }
    let (tail_mass, log_moment) = match mu {
        Measure::Radial(rho) => {
            let m = rho.sinh_moment(lambda)?;
            let log_m = m
                .log_value()
                .ok_or_else(|| Error::Divergent("the weighted moment diverges; no tail bound".into()))?;
            (rho.tail_mass(radius), log_m)
        }
        Measure::Discrete(mu) => (mu.tail_mass(radius), mu.sinh_moment(lambda).ln()),
    };
    let bound = if radius == 0.0 {
        f64::INFINITY
    } else {
        (log_moment - lambda * log_sinh_ratio(c_m, radius)).exp()
    };
    Ok(TailBound {
        tail_mass,
        bound,
        holds: tail_mass <= bound * (1.0 + 1e-9) + 1e-15,
    })
}

/// The energy lower bound `E[mu] >= C1~ + C2~ W1(mu, delta_o)` assembled
/// from the interpolation constant, the minorant
/// `h >= gamma1 (sinh(sqrt(c_m) theta)/sqrt(c_m))^lambda + gamma2`, and a
/// linear minorant of the sinh power.
#[derive(Clone, Debug)]
pub struct EnergyLowerBound {
    pub energy: f64,
    pub bound: f64,
    pub holds: bool,
    pub gamma1: f64,
    pub gamma2: f64,
    /// whether the minorant difference was still non-decreasing at the end
    /// of the probe grid (if not, the infimum may lie beyond it)
    pub gamma2_tail_monotone: bool,
    pub c_tilde_1: f64,
    pub c_tilde_2: f64,
    pub first_moment: f64,
}

/// Controls for the gamma constants; the fraction is the "strictly below"
/// margin applied to the admissible coefficient.
#[derive(Clone, Copy, Debug)]
pub struct LowerBoundOpts {
    pub gamma1_fraction: f64,
    pub theta_max: f64,
    pub grid: usize,
}

impl Default for LowerBoundOpts {
    fn default() -> Self {
        Self {
            gamma1_fraction: 0.5,
            theta_max: 200.0,
            grid: 512,
        }
    }
}

pub fn energy_lower_bound_check(
    mu: Measure<'_>,
    q: f64,
    h: &Potential,
    lambda: f64,
    c_m: f64,
    opts: &LowerBoundOpts,
) -> Result<EnergyLowerBound> {
    let dim = match mu {
        Measure::Radial(rho) => rho.dim(),
        Measure::Discrete(d) => d.dim(),
    };
    let mode = GrowthMode::ExistConst {
        c_m,
        q,
        dim,
        lambda,
    };
    let growth = growth_condition_check(h, &mode, opts.theta_max)?;
    if growth.class != TrendClass::BoundedAwayFromZero {
        return Err(Error::Refused(format!(
            "h/exp(sqrt(c_m) lambda theta) classifies as {} on the probe grid; the energy lower \
             bound needs it bounded away from zero",
            growth.class.as_str()
        )));
    }
    let constants = cl_constants(lambda, q, c_m, dim)?;

    // gamma1: a fraction of the admissible coefficient
    // liminf(h/exp) * 2^lambda c_m^{lambda/2}
    let coeff_log = growth.tail_log_liminf
        + lambda * std::f64::consts::LN_2
        + 0.5 * lambda * c_m.ln();
    let gamma1 = opts.gamma1_fraction * coeff_log.exp();

    // gamma2: infimum of h - gamma1 * comparator on a geometric grid,
    // in signed-log arithmetic (both terms can be astronomically large)
    let mut gamma2 = SignedLog::ZERO; // value of the difference at theta = 0
    let mut diffs = Vec::with_capacity(opts.grid);
    let mut theta = 1e-3;
    let ratio = (opts.theta_max / theta).powf(1.0 / (opts.grid as f64 - 1.0));
    for _ in 0..opts.grid {
        let h_val = potential_signed_log(h, theta);
        let comp = SignedLog::from_log(lambda * log_sinh_ratio(c_m, theta)).scale(gamma1);
        let diff = h_val.add(comp.neg());
        if diff < gamma2 {
            gamma2 = diff;
        }
        diffs.push(diff);
        theta *= ratio;
    }
    let tail = &diffs[3 * diffs.len() / 4..];
    let gamma2_tail_monotone = tail.windows(2).all(|w| !(w[1] < w[0]));
    let gamma2 = gamma2.to_f64();

    // X* minimizing f(X) = -C1/(1-q) X^{pq} + gamma1 X / 4
    let pq = constants.p * q;
    let c1 = constants.c1;
    let x_star = (4.0 * pq * c1 / ((1.0 - q) * gamma1)).powf(1.0 / (1.0 - pq));
    let c2 = -c1 / (1.0 - q) * x_star.powf(pq) + gamma1 * x_star / 4.0;

    // linear minorant of g(theta) = (sinh(sqrt(c_m) theta)/sqrt(c_m))^lambda:
    // slope from the tangent at theta = 1, intercept from the grid infimum
    let g = |t: f64| (lambda * log_sinh_ratio(c_m, t)).exp();
    let sc = c_m.sqrt();
    let gt1 = lambda * g(1.0) / sinh_ratio(c_m, 1.0) * (sc * 1.0).cosh();
    let mut gamma_tilde_2 = 0.0f64;
    let mut theta = 1e-3;
    for _ in 0..opts.grid {
        let v = g(theta) - gt1 * theta;
        if v < gamma_tilde_2 {
            gamma_tilde_2 = v;
        }
        theta *= ratio;
        if theta > opts.theta_max {
            break;
        }
    }

    let c_tilde_1 = c2 + gamma2 / 2.0 + gamma1 * gamma_tilde_2 / 4.0;
    let c_tilde_2 = gamma1 * gt1 / 4.0;

    let energy = total_energy(mu, q, h, InteractionOpts::default())?.total;
    let first_moment = match mu {
        Measure::Radial(rho) => rho.first_moment(),
        Measure::Discrete(d) => d.first_moment(),
    };
    let bound = c_tilde_1 + c_tilde_2 * first_moment;
    let holds = energy >= bound - 1e-8 * (1.0 + bound.abs());
    Ok(EnergyLowerBound {
        energy,
        bound,
        holds,
        gamma1,
        gamma2,
        gamma2_tail_monotone,
        c_tilde_1,
        c_tilde_2,
        first_moment,
    })
}

fn potential_signed_log(h: &Potential, theta: f64) -> SignedLog {
    let v = h.eval(theta);
    if v.is_finite() {
        SignedLog::from_f64(v)
    } else if v == f64::INFINITY {
        match h.log_eval(theta) {
            Some(lv) => SignedLog::from_log(lv),
            None => SignedLog::from_f64(v),
        }
    } else {
        SignedLog::from_f64(v)
    }
}
