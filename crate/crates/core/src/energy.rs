//! Entropy and interaction terms of the free energy, the uniform-ball
//! energy upper bound, spreading and blow-up scans, and growth-condition
//! checks for the interaction profile.
//!
//! The free energy of a measure `mu` with absolutely continuous part `rho`
//! is
//!
//! ```text
//! E[mu] = 1/(q-1) integral rho^q dV + 1/2 double-integral h(d(x,y)) dmu dmu
//! ```
//!
//! with `0 < q < 1`. For radial densities on a constant-curvature model the
//! double integral reduces through the sphere average
//! `K(r,s) = avg_phi h(d(r,s,phi))` with the angular weight
//! `sin^{d-2}(phi)`.

use crate::error::{Error, Result};
use crate::geometry::{log_ball_volume, model_distance, CurvatureProfile, ModelManifold};
use crate::measures::{DiscreteMeasure, Potential, RadialDensity};
use crate::numeric::{log_sinh_ratio, SignedLog};
use crate::quad::GaussGegenbauer;

/// Entropy, interaction, and total energy of one measure.
#[derive(Clone, Copy, Debug)]
pub struct EnergyBreakdown {
    pub entropy: f64,
    pub interaction: f64,
    pub total: f64,
    pub q: f64,
    pub quadrature_error_estimate: f64,
}

/// `1/(q-1) * d w(d) * integral rho^q psi^{d-1} dr` — non-positive for
/// `0 < q < 1`.
pub fn entropy_term(rho: &RadialDensity, q: f64) -> Result<f64> {
    check_q(q)?;
    let integral = rho.weighted_integral(|_, v| if v > 0.0 { v.powf(q) } else { 0.0 });
    Ok(integral / (q - 1.0))
}

fn check_q(q: f64) -> Result<()> {
    if !(0.0 < q && q < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "fast-diffusion exponent must satisfy 0 < q < 1, got {q}"
        )));
    }
    Ok(())
}

/// Sphere-averaged interaction kernel on a constant-curvature model:
/// `K(r, s) = integral_0^pi h(d(r,s,phi)) sin^{d-2}(phi) dphi / integral_0^pi sin^{d-2}(phi) dphi`,
/// evaluated with a Gauss rule for the weight `(1-u^2)^{(d-3)/2}`, `u = cos(phi)`.
#[derive(Clone, Debug)]
pub struct InteractionKernel<'h> {
    h: &'h Potential,
    c: f64,
    dim: u32,
    /// precomputed `acos` of the angular nodes
    angles: Vec<f64>,
    /// weights normalized to sum to one
    weights: Vec<f64>,
}

impl<'h> InteractionKernel<'h> {
    pub fn new(c: f64, dim: u32, h: &'h Potential, angular_nodes: usize) -> Self {
        let rule = GaussGegenbauer::new(angular_nodes, (dim as f64 - 3.0) / 2.0);
        let total = rule.weight_sum();
        let angles = rule.nodes.iter().map(|&u| u.clamp(-1.0, 1.0).acos()).collect();
        let weights = rule.weights.iter().map(|&w| w / total).collect();
        Self {
            h,
            c,
            dim,
            angles,
            weights,
        }
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn eval(&self, r: f64, s: f64) -> f64 {
        if r == 0.0 || s == 0.0 {
            // the distance is constant in the angle
            return self.h.eval(r.max(s));
        }
        self.angles
            .iter()
            .zip(&self.weights)
            .map(|(&phi, &w)| w * self.h.eval(model_distance(self.c, r, s, phi)))
            .sum()
    }
}

/// One-off kernel evaluation (builds the angular rule each call; use
/// [`InteractionKernel`] for repeated evaluation).
pub fn interaction_kernel(c: f64, dim: u32, h: &Potential, r: f64, s: f64) -> f64 {
    InteractionKernel::new(c, dim, h, 64).eval(r, s)
}

/// Quadrature controls for the radial double integral.
#[derive(Clone, Copy, Debug)]
pub struct InteractionOpts {
    pub panels: usize,
    pub nodes_per_panel: usize,
    pub angular_nodes: usize,
}

impl Default for InteractionOpts {
    fn default() -> Self {
        Self {
            panels: 48,
            nodes_per_panel: 16,
            angular_nodes: 64,
        }
    }
}

/// `1/2 * double-integral h(d(x,y)) rho rho dV dV` for a radial density on
/// a constant-curvature model, by the kernel reduction
/// `(d w(d))^2 / 2 * double-integral rho(r) rho(s) J(r) J(s) K(r,s) dr ds`.
pub fn interaction_energy_radial(
    rho: &RadialDensity,
    h: &Potential,
    opts: InteractionOpts,
) -> Result<f64> {
    let c = rho.manifold().constant_curvature().ok_or_else(|| {
        Error::UnsupportedManifold(
            "the interaction energy needs a constant-curvature manifold".into(),
        )
    })?;
    if !h.nondecreasing {
        return Err(Error::Precondition("the interaction profile must be non-decreasing".into()));
    }
    check_truncation(rho)?;
    let kernel = InteractionKernel::new(c, rho.dim(), h, opts.angular_nodes);
    Ok(radial_double_integral(rho, &kernel, opts))
}

fn check_truncation(rho: &RadialDensity) -> Result<()> {
    if rho.jump_radius().is_none() {
        let peak = rho.values().iter().cloned().fold(0.0, f64::max);
        let edge = *rho.values().last().unwrap();
        if edge > 1e-6 * peak {
            return Err(Error::Divergent(
                "density does not decay before the grid edge; the outer integral cannot be trusted"
                    .into(),
            ));
        }
    }
    Ok(())
}

fn radial_double_integral(
    rho: &RadialDensity,
    kernel: &InteractionKernel,
    opts: InteractionOpts,
) -> f64 {
    let end = rho.support_end();
    let (base_nodes, base_weights) = crate::quad::gauss_legendre(opts.nodes_per_panel);
    let mut nodes = Vec::with_capacity(opts.panels * opts.nodes_per_panel);
    let mut weights = Vec::with_capacity(nodes.capacity());
    let h = end / opts.panels as f64;
    for p in 0..opts.panels {
        let lo = p as f64 * h;
        let mid = lo + 0.5 * h;
        for (&x, &w) in base_nodes.iter().zip(&base_weights) {
            nodes.push(mid + 0.5 * h * x);
            weights.push(0.5 * h * w);
        }
    }
    let area = crate::numeric::unit_sphere_area(rho.dim());
    // factor rho(r) J(r) W_r at each node
    let factors: Vec<f64> = nodes
        .iter()
        .zip(&weights)
        .map(|(&r, &w)| w * rho.eval(r) * rho.jacobian(r))
        .collect();
    let n = nodes.len();
    let mut sum = 0.0;
    for i in 0..n {
        if factors[i] == 0.0 {
            continue;
        }
        // diagonal term once, off-diagonal twice by symmetry
        sum += factors[i] * factors[i] * kernel.eval(nodes[i], nodes[i]);
        for j in i + 1..n {
            if factors[j] == 0.0 {
                continue;
            }
            sum += 2.0 * factors[i] * factors[j] * kernel.eval(nodes[i], nodes[j]);
        }
    }
    0.5 * area * area * sum
}

/// `1/2 sum_ij w_i w_j h(d(x_i, x_j))`, self-pairs included with `h(0)`.
pub fn interaction_energy_discrete(mu: &DiscreteMeasure, h: &Potential) -> Result<f64> {
    if !h.nondecreasing {
        return Err(Error::Precondition("the interaction profile must be non-decreasing".into()));
    }
    let n = mu.len();
    let w = mu.weights();
    let h0 = h.eval(0.0);
    let mut sum = 0.0;
    for i in 0..n {
        sum += w[i] * w[i] * h0;
        for j in i + 1..n {
            sum += 2.0 * w[i] * w[j] * h.eval(mu.distance(i, j));
        }
    }
    Ok(0.5 * sum)
}

/// A probability measure the energy accepts: an absolutely continuous
/// radial density or a finite discrete measure (whose absolutely continuous
/// part vanishes, so its entropy term is zero).
#[derive(Clone, Copy, Debug)]
pub enum Measure<'a> {
    Radial(&'a RadialDensity),
    Discrete(&'a DiscreteMeasure),
}

/// Total energy with its breakdown; the quadrature error estimate comes
/// from one panel refinement of the interaction term.
pub fn total_energy(mu: Measure<'_>, q: f64, h: &Potential, opts: InteractionOpts) -> Result<EnergyBreakdown> {
    check_q(q)?;
    match mu {
        Measure::Radial(rho) => {
            let entropy = entropy_term(rho, q)?;
            let coarse = interaction_energy_radial(
                rho,
                h,
                InteractionOpts {
                    panels: (opts.panels / 2).max(8),
                    ..opts
                },
            )?;
            let interaction = interaction_energy_radial(rho, h, opts)?;
            Ok(EnergyBreakdown {
                entropy,
                interaction,
                total: entropy + interaction,
                q,
                quadrature_error_estimate: (interaction - coarse).abs(),
            })
        }
        Measure::Discrete(mu) => {
            let interaction = interaction_energy_discrete(mu, h)?;
            Ok(EnergyBreakdown {
                entropy: 0.0,
                interaction,
                total: interaction,
                q,
                quadrature_error_estimate: 0.0,
            })
        }
    }
}

/// The uniform-ball energy upper bound
/// `-|B_R|^{1-q}/(1-q) + h(2R)/2`, with `|B_R|` replaced by its lower bound
/// on bound-only manifolds (which keeps the expression an upper bound for
/// the true uniform-ball energy). Signed-log arithmetic keeps the value
/// meaningful far outside the `f64` range.
pub fn rho_r_energy_bound(
    manifold: &ModelManifold,
    radius: f64,
    q: f64,
    h: &Potential,
) -> Result<SignedLog> {
    check_q(q)?;
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("ball radius must be positive, got {radius}")));
    }
    let (log_vol_lower, _) = log_ball_volume(manifold, radius)?;
    let entropy_bound = SignedLog::new(-1, (1.0 - q) * log_vol_lower - (1.0 - q).ln());
    Ok(entropy_bound.add(potential_signed_log(h, 2.0 * radius).scale(0.5)))
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

/// Verdict of a parameter scan along the uniform-ball family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanVerdict {
    UnboundedBelowBlowup,
    UnboundedBelowSpreading,
    BoundedBelowInconclusive,
}

impl ScanVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScanVerdict::UnboundedBelowBlowup => "unbounded_below_blowup",
            ScanVerdict::UnboundedBelowSpreading => "unbounded_below_spreading",
            ScanVerdict::BoundedBelowInconclusive => "bounded_below_inconclusive",
        }
    }
}

/// One scan station: the bound is always present; the exact breakdown is
/// `NaN` on bound-only manifolds where the energy itself is not computable.
#[derive(Clone, Copy, Debug)]
pub struct ScanPoint {
    pub radius: f64,
    pub entropy: f64,
    pub interaction: f64,
    pub total: f64,
    pub bound: SignedLog,
}

#[derive(Clone, Debug)]
pub struct ScanResult {
    pub points: Vec<ScanPoint>,
    pub verdict: ScanVerdict,
    /// human-readable justification of the verdict
    pub note: String,
}

#[derive(Clone, Copy, Debug)]
pub struct ScanOpts {
    /// spreading verdicts require the final bound below this
    pub floor: f64,
    /// blow-up verdicts require `h(2R)` below this (the `f64` log range
    /// caps how deep a logarithmic singularity can be sampled, so this
    /// floor is far above the spreading one)
    pub blowup_floor: f64,
    /// also evaluate exact energies along the scan (constant curvature only)
    pub with_energies: bool,
    pub grid_size: usize,
    pub interaction: InteractionOpts,
}

impl Default for ScanOpts {
    fn default() -> Self {
        Self {
            floor: -1e6,
            blowup_floor: -500.0,
            with_energies: false,
            grid_size: 384,
            interaction: InteractionOpts {
                panels: 24,
                nodes_per_panel: 12,
                angular_nodes: 48,
            },
        }
    }
}

/// Evaluates the uniform-ball bound along an increasing radius list and
/// classifies the spreading trend: the verdict is an empirical
/// classification with explicit thresholds, never a proof of a limit.
pub fn spreading_scan(
    manifold: &ModelManifold,
    q: f64,
    h: &Potential,
    radii: &[f64],
    opts: &ScanOpts,
) -> Result<ScanResult> {
    if radii.is_empty() {
        return Err(Error::InvalidParameter("spreading scan needs a non-empty radius list".into()));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("spreading radii must be strictly increasing".into()));
    }
    let points = scan_points(manifold, q, h, radii, opts)?;
    let tail = &points[points.len() / 2..];
    let decreasing = tail.windows(2).all(|w| w[1].bound < w[0].bound);
    let below_floor = points.last().unwrap().bound < SignedLog::from_f64(opts.floor);
    let (verdict, note) = if decreasing && below_floor {
        (
            ScanVerdict::UnboundedBelowSpreading,
            format!(
                "bound strictly decreasing over the last {} stations and below {:e} at R = {}: \
                 the uniform-ball family drives the energy below any level (spreading)",
                tail.len(),
                opts.floor,
                radii.last().unwrap()
            ),
        )
    } else {
        (
            ScanVerdict::BoundedBelowInconclusive,
            "bound not decreasing beyond the floor along the scan; no spreading conclusion".into(),
        )
    };
    Ok(ScanResult {
        points,
        verdict,
        note,
    })
}

/// Evaluates the bound along a decreasing radius list approaching zero and
/// classifies the blow-up trend: the entropy term must vanish while
/// `h(2R)` keeps falling below the floor.
pub fn blowup_scan(
    manifold: &ModelManifold,
    q: f64,
    h: &Potential,
    radii: &[f64],
    opts: &ScanOpts,
) -> Result<ScanResult> {
    if radii.is_empty() {
        return Err(Error::InvalidParameter("blow-up scan needs a non-empty radius list".into()));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) || !(radii[radii.len() - 1] > 0.0) {
        return Err(Error::InvalidParameter(
            "blow-up radii must be strictly decreasing and positive".into(),
        ));
    }
    let points = scan_points(manifold, q, h, radii, opts)?;
    let tail = &points[points.len() / 2..];
    let h_tail: Vec<f64> = tail.iter().map(|p| h.eval(2.0 * p.radius)).collect();
    let h_decreasing = h_tail.windows(2).all(|w| w[1] < w[0]);
    let h_below = *h_tail.last().unwrap() < opts.blowup_floor;
    let last_entropy_bound = {
        let (log_vol, _) = log_ball_volume(manifold, radii[radii.len() - 1])?;
        ((1.0 - q) * log_vol - (1.0 - q).ln()).exp()
    };
    let entropy_vanishes = last_entropy_bound < 1e-8;
    let (verdict, note) = if h_decreasing && h_below && entropy_vanishes {
        (
            ScanVerdict::UnboundedBelowBlowup,
            format!(
                "h(2R) decreasing below {:e} while the entropy term vanishes ({:.3e} at the last \
                 station): concentration drives the energy below any level (blow-up)",
                opts.blowup_floor, last_entropy_bound
            ),
        )
    } else {
        (
            ScanVerdict::BoundedBelowInconclusive,
            "h(2R) does not fall below the floor with vanishing entropy; no blow-up conclusion".into(),
        )
    };
    Ok(ScanResult {
        points,
        verdict,
        note,
    })
}

fn scan_points(
    manifold: &ModelManifold,
    q: f64,
    h: &Potential,
    radii: &[f64],
    opts: &ScanOpts,
) -> Result<Vec<ScanPoint>> {
    let exact = opts.with_energies && manifold.constant_curvature().is_some();
    radii
        .iter()
        .map(|&r| {
            let bound = rho_r_energy_bound(manifold, r, q, h)?;
            let (entropy, interaction, total) = if exact {
                let ball = RadialDensity::uniform_ball(manifold, r, opts.grid_size)?;
                let e = entropy_term(&ball, q)?;
                let i = interaction_energy_radial(&ball, h, opts.interaction)?;
                (e, i, e + i)
            } else {
                (f64::NAN, f64::NAN, f64::NAN)
            };
            Ok(ScanPoint {
                radius: r,
                entropy,
                interaction,
                total,
                bound,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// growth conditions
// ---------------------------------------------------------------------------

/// Which growth condition the interaction profile is checked against.
#[derive(Clone, Debug)]
pub enum GrowthMode {
    /// spreading-nonexistence comparator `exp(sqrt(c_M)(d-1)(1-q) theta / 2)`
    NonexistConst { c_big_m: f64, q: f64, dim: u32 },
    /// existence comparator `exp(sqrt(c_m) lambda theta)`,
    /// `lambda > (d-1)(1-q)/q`
    ExistConst { c_m: f64, q: f64, dim: u32, lambda: f64 },
    /// variable-curvature spreading comparator
    /// `exp((1-eps)(d-1)(1-q) integral_0^{theta/2 - delta} sqrt(c_M))`
    NonexistVar {
        profile: CurvatureProfile,
        delta: f64,
        eps: f64,
        q: f64,
        dim: u32,
    },
    /// variable-curvature existence comparator
    /// `exp(lambda_tilde integral_0^theta sqrt(c_m))`
    ExistVar {
        profile: CurvatureProfile,
        lambda_tilde: f64,
        q: f64,
        dim: u32,
    },
}

/// Empirical trend of `h/comparator` on a finite grid; a finite scan cannot
/// decide a true limit, so `Inconclusive` is always a possible outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrendClass {
    Vanishing,
    BoundedAwayFromZero,
    Inconclusive,
}

impl TrendClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrendClass::Vanishing => "vanishing",
            TrendClass::BoundedAwayFromZero => "bounded_away_from_zero",
            TrendClass::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug)]
pub struct GrowthReport {
    pub class: TrendClass,
    pub thetas: Vec<f64>,
    /// `log(h(theta)) - log(comparator(theta))`; `-inf` where `h <= 0`
    pub log_ratios: Vec<f64>,
    /// smallest tail log-ratio: a conservative estimate of
    /// `log liminf h/comparator`, meaningful when the class is
    /// `BoundedAwayFromZero`
    pub tail_log_liminf: f64,
}

/// Existence-threshold `(d-1)(1-q)/q` for the moment exponent.
pub fn lambda_threshold(dim: u32, q: f64) -> f64 {
    (dim as f64 - 1.0) * (1.0 - q) / q
}

/// Evaluates `h/comparator` on a geometric grid up to `theta_max` and
/// classifies the tail trend.
pub fn growth_condition_check(h: &Potential, mode: &GrowthMode, theta_max: f64) -> Result<GrowthReport> {
    let (q, dim) = match mode {
        GrowthMode::NonexistConst { q, dim, .. } => (*q, *dim),
        GrowthMode::ExistConst { q, dim, lambda, .. } => {
            let thr = lambda_threshold(*dim, *q);
            if !(*lambda > thr) {
                return Err(Error::InvalidParameter(format!(
                    "existence mode needs lambda > (d-1)(1-q)/q = {thr}, got lambda = {lambda}"
                )));
            }
            (*q, *dim)
        }
        GrowthMode::NonexistVar { q, dim, eps, delta, .. } => {
            if !(0.0 < *eps && *eps < 1.0) || !(*delta > 0.0) {
                return Err(Error::InvalidParameter(
                    "variable nonexistence mode needs 0 < eps < 1 and delta > 0".into(),
                ));
            }
            (*q, *dim)
        }
        GrowthMode::ExistVar { q, dim, lambda_tilde, .. } => {
            let thr = lambda_threshold(*dim, *q);
            if !(*lambda_tilde > thr) {
                return Err(Error::InvalidParameter(format!(
                    "existence mode needs lambda > (d-1)(1-q)/q = {thr}, got lambda = {lambda_tilde}"
                )));
            }
            (*q, *dim)
        }
    };
    check_q(q)?;
    let _ = dim;

    let theta_min = match mode {
        GrowthMode::NonexistVar { delta, .. } => (2.2 * delta).max(1.0),
        _ => 1.0,
    };
    let theta_max = theta_max
        .min(h.domain_max().unwrap_or(f64::INFINITY))
        .min(match mode {
            GrowthMode::NonexistVar { profile, .. } => {
                profile.domain_max().map(|m| 2.0 * m).unwrap_or(f64::INFINITY)
            }
            GrowthMode::ExistVar { profile, .. } => profile.domain_max().unwrap_or(f64::INFINITY),
            _ => f64::INFINITY,
        });
    if !(theta_max > theta_min) {
        return Err(Error::InvalidParameter(format!(
            "growth check needs theta_max > {theta_min}, got {theta_max}"
        )));
    }

    let n = 64;
    let ratio = (theta_max / theta_min).powf(1.0 / (n as f64 - 1.0));
    let mut thetas = Vec::with_capacity(n);
    let mut t = theta_min;
    for _ in 0..n {
        thetas.push(t);
        t *= ratio;
    }

    let mut log_ratios = Vec::with_capacity(n);
    for &theta in &thetas {
        let log_comp = match mode {
            GrowthMode::NonexistConst { c_big_m, q, dim } => {
                c_big_m.sqrt() * (*dim as f64 - 1.0) * (1.0 - q) * theta / 2.0
            }
            GrowthMode::ExistConst { c_m, lambda, .. } => c_m.sqrt() * lambda * theta,
            GrowthMode::NonexistVar {
                profile,
                delta,
                eps,
                q,
                dim,
            } => {
                (1.0 - eps)
                    * (*dim as f64 - 1.0)
                    * (1.0 - q)
                    * profile.sqrt_integral(0.0, theta / 2.0 - delta)?
            }
            GrowthMode::ExistVar { profile, lambda_tilde, .. } => {
                lambda_tilde * profile.sqrt_integral(0.0, theta)?
            }
        };
        let log_h = h.log_eval(theta).unwrap_or(f64::NEG_INFINITY);
        log_ratios.push(log_h - log_comp);
    }

    // the ratio may peak mid-grid (e.g. an exponential against a
    // quadratic-phase comparator), so the monotone check uses the last
    // quarter and the drop is measured from the tail maximum
    let tail = &log_ratios[n / 2..];
    let last_quarter = &log_ratios[3 * n / 4..];
    let quarter_nonincreasing = last_quarter.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    let tail_max = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tail_min = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let tail_last = tail[tail.len() - 1];
    let drop_from_peak = tail_max - tail_last;
    let class = if quarter_nonincreasing
        && (drop_from_peak > (100.0f64).ln() || tail_last == f64::NEG_INFINITY)
    {
        TrendClass::Vanishing
    } else if tail_min >= (1e-8f64).ln() && tail_last >= tail[0] - 0.2 {
        TrendClass::BoundedAwayFromZero
    } else {
        TrendClass::Inconclusive
    };
    Ok(GrowthReport {
        class,
        thetas,
        log_ratios,
        tail_log_liminf: tail_min,
    })
}

/// `exp(sqrt(c_m) lambda theta) / (sinh(sqrt(c_m) theta)/sqrt(c_m))^lambda`
/// at `theta_max`, together with its limit `2^lambda c_m^{lambda/2}` and
/// the deviation from it.
#[derive(Clone, Copy, Debug)]
pub struct RatioLimit {
    pub ratio: f64,
    pub limit: f64,
    pub deviation: f64,
}

pub fn ratio_limit_2lambda(lambda: f64, c_m: f64, theta_max: f64) -> Result<RatioLimit> {
    if !(lambda > 0.0) || !(c_m > 0.0) || !(theta_max > 0.0) {
        return Err(Error::InvalidParameter(
            "the ratio limit needs lambda > 0, c_m > 0, theta_max > 0".into(),
        ));
    }
    let log_ratio = c_m.sqrt() * lambda * theta_max - lambda * log_sinh_ratio(c_m, theta_max);
    let ratio = log_ratio.exp();
    let limit = (lambda * std::f64::consts::LN_2 + 0.5 * lambda * c_m.ln()).exp();
    Ok(RatioLimit {
        ratio,
        limit,
        deviation: (ratio - limit).abs(),
    })
}
