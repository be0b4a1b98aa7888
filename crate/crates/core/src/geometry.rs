//! Radial curvature profiles, the comparison ODE `psi'' = c(theta) psi`,
//! two-sided bounds for its solution, geodesic-ball volumes, Jacobian
//! bounds, and distances on constant-curvature model spaces.
//!
//! A rotationally symmetric model manifold of dimension `d` is described by
//! a radial profile `c(theta) > 0` bounding (or equalling) the negative of
//! the sectional curvature at distance `theta` from the pole. The solution
//! of
//!
//! ```text
//! psi''(theta) = c(theta) psi(theta),   psi(0) = 0,  psi'(0) = 1
//! ```
//!
//! controls the Jacobian of the exponential map and the volume of geodesic
//! balls. For constant `c` the solution is `sinh(sqrt(c) theta)/sqrt(c)`.

use crate::error::{Error, Result};
use crate::numeric::{log_cosh, log_sinh, log_sinh_ratio, log_weighted_sum_exp, sinh_ratio, unit_sphere_area};
use crate::quad::{integrate_adaptive, integrate_adaptive_log};

const PANEL_REL_TOL: f64 = 1e-12;
/// Switch the integrator to log-domain variables once psi exceeds this.
const LOG_SWITCH: f64 = 1e250;

// ---------------------------------------------------------------------------
// curvature profiles
// ---------------------------------------------------------------------------

/// Monotone piecewise-cubic (Fritsch–Carlson) interpolant for tabulated
/// profiles. Positive data yields a positive interpolant; evaluation outside
/// the table is a hard error at the profile level.
#[derive(Clone, Debug)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    tangents: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::InvalidParameter(
                "tabulated profile needs at least two (theta, c) pairs".into(),
            ));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "tabulated thetas must be strictly increasing".into(),
            ));
        }
        let n = xs.len();
        let mut slopes = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            slopes.push((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]));
        }
        let mut tangents = vec![0.0; n];
        tangents[0] = slopes[0];
        tangents[n - 1] = slopes[n - 2];
        for i in 1..n - 1 {
            if slopes[i - 1] * slopes[i] <= 0.0 {
                tangents[i] = 0.0;
            } else {
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                let w1 = 2.0 * h1 + h0;
                let w2 = h1 + 2.0 * h0;
                tangents[i] = (w1 + w2) / (w1 / slopes[i - 1] + w2 / slopes[i]);
            }
        }
        // Fritsch–Carlson limiter keeps the interpolant monotone per interval
        for i in 0..n - 1 {
            if slopes[i] == 0.0 {
                tangents[i] = 0.0;
                tangents[i + 1] = 0.0;
            } else {
                let a = tangents[i] / slopes[i];
                let b = tangents[i + 1] / slopes[i];
                let s = (a * a + b * b).sqrt();
                if s > 3.0 {
                    tangents[i] = 3.0 * a / s * slopes[i];
                    tangents[i + 1] = 3.0 * b / s * slopes[i];
                }
            }
        }
        Ok(Self { xs, ys, tangents })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn eval(&self, x: f64) -> Option<f64> {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return None;
        }
        let i = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.xs.len() - 2),
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        Some(h00 * self.ys[i] + h10 * h * self.tangents[i] + h01 * self.ys[i + 1] + h11 * h * self.tangents[i + 1])
    }
}

#[derive(Clone, Debug)]
pub enum ProfileKind {
    /// `c(theta) = c`
    Constant { c: f64 },
    /// `c(theta) = theta^k + floor`, with a positive floor keeping `c(0) > 0`
    Power { exponent: f64, floor: f64 },
    /// `c(theta) = amplitude * exp(rate * theta)`
    Exponential { amplitude: f64, rate: f64 },
    /// interpolated table of `(theta, c)` pairs
    Tabulated(MonotoneCubic),
}

/// A radial curvature bound `c(theta) > 0` with its structural flags.
#[derive(Clone, Debug)]
pub struct CurvatureProfile {
    pub kind: ProfileKind,
    /// asserts `c` is non-decreasing (required by the upper-bound lemma and
    /// the pivot bounds); automatic for the analytic kinds
    pub monotone_nondecreasing: bool,
    /// asserts `lim Dc/c^{3/2} = 0`, the hypothesis of the asymptotic lower
    /// bound; user-supplied for tables, automatic for the analytic kinds
    pub satisfies_c32: bool,
}

impl CurvatureProfile {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::InvalidProfile(format!("constant profile needs c > 0, got {c}")));
        }
        Ok(Self {
            kind: ProfileKind::Constant { c },
            monotone_nondecreasing: true,
            satisfies_c32: true,
        })
    }

    pub fn power(exponent: f64, floor: f64) -> Result<Self> {
        if !(exponent > 0.0) || !(floor > 0.0) {
            return Err(Error::InvalidProfile(format!(
                "power profile needs exponent > 0 and floor > 0, got k={exponent}, floor={floor}"
            )));
        }
        Ok(Self {
            kind: ProfileKind::Power { exponent, floor },
            monotone_nondecreasing: true,
            satisfies_c32: true,
        })
    }

    pub fn exponential(amplitude: f64, rate: f64) -> Result<Self> {
        if !(amplitude > 0.0) || !(rate > 0.0) {
            return Err(Error::InvalidProfile(format!(
                "exponential profile needs amplitude > 0 and rate > 0, got a={amplitude}, rate={rate}"
            )));
        }
        Ok(Self {
            kind: ProfileKind::Exponential { amplitude, rate },
            monotone_nondecreasing: true,
            satisfies_c32: true,
        })
    }

    /// Tabulated profile. The monotone flag is checked by sampling; the
    /// decay condition on `Dc/c^{3/2}` cannot be decided from samples, so a
    /// finite-difference spot check only logs a warning when it looks false.
    pub fn tabulated(
        pairs: &[(f64, f64)],
        monotone_nondecreasing: bool,
        satisfies_c32: bool,
    ) -> Result<Self> {
        if pairs.iter().any(|&(_, c)| !(c > 0.0)) {
            return Err(Error::InvalidProfile("tabulated profile has non-positive values".into()));
        }
        let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let table = MonotoneCubic::new(xs, ys)?;
        let profile = Self {
            kind: ProfileKind::Tabulated(table),
            monotone_nondecreasing,
            satisfies_c32,
        };
        if monotone_nondecreasing {
            profile.check_monotone_by_sampling()?;
        }
        if satisfies_c32 {
            profile.spot_check_c32();
        }
        Ok(profile)
    }

    /// Largest admissible `theta`, `None` when unbounded.
    pub fn domain_max(&self) -> Option<f64> {
        match &self.kind {
            ProfileKind::Tabulated(t) => Some(t.domain().1),
            _ => None,
        }
    }

    pub fn eval(&self, theta: f64) -> Result<f64> {
        if theta < 0.0 {
            return Err(Error::InvalidParameter(format!("profile evaluated at theta = {theta} < 0")));
        }
        let v = match &self.kind {
            ProfileKind::Constant { c } => *c,
            ProfileKind::Power { exponent, floor } => theta.powf(*exponent) + floor,
            ProfileKind::Exponential { amplitude, rate } => amplitude * (rate * theta).exp(),
            ProfileKind::Tabulated(t) => t.eval(theta).ok_or_else(|| {
                Error::InvalidProfile(format!(
                    "theta = {theta} outside the tabulated range {:?}; extrapolation is not allowed",
                    t.domain()
                ))
            })?,
        };
        if !(v > 0.0) {
            return Err(Error::InvalidProfile(format!("profile is non-positive at theta = {theta}: c = {v}")));
        }
        Ok(v)
    }

    /// `integral_a^b sqrt(c(t)) dt` by adaptive quadrature.
    pub fn sqrt_integral(&self, a: f64, b: f64) -> Result<f64> {
        if let ProfileKind::Constant { c } = self.kind {
            return Ok(c.sqrt() * (b - a));
        }
        let mut err = None;
        let v = integrate_adaptive(a, b, PANEL_REL_TOL, |t| match self.eval(t) {
            Ok(c) => c.sqrt(),
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        })?;
        match err {
            Some(e) => Err(e),
            None => Ok(v),
        }
    }

    fn check_monotone_by_sampling(&self) -> Result<()> {
        let (lo, hi) = match self.domain_max() {
            Some(hi) => (0.0, hi),
            None => (0.0, 100.0),
        };
        let lo = match &self.kind {
            ProfileKind::Tabulated(t) => t.domain().0,
            _ => lo,
        };
        let n = 512;
        let mut prev = self.eval(lo)?;
        for i in 1..=n {
            let t = lo + (hi - lo) * i as f64 / n as f64;
            let v = self.eval(t)?;
            if v < prev - 1e-12 * prev.abs().max(1.0) {
                return Err(Error::InvalidProfile(format!(
                    "profile flagged non-decreasing but decreases near theta = {t}"
                )));
            }
            prev = v;
        }
        Ok(())
    }

    /// Finite-difference spot check of `Dc / c^{3/2} -> 0` on a geometric
    /// grid. Samples cannot prove a limit, so violations only warn.
    fn spot_check_c32(&self) {
        let hi = self.domain_max().unwrap_or(100.0);
        let mut ratios = Vec::new();
        let mut t = hi / 64.0;
        while t < hi * 0.98 {
            let h = t * 1e-4;
            if let (Ok(c0), Ok(c1)) = (self.eval(t), self.eval((t + h).min(hi))) {
                let dc = (c1 - c0) / h;
                ratios.push(dc.abs() / c0.powf(1.5));
            }
            t *= 1.3;
        }
        if ratios.len() >= 3 {
            let last = ratios[ratios.len() - 1];
            let first = ratios[0];
            if last > first.max(1e-6) {
                log::warn!(
                    "profile flagged with the decay condition on Dc/c^(3/2), but sampled ratios grow ({first:.3e} -> {last:.3e})"
                );
            }
        }
    }
}

// ---------------------------------------------------------------------------
// the comparison ODE
// ---------------------------------------------------------------------------

/// Numerical solution of `psi'' = c psi`, `psi(0) = 0`, `psi'(0) = 1`.
///
/// Values are stored both linearly (`psi`, `dpsi`, saturating to `+inf` once
/// the solution leaves the `f64` range) and in the log domain (`log_psi`,
/// `w = psi'/psi`), which stays meaningful for arbitrarily strong growth.
#[derive(Clone, Debug)]
pub struct PsiSolution {
    thetas: Vec<f64>,
    psi: Vec<f64>,
    dpsi: Vec<f64>,
    log_psi: Vec<f64>,
    w: Vec<f64>,
    cvals: Vec<f64>,
    tol: f64,
}

impl PsiSolution {
    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn psi_values(&self) -> &[f64] {
        &self.psi
    }

    pub fn dpsi_values(&self) -> &[f64] {
        &self.dpsi
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn theta_max(&self) -> f64 {
        *self.thetas.last().unwrap()
    }

    fn interval_of(&self, theta: f64) -> usize {
        match self
            .thetas
            .binary_search_by(|v| v.partial_cmp(&theta).unwrap())
        {
            Ok(i) => i.min(self.thetas.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.thetas.len() - 2),
        }
    }

    /// Dense evaluation by cubic Hermite interpolation on the stored grid.
    pub fn psi_at(&self, theta: f64) -> f64 {
        assert!(
            theta >= 0.0 && theta <= self.theta_max() * (1.0 + 1e-12),
            "psi_at called outside the solved range"
        );
        if theta == 0.0 {
            return 0.0;
        }
        let i = self.interval_of(theta);
        if self.psi[i].is_finite() && self.psi[i + 1].is_finite() {
            hermite(
                self.thetas[i],
                self.thetas[i + 1],
                self.psi[i],
                self.psi[i + 1],
                self.dpsi[i],
                self.dpsi[i + 1],
                theta,
            )
        } else {
            self.log_psi_at(theta).exp()
        }
    }

    /// `log psi(theta)`; `-inf` at the origin.
    pub fn log_psi_at(&self, theta: f64) -> f64 {
        assert!(
            theta >= 0.0 && theta <= self.theta_max() * (1.0 + 1e-12),
            "log_psi_at called outside the solved range"
        );
        if theta == 0.0 {
            return f64::NEG_INFINITY;
        }
        let i = self.interval_of(theta);
        if i == 0 || !self.log_psi[i].is_finite() {
            // first interval contains the zero of psi: interpolate linearly
            return self
                .psi_linear_interval(i, theta)
                .max(f64::MIN_POSITIVE)
                .ln();
        }
        hermite(
            self.thetas[i],
            self.thetas[i + 1],
            self.log_psi[i],
            self.log_psi[i + 1],
            self.w[i],
            self.w[i + 1],
            theta,
        )
    }

    fn psi_linear_interval(&self, i: usize, theta: f64) -> f64 {
        hermite(
            self.thetas[i],
            self.thetas[i + 1],
            self.psi[i],
            self.psi[i + 1],
            self.dpsi[i],
            self.dpsi[i + 1],
            theta,
        )
    }

    /// `psi'(theta)`; `+inf` once out of the linear range.
    pub fn dpsi_at(&self, theta: f64) -> f64 {
        let i = self.interval_of(theta);
        if self.dpsi[i].is_finite() && self.dpsi[i + 1].is_finite() {
            // second derivative of psi is c psi, available at the nodes
            hermite(
                self.thetas[i],
                self.thetas[i + 1],
                self.dpsi[i],
                self.dpsi[i + 1],
                self.cvals[i] * self.psi[i],
                self.cvals[i + 1] * self.psi[i + 1],
                theta,
            )
        } else {
            (self.log_psi_at(theta) + self.w_at(theta).ln()).exp()
        }
    }

    /// Logarithmic derivative `psi'/psi`.
    pub fn w_at(&self, theta: f64) -> f64 {
        assert!(theta > 0.0, "w = psi'/psi diverges at the origin");
        let i = self.interval_of(theta);
        if self.w[i].is_finite() && self.w[i + 1].is_finite() {
            hermite(
                self.thetas[i],
                self.thetas[i + 1],
                self.w[i],
                self.w[i + 1],
                self.cvals[i] - self.w[i] * self.w[i],
                self.cvals[i + 1] - self.w[i + 1] * self.w[i + 1],
                theta,
            )
        } else {
            // only the node at theta = 0 has infinite w
            self.dpsi_at(theta) / self.psi_at(theta)
        }
    }

    /// `log( d w(d) * integral_0^R psi(t)^{d-1} dt )`: the log ball volume
    /// of the model manifold with this comparison function.
    pub fn log_ball_volume(&self, dim: u32, radius: f64) -> Result<f64> {
        if radius == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        if !(radius > 0.0) || radius > self.theta_max() * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "ball radius {radius} outside the solved range (0, {}]",
                self.theta_max()
            )));
        }
        let log_integral = integrate_adaptive_log(0.0, radius, 1e-12, |t| {
            (dim as f64 - 1.0) * self.log_psi_at(t)
        })?;
        Ok(unit_sphere_area(dim).ln() + log_integral)
    }
}

fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let t = ((x - x0) / h).clamp(0.0, 1.0);
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * d1
}

/// Options for [`solve_psi_with`].
#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub tol: f64,
    /// cap on the step size, keeping the stored grid dense enough for
    /// accurate Hermite interpolation between nodes
    pub max_step: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_step: None,
        }
    }
}

/// Solve the comparison IVP up to `theta_max` with local error target `tol`.
pub fn solve_psi(profile: &CurvatureProfile, theta_max: f64, tol: f64) -> Result<PsiSolution> {
    solve_psi_with(
        profile,
        theta_max,
        SolveOptions {
            tol,
            ..SolveOptions::default()
        },
    )
}

pub fn solve_psi_with(
    profile: &CurvatureProfile,
    theta_max: f64,
    opts: SolveOptions,
) -> Result<PsiSolution> {
    if !(theta_max > 0.0) {
        return Err(Error::InvalidParameter(format!("theta_max must be positive, got {theta_max}")));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if let Some(hi) = profile.domain_max() {
        if theta_max > hi {
            return Err(Error::InvalidProfile(format!(
                "theta_max = {theta_max} exceeds the tabulated range end {hi}"
            )));
        }
    }
    profile.eval(0.0)?;

    let max_step = opts.max_step.unwrap_or(theta_max / 256.0).min(theta_max / 16.0);
    let mut sol = PsiSolution {
        thetas: vec![0.0],
        psi: vec![0.0],
        dpsi: vec![1.0],
        log_psi: vec![f64::NEG_INFINITY],
        w: vec![f64::INFINITY],
        cvals: vec![profile.eval(0.0)?],
        tol: opts.tol,
    };

    let switch_theta = integrate_linear_phase(profile, theta_max, opts.tol, max_step, &mut sol)?;
    if let Some(start) = switch_theta {
        integrate_log_phase(profile, start, theta_max, opts.tol, max_step, &mut sol)?;
    }

    validate_solution(&sol)?;
    Ok(sol)
}

/// Dormand–Prince 5(4) on the linear state (psi, psi'). Returns the switch
/// point if the solution outgrew the linear range before `theta_max`.
fn integrate_linear_phase(
    profile: &CurvatureProfile,
    theta_max: f64,
    tol: f64,
    max_step: f64,
    sol: &mut PsiSolution,
) -> Result<Option<f64>> {
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    // difference between the 5th- and 4th-order weights
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];

    let f = |theta: f64, y: &[f64; 2]| -> Result<[f64; 2]> {
        Ok([y[1], profile.eval(theta)? * y[0]])
    };

    let mut theta = 0.0_f64;
    let mut y = [0.0_f64, 1.0_f64];
    let mut k1 = f(theta, &y)?;
    let mut h = (max_step / 8.0).min(theta_max / 1024.0).max(1e-8 * theta_max);

    while theta < theta_max {
        if theta + h > theta_max {
            h = theta_max - theta;
        }
        if h < 16.0 * f64::EPSILON * theta.max(1.0) {
            return Err(Error::IntegratorFailure(format!(
                "step size underflow at theta = {theta} (tol = {tol})"
            )));
        }
        let mut k = [[0.0_f64; 2]; 7];
        k[0] = k1;
        for stage in 0..6 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(stage + 1) {
                ys[0] += h * A[stage][j] * kj[0];
                ys[1] += h * A[stage][j] * kj[1];
            }
            k[stage + 1] = f(theta + C[stage] * h, &ys)?;
        }
        // k[6] was evaluated at the 5th-order solution (FSAL)
        let mut ynew = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            ynew[0] += h * A[5][j] * kj[0];
            ynew[1] += h * A[5][j] * kj[1];
        }
        let mut err = 0.0_f64;
        for i in 0..2 {
            let e: f64 = (0..7).map(|j| E[j] * k[j][i]).sum::<f64>() * h;
            let scale = tol + tol * y[i].abs().max(ynew[i].abs());
            err = err.max((e / scale).abs());
        }
        if err <= 1.0 {
            theta += h;
            y = ynew;
            k1 = k[6];
            sol.thetas.push(theta);
            sol.psi.push(y[0]);
            sol.dpsi.push(y[1]);
            sol.log_psi.push(if y[0] > 0.0 { y[0].ln() } else { f64::NEG_INFINITY });
            sol.w.push(if y[0] > 0.0 { y[1] / y[0] } else { f64::INFINITY });
            sol.cvals.push(profile.eval(theta)?);
            if y[0] > LOG_SWITCH {
                return Ok(Some(theta));
            }
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (h * factor).min(max_step);
    }
    Ok(None)
}

/// Log-domain phase: state `(L, w) = (log psi, psi'/psi)` with
/// `L' = w`, `w' = c - w^2`. Each step freezes `c` at the midpoint, where
/// the Riccati equation has an explicit tanh/coth solution; step doubling
/// controls the error. Unconditionally stable for growing profiles.
fn integrate_log_phase(
    profile: &CurvatureProfile,
    start: f64,
    theta_max: f64,
    tol: f64,
    max_step: f64,
    sol: &mut PsiSolution,
) -> Result<()> {
    let mut theta = start;
    let mut state = (
        *sol.log_psi.last().unwrap(),
        *sol.w.last().unwrap(),
    );
    let mut h = max_step.min((theta_max - start) / 16.0).max(1e-12);
    let step_tol = tol.max(1e-13);

    while theta < theta_max {
        if theta + h > theta_max {
            h = theta_max - theta;
        }
        if h < 16.0 * f64::EPSILON * theta.max(1.0) {
            return Err(Error::IntegratorFailure(format!(
                "log-phase step size underflow at theta = {theta}"
            )));
        }
        let full = frozen_riccati_step(profile, theta, state, h)?;
        let half1 = frozen_riccati_step(profile, theta, state, 0.5 * h)?;
        let half2 = frozen_riccati_step(profile, theta + 0.5 * h, half1, 0.5 * h)?;
        let err = ((full.0 - half2.0).abs() / (step_tol * (1.0 + half2.0.abs())))
            .max((full.1 - half2.1).abs() / (step_tol * (1.0 + half2.1.abs())));
        if err <= 1.0 {
            theta += h;
            state = half2;
            sol.thetas.push(theta);
            sol.psi.push(if state.0 < 709.0 { state.0.exp() } else { f64::INFINITY });
            sol.dpsi.push(if state.0 + state.1.ln() < 709.0 {
                (state.0 + state.1.ln()).exp()
            } else {
                f64::INFINITY
            });
            sol.log_psi.push(state.0);
            sol.w.push(state.1);
            sol.cvals.push(profile.eval(theta)?);
        }
        let factor = if err == 0.0 {
            4.0
        } else {
            (0.9 * err.powf(-1.0 / 3.0)).clamp(0.2, 4.0)
        };
        h = (h * factor).min(max_step);
    }
    Ok(())
}

/// One exact step of `L' = w`, `w' = cbar - w^2` with `cbar` frozen at the
/// midpoint of the step.
fn frozen_riccati_step(
    profile: &CurvatureProfile,
    theta: f64,
    (l, w): (f64, f64),
    h: f64,
) -> Result<(f64, f64)> {
    let cbar = profile.eval(theta + 0.5 * h)?;
    let s = cbar.sqrt();
    let ratio = w / s;
    if (ratio - 1.0).abs() < 1e-12 {
        return Ok((l + s * h, s));
    }
    if ratio > 1.0 {
        // w = s coth(s(t + k)), k from w(0) = w
        let k = atanh_checked(1.0 / ratio) / s;
        let w_new = s * coth(s * (h + k));
        let dl = log_sinh(s * (h + k)) - log_sinh(s * k);
        Ok((l + dl, w_new))
    } else {
        // w = s tanh(s(t + k))
        let k = atanh_checked(ratio) / s;
        let w_new = s * (s * (h + k)).tanh();
        let dl = log_cosh(s * (h + k)) - log_cosh(s * k);
        Ok((l + dl, w_new))
    }
}

fn coth(x: f64) -> f64 {
    1.0 / x.tanh()
}

fn atanh_checked(x: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&x));
    x.atanh()
}

fn validate_solution(sol: &PsiSolution) -> Result<()> {
    for i in 1..sol.thetas.len() {
        let increasing = if sol.psi[i].is_finite() && sol.psi[i - 1].is_finite() {
            sol.psi[i] > sol.psi[i - 1]
        } else {
            sol.log_psi[i] > sol.log_psi[i - 1]
        };
        if !increasing {
            return Err(Error::IntegratorFailure(format!(
                "psi failed to be strictly increasing near theta = {}",
                sol.thetas[i]
            )));
        }
        if sol.dpsi[i].is_finite() && sol.dpsi[i] < 1.0 - 1e-9 {
            return Err(Error::IntegratorFailure(format!(
                "psi' dropped below 1 near theta = {} (psi' = {})",
                sol.thetas[i], sol.dpsi[i]
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// closed form and bounds
// ---------------------------------------------------------------------------

/// `sinh(sqrt(c) theta)/sqrt(c)` for `c > 0`, `theta` for `c = 0`, with a
/// continuous limit as `c -> 0`.
pub fn psi_closed_form(c: f64, theta: f64) -> f64 {
    assert!(c >= 0.0 && theta >= 0.0);
    sinh_ratio(c, theta)
}

/// Upper bound `theta * exp(integral_0^theta sqrt(c))`, valid for
/// non-decreasing profiles. May overflow to `+inf`; see
/// [`log_psi_upper_bound`].
pub fn psi_upper_bound(profile: &CurvatureProfile, theta: f64) -> Result<f64> {
    Ok(log_psi_upper_bound(profile, theta)?.exp())
}

/// `log` of [`psi_upper_bound`].
pub fn log_psi_upper_bound(profile: &CurvatureProfile, theta: f64) -> Result<f64> {
    if !profile.monotone_nondecreasing {
        return Err(Error::Precondition(
            "the psi upper bound needs a non-decreasing profile".into(),
        ));
    }
    if theta == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(theta.ln() + profile.sqrt_integral(0.0, theta)?)
}

/// Result of the asymptotic lower bound
/// `psi(theta) >= psi(theta0) exp((1-eps) integral_{theta0}^theta sqrt(c))`.
///
/// The bound is only guaranteed for `theta0` large enough, so the check
/// reports whether it actually held at the given anchor.
#[derive(Clone, Copy, Debug)]
pub struct LowerBoundCheck {
    pub bound: f64,
    pub log_bound: f64,
    pub holds: bool,
}

pub fn psi_lower_bound(
    profile: &CurvatureProfile,
    eps: f64,
    theta0: f64,
    theta: f64,
    psi: &PsiSolution,
) -> Result<LowerBoundCheck> {
    if !profile.satisfies_c32 {
        return Err(Error::Precondition(
            "the asymptotic lower bound needs the decay condition on Dc/c^(3/2)".into(),
        ));
    }
    if !(0.0 < eps && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0,1), got {eps}")));
    }
    if !(theta >= theta0) || !(theta0 > 0.0) {
        return Err(Error::Precondition(format!(
            "need theta >= theta0 > 0, got theta0 = {theta0}, theta = {theta}"
        )));
    }
    let log_bound = psi.log_psi_at(theta0) + (1.0 - eps) * profile.sqrt_integral(theta0, theta)?;
    let log_psi = psi.log_psi_at(theta);
    let holds = log_psi >= log_bound - 1e-9 * (1.0 + log_bound.abs());
    Ok(LowerBoundCheck {
        bound: log_bound.exp(),
        log_bound,
        holds,
    })
}

/// Scan helper for the anchor `theta0` of [`psi_lower_bound`]: the bound
/// holds from any point past which `psi'/psi >= (1-eps) sqrt(c)` stays true,
/// since integrating that inequality reproduces the bound. Returns the first
/// grid point with that property, or `None` if the tail never settles.
pub fn find_theta0(profile: &CurvatureProfile, eps: f64, psi: &PsiSolution) -> Result<Option<f64>> {
    if !(0.0 < eps && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0,1), got {eps}")));
    }
    let thetas = psi.thetas();
    let mut candidate: Option<f64> = None;
    for (i, &t) in thetas.iter().enumerate().skip(1) {
        let w = psi.w[i];
        let target = (1.0 - eps) * profile.eval(t)?.sqrt();
        if w >= target {
            candidate.get_or_insert(t);
        } else {
            candidate = None;
        }
    }
    Ok(candidate)
}

/// Which side of `psi` the pivot bound lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundSide {
    /// a lower bound for `psi(theta)` (`theta >= pivot`)
    Below,
    /// an upper bound for `psi(theta)` (`theta <= pivot`)
    Above,
}

#[derive(Clone, Copy, Debug)]
pub struct SandwichBound {
    pub bound: f64,
    pub log_bound: f64,
    pub side: BoundSide,
    /// Whether the stated side is actually guaranteed at this pivot. The
    /// exponential rate `sqrt(c(R))` is only valid while
    /// `psi'(R)/psi(R) >= sqrt(c(R))`; for genuinely increasing profiles the
    /// log-derivative falls below `sqrt(c)` past a crossover radius and the
    /// bound can fail on both sides (see [`psi_sandwich_origin_rate`] for a
    /// rate that is always valid).
    pub guaranteed: bool,
}

/// Pivot bound `psi(R) exp(sqrt(c(R)) (theta - R))` for non-decreasing
/// profiles, flagged `Below` for `theta >= R` and `Above` for `theta <= R`.
///
/// The flag is honest only when `guaranteed` is set; constant profiles are
/// guaranteed at every pivot.
pub fn psi_sandwich(
    profile: &CurvatureProfile,
    pivot: f64,
    psi: &PsiSolution,
    theta: f64,
) -> Result<SandwichBound> {
    if !profile.monotone_nondecreasing {
        return Err(Error::Precondition(
            "the pivot bound needs a non-decreasing profile".into(),
        ));
    }
    if !(pivot > 0.0) || !(theta > 0.0) {
        return Err(Error::Precondition(format!(
            "pivot and theta must be positive, got R = {pivot}, theta = {theta}"
        )));
    }
    let rate = profile.eval(pivot)?.sqrt();
    let log_bound = psi.log_psi_at(pivot) + rate * (theta - pivot);
    let side = if theta >= pivot {
        BoundSide::Below
    } else {
        BoundSide::Above
    };
    let guaranteed = psi.w_at(pivot) >= rate * (1.0 - 1e-12);
    Ok(SandwichBound {
        bound: log_bound.exp(),
        log_bound,
        side,
        guaranteed,
    })
}

/// Pivot bound with the origin-frozen rate `sqrt(c(0))`:
/// `psi(R) exp(sqrt(c(0)) (theta - R))` is a valid lower bound for
/// `theta >= R` and upper bound for `theta <= R` at *every* pivot of a
/// non-decreasing profile, since `psi'/psi >= sqrt(c(0))` throughout.
pub fn psi_sandwich_origin_rate(
    profile: &CurvatureProfile,
    pivot: f64,
    psi: &PsiSolution,
    theta: f64,
) -> Result<SandwichBound> {
    if !profile.monotone_nondecreasing {
        return Err(Error::Precondition(
            "the pivot bound needs a non-decreasing profile".into(),
        ));
    }
    if !(pivot > 0.0) || !(theta > 0.0) {
        return Err(Error::Precondition(format!(
            "pivot and theta must be positive, got R = {pivot}, theta = {theta}"
        )));
    }
    let rate = profile.eval(0.0)?.sqrt();
    let log_bound = psi.log_psi_at(pivot) + rate * (theta - pivot);
    let side = if theta >= pivot {
        BoundSide::Below
    } else {
        BoundSide::Above
    };
    Ok(SandwichBound {
        bound: log_bound.exp(),
        log_bound,
        side,
        guaranteed: true,
    })
}

// ---------------------------------------------------------------------------
// model manifolds, volumes, Jacobians
// ---------------------------------------------------------------------------

/// Curvature description of a rotationally symmetric model manifold.
#[derive(Clone, Debug)]
pub enum Curvature {
    /// sectional curvature identically `-c` (`c = 0` is Euclidean space,
    /// `c > 0` the hyperbolic space of curvature `-c`)
    Constant(f64),
    /// two-sided radial envelopes `-c_m(r) <= K <= -c_M(r)`; volumes and
    /// Jacobians are then known only as two-sided bounds, unless the
    /// envelopes coincide (an exact rotationally symmetric model)
    Bounds {
        c_m: CurvatureProfile,
        c_big_m: CurvatureProfile,
    },
}

#[derive(Clone, Debug)]
pub struct ModelManifold {
    dim: u32,
    curvature: Curvature,
}

impl ModelManifold {
    pub fn hyperbolic(dim: u32, c: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be >= 2, got {dim}")));
        }
        if !(c >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "constant-curvature parameter must be >= 0, got {c}"
            )));
        }
        Ok(Self {
            dim,
            curvature: Curvature::Constant(c),
        })
    }

    pub fn euclidean(dim: u32) -> Result<Self> {
        Self::hyperbolic(dim, 0.0)
    }

    pub fn with_bounds(dim: u32, c_m: CurvatureProfile, c_big_m: CurvatureProfile) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be >= 2, got {dim}")));
        }
        // envelope consistency: c_M <= c_m pointwise (sampled)
        let hi = c_m
            .domain_max()
            .unwrap_or(f64::INFINITY)
            .min(c_big_m.domain_max().unwrap_or(f64::INFINITY))
            .min(100.0);
        for i in 0..=256 {
            let t = hi * i as f64 / 256.0;
            if c_big_m.eval(t)? > c_m.eval(t)? * (1.0 + 1e-12) {
                return Err(Error::InvalidParameter(format!(
                    "curvature envelopes out of order at theta = {t}: need c_M <= c_m"
                )));
            }
        }
        Ok(Self {
            dim,
            curvature: Curvature::Bounds { c_m, c_big_m },
        })
    }

    /// Exact rotationally symmetric model with curvature `-c(r)`.
    pub fn rotationally_symmetric(dim: u32, profile: CurvatureProfile) -> Result<Self> {
        Self::with_bounds(dim, profile.clone(), profile)
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn curvature(&self) -> &Curvature {
        &self.curvature
    }

    pub fn constant_curvature(&self) -> Option<f64> {
        match self.curvature {
            Curvature::Constant(c) => Some(c),
            _ => None,
        }
    }

    /// Comparison solutions `(psi_m, psi_M)` out to `theta_max`. Constant
    /// curvature uses the closed form through the same interface.
    pub fn psi_pair(&self, theta_max: f64, tol: f64) -> Result<(PsiSource, PsiSource)> {
        match &self.curvature {
            Curvature::Constant(c) => Ok((PsiSource::Closed(*c), PsiSource::Closed(*c))),
            Curvature::Bounds { c_m, c_big_m } => {
                let m = solve_psi(c_m, theta_max, tol)?;
                Ok((
                    PsiSource::Solved(m.clone()),
                    // identical envelopes share one solve
                    if profiles_identical(c_m, c_big_m) {
                        PsiSource::Solved(m)
                    } else {
                        PsiSource::Solved(solve_psi(c_big_m, theta_max, tol)?)
                    },
                ))
            }
        }
    }
}

fn profiles_identical(a: &CurvatureProfile, b: &CurvatureProfile) -> bool {
    match (&a.kind, &b.kind) {
        (ProfileKind::Constant { c: x }, ProfileKind::Constant { c: y }) => x == y,
        (
            ProfileKind::Power { exponent: k1, floor: f1 },
            ProfileKind::Power { exponent: k2, floor: f2 },
        ) => k1 == k2 && f1 == f2,
        (
            ProfileKind::Exponential { amplitude: a1, rate: r1 },
            ProfileKind::Exponential { amplitude: a2, rate: r2 },
        ) => a1 == a2 && r1 == r2,
        _ => false,
    }
}

/// A comparison function, either in closed form (constant curvature) or as a
/// numerical solution.
#[derive(Clone, Debug)]
pub enum PsiSource {
    Closed(f64),
    Solved(PsiSolution),
}

impl PsiSource {
    pub fn psi_at(&self, theta: f64) -> f64 {
        match self {
            PsiSource::Closed(c) => sinh_ratio(*c, theta),
            PsiSource::Solved(sol) => sol.psi_at(theta),
        }
    }

    pub fn log_psi_at(&self, theta: f64) -> f64 {
        match self {
            PsiSource::Closed(c) => log_sinh_ratio(*c, theta),
            PsiSource::Solved(sol) => sol.log_psi_at(theta),
        }
    }
}

/// Two-sided bounds `(lower, upper)` on the volume of the geodesic ball of
/// radius `R`; the sides coincide for constant curvature. Computed in the
/// log domain, so strongly growing profiles do not overflow.
pub fn log_ball_volume(manifold: &ModelManifold, radius: f64) -> Result<(f64, f64)> {
    if !(radius >= 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be >= 0, got {radius}")));
    }
    if radius == 0.0 {
        return Ok((f64::NEG_INFINITY, f64::NEG_INFINITY));
    }
    let d = manifold.dim();
    let (psi_m, psi_big_m) = manifold.psi_pair(radius, 1e-12)?;
    let log_from = |src: &PsiSource| -> Result<f64> {
        let log_integral =
            integrate_adaptive_log(0.0, radius, 1e-12, |t| (d as f64 - 1.0) * src.log_psi_at(t))?;
        Ok(unit_sphere_area(d).ln() + log_integral)
    };
    let upper = log_from(&psi_m)?;
    let lower = match manifold.curvature() {
        Curvature::Constant(_) => upper,
        _ => log_from(&psi_big_m)?,
    };
    Ok((lower, upper))
}

/// Linear-domain ball volume bounds; `+inf` when out of `f64` range.
pub fn ball_volume(manifold: &ModelManifold, radius: f64) -> Result<(f64, f64)> {
    let (lo, hi) = log_ball_volume(manifold, radius)?;
    Ok((lo.exp(), hi.exp()))
}

/// Two-sided bounds on the Jacobian of the exponential map at radius `r`:
/// `((psi_M(r)/r)^{d-1}, (psi_m(r)/r)^{d-1})`, with the `r -> 0` limit
/// `(1, 1)`.
pub fn jacobian_bounds(manifold: &ModelManifold, r: f64) -> Result<(f64, f64)> {
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be >= 0, got {r}")));
    }
    if r == 0.0 {
        return Ok((1.0, 1.0));
    }
    let d = manifold.dim() as f64;
    let (psi_m, psi_big_m) = manifold.psi_pair(r, 1e-12)?;
    let upper = ((d - 1.0) * (psi_m.log_psi_at(r) - r.ln())).exp();
    let lower = ((d - 1.0) * (psi_big_m.log_psi_at(r) - r.ln())).exp();
    Ok((lower, upper))
}

// ---------------------------------------------------------------------------
// distances
// ---------------------------------------------------------------------------

/// Geodesic distance on the model space of constant curvature `-c` between
/// points at radii `r`, `s` with angle `phi` between their directions at the
/// pole. `c = 0` gives the Euclidean law of cosines; the formulas join
/// continuously.
///
/// The product form `cosh(a)cosh(b) - sinh(a)sinh(b)cos(phi)` is rearranged
/// as `cosh(a-b) + sinh(a)sinh(b)(1 - cos(phi))`, which has no cancellation;
/// rounding can still leave the acosh argument a hair under 1, which is
/// clamped.
pub fn model_distance(c: f64, r: f64, s: f64, phi: f64) -> f64 {
    assert!(c >= 0.0 && r >= 0.0 && s >= 0.0);
    assert!((-1e-12..=std::f64::consts::PI + 1e-12).contains(&phi), "phi must lie in [0, pi]");
    let phi = phi.clamp(0.0, std::f64::consts::PI);
    if c == 0.0 {
        return euclidean_chord(r, s, phi);
    }
    let sc = c.sqrt();
    let (a, b) = (sc * r, sc * s);
    if sc * (r + s) < 1e-6 {
        // curvature correction below rounding: fall back to the flat chord
        return euclidean_chord(r, s, phi);
    }
    let half = (0.5 * phi).sin();
    let one_minus_cos = 2.0 * half * half;
    if a + b < 650.0 {
        let arg = (a - b).cosh() + a.sinh() * b.sinh() * one_minus_cos;
        let arg = if arg < 1.0 {
            debug_assert!(arg > 1.0 - 1e-12, "acosh argument unexpectedly far below 1");
            1.0
        } else {
            arg
        };
        arg.acosh() / sc
    } else {
        // acosh(x) = log(2x) + O(x^{-2}) for the astronomically large case
        let log_arg = log_weighted_sum_exp(
            [
                (1.0, log_cosh(a - b)),
                (one_minus_cos.max(f64::MIN_POSITIVE), log_sinh(a) + log_sinh(b)),
            ]
            .into_iter(),
        );
        (std::f64::consts::LN_2 + log_arg) / sc
    }
}

fn euclidean_chord(r: f64, s: f64, phi: f64) -> f64 {
    let half = (0.5 * phi).sin();
    ((r - s) * (r - s) + 4.0 * r * s * half * half).sqrt()
}

/// Geodesic distance on the hyperbolic space of curvature `-c`, `c > 0`.
pub fn hyperbolic_distance(c: f64, r: f64, s: f64, phi: f64) -> f64 {
    assert!(c > 0.0, "hyperbolic distance needs c > 0");
    model_distance(c, r, s, phi)
}

/// Chordal lower bound `sqrt(r^2 + s^2 - 2 r s cos(phi))`: the distance of
/// the images under the logarithm map, never above the geodesic distance on
/// a non-positively curved space.
pub fn chordal_lower_bound(r: f64, s: f64, phi: f64) -> f64 {
    assert!(r >= 0.0 && s >= 0.0);
    euclidean_chord(r, s, phi.clamp(0.0, std::f64::consts::PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_hyperbolic() -> CurvatureProfile {
        CurvatureProfile::constant(1.0).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        assert_relative_eq!(psi_closed_form(1.0, 1.0), 1.0f64.sinh(), max_relative = 1e-14);
        assert_relative_eq!(psi_closed_form(1.0, 2.0), 2.0f64.sinh(), max_relative = 1e-14);
        assert_relative_eq!(psi_closed_form(0.0, 5.0), 5.0, max_relative = 1e-15);
        // c -> 0 limit is continuous through the series branch
        assert_abs_diff_eq!(psi_closed_form(1e-12, 1.0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn solver_matches_sinh_on_constant_profiles() {
        for &c in &[0.25, 1.0, 4.0] {
            let profile = CurvatureProfile::constant(c).unwrap();
            let tol = 1e-10;
            let sol = solve_psi(&profile, 10.0, tol).unwrap();
            for (&t, &p) in sol.thetas().iter().zip(sol.psi_values()) {
                let exact = psi_closed_form(c, t);
                assert!(
                    (p - exact).abs() <= 10.0 * tol * (1.0 + exact),
                    "c={c} theta={t}: psi={p}, exact={exact}"
                );
            }
        }
    }

    #[test]
    fn solver_initial_conditions() {
        let sol = solve_psi(&unit_hyperbolic(), 1.0, 1e-10).unwrap();
        assert_eq!(sol.psi_values()[0], 0.0);
        assert_eq!(sol.dpsi_values()[0], 1.0);
    }

    #[test]
    fn solver_rejects_bad_inputs() {
        assert!(solve_psi(&unit_hyperbolic(), 0.0, 1e-10).is_err());
        assert!(solve_psi(&unit_hyperbolic(), 1.0, 0.0).is_err());
        assert!(CurvatureProfile::constant(-1.0).is_err());
        assert!(CurvatureProfile::power(1.0, 0.0).is_err());
        // tolerance far below machine precision forces a step-size underflow
        let err = solve_psi(&unit_hyperbolic(), 1.0, 1e-300).unwrap_err();
        assert!(matches!(err, Error::IntegratorFailure(_)), "got {err:?}");
    }

    /// Independent special-function oracle for c(theta) = theta: the IVP
    /// y'' = x y, y(0) = 0, y'(0) = 1 is solved by
    /// `pi (Ai(0) Bi(x) - Bi(0) Ai(x))`, with Ai and Bi evaluated from their
    /// Maclaurin bases f, g and the classical values at the origin.
    fn airy_ivp_solution(x: f64) -> f64 {
        // f = 1 + x^3/6 + ..., f_{k+1} = f_k x^3 (3k+1)/((3k+1)(3k+2)(3k+3)) pattern;
        // g = x + x^4/12 + ...
        let mut f_term = 1.0;
        let mut g_term = x;
        let mut f_sum = f_term;
        let mut g_sum = g_term;
        for k in 0..60 {
            let kf = k as f64;
            f_term *= x * x * x / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
            g_term *= x * x * x / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
            f_sum += f_term;
            g_sum += g_term;
            if f_term.abs() < 1e-18 * f_sum.abs() && g_term.abs() < 1e-18 * g_sum.abs() {
                break;
            }
        }
        const GAMMA_2_3: f64 = 1.354_117_939_426_400_4; // Gamma(2/3)
        const GAMMA_1_3: f64 = 2.678_938_534_707_747_6; // Gamma(1/3)
        let c1 = 3.0f64.powf(-2.0 / 3.0) / GAMMA_2_3; // Ai(0)
        let c2 = 3.0f64.powf(-1.0 / 3.0) / GAMMA_1_3; // -Ai'(0)
        let ai = c1 * f_sum - c2 * g_sum;
        let bi = 3.0f64.sqrt() * (c1 * f_sum + c2 * g_sum);
        let bi0 = 3.0f64.sqrt() * c1;
        let ai0 = c1;
        std::f64::consts::PI * (ai0 * bi - bi0 * ai)
    }

    #[test]
    fn solver_matches_airy_oracle_for_linear_profile() {
        // c(theta) = theta with a vanishing floor
        let profile = CurvatureProfile::power(1.0, 1e-14).unwrap();
        let sol = solve_psi(&profile, 2.0, 1e-12).unwrap();
        let got = sol.psi_at(2.0);
        let expected = airy_ivp_solution(2.0);
        assert_relative_eq!(got, expected, max_relative = 1e-9);
    }

    #[test]
    fn upper_bound_dominates_solution() {
        // constant: psi(1) = sinh(1) <= e
        let profile = unit_hyperbolic();
        let b = psi_upper_bound(&profile, 1.0).unwrap();
        assert_relative_eq!(b, std::f64::consts::E, max_relative = 1e-12);
        assert!(1.0f64.sinh() <= b);
        assert_eq!(psi_upper_bound(&profile, 0.0).unwrap(), 0.0);
        // closed-form antiderivative oracle for c = 1 + t^2:
        // integral sqrt(1+t^2) = ( t sqrt(1+t^2) + asinh t ) / 2
        let profile = CurvatureProfile::power(2.0, 1.0).unwrap();
        let b = psi_upper_bound(&profile, 3.0).unwrap();
        let exact_integral = 0.5 * (3.0 * 10.0f64.sqrt() + 3.0f64.asinh());
        assert_relative_eq!(b, 3.0 * exact_integral.exp(), max_relative = 1e-10);
        // and it bounds the numerical solution
        let sol = solve_psi(&profile, 3.0, 1e-12).unwrap();
        assert!(sol.psi_at(3.0) <= b);
        // flag required
        let mut unflagged = unit_hyperbolic();
        unflagged.monotone_nondecreasing = false;
        assert!(matches!(
            psi_upper_bound(&unflagged, 1.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn lower_bound_examples() {
        let profile = unit_hyperbolic();
        let sol = solve_psi(&profile, 5.0, 1e-12).unwrap();
        let check = psi_lower_bound(&profile, 0.5, 1.0, 3.0, &sol).unwrap();
        assert_relative_eq!(check.bound, 1.0f64.sinh() * 1.0f64.exp(), max_relative = 1e-9);
        assert!(check.holds);
        assert!(check.bound <= 3.0f64.sinh());
        // theta = theta0: empty integral
        let check = psi_lower_bound(&profile, 0.5, 2.0, 2.0, &sol).unwrap();
        assert_relative_eq!(check.bound, 2.0f64.sinh(), max_relative = 1e-9);
        assert!(check.holds);
        // theta < theta0 is a precondition error
        assert!(psi_lower_bound(&profile, 0.5, 2.0, 1.0, &sol).is_err());
    }

    #[test]
    fn lower_bound_with_scanned_anchor_on_exponential_profile() {
        let profile = CurvatureProfile::exponential(1.0, 1.0).unwrap();
        let sol = solve_psi(&profile, 8.0, 1e-12).unwrap();
        let theta0 = find_theta0(&profile, 0.1, &sol).unwrap().expect("anchor exists");
        let check = psi_lower_bound(&profile, 0.1, theta0, theta0 + 2.0, &sol).unwrap();
        assert!(check.holds, "bound should hold at the scanned anchor");
    }

    #[test]
    fn sandwich_bound_sides() {
        let profile = unit_hyperbolic();
        let sol = solve_psi(&profile, 4.0, 1e-12).unwrap();
        let b = psi_sandwich(&profile, 1.0, &sol, 2.0).unwrap();
        assert_eq!(b.side, BoundSide::Below);
        assert!(b.guaranteed, "constant profiles are guaranteed at every pivot");
        assert_relative_eq!(b.bound, 1.0f64.sinh() * 1.0f64.exp(), max_relative = 1e-9);
        assert!(b.bound <= 2.0f64.sinh());
        // equality at the pivot
        let b = psi_sandwich(&profile, 1.5, &sol, 1.5).unwrap();
        assert_relative_eq!(b.bound, 1.5f64.sinh(), max_relative = 1e-9);
    }

    /// For growing profiles the log-derivative of psi falls below sqrt(c)
    /// past a crossover, and the pivot bound with rate sqrt(c(R)) fails on
    /// both sides; the `guaranteed` flag must report that, and the
    /// origin-rate variant must still hold. Reference values for
    /// c(theta) = 1 + theta come from the Airy closed form
    /// psi(theta) = pi (Ai(1) Bi(1+theta) - Bi(1) Ai(1+theta)).
    #[test]
    fn sandwich_bound_crossover_is_reported() {
        let profile = CurvatureProfile::power(1.0, 1.0).unwrap();
        let sol = solve_psi(&profile, 3.0, 1e-12).unwrap();
        // psi(1) = 1.2693260, psi(2) = 5.9413356 (Airy oracle)
        assert_relative_eq!(sol.psi_at(1.0), 1.2693260253843393, max_relative = 1e-9);
        assert_relative_eq!(sol.psi_at(2.0), 5.941335594622645, max_relative = 1e-9);
        let b = psi_sandwich(&profile, 2.0, &sol, 1.0).unwrap();
        assert_eq!(b.side, BoundSide::Above);
        assert!(!b.guaranteed, "w(2) = 1.6474 < sqrt(3): the rate is not valid here");
        // claimed upper bound psi(2) e^{-sqrt(3)} = 1.0511 < psi(1) = 1.2693
        assert!(b.bound < sol.psi_at(1.0), "the pivot-rate bound indeed fails here");
        // the origin-frozen rate stays valid on both sides
        let b = psi_sandwich_origin_rate(&profile, 2.0, &sol, 1.0).unwrap();
        assert!(b.bound >= sol.psi_at(1.0));
        let b = psi_sandwich_origin_rate(&profile, 2.0, &sol, 2.5).unwrap();
        assert!(b.bound <= sol.psi_at(2.5));
    }

    #[test]
    fn ball_volume_examples() {
        // d = 2, c = 1: 2 pi (cosh R - 1)
        let m = ModelManifold::hyperbolic(2, 1.0).unwrap();
        for &r in &[0.5, 1.0, 3.0] {
            let (lo, hi) = ball_volume(&m, r).unwrap();
            let exact = 2.0 * std::f64::consts::PI * (r.cosh() - 1.0);
            assert_relative_eq!(lo, exact, max_relative = 1e-11);
            assert_relative_eq!(hi, exact, max_relative = 1e-11);
        }
        // d = 2, c = 0, R = 1: pi
        let m = ModelManifold::euclidean(2).unwrap();
        let (lo, hi) = ball_volume(&m, 1.0).unwrap();
        assert_relative_eq!(lo, std::f64::consts::PI, max_relative = 1e-11);
        assert_relative_eq!(hi, std::f64::consts::PI, max_relative = 1e-11);
        // R = 0
        let (lo, hi) = ball_volume(&m, 0.0).unwrap();
        assert_eq!((lo, hi), (0.0, 0.0));
    }

    #[test]
    fn ball_volume_bounds_ordered_for_envelopes() {
        let c_m = CurvatureProfile::power(2.0, 1.0).unwrap(); // 1 + t^2
        let c_big_m = CurvatureProfile::constant(1.0).unwrap();
        let m = ModelManifold::with_bounds(2, c_m, c_big_m).unwrap();
        let (lo, hi) = ball_volume(&m, 2.0).unwrap();
        assert!(lo <= hi);
        assert!(lo > 0.0);
        // envelopes out of order are rejected
        let c_m = CurvatureProfile::constant(1.0).unwrap();
        let c_big_m = CurvatureProfile::power(2.0, 1.0).unwrap();
        assert!(ModelManifold::with_bounds(2, c_m, c_big_m).is_err());
    }

    #[test]
    fn jacobian_bound_examples() {
        let m = ModelManifold::hyperbolic(3, 1.0).unwrap();
        let (lo, hi) = jacobian_bounds(&m, 1.0).unwrap();
        let expected = (1.0f64.sinh() / 1.0).powi(2);
        assert_relative_eq!(lo, expected, max_relative = 1e-9);
        assert_relative_eq!(hi, expected, max_relative = 1e-9);
        assert_relative_eq!(expected, 1.38109784554, max_relative = 1e-9);
        let (lo, hi) = jacobian_bounds(&m, 0.0).unwrap();
        assert_eq!((lo, hi), (1.0, 1.0));
        // variable envelope: lower side from the closed form, upper from the solver
        let c_m = CurvatureProfile::power(2.0, 1.0).unwrap();
        let c_big_m = CurvatureProfile::constant(1.0).unwrap();
        let m = ModelManifold::with_bounds(2, c_m.clone(), c_big_m).unwrap();
        let (lo, hi) = jacobian_bounds(&m, 2.0).unwrap();
        assert_relative_eq!(lo, 2.0f64.sinh() / 2.0, max_relative = 1e-9);
        let sol = solve_psi(&c_m, 2.0, 1e-12).unwrap();
        assert_relative_eq!(hi, sol.psi_at(2.0) / 2.0, max_relative = 1e-9);
        assert!(lo <= hi);
    }

    #[test]
    fn monotone_comparison_between_profiles() {
        // Sturm comparison: pointwise larger c gives pointwise larger psi
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let base = rng.gen_range(0.2..2.0);
            let bump = rng.gen_range(0.0..3.0);
            let c1 = CurvatureProfile::constant(base).unwrap();
            let c2 = CurvatureProfile::power(rng.gen_range(0.5..2.0), base + bump).unwrap();
            let s1 = solve_psi(&c1, 4.0, 1e-11).unwrap();
            let s2 = solve_psi(&c2, 4.0, 1e-11).unwrap();
            for i in 1..=16 {
                let t = 4.0 * i as f64 / 16.0;
                assert!(
                    s1.psi_at(t) <= s2.psi_at(t) * (1.0 + 1e-9),
                    "Sturm comparison failed at theta = {t}"
                );
            }
        }
    }

    #[test]
    fn dpsi_stays_above_one() {
        for profile in [
            unit_hyperbolic(),
            CurvatureProfile::power(2.0, 0.5).unwrap(),
            CurvatureProfile::exponential(0.5, 0.7).unwrap(),
        ] {
            let sol = solve_psi(&profile, 6.0, 1e-11).unwrap();
            for &d in sol.dpsi_values() {
                assert!(d >= 1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn log_phase_continues_past_overflow() {
        // c = 4 over theta in [0, 400]: psi ~ e^{800}/4, far beyond f64
        let profile = CurvatureProfile::constant(4.0).unwrap();
        let sol = solve_psi(&profile, 400.0, 1e-10).unwrap();
        let expected = log_sinh_ratio(4.0, 400.0);
        assert_relative_eq!(sol.log_psi_at(400.0), expected, max_relative = 1e-8);
        assert!(sol.psi_at(400.0).is_infinite());
        // mid-range values still finite and accurate
        assert_relative_eq!(sol.log_psi_at(100.0), log_sinh_ratio(4.0, 100.0), max_relative = 1e-8);
    }

    #[test]
    fn tabulated_profile_interpolates_and_refuses_extrapolation() {
        let pairs: Vec<(f64, f64)> = (0..=20).map(|i| {
            let t = i as f64 * 0.25;
            (t, 1.0 + t * t)
        }).collect();
        let profile = CurvatureProfile::tabulated(&pairs, true, true).unwrap();
        assert_relative_eq!(profile.eval(1.13).unwrap(), 1.0 + 1.13 * 1.13, max_relative = 1e-3);
        assert!(profile.eval(6.0).is_err());
        assert!(solve_psi(&profile, 6.0, 1e-10).is_err());
        // close to the analytic solution of the same profile
        let analytic = CurvatureProfile::power(2.0, 1.0).unwrap();
        let s_tab = solve_psi(&profile, 5.0, 1e-10).unwrap();
        let s_ana = solve_psi(&analytic, 5.0, 1e-10).unwrap();
        assert_relative_eq!(s_tab.psi_at(5.0), s_ana.psi_at(5.0), max_relative = 1e-3);
        // a decreasing table with the monotone flag set is rejected
        let bad = CurvatureProfile::tabulated(&[(0.0, 2.0), (1.0, 1.0)], true, false);
        assert!(bad.is_err());
    }

    #[test]
    fn distance_examples() {
        // identical points
        assert_abs_diff_eq!(hyperbolic_distance(1.0, 1.3, 1.3, 0.0), 0.0, epsilon = 1e-9);
        // opposite rays
        assert_relative_eq!(hyperbolic_distance(1.0, 1.0, 2.0, std::f64::consts::PI), 3.0, max_relative = 1e-12);
        // right angle, c = 1: hyperboloid-model oracle via the Minkowski product
        let r = 1.0f64;
        let s = 2.0f64;
        let x = [r.cosh(), r.sinh(), 0.0];
        let y = [s.cosh(), 0.0, s.sinh()];
        let minkowski = x[0] * y[0] - x[1] * y[1] - x[2] * y[2];
        let oracle = minkowski.acosh();
        assert_relative_eq!(
            hyperbolic_distance(1.0, r, s, std::f64::consts::FRAC_PI_2),
            oracle,
            max_relative = 1e-12
        );
        // scaled curvature against the same oracle
        let c = 2.5f64;
        let oracle_c = {
            let (a, b) = (c.sqrt() * r, c.sqrt() * s);
            let x = [a.cosh(), a.sinh(), 0.0];
            let y = [b.cosh(), 0.0, b.sinh()];
            (x[0] * y[0] - x[1] * y[1] - x[2] * y[2]).acosh() / c.sqrt()
        };
        assert_relative_eq!(
            hyperbolic_distance(c, r, s, std::f64::consts::FRAC_PI_2),
            oracle_c,
            max_relative = 1e-12
        );
    }

    #[test]
    fn chordal_bound_below_geodesic_distance() {
        assert_abs_diff_eq!(chordal_lower_bound(1.0, 1.0, 0.0), 0.0, epsilon = 1e-15);
        assert_relative_eq!(chordal_lower_bound(1.0, 2.0, std::f64::consts::PI), 3.0, max_relative = 1e-14);
        // right angle example
        let chord = chordal_lower_bound(1.0, 1.0, std::f64::consts::FRAC_PI_2);
        assert_relative_eq!(chord, 2.0f64.sqrt(), max_relative = 1e-14);
        let hyp = hyperbolic_distance(1.0, 1.0, 1.0, std::f64::consts::FRAC_PI_2);
        assert_relative_eq!(hyp, (1.0f64.cosh() * 1.0f64.cosh()).acosh(), max_relative = 1e-12);
        assert!(chord <= hyp);
        // randomized domination including the colinear saturating case
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let c = rng.gen_range(0.0..4.0);
            let r = rng.gen_range(0.0..5.0);
            let s = rng.gen_range(0.0..5.0);
            let phi = rng.gen_range(0.0..std::f64::consts::PI);
            let chord = chordal_lower_bound(r, s, phi);
            let dist = model_distance(c, r, s, phi);
            assert!(
                chord <= dist * (1.0 + 1e-10) + 1e-12,
                "chord {chord} > distance {dist} at c={c}, r={r}, s={s}, phi={phi}"
            );
        }
    }

    #[test]
    fn triangle_inequality_in_a_plane() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..2000 {
            let c = rng.gen_range(0.05..4.0);
            let radii: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..4.0)).collect();
            let angles: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
            let ang = |i: usize, j: usize| {
                let mut d = (angles[i] - angles[j]).abs() % std::f64::consts::TAU;
                if d > std::f64::consts::PI {
                    d = std::f64::consts::TAU - d;
                }
                d
            };
            let d01 = model_distance(c, radii[0], radii[1], ang(0, 1));
            let d12 = model_distance(c, radii[1], radii[2], ang(1, 2));
            let d02 = model_distance(c, radii[0], radii[2], ang(0, 2));
            assert!(d02 <= d01 + d12 + 1e-9, "triangle inequality failed");
        }
    }

    #[test]
    fn distance_huge_radii_log_path() {
        // a + b far beyond overflow; compare against the asymptotic
        // d ~ r + s + (2/sqrt(c)) log(sin(phi/2)) for large radii
        let c = 1.0;
        let d = model_distance(c, 400.0, 420.0, std::f64::consts::FRAC_PI_2);
        let expected = 400.0 + 420.0 + 2.0 * (0.5f64.sqrt()).ln();
        assert_relative_eq!(d, expected, max_relative = 1e-10);
    }
}
