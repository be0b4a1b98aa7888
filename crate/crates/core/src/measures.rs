//! Radial probability densities on model manifolds, centred discrete
//! measures in log-coordinates, interaction potentials, masses and weighted
//! moments.

use crate::error::{Error, Result};
use crate::geometry::{Curvature, ModelManifold, MonotoneCubic, PsiSolution, solve_psi};
use crate::numeric::{log_sinh_ratio, log_weighted_sum_exp, sinh_ratio, unit_sphere_area};
use crate::quad::GaussLegendre;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const NODES_PER_CELL: usize = 8;

/// Builds the default radial grid: geometrically refined near the origin
/// (resolving the `rho^q` behaviour of fast diffusion) and uniform further
/// out.
pub fn radial_grid(r_max: f64, n: usize) -> Vec<f64> {
    assert!(r_max > 0.0 && n >= 8);
    let n_geo = n / 4;
    let split = 0.2 * r_max;
    let first = 1e-4 * r_max;
    let mut grid = Vec::with_capacity(n);
    grid.push(0.0);
    let ratio = (split / first).powf(1.0 / (n_geo as f64 - 1.0));
    let mut r = first;
    for _ in 0..n_geo {
        grid.push(r);
        r *= ratio;
    }
    let n_uni = n - grid.len();
    for i in 1..=n_uni {
        grid.push(split + (r_max - split) * i as f64 / n_uni as f64);
    }
    grid
}

/// The radial volume weight `J(r) = psi(r)^{d-1}` of the manifold, in log
/// form: closed-form for constant curvature, solved otherwise.
#[derive(Clone, Debug)]
enum VolumeWeight {
    Constant { c: f64 },
    Solved(PsiSolution),
}

/// An absolutely continuous radial probability density `rho(r)`, piecewise
/// linear on its grid, with density taken with respect to the Riemannian
/// volume of the manifold. Radial symmetry places the centre of mass at the
/// pole automatically.
#[derive(Clone, Debug)]
pub struct RadialDensity {
    manifold: ModelManifold,
    r_grid: Vec<f64>,
    values: Vec<f64>,
    /// an explicit discontinuity radius: the density drops to zero beyond
    /// it, and quadrature panels align with it
    jump_radius: Option<f64>,
    weight: VolumeWeight,
}

impl RadialDensity {
    pub fn new(manifold: ModelManifold, r_grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::with_jump(manifold, r_grid, values, None)
    }

    pub fn with_jump(
        manifold: ModelManifold,
        r_grid: Vec<f64>,
        values: Vec<f64>,
        jump_radius: Option<f64>,
    ) -> Result<Self> {
        if r_grid.len() != values.len() || r_grid.len() < 2 {
            return Err(Error::InvalidParameter(
                "radial density needs matching grids with at least two nodes".into(),
            ));
        }
        if r_grid[0] != 0.0 {
            return Err(Error::InvalidParameter("radial grid must start at r = 0".into()));
        }
        if r_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("radial grid must be strictly increasing".into()));
        }
        if values.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::InvalidParameter("density values must be non-negative".into()));
        }
        let r_max = *r_grid.last().unwrap();
        let weight = match manifold.curvature() {
            Curvature::Constant(c) => VolumeWeight::Constant { c: *c },
            Curvature::Bounds { c_m, c_big_m } => {
                // exact energies need a definite manifold: identical envelopes
                let same = format!("{:?}", c_m.kind) == format!("{:?}", c_big_m.kind);
                if !same {
                    return Err(Error::UnsupportedManifold(
                        "densities need a constant-curvature or exact rotationally symmetric manifold, \
                         not a bound-only pair"
                            .into(),
                    ));
                }
                VolumeWeight::Solved(solve_psi(c_m, r_max, 1e-12)?)
            }
        };
        Ok(Self {
            manifold,
            r_grid,
            values,
            jump_radius,
            weight,
        })
    }

    /// Uniform probability density on the geodesic ball of radius `R`.
    pub fn uniform_ball(manifold: &ModelManifold, radius: f64, grid_size: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!("ball radius must be positive, got {radius}")));
        }
        let grid: Vec<f64> = (0..grid_size)
            .map(|i| radius * i as f64 / (grid_size - 1) as f64)
            .collect();
        let mut density = Self::with_jump(
            manifold.clone(),
            grid,
            vec![1.0; grid_size],
            Some(radius),
        )?;
        let volume = density.mass();
        for v in &mut density.values {
            *v = 1.0 / volume;
        }
        Ok(density)
    }

    pub fn manifold(&self) -> &ModelManifold {
        &self.manifold
    }

    pub fn dim(&self) -> u32 {
        self.manifold.dim()
    }

    pub fn grid(&self) -> &[f64] {
        &self.r_grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn jump_radius(&self) -> Option<f64> {
        self.jump_radius
    }

    /// End of the support as represented: the jump radius when present,
    /// otherwise the last grid node.
    pub fn support_end(&self) -> f64 {
        self.jump_radius.unwrap_or(*self.r_grid.last().unwrap())
    }

    /// Piecewise-linear evaluation; zero beyond the support.
    pub fn eval(&self, r: f64) -> f64 {
        if r < 0.0 || r > self.support_end() {
            return 0.0;
        }
        let grid = &self.r_grid;
        if r >= *grid.last().unwrap() {
            return *self.values.last().unwrap();
        }
        let i = match grid.binary_search_by(|v| v.partial_cmp(&r).unwrap()) {
            Ok(i) => return self.values[i],
            Err(i) => i - 1,
        };
        let t = (r - grid[i]) / (grid[i + 1] - grid[i]);
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }

    /// `log J(r) = (d-1) log psi(r)` for the manifold's volume element.
    pub fn log_jacobian(&self, r: f64) -> f64 {
        let d = self.dim() as f64;
        match &self.weight {
            VolumeWeight::Constant { c } => (d - 1.0) * log_sinh_ratio(*c, r),
            VolumeWeight::Solved(psi) => (d - 1.0) * psi.log_psi_at(r),
        }
    }

    pub fn jacobian(&self, r: f64) -> f64 {
        self.log_jacobian(r).exp()
    }

    /// `d w(d) * integral f(r, rho(r)) J(r) dr` over the support, with
    /// Gauss–Legendre nodes inside every grid cell so that the kinks of the
    /// piecewise-linear density never cross a panel.
    pub fn weighted_integral<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        let rule = GaussLegendre::new(NODES_PER_CELL);
        let end = self.support_end();
        let mut sum = 0.0;
        for i in 0..self.r_grid.len() - 1 {
            let a = self.r_grid[i];
            let b = self.r_grid[i + 1].min(end);
            if b <= a {
                break;
            }
            sum += rule.integrate(a, b, |r| f(r, self.eval(r)) * self.jacobian(r));
        }
        unit_sphere_area(self.dim()) * sum
    }

    /// Log-domain variant for integrands far outside the `f64` range;
    /// `log_f` returns the log of the non-negative integrand `f(r, rho)`.
    pub fn log_weighted_integral<F: Fn(f64, f64) -> f64>(&self, log_f: F) -> f64 {
        let rule = GaussLegendre::new(NODES_PER_CELL);
        let end = self.support_end();
        let mut cells = Vec::new();
        for i in 0..self.r_grid.len() - 1 {
            let a = self.r_grid[i];
            let b = self.r_grid[i + 1].min(end);
            if b <= a {
                break;
            }
            cells.push((
                1.0,
                rule.integrate_log(a, b, |r| log_f(r, self.eval(r)) + self.log_jacobian(r)),
            ));
        }
        unit_sphere_area(self.dim()).ln() + log_weighted_sum_exp(cells.iter().copied())
    }

    /// Total mass `d w(d) integral rho J dr`.
    pub fn mass(&self) -> f64 {
        self.weighted_integral(|_, rho| rho)
    }

    /// Rescale to unit mass.
    pub fn normalize(&mut self) {
        let m = self.mass();
        assert!(m > 0.0, "cannot normalize a zero density");
        for v in &mut self.values {
            *v /= m;
        }
    }

    /// First moment `integral r_x dmu`, the 1-Wasserstein distance to the
    /// point mass at the pole.
    pub fn first_moment(&self) -> f64 {
        self.weighted_integral(|r, rho| r * rho)
    }

    /// Mass of the region `r >= radius`.
    pub fn tail_mass(&self, radius: f64) -> f64 {
        self.weighted_integral(|r, rho| if r >= radius { rho } else { 0.0 })
    }

    /// `integral (sinh(sqrt(c) r)/sqrt(c))^lambda rho dV` on a
    /// constant-curvature manifold (the Euclidean limit is the plain
    /// `lambda`-th radial moment).
    pub fn sinh_moment(&self, lambda: f64) -> Result<Moment> {
        let c = self.manifold.constant_curvature().ok_or_else(|| {
            Error::UnsupportedManifold("the sinh-weighted moment needs constant curvature".into())
        })?;
        self.moment_with(lambda, |r| log_sinh_ratio(c, r))
    }

    /// `integral psi(r)^lambda rho dV` with an explicitly supplied
    /// comparison function (reduces to [`Self::sinh_moment`] for constant
    /// profiles).
    pub fn psi_moment(&self, lambda: f64, psi: &PsiSolution) -> Result<Moment> {
        if psi.theta_max() < self.support_end() * (1.0 - 1e-12) {
            return Err(Error::InvalidParameter(
                "comparison solution does not cover the density support".into(),
            ));
        }
        self.moment_with(lambda, |r| psi.log_psi_at(r))
    }

    fn moment_with<G: Fn(f64) -> f64>(&self, lambda: f64, log_weight: G) -> Result<Moment> {
        if lambda < 0.0 {
            return Err(Error::InvalidParameter(format!("moment exponent must be >= 0, got {lambda}")));
        }
        let log_value = self.log_weighted_integral(|r, rho| {
            if rho <= 0.0 {
                f64::NEG_INFINITY
            } else {
                lambda * log_weight(r) + rho.ln()
            }
        });
        // tail test: a compactly represented density is trustworthy only if
        // its truncated tail was already negligible or explicitly cut
        if self.jump_radius.is_none() {
            let peak = self.values.iter().cloned().fold(0.0, f64::max);
            let edge = *self.values.last().unwrap();
            if edge > 1e-10 * peak {
                let end = self.support_end();
                let tail_start = 0.9 * end;
                let log_tail = self.log_weighted_integral(|r, rho| {
                    if rho <= 0.0 || r < tail_start {
                        f64::NEG_INFINITY
                    } else {
                        lambda * log_weight(r) + rho.ln()
                    }
                });
                if log_tail > log_value + (0.5f64).ln() {
                    return Ok(Moment::Divergent);
                }
            }
        }
        Ok(Moment::Finite(log_value.exp(), log_value))
    }
}

/// A weighted moment: finite with both linear and log value, or flagged
/// divergent when the truncated tail dominates the integral.
#[derive(Clone, Copy, Debug)]
pub enum Moment {
    /// `(value, log_value)`
    Finite(f64, f64),
    Divergent,
}

impl Moment {
    pub fn value(&self) -> Option<f64> {
        match self {
            Moment::Finite(v, _) => Some(*v),
            Moment::Divergent => None,
        }
    }

    pub fn log_value(&self) -> Option<f64> {
        match self {
            Moment::Finite(_, lv) => Some(*lv),
            Moment::Divergent => None,
        }
    }
}

// ---------------------------------------------------------------------------
// discrete measures
// ---------------------------------------------------------------------------

/// A weighted point cloud given by tangent vectors at the pole
/// (log-coordinates): the point is `exp_o(v)`, so `|v|` is its distance to
/// the pole. The centring condition `sum w_i v_i = 0` is exactly the
/// vanishing of the tangent-space centre of mass.
#[derive(Clone, Debug)]
pub struct DiscreteMeasure {
    dim: u32,
    curvature: f64,
    log_points: Vec<Vec<f64>>,
    weights: Vec<f64>,
    centred: bool,
}

impl DiscreteMeasure {
    pub fn new(dim: u32, curvature: f64, log_points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be >= 2, got {dim}")));
        }
        if !(curvature >= 0.0) {
            return Err(Error::InvalidParameter(format!("curvature parameter must be >= 0, got {curvature}")));
        }
        if log_points.len() != weights.len() || log_points.is_empty() {
            return Err(Error::InvalidParameter("points and weights must match and be non-empty".into()));
        }
        if log_points.iter().any(|v| v.len() != dim as usize) {
            return Err(Error::InvalidParameter("tangent vectors must have the manifold dimension".into()));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidParameter("weights must be positive".into()));
        }
        let mut measure = Self {
            dim,
            curvature,
            log_points,
            weights,
            centred: false,
        };
        measure.centred = measure.tangent_mean_norm() <= 1e-12 * measure.mean_radius().max(1.0);
        Ok(measure)
    }

    /// Samples `n` tangent vectors from an isotropic unit normal, subtracts
    /// the weighted mean (so the centring holds exactly), and applies
    /// uniform weights.
    pub fn centred_cloud(dim: u32, curvature: f64, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("cloud needs at least one point".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| standard_normal(&mut rng)).collect())
            .collect();
        let weights = vec![1.0 / n as f64; n];
        let mut mean = vec![0.0; dim as usize];
        for (p, w) in points.iter().zip(&weights) {
            for (m, x) in mean.iter_mut().zip(p) {
                *m += w * x;
            }
        }
        for p in &mut points {
            for (x, m) in p.iter_mut().zip(&mean) {
                *x -= m;
            }
        }
        let mut measure = Self::new(dim, curvature, points, weights)?;
        measure.centred = true;
        Ok(measure)
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn curvature(&self) -> f64 {
        self.curvature
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.log_points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_centred(&self) -> bool {
        self.centred
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn radius(&self, i: usize) -> f64 {
        self.log_points[i].iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    fn mean_radius(&self) -> f64 {
        (0..self.len()).map(|i| self.radius(i)).sum::<f64>() / self.len() as f64
    }

    /// Norm of `sum w_i v_i`.
    pub fn tangent_mean_norm(&self) -> f64 {
        let mut mean = vec![0.0; self.dim as usize];
        for (p, w) in self.log_points.iter().zip(&self.weights) {
            for (m, x) in mean.iter_mut().zip(p) {
                *m += w * x;
            }
        }
        mean.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Translate every tangent vector by `offset` (ruins the centring; used
    /// for negative controls).
    pub fn translated(&self, offset: &[f64]) -> Result<Self> {
        let points = self
            .log_points
            .iter()
            .map(|p| p.iter().zip(offset).map(|(x, o)| x + o).collect())
            .collect();
        Self::new(self.dim, self.curvature, points, self.weights.clone())
    }

    /// Geodesic distance between points `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (ri, rj) = (self.radius(i), self.radius(j));
        if ri == 0.0 || rj == 0.0 {
            return ri.max(rj);
        }
        let dot: f64 = self.log_points[i]
            .iter()
            .zip(&self.log_points[j])
            .map(|(a, b)| a * b)
            .sum();
        let cos_phi = (dot / (ri * rj)).clamp(-1.0, 1.0);
        crate::geometry::model_distance(self.curvature, ri, rj, cos_phi.acos())
    }

    /// First moment `sum w_i r_i`, the 1-Wasserstein distance to the point
    /// mass at the pole when the weights sum to one.
    pub fn first_moment(&self) -> f64 {
        (0..self.len()).map(|i| self.weights[i] * self.radius(i)).sum()
    }

    /// `sum_i w_i (sinh(sqrt(c) r_i)/sqrt(c))^lambda`.
    pub fn sinh_moment(&self, lambda: f64) -> f64 {
        (0..self.len())
            .map(|i| self.weights[i] * (lambda * log_sinh_ratio(self.curvature, self.radius(i))).exp())
            .sum()
    }

    pub fn tail_mass(&self, radius: f64) -> f64 {
        (0..self.len())
            .filter(|&i| self.radius(i) >= radius)
            .map(|i| self.weights[i])
            .sum()
    }
}

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; one value per call keeps the stream layout simple
    loop {
        let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let r = (-2.0 * u.ln()).sqrt();
        let z = r * v.cos();
        if z.is_finite() {
            return z;
        }
    }
}

// ---------------------------------------------------------------------------
// interaction potentials
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub enum PotentialKind {
    /// `theta^beta / beta`
    Power { beta: f64 },
    /// `ln(theta)`, singular at the origin
    Log,
    /// `ln(1 + theta)`
    Log1p,
    /// `exp(lambda sqrt(c) theta) - 1`
    ExpRate { lambda: f64, c: f64 },
    /// `(sinh(sqrt(c) theta)/sqrt(c))^lambda`
    SinhPower { lambda: f64, c: f64 },
    /// `exp(a e^{b theta}) - e^a`
    DoubleExp { a: f64, b: f64 },
    Tabulated(MonotoneCubic),
}

/// The interaction profile `h(theta)` of the potential
/// `W(x, y) = h(d(x, y))`; non-decreasing profiles model purely attractive
/// interactions.
#[derive(Clone, Debug)]
pub struct Potential {
    pub kind: PotentialKind,
    pub nondecreasing: bool,
    pub zero_at_origin: bool,
}

impl Potential {
    pub fn power(beta: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!("power potential needs beta > 0, got {beta}")));
        }
        Ok(Self {
            kind: PotentialKind::Power { beta },
            nondecreasing: true,
            zero_at_origin: true,
        })
    }

    pub fn log() -> Self {
        Self {
            kind: PotentialKind::Log,
            nondecreasing: true,
            zero_at_origin: false,
        }
    }

    pub fn log1p() -> Self {
        Self {
            kind: PotentialKind::Log1p,
            nondecreasing: true,
            zero_at_origin: true,
        }
    }

    pub fn exp_rate(lambda: f64, c: f64) -> Result<Self> {
        if !(lambda > 0.0) || !(c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "exponential potential needs lambda > 0 and c > 0, got {lambda}, {c}"
            )));
        }
        Ok(Self {
            kind: PotentialKind::ExpRate { lambda, c },
            nondecreasing: true,
            zero_at_origin: true,
        })
    }

    pub fn sinh_power(lambda: f64, c: f64) -> Result<Self> {
        if !(lambda > 0.0) || !(c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sinh-power potential needs lambda > 0 and c > 0, got {lambda}, {c}"
            )));
        }
        Ok(Self {
            kind: PotentialKind::SinhPower { lambda, c },
            nondecreasing: true,
            zero_at_origin: true,
        })
    }

    pub fn double_exp(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) || !(b > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "double-exponential potential needs a > 0 and b > 0, got {a}, {b}"
            )));
        }
        Ok(Self {
            kind: PotentialKind::DoubleExp { a, b },
            nondecreasing: true,
            zero_at_origin: true,
        })
    }

    pub fn tabulated(pairs: &[(f64, f64)], nondecreasing: bool, zero_at_origin: bool) -> Result<Self> {
        let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let table = MonotoneCubic::new(xs, ys)?;
        let pot = Self {
            kind: PotentialKind::Tabulated(table),
            nondecreasing,
            zero_at_origin,
        };
        if nondecreasing && !pot.check_nondecreasing_by_sampling() {
            return Err(Error::InvalidParameter(
                "potential flagged non-decreasing but decreases on the sampled grid".into(),
            ));
        }
        if zero_at_origin && pot.eval(0.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("potential flagged zero at origin but h(0) != 0".into()));
        }
        Ok(pot)
    }

    pub fn domain_max(&self) -> Option<f64> {
        match &self.kind {
            PotentialKind::Tabulated(t) => Some(t.domain().1),
            _ => None,
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        debug_assert!(theta >= 0.0);
        match &self.kind {
            PotentialKind::Power { beta } => theta.powf(*beta) / beta,
            PotentialKind::Log => theta.ln(),
            PotentialKind::Log1p => theta.ln_1p(),
            PotentialKind::ExpRate { lambda, c } => (lambda * c.sqrt() * theta).exp_m1(),
            PotentialKind::SinhPower { lambda, c } => (lambda * log_sinh_ratio(*c, theta)).exp(),
            PotentialKind::DoubleExp { a, b } => {
                // e^{a e^{b theta}} - e^a = e^a (e^{a(e^{b theta}-1)} - 1)
                a.exp() * (a * (b * theta).exp_m1()).exp_m1()
            }
            PotentialKind::Tabulated(t) => t
                .eval(theta)
                .unwrap_or_else(|| panic!("potential evaluated at theta = {theta} outside its table")),
        }
    }

    /// `ln h(theta)` where `h > 0`, stable for values far outside the `f64`
    /// range; `None` where `h <= 0`.
    pub fn log_eval(&self, theta: f64) -> Option<f64> {
        match &self.kind {
            PotentialKind::Power { beta } => {
                (theta > 0.0).then(|| beta * theta.ln() - beta.ln())
            }
            PotentialKind::Log => (theta > 1.0).then(|| theta.ln().ln()),
            PotentialKind::Log1p => (theta > 0.0).then(|| theta.ln_1p().ln()),
            PotentialKind::ExpRate { lambda, c } => {
                let x = lambda * c.sqrt() * theta;
                (theta > 0.0).then(|| {
                    if x > 1.0 {
                        x + (-(-x).exp()).ln_1p()
                    } else {
                        x.exp_m1().ln()
                    }
                })
            }
            PotentialKind::SinhPower { lambda, c } => {
                (theta > 0.0).then(|| lambda * log_sinh_ratio(*c, theta))
            }
            PotentialKind::DoubleExp { a, b } => {
                let inner = a * (b * theta).exp();
                (theta > 0.0).then(|| {
                    if inner - a > 1.0 {
                        inner + (-(a - inner).exp()).ln_1p()
                    } else {
                        (a.exp() * (a * (b * theta).exp_m1()).exp_m1()).ln()
                    }
                })
            }
            PotentialKind::Tabulated(_) => {
                let v = self.eval(theta);
                (v > 0.0).then(|| v.ln())
            }
        }
    }

    /// Sampled convexity check (second differences) on `[0, probe_end]`.
    pub fn convex_on_samples(&self, probe_end: f64) -> bool {
        let n = 256;
        let h = probe_end / n as f64;
        for i in 1..n {
            let x = i as f64 * h;
            let second = self.eval(x + h) - 2.0 * self.eval(x) + self.eval(x - h);
            if second < -1e-9 * self.eval(x + h).abs().max(1.0) {
                return false;
            }
        }
        true
    }

    fn check_nondecreasing_by_sampling(&self) -> bool {
        let hi = self.domain_max().unwrap_or(50.0);
        let n = 512;
        let mut prev = self.eval(0.0);
        for i in 1..=n {
            let t = hi * i as f64 / n as f64;
            let v = self.eval(t);
            if v < prev - 1e-12 * prev.abs().max(1.0) {
                return false;
            }
            prev = v;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn hyperbolic_plane() -> ModelManifold {
        ModelManifold::hyperbolic(2, 1.0).unwrap()
    }

    #[test]
    fn uniform_ball_examples() {
        // Euclidean disc: rho = 1/pi
        let m = ModelManifold::euclidean(2).unwrap();
        let ball = RadialDensity::uniform_ball(&m, 1.0, 256).unwrap();
        assert_relative_eq!(ball.values()[0], 1.0 / std::f64::consts::PI, max_relative = 1e-10);
        assert_relative_eq!(ball.mass(), 1.0, epsilon = 1e-10);
        // hyperbolic disc: rho = 1/(2 pi (cosh 1 - 1))
        let ball = RadialDensity::uniform_ball(&hyperbolic_plane(), 1.0, 256).unwrap();
        let expected = 1.0 / (2.0 * std::f64::consts::PI * (1.0f64.cosh() - 1.0));
        assert_relative_eq!(ball.values()[0], expected, max_relative = 1e-10);
        assert_relative_eq!(ball.mass(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn mass_is_linear_and_normalize_idempotent() {
        let m = hyperbolic_plane();
        let grid = radial_grid(6.0, 256);
        let values: Vec<f64> = grid.iter().map(|&r| (-r * r).exp()).collect();
        let mut rho = RadialDensity::new(m, grid, values).unwrap();
        let mass = rho.mass();
        let doubled = {
            let mut d = rho.clone();
            for v in &mut d.values {
                *v *= 2.0;
            }
            d
        };
        assert_relative_eq!(doubled.mass(), 2.0 * mass, max_relative = 1e-12);
        rho.normalize();
        assert_relative_eq!(rho.mass(), 1.0, epsilon = 1e-8);
        let before: Vec<f64> = rho.values().to_vec();
        rho.normalize();
        for (a, b) in before.iter().zip(rho.values()) {
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn mass_matches_monte_carlo_oracle() {
        // Gaussian-like radial profile on the hyperbolic plane
        let m = hyperbolic_plane();
        let grid = radial_grid(8.0, 512);
        let values: Vec<f64> = grid.iter().map(|&r| (-0.7 * r * r).exp()).collect();
        let rho = RadialDensity::new(m, grid, values).unwrap();
        let quad = rho.mass();
        // Monte Carlo: uniform r on [0, 8], 10^6 samples of 2 pi rho sinh(r)
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let r = rng.gen_range(0.0..8.0);
            let f = 2.0 * std::f64::consts::PI * rho.eval(r) * r.sinh() * 8.0;
            sum += f;
            sumsq += f * f;
        }
        let mc = sum / n as f64;
        let stderr = ((sumsq / n as f64 - mc * mc) / n as f64).sqrt();
        assert!(
            (quad - mc).abs() < 6.0 * stderr,
            "quadrature {quad} vs MC {mc} +- {stderr}"
        );
    }

    #[test]
    fn sinh_moment_examples() {
        // concentrated near the origin: the weight vanishes there
        let m = hyperbolic_plane();
        let grid: Vec<f64> = (0..64).map(|i| 0.01 * i as f64 / 63.0).collect();
        let mut rho = RadialDensity::with_jump(m.clone(), grid, vec![1.0; 64], Some(0.01)).unwrap();
        rho.normalize();
        let moment = rho.sinh_moment(2.0).unwrap().value().unwrap();
        assert!(moment < 1e-4, "moment {moment} should be tiny");
        // uniform ball, lambda = 2: 2 pi \int_0^1 sinh^3 / area, with the
        // closed-form antiderivative cosh^3/3 - cosh
        let ball = RadialDensity::uniform_ball(&m, 1.0, 512).unwrap();
        let moment = ball.sinh_moment(2.0).unwrap().value().unwrap();
        let anti = |t: f64| t.cosh().powi(3) / 3.0 - t.cosh();
        let expected = (anti(1.0) - anti(0.0)) / (1.0f64.cosh() - 1.0);
        assert_relative_eq!(moment, expected, max_relative = 1e-9);
        // Euclidean limit: the plain radial moment r^lambda
        let m0 = ModelManifold::euclidean(2).unwrap();
        let ball = RadialDensity::uniform_ball(&m0, 2.0, 512).unwrap();
        let moment = ball.sinh_moment(3.0).unwrap().value().unwrap();
        // (1/(pi 4)) 2 pi \int_0^2 r^3 r dr = (2/4) * 32/5 / ... compute directly
        let expected = 2.0 * std::f64::consts::PI / (std::f64::consts::PI * 4.0) * 32.0 / 5.0;
        assert_relative_eq!(moment, expected, max_relative = 1e-10);
    }

    #[test]
    fn psi_moment_reduces_to_sinh_moment_for_constant_profiles() {
        let profile = crate::geometry::CurvatureProfile::constant(1.0).unwrap();
        let psi = solve_psi(&profile, 1.0, 1e-13).unwrap();
        let ball = RadialDensity::uniform_ball(&hyperbolic_plane(), 1.0, 256).unwrap();
        let via_psi = ball.psi_moment(2.0, &psi).unwrap().value().unwrap();
        let via_sinh = ball.sinh_moment(2.0).unwrap().value().unwrap();
        assert_relative_eq!(via_psi, via_sinh, max_relative = 1e-9);
        // lambda = 0 recovers the mass
        let m0 = ball.psi_moment(0.0, &psi).unwrap().value().unwrap();
        assert_relative_eq!(m0, ball.mass(), max_relative = 1e-12);
    }

    #[test]
    fn psi_moment_matches_monte_carlo_on_growing_profile() {
        let profile = crate::geometry::CurvatureProfile::power(2.0, 1.0).unwrap();
        let manifold = ModelManifold::rotationally_symmetric(2, profile.clone()).unwrap();
        let grid = radial_grid(3.0, 256);
        let values: Vec<f64> = grid.iter().map(|&r| (-(r - 1.0) * (r - 1.0) * 4.0).exp()).collect();
        let rho = RadialDensity::new(manifold, grid, values).unwrap();
        let psi = solve_psi(&profile, 3.0, 1e-12).unwrap();
        let quad = rho.psi_moment(2.0, &psi).unwrap().value().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let r = rng.gen_range(0.0..3.0);
            let f = 2.0 * std::f64::consts::PI * psi.psi_at(r).powi(2) * rho.eval(r) * psi.psi_at(r) * 3.0;
            sum += f;
            sumsq += f * f;
        }
        let mc = sum / n as f64;
        let stderr = ((sumsq / n as f64 - mc * mc) / n as f64).sqrt();
        assert!(
            (quad - mc).abs() < 6.0 * stderr,
            "quadrature {quad} vs MC {mc} +- {stderr}"
        );
    }

    #[test]
    fn divergence_is_reported_for_truncated_growing_tails() {
        // density flat out to the grid edge with a strongly growing weight:
        // the tail clearly dominates and the moment must refuse a number
        let m = hyperbolic_plane();
        let grid: Vec<f64> = (0..128).map(|i| 20.0 * i as f64 / 127.0).collect();
        let rho = RadialDensity::new(m, grid, vec![1.0; 128]).unwrap();
        assert!(matches!(rho.sinh_moment(3.0).unwrap(), Moment::Divergent));
    }

    #[test]
    fn centred_cloud_construction() {
        // a single point collapses to the pole
        let single = DiscreteMeasure::centred_cloud(2, 1.0, 1, 3).unwrap();
        assert_abs_diff_eq!(single.radius(0), 0.0, epsilon = 1e-15);
        // two equal weights are antipodal
        let pair = DiscreteMeasure::centred_cloud(3, 1.0, 2, 5).unwrap();
        for k in 0..3 {
            assert_abs_diff_eq!(
                pair.points()[0][k] + pair.points()[1][k],
                0.0,
                epsilon = 1e-14
            );
        }
        // larger cloud: exact tangent centring
        let cloud = DiscreteMeasure::centred_cloud(3, 1.0, 100, 7).unwrap();
        assert!(cloud.tangent_mean_norm() <= 1e-12);
        assert!(cloud.is_centred());
        assert_relative_eq!(cloud.total_mass(), 1.0, max_relative = 1e-12);
        // translation breaks the centring
        let off = cloud.translated(&[5.0, 0.0, 0.0]).unwrap();
        assert!(!off.is_centred());
    }

    #[test]
    fn potential_values_and_flags() {
        let h = Potential::power(2.0).unwrap();
        assert_relative_eq!(h.eval(3.0), 4.5, max_relative = 1e-14);
        assert_eq!(h.eval(0.0), 0.0);
        let h = Potential::log1p();
        assert_relative_eq!(h.eval(1.0), 2.0f64.ln(), max_relative = 1e-14);
        let h = Potential::exp_rate(2.0, 4.0).unwrap();
        assert_relative_eq!(h.eval(1.0), (4.0f64).exp() - 1.0, max_relative = 1e-14);
        let h = Potential::sinh_power(3.0, 1.0).unwrap();
        assert_relative_eq!(h.eval(2.0), 2.0f64.sinh().powi(3), max_relative = 1e-13);
        let h = Potential::double_exp(0.5, 1.0).unwrap();
        assert_relative_eq!(
            h.eval(1.0),
            (0.5 * 1.0f64.exp()).exp() - 0.5f64.exp(),
            max_relative = 1e-13
        );
        assert_eq!(h.eval(0.0), 0.0);
        assert!(Potential::log().eval(0.0).is_infinite());
    }

    #[test]
    fn potential_log_eval_is_stable() {
        let h = Potential::sinh_power(3.0, 1.0).unwrap();
        // far beyond overflow: log h(500) = 3 (500 - ln 2)
        assert_relative_eq!(
            h.log_eval(500.0).unwrap(),
            3.0 * (500.0 - std::f64::consts::LN_2),
            max_relative = 1e-12
        );
        let h = Potential::exp_rate(2.0, 1.0).unwrap();
        assert_relative_eq!(h.log_eval(400.0).unwrap(), 800.0, max_relative = 1e-12);
        for theta in [0.25, 1.0, 4.0] {
            assert_relative_eq!(
                h.log_eval(theta).unwrap(),
                h.eval(theta).ln(),
                max_relative = 1e-12
            );
        }
        let h = Potential::double_exp(0.5, 0.5).unwrap();
        for theta in [0.5, 2.0, 10.0] {
            assert_relative_eq!(
                h.log_eval(theta).unwrap(),
                h.eval(theta).ln(),
                max_relative = 1e-10
            );
        }
        assert!(Potential::log().log_eval(0.5).is_none());
    }

    #[test]
    fn convexity_samples() {
        assert!(Potential::sinh_power(3.0, 1.0).unwrap().convex_on_samples(5.0));
        assert!(Potential::exp_rate(1.0, 1.0).unwrap().convex_on_samples(5.0));
        // log(1+theta) is concave
        assert!(!Potential::log1p().convex_on_samples(5.0));
    }

    #[test]
    fn radial_grid_shape() {
        let g = radial_grid(10.0, 256);
        assert_eq!(g.len(), 256);
        assert_eq!(g[0], 0.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert_relative_eq!(*g.last().unwrap(), 10.0, max_relative = 1e-12);
    }
}
