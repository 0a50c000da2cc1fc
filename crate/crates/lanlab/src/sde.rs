//! Parametric drift families and simulation of the jump SDE
//! `dX_t = a_theta(X_t) dt + dZ_t`.
//!
//! Paths use an Euler scheme on a fine grid `dt = h / substeps`; the noise
//! increments are exact in distribution (compound Poisson above the
//! truncation level, lumped per `dt` cell), so only the drift integration
//! carries `O(dt)` error.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::levy::IncrementSampler;
use crate::{Error, Result};

/// Default number of Euler sub-steps per observation step `h`.
pub const DEFAULT_SUBSTEPS: usize = 64;

pub type DriftFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum DriftKind {
    /// `a_theta(x) = -theta x + b0`
    Affine { b0: f64 },
    /// `a_theta(x) = -theta x + sin x`
    BoundedPerturbation,
    /// user-supplied evaluators, each `(theta, x) -> value`
    Custom {
        a: DriftFn,
        da_dx: DriftFn,
        da_dtheta: DriftFn,
        d2a_dxx: DriftFn,
        d2a_dxtheta: DriftFn,
        d2a_dthetatheta: DriftFn,
    },
}

/// Drift family `a_theta(x)` with its partial derivatives, the admissible
/// parameter interval, the window around `theta_0` where dissipativity is
/// required, and the radius beyond which `a_theta(x)/x` must be negative.
#[derive(Clone)]
pub struct DriftFamily {
    kind: DriftKind,
    theta_interval: (f64, f64),
    theta_window: (f64, f64),
    dissipativity_radius: f64,
}

impl std::fmt::Debug for DriftFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match &self.kind {
            DriftKind::Affine { b0 } => format!("affine(b0={b0})"),
            DriftKind::BoundedPerturbation => "bounded_perturbation".into(),
            DriftKind::Custom { .. } => "custom".into(),
        };
        f.debug_struct("DriftFamily")
            .field("kind", &name)
            .field("theta_interval", &self.theta_interval)
            .field("theta_window", &self.theta_window)
            .finish()
    }
}

impl DriftFamily {
    pub fn affine(b0: f64, theta_interval: (f64, f64), theta_window: (f64, f64)) -> Result<Self> {
        Self::validated(DriftKind::Affine { b0 }, theta_interval, theta_window)
    }

    pub fn bounded_perturbation(
        theta_interval: (f64, f64),
        theta_window: (f64, f64),
    ) -> Result<Self> {
        Self::validated(DriftKind::BoundedPerturbation, theta_interval, theta_window)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn custom(
        a: DriftFn,
        da_dx: DriftFn,
        da_dtheta: DriftFn,
        d2a_dxx: DriftFn,
        d2a_dxtheta: DriftFn,
        d2a_dthetatheta: DriftFn,
        theta_interval: (f64, f64),
        theta_window: (f64, f64),
    ) -> Result<Self> {
        Self::validated(
            DriftKind::Custom {
                a,
                da_dx,
                da_dtheta,
                d2a_dxx,
                d2a_dxtheta,
                d2a_dthetatheta,
            },
            theta_interval,
            theta_window,
        )
    }

    fn validated(
        kind: DriftKind,
        theta_interval: (f64, f64),
        theta_window: (f64, f64),
    ) -> Result<Self> {
        if !(theta_interval.0 < theta_interval.1) {
            return Err(Error::InvalidConfig(format!(
                "theta interval must be non-degenerate, got {theta_interval:?}"
            )));
        }
        if !(theta_interval.0 <= theta_window.0
            && theta_window.0 < theta_window.1
            && theta_window.1 <= theta_interval.1)
        {
            return Err(Error::InvalidConfig(format!(
                "theta window {theta_window:?} must sit inside the interval {theta_interval:?}"
            )));
        }
        Ok(Self {
            kind,
            theta_interval,
            theta_window,
            dissipativity_radius: 1.0,
        })
    }

    pub fn with_dissipativity_radius(mut self, radius: f64) -> Self {
        self.dissipativity_radius = radius;
        self
    }

    pub fn theta_interval(&self) -> (f64, f64) {
        self.theta_interval
    }

    pub fn theta_window(&self) -> (f64, f64) {
        self.theta_window
    }

    pub fn dissipativity_radius(&self) -> f64 {
        self.dissipativity_radius
    }

    pub fn contains_theta(&self, theta: f64) -> bool {
        self.theta_interval.0 < theta && theta < self.theta_interval.1
    }

    pub fn a(&self, theta: f64, x: f64) -> f64 {
        match &self.kind {
            DriftKind::Affine { b0 } => -theta * x + b0,
            DriftKind::BoundedPerturbation => -theta * x + x.sin(),
            DriftKind::Custom { a, .. } => a(theta, x),
        }
    }

    pub fn da_dx(&self, theta: f64, x: f64) -> f64 {
        match &self.kind {
            DriftKind::Affine { .. } => -theta,
            DriftKind::BoundedPerturbation => -theta + x.cos(),
            DriftKind::Custom { da_dx, .. } => da_dx(theta, x),
        }
    }

    pub fn da_dtheta(&self, theta: f64, x: f64) -> f64 {
        match &self.kind {
            DriftKind::Affine { .. } | DriftKind::BoundedPerturbation => -x,
            DriftKind::Custom { da_dtheta, .. } => da_dtheta(theta, x),
        }
    }

    pub fn d2a_dxx(&self, theta: f64, x: f64) -> f64 {
        match &self.kind {
            DriftKind::Affine { .. } => 0.0,
            DriftKind::BoundedPerturbation => -x.sin(),
            DriftKind::Custom { d2a_dxx, .. } => d2a_dxx(theta, x),
        }
    }

    pub fn d2a_dxtheta(&self, theta: f64, x: f64) -> f64 {
        match &self.kind {
            DriftKind::Affine { .. } | DriftKind::BoundedPerturbation => -1.0,
            DriftKind::Custom { d2a_dxtheta, .. } => d2a_dxtheta(theta, x),
        }
    }

    pub fn d2a_dthetatheta(&self, theta: f64, x: f64) -> f64 {
        match &self.kind {
            DriftKind::Affine { .. } | DriftKind::BoundedPerturbation => 0.0,
            DriftKind::Custom {
                d2a_dthetatheta, ..
            } => d2a_dthetatheta(theta, x),
        }
    }
}

/// Grid check of the linear-growth and dissipativity conditions.
#[derive(Debug, Clone, Serialize)]
pub struct AReport {
    /// smallest `C` with `|a| + |da/dtheta| + |d2a/dtheta2| <= C (1 + |x|)`
    /// over the grid
    pub growth_constant: f64,
    /// maximum of `a_theta(x) / x` over `{|x| >= radius} x theta_grid`;
    /// negative when the check passes
    pub dissipativity_margin: f64,
}

/// Evaluates the growth constant and the dissipativity margin on the given
/// grids. Grids are finite, so this is evidence, not a certificate.
pub fn check_condition_a(
    drift: &DriftFamily,
    x_grid: &[f64],
    theta_grid: &[f64],
) -> Result<AReport> {
    if x_grid.is_empty() || theta_grid.is_empty() {
        return Err(Error::InvalidConfig("grids must be non-empty".into()));
    }
    let (w_lo, w_hi) = drift.theta_window;
    for &theta in theta_grid {
        if !(w_lo <= theta && theta <= w_hi) {
            return Err(Error::InvalidConfig(format!(
                "theta grid point {theta} outside the window ({w_lo}, {w_hi})"
            )));
        }
    }

    let mut growth_constant = 0.0f64;
    for &theta in theta_grid {
        for &x in x_grid {
            let bound = drift.a(theta, x).abs()
                + drift.da_dtheta(theta, x).abs()
                + drift.d2a_dthetatheta(theta, x).abs();
            growth_constant = growth_constant.max(bound / (1.0 + x.abs()));
        }
    }

    let radius = drift.dissipativity_radius;
    let mut margin = f64::NEG_INFINITY;
    let mut worst = (0.0, 0.0);
    let mut any = false;
    for &theta in theta_grid {
        for &x in x_grid {
            if x.abs() < radius {
                continue;
            }
            any = true;
            let ratio = drift.a(theta, x) / x;
            if ratio > margin {
                margin = ratio;
                worst = (x, theta);
            }
        }
    }
    if !any {
        return Err(Error::InvalidConfig(format!(
            "x grid has no points with |x| >= dissipativity radius {radius}"
        )));
    }
    if margin >= 0.0 {
        return Err(Error::ConditionAViolation {
            x: worst.0,
            theta: worst.1,
            detail: format!("a(theta, x)/x = {margin} >= 0"),
        });
    }
    Ok(AReport {
        growth_constant,
        dissipativity_margin: margin,
    })
}

/// Sampling step, sample size and initial state of the observation scheme.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ObservationScheme {
    pub h: f64,
    pub n: usize,
    pub x0: f64,
}

impl ObservationScheme {
    pub fn new(h: f64, n: usize, x0: f64) -> Result<Self> {
        if h <= 0.0 {
            return Err(Error::InvalidConfig(format!("h must be > 0, got {h}")));
        }
        if n == 0 {
            return Err(Error::InvalidConfig("n must be >= 1".into()));
        }
        Ok(Self { h, n, x0 })
    }
}

/// Observations `X_0, X_h, ..., X_{hn}` (length `n + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSample {
    values: Vec<f64>,
}

impl DiscreteSample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidScheme(
                "a sample needs the initial state plus at least one observation".into(),
            ));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidScheme(format!("non-finite observation {v}")));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of observation steps `n` (length minus the initial state).
    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    /// Consecutive pairs `(X_{h(j-1)}, X_{hj})`, `j = 1..n`.
    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.windows(2).map(|w| (w[0], w[1]))
    }
}

/// Fine-grid Euler path on `[0, n_steps * dt]`.
#[derive(Debug, Clone)]
pub struct Path {
    pub dt: f64,
    pub values: Vec<f64>,
}

impl Path {
    pub fn t_end(&self) -> f64 {
        self.dt * (self.values.len() - 1) as f64
    }
}

/// Euler scheme `X_{t+dt} = X_t + a_theta(X_t) dt + dZ(dt)` up to `t_end`.
pub fn simulate_path<R: Rng + ?Sized>(
    drift: &DriftFamily,
    theta: f64,
    sampler: &IncrementSampler,
    x0: f64,
    t_end: f64,
    dt: f64,
    rng: &mut R,
) -> Result<Path> {
    if dt <= 0.0 || t_end <= 0.0 {
        return Err(Error::InvalidConfig("dt and t_end must be > 0".into()));
    }
    if !drift.contains_theta(theta) {
        return Err(Error::InvalidConfig(format!(
            "theta = {theta} outside the parameter interval {:?}",
            drift.theta_interval
        )));
    }
    let n_steps = (t_end / dt).round() as usize;
    if n_steps == 0 {
        return Err(Error::InvalidConfig("t_end shorter than dt".into()));
    }
    let mut values = Vec::with_capacity(n_steps + 1);
    values.push(x0);
    let mut x = x0;
    let mut noise = Vec::new();
    const CHUNK: usize = 4096;
    let mut done = 0;
    while done < n_steps {
        let m = CHUNK.min(n_steps - done);
        sampler.fill_step_noise(m as f64 * dt, m, rng, &mut noise);
        for (k, dz) in noise.iter().enumerate() {
            x += drift.a(theta, x) * dt + dz;
            if !x.is_finite() {
                return Err(Error::NumericalBlowup {
                    time: (done + k + 1) as f64 * dt,
                });
            }
            values.push(x);
        }
        done += m;
    }
    Ok(Path { dt, values })
}

/// Subsamples the fine-grid path at times `k h`, `k = 0..n`.
pub fn observe(path: &Path, scheme: &ObservationScheme) -> Result<DiscreteSample> {
    let stride_f = scheme.h / path.dt;
    let stride = stride_f.round();
    if stride < 1.0 || (stride_f - stride).abs() > 1e-9 * stride_f.max(1.0) {
        return Err(Error::InvalidScheme(format!(
            "h = {} is not a multiple of dt = {}",
            scheme.h, path.dt
        )));
    }
    let stride = stride as usize;
    let last = scheme.n * stride;
    if last >= path.values.len() {
        return Err(Error::InvalidScheme(format!(
            "path covers t = {} but the scheme needs {}",
            path.t_end(),
            scheme.h * scheme.n as f64
        )));
    }
    DiscreteSample::new((0..=scheme.n).map(|k| path.values[k * stride]).collect())
}

/// Per-substep noise realizations for `M` one-step simulations, so that a
/// step from any state and under any parameter can be replayed on identical
/// randomness (common random numbers).
#[derive(Debug, Clone)]
pub struct NoiseTape {
    h: f64,
    n_sub: usize,
    /// row m = increments of endpoint simulation m, length `n_sub`
    increments: Vec<f64>,
    m: usize,
}

impl NoiseTape {
    pub fn generate<R: Rng + ?Sized>(
        sampler: &IncrementSampler,
        h: f64,
        n_sub: usize,
        m: usize,
        rng: &mut R,
    ) -> Self {
        let mut increments = Vec::with_capacity(m * n_sub);
        let mut buf = Vec::new();
        for _ in 0..m {
            sampler.fill_step_noise(h, n_sub, rng, &mut buf);
            increments.extend_from_slice(&buf);
        }
        Self {
            h,
            n_sub,
            increments,
            m,
        }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Endpoint of one Euler step of length `h` from `x` under `theta`,
    /// replaying row `row` of the tape.
    pub fn replay(&self, drift: &DriftFamily, theta: f64, x: f64, row: usize) -> f64 {
        let dt = self.h / self.n_sub as f64;
        let mut y = x;
        let base = row * self.n_sub;
        for k in 0..self.n_sub {
            y += drift.a(theta, y) * dt + self.increments[base + k];
        }
        y
    }

    /// All `M` endpoints from `x` under `theta`.
    pub fn endpoints(&self, drift: &DriftFamily, theta: f64, x: f64) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.m);
        for row in 0..self.m {
            let y = self.replay(drift, theta, x, row);
            if !y.is_finite() {
                return Err(Error::NumericalBlowup { time: self.h });
            }
            out.push(y);
        }
        Ok(out)
    }
}

/// `M` independent one-step simulations of `X_h` given `X_0 = x`; with
/// `shared_noise` the identical noise realizations are replayed so that
/// only `theta` differs between calls.
#[allow(clippy::too_many_arguments)]
pub fn simulate_endpoints<R: Rng + ?Sized>(
    drift: &DriftFamily,
    theta: f64,
    sampler: &IncrementSampler,
    x: f64,
    h: f64,
    m: usize,
    substeps: usize,
    rng: &mut R,
    shared_noise: Option<&NoiseTape>,
) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::InvalidConfig("M must be >= 1".into()));
    }
    if !drift.contains_theta(theta) {
        return Err(Error::InvalidConfig(format!(
            "theta = {theta} outside the parameter interval"
        )));
    }
    match shared_noise {
        Some(tape) => tape.endpoints(drift, theta, x),
        None => {
            let tape = NoiseTape::generate(sampler, h, substeps, m, rng);
            tape.endpoints(drift, theta, x)
        }
    }
}

/// One row of the Monte Carlo moment table.
#[derive(Debug, Clone, Serialize)]
pub struct MomentRow {
    pub t: f64,
    pub moment: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentTable {
    pub p: f64,
    pub rows: Vec<MomentRow>,
    /// `sup_t E|X_t|^p / (1 + |x0|^p)`
    pub implied_constant: f64,
}

/// Monte Carlo estimates of `E |X_t|^p` over the time grid, with the
/// implied constant of the moment bound.
#[allow(clippy::too_many_arguments)]
pub fn moment_check<R: Rng + ?Sized>(
    drift: &DriftFamily,
    theta: f64,
    sampler: &IncrementSampler,
    x0: f64,
    p: f64,
    beta: f64,
    t_grid: &[f64],
    replications: usize,
    dt: f64,
    rng: &mut R,
) -> Result<MomentTable> {
    if !(2.0 < p && p < 4.0 + beta) {
        return Err(Error::InvalidConfig(format!(
            "p must lie in (2, 4 + beta) = (2, {}), got {p}",
            4.0 + beta
        )));
    }
    if t_grid.is_empty() || replications == 0 {
        return Err(Error::InvalidConfig(
            "empty time grid or zero replications".into(),
        ));
    }
    let mut grid: Vec<f64> = t_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let t_end = *grid.last().unwrap();
    let mut sums = vec![0.0; grid.len()];
    let mut sums_sq = vec![0.0; grid.len()];
    for _ in 0..replications {
        let path = simulate_path(drift, theta, sampler, x0, t_end, dt, rng)?;
        for (i, &t) in grid.iter().enumerate() {
            let idx = ((t / dt).round() as usize).min(path.values.len() - 1);
            let v = path.values[idx].abs().powf(p);
            sums[i] += v;
            sums_sq[i] += v * v;
        }
    }
    let r = replications as f64;
    let mut rows = Vec::with_capacity(grid.len());
    let mut implied = 0.0f64;
    for (i, &t) in grid.iter().enumerate() {
        let mean = sums[i] / r;
        let var = (sums_sq[i] / r - mean * mean).max(0.0);
        rows.push(MomentRow {
            t,
            moment: mean,
            std_error: (var / r).sqrt(),
        });
        implied = implied.max(mean / (1.0 + x0.abs().powf(p)));
    }
    Ok(MomentTable {
        p,
        rows,
        implied_constant: implied,
    })
}

#[cfg(test)]
mod tests {
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    use super::*;
    use crate::levy::{IncrementSampler, IncrementSamplerConfig, LevyMeasureSpec};
    use crate::rng::derive_stream;

    fn drift_only_sampler(c: f64) -> IncrementSampler {
        let spec = LevyMeasureSpec::zero_jumps(c);
        IncrementSampler::new(&spec, &IncrementSamplerConfig::new(0.5, 4)).unwrap()
    }

    fn jump_sampler() -> IncrementSampler {
        let spec = LevyMeasureSpec::symmetric_tempered_stable(0.5, 1.0, 1.0, 0.0, 1.0).unwrap();
        IncrementSampler::new(&spec, &IncrementSamplerConfig::new(0.005, 64)).unwrap()
    }

    fn ou_family() -> DriftFamily {
        DriftFamily::affine(0.0, (0.1, 3.0), (0.5, 1.5)).unwrap()
    }

    fn zero_drift() -> DriftFamily {
        let zero: DriftFn = Arc::new(|_, _| 0.0);
        DriftFamily::custom(
            zero.clone(),
            zero.clone(),
            zero.clone(),
            zero.clone(),
            zero.clone(),
            zero,
            (0.1, 3.0),
            (0.5, 1.5),
        )
        .unwrap()
    }

    #[test]
    fn condition_a_affine_margin() {
        let drift = ou_family();
        let x_grid: Vec<f64> = (-50..=50).map(|i| i as f64 / 5.0).collect();
        let theta_grid = vec![0.5, 0.75, 1.0, 1.25, 1.5];
        let report = check_condition_a(&drift, &x_grid, &theta_grid).unwrap();
        // a/x = -theta, maximized at the window edge theta = 0.5
        assert_relative_eq!(report.dissipativity_margin, -0.5, max_relative = 1e-12);
        // (|a|+|da/dtheta|) / (1+|x|) = (1+theta)|x|/(1+|x|) < 1 + theta_max
        assert!(report.growth_constant < 2.5);
        assert!(report.growth_constant > 2.0);
    }

    #[test]
    fn condition_a_shifted_drift() {
        // a_theta(x) = theta - x: dissipative beyond radius > theta_max
        let a: DriftFn = Arc::new(|theta, x| theta - x);
        let zero: DriftFn = Arc::new(|_, _| 0.0);
        let one: DriftFn = Arc::new(|_, _| 1.0);
        let minus_one: DriftFn = Arc::new(|_, _| -1.0);
        let drift = DriftFamily::custom(
            a,
            minus_one,
            one,
            zero.clone(),
            zero.clone(),
            zero,
            (0.1, 3.0),
            (0.5, 1.5),
        )
        .unwrap()
        .with_dissipativity_radius(2.0);
        let x_grid: Vec<f64> = (-25..=25).map(|i| i as f64 * 2.0).collect();
        let theta_grid = vec![0.5, 1.0, 1.5];
        let report = check_condition_a(&drift, &x_grid, &theta_grid).unwrap();
        assert!(report.dissipativity_margin < 0.0);
        // ratio tends to -1 as |x| grows; on this grid the binding point
        // is x = 2, theta = 1.5
        assert_relative_eq!(report.dissipativity_margin, -0.25, max_relative = 1e-12);
    }

    #[test]
    fn condition_a_expanding_drift_fails() {
        let a: DriftFn = Arc::new(|_, x| x);
        let zero: DriftFn = Arc::new(|_, _| 0.0);
        let one: DriftFn = Arc::new(|_, _| 1.0);
        let drift = DriftFamily::custom(
            a,
            one,
            zero.clone(),
            zero.clone(),
            zero.clone(),
            zero,
            (0.1, 3.0),
            (0.5, 1.5),
        )
        .unwrap();
        let x_grid = vec![-2.0, -1.0, 1.0, 2.0];
        let theta_grid = vec![1.0];
        match check_condition_a(&drift, &x_grid, &theta_grid) {
            Err(Error::ConditionAViolation { .. }) => {}
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn ou_path_matches_exponential_decay() {
        let drift = ou_family();
        let sampler = drift_only_sampler(0.0);
        let t_end = 1.0;
        let dt = 1.0 / 64.0;
        let mut rng = derive_stream(0, 0);
        let path = simulate_path(&drift, 1.0, &sampler, 1.0, t_end, dt, &mut rng).unwrap();
        let x_end = *path.values.last().unwrap();
        let exact = (-t_end).exp();
        assert!(
            ((x_end - exact) / exact).abs() < 2.0 * dt * t_end,
            "euler error {} above bound",
            (x_end - exact).abs()
        );
    }

    #[test]
    fn euler_error_slope_near_one() {
        // error vs dt on a dyadic grid: log2 slope within [0.8, 1.2]
        let drift = ou_family();
        let sampler = drift_only_sampler(0.0);
        let exact = (-1.0f64).exp();
        let mut logs = Vec::new();
        for k in 4..=8 {
            let dt = 0.5f64.powi(k);
            let mut rng = derive_stream(0, 0);
            let path = simulate_path(&drift, 1.0, &sampler, 1.0, 1.0, dt, &mut rng).unwrap();
            let err = (path.values.last().unwrap() - exact).abs();
            logs.push((-(k as f64), err.log2()));
        }
        let n = logs.len() as f64;
        let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
        let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
        let slope = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<f64>();
        assert!(
            (0.8..=1.2).contains(&slope),
            "euler order should be ~1, got slope {slope}"
        );
    }

    #[test]
    fn pure_drift_path_is_linear() {
        let drift = zero_drift();
        let sampler = drift_only_sampler(1.0);
        let mut rng = derive_stream(0, 0);
        let path = simulate_path(&drift, 1.0, &sampler, 2.0, 3.0, 1.0 / 32.0, &mut rng).unwrap();
        for (k, &v) in path.values.iter().enumerate() {
            assert_abs_diff_eq!(v, 2.0 + k as f64 / 32.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn path_determinism_under_seed() {
        let drift = ou_family();
        let sampler = jump_sampler();
        let run = || {
            let mut rng = derive_stream(9, 3);
            simulate_path(&drift, 1.0, &sampler, 0.5, 4.0, 1.0 / 64.0, &mut rng)
                .unwrap()
                .values
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn observe_subsamples_correctly() {
        let path = Path {
            dt: 0.25,
            values: (0..=16).map(|k| k as f64).collect(),
        };
        let scheme = ObservationScheme::new(0.5, 2, 0.0).unwrap();
        let sample = observe(&path, &scheme).unwrap();
        assert_eq!(sample.values(), &[0.0, 2.0, 4.0]);

        let constant = Path {
            dt: 0.25,
            values: vec![7.0; 17],
        };
        let sample = observe(&constant, &scheme).unwrap();
        assert!(sample.values().iter().all(|&v| v == 7.0));
        assert_eq!(sample.steps(), 2);
    }

    #[test]
    fn observe_rejects_uncovered_scheme() {
        let path = Path {
            dt: 0.25,
            values: (0..=4).map(|k| k as f64).collect(),
        };
        let scheme = ObservationScheme::new(0.5, 3, 0.0).unwrap();
        assert!(matches!(
            observe(&path, &scheme),
            Err(Error::InvalidScheme(_))
        ));
        let scheme = ObservationScheme::new(0.3, 1, 0.0).unwrap();
        assert!(matches!(
            observe(&path, &scheme),
            Err(Error::InvalidScheme(_))
        ));
    }

    #[test]
    fn observed_drift_path_matches_ode() {
        let drift = ou_family();
        let sampler = drift_only_sampler(0.0);
        let mut rng = derive_stream(0, 0);
        let dt = 0.5 / 512.0;
        let path = simulate_path(&drift, 1.0, &sampler, 1.0, 1.0, dt, &mut rng).unwrap();
        let scheme = ObservationScheme::new(0.5, 2, 1.0).unwrap();
        let sample = observe(&path, &scheme).unwrap();
        assert_relative_eq!(sample.values()[1], (-0.5f64).exp(), max_relative = 2e-3);
        assert_relative_eq!(sample.values()[2], (-1.0f64).exp(), max_relative = 2e-3);
    }

    #[test]
    fn endpoints_degenerate_all_equal_start() {
        let drift = zero_drift();
        let sampler = drift_only_sampler(0.0);
        let mut rng = derive_stream(0, 0);
        let ys =
            simulate_endpoints(&drift, 1.0, &sampler, 1.5, 0.5, 32, 16, &mut rng, None).unwrap();
        assert!(ys.iter().all(|&y| y == 1.5));
    }

    #[test]
    fn endpoints_shared_noise_replays_identically() {
        let drift = ou_family();
        let sampler = jump_sampler();
        let mut rng = derive_stream(4, 4);
        let tape = NoiseTape::generate(&sampler, 0.5, 16, 64, &mut rng);
        let a = simulate_endpoints(&drift, 1.0, &sampler, 0.3, 0.5, 64, 16, &mut rng, Some(&tape))
            .unwrap();
        let b = simulate_endpoints(&drift, 1.0, &sampler, 0.3, 0.5, 64, 16, &mut rng, Some(&tape))
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn endpoints_mean_matches_ode_flow() {
        let drift = ou_family();
        let sampler = drift_only_sampler(0.0);
        let mut rng = derive_stream(5, 0);
        let h = 0.5;
        let substeps = 64;
        let ys =
            simulate_endpoints(&drift, 1.0, &sampler, 2.0, h, 16, substeps, &mut rng, None)
                .unwrap();
        let mean = ys.iter().sum::<f64>() / ys.len() as f64;
        // exact Euler value, which is e^{-theta h} up to O(dt)
        let dt = h / substeps as f64;
        let euler = 2.0 * (1.0 - dt).powi(substeps as i32);
        assert_abs_diff_eq!(mean, euler, epsilon = 1e-12);
        assert_relative_eq!(mean, 2.0 * (-h).exp(), max_relative = 2.0 * dt);
    }

    #[test]
    fn moment_check_deterministic_decay() {
        let drift = ou_family();
        let sampler = drift_only_sampler(0.0);
        let mut rng = derive_stream(6, 0);
        let table = moment_check(
            &drift,
            1.0,
            &sampler,
            2.0,
            3.0,
            1.0,
            &[0.5, 1.0, 2.0],
            8,
            1.0 / 128.0,
            &mut rng,
        )
        .unwrap();
        // deterministic path: E|X_t|^3 = 8 e^{-3 t}, decreasing
        for (row, &t) in table.rows.iter().zip(&[0.5, 1.0, 2.0]) {
            assert_relative_eq!(row.moment, 8.0 * (-3.0 * t).exp(), max_relative = 0.05);
        }
        assert!(table.rows.windows(2).all(|w| w[1].moment < w[0].moment));
    }

    #[test]
    fn moment_check_zero_start_zero_drift() {
        let drift = zero_drift();
        let sampler = drift_only_sampler(0.0);
        let mut rng = derive_stream(6, 1);
        let table = moment_check(
            &drift,
            1.0,
            &sampler,
            0.0,
            3.0,
            1.0,
            &[1.0, 2.0],
            4,
            1.0 / 32.0,
            &mut rng,
        )
        .unwrap();
        assert!(table.rows.iter().all(|r| r.moment == 0.0));
    }

    #[test]
    fn moment_check_rejects_bad_exponent() {
        let drift = ou_family();
        let sampler = drift_only_sampler(0.0);
        let mut rng = derive_stream(6, 2);
        assert!(
            moment_check(&drift, 1.0, &sampler, 1.0, 6.0, 1.0, &[1.0], 4, 0.125, &mut rng)
                .is_err()
        );
    }

    #[test]
    fn moment_bound_constant_over_time_grid() {
        // dissipative OU with jumps: E|X_t|^p / (1 + |x0|^p) stays below a
        // single constant over the grid
        let drift = ou_family();
        let sampler = jump_sampler();
        let mut rng = derive_stream(21, 0);
        let table = moment_check(
            &drift,
            1.0,
            &sampler,
            1.0,
            3.0,
            1.0,
            &[1.0, 2.0, 4.0, 8.0],
            2_000,
            1.0 / 64.0,
            &mut rng,
        )
        .unwrap();
        assert!(table.implied_constant.is_finite());
        for row in &table.rows {
            assert!(row.moment <= table.implied_constant * (1.0 + 1.0));
        }
        // no blow-up trend on the tail of the grid
        let tail_ratio = table.rows[3].moment / table.rows[2].moment;
        assert!(tail_ratio < 1.5, "tail ratio {tail_ratio}");
    }

    #[test]
    fn long_path_dissipativity_in_action() {
        let drift = ou_family();
        let sampler = jump_sampler();
        let mut rng = derive_stream(22, 0);
        let path = simulate_path(&drift, 1.0, &sampler, 0.0, 200.0, 1.0 / 32.0, &mut rng).unwrap();
        let vals = &path.values;
        let half = vals.len() / 2;
        let mean_abs = |s: &[f64]| s.iter().map(|v| v.abs()).sum::<f64>() / s.len() as f64;
        let first = mean_abs(&vals[..half]);
        let second = mean_abs(&vals[half..]);
        assert!(
            second < 1.5 * first + 0.5,
            "no trend expected: {first} vs {second}"
        );
    }
}
