//! Shared statistics: summaries, goodness-of-fit tests against the
//! standard normal, Wasserstein-1 distance, batch means, least squares.

use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erf;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if n < 2.0 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)
}

pub fn std_error(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Quantile by linear interpolation on the sorted sample, `q` in `[0, 1]`.
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    let v = sorted(xs);
    if v.is_empty() {
        return f64::NAN;
    }
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    v[lo] * (1.0 - w) + v[hi] * w
}

pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2))
}

pub fn normal_quantile(p: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().inverse_cdf(p)
}

/// Kolmogorov distribution tail `Q(t) = 2 sum_{k>=1} (-1)^{k-1} e^{-2k^2t^2}`.
fn kolmogorov_tail(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64).powi(2) * t * t).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct GofTest {
    pub statistic: f64,
    pub p_value: f64,
}

/// One-sample Kolmogorov-Smirnov test against the standard normal
/// (simple null, asymptotic p-value).
pub fn ks_test_std_normal(xs: &[f64]) -> GofTest {
    let v = sorted(xs);
    let n = v.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in v.iter().enumerate() {
        let f = normal_cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    GofTest {
        statistic: d,
        p_value: kolmogorov_tail(n.sqrt() * d),
    }
}

/// Asymptotic CDF of the Anderson-Darling statistic for a fully specified
/// null (Marsaglia & Marsaglia 2004 polynomial approximation).
fn anderson_darling_cdf(z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    if z < 2.0 {
        (z.powf(-0.5) * (-1.2337141 / z).exp())
            * (2.00012
                + (0.247105 - (0.0649821 - (0.0347962 - (0.011672 - 0.00168691 * z) * z) * z) * z)
                    * z)
    } else {
        (-(1.0776 - (2.30695 - (0.43424 - (0.082433 - (0.008056 - 0.0003146 * z) * z) * z) * z) * z)
            .exp())
        .exp()
    }
    .clamp(0.0, 1.0)
}

/// Anderson-Darling test against the standard normal (simple null).
pub fn ad_test_std_normal(xs: &[f64]) -> GofTest {
    let v = sorted(xs);
    let n = v.len();
    let nf = n as f64;
    let mut sum = 0.0;
    for i in 0..n {
        let fi = normal_cdf(v[i]).clamp(1e-300, 1.0 - 1e-16);
        let fr = normal_cdf(v[n - 1 - i]).clamp(1e-300, 1.0 - 1e-16);
        sum += (2.0 * i as f64 + 1.0) * (fi.ln() + (1.0 - fr).ln());
    }
    let a2 = -nf - sum / nf;
    GofTest {
        statistic: a2,
        p_value: 1.0 - anderson_darling_cdf(a2),
    }
}

/// Exact Wasserstein-1 distance between the empirical measures of two
/// samples (sorted-quantile coupling; samples may differ in size).
pub fn wasserstein1(a: &[f64], b: &[f64]) -> f64 {
    let a = sorted(a);
    let b = sorted(b);
    let (m, k) = (a.len(), b.len());
    if m == 0 || k == 0 {
        return f64::NAN;
    }
    let mut i = 0usize;
    let mut j = 0usize;
    let mut u_prev = 0.0;
    let mut acc = 0.0;
    while i < m && j < k {
        // next quantile breakpoints (i+1)/m and (j+1)/k, compared exactly
        let lhs = (i + 1) * k;
        let rhs = (j + 1) * m;
        let u_next = if lhs <= rhs {
            (i + 1) as f64 / m as f64
        } else {
            (j + 1) as f64 / k as f64
        };
        acc += (u_next - u_prev) * (a[i] - b[j]).abs();
        if lhs <= rhs {
            i += 1;
        }
        if rhs <= lhs {
            j += 1;
        }
        u_prev = u_next;
    }
    acc
}

/// Non-overlapping batch-means estimate of the long-run variance
/// `lim n Var(sample mean)` for one batch length.
pub fn batch_means_variance(xs: &[f64], batch_len: usize) -> f64 {
    let n_batches = xs.len() / batch_len;
    if n_batches < 2 {
        return f64::NAN;
    }
    let means: Vec<f64> = (0..n_batches)
        .map(|b| mean(&xs[b * batch_len..(b + 1) * batch_len]))
        .collect();
    batch_len as f64 * variance(&means)
}

/// Ordinary least squares slope and intercept of `y` on `x`.
pub fn ols_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = mean(x);
    let my = mean(y);
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(u, v)| (u - mx) * (v - my)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Autocovariance of the sequence at the given lag (biased 1/N scaling).
pub fn autocovariance(xs: &[f64], lag: usize) -> f64 {
    let n = xs.len();
    if lag >= n {
        return 0.0;
    }
    let m = mean(xs);
    xs[..n - lag]
        .iter()
        .zip(&xs[lag..])
        .map(|(a, b)| (a - m) * (b - m))
        .sum::<f64>()
        / n as f64
}

#[cfg(test)]
mod tests {
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::Rng;
    use rand_distr::StandardNormal;

    use super::*;
    use crate::rng::derive_stream;

    #[test]
    fn normal_cdf_basics() {
        assert_abs_diff_eq!(normal_cdf(0.0), 0.5, epsilon = 1e-15);
        assert_relative_eq!(normal_cdf(1.959963985), 0.975, max_relative = 1e-8);
        assert_relative_eq!(normal_quantile(0.975), 1.959963985, max_relative = 1e-7);
    }

    #[test]
    fn ks_accepts_true_normal_sample() {
        let mut rng = derive_stream(100, 0);
        let xs: Vec<f64> = (0..2000).map(|_| rng.sample(StandardNormal)).collect();
        let t = ks_test_std_normal(&xs);
        assert!(t.p_value > 0.01, "p = {}", t.p_value);
    }

    #[test]
    fn ks_rejects_shifted_sample() {
        let mut rng = derive_stream(100, 1);
        let xs: Vec<f64> = (0..2000)
            .map(|_| rng.sample::<f64, _>(StandardNormal) + 0.5)
            .collect();
        let t = ks_test_std_normal(&xs);
        assert!(t.p_value < 1e-6, "p = {}", t.p_value);
    }

    #[test]
    fn ad_critical_value_at_one_percent() {
        // asymptotic upper 1% point of the null distribution is 3.857
        let cdf = anderson_darling_cdf(3.857);
        assert!(
            (0.988..0.992).contains(&cdf),
            "cdf(3.857) = {cdf}, expected ~0.99"
        );
    }

    #[test]
    fn ad_accepts_true_normal_and_rejects_scaled() {
        let mut rng = derive_stream(100, 2);
        let xs: Vec<f64> = (0..2000).map(|_| rng.sample(StandardNormal)).collect();
        assert!(ad_test_std_normal(&xs).p_value > 0.01);
        let ys: Vec<f64> = xs.iter().map(|x| 1.4 * x).collect();
        assert!(ad_test_std_normal(&ys).p_value < 1e-4);
    }

    #[test]
    fn wasserstein_identical_and_shifted() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_abs_diff_eq!(wasserstein1(&a, &a), 0.0, epsilon = 1e-15);
        let b: Vec<f64> = a.iter().map(|x| x + 0.7).collect();
        assert_abs_diff_eq!(wasserstein1(&a, &b), 0.7, epsilon = 1e-12);
        // different sizes: W1({0},{0,1}) = 1/2
        assert_abs_diff_eq!(wasserstein1(&[0.0], &[0.0, 1.0]), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn batch_means_iid_matches_variance() {
        let mut rng = derive_stream(100, 3);
        let xs: Vec<f64> = (0..20_000).map(|_| rng.sample(StandardNormal)).collect();
        let v = batch_means_variance(&xs, 50);
        assert!((v - 1.0).abs() < 0.1, "batch means variance {v}");
    }

    #[test]
    fn ols_recovers_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let (slope, intercept) = ols_line(&x, &y);
        assert_abs_diff_eq!(slope, 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(intercept, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn quantiles_and_autocovariance() {
        let xs = [4.0, 1.0, 3.0, 2.0];
        assert_abs_diff_eq!(median(&xs), 2.5, epsilon = 1e-15);
        assert_abs_diff_eq!(quantile(&xs, 0.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(quantile(&xs, 1.0), 4.0, epsilon = 1e-15);
        let seq = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
        assert!(autocovariance(&seq, 1) < 0.0);
        assert!(autocovariance(&seq, 2) > 0.0);
    }
}
