//! Small numerical helpers shared by the distribution code.

use statrs::function::gamma::ln_gamma;

pub(crate) fn ln_factorial(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Poisson probability `e^{-m} m^k / k!`.
pub fn poisson_pmf(k: usize, mean: f64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (-mean + k as f64 * mean.ln() - ln_factorial(k)).exp()
}

/// Returns `(Σ_{j<len} pois_j(x)·coeffs[j], Σ_{j<len} pois_j(x))`.
///
/// Weights are generated outward from the mode so that large `x` does not
/// underflow the `j = 0` term before the bulk of the mass is reached.
pub(crate) fn poisson_weighted_sum(x: f64, coeffs: &[f64]) -> (f64, f64) {
    let len = coeffs.len();
    if len == 0 {
        return (0.0, 0.0);
    }
    if x == 0.0 {
        return (coeffs[0], 1.0);
    }
    let anchor = (x.floor() as usize).min(len - 1);
    let w0 = poisson_pmf(anchor, x);
    let mut sum = w0 * coeffs[anchor];
    let mut mass = w0;

    let mut w = w0;
    for j in (0..anchor).rev() {
        w *= (j + 1) as f64 / x;
        if w == 0.0 {
            break;
        }
        sum += w * coeffs[j];
        mass += w;
    }
    let mut w = w0;
    for (j, c) in coeffs.iter().enumerate().skip(anchor + 1) {
        w *= x / j as f64;
        if w == 0.0 || (w < 1e-300 && j as f64 > x) {
            break;
        }
        sum += w * c;
        mass += w;
    }
    (sum, mass)
}

/// Poisson probabilities `pois_0(x) ..= pois_{n}(x)`.
pub(crate) fn poisson_table(x: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let anchor = (x.floor() as usize).min(n);
    let w0 = poisson_pmf(anchor, x);
    out[anchor] = w0;
    let mut w = w0;
    for j in (0..anchor).rev() {
        w *= (j + 1) as f64 / x;
        out[j] = w;
    }
    let mut w = w0;
    for (j, slot) in out.iter_mut().enumerate().skip(anchor + 1) {
        w *= x / j as f64;
        *slot = w;
    }
    out
}

/// Log-spaced grid of `n` points between `lo` and `hi` (both > 0).
pub(crate) fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Bisection for the `p`-quantile of a nondecreasing `cdf` on `(0, ∞)`.
pub(crate) fn quantile_by_bisection(cdf: impl Fn(f64) -> f64, p: f64, scale: f64) -> f64 {
    let mut hi = scale.max(1e-12);
    let mut guard = 0;
    while cdf(hi) < p && guard < 200 {
        hi *= 2.0;
        guard += 1;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}
