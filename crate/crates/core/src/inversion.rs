//! Numerical inversion of Laplace transforms.
//!
//! The primary method is the Fourier-series (trapezoidal Bromwich) rule with
//! Euler summation of the alternating tail; fixed Talbot is a cross-check.

use num_complex::Complex64;
use serde::Serialize;

/// Parameters of the Euler-accelerated Fourier-series rule.
///
/// The discretisation error is about `e^{-a}` times the size of the
/// function, so `a` trades aliasing error against rounding error, which
/// grows like `e^{a/2} ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EulerParams {
    pub a: f64,
    /// Terms summed before Euler averaging.
    pub n: usize,
    /// Euler (binomial) averaging order.
    pub m: usize,
}

impl Default for EulerParams {
    fn default() -> Self {
        Self { a: 22.0, n: 40, m: 18 }
    }
}

/// One inversion: value and error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inverted {
    pub value: f64,
    pub error: f64,
}

fn euler_once(f: &impl Fn(Complex64) -> Complex64, t: f64, a: f64, n: usize, m: usize) -> (f64, f64, f64) {
    let scale = (a / 2.0).exp() / t;
    let mut partial = Vec::with_capacity(n + m + 2);
    let mut sum = 0.5 * f(Complex64::new(a / (2.0 * t), 0.0)).re;
    let mut magnitude = sum.abs();
    partial.push(sum);
    for k in 1..=n + m + 1 {
        let s = Complex64::new(a, 2.0 * k as f64 * std::f64::consts::PI) / (2.0 * t);
        let term = f(s).re;
        magnitude += term.abs();
        sum += if k % 2 == 0 { term } else { -term };
        partial.push(sum);
    }
    let average = |start: usize| {
        let mut binom = 1.0;
        let mut acc = 0.0;
        for k in 0..=m {
            acc += binom * partial[start + k];
            binom = binom * (m - k) as f64 / (k + 1) as f64;
        }
        acc * 0.5f64.powi(m as i32)
    };
    let e_n = average(n);
    let e_n1 = average(n + 1);
    (
        scale * e_n,
        scale * (e_n1 - e_n).abs(),
        scale * magnitude * f64::EPSILON,
    )
}

/// `f(t)` for `t > 0` from its transform `F`, which must be analytic for
/// `Re s > 0`.
pub fn euler_invert(f: impl Fn(Complex64) -> Complex64, t: f64, p: &EulerParams) -> Inverted {
    let (value, trunc, round) = euler_once(&f, t, p.a, p.n, p.m);
    // the aliasing error scales like e^{-a}: a second run at a - ln 100
    // has about a hundred times the error of the first
    let (coarse, _, _) = euler_once(&f, t, p.a - 100f64.ln(), p.n, p.m);
    let alias = (value - coarse).abs() / 99.0;
    Inverted {
        value,
        error: alias + trunc + round,
    }
}

/// Fixed Talbot rule with `m` nodes; `F` must be analytic to the right of
/// and around the deformed contour.
pub fn talbot_invert(f: impl Fn(Complex64) -> Complex64, t: f64, m: usize) -> Inverted {
    let run = |m: usize| {
        let r = 2.0 * m as f64 / (5.0 * t);
        let mut acc = 0.5 * (f(Complex64::new(r, 0.0)) * (r * t).exp()).re;
        for k in 1..m {
            let theta = k as f64 * std::f64::consts::PI / m as f64;
            let cot = 1.0 / theta.tan();
            let s = Complex64::new(r * theta * cot, r * theta);
            let sigma = theta + (theta * cot - 1.0) * cot;
            acc += ((s * t).exp() * f(s) * Complex64::new(1.0, sigma)).re;
        }
        r / m as f64 * acc
    };
    let value = run(m);
    let rough = run(m * 3 / 4);
    Inverted {
        value,
        error: (value - rough).abs(),
    }
}
