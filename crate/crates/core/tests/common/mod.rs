//! Models and independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

use divbar::scale::ScaleFunctionGrid;
use divbar::{ClaimDistribution, CountingCompounder, RiskModel};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn model(c: f64, sigma: f64, lambda: f64, comp: CountingCompounder, claim: ClaimDistribution) -> RiskModel {
    RiskModel::new(c, sigma, lambda, comp, claim).unwrap()
}

pub fn exp(rate: f64) -> ClaimDistribution {
    ClaimDistribution::exponential(rate).unwrap()
}

pub fn geo(rho: f64) -> CountingCompounder {
    CountingCompounder::geometric(rho).unwrap()
}

pub fn log(theta: f64) -> CountingCompounder {
    CountingCompounder::logarithmic(theta).unwrap()
}

pub fn erlang(k: u32, rate: f64) -> ClaimDistribution {
    ClaimDistribution::erlang(k, rate).unwrap()
}

pub fn hyper(weights: &[f64], rates: &[f64]) -> ClaimDistribution {
    ClaimDistribution::hyper_exponential(weights.to_vec(), rates.to_vec()).unwrap()
}

/// c = 2, σ = 0, λ = 1, single Exp(1) claims; discounted at q = 0.1.
pub fn classical() -> RiskModel {
    model(2.0, 0.0, 1.0, CountingCompounder::degenerate(), exp(1.0))
}

/// σ > 0 acceptance model: c = 2, σ = 0.5, λ = 1, Geometric(0.3) bulks
/// of Exp(1.5) claims; discounted at q = 0.5.
pub fn jump_diffusion() -> RiskModel {
    model(2.0, 0.5, 1.0, geo(0.3), exp(1.5))
}

/// Composite Simpson rule on `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// All sign changes of `f` on `[lo, hi]` located by scanning `n` cells,
/// each refined by bisection to machine precision.
pub fn real_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / n as f64;
    let mut roots = Vec::new();
    let mut a = lo;
    let mut fa = f(a);
    for i in 1..=n {
        let b = lo + i as f64 * h;
        let fb = f(b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            let (mut l, mut r, mut fl) = (a, b, fa);
            for _ in 0..200 {
                let m = 0.5 * (l + r);
                let fm = f(m);
                if fm == 0.0 || r - l <= f64::EPSILON * m.abs().max(1e-300) {
                    l = m;
                    r = m;
                    break;
                }
                if fl * fm < 0.0 {
                    r = m;
                } else {
                    l = m;
                    fl = fm;
                }
            }
            roots.push(0.5 * (l + r));
        }
        a = b;
        fa = fb;
    }
    roots
}

/// Scale function of a model whose `ψ(s) - q` has only simple real zeros
/// `r_i`: `W(x) = Σ e^{r_i x} / ψ'(r_i)` and its derivatives.
pub struct PoleSum {
    pub poles: Vec<f64>,
    pub residues: Vec<f64>,
}

impl PoleSum {
    pub fn w(&self, x: f64) -> f64 {
        self.deriv(x, 0)
    }

    pub fn deriv(&self, x: f64, order: i32) -> f64 {
        self.poles
            .iter()
            .zip(&self.residues)
            .map(|(r, a)| a * r.powi(order) * (r * x).exp())
            .sum()
    }
}

/// Pole sum for Exp(β) claims without bulks, with or without diffusion.
///
/// `(ψ(s) - q)(β + s)` is a quadratic (σ = 0) or cubic (σ > 0) whose zeros
/// are all real, lie in `(-∞, ∞)` and separate at `-β`; they are found by
/// scanning and bisection and the residues come from the analytic `ψ'`.
pub fn single_exponential_scale(c: f64, sigma: f64, lambda: f64, beta: f64, q: f64) -> PoleSum {
    let dpsi = |s: f64| c + sigma * sigma * s - lambda * beta / (beta + s).powi(2);
    let cleared = |s: f64| (c * s + 0.5 * sigma * sigma * s * s - lambda - q) * (beta + s) + lambda * beta;
    let mut span = 10.0 * (beta + (lambda + q) / c + 1.0);
    if sigma > 0.0 {
        span += 20.0 * c / (sigma * sigma);
    }
    let poles = real_roots(cleared, -span, span, 2_000_000);
    let residues = poles.iter().map(|&r| 1.0 / dpsi(r)).collect();
    PoleSum { poles, residues }
}

/// `P(N = n) = Σ_k e^{-m} m^k/k! p^{*k}_n` for a compound Poisson count with
/// bulk pmf `p` (`p[0] = 0`) by explicit convolution powers. Bulks are at
/// least 1, so terms with `k > n` vanish and the sum is finite.
pub fn brute_force_count_pmf(p: &[f64], mean: f64, n: usize) -> f64 {
    let bulk = |j: usize| p.get(j).copied().unwrap_or(0.0);
    let mut power = vec![0.0; n + 1];
    power[0] = 1.0;
    let mut weight = (-mean).exp();
    let mut total = weight * power[n];
    for k in 1..=n {
        let mut next = vec![0.0; n + 1];
        for i in 0..n {
            for j in 1..=n - i {
                next[i + j] += power[i] * bulk(j);
            }
        }
        power = next;
        weight *= mean / k as f64;
        total += weight * power[n];
    }
    total
}

/// `∫_0^∞ e^{-sx} W(x) dx` from the grid (Simpson) plus the tail, in which
/// `W(x) ~ W(x_max) e^{ρ (x - x_max)}`.
pub fn forward_transform(g: &ScaleFunctionGrid, s: f64) -> f64 {
    let h = g.spacing();
    let w = g.w_values();
    let n = g.n();
    let f = |i: usize| (-s * g.xs()[i]).exp() * w[i];
    let mut acc = f(0) + f(n);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i);
    }
    acc * h / 3.0 + f(n) / (s - g.rho())
}

/// A random member of one of the analytic claim families.
pub fn random_claim(rng: &mut ChaCha8Rng) -> ClaimDistribution {
    match rng.random_range(0..4) {
        0 => exp(rng.random_range(0.2..5.0)),
        1 => {
            let w = rng.random_range(0.05..0.95);
            hyper(&[w, 1.0 - w], &[rng.random_range(0.2..5.0), rng.random_range(0.2..5.0)])
        }
        2 => erlang(rng.random_range(1..5), rng.random_range(0.2..5.0)),
        _ => {
            let w = rng.random_range(0.05..0.95);
            ClaimDistribution::mixture_of_erlangs(
                vec![w, 1.0 - w],
                vec![rng.random_range(1..4), rng.random_range(1..4)],
                vec![rng.random_range(0.2..5.0), rng.random_range(0.2..5.0)],
            )
            .unwrap()
        }
    }
}

pub fn random_compounder(rng: &mut ChaCha8Rng) -> CountingCompounder {
    match rng.random_range(0..5) {
        0 => CountingCompounder::degenerate(),
        1 => geo(rng.random_range(0.0..0.9)),
        2 => log(rng.random_range(0.05..0.9)),
        3 => {
            let beta = rng.random_range(1.0..4.0);
            let theta = rng.random_range(0.05..0.95) / beta;
            CountingCompounder::generalized_logarithmic(beta, theta).unwrap()
        }
        _ => {
            let a: f64 = rng.random_range(0.1..1.0);
            let b: f64 = rng.random_range(0.1..1.0);
            let c: f64 = rng.random_range(0.1..1.0);
            let s = a + b + c;
            CountingCompounder::explicit(vec![a / s, b / s, c / s], 0.0).unwrap()
        }
    }
}
