//! The q-scale function `W^(q)`: the increasing function on `[0, ∞)` with
//! `∫ e^{-sx} W^(q)(x) dx = 1/(ψ(s) - q)` for `s > ρ(q)`.
//!
//! The generic path inverts the transform numerically after an exponential
//! shift: `e^{-ρx} W(x)` has transform `1/(ψ(s+ρ) - q)`, whose singularities
//! all lie in `Re s <= 0` and whose inverse stays bounded. `W'` is inverted
//! from `(s+ρ)/(ψ(s+ρ) - q) - W(0)`, and `W''` is a central difference of
//! `W'`. When the transform is rational (Erlang-mixture claims with single
//! or geometric bulks) the poles are found by polynomial root finding and
//! `W` is summed exactly.

use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::CompounderKind;
use crate::error::{ensure_positive, Error, Result};
use crate::inversion::{euler_invert, talbot_invert, EulerParams};
use crate::levy::RiskModel;
use crate::poly::Poly;

pub const DEFAULT_GRID_N: usize = 2048;
/// Error estimate above which a grid point is flagged.
pub const FLAG_THRESHOLD: f64 = 1e-5;
const TALBOT_NODES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleMethod {
    Inversion,
    ClosedForm,
    Talbot,
}

/// Which evaluation path to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodChoice {
    /// Closed form when the transform is rational, inversion otherwise.
    #[default]
    Auto,
    Inversion,
    ClosedForm,
    Talbot,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleOptions {
    pub x_max: Option<f64>,
    pub n: usize,
    pub method: MethodChoice,
    pub euler: EulerParams,
}

impl Default for ScaleOptions {
    fn default() -> Self {
        Self {
            x_max: None,
            n: DEFAULT_GRID_N,
            method: MethodChoice::Auto,
            euler: EulerParams::default(),
        }
    }
}

#[derive(Debug, Clone)]
enum Evaluator {
    /// `W(x) = Σ_j res_j e^{r_j x}`.
    ClosedForm { terms: Vec<(Complex64, Complex64)> },
    Inversion {
        model: Box<RiskModel>,
        q: f64,
        rho: f64,
        w0: f64,
        params: EulerParams,
        talbot: bool,
    },
}

/// Value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Evaluator {
    fn boundary(&self, order: u8, bv: bool, model_c: f64, sigma: f64, q: f64, lambda: f64) -> f64 {
        match (order, bv) {
            (0, true) => 1.0 / model_c,
            (0, false) => 0.0,
            (_, true) => (q + lambda) / (model_c * model_c),
            (_, false) => 2.0 / (sigma * sigma),
        }
    }

    /// `W` (order 0) or `W'` (order 1) at `x > 0`.
    fn eval(&self, x: f64, order: u8) -> Estimate {
        match self {
            Evaluator::ClosedForm { terms } => {
                let mut acc = Complex64::new(0.0, 0.0);
                let mut mag = 0.0;
                for (res, r) in terms {
                    let t = *res * r.powu(order as u32) * (r * x).exp();
                    acc += t;
                    mag += t.norm();
                }
                Estimate {
                    value: acc.re,
                    error: 64.0 * f64::EPSILON * mag,
                }
            }
            Evaluator::Inversion {
                model,
                q,
                rho,
                w0,
                params,
                talbot,
            } => {
                let (q, rho, w0) = (*q, *rho, *w0);
                let transform = |s: Complex64| {
                    let shifted = s + rho;
                    let denom = model.psi_complex(shifted) - q;
                    if order == 0 {
                        Complex64::new(1.0, 0.0) / denom
                    } else {
                        shifted / denom - w0
                    }
                };
                let r = if *talbot {
                    talbot_invert(transform, x, TALBOT_NODES)
                } else {
                    euler_invert(transform, x, params)
                };
                let grow = (rho * x).exp();
                Estimate {
                    value: r.value * grow,
                    error: r.error * grow,
                }
            }
        }
    }
}

/// Tabulated `W^(q)`, `W^(q)'`, `W^(q)''` on `0 = x_0 < … < x_N = x_max`.
#[derive(Debug, Clone)]
pub struct ScaleFunctionGrid {
    q: f64,
    rho: f64,
    c: f64,
    sigma: f64,
    lambda: f64,
    x: Vec<f64>,
    w: Vec<f64>,
    w1: Vec<f64>,
    w2: Vec<f64>,
    err: Vec<f64>,
    err1: Vec<f64>,
    method: ScaleMethod,
    flags: Vec<String>,
    asymptote: Asymptote,
    evaluator: Arc<Evaluator>,
}

/// Growth monitor: `W(x) e^{-ρx}` should approach `1/ψ'(ρ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Asymptote {
    pub limit: f64,
    pub at_x_max: f64,
    pub converging: bool,
}

/// One exported row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridRow {
    pub x: f64,
    pub w: f64,
    pub w1: f64,
    pub w2: f64,
    pub err: f64,
}

impl ScaleFunctionGrid {
    pub fn q(&self) -> f64 {
        self.q
    }

    /// `ρ(q)`.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn x_max(&self) -> f64 {
        *self.x.last().unwrap()
    }

    /// Number of intervals `N`; the grid has `N + 1` points.
    pub fn n(&self) -> usize {
        self.x.len() - 1
    }

    pub fn spacing(&self) -> f64 {
        self.x_max() / self.n() as f64
    }

    pub fn xs(&self) -> &[f64] {
        &self.x
    }

    pub fn w_values(&self) -> &[f64] {
        &self.w
    }

    pub fn w1_values(&self) -> &[f64] {
        &self.w1
    }

    pub fn w2_values(&self) -> &[f64] {
        &self.w2
    }

    pub fn errors(&self) -> &[f64] {
        &self.err
    }

    /// Error estimates of the tabulated `W'`.
    pub fn w1_errors(&self) -> &[f64] {
        &self.err1
    }

    pub fn method(&self) -> ScaleMethod {
        self.method
    }

    pub fn is_flagged(&self) -> bool {
        !self.flags.is_empty()
    }

    pub fn flags(&self) -> &[String] {
        &self.flags
    }

    pub fn asymptote(&self) -> Asymptote {
        self.asymptote
    }

    pub fn bounded_variation(&self) -> bool {
        self.sigma == 0.0
    }

    pub fn row(&self, i: usize) -> Option<GridRow> {
        (i < self.x.len()).then(|| GridRow {
            x: self.x[i],
            w: self.w[i],
            w1: self.w1[i],
            w2: self.w2[i],
            err: self.err[i],
        })
    }

    fn boundary(&self, order: u8) -> f64 {
        self.evaluator
            .boundary(order, self.bounded_variation(), self.c, self.sigma, self.q, self.lambda)
    }

    fn check_x(&self, x: f64) -> Result<()> {
        if !(x >= 0.0 && x <= self.x_max() * (1.0 + 1e-12)) {
            return Err(Error::domain(
                "x",
                format!("{x} lies outside the grid [0, {}]", self.x_max()),
            ));
        }
        Ok(())
    }

    /// `W^(q)(x)` at any `x` (0 for `x < 0`). Values beyond `x_max` are
    /// computed by the same method but are not backed by grid diagnostics.
    pub fn w(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else if x == 0.0 {
            self.boundary(0)
        } else {
            self.evaluator.eval(x, 0).value
        }
    }

    fn w_estimate(&self, x: f64) -> Estimate {
        if x <= 0.0 {
            Estimate {
                value: self.w(x),
                error: 0.0,
            }
        } else {
            self.evaluator.eval(x, 0)
        }
    }

    /// `W^(q)'(x)`, one-sided at `x = 0`.
    pub fn w1(&self, x: f64) -> f64 {
        self.w1_estimate(x).value
    }

    fn w1_estimate(&self, x: f64) -> Estimate {
        if x <= 0.0 {
            return Estimate {
                value: self.boundary(1),
                error: 0.0,
            };
        }
        let e = self.evaluator.eval(x, 1);
        if e.error <= FLAG_THRESHOLD * e.value.abs().max(1.0) {
            return e;
        }
        self.w1_by_differences(x)
    }

    /// Five-point differences of `W`; one-sided near 0.
    fn w1_by_differences(&self, x: f64) -> Estimate {
        let h = 1e-3 * x.max(self.spacing());
        let f = |y: f64| self.evaluator.eval(y, 0);
        if x > 2.0 * h {
            let (a, b, c, d) = (f(x - 2.0 * h), f(x - h), f(x + h), f(x + 2.0 * h));
            let value = (a.value - 8.0 * b.value + 8.0 * c.value - d.value) / (12.0 * h);
            let error = (a.error + 8.0 * b.error + 8.0 * c.error + d.error) / (12.0 * h);
            Estimate { value, error }
        } else {
            let (a, b, c) = (f(x), f(x + h), f(x + 2.0 * h));
            let value = (-3.0 * a.value + 4.0 * b.value - c.value) / (2.0 * h);
            Estimate {
                value,
                error: (3.0 * a.error + 4.0 * b.error + c.error) / (2.0 * h) + (value * h).abs(),
            }
        }
    }

    /// `W^(q)''(x)`: exact for the closed form, else a central difference of
    /// `W'` (one-sided at the left end).
    pub fn w2(&self, x: f64) -> f64 {
        self.w2_estimate(x).value
    }

    fn w2_estimate(&self, x: f64) -> Estimate {
        if let Evaluator::ClosedForm { .. } = self.evaluator.as_ref() {
            if x > 0.0 {
                // differentiate the exponential sum twice
                if let Evaluator::ClosedForm { terms } = self.evaluator.as_ref() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    let mut mag = 0.0;
                    for (res, r) in terms {
                        let t = *res * r * r * (r * x).exp();
                        acc += t;
                        mag += t.norm();
                    }
                    return Estimate {
                        value: acc.re,
                        error: 64.0 * f64::EPSILON * mag,
                    };
                }
            }
        }
        let h = (0.25 * self.spacing()).max(1e-4 * x);
        if x - h > 0.0 {
            let (a, b) = (self.w1_estimate(x - h), self.w1_estimate(x + h));
            Estimate {
                value: (b.value - a.value) / (2.0 * h),
                error: (a.error + b.error) / (2.0 * h),
            }
        } else {
            let x0 = x.max(0.0);
            let (a, b, c) = (
                self.w1_estimate(x0 + 1e-9 * h),
                self.w1_estimate(x0 + h),
                self.w1_estimate(x0 + 2.0 * h),
            );
            Estimate {
                value: (-3.0 * a.value + 4.0 * b.value - c.value) / (2.0 * h),
                error: (3.0 * a.error + 4.0 * b.error + c.error) / (2.0 * h),
            }
        }
    }

    /// CSV with header `x,W,W1,W2,err`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,W,W1,W2,err")?;
        for i in 0..self.x.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.x[i], self.w[i], self.w1[i], self.w2[i], self.err[i]
            )?;
        }
        Ok(())
    }
}

/// `W` (order 0), `W'` or `W''` at `x` inside the grid, with an error
/// estimate.
pub fn scale_derivative(grid: &ScaleFunctionGrid, x: f64, order: u8) -> Result<Estimate> {
    grid.check_x(x)?;
    match order {
        0 => Ok(grid.w_estimate(x)),
        1 => Ok(grid.w1_estimate(x)),
        2 => Ok(grid.w2_estimate(x)),
        _ => Err(Error::domain("order", "must be 0, 1 or 2")),
    }
}

/// Pole–residue form of `1/(ψ(s) - q)` when it is rational.
fn closed_form_terms(model: &RiskModel, q: f64) -> Option<Vec<(Complex64, Complex64)>> {
    let comps = model.claim().erlang_components()?;
    let geo = match model.compounder().kind() {
        CompounderKind::Degenerate => 0.0,
        CompounderKind::Geometric { rho } => *rho,
        _ => return None,
    };
    // L_P = A/B with B = Π (β + s)^{M_β} over distinct rates
    let mut rates: Vec<(f64, u32)> = Vec::new();
    for c in comps {
        match rates.iter_mut().find(|(b, _)| *b == c.rate) {
            Some(entry) => entry.1 = entry.1.max(c.shape),
            None => rates.push((c.rate, c.shape)),
        }
    }
    let b_poly = rates.iter().fold(Poly::constant(1.0), |acc, (b, m)| {
        acc.mul(&Poly::linear(*b, 1.0).pow(*m))
    });
    let mut a_poly = Poly::constant(0.0);
    for c in comps {
        let mut term = Poly::constant(c.weight * c.rate.powi(c.shape as i32));
        for (b, m) in &rates {
            let power = if *b == c.rate { m - c.shape } else { *m };
            term = term.mul(&Poly::linear(*b, 1.0).pow(power));
        }
        a_poly = a_poly.add(&term);
    }
    let (c, s2, lambda) = (model.c(), model.sigma() * model.sigma() / 2.0, model.lambda());
    let d_poly = Poly(vec![-lambda - q, c, s2]);
    // g(u) = (1-ρ)u/(1-ρu): 1/(ψ-q) = (B - ρA) / (D (B - ρA) + λ(1-ρ) A)
    let num = b_poly.add(&a_poly.scale(-geo));
    let den = d_poly.mul(&num).add(&a_poly.scale(lambda * (1.0 - geo)));
    let dden = den.derivative();
    let roots = den.roots();
    let mut terms = Vec::with_capacity(roots.len());
    for r in roots {
        let d = dden.eval(r);
        if d.norm() <= 1e-10 * dden.eval_abs(r) {
            return None; // repeated root
        }
        terms.push((num.eval(r) / d, r));
    }
    // sanity: the residues must reproduce W(0)
    let w0: f64 = terms.iter().map(|(res, _)| res.re).sum();
    let expect = if model.sigma() == 0.0 { 1.0 / c } else { 0.0 };
    if (w0 - expect).abs() > 1e-9 * (1.0 / c) {
        return None;
    }
    Some(terms)
}

/// Tabulate `W^(q)` and its derivatives.
pub fn build_scale_grid(model: &RiskModel, q: f64, opts: &ScaleOptions) -> Result<ScaleFunctionGrid> {
    ensure_positive("control.q", q)?;
    if opts.n < 64 {
        return Err(Error::domain(
            "control.n",
            format!("grid size must be >= 64, got {}", opts.n),
        ));
    }
    if let Some(x) = opts.x_max {
        ensure_positive("control.x_max", x)?;
    }
    let p = opts.euler;
    if !(p.a > 100f64.ln() + 1.0 && p.a < 60.0) || p.n < 1 || p.m < 1 {
        return Err(Error::Config {
            path: "control.inversion".into(),
            reason: format!("infeasible inversion parameters a = {}, n = {}, m = {}", p.a, p.n, p.m),
        });
    }
    let rho = model.rho(q)?;
    let bv = model.has_bounded_variation();
    let w0 = if bv { 1.0 / model.c() } else { 0.0 };
    let mut flags = Vec::new();
    let inversion = |talbot: bool| Evaluator::Inversion {
        model: Box::new(model.clone()),
        q,
        rho,
        w0,
        params: p,
        talbot,
    };
    let (evaluator, method) = match opts.method {
        MethodChoice::Inversion => (inversion(false), ScaleMethod::Inversion),
        MethodChoice::Talbot => (inversion(true), ScaleMethod::Talbot),
        MethodChoice::Auto | MethodChoice::ClosedForm => match closed_form_terms(model, q) {
            Some(terms) => (Evaluator::ClosedForm { terms }, ScaleMethod::ClosedForm),
            None => {
                if opts.method == MethodChoice::ClosedForm {
                    return Err(Error::Config {
                        path: "control.method".into(),
                        reason: "the scale transform of this model is not rational".into(),
                    });
                }
                (inversion(false), ScaleMethod::Inversion)
            }
        },
    };
    let evaluator = Arc::new(evaluator);
    let mut grid = ScaleFunctionGrid {
        q,
        rho,
        c: model.c(),
        sigma: model.sigma(),
        lambda: model.lambda(),
        x: vec![0.0],
        w: vec![],
        w1: vec![],
        w2: vec![],
        err: vec![],
        err1: vec![],
        method,
        flags: vec![],
        asymptote: Asymptote {
            limit: 0.0,
            at_x_max: 0.0,
            converging: true,
        },
        evaluator,
    };
    let x_max = match opts.x_max {
        Some(x) => x,
        None => default_x_max(&grid, rho),
    };
    let n = opts.n;
    grid.x = (0..=n).map(|i| x_max * i as f64 / n as f64).collect();
    let rows: Vec<(Estimate, Estimate)> = grid
        .x
        .par_iter()
        .map(|&x| {
            if x == 0.0 {
                (
                    Estimate {
                        value: grid.boundary(0),
                        error: 0.0,
                    },
                    Estimate {
                        value: grid.boundary(1),
                        error: 0.0,
                    },
                )
            } else {
                (grid.evaluator.eval(x, 0), grid.w1_estimate(x))
            }
        })
        .collect();
    grid.w = rows.iter().map(|r| r.0.value).collect();
    grid.err = rows.iter().map(|r| r.0.error).collect();
    grid.w1 = rows.iter().map(|r| r.1.value).collect();
    grid.err1 = rows.iter().map(|r| r.1.error).collect();
    grid.w2 = match grid.evaluator.as_ref() {
        Evaluator::ClosedForm { .. } => grid.x.par_iter().map(|&x| grid.w2_estimate(x).value).collect(),
        _ => {
            let h = grid.spacing();
            let w1 = &grid.w1;
            (0..=n)
                .map(|i| {
                    if i == 0 {
                        (-3.0 * w1[0] + 4.0 * w1[1] - w1[2]) / (2.0 * h)
                    } else if i == n {
                        (3.0 * w1[n] - 4.0 * w1[n - 1] + w1[n - 2]) / (2.0 * h)
                    } else {
                        (w1[i + 1] - w1[i - 1]) / (2.0 * h)
                    }
                })
                .collect()
        }
    };

    let bad = grid
        .err
        .iter()
        .zip(&grid.w)
        .filter(|(e, w)| **e > FLAG_THRESHOLD * w.abs().max(1.0))
        .count();
    if bad > 0 {
        flags.push(format!(
            "{bad} grid points have W error estimates above {FLAG_THRESHOLD:e}"
        ));
    }
    if let Some(i) = (1..=n).find(|&i| !(grid.w[i] > 0.0) || grid.w[i] < grid.w[i - 1] - grid.err[i] - grid.err[i - 1])
    {
        flags.push(format!("W fails positivity or monotonicity at x = {}", grid.x[i]));
    }
    if let Some(i) = (0..=n).find(|&i| !(grid.w1[i] > 0.0)) {
        flags.push(format!("W' is not positive at x = {}", grid.x[i]));
    }
    let limit = 1.0 / model.psi_prime(rho)?;
    let scaled = |i: usize| grid.w[i] * (-rho * grid.x[i]).exp();
    let mid = scaled(n / 2);
    let end = scaled(n);
    let tol = 1e-8 * limit.abs() + grid.err[n] * (-rho * x_max).exp();
    let converging = (end - limit).abs() <= (mid - limit).abs() + tol;
    if !converging {
        flags.push(format!(
            "W(x) e^(-ρx) moves away from 1/ψ'(ρ) = {limit} (got {mid} at x_max/2, {end} at x_max)"
        ));
    }
    grid.asymptote = Asymptote {
        limit,
        at_x_max: end,
        converging,
    };
    grid.flags = flags;
    Ok(grid)
}

/// `5/ρ(q)`, doubled until `W'` has turned upward after its minimum.
fn default_x_max(grid: &ScaleFunctionGrid, rho: f64) -> f64 {
    let mut x_max = 5.0 / rho;
    for _ in 0..12 {
        let pts = 256;
        let w1: Vec<f64> = (0..=pts).map(|i| grid.w1(x_max * i as f64 / pts as f64)).collect();
        let (imin, vmin) = w1
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, v)| if *v < acc.1 { (i, *v) } else { acc });
        if imin * 10 <= pts * 9 && w1[pts] > vmin * (1.0 + 1e-6) {
            return x_max;
        }
        x_max *= 2.0;
    }
    x_max
}
