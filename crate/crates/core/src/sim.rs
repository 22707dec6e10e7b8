//! Monte Carlo paths of the surplus under a barrier strategy.
//!
//! Without diffusion the path is simulated exactly between claim events:
//! the surplus drifts up at rate `c` and, once at the barrier, premiums are
//! paid out continuously with closed-form discounting. With diffusion each
//! step of length `h <= Δt` draws the Gaussian increment together with the
//! maximum of the Brownian bridge over the step, which gives the exact
//! reflected (Skorokhod) step; ruin between grid points is detected with
//! the bridge crossing probability `exp(-2 u_s u_e / (σ² h))`.
//!
//! Every path owns a ChaCha stream `(seed, path index)`, so results do not
//! depend on the number of threads and different barriers see common random
//! numbers.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure_nonneg, ensure_positive, Error, Result};
use crate::levy::RiskModel;

pub const MIN_REPLICATIONS: usize = 1000;
pub const MIN_COUNTING_REPLICATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub replications: usize,
    /// Diffusion time step.
    pub dt: f64,
    /// Horizon; defaults to `ln(1e6)/q` so that `e^{-q T} <= 1e-6`.
    pub t_max: Option<f64>,
    pub seed: u64,
    pub q: f64,
}

impl SimulationConfig {
    pub fn new(q: f64, replications: usize, dt: f64, seed: u64) -> Self {
        Self {
            replications,
            dt,
            t_max: None,
            seed,
            q,
        }
    }

    pub fn horizon(&self) -> f64 {
        self.t_max.unwrap_or_else(|| 1e6f64.ln() / self.q)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |path: &str, reason: String| Error::Config {
            path: path.into(),
            reason,
        };
        if !(self.q > 0.0 && self.q.is_finite()) {
            return Err(bad("control.q", format!("must be > 0, got {}", self.q)));
        }
        if self.replications < MIN_REPLICATIONS {
            return Err(bad(
                "simulate.replications",
                format!("must be >= {MIN_REPLICATIONS}, got {}", self.replications),
            ));
        }
        let dt_max = 1e-2 / self.q.max(1.0);
        if !(self.dt > 0.0 && self.dt <= dt_max * (1.0 + 1e-12)) {
            return Err(bad(
                "simulate.dt",
                format!("must lie in (0, {dt_max}], got {}", self.dt),
            ));
        }
        if let Some(t) = self.t_max {
            if !((-self.q * t).exp() <= 1e-6 * (1.0 + 1e-9)) {
                return Err(bad(
                    "simulate.t_max",
                    format!("e^(-q T_max) must be <= 1e-6; need T_max >= {}", 1e6f64.ln() / self.q),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationResult {
    pub b: f64,
    pub x: f64,
    /// Estimate of `V_b(x)`.
    pub estimate: f64,
    pub std_error: f64,
    /// Fraction of paths ruined before the horizon.
    pub ruin_probability: f64,
    /// Mean ruin time over ruined paths (`None` when no path was ruined).
    pub mean_ruin_time: Option<f64>,
    pub paths: usize,
    pub horizon: f64,
    /// Upper bound `e^{-qT}(c/q + b)` on the bias from stopping at the horizon.
    pub truncation_bias_bound: f64,
}

/// One point of a trace: time, surplus, cumulative undiscounted dividends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub t: f64,
    pub u: f64,
    pub dividends: f64,
}

#[derive(Debug, Clone, Copy)]
struct PathOutcome {
    discounted: f64,
    ruin_time: Option<f64>,
}

fn path_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn bulk_claim<R: Rng>(model: &RiskModel, rng: &mut R) -> f64 {
    let k = model.compounder().sample(rng);
    (0..k).map(|_| model.claim().sample(rng)).sum()
}

struct Tracer<'a> {
    points: Option<&'a mut Vec<TracePoint>>,
    paid: f64,
}

impl Tracer<'_> {
    fn record(&mut self, t: f64, u: f64) {
        if let Some(p) = self.points.as_deref_mut() {
            p.push(TracePoint {
                t,
                u,
                dividends: self.paid,
            });
        }
    }
}

fn simulate_path(
    model: &RiskModel,
    b: f64,
    x: f64,
    cfg: &SimulationConfig,
    index: usize,
    trace: Option<&mut Vec<TracePoint>>,
) -> PathOutcome {
    let mut rng = path_rng(cfg.seed, index);
    let q = cfg.q;
    let c = model.c();
    let sigma = model.sigma();
    let horizon = cfg.horizon();
    let arrivals = Exp::new(model.lambda()).expect("validated intensity");
    let mut tr = Tracer {
        points: trace,
        paid: 0.0,
    };
    let mut u = x;
    let mut total = 0.0;
    if u > b {
        total += u - b;
        tr.paid += u - b;
        u = b;
    }
    tr.record(0.0, u);
    if sigma > 0.0 && u <= 0.0 {
        return PathOutcome {
            discounted: total,
            ruin_time: Some(0.0),
        };
    }
    let mut t = 0.0;
    loop {
        let next = t + arrivals.sample(&mut rng);
        let until = next.min(horizon);
        if sigma == 0.0 {
            // deterministic drift up to the barrier, then pay at rate c
            let reach = if u >= b { t } else { t + (b - u) / c };
            if reach < until {
                total += c * ((-q * reach).exp() - (-q * until).exp()) / q;
                tr.paid += c * (until - reach);
                u = b;
            } else {
                u += c * (until - t);
            }
        } else {
            let mut s = t;
            while s < until {
                let h = cfg.dt.min(until - s);
                let z: f64 = StandardNormal.sample(&mut rng);
                let v: f64 = 1.0 - rng.random::<f64>();
                let w: f64 = rng.random::<f64>();
                let free_end = u + c * h + sigma * h.sqrt() * z;
                let var = sigma * sigma * h;
                let top = 0.5 * (u + free_end + ((free_end - u).powi(2) - 2.0 * var * v.ln()).sqrt());
                let paid = (top - b).max(0.0);
                let end = free_end - paid;
                if paid > 0.0 {
                    total += paid * (-q * (s + 0.5 * h)).exp();
                    tr.paid += paid;
                }
                let crossed = end < 0.0 || {
                    let expo = 2.0 * u * end / var;
                    expo < 745.0 && w < (-expo).exp()
                };
                if crossed {
                    let ruin = s + 0.5 * h;
                    tr.record(ruin, end.min(0.0));
                    return PathOutcome {
                        discounted: total,
                        ruin_time: Some(ruin),
                    };
                }
                u = end;
                s += h;
                if tr.points.is_some() {
                    tr.record(s, u);
                }
            }
        }
        if next >= horizon {
            tr.record(horizon, u);
            return PathOutcome {
                discounted: total,
                ruin_time: None,
            };
        }
        t = next;
        tr.record(t, u);
        u -= bulk_claim(model, &mut rng);
        tr.record(t, u);
        if u < 0.0 {
            return PathOutcome {
                discounted: total,
                ruin_time: Some(t),
            };
        }
    }
}

fn check_inputs(b: f64, x: f64, cfg: &SimulationConfig) -> Result<()> {
    cfg.validate()?;
    if !(b >= 0.0) {
        return Err(Error::domain("b", format!("must be >= 0 (or infinite), got {b}")));
    }
    ensure_nonneg("x", x)?;
    if !x.is_finite() {
        return Err(Error::domain("x", "must be finite"));
    }
    Ok(())
}

fn summarize(model: &RiskModel, b: f64, x: f64, cfg: &SimulationConfig, outcomes: &[PathOutcome]) -> SimulationResult {
    let r = outcomes.len() as f64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut ruined = 0usize;
    let mut ruin_time = 0.0;
    for o in outcomes {
        sum += o.discounted;
        sum_sq += o.discounted * o.discounted;
        if let Some(t) = o.ruin_time {
            ruined += 1;
            ruin_time += t;
        }
    }
    let mean = sum / r;
    let var = ((sum_sq - r * mean * mean) / (r - 1.0)).max(0.0);
    let horizon = cfg.horizon();
    let level = if b.is_finite() { b } else { 0.0 };
    SimulationResult {
        b,
        x,
        estimate: mean,
        std_error: (var / r).sqrt(),
        ruin_probability: ruined as f64 / r,
        mean_ruin_time: (ruined > 0).then(|| ruin_time / ruined as f64),
        paths: outcomes.len(),
        horizon,
        truncation_bias_bound: (-cfg.q * horizon).exp() * (model.c() / cfg.q + level),
    }
}

/// Estimate `V_b(x)` by Monte Carlo. `b = f64::INFINITY` means no barrier.
pub fn simulate_dividends(model: &RiskModel, b: f64, x: f64, cfg: &SimulationConfig) -> Result<SimulationResult> {
    check_inputs(b, x, cfg)?;
    let outcomes: Vec<PathOutcome> = (0..cfg.replications)
        .into_par_iter()
        .map(|i| simulate_path(model, b, x, cfg, i, None))
        .collect();
    Ok(summarize(model, b, x, cfg, &outcomes))
}

/// As [`simulate_dividends`], also returning full traces of the first
/// `traced` paths.
pub fn simulate_dividends_traced(
    model: &RiskModel,
    b: f64,
    x: f64,
    cfg: &SimulationConfig,
    traced: usize,
) -> Result<(SimulationResult, Vec<Vec<TracePoint>>)> {
    check_inputs(b, x, cfg)?;
    let traced = traced.min(cfg.replications);
    let mut traces = vec![Vec::new(); traced];
    let mut outcomes: Vec<PathOutcome> = traces
        .iter_mut()
        .enumerate()
        .map(|(i, tr)| simulate_path(model, b, x, cfg, i, Some(tr)))
        .collect();
    outcomes.par_extend(
        (traced..cfg.replications)
            .into_par_iter()
            .map(|i| simulate_path(model, b, x, cfg, i, None)),
    );
    Ok((summarize(model, b, x, cfg, &outcomes), traces))
}

/// Write traces as CSV `path,t,U,L`.
pub fn write_traces<W: Write>(traces: &[Vec<TracePoint>], mut out: W) -> std::io::Result<()> {
    writeln!(out, "path,t,U,L")?;
    for (i, tr) in traces.iter().enumerate() {
        for p in tr {
            writeln!(out, "{i},{:.16e},{:.16e},{:.16e}", p.t, p.u, p.dividends)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValuePoint {
    pub b: f64,
    pub estimate: f64,
    pub std_error: f64,
}

/// `V_b(x)` estimates over a grid of barriers, with common random numbers.
pub fn simulate_value_curve(
    model: &RiskModel,
    barriers: &[f64],
    x: f64,
    cfg: &SimulationConfig,
) -> Result<Vec<ValuePoint>> {
    barriers
        .iter()
        .map(|&b| {
            simulate_dividends(model, b, x, cfg).map(|r| ValuePoint {
                b,
                estimate: r.estimate,
                std_error: r.std_error,
            })
        })
        .collect()
}

/// Empirical pmf of `N_t` with binomial standard errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountingEstimate {
    pub t: f64,
    pub replications: usize,
    pub pmf: Vec<f64>,
    pub std_errors: Vec<f64>,
}

impl CountingEstimate {
    pub fn probability(&self, n: usize) -> f64 {
        self.pmf.get(n).copied().unwrap_or(0.0)
    }

    /// Standard error at `n`, using `max(p, 1/R)` so empty bins are not
    /// treated as exact.
    pub fn std_error(&self, n: usize) -> f64 {
        let r = self.replications as f64;
        let p = self.probability(n).max(1.0 / r);
        (p * (1.0 - p) / r).sqrt()
    }
}

/// Draw `M_t ~ Poisson(λt)` bulks and sum their sizes, `R` times.
pub fn simulate_counting(model: &RiskModel, t: f64, replications: usize, seed: u64) -> Result<CountingEstimate> {
    ensure_positive("t", t)?;
    if replications < MIN_COUNTING_REPLICATIONS {
        return Err(Error::Config {
            path: "replications".into(),
            reason: format!("must be >= {MIN_COUNTING_REPLICATIONS}, got {replications}"),
        });
    }
    let mean = model.lambda() * t;
    let bulks = Poisson::new(mean).map_err(|e| Error::domain("model.lambda", e.to_string()))?;
    let counts: Vec<u64> = (0..replications)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i);
            let m: f64 = bulks.sample(&mut rng);
            (0..m as u64).map(|_| model.compounder().sample(&mut rng)).sum()
        })
        .collect();
    let n_max = counts.iter().copied().max().unwrap_or(0) as usize;
    let mut freq = vec![0usize; n_max + 1];
    for n in counts {
        freq[n as usize] += 1;
    }
    let r = replications as f64;
    let pmf: Vec<f64> = freq.iter().map(|&k| k as f64 / r).collect();
    let std_errors = pmf.iter().map(|p| (p * (1.0 - p) / r).sqrt()).collect();
    Ok(CountingEstimate {
        t,
        replications,
        pmf,
        std_errors,
    })
}
