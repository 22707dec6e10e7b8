//! Membership tests for the shape classes that drive barrier optimality:
//! log-convexity, discrete and continuous complete monotonicity, DFR.
//!
//! Known families short-circuit through analytic rules; everything else is
//! tested numerically. A numeric test of complete monotonicity can only
//! check finitely many orders, so a numeric pass at capped depth is reported
//! as [`Holds::Inconclusive`], never as `Yes`.

use serde::Serialize;

use crate::dist::ErlangComponent;
use crate::dist::{ClaimDistribution, CompoundClaimDistribution, CompounderKind, CountingCompounder};
use crate::error::{Error, Result};
use crate::special::{ln_factorial, log_space};

/// Relative slack for discrete log-convexity.
pub const LOG_CONVEX_SLACK: f64 = 1e-12;
/// Absolute slack for second divided differences on continuous grids.
pub const DIVIDED_DIFF_SLACK: f64 = 1e-9;
/// Default highest difference order in the discrete CM test.
pub const DEFAULT_CM_DEPTH: usize = 8;
const GRID_POINTS: usize = 200;
/// Absolute error assumed for tabulated `ln F̄` / `ln f` values.
const LOG_VALUE_NOISE: f64 = 1e-13;
/// Prefix length used when a compounder's pmf is tested numerically.
const NUMERIC_PREFIX: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ShapeProperty {
    LogConvex,
    StrictLogConvex,
    DiscreteCompletelyMonotone,
    CompletelyMonotone,
    #[serde(rename = "DFR")]
    Dfr,
    #[serde(rename = "IFR")]
    Ifr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Holds {
    Yes,
    No,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Numeric,
}

/// One tested inequality: `margin >= 0` means it held.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub location: f64,
    pub quantity: String,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeVerdict {
    pub subject: String,
    pub property: ShapeProperty,
    pub holds: Holds,
    pub method: Method,
    /// Family rule applied by an analytic verdict.
    pub rule: Option<String>,
    pub evidence: Vec<Evidence>,
    pub notes: Vec<String>,
}

impl ShapeVerdict {
    fn new(subject: &str, property: ShapeProperty, holds: Holds, method: Method) -> Self {
        Self {
            subject: subject.to_string(),
            property,
            holds,
            method,
            rule: None,
            evidence: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn analytic(subject: &str, property: ShapeProperty, holds: Holds, rule: &str, evidence: Evidence) -> Self {
        let mut v = Self::new(subject, property, holds, Method::Analytic);
        v.rule = Some(rule.to_string());
        v.evidence.push(evidence);
        v
    }

    pub fn is_yes(&self) -> bool {
        self.holds == Holds::Yes
    }

    /// First evidence row with a negative margin.
    pub fn counterexample(&self) -> Option<&Evidence> {
        self.evidence.iter().find(|e| e.margin < 0.0)
    }
}

fn ev(location: f64, quantity: impl Into<String>, margin: f64) -> Evidence {
    Evidence {
        location,
        quantity: quantity.into(),
        margin: if margin.is_finite() { margin } else { f64::MIN },
    }
}

// ---------------------------------------------------------------------------
// discrete sequences

/// Log-convexity of `p_1..p_K` (slice index 0 holds `p_1`).
pub fn check_discrete_log_convex(pmf: &[f64], strict: bool) -> Result<ShapeVerdict> {
    if pmf.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: pmf.len(),
        });
    }
    if let Some(i) = pmf.iter().position(|p| !(*p >= 0.0) || !p.is_finite()) {
        return Err(Error::domain(format!("pmf[{i}]"), "must be finite and nonnegative"));
    }
    Ok(log_convex_scan(pmf, strict, "pmf", 1))
}

/// `offset` is the label of slice index 0 in evidence locations.
fn log_convex_scan(seq: &[f64], strict: bool, subject: &str, offset: usize) -> ShapeVerdict {
    let property = if strict {
        ShapeProperty::StrictLogConvex
    } else {
        ShapeProperty::LogConvex
    };
    let mut worst: Option<Evidence> = None;
    for i in 1..seq.len() - 1 {
        let sq = seq[i] * seq[i];
        let prod = seq[i - 1] * seq[i + 1];
        let tol = LOG_CONVEX_SLACK * sq.max(prod);
        let margin = if strict { prod - sq - tol } else { prod - sq + tol };
        let n = (i + offset) as f64;
        let quantity = format!("x[n-1] x[n+1] - x[n]^2 = {prod:e} - {sq:e}");
        let holds = if strict { margin > 0.0 } else { margin >= 0.0 };
        if !holds {
            let mut v = ShapeVerdict::new(subject, property, Holds::No, Method::Numeric);
            v.evidence.push(ev(n, quantity, margin.min(-f64::MIN_POSITIVE)));
            return v;
        }
        let rel = margin / sq.max(prod).max(f64::MIN_POSITIVE);
        let replace = match &worst {
            None => true,
            Some(w) => rel < w.margin,
        };
        if replace {
            worst = Some(ev(n, quantity, rel));
        }
    }
    let mut v = ShapeVerdict::new(subject, property, Holds::Yes, Method::Numeric);
    let mut w = worst.unwrap();
    w.quantity.push_str(" (relative margin)");
    v.evidence.push(w);
    v
}

/// Log-convexity of a compounder's pmf `{p_n, n >= 1}`.
pub fn compounder_log_convex(c: &CountingCompounder, strict: bool) -> ShapeVerdict {
    let subject = "compounder pmf";
    let property = if strict {
        ShapeProperty::StrictLogConvex
    } else {
        ShapeProperty::LogConvex
    };
    let witness = |c: &CountingCompounder| {
        let (p1, p2, p3) = (c.pmf(1), c.pmf(2), c.pmf(3));
        ev(2.0, "p_1 p_3 - p_2^2", p1 * p3 - p2 * p2)
    };
    match c.kind() {
        CompounderKind::Degenerate | CompounderKind::Geometric { .. } => {
            if strict {
                let mut w = witness(c);
                w.margin = -f64::MIN_POSITIVE;
                w.quantity = "p_1 p_3 - p_2^2 (equality: ratio p_{n+1}/p_n constant)".into();
                ShapeVerdict::analytic(subject, property, Holds::No, "geometric ratios are constant", w)
            } else {
                ShapeVerdict::analytic(
                    subject,
                    property,
                    Holds::Yes,
                    "geometric: p_n^2 = p_{n-1} p_{n+1}",
                    witness(c),
                )
            }
        }
        CompounderKind::Logarithmic { .. } => ShapeVerdict::analytic(
            subject,
            property,
            Holds::Yes,
            "logarithmic: p_{n+1}/p_n = θ n/(n+1) strictly increasing",
            witness(c),
        ),
        CompounderKind::GeneralizedLogarithmic { .. } => ShapeVerdict::analytic(
            subject,
            property,
            Holds::Yes,
            "generalized logarithmic series is strictly log-convex",
            witness(c),
        ),
        CompounderKind::ExplicitPmf { probs, .. } => {
            if probs.len() < 3 {
                // p_n = 0 beyond the listed terms
                let mut seq = probs.clone();
                seq.resize(3, 0.0);
                log_convex_scan(&seq, strict, subject, 1)
            } else {
                log_convex_scan(probs, strict, subject, 1)
            }
        }
    }
}

/// Discrete complete monotonicity of `r_0..r_K` by signed forward
/// differences up to order [`DEFAULT_CM_DEPTH`].
pub fn check_discrete_cm(r: &[f64]) -> Result<ShapeVerdict> {
    check_discrete_cm_depth(r, DEFAULT_CM_DEPTH)
}

pub fn check_discrete_cm_depth(r: &[f64], j_max: usize) -> Result<ShapeVerdict> {
    if r.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: r.len(),
        });
    }
    if let Some(i) = r.iter().position(|p| !(*p >= 0.0) || !p.is_finite()) {
        return Err(Error::domain(format!("r[{i}]"), "must be finite and nonnegative"));
    }
    Ok(cm_scan(r, j_max, "sequence"))
}

fn cm_scan(r: &[f64], j_max: usize, subject: &str) -> ShapeVerdict {
    let property = ShapeProperty::DiscreteCompletelyMonotone;
    let tol = 1e-10 * r[0];
    let scale = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut diffs = r.to_vec();
    let mut worst: Option<Evidence> = None;
    let mut capped = false;
    let mut reached = 0;
    for j in 1..=j_max {
        if diffs.len() < 2 {
            capped = true;
            break;
        }
        diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
        let noise = 2f64.powi(j as i32) * 4.0 * f64::EPSILON * scale;
        if diffs.iter().all(|d| d.abs() <= noise) {
            capped = true;
            break;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        for (n, d) in diffs.iter().enumerate() {
            let margin = sign * d + tol;
            if margin < 0.0 {
                let mut v = ShapeVerdict::new(subject, property, Holds::No, Method::Numeric);
                v.evidence
                    .push(ev(n as f64, format!("(-1)^{j} Δ^{j} r_n = {}", sign * d), margin));
                return v;
            }
            let replace = match &worst {
                None => true,
                Some(w) => margin < w.margin,
            };
            if replace {
                worst = Some(ev(n as f64, format!("(-1)^{j} Δ^{j} r_n"), margin));
            }
        }
        reached = j;
    }
    let holds = if capped { Holds::Inconclusive } else { Holds::Yes };
    let mut v = ShapeVerdict::new(subject, property, holds, Method::Numeric);
    if let Some(w) = worst {
        v.evidence.push(w);
    }
    if capped {
        v.notes
            .push(format!("difference depth capped at order {reached} of {j_max}"));
    }
    v
}

/// Discrete complete monotonicity of the shifted pmf `r_n = p_{n+1}`.
pub fn compounder_discrete_cm(c: &CountingCompounder) -> ShapeVerdict {
    let subject = "compounder pmf";
    let property = ShapeProperty::DiscreteCompletelyMonotone;
    let witness = |c: &CountingCompounder| {
        let (p1, p2, p3) = (c.pmf(1), c.pmf(2), c.pmf(3));
        ev(0.0, "Δ^2 r_0 = p_3 - 2 p_2 + p_1", p3 - 2.0 * p2 + p1)
    };
    match c.kind() {
        CompounderKind::Degenerate | CompounderKind::Geometric { .. } => ShapeVerdict::analytic(
            subject,
            property,
            Holds::Yes,
            "geometric: single-component geometric mixture",
            witness(c),
        ),
        CompounderKind::Logarithmic { .. } => ShapeVerdict::analytic(
            subject,
            property,
            Holds::Yes,
            "shifted logarithmic: θ^{n+1}/(n+1) = ∫_0^θ u^n du is a geometric mixture",
            witness(c),
        ),
        CompounderKind::GeneralizedLogarithmic { .. } | CompounderKind::ExplicitPmf { .. } => {
            let len = match c.kind() {
                CompounderKind::ExplicitPmf { probs, .. } => probs.len().max(3),
                _ => NUMERIC_PREFIX,
            };
            let r = c.pmf_prefix(len);
            let mut v = cm_scan(&r, DEFAULT_CM_DEPTH, subject);
            if v.holds == Holds::Yes && matches!(c.kind(), CompounderKind::GeneralizedLogarithmic { .. }) {
                v.holds = Holds::Inconclusive;
                v.notes.push(format!(
                    "only the first {len} terms and {DEFAULT_CM_DEPTH} difference orders were tested"
                ));
            }
            v
        }
    }
}

/// Discrete DFR of the bulk size: the tail sequence `P̄_n = Σ_{i>n} p_i`,
/// `n >= 0`, is log-convex.
pub fn compounder_dfr(c: &CountingCompounder) -> ShapeVerdict {
    let subject = "compounder tail";
    let property = ShapeProperty::Dfr;
    let witness = |c: &CountingCompounder| {
        let t = c.tail_masses(3);
        ev(1.0, "P̄_0 P̄_2 - P̄_1^2", t[0] * t[2] - t[1] * t[1])
    };
    match c.kind() {
        CompounderKind::Degenerate | CompounderKind::Geometric { .. } => {
            ShapeVerdict::analytic(subject, property, Holds::Yes, "geometric: P̄_n = ρ^n", witness(c))
        }
        CompounderKind::Logarithmic { .. } | CompounderKind::GeneralizedLogarithmic { .. } => ShapeVerdict::analytic(
            subject,
            property,
            Holds::Yes,
            "log-convex pmf implies log-convex tail",
            witness(c),
        ),
        CompounderKind::ExplicitPmf { probs, .. } => {
            let tails = c.tail_masses(probs.len().max(3));
            let mut v = log_convex_scan(&tails, false, subject, 0);
            v.property = property;
            v
        }
    }
}

// ---------------------------------------------------------------------------
// continuous laws

fn shape_ge2(c: &ErlangComponent) -> bool {
    c.shape >= 2
}

/// `d^j/dz^j` of an Erlang-mixture density.
fn erlang_mixture_derivative(comps: &[ErlangComponent], j: usize, z: f64) -> f64 {
    let mut total = 0.0;
    for c in comps {
        let m1 = (c.shape - 1) as usize;
        let norm = c.weight * c.rate.powi(c.shape as i32) / (ln_factorial(m1)).exp();
        let mut acc = 0.0;
        for i in 0..=j.min(m1) {
            let binom = (ln_factorial(j) - ln_factorial(i) - ln_factorial(j - i)).exp();
            let falling = (ln_factorial(m1) - ln_factorial(m1 - i)).exp();
            acc += binom * falling * z.powi((m1 - i) as i32) * (-c.rate).powi((j - i) as i32);
        }
        total += norm * acc * (-c.rate * z).exp();
    }
    total
}

fn claim_grid(claim: &ClaimDistribution) -> Vec<f64> {
    log_space(claim.quantile(1e-3), claim.quantile(0.999), GRID_POINTS)
}

/// Complete monotonicity of the claim density.
pub fn check_density_cm(claim: &ClaimDistribution) -> Result<ShapeVerdict> {
    let subject = "claim density";
    let property = ShapeProperty::CompletelyMonotone;
    if let Some(comps) = claim.erlang_components() {
        let mean = claim.mean();
        if !comps.iter().any(shape_ge2) {
            let w = ev(mean, "-f'(z) at the mean", -erlang_mixture_derivative(comps, 1, mean));
            return Ok(ShapeVerdict::analytic(
                subject,
                property,
                Holds::Yes,
                "positive mixture of exponentials",
                w,
            ));
        }
        // a repeated pole at -β with positive coefficient rules out a
        // mixture-of-exponentials representation; locate a sign failure
        let grid = claim_grid(claim);
        let mut lead = log_space(grid[0] * 1e-6, grid[0], 40);
        lead.extend(grid);
        for j in 1..=12 {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            for &z in &lead {
                let d = sign * erlang_mixture_derivative(comps, j, z);
                let scale = claim.density(z) * 1e-12;
                if d < -scale {
                    let w = ev(z, format!("(-1)^{j} f^({j})(z)"), d);
                    return Ok(ShapeVerdict::analytic(
                        subject,
                        property,
                        Holds::No,
                        "Erlang component of shape >= 2 gives a repeated pole",
                        w,
                    ));
                }
            }
        }
        let c = comps.iter().find(|c| shape_ge2(c)).unwrap();
        let w = ev(
            -c.rate,
            format!("coefficient of the order-{} pole of the transform", c.shape),
            -(c.weight * c.rate.powi(c.shape as i32)),
        );
        return Ok(ShapeVerdict::analytic(
            subject,
            property,
            Holds::No,
            "Erlang component of shape >= 2 gives a repeated pole",
            w,
        ));
    }
    Ok(density_cm_numeric(claim))
}

/// Sign test of central finite differences of orders 1..4. A pass can only
/// be `Inconclusive`.
fn density_cm_numeric(claim: &ClaimDistribution) -> ShapeVerdict {
    let subject = "claim density";
    let mut verdict = ShapeVerdict::new(
        subject,
        ShapeProperty::CompletelyMonotone,
        Holds::Inconclusive,
        Method::Numeric,
    );
    let mut in_band = 0usize;
    let mut worst: Option<Evidence> = None;
    for z in claim_grid(claim) {
        let h = 0.02 * z;
        let fz = claim.density(z);
        for j in 1..=4usize {
            // Δ^j centred at z with spacing h
            let mut d = 0.0;
            for i in 0..=j {
                let binom = (ln_factorial(j) - ln_factorial(i) - ln_factorial(j - i)).exp();
                let sign = if (j - i) % 2 == 0 { 1.0 } else { -1.0 };
                let x = z + (i as f64 - j as f64 / 2.0) * h;
                d += sign * binom * claim.density(x);
            }
            let signed = if j % 2 == 0 { d } else { -d };
            let band = 1e-6 * fz;
            if signed < -band {
                verdict.holds = Holds::No;
                verdict.evidence = vec![ev(z, format!("(-1)^{j} Δ_h^{j} f(z)"), signed)];
                return verdict;
            }
            if signed.abs() <= band {
                in_band += 1;
            }
            let replace = match &worst {
                None => true,
                Some(w) => signed < w.margin,
            };
            if replace {
                worst = Some(ev(z, format!("(-1)^{j} Δ_h^{j} f(z)"), signed));
            }
        }
    }
    verdict.evidence.extend(worst);
    verdict
        .notes
        .push(format!("{in_band} difference estimates fell inside the noise band"));
    verdict
        .notes
        .push("finite-order sign tests cannot establish complete monotonicity".into());
    verdict
}

/// Something with a survival function to test for DFR.
#[derive(Debug, Clone, Copy)]
pub enum TailSource<'a> {
    Claim(&'a ClaimDistribution),
    Compound(&'a CompoundClaimDistribution),
}

impl<'a> From<&'a ClaimDistribution> for TailSource<'a> {
    fn from(c: &'a ClaimDistribution) -> Self {
        TailSource::Claim(c)
    }
}

impl<'a> From<&'a CompoundClaimDistribution> for TailSource<'a> {
    fn from(c: &'a CompoundClaimDistribution) -> Self {
        TailSource::Compound(c)
    }
}

/// Convexity scan of `y(z)`: the first violation, or the tightest margin.
fn convexity_scan(z: &[f64], y: &[f64], quantity: &str) -> (bool, Evidence) {
    let mut worst: Option<Evidence> = None;
    for i in 1..z.len() - 1 {
        let hl = z[i] - z[i - 1];
        let hr = z[i + 1] - z[i];
        let d2 = 2.0 * ((y[i + 1] - y[i]) / hr - (y[i] - y[i - 1]) / hl) / (hl + hr);
        let allowance = 4.0 * LOG_VALUE_NOISE * (1.0 + y[i].abs()) / (hl * hr);
        let margin = d2 + DIVIDED_DIFF_SLACK + allowance;
        let e = ev(z[i], format!("{quantity} = {d2:e}"), margin);
        if margin < 0.0 {
            return (true, e);
        }
        let replace = match &worst {
            None => true,
            Some(w) => margin < w.margin,
        };
        if replace {
            worst = Some(e);
        }
    }
    (false, worst.expect("grid has interior points"))
}

fn log_grid_verdict(
    subject: &str,
    property: ShapeProperty,
    grid: Vec<f64>,
    value: impl Fn(f64) -> f64,
    quantity: &str,
) -> ShapeVerdict {
    let mut z = Vec::with_capacity(grid.len());
    let mut y = Vec::with_capacity(grid.len());
    let mut notes = Vec::new();
    for x in grid {
        let v = value(x);
        if !(v > 1e-300) {
            notes.push(format!("grid truncated at z = {x:e} where the value underflows"));
            break;
        }
        z.push(x);
        y.push(v.ln());
    }
    let mut verdict = ShapeVerdict::new(subject, property, Holds::Yes, Method::Numeric);
    verdict.notes = notes;
    if z.len() < 3 {
        verdict.holds = Holds::Inconclusive;
        verdict.notes.push("fewer than three usable grid points".into());
        return verdict;
    }
    let (violated, e) = convexity_scan(&z, &y, quantity);
    if violated {
        verdict.holds = Holds::No;
    }
    verdict.evidence.push(e);
    verdict
}

/// DFR: `ln F̄` convex on a log-spaced grid over `[q_0.001, q_0.999]`.
pub fn check_dfr<'a>(dist: impl Into<TailSource<'a>>) -> Result<ShapeVerdict> {
    let property = ShapeProperty::Dfr;
    match dist.into() {
        TailSource::Claim(claim) => {
            let subject = "claim tail";
            if let Some(comps) = claim.erlang_components() {
                if !comps.iter().any(shape_ge2) {
                    let rule = if claim.is_exponential() {
                        "exponential: constant failure rate"
                    } else {
                        "mixture of exponentials is DFR"
                    };
                    let mean = claim.mean();
                    let w = ev(
                        mean,
                        "failure rate f/F̄ at the mean",
                        claim.density(mean) / claim.tail(mean),
                    );
                    return Ok(ShapeVerdict::analytic(subject, property, Holds::Yes, rule, w));
                }
            }
            let grid = claim_grid(claim);
            Ok(log_grid_verdict(
                subject,
                property,
                grid,
                |z| claim.tail(z),
                "second divided difference of ln F̄",
            ))
        }
        TailSource::Compound(cc) => {
            let subject = "compound tail";
            match cc.compounder().kind() {
                CompounderKind::Geometric { rho } if cc.claim().is_exponential() => {
                    // Erlang(1, β) and one-component mixtures count as exponential too
                    let beta = cc.claim().erlang_components().expect("exponential claim law")[0].rate;
                    let w = ev(1.0, "exponential tail rate β(1-ρ)", beta * (1.0 - rho));
                    return Ok(ShapeVerdict::analytic(
                        subject,
                        property,
                        Holds::Yes,
                        "geometric compound of an exponential has an exponential tail",
                        w,
                    ));
                }
                CompounderKind::Degenerate => {
                    let mut v = check_dfr(cc.claim())?;
                    v.subject = subject.into();
                    v.notes.push("single-claim bulks: F = P".into());
                    return Ok(v);
                }
                _ => {}
            }
            let grid = log_space(cc.quantile(1e-3), cc.quantile(0.999), GRID_POINTS);
            Ok(log_grid_verdict(
                subject,
                property,
                grid,
                |z| cc.tail_unchecked(z),
                "second divided difference of ln F̄",
            ))
        }
    }
}

/// Log-convexity of the claim density.
pub fn check_log_convex_density(claim: &ClaimDistribution) -> Result<ShapeVerdict> {
    let subject = "claim density";
    let property = ShapeProperty::LogConvex;
    if let Some(comps) = claim.erlang_components() {
        if !comps.iter().any(shape_ge2) {
            let rule = if claim.is_exponential() {
                "exponential: ln f linear"
            } else {
                "completely monotone densities are log-convex"
            };
            let mean = claim.mean();
            let f = claim.density(mean);
            let d1 = erlang_mixture_derivative(comps, 1, mean);
            let d2 = erlang_mixture_derivative(comps, 2, mean);
            // ln f is exactly linear for a single exponential
            let gap = if claim.is_exponential() { 0.0 } else { f * d2 - d1 * d1 };
            let w = ev(mean, "f f'' - f'^2 at the mean", gap);
            return Ok(ShapeVerdict::analytic(subject, property, Holds::Yes, rule, w));
        }
    }
    let grid = claim_grid(claim);
    Ok(log_grid_verdict(
        subject,
        property,
        grid,
        |z| claim.density(z),
        "second divided difference of ln f",
    ))
}

/// Log-convexity of the compound claim density, always tested numerically.
pub fn check_compound_log_convex_density(cc: &CompoundClaimDistribution) -> Result<ShapeVerdict> {
    let grid = log_space(cc.quantile(1e-3), cc.quantile(0.999), GRID_POINTS);
    let mut v = log_grid_verdict(
        "compound density",
        ShapeProperty::LogConvex,
        grid,
        |z| cc.density_unchecked(z),
        "second divided difference of ln f",
    );
    if cc.claim().empirical_density().is_some() && v.holds == Holds::No {
        v.notes
            .push("compound of an empirical density is tested on its piecewise-linear interpolant".into());
    }
    Ok(v)
}
