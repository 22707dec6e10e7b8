//! Barrier strategies: value `V_b`, the optimal level `b*`, and the shape
//! conditions under which barrier optimality over all admissible strategies
//! is known.
//!
//! For a barrier at `b`,
//!
//! ```text
//! V_b(x) = W(x) / W'(b)             0 <= x <= b
//! V_b(x) = x - b + W(b) / W'(b)     x > b
//! ```
//!
//! and `b*` is the smallest global minimiser of `W'`.

use std::io::Write;

use serde::Serialize;

use crate::dist::{CompoundClaimDistribution, CompounderKind};
use crate::error::{Error, Result};
use crate::levy::RiskModel;
use crate::scale::ScaleFunctionGrid;
use crate::shape::{self, Holds, ShapeVerdict};

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Barrier strategy at level `b` over a scale-function grid.
#[derive(Debug, Clone, Copy)]
pub struct BarrierPolicy<'a> {
    pub b: f64,
    grid: &'a ScaleFunctionGrid,
}

impl<'a> BarrierPolicy<'a> {
    pub fn new(grid: &'a ScaleFunctionGrid, b: f64) -> Result<Self> {
        check_barrier(grid, b)?;
        Ok(Self { b, grid })
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        barrier_value(self.grid, self.b, x)
    }
}

fn check_barrier(grid: &ScaleFunctionGrid, b: f64) -> Result<f64> {
    if !(b >= 0.0 && b <= grid.x_max() * (1.0 + 1e-12)) {
        return Err(Error::domain(
            "b",
            format!("barrier {b} lies outside the grid [0, {}]", grid.x_max()),
        ));
    }
    let w1 = grid.w1(b);
    if !(w1 > 1e-14) {
        return Err(Error::DegenerateBarrier { b, w1 });
    }
    Ok(w1)
}

/// `V_b(x)`.
pub fn barrier_value(grid: &ScaleFunctionGrid, b: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain("x", format!("must be finite and >= 0, got {x}")));
    }
    let w1b = check_barrier(grid, b)?;
    if x <= b {
        Ok(grid.w(x) / w1b)
    } else {
        Ok(x - b + grid.w(b) / w1b)
    }
}

/// `V(x) = V_{b*}(x)`; the value function over all admissible strategies
/// only when a theorem-backed certificate holds.
pub fn value_function(grid: &ScaleFunctionGrid, b_star: f64, x: f64) -> Result<f64> {
    barrier_value(grid, b_star, x)
}

/// Write `(x, V_b(x))` rows as CSV.
pub fn write_value_table<W: Write>(grid: &ScaleFunctionGrid, b: f64, xs: &[f64], mut out: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Evaluation(format!("write failed: {e}"));
    writeln!(out, "x,V").map_err(io)?;
    for &x in xs {
        let v = barrier_value(grid, b, x)?;
        writeln!(out, "{x:.16e},{v:.16e}").map_err(io)?;
    }
    Ok(())
}

/// Smallest global minimiser of `W'` on `[0, x_max]` and the minimum.
///
/// The coarse minimum over the tabulated `W'` is refined by golden-section
/// search on the two neighbouring cells down to a width of `1e-8 x_max`.
pub fn find_b_star(grid: &ScaleFunctionGrid) -> Result<(f64, f64)> {
    let w1 = grid.w1_values();
    let xs = grid.xs();
    let n = grid.n();
    let mut imin = 0;
    for i in 1..=n {
        if w1[i] < w1[imin] {
            imin = i;
        }
    }
    if imin == n {
        return Err(Error::GridTooShort {
            x_max: grid.x_max(),
            suggested: 2.0 * grid.x_max(),
        });
    }
    if imin == 0 {
        return Ok((0.0, w1[0]));
    }
    let (mut lo, mut hi) = (xs[imin - 1], xs[imin + 1]);
    let f = |x: f64| grid.w1(x);
    let mut a = hi - GOLDEN * (hi - lo);
    let mut b = lo + GOLDEN * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    let width = 1e-8 * grid.x_max();
    while hi - lo > width {
        // `<=` keeps the left point on ties, preferring the smaller barrier
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - GOLDEN * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + GOLDEN * (hi - lo);
            fb = f(b);
        }
    }
    let b_star = 0.5 * (lo + hi);
    let w_star = f(b_star);
    if w_star <= w1[imin] {
        Ok((b_star, w_star))
    } else {
        Ok((xs[imin], w1[imin]))
    }
}

/// The result that certifies optimality of the barrier strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertifyingRule {
    /// Discrete-CM bulk sizes with completely monotone claim density.
    CompletelyMonotoneClaims,
    /// Discrete-CM bulk sizes with DFR claims.
    DiscreteCmWithDfrClaims,
    /// Geometric or logarithmic bulk sizes with DFR claims.
    GeometricOrLogarithmicWithDfrClaims,
    /// Log-convex bulk-size pmf with exponential claims.
    LogConvexPmfWithExponentialClaims,
    /// Compound claim density verified log-convex.
    LogConvexCompoundDensity,
    /// Log-convex pmf and log-convex claim density (open conjecture).
    LogConvexPmfAndDensity,
    /// DFR bulk sizes and DFR claims (open conjecture).
    DfrPmfAndClaims,
    None,
}

impl CertifyingRule {
    pub const ALL: [CertifyingRule; 8] = [
        CertifyingRule::CompletelyMonotoneClaims,
        CertifyingRule::DiscreteCmWithDfrClaims,
        CertifyingRule::GeometricOrLogarithmicWithDfrClaims,
        CertifyingRule::LogConvexPmfWithExponentialClaims,
        CertifyingRule::LogConvexCompoundDensity,
        CertifyingRule::LogConvexPmfAndDensity,
        CertifyingRule::DfrPmfAndClaims,
        CertifyingRule::None,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CertifyingRule::CompletelyMonotoneClaims => "Thm4.1",
            CertifyingRule::DiscreteCmWithDfrClaims => "Thm4.2",
            CertifyingRule::GeometricOrLogarithmicWithDfrClaims => "Cor4.1",
            CertifyingRule::LogConvexPmfWithExponentialClaims => "Thm4.3",
            CertifyingRule::LogConvexCompoundDensity => "Lemma5.2-direct",
            CertifyingRule::LogConvexPmfAndDensity => "Conjecture1",
            CertifyingRule::DfrPmfAndClaims => "Conjecture2",
            CertifyingRule::None => "None",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.label() == s)
    }

    pub fn is_conjectural(self) -> bool {
        matches!(
            self,
            CertifyingRule::LogConvexPmfAndDensity | CertifyingRule::DfrPmfAndClaims
        )
    }

    pub fn is_theorem_backed(self) -> bool {
        !self.is_conjectural() && self != CertifyingRule::None
    }
}

impl Serialize for CertifyingRule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

/// A rule whose preconditions were not all `Yes`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedRule {
    pub rule: CertifyingRule,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalityCertificate {
    pub b_star: f64,
    pub w1_min: f64,
    /// Highest-priority rule whose preconditions all hold.
    pub rule: CertifyingRule,
    pub conjectural: bool,
    /// Every rule whose preconditions hold, in priority order.
    pub applicable: Vec<CertifyingRule>,
    pub skipped: Vec<SkippedRule>,
    pub evidence: Vec<ShapeVerdict>,
    /// `W'(b*) <= W'(x)` at every grid point (within error estimates).
    pub grid_minimum_confirmed: bool,
}

impl OptimalityCertificate {
    /// One-line summary used by the command-line tool.
    pub fn summary(&self) -> String {
        let mut s = format!("b*={:.10} rule={}", self.b_star, self.rule.label());
        if self.conjectural {
            s.push_str(" (conjectural)");
        }
        if self.rule == CertifyingRule::None {
            s.push_str(" barrier-optimal on grid only");
        }
        s
    }
}

/// Condition for a rule: a label and either a verdict index or a structural
/// fact about the model.
enum Condition {
    Verdict(usize),
    Structural(&'static str, bool),
}

/// Decide which result (if any) certifies the barrier at `b*`.
pub fn certify_optimality(model: &RiskModel, grid: &ScaleFunctionGrid) -> Result<OptimalityCertificate> {
    let (b_star, w1_min) = find_b_star(grid)?;
    let compounder = model.compounder();
    let claim = model.claim();

    let compound = CompoundClaimDistribution::new(compounder.clone(), claim.clone())?;
    let evidence = vec![
        shape::compounder_discrete_cm(compounder),            // 0
        shape::check_density_cm(claim)?,                      // 1
        shape::check_dfr(claim)?,                             // 2
        shape::compounder_log_convex(compounder, false),      // 3
        shape::check_compound_log_convex_density(&compound)?, // 4
        shape::check_log_convex_density(claim)?,              // 5
        shape::compounder_dfr(compounder),                    // 6
    ];
    let geo_or_log = matches!(
        compounder.kind(),
        CompounderKind::Geometric { .. } | CompounderKind::Logarithmic { .. }
    );
    use CertifyingRule as R;
    use Condition::{Structural, Verdict};
    let rules: Vec<(R, Vec<Condition>)> = vec![
        (R::CompletelyMonotoneClaims, vec![Verdict(1), Verdict(0)]),
        (R::DiscreteCmWithDfrClaims, vec![Verdict(0), Verdict(2)]),
        (
            R::GeometricOrLogarithmicWithDfrClaims,
            vec![
                Structural("bulk sizes geometric or logarithmic", geo_or_log),
                Verdict(2),
            ],
        ),
        (
            R::LogConvexPmfWithExponentialClaims,
            vec![Verdict(3), Structural("claims exponential", claim.is_exponential())],
        ),
        (R::LogConvexCompoundDensity, vec![Verdict(4)]),
        (R::LogConvexPmfAndDensity, vec![Verdict(3), Verdict(5)]),
        (R::DfrPmfAndClaims, vec![Verdict(6), Verdict(2)]),
    ];
    let mut applicable = Vec::new();
    let mut skipped = Vec::new();
    for (rule, conds) in rules {
        let mut failed = Vec::new();
        for c in conds {
            match c {
                Verdict(i) => {
                    let v = &evidence[i];
                    if v.holds != Holds::Yes {
                        failed.push(format!("{} {:?} is {:?}", v.subject, v.property, v.holds));
                    }
                }
                Structural(what, ok) => {
                    if !ok {
                        failed.push(format!("{what}: no"));
                    }
                }
            }
        }
        if failed.is_empty() {
            applicable.push(rule);
        } else {
            skipped.push(SkippedRule {
                rule,
                reason: failed.join("; "),
            });
        }
    }
    let rule = applicable.first().copied().unwrap_or(R::None);

    let tol = grid
        .w1_errors()
        .iter()
        .fold(0.0f64, |m, e| m.max(*e))
        .max(1e-12 * w1_min.abs());
    let grid_minimum_confirmed = grid.w1_values().iter().all(|v| *v >= w1_min - tol);

    Ok(OptimalityCertificate {
        b_star,
        w1_min,
        rule,
        conjectural: rule.is_conjectural(),
        applicable,
        skipped,
        evidence,
        grid_minimum_confirmed,
    })
}
