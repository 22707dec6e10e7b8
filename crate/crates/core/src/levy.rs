//! The surplus process `X(t) = x + ct + σW_t - Σ_{i<=N_t} Y_i` and its Laplace
//! exponent `ψ(s) = ln E e^{s(X(1)-x)} = cs + σ²s²/2 + λ(g(L_P(s)) - 1)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::dist::{ClaimDistribution, CountingCompounder};
use crate::error::{ensure_nonneg, ensure_positive, Error, Result};

#[derive(Debug, Clone)]
pub struct RiskModel {
    c: f64,
    sigma: f64,
    lambda: f64,
    compounder: CountingCompounder,
    claim: ClaimDistribution,
    drift: f64,
}

/// Plain-data view of the scalar model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelSummary {
    pub c: f64,
    pub sigma: f64,
    pub lambda: f64,
    /// `ψ'(0+) = c - λ E[X_1] E[Y_1]`.
    pub net_profit: f64,
    pub bounded_variation: bool,
}

impl RiskModel {
    pub fn new(
        c: f64,
        sigma: f64,
        lambda: f64,
        compounder: CountingCompounder,
        claim: ClaimDistribution,
    ) -> Result<Self> {
        ensure_positive("model.c", c)?;
        ensure_nonneg("model.sigma", sigma)?;
        ensure_positive("model.lambda", lambda)?;
        let drift = c - lambda * compounder.mean() * claim.mean();
        Ok(Self {
            c,
            sigma,
            lambda,
            compounder,
            claim,
            drift,
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn compounder(&self) -> &CountingCompounder {
        &self.compounder
    }

    pub fn claim(&self) -> &ClaimDistribution {
        &self.claim
    }

    /// `ψ'(0+) = c - λ E[X_1] E[Y_1]`; may be negative.
    pub fn net_profit(&self) -> f64 {
        self.drift
    }

    /// `σ = 0`: paths have bounded variation and `W(0) = 1/c`.
    pub fn has_bounded_variation(&self) -> bool {
        self.sigma == 0.0
    }

    pub fn summary(&self) -> ModelSummary {
        ModelSummary {
            c: self.c,
            sigma: self.sigma,
            lambda: self.lambda,
            net_profit: self.drift,
            bounded_variation: self.has_bounded_variation(),
        }
    }

    /// Same model with `(c, σ², λ)` multiplied by `k` (time change `t -> kt`).
    pub fn time_scaled(&self, k: f64) -> Result<Self> {
        ensure_positive("k", k)?;
        Self::new(
            self.c * k,
            self.sigma * k.sqrt(),
            self.lambda * k,
            self.compounder.clone(),
            self.claim.clone(),
        )
    }

    /// `ψ(s)` for real `s >= 0`.
    pub fn psi(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::domain("s", format!("must be finite and >= 0, got {s}")));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        let u = self.claim.laplace(s);
        Ok(self.c * s + 0.5 * self.sigma * self.sigma * s * s + self.lambda * (self.compounder.pgf(u) - 1.0))
    }

    /// Analytic continuation of `ψ` to `Re s > 0`.
    pub fn psi_complex(&self, s: Complex64) -> Complex64 {
        let u = self.claim.laplace_complex(s);
        s * self.c + s * s * (0.5 * self.sigma * self.sigma) + (self.compounder.pgf_complex(u) - 1.0) * self.lambda
    }

    /// `ψ'(s) = c + σ²s + λ g'(L_P(s)) L_P'(s)`.
    pub fn psi_prime(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::domain("s", format!("must be finite and >= 0, got {s}")));
        }
        let u = self.claim.laplace(s);
        Ok(self.c
            + self.sigma * self.sigma * s
            + self.lambda * self.compounder.pgf_derivative(u) * self.claim.laplace_derivative(s))
    }

    /// The unique positive root `ρ(q)` of `ψ(s) = q`.
    pub fn rho(&self, q: f64) -> Result<f64> {
        rho_root(self, q)
    }
}

/// `ψ(s)` for real `s >= 0`.
pub fn psi(model: &RiskModel, s: f64) -> Result<f64> {
    model.psi(s)
}

/// Root of `ψ(s) = q`: bracket by doubling, bisect to width `1e-8`, then at
/// most five Newton steps, each kept only if it stays inside the bracket.
pub fn rho_root(model: &RiskModel, q: f64) -> Result<f64> {
    ensure_positive("q", q)?;
    let f = |s: f64| model.psi(s).map(|v| v - q);
    let mut lo = 0.0;
    let mut hi = 1.0;
    while f(hi)? < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Evaluation("ψ(s) - q has no sign change".into()));
        }
    }
    while hi - lo > 1e-8 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tol = 1e-12 * q.max(1.0);
    let mut s = 0.5 * (lo + hi);
    for _ in 0..5 {
        let r = f(s)?;
        if r.abs() <= tol {
            return Ok(s);
        }
        if r < 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let d = model.psi_prime(s)?;
        let next = s - r / d;
        s = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
    }
    // finish by bisection if Newton did not reach the residual target
    let mut best = s;
    let mut best_r = f(s)?.abs();
    for _ in 0..200 {
        if best_r <= tol || hi - lo <= f64::EPSILON * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let r = f(mid)?;
        if r.abs() < best_r {
            best = mid;
            best_r = r.abs();
        }
        if r < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classical() -> RiskModel {
        RiskModel::new(
            2.0,
            0.0,
            1.0,
            CountingCompounder::degenerate(),
            ClaimDistribution::exponential(1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn psi_at_zero_is_exactly_zero() {
        assert_eq!(classical().psi(0.0).unwrap(), 0.0);
    }

    #[test]
    fn psi_hand_value() {
        assert!((classical().psi(1.0).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn rho_quadratic() {
        let r = classical().rho(0.1).unwrap();
        let exact = (-0.9 + 1.61f64.sqrt()) / 4.0;
        assert!((r - exact).abs() < 1e-13);
    }

    #[test]
    fn negative_arguments_are_rejected() {
        assert!(classical().psi(-1.0).is_err());
        assert!(classical().rho(0.0).is_err());
        assert!(RiskModel::new(
            1.0,
            -1.0,
            1.0,
            CountingCompounder::degenerate(),
            ClaimDistribution::exponential(1.0).unwrap()
        )
        .is_err());
    }

    #[test]
    fn complex_matches_real() {
        let m = classical();
        for &s in &[0.3, 1.0, 7.0] {
            let z = m.psi_complex(Complex64::new(s, 0.0));
            assert!((z.re - m.psi(s).unwrap()).abs() < 1e-14 && z.im == 0.0);
        }
    }
}
