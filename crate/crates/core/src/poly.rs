//! Real polynomials (ascending coefficients) and their complex roots.

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Poly(pub Vec<f64>);

impl Poly {
    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    /// `a + b s`.
    pub fn linear(a: f64, b: f64) -> Self {
        Poly(vec![a, b])
    }

    pub fn degree(&self) -> usize {
        self.0.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly(
            (0..n)
                .map(|i| self.0.get(i).copied().unwrap_or(0.0) + other.0.get(i).copied().unwrap_or(0.0))
                .collect(),
        )
    }

    pub fn scale(&self, k: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * k).collect())
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::constant(1.0);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly::constant(0.0);
        }
        Poly(self.0.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect())
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.0.iter().rev() {
            acc = acc * s + c;
        }
        acc
    }

    /// `Σ |c_i| |s|^i`, the scale of rounding errors in [`eval`](Self::eval).
    pub fn eval_abs(&self, s: Complex64) -> f64 {
        let r = s.norm();
        let mut acc = 0.0;
        for c in self.0.iter().rev() {
            acc = acc * r + c.abs();
        }
        acc
    }

    /// All complex roots by Aberth–Ehrlich iteration, then Newton polish.
    pub fn roots(&self) -> Vec<Complex64> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let coeffs = &self.0[..=n];
        let lead = coeffs[n];
        let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
        let p = Poly(monic);
        let dp = p.derivative();
        // Cauchy bound for the initial circle
        let radius = 1.0 + p.0[..n].iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(radius * 0.5, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .collect();
        for _ in 0..500 {
            let mut moved = 0.0f64;
            for i in 0..n {
                let pv = p.eval(z[i]);
                if pv == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let ratio = pv / dp.eval(z[i]);
                let repulsion: Complex64 = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                    .sum();
                let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
                if step.is_finite() {
                    z[i] -= step;
                    moved = moved.max(step.norm() / (1.0 + z[i].norm()));
                }
            }
            if moved < 1e-16 {
                break;
            }
        }
        for r in z.iter_mut() {
            for _ in 0..3 {
                let d = dp.eval(*r);
                if d.norm() == 0.0 {
                    break;
                }
                let step = p.eval(*r) / d;
                if !step.is_finite() {
                    break;
                }
                *r -= step;
            }
            if r.im.abs() <= 1e-14 * r.norm() {
                r.im = 0.0;
            }
        }
        z
    }
}
