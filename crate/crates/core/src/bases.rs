//! Closed-form orthonormal bases for the Weyl (homogeneous polynomial) and
//! Gaussian kernels.
//!
//! Weyl: `e_α(x) = √(d!/α!)·x^α` over `|α| = d`, with inner product
//! `Σ (α!/d!) w_α v_α` on monomial coefficients.
//!
//! Gaussian: `φ_α(x) = 2^{|α|/2} / (σ^{|α|} √α!) · exp(−‖x‖²/σ²) · x^α`, with
//! inner product `Σ_k (σ^{2k}/2^k) Σ_{|α|=k} α! w_α v_α` on the coefficients of
//! `exp(−‖x‖²/σ²) Σ w_α x^α`.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::kernel::Point;
use crate::linalg::Matrix;

/// Truncation order used when none is given.
pub const DEFAULT_K_MAX: u32 = 32;

/// Largest degree for which factorials are computed in exact integer arithmetic.
const EXACT_FACTORIAL_MAX: u32 = 20;

fn factorial_u64(k: u32) -> u64 {
    (1..=k as u64).product()
}

fn ln_factorial(k: u32) -> f64 {
    if k <= EXACT_FACTORIAL_MAX {
        (factorial_u64(k) as f64).ln()
    } else {
        ln_gamma(k as f64 + 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α| = Σ α_i`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `α! = Π α_i!`.
    pub fn factorial(&self) -> f64 {
        if self.degree() <= EXACT_FACTORIAL_MAX {
            self.0.iter().map(|&a| factorial_u64(a)).product::<u64>() as f64
        } else {
            self.ln_factorial().exp()
        }
    }

    pub fn ln_factorial(&self) -> f64 {
        self.0.iter().map(|&a| ln_factorial(a)).sum()
    }

    /// Multinomial coefficient `|α|! / α!`.
    pub fn multinomial(&self) -> f64 {
        let d = self.degree();
        if d <= EXACT_FACTORIAL_MAX {
            let denom: u64 = self.0.iter().map(|&a| factorial_u64(a)).product();
            (factorial_u64(d) / denom) as f64
        } else {
            (ln_factorial(d) - self.ln_factorial()).exp()
        }
    }

    /// `x^α`.
    pub fn monomial(&self, x: &Point) -> Result<f64> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(x.coords()
            .iter()
            .zip(&self.0)
            .map(|(c, &a)| c.powi(a as i32))
            .product())
    }
}

/// All `α ∈ ℕ₀ⁿ` with `|α| = d`, in descending lexicographic order
/// (`(2,0), (1,1), (0,2)` for `n = 2, d = 2`).
pub fn enumerate_multiindices(n: usize, d: u32) -> Vec<MultiIndex> {
    fn fill(prefix: &mut Vec<u32>, slots: usize, left: u32, out: &mut Vec<MultiIndex>) {
        if slots == 1 {
            prefix.push(left);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for first in (0..=left).rev() {
            prefix.push(first);
            fill(prefix, slots - 1, left - first, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        fill(&mut Vec::with_capacity(n), n, d, &mut out);
    }
    out
}

/// `binom(n + d − 1, n − 1)`, the number of degree-`d` monomials in `n` variables.
pub fn weyl_dimension(n: usize, d: u32) -> u64 {
    if n == 0 {
        return 0;
    }
    let k = (n - 1) as u64;
    let top = (n as u64 - 1) + d as u64;
    // binom(top, k) via the multiplicative formula, exact at every step.
    (1..=k).fold(1u64, |acc, i| acc * (top - k + i) / i)
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Orthonormal basis of the Weyl kernel's space of degree-`d` homogeneous polynomials.
#[derive(Debug, Clone)]
pub struct WeylBasis {
    n: usize,
    degree: u32,
    indices: Vec<MultiIndex>,
}

impl WeylBasis {
    pub fn new(n: usize, degree: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPoint(
                "ambient dimension must be at least 1".into(),
            ));
        }
        Ok(WeylBasis {
            n,
            degree,
            indices: enumerate_multiindices(n, degree),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn dimension(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// `e_α(x) = √(d!/α!)·x^α`.
    pub fn eval(&self, alpha: &MultiIndex, x: &Point) -> Result<f64> {
        if alpha.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: alpha.degree(),
            });
        }
        Ok(alpha.multinomial().sqrt() * alpha.monomial(x)?)
    }

    pub fn eval_all(&self, x: &Point) -> Result<Vec<f64>> {
        self.indices.iter().map(|a| self.eval(a, x)).collect()
    }

    /// Basis samples, rows indexed by the enumeration and columns by `points`.
    pub fn sample(&self, points: &[Point]) -> Result<Matrix> {
        let cols = points
            .iter()
            .map(|p| self.eval_all(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_fn(self.dimension(), points.len(), |i, j| {
            cols[j][i]
        }))
    }

    /// `Σ (α!/d!) w_α v_α` for monomial coefficient lists.
    pub fn inner(&self, w: &[f64], v: &[f64]) -> Result<f64> {
        check_len(self.dimension(), w.len())?;
        check_len(self.dimension(), v.len())?;
        Ok(self
            .indices
            .iter()
            .zip(w.iter().zip(v))
            .map(|(a, (wa, va))| wa * va / a.multinomial())
            .sum())
    }

    /// Monomial coefficients of the section `W_y = Σ (d!/α!) y^α x^α`.
    pub fn section_coefficients(&self, y: &Point) -> Result<Vec<f64>> {
        self.indices
            .iter()
            .map(|a| Ok(a.multinomial() * a.monomial(y)?))
            .collect()
    }

    /// Monomial coefficients of `e_α`.
    pub fn basis_coefficients(&self, position: usize) -> Result<Vec<f64>> {
        let alpha = self.indices.get(position).ok_or(Error::IndexOutOfRange {
            index: position,
            bound: self.dimension(),
        })?;
        let mut w = vec![0.0; self.dimension()];
        w[position] = alpha.multinomial().sqrt();
        Ok(w)
    }
}

/// The Gaussian kernel's orthonormal basis truncated at total degree `k_max`.
#[derive(Debug, Clone)]
pub struct GaussBasis {
    n: usize,
    sigma: f64,
    k_max: u32,
    indices: Vec<MultiIndex>,
}

/// A truncated expansion `Σ_{|α| ≤ k_max} φ_α(x) φ_α(y)` with its error budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialReconstruction {
    pub value: f64,
    /// `exp(−(‖x‖²+‖y‖²)/σ²)·Σ_{k > k_max} (2‖x‖‖y‖/σ²)^k / k!`.
    pub tail_bound: f64,
    /// Floating-point summation allowance for `value`.
    pub rounding_bound: f64,
}

impl PartialReconstruction {
    pub fn error_bound(&self) -> f64 {
        self.tail_bound + self.rounding_bound
    }
}

impl GaussBasis {
    pub fn new(n: usize, sigma: f64, k_max: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPoint(
                "ambient dimension must be at least 1".into(),
            ));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidKernel(format!(
                "bandwidth must be positive, got {sigma}"
            )));
        }
        let indices = (0..=k_max)
            .flat_map(|k| enumerate_multiindices(n, k))
            .collect();
        Ok(GaussBasis {
            n,
            sigma,
            k_max,
            indices,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `ln(2^{k/2} / (σ^k √α!))`.
    fn ln_scale(&self, alpha: &MultiIndex) -> f64 {
        let k = alpha.degree() as f64;
        0.5 * k * std::f64::consts::LN_2 - k * self.sigma.ln() - 0.5 * alpha.ln_factorial()
    }

    /// `2^{k/2} / (σ^k √α!)`.
    fn scale(&self, alpha: &MultiIndex) -> f64 {
        let k = alpha.degree();
        if k <= EXACT_FACTORIAL_MAX {
            ((1u64 << k) as f64 / alpha.factorial()).sqrt() / self.sigma.powi(k as i32)
        } else {
            self.ln_scale(alpha).exp()
        }
    }

    /// `φ_α(x)`.
    pub fn eval(&self, alpha: &MultiIndex, x: &Point) -> Result<f64> {
        let mono = alpha.monomial(x)?;
        let decay = -x.norm_squared() / (self.sigma * self.sigma);
        if alpha.degree() <= EXACT_FACTORIAL_MAX {
            Ok(mono * self.scale(alpha) * decay.exp())
        } else {
            Ok(mono * (self.ln_scale(alpha) + decay).exp())
        }
    }

    pub fn eval_all(&self, x: &Point) -> Result<Vec<f64>> {
        self.indices.iter().map(|a| self.eval(a, x)).collect()
    }

    pub fn sample(&self, points: &[Point]) -> Result<Matrix> {
        let cols = points
            .iter()
            .map(|p| self.eval_all(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_fn(self.len(), points.len(), |i, j| cols[j][i]))
    }

    /// Coefficients `w` of `φ_α` in the representation `exp(−‖x‖²/σ²) Σ w_β x^β`.
    pub fn basis_coefficients(&self, position: usize) -> Result<Vec<f64>> {
        let alpha = self.indices.get(position).ok_or(Error::IndexOutOfRange {
            index: position,
            bound: self.len(),
        })?;
        let mut w = vec![0.0; self.len()];
        w[position] = self.scale(alpha);
        Ok(w)
    }

    /// `Σ_k (σ^{2k}/2^k) Σ_{|α|=k} α! w_α v_α`.
    pub fn inner(&self, w: &[f64], v: &[f64]) -> Result<f64> {
        check_len(self.len(), w.len())?;
        check_len(self.len(), v.len())?;
        Ok(self
            .indices
            .iter()
            .zip(w.iter().zip(v))
            .map(|(a, (wa, va))| {
                let k = a.degree() as f64;
                let ln_weight =
                    k * (2.0 * self.sigma.ln() - std::f64::consts::LN_2) + a.ln_factorial();
                ln_weight.exp() * wa * va
            })
            .sum())
    }

    pub fn partial_reconstruction(&self, x: &Point, y: &Point) -> Result<PartialReconstruction> {
        let terms: Vec<f64> = self
            .indices
            .iter()
            .map(|a| Ok(self.eval(a, x)? * self.eval(a, y)?))
            .collect::<Result<_>>()?;
        let value: f64 = terms.iter().sum();
        let abs_sum: f64 = terms.iter().map(|t| t.abs()).sum();
        let s2 = self.sigma * self.sigma;
        let t = 2.0 * x.norm_squared().sqrt() * y.norm_squared().sqrt() / s2;
        let envelope = (-(x.norm_squared() + y.norm_squared()) / s2).exp();
        let slack = (terms.len() + self.k_max as usize + 16) as f64;
        Ok(PartialReconstruction {
            value,
            tail_bound: envelope * exp_series_tail(t, self.k_max),
            rounding_bound: slack * f64::EPSILON * abs_sum,
        })
    }
}

/// `Σ_{k > k_max} t^k / k!` for `t ≥ 0`.
fn exp_series_tail(t: f64, k_max: u32) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let mut k = k_max + 1;
    let mut term = (k as f64 * t.ln() - ln_factorial(k)).exp();
    let mut sum = 0.0;
    loop {
        sum += term;
        k += 1;
        term *= t / k as f64;
        if (k as f64 > t && term <= 1e-18 * sum) || term == 0.0 {
            return sum;
        }
    }
}
