//! Nyström discretisation of the integral operator `(L_K f)(x) = ∫ K(x,t) f(t) dν(t)`
//! and the Mercer expansion it produces.
//!
//! With nodes `x_i` and weights `w_i`, `L_K` acts on node values as `G·W`. It is
//! similar to the symmetric matrix `A = W^{1/2} G W^{1/2}`, whose eigenpairs
//! `(λ_n, u_n)` give the `L²(ν)`-orthonormal eigenfunction samples
//! `φ_n(x_i) = u_n[i] / √w_i`. Off the nodes an eigenfunction is extended by
//! `φ_n(x) = λ_n⁻¹ Σ_j w_j K(x, x_j) φ_n(x_j)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{self, GramMatrix, KernelSpec, Point};
use crate::linalg::{self, Matrix, Vector, HERMITIAN_TOL, RANGE_TOL};
use crate::measure::DiscreteMeasure;
use crate::rkhs::{self, FiniteRkhs, Inclusion};

/// Eigenvalues `λ ≤ CLIP_CUTOFF·λ_1` never appear in a denominator.
pub const CLIP_CUTOFF: f64 = 1e-12;

/// `L_K` discretised on a [`DiscreteMeasure`].
#[derive(Debug, Clone)]
pub struct NystromOperator {
    measure: DiscreteMeasure,
    gram: GramMatrix,
    matrix: Matrix,
}

impl NystromOperator {
    pub fn measure(&self) -> &DiscreteMeasure {
        &self.measure
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    /// `A = W^{1/2} G W^{1/2}`.
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// `(L_K f)(x_i) = Σ_j w_j K(x_i, x_j) f(x_j)`.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.measure.len() {
            return Err(Error::DimensionMismatch {
                expected: self.measure.len(),
                found: f.len(),
            });
        }
        let wf = Vector::from_iterator(
            f.len(),
            f.iter().zip(self.measure.weights()).map(|(v, w)| v * w),
        );
        Ok((self.gram.entries() * wf).iter().copied().collect())
    }
}

fn sqrt_weights(measure: &DiscreteMeasure) -> Vector {
    Vector::from_iterator(measure.len(), measure.weights().iter().map(|w| w.sqrt()))
}

/// `W^{1/2}·M·W^{1/2}`, entrywise `√(w_i w_j)·M_ij` so the result stays exactly symmetric.
fn congruence(m: &Matrix, measure: &DiscreteMeasure) -> Matrix {
    let w = measure.weights();
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        (w[i] * w[j]).sqrt() * m[(i, j)]
    })
}

/// Builds the symmetrised operator; the kernel's Gram matrix on the nodes must be PSD.
pub fn assemble(spec: &KernelSpec, measure: &DiscreteMeasure) -> Result<NystromOperator> {
    let gram = kernel::gram(spec, measure.points())?;
    let report = kernel::check_psd(gram.entries(), HERMITIAN_TOL)?;
    if !report.psd {
        return Err(Error::NotPsd {
            min_eigenvalue: report.min_eigenvalue,
        });
    }
    let matrix = congruence(gram.entries(), measure);
    Ok(NystromOperator {
        measure: measure.clone(),
        gram,
        matrix,
    })
}

/// Eigenvalues and `L²(ν)`-orthonormal eigenfunction samples of a [`NystromOperator`].
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    measure: DiscreteMeasure,
    eigenvalues: Vec<f64>,
    eigenfunctions: Matrix,
    rank: usize,
}

impl SpectralDecomposition {
    pub fn measure(&self) -> &DiscreteMeasure {
        &self.measure
    }

    /// All eigenvalues, descending, negatives clipped to zero.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Samples `φ_n(x_i)`; one column per retained mode.
    pub fn eigenfunctions(&self) -> &Matrix {
        &self.eigenfunctions
    }

    /// Number of eigenvalues above `CLIP_CUTOFF·λ_1`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn eigenfunction(&self, n: usize) -> Result<Vec<f64>> {
        self.check_mode(n)?;
        Ok(self.eigenfunctions.column(n).iter().copied().collect())
    }

    fn check_mode(&self, n: usize) -> Result<()> {
        if n >= self.rank {
            return Err(Error::IndexOutOfRange {
                index: n,
                bound: self.rank,
            });
        }
        Ok(())
    }

    fn check_measure(&self, measure: &DiscreteMeasure) -> Result<()> {
        if measure != &self.measure {
            return Err(Error::PointListMismatch);
        }
        Ok(())
    }

    /// Retained eigenfunctions, one per column, as CSV.
    pub fn eigenfunctions_csv(&self) -> String {
        crate::io::matrix_to_csv(&self.eigenfunctions)
    }
}

pub fn spectrum(op: &NystromOperator) -> Result<SpectralDecomposition> {
    let dec = linalg::eigh(&op.matrix)?;
    let eigenvalues: Vec<f64> = dec.eigenvalues.iter().map(|l| l.max(0.0)).collect();
    let top = eigenvalues.first().copied().unwrap_or(0.0);
    let rank = eigenvalues
        .iter()
        .filter(|&&l| l > CLIP_CUTOFF * top)
        .count();
    let sw = sqrt_weights(&op.measure);
    let mut eigenfunctions = Matrix::from_fn(op.measure.len(), rank, |i, n| {
        dec.eigenvectors[(i, n)] / sw[i]
    });
    // Sign convention: the largest-magnitude sample of each mode is positive.
    for mut col in eigenfunctions.column_iter_mut() {
        let pivot = col
            .iter()
            .copied()
            .fold(0.0_f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
        if pivot < 0.0 {
            col.neg_mut();
        }
    }
    Ok(SpectralDecomposition {
        measure: op.measure.clone(),
        eigenvalues,
        eigenfunctions,
        rank,
    })
}

/// Extended samples `φ_n(x)` for the first `order` modes; rows follow `eval`.
fn extended(
    dec: &SpectralDecomposition,
    spec: &KernelSpec,
    order: usize,
    eval: &[Point],
) -> Result<Matrix> {
    let k = kernel::cross_gram(spec, eval, dec.measure.points())?;
    let w = Vector::from_column_slice(dec.measure.weights());
    let weighted = Matrix::from_fn(dec.measure.len(), order, |j, n| {
        w[j] * dec.eigenfunctions[(j, n)] / dec.eigenvalues[n]
    });
    Ok(k * weighted)
}

/// `φ_n(x) = λ_n⁻¹ Σ_j w_j K(x, x_j) φ_n(x_j)`.
pub fn nystrom_extend(
    dec: &SpectralDecomposition,
    spec: &KernelSpec,
    n: usize,
    x: &Point,
) -> Result<f64> {
    dec.check_mode(n)?;
    let mut acc = 0.0;
    for (j, xj) in dec.measure.points().iter().enumerate() {
        acc +=
            dec.measure.weights()[j] * kernel::evaluate(spec, x, xj)? * dec.eigenfunctions[(j, n)];
    }
    Ok(acc / dec.eigenvalues[n])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MercerReport {
    pub order: usize,
    /// `max |K(x,y) − S_N(x,y)|` over the evaluation set.
    pub sup_error: f64,
    /// `∫ (K(x,x) − S_N(x,x)) dν(x)` over the nodes.
    pub remainder_trace: f64,
    pub trace_gap: f64,
    pub hs_gap: f64,
}

fn sup_errors(
    dec: &SpectralDecomposition,
    spec: &KernelSpec,
    max_order: usize,
    eval: &[Point],
) -> Result<Vec<f64>> {
    let k = kernel::cross_gram(spec, eval, eval)?;
    let phi = extended(dec, spec, max_order, eval)?;
    let mut remainder = k;
    let mut errors = Vec::with_capacity(max_order + 1);
    errors.push(remainder.amax());
    for n in 0..max_order {
        let col = phi.column(n);
        remainder -= col * col.transpose() * dec.eigenvalues[n];
        errors.push(remainder.amax());
    }
    Ok(errors)
}

/// Truncated Mercer sum `S_N(x,y) = Σ_{n<N} λ_n φ_n(x) φ_n(y)` measured on `eval`.
pub fn mercer_partial_sum(
    dec: &SpectralDecomposition,
    spec: &KernelSpec,
    order: usize,
    eval: &[Point],
) -> Result<MercerReport> {
    if order > dec.rank {
        return Err(Error::IndexOutOfRange {
            index: order,
            bound: dec.rank,
        });
    }
    let sup_error = *sup_errors(dec, spec, order, eval)?
        .last()
        .expect("order + 1 entries");
    let nodes = dec.measure.points();
    let w = dec.measure.weights();
    let mut remainder_trace = 0.0;
    for (i, x) in nodes.iter().enumerate() {
        let captured: f64 = (0..order)
            .map(|n| dec.eigenvalues[n] * dec.eigenfunctions[(i, n)].powi(2))
            .sum();
        remainder_trace += w[i] * (kernel::evaluate(spec, x, x)? - captured);
    }
    Ok(MercerReport {
        order,
        sup_error,
        remainder_trace,
        trace_gap: trace_check(dec, spec, &dec.measure)?,
        hs_gap: hs_check(dec, spec, &dec.measure)?,
    })
}

/// `sup_error` of the truncated sum for every order `0..=rank`.
pub fn mercer_sup_errors(
    dec: &SpectralDecomposition,
    spec: &KernelSpec,
    eval: &[Point],
) -> Result<Vec<f64>> {
    sup_errors(dec, spec, dec.rank, eval)
}

/// `d_N = max_x (K(x,x) − Σ_{n<N} λ_n φ_n(x)²)` for `N = 0..=rank`.
pub fn dini_remainders(
    dec: &SpectralDecomposition,
    spec: &KernelSpec,
    eval: &[Point],
) -> Result<Vec<f64>> {
    let phi = extended(dec, spec, dec.rank, eval)?;
    let mut diag = eval
        .iter()
        .map(|x| kernel::evaluate(spec, x, x))
        .collect::<Result<Vec<f64>>>()?;
    let max = |d: &[f64]| d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = Vec::with_capacity(dec.rank + 1);
    out.push(max(&diag));
    for n in 0..dec.rank {
        for (i, d) in diag.iter_mut().enumerate() {
            *d -= dec.eigenvalues[n] * phi[(i, n)] * phi[(i, n)];
        }
        out.push(max(&diag));
    }
    Ok(out)
}

/// `|Σ λ_n − ∫ K(x,x) dν| / max(1, Σ λ_n)`.
pub fn trace_check(
    dec: &SpectralDecomposition,
    spec: &KernelSpec,
    measure: &DiscreteMeasure,
) -> Result<f64> {
    dec.check_measure(measure)?;
    let spectral: f64 = dec.eigenvalues.iter().sum();
    let diag = measure
        .points()
        .iter()
        .map(|x| kernel::evaluate(spec, x, x))
        .collect::<Result<Vec<f64>>>()?;
    let direct = measure.integrate(&diag)?;
    Ok((spectral - direct).abs() / spectral.max(1.0))
}

/// `|Σ λ_n² − ∫∫ |K(x,t)|² dν dν| / max(1, Σ λ_n²)`.
pub fn hs_check(
    dec: &SpectralDecomposition,
    spec: &KernelSpec,
    measure: &DiscreteMeasure,
) -> Result<f64> {
    dec.check_measure(measure)?;
    let spectral: f64 = dec.eigenvalues.iter().map(|l| l * l).sum();
    let g = kernel::gram(spec, measure.points())?;
    let w = measure.weights();
    let mut direct = 0.0;
    for j in 0..g.len() {
        for i in 0..g.len() {
            direct += w[i] * w[j] * g.entries()[(i, j)].powi(2);
        }
    }
    Ok((spectral - direct).abs() / spectral.max(1.0))
}

/// The iterated kernel `K⁽²⁾(x,y) = ∫ K(x,t) K(t,y) dν(t)` and its checks.
#[derive(Debug, Clone)]
pub struct IteratedKernel {
    /// `K⁽²⁾` tabulated on the nodes.
    pub kernel: KernelSpec,
    /// `‖A_{K⁽²⁾} − A²‖_F / ‖A‖_F²`.
    pub square_gap: f64,
    pub psd: bool,
    /// `H_{K⁽²⁾} ⊆ H_K` with the minimal constant in `K⁽²⁾ ≤ c·K`.
    pub dominance: Inclusion,
    /// `‖L_K‖ = s_1(A)`.
    pub operator_norm: f64,
}

impl IteratedKernel {
    /// `K⁽²⁾ ≤ ‖L_K‖·K` holds up to the relative slack `rel`.
    pub fn dominance_certified(&self, rel: f64) -> bool {
        self.dominance.included
            && self
                .dominance
                .constant
                .is_some_and(|c| c <= self.operator_norm * (1.0 + rel))
    }
}

pub fn iterated_kernel(spec: &KernelSpec, measure: &DiscreteMeasure) -> Result<IteratedKernel> {
    let op = assemble(spec, measure)?;
    let g = op.gram.entries();
    let w = measure.weights();
    let gw = Matrix::from_fn(g.nrows(), g.ncols(), |i, t| g[(i, t)] * w[t]);
    let g2 = &gw * g;
    let g2 = (&g2 + g2.transpose()) * 0.5;

    let a2 = congruence(&g2, measure);
    let a_sq = &op.matrix * &op.matrix;
    let scale = op.matrix.norm().powi(2);
    let square_gap = if scale > 0.0 {
        (&a2 - a_sq).norm() / scale
    } else {
        (&a2 - a_sq).norm()
    };

    let psd = kernel::check_psd(&g2, HERMITIAN_TOL)?.psd;
    let points = measure.points().to_vec();
    let h2 = FiniteRkhs::from_gram(GramMatrix::from_parts(points.clone(), g2.clone())?)?;
    let h = FiniteRkhs::from_gram(op.gram.clone())?;
    let dominance = rkhs::aronszajn_inclusion(&h2, &h)?;
    let operator_norm = linalg::operator_norm(&op.matrix)?;
    Ok(IteratedKernel {
        kernel: KernelSpec::tabulated(points, g2)?,
        square_gap,
        psd,
        dominance,
        operator_norm,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralMembership {
    pub member: bool,
    /// `(Σ f_n² / λ_n)^{1/2}`, present for members.
    pub rkhs_norm: Option<f64>,
    /// `f_n = ⟨f, φ_n⟩_{L²}` over the retained modes.
    pub coefficients: Vec<f64>,
    /// `‖f − Σ f_n φ_n‖_{L²}`.
    pub residual: f64,
}

/// Decides `f ∈ H_K = ran(L_K^{1/2})` from the eigen-expansion of `f`.
pub fn spectral_membership(dec: &SpectralDecomposition, f: &[f64]) -> Result<SpectralMembership> {
    let mu = &dec.measure;
    let coefficients = (0..dec.rank)
        .map(|n| mu.l2_inner(f, dec.eigenfunctions.column(n).as_slice()))
        .collect::<Result<Vec<f64>>>()?;
    let projection = &dec.eigenfunctions * Vector::from_column_slice(&coefficients);
    let diff: Vec<f64> = f
        .iter()
        .zip(projection.iter())
        .map(|(a, b)| a - b)
        .collect();
    let residual = mu.l2_norm(&diff)?;
    let member = residual <= RANGE_TOL * mu.l2_norm(f)?.max(1.0);
    let rkhs_norm = member.then(|| {
        coefficients
            .iter()
            .zip(&dec.eigenvalues)
            .map(|(c, l)| c * c / l)
            .sum::<f64>()
            .sqrt()
    });
    Ok(SpectralMembership {
        member,
        rkhs_norm,
        coefficients,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConversePsd {
    pub kernel_psd: bool,
    pub operator_psd: bool,
    pub kernel_min_eigenvalue: f64,
    pub operator_min_eigenvalue: f64,
}

impl ConversePsd {
    pub fn agree(&self) -> bool {
        self.kernel_psd == self.operator_psd
    }
}

/// Runs the PSD test on both `G` and `W^{1/2} G W^{1/2}`; with positive weights they must agree.
pub fn converse_psd_check(g: &Matrix, measure: &DiscreteMeasure) -> Result<ConversePsd> {
    if g.nrows() != measure.len() {
        return Err(Error::DimensionMismatch {
            expected: measure.len(),
            found: g.nrows(),
        });
    }
    let k = kernel::check_psd(g, HERMITIAN_TOL)?;
    let a = kernel::check_psd(&congruence(g, measure), HERMITIAN_TOL)?;
    Ok(ConversePsd {
        kernel_psd: k.psd,
        operator_psd: a.psd,
        kernel_min_eigenvalue: k.min_eigenvalue,
        operator_min_eigenvalue: a.min_eigenvalue,
    })
}

/// Spectrum summary written by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumExport {
    pub eigenvalues: Vec<f64>,
    pub trace_gap: f64,
    pub hs_gap: f64,
    pub rank: usize,
}

impl SpectrumExport {
    pub fn new(dec: &SpectralDecomposition, spec: &KernelSpec) -> Result<Self> {
        Ok(SpectrumExport {
            eigenvalues: dec.eigenvalues.clone(),
            trace_gap: trace_check(dec, spec, &dec.measure)?,
            hs_gap: hs_check(dec, spec, &dec.measure)?,
            rank: dec.rank,
        })
    }
}
