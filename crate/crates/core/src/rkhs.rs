//! The reproducing kernel Hilbert space of a kernel restricted to a finite point set.
//!
//! On a finite set every function is a coefficient list, so the span of the
//! kernel sections `K_x` is the range of the Gram matrix `G`. An element
//! `f = Σ c_j K_{x_j}` has values `G·c`, and `⟨f, g⟩ = c_gᵀ G c_f`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{self, GramMatrix, KernelSpec, Point};
use crate::linalg::{
    self, EigenDecomposition, Matrix, Vector, GRAM_TOL, HERMITIAN_TOL, RANGE_TOL, RANK_CUTOFF,
};

/// `H_K` over a finite point list, with the spectral data of its Gram matrix.
#[derive(Debug, Clone)]
pub struct FiniteRkhs {
    gram: GramMatrix,
    spectral: EigenDecomposition,
    rank: usize,
}

impl FiniteRkhs {
    pub fn build(spec: &KernelSpec, points: &[Point]) -> Result<Self> {
        FiniteRkhs::from_gram(kernel::gram(spec, points)?)
    }

    /// Fails unless the Gram matrix is symmetric and positive semidefinite.
    pub fn from_gram(gram: GramMatrix) -> Result<Self> {
        let report = kernel::check_psd(gram.entries(), HERMITIAN_TOL)?;
        if !report.psd {
            return Err(Error::NotPsd {
                min_eigenvalue: report.min_eigenvalue,
            });
        }
        let spectral = linalg::eigh(gram.entries())?;
        let rank = spectral.rank(RANK_CUTOFF);
        Ok(FiniteRkhs {
            gram,
            spectral,
            rank,
        })
    }

    pub fn points(&self) -> &[Point] {
        self.gram.points()
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    pub fn spectral(&self) -> &EigenDecomposition {
        &self.spectral
    }

    /// Dimension of `H_K`, i.e. the numerical rank of the Gram matrix.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.gram.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gram.is_empty()
    }

    /// `Σ c_j K_{x_j}`.
    pub fn element(&self, coefficients: Vec<f64>) -> Result<RkhsElement<'_>> {
        if coefficients.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: coefficients.len(),
            });
        }
        let coefficients = Vector::from_vec(coefficients);
        let values = self.gram.entries() * &coefficients;
        Ok(RkhsElement {
            host: self,
            coefficients,
            values,
        })
    }

    /// The kernel section `K_{x_i} = K(·, x_i)`.
    pub fn section(&self, index: usize) -> Result<RkhsElement<'_>> {
        if index >= self.len() {
            return Err(Error::IndexOutOfRange {
                index,
                bound: self.len(),
            });
        }
        let mut c = vec![0.0; self.len()];
        c[index] = 1.0;
        self.element(c)
    }

    pub fn zero(&self) -> RkhsElement<'_> {
        self.element(vec![0.0; self.len()])
            .expect("length matches host")
    }

    fn range_basis(&self) -> nalgebra::DMatrixView<'_, f64> {
        self.spectral.eigenvectors.columns(0, self.rank)
    }
}

/// An element of a [`FiniteRkhs`], stored by its coefficients and its values.
#[derive(Debug, Clone)]
pub struct RkhsElement<'h> {
    host: &'h FiniteRkhs,
    coefficients: Vector,
    values: Vector,
}

impl<'h> RkhsElement<'h> {
    pub fn host(&self) -> &'h FiniteRkhs {
        self.host
    }

    pub fn coefficients(&self) -> &[f64] {
        self.coefficients.as_slice()
    }

    pub fn values(&self) -> &[f64] {
        self.values.as_slice()
    }
}

/// `⟨f, g⟩_K = Σ_i Σ_j f_i g_j K(x_j, x_i)`.
pub fn inner(f: &RkhsElement<'_>, g: &RkhsElement<'_>) -> Result<f64> {
    if !std::ptr::eq(f.host, g.host) {
        return Err(Error::HostMismatch);
    }
    Ok(g.coefficients
        .dot(&(f.host.gram.entries() * &f.coefficients)))
}

/// `⟨f, K_{x_i}⟩`, which equals `f(x_i)`.
pub fn reproduce(f: &RkhsElement<'_>, index: usize) -> Result<f64> {
    let section = f.host.section(index)?;
    inner(f, &section)
}

/// A feature map `Φ` (one column per point) with `ΦᵀΦ = G`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    matrix: Matrix,
}

impl FeatureMap {
    pub fn new(matrix: Matrix) -> Self {
        FeatureMap { matrix }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn gram(&self) -> Matrix {
        self.matrix.transpose() * &self.matrix
    }
}

/// Spectral factor `Φ = Λ_r^{1/2} V_rᵀ` over the nonzero eigenpairs of `G`.
pub fn minimal_linearisation(h: &FiniteRkhs) -> FeatureMap {
    let mut rows = h.range_basis().transpose();
    for (k, mut row) in rows.row_iter_mut().enumerate() {
        row *= h.spectral.eigenvalues[k].sqrt();
    }
    FeatureMap { matrix: rows }
}

/// The map `U` with `U·Φ1 = Φ2`, isometric on the range of `Φ1`.
pub fn connect_linearisations(phi1: &FeatureMap, phi2: &FeatureMap) -> Result<Matrix> {
    if phi1.matrix.ncols() != phi2.matrix.ncols() {
        return Err(Error::DimensionMismatch {
            expected: phi1.matrix.ncols(),
            found: phi2.matrix.ncols(),
        });
    }
    let g1 = phi1.gram();
    let gap = (&g1 - phi2.gram()).norm();
    if gap > GRAM_TOL * g1.norm().max(1.0) {
        return Err(Error::GramMismatch { gap });
    }
    Ok(&phi2.matrix * linalg::pinv(&phi1.matrix)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// `‖φ‖_K`, present for members.
    pub norm: Option<f64>,
    /// Smallest `c` with `K_φ ≤ c·K`; equals `‖φ‖²_K`.
    pub certificate: Option<f64>,
    /// `‖(I − P_{range G}) φ‖`.
    pub residual: f64,
}

/// Decides whether the sampled function `φ` lies in `H_K`.
pub fn membership(h: &FiniteRkhs, phi: &[f64]) -> Result<Membership> {
    if phi.len() != h.len() {
        return Err(Error::DimensionMismatch {
            expected: h.len(),
            found: phi.len(),
        });
    }
    let phi = Vector::from_column_slice(phi);
    let basis = h.range_basis();
    let coords = basis.transpose() * &phi;
    let residual = (&phi - basis * &coords).norm();
    let member = residual <= RANGE_TOL * phi.norm().max(1.0);
    let norm_sq = member.then(|| {
        coords
            .iter()
            .enumerate()
            .map(|(k, a)| a * a / h.spectral.eigenvalues[k])
            .sum::<f64>()
    });
    Ok(Membership {
        member,
        norm: norm_sq.map(f64::sqrt),
        certificate: norm_sq,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Inclusion {
    pub included: bool,
    /// Smallest `c` with `K ≤ c·L`, present when included.
    pub constant: Option<f64>,
    /// Largest projection residual of a column of `G_K` off `range(G_L)`.
    pub residual: f64,
}

/// Tests `H_K ⊆ H_L` over a shared point list and returns the minimal constant.
///
/// The range test is column-wise membership of `G_K` in `H_L`; the constant
/// is the top eigenvalue of `G_K` whitened by `G_L^{+1/2}` on `range(G_L)`.
pub fn aronszajn_inclusion(hk: &FiniteRkhs, hl: &FiniteRkhs) -> Result<Inclusion> {
    if hk.points() != hl.points() {
        return Err(Error::PointListMismatch);
    }
    let gk = hk.gram.entries();
    let mut included = true;
    let mut residual = 0.0_f64;
    for j in 0..hk.len() {
        let col: Vec<f64> = gk.column(j).iter().copied().collect();
        let m = membership(hl, &col)?;
        included &= m.member;
        residual = residual.max(m.residual);
    }
    if !included {
        return Ok(Inclusion {
            included,
            constant: None,
            residual,
        });
    }
    let r = hl.rank;
    if r == 0 {
        return Ok(Inclusion {
            included,
            constant: Some(0.0),
            residual,
        });
    }
    let mut whitener = hl.range_basis().into_owned();
    for (k, mut col) in whitener.column_iter_mut().enumerate() {
        col /= hl.spectral.eigenvalues[k].sqrt();
    }
    let whitened = whitener.transpose() * gk * &whitener;
    let whitened = (&whitened + whitened.transpose()) * 0.5;
    let top = linalg::eigh(&whitened)?.max_eigenvalue();
    Ok(Inclusion {
        included,
        constant: Some(top.max(0.0)),
        residual,
    })
}

/// `K(x_i, x_j) = Σ_l e_l(x_i) e_l(x_j)` from basis samples (rows = basis functions).
pub fn recover_from_onb(points: &[Point], basis_values: &Matrix) -> Result<GramMatrix> {
    if basis_values.ncols() != points.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            found: basis_values.ncols(),
        });
    }
    GramMatrix::from_parts(points.to_vec(), basis_values.transpose() * basis_values)
}
