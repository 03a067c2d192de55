//! Dense symmetric matrix numerics.
//!
//! Everything here works on real `DMatrix<f64>` storage. The symmetric
//! eigensolver is a cyclic Jacobi method and singular values come from a
//! one-sided (Hestenes) Jacobi iteration, so small singular values keep full
//! relative accuracy instead of being squared through `AᵀA`.
//!
//! A single relative rank cutoff, [`RANK_CUTOFF`], decides which singular
//! values or eigenvalues count as nonzero for pseudo-inverses, square roots,
//! range projections and the factorisation lemmas.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Values `s_n ≤ RANK_CUTOFF · s_1` are treated as numerically zero.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Relative tolerance for Hermitian and positive-semidefinite checks.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Relative projection residual under which a vector counts as lying in a range.
pub const RANGE_TOL: f64 = 1e-8;

/// Relative tolerance for `TT* = SS*` in [`isometric_factor`].
pub const GRAM_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 100;
const JACOBI_OFF_TOL: f64 = 1e-14;

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vector,
    /// Orthonormal eigenvectors stored as columns, aligned with `eigenvalues`.
    pub eigenvectors: Matrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(0.0_f64, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Number of eigenvalues strictly above `rel · λ_max`.
    pub fn rank(&self, rel: f64) -> usize {
        let threshold = rel * self.max_eigenvalue();
        self.eigenvalues.iter().filter(|&&l| l > threshold).count()
    }

    /// `‖A v_k − λ_k v_k‖₂` maximised over k.
    pub fn max_residual(&self, a: &Matrix) -> f64 {
        (0..self.dim())
            .map(|k| {
                let v = self.eigenvectors.column(k);
                (a * v - v * self.eigenvalues[k]).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `V diag(f(λ)) Vᵀ`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let mut scaled = self.eigenvectors.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= f(self.eigenvalues[k]);
        }
        scaled * self.eigenvectors.transpose()
    }
}

/// Singular triples `A = Σ s_n u_n v_nᵀ`, singular values descending.
///
/// Columns of `u` belonging to zero singular values are left as zero vectors.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub singular_values: Vector,
    pub v: Matrix,
}

impl Svd {
    pub fn rank(&self) -> usize {
        let s1 = self.singular_values.get(0).copied().unwrap_or(0.0);
        self.singular_values
            .iter()
            .filter(|&&s| s > RANK_CUTOFF * s1)
            .count()
    }

    /// Rebuilds the matrix from its Schmidt expansion.
    pub fn reconstruct(&self) -> Matrix {
        let mut us = self.u.clone();
        for (k, mut col) in us.column_iter_mut().enumerate() {
            col *= self.singular_values[k];
        }
        us * self.v.transpose()
    }

    /// Orthogonal projector onto the numerical column range.
    pub fn range_projector(&self) -> Matrix {
        let r = self.rank();
        let ur = self.u.columns(0, r);
        ur * ur.transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SchattenNorms {
    pub trace_norm: f64,
    pub hs_norm: f64,
    pub operator_norm: f64,
}

/// Induced ∞-norm (largest absolute row sum).
pub fn inf_norm(a: &Matrix) -> f64 {
    a.row_iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `max |a_ij − a_ji|`.
pub fn max_asymmetry(a: &Matrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for j in 0..n {
        for i in (j + 1)..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

fn require_square(a: &Matrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    Ok(())
}

fn require_symmetric(a: &Matrix) -> Result<()> {
    require_square(a)?;
    let asym = max_asymmetry(a);
    if asym > HERMITIAN_TOL * inf_norm(a).max(1.0) || asym.is_nan() {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    Ok(())
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                acc += a[(i, j)] * a[(i, j)];
            }
        }
    }
    acc.sqrt()
}

/// Rotation `(c, s, t)` that annihilates the off-diagonal entry of
/// `[[app, apq], [apq, aqq]]`.
fn jacobi_rotation(app: f64, aqq: f64, apq: f64) -> (f64, f64, f64) {
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
    let c = 1.0 / t.hypot(1.0);
    (c, t * c, t)
}

fn rotate_columns(m: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..m.nrows() {
        let mp = m[(k, p)];
        let mq = m[(k, q)];
        m[(k, p)] = c * mp - s * mq;
        m[(k, q)] = s * mp + c * mq;
    }
}

fn rotate_rows(m: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..m.ncols() {
        let mp = m[(p, k)];
        let mq = m[(q, k)];
        m[(p, k)] = c * mp - s * mq;
        m[(q, k)] = s * mp + c * mq;
    }
}

/// Descending order, ties kept in original index order.
fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    order
}

/// Symmetric eigendecomposition by cyclic Jacobi sweeps.
///
/// The input must be symmetric within [`HERMITIAN_TOL`]; it is symmetrised
/// before iterating. Sweeps stop once the off-diagonal Frobenius mass drops
/// below `1e-14·‖A‖_F`.
pub fn eigh(a: &Matrix) -> Result<EigenDecomposition> {
    require_symmetric(a)?;
    let n = a.nrows();
    let mut work = (a + a.transpose()) * 0.5;
    let mut vecs = Matrix::identity(n, n);
    let target = JACOBI_OFF_TOL * work.norm();

    let mut off = off_diagonal_norm(&work);
    let mut sweeps = 0;
    while off > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off });
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = work[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = work[(p, p)];
                let aqq = work[(q, q)];
                let (c, s, t) = jacobi_rotation(app, aqq, apq);
                rotate_columns(&mut work, p, q, c, s);
                rotate_rows(&mut work, p, q, c, s);
                work[(p, q)] = 0.0;
                work[(q, p)] = 0.0;
                work[(p, p)] = app - t * apq;
                work[(q, q)] = aqq + t * apq;
                rotate_columns(&mut vecs, p, q, c, s);
            }
        }
        sweeps += 1;
        off = off_diagonal_norm(&work);
    }

    let diag: Vec<f64> = (0..n).map(|i| work[(i, i)]).collect();
    let order = descending_order(&diag);
    let eigenvalues = Vector::from_iterator(n, order.iter().map(|&i| diag[i]));
    let eigenvectors = Matrix::from_fn(n, n, |r, c| vecs[(r, order[c])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Thin singular value decomposition by one-sided Jacobi rotations.
pub fn svd(a: &Matrix) -> Result<Svd> {
    if a.nrows() < a.ncols() {
        let t = svd(&a.transpose())?;
        return Ok(Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        });
    }
    let n = a.ncols();
    let mut work = a.clone();
    let mut v = Matrix::identity(n, n);
    // Columns below this squared norm are rounding noise and are left alone.
    let floor = (f64::EPSILON * a.norm()).powi(2);

    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let alpha = work.column(p).norm_squared();
                let beta = work.column(q).norm_squared();
                let gamma = work.column(p).dot(&work.column(q));
                if alpha <= floor
                    || beta <= floor
                    || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt()
                {
                    continue;
                }
                rotated = true;
                let (c, s, _) = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut work, p, q, c, s);
                rotate_columns(&mut v, p, q, c, s);
            }
        }
        sweeps += 1;
        if !rotated {
            break;
        }
        if sweeps == MAX_SWEEPS {
            let off = off_diagonal_norm(&(work.transpose() * &work));
            return Err(Error::NoConvergence { sweeps, off });
        }
    }

    let norms: Vec<f64> = work.column_iter().map(|c| c.norm()).collect();
    let order = descending_order(&norms);
    let singular_values = Vector::from_iterator(n, order.iter().map(|&i| norms[i]));
    let u = Matrix::from_fn(a.nrows(), n, |r, c| {
        let s = norms[order[c]];
        if s > 0.0 {
            work[(r, order[c])] / s
        } else {
            0.0
        }
    });
    let v = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Svd {
        u,
        singular_values,
        v,
    })
}

/// Moore–Penrose pseudo-inverse with the shared rank cutoff.
pub fn pinv(a: &Matrix) -> Result<Matrix> {
    let dec = svd(a)?;
    let r = dec.rank();
    let mut vr = dec.v.columns(0, r).into_owned();
    for (k, mut col) in vr.column_iter_mut().enumerate() {
        col /= dec.singular_values[k];
    }
    Ok(vr * dec.u.columns(0, r).transpose())
}

/// Positive semidefinite square root.
///
/// Eigenvalues at or below `RANK_CUTOFF·λ_max` are set to zero; a negative
/// eigenvalue beyond `HERMITIAN_TOL·max(1, ‖A‖_∞)` is an error.
pub fn psd_sqrt(a: &Matrix) -> Result<Matrix> {
    let dec = eigh(a)?;
    let floor = -HERMITIAN_TOL * inf_norm(a).max(1.0);
    let min = dec.min_eigenvalue();
    if min < floor {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    let cutoff = RANK_CUTOFF * dec.max_eigenvalue();
    Ok(dec.reconstruct_with(|l| if l > cutoff { l.sqrt() } else { 0.0 }))
}

/// Result of [`douglas_factor`].
#[derive(Debug, Clone)]
pub struct DouglasFactor {
    /// `F` with `T = S·F` and `range(F) ⟂ ker(S)`.
    pub factor: Matrix,
    /// `‖S·F − T‖_F`.
    pub residual: f64,
    /// `‖F‖²`, the smallest α with `TT* ≤ α·SS*`.
    pub alpha: f64,
}

/// Solves `T = S·F` when `range(T) ⊆ range(S)`.
pub fn douglas_factor(t: &Matrix, s: &Matrix) -> Result<DouglasFactor> {
    if t.nrows() != s.nrows() {
        return Err(Error::DimensionMismatch {
            expected: s.nrows(),
            found: t.nrows(),
        });
    }
    let dec = svd(s)?;
    let projected = dec.range_projector() * t;
    let outside = (t - projected).norm();
    if outside > RANGE_TOL * t.norm().max(1.0) {
        return Err(Error::RangeNotIncluded { residual: outside });
    }
    let factor = pinv(s)? * t;
    let residual = (s * &factor - t).norm();
    let alpha = operator_norm(&factor)?.powi(2);
    Ok(DouglasFactor {
        factor,
        residual,
        alpha,
    })
}

/// Partial isometry `V` with `T = S·V`, given `TT* = SS*`.
///
/// `V = S⁺T`; its initial space is the row support of `T` and its final space
/// the row support of `S`.
pub fn isometric_factor(t: &Matrix, s: &Matrix) -> Result<Matrix> {
    if t.nrows() != s.nrows() {
        return Err(Error::DimensionMismatch {
            expected: s.nrows(),
            found: t.nrows(),
        });
    }
    let tt = t * t.transpose();
    let ss = s * s.transpose();
    let gap = (&tt - &ss).norm();
    if gap > GRAM_TOL * ss.norm().max(1.0) {
        return Err(Error::GramMismatch { gap });
    }
    Ok(pinv(s)? * t)
}

pub fn operator_norm(a: &Matrix) -> Result<f64> {
    if a.is_empty() {
        return Ok(0.0);
    }
    Ok(svd(a)?.singular_values[0])
}

/// Trace, Hilbert–Schmidt and operator norms from the singular values.
pub fn schatten_norms(a: &Matrix) -> Result<SchattenNorms> {
    if a.is_empty() {
        return Ok(SchattenNorms {
            trace_norm: 0.0,
            hs_norm: 0.0,
            operator_norm: 0.0,
        });
    }
    let s = svd(a)?.singular_values;
    Ok(SchattenNorms {
        trace_norm: s.sum(),
        hs_norm: s.norm(),
        operator_norm: s[0],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
    }

    fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
        let b = random(n, n, rng);
        &b + b.transpose()
    }

    #[test]
    fn eigh_diagonal() {
        let a = Matrix::from_diagonal(&Vector::from_vec(vec![3.0, 1.0, 2.0]));
        let dec = eigh(&a).unwrap();
        assert_eq!(dec.eigenvalues.as_slice(), &[3.0, 2.0, 1.0]);
    }

    #[test]
    fn eigh_swap() {
        let a = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let dec = eigh(&a).unwrap();
        assert_relative_eq!(dec.eigenvalues[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(dec.eigenvalues[1], -1.0, epsilon = 1e-15);
    }

    #[test]
    fn eigh_rejects_asymmetric() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(eigh(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eigh_random_residual_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_symmetric(32, &mut rng);
        let dec = eigh(&a).unwrap();
        let scale = a.norm();
        assert!(dec.max_residual(&a) <= 1e-10 * scale);
        let gram = dec.eigenvectors.transpose() * &dec.eigenvectors;
        assert!((gram - Matrix::identity(32, 32)).amax() <= 1e-12);
        for k in 1..32 {
            assert!(dec.eigenvalues[k - 1] >= dec.eigenvalues[k]);
        }
    }

    #[test]
    fn eigh_matches_reference_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_symmetric(20, &mut rng);
        let ours = eigh(&a).unwrap().eigenvalues;
        let mut reference: Vec<f64> = a
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        reference.sort_by(|x, y| y.total_cmp(x));
        for (x, y) in ours.iter().zip(&reference) {
            assert_relative_eq!(*x, *y, epsilon = 1e-12);
        }
    }

    #[test]
    fn eigh_degenerate_subspace_is_orthonormal() {
        let a = Matrix::from_diagonal(&Vector::from_vec(vec![2.0, 2.0, 2.0, 5.0]));
        let dec = eigh(&a).unwrap();
        assert_eq!(dec.eigenvalues.as_slice(), &[5.0, 2.0, 2.0, 2.0]);
        // Ties keep original index order.
        assert_eq!(dec.eigenvectors[(3, 0)], 1.0);
        assert_eq!(dec.eigenvectors[(0, 1)], 1.0);
        assert_eq!(dec.eigenvectors[(1, 2)], 1.0);
    }

    #[test]
    fn svd_matches_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (r, c) in [(6, 4), (4, 6), (5, 5)] {
            let a = random(r, c, &mut rng);
            let ours = svd(&a).unwrap();
            let mut reference: Vec<f64> = a
                .clone()
                .svd(false, false)
                .singular_values
                .iter()
                .copied()
                .collect();
            reference.sort_by(|x, y| y.total_cmp(x));
            for (x, y) in ours.singular_values.iter().zip(&reference) {
                assert_relative_eq!(*x, *y, epsilon = 1e-12);
            }
            assert!((ours.reconstruct() - &a).norm() <= 1e-12);
        }
    }

    #[test]
    fn psd_sqrt_examples() {
        let a = Matrix::from_diagonal(&Vector::from_vec(vec![4.0, 9.0]));
        let s = psd_sqrt(&a).unwrap();
        assert_relative_eq!(
            s,
            Matrix::from_diagonal(&Vector::from_vec(vec![2.0, 3.0])),
            epsilon = 1e-15
        );
        let id = Matrix::identity(3, 3);
        assert_relative_eq!(psd_sqrt(&id).unwrap(), id, epsilon = 1e-15);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = random(10, 10, &mut rng);
        let g = b.transpose() * &b;
        let s = psd_sqrt(&g).unwrap();
        assert!((&s * &s - &g).norm() <= 1e-9 * g.norm().max(1.0));
        assert!(eigh(&s).unwrap().min_eigenvalue() >= -1e-12);
    }

    #[test]
    fn psd_sqrt_rejects_indefinite() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(psd_sqrt(&a), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn psd_sqrt_is_idempotent_on_projections() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let b = random(6, 2, &mut rng);
        let p = svd(&b).unwrap().range_projector();
        assert!((psd_sqrt(&p).unwrap() - &p).amax() <= 1e-12);
    }

    #[test]
    fn psd_sqrt_monotone_on_diagonals() {
        let small = Matrix::from_diagonal(&Vector::from_vec(vec![1.0, 0.25, 3.0]));
        let big = Matrix::from_diagonal(&Vector::from_vec(vec![2.0, 0.25, 7.0]));
        let diff = psd_sqrt(&big).unwrap() - psd_sqrt(&small).unwrap();
        assert!(eigh(&diff).unwrap().min_eigenvalue() >= -1e-15);
    }

    #[test]
    fn douglas_identity_and_failure() {
        let t = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let f = douglas_factor(&t, &Matrix::identity(2, 2)).unwrap();
        assert_relative_eq!(f.factor, t, epsilon = 1e-14);

        let s = Matrix::from_diagonal(&Vector::from_vec(vec![1.0, 0.0]));
        let t = Matrix::from_diagonal(&Vector::from_vec(vec![0.0, 1.0]));
        assert!(matches!(
            douglas_factor(&t, &s),
            Err(Error::RangeNotIncluded { .. })
        ));
    }

    #[test]
    fn douglas_planted_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let s = random(6, 3, &mut rng) * random(3, 6, &mut rng);
        let t = &s * random(6, 4, &mut rng);
        let f = douglas_factor(&t, &s).unwrap();
        assert!(f.residual <= 1e-9);
        // Columns of F avoid ker(S).
        let dec = svd(&s).unwrap();
        let kernel = dec.v.columns(dec.rank(), 6 - dec.rank()).into_owned();
        assert!((kernel.transpose() * &f.factor).amax() <= 1e-9);
        // TT* ≤ α SS*
        let gap = &s * s.transpose() * f.alpha - &t * t.transpose();
        assert!(eigh(&gap).unwrap().min_eigenvalue() >= -1e-9 * gap.norm());
    }

    #[test]
    fn isometric_factor_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        // T = S gives the projection onto the row support of S.
        let s = random(4, 2, &mut rng) * random(2, 5, &mut rng);
        let v = isometric_factor(&s, &s).unwrap();
        let dec = svd(&s).unwrap();
        let vr = dec.v.columns(0, dec.rank());
        assert!((&v - vr * vr.transpose()).amax() <= 1e-10);

        // S = I, T orthogonal gives V = T.
        let q = svd(&random(3, 3, &mut rng)).unwrap().u;
        let v = isometric_factor(&q, &Matrix::identity(3, 3)).unwrap();
        assert!((&v - &q).amax() <= 1e-12);

        let err = isometric_factor(&Matrix::identity(2, 2), &(Matrix::identity(2, 2) * 2.0));
        assert!(matches!(err, Err(Error::GramMismatch { .. })));
    }

    #[test]
    fn isometric_factor_from_square_root() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for rank in [5, 3] {
            let t = random(5, rank, &mut rng) * random(rank, 5, &mut rng);
            let s = psd_sqrt(&(&t * t.transpose())).unwrap();
            let v = isometric_factor(&t, &s).unwrap();
            assert!((&s * &v - &t).norm() <= 1e-9);
            for p in [v.transpose() * &v, &v * v.transpose()] {
                assert!((&p * &p - &p).amax() <= 1e-9);
                assert!(max_asymmetry(&p) <= 1e-9);
            }
        }
    }

    #[test]
    fn schatten_examples() {
        let a = Matrix::from_diagonal(&Vector::from_vec(vec![3.0, 4.0]));
        let n = schatten_norms(&a).unwrap();
        assert_relative_eq!(n.trace_norm, 7.0, epsilon = 1e-14);
        assert_relative_eq!(n.hs_norm, 5.0, epsilon = 1e-14);
        assert_relative_eq!(n.operator_norm, 4.0, epsilon = 1e-14);
        let z = schatten_norms(&Matrix::zeros(3, 3)).unwrap();
        assert_eq!((z.trace_norm, z.hs_norm, z.operator_norm), (0.0, 0.0, 0.0));
    }

    #[test]
    fn hs_norm_is_frobenius() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let a = random(7, 9, &mut rng);
        let entrywise = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let n = schatten_norms(&a).unwrap();
        assert!((n.hs_norm - entrywise).abs() <= 1e-10);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn matrix_strategy() -> impl Strategy<Value = Matrix> {
            (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
                proptest::collection::vec(-10.0f64..10.0, r * c)
                    .prop_map(move |v| Matrix::from_vec(r, c, v))
            })
        }

        proptest! {
            #[test]
            fn norm_chain(a in matrix_strategy()) {
                let n = schatten_norms(&a).unwrap();
                let slack = 1e-12 * n.trace_norm.max(1.0);
                prop_assert!(n.operator_norm <= n.hs_norm + slack);
                prop_assert!(n.hs_norm <= n.trace_norm + slack);
            }

            #[test]
            fn schmidt_reconstruction(a in matrix_strategy()) {
                let dec = svd(&a).unwrap();
                prop_assert!((dec.reconstruct() - &a).amax() <= 1e-9);
            }
        }
    }
}
