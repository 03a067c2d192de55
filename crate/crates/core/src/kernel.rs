//! Kernel definitions, Gram assembly and pointwise structural checks.

mod parse;

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

pub use parse::ParseContext;

/// A point of ℝⁿ with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidPoint(
                "a point needs at least one coordinate".into(),
            ));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint(format!("non-finite coordinate {bad}")));
        }
        Ok(Point(coords))
    }

    /// Shorthand for one-dimensional points.
    pub fn scalar(x: f64) -> Result<Self> {
        Point::new(vec![x])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn distance_squared(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

/// Position of `x` in `points`, by exact coordinate equality.
pub(crate) fn index_of(points: &[Point], x: &Point) -> Result<usize> {
    points
        .iter()
        .position(|p| p == x)
        .ok_or_else(|| Error::UnknownPoint(x.coords().to_vec()))
}

fn same_dim(x: &Point, y: &Point) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(())
}

/// A scalar function on points, either sampled on a point list or given as a rule.
#[derive(Clone)]
pub enum PointFn {
    Values {
        points: Vec<Point>,
        values: Vec<f64>,
    },
    Rule(Arc<dyn Fn(&Point) -> f64 + Send + Sync>),
}

impl PointFn {
    pub fn values(points: Vec<Point>, values: Vec<f64>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                found: values.len(),
            });
        }
        Ok(PointFn::Values { points, values })
    }

    pub fn rule(f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        PointFn::Rule(Arc::new(f))
    }

    pub fn eval(&self, x: &Point) -> Result<f64> {
        match self {
            PointFn::Values { points, values } => Ok(values[index_of(points, x)?]),
            PointFn::Rule(f) => Ok(f(x)),
        }
    }

    fn sample(&self, points: &[Point]) -> Result<Vec<f64>> {
        points.iter().map(|p| self.eval(p)).collect()
    }
}

impl fmt::Debug for PointFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointFn::Values { values, .. } => write!(f, "Values({} samples)", values.len()),
            PointFn::Rule(_) => f.write_str("Rule(..)"),
        }
    }
}

/// A kernel matrix on an explicit point list. Points are addressed by index.
#[derive(Debug, Clone)]
pub struct Table {
    points: Vec<Point>,
    matrix: Matrix,
}

impl Table {
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

/// Declarative kernel description.
#[derive(Debug, Clone)]
pub enum KernelSpec {
    /// `⟨x, y⟩^d`; degree zero is the constant kernel 1.
    Weyl {
        degree: u32,
    },
    /// `exp(−‖x − y‖² / σ²)`.
    Gaussian {
        sigma: f64,
    },
    /// 1 on the diagonal, 0 elsewhere.
    Identity,
    Tabulated(Arc<Table>),
    /// `φ(x) φ(y)`.
    RankOne(PointFn),
    /// `f(x) K(x, y) f(y)`.
    Conjugated {
        inner: Box<KernelSpec>,
        f: PointFn,
    },
    Sum(Box<KernelSpec>, Box<KernelSpec>),
    Scaled {
        factor: f64,
        inner: Box<KernelSpec>,
    },
}

impl KernelSpec {
    pub fn weyl(degree: u32) -> Self {
        KernelSpec::Weyl { degree }
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidKernel(format!(
                "bandwidth must be positive, got {sigma}"
            )));
        }
        Ok(KernelSpec::Gaussian { sigma })
    }

    /// Tabulated kernel; the matrix must be square, sized to `points` and symmetric.
    pub fn tabulated(points: Vec<Point>, matrix: Matrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() != points.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        let asymmetry = linalg::max_asymmetry(&matrix);
        if !check_hermitian(
            &matrix,
            linalg::HERMITIAN_TOL * linalg::inf_norm(&matrix).max(1.0),
        ) {
            return Err(Error::NotHermitian { asymmetry });
        }
        Ok(KernelSpec::Tabulated(Arc::new(Table { points, matrix })))
    }

    pub fn rank_one(phi: PointFn) -> Self {
        KernelSpec::RankOne(phi)
    }

    pub fn conjugated(self, f: PointFn) -> Self {
        KernelSpec::Conjugated {
            inner: Box::new(self),
            f,
        }
    }

    pub fn sum(self, other: KernelSpec) -> Self {
        KernelSpec::Sum(Box::new(self), Box::new(other))
    }

    pub fn scaled(self, factor: f64) -> Result<Self> {
        if !(factor >= 0.0 && factor.is_finite()) {
            return Err(Error::InvalidKernel(format!(
                "scale factor must be nonnegative, got {factor}"
            )));
        }
        Ok(KernelSpec::Scaled {
            factor,
            inner: Box::new(self),
        })
    }

    /// Parses the compact grammar (`gauss:sigma=1.5`, `weyl:d=3`, `scale:0.5(identity)`, ...).
    pub fn parse_with(input: &str, ctx: &ParseContext<'_>) -> Result<Self> {
        parse::parse(input, ctx)
    }

    /// Checks a spec string without opening any files it names.
    pub fn check_syntax(input: &str) -> Result<()> {
        parse::check_syntax(input)
    }

    pub fn evaluate(&self, x: &Point, y: &Point) -> Result<f64> {
        evaluate(self, x, y)
    }
}

impl std::str::FromStr for KernelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse::parse(s, &ParseContext::default())
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Weyl { degree } => write!(f, "weyl:d={degree}"),
            KernelSpec::Gaussian { sigma } => write!(f, "gauss:sigma={sigma}"),
            KernelSpec::Identity => f.write_str("identity"),
            KernelSpec::Tabulated(t) => write!(f, "tab:m={}", t.points.len()),
            KernelSpec::RankOne(_) => f.write_str("rank1"),
            KernelSpec::Conjugated { inner, .. } => write!(f, "conj({inner})"),
            KernelSpec::Sum(a, b) => write!(f, "sum({a},{b})"),
            KernelSpec::Scaled { factor, inner } => write!(f, "scale:{factor}({inner})"),
        }
    }
}

/// `K(x, y)`.
pub fn evaluate(spec: &KernelSpec, x: &Point, y: &Point) -> Result<f64> {
    match spec {
        KernelSpec::Weyl { degree } => {
            same_dim(x, y)?;
            Ok(x.dot(y).powi(*degree as i32))
        }
        KernelSpec::Gaussian { sigma } => {
            same_dim(x, y)?;
            Ok((-x.distance_squared(y) / (sigma * sigma)).exp())
        }
        KernelSpec::Identity => {
            same_dim(x, y)?;
            Ok(if x == y { 1.0 } else { 0.0 })
        }
        KernelSpec::Tabulated(t) => {
            let i = index_of(&t.points, x)?;
            let j = index_of(&t.points, y)?;
            Ok(t.matrix[(i, j)])
        }
        KernelSpec::RankOne(phi) => Ok(phi.eval(x)? * phi.eval(y)?),
        KernelSpec::Conjugated { inner, f } => {
            Ok(f.eval(x)? * evaluate(inner, x, y)? * f.eval(y)?)
        }
        KernelSpec::Sum(a, b) => Ok(evaluate(a, x, y)? + evaluate(b, x, y)?),
        KernelSpec::Scaled { factor, inner } => Ok(factor * evaluate(inner, x, y)?),
    }
}

/// Gram matrix `G[i][j] = K(x_i, x_j)` over a point list.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    points: Vec<Point>,
    entries: Matrix,
}

impl GramMatrix {
    pub fn from_parts(points: Vec<Point>, entries: Matrix) -> Result<Self> {
        if entries.nrows() != points.len() || entries.ncols() != points.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                found: entries.nrows(),
            });
        }
        Ok(GramMatrix { points, entries })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_entries(self) -> Matrix {
        self.entries
    }
}

pub(crate) fn validate_points(points: &[Point]) -> Result<()> {
    let Some(first) = points.first() else {
        return Err(Error::InvalidPoint("point list is empty".into()));
    };
    for p in points {
        same_dim(first, p)?;
    }
    Ok(())
}

pub fn gram(spec: &KernelSpec, points: &[Point]) -> Result<GramMatrix> {
    validate_points(points)?;
    let entries = gram_entries(spec, points)?;
    Ok(GramMatrix {
        points: points.to_vec(),
        entries,
    })
}

fn gram_entries(spec: &KernelSpec, points: &[Point]) -> Result<Matrix> {
    let m = points.len();
    match spec {
        KernelSpec::Tabulated(t) => {
            let idx: Vec<usize> = if t.points.as_slice() == points {
                (0..m).collect()
            } else {
                points
                    .iter()
                    .map(|p| index_of(&t.points, p))
                    .collect::<Result<_>>()?
            };
            Ok(Matrix::from_fn(m, m, |i, j| t.matrix[(idx[i], idx[j])]))
        }
        KernelSpec::RankOne(phi) => {
            let v = phi.sample(points)?;
            Ok(Matrix::from_fn(m, m, |i, j| v[i] * v[j]))
        }
        KernelSpec::Conjugated { inner, f } => {
            let d = f.sample(points)?;
            let g = gram_entries(inner, points)?;
            Ok(Matrix::from_fn(m, m, |i, j| d[i] * g[(i, j)] * d[j]))
        }
        KernelSpec::Sum(a, b) => Ok(gram_entries(a, points)? + gram_entries(b, points)?),
        KernelSpec::Scaled { factor, inner } => Ok(gram_entries(inner, points)? * *factor),
        KernelSpec::Weyl { .. } | KernelSpec::Gaussian { .. } | KernelSpec::Identity => {
            let rows: Vec<Vec<f64>> = points
                .par_iter()
                .map(|x| {
                    points
                        .iter()
                        .map(|y| evaluate(spec, x, y))
                        .collect::<Result<_>>()
                })
                .collect::<Result<_>>()?;
            Ok(Matrix::from_fn(m, m, |i, j| rows[i][j]))
        }
    }
}

/// `[K(x_i, y_j)]` for two point lists.
pub fn cross_gram(spec: &KernelSpec, xs: &[Point], ys: &[Point]) -> Result<Matrix> {
    let rows: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|x| {
            ys.iter()
                .map(|y| evaluate(spec, x, y))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    Ok(Matrix::from_fn(xs.len(), ys.len(), |i, j| rows[i][j]))
}

/// True iff `max |G[i][j] − G[j][i]| ≤ tol`.
pub fn check_hermitian(g: &Matrix, tol: f64) -> bool {
    g.nrows() == g.ncols() && linalg::max_asymmetry(g) <= tol
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsdReport {
    pub psd: bool,
    pub min_eigenvalue: f64,
}

/// Eigenvalue test `λ_min(G) ≥ −tol·max(1, ‖G‖_∞)`. Non-symmetric input is rejected.
pub fn check_psd(g: &Matrix, tol: f64) -> Result<PsdReport> {
    let dec = linalg::eigh(g)?;
    let min_eigenvalue = if dec.dim() == 0 {
        0.0
    } else {
        dec.min_eigenvalue()
    };
    Ok(PsdReport {
        psd: min_eigenvalue >= -tol * linalg::inf_norm(g).max(1.0),
        min_eigenvalue,
    })
}

/// `|K(x,y)|² ≤ K(x,x)·K(y,y) + tol·max(1, K(x,x)·K(y,y))`.
pub fn check_schwarz(spec: &KernelSpec, x: &Point, y: &Point, tol: f64) -> Result<bool> {
    let kxy = evaluate(spec, x, y)?;
    let bound = evaluate(spec, x, x)? * evaluate(spec, y, y)?;
    Ok(kxy * kxy <= bound + tol * bound.abs().max(1.0))
}
