//! # mercerkit
//!
//! Reproducing kernel Hilbert spaces at finite scale.
//!
//! The crate evaluates positive semidefinite kernels, builds the RKHS of a
//! kernel restricted to a finite point set, and discretises the integral
//! operator `L_K` on a weighted point set so that its spectrum, Mercer
//! expansion and trace/Hilbert–Schmidt identities can be checked numerically.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`kernel`] | kernel specs, Gram matrices, Hermitian/PSD/Schwarz checks |
//! | [`linalg`] | Jacobi eigensolver and SVD, PSD square root, factorisation lemmas, Schatten norms |
//! | [`rkhs`] | finite RKHS: inner products, feature maps, membership, inclusion |
//! | [`measure`] | weighted point sets and `L²` pairings |
//! | [`mercer`] | Nyström operator, spectrum, Mercer sums, trace/HS/iterated-kernel identities |
//! | [`bases`] | closed-form bases for the Weyl and Gaussian kernels |
//!
//! ```
//! use mercerkit::{kernel::Point, mercer, measure::DiscreteMeasure, KernelSpec};
//!
//! let spec: KernelSpec = "gauss:sigma=1".parse().unwrap();
//! let lo = Point::scalar(-1.0).unwrap();
//! let hi = Point::scalar(1.0).unwrap();
//! let mu = DiscreteMeasure::uniform_grid(&lo, &hi, &[64], 1.0).unwrap();
//! let dec = mercer::spectrum(&mercer::assemble(&spec, &mu).unwrap()).unwrap();
//! assert!(mercer::trace_check(&dec, &spec, &mu).unwrap() <= 1e-10);
//! ```

pub mod bases;
pub mod error;
pub mod io;
pub mod kernel;
pub mod linalg;
pub mod measure;
pub mod mercer;
pub mod rkhs;

pub use error::{Error, Result};
pub use kernel::{GramMatrix, KernelSpec, Point};
pub use measure::DiscreteMeasure;
