//! Numerical laboratory for noncommutative representations of classical
//! conditional probabilities.
//!
//! The operator algebra ([`matrix`], [`hermitian`], [`eigen`], [`pauli`],
//! [`random`]) and the two-outcome qubit analysis ([`bloch`]) are generic over
//! the real scalar type ([`Real`], implemented for `f32` and `f64`). The
//! aliases below pin the double precision instantiation that the rest of the
//! crate and the command line tool use.
//!
//! * [`bloch`]: three yes-no measurements on ℂ², state solving and the
//!   non-density region.
//! * [`tomo`]: k projective measurements with n outcomes, reconstruction and
//!   dual-cone witnesses.
//! * [`belt`] and [`lemma`]: the belt map for a single fixed state and the
//!   certifiers showing that preserving all inner products forces an
//!   orthogonal (unitary) map.

// `!(x <= tol)` rejects NaN along with out-of-tolerance values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod belt;
pub mod bloch;
pub mod eigen;
pub mod error;
pub mod hermitian;
pub mod io;
pub mod lemma;
pub mod matrix;
pub mod pauli;
pub mod random;
pub mod report;
pub mod scalar;
pub mod selftest;
pub mod tomo;

pub use error::{Error, Result};
pub use hermitian::{is_density, is_psd};
pub use matrix::trace_inner_product;
pub use pauli::{pauli_compose, pauli_decompose, projection_from_bloch, Outcome};
pub use scalar::Real;

pub type C64 = num_complex::Complex<f64>;

pub type ComplexMatrix = matrix::Matrix<f64>;
pub type HermitianOperator = hermitian::Hermitian<f64>;
pub type MinimalProjection = hermitian::MinimalProjection<f64>;
pub type BlochVector = pauli::BlochVector<f64>;
pub type PauliDecomposition = pauli::PauliDecomposition<f64>;
pub type ThreeMeasurementSetup = bloch::ThreeMeasurementSetup<f64>;
pub type ConditionalProbTriple = bloch::ConditionalProbTriple<f64>;
pub type RegionScanResult = bloch::RegionScanResult<f64>;

pub type ComplexMatrix32 = matrix::Matrix<f32>;
pub type HermitianOperator32 = hermitian::Hermitian<f32>;
pub type BlochVector32 = pauli::BlochVector<f32>;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
