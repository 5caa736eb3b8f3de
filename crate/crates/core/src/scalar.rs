//! Real scalar abstraction shared by the operator algebra.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type the operator algebra is generic over (`f32` or `f64`).
///
/// Each implementation carries its own tolerance scale: the defaults used by
/// constructors and predicates have to sit a few orders of magnitude above
/// the type's rounding noise.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Tolerance applied when a constructor checks a structural invariant
    /// (Hermiticity, Pauli reassembly).
    fn construction_tol() -> Self;

    /// Default tolerance for predicates (`is_psd`, idempotence, unit length).
    fn predicate_tol() -> Self;

    /// Eigenvalues closer than this are merged into one eigenprojection.
    fn cluster_tol() -> Self;

    /// Converts an `f64` literal. Panics only if the value is not representable,
    /// which cannot happen for the finite constants used in this crate.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn construction_tol() -> Self {
        1e-12
    }

    fn predicate_tol() -> Self {
        1e-10
    }

    fn cluster_tol() -> Self {
        1e-8
    }
}

impl Real for f32 {
    fn construction_tol() -> Self {
        1e-5
    }

    fn predicate_tol() -> Self {
        1e-4
    }

    fn cluster_tol() -> Self {
        1e-3
    }
}
