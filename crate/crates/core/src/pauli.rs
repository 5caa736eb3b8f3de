//! Bloch vectors and the Pauli decomposition of 2×2 operators.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{Hermitian, MinimalProjection};
use crate::matrix::Matrix;
use crate::scalar::Real;

/// A real 3-vector in Bloch coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct BlochVector<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> BlochVector<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Self {
        self * (T::one() / self.norm())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn max_abs_diff(self, o: Self) -> T {
        (self.x - o.x)
            .abs()
            .max((self.y - o.y).abs())
            .max((self.z - o.z).abs())
    }

    /// s·σ = s_x σ_x + s_y σ_y + s_z σ_z.
    pub fn sigma_dot(self) -> Matrix<T> {
        let z = T::zero();
        Matrix::new(
            2,
            vec![
                Complex::new(self.z, z),
                Complex::new(self.x, -self.y),
                Complex::new(self.x, self.y),
                Complex::new(-self.z, z),
            ],
        )
        .expect("2x2")
    }

    /// ½(𝟙 + s·σ).
    pub fn state_operator(self) -> Hermitian<T> {
        let half = T::lit(0.5);
        let m = &Matrix::identity(2).scale_real(half) + &self.sigma_dot().scale_real(half);
        Hermitian::symmetrized(&m)
    }
}

impl<T: Real> Add for BlochVector<T> {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for BlochVector<T> {
    type Output = Self;

    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Mul<T> for BlochVector<T> {
    type Output = Self;

    fn mul(self, c: T) -> Self {
        Self::new(self.x * c, self.y * c, self.z * c)
    }
}

impl<T: Real> Neg for BlochVector<T> {
    type Output = Self;

    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// M = s0·𝟙 + s·σ + i(s0p·𝟙 + sp·σ); any 2×2 complex matrix has exactly one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliDecomposition<T> {
    pub s0: T,
    pub s: BlochVector<T>,
    pub s0p: T,
    pub sp: BlochVector<T>,
}

pub fn pauli_compose<T: Real>(d: &PauliDecomposition<T>) -> Matrix<T> {
    let i = Complex::new(T::zero(), T::one());
    let id = Matrix::identity(2);
    let real = &id.scale_real(d.s0) + &d.s.sigma_dot();
    let imag = &id.scale_real(d.s0p) + &d.sp.sigma_dot();
    &real + &imag.scale(i)
}

pub fn pauli_decompose<T: Real>(m: &Matrix<T>) -> Result<PauliDecomposition<T>> {
    if m.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            dim: m.dim(),
            reason: "Pauli decomposition needs dimension 2",
        });
    }
    let half = T::lit(0.5);
    // Tr(σ_k M)/2 for each basis element.
    let c0 = (m[(0, 0)] + m[(1, 1)]) * half;
    let cx = (m[(0, 1)] + m[(1, 0)]) * half;
    let cy = (m[(0, 1)] - m[(1, 0)]) * Complex::new(T::zero(), half);
    let cz = (m[(0, 0)] - m[(1, 1)]) * half;
    Ok(PauliDecomposition {
        s0: c0.re,
        s: BlochVector::new(cx.re, cy.re, cz.re),
        s0p: c0.im,
        sp: BlochVector::new(cx.im, cy.im, cz.im),
    })
}

/// Which eigenvalue of a·σ a two-outcome projection picks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn sign<T: Real>(self) -> T {
        match self {
            Outcome::Plus => T::one(),
            Outcome::Minus => -T::one(),
        }
    }
}

/// P± = ½(𝟙 ± a·σ) for a unit vector a.
pub fn projection_from_bloch<T: Real>(
    a: BlochVector<T>,
    outcome: Outcome,
) -> Result<MinimalProjection<T>> {
    let norm = a.norm();
    if !((norm - T::one()).abs() <= T::predicate_tol()) {
        return Err(Error::NotUnit {
            norm: norm.as_f64(),
        });
    }
    let state = (a * outcome.sign::<T>()).state_operator();
    MinimalProjection::new(state)
}

impl<T: Real> Default for PauliDecomposition<T> {
    fn default() -> Self {
        Self {
            s0: T::zero(),
            s: BlochVector::zero(),
            s0p: T::zero(),
            sp: BlochVector::zero(),
        }
    }
}

impl<T: Real> PauliDecomposition<T> {
    pub fn is_real(&self, tol: T) -> bool {
        self.s0p.abs() <= tol && self.sp.norm() <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_identity() {
        let d = PauliDecomposition {
            s0: 0.5,
            ..Default::default()
        };
        assert!(pauli_compose(&d).max_abs_diff(&Matrix::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn decompose_z_projection() {
        let m = Matrix::<f64>::from_real_diagonal(&[1.0, 0.0]);
        let d = pauli_decompose(&m).unwrap();
        assert_eq!(d.s0, 0.5);
        assert_eq!(d.s, BlochVector::new(0.0, 0.0, 0.5));
        assert!(d.is_real(0.0));
    }

    #[test]
    fn decompose_sigma_y() {
        let sy = BlochVector::<f64>::new(0.0, 1.0, 0.0).sigma_dot();
        let d = pauli_decompose(&sy).unwrap();
        assert_eq!(d.s0, 0.0);
        assert_eq!(d.s, BlochVector::new(0.0, 1.0, 0.0));
        assert_eq!(d.s0p, 0.0);
        assert_eq!(d.sp, BlochVector::zero());
    }

    #[test]
    fn decompose_rejects_other_dims() {
        assert!(pauli_decompose(&Matrix::<f64>::identity(3)).is_err());
    }

    #[test]
    fn bloch_projections() {
        let z = BlochVector::<f64>::new(0.0, 0.0, 1.0);
        let x = BlochVector::<f64>::new(1.0, 0.0, 0.0);
        let pz = projection_from_bloch(z, Outcome::Plus).unwrap();
        let mz = projection_from_bloch(z, Outcome::Minus).unwrap();
        let px = projection_from_bloch(x, Outcome::Plus).unwrap();
        assert!(
            pz.matrix()
                .max_abs_diff(&Matrix::from_real_diagonal(&[1.0, 0.0]))
                < 1e-15
        );
        assert!(
            mz.matrix()
                .max_abs_diff(&Matrix::from_real_diagonal(&[0.0, 1.0]))
                < 1e-15
        );
        let half =
            Matrix::from_rows(&[&[(0.5, 0.0), (0.5, 0.0)], &[(0.5, 0.0), (0.5, 0.0)]]).unwrap();
        assert!(px.matrix().max_abs_diff(&half) < 1e-15);
        let sum = pz.matrix() + mz.matrix();
        assert!(sum.max_abs_diff(&Matrix::identity(2)) < 1e-15);
    }

    #[test]
    fn projection_rejects_non_unit() {
        let err = projection_from_bloch(BlochVector::<f64>::new(0.0, 0.0, 1.1), Outcome::Plus)
            .unwrap_err();
        assert!(matches!(err, Error::NotUnit { .. }));
    }

    #[test]
    fn cross_product_is_right_handed() {
        let x = BlochVector::<f64>::new(1.0, 0.0, 0.0);
        let y = BlochVector::<f64>::new(0.0, 1.0, 0.0);
        assert_eq!(x.cross(y), BlochVector::new(0.0, 0.0, 1.0));
    }
}
