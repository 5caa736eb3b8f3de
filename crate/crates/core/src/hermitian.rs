//! Hermitian operators and minimal (rank-1) projections.

use num_complex::Complex;
use num_traits::Zero;

use crate::eigen::{eigen_hermitian, jacobi_eigh, SpectralTerm};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;

/// A matrix whose Hermitian defect was at most the construction tolerance.
///
/// The stored matrix is the exact Hermitian part `(A + A*)/2` of the input.
#[derive(Clone, Debug, PartialEq)]
pub struct Hermitian<T> {
    matrix: Matrix<T>,
}

impl<T: Real> Hermitian<T> {
    pub fn new(matrix: Matrix<T>) -> Result<Self> {
        Self::with_tolerance(matrix, T::construction_tol())
    }

    pub fn with_tolerance(matrix: Matrix<T>, tol: T) -> Result<Self> {
        let defect = matrix.hermitian_defect();
        if !(defect <= tol) {
            return Err(Error::NotHermitian {
                defect: defect.as_f64(),
            });
        }
        Ok(Self::symmetrized(&matrix))
    }

    /// Hermitian part of an arbitrary matrix.
    pub fn symmetrized(matrix: &Matrix<T>) -> Self {
        let half = T::lit(0.5);
        let n = matrix.dim();
        let m = Matrix::from_fn(n, |i, j| {
            if i == j {
                Complex::new(matrix[(i, i)].re, T::zero())
            } else {
                (matrix[(i, j)] + matrix[(j, i)].conj()) * half
            }
        });
        Self { matrix: m }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: Matrix::identity(dim),
        }
    }

    /// 𝟙/n.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: Matrix::identity(dim).scale_real(T::one() / T::from_usize(dim).unwrap()),
        }
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        Self {
            matrix: Matrix::from_real_diagonal(diag),
        }
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    /// Real linear combination Σ cᵢ Hᵢ.
    pub fn linear_combination<'a>(
        dim: usize,
        terms: impl IntoIterator<Item = (T, &'a Hermitian<T>)>,
    ) -> Self
    where
        T: 'a,
    {
        let mut acc = Matrix::zeros(dim);
        for (c, h) in terms {
            acc = &acc + &h.matrix.scale_real(c);
        }
        Self { matrix: acc }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix - &other.matrix,
        }
    }

    pub fn scale(&self, c: T) -> Self {
        Self {
            matrix: self.matrix.scale_real(c),
        }
    }

    /// Tr(AB), real for Hermitian arguments.
    pub fn trace_pairing(&self, other: &Self) -> Result<T> {
        Ok(self.matrix.trace_product(&other.matrix)?.re)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<T> {
        jacobi_eigh(self).values
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues().first().copied().unwrap_or_else(T::zero)
    }

    pub fn spectral_decomposition(&self) -> Vec<SpectralTerm<T>> {
        eigen_hermitian(self)
    }
}

/// True iff the smallest eigenvalue is ≥ −tol.
pub fn is_psd<T: Real>(a: &Hermitian<T>, tol: T) -> bool {
    a.min_eigenvalue() >= -tol
}

/// Positive semidefinite with unit trace.
pub fn is_density<T: Real>(a: &Hermitian<T>, tol: T) -> bool {
    (a.trace() - T::one()).abs() <= tol && is_psd(a, tol)
}

/// Rank-1 Hermitian idempotent.
#[derive(Clone, Debug, PartialEq)]
pub struct MinimalProjection<T> {
    operator: Hermitian<T>,
    vector: Option<Vec<Complex<T>>>,
}

impl<T: Real> MinimalProjection<T> {
    pub fn new(operator: Hermitian<T>) -> Result<Self> {
        Self::with_tolerance(operator, T::predicate_tol())
    }

    pub fn with_tolerance(operator: Hermitian<T>, tol: T) -> Result<Self> {
        let m = operator.matrix();
        let idem = (&(m * m) - m).max_abs();
        if !(idem <= tol) {
            return Err(Error::NotMinimalProjection {
                reason: "not idempotent",
                residual: idem.as_f64(),
            });
        }
        let tr = (operator.trace() - T::one()).abs();
        if !(tr <= tol) {
            return Err(Error::NotMinimalProjection {
                reason: "trace is not 1",
                residual: tr.as_f64(),
            });
        }
        Ok(Self {
            operator,
            vector: None,
        })
    }

    /// |v⟩⟨v| / ⟨v|v⟩.
    pub fn from_vector(v: &[Complex<T>]) -> Result<Self> {
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt();
        if v.is_empty() || !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::NotMinimalProjection {
                reason: "zero or non-finite vector",
                residual: norm.as_f64(),
            });
        }
        let unit: Vec<Complex<T>> = v.iter().map(|x| *x / norm).collect();
        let operator = Hermitian::symmetrized(&Matrix::outer(&unit));
        Ok(Self {
            operator,
            vector: Some(unit),
        })
    }

    /// Projection onto the k-th standard basis vector.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = vec![Complex::zero(); dim];
        v[k] = Complex::new(T::one(), T::zero());
        Self::from_vector(&v).expect("standard basis vector")
    }

    pub fn operator(&self) -> &Hermitian<T> {
        &self.operator
    }

    pub fn matrix(&self) -> &Matrix<T> {
        self.operator.matrix()
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    /// Generating unit vector, when the projection was built from one.
    pub fn vector(&self) -> Option<&[Complex<T>]> {
        self.vector.as_deref()
    }
}
