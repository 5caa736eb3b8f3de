//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use num_complex::Complex;
use num_traits::Zero;

use crate::hermitian::Hermitian;
use crate::matrix::Matrix;
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues (ascending) and the unitary whose columns are eigenvectors.
#[derive(Clone, Debug)]
pub struct Eigen<T> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

impl<T: Real> Eigen<T> {
    pub fn vector(&self, k: usize) -> Vec<Complex<T>> {
        (0..self.vectors.dim())
            .map(|i| self.vectors[(i, k)])
            .collect()
    }
}

/// One term λ·Π of a spectral decomposition; Π may have rank > 1.
#[derive(Clone, Debug)]
pub struct SpectralTerm<T> {
    pub eigenvalue: T,
    pub projection: Hermitian<T>,
    pub multiplicity: usize,
}

pub fn jacobi_eigh<T: Real>(h: &Hermitian<T>) -> Eigen<T> {
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut v = Matrix::<T>::identity(n);
    let scale = a.frobenius_norm().max(T::min_positive_value());
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<T>()
            .sqrt();
        if off <= eps * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q, eps * scale);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .partial_cmp(&a[(j, j)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = Matrix::from_fn(n, |i, k| v[(i, order[k])]);
    Eigen { values, vectors }
}

/// Annihilates a[p][q] with the unitary G = diag(1, e^{-iα}) · [[c, s], [-s, c]]
/// acting on coordinates (p, q), where a[p][q] = |a_pq| e^{iα}.
fn rotate<T: Real>(a: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize, threshold: T) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag <= threshold * T::lit(1e-3) {
        return;
    }
    let phase = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (T::lit(2.0) * mag);
    let t = if theta >= T::zero() {
        T::one() / (theta + (T::one() + theta * theta).sqrt())
    } else {
        -T::one() / (-theta + (T::one() + theta * theta).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    let e = phase.conj();
    let g_pp = Complex::new(c, T::zero());
    let g_pq = Complex::new(s, T::zero());
    let g_qp = e * (-s);
    let g_qq = e * c;

    let n = a.dim();
    // A ← A G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    // A ← G* A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
    // V ← V G
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Ascending eigenvalues with orthogonal eigenprojections. Eigenvalues within
/// `T::cluster_tol()` of their neighbour are merged into one projection whose
/// eigenvalue is the cluster mean.
pub fn eigen_hermitian<T: Real>(h: &Hermitian<T>) -> Vec<SpectralTerm<T>> {
    let eig = jacobi_eigh(h);
    let n = h.dim();
    let tol = T::cluster_tol();
    let mut terms: Vec<SpectralTerm<T>> = Vec::new();
    let mut k = 0;
    while k < n {
        let mut end = k + 1;
        while end < n && eig.values[end] - eig.values[end - 1] <= tol {
            end += 1;
        }
        let mut proj = Matrix::zeros(n);
        let mut sum = T::zero();
        for idx in k..end {
            proj = &proj + &Matrix::outer(&eig.vector(idx));
            sum += eig.values[idx];
        }
        let mult = end - k;
        terms.push(SpectralTerm {
            eigenvalue: sum / T::from_usize(mult).unwrap(),
            projection: Hermitian::symmetrized(&proj),
            multiplicity: mult,
        });
        k = end;
    }
    terms
}

/// Σ λᵢ Πᵢ.
pub fn reassemble<T: Real>(dim: usize, terms: &[SpectralTerm<T>]) -> Matrix<T> {
    terms.iter().fold(Matrix::zeros(dim), |acc, t| {
        &acc + &t.projection.matrix().scale_real(t.eigenvalue)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    fn is_unitary(u: &Matrix<f64>, tol: f64) -> bool {
        (&(&u.adjoint() * u) - &Matrix::identity(u.dim())).max_abs() <= tol
    }

    fn h(rows: &[&[(f64, f64)]]) -> Hermitian<f64> {
        Hermitian::new(Matrix::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn diagonal_projection() {
        let terms = eigen_hermitian(&Hermitian::<f64>::from_real_diagonal(&[1.0, 0.0]));
        assert_eq!(terms.len(), 2);
        assert!(terms[0].eigenvalue.abs() < 1e-15);
        assert!(
            terms[0]
                .projection
                .matrix()
                .max_abs_diff(&Matrix::from_real_diagonal(&[0.0, 1.0]))
                < 1e-12
        );
        assert!((terms[1].eigenvalue - 1.0).abs() < 1e-15);
        assert!(
            terms[1]
                .projection
                .matrix()
                .max_abs_diff(&Matrix::from_real_diagonal(&[1.0, 0.0]))
                < 1e-12
        );
    }

    #[test]
    fn x_projection_spectrum() {
        // ½(𝟙 + σ_x): eigenvalues 0 and 1 with projections ½(𝟙 ∓ σ_x).
        let a = h(&[&[(0.5, 0.0), (0.5, 0.0)], &[(0.5, 0.0), (0.5, 0.0)]]);
        let terms = eigen_hermitian(&a);
        let minus =
            Matrix::from_rows(&[&[(0.5, 0.0), (-0.5, 0.0)], &[(-0.5, 0.0), (0.5, 0.0)]]).unwrap();
        assert!(terms[0].eigenvalue.abs() < 1e-14);
        assert!(terms[0].projection.matrix().max_abs_diff(&minus) < 1e-12);
        assert!((terms[1].eigenvalue - 1.0).abs() < 1e-14);
        assert!(terms[1].projection.matrix().max_abs_diff(a.matrix()) < 1e-12);
    }

    #[test]
    fn maximally_mixed_has_single_cluster() {
        let terms = eigen_hermitian(&Hermitian::<f64>::maximally_mixed(4));
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].multiplicity, 4);
        assert!((terms[0].eigenvalue - 0.25).abs() < 1e-15);
        assert!(
            terms[0]
                .projection
                .matrix()
                .max_abs_diff(&Matrix::identity(4))
                < 1e-12
        );
    }

    #[test]
    fn complex_offdiagonal_is_diagonalized() {
        // σ_y has eigenvalues ±1.
        let y = h(&[&[(0.0, 0.0), (0.0, -1.0)], &[(0.0, 1.0), (0.0, 0.0)]]);
        let eig = jacobi_eigh(&y);
        assert!((eig.values[0] + 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 1.0).abs() < 1e-14);
        let recon = reassemble(2, &eigen_hermitian(&y));
        assert!(recon.max_abs_diff(y.matrix()) < 1e-13);
    }

    #[test]
    fn eigenvectors_are_unitary() {
        let a = h(&[
            &[(2.0, 0.0), (1.0, -1.0), (0.0, 0.5)],
            &[(1.0, 1.0), (-1.0, 0.0), (0.3, 0.0)],
            &[(0.0, -0.5), (0.3, 0.0), (0.7, 0.0)],
        ]);
        let eig = jacobi_eigh(&a);
        assert!(is_unitary(&eig.vectors, 1e-12));
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn single_precision_reconstruction() {
        let a = Hermitian::<f32>::new(
            Matrix::from_rows(&[&[(1.0, 0.0), (0.5, 0.25)], &[(0.5, -0.25), (-0.5, 0.0)]]).unwrap(),
        )
        .unwrap();
        let recon = reassemble(2, &eigen_hermitian(&a));
        assert!(recon.max_abs_diff(a.matrix()) < 1e-5);
    }
}
