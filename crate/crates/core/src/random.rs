//! Seeded generators for unitaries, densities and minimal projections.
//!
//! Every generator is a pure function of its seed. Streams come from
//! `ChaCha8Rng::seed_from_u64`; independent sub-streams are derived with
//! [`sub_seed`].

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::hermitian::{Hermitian, MinimalProjection};
use crate::matrix::Matrix;
use crate::pauli::BlochVector;
use crate::scalar::Real;

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// splitmix64 finalizer applied to `seed + index * golden gamma`.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::UnsupportedDimension {
            dim: n,
            reason: "random generators need n >= 2",
        });
    }
    Ok(())
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re = gaussian(rng);
    let im = gaussian(rng);
    Complex::new(T::lit(re), T::lit(im))
}

/// Ginibre matrix: i.i.d. standard complex Gaussian entries.
pub fn ginibre<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix<T> {
    Matrix::from_fn(n, |_, _| complex_gaussian(rng))
}

/// Q factor of a QR decomposition by modified Gram–Schmidt (two passes).
/// Every R diagonal entry comes out real and positive, so no further phase
/// correction is needed and Q is Haar distributed when `m` is Ginibre.
pub fn qr_unitary<T: Real>(m: &Matrix<T>) -> Matrix<T> {
    let n = m.dim();
    let mut cols: Vec<Vec<Complex<T>>> = (0..n)
        .map(|j| (0..n).map(|i| m[(i, j)]).collect())
        .collect();
    for j in 0..n {
        for _pass in 0..2 {
            for k in 0..j {
                let proj = (0..n).fold(Complex::new(T::zero(), T::zero()), |acc, i| {
                    acc + cols[k][i].conj() * cols[j][i]
                });
                for i in 0..n {
                    let v = cols[k][i] * proj;
                    cols[j][i] -= v;
                }
            }
        }
        let norm = cols[j].iter().map(|x| x.norm_sqr()).sum::<T>().sqrt();
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    Matrix::from_fn(n, |i, j| cols[j][i])
}

pub fn random_unitary_with<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Matrix<T>> {
    check_dim(n)?;
    Ok(qr_unitary(&ginibre(rng, n)))
}

pub fn random_unitary<T: Real>(seed: u64, n: usize) -> Result<Matrix<T>> {
    random_unitary_with(&mut seeded_rng(seed), n)
}

/// G G* / Tr(G G*) for a Ginibre G (Hilbert–Schmidt measure).
pub fn random_density_with<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
) -> Result<Hermitian<T>> {
    check_dim(n)?;
    let g = ginibre::<T, _>(rng, n);
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    Ok(Hermitian::symmetrized(&w.scale_real(T::one() / tr)))
}

pub fn random_density<T: Real>(seed: u64, n: usize) -> Result<Hermitian<T>> {
    random_density_with(&mut seeded_rng(seed), n)
}

/// |v⟩⟨v| for a normalized complex Gaussian vector v.
pub fn random_minimal_projection_with<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
) -> Result<MinimalProjection<T>> {
    check_dim(n)?;
    let v: Vec<Complex<T>> = (0..n).map(|_| complex_gaussian(rng)).collect();
    MinimalProjection::from_vector(&v)
}

pub fn random_minimal_projection<T: Real>(seed: u64, n: usize) -> Result<MinimalProjection<T>> {
    random_minimal_projection_with(&mut seeded_rng(seed), n)
}

/// (G + G*)/2 for a Ginibre G.
pub fn random_hermitian_with<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
) -> Result<Hermitian<T>> {
    check_dim(n)?;
    Ok(Hermitian::symmetrized(&ginibre(rng, n)))
}

pub fn random_hermitian<T: Real>(seed: u64, n: usize) -> Result<Hermitian<T>> {
    random_hermitian_with(&mut seeded_rng(seed), n)
}

/// Uniform point on S².
pub fn random_unit_vector<T: Real, R: Rng + ?Sized>(rng: &mut R) -> BlochVector<T> {
    loop {
        let v = BlochVector::new(gaussian(rng), gaussian(rng), gaussian(rng));
        let n = v.norm();
        if n > 1e-12 {
            let u = v * (1.0 / n);
            return BlochVector::new(T::lit(u.x), T::lit(u.y), T::lit(u.z));
        }
    }
}

/// Haar-random rotation in SO(3) from a uniformly random unit quaternion,
/// returned row-major.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> [[f64; 3]; 3] {
    let mut q = [gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng)];
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    q.iter_mut().for_each(|x| *x /= n);
    let [w, x, y, z] = q;
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ]
}
