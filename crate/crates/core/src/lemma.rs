//! Sample-based certifiers for the rigidity results: a pair of maps (f, g)
//! that preserves every Born value must come from one orthogonal map on ℝ³
//! (qubit case) or one Hilbert–Schmidt-unitary map on M_n(ℂ) (general case).
//!
//! The verifiers follow the constructive steps: check biorthogonality of the
//! basis images, build the linear extension from them, confirm it reproduces
//! the map on extra samples, then test orthogonality/unitarity and ĝ = f̂.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::hermitian::MinimalProjection;
use crate::matrix::{trace_inner_product, Matrix};
use crate::pauli::BlochVector;
use crate::random::{ginibre, random_unit_vector, seeded_rng};

type Vec3 = BlochVector<f64>;

/// Minimum number of extra samples the verifiers require.
pub const MIN_EXTRA_SAMPLES: usize = 100;
/// Random matrix pairs used for the Hilbert–Schmidt unitarity check.
pub const HS_PAIRS: usize = 500;
/// Gram matrices with min singular value at or below this are singular.
pub const GRAM_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma1Report {
    pub tol: f64,
    pub biorthogonality_residual: f64,
    pub linear_extension_residual: f64,
    pub orthogonality_residual: f64,
    pub g_equals_f_residual: f64,
    pub is_linear_extension: bool,
    pub is_orthogonal: bool,
    pub g_equals_f: bool,
}

impl Lemma1Report {
    pub fn all_pass(&self) -> bool {
        self.is_linear_extension && self.is_orthogonal && self.g_equals_f
    }
}

const E: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

fn apply3(cols: &[Vec3; 3], a: Vec3) -> Vec3 {
    cols[0] * a.x + cols[1] * a.y + cols[2] * a.z
}

/// Certifies that `f` (directions → directions) and `g` (directions → ℝ³)
/// with f(a)·g(s) = a·s on the samples are the same orthogonal map.
///
/// `samples` are extra unit vectors beyond the standard basis (at least 100).
/// Fails with `InputInconsistent` when the basis images are not biorthogonal.
pub fn lemma1_verify<F, G>(f: F, g: G, samples: &[Vec3], tol: f64) -> Result<Lemma1Report>
where
    F: Fn(Vec3) -> Result<Vec3>,
    G: Fn(Vec3) -> Result<Vec3>,
{
    if samples.len() < MIN_EXTRA_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "need at least {MIN_EXTRA_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let basis = E.map(Vec3::from_array);
    let fe = [f(basis[0])?, f(basis[1])?, f(basis[2])?];
    let ge = [g(basis[0])?, g(basis[1])?, g(basis[2])?];

    let mut biorth = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j { 1.0 } else { 0.0 };
            biorth = biorth.max((fe[i].dot(ge[j]) - target).abs());
        }
    }
    if !(biorth <= tol) {
        return Err(Error::InputInconsistent {
            check: "biorthogonality of basis images",
            residual: biorth,
        });
    }

    let mut linear = 0.0f64;
    for &a in samples {
        linear = linear.max(f(a)?.max_abs_diff(apply3(&fe, a)));
        linear = linear.max(g(a)?.max_abs_diff(apply3(&ge, a)));
    }

    let mut ortho = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j { 1.0 } else { 0.0 };
            ortho = ortho.max((fe[i].dot(fe[j]) - target).abs());
        }
    }

    let same = (0..3)
        .map(|i| fe[i].max_abs_diff(ge[i]))
        .fold(0.0, f64::max);

    Ok(Lemma1Report {
        tol,
        biorthogonality_residual: biorth,
        linear_extension_residual: linear,
        orthogonality_residual: ortho,
        g_equals_f_residual: same,
        is_linear_extension: linear <= tol,
        is_orthogonal: ortho <= tol,
        g_equals_f: same <= tol,
    })
}

/// Applies a row-major 3×3 matrix.
pub fn rotate(r: &[[f64; 3]; 3], v: Vec3) -> Vec3 {
    Vec3::new(
        r[0][0] * v.x + r[0][1] * v.y + r[0][2] * v.z,
        r[1][0] * v.x + r[1][1] * v.y + r[1][2] * v.z,
        r[2][0] * v.x + r[2][1] * v.y + r[2][2] * v.z,
    )
}

pub fn random_unit_samples(seed: u64, count: usize) -> Vec<Vec3> {
    let mut rng = seeded_rng(seed);
    (0..count).map(|_| random_unit_vector(&mut rng)).collect()
}

/// n² minimal projections with their Gram matrix g_ij = Tr(P_i P_j).
#[derive(Clone, Debug)]
pub struct FrameGram {
    projections: Vec<MinimalProjection<f64>>,
    gram: DMatrix<f64>,
    min_singular_value: f64,
    invertible: bool,
}

impl FrameGram {
    pub fn projections(&self) -> &[MinimalProjection<f64>] {
        &self.projections
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn min_singular_value(&self) -> f64 {
        self.min_singular_value
    }

    pub fn is_invertible(&self) -> bool {
        self.invertible
    }

    pub fn n(&self) -> usize {
        self.projections[0].dim()
    }
}

pub fn lemma2_frame_gram(basis: Vec<MinimalProjection<f64>>) -> Result<FrameGram> {
    let n = basis.first().map(|p| p.dim()).ok_or(Error::WrongLength {
        expected: 4,
        found: 0,
    })?;
    if basis.len() != n * n {
        return Err(Error::WrongLength {
            expected: n * n,
            found: basis.len(),
        });
    }
    if let Some(p) = basis.iter().find(|p| p.dim() != n) {
        return Err(Error::DimensionMismatch {
            left: n,
            right: p.dim(),
        });
    }
    let m = basis.len();
    let mut gram = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            gram[(i, j)] = basis[i].operator().trace_pairing(basis[j].operator())?;
        }
    }
    let min_singular_value = gram
        .singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(FrameGram {
        projections: basis,
        gram,
        min_singular_value,
        invertible: min_singular_value > GRAM_THRESHOLD,
    })
}

/// e_j e_j*, then for j < k the projections onto (e_j + e_k)/√2 and
/// (e_j + i e_k)/√2. For n = 2 this is {P_z⁺, P_z⁻, P_x⁺, P_y⁺}.
pub fn standard_projection_basis(n: usize) -> Vec<MinimalProjection<f64>> {
    let mut out: Vec<MinimalProjection<f64>> =
        (0..n).map(|j| MinimalProjection::basis(n, j)).collect();
    for (phase_re, phase_im) in [(1.0, 0.0), (0.0, 1.0)] {
        for j in 0..n {
            for k in (j + 1)..n {
                let mut v = vec![Complex::new(0.0, 0.0); n];
                v[j] = Complex::new(1.0, 0.0);
                v[k] = Complex::new(phase_re, phase_im);
                out.push(MinimalProjection::from_vector(&v).expect("nonzero vector"));
            }
        }
    }
    out
}

/// Linear map on M_n(ℂ) fixed by its values on a projection basis.
struct LinearExtension<'a> {
    basis: &'a [MinimalProjection<f64>],
    gram_inv: &'a DMatrix<f64>,
    images: Vec<Matrix<f64>>,
}

impl LinearExtension<'_> {
    /// A = Σ αᵢ Pᵢ with G α = (Tr(Pᵢ A))ᵢ, then Σ αᵢ image(Pᵢ).
    fn apply(&self, a: &Matrix<f64>) -> Result<Matrix<f64>> {
        let m = self.basis.len();
        let mut re = nalgebra::DVector::zeros(m);
        let mut im = nalgebra::DVector::zeros(m);
        for (i, p) in self.basis.iter().enumerate() {
            let v = p.matrix().trace_product(a)?;
            re[i] = v.re;
            im[i] = v.im;
        }
        let ar = self.gram_inv * re;
        let ai = self.gram_inv * im;
        let n = a.dim();
        let mut out = Matrix::zeros(n);
        for i in 0..m {
            out = &out + &self.images[i].scale(Complex::new(ar[i], ai[i]));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma2Report {
    pub tol: f64,
    pub pairs: usize,
    pub pairing_residual: f64,
    pub linear_extension_residual: f64,
    /// Worst of the direct ⟨f̂A, f̂B⟩ vs ⟨A, B⟩ and the diagonal checks.
    pub hs_unitarity_residual: f64,
    /// ⟨A, B⟩ recovered from the four diagonal values ‖f̂(A + iᵏB)‖².
    pub polarization_residual: f64,
    pub g_equals_f_residual: f64,
    pub is_linear_extension: bool,
    pub is_hs_unitary: bool,
    pub g_equals_f: bool,
}

impl Lemma2Report {
    pub fn all_pass(&self) -> bool {
        self.is_linear_extension && self.is_hs_unitary && self.g_equals_f
    }
}

fn hs_norm_sqr(a: &Matrix<f64>) -> f64 {
    a.entries().iter().map(|x| x.norm_sqr()).sum()
}

fn random_unit_matrix<R: Rng>(rng: &mut R, n: usize) -> Matrix<f64> {
    let g = ginibre::<f64, _>(rng, n);
    let norm = g.frobenius_norm();
    g.scale_real(1.0 / norm)
}

/// Certifies that `f` (projections → projections) and `g` (projections →
/// M_n(ℂ)) with Tr(f(P)g(Q)) = Tr(PQ) extend to the same HS-unitary map.
///
/// Refuses singular Gram matrices; fails with `InputInconsistent` when the
/// pairing Tr(f(Pᵢ)g(Pⱼ)) = g_ij does not hold on the basis.
pub fn lemma2_verify<F, G>(
    frame: &FrameGram,
    extras: &[MinimalProjection<f64>],
    f: F,
    g: G,
    seed: u64,
    tol: f64,
) -> Result<Lemma2Report>
where
    F: Fn(&Matrix<f64>) -> Matrix<f64>,
    G: Fn(&Matrix<f64>) -> Matrix<f64>,
{
    if !frame.invertible {
        return Err(Error::SingularGram {
            min_singular: frame.min_singular_value,
        });
    }
    if extras.len() < MIN_EXTRA_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "need at least {MIN_EXTRA_SAMPLES} extra projections, got {}",
            extras.len()
        )));
    }
    let n = frame.n();
    if let Some(p) = extras.iter().find(|p| p.dim() != n) {
        return Err(Error::DimensionMismatch {
            left: n,
            right: p.dim(),
        });
    }
    let basis = frame.projections();
    let f_images: Vec<Matrix<f64>> = basis.iter().map(|p| f(p.matrix())).collect();
    let g_images: Vec<Matrix<f64>> = basis.iter().map(|p| g(p.matrix())).collect();

    let mut pairing = 0.0f64;
    for (i, fi) in f_images.iter().enumerate() {
        for (j, gj) in g_images.iter().enumerate() {
            let v = fi.trace_product(gj)?;
            pairing = pairing.max((v - Complex::new(frame.gram[(i, j)], 0.0)).norm());
        }
    }
    if !(pairing <= tol) {
        return Err(Error::InputInconsistent {
            check: "trace pairing Tr(f(P_i) g(P_j)) = g_ij",
            residual: pairing,
        });
    }

    let gram_inv = frame
        .gram
        .clone()
        .try_inverse()
        .ok_or(Error::SingularGram {
            min_singular: frame.min_singular_value,
        })?;
    let f_hat = LinearExtension {
        basis,
        gram_inv: &gram_inv,
        images: f_images,
    };
    let g_hat = LinearExtension {
        basis,
        gram_inv: &gram_inv,
        images: g_images,
    };

    let mut linear = 0.0f64;
    for q in extras {
        linear = linear.max(f(q.matrix()).max_abs_diff(&f_hat.apply(q.matrix())?));
        linear = linear.max(g(q.matrix()).max_abs_diff(&g_hat.apply(q.matrix())?));
    }

    let mut rng = seeded_rng(seed);
    let i = Complex::new(0.0, 1.0);
    let phases = [Complex::new(1.0, 0.0), i, Complex::new(-1.0, 0.0), -i];
    let mut unitary = 0.0f64;
    let mut polar = 0.0f64;
    for _ in 0..HS_PAIRS {
        let a = random_unit_matrix(&mut rng, n);
        let b = random_unit_matrix(&mut rng, n);
        let fa = f_hat.apply(&a)?;
        let fb = f_hat.apply(&b)?;
        let direct = trace_inner_product(&a, &b)?;
        unitary = unitary.max((trace_inner_product(&fa, &fb)? - direct).norm());
        // ⟨A, B⟩ = ¼ Σₖ conj(iᵏ) ‖A + iᵏB‖²
        let mut recovered = Complex::new(0.0, 0.0);
        for &ph in &phases {
            let x = &a + &b.scale(ph);
            let fx = &fa + &fb.scale(ph);
            let (lhs, rhs) = (hs_norm_sqr(&x), hs_norm_sqr(&fx));
            unitary = unitary.max((lhs - rhs).abs());
            recovered += ph.conj() * rhs;
        }
        polar = polar.max((recovered * 0.25 - direct).norm());
    }

    let mut same = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            let mut unit = Matrix::zeros(n);
            unit[(r, c)] = Complex::new(1.0, 0.0);
            same = same.max(f_hat.apply(&unit)?.max_abs_diff(&g_hat.apply(&unit)?));
        }
    }

    Ok(Lemma2Report {
        tol,
        pairs: HS_PAIRS,
        pairing_residual: pairing,
        linear_extension_residual: linear,
        hs_unitarity_residual: unitary,
        polarization_residual: polar,
        g_equals_f_residual: same,
        is_linear_extension: linear <= tol,
        is_hs_unitary: unitary <= tol && polar <= tol,
        g_equals_f: same <= tol,
    })
}

/// P ↦ U P U*.
pub fn conjugation(u: &Matrix<f64>) -> impl Fn(&Matrix<f64>) -> Matrix<f64> + '_ {
    move |p| &(u * p) * &u.adjoint()
}
