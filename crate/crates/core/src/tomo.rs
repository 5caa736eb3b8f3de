//! k projective measurements with n outcomes.
//!
//! A [`MeasurementFrame`] holds k complete sets of n orthogonal minimal
//! projections. Its projections span a subspace of the n²-dimensional real
//! space of Hermitian operators of dimension at most k(n−1)+1, so n+1
//! generic measurements fix a state operator uniquely. Born-consistent
//! operators need not be positive: anything in the dual of the cone spanned
//! by the frame yields valid probability tables, and [`find_nonpsd_witness`]
//! searches that gap.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{is_psd, Hermitian, MinimalProjection};
use crate::matrix::Matrix;
use crate::pauli::{projection_from_bloch, BlochVector, Outcome};
use crate::random::{gaussian, random_unitary, seeded_rng, sub_seed};

/// Orthogonality and completeness tolerance for measurements in a frame.
pub const FRAME_TOL: f64 = 1e-10;
/// Gram singular values at or below this count as zero.
pub const RANK_THRESHOLD: f64 = 1e-8;
/// Reconstruction residuals above this mean the table is not Born-generated.
pub const INCONSISTENCY_THRESHOLD: f64 = 1e-6;
/// Witness acceptance: min eigenvalue must be below −this.
pub const WITNESS_MARGIN: f64 = 1e-8;
/// Fraction of the distance to the first active constraint used by a ray.
pub const RAY_STEP: f64 = 0.999;
pub const FRAME_RETRIES: usize = 100;

/// Numeric thresholds used by the analyses in this module.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub psd: f64,
    pub rank: f64,
    pub inconsistency: f64,
    pub witness: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            psd: 1e-10,
            rank: RANK_THRESHOLD,
            inconsistency: INCONSISTENCY_THRESHOLD,
            witness: WITNESS_MARGIN,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementFrame {
    n: usize,
    measurements: Vec<Vec<MinimalProjection<f64>>>,
}

impl MeasurementFrame {
    pub fn new(measurements: Vec<Vec<MinimalProjection<f64>>>) -> Result<Self> {
        let n = measurements
            .first()
            .and_then(|m| m.first())
            .map(|p| p.dim())
            .ok_or_else(|| Error::InvalidFrame("frame needs at least one measurement".into()))?;
        let id = Matrix::identity(n);
        for (i, m) in measurements.iter().enumerate() {
            if m.len() != n {
                return Err(Error::InvalidFrame(format!(
                    "measurement {i} has {} outcomes, expected {n}",
                    m.len()
                )));
            }
            if let Some(p) = m.iter().find(|p| p.dim() != n) {
                return Err(Error::InvalidFrame(format!(
                    "measurement {i} mixes dimensions {n} and {}",
                    p.dim()
                )));
            }
            for a in 0..n {
                for b in (a + 1)..n {
                    let overlap = m[a].operator().trace_pairing(m[b].operator())?;
                    if overlap.abs() > FRAME_TOL {
                        return Err(Error::InvalidFrame(format!(
                            "measurement {i}: outcomes {a} and {b} are not orthogonal (Tr = {overlap:e})"
                        )));
                    }
                }
            }
            let sum = m.iter().fold(Matrix::zeros(n), |acc, p| &acc + p.matrix());
            let defect = sum.max_abs_diff(&id);
            if defect > FRAME_TOL {
                return Err(Error::InvalidFrame(format!(
                    "measurement {i}: projections do not sum to identity ({defect:e})"
                )));
            }
        }
        Ok(Self { n, measurements })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.measurements.len()
    }

    pub fn measurements(&self) -> &[Vec<MinimalProjection<f64>>] {
        &self.measurements
    }

    pub fn projections(&self) -> impl Iterator<Item = &MinimalProjection<f64>> {
        self.measurements.iter().flatten()
    }

    /// Two-outcome measurements along the given Bloch directions (n = 2).
    pub fn from_bloch_directions(dirs: &[BlochVector<f64>]) -> Result<Self> {
        let mut ms = Vec::with_capacity(dirs.len());
        for &d in dirs {
            ms.push(vec![
                projection_from_bloch(d, Outcome::Plus)?,
                projection_from_bloch(d, Outcome::Minus)?,
            ]);
        }
        Self::new(ms)
    }

    /// Eigenbasis projections of each unitary's columns.
    pub fn from_unitaries(unitaries: &[Matrix<f64>]) -> Result<Self> {
        let mut ms = Vec::with_capacity(unitaries.len());
        for u in unitaries {
            let n = u.dim();
            let mut m = Vec::with_capacity(n);
            for j in 0..n {
                let col: Vec<Complex<f64>> = (0..n).map(|i| u[(i, j)]).collect();
                m.push(MinimalProjection::from_vector(&col)?);
            }
            ms.push(m);
        }
        Self::new(ms)
    }
}

/// Row i is the outcome distribution of measurement i.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTable {
    rows: Vec<Vec<f64>>,
}

impl ProbabilityTable {
    /// Validates nonnegativity (−1e−12 slack) and unit row sums (1e−10).
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = rows
            .first()
            .map(|r| r.len())
            .ok_or_else(|| Error::InvalidTable("table is empty".into()))?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::InvalidTable(format!(
                    "row {i} has {} entries, expected {width}",
                    row.len()
                )));
            }
            if let Some((j, v)) = row
                .iter()
                .enumerate()
                .find(|(_, v)| !v.is_finite() || **v < -1e-12)
            {
                return Err(Error::InvalidTable(format!(
                    "row {i} column {j}: entry {v} is negative or not finite"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidTable(format!(
                    "row {i} sums to {sum}, expected 1"
                )));
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn entries(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().flatten().copied()
    }

    pub fn max_row_sum_defect(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn min_entry(&self) -> f64 {
        self.entries().fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry(&self) -> f64 {
        self.entries().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Number of n-outcome measurements that fix an n×n state operator: k(n−1)+1 = n² at k = n+1.
pub fn required_frame_count(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::UnsupportedDimension {
            dim: n,
            reason: "need n >= 2",
        });
    }
    let k = n + 1;
    debug_assert_eq!(k * (n - 1) + 1, n * n);
    Ok(k)
}

fn gram(frame: &MeasurementFrame) -> DMatrix<f64> {
    let ps: Vec<&MinimalProjection<f64>> = frame.projections().collect();
    let m = ps.len();
    DMatrix::from_fn(m, m, |i, j| {
        ps[i]
            .operator()
            .trace_pairing(ps[j].operator())
            .unwrap_or(f64::NAN)
    })
}

pub fn frame_rank(frame: &MeasurementFrame) -> usize {
    frame_rank_with(frame, RANK_THRESHOLD)
}

/// Rank of the Gram matrix Tr(P_a P_b) over all projections of the frame.
pub fn frame_rank_with(frame: &MeasurementFrame, threshold: f64) -> usize {
    gram(frame)
        .singular_values()
        .iter()
        .filter(|&&s| s > threshold)
        .count()
}

/// k measurements, each the standard basis rotated by a seeded random unitary.
/// Redraws (with a fresh sub-seed) until the rank reaches min(k(n−1)+1, n²).
pub fn random_frame(seed: u64, n: usize, k: usize) -> Result<MeasurementFrame> {
    if n < 2 {
        return Err(Error::UnsupportedDimension {
            dim: n,
            reason: "need n >= 2",
        });
    }
    if k == 0 {
        return Err(Error::InvalidFrame("need at least one measurement".into()));
    }
    let target = (k * (n - 1) + 1).min(n * n);
    for attempt in 0..FRAME_RETRIES {
        let base = sub_seed(seed, attempt as u64);
        let unitaries = (0..k)
            .map(|i| random_unitary::<f64>(sub_seed(base, i as u64), n))
            .collect::<Result<Vec<_>>>()?;
        let frame = MeasurementFrame::from_unitaries(&unitaries)?;
        if frame_rank(&frame) == target {
            return Ok(frame);
        }
    }
    Err(Error::RankNotReached {
        target,
        attempts: FRAME_RETRIES,
    })
}

/// Table of Tr(W P_i^j); entries are negative exactly where W leaves the dual cone.
pub fn born_table(w: &Hermitian<f64>, frame: &MeasurementFrame) -> Result<ProbabilityTable> {
    if w.dim() != frame.n() {
        return Err(Error::DimensionMismatch {
            left: w.dim(),
            right: frame.n(),
        });
    }
    let rows = frame
        .measurements()
        .iter()
        .map(|m| {
            m.iter()
                .map(|p| w.trace_pairing(p.operator()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbabilityTable { rows })
}

/// Orthonormal basis of the Hermitian n×n matrices under Tr(AB): 𝟙/√n, then
/// the generalized Gell-Mann matrices, each normalized to Tr(B²) = 1, in the
/// order symmetric (j<k lexicographic), antisymmetric (j<k), diagonal (l = 1..n−1).
#[derive(Clone, Debug)]
pub struct HermitianBasis {
    n: usize,
    elements: Vec<Hermitian<f64>>,
}

impl HermitianBasis {
    pub fn gell_mann(n: usize) -> Self {
        let mut elements = Vec::with_capacity(n * n);
        elements.push(Hermitian::identity(n).scale(1.0 / (n as f64).sqrt()));
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let unit = |j: usize, k: usize, v: Complex<f64>| {
            let mut m = Matrix::zeros(n);
            m[(j, k)] = v;
            m
        };
        for j in 0..n {
            for k in (j + 1)..n {
                let m = &unit(j, k, Complex::new(r, 0.0)) + &unit(k, j, Complex::new(r, 0.0));
                elements.push(Hermitian::symmetrized(&m));
            }
        }
        for j in 0..n {
            for k in (j + 1)..n {
                let m = &unit(j, k, Complex::new(0.0, -r)) + &unit(k, j, Complex::new(0.0, r));
                elements.push(Hermitian::symmetrized(&m));
            }
        }
        for l in 1..n {
            let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
            let mut diag = vec![0.0; n];
            for d in diag.iter_mut().take(l) {
                *d = norm;
            }
            diag[l] = -(l as f64) * norm;
            elements.push(Hermitian::from_real_diagonal(&diag));
        }
        Self { n, elements }
    }

    /// Same elements in the given order.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.elements.len()];
        if order.len() != self.elements.len()
            || order
                .iter()
                .any(|&i| i >= seen.len() || std::mem::replace(&mut seen[i], true))
        {
            return Err(Error::InvalidInput(
                "basis order must be a permutation".into(),
            ));
        }
        Ok(Self {
            n: self.n,
            elements: order.iter().map(|&i| self.elements[i].clone()).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[Hermitian<f64>] {
        &self.elements
    }

    /// Tr(B_m W) for each basis element.
    pub fn coordinates(&self, w: &Hermitian<f64>) -> Result<Vec<f64>> {
        self.elements.iter().map(|b| b.trace_pairing(w)).collect()
    }

    pub fn assemble(&self, coords: &[f64]) -> Hermitian<f64> {
        Hermitian::linear_combination(self.n, coords.iter().copied().zip(self.elements.iter()))
    }
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub operator: Hermitian<f64>,
    /// max |Tr(W P_i^j) − table_ij|.
    pub residual: f64,
    pub rank: usize,
}

pub fn reconstruct_state(
    frame: &MeasurementFrame,
    table: &ProbabilityTable,
) -> Result<Reconstruction> {
    reconstruct_state_with(
        frame,
        table,
        &HermitianBasis::gell_mann(frame.n()),
        &Tolerances::default(),
    )
}

/// Least-squares solve of Tr(W P_i^j) = table_ij over the coordinates of W in `basis`.
pub fn reconstruct_state_with(
    frame: &MeasurementFrame,
    table: &ProbabilityTable,
    basis: &HermitianBasis,
    tol: &Tolerances,
) -> Result<Reconstruction> {
    let n = frame.n();
    if basis.n() != n {
        return Err(Error::DimensionMismatch {
            left: basis.n(),
            right: n,
        });
    }
    if table.rows().len() != frame.k() || table.rows().iter().any(|r| r.len() != n) {
        return Err(Error::InvalidTable(format!(
            "table shape does not match {} measurements x {n} outcomes",
            frame.k()
        )));
    }
    let ps: Vec<&MinimalProjection<f64>> = frame.projections().collect();
    let dims = n * n;
    let mut design = DMatrix::zeros(ps.len(), dims);
    for (r, p) in ps.iter().enumerate() {
        for (c, b) in basis.elements().iter().enumerate() {
            design[(r, c)] = b.trace_pairing(p.operator())?;
        }
    }
    let rhs = DVector::from_iterator(ps.len(), table.entries());
    let svd = design.clone().svd(true, true);
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > tol.rank)
        .count();
    if rank < dims {
        return Err(Error::Underdetermined {
            rank,
            required: dims,
        });
    }
    let coords = svd
        .solve(&rhs, tol.rank)
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let residual = (&design * &coords - &rhs).amax();
    if residual > tol.inconsistency {
        return Err(Error::Inconsistent { residual });
    }
    let operator = basis.assemble(coords.as_slice());
    Ok(Reconstruction {
        operator,
        residual,
        rank,
    })
}

/// Tr(W P) ≥ −tol for every projection of the frame. The frame's projections
/// generate the cone, so testing the generators suffices.
pub fn in_dual_cone(w: &Hermitian<f64>, frame: &MeasurementFrame, tol: f64) -> bool {
    frame.projections().all(|p| {
        w.trace_pairing(p.operator())
            .map(|v| v >= -tol)
            .unwrap_or(false)
    })
}

/// A unit-trace operator that is Born-consistent with a frame but not PSD.
#[derive(Clone, Debug, PartialEq)]
pub struct DualConeWitness {
    pub operator: Hermitian<f64>,
    pub min_eigenvalue: f64,
    /// Tr(W P_i^j) in frame order.
    pub constraint_slacks: Vec<f64>,
    /// Index of the accepted ray (fallback directions follow the random ones).
    pub direction_seed: u64,
}

impl DualConeWitness {
    /// Checks the witness contract: unit trace, all slacks ≥ −1e−10 and
    /// min eigenvalue < −1e−8.
    pub fn validate(
        operator: Hermitian<f64>,
        frame: &MeasurementFrame,
        direction_seed: u64,
    ) -> Result<Self> {
        if operator.dim() != frame.n() {
            return Err(Error::DimensionMismatch {
                left: operator.dim(),
                right: frame.n(),
            });
        }
        let tr = operator.trace();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { trace: tr });
        }
        let constraint_slacks = frame
            .projections()
            .map(|p| operator.trace_pairing(p.operator()))
            .collect::<Result<Vec<_>>>()?;
        let worst = constraint_slacks
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if worst < -1e-10 {
            return Err(Error::InputInconsistent {
                check: "dual cone membership",
                residual: worst,
            });
        }
        let min_eigenvalue = operator.min_eigenvalue();
        if min_eigenvalue >= -WITNESS_MARGIN {
            return Err(Error::InputInconsistent {
                check: "negative eigenvalue",
                residual: min_eigenvalue,
            });
        }
        Ok(Self {
            operator,
            min_eigenvalue,
            constraint_slacks,
            direction_seed,
        })
    }
}

/// Largest t with Tr((𝟙/n + tΔ)P) ≥ 0 for every frame projection.
fn ray_limit(center: f64, direction: &Hermitian<f64>, frame: &MeasurementFrame) -> Result<f64> {
    let mut t = f64::INFINITY;
    for p in frame.projections() {
        let d = direction.trace_pairing(p.operator())?;
        if d < 0.0 {
            t = t.min(center / -d);
        }
    }
    Ok(t)
}

/// Traceless unit-norm direction: Gaussian coordinates on the non-identity basis elements.
fn random_direction<R: Rng>(rng: &mut R, basis: &HermitianBasis) -> Hermitian<f64> {
    let mut coords: Vec<f64> = (0..basis.elements().len()).map(|_| gaussian(rng)).collect();
    coords[0] = 0.0;
    let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
    coords.iter_mut().for_each(|c| *c /= norm);
    basis.assemble(&coords)
}

/// −(|f_m⟩⟨f_m| − 𝟙/n) for the Fourier basis vectors f_m.
fn fourier_directions(n: usize) -> Vec<Hermitian<f64>> {
    let center = Hermitian::maximally_mixed(n);
    (0..n)
        .map(|m| {
            let v: Vec<Complex<f64>> = (0..n)
                .map(|j| {
                    Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * (m * j) as f64 / n as f64)
                })
                .collect();
            let p = MinimalProjection::from_vector(&v).expect("nonzero Fourier vector");
            center.sub(p.operator())
        })
        .collect()
}

/// Ray shooting from 𝟙/n toward the boundary of the frame's dual cone.
///
/// Each ray Δ (traceless) is followed to 0.999 of its first active constraint;
/// the endpoint is accepted when its smallest eigenvalue is below −1e−8.
/// After `max_rays` random rays the n Fourier directions are tried.
pub fn find_nonpsd_witness(
    frame: &MeasurementFrame,
    seed: u64,
    max_rays: usize,
) -> Result<DualConeWitness> {
    find_nonpsd_witness_with(frame, seed, max_rays, &Tolerances::default())
}

pub fn find_nonpsd_witness_with(
    frame: &MeasurementFrame,
    seed: u64,
    max_rays: usize,
    tol: &Tolerances,
) -> Result<DualConeWitness> {
    let n = frame.n();
    let rank = frame_rank_with(frame, tol.rank);
    if rank != n * n || frame.k() != n + 1 {
        return Err(Error::InvalidFrame(format!(
            "witness search needs k = n+1 = {} measurements of full rank {}, got k = {} with rank {rank}",
            n + 1,
            n * n,
            frame.k()
        )));
    }
    let basis = HermitianBasis::gell_mann(n);
    let center_value = 1.0 / n as f64;
    let center = Hermitian::maximally_mixed(n);
    let mut rng = seeded_rng(seed);
    let random = (0..max_rays)
        .map(|_| random_direction(&mut rng, &basis))
        .collect::<Vec<_>>();
    for (index, dir) in random.into_iter().chain(fourier_directions(n)).enumerate() {
        let t = ray_limit(center_value, &dir, frame)?;
        if !t.is_finite() {
            continue;
        }
        let w = center.add(&dir.scale(RAY_STEP * t));
        if w.min_eigenvalue() < -tol.witness {
            let witness = DualConeWitness::validate(w, frame, index as u64)?;
            debug_assert!(!is_psd(&witness.operator, tol.psd));
            return Ok(witness);
        }
    }
    Err(Error::SearchExhausted { rays: max_rays + n })
}
