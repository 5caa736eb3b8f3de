//! Three yes-no measurements on ℂ².
//!
//! Each measurement is assigned a unit Bloch vector and its two outcomes the
//! projections ½(𝟙 ± a·σ). Given the "+" probabilities of three linearly
//! independent measurements, the Born rule fixes the state operator
//! `W = ½𝟙 + s·σ` uniquely; [`solve_state_vector`] returns `s` in closed form
//! and [`fit_general_operator`] derives the same result from a general
//! complex 2×2 ansatz.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{is_psd, Hermitian, MinimalProjection};
use crate::pauli::{
    pauli_compose, projection_from_bloch, BlochVector, Outcome, PauliDecomposition,
};
use crate::report::fmt_sig;
use crate::scalar::Real;

/// |a·(b×c)| below this is treated as linear dependence.
pub const INDEPENDENCE_THRESHOLD: f64 = 1e-10;

/// Slack for the |s| = 1 boundary, resolved toward density.
pub const DENSITY_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThreeMeasurementSetup<T> {
    a: BlochVector<T>,
    b: BlochVector<T>,
    c: BlochVector<T>,
}

impl<T: Real> ThreeMeasurementSetup<T> {
    pub fn new(a: BlochVector<T>, b: BlochVector<T>, c: BlochVector<T>) -> Result<Self> {
        let unit_tol = T::lit(1e-10).max(T::predicate_tol());
        for v in [a, b, c] {
            if !v.is_finite() || !((v.norm() - T::one()).abs() <= unit_tol) {
                return Err(Error::NotUnit {
                    norm: v.norm().as_f64(),
                });
            }
        }
        let triple = a.dot(b.cross(c));
        if !(triple.abs() > T::lit(INDEPENDENCE_THRESHOLD)) {
            return Err(Error::DegenerateSetup {
                triple: triple.as_f64(),
            });
        }
        Ok(Self { a, b, c })
    }

    /// a = x̂, b = (0, cos φ, −sin φ), c = ẑ.
    pub fn tilted(phi: T) -> Result<Self> {
        let z = T::zero();
        let o = T::one();
        Self::new(
            BlochVector::new(o, z, z),
            BlochVector::new(z, phi.cos(), -phi.sin()),
            BlochVector::new(z, z, o),
        )
    }

    pub fn a(&self) -> BlochVector<T> {
        self.a
    }

    pub fn b(&self) -> BlochVector<T> {
        self.b
    }

    pub fn c(&self) -> BlochVector<T> {
        self.c
    }

    pub fn directions(&self) -> [BlochVector<T>; 3] {
        [self.a, self.b, self.c]
    }

    /// a·(b×c).
    pub fn triple_product(&self) -> T {
        self.a.dot(self.b.cross(self.c))
    }

    /// The six outcome projections, ordered a+, a−, b+, b−, c+, c−.
    pub fn projections(&self) -> Result<Vec<MinimalProjection<T>>> {
        let mut out = Vec::with_capacity(6);
        for d in self.directions() {
            out.push(projection_from_bloch(d, Outcome::Plus)?);
            out.push(projection_from_bloch(d, Outcome::Minus)?);
        }
        Ok(out)
    }
}

/// Probabilities of the three "+" outcomes; the "−" outcomes are `1 − p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalProbTriple<T> {
    pub pa: T,
    pub pb: T,
    pub pc: T,
}

impl<T: Real> ConditionalProbTriple<T> {
    pub fn new(pa: T, pb: T, pc: T) -> Result<Self> {
        for p in [pa, pb, pc] {
            if !(p >= T::zero() && p <= T::one()) {
                return Err(Error::InvalidProbability { value: p.as_f64() });
            }
        }
        Ok(Self { pa, pb, pc })
    }

    pub fn uniform(p: T) -> Result<Self> {
        Self::new(p, p, p)
    }

    pub fn plus(&self) -> [T; 3] {
        [self.pa, self.pb, self.pc]
    }

    /// Outcome probabilities ordered like [`ThreeMeasurementSetup::projections`].
    pub fn outcomes(&self) -> [T; 6] {
        let o = T::one();
        [
            self.pa,
            o - self.pa,
            self.pb,
            o - self.pb,
            self.pc,
            o - self.pc,
        ]
    }
}

/// Gaussian elimination with partial pivoting on a 3×3 system.
fn solve3<T: Real>(mut m: [[T; 3]; 3], mut rhs: [T; 3]) -> Option<[T; 3]> {
    for col in 0..3 {
        let pivot =
            (col..3).max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())?;
        if m[pivot][col].abs() <= T::min_positive_value() {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in (col + 1)..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                let v = m[col][k];
                m[row][k] -= f * v;
            }
            let r = rhs[col];
            rhs[row] -= f * r;
        }
    }
    let mut x = [T::zero(); 3];
    for row in (0..3).rev() {
        let mut acc = rhs[row];
        for k in (row + 1)..3 {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

/// Fits `W = s0·𝟙 + s·σ + i(s0p·𝟙 + sp·σ)` to the six Born equations
/// `Tr(W P±) = p±`.
///
/// With `P± = ½(𝟙 ± d·σ)` the equations read `(s0 ± s·d) + i(s0p ± sp·d) = p±`.
/// Real and imaginary parts separate; the sum over each outcome pair fixes
/// `s0` (and `s0p`), the difference gives a 3×3 system in `s` (and `sp`).
pub fn fit_general_operator<T: Real>(
    setup: &ThreeMeasurementSetup<T>,
    probs: &ConditionalProbTriple<T>,
) -> Result<PauliDecomposition<T>> {
    let half = T::lit(0.5);
    let outcomes = probs.outcomes();
    let dirs = setup.directions();
    let rows = dirs.map(|d| d.to_array());
    let degenerate = || Error::DegenerateSetup {
        triple: setup.triple_product().as_f64(),
    };

    // Real parts.
    let sums: Vec<T> = (0..3)
        .map(|k| (outcomes[2 * k] + outcomes[2 * k + 1]) * half)
        .collect();
    let s0 = sums.iter().copied().sum::<T>() / T::lit(3.0);
    let diffs = [0, 1, 2].map(|k| (outcomes[2 * k] - outcomes[2 * k + 1]) * half);
    let s = solve3(rows, diffs).ok_or_else(degenerate)?;

    // Imaginary parts: the probabilities are real, so both right-hand sides vanish.
    let zero3 = [T::zero(); 3];
    let sp = solve3(rows, zero3).ok_or_else(degenerate)?;

    Ok(PauliDecomposition {
        s0,
        s: BlochVector::from_array(s),
        s0p: T::zero(),
        sp: BlochVector::from_array(sp),
    })
}

/// max over the six outcomes of |Tr(W P) − p| with W = pauli_compose(d).
pub fn born_residual<T: Real>(
    setup: &ThreeMeasurementSetup<T>,
    probs: &ConditionalProbTriple<T>,
    d: &PauliDecomposition<T>,
) -> Result<T> {
    let w = pauli_compose(d);
    let mut worst = T::zero();
    for (p, target) in setup.projections()?.iter().zip(probs.outcomes()) {
        let v = w.trace_product(p.matrix())?;
        worst = worst.max((v.re - target).abs()).max(v.im.abs());
    }
    Ok(worst)
}

/// s = [(pa−½)(b×c) + (pb−½)(c×a) + (pc−½)(a×b)] / (a·(b×c)).
pub fn solve_state_vector<T: Real>(
    setup: &ThreeMeasurementSetup<T>,
    probs: &ConditionalProbTriple<T>,
) -> BlochVector<T> {
    let half = T::lit(0.5);
    let (a, b, c) = (setup.a, setup.b, setup.c);
    let num = b.cross(c) * (probs.pa - half)
        + c.cross(a) * (probs.pb - half)
        + a.cross(b) * (probs.pc - half);
    num * (T::one() / setup.triple_product())
}

/// Tr(W·P) for a unit-trace Hermitian W.
pub fn born_probability<T: Real>(w: &Hermitian<T>, p: &MinimalProjection<T>) -> Result<T> {
    if w.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            left: w.dim(),
            right: p.dim(),
        });
    }
    let tol = T::predicate_tol();
    let tr = w.trace();
    if !((tr - T::one()).abs() <= tol) {
        return Err(Error::NotNormalized { trace: tr.as_f64() });
    }
    let v = w.matrix().trace_product(p.matrix())?;
    if v.im.abs() > tol {
        return Err(Error::ComplexBornValue {
            imag: v.im.as_f64(),
        });
    }
    Ok(v.re)
}

/// Closed form of `s` for the tilted setup with pa = pb = pc = p:
/// (p − ½)·(1, (1 + cos φ + sin φ)/(1 + cos φ − sin φ), 1).
pub fn tilted_state_vector<T: Real>(p: T, phi: T) -> BlochVector<T> {
    let one = T::one();
    let (s, c) = phi.sin_cos();
    let y = (one + c + s) / (one + c - s);
    BlochVector::new(one, y, one) * (p - T::lit(0.5))
}

/// Smallest p ≥ ½ at which the tilted-setup `s` reaches unit length.
pub fn density_boundary<T: Real>(phi: T) -> T {
    let unit = tilted_state_vector(T::lit(1.5), phi).norm();
    T::lit(0.5) + T::one() / unit
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    QuantumDensity,
    NoncommutativeOnly,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::QuantumDensity => "quantum-density",
            Verdict::NoncommutativeOnly => "noncommutative-only",
        }
    }
}

/// QuantumDensity iff |s| ≤ 1 (pure states included).
pub fn classify_representation<T: Real>(s: BlochVector<T>) -> Verdict {
    if s.norm() <= T::one() + T::lit(DENSITY_SLACK) {
        Verdict::QuantumDensity
    } else {
        Verdict::NoncommutativeOnly
    }
}

/// Same verdict computed from the spectrum of ½(𝟙 + s·σ).
pub fn classify_via_psd<T: Real>(s: BlochVector<T>, tol: T) -> Verdict {
    if is_psd(&s.state_operator(), tol) {
        Verdict::QuantumDensity
    } else {
        Verdict::NoncommutativeOnly
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionScanPoint<T> {
    pub p: T,
    pub phi: T,
    pub s_norm: T,
    pub is_density: bool,
    /// PSD verdict of ½(𝟙 + s·σ), computed through the eigensolver.
    pub assembled_psd: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionScanResult<T> {
    pub points: Vec<RegionScanPoint<T>>,
    pub steps: usize,
    pub p_step: T,
    pub phi_step: T,
    /// True when φ = π/2 was requested and therefore excluded.
    pub phi_half_open: bool,
}

impl<T: Real> RegionScanResult<T> {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,phi,s_norm,is_density\n");
        for pt in &self.points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_sig(pt.p.as_f64()),
                fmt_sig(pt.phi.as_f64()),
                fmt_sig(pt.s_norm.as_f64()),
                pt.is_density
            ));
        }
        out
    }

    pub fn density_count(&self) -> usize {
        self.points.iter().filter(|p| p.is_density).count()
    }

    /// Grid points where the norm test and the spectral test disagree.
    pub fn disagreements(&self) -> usize {
        self.points
            .iter()
            .filter(|p| p.is_density != p.assembled_psd)
            .count()
    }

    pub fn min_norm(&self) -> T {
        self.points
            .iter()
            .fold(T::infinity(), |m, p| m.min(p.s_norm))
    }
}

fn grid<T: Real>(lo: T, hi: T, steps: usize, half_open: bool) -> (Vec<T>, T) {
    let intervals = if half_open { steps } else { steps - 1 };
    let h = (hi - lo) / T::from_usize(intervals).unwrap();
    (
        (0..steps)
            .map(|i| {
                if !half_open && i == steps - 1 {
                    hi
                } else {
                    lo + h * T::from_usize(i).unwrap()
                }
            })
            .collect(),
        h,
    )
}

/// Evaluates `s` on a steps×steps grid over p × φ for the tilted setup.
/// Rows are ordered by p, then φ. φ = π/2 is excluded because the closed
/// form degenerates to 0/0 there; a range ending at π/2 becomes half-open.
pub fn scan_region<T: Real>(
    phi_range: (T, T),
    p_range: (T, T),
    steps: usize,
) -> Result<RegionScanResult<T>> {
    let (phi_lo, phi_hi) = phi_range;
    let (p_lo, p_hi) = p_range;
    let half_pi = T::FRAC_PI_2();
    if steps < 2 {
        return Err(Error::InvalidRange(format!(
            "steps must be >= 2, got {steps}"
        )));
    }
    if !(phi_lo > T::zero() && phi_lo <= phi_hi && phi_hi <= half_pi + T::epsilon()) {
        return Err(Error::InvalidRange(format!(
            "phi range [{phi_lo}, {phi_hi}] not within (0, pi/2]"
        )));
    }
    if !(p_lo >= T::zero() && p_lo <= p_hi && p_hi <= T::one()) {
        return Err(Error::InvalidRange(format!(
            "p range [{p_lo}, {p_hi}] not within [0, 1]"
        )));
    }
    let half_open = phi_hi >= half_pi - T::epsilon();
    if half_open && phi_lo >= phi_hi {
        return Err(Error::InvalidRange(
            "phi range collapses onto the excluded point pi/2".into(),
        ));
    }
    let (ps, p_step) = grid(p_lo, p_hi, steps, false);
    let (phis, phi_step) = grid(phi_lo, phi_hi, steps, half_open);
    let tol = T::predicate_tol();
    let mut points = Vec::with_capacity(steps * steps);
    for &p in &ps {
        for &phi in &phis {
            let s = tilted_state_vector(p, phi);
            let s_norm = s.norm();
            points.push(RegionScanPoint {
                p,
                phi,
                s_norm,
                is_density: classify_representation(s) == Verdict::QuantumDensity,
                assembled_psd: classify_via_psd(s, tol) == Verdict::QuantumDensity,
            });
        }
    }
    Ok(RegionScanResult {
        points,
        steps,
        p_step,
        phi_step,
        phi_half_open: half_open,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn v(x: f64, y: f64, z: f64) -> BlochVector<f64> {
        BlochVector::new(x, y, z)
    }

    fn orthonormal() -> ThreeMeasurementSetup<f64> {
        ThreeMeasurementSetup::new(v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0), v(0.0, 0.0, 1.0)).unwrap()
    }

    #[test]
    fn maximally_mixed_fit() {
        let d = fit_general_operator(
            &orthonormal(),
            &ConditionalProbTriple::uniform(0.5).unwrap(),
        )
        .unwrap();
        assert_eq!(d.s0, 0.5);
        assert_eq!(d.s, BlochVector::zero());
        assert_eq!(d.s0p, 0.0);
        assert_eq!(d.sp, BlochVector::zero());
    }

    #[test]
    fn tilted_fit_at_sixty_degrees() {
        // Hand solution of x = 0.4, 0.5y − (√3/2)z = 0.4, z = 0.4:
        // y = 0.8 + √3·0.4 = 1.492820323...
        let setup = ThreeMeasurementSetup::tilted(PI / 3.0).unwrap();
        let probs = ConditionalProbTriple::uniform(0.9).unwrap();
        let d = fit_general_operator(&setup, &probs).unwrap();
        let expected = v(0.4, 0.8 + 3f64.sqrt() * 0.4, 0.4);
        assert!((d.s0 - 0.5).abs() < 1e-15);
        assert!(d.s.max_abs_diff(expected) < 1e-12);
        assert!((d.s.y - 1.49282).abs() < 1e-5);
        assert!(born_residual(&setup, &probs, &d).unwrap() < 1e-10);
        assert!(d.is_real(1e-10));
    }

    #[test]
    fn closed_form_matches_tilted_formula() {
        for &phi in &[0.2, PI / 4.0, PI / 3.0, 1.4] {
            let setup = ThreeMeasurementSetup::tilted(phi).unwrap();
            for &p in &[0.0, 0.3, 0.5, 0.76, 1.0] {
                let probs = ConditionalProbTriple::uniform(p).unwrap();
                let s = solve_state_vector(&setup, &probs);
                assert!(
                    s.max_abs_diff(tilted_state_vector(p, phi)) < 1e-12,
                    "phi={phi} p={p}"
                );
            }
        }
    }

    #[test]
    fn closed_form_at_sixty_degrees() {
        let setup = ThreeMeasurementSetup::tilted(PI / 3.0).unwrap();
        let s = solve_state_vector(&setup, &ConditionalProbTriple::uniform(0.9).unwrap());
        assert!(s.max_abs_diff(v(0.4, 1.49282, 0.4)) < 1e-5);
        assert!((s.norm() - 1.59641).abs() < 1e-5);
        assert_eq!(
            solve_state_vector(&setup, &ConditionalProbTriple::uniform(0.5).unwrap()),
            BlochVector::zero()
        );
    }

    #[test]
    fn born_probability_examples() {
        let half = Hermitian::<f64>::maximally_mixed(2);
        let pz = projection_from_bloch(v(0.0, 0.0, 1.0), Outcome::Plus).unwrap();
        assert!((born_probability(&half, &pz).unwrap() - 0.5).abs() < 1e-15);
        let pure = v(0.0, 0.0, 1.0).state_operator();
        assert!((born_probability(&pure, &pz).unwrap() - 1.0).abs() < 1e-15);

        // W = ½𝟙 + s·σ assembled from the fit reproduces p = 0.9.
        let setup = ThreeMeasurementSetup::tilted(PI / 3.0).unwrap();
        let d =
            fit_general_operator(&setup, &ConditionalProbTriple::uniform(0.9).unwrap()).unwrap();
        let w = Hermitian::new(pauli_compose(&d)).unwrap();
        let px = projection_from_bloch(v(1.0, 0.0, 0.0), Outcome::Plus).unwrap();
        assert!((born_probability(&w, &px).unwrap() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn born_probability_errors() {
        let pz = projection_from_bloch(v(0.0, 0.0, 1.0), Outcome::Plus).unwrap();
        assert!(matches!(
            born_probability(&Hermitian::identity(2), &pz),
            Err(Error::NotNormalized { .. })
        ));
        let w3 = Hermitian::<f64>::maximally_mixed(3);
        assert!(matches!(
            born_probability(&w3, &pz),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bloch_born_formula() {
        // Tr(½(𝟙+s·σ) P±_a) = ½(1 ± s·a).
        let s = v(0.3, -0.2, 0.5);
        let a = v(0.6, 0.0, 0.8);
        let w = s.state_operator();
        for o in [Outcome::Plus, Outcome::Minus] {
            let p = born_probability(&w, &projection_from_bloch(a, o).unwrap()).unwrap();
            assert!((p - 0.5 * (1.0 + o.sign::<f64>() * s.dot(a))).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_setups_are_rejected() {
        let err = ThreeMeasurementSetup::new(v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0), v(1.0, 0.0, 0.0))
            .unwrap_err();
        assert!(matches!(err, Error::DegenerateSetup { .. }));
        assert!(matches!(
            ThreeMeasurementSetup::tilted(PI / 2.0),
            Err(Error::DegenerateSetup { .. })
        ));
        assert!(matches!(
            ThreeMeasurementSetup::new(v(2.0, 0.0, 0.0), v(0.0, 1.0, 0.0), v(0.0, 0.0, 1.0)),
            Err(Error::NotUnit { .. })
        ));
        assert!(ConditionalProbTriple::new(0.5, 1.2, 0.5).is_err());
    }

    #[test]
    fn scan_examples() {
        let r = scan_region((PI / 3.0, PI / 3.0), (0.76, 0.76), 2).unwrap();
        assert!((r.points[0].s_norm - 1.0377).abs() < 1e-3);
        assert!(!r.points[0].is_density);

        let r = scan_region((0.3, 1.2), (0.5, 0.5), 3).unwrap();
        assert!(r.points.iter().all(|p| p.s_norm == 0.0 && p.is_density));

        let r = scan_region((PI / 3.0, PI / 3.0), (0.6, 0.6), 2).unwrap();
        assert!((r.points[0].s_norm - 0.399102).abs() < 1e-5);
        assert!(r.points[0].is_density);
    }

    #[test]
    fn scan_excludes_right_angle() {
        let r = scan_region((PI / 3.0, PI / 2.0), (0.8, 1.0), 4).unwrap();
        assert!(r.phi_half_open);
        assert!(r
            .points
            .iter()
            .all(|p| p.phi < PI / 2.0 && p.s_norm.is_finite()));
    }

    #[test]
    fn scan_orders_by_p_then_phi() {
        let r = scan_region((0.5, 1.0), (0.6, 0.9), 3).unwrap();
        let keys: Vec<(f64, f64)> = r.points.iter().map(|p| (p.p, p.phi)).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(keys, sorted);
        assert_eq!(r.points.len(), 9);
    }

    #[test]
    fn scan_rejects_bad_ranges() {
        assert!(scan_region((0.0, 1.0), (0.5, 1.0), 5).is_err());
        assert!(scan_region((0.5, 1.0), (0.9, 0.5), 5).is_err());
        assert!(scan_region((0.5, 1.0), (0.5, 1.1), 5).is_err());
        assert!(scan_region((0.5, 1.0), (0.5, 1.0), 1).is_err());
        assert!(scan_region((0.5, 2.0), (0.5, 1.0), 5).is_err());
    }

    #[test]
    fn csv_header_and_digits() {
        let r = scan_region((PI / 3.0, PI / 3.0), (0.76, 0.76), 2).unwrap();
        let csv = r.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("p,phi,s_norm,is_density"));
        assert_eq!(lines.next(), Some("0.76,1.0471975512,1.03766398143,false"));
    }

    #[test]
    fn classifier_examples() {
        assert_eq!(
            classify_representation(BlochVector::<f64>::zero()),
            Verdict::QuantumDensity
        );
        assert_eq!(
            classify_representation(v(0.4, 1.49282, 0.4)),
            Verdict::NoncommutativeOnly
        );
        assert_eq!(
            classify_representation(v(0.6, 0.0, 0.8)),
            Verdict::QuantumDensity
        );
    }

    #[test]
    fn boundary_at_sixty_degrees() {
        let p = density_boundary(PI / 3.0);
        assert!((p - 0.750563).abs() < 1e-6);
        assert!((tilted_state_vector(p, PI / 3.0).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_precision_solve() {
        let setup = ThreeMeasurementSetup::<f32>::tilted(std::f32::consts::FRAC_PI_3).unwrap();
        let s = solve_state_vector(&setup, &ConditionalProbTriple::uniform(0.9f32).unwrap());
        assert!((s.y - 1.49282).abs() < 1e-4);
    }
}
