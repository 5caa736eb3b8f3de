//! The belt map: a non-surjective relabelling of measurement directions that
//! lets a non-positive operator reproduce all spin probabilities of one
//! fixed pure state.
//!
//! The fixed state points along the polar axis ẑ. A direction at polar angle
//! ϑ is sent to ϑ′ = arccos(cos ϑ / r) with the azimuth kept, and the state
//! vector is stretched to length r. Since r·cos ϑ′ = cos ϑ, every Born value
//! is unchanged, while the images avoid two polar caps of half-angle
//! arccos(1/r).

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::hermitian::Hermitian;
use crate::pauli::{projection_from_bloch, BlochVector, Outcome};
use crate::random::{random_unit_vector, seeded_rng};

/// Arguments of arccos may leave [−1, 1] by at most this much before erroring.
pub const ACOS_GUARD: f64 = 1e-9;

/// Default number of (a, s) pairs tried by the falsifier.
pub const FALSIFIER_SAMPLES: usize = 100_000;
pub const FALSIFIER_THRESHOLD: f64 = 1e-6;

/// arccos with inputs clamped into [−1, 1]; errors when they are off by more than 1e−9.
pub fn guarded_acos(x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > 1.0 + ACOS_GUARD {
        return Err(Error::InvalidAngle(format!(
            "arccos argument {x} outside [-1, 1]"
        )));
    }
    Ok(x.clamp(-1.0, 1.0).acos())
}

/// Polar angle θ ∈ [0, π] from ẑ and azimuth φ ∈ [0, 2π).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalDirection {
    theta: f64,
    phi: f64,
}

impl SphericalDirection {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidAngle(format!(
                "theta = {theta} outside [0, pi]"
            )));
        }
        if !(0.0..TAU).contains(&phi) {
            return Err(Error::InvalidAngle(format!("phi = {phi} outside [0, 2pi)")));
        }
        Ok(Self { theta, phi })
    }

    /// Like `new` but wraps φ into [0, 2π).
    pub fn wrapped(theta: f64, phi: f64) -> Result<Self> {
        let mut p = phi.rem_euclid(TAU);
        if p >= TAU {
            p = 0.0;
        }
        Self::new(theta, p)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn to_cartesian(&self) -> BlochVector<f64> {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        BlochVector::new(st * cp, st * sp, ct)
    }

    /// Direction of a nonzero vector; φ = 0 at the poles.
    pub fn from_cartesian(v: BlochVector<f64>) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidAngle(
                "zero or non-finite vector has no direction".into(),
            ));
        }
        let theta = guarded_acos(v.z / n)?;
        let phi = if v.x == 0.0 && v.y == 0.0 {
            0.0
        } else {
            v.y.atan2(v.x)
        };
        Self::wrapped(theta, phi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeltParameters {
    r: f64,
}

impl BeltParameters {
    /// r must exceed 1; r = 1 is the identity and not a belt.
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 1.0) || !r.is_finite() {
            return Err(Error::InvalidBelt { r });
        }
        Ok(Self { r })
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

/// ϑ′ = arccos(cos ϑ / r); φ′ = φ inside (0, π), 0 at ϑ = 0, π at ϑ = π.
pub fn belt_f(a: SphericalDirection, params: BeltParameters) -> Result<SphericalDirection> {
    let theta = guarded_acos(a.theta.cos() / params.r)?;
    let phi = if a.theta == 0.0 {
        0.0
    } else if a.theta == PI {
        PI
    } else {
        a.phi
    };
    SphericalDirection::new(theta, phi)
}

pub fn belt_f_cartesian(a: BlochVector<f64>, params: BeltParameters) -> Result<BlochVector<f64>> {
    Ok(belt_f(SphericalDirection::from_cartesian(a)?, params)?.to_cartesian())
}

/// The stretched state vector r·ẑ.
pub fn belt_g(params: BeltParameters) -> BlochVector<f64> {
    BlochVector::new(0.0, 0.0, params.r)
}

/// ½(𝟙 + g·σ); eigenvalues ½(1 ± r), so never PSD.
pub fn belt_state_operator(params: BeltParameters) -> Hermitian<f64> {
    belt_g(params).state_operator()
}

/// g extended to every state by rotational covariance: R_s(r·ẑ) = r·s.
pub fn covariant_belt_g(s: BlochVector<f64>, params: BeltParameters) -> BlochVector<f64> {
    s.normalized() * params.r
}

/// Worst |½(1 ± a·ẑ) − Tr(W_g P±_{f(a)})| over `num_samples` uniform directions.
pub fn verify_belt_born(params: BeltParameters, num_samples: usize, seed: u64) -> Result<f64> {
    let mut rng = seeded_rng(seed);
    let w = belt_state_operator(params);
    let pole = BlochVector::new(0.0, 0.0, 1.0);
    let mut worst = 0.0f64;
    for _ in 0..num_samples.max(1) {
        let a: BlochVector<f64> = random_unit_vector(&mut rng);
        worst = worst.max(born_discrepancy(a, pole, &w, params)?);
    }
    Ok(worst)
}

fn born_discrepancy(
    a: BlochVector<f64>,
    pole: BlochVector<f64>,
    w: &Hermitian<f64>,
    params: BeltParameters,
) -> Result<f64> {
    let fa = belt_f_cartesian(a, params)?;
    let mut worst = 0.0f64;
    for o in [Outcome::Plus, Outcome::Minus] {
        let original = 0.5 * (1.0 + o.sign::<f64>() * a.dot(pole));
        let p = projection_from_bloch(fa, o)?;
        let belt = w.trace_pairing(p.operator())?;
        worst = worst.max((original - belt).abs());
    }
    Ok(worst)
}

/// Born discrepancy for one explicit direction.
pub fn belt_born_discrepancy(a: SphericalDirection, params: BeltParameters) -> Result<f64> {
    born_discrepancy(
        a.to_cartesian(),
        BlochVector::new(0.0, 0.0, 1.0),
        &belt_state_operator(params),
        params,
    )
}

/// Half-angle arccos(1/r) of the two polar caps missed by the belt.
pub fn belt_image_gap(params: BeltParameters) -> f64 {
    (1.0 / params.r).acos()
}

/// Largest amount by which a sampled image enters a polar cap,
/// max(0, gap − min(ϑ′, π − ϑ′)). Zero means every image lies in the belt.
pub fn max_cap_intrusion(params: BeltParameters, num_samples: usize, seed: u64) -> Result<f64> {
    let gap = belt_image_gap(params);
    let mut rng = seeded_rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..num_samples {
        let a = SphericalDirection::from_cartesian(random_unit_vector(&mut rng))?;
        let img = belt_f(a, params)?;
        let dist = img.theta.min(PI - img.theta);
        worst = worst.max(gap - dist);
    }
    Ok(worst.max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Counterpair {
    pub a: BlochVector<f64>,
    pub s: BlochVector<f64>,
    /// |a·s − f(a)·g(s)|.
    pub discrepancy: f64,
    pub sample_index: usize,
}

/// |a·s − f(a)·g(s)| with g the covariant extension.
pub fn inner_product_discrepancy(
    a: BlochVector<f64>,
    s: BlochVector<f64>,
    params: BeltParameters,
) -> Result<f64> {
    let fa = belt_f_cartesian(a, params)?;
    Ok((a.dot(s) - fa.dot(covariant_belt_g(s, params))).abs())
}

/// Samples (a, s) pairs until one breaks inner-product preservation by more
/// than 1e−6. `None` after `max_samples` means no violation was found.
pub fn belt_full_content_falsifier(
    params: BeltParameters,
    seed: u64,
    max_samples: usize,
) -> Result<Option<Counterpair>> {
    let mut rng = seeded_rng(seed);
    for i in 0..max_samples {
        let a: BlochVector<f64> = random_unit_vector(&mut rng);
        let s: BlochVector<f64> = random_unit_vector(&mut rng);
        let d = inner_product_discrepancy(a, s, params)?;
        if d > FALSIFIER_THRESHOLD {
            return Ok(Some(Counterpair {
                a,
                s,
                discrepancy: d,
                sample_index: i,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::is_psd;
    use std::f64::consts::FRAC_PI_2;

    fn belt(r: f64) -> BeltParameters {
        BeltParameters::new(r).unwrap()
    }

    #[test]
    fn equator_is_fixed() {
        let a = SphericalDirection::new(FRAC_PI_2, 1.3).unwrap();
        let img = belt_f(a, belt(2.0)).unwrap();
        assert!((img.theta() - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(img.phi(), 1.3);
    }

    #[test]
    fn poles_map_to_cap_edges() {
        let north = belt_f(SphericalDirection::new(0.0, 0.0).unwrap(), belt(2.0)).unwrap();
        assert!((north.theta() - PI / 3.0).abs() < 1e-15);
        assert_eq!(north.phi(), 0.0);
        let south = belt_f(SphericalDirection::new(PI, 4.0).unwrap(), belt(2.0)).unwrap();
        assert!((south.theta() - 2.0 * PI / 3.0).abs() < 1e-15);
        assert_eq!(south.phi(), PI);
    }

    #[test]
    fn g_is_stretched_pole() {
        let g = belt_g(belt(2.0));
        assert_eq!(g, BlochVector::new(0.0, 0.0, 2.0));
        let w = belt_state_operator(belt(2.0));
        let eig = w.eigenvalues();
        assert!((eig[0] + 0.5).abs() < 1e-15 && (eig[1] - 1.5).abs() < 1e-15);
        assert!(!is_psd(&w, 1e-10));
    }

    #[test]
    fn belt_requires_r_above_one() {
        assert!(BeltParameters::new(1.0).is_err());
        assert!(BeltParameters::new(0.5).is_err());
        assert!(BeltParameters::new(f64::NAN).is_err());
        assert!(BeltParameters::new(1.0 + 1e-9).is_ok());
    }

    #[test]
    fn born_preservation_examples() {
        let a = SphericalDirection::new(PI / 4.0, 0.0).unwrap();
        assert!(belt_born_discrepancy(a, belt(2.0)).unwrap() < 1e-15);
        let eq = SphericalDirection::new(FRAC_PI_2, 0.7).unwrap();
        assert!(belt_born_discrepancy(eq, belt(2.0)).unwrap() < 1e-15);
        assert!(verify_belt_born(belt(3.0), 10_000, 5).unwrap() <= 1e-12);
    }

    #[test]
    fn cap_gaps() {
        assert!((belt_image_gap(belt(2.0)) - PI / 3.0).abs() < 1e-15);
        assert!((belt_image_gap(belt(1.001)) - 0.0447).abs() < 1e-4);
        assert!((belt_image_gap(belt(10.0)) - 1.47063).abs() < 1e-5);
        assert_eq!(max_cap_intrusion(belt(2.0), 2_000, 1).unwrap(), 0.0);
    }

    #[test]
    fn falsifier_examples() {
        let pole = BlochVector::new(0.0, 0.0, 1.0);
        let mut rng = seeded_rng(4);
        for _ in 0..100 {
            let a: BlochVector<f64> = random_unit_vector(&mut rng);
            assert!(inner_product_discrepancy(a, pole, belt(2.0)).unwrap() < 1e-12);
        }
        // a = pole, s on the equator: a·s = 0 but f(a)·g(s) = r sin(π/3) cos Δφ.
        let s = BlochVector::new(1.0, 0.0, 0.0);
        let d = inner_product_discrepancy(pole, s, belt(2.0)).unwrap();
        assert!((d - 3f64.sqrt()).abs() < 1e-12);
        let hit = belt_full_content_falsifier(belt(2.0), 9, FALSIFIER_SAMPLES)
            .unwrap()
            .unwrap();
        assert!(hit.discrepancy > 1e-6);
    }

    #[test]
    fn spherical_round_trip() {
        let d = SphericalDirection::new(1.1, 5.0).unwrap();
        let back = SphericalDirection::from_cartesian(d.to_cartesian()).unwrap();
        assert!((back.theta() - 1.1).abs() < 1e-12 && (back.phi() - 5.0).abs() < 1e-12);
        assert!(SphericalDirection::new(-0.1, 0.0).is_err());
        assert!(SphericalDirection::new(0.1, TAU).is_err());
    }

    #[test]
    fn guarded_acos_limits() {
        assert_eq!(guarded_acos(1.0 + 1e-12).unwrap(), 0.0);
        assert!(guarded_acos(1.0 + 1e-8).is_err());
    }
}
