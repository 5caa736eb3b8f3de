//! The full property suite as one deterministic report.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

use rand::Rng;

use crate::belt::{
    belt_f_cartesian, belt_full_content_falsifier, covariant_belt_g, verify_belt_born,
    BeltParameters, FALSIFIER_SAMPLES,
};
use crate::bloch::{
    fit_general_operator, scan_region, solve_state_vector, tilted_state_vector,
    ConditionalProbTriple, ThreeMeasurementSetup,
};
use crate::error::{Error, Result};
use crate::hermitian::Hermitian;
use crate::lemma::{
    conjugation, lemma1_verify, lemma2_frame_gram, lemma2_verify, random_unit_samples, rotate,
    standard_projection_basis, MIN_EXTRA_SAMPLES,
};
use crate::random::{
    random_density_with, random_hermitian_with, random_minimal_projection_with, random_rotation,
    random_unit_vector, random_unitary, seeded_rng, sub_seed,
};
use crate::report::{Check, RepresentationReport};
use crate::tomo::{
    born_table, find_nonpsd_witness, frame_rank, random_frame, reconstruct_state, DualConeWitness,
    MeasurementFrame,
};

pub const BELT_RADII: [f64; 3] = [1.5, 2.0, 3.0];

/// Triples with |a·(b×c)| below this are redrawn in the solver comparison.
pub const MIN_TRIPLE_PRODUCT: f64 = 0.05;

/// Runs every property check with sub-seeds derived from `seed`.
/// The report carries no timings, so equal seeds give equal bytes.
pub fn run_selftest(seed: u64) -> Result<RepresentationReport> {
    let mut report = RepresentationReport::new("selftest", seed);
    region(&mut report)?;
    closed_form(&mut report, sub_seed(seed, 2))?;
    counting(&mut report, sub_seed(seed, 3))?;
    round_trip(&mut report, sub_seed(seed, 4))?;
    witnesses(&mut report, sub_seed(seed, 5))?;
    fejer(&mut report, sub_seed(seed, 6))?;
    belt(&mut report, sub_seed(seed, 7))?;
    lemma1(&mut report, sub_seed(seed, 8))?;
    lemma2(&mut report, sub_seed(seed, 9))?;
    report.verdict = if report.all_pass() { "pass" } else { "fail" }.to_string();
    Ok(report)
}

fn region(report: &mut RepresentationReport) -> Result<()> {
    let scan = scan_region((FRAC_PI_3, FRAC_PI_2 - 0.01), (0.76, 1.0), 50)?;
    report.check(Check::new(
        "region.no_density_points",
        scan.density_count() == 0,
        scan.density_count() as f64,
    ));
    report.check(Check::new(
        "region.norm_and_spectrum_agree",
        scan.disagreements() == 0,
        scan.disagreements() as f64,
    ));
    let corner = tilted_state_vector(0.76, FRAC_PI_3).norm();
    report.check(Check::at_most(
        "region.corner_norm",
        (corner - 1.0377).abs(),
        1e-3,
    ));
    report.put_scalar("region.min_norm", scan.min_norm());
    report.put_scalar("region.corner_norm", corner);
    Ok(())
}

fn random_setup<R: Rng>(rng: &mut R) -> Result<ThreeMeasurementSetup<f64>> {
    loop {
        let [a, b, c] = [0; 3].map(|_| random_unit_vector::<f64, _>(rng));
        if a.dot(b.cross(c)).abs() >= MIN_TRIPLE_PRODUCT {
            return ThreeMeasurementSetup::new(a, b, c);
        }
    }
}

fn closed_form(report: &mut RepresentationReport, seed: u64) -> Result<()> {
    let mut rng = seeded_rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let setup = random_setup(&mut rng)?;
        let probs = ConditionalProbTriple::new(rng.gen(), rng.gen(), rng.gen())?;
        let closed = solve_state_vector(&setup, &probs);
        let solved = fit_general_operator(&setup, &probs)?.s;
        worst = worst.max(closed.max_abs_diff(solved) / closed.norm().max(1.0));
    }
    report.check(Check::at_most(
        "closed_form.matches_linear_solve",
        worst,
        1e-12,
    ));
    Ok(())
}

fn counting(report: &mut RepresentationReport, seed: u64) -> Result<()> {
    for n in 2..=4 {
        let full = (0..100u64)
            .map(|i| random_frame(sub_seed(seed, i), n, n + 1).map(|f| frame_rank(&f) == n * n))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .filter(|&b| b)
            .count();
        report.check(Check::new(
            format!("counting.n{n}.full_rank_fraction"),
            full >= 99,
            1.0 - full as f64 / 100.0,
        ));
    }
    Ok(())
}

fn round_trip(report: &mut RepresentationReport, seed: u64) -> Result<()> {
    for n in 2..=4 {
        let mut rng = seeded_rng(sub_seed(seed, n as u64));
        let mut worst = 0.0f64;
        for i in 0..100u64 {
            let frame = random_frame(sub_seed(seed, 1000 * n as u64 + i), n, n + 1)?;
            let w = random_density_with::<f64, _>(&mut rng, n)?;
            let rec = reconstruct_state(&frame, &born_table(&w, &frame)?)?;
            worst = worst.max(rec.operator.matrix().max_abs_diff(w.matrix()));
        }
        report.check(Check::at_most(
            format!("tomography.n{n}.round_trip"),
            worst,
            1e-9,
        ));
    }
    Ok(())
}

/// Frame of the tilted setup at φ = π/3 with the closed-form witness at p = 0.9.
pub fn tilted_witness() -> Result<(MeasurementFrame, Hermitian<f64>)> {
    let setup = ThreeMeasurementSetup::tilted(FRAC_PI_3)?;
    let frame = MeasurementFrame::from_bloch_directions(&setup.directions())?;
    let s = solve_state_vector(&setup, &ConditionalProbTriple::uniform(0.9)?);
    Ok((frame, s.state_operator()))
}

fn witnesses(report: &mut RepresentationReport, seed: u64) -> Result<()> {
    for n in [2, 3] {
        let mut worst_eig = f64::NEG_INFINITY;
        let mut worst_entry = 0.0f64;
        let mut worst_sum = 0.0f64;
        let mut missing = 0usize;
        for i in 0..20u64 {
            let s = sub_seed(seed, 100 * n as u64 + i);
            let frame = random_frame(s, n, n + 1)?;
            match find_nonpsd_witness(&frame, s, 10_000) {
                Ok(w) => {
                    worst_eig = worst_eig.max(w.min_eigenvalue);
                    let table = born_table(&w.operator, &frame)?;
                    let out_of_range = table
                        .entries()
                        .map(|p| (-p).max(p - 1.0))
                        .fold(f64::NEG_INFINITY, f64::max);
                    worst_entry = worst_entry.max(out_of_range);
                    worst_sum = worst_sum.max(table.max_row_sum_defect());
                }
                Err(Error::SearchExhausted { .. }) => missing += 1,
                Err(e) => return Err(e),
            }
        }
        report.check(Check::new(
            format!("witness.n{n}.found"),
            missing == 0,
            missing as f64,
        ));
        report.check(Check::new(
            format!("witness.n{n}.negative_eigenvalue"),
            worst_eig < -1e-8,
            worst_eig,
        ));
        report.check(Check::at_most(
            format!("witness.n{n}.entries_in_unit_interval"),
            worst_entry,
            1e-10,
        ));
        report.check(Check::at_most(
            format!("witness.n{n}.row_sums"),
            worst_sum,
            1e-10,
        ));
    }
    let (frame, w) = tilted_witness()?;
    let verdict = DualConeWitness::validate(w, &frame, 0);
    let residual = verdict.as_ref().map(|v| v.min_eigenvalue).unwrap_or(0.0);
    report.check(Check::new(
        "witness.tilted_instance",
        verdict.is_ok(),
        residual,
    ));
    Ok(())
}

fn fejer(report: &mut RepresentationReport, seed: u64) -> Result<()> {
    let mut rng = seeded_rng(seed);
    for n in 2..=4 {
        let mut worst_pair = f64::INFINITY;
        for _ in 0..500 {
            let a = random_density_with::<f64, _>(&mut rng, n)?;
            let b = random_density_with::<f64, _>(&mut rng, n)?;
            worst_pair = worst_pair.min(a.trace_pairing(&b)?);
        }
        report.check(Check::new(
            format!("fejer.n{n}.psd_pairs"),
            worst_pair >= -1e-10,
            worst_pair,
        ));
    }
    let mut worst_witness = f64::NEG_INFINITY;
    let mut found = 0;
    while found < 500 {
        let n = 2 + found % 3;
        let a = random_hermitian_with::<f64, _>(&mut rng, n)?;
        let lowest = a
            .spectral_decomposition()
            .into_iter()
            .min_by(|x, y| x.eigenvalue.total_cmp(&y.eigenvalue))
            .expect("nonempty spectrum");
        if lowest.eigenvalue >= 0.0 {
            continue;
        }
        worst_witness = worst_witness.max(a.trace_pairing(&lowest.projection)?);
        found += 1;
    }
    report.check(Check::new(
        "fejer.negative_eigenprojection",
        worst_witness < 0.0,
        worst_witness,
    ));
    Ok(())
}

fn belt(report: &mut RepresentationReport, seed: u64) -> Result<()> {
    for (i, &r) in BELT_RADII.iter().enumerate() {
        let params = BeltParameters::new(r)?;
        let s = sub_seed(seed, i as u64);
        let born = verify_belt_born(params, 10_000, s)?;
        report.check(Check::at_most(format!("belt.r{r}.born_exact"), born, 1e-12));
        let mut excess = f64::NEG_INFINITY;
        for a in random_unit_samples(s, 10_000) {
            excess = excess.max(belt_f_cartesian(a, params)?.z.abs() - 1.0 / r);
        }
        report.check(Check::at_most(
            format!("belt.r{r}.image_in_belt"),
            excess,
            1e-12,
        ));
    }
    Ok(())
}

fn lemma1(report: &mut RepresentationReport, seed: u64) -> Result<()> {
    let mut rng = seeded_rng(seed);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for i in 0..50u64 {
        let r = random_rotation(&mut rng);
        let f = |a| Ok(rotate(&r, a));
        let rep = lemma1_verify(
            f,
            f,
            &random_unit_samples(sub_seed(seed, i), MIN_EXTRA_SAMPLES),
            1e-10,
        )?;
        worst = worst
            .max(rep.linear_extension_residual)
            .max(rep.orthogonality_residual)
            .max(rep.g_equals_f_residual);
        failures += usize::from(!rep.all_pass());
    }
    report.check(Check::new("lemma1.rotations_pass", failures == 0, worst));
    for (i, &r) in BELT_RADII.iter().enumerate() {
        let params = BeltParameters::new(r)?;
        let samples = random_unit_samples(sub_seed(seed, 100 + i as u64), MIN_EXTRA_SAMPLES);
        let res = lemma1_verify(
            |a| belt_f_cartesian(a, params),
            |s| Ok(covariant_belt_g(s, params)),
            &samples,
            1e-10,
        );
        let (rejected, residual) = match res {
            Err(Error::InputInconsistent { residual, .. }) => (true, residual),
            Err(e) => return Err(e),
            Ok(rep) => (!rep.all_pass(), rep.g_equals_f_residual),
        };
        report.check(Check::new(
            format!("lemma1.r{r}.belt_rejected"),
            rejected,
            residual,
        ));
        let pair =
            belt_full_content_falsifier(params, sub_seed(seed, 200 + i as u64), FALSIFIER_SAMPLES)?;
        let d = pair.map(|p| p.discrepancy).unwrap_or(0.0);
        report.check(Check::new(
            format!("lemma1.r{r}.falsifier_finds_pair"),
            d > 1e-6,
            d,
        ));
    }
    Ok(())
}

fn lemma2(report: &mut RepresentationReport, seed: u64) -> Result<()> {
    for n in [2, 3] {
        let frame = lemma2_frame_gram(standard_projection_basis(n))?;
        let mut rng = seeded_rng(sub_seed(seed, n as u64));
        let extras = (0..MIN_EXTRA_SAMPLES)
            .map(|_| random_minimal_projection_with(&mut rng, n))
            .collect::<Result<Vec<_>>>()?;
        let mut worst = 0.0f64;
        let mut failures = 0;
        let mut mismatch_accepted = 0;
        for i in 0..20u64 {
            let s = sub_seed(seed, 100 * n as u64 + i);
            let u = random_unitary::<f64>(s, n)?;
            let rep = lemma2_verify(&frame, &extras, conjugation(&u), conjugation(&u), s, 1e-9)?;
            worst = worst
                .max(rep.pairing_residual)
                .max(rep.linear_extension_residual)
                .max(rep.hs_unitarity_residual)
                .max(rep.polarization_residual)
                .max(rep.g_equals_f_residual);
            failures += usize::from(!rep.all_pass());
            let v = random_unitary::<f64>(sub_seed(s, 1), n)?;
            match lemma2_verify(&frame, &extras, conjugation(&u), conjugation(&v), s, 1e-9) {
                Err(Error::InputInconsistent { .. }) => {}
                Err(e) => return Err(e),
                Ok(_) => mismatch_accepted += 1,
            }
        }
        report.check(Check::new(
            format!("lemma2.n{n}.unitaries_pass"),
            failures == 0,
            worst,
        ));
        report.check(Check::new(
            format!("lemma2.n{n}.mismatch_rejected"),
            mismatch_accepted == 0,
            mismatch_accepted as f64,
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tilted_witness_is_valid() {
        let (frame, w) = tilted_witness().unwrap();
        let v = DualConeWitness::validate(w, &frame, 0).unwrap();
        assert!((v.min_eigenvalue - 0.5 * (1.0 - 1.596_41)).abs() < 1e-5);
    }
}
