//! Acceptance criteria. Each test prints one PASS/FAIL line, then asserts.
//! Expected values are recomputed here with independent code paths
//! (nalgebra solves and eigensolvers, explicit trace sums).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen, Vector3};
use ncrl_core::belt::{
    belt_f_cartesian, belt_full_content_falsifier, covariant_belt_g, verify_belt_born,
    BeltParameters, FALSIFIER_SAMPLES,
};
use ncrl_core::bloch::{
    scan_region, solve_state_vector, ConditionalProbTriple, ThreeMeasurementSetup,
};
use ncrl_core::lemma::{
    conjugation, lemma1_verify, lemma2_frame_gram, lemma2_verify, random_unit_samples, rotate,
    standard_projection_basis, MIN_EXTRA_SAMPLES,
};
use ncrl_core::matrix::Matrix;
use ncrl_core::random::{
    random_density, random_hermitian, random_minimal_projection_with, random_rotation,
    random_unit_vector, random_unitary, seeded_rng, sub_seed,
};
use ncrl_core::tomo::{
    born_table, find_nonpsd_witness, frame_rank, random_frame, reconstruct_state, DualConeWitness,
    MeasurementFrame,
};
use ncrl_core::{BlochVector, Error};
use num_complex::Complex;

const REGION_CORNER_NORM: f64 = 1.0377;
const REGION_CORNER_TOL: f64 = 1e-3;
const CLOSED_FORM_TOL: f64 = 1e-12;
const ROUND_TRIP_TOL: f64 = 1e-9;
const WITNESS_EIGEN_MARGIN: f64 = 1e-8;
const BORN_SLACK: f64 = 1e-10;
const FEJER_TOL: f64 = 1e-10;
const BELT_BORN_TOL: f64 = 1e-12;
const BELT_IMAGE_TOL: f64 = 1e-12;
const LEMMA1_TOL: f64 = 1e-10;
const FALSIFIER_MIN_DISCREPANCY: f64 = 1e-6;
const LEMMA2_TOL: f64 = 1e-9;
const TILTED_S: [f64; 3] = [0.4, 1.49282, 0.4];

fn verdict(id: u32, title: &str, pass: bool, elapsed: Duration, budget: Duration, detail: String) {
    let ok = pass && elapsed < budget;
    println!(
        "{} criterion {id:>2} {title}: {detail}; {:.3}s (budget {}s)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    assert!(pass, "criterion {id} ({title}) failed: {detail}");
    assert!(
        elapsed < budget,
        "criterion {id} ({title}) exceeded {budget:?}: {elapsed:?}"
    );
}

fn na(m: &Matrix<f64>) -> DMatrix<Complex<f64>> {
    DMatrix::from_row_slice(m.dim(), m.dim(), m.entries())
}

fn v3(v: BlochVector) -> Vector3<f64> {
    Vector3::new(v.x, v.y, v.z)
}

/// Tr(AB) as an explicit double sum.
fn trace_ab(a: &Matrix<f64>, b: &Matrix<f64>) -> Complex<f64> {
    let n = a.dim();
    let mut acc = Complex::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

fn min_eigenvalue(m: &Matrix<f64>) -> f64 {
    SymmetricEigen::new(na(m))
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Tilted-frame |s| from the linear system a·s = b·s = c·s = p − ½.
fn tilted_norm_oracle(p: f64, phi: f64) -> f64 {
    let m = Matrix3::new(1.0, 0.0, 0.0, 0.0, phi.cos(), -phi.sin(), 0.0, 0.0, 1.0);
    let rhs = Vector3::repeat(p - 0.5);
    m.lu().solve(&rhs).expect("independent directions").norm()
}

#[test]
fn criterion_01_region() {
    let t = Instant::now();
    let scan = scan_region((FRAC_PI_3, FRAC_PI_2 - 0.01), (0.76, 1.0), 50).unwrap();
    let mut min_norm = f64::INFINITY;
    let mut worst_dev = 0.0f64;
    for pt in &scan.points {
        let oracle = tilted_norm_oracle(pt.p, pt.phi);
        min_norm = min_norm.min(oracle);
        worst_dev = worst_dev.max((oracle - pt.s_norm).abs() / oracle);
    }
    let corner = tilted_norm_oracle(0.76, FRAC_PI_3);
    let elapsed = t.elapsed();
    let pass = scan.points.len() == 2500
        && min_norm > 1.0
        && scan.density_count() == 0
        && worst_dev < 1e-12
        && (corner - REGION_CORNER_NORM).abs() <= REGION_CORNER_TOL
        && (scan.points[0].s_norm - corner).abs() < 1e-12;
    verdict(
        1,
        "region |s| > 1",
        pass,
        elapsed,
        Duration::from_secs(1),
        format!(
            "{} points, min |s| = {min_norm:.6}, corner |s| = {corner:.6}, density points = {}",
            scan.points.len(),
            scan.density_count()
        ),
    );
}

#[test]
fn criterion_02_closed_form_vs_linear_solve() {
    let t = Instant::now();
    let mut rng = seeded_rng(2);
    let mut worst = 0.0f64;
    let mut worst_abs = 0.0f64;
    let mut cases = 0;
    while cases < 1000 {
        let [a, b, c] = [0; 3].map(|_| random_unit_vector::<f64, _>(&mut rng));
        let Ok(setup) = ThreeMeasurementSetup::new(a, b, c) else {
            continue;
        };
        let p: [f64; 3] = [0; 3].map(|_| rand::Rng::gen(&mut rng));
        let s = solve_state_vector(
            &setup,
            &ConditionalProbTriple::new(p[0], p[1], p[2]).unwrap(),
        );
        let m = Matrix3::from_rows(&[v3(a).transpose(), v3(b).transpose(), v3(c).transpose()]);
        let oracle = m
            .lu()
            .solve(&Vector3::new(p[0] - 0.5, p[1] - 0.5, p[2] - 0.5))
            .unwrap();
        let d = (v3(s) - oracle).amax();
        // Agreement in units of max(1, |s|): absolute for |s| ≤ 1.
        worst = worst.max(d / oracle.norm().max(1.0));
        worst_abs = worst_abs.max(d);
        cases += 1;
    }
    let elapsed = t.elapsed();
    verdict(
        2,
        "closed form vs 3x3 solve",
        worst <= CLOSED_FORM_TOL,
        elapsed,
        Duration::from_secs(1),
        format!("{cases} cases, max |Δs|/max(1,|s|) = {worst:e}, max |Δs| = {worst_abs:e}"),
    );
}

/// Rank of the real-linear span of the frame's projections, via their
/// real/imaginary coordinate vectors.
fn rank_oracle(frame: &MeasurementFrame) -> usize {
    let n = frame.n();
    let cols: Vec<DVector<f64>> = frame
        .projections()
        .map(|p| {
            DVector::from_iterator(
                2 * n * n,
                p.matrix().entries().iter().flat_map(|z| [z.re, z.im]),
            )
        })
        .collect();
    DMatrix::from_columns(&cols)
        .svd(false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > 1e-8)
        .count()
}

#[test]
fn criterion_03_counting() {
    let t = Instant::now();
    let mut detail = Vec::new();
    let mut pass = true;
    for n in 2..=4 {
        let mut full = 0;
        for seed in 0..100u64 {
            let frame = random_frame(seed, n, n + 1).unwrap();
            let rank = frame_rank(&frame);
            pass &= rank == rank_oracle(&frame);
            full += usize::from(rank == n * n);
        }
        pass &= full >= 99;
        detail.push(format!("n={n}: {full}/100"));
    }
    let elapsed = t.elapsed();
    verdict(
        3,
        "counting identity",
        pass,
        elapsed,
        Duration::from_secs(10),
        detail.join(", "),
    );
}

#[test]
fn criterion_04_tomographic_round_trip() {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for n in 2..=4 {
        for i in 0..100u64 {
            let frame = random_frame(sub_seed(n as u64, i), n, n + 1).unwrap();
            let w = random_density::<f64>(sub_seed(100 + n as u64, i), n).unwrap();
            let table = born_table(&w, &frame).unwrap();
            let rec = reconstruct_state(&frame, &table).unwrap();
            worst = worst.max(rec.operator.matrix().max_abs_diff(w.matrix()));
        }
    }
    let elapsed = t.elapsed();
    verdict(
        4,
        "tomographic round trip",
        worst <= ROUND_TRIP_TOL,
        elapsed,
        Duration::from_secs(10),
        format!("300 states, max entry error = {worst:e}"),
    );
}

/// Min eigenvalue, worst out-of-range Born entry and worst row-sum defect.
fn witness_oracle(w: &Matrix<f64>, frame: &MeasurementFrame) -> (f64, f64, f64) {
    let mut out_of_range = f64::NEG_INFINITY;
    let mut row_defect = 0.0f64;
    for m in frame.measurements() {
        let mut sum = 0.0;
        for p in m {
            let v = trace_ab(w, p.matrix());
            out_of_range = out_of_range
                .max(-v.re)
                .max(v.re - 1.0)
                .max(v.im.abs() - 1.0);
            sum += v.re;
        }
        row_defect = row_defect.max((sum - 1.0).abs());
    }
    (min_eigenvalue(w), out_of_range, row_defect)
}

#[test]
fn criterion_05_counterexample_existence() {
    let t = Instant::now();
    let mut pass = true;
    let mut worst = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0f64);
    for n in [2, 3] {
        for seed in 0..20u64 {
            let frame = random_frame(sub_seed(500 + n as u64, seed), n, n + 1).unwrap();
            let w = find_nonpsd_witness(&frame, seed, 10_000).unwrap();
            let (eig, range, rows) = witness_oracle(w.operator.matrix(), &frame);
            pass &= eig < -WITNESS_EIGEN_MARGIN && range <= BORN_SLACK && rows <= BORN_SLACK;
            worst = (worst.0.max(eig), worst.1.max(range), worst.2.max(rows));
        }
    }
    let setup = ThreeMeasurementSetup::<f64>::tilted(FRAC_PI_3).unwrap();
    let frame = MeasurementFrame::from_bloch_directions(&setup.directions()).unwrap();
    let s = BlochVector::from_array(TILTED_S);
    let closed = solve_state_vector(&setup, &ConditionalProbTriple::uniform(0.9).unwrap());
    pass &= closed.max_abs_diff(s) < 1e-5;
    let tilted = s.state_operator();
    let (eig, range, rows) = witness_oracle(tilted.matrix(), &frame);
    let tilted_ok = DualConeWitness::validate(tilted, &frame, 0).is_ok()
        && eig < -WITNESS_EIGEN_MARGIN
        && range <= BORN_SLACK
        && rows <= BORN_SLACK;
    pass &= tilted_ok;
    let elapsed = t.elapsed();
    verdict(
        5,
        "non-PSD witnesses",
        pass,
        elapsed,
        Duration::from_secs(30),
        format!(
            "40 frames, worst min eig = {:e}, worst range excess = {:e}, worst row defect = {:e}; tilted instance min eig = {eig:.6}",
            worst.0, worst.1, worst.2
        ),
    );
}

#[test]
fn criterion_06_fejer() {
    let t = Instant::now();
    let mut worst_pair = f64::INFINITY;
    for n in 2..=4 {
        for i in 0..500u64 {
            let a = random_density::<f64>(sub_seed(600 + n as u64, 2 * i), n).unwrap();
            let b = random_density::<f64>(sub_seed(600 + n as u64, 2 * i + 1), n).unwrap();
            worst_pair = worst_pair.min(trace_ab(a.matrix(), b.matrix()).re);
        }
    }
    let mut worst_witness = f64::NEG_INFINITY;
    let mut found = 0;
    let mut i = 0u64;
    while found < 500 {
        let n = 2 + (i % 3) as usize;
        let a = random_hermitian::<f64>(sub_seed(700, i), n).unwrap();
        i += 1;
        let reference = min_eigenvalue(a.matrix());
        if reference >= -1e-9 {
            continue;
        }
        let q = a
            .spectral_decomposition()
            .into_iter()
            .min_by(|x, y| x.eigenvalue.total_cmp(&y.eigenvalue))
            .unwrap();
        assert!((q.eigenvalue - reference).abs() < 1e-10);
        worst_witness = worst_witness.max(trace_ab(a.matrix(), q.projection.matrix()).re);
        found += 1;
    }
    let elapsed = t.elapsed();
    verdict(
        6,
        "Fejér property",
        worst_pair >= -FEJER_TOL && worst_witness < 0.0,
        elapsed,
        Duration::from_secs(5),
        format!("1500 PSD pairs min Tr(AB) = {worst_pair:.3e}; 500 non-PSD max Tr(AQ) = {worst_witness:.3e}"),
    );
}

#[test]
fn criterion_07_belt_exactness() {
    let t = Instant::now();
    let mut pass = true;
    let mut detail = Vec::new();
    for (k, r) in [1.5, 2.0, 3.0].into_iter().enumerate() {
        let params = BeltParameters::new(r).unwrap();
        let reported = verify_belt_born(params, 10_000, 70 + k as u64).unwrap();
        let mut born = 0.0f64;
        let mut excess = f64::NEG_INFINITY;
        for a in random_unit_samples(80 + k as u64, 10_000) {
            let fa = belt_f_cartesian(a, params).unwrap();
            // Tr(½(𝟙 + r ẑ·σ) ½(𝟙 ± f(a)·σ)) = ½(1 ± r f(a)_z).
            born = born.max((0.5 * (1.0 + a.z) - 0.5 * (1.0 + r * fa.z)).abs());
            born = born.max((0.5 * (1.0 - a.z) - 0.5 * (1.0 - r * fa.z)).abs());
            excess = excess.max(fa.z.abs() - 1.0 / r);
        }
        pass &= reported <= BELT_BORN_TOL && born <= BELT_BORN_TOL && excess <= BELT_IMAGE_TOL;
        detail.push(format!(
            "r={r}: born {reported:.1e}/{born:.1e}, cap excess {excess:.1e}"
        ));
    }
    let elapsed = t.elapsed();
    verdict(
        7,
        "belt exactness",
        pass,
        elapsed,
        Duration::from_secs(1),
        detail.join("; "),
    );
}

#[test]
fn criterion_08_lemma1() {
    let t = Instant::now();
    let mut rng = seeded_rng(8);
    let mut worst = 0.0f64;
    let mut rotations_ok = true;
    for i in 0..50u64 {
        let rot = random_rotation(&mut rng);
        let m = nalgebra::Matrix3::from_fn(|i, j| rot[i][j]);
        assert!(
            (m.transpose() * m - Matrix3::identity()).amax() < 1e-12
                && (m.determinant() - 1.0).abs() < 1e-12
        );
        let f = |a| Ok(rotate(&rot, a));
        let rep = lemma1_verify(
            f,
            f,
            &random_unit_samples(sub_seed(8, i), MIN_EXTRA_SAMPLES),
            LEMMA1_TOL,
        )
        .unwrap();
        rotations_ok &= rep.is_linear_extension && rep.is_orthogonal && rep.g_equals_f;
        worst = worst
            .max(rep.linear_extension_residual)
            .max(rep.orthogonality_residual)
            .max(rep.g_equals_f_residual);
    }
    let mut belt_rejected = true;
    let mut discrepancies = Vec::new();
    for (k, r) in [1.5, 2.0, 3.0].into_iter().enumerate() {
        let params = BeltParameters::new(r).unwrap();
        let samples = random_unit_samples(90 + k as u64, MIN_EXTRA_SAMPLES);
        belt_rejected &= match lemma1_verify(
            |a| belt_f_cartesian(a, params),
            |s| Ok(covariant_belt_g(s, params)),
            &samples,
            LEMMA1_TOL,
        ) {
            Err(Error::InputInconsistent { .. }) => true,
            Ok(rep) => !(rep.is_linear_extension && rep.is_orthogonal && rep.g_equals_f),
            Err(e) => panic!("{e}"),
        };
        let found = belt_full_content_falsifier(params, 95 + k as u64, FALSIFIER_SAMPLES).unwrap();
        let d = found
            .map(|pair| {
                let fa = belt_f_cartesian(pair.a, params).unwrap();
                (pair.a.dot(pair.s) - fa.dot(pair.s * r)).abs()
            })
            .unwrap_or(0.0);
        discrepancies.push(d);
    }
    let falsified = discrepancies.iter().all(|&d| d > FALSIFIER_MIN_DISCREPANCY);
    let elapsed = t.elapsed();
    verdict(
        8,
        "orthogonal-map certifier",
        rotations_ok && belt_rejected && falsified,
        elapsed,
        Duration::from_secs(10),
        format!("50 rotations worst residual {worst:.1e}; belt rejected = {belt_rejected}; falsifier discrepancies {discrepancies:.3?}"),
    );
}

#[test]
fn criterion_09_lemma2() {
    let t = Instant::now();
    let mut pass = true;
    let mut worst = 0.0f64;
    let mut mismatches_rejected = 0;
    for n in [2, 3] {
        let frame = lemma2_frame_gram(standard_projection_basis(n)).unwrap();
        let mut rng = seeded_rng(900 + n as u64);
        let extras: Vec<_> = (0..MIN_EXTRA_SAMPLES)
            .map(|_| random_minimal_projection_with(&mut rng, n).unwrap())
            .collect();
        for i in 0..20u64 {
            let u = random_unitary::<f64>(sub_seed(910 + n as u64, i), n).unwrap();
            let uu = &u.adjoint() * &u;
            assert!(na(&uu).iter().enumerate().all(|(k, z)| (z - Complex::new(
                f64::from(u8::from(k % (n + 1) == 0)),
                0.0
            ))
            .norm()
                < 1e-12));
            let rep = lemma2_verify(
                &frame,
                &extras,
                conjugation(&u),
                conjugation(&u),
                i,
                LEMMA2_TOL,
            )
            .unwrap();
            pass &= rep.pairing_residual <= LEMMA2_TOL
                && rep.is_linear_extension
                && rep.is_hs_unitary
                && rep.g_equals_f;
            worst = worst
                .max(rep.pairing_residual)
                .max(rep.linear_extension_residual)
                .max(rep.hs_unitarity_residual)
                .max(rep.polarization_residual)
                .max(rep.g_equals_f_residual);
            let v = random_unitary::<f64>(sub_seed(920 + n as u64, i), n).unwrap();
            if matches!(
                lemma2_verify(
                    &frame,
                    &extras,
                    conjugation(&u),
                    conjugation(&v),
                    i,
                    LEMMA2_TOL
                ),
                Err(Error::InputInconsistent { .. })
            ) {
                mismatches_rejected += 1;
            }
        }
    }
    pass &= mismatches_rejected == 40;
    let elapsed = t.elapsed();
    verdict(
        9,
        "HS-unitary certifier",
        pass,
        elapsed,
        Duration::from_secs(20),
        format!("40 conjugations worst residual {worst:.1e}; mismatched pairs rejected {mismatches_rejected}/40"),
    );
}

#[test]
fn criterion_10_determinism() {
    let t = Instant::now();
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_ncrl"))
            .args(["selftest", "--seed", "10"])
            .output()
            .expect("binary runs");
        (out.status.code(), out.stdout)
    };
    let (first_code, first) = run();
    let (second_code, second) = run();
    let elapsed = t.elapsed();
    verdict(
        10,
        "selftest determinism",
        first_code == Some(0) && second_code == Some(0) && !first.is_empty() && first == second,
        elapsed,
        Duration::from_secs(60),
        format!(
            "exit codes {first_code:?}/{second_code:?}, {} bytes, identical = {}",
            first.len(),
            first == second
        ),
    );
}
