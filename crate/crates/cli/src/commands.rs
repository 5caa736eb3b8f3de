use std::path::Path;

use ncrl_core::belt::{
    belt_f_cartesian, belt_full_content_falsifier, belt_image_gap, verify_belt_born, BeltParameters,
};
use ncrl_core::bloch::{
    born_residual, classify_representation, classify_via_psd, density_boundary,
    fit_general_operator, scan_region, solve_state_vector, ConditionalProbTriple,
    ThreeMeasurementSetup,
};
use ncrl_core::hermitian::{is_psd, MinimalProjection};
use ncrl_core::io::{frame_to_json, parse_frame, parse_table, save_frame, save_table};
use ncrl_core::lemma::{
    conjugation, lemma1_verify, lemma2_frame_gram, lemma2_verify, random_unit_samples, rotate,
    standard_projection_basis, MIN_EXTRA_SAMPLES,
};
use ncrl_core::matrix::Matrix;
use ncrl_core::pauli::pauli_compose;
use ncrl_core::random::{
    random_minimal_projection_with, random_rotation, random_unitary, seeded_rng, sub_seed,
};
use ncrl_core::report::{
    fmt_sig, matrix_value, serialize_report, sha256_hex, vector_value, Check, RepresentationReport,
};
use ncrl_core::selftest::run_selftest;
use ncrl_core::tomo::{
    born_table, find_nonpsd_witness_with, frame_rank_with, random_frame, reconstruct_state_with,
    HermitianBasis,
};
use ncrl_core::{Error, Result};
use serde_json::Value;

use crate::{Cli, Command, Format, Lemma1Map, Lemma2Map};

pub struct Output {
    pub bytes: Vec<u8>,
    pub failed: Vec<String>,
}

impl Output {
    fn report(report: &RepresentationReport, format: Format) -> Self {
        let bytes = match format {
            Format::Json => serialize_report(report),
            Format::Csv => checks_csv(report),
        };
        Self {
            bytes,
            failed: report.failed().iter().map(|c| c.name.clone()).collect(),
        }
    }
}

fn checks_csv(report: &RepresentationReport) -> Vec<u8> {
    let mut out = String::from("name,pass,residual\n");
    for c in &report.checks {
        out.push_str(&format!("{},{},{}\n", c.name, c.pass, fmt_sig(c.residual)));
    }
    out.into_bytes()
}

pub fn run(cli: &Cli) -> Result<Output> {
    let format = cli.format.unwrap_or(Format::Json);
    let mut report = match &cli.command {
        Command::BlochScan {
            phi_min,
            phi_max,
            p_min,
            p_max,
            steps,
        } => {
            let scan = scan_region((*phi_min, *phi_max), (*p_min, *p_max), *steps)?;
            if cli.format.unwrap_or(Format::Csv) == Format::Csv {
                let failed = if scan.disagreements() == 0 {
                    vec![]
                } else {
                    vec!["classifiers.agree".to_string()]
                };
                return Ok(Output {
                    bytes: scan.to_csv().into_bytes(),
                    failed,
                });
            }
            let mut r = RepresentationReport::new("bloch-scan", cli.seed);
            r.param("phi_min", *phi_min)
                .param("phi_max", *phi_max)
                .param("p_min", *p_min)
                .param("p_max", *p_max);
            r.param("steps", *steps as u64);
            r.put("points", scan.points.len() as u64)
                .put("density_points", scan.density_count() as u64);
            r.put("phi_half_open", scan.phi_half_open);
            r.put_scalar("min_norm", scan.min_norm());
            r.put_scalar("density_boundary_at_phi_min", density_boundary(*phi_min));
            r.check(Check::new(
                "classifiers.agree",
                scan.disagreements() == 0,
                scan.disagreements() as f64,
            ));
            r.verdict = if scan.density_count() == 0 {
                "noncommutative-only"
            } else {
                "mixed"
            }
            .to_string();
            r
        }
        Command::BlochSolve {
            a,
            b,
            c,
            pa,
            pb,
            pc,
        } => bloch_solve(cli, [*a, *b, *c], [*pa, *pb, *pc])?,
        Command::TomoReconstruct { frame, table } => tomo_reconstruct(cli, frame, table)?,
        Command::TomoCounterexample {
            n,
            max_rays,
            frame_out,
            table_out,
        } => tomo_counterexample(
            cli,
            *n,
            *max_rays,
            frame_out.as_deref(),
            table_out.as_deref(),
        )?,
        Command::BeltVerify { r, samples } => belt_verify(cli, *r, *samples)?,
        Command::BeltFalsify { r, max_samples } => belt_falsify(cli, *r, *max_samples)?,
        Command::Lemma1Verify {
            map,
            r,
            tol,
            samples,
        } => lemma1(cli, *map, *r, *tol, *samples)?,
        Command::Lemma2Verify { n, map, tol } => lemma2(cli, *n, *map, *tol)?,
        Command::Selftest => run_selftest(cli.seed)?,
    };
    for (k, v) in cli.tolerance_echo() {
        report.param(&format!("tolerance.{k}"), v);
    }
    Ok(Output::report(&report, format))
}

fn bloch_solve(
    cli: &Cli,
    dirs: [ncrl_core::BlochVector; 3],
    p: [f64; 3],
) -> Result<RepresentationReport> {
    let setup = ThreeMeasurementSetup::new(dirs[0], dirs[1], dirs[2])?;
    let probs = ConditionalProbTriple::new(p[0], p[1], p[2])?;
    let s = solve_state_vector(&setup, &probs);
    let fit = fit_general_operator(&setup, &probs)?;
    let verdict = classify_representation(s);
    let mut r = RepresentationReport::new("bloch-solve", cli.seed);
    r.param("a", vector_value(dirs[0]))
        .param("b", vector_value(dirs[1]))
        .param("c", vector_value(dirs[2]));
    r.param("pa", p[0]).param("pb", p[1]).param("pc", p[2]);
    r.put("s", vector_value(s)).put_scalar("s_norm", s.norm());
    r.put("general_operator", matrix_value(&pauli_compose(&fit)));
    r.put("state_operator", matrix_value(s.state_operator().matrix()));
    r.put_scalar(
        "state_operator_min_eigenvalue",
        s.state_operator().min_eigenvalue(),
    );
    r.check(Check::at_most(
        "born.residual",
        born_residual(&setup, &probs, &fit)?,
        1e-10,
    ));
    r.check(Check::at_most(
        "fit.matches_closed_form",
        fit.s.max_abs_diff(s) / s.norm().max(1.0),
        1e-10,
    ));
    r.check(Check::new(
        "classifiers.agree",
        classify_via_psd(s, 1e-10) == verdict,
        0.0,
    ));
    r.verdict = verdict.as_str().to_string();
    Ok(r)
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn tomo_reconstruct(
    cli: &Cli,
    frame_path: &Path,
    table_path: &Path,
) -> Result<RepresentationReport> {
    let tol = cli.tolerances();
    let (fb, tb) = (read(frame_path)?, read(table_path)?);
    let frame = parse_frame(&fb)?;
    let table = parse_table(&tb)?;
    let rec = reconstruct_state_with(&frame, &table, &HermitianBasis::gell_mann(frame.n()), &tol)?;
    let min_eig = rec.operator.min_eigenvalue();
    let mut r = RepresentationReport::new("tomo-reconstruct", cli.seed);
    r.param("frame_sha256", sha256_hex(&fb))
        .param("table_sha256", sha256_hex(&tb));
    r.param("n", frame.n() as u64).param("k", frame.k() as u64);
    r.put("operator", matrix_value(rec.operator.matrix()))
        .put("rank", rec.rank as u64);
    r.put_scalar("min_eigenvalue", min_eig)
        .put_scalar("trace", rec.operator.trace());
    r.check(Check::at_most(
        "table.consistency",
        rec.residual,
        tol.inconsistency,
    ));
    r.verdict = if is_psd(&rec.operator, tol.psd) {
        "quantum-density"
    } else {
        "noncommutative-only"
    }
    .to_string();
    Ok(r)
}

fn tomo_counterexample(
    cli: &Cli,
    n: usize,
    max_rays: usize,
    frame_out: Option<&Path>,
    table_out: Option<&Path>,
) -> Result<RepresentationReport> {
    let tol = cli.tolerances();
    let frame = random_frame(cli.seed, n, n + 1)?;
    let mut r = RepresentationReport::new("tomo-counterexample", cli.seed);
    r.param("n", n as u64).param("max_rays", max_rays as u64);
    r.put(
        "frame",
        serde_json::to_value(frame_to_json(&frame)).expect("frame serializes"),
    );
    r.put("frame_rank", frame_rank_with(&frame, tol.rank) as u64);
    let witness = match find_nonpsd_witness_with(&frame, sub_seed(cli.seed, 1), max_rays, &tol) {
        Ok(w) => w,
        Err(Error::SearchExhausted { rays }) => {
            r.check(Check::new("witness.found", false, rays as f64));
            r.verdict = "no-witness".to_string();
            return Ok(r);
        }
        Err(e) => return Err(e),
    };
    let table = born_table(&witness.operator, &frame)?;
    let out_of_range = table
        .entries()
        .map(|p| (-p).max(p - 1.0))
        .fold(f64::NEG_INFINITY, f64::max);
    r.put("witness", matrix_value(witness.operator.matrix()));
    r.put("table", Value::from(table.rows().to_vec()));
    r.put("ray_index", witness.direction_seed);
    r.put_scalar("min_eigenvalue", witness.min_eigenvalue);
    r.check(Check::new(
        "witness.negative_eigenvalue",
        witness.min_eigenvalue < -tol.witness,
        witness.min_eigenvalue,
    ));
    r.check(Check::at_most(
        "table.entries_in_unit_interval",
        out_of_range.max(0.0),
        1e-10,
    ));
    r.check(Check::at_most(
        "table.row_sums",
        table.max_row_sum_defect(),
        1e-10,
    ));
    if let Some(p) = frame_out {
        save_frame(&frame, p)?;
    }
    if let Some(p) = table_out {
        save_table(&table, p)?;
    }
    r.verdict = "noncommutative-only".to_string();
    Ok(r)
}

fn belt_verify(cli: &Cli, radius: f64, samples: usize) -> Result<RepresentationReport> {
    let params = BeltParameters::new(radius)?;
    let born = verify_belt_born(params, samples, cli.seed)?;
    let mut excess = f64::NEG_INFINITY;
    for a in random_unit_samples(sub_seed(cli.seed, 1), samples) {
        excess = excess.max(belt_f_cartesian(a, params)?.z.abs() - 1.0 / radius);
    }
    let mut r = RepresentationReport::new("belt-verify", cli.seed);
    r.param("r", radius).param("samples", samples as u64);
    r.put_scalar("max_born_error", born)
        .put_scalar("cap_half_angle", belt_image_gap(params));
    r.put(
        "state_operator",
        matrix_value(ncrl_core::belt::belt_state_operator(params).matrix()),
    );
    r.check(Check::at_most("born.exact", born, 1e-12));
    r.check(Check::at_most("image.in_belt", excess.max(0.0), 1e-12));
    r.verdict = "born-preserving".to_string();
    Ok(r)
}

fn belt_falsify(cli: &Cli, radius: f64, max_samples: usize) -> Result<RepresentationReport> {
    let params = BeltParameters::new(radius)?;
    let mut r = RepresentationReport::new("belt-falsify", cli.seed);
    r.param("r", radius)
        .param("max_samples", max_samples as u64);
    match belt_full_content_falsifier(params, cli.seed, max_samples)? {
        Some(pair) => {
            r.put("a", vector_value(pair.a))
                .put("s", vector_value(pair.s));
            r.put("sample_index", pair.sample_index as u64)
                .put_scalar("discrepancy", pair.discrepancy);
            r.check(Check::new("falsifier.found_pair", true, pair.discrepancy));
            r.verdict = "not-inner-product-preserving".to_string();
        }
        None => {
            r.check(Check::new("falsifier.found_pair", false, 0.0));
            r.verdict = "no-violation-found".to_string();
        }
    }
    Ok(r)
}

fn lemma1(
    cli: &Cli,
    map: Lemma1Map,
    radius: f64,
    tol: f64,
    samples: usize,
) -> Result<RepresentationReport> {
    let pts = random_unit_samples(sub_seed(cli.seed, 1), samples);
    let mut r = RepresentationReport::new("lemma1-verify", cli.seed);
    r.param("tol", tol).param("samples", samples as u64);
    let result = match map {
        Lemma1Map::Rotation => {
            r.param("map", "rotation");
            let rot = random_rotation(&mut seeded_rng(cli.seed));
            r.put(
                "rotation",
                Value::from(rot.iter().map(|row| row.to_vec()).collect::<Vec<_>>()),
            );
            let f = |a| Ok(rotate(&rot, a));
            lemma1_verify(f, f, &pts, tol)
        }
        Lemma1Map::Belt => {
            r.param("map", "belt").param("r", radius);
            let params = BeltParameters::new(radius)?;
            lemma1_verify(
                |a| belt_f_cartesian(a, params),
                |s| Ok(ncrl_core::belt::covariant_belt_g(s, params)),
                &pts,
                tol,
            )
        }
    };
    match result {
        Ok(rep) => {
            r.check(Check::at_most(
                "biorthogonality",
                rep.biorthogonality_residual,
                tol,
            ));
            r.check(Check::at_most(
                "linear_extension",
                rep.linear_extension_residual,
                tol,
            ));
            r.check(Check::at_most(
                "orthogonality",
                rep.orthogonality_residual,
                tol,
            ));
            r.check(Check::at_most("g_equals_f", rep.g_equals_f_residual, tol));
        }
        Err(Error::InputInconsistent { residual, .. }) => {
            r.check(Check::new("biorthogonality", false, residual));
        }
        Err(e) => return Err(e),
    }
    r.verdict = if r.all_pass() {
        "orthogonal"
    } else {
        "not-orthogonal"
    }
    .to_string();
    Ok(r)
}

fn lemma2(cli: &Cli, n: usize, map: Lemma2Map, tol: f64) -> Result<RepresentationReport> {
    let frame = lemma2_frame_gram(standard_projection_basis(n))?;
    let mut rng = seeded_rng(sub_seed(cli.seed, 1));
    let extras = (0..MIN_EXTRA_SAMPLES)
        .map(|_| random_minimal_projection_with(&mut rng, n))
        .collect::<Result<Vec<MinimalProjection<f64>>>>()?;
    let u = random_unitary::<f64>(sub_seed(cli.seed, 2), n)?;
    let v = random_unitary::<f64>(sub_seed(cli.seed, 3), n)?;
    let hs_seed = sub_seed(cli.seed, 4);
    let mut r = RepresentationReport::new("lemma2-verify", cli.seed);
    r.param("n", n as u64).param("tol", tol);
    r.put_scalar("gram_min_singular_value", frame.min_singular_value());
    let transpose = |m: &Matrix<f64>| m.transpose();
    let result = match map {
        Lemma2Map::Unitary => {
            r.param("map", "unitary").put("u", matrix_value(&u));
            lemma2_verify(
                &frame,
                &extras,
                conjugation(&u),
                conjugation(&u),
                hs_seed,
                tol,
            )
        }
        Lemma2Map::UnitaryMismatch => {
            r.param("map", "unitary-mismatch")
                .put("u", matrix_value(&u))
                .put("v", matrix_value(&v));
            lemma2_verify(
                &frame,
                &extras,
                conjugation(&u),
                conjugation(&v),
                hs_seed,
                tol,
            )
        }
        Lemma2Map::Transpose => {
            r.param("map", "transpose");
            lemma2_verify(&frame, &extras, transpose, transpose, hs_seed, tol)
        }
    };
    match result {
        Ok(rep) => {
            r.check(Check::at_most("pairing", rep.pairing_residual, tol));
            r.check(Check::at_most(
                "linear_extension",
                rep.linear_extension_residual,
                tol,
            ));
            r.check(Check::at_most(
                "hs_unitarity",
                rep.hs_unitarity_residual,
                tol,
            ));
            r.check(Check::at_most(
                "polarization",
                rep.polarization_residual,
                tol,
            ));
            r.check(Check::at_most("g_equals_f", rep.g_equals_f_residual, tol));
        }
        Err(Error::InputInconsistent { residual, .. }) => {
            r.check(Check::new("pairing", false, residual));
        }
        Err(e) => return Err(e),
    }
    r.verdict = if r.all_pass() {
        "hs-unitary"
    } else {
        "not-hs-unitary"
    }
    .to_string();
    Ok(r)
}
