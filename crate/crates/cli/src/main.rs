//! `ncrl`: batch front end for the representation analyses.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage error,
//! 3 numeric or input error.

mod commands;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ncrl_core::tomo::Tolerances;
use ncrl_core::BlochVector;

#[derive(Parser, Debug)]
#[command(
    name = "ncrl",
    version,
    about = "Noncommutative representations of classical conditional probabilities"
)]
pub struct Cli {
    /// PRNG seed, echoed into every report.
    #[arg(long, global = true, env = "NCRL_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Override a named tolerance: psd, rank, inconsistency or witness.
    #[arg(long = "tolerance", global = true, value_name = "NAME=VALUE", value_parser = parse_tolerance)]
    pub tolerances: Vec<(String, f64)>,

    /// Output format; JSON report by default, CSV grid for bloch-scan.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Lemma1Map {
    Rotation,
    Belt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Lemma2Map {
    Unitary,
    Transpose,
    UnitaryMismatch,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve for s from three two-outcome measurements and classify it.
    BlochSolve {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_vector)]
        a: BlochVector,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_vector)]
        b: BlochVector,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_vector)]
        c: BlochVector,
        #[arg(long)]
        pa: f64,
        #[arg(long)]
        pb: f64,
        #[arg(long)]
        pc: f64,
    },
    /// Grid scan of |s| over p × φ for the tilted setup (CSV by default).
    BlochScan {
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_3)]
        phi_min: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2 - 0.01)]
        phi_max: f64,
        #[arg(long, default_value_t = 0.76)]
        p_min: f64,
        #[arg(long, default_value_t = 1.0)]
        p_max: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
    /// Reconstruct the operator fixed by a frame and its probability table.
    TomoReconstruct {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        table: PathBuf,
    },
    /// Search a random (n+1)-measurement frame for a non-PSD dual-cone witness.
    TomoCounterexample {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        max_rays: usize,
        #[arg(long)]
        frame_out: Option<PathBuf>,
        #[arg(long)]
        table_out: Option<PathBuf>,
    },
    /// Check Born exactness of the belt map for one fixed state.
    BeltVerify {
        #[arg(long, default_value_t = 2.0)]
        r: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Look for a pair (a, s) whose inner product the belt map breaks.
    BeltFalsify {
        #[arg(long, default_value_t = 2.0)]
        r: f64,
        #[arg(long, default_value_t = ncrl_core::belt::FALSIFIER_SAMPLES)]
        max_samples: usize,
    },
    /// Certify a pair of sphere maps as one orthogonal map.
    Lemma1Verify {
        #[arg(long, value_enum, default_value_t = Lemma1Map::Rotation)]
        map: Lemma1Map,
        #[arg(long, default_value_t = 2.0)]
        r: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = ncrl_core::lemma::MIN_EXTRA_SAMPLES)]
        samples: usize,
    },
    /// Certify a pair of projection maps as one Hilbert–Schmidt-unitary map.
    Lemma2Verify {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Lemma2Map::Unitary)]
        map: Lemma2Map,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Run the full property suite.
    Selftest,
}

pub const TOLERANCE_NAMES: [&str; 4] = ["psd", "rank", "inconsistency", "witness"];

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got {s:?}"))?;
    if !TOLERANCE_NAMES.contains(&name) {
        return Err(format!(
            "unknown tolerance {name:?}; known: {}",
            TOLERANCE_NAMES.join(", ")
        ));
    }
    let v: f64 = value.parse().map_err(|e| format!("{value:?}: {e}"))?;
    if !(v.is_finite() && v >= 0.0) {
        return Err(format!("tolerance {name} must be finite and nonnegative"));
    }
    Ok((name.to_string(), v))
}

fn parse_vector(s: &str) -> Result<BlochVector, String> {
    let parts = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| format!("{s:?}: {e}"))?;
    match parts[..] {
        [x, y, z] => Ok(BlochVector::new(x, y, z)),
        _ => Err(format!("expected three comma-separated numbers, got {s:?}")),
    }
}

impl Cli {
    pub fn tolerances(&self) -> Tolerances {
        let mut t = Tolerances::default();
        for (name, v) in &self.tolerances {
            match name.as_str() {
                "psd" => t.psd = *v,
                "rank" => t.rank = *v,
                "inconsistency" => t.inconsistency = *v,
                "witness" => t.witness = *v,
                _ => unreachable!("validated by the parser"),
            }
        }
        t
    }

    pub fn tolerance_echo(&self) -> BTreeMap<String, f64> {
        let t = self.tolerances();
        BTreeMap::from([
            ("inconsistency".to_string(), t.inconsistency),
            ("psd".to_string(), t.psd),
            ("rank".to_string(), t.rank),
            ("witness".to_string(), t.witness),
        ])
    }
}

fn emit(cli: &Cli, bytes: &[u8]) -> std::io::Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(output) => {
            if let Err(e) = emit(&cli, &output.bytes) {
                eprintln!("error: {e}");
                return ExitCode::from(3);
            }
            for c in &output.failed {
                eprintln!("check failed: {c}");
            }
            ExitCode::from(if output.failed.is_empty() { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
