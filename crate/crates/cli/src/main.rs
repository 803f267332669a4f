// Copyright 2026 The gpolab Developers
// SPDX-License-Identifier: Apache-2.0

//! `gpolab`: regenerates the data files for clock/shift conjugate variables,
//! operator collimation, truncated equations of motion and the finite
//! oscillator.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gpolab_core::collimation::{pi_powers, random_hermitian, CollimationReport};
use gpolab_core::dense::{ComplexMatrix, HERMITIAN_TOLERANCE};
use gpolab_core::dynamics::{eom_residual, EomReport, Variable, DEFAULT_TRUNCATION};
use gpolab_core::gpo::{commutator_witness, symmetric_scale, GeneratorChecks, WitnessSource};
use gpolab_core::oscillator::{build_hamiltonian, spectrum_with, sweep, OscillatorSpec};
use gpolab_core::{ConjugatePair, Dimension, GpoError, GpoGenerators, SchwingerBasis};

use output::{float, Outputs};

const DEFAULT_L: i64 = 200;

#[derive(Parser)]
#[command(
    name = "gpolab",
    version,
    about = "Finite-dimensional conjugate variables from clock and shift operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write A, B, S and their invariant residuals as JSON.
    Generators(Common),
    /// Write φ, π and the commutator witness Z as JSON.
    Conjugate {
        #[command(flatten)]
        common: Common,
        /// φ lattice spacing; β follows from αβn = 2π. Defaults to √(2π/n).
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Write the Schwinger coefficient grid of one operator as CSV.
    Decompose {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Operator::Pi)]
        operator: Operator,
        /// Power applied to φ or π.
        #[arg(long, default_value_t = 1)]
        power: u32,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write φ-shift profiles of π^n and a random Hermitian operator, plus a
    /// collimation summary.
    Collimation {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3, 4, 5, 6])]
        powers: Vec<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write the oscillator spectrum for each requested frequency.
    Oscillator {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0])]
        omega: Vec<f64>,
    },
    /// Write λ_min and λ_max over a grid of half-dimensions and frequencies.
    Sweep {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [DEFAULT_L])]
        l: Vec<i64>,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0])]
        omega: Vec<f64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Write truncated equation-of-motion residuals for both variables.
    Eom {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        /// Highest odd order kept in the series.
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        truncation: usize,
    },
}

#[derive(Args)]
struct Common {
    /// Half-dimension; the Hilbert space has dimension 2l + 1.
    #[arg(long, allow_hyphen_values = true, default_value_t = DEFAULT_L)]
    l: i64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Operator {
    Phi,
    Pi,
    Oscillator,
    Random,
}

#[derive(Debug)]
pub enum CliError {
    /// Rejected flags; exit code 2.
    Usage(String),
    /// Computation failed; exit code 1, outputs removed.
    Runtime(String),
}

impl From<GpoError> for CliError {
    fn from(e: GpoError) -> Self {
        match e {
            GpoError::InvalidInput(msg) => CliError::Usage(msg),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

/// A hard invariant that exceeded its tolerance.
struct Violation {
    quantity: String,
    residual: f64,
    tolerance: f64,
}

impl Violation {
    fn check(out: &mut Vec<Violation>, quantity: impl Into<String>, residual: f64, tolerance: f64) {
        if residual.is_nan() || residual > tolerance {
            out.push(Violation {
                quantity: quantity.into(),
                residual,
                tolerance,
            });
        }
    }
}

fn dimension(l: i64) -> Result<Dimension, CliError> {
    usize::try_from(l)
        .map(Dimension::new)
        .map_err(|_| CliError::Usage(format!("--l must be a non-negative integer, got {l}")))
}

fn frequency(omega: f64) -> Result<f64, CliError> {
    if omega > 0.0 && omega.is_finite() {
        Ok(omega)
    } else {
        Err(CliError::Usage(format!("--omega must be positive, got {omega}")))
    }
}

fn hermitian_check(out: &mut Vec<Violation>, name: &str, m: &ComplexMatrix) -> Result<(), CliError> {
    let residual = m.hermitian_residual()?;
    Violation::check(
        out,
        format!("{name} hermiticity"),
        residual,
        HERMITIAN_TOLERANCE * m.max_norm().max(1.0),
    );
    Ok(())
}

#[derive(Serialize)]
struct GeneratorsFile<'a> {
    l: usize,
    n: usize,
    a: &'a ComplexMatrix,
    b: &'a ComplexMatrix,
    s: &'a ComplexMatrix,
    checks: GeneratorChecks,
}

fn cmd_generators(common: &Common, files: &mut Outputs) -> Result<Vec<Violation>, CliError> {
    let dim = dimension(common.l)?;
    let g = GpoGenerators::new(dim);
    let checks = g.checks();
    let violations = checks
        .violations()
        .into_iter()
        .map(|(name, residual, tolerance)| Violation {
            quantity: name.into(),
            residual,
            tolerance,
        })
        .collect();
    files.json(
        &format!("generators_l{}.json", dim.l()),
        &GeneratorsFile {
            l: dim.l(),
            n: dim.n(),
            a: &g.a,
            b: &g.b,
            s: &g.s,
            checks,
        },
    )?;
    Ok(violations)
}

#[derive(Serialize)]
struct ConjugateFile<'a> {
    l: usize,
    n: usize,
    alpha: f64,
    beta: f64,
    constraint_residual: f64,
    phi: &'a ComplexMatrix,
    pi: &'a ComplexMatrix,
    z: &'a ComplexMatrix,
    z_closed_form_difference: f64,
    z_structure_residual: f64,
    s4_residual: f64,
    phi_parity_residual: f64,
    pi_parity_residual: f64,
}

fn cmd_conjugate(common: &Common, alpha: Option<f64>, files: &mut Outputs) -> Result<Vec<Violation>, CliError> {
    let dim = dimension(common.l)?;
    let g = GpoGenerators::new(dim);
    let alpha = alpha.unwrap_or_else(|| symmetric_scale(dim));
    let p = ConjugatePair::with_alpha(&g, alpha)?;
    let direct = commutator_witness(&p, &g, WitnessSource::Direct)?;
    let closed = commutator_witness(&p, &g, WitnessSource::ClosedForm)?;
    let (s4, flip_phi, flip_pi) = p.parity_residuals(&g);

    let mut violations = Vec::new();
    Violation::check(&mut violations, "alpha*beta*n - 2pi", p.constraint_residual(), 1e-12);
    hermitian_check(&mut violations, "phi", &p.phi)?;
    hermitian_check(&mut violations, "pi", &p.pi)?;

    files.json(
        &format!("conjugate_l{}.json", dim.l()),
        &ConjugateFile {
            l: dim.l(),
            n: dim.n(),
            alpha: p.alpha,
            beta: p.beta,
            constraint_residual: p.constraint_residual(),
            phi: &p.phi,
            pi: &p.pi,
            z: &direct.z,
            z_closed_form_difference: direct.z.max_abs_diff(&closed.z)?,
            z_structure_residual: direct.structure_residual(),
            s4_residual: s4,
            phi_parity_residual: flip_phi,
            pi_parity_residual: flip_pi,
        },
    )?;
    Ok(violations)
}

fn cmd_decompose(
    common: &Common,
    operator: Operator,
    power: u32,
    omega: f64,
    seed: u64,
    files: &mut Outputs,
) -> Result<Vec<Violation>, CliError> {
    let dim = dimension(common.l)?;
    if power == 0 && matches!(operator, Operator::Phi | Operator::Pi) {
        return Err(CliError::Usage("--power must be at least 1".into()));
    }
    let g = GpoGenerators::new(dim);
    let p = ConjugatePair::new(&g);
    let (label, m) = match operator {
        Operator::Phi => (format!("phi{power}"), p.phi.pow(power)?),
        Operator::Pi => (format!("pi{power}"), p.pi.pow(power)?),
        Operator::Oscillator => {
            let spec = OscillatorSpec::new(dim, frequency(omega)?)?;
            (format!("oscillator_omega{omega}"), build_hamiltonian(&spec, &p)?)
        }
        Operator::Random => (format!("random_seed{seed}"), random_hermitian(dim, seed)),
    };
    let basis = SchwingerBasis::new(&g);
    let coeffs = basis.decompose(&m)?;
    let back = basis.reconstruct(&coeffs)?;

    let mut violations = Vec::new();
    let scale = m.max_norm().max(f64::MIN_POSITIVE);
    Violation::check(
        &mut violations,
        "round trip / max|M|",
        back.max_abs_diff(&m)? / scale,
        1e-10,
    );
    Violation::check(
        &mut violations,
        "coefficient hermiticity / max|M|",
        coeffs.hermiticity_residual() / scale,
        1e-10,
    );

    let l = dim.l() as i64;
    files.csv(
        &format!("decompose_l{}_{label}.csv", dim.l()),
        &["b", "a", "re", "im", "abs"],
        coeffs.rows().map(|r| {
            vec![
                (r.b + l).to_string(),
                (r.a + l).to_string(),
                float(r.re),
                float(r.im),
                float(r.abs),
            ]
        }),
    )?;
    Ok(violations)
}

fn cmd_collimation(
    common: &Common,
    powers: &[u32],
    seed: u64,
    files: &mut Outputs,
) -> Result<Vec<Violation>, CliError> {
    let dim = dimension(common.l)?;
    if dim.l() < 1 {
        return Err(CliError::Usage("collimation needs --l of at least 1".into()));
    }
    if powers.is_empty() || powers.contains(&0) {
        return Err(CliError::Usage("--powers must list positive integers".into()));
    }
    let mut powers = powers.to_vec();
    powers.sort_unstable();
    powers.dedup();

    let g = GpoGenerators::new(dim);
    let p = ConjugatePair::new(&g);
    let basis = SchwingerBasis::new(&g);
    let all = pi_powers(&p, *powers.last().expect("non-empty"));

    let mut violations = Vec::new();
    let mut summary = Vec::new();
    let write = |files: &mut Outputs, name: &str, report: &CollimationReport| {
        files.csv(
            name,
            &["a", "weight"],
            report.phi_profile.entries().map(|(a, w)| vec![a.to_string(), float(w)]),
        )
    };
    for &n in &powers {
        let report = CollimationReport::new(&basis.decompose(&all[n as usize - 1])?)?;
        Violation::check(
            &mut violations,
            format!("C_pi(pi^{n}) - 1"),
            (report.c_pi - 1.0).abs(),
            1e-12,
        );
        write(files, &format!("profile_pi{n}.csv"), &report)?;
        summary.push(vec![
            "pi".to_string(),
            n.to_string(),
            float(report.c_phi),
            float(report.c_pi),
        ]);
    }
    let random = CollimationReport::new(&basis.decompose(&random_hermitian(dim, seed))?)?;
    write(files, "profile_random.csv", &random)?;
    summary.push(vec![
        "random".to_string(),
        seed.to_string(),
        float(random.c_phi),
        float(random.c_pi),
    ]);
    files.csv("collimation_summary.csv", &["operator", "n", "C_phi", "C_pi"], summary)?;
    Ok(violations)
}

fn cmd_oscillator(common: &Common, omegas: &[f64], files: &mut Outputs) -> Result<Vec<Violation>, CliError> {
    let dim = dimension(common.l)?;
    if omegas.is_empty() {
        return Err(CliError::Usage("--omega needs at least one value".into()));
    }
    let specs = omegas
        .iter()
        .map(|&w| Ok(OscillatorSpec::new(dim, frequency(w)?)?))
        .collect::<Result<Vec<_>, CliError>>()?;
    let g = GpoGenerators::new(dim);
    let p = ConjugatePair::new(&g);
    let mut violations = Vec::new();
    for spec in &specs {
        let s = spectrum_with(spec, &p)?;
        let w = spec.omega_freq;
        Violation::check(
            &mut violations,
            format!("omega={w}: lambda_max - bound"),
            s.lambda_max - spec.lambda_max_bound(),
            1e-12 * spec.lambda_max_bound(),
        );
        files.csv(
            &format!("spectrum_l{}_omega{w}.csv", dim.l()),
            &["k", "lambda", "lambda_over_omega", "vanilla", "deviation"],
            s.eigenvalues
                .iter()
                .zip(&s.vanilla_deviation)
                .enumerate()
                .map(|(k, (&lam, &dev))| {
                    vec![
                        k.to_string(),
                        float(lam),
                        float(lam / w),
                        float(k as f64 + 0.5),
                        float(dev),
                    ]
                }),
        )?;
    }
    Ok(violations)
}

fn cmd_sweep(ls: &[i64], omegas: &[f64], files: &mut Outputs) -> Result<Vec<Violation>, CliError> {
    let ls = ls
        .iter()
        .map(|&l| dimension(l).map(|d| d.l()))
        .collect::<Result<Vec<_>, _>>()?;
    for &w in omegas {
        frequency(w)?;
    }
    let rows = sweep(&ls, omegas, false)?;
    let mut violations = Vec::new();
    for r in &rows {
        Violation::check(
            &mut violations,
            format!("l={} omega={}: lambda_max - bound", r.l, r.omega),
            r.lambda_max_over_omega - r.bound_over_omega,
            1e-12 * r.bound_over_omega,
        );
    }
    files.csv(
        "sweep.csv",
        &[
            "l",
            "dim",
            "omega",
            "lambda_min_over_omega",
            "lambda_max_over_omega",
            "bound_over_omega",
        ],
        rows.iter().map(|r| {
            vec![
                r.l.to_string(),
                r.dim.to_string(),
                float(r.omega),
                float(r.lambda_min_over_omega),
                float(r.lambda_max_over_omega),
                float(r.bound_over_omega),
            ]
        }),
    )?;
    Ok(violations)
}

fn cmd_eom(common: &Common, omega: f64, truncation: usize, files: &mut Outputs) -> Result<Vec<Violation>, CliError> {
    let dim = dimension(common.l)?;
    if truncation < 3 || truncation.is_multiple_of(2) {
        return Err(CliError::Usage(format!(
            "--truncation must be odd and at least 3, got {truncation}"
        )));
    }
    let spec = OscillatorSpec::new(dim, frequency(omega)?)?;
    let g = GpoGenerators::new(dim);
    let p = ConjugatePair::new(&g);
    let h = build_hamiltonian(&spec, &p)?;
    let reports = [Variable::Pi, Variable::Phi]
        .into_iter()
        .map(|v| eom_residual(&h, &p, &g, v, truncation))
        .collect::<Result<Vec<EomReport>, _>>()?;
    let mut violations = Vec::new();
    for r in &reports {
        Violation::check(
            &mut violations,
            format!("{:?} residual finite", r.variable),
            r.final_residual,
            f64::MAX,
        );
    }
    files.json("eom.json", &reports)?;
    for r in &reports {
        eprintln!(
            "{:?}: final residual at K={} is {:e}",
            r.variable, r.truncation, r.final_residual
        );
    }
    Ok(violations)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("GPOLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("GPOLAB_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Runtime(e.to_string()))
}

fn run(cli: &Cli) -> Result<(Outputs, Vec<Violation>), CliError> {
    configure_threads()?;
    let out_dir = match &cli.command {
        Command::Generators(c)
        | Command::Conjugate { common: c, .. }
        | Command::Decompose { common: c, .. }
        | Command::Collimation { common: c, .. }
        | Command::Oscillator { common: c, .. }
        | Command::Eom { common: c, .. } => &c.out,
        Command::Sweep { out, .. } => out,
    };
    let mut files = Outputs::new(out_dir)?;
    let result = match &cli.command {
        Command::Generators(c) => cmd_generators(c, &mut files),
        Command::Conjugate { common, alpha } => cmd_conjugate(common, *alpha, &mut files),
        Command::Decompose {
            common,
            operator,
            power,
            omega,
            seed,
        } => cmd_decompose(common, *operator, *power, *omega, *seed, &mut files),
        Command::Collimation { common, powers, seed } => cmd_collimation(common, powers, *seed, &mut files),
        Command::Oscillator { common, omega } => cmd_oscillator(common, omega, &mut files),
        Command::Sweep { l, omega, .. } => cmd_sweep(l, omega, &mut files),
        Command::Eom {
            common,
            omega,
            truncation,
        } => cmd_eom(common, *omega, *truncation, &mut files),
    };
    match result {
        Ok(violations) => Ok((files, violations)),
        Err(e) => {
            files.discard();
            Err(e)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((files, violations)) => {
            for path in files.paths() {
                println!("{}", path.display());
            }
            if violations.is_empty() {
                return ExitCode::SUCCESS;
            }
            for v in &violations {
                eprintln!(
                    "invariant violated: {} = {:e} (tolerance {:e})",
                    v.quantity, v.residual, v.tolerance
                );
            }
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
