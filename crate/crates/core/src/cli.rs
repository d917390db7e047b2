//! Command-line front end. [`run`] parses arguments, executes one command and returns the
//! process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success (certify: ACCEPT) |
//! | 1 | certify: REJECT |
//! | 2 | unreadable or malformed input, bad arguments |
//! | 3 | input fails validation |
//! | 4 | dimension mismatch |
//! | 5 | product search did not reach its tolerance |

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::entropies::{conditional_h_basis, conditional_hmax, optimal_values};
use crate::error::Error;
use crate::guessing::{pguess_fixed, pguess_optimal, verify_certificate, CertificateBracket, ValueStatus, DEFAULT_RESTARTS};
use crate::io::{
    matrix_to_rows, read_json, read_measurement, read_state, rows_to_matrix, CertificateReport,
    InputEcho, InputError, MatrixRows, MeasurementFile, MeasurementQuantities, Provenance,
    ReportDocument, SearchReport, StateFile, Tolerances, Verdict,
};
use crate::linalg::C64;
use crate::measurements::{
    condition_residuals, qutrit_family, unbiased_basis, ConditionTarget, MeasurementBasis,
    ProductMode, QutritFamilyParams,
};
use crate::search::{search_product_basis, DEFAULT_SEARCH_RESTARTS};
use crate::states::{qubit_m_state, DensityMatrix};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECT: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_DIMENSION: i32 = 4;
pub const EXIT_SEARCH: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "maxrand", version, about = "Intrinsic randomness of projective measurements on quantum states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimal entropies of a state and an unbiased basis attaining them
    Optimal {
        state: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Guessing probability, entropies and condition residuals of a fixed measurement
    Evaluate {
        state: PathBuf,
        measurement: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Search two-qubit product bases meeting an optimality condition
    SearchProduct {
        state: PathBuf,
        #[arg(long, default_value = "hmin")]
        target: ConditionTarget,
        #[arg(long, default_value = "general")]
        mode: ProductMode,
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate guessing probability and entropies over a one-parameter family as CSV
    Sweep {
        #[arg(value_enum)]
        family: Family,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        /// Qutrit state for qutrit-k (default diag(0.5, 0.3, 0.2))
        #[arg(long)]
        state: Option<PathBuf>,
        /// Moduli of the qutrit family for qutrit-k
        #[arg(long, value_enum, default_value = "sqrt")]
        gamma: GammaChoice,
        #[command(flatten)]
        common: Common,
    },
    /// Check a claimed min-entropy against a dual certificate
    Certify {
        state: PathBuf,
        measurement: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        claim: f64,
        /// Dual operator to verify instead of computing one: a bare matrix or a certify report
        #[arg(long)]
        witness: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    QubitM,
    QutritK,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GammaChoice {
    /// square roots of the eigenvalues (min-entropy optimal)
    Sqrt,
    /// the eigenvalues (von Neumann optimal)
    Lambda,
    /// (l1, l3, l3) (max-entropy optimal)
    Flat,
}

#[derive(Debug, Clone, Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random restarts (default 32 for guessing, 200 for product search)
    #[arg(long)]
    restarts: Option<usize>,
    /// Output file (default stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-10)]
    tol_psd: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol_basis: f64,
    #[arg(long, default_value_t = 1e-5)]
    tol_bracket: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol_search: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol_certify: f64,
}

impl Common {
    fn tolerances(&self) -> Tolerances {
        Tolerances {
            psd: self.tol_psd,
            basis: self.tol_basis,
            bracket: self.tol_bracket,
            search: self.tol_search,
            certify: self.tol_certify,
        }
    }

    fn provenance(&self, seeded: bool, restarts: Option<usize>) -> Provenance {
        Provenance {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: seeded.then_some(self.seed),
            restarts,
            tolerances: self.tolerances(),
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Input(InputError),
    Library(Error),
    Output(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Output(_) => EXIT_PARSE,
            Failure::Input(InputError::Read { .. } | InputError::Parse { .. }) => EXIT_PARSE,
            Failure::Input(InputError::Invalid(e)) | Failure::Library(e) => match e {
                Error::DimensionMismatch { .. } | Error::NotFourDim { .. } => EXIT_DIMENSION,
                Error::NoSuccess { .. } => EXIT_SEARCH,
                _ => EXIT_VALIDATION,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Output(m) => f.write_str(m),
            Failure::Input(e) => write!(f, "{e}"),
            Failure::Library(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {failure}");
            failure.exit_code()
        }
    }
}

fn execute(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Optimal { state, common } => cmd_optimal(&state, &common),
        Command::Evaluate {
            state,
            measurement,
            common,
        } => cmd_evaluate(&state, &measurement, &common),
        Command::SearchProduct {
            state,
            target,
            mode,
            common,
        } => cmd_search_product(&state, target, mode, &common),
        Command::Sweep {
            family,
            from,
            to,
            steps,
            state,
            gamma,
            common,
        } => cmd_sweep(family, from, to, steps, state.as_deref(), gamma, &common),
        Command::Certify {
            state,
            measurement,
            claim,
            witness,
            common,
        } => cmd_certify(&state, &measurement, claim, witness.as_deref(), &common),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Output(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Output(format!("cannot write to stdout: {e}")))
        }
    }
}

fn emit_report(report: &ReportDocument, out: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| Failure::Output(format!("cannot serialise report: {e}")))?;
    text.push('\n');
    emit(&text, out)
}

fn empty_report(command: &str, provenance: Provenance) -> ReportDocument {
    ReportDocument {
        command: command.to_string(),
        input: InputEcho::default(),
        optimal: None,
        achieving_basis: None,
        quantities: None,
        residuals: None,
        certificate: None,
        search: None,
        verdict: None,
        provenance,
    }
}

fn load_pair(
    state: &Path,
    measurement: &Path,
    common: &Common,
) -> Result<(StateFile, DensityMatrix, MeasurementFile, MeasurementBasis), Failure> {
    let (state_file, rho) = read_state(state, common.tol_psd)?;
    let (measurement_file, m) = read_measurement(measurement, common.tol_basis)?;
    if rho.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: m.dim(),
        }
        .into());
    }
    Ok((state_file, rho, measurement_file, m))
}

fn certificate_report(
    rho: &DensityMatrix,
    m: &MeasurementBasis,
    bracket: &CertificateBracket,
) -> Result<CertificateReport, Failure> {
    let check = verify_certificate(rho, m, &bracket.witness_x)?;
    Ok(CertificateReport {
        lower: bracket.lower,
        upper: bracket.upper,
        gap: bracket.gap,
        h_min_certified: (-bracket.upper.log2()).max(0.0),
        feasible: check.feasible,
        min_slack: check.min_slack,
        witness_x: matrix_to_rows(&bracket.witness_x),
    })
}

fn cmd_optimal(state: &Path, common: &Common) -> Result<i32, Failure> {
    let (state_file, rho) = read_state(state, common.tol_psd)?;
    let mut report = empty_report("optimal", common.provenance(false, None));
    report.input.state = Some(state_file);
    report.optimal = Some(optimal_values(&rho));
    let basis = unbiased_basis(&rho);
    report.residuals = Some(condition_residuals(&rho, &basis)?);
    report.achieving_basis = Some(MeasurementFile::from_basis(&basis));
    emit_report(&report, common.out.as_deref())?;
    Ok(EXIT_OK)
}

fn cmd_evaluate(state: &Path, measurement: &Path, common: &Common) -> Result<i32, Failure> {
    let (state_file, rho, measurement_file, m) = load_pair(state, measurement, common)?;
    let restarts = common.restarts.unwrap_or(DEFAULT_RESTARTS);
    let guess = pguess_fixed(&rho, &m, common.seed, restarts)?;
    let hmax = conditional_hmax(&rho, &m)?;
    let mut report = empty_report("evaluate", common.provenance(true, Some(restarts)));
    report.input.state = Some(state_file);
    report.input.measurement = Some(measurement_file);
    report.optimal = Some(optimal_values(&rho));
    report.quantities = Some(MeasurementQuantities {
        p_guess: guess.value,
        p_guess_status: if guess.bracket.gap <= common.tol_bracket {
            ValueStatus::Exact
        } else {
            ValueStatus::Bracketed
        },
        h_min: (-guess.value.log2()).max(0.0),
        h: conditional_h_basis(&rho, &m)?,
        h_max: hmax.h_max,
        p_secr: hmax.p_secr,
        p_secr_upper: hmax.p_secr_upper,
    });
    report.residuals = Some(condition_residuals(&rho, &m)?);
    report.certificate = Some(certificate_report(&rho, &m, &guess.bracket)?);
    emit_report(&report, common.out.as_deref())?;
    Ok(EXIT_OK)
}

fn cmd_search_product(
    state: &Path,
    target: ConditionTarget,
    mode: ProductMode,
    common: &Common,
) -> Result<i32, Failure> {
    let (state_file, rho) = read_state(state, common.tol_psd)?;
    let restarts = common.restarts.unwrap_or(DEFAULT_SEARCH_RESTARTS);
    let result = search_product_basis(&rho, target, mode, common.seed, restarts, common.tol_search)?;
    let mut report = empty_report("search-product", common.provenance(true, Some(restarts)));
    report.input.state = Some(state_file);
    report.input.target = Some(target);
    report.input.mode = Some(mode);
    report.residuals = Some(condition_residuals(&rho, &result.basis)?);
    report.search = Some(SearchReport {
        success: result.success,
        residual: result.residual,
        tolerance: common.tol_search,
        angles: result.angles.clone(),
        restarts_used: result.restarts_used,
        basis: MeasurementFile::from_basis(&result.basis),
    });
    emit_report(&report, common.out.as_deref())?;
    if result.success {
        Ok(EXIT_OK)
    } else {
        eprintln!(
            "error: {}",
            Error::NoSuccess {
                best_residual: result.residual
            }
        );
        Ok(EXIT_SEARCH)
    }
}

/// `printf("%.12g")`.
pub fn format_g12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exponent) = sci.split_once('e').expect("scientific format");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exponent) {
        let mantissa = trim_zeros(mantissa);
        format!("{mantissa}e{}{:02}", if exponent < 0 { '-' } else { '+' }, exponent.abs())
    } else {
        let decimals = (DIGITS - 1 - exponent).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn sweep_grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>, Failure> {
    if !from.is_finite() || !to.is_finite() || steps == 0 {
        return Err(Failure::Usage(format!(
            "invalid range: from {from} to {to} in {steps} steps"
        )));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    Ok((0..steps)
        .map(|i| {
            if i == steps - 1 {
                to
            } else {
                from + (to - from) * i as f64 / (steps - 1) as f64
            }
        })
        .collect())
}

fn sweep_row(param: f64, rho: &DensityMatrix, m: &MeasurementBasis, common: &Common) -> Result<String, Failure> {
    let restarts = common.restarts.unwrap_or(DEFAULT_RESTARTS);
    let p = pguess_fixed(rho, m, common.seed, restarts)?.value;
    let h = conditional_h_basis(rho, m)?;
    let hmax = conditional_hmax(rho, m)?.h_max;
    Ok(format!(
        "{},{},{},{},{}\n",
        format_g12(param),
        format_g12(p),
        format_g12((-p.log2()).max(0.0)),
        format_g12(h),
        format_g12(hmax)
    ))
}

fn cmd_sweep(
    family: Family,
    from: f64,
    to: f64,
    steps: usize,
    state: Option<&Path>,
    gamma: GammaChoice,
    common: &Common,
) -> Result<i32, Failure> {
    let grid = sweep_grid(from, to, steps)?;
    let mut csv = String::from("param,p_guess,h_min,h,h_max\n");
    match family {
        Family::QubitM => {
            if grid.iter().any(|m| !(0.0..=1.0).contains(m)) {
                return Err(Failure::Usage("qubit-m requires 0 <= m <= 1".into()));
            }
            let s = 0.5f64.sqrt();
            let sigma_x = MeasurementBasis::from_vectors(
                vec![vec![C64::new(s, 0.0), C64::new(s, 0.0)], vec![C64::new(s, 0.0), C64::new(-s, 0.0)]],
                common.tol_basis,
            )?;
            for &m in &grid {
                csv.push_str(&sweep_row(m, &qubit_m_state(m)?, &sigma_x, common)?);
            }
        }
        Family::QutritK => {
            let rho = match state {
                Some(path) => read_state(path, common.tol_psd)?.1,
                None => DensityMatrix::from_probabilities(&[0.5, 0.3, 0.2])?,
            };
            if rho.dim() != 3 {
                return Err(Error::DimensionMismatch {
                    expected: 3,
                    found: rho.dim(),
                }
                .into());
            }
            let (l, _) = rho.eigenbasis_descending();
            let gamma = match gamma {
                GammaChoice::Sqrt => [l[0].sqrt(), l[1].sqrt(), l[2].sqrt()],
                GammaChoice::Lambda => [l[0], l[1], l[2]],
                GammaChoice::Flat => [l[0], l[2], l[2]],
            };
            QutritFamilyParams::new(gamma, 0.0)?;
            let eigenbasis = MeasurementBasis::eigenbasis(&rho);
            for &k in &grid {
                let m = qutrit_family(gamma, k, &eigenbasis)?;
                csv.push_str(&sweep_row(k, &rho, &m, common)?);
            }
        }
    }
    emit(&csv, common.out.as_deref())?;
    Ok(EXIT_OK)
}

fn read_witness(path: &Path) -> Result<MatrixRows, Failure> {
    let value: serde_json::Value = read_json(path)?;
    let rows = if value.is_array() {
        Some(value)
    } else {
        value
            .pointer("/certificate/witness_x")
            .or_else(|| value.pointer("/witness_x"))
            .cloned()
    };
    let parse_error = |message: String| {
        Failure::Input(InputError::Parse {
            path: path.display().to_string(),
            message,
        })
    };
    let rows = rows.ok_or_else(|| parse_error("no witness matrix found".into()))?;
    serde_json::from_value(rows).map_err(|e| parse_error(e.to_string()))
}

fn cmd_certify(
    state: &Path,
    measurement: &Path,
    claim: f64,
    witness: Option<&Path>,
    common: &Common,
) -> Result<i32, Failure> {
    let (state_file, rho, measurement_file, m) = load_pair(state, measurement, common)?;
    let restarts = common.restarts.unwrap_or(DEFAULT_RESTARTS);
    let certificate = match witness {
        Some(path) => {
            let x = rows_to_matrix(&read_witness(path)?)?;
            let check = verify_certificate(&rho, &m, &x)?;
            // every measurement satisfies P_guess >= (tr sqrt(rho))^2 / d
            let lower = pguess_optimal(&rho);
            CertificateReport {
                lower,
                upper: check.upper,
                gap: check.upper - lower,
                h_min_certified: (-check.upper.log2()).max(0.0),
                feasible: check.feasible,
                min_slack: check.min_slack,
                witness_x: matrix_to_rows(&x),
            }
        }
        None => {
            let guess = pguess_fixed(&rho, &m, common.seed, restarts)?;
            certificate_report(&rho, &m, &guess.bracket)?
        }
    };
    let certified = certificate.h_min_certified;
    let accepted = certificate.feasible && certified >= claim - common.tol_certify;
    let computed = witness.is_none();
    let mut report = empty_report("certify", common.provenance(computed, computed.then_some(restarts)));
    report.input.state = Some(state_file);
    report.input.measurement = Some(measurement_file);
    report.input.claimed_hmin = Some(claim);
    report.certificate = Some(certificate);
    report.verdict = Some(Verdict {
        accepted,
        verdict: if accepted { "ACCEPT" } else { "REJECT" }.to_string(),
        claimed_hmin: claim,
        certified_hmin: certified,
        tolerance: common.tol_certify,
    });
    emit_report(&report, common.out.as_deref())?;
    Ok(if accepted { EXIT_OK } else { EXIT_REJECT })
}
