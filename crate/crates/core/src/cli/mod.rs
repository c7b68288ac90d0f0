//! Command-line front end.
//!
//! Every capability is exposed as a subcommand with stable file formats and
//! exit codes that shell pipelines can branch on:
//!
//! * `0` — positive verdict or successful run (corner positive, member,
//!   simulation finished)
//! * `1` — negative verdict; the run itself succeeded (not positive,
//!   non-member)
//! * `2` — heuristic inconclusive (refutation found nothing, or dynamics ran
//!   out of sweeps)
//! * `64` — usage error, `65` — input validation error, `70` — internal
//!   error (for example an unverifiable certificate)
//!
//! Result documents are JSON with a fixed field order and no timestamps, so
//! the same argv and seed produce byte-identical output. Event streams and
//! trajectories are CSV (`time,source` / `time,state`).

pub mod formats;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::definiteness::{
    cpd_anti_stable_with_tol, cpd_exact_with_tol, cpd_refute_with_tol,
    lattice_positive_exact_with_tol, verdict_tol, DefinitenessVerdict, Method, Verdict,
};
use crate::error::{Error, Result};
use crate::membership::{
    lattice_membership_test_with, mcmillan_test_with, verify_decomposition, verify_witness,
    AcfSequence, ClassKind, DecompositionTerm, FeasibilityMethod, MembershipOptions,
    MembershipVerdict, CERT_TOL,
};
use crate::pointproc::{
    acf_estimate, ctmc_simulate_competing, ctmc_simulate_embedded, poisson_stats, sample_renewal,
    sparse_superposition_experiment, superpose, telegraph_simulate, transient_distribution,
    uniformize, uniformized_simulate, DenominatorMode, PoissonnessReport, SparseSummary,
};
use crate::quadform::{qf_value, symmetrize_zero_diag, SymmetricMatrix};
use crate::rng;
use crate::search::{
    lattice_descent, run_anti_stable, run_anti_stable_multi, run_stable, run_stable_multi,
    MultiStart, SearchResult, Start, ENUM_CAP_LIMIT, HYPERCUBE_ENUM_CAP, LATTICE_ENUM_CAP,
};

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_VALIDATION: i32 = 65;
pub const EXIT_INTERNAL: i32 = 70;

#[derive(Parser)]
#[command(
    name = "corrkit",
    version,
    about = "Discrete quadratic-form certificates, autocorrelation membership, and point-process experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Master seed for all randomness (fixed default, never time-based).
    #[arg(long, default_value_t = rng::DEFAULT_SEED)]
    seed: u64,
    /// Worker threads for multi-start searches (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Enumeration cap: max hypercube dimension / log2 of lattice points.
    #[arg(long = "cap-enum")]
    cap_enum: Option<usize>,
    /// Tolerance override (verdict boundary, or series tail for transient).
    #[arg(long)]
    tol: Option<f64>,
    /// Output path for the result document (stdout when omitted).
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CpdMethodArg {
    /// Full hypercube enumeration.
    Exact,
    /// Enumerate anti-stable states and compare against −Trace.
    AntiStable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AcfMethodArg {
    Auto,
    Enum,
    Colgen,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SimMethodArg {
    Competing,
    Embedded,
    Uniformized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DenomArg {
    PerLag,
    Fixed,
}

#[derive(Subcommand)]
enum Command {
    /// Exact corner-positivity verdict for a square matrix.
    CpdCheck {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum, default_value_t = CpdMethodArg::Exact)]
        method: CpdMethodArg,
        /// Re-verify a previously emitted result document instead.
        #[arg(long)]
        verify: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Heuristic refutation by multi-start descent (never certifies).
    CpdRefute {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 32)]
        starts: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Exact lattice-positivity verdict over {±1,…,±M}^n.
    LatticeCheck {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long = "m-bound")]
        m_bound: u32,
        #[arg(long)]
        verify: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Serial sign dynamics to an anti-stable (or stable) fixed point.
    Antistable {
        #[arg(long)]
        matrix: PathBuf,
        /// Explicit start, e.g. "1,-1,1" (default: seeded random).
        #[arg(long)]
        x0: Option<String>,
        /// Ascent to a stable state instead of descent.
        #[arg(long)]
        stable: bool,
        #[arg(long = "max-sweeps", default_value_t = 1000)]
        max_sweeps: usize,
        /// Multi-start count (ignored when --x0 is given).
        #[arg(long)]
        starts: Option<usize>,
        /// Coordinate descent over {±1,…,±M}^n instead of the hypercube.
        #[arg(long = "m-bound")]
        m_bound: Option<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Membership of a lag sequence in the ±1-process class.
    AcfTest {
        /// Inline lags, e.g. "1,-0.6,0".
        #[arg(long)]
        rho: Option<String>,
        /// JSON file {"rho": [...]} as an alternative to --rho.
        #[arg(long)]
        acf: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = AcfMethodArg::Auto)]
        method: AcfMethodArg,
        #[arg(long)]
        verify: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Membership of a lag sequence in the lattice-process class.
    AcfLatticeTest {
        #[arg(long)]
        rho: Option<String>,
        #[arg(long)]
        acf: Option<PathBuf>,
        #[arg(long = "m-bound")]
        m_bound: Option<u32>,
        #[arg(long, value_enum, default_value_t = AcfMethodArg::Auto)]
        method: AcfMethodArg,
        #[arg(long)]
        verify: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Lagged autocorrelation estimate of a real series.
    AcfEstimate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "max-lag", default_value_t = 8)]
        max_lag: usize,
        #[arg(long, value_enum, default_value_t = DenomArg::PerLag)]
        denominator: DenomArg,
        #[command(flatten)]
        common: Common,
    },
    /// Renewal stream simulation (CSV out).
    PpSimulate {
        /// exp:RATE | uniform:A,B | det:D | weibull:SHAPE,SCALE
        #[arg(long)]
        model: String,
        #[arg(long)]
        horizon: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Merge event streams (CSV in/out).
    PpSuperpose {
        #[arg(long, value_delimiter = ',', required = true)]
        inputs: Vec<PathBuf>,
        /// Common horizon (default: latest event across inputs).
        #[arg(long)]
        horizon: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Poissonness statistics of an event stream.
    PpPoissonTest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 100)]
        bins: usize,
        #[arg(long)]
        horizon: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Markov jump-process simulation (CSV trajectory out).
    CtmcSimulate {
        #[arg(long)]
        q: PathBuf,
        #[arg(long, default_value_t = 0)]
        init: usize,
        #[arg(long)]
        horizon: f64,
        #[arg(long, value_enum, default_value_t = SimMethodArg::Competing)]
        method: SimMethodArg,
        /// Uniformization rate (only with --method uniformized).
        #[arg(long)]
        lambda: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Uniformized jump matrix p = I + q/lambda.
    CtmcUniformize {
        #[arg(long)]
        q: PathBuf,
        #[arg(long)]
        lambda: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Transient distribution by the uniformization series.
    CtmcTransient {
        #[arg(long)]
        q: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 0)]
        init: usize,
        #[arg(long)]
        lambda: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Sparse-superposition experiment: Poissonness vs source count.
    ExperimentSparse {
        #[arg(long, value_delimiter = ',', default_values_t = vec![1usize, 5, 25, 125])]
        ns: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        seeds: usize,
        #[arg(long, default_value_t = 10_000.0)]
        horizon: f64,
        #[arg(long, default_value_t = 1.0)]
        rate: f64,
        #[arg(long, default_value = "uniform:0.5,1.5")]
        base: String,
        #[arg(long, default_value_t = 1000)]
        bins: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Flip-chain round trip: simulate, estimate lags, test membership.
    ExperimentTelegraph {
        #[arg(long, default_value_t = 0.25)]
        p: f64,
        #[arg(long, default_value_t = 1_000_000)]
        len: usize,
        #[arg(long = "max-lag", default_value_t = 5)]
        max_lag: usize,
        #[arg(long, default_value_t = 5)]
        seeds: usize,
        #[command(flatten)]
        common: Common,
    },
}

/// Parses argv and runs the requested command, returning the process exit
/// code. Never panics on user errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Validation(_) | Error::Dimension(_) | Error::Capacity(_) => EXIT_VALIDATION,
                Error::Io(_) | Error::Json(_) => EXIT_VALIDATION,
                Error::NonConvergence { .. } => EXIT_UNKNOWN,
                Error::Internal(_) => EXIT_INTERNAL,
            }
        }
    }
}

fn configure_threads(common: &Common) {
    if let Some(threads) = common.threads {
        // The global pool can only be installed once; later calls are no-ops.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global();
    }
}

fn hypercube_cap(common: &Common) -> usize {
    common
        .cap_enum
        .unwrap_or(HYPERCUBE_ENUM_CAP)
        .min(ENUM_CAP_LIMIT)
}

fn lattice_cap(common: &Common) -> u64 {
    common
        .cap_enum
        .map(|c| 1u64 << c.min(24))
        .unwrap_or(LATTICE_ENUM_CAP)
}

fn emit_json<T: Serialize>(doc: &T, out: Option<&Path>, summary: &str) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    match out {
        Some(path) => {
            fs::write(path, text)?;
            println!("{summary}");
        }
        None => {
            print!("{text}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn emit_text(text: &str, out: Option<&Path>, summary: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text)?;
            println!("{summary}");
        }
        None => {
            print!("{text}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Result documents
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct DefinitenessDoc {
    command: String,
    seed: u64,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    m_bound: Option<u32>,
    verdict: String,
    method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<i32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_value: Option<f64>,
}

impl DefinitenessDoc {
    fn new(
        command: &str,
        seed: u64,
        n: usize,
        m_bound: Option<u32>,
        v: &DefinitenessVerdict,
    ) -> Self {
        Self {
            command: command.to_string(),
            seed,
            n,
            m_bound,
            verdict: verdict_str(v.verdict).to_string(),
            method: method_str(v.method).to_string(),
            margin: v.margin,
            witness: v.witness.as_ref().map(|w| w.components().to_vec()),
            witness_value: v.witness_value,
        }
    }
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Positive => "POSITIVE",
        Verdict::NotPositive => "NOT_POSITIVE",
        Verdict::Unknown => "UNKNOWN",
    }
}

fn method_str(m: Method) -> &'static str {
    match m {
        Method::ExactEnum => "EXACT_ENUM",
        Method::AntiStable => "ANTI_STABLE",
        Method::Heuristic => "HEURISTIC",
    }
}

fn verdict_exit(v: Verdict) -> i32 {
    match v {
        Verdict::Positive => EXIT_POSITIVE,
        Verdict::NotPositive => EXIT_NEGATIVE,
        Verdict::Unknown => EXIT_UNKNOWN,
    }
}

#[derive(Serialize, Deserialize)]
struct MembershipDoc {
    command: String,
    seed: u64,
    order: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    m_bound: Option<u32>,
    rho: Vec<f64>,
    verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weight_sum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decomposition: Option<Vec<DecompositionTerm>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<SymmetricMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_verified: Option<bool>,
}

impl MembershipDoc {
    fn new(command: &str, seed: u64, acf: &AcfSequence, v: &MembershipVerdict) -> Self {
        let m_bound = match acf.kind() {
            ClassKind::Unit => None,
            ClassKind::Lattice { m_bound } => Some(m_bound),
        };
        let mut doc = Self {
            command: command.to_string(),
            seed,
            order: acf.order(),
            m_bound,
            rho: acf.rho().to_vec(),
            verdict: String::new(),
            residual: None,
            weight_sum: None,
            decomposition: None,
            witness: None,
            trace_value: None,
            witness_verified: None,
        };
        match v {
            MembershipVerdict::Member {
                decomposition,
                residual,
                weight_sum,
                ..
            } => {
                doc.verdict = "MEMBER_UP_TO_ORDER_N".to_string();
                doc.residual = Some(*residual);
                doc.weight_sum = Some(*weight_sum);
                doc.decomposition = Some(decomposition.clone());
            }
            MembershipVerdict::NonMember {
                witness,
                trace_value,
                witness_verified,
                ..
            } => {
                doc.verdict = "NON_MEMBER".to_string();
                doc.witness = Some(witness.clone());
                doc.trace_value = Some(*trace_value);
                doc.witness_verified = Some(*witness_verified);
            }
        }
        doc
    }
}

#[derive(Serialize)]
struct SearchDoc {
    command: String,
    seed: u64,
    n: usize,
    mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    m_bound: Option<u32>,
    best_point: Vec<i32>,
    /// Value of the optimized form (zero-diagonal part for sign dynamics).
    best_value: f64,
    trace_offset: f64,
    /// best_value + trace_offset: the full form at the best point.
    best_value_full: f64,
    sweeps_used: usize,
    flips: usize,
    energy_trace: Vec<f64>,
}

#[derive(Serialize)]
struct AcfEstimateDoc {
    command: String,
    seed: u64,
    max_lag: usize,
    denominator: String,
    rho: Vec<f64>,
    sums: Vec<f64>,
    counts: Vec<usize>,
}

#[derive(Serialize)]
struct PoissonTestDoc {
    command: String,
    seed: u64,
    #[serde(flatten)]
    report: PoissonnessReport,
    horizon: f64,
}

#[derive(Serialize)]
struct UniformizeDoc {
    command: String,
    seed: u64,
    lambda: f64,
    p: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct TransientDoc {
    command: String,
    seed: u64,
    t: f64,
    tol: f64,
    lambda: Option<f64>,
    distribution: Vec<f64>,
}

#[derive(Serialize)]
struct SparseDoc {
    command: String,
    seed: u64,
    base: String,
    total_rate: f64,
    horizon: f64,
    bins: usize,
    n_seeds: usize,
    summaries: Vec<SparseSummary>,
    /// Whether the median KS statistic is non-increasing over the n values.
    ks_non_increasing: bool,
}

#[derive(Serialize)]
struct TelegraphSeedDoc {
    seed_index: usize,
    rho_hat: Vec<f64>,
    max_abs_error: f64,
    member: bool,
}

#[derive(Serialize)]
struct TelegraphDoc {
    command: String,
    seed: u64,
    p_flip: f64,
    length: usize,
    max_lag: usize,
    theory_rho: Vec<f64>,
    per_seed: Vec<TelegraphSeedDoc>,
    all_member: bool,
    max_abs_error: f64,
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::CpdCheck {
            matrix,
            method,
            verify,
            common,
        } => cmd_cpd_check(&matrix, method, verify.as_deref(), &common),
        Command::CpdRefute {
            matrix,
            starts,
            common,
        } => cmd_cpd_refute(&matrix, starts, &common),
        Command::LatticeCheck {
            matrix,
            m_bound,
            verify,
            common,
        } => cmd_lattice_check(&matrix, m_bound, verify.as_deref(), &common),
        Command::Antistable {
            matrix,
            x0,
            stable,
            max_sweeps,
            starts,
            m_bound,
            common,
        } => cmd_antistable(&matrix, x0, stable, max_sweeps, starts, m_bound, &common),
        Command::AcfTest {
            rho,
            acf,
            method,
            verify,
            common,
        } => cmd_acf_test(rho, acf, None, method, verify.as_deref(), &common, false),
        Command::AcfLatticeTest {
            rho,
            acf,
            m_bound,
            method,
            verify,
            common,
        } => cmd_acf_test(rho, acf, m_bound, method, verify.as_deref(), &common, true),
        Command::AcfEstimate {
            input,
            max_lag,
            denominator,
            common,
        } => cmd_acf_estimate(&input, max_lag, denominator, &common),
        Command::PpSimulate {
            model,
            horizon,
            common,
        } => cmd_pp_simulate(&model, horizon, &common),
        Command::PpSuperpose {
            inputs,
            horizon,
            common,
        } => cmd_pp_superpose(&inputs, horizon, &common),
        Command::PpPoissonTest {
            input,
            bins,
            horizon,
            common,
        } => cmd_pp_poisson_test(&input, bins, horizon, &common),
        Command::CtmcSimulate {
            q,
            init,
            horizon,
            method,
            lambda,
            common,
        } => cmd_ctmc_simulate(&q, init, horizon, method, lambda, &common),
        Command::CtmcUniformize { q, lambda, common } => cmd_ctmc_uniformize(&q, lambda, &common),
        Command::CtmcTransient {
            q,
            t,
            init,
            lambda,
            common,
        } => cmd_ctmc_transient(&q, t, init, lambda, &common),
        Command::ExperimentSparse {
            ns,
            seeds,
            horizon,
            rate,
            base,
            bins,
            common,
        } => cmd_experiment_sparse(&ns, seeds, horizon, rate, &base, bins, &common),
        Command::ExperimentTelegraph {
            p,
            len,
            max_lag,
            seeds,
            common,
        } => cmd_experiment_telegraph(p, len, max_lag, seeds, &common),
    }
}

fn load_symmetric(path: &Path) -> Result<SymmetricMatrix> {
    // General square input is accepted; only its symmetric part matters for
    // any quadratic form.
    let square = formats::read_square_matrix(path)?;
    Ok(SymmetricMatrix::symmetric_part(&square))
}

fn cmd_cpd_check(
    matrix: &Path,
    method: CpdMethodArg,
    verify: Option<&Path>,
    common: &Common,
) -> Result<i32> {
    configure_threads(common);
    let c = load_symmetric(matrix)?;
    if let Some(doc_path) = verify {
        return verify_definiteness_doc(doc_path, &c, None, common);
    }
    let cap = hypercube_cap(common);
    let verdict = match method {
        CpdMethodArg::Exact => cpd_exact_with_tol(&c, cap, common.tol)?,
        CpdMethodArg::AntiStable => cpd_anti_stable_with_tol(&c, cap, common.tol)?,
    };
    let doc = DefinitenessDoc::new("cpd-check", common.seed, c.n(), None, &verdict);
    let summary = match verdict.verdict {
        Verdict::Positive => format!(
            "cpd-check: POSITIVE (margin {:.6})",
            verdict.margin.unwrap_or(f64::NAN)
        ),
        Verdict::NotPositive => format!(
            "cpd-check: NOT_POSITIVE (witness value {:.6})",
            verdict.witness_value.unwrap_or(f64::NAN)
        ),
        Verdict::Unknown => "cpd-check: UNKNOWN".to_string(),
    };
    emit_json(&doc, common.out.as_deref(), &summary)?;
    Ok(verdict_exit(verdict.verdict))
}

fn cmd_cpd_refute(matrix: &Path, starts: usize, common: &Common) -> Result<i32> {
    configure_threads(common);
    let c = load_symmetric(matrix)?;
    let verdict = cpd_refute_with_tol(&c, starts, common.seed, common.tol)?;
    let doc = DefinitenessDoc::new("cpd-refute", common.seed, c.n(), None, &verdict);
    let summary = match verdict.verdict {
        Verdict::NotPositive => format!(
            "cpd-refute: NOT_POSITIVE (witness value {:.6})",
            verdict.witness_value.unwrap_or(f64::NAN)
        ),
        _ => "cpd-refute: UNKNOWN (no violating vertex found)".to_string(),
    };
    emit_json(&doc, common.out.as_deref(), &summary)?;
    Ok(verdict_exit(verdict.verdict))
}

fn cmd_lattice_check(
    matrix: &Path,
    m_bound: u32,
    verify: Option<&Path>,
    common: &Common,
) -> Result<i32> {
    configure_threads(common);
    let b = load_symmetric(matrix)?;
    if let Some(doc_path) = verify {
        return verify_definiteness_doc(doc_path, &b, Some(m_bound), common);
    }
    let verdict = lattice_positive_exact_with_tol(&b, m_bound, lattice_cap(common), common.tol)?;
    let doc = DefinitenessDoc::new("lattice-check", common.seed, b.n(), Some(m_bound), &verdict);
    let summary = match verdict.verdict {
        Verdict::Positive => format!(
            "lattice-check: POSITIVE at M={m_bound} (margin {:.6})",
            verdict.margin.unwrap_or(f64::NAN)
        ),
        Verdict::NotPositive => format!(
            "lattice-check: NOT_POSITIVE at M={m_bound} (witness value {:.6})",
            verdict.witness_value.unwrap_or(f64::NAN)
        ),
        Verdict::Unknown => "lattice-check: UNKNOWN".to_string(),
    };
    emit_json(&doc, common.out.as_deref(), &summary)?;
    Ok(verdict_exit(verdict.verdict))
}

/// Re-verifies an emitted definiteness document against the matrix: a
/// negative verdict must carry a witness whose form value is negative; a
/// positive verdict is recomputed.
fn verify_definiteness_doc(
    doc_path: &Path,
    c: &SymmetricMatrix,
    m_bound: Option<u32>,
    common: &Common,
) -> Result<i32> {
    let doc: DefinitenessDoc = serde_json::from_str(&fs::read_to_string(doc_path)?)?;
    match doc.verdict.as_str() {
        "NOT_POSITIVE" => {
            let w = doc
                .witness
                .ok_or_else(|| Error::Internal("certificate lacks a witness".into()))?;
            if w.len() != c.n() {
                return Err(Error::Internal(format!(
                    "witness length {} does not match matrix order {}",
                    w.len(),
                    c.n()
                )));
            }
            if let Some(m) = m_bound {
                if w.iter().any(|v| *v == 0 || v.unsigned_abs() > m) {
                    return Err(Error::Internal(format!(
                        "witness is not a lattice point for M = {m}"
                    )));
                }
            } else if w.iter().any(|v| v.abs() != 1) {
                return Err(Error::Internal("witness is not a sign vector".into()));
            }
            let x: Vec<f64> = w.iter().map(|v| f64::from(*v)).collect();
            let value = qf_value(c, &x)?;
            let tol = common
                .tol
                .unwrap_or_else(|| verdict_tol(c) * m_bound.map_or(1.0, |m| f64::from(m).powi(2)));
            if value < -tol {
                println!("verify: NOT_POSITIVE confirmed (witness value {value:.6})");
                Ok(EXIT_NEGATIVE)
            } else {
                Err(Error::Internal(format!(
                    "witness value {value} does not refute positivity"
                )))
            }
        }
        "POSITIVE" => {
            let fresh = match m_bound {
                Some(m) => lattice_positive_exact_with_tol(c, m, lattice_cap(common), common.tol)?,
                None => cpd_exact_with_tol(c, hypercube_cap(common), common.tol)?,
            };
            let margins_agree = match (doc.margin, fresh.margin) {
                (Some(a), Some(b)) => (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs())),
                _ => false,
            };
            if fresh.verdict == Verdict::Positive && margins_agree {
                println!(
                    "verify: POSITIVE confirmed (margin {:.6})",
                    doc.margin.unwrap()
                );
                Ok(EXIT_POSITIVE)
            } else {
                Err(Error::Internal(
                    "stored POSITIVE verdict does not reproduce".into(),
                ))
            }
        }
        "UNKNOWN" => {
            println!("verify: UNKNOWN (nothing to verify)");
            Ok(EXIT_UNKNOWN)
        }
        other => Err(Error::Internal(format!("unknown verdict {other:?}"))),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_antistable(
    matrix: &Path,
    x0: Option<String>,
    stable: bool,
    max_sweeps: usize,
    starts: Option<usize>,
    m_bound: Option<u32>,
    common: &Common,
) -> Result<i32> {
    configure_threads(common);
    let c = load_symmetric(matrix)?;
    let split = symmetrize_zero_diag(&(&c).into());

    let (result, mode, trace_offset): (SearchResult, &str, f64) = match m_bound {
        Some(m) => {
            if stable {
                return Err(Error::Validation(
                    "--stable applies to hypercube dynamics only".into(),
                ));
            }
            let res = match (&x0, starts) {
                (Some(s), _) => {
                    let point =
                        crate::quadform::LatticeVector::new(formats::parse_int_list(s)?, m)?;
                    lattice_descent(&c, m, Start::Point(point), max_sweeps)?
                }
                (None, Some(k)) => crate::search::lattice_descent_multi(
                    &c,
                    m,
                    MultiStart {
                        starts: k,
                        seed: common.seed,
                        max_sweeps,
                    },
                )?,
                (None, None) => lattice_descent(&c, m, Start::Seed(common.seed), max_sweeps)?,
            };
            (res, "lattice-descent", 0.0)
        }
        None => {
            let ms = MultiStart {
                starts: starts.unwrap_or(1),
                seed: common.seed,
                max_sweeps,
            };
            let res = match (&x0, starts, stable) {
                (None, Some(_), false) => run_anti_stable_multi(&split, ms)?,
                (None, Some(_), true) => run_stable_multi(&split, ms)?,
                (x0, _, stable) => {
                    let start = match x0 {
                        Some(s) => Start::Point(crate::quadform::SignVector::new(
                            formats::parse_int_list(s)?,
                        )?),
                        None => Start::Seed(common.seed),
                    };
                    if stable {
                        run_stable(&split, start, max_sweeps)?
                    } else {
                        run_anti_stable(&split, start, max_sweeps)?
                    }
                }
            };
            let mode = if stable { "stable" } else { "anti-stable" };
            (res, mode, split.trace_offset())
        }
    };

    let doc = SearchDoc {
        command: "antistable".to_string(),
        seed: common.seed,
        n: c.n(),
        mode: mode.to_string(),
        m_bound,
        best_point: result.best_point.components().to_vec(),
        best_value: result.best_value,
        trace_offset,
        best_value_full: result.best_value + trace_offset,
        sweeps_used: result.sweeps_used,
        flips: result.energy_trace.len(),
        energy_trace: result.energy_trace.clone(),
    };
    let summary = format!(
        "antistable: {} fixed point at value {:.6} after {} sweeps",
        mode, doc.best_value_full, doc.sweeps_used
    );
    emit_json(&doc, common.out.as_deref(), &summary)?;
    Ok(EXIT_POSITIVE)
}

#[allow(clippy::too_many_arguments)]
fn cmd_acf_test(
    rho: Option<String>,
    acf_path: Option<PathBuf>,
    m_bound: Option<u32>,
    method: AcfMethodArg,
    verify: Option<&Path>,
    common: &Common,
    lattice: bool,
) -> Result<i32> {
    configure_threads(common);
    let acf = match (rho, acf_path) {
        (Some(list), None) => {
            let rho = formats::parse_rho_list(&list)?;
            if lattice {
                AcfSequence::lattice(rho, m_bound.unwrap_or(1))?
            } else {
                AcfSequence::unit(rho)?
            }
        }
        (None, Some(path)) => {
            let loaded = formats::read_acf(&path)?;
            match (lattice, m_bound, loaded.kind()) {
                (true, Some(m), ClassKind::Unit) => AcfSequence::lattice(loaded.rho().to_vec(), m)?,
                _ => loaded,
            }
        }
        _ => {
            return Err(Error::Validation(
                "exactly one of --rho or --acf is required".into(),
            ))
        }
    };
    if lattice && !matches!(acf.kind(), ClassKind::Lattice { .. }) {
        return Err(Error::Validation(
            "acf-lattice-test needs a lattice-class sequence (pass --m-bound or \"m\" in the file)"
                .into(),
        ));
    }
    let command = if lattice { "acf-lattice-test" } else { "acf-test" };
    if let Some(doc_path) = verify {
        return verify_membership_doc(doc_path, &acf);
    }

    let opts = MembershipOptions {
        method: match method {
            AcfMethodArg::Auto => FeasibilityMethod::Auto,
            AcfMethodArg::Enum => FeasibilityMethod::FullEnumeration,
            AcfMethodArg::Colgen => FeasibilityMethod::ColumnGeneration,
        },
        order_cap: common.cap_enum.unwrap_or(16).min(HYPERCUBE_ENUM_CAP),
        seed: common.seed,
        ..MembershipOptions::default()
    };
    let verdict = if lattice {
        lattice_membership_test_with(&acf, &opts)?
    } else {
        mcmillan_test_with(&acf, &opts)?
    };
    let doc = MembershipDoc::new(command, common.seed, &acf, &verdict);
    let summary = match &verdict {
        MembershipVerdict::Member {
            order, residual, ..
        } => format!("{command}: MEMBER up to order {order} (residual {residual:.2e})"),
        MembershipVerdict::NonMember {
            order, trace_value, ..
        } => format!("{command}: NON_MEMBER at order {order} (witness trace {trace_value:.6})"),
    };
    emit_json(&doc, common.out.as_deref(), &summary)?;
    Ok(if verdict.is_member() {
        EXIT_POSITIVE
    } else {
        EXIT_NEGATIVE
    })
}

/// Re-verifies an emitted membership document against the lag sequence.
fn verify_membership_doc(doc_path: &Path, acf: &AcfSequence) -> Result<i32> {
    let doc: MembershipDoc = serde_json::from_str(&fs::read_to_string(doc_path)?)?;
    let r = acf.toeplitz();
    match doc.verdict.as_str() {
        "MEMBER_UP_TO_ORDER_N" => {
            let terms = doc
                .decomposition
                .ok_or_else(|| Error::Internal("certificate lacks a decomposition".into()))?;
            let check = verify_decomposition(r.matrix(), &terms)?;
            if check.residual <= CERT_TOL {
                println!(
                    "verify: MEMBER confirmed (residual {:.2e}, weight sum {:.6})",
                    check.residual, check.weight_sum
                );
                Ok(EXIT_POSITIVE)
            } else {
                Err(Error::Internal(format!(
                    "decomposition residual {:e} above {CERT_TOL:e}",
                    check.residual
                )))
            }
        }
        "NON_MEMBER" => {
            let witness = doc
                .witness
                .ok_or_else(|| Error::Internal("certificate lacks a witness".into()))?;
            let check = verify_witness(r.matrix(), &witness, acf.kind())?;
            if check.is_positive_on_set && check.trace_value <= -CERT_TOL {
                println!(
                    "verify: NON_MEMBER confirmed (trace {:.6}, min on set {:.2e})",
                    check.trace_value, check.min_value
                );
                Ok(EXIT_NEGATIVE)
            } else {
                Err(Error::Internal(format!(
                    "witness failed: min on set {:e}, trace {:e}",
                    check.min_value, check.trace_value
                )))
            }
        }
        other => Err(Error::Internal(format!("unknown verdict {other:?}"))),
    }
}

fn cmd_acf_estimate(
    input: &Path,
    max_lag: usize,
    denominator: DenomArg,
    common: &Common,
) -> Result<i32> {
    let series = formats::read_series(input)?;
    let mode = match denominator {
        DenomArg::PerLag => DenominatorMode::PerLag,
        DenomArg::Fixed => DenominatorMode::Fixed,
    };
    let est = acf_estimate(&series, max_lag, mode)?;
    let doc = AcfEstimateDoc {
        command: "acf-estimate".to_string(),
        seed: common.seed,
        max_lag,
        denominator: match mode {
            DenominatorMode::PerLag => "per-lag".to_string(),
            DenominatorMode::Fixed => "fixed".to_string(),
        },
        rho: est.rho.clone(),
        sums: est.sums.clone(),
        counts: est.counts.clone(),
    };
    let summary = format!(
        "acf-estimate: {} lags from {} samples (rho[1] = {:.6})",
        max_lag + 1,
        series.len(),
        est.rho.get(1).copied().unwrap_or(f64::NAN)
    );
    emit_json(&doc, common.out.as_deref(), &summary)?;
    Ok(EXIT_POSITIVE)
}

fn cmd_pp_simulate(model: &str, horizon: f64, common: &Common) -> Result<i32> {
    let model = formats::parse_sojourn_model(model)?;
    let stream = sample_renewal(&model, horizon, common.seed)?;
    let summary = format!(
        "pp-simulate: {} events on [0, {horizon}] from {model:?}",
        stream.len()
    );
    emit_text(
        &formats::event_stream_to_csv(&stream),
        common.out.as_deref(),
        &summary,
    )?;
    Ok(EXIT_POSITIVE)
}

fn cmd_pp_superpose(inputs: &[PathBuf], horizon: Option<f64>, common: &Common) -> Result<i32> {
    let mut texts = Vec::with_capacity(inputs.len());
    for path in inputs {
        texts.push(fs::read_to_string(path)?);
    }
    let horizon = match horizon {
        Some(h) => h,
        None => {
            let mut latest: f64 = 0.0;
            for text in &texts {
                let s = formats::event_stream_from_csv(text, None)?;
                if let Some(e) = s.events.last() {
                    latest = latest.max(e.time);
                }
            }
            if latest > 0.0 {
                latest
            } else {
                1.0
            }
        }
    };
    let mut streams = Vec::with_capacity(texts.len());
    for text in &texts {
        streams.push(formats::event_stream_from_csv(text, Some(horizon))?);
    }
    let merged = superpose(&streams)?;
    let summary = format!(
        "pp-superpose: merged {} streams into {} events",
        streams.len(),
        merged.len()
    );
    emit_text(
        &formats::event_stream_to_csv(&merged),
        common.out.as_deref(),
        &summary,
    )?;
    Ok(EXIT_POSITIVE)
}

fn cmd_pp_poisson_test(
    input: &Path,
    bins: usize,
    horizon: Option<f64>,
    common: &Common,
) -> Result<i32> {
    let stream = formats::event_stream_from_csv(&fs::read_to_string(input)?, horizon)?;
    let report = poisson_stats(&stream, bins)?;
    let doc = PoissonTestDoc {
        command: "pp-poisson-test".to_string(),
        seed: common.seed,
        report,
        horizon: stream.horizon,
    };
    let summary = format!(
        "pp-poisson-test: ks {:.5}, dispersion {:.4}, rate {:.5} over {} events",
        report.ks_statistic, report.dispersion_index, report.lambda_hat, report.n_events
    );
    emit_json(&doc, common.out.as_deref(), &summary)?;
    Ok(EXIT_POSITIVE)
}

fn cmd_ctmc_simulate(
    q: &Path,
    init: usize,
    horizon: f64,
    method: SimMethodArg,
    lambda: Option<f64>,
    common: &Common,
) -> Result<i32> {
    let g = formats::read_generator(q)?;
    let trajectory = match method {
        SimMethodArg::Competing => ctmc_simulate_competing(&g, init, horizon, common.seed)?,
        SimMethodArg::Embedded => ctmc_simulate_embedded(&g, init, horizon, common.seed)?,
        SimMethodArg::Uniformized => {
            let (p, l) = uniformize(&g, lambda)?;
            uniformized_simulate(&p, l, init, horizon, common.seed)?
        }
    };
    let summary = format!(
        "ctmc-simulate: {} jumps on [0, {horizon}]{}",
        trajectory.jumps(),
        if trajectory.absorbed {
            " (absorbed)"
        } else {
            ""
        }
    );
    emit_text(
        &formats::trajectory_to_csv(&trajectory),
        common.out.as_deref(),
        &summary,
    )?;
    Ok(EXIT_POSITIVE)
}

fn cmd_ctmc_uniformize(q: &Path, lambda: Option<f64>, common: &Common) -> Result<i32> {
    let g = formats::read_generator(q)?;
    let (p, l) = uniformize(&g, lambda)?;
    let doc = UniformizeDoc {
        command: "ctmc-uniformize".to_string(),
        seed: common.seed,
        lambda: l,
        p,
    };
    let summary = format!("ctmc-uniformize: lambda {l}");
    emit_json(&doc, common.out.as_deref(), &summary)?;
    Ok(EXIT_POSITIVE)
}

fn cmd_ctmc_transient(
    q: &Path,
    t: f64,
    init: usize,
    lambda: Option<f64>,
    common: &Common,
) -> Result<i32> {
    let g = formats::read_generator(q)?;
    let tol = common.tol.unwrap_or(1e-9);
    let distribution = transient_distribution(&g, t, init, tol, lambda)?;
    let doc = TransientDoc {
        command: "ctmc-transient".to_string(),
        seed: common.seed,
        t,
        tol,
        lambda,
        distribution: distribution.clone(),
    };
    let summary = format!("ctmc-transient: distribution at t = {t} is {distribution:?}");
    emit_json(&doc, common.out.as_deref(), &summary)?;
    Ok(EXIT_POSITIVE)
}

#[allow(clippy::too_many_arguments)]
fn cmd_experiment_sparse(
    ns: &[usize],
    n_seeds: usize,
    horizon: f64,
    rate: f64,
    base: &str,
    bins: usize,
    common: &Common,
) -> Result<i32> {
    let model = formats::parse_sojourn_model(base)?;
    let seeds: Vec<u64> = (0..n_seeds as u64)
        .map(|i| rng::derive(common.seed, &[0x5350, i]))
        .collect();
    let summaries = sparse_superposition_experiment(ns, &model, rate, horizon, &seeds, bins)?;
    let ks_non_increasing = summaries
        .windows(2)
        .all(|w| w[1].median_ks <= w[0].median_ks);
    let lines: Vec<String> = summaries
        .iter()
        .map(|s| {
            format!(
                "n={:<4} median_ks={:.5} median_dispersion={:.4}",
                s.n_sources, s.median_ks, s.median_dispersion
            )
        })
        .collect();
    let doc = SparseDoc {
        command: "experiment-sparse".to_string(),
        seed: common.seed,
        base: base.to_string(),
        total_rate: rate,
        horizon,
        bins,
        n_seeds,
        summaries,
        ks_non_increasing,
    };
    let summary = format!(
        "experiment-sparse: {} (ks non-increasing: {ks_non_increasing})",
        lines.join("; ")
    );
    emit_json(&doc, common.out.as_deref(), &summary)?;
    Ok(EXIT_POSITIVE)
}

fn cmd_experiment_telegraph(
    p: f64,
    len: usize,
    max_lag: usize,
    n_seeds: usize,
    common: &Common,
) -> Result<i32> {
    let theory: Vec<f64> = (0..=max_lag)
        .map(|k| (1.0 - 2.0 * p).powi(k as i32))
        .collect();
    let mut per_seed = Vec::with_capacity(n_seeds);
    let mut all_member = true;
    let mut max_err: f64 = 0.0;
    for i in 0..n_seeds {
        let seed = rng::derive(common.seed, &[0x7465, i as u64]);
        let xs = telegraph_simulate(p, len, seed)?;
        let xf: Vec<f64> = xs.iter().map(|v| f64::from(*v)).collect();
        let est = acf_estimate(&xf, max_lag, DenominatorMode::PerLag)?;
        let err = est
            .rho
            .iter()
            .zip(&theory)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let acf = est.to_unit_acf()?;
        let verdict = mcmillan_test_with(
            &acf,
            &MembershipOptions {
                seed: common.seed,
                ..MembershipOptions::default()
            },
        )?;
        all_member &= verdict.is_member();
        max_err = max_err.max(err);
        per_seed.push(TelegraphSeedDoc {
            seed_index: i,
            rho_hat: est.rho,
            max_abs_error: err,
            member: verdict.is_member(),
        });
    }
    let doc = TelegraphDoc {
        command: "experiment-telegraph".to_string(),
        seed: common.seed,
        p_flip: p,
        length: len,
        max_lag,
        theory_rho: theory,
        per_seed,
        all_member,
        max_abs_error: max_err,
    };
    let summary = format!(
        "experiment-telegraph: {n_seeds} seeds, max |rho_hat - rho| = {max_err:.5}, all member: {all_member}"
    );
    emit_json(&doc, common.out.as_deref(), &summary)?;
    Ok(if all_member {
        EXIT_POSITIVE
    } else {
        EXIT_NEGATIVE
    })
}

/// Lists the subcommand names (used by tests and shell completion helpers).
pub fn subcommand_names() -> Vec<String> {
    Cli::command()
        .get_subcommands()
        .map(|c| c.get_name().to_string())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_spec_subcommands_exist() {
        let names = subcommand_names();
        for want in [
            "cpd-check",
            "cpd-refute",
            "lattice-check",
            "antistable",
            "acf-test",
            "acf-lattice-test",
            "acf-estimate",
            "pp-simulate",
            "pp-superpose",
            "pp-poisson-test",
            "ctmc-simulate",
            "ctmc-uniformize",
            "ctmc-transient",
            "experiment-sparse",
            "experiment-telegraph",
        ] {
            assert!(names.iter().any(|n| n == want), "missing {want}");
        }
    }

    #[test]
    fn usage_errors_exit_64() {
        assert_eq!(run(["corrkit", "no-such-command"]), EXIT_USAGE);
        assert_eq!(run(["corrkit"]), EXIT_USAGE);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run(["corrkit", "--help"]), 0);
    }
}
