//! Membership of autocorrelation sequences in the sign-process class
//! (McMillan's characterization of ±1-valued stationary processes) and its
//! bounded-lattice generalization.
//!
//! The decision procedure is constructive in both directions. A candidate
//! sequence of lags is a member at order N exactly when its Toeplitz matrix
//! lies in the convex cone generated by the outer products v·vᵀ of the
//! discrete set; we decide that by an exact-arithmetic feasibility solve over
//! the outer-product columns (full enumeration at small order, column
//! generation above it, with the hypercube/lattice optimizer as the pricing
//! subproblem). Feasibility yields a convex decomposition; infeasibility
//! yields a separating matrix that is positive on the whole discrete set and
//! pairs negatively with the Toeplitz matrix. Both certificates are
//! re-verified before being returned.

mod simplex;

use std::collections::HashSet;

use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadform::{
    build_toeplitz, trace_product, SymmetricMatrix, SymmetricSplit, ToeplitzMatrix,
};
use crate::rng::DEFAULT_SEED;
use crate::search::{
    enumerate_hypercube_min, enumerate_lattice_min, lattice_descent_multi, run_stable_multi,
    DiscretePoint, MultiStart, HYPERCUBE_ENUM_CAP, LATTICE_ENUM_CAP,
};
use simplex::{phase1_feasibility, price_column, rational_from_f64, rational_to_f64, Phase1Outcome};

/// Residual/trace tolerance for accepting certificates.
pub const CERT_TOL: f64 = 1e-8;

/// Inputs may overshoot their Cauchy–Schwarz bound by at most this much
/// before they are rejected instead of clamped.
pub const CLAMP_TOL: f64 = 1e-9;

/// Which discrete class a sequence of lags is tested against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassKind {
    /// Processes valued in {+1, −1} with zero mean; lag 0 equals 1.
    Unit,
    /// Processes valued in {±1, …, ±M} with uniform symmetric marginals;
    /// lag 0 equals (M+1)(2M+1)/6.
    Lattice { m_bound: u32 },
}

impl ClassKind {
    pub fn expected_rho0(&self) -> f64 {
        match self {
            ClassKind::Unit => 1.0,
            ClassKind::Lattice { m_bound } => {
                let m = f64::from(*m_bound);
                (m + 1.0) * (2.0 * m + 1.0) / 6.0
            }
        }
    }
}

/// A validated sequence of autocorrelation lags rho[0..=L].
#[derive(Clone, Debug)]
pub struct AcfSequence {
    rho: Vec<f64>,
    kind: ClassKind,
}

impl AcfSequence {
    /// Validates a lag sequence for the ±1 class: rho[0] = 1 and every lag
    /// within [−1, 1]. Overshoots up to [`CLAMP_TOL`] are clamped with a
    /// warning; anything larger is rejected.
    pub fn unit(rho: Vec<f64>) -> Result<Self> {
        Self::validated(rho, ClassKind::Unit)
    }

    /// Validates a lag sequence for the lattice class with bound `m_bound`.
    pub fn lattice(rho: Vec<f64>, m_bound: u32) -> Result<Self> {
        if m_bound == 0 {
            return Err(Error::Validation("lattice bound M must be ≥ 1".into()));
        }
        Self::validated(rho, ClassKind::Lattice { m_bound })
    }

    fn validated(mut rho: Vec<f64>, kind: ClassKind) -> Result<Self> {
        if rho.is_empty() {
            return Err(Error::Validation("lag sequence must be non-empty".into()));
        }
        if let Some(v) = rho.iter().find(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("non-finite lag value {v}")));
        }
        let rho0 = kind.expected_rho0();
        let rho0_tol = match kind {
            ClassKind::Unit => CLAMP_TOL,
            ClassKind::Lattice { .. } => 1e-12,
        };
        if (rho[0] - rho0).abs() > rho0_tol {
            return Err(Error::Validation(match kind {
                ClassKind::Unit => format!("rho[0] must be 1, got {}", rho[0]),
                ClassKind::Lattice { m_bound } => format!(
                    "rho[0] must be (M+1)(2M+1)/6 = {rho0} for M = {m_bound}, got {}",
                    rho[0]
                ),
            }));
        }
        rho[0] = rho0;
        for k in 1..rho.len() {
            let overshoot = rho[k].abs() - rho0;
            if overshoot > CLAMP_TOL {
                return Err(Error::Validation(format!(
                    "lag {k} violates |rho[k]| ≤ rho[0]: {} vs {rho0}",
                    rho[k]
                )));
            }
            if overshoot > 0.0 {
                log::warn!(
                    "clamping lag {k} from {} to the bound {rho0} (overshoot {overshoot:e})",
                    rho[k]
                );
                rho[k] = rho0 * rho[k].signum();
            }
        }
        Ok(Self { rho, kind })
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn kind(&self) -> ClassKind {
        self.kind
    }

    /// Number of lags including lag zero; the order of the Toeplitz matrix.
    pub fn order(&self) -> usize {
        self.rho.len()
    }

    pub fn toeplitz(&self) -> ToeplitzMatrix {
        build_toeplitz(&self.rho).expect("validated lags")
    }
}

/// Wire shape for lag sequences: `{"rho": [...], "m": M}` with `m` omitted
/// for the ±1 class.
#[derive(Serialize, Deserialize)]
pub struct AcfDoc {
    pub rho: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
}

impl AcfDoc {
    pub fn into_sequence(self) -> Result<AcfSequence> {
        match self.m {
            None | Some(1) => AcfSequence::unit(self.rho),
            Some(m) => AcfSequence::lattice(self.rho, m),
        }
    }
}

/// One term of a convex decomposition: weight times the outer product of
/// the stored vector with itself.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionTerm {
    pub weight: f64,
    pub vector: Vec<i32>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict")]
pub enum MembershipVerdict {
    /// The sequence is realizable up to this order: its Toeplitz matrix is a
    /// nonnegative combination of outer products. Membership at order N is
    /// necessary but not sufficient for membership at all orders.
    #[serde(rename = "MEMBER_UP_TO_ORDER_N")]
    Member {
        order: usize,
        decomposition: Vec<DecompositionTerm>,
        /// Max-entry gap between the Toeplitz matrix and the decomposition.
        residual: f64,
        weight_sum: f64,
    },
    /// Conclusively not a member: `witness` is positive on the whole
    /// discrete set yet pairs negatively with the Toeplitz matrix.
    #[serde(rename = "NON_MEMBER")]
    NonMember {
        order: usize,
        witness: SymmetricMatrix,
        trace_value: f64,
        witness_verified: bool,
    },
}

impl MembershipVerdict {
    pub fn is_member(&self) -> bool {
        matches!(self, MembershipVerdict::Member { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeasibilityMethod {
    /// Full enumeration below the column threshold, column generation above.
    Auto,
    FullEnumeration,
    ColumnGeneration,
}

#[derive(Clone, Copy, Debug)]
pub struct MembershipOptions {
    pub method: FeasibilityMethod,
    /// Largest order N accepted.
    pub order_cap: usize,
    /// Largest representative count enumerable for lattice problems.
    pub lattice_rep_cap: u64,
    /// Seed for the heuristic pricing searches in column generation.
    pub seed: u64,
    /// Starts per heuristic pricing search.
    pub pricing_starts: usize,
}

impl Default for MembershipOptions {
    fn default() -> Self {
        Self {
            method: FeasibilityMethod::Auto,
            order_cap: 16,
            lattice_rep_cap: 1 << 20,
            seed: DEFAULT_SEED,
            pricing_starts: 8,
        }
    }
}

/// Columns above which `Auto` switches to column generation.
const AUTO_COLGEN_THRESHOLD: u64 = 512;
/// Guard on column-generation rounds; the set of columns is finite so this
/// should never trigger.
const MAX_COLGEN_ROUNDS: usize = 4096;

/// Decides membership of a ±1-class sequence with default options.
pub fn mcmillan_test(acf: &AcfSequence) -> Result<MembershipVerdict> {
    mcmillan_test_with(acf, &MembershipOptions::default())
}

pub fn mcmillan_test_with(
    acf: &AcfSequence,
    opts: &MembershipOptions,
) -> Result<MembershipVerdict> {
    if acf.kind() != ClassKind::Unit {
        return Err(Error::Validation(
            "mcmillan_test expects a ±1-class sequence; use lattice_membership_test".into(),
        ));
    }
    membership_test(acf, opts)
}

/// Decides membership of a lattice-class sequence with default options.
/// With M = 1 this coincides with [`mcmillan_test`].
pub fn lattice_membership_test(acf: &AcfSequence) -> Result<MembershipVerdict> {
    lattice_membership_test_with(acf, &MembershipOptions::default())
}

pub fn lattice_membership_test_with(
    acf: &AcfSequence,
    opts: &MembershipOptions,
) -> Result<MembershipVerdict> {
    if !matches!(acf.kind(), ClassKind::Lattice { .. }) {
        return Err(Error::Validation(
            "lattice_membership_test expects a lattice-class sequence".into(),
        ));
    }
    membership_test(acf, opts)
}

/// `Trace(R·x)` for the Toeplitz matrix of `acf`; returned regardless of
/// whether `x` is positive on the discrete set.
pub fn mcmillan_trace_check(acf: &AcfSequence, x: &SymmetricMatrix) -> Result<f64> {
    trace_product(acf.toeplitz().matrix(), x)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecompositionCheck {
    pub residual: f64,
    pub weight_sum: f64,
}

/// Max-entry distance between `r` and Σ weight·v·vᵀ, plus the weight sum.
pub fn verify_decomposition(
    r: &SymmetricMatrix,
    terms: &[DecompositionTerm],
) -> Result<DecompositionCheck> {
    let n = r.n();
    let mut sum = SymmetricMatrix::zeros(n);
    let mut weight_sum = 0.0;
    for term in terms {
        if term.weight < 0.0 {
            return Err(Error::Validation(format!(
                "decomposition weight {} is negative",
                term.weight
            )));
        }
        if term.vector.len() != n {
            return Err(Error::Dimension(format!(
                "decomposition vector length {} vs order {n}",
                term.vector.len()
            )));
        }
        weight_sum += term.weight;
        for i in 0..n {
            for j in i..n {
                let add = term.weight * f64::from(term.vector[i]) * f64::from(term.vector[j]);
                sum.set_sym(i, j, sum.get(i, j) + add);
            }
        }
    }
    let mut residual = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            residual = residual.max((r.get(i, j) - sum.get(i, j)).abs());
        }
    }
    Ok(DecompositionCheck {
        residual,
        weight_sum,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct WitnessCheck {
    pub is_positive_on_set: bool,
    pub trace_value: f64,
    /// Exact minimum of the witness form over the discrete set.
    pub min_value: f64,
}

/// Checks a separating witness: positive on every point of the class's
/// discrete set (by exact enumeration) and its trace pairing with `r`.
/// A valid witness has `is_positive_on_set` and `trace_value < 0`.
pub fn verify_witness(
    r: &SymmetricMatrix,
    x: &SymmetricMatrix,
    kind: ClassKind,
) -> Result<WitnessCheck> {
    let min_value = match kind {
        ClassKind::Unit => enumerate_hypercube_min(x, HYPERCUBE_ENUM_CAP)?.min_value,
        ClassKind::Lattice { m_bound } => {
            enumerate_lattice_min(x, m_bound, LATTICE_ENUM_CAP)?.min_value
        }
    };
    let trace_value = trace_product(r, x)?;
    Ok(WitnessCheck {
        is_positive_on_set: min_value >= 0.0,
        trace_value,
        min_value,
    })
}

// ---------------------------------------------------------------------------
// Cone encoding
// ---------------------------------------------------------------------------

/// Row/column layout of the feasibility system for one class.
///
/// Unit: row 0 is the weight-sum row (every outer product has a unit
/// diagonal, so matching the diagonal is the single constraint Σλ = rho[0]);
/// the remaining rows are the pairs (i, j), i < j, with coefficients ε_i·ε_j.
///
/// Lattice: one diagonal row per index (v_i² varies per column) followed by
/// the same pair rows with coefficients v_i·v_j.
struct ConeProblem {
    n: usize,
    kind: ClassKind,
}

impl ConeProblem {
    fn new(n: usize, kind: ClassKind) -> Self {
        Self { n, kind }
    }

    fn diag_rows(&self) -> usize {
        match self.kind {
            ClassKind::Unit => 1,
            ClassKind::Lattice { .. } => self.n,
        }
    }

    fn rows(&self) -> usize {
        self.diag_rows() + self.n * (self.n - 1) / 2
    }

    fn m_bound(&self) -> u32 {
        match self.kind {
            ClassKind::Unit => 1,
            ClassKind::Lattice { m_bound } => m_bound,
        }
    }

    fn rhs(&self, rho: &[f64]) -> Result<Vec<BigRational>> {
        let mut b = Vec::with_capacity(self.rows());
        for _ in 0..self.diag_rows() {
            b.push(rational_from_f64(rho[0])?);
        }
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                b.push(rational_from_f64(rho[j - i])?);
            }
        }
        Ok(b)
    }

    fn column_of(&self, v: &[i32]) -> Vec<i64> {
        let mut col = Vec::with_capacity(self.rows());
        match self.kind {
            ClassKind::Unit => col.push(1),
            ClassKind::Lattice { .. } => {
                for vi in v {
                    col.push(i64::from(*vi) * i64::from(*vi));
                }
            }
        }
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                col.push(i64::from(v[i]) * i64::from(v[j]));
            }
        }
        col
    }

    /// Number of representatives (one per ± pair).
    fn rep_count(&self) -> u64 {
        let m = u64::from(self.m_bound());
        m * (2 * m).pow(self.n as u32 - 1)
    }

    /// Visits every representative: first component positive.
    fn for_each_rep(&self, f: &mut dyn FnMut(&[i32])) {
        let m = self.m_bound() as i32;
        let n = self.n;
        // Digit d at positions ≥ 1 maps to a value: magnitude d/2 + 1,
        // alternating sign. The first position takes magnitudes 1..=M.
        let digit_value = |d: i32| -> i32 {
            let mag = d / 2 + 1;
            if d % 2 == 0 {
                mag
            } else {
                -mag
            }
        };
        let mut digits = vec![0i32; n];
        let mut v = vec![0i32; n];
        loop {
            v[0] = digits[0] + 1;
            for i in 1..n {
                v[i] = digit_value(digits[i]);
            }
            f(&v);
            // Odometer increment.
            let mut pos = n;
            loop {
                if pos == 0 {
                    return;
                }
                pos -= 1;
                let radix = if pos == 0 { m } else { 2 * m };
                digits[pos] += 1;
                if digits[pos] < radix {
                    break;
                }
                digits[pos] = 0;
                if pos == 0 {
                    return;
                }
            }
        }
    }

    /// Builds the separating matrix from a Farkas dual: `X` with
    /// `vᵀXv = −(yᵀA_v) ≥ 0` for every point `v` of the discrete set.
    fn witness_from_dual(&self, dual: &[BigRational]) -> Vec<BigRational> {
        let n = self.n;
        let mut x = vec![BigRational::from_integer(0.into()); n * n];
        match self.kind {
            ClassKind::Unit => {
                let diag = -dual[0].clone() / BigRational::from_integer(n.into());
                for i in 0..n {
                    x[i * n + i] = diag.clone();
                }
            }
            ClassKind::Lattice { .. } => {
                for i in 0..n {
                    x[i * n + i] = -dual[i].clone();
                }
            }
        }
        let mut row = self.diag_rows();
        let half = BigRational::new(1.into(), 2.into());
        for i in 0..n {
            for j in (i + 1)..n {
                let v = -dual[row].clone() * &half;
                x[i * n + j] = v.clone();
                x[j * n + i] = v;
                row += 1;
            }
        }
        x
    }
}

// ---------------------------------------------------------------------------
// Solvers
// ---------------------------------------------------------------------------

enum LpResolution {
    Feasible(Vec<(Vec<i32>, BigRational)>),
    Infeasible { dual: Vec<BigRational> },
}

fn membership_test(acf: &AcfSequence, opts: &MembershipOptions) -> Result<MembershipVerdict> {
    let n = acf.order();
    if n > opts.order_cap {
        return Err(Error::Capacity(format!(
            "order {n} above the configured cap {}",
            opts.order_cap
        )));
    }
    let problem = ConeProblem::new(n, acf.kind());
    if problem.rep_count() > opts.lattice_rep_cap.min(LATTICE_ENUM_CAP / 2) {
        return Err(Error::Capacity(format!(
            "{} outer-product representatives exceed the cap {}",
            problem.rep_count(),
            opts.lattice_rep_cap
        )));
    }

    let use_colgen = match opts.method {
        FeasibilityMethod::FullEnumeration => false,
        FeasibilityMethod::ColumnGeneration => true,
        FeasibilityMethod::Auto => problem.rep_count() > AUTO_COLGEN_THRESHOLD,
    };
    let resolution = if use_colgen {
        solve_column_generation(&problem, acf.rho(), opts)?
    } else {
        solve_full_enumeration(&problem, acf.rho())?
    };
    finish(&problem, acf, resolution)
}

fn solve_full_enumeration(problem: &ConeProblem, rho: &[f64]) -> Result<LpResolution> {
    let b = problem.rhs(rho)?;
    let mut vectors = Vec::with_capacity(problem.rep_count() as usize);
    let mut columns = Vec::with_capacity(problem.rep_count() as usize);
    problem.for_each_rep(&mut |v| {
        vectors.push(v.to_vec());
        columns.push(problem.column_of(v));
    });
    match phase1_feasibility(&columns, &b)? {
        Phase1Outcome::Feasible { weights } => Ok(LpResolution::Feasible(
            weights
                .into_iter()
                .map(|(j, w)| (vectors[j].clone(), w))
                .collect(),
        )),
        Phase1Outcome::Infeasible { dual, .. } => Ok(LpResolution::Infeasible { dual }),
    }
}

fn solve_column_generation(
    problem: &ConeProblem,
    rho: &[f64],
    opts: &MembershipOptions,
) -> Result<LpResolution> {
    let b = problem.rhs(rho)?;
    let mut vectors: Vec<Vec<i32>> = Vec::new();
    let mut seen: HashSet<Vec<i32>> = HashSet::new();
    for v in initial_columns(problem) {
        if seen.insert(v.clone()) {
            vectors.push(v);
        }
    }
    let mut columns: Vec<Vec<i64>> = vectors.iter().map(|v| problem.column_of(v)).collect();

    for round in 0..MAX_COLGEN_ROUNDS {
        match phase1_feasibility(&columns, &b)? {
            Phase1Outcome::Feasible { weights } => {
                return Ok(LpResolution::Feasible(
                    weights
                        .into_iter()
                        .map(|(j, w)| (vectors[j].clone(), w))
                        .collect(),
                ));
            }
            Phase1Outcome::Infeasible { dual, .. } => {
                match price_out(problem, &dual, &seen, opts, round)? {
                    Some(v) => {
                        columns.push(problem.column_of(&v));
                        seen.insert(v.clone());
                        vectors.push(v);
                    }
                    // No column prices out: the dual separates globally.
                    None => return Ok(LpResolution::Infeasible { dual }),
                }
            }
        }
    }
    Err(Error::Internal(format!(
        "column generation did not settle within {MAX_COLGEN_ROUNDS} rounds"
    )))
}

fn initial_columns(problem: &ConeProblem) -> Vec<Vec<i32>> {
    let n = problem.n;
    let m = problem.m_bound() as i32;
    let mut out = vec![vec![1; n]];
    for i in 1..n {
        let mut v = vec![1; n];
        v[i] = -1;
        out.push(v);
    }
    if m > 1 {
        out.push(vec![m; n]);
    }
    out
}

/// Finds a representative whose column prices out strictly positive against
/// the dual, or proves none exists. A seeded heuristic search goes first;
/// the exact enumeration pricer settles the terminal rounds. Candidates are
/// screened in f64 and confirmed in exact arithmetic before use.
fn price_out(
    problem: &ConeProblem,
    dual: &[BigRational],
    seen: &HashSet<Vec<i32>>,
    opts: &MembershipOptions,
    round: usize,
) -> Result<Option<Vec<i32>>> {
    let yf: Vec<f64> = dual.iter().map(rational_to_f64).collect();

    let confirm = |v: &[i32]| -> bool {
        price_column(dual, &problem.column_of(v)).is_positive()
    };

    if let Some(cand) = heuristic_candidate(problem, &yf, opts, round as u64)? {
        if !seen.contains(&cand) && confirm(&cand) {
            return Ok(Some(cand));
        }
    }

    // Exact pricer: screen all representatives in f64 with a rigorous error
    // bound, then confirm survivors exactly, best first.
    let m2 = f64::from(problem.m_bound()).powi(2);
    let y_scale: f64 = yf.iter().map(|v| v.abs()).sum();
    let bound = (problem.rows() as f64 + 2.0) * 1e-15 * (1.0 + y_scale) * m2;

    let mut candidates: Vec<(f64, Vec<i32>)> = Vec::new();
    let mut col = Vec::new();
    problem.for_each_rep(&mut |v| {
        col.clear();
        col.extend_from_slice(&problem.column_of(v));
        let q: f64 = yf.iter().zip(&col).map(|(y, a)| y * (*a as f64)).sum();
        if q > -bound {
            candidates.push((q, v.to_vec()));
        }
    });
    candidates.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite prices"));
    for (_, v) in candidates {
        if seen.contains(&v) {
            continue;
        }
        if confirm(&v) {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// Heuristic pricing: maximize the dual-priced quadratic form over the
/// discrete set with the multi-start serial dynamics.
fn heuristic_candidate(
    problem: &ConeProblem,
    yf: &[f64],
    opts: &MembershipOptions,
    round: u64,
) -> Result<Option<Vec<i32>>> {
    let n = problem.n;
    if n < 2 {
        return Ok(None);
    }
    let ms = MultiStart {
        starts: opts.pricing_starts.max(1),
        seed: crate::rng::derive(opts.seed, &[0x7072, round]),
        max_sweeps: 100 + 4 * n,
    };
    let mut pair = SymmetricMatrix::zeros(n);
    let mut row = problem.diag_rows();
    for i in 0..n {
        for j in (i + 1)..n {
            pair.set_sym(i, j, yf[row] / 2.0);
            row += 1;
        }
    }
    match problem.kind {
        ClassKind::Unit => {
            // Maximize εᵀYε: stable (ascent) dynamics on the pair matrix.
            let split = SymmetricSplit::from_parts(pair, 0.0)?;
            let best = run_stable_multi(&split, ms)?;
            match best.best_point {
                DiscretePoint::Sign(v) => Ok(Some(v.canonical().bits().to_vec())),
                DiscretePoint::Lattice(_) => Ok(None),
            }
        }
        ClassKind::Lattice { m_bound } => {
            // Maximize vᵀYv = minimize vᵀ(−Y)v over the lattice.
            let mut neg = pair.scaled(-1.0);
            for i in 0..n {
                neg.set_sym(i, i, -yf[i]);
            }
            let best = lattice_descent_multi(&neg, m_bound, ms)?;
            match best.best_point {
                DiscretePoint::Lattice(v) => Ok(Some(v.canonical().vals().to_vec())),
                DiscretePoint::Sign(_) => Ok(None),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Certificate construction
// ---------------------------------------------------------------------------

fn finish(
    problem: &ConeProblem,
    acf: &AcfSequence,
    resolution: LpResolution,
) -> Result<MembershipVerdict> {
    let order = acf.order();
    let r = acf.toeplitz();
    match resolution {
        LpResolution::Feasible(terms) => {
            let mut decomposition: Vec<DecompositionTerm> = terms
                .into_iter()
                .map(|(vector, w)| DecompositionTerm {
                    weight: rational_to_f64(&w),
                    vector,
                })
                .collect();
            decomposition.sort_by(|a, b| {
                b.weight
                    .partial_cmp(&a.weight)
                    .expect("finite weights")
                    .then_with(|| a.vector.cmp(&b.vector))
            });
            let check = verify_decomposition(r.matrix(), &decomposition)?;
            if check.residual > CERT_TOL {
                return Err(Error::Internal(format!(
                    "exact decomposition reconstructs with residual {:e}",
                    check.residual
                )));
            }
            Ok(MembershipVerdict::Member {
                order,
                decomposition,
                residual: check.residual,
                weight_sum: check.weight_sum,
            })
        }
        LpResolution::Infeasible { dual } => {
            let witness = realize_witness(problem, &dual, r.matrix())?;
            let check = verify_witness(r.matrix(), &witness, acf.kind())?;
            if !check.is_positive_on_set || check.trace_value > -CERT_TOL {
                return Err(Error::Internal(format!(
                    "separating dual failed re-verification: min {:e}, trace {:e}",
                    check.min_value, check.trace_value
                )));
            }
            Ok(MembershipVerdict::NonMember {
                order,
                witness,
                trace_value: check.trace_value,
                witness_verified: true,
            })
        }
    }
}

/// Converts the exact Farkas dual into an f64 witness matrix: normalized to
/// unit max entry, then lifted by a small multiple of the identity so that
/// the exact nonnegativity on the discrete set survives the rounding to f64.
/// The lift is kept a factor 100 below the separation margin.
fn realize_witness(
    problem: &ConeProblem,
    dual: &[BigRational],
    r: &SymmetricMatrix,
) -> Result<SymmetricMatrix> {
    let n = problem.n;
    let x_rat = problem.witness_from_dual(dual);
    let max_abs = x_rat
        .iter()
        .map(|v| v.abs())
        .max()
        .ok_or_else(|| Error::Internal("empty witness".into()))?;
    if !max_abs.is_positive() {
        return Err(Error::Internal("zero separating dual".into()));
    }

    let mut x = SymmetricMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let scaled = &x_rat[i * n + j] / &max_abs;
            x.set_sym(i, j, rational_to_f64(&scaled));
        }
    }

    let trace_pre = trace_product(r, &x)?;
    let rho0 = r.get(0, 0);
    let lift = (trace_pre.abs() / (100.0 * n as f64 * rho0.max(1.0))).clamp(1e-12, 1e-9);
    Ok(x.add_diagonal(lift))
}
