//! Quadratic-form optimization over the sign hypercube and the bounded
//! symmetric lattice.
//!
//! Two families of routines live here: serial sign dynamics (the
//! anti-stable/stable successive-approximation sweeps, and coordinate descent
//! on the lattice) and exhaustive enumeration oracles used to certify what
//! the dynamics find. Hypercube dynamics operate on the zero-diagonal part of
//! the form only — the diagonal is constant on the hypercube. Lattice
//! routines take the full symmetric matrix because x_i² varies there.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadform::{qf_value, LatticeVector, SignVector, SymmetricMatrix, SymmetricSplit};
use crate::rng;

/// Largest hypercube dimension the exhaustive routines accept by default.
pub const HYPERCUBE_ENUM_CAP: usize = 24;

/// Largest lattice point count (2M)^n the exhaustive routines accept by default.
pub const LATTICE_ENUM_CAP: u64 = 1 << 24;

/// Hard ceiling on any enumeration cap a caller can configure.
pub const ENUM_CAP_LIMIT: usize = 30;

/// Most representatives kept in an argmin set before truncation.
const ARGMIN_SET_LIMIT: usize = 4096;

/// A point of either discrete domain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum DiscretePoint {
    Sign(SignVector),
    Lattice(LatticeVector),
}

impl DiscretePoint {
    pub fn components(&self) -> &[i32] {
        match self {
            DiscretePoint::Sign(v) => v.bits(),
            DiscretePoint::Lattice(v) => v.vals(),
        }
    }
}

/// Outcome of a serial descent/ascent run.
#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub best_point: DiscretePoint,
    /// Value of the optimized form at `best_point` (zero-diagonal form for
    /// hypercube runs; the full form for lattice runs).
    pub best_value: f64,
    pub sweeps_used: usize,
    /// Form value after each accepted flip, in order.
    pub energy_trace: Vec<f64>,
}

/// Outcome of an exhaustive scan, up to global sign.
#[derive(Clone, Debug, Serialize)]
pub struct EnumerationResult {
    pub min_value: f64,
    pub argmin_set: Vec<DiscretePoint>,
    pub count_enumerated: u64,
    /// Set when more minimizers exist than the argmin set retains.
    pub argmin_truncated: bool,
}

/// Initial point for a search: explicit, or drawn from a seeded stream.
#[derive(Clone, Debug)]
pub enum Start<P> {
    Point(P),
    Seed(u64),
}

/// Component visit order within a sweep. The default is ascending index;
/// the seeded variant draws a fresh permutation per sweep, reproducibly.
/// Either order converges: every accepted flip still strictly improves.
#[derive(Clone, Copy, Debug)]
pub enum SweepOrder {
    Ascending,
    SeededPermutation(u64),
}

/// Multi-start configuration. Start `k` draws its initial point from
/// substream `k` of the master seed, so batches reduce identically whether
/// run serially or in parallel.
#[derive(Clone, Copy, Debug)]
pub struct MultiStart {
    pub starts: usize,
    pub seed: u64,
    pub max_sweeps: usize,
}

/// `xᵀ a x` for a sign/lattice point without going through f64 vectors.
/// Exact whenever the matrix entries are integers of moderate size.
pub fn qf_discrete(a: &SymmetricMatrix, x: &[i32]) -> f64 {
    debug_assert_eq!(x.len(), a.n());
    let mut acc = 0.0;
    for i in 0..a.n() {
        let row = a.row(i);
        let mut s = 0.0;
        for (j, xj) in x.iter().enumerate() {
            s += row[j] * f64::from(*xj);
        }
        acc += f64::from(x[i]) * s;
    }
    acc
}

fn gradient(a: &SymmetricMatrix, x: &[i32]) -> Vec<f64> {
    (0..a.n())
        .map(|i| {
            a.row(i)
                .iter()
                .zip(x)
                .map(|(e, xj)| e * f64::from(*xj))
                .sum()
        })
        .collect()
}

/// Uniform random sign vector from `rng`.
pub fn random_sign_vector<R: Rng>(n: usize, rng: &mut R) -> SignVector {
    let bits = (0..n)
        .map(|_| if rng.random::<bool>() { 1 } else { -1 })
        .collect();
    SignVector::new(bits).expect("n > 0")
}

/// Uniform random lattice vector from `rng`.
pub fn random_lattice_vector<R: Rng>(n: usize, m_bound: u32, rng: &mut R) -> LatticeVector {
    let m = m_bound as i32;
    let vals = (0..n)
        .map(|_| {
            let k = rng.random_range(0..2 * m);
            if k < m {
                k - m // −M … −1
            } else {
                k - m + 1 // 1 … M
            }
        })
        .collect();
    LatticeVector::new(vals, m_bound).expect("valid by construction")
}

/// Change in `xᵀEx` caused by flipping component `i`: −4·x_i·(Ex)_i.
pub fn flip_gain(split: &SymmetricSplit, x: &SignVector, i: usize) -> Result<f64> {
    if x.len() != split.n() {
        return Err(Error::Dimension(format!(
            "point length {} vs form order {}",
            x.len(),
            split.n()
        )));
    }
    if i >= split.n() {
        return Err(Error::Dimension(format!(
            "component index {i} out of range for order {}",
            split.n()
        )));
    }
    let gi: f64 = split
        .e()
        .row(i)
        .iter()
        .zip(x.bits())
        .map(|(e, xj)| e * f64::from(*xj))
        .sum();
    Ok(-4.0 * f64::from(x.get(i)) * gi)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Minimize: x_i ← −sign((Ex)_i).
    AntiStable,
    /// Maximize: x_i ← sign((Ex)_i).
    Stable,
}

/// One serial sweep of the sign dynamics over components in the given
/// order. Components with (Ex)_i = 0 are left unchanged (tie rule), so
/// every accepted flip changes the form strictly.
fn sweep_inplace(
    e: &SymmetricMatrix,
    x: &mut SignVector,
    g: &mut [f64],
    value: &mut f64,
    trace: &mut Vec<f64>,
    mode: Mode,
    order: &[usize],
) -> bool {
    let mut changed = false;
    for &i in order {
        let gi = g[i];
        if gi == 0.0 {
            continue;
        }
        let sign = if gi > 0.0 { 1 } else { -1 };
        let target = match mode {
            Mode::AntiStable => -sign,
            Mode::Stable => sign,
        };
        let current = x.get(i);
        if current == target {
            continue;
        }
        let gain = -4.0 * f64::from(current) * gi;
        *value += gain;
        trace.push(*value);
        x.set(i, target);
        let delta = f64::from(target - current);
        for (j, gj) in g.iter_mut().enumerate() {
            *gj += e.get(j, i) * delta;
        }
        changed = true;
    }
    changed
}

/// Single anti-stable sweep; returns the updated point and whether any
/// component changed.
pub fn anti_stable_sweep(split: &SymmetricSplit, x: &SignVector) -> Result<(SignVector, bool)> {
    single_sweep(split, x, Mode::AntiStable)
}

/// Single stable (ascent) sweep.
pub fn stable_sweep(split: &SymmetricSplit, x: &SignVector) -> Result<(SignVector, bool)> {
    single_sweep(split, x, Mode::Stable)
}

fn single_sweep(split: &SymmetricSplit, x: &SignVector, mode: Mode) -> Result<(SignVector, bool)> {
    if x.len() != split.n() {
        return Err(Error::Dimension(format!(
            "point length {} vs form order {}",
            x.len(),
            split.n()
        )));
    }
    let mut out = x.clone();
    let mut g = gradient(split.e(), x.bits());
    let mut value = qf_discrete(split.e(), x.bits());
    let mut trace = Vec::new();
    let order: Vec<usize> = (0..split.n()).collect();
    let changed = sweep_inplace(split.e(), &mut out, &mut g, &mut value, &mut trace, mode, &order);
    Ok((out, changed))
}

fn run_dynamics(
    split: &SymmetricSplit,
    start: Start<SignVector>,
    max_sweeps: usize,
    mode: Mode,
    order: SweepOrder,
) -> Result<SearchResult> {
    if max_sweeps == 0 {
        return Err(Error::Validation("max_sweeps must be ≥ 1".into()));
    }
    let mut x = match start {
        Start::Point(p) => {
            if p.len() != split.n() {
                return Err(Error::Dimension(format!(
                    "start length {} vs form order {}",
                    p.len(),
                    split.n()
                )));
            }
            p
        }
        Start::Seed(seed) => random_sign_vector(split.n(), &mut rng::master(seed)),
    };
    let e = split.e();
    let mut g = gradient(e, x.bits());
    let mut value = qf_discrete(e, x.bits());
    let mut trace = Vec::new();
    let mut visit: Vec<usize> = (0..split.n()).collect();
    let mut perm_rng = match order {
        SweepOrder::Ascending => None,
        SweepOrder::SeededPermutation(seed) => Some(rng::substream(seed, u64::MAX)),
    };
    for sweep in 1..=max_sweeps {
        if let Some(rng) = perm_rng.as_mut() {
            use rand::seq::SliceRandom;
            visit.shuffle(rng);
        }
        let changed = sweep_inplace(e, &mut x, &mut g, &mut value, &mut trace, mode, &visit);
        if !changed {
            return Ok(SearchResult {
                best_point: DiscretePoint::Sign(x),
                best_value: value,
                sweeps_used: sweep,
                energy_trace: trace,
            });
        }
    }
    Err(Error::NonConvergence {
        max_sweeps,
        last_point: x.bits().to_vec(),
        last_value: value,
    })
}

/// Serial descent to an anti-stable fixed point (x = −sign(Ex) off ties),
/// visiting components in ascending order.
pub fn run_anti_stable(
    split: &SymmetricSplit,
    start: Start<SignVector>,
    max_sweeps: usize,
) -> Result<SearchResult> {
    run_dynamics(split, start, max_sweeps, Mode::AntiStable, SweepOrder::Ascending)
}

/// As [`run_anti_stable`] with an explicit sweep order.
pub fn run_anti_stable_ordered(
    split: &SymmetricSplit,
    start: Start<SignVector>,
    max_sweeps: usize,
    order: SweepOrder,
) -> Result<SearchResult> {
    run_dynamics(split, start, max_sweeps, Mode::AntiStable, order)
}

/// Serial ascent to a stable fixed point (x = sign(Ex) off ties).
pub fn run_stable(
    split: &SymmetricSplit,
    start: Start<SignVector>,
    max_sweeps: usize,
) -> Result<SearchResult> {
    run_dynamics(split, start, max_sweeps, Mode::Stable, SweepOrder::Ascending)
}

/// As [`run_stable`] with an explicit sweep order.
pub fn run_stable_ordered(
    split: &SymmetricSplit,
    start: Start<SignVector>,
    max_sweeps: usize,
    order: SweepOrder,
) -> Result<SearchResult> {
    run_dynamics(split, start, max_sweeps, Mode::Stable, order)
}

/// True iff no single flip strictly decreases `xᵀEx`: x_i·(Ex)_i ≤ 0 for all i.
pub fn is_anti_stable(split: &SymmetricSplit, x: &SignVector) -> bool {
    let g = gradient(split.e(), x.bits());
    x.bits()
        .iter()
        .zip(&g)
        .all(|(xi, gi)| f64::from(*xi) * gi <= 0.0)
}

/// Mirrored condition: no single flip strictly increases the form.
pub fn is_stable(split: &SymmetricSplit, x: &SignVector) -> bool {
    let g = gradient(split.e(), x.bits());
    x.bits()
        .iter()
        .zip(&g)
        .all(|(xi, gi)| f64::from(*xi) * gi >= 0.0)
}

fn check_hypercube_cap(n: usize, cap: usize) -> Result<()> {
    let cap = cap.min(ENUM_CAP_LIMIT);
    if n > cap {
        return Err(Error::Capacity(format!(
            "hypercube enumeration needs 2^{} points but the cap is n ≤ {cap}; \
             use the heuristic search (multi-start anti-stable descent) instead",
            n.saturating_sub(1)
        )));
    }
    Ok(())
}

/// Exact minimum of `xᵀcx` over the sign hypercube, scanning the 2^(n−1)
/// representatives with first component +1 (x and −x share the value).
pub fn enumerate_hypercube_min(c: &SymmetricMatrix, cap: usize) -> Result<EnumerationResult> {
    check_hypercube_cap(c.n(), cap)?;
    let split = crate::quadform::symmetrize_zero_diag(&c.into());
    let offset = split.trace_offset();
    let e = split.e();
    let n = e.n();

    let mut x = vec![1i32; n];
    let mut g = gradient(e, &x);
    let mut value = qf_discrete(e, &x) + offset;

    let mut min_value = value;
    let mut argmins = vec![x.clone()];
    let mut truncated = false;
    let total: u64 = 1 << (n - 1);
    for k in 1..total {
        // Reflected Gray code over components 1..n; component 0 stays +1.
        let i = k.trailing_zeros() as usize + 1;
        let xi = x[i];
        value += -4.0 * f64::from(xi) * g[i];
        x[i] = -xi;
        let delta = f64::from(-2 * xi);
        for (j, gj) in g.iter_mut().enumerate() {
            *gj += e.get(j, i) * delta;
        }
        if value < min_value {
            min_value = value;
            argmins.clear();
            argmins.push(x.clone());
            truncated = false;
        } else if value == min_value {
            if argmins.len() < ARGMIN_SET_LIMIT {
                argmins.push(x.clone());
            } else {
                truncated = true;
            }
        }
    }

    // Guard against drift from the incremental updates: report the directly
    // recomputed value at the first minimizer.
    let min_value = qf_value(c, &argmins[0].iter().map(|v| f64::from(*v)).collect::<Vec<_>>())?;
    let argmin_set = argmins
        .into_iter()
        .map(|bits| DiscretePoint::Sign(SignVector::new(bits).expect("±1 by construction")))
        .collect();
    Ok(EnumerationResult {
        min_value,
        argmin_set,
        count_enumerated: total,
        argmin_truncated: truncated,
    })
}

/// All anti-stable representatives (first component +1). The condition is
/// invariant under global negation, so this covers the whole hypercube.
pub fn enumerate_anti_stable(split: &SymmetricSplit, cap: usize) -> Result<Vec<SignVector>> {
    check_hypercube_cap(split.n(), cap)?;
    let e = split.e();
    let n = e.n();
    let mut x = vec![1i32; n];
    let mut g = gradient(e, &x);
    let mut out = Vec::new();
    let total: u64 = 1 << (n - 1);
    for k in 0..total {
        if k > 0 {
            let i = k.trailing_zeros() as usize + 1;
            let xi = x[i];
            x[i] = -xi;
            let delta = f64::from(-2 * xi);
            for (j, gj) in g.iter_mut().enumerate() {
                *gj += e.get(j, i) * delta;
            }
        }
        if x.iter().zip(&g).all(|(xi, gi)| f64::from(*xi) * gi <= 0.0) {
            out.push(SignVector::new(x.clone()).expect("±1 by construction"));
        }
    }
    Ok(out)
}

/// Candidate values for one lattice component, in tie-break order:
/// magnitude ascending, positive before negative.
fn lattice_candidates(m_bound: u32) -> impl Iterator<Item = i32> {
    (1..=m_bound as i32).flat_map(|v| [v, -v])
}

/// Serial coordinate descent of `xᵀdx` over {±1, …, ±M}^n. Each component is
/// set to its exact conditional minimizer; ties keep the current value, then
/// prefer smaller magnitude, then positive sign.
pub fn lattice_descent(
    d: &SymmetricMatrix,
    m_bound: u32,
    start: Start<LatticeVector>,
    max_sweeps: usize,
) -> Result<SearchResult> {
    if m_bound == 0 {
        return Err(Error::Validation("lattice bound M must be ≥ 1".into()));
    }
    if max_sweeps == 0 {
        return Err(Error::Validation("max_sweeps must be ≥ 1".into()));
    }
    let n = d.n();
    let mut x = match start {
        Start::Point(p) => {
            if p.len() != n {
                return Err(Error::Dimension(format!(
                    "start length {} vs form order {n}",
                    p.len()
                )));
            }
            if p.m_bound() != m_bound {
                return Err(Error::Validation(format!(
                    "start bound {} does not match requested bound {m_bound}",
                    p.m_bound()
                )));
            }
            p
        }
        Start::Seed(seed) => random_lattice_vector(n, m_bound, &mut rng::master(seed)),
    };

    // r_i = (d·x)_i, maintained across updates.
    let mut r = gradient(d, x.vals());
    let mut value = qf_discrete(d, x.vals());
    let mut trace = Vec::new();

    for sweep in 1..=max_sweeps {
        let mut changed = false;
        for i in 0..n {
            let dii = d.get(i, i);
            let xi = x.get(i);
            let si = r[i] - dii * f64::from(xi);
            let score = |v: i32| {
                let vf = f64::from(v);
                dii * vf * vf + 2.0 * vf * si
            };
            let mut best_v = xi;
            let mut best_score = score(xi);
            for v in lattice_candidates(m_bound) {
                if v == xi {
                    continue;
                }
                let s = score(v);
                if s < best_score {
                    best_score = s;
                    best_v = v;
                }
            }
            if best_v != xi {
                let gain = best_score - score(xi);
                value += gain;
                trace.push(value);
                let delta = f64::from(best_v - xi);
                for (j, rj) in r.iter_mut().enumerate() {
                    *rj += d.get(j, i) * delta;
                }
                x.set(i, best_v);
                changed = true;
            }
        }
        if !changed {
            return Ok(SearchResult {
                best_point: DiscretePoint::Lattice(x),
                best_value: value,
                sweeps_used: sweep,
                energy_trace: trace,
            });
        }
    }
    Err(Error::NonConvergence {
        max_sweeps,
        last_point: x.vals().to_vec(),
        last_value: value,
    })
}

/// Exact minimum of `xᵀdx` over the bounded symmetric lattice, scanning
/// (2M)^n / 2 representatives (first component positive).
pub fn enumerate_lattice_min(
    d: &SymmetricMatrix,
    m_bound: u32,
    cap_points: u64,
) -> Result<EnumerationResult> {
    if m_bound == 0 {
        return Err(Error::Validation("lattice bound M must be ≥ 1".into()));
    }
    let n = d.n();
    let total = (2u64 * u64::from(m_bound))
        .checked_pow(n as u32)
        .filter(|t| *t <= cap_points.min(LATTICE_ENUM_CAP))
        .ok_or_else(|| {
            Error::Capacity(format!(
                "lattice enumeration needs (2·{m_bound})^{n} points, above the cap; \
                 use lattice_descent instead"
            ))
        })?;

    struct Scan<'a> {
        d: &'a SymmetricMatrix,
        m_bound: u32,
        x: Vec<i32>,
        // h[j] = Σ_{i < depth} d[j][i]·x[i]
        h: Vec<f64>,
        min_value: f64,
        argmins: Vec<Vec<i32>>,
        truncated: bool,
        count: u64,
    }

    impl Scan<'_> {
        fn descend(&mut self, depth: usize, value: f64) {
            let n = self.d.n();
            if depth == n {
                self.count += 1;
                if value < self.min_value {
                    self.min_value = value;
                    self.argmins.clear();
                    self.argmins.push(self.x.clone());
                    self.truncated = false;
                } else if value == self.min_value {
                    if self.argmins.len() < ARGMIN_SET_LIMIT {
                        self.argmins.push(self.x.clone());
                    } else {
                        self.truncated = true;
                    }
                }
                return;
            }
            let first = depth == 0;
            let candidates: Vec<i32> = if first {
                (1..=self.m_bound as i32).collect()
            } else {
                lattice_candidates(self.m_bound).collect()
            };
            for v in candidates {
                let vf = f64::from(v);
                let contribution = self.d.get(depth, depth) * vf * vf + 2.0 * vf * self.h[depth];
                self.x[depth] = v;
                for j in 0..n {
                    self.h[j] += self.d.get(j, depth) * vf;
                }
                self.descend(depth + 1, value + contribution);
                for j in 0..n {
                    self.h[j] -= self.d.get(j, depth) * vf;
                }
            }
            self.x[depth] = 0;
        }
    }

    let mut scan = Scan {
        d,
        m_bound,
        x: vec![0; n],
        h: vec![0.0; n],
        min_value: f64::INFINITY,
        argmins: Vec::new(),
        truncated: false,
        count: 0,
    };
    scan.descend(0, 0.0);
    debug_assert_eq!(scan.count, total / 2);

    let min_value = qf_discrete(d, &scan.argmins[0]);
    let argmin_set = scan
        .argmins
        .into_iter()
        .map(|vals| {
            DiscretePoint::Lattice(LatticeVector::new(vals, m_bound).expect("valid candidates"))
        })
        .collect();
    Ok(EnumerationResult {
        min_value,
        argmin_set,
        count_enumerated: total / 2,
        argmin_truncated: scan.truncated,
    })
}

fn better_min(a: SearchResult, b: SearchResult) -> SearchResult {
    let ord = a
        .best_value
        .partial_cmp(&b.best_value)
        .expect("finite values")
        .then_with(|| a.best_point.components().cmp(b.best_point.components()));
    if ord.is_le() {
        a
    } else {
        b
    }
}

fn better_max(a: SearchResult, b: SearchResult) -> SearchResult {
    let ord = b
        .best_value
        .partial_cmp(&a.best_value)
        .expect("finite values")
        .then_with(|| a.best_point.components().cmp(b.best_point.components()));
    if ord.is_le() {
        a
    } else {
        b
    }
}

fn multi_start_signed(
    split: &SymmetricSplit,
    ms: MultiStart,
    mode: Mode,
) -> Result<SearchResult> {
    if ms.starts == 0 {
        return Err(Error::Validation("multi-start needs at least one start".into()));
    }
    let results: Result<Vec<SearchResult>> = (0..ms.starts)
        .into_par_iter()
        .map(|k| {
            let x0 = random_sign_vector(split.n(), &mut rng::substream(ms.seed, k as u64));
            run_dynamics(
                split,
                Start::Point(x0),
                ms.max_sweeps,
                mode,
                SweepOrder::Ascending,
            )
        })
        .collect();
    let reduce = match mode {
        Mode::AntiStable => better_min,
        Mode::Stable => better_max,
    };
    Ok(results?
        .into_iter()
        .reduce(reduce)
        .expect("at least one start"))
}

/// Best anti-stable fixed point over seeded multi-start descent. The
/// reduction (min value, then lexicographically smallest point) is
/// order-independent, so parallel and serial runs agree exactly.
pub fn run_anti_stable_multi(split: &SymmetricSplit, ms: MultiStart) -> Result<SearchResult> {
    multi_start_signed(split, ms, Mode::AntiStable)
}

/// Best stable fixed point over seeded multi-start ascent (max value, then
/// lexicographically smallest point).
pub fn run_stable_multi(split: &SymmetricSplit, ms: MultiStart) -> Result<SearchResult> {
    multi_start_signed(split, ms, Mode::Stable)
}

/// Best lattice descent result over seeded multi-start.
pub fn lattice_descent_multi(
    d: &SymmetricMatrix,
    m_bound: u32,
    ms: MultiStart,
) -> Result<SearchResult> {
    if ms.starts == 0 {
        return Err(Error::Validation("multi-start needs at least one start".into()));
    }
    let results: Result<Vec<SearchResult>> = (0..ms.starts)
        .into_par_iter()
        .map(|k| {
            let x0 = random_lattice_vector(d.n(), m_bound, &mut rng::substream(ms.seed, k as u64));
            lattice_descent(d, m_bound, Start::Point(x0), ms.max_sweeps)
        })
        .collect();
    Ok(results?
        .into_iter()
        .reduce(better_min)
        .expect("at least one start"))
}
