//! Jump-process simulation: semi-Markov processes, Markov jump processes via
//! competing clocks or the embedded chain, uniformization, and the
//! Poisson-weighted series for transient distributions.

use rand::Rng;

use crate::error::{Error, Result};
use crate::pointproc::{sample_exp, GeneratorMatrix, Segment, SojournModel, Trajectory};
use crate::rng;

fn validate_stochastic(p: &[Vec<f64>], require_zero_diag: bool) -> Result<usize> {
    let n = p.len();
    if n == 0 {
        return Err(Error::Validation("stochastic matrix must be non-empty".into()));
    }
    for (i, row) in p.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Dimension(format!(
                "stochastic row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        let mut sum = 0.0;
        for (j, v) in row.iter().enumerate() {
            if !v.is_finite() || *v < -1e-12 {
                return Err(Error::Validation(format!(
                    "probability ({i},{j}) = {v} must be ≥ 0"
                )));
            }
            if require_zero_diag && i == j && *v != 0.0 {
                return Err(Error::Validation(format!(
                    "embedded chain must have zero diagonal; ({i},{i}) = {v}"
                )));
            }
            sum += v;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "stochastic row {i} sums to {sum}, expected 1"
            )));
        }
    }
    Ok(n)
}

fn categorical_draw<R: Rng>(row: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (j, p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return j;
        }
    }
    // Rounding edge: fall back to the last positive entry.
    row.iter()
        .rposition(|p| *p > 0.0)
        .expect("validated stochastic row")
}

/// Simulates a semi-Markov process: draws the current state's sojourn, then
/// jumps along the embedded chain (zero diagonal, so states always change).
pub fn semi_markov_simulate(
    p_embedded: &[Vec<f64>],
    sojourns: &[SojournModel],
    init_state: usize,
    horizon: f64,
    seed: u64,
) -> Result<Trajectory> {
    let n = validate_stochastic(p_embedded, true)?;
    if sojourns.len() != n {
        return Err(Error::Dimension(format!(
            "{} sojourn models for {n} states",
            sojourns.len()
        )));
    }
    for m in sojourns {
        m.validate()?;
    }
    if init_state >= n {
        return Err(Error::Validation(format!(
            "initial state {init_state} out of range for {n} states"
        )));
    }
    if horizon.is_nan() || horizon <= 0.0 {
        return Err(Error::Validation(format!("horizon {horizon} must be > 0")));
    }

    let mut rng = rng::master(seed);
    let mut segments = vec![Segment {
        enter_time: 0.0,
        state: init_state,
    }];
    let mut t = 0.0;
    let mut state = init_state;
    loop {
        let gap = sojourns[state].sample(&mut rng);
        t += gap;
        if t > horizon {
            break;
        }
        state = categorical_draw(&p_embedded[state], &mut rng);
        segments.push(Segment {
            enter_time: t,
            state,
        });
    }
    Trajectory::new(segments, horizon, false)
}

/// Completed sojourns per state plus the censored final visit.
#[derive(Clone, Debug, PartialEq)]
pub struct SojournExtract {
    /// completed[s] lists the durations of finished visits to state s.
    pub completed: Vec<Vec<f64>>,
    pub censored_state: usize,
    pub censored_duration: f64,
}

impl SojournExtract {
    /// Total booked time: completed plus censored. Equals the horizon.
    pub fn total(&self) -> f64 {
        self.completed.iter().flatten().sum::<f64>() + self.censored_duration
    }
}

/// Splits a trajectory into per-state sojourn sequences. The final visit is
/// cut off by the horizon and reported separately.
pub fn extract_sojourns(t: &Trajectory) -> SojournExtract {
    let n_states = t.segments.iter().map(|s| s.state).max().unwrap_or(0) + 1;
    let mut completed = vec![Vec::new(); n_states];
    for w in t.segments.windows(2) {
        completed[w[0].state].push(w[1].enter_time - w[0].enter_time);
    }
    let last = t.segments.last().expect("non-empty trajectory");
    SojournExtract {
        completed,
        censored_state: last.state,
        censored_duration: t.horizon - last.enter_time,
    }
}

/// Simulates a Markov jump process with one exponential clock per positive
/// rate out of the current state; the earliest clock wins the jump. States
/// with no outgoing rates absorb the run (flagged on the trajectory).
pub fn ctmc_simulate_competing(
    g: &GeneratorMatrix,
    init_state: usize,
    horizon: f64,
    seed: u64,
) -> Result<Trajectory> {
    simulate_ctmc(g, init_state, horizon, seed, JumpLaw::CompetingClocks)
}

/// Simulates the same law via the embedded chain: one Exponential(−q_ii)
/// sojourn, then a categorical jump with probabilities q_ij/(−q_ii).
pub fn ctmc_simulate_embedded(
    g: &GeneratorMatrix,
    init_state: usize,
    horizon: f64,
    seed: u64,
) -> Result<Trajectory> {
    simulate_ctmc(g, init_state, horizon, seed, JumpLaw::EmbeddedChain)
}

enum JumpLaw {
    CompetingClocks,
    EmbeddedChain,
}

fn simulate_ctmc(
    g: &GeneratorMatrix,
    init_state: usize,
    horizon: f64,
    seed: u64,
    law: JumpLaw,
) -> Result<Trajectory> {
    let n = g.n();
    if init_state >= n {
        return Err(Error::Validation(format!(
            "initial state {init_state} out of range for {n} states"
        )));
    }
    if horizon.is_nan() || horizon <= 0.0 {
        return Err(Error::Validation(format!("horizon {horizon} must be > 0")));
    }
    let mut rng = rng::master(seed);
    let mut segments = vec![Segment {
        enter_time: 0.0,
        state: init_state,
    }];
    let mut t = 0.0;
    let mut state = init_state;
    let mut absorbed = false;
    loop {
        let exit = g.exit_rate(state);
        if exit == 0.0 {
            absorbed = true;
            break;
        }
        let (gap, next) = match law {
            JumpLaw::CompetingClocks => {
                let mut best: Option<(f64, usize)> = None;
                for j in 0..n {
                    if j == state {
                        continue;
                    }
                    let rate = g.rate(state, j);
                    if rate > 0.0 {
                        let clock = sample_exp(rate, &mut rng);
                        if best.map_or(true, |(b, _)| clock < b) {
                            best = Some((clock, j));
                        }
                    }
                }
                best.expect("positive exit rate has at least one clock")
            }
            JumpLaw::EmbeddedChain => {
                let gap = sample_exp(exit, &mut rng);
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut next = state;
                for j in 0..n {
                    if j == state {
                        continue;
                    }
                    acc += g.rate(state, j) / exit;
                    if u < acc {
                        next = j;
                        break;
                    }
                }
                if next == state {
                    // Rounding edge: take the last positive-rate successor.
                    next = (0..n)
                        .rev()
                        .find(|j| *j != state && g.rate(state, *j) > 0.0)
                        .expect("positive exit rate");
                }
                (gap, next)
            }
        };
        t += gap;
        if t > horizon {
            break;
        }
        state = next;
        segments.push(Segment {
            enter_time: t,
            state,
        });
    }
    Trajectory::new(segments, horizon, absorbed)
}

/// Uniformization: `p = I + q/lambda` for a rate `lambda ≥ max exit rate`.
/// Returns the jump matrix (self-loops allowed) and the rate used.
pub fn uniformize(g: &GeneratorMatrix, lambda: Option<f64>) -> Result<(Vec<Vec<f64>>, f64)> {
    let max_rate = g.max_exit_rate();
    let lambda = lambda.unwrap_or(max_rate);
    if lambda < max_rate {
        return Err(Error::Validation(format!(
            "uniformization rate {lambda} below the max exit rate {max_rate}"
        )));
    }
    let n = g.n();
    let mut p = vec![vec![0.0; n]; n];
    if lambda == 0.0 {
        // Zero generator: the chain never moves.
        for (i, row) in p.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        return Ok((p, 0.0));
    }
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            p[i][j] = (delta + g.rate(i, j) / lambda).max(0.0);
        }
    }
    Ok((p, lambda))
}

/// Simulates the uniformized chain: a Poisson(lambda) event clock drives
/// jumps of `p`; self-transitions leave no trace in the trajectory.
pub fn uniformized_simulate(
    p: &[Vec<f64>],
    lambda: f64,
    init_state: usize,
    horizon: f64,
    seed: u64,
) -> Result<Trajectory> {
    let n = validate_stochastic(p, false)?;
    if init_state >= n {
        return Err(Error::Validation(format!(
            "initial state {init_state} out of range for {n} states"
        )));
    }
    if horizon.is_nan() || horizon <= 0.0 {
        return Err(Error::Validation(format!("horizon {horizon} must be > 0")));
    }
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::Validation(format!("invalid event rate {lambda}")));
    }
    let mut segments = vec![Segment {
        enter_time: 0.0,
        state: init_state,
    }];
    if lambda > 0.0 {
        let mut rng = rng::master(seed);
        let mut t = 0.0;
        let mut state = init_state;
        loop {
            t += sample_exp(lambda, &mut rng);
            if t > horizon {
                break;
            }
            let next = categorical_draw(&p[state], &mut rng);
            if next != state {
                state = next;
                segments.push(Segment {
                    enter_time: t,
                    state,
                });
            }
        }
    }
    Trajectory::new(segments, horizon, false)
}

/// Transient state distribution at time `t` by the uniformization series:
/// Poisson(lambda·t) weights on the powers of the uniformized jump matrix,
/// truncated once the remaining Poisson tail drops below `tol`.
pub fn transient_distribution(
    g: &GeneratorMatrix,
    t: f64,
    init_state: usize,
    tol: f64,
    lambda: Option<f64>,
) -> Result<Vec<f64>> {
    let n = g.n();
    if init_state >= n {
        return Err(Error::Validation(format!(
            "initial state {init_state} out of range for {n} states"
        )));
    }
    if t.is_nan() || t < 0.0 {
        return Err(Error::Validation(format!("time {t} must be ≥ 0")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Validation(format!("tolerance {tol} must be > 0")));
    }
    let (p, lambda) = uniformize(g, lambda)?;
    let mut v = vec![0.0; n];
    v[init_state] = 1.0;
    let lt = lambda * t;
    if lt == 0.0 {
        return Ok(v);
    }
    let mut weight = (-lt).exp();
    if weight == 0.0 {
        return Err(Error::Validation(format!(
            "lambda·t = {lt} too large for the series (Poisson weights underflow)"
        )));
    }
    let mut cum = weight;
    let mut dist: Vec<f64> = v.iter().map(|x| x * weight).collect();
    let max_terms = (3.0 * lt + 120.0) as usize + (2.0 / tol).log2() as usize;
    for k in 1..=max_terms {
        // v ← v·P
        let mut next = vec![0.0; n];
        for (i, vi) in v.iter().enumerate() {
            if *vi == 0.0 {
                continue;
            }
            for j in 0..n {
                next[j] += vi * p[i][j];
            }
        }
        v = next;
        weight *= lt / k as f64;
        cum += weight;
        for (d, vi) in dist.iter_mut().zip(&v) {
            *d += weight * vi;
        }
        if 1.0 - cum < tol {
            return Ok(dist);
        }
    }
    Err(Error::Internal(format!(
        "uniformization series did not reach tail {tol:e} in {max_terms} terms"
    )))
}

/// Samples the trajectory every `sample_dt` and maps states to signed
/// levels, yielding floor(horizon/sample_dt)+1 values.
pub fn map_states_pm(t: &Trajectory, mapping: &[i32], sample_dt: f64) -> Result<Vec<i32>> {
    if sample_dt.is_nan() || sample_dt <= 0.0 {
        return Err(Error::Validation(format!(
            "sample step {sample_dt} must be > 0"
        )));
    }
    if let Some(v) = mapping.iter().find(|v| **v == 0) {
        return Err(Error::Validation(format!(
            "mapping value {v} must be a nonzero signed level"
        )));
    }
    let steps = (t.horizon / sample_dt).floor() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let mut seg = 0usize;
    for k in 0..=steps {
        let time = k as f64 * sample_dt;
        while seg + 1 < t.segments.len() && t.segments[seg + 1].enter_time <= time {
            seg += 1;
        }
        let state = t.segments[seg].state;
        let mapped = mapping.get(state).ok_or_else(|| {
            Error::Validation(format!("state {state} has no mapping (len {})", mapping.len()))
        })?;
        out.push(*mapped);
    }
    Ok(out)
}
