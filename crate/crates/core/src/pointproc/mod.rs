//! Point processes, jump processes, and the statistics connecting them.
//!
//! A finite-state jump process is, per state, a stream of sojourn times; the
//! process itself is the superposition of those streams competing for the
//! next event. This module builds that view operationally: renewal streams
//! and their superposition, semi-Markov simulation, Markov jump processes
//! via competing exponential clocks or the embedded chain, uniformization,
//! Poissonness diagnostics, and autocorrelation estimation for mapped ±M
//! state sequences.

mod markov;
mod renewal;
pub mod stats;
mod telegraph;

pub use markov::{
    ctmc_simulate_competing, ctmc_simulate_embedded, extract_sojourns, map_states_pm,
    semi_markov_simulate, transient_distribution, uniformize, uniformized_simulate,
    SojournExtract,
};
pub use renewal::{
    poisson_stats, sample_renewal, sparse_superposition_experiment, superpose, SparseSummary,
};
pub use telegraph::{acf_estimate, telegraph_simulate, AcfEstimate, DenominatorMode};

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Smallest separation enforced between merged event timestamps.
pub const TIE_JITTER: f64 = 1e-12;

/// One timestamped event and the stream it came from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub source: u32,
}

/// A time-sorted stream of events on [0, horizon].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventStream {
    pub events: Vec<Event>,
    pub horizon: f64,
}

impl EventStream {
    pub fn new(events: Vec<Event>, horizon: f64) -> Result<Self> {
        if horizon.is_nan() || horizon <= 0.0 {
            return Err(Error::Validation(format!("horizon {horizon} must be > 0")));
        }
        let mut prev = -f64::INFINITY;
        for e in &events {
            if e.time.is_nan() || e.time < 0.0 || e.time > horizon {
                return Err(Error::Validation(format!(
                    "event time {} outside [0, {horizon}]",
                    e.time
                )));
            }
            if e.time <= prev {
                return Err(Error::Validation(format!(
                    "event times must be strictly increasing ({prev} then {})",
                    e.time
                )));
            }
            prev = e.time;
        }
        Ok(Self { events, horizon })
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Interarrival times, with the first event measured from time zero.
    pub fn interarrivals(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.events.len());
        let mut prev = 0.0;
        for e in &self.events {
            out.push(e.time - prev);
            prev = e.time;
        }
        out
    }
}

/// One constant-state stretch of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub enter_time: f64,
    pub state: usize,
}

/// Piecewise-constant state path on [0, horizon]. `absorbed` marks runs that
/// halted in a state with no outgoing rates before the horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub segments: Vec<Segment>,
    pub horizon: f64,
    pub absorbed: bool,
}

impl Trajectory {
    pub fn new(segments: Vec<Segment>, horizon: f64, absorbed: bool) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Validation(
                "trajectory needs at least one segment".into(),
            ));
        }
        if segments[0].enter_time != 0.0 {
            return Err(Error::Validation(format!(
                "first segment must start at 0, got {}",
                segments[0].enter_time
            )));
        }
        for w in segments.windows(2) {
            if w[1].enter_time <= w[0].enter_time || w[1].enter_time > horizon {
                return Err(Error::Validation(format!(
                    "segment times must increase within (0, {horizon}]"
                )));
            }
            if w[1].state == w[0].state {
                return Err(Error::Validation(
                    "consecutive segments must change state".into(),
                ));
            }
        }
        Ok(Self {
            segments,
            horizon,
            absorbed,
        })
    }

    pub fn jumps(&self) -> usize {
        self.segments.len() - 1
    }

    /// State occupied at time `t` (segments are left-closed).
    pub fn state_at(&self, t: f64) -> usize {
        match self
            .segments
            .binary_search_by(|s| s.enter_time.partial_cmp(&t).expect("finite times"))
        {
            Ok(i) => self.segments[i].state,
            Err(0) => self.segments[0].state,
            Err(i) => self.segments[i - 1].state,
        }
    }
}

/// Markov jump-process generator: off-diagonal rates, zero row sums.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorMatrix {
    n: usize,
    q: Vec<f64>,
}

impl GeneratorMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::Validation("generator needs at least 2 states".into()));
        }
        let mut q = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "generator row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            let mut sum = 0.0;
            for (j, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::Validation(format!("non-finite rate {v}")));
                }
                if i == j && *v > 1e-12 {
                    return Err(Error::Validation(format!(
                        "diagonal entry ({i},{i}) = {v} must be ≤ 0"
                    )));
                }
                if i != j && *v < -1e-12 {
                    return Err(Error::Validation(format!(
                        "rate ({i},{j}) = {v} must be ≥ 0"
                    )));
                }
                sum += v;
            }
            if sum.abs() > 1e-12 {
                return Err(Error::Validation(format!(
                    "generator row {i} sums to {sum}, expected 0"
                )));
            }
            q.extend_from_slice(row);
        }
        Ok(Self { n, q })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn rate(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.n + j]
    }

    /// Exit rate of state `i` (= −q_ii, clamped at 0).
    pub fn exit_rate(&self, i: usize) -> f64 {
        (-self.rate(i, i)).max(0.0)
    }

    pub fn max_exit_rate(&self) -> f64 {
        (0..self.n).map(|i| self.exit_rate(i)).fold(0.0, f64::max)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.q[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }
}

/// Per-state sojourn (interarrival) distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum SojournModel {
    Exponential { rate: f64 },
    UniformInterval { a: f64, b: f64 },
    Deterministic { d: f64 },
    Weibull { shape: f64, scale: f64 },
}

impl SojournModel {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            SojournModel::Exponential { rate } => *rate > 0.0 && rate.is_finite(),
            SojournModel::UniformInterval { a, b } => *a > 0.0 && a < b && b.is_finite(),
            SojournModel::Deterministic { d } => *d > 0.0 && d.is_finite(),
            SojournModel::Weibull { shape, scale } => {
                *shape > 0.0 && *scale > 0.0 && shape.is_finite() && scale.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Validation(format!("invalid sojourn model {self:?}")))
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            SojournModel::Exponential { rate } => 1.0 / rate,
            SojournModel::UniformInterval { a, b } => 0.5 * (a + b),
            SojournModel::Deterministic { d } => *d,
            SojournModel::Weibull { shape, scale } => scale * gamma(1.0 + 1.0 / shape),
        }
    }

    /// The model with every draw multiplied by `factor` (rate divided).
    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            SojournModel::Exponential { rate } => SojournModel::Exponential {
                rate: rate / factor,
            },
            SojournModel::UniformInterval { a, b } => SojournModel::UniformInterval {
                a: a * factor,
                b: b * factor,
            },
            SojournModel::Deterministic { d } => SojournModel::Deterministic { d: d * factor },
            SojournModel::Weibull { shape, scale } => SojournModel::Weibull {
                shape,
                scale: scale * factor,
            },
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            SojournModel::Exponential { rate } => sample_exp(rate, rng),
            SojournModel::UniformInterval { a, b } => rng.random_range(a..b),
            SojournModel::Deterministic { d } => d,
            SojournModel::Weibull { shape, scale } => {
                use rand_distr::Distribution;
                rand_distr::Weibull::new(scale, shape)
                    .expect("validated parameters")
                    .sample(rng)
            }
        }
    }
}

/// Exponential draw by inversion; one uniform per draw.
pub(crate) fn sample_exp<R: Rng>(rate: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln() / rate
}

/// Goodness-of-fit summary against the Poisson hypothesis.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PoissonnessReport {
    /// Sup distance between the empirical interarrival CDF and the
    /// exponential CDF at the fitted rate.
    pub ks_statistic: f64,
    /// Fitted rate: events per unit time.
    pub lambda_hat: f64,
    /// Variance-to-mean ratio of counts in equal-width bins (1 for Poisson).
    pub dispersion_index: f64,
    pub n_events: usize,
    pub n_bins: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn event_stream_validation() {
        let ok = EventStream::new(
            vec![
                Event {
                    time: 0.5,
                    source: 0,
                },
                Event {
                    time: 1.0,
                    source: 1,
                },
            ],
            2.0,
        );
        assert!(ok.is_ok());
        let bad = EventStream::new(
            vec![
                Event {
                    time: 1.0,
                    source: 0,
                },
                Event {
                    time: 1.0,
                    source: 1,
                },
            ],
            2.0,
        );
        assert!(bad.is_err());
        assert!(EventStream::new(vec![], 0.0).is_err());
    }

    #[test]
    fn trajectory_validation_and_lookup() {
        let t = Trajectory::new(
            vec![
                Segment {
                    enter_time: 0.0,
                    state: 0,
                },
                Segment {
                    enter_time: 1.5,
                    state: 1,
                },
            ],
            3.0,
            false,
        )
        .unwrap();
        assert_eq!(t.state_at(0.0), 0);
        assert_eq!(t.state_at(1.49), 0);
        assert_eq!(t.state_at(1.5), 1);
        assert_eq!(t.state_at(3.0), 1);
        assert_eq!(t.jumps(), 1);

        assert!(Trajectory::new(
            vec![
                Segment {
                    enter_time: 0.0,
                    state: 0
                },
                Segment {
                    enter_time: 1.0,
                    state: 0
                },
            ],
            2.0,
            false
        )
        .is_err());
    }

    #[test]
    fn generator_validation() {
        assert!(GeneratorMatrix::from_rows(&[vec![-1.0, 1.0], vec![1.0, -1.0]]).is_ok());
        assert!(GeneratorMatrix::from_rows(&[vec![-1.0, 1.0], vec![1.0, -2.0]]).is_err());
        assert!(GeneratorMatrix::from_rows(&[vec![1.0, -1.0], vec![1.0, -1.0]]).is_err());
        assert!(GeneratorMatrix::from_rows(&[vec![-1.0, 1.0]]).is_err());
        // Absorbing rows are fine.
        let g = GeneratorMatrix::from_rows(&[vec![-2.0, 2.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(g.exit_rate(1), 0.0);
        assert_eq!(g.max_exit_rate(), 2.0);
    }

    #[test]
    fn sojourn_model_validation_and_means() {
        assert!(SojournModel::Exponential { rate: 0.0 }.validate().is_err());
        assert!(SojournModel::UniformInterval { a: 1.0, b: 1.0 }
            .validate()
            .is_err());
        assert!(SojournModel::Deterministic { d: -1.0 }.validate().is_err());
        assert!(SojournModel::Weibull {
            shape: 1.5,
            scale: 2.0
        }
        .validate()
        .is_ok());

        assert_eq!(SojournModel::Exponential { rate: 4.0 }.mean(), 0.25);
        assert_eq!(SojournModel::UniformInterval { a: 0.5, b: 1.5 }.mean(), 1.0);
        // Weibull with shape 1 degenerates to Exponential(1/scale).
        let w = SojournModel::Weibull {
            shape: 1.0,
            scale: 2.0,
        };
        assert!((w.mean() - 2.0).abs() < 1e-12);

        // Scaling multiplies the mean by the factor.
        for m in [
            SojournModel::Exponential { rate: 2.0 },
            SojournModel::UniformInterval { a: 0.5, b: 1.5 },
            SojournModel::Deterministic { d: 0.7 },
            SojournModel::Weibull {
                shape: 1.5,
                scale: 2.0,
            },
        ] {
            let scaled = m.scaled(3.0);
            assert!((scaled.mean() - 3.0 * m.mean()).abs() < 1e-12);
        }
    }

    #[test]
    fn exponential_sampler_mean() {
        let mut r = crate::rng::master(17);
        let n = 200_000;
        let mean: f64 = (0..n).map(|_| sample_exp(2.0, &mut r)).sum::<f64>() / n as f64;
        // 3σ band around 1/λ.
        assert!((mean - 0.5).abs() < 3.0 * 0.5 / (n as f64).sqrt());
    }
}
