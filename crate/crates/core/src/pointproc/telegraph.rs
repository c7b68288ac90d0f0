//! Sign-flip chain simulation and autocorrelation estimation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::membership::AcfSequence;
use crate::rng;

/// Denominator convention for the lag-k sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DenominatorMode {
    /// Divide the lag-k sum by T−k (default; exact rho[0] = 1 for ±1 data).
    PerLag,
    /// Divide every lag sum by T. Estimates then form a PSD sequence but are
    /// biased low at large lags.
    Fixed,
}

/// Estimated autocorrelation: normalized values plus the raw lag sums.
#[derive(Clone, Debug, Serialize)]
pub struct AcfEstimate {
    pub rho: Vec<f64>,
    /// Unnormalized lag sums Σ x_m·x_{m+k}.
    pub sums: Vec<f64>,
    /// Number of products entering each lag sum.
    pub counts: Vec<usize>,
    pub denominator: DenominatorMode,
}

impl AcfEstimate {
    /// Normalizes to lag-0 = 1 and clamps the remaining lags into [−1, 1],
    /// yielding a valid ±1-class sequence for membership testing. Real-valued
    /// inputs can overshoot the bound slightly under the per-lag convention;
    /// the clamp logs when it fires beyond noise level.
    pub fn to_unit_acf(&self) -> Result<AcfSequence> {
        let rho0 = self.rho[0];
        if rho0.is_nan() || rho0 <= 0.0 {
            return Err(Error::Validation(format!(
                "cannot normalize: lag-0 estimate {rho0} is not positive"
            )));
        }
        let mut rho: Vec<f64> = self.rho.iter().map(|v| v / rho0).collect();
        rho[0] = 1.0;
        for (k, v) in rho.iter_mut().enumerate().skip(1) {
            if v.abs() > 1.0 {
                if v.abs() > 1.0 + 1e-9 {
                    log::warn!("clamping lag-{k} estimate {v} into [-1, 1]");
                }
                *v = v.signum();
            }
        }
        AcfSequence::unit(rho)
    }
}

/// Lagged autocorrelation estimate of a real sequence.
pub fn acf_estimate(x: &[f64], max_lag: usize, denominator: DenominatorMode) -> Result<AcfEstimate> {
    let t = x.len();
    if t <= max_lag {
        return Err(Error::Validation(format!(
            "sequence of length {t} too short for max lag {max_lag}"
        )));
    }
    let mut rho = Vec::with_capacity(max_lag + 1);
    let mut sums = Vec::with_capacity(max_lag + 1);
    let mut counts = Vec::with_capacity(max_lag + 1);
    for k in 0..=max_lag {
        let mut sum = 0.0;
        for m in 0..(t - k) {
            sum += x[m] * x[m + k];
        }
        let denom = match denominator {
            DenominatorMode::PerLag => (t - k) as f64,
            DenominatorMode::Fixed => t as f64,
        };
        rho.push(sum / denom);
        sums.push(sum);
        counts.push(t - k);
    }
    Ok(AcfEstimate {
        rho,
        sums,
        counts,
        denominator,
    })
}

/// Simulates the ±1 flip chain: the sign flips with probability `p_flip` at
/// each step; the initial sign is uniform. Its lag-k autocorrelation is
/// (1−2p)^k.
pub fn telegraph_simulate(p_flip: f64, length: usize, seed: u64) -> Result<Vec<i32>> {
    if p_flip.is_nan() || p_flip <= 0.0 || p_flip >= 1.0 {
        return Err(Error::Validation(format!(
            "flip probability {p_flip} must be in (0, 1)"
        )));
    }
    if length == 0 {
        return Err(Error::Validation("sequence length must be ≥ 1".into()));
    }
    let mut rng = rng::master(seed);
    let mut out = Vec::with_capacity(length);
    let mut x: i32 = if rng.random::<bool>() { 1 } else { -1 };
    out.push(x);
    for _ in 1..length {
        if rng.random::<f64>() < p_flip {
            x = -x;
        }
        out.push(x);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn to_f64(xs: &[i32]) -> Vec<f64> {
        xs.iter().map(|v| f64::from(*v)).collect()
    }

    #[test]
    fn constant_sequence_acf_is_one() {
        let est = acf_estimate(&[1.0; 50], 5, DenominatorMode::PerLag).unwrap();
        assert_eq!(est.rho, vec![1.0; 6]);
    }

    #[test]
    fn alternating_sequence_acf() {
        let xs: Vec<f64> = (0..40).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let est = acf_estimate(&xs, 4, DenominatorMode::PerLag).unwrap();
        for (k, v) in est.rho.iter().enumerate() {
            let want = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(*v, want);
        }
    }

    #[test]
    fn per_lag_denominator_gives_exact_unit_lag0() {
        let xs = telegraph_simulate(0.3, 5_000, 2).unwrap();
        let est = acf_estimate(&to_f64(&xs), 6, DenominatorMode::PerLag).unwrap();
        assert_eq!(est.rho[0], 1.0);
        assert_eq!(est.counts[3], 5_000 - 3);
        // Fixed-denominator variant shrinks the higher lags.
        let fixed = acf_estimate(&to_f64(&xs), 6, DenominatorMode::Fixed).unwrap();
        for k in 1..=6 {
            assert!(fixed.rho[k].abs() <= est.rho[k].abs() + 1e-12);
        }
    }

    #[test]
    fn telegraph_acf_matches_geometric_decay() {
        let p = 0.25;
        let xs = telegraph_simulate(p, 200_000, 7).unwrap();
        let est = acf_estimate(&to_f64(&xs), 6, DenominatorMode::PerLag).unwrap();
        for k in 0..=6usize {
            let want = (1.0 - 2.0 * p).powi(k as i32);
            assert!(
                (est.rho[k] - want).abs() < 0.02,
                "lag {k}: {} vs {want}",
                est.rho[k]
            );
        }
    }

    #[test]
    fn fair_flip_gives_iid_signs() {
        let xs = telegraph_simulate(0.5, 100_000, 9).unwrap();
        let est = acf_estimate(&to_f64(&xs), 3, DenominatorMode::PerLag).unwrap();
        let bound = 3.0 / (xs.len() as f64).sqrt();
        for k in 1..=3 {
            assert!(est.rho[k].abs() < bound, "lag {k}: {}", est.rho[k]);
        }
    }

    #[test]
    fn estimate_feeds_membership_test() {
        let xs = telegraph_simulate(0.25, 200_000, 11).unwrap();
        let est = acf_estimate(&to_f64(&xs), 5, DenominatorMode::PerLag).unwrap();
        let acf = est.to_unit_acf().unwrap();
        let verdict = crate::membership::mcmillan_test(&acf).unwrap();
        assert!(verdict.is_member());
    }

    #[test]
    fn validation_errors() {
        assert!(telegraph_simulate(0.0, 10, 1).is_err());
        assert!(telegraph_simulate(1.0, 10, 1).is_err());
        assert!(acf_estimate(&[1.0, -1.0], 2, DenominatorMode::PerLag).is_err());
    }

    #[test]
    fn determinism() {
        assert_eq!(
            telegraph_simulate(0.3, 1000, 5).unwrap(),
            telegraph_simulate(0.3, 1000, 5).unwrap()
        );
        assert_ne!(
            telegraph_simulate(0.3, 1000, 5).unwrap(),
            telegraph_simulate(0.3, 1000, 6).unwrap()
        );
    }
}
