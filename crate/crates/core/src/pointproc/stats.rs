//! Goodness-of-fit statistics used by the simulation diagnostics: one-sample
//! Kolmogorov–Smirnov against a fitted exponential, the two-sample KS test,
//! and a two-sample chi-square homogeneity test for transition counts.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Sup distance between the empirical CDF of `sample` and Exponential(rate).
pub fn ks_statistic_exponential(sample: &[f64], rate: f64) -> f64 {
    if sample.is_empty() {
        return 1.0;
    }
    let mut xs = sample.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, x) in xs.iter().enumerate() {
        let f = 1.0 - (-rate * x).exp();
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// Asymptotic Kolmogorov survival function Q(λ) = 2 Σ (−1)^{k−1} e^{−2k²λ²}.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64).powi(2) * lambda * lambda).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample KS statistic and its asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    assert!(!a.is_empty() && !b.is_empty(), "need non-empty samples");
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(|x, y| x.partial_cmp(y).expect("finite samples"));
    xb.sort_by(|x, y| x.partial_cmp(y).expect("finite samples"));
    let (na, nb) = (xa.len(), xb.len());
    let (mut ia, mut ib) = (0usize, 0usize);
    let mut d = 0.0f64;
    while ia < na && ib < nb {
        let va = xa[ia];
        let vb = xb[ib];
        if va <= vb {
            ia += 1;
        }
        if vb <= va {
            ib += 1;
        }
        let fa = ia as f64 / na as f64;
        let fb = ib as f64 / nb as f64;
        d = d.max((fa - fb).abs());
    }
    let ne = (na as f64 * nb as f64) / (na as f64 + nb as f64);
    let sqrt_ne = ne.sqrt();
    let lambda = (sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d;
    (d, kolmogorov_survival(lambda))
}

/// Upper-tail p-value of a chi-square statistic.
pub fn chi_square_pvalue(stat: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df as f64).expect("df > 0");
    (1.0 - dist.cdf(stat)).clamp(0.0, 1.0)
}

/// Two-sample chi-square homogeneity statistic over paired count vectors.
/// Cells empty in both samples are skipped; returns (statistic, df).
pub fn chi_square_homogeneity(obs_a: &[u64], obs_b: &[u64]) -> (f64, usize) {
    assert_eq!(obs_a.len(), obs_b.len());
    let total_a: u64 = obs_a.iter().sum();
    let total_b: u64 = obs_b.iter().sum();
    let grand = (total_a + total_b) as f64;
    if grand == 0.0 {
        return (0.0, 0);
    }
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (oa, ob) in obs_a.iter().zip(obs_b) {
        let col = (oa + ob) as f64;
        if col == 0.0 {
            continue;
        }
        cells += 1;
        let ea = col * total_a as f64 / grand;
        let eb = col * total_b as f64 / grand;
        if ea > 0.0 {
            stat += (*oa as f64 - ea).powi(2) / ea;
        }
        if eb > 0.0 {
            stat += (*ob as f64 - eb).powi(2) / eb;
        }
    }
    (stat, cells.saturating_sub(1))
}

/// Median of a sample (average of the middle pair for even sizes).
pub fn median(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty());
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
