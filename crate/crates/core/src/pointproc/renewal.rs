//! Renewal streams, superposition, and Poissonness diagnostics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pointproc::stats::{ks_statistic_exponential, median};
use crate::pointproc::{Event, EventStream, PoissonnessReport, SojournModel, TIE_JITTER};
use crate::rng;

/// Simulates a renewal stream: events at the partial sums of i.i.d. draws
/// from `model`, up to and including `horizon`.
pub fn sample_renewal(model: &SojournModel, horizon: f64, seed: u64) -> Result<EventStream> {
    model.validate()?;
    if horizon.is_nan() || horizon <= 0.0 {
        return Err(Error::Validation(format!("horizon {horizon} must be > 0")));
    }
    let mut rng = rng::master(seed);
    sample_renewal_from(model, horizon, 0, &mut rng)
}

/// As [`sample_renewal`] but drawing from a caller-owned stream and labeling
/// events with `source`.
pub fn sample_renewal_from<R: rand::Rng>(
    model: &SojournModel,
    horizon: f64,
    source: u32,
    rng: &mut R,
) -> Result<EventStream> {
    let mut events = Vec::new();
    let mut t = 0.0;
    loop {
        let gap = model.sample(rng);
        if gap.is_nan() || gap <= 0.0 {
            return Err(Error::Validation(format!(
                "sojourn model produced non-positive gap {gap}"
            )));
        }
        t += gap;
        if t > horizon {
            break;
        }
        events.push(Event { time: t, source });
    }
    EventStream::new(events, horizon)
}

/// Merges streams into one time-sorted stream, keeping source labels.
/// Exactly tied timestamps (possible with deterministic models) are pushed
/// apart by [`TIE_JITTER`] with a warning; the merged count is always the sum
/// of the input counts.
pub fn superpose(streams: &[EventStream]) -> Result<EventStream> {
    if streams.is_empty() {
        return Err(Error::Validation("superpose needs at least one stream".into()));
    }
    let horizon = streams[0].horizon;
    for (k, s) in streams.iter().enumerate() {
        if s.horizon != horizon {
            return Err(Error::Validation(format!(
                "horizon mismatch: stream 0 has {horizon}, stream {k} has {}",
                s.horizon
            )));
        }
    }
    let mut merged: Vec<Event> = Vec::with_capacity(streams.iter().map(|s| s.len()).sum());
    for s in streams {
        merged.extend_from_slice(&s.events);
    }
    merged.sort_by(|a, b| {
        a.time
            .partial_cmp(&b.time)
            .expect("finite times")
            .then(a.source.cmp(&b.source))
    });
    let mut jittered = 0usize;
    let mut prev = -f64::INFINITY;
    for e in &mut merged {
        if e.time <= prev {
            e.time = prev + TIE_JITTER;
            jittered += 1;
        }
        prev = e.time;
    }
    if jittered > 0 {
        log::warn!("superpose: {jittered} tied timestamps jittered by {TIE_JITTER:e}");
    }
    // Jitter at the horizon edge may push the last events past it.
    let horizon = if prev > horizon { prev } else { horizon };
    EventStream::new(merged, horizon)
}

/// Poissonness summary of a stream: fitted rate, KS distance of the
/// interarrivals against Exponential(rate), and the index of dispersion of
/// per-bin counts.
pub fn poisson_stats(stream: &EventStream, n_bins: usize) -> Result<PoissonnessReport> {
    let n_events = stream.len();
    if n_events < 10 {
        return Err(Error::Validation(format!(
            "poisson statistics need ≥ 10 events, got {n_events}"
        )));
    }
    if n_bins < 10 {
        return Err(Error::Validation(format!(
            "poisson statistics need ≥ 10 bins, got {n_bins}"
        )));
    }
    let lambda_hat = n_events as f64 / stream.horizon;
    let ks_statistic = ks_statistic_exponential(&stream.interarrivals(), lambda_hat);

    let width = stream.horizon / n_bins as f64;
    let mut counts = vec![0u64; n_bins];
    for e in &stream.events {
        let bin = ((e.time / width) as usize).min(n_bins - 1);
        counts[bin] += 1;
    }
    let mean = n_events as f64 / n_bins as f64;
    let var = counts
        .iter()
        .map(|c| (*c as f64 - mean).powi(2))
        .sum::<f64>()
        / (n_bins as f64 - 1.0);
    Ok(PoissonnessReport {
        ks_statistic,
        lambda_hat,
        dispersion_index: var / mean,
        n_events,
        n_bins,
    })
}

/// Per-source-count summary of the sparse superposition experiment.
#[derive(Clone, Debug, Serialize)]
pub struct SparseSummary {
    pub n_sources: usize,
    pub median_ks: f64,
    pub median_dispersion: f64,
    pub reports: Vec<PoissonnessReport>,
}

/// Sparse-superposition experiment: for each n in `ns`, superpose n i.i.d.
/// copies of `base` slowed by a factor chosen so the merged rate stays at
/// `total_rate`, and summarize Poissonness over the seeds. As n grows the
/// per-source streams thin out uniformly and the superposition approaches a
/// Poisson stream of rate `total_rate`.
pub fn sparse_superposition_experiment(
    ns: &[usize],
    base: &SojournModel,
    total_rate: f64,
    horizon: f64,
    seeds: &[u64],
    n_bins: usize,
) -> Result<Vec<SparseSummary>> {
    base.validate()?;
    if total_rate.is_nan() || total_rate <= 0.0 {
        return Err(Error::Validation(format!(
            "total rate {total_rate} must be > 0"
        )));
    }
    if ns.is_empty() || seeds.is_empty() {
        return Err(Error::Validation(
            "need at least one source count and one seed".into(),
        ));
    }
    let base_mean = base.mean();
    let mut out = Vec::with_capacity(ns.len());
    for &n in ns {
        if n == 0 {
            return Err(Error::Validation("source count must be ≥ 1".into()));
        }
        let factor = n as f64 / (base_mean * total_rate);
        let model = base.scaled(factor);
        let mut reports = Vec::with_capacity(seeds.len());
        for &seed in seeds {
            let run_seed = rng::derive(seed, &[n as u64]);
            let streams: Result<Vec<EventStream>> = (0..n)
                .map(|i| {
                    let mut r = rng::substream(run_seed, i as u64);
                    sample_renewal_from(&model, horizon, i as u32, &mut r)
                })
                .collect();
            let merged = superpose(&streams?)?;
            reports.push(poisson_stats(&merged, n_bins)?);
        }
        let ks: Vec<f64> = reports.iter().map(|r| r.ks_statistic).collect();
        let disp: Vec<f64> = reports.iter().map(|r| r.dispersion_index).collect();
        out.push(SparseSummary {
            n_sources: n,
            median_ks: median(&ks),
            median_dispersion: median(&disp),
            reports,
        });
    }
    Ok(out)
}
