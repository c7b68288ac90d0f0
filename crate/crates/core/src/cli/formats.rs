//! File formats and argument grammars used by the command-line front end.
//!
//! Matrices travel as JSON `{"n": N, "data": [[row-major reals]]}`, lag
//! sequences as `{"rho": [...], "m": M}` (m optional), event streams as CSV
//! `time,source`, trajectories as CSV `time,state`. Timestamps are printed
//! with 17 significant digits so f64 values round-trip exactly.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::membership::{AcfDoc, AcfSequence};
use crate::pointproc::{Event, EventStream, GeneratorMatrix, Segment, SojournModel, Trajectory};
use crate::quadform::{MatrixDoc, SquareMatrix};

pub fn read_square_matrix(path: &Path) -> Result<SquareMatrix> {
    let text = fs::read_to_string(path)?;
    let doc: MatrixDoc = serde_json::from_str(&text)?;
    if doc.data.len() != doc.n {
        return Err(Error::Validation(format!(
            "matrix document declares n={} but has {} rows",
            doc.n,
            doc.data.len()
        )));
    }
    SquareMatrix::from_rows(&doc.data)
}

pub fn read_generator(path: &Path) -> Result<GeneratorMatrix> {
    let text = fs::read_to_string(path)?;
    let doc: MatrixDoc = serde_json::from_str(&text)?;
    GeneratorMatrix::from_rows(&doc.data)
}

pub fn read_acf(path: &Path) -> Result<AcfSequence> {
    let text = fs::read_to_string(path)?;
    let doc: AcfDoc = serde_json::from_str(&text)?;
    doc.into_sequence()
}

/// Parses "1,-0.6,0" into lag values.
pub fn parse_rho_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|e| Error::Validation(format!("bad lag value {tok:?}: {e}")))
        })
        .collect()
}

/// Parses "1,-1,1" into a sign/lattice component list.
pub fn parse_int_list(s: &str) -> Result<Vec<i32>> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<i32>()
                .map_err(|e| Error::Validation(format!("bad component {tok:?}: {e}")))
        })
        .collect()
}

/// Sojourn model grammar: `exp:RATE`, `uniform:A,B`, `det:D`,
/// `weibull:SHAPE,SCALE`.
pub fn parse_sojourn_model(s: &str) -> Result<SojournModel> {
    let (name, args) = s
        .split_once(':')
        .ok_or_else(|| Error::Validation(format!("model {s:?} must look like kind:params")))?;
    let nums: Vec<f64> = parse_rho_list(args)?;
    let model = match (name, nums.as_slice()) {
        ("exp", [rate]) => SojournModel::Exponential { rate: *rate },
        ("uniform", [a, b]) => SojournModel::UniformInterval { a: *a, b: *b },
        ("det", [d]) => SojournModel::Deterministic { d: *d },
        ("weibull", [shape, scale]) => SojournModel::Weibull {
            shape: *shape,
            scale: *scale,
        },
        _ => {
            return Err(Error::Validation(format!(
                "unknown model {s:?}; expected exp:RATE, uniform:A,B, det:D, or weibull:SHAPE,SCALE"
            )))
        }
    };
    model.validate()?;
    Ok(model)
}

pub fn event_stream_to_csv(stream: &EventStream) -> String {
    let mut out = String::from("time,source\n");
    for e in &stream.events {
        out.push_str(&format!("{:.16e},{}\n", e.time, e.source));
    }
    out
}

/// Reads `time,source` CSV. The horizon is not part of the format; callers
/// pass one, or the last event time is used.
pub fn event_stream_from_csv(text: &str, horizon: Option<f64>) -> Result<EventStream> {
    let mut events = Vec::new();
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "time,source" => {}
        other => {
            return Err(Error::Validation(format!(
                "expected header 'time,source', got {other:?}"
            )))
        }
    }
    for (k, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (t, s) = line
            .split_once(',')
            .ok_or_else(|| Error::Validation(format!("line {}: expected time,source", k + 2)))?;
        let time: f64 = t
            .trim()
            .parse()
            .map_err(|e| Error::Validation(format!("line {}: bad time {t:?}: {e}", k + 2)))?;
        let source: u32 = s
            .trim()
            .parse()
            .map_err(|e| Error::Validation(format!("line {}: bad source {s:?}: {e}", k + 2)))?;
        events.push(Event { time, source });
    }
    let horizon = horizon
        .or_else(|| events.last().map(|e| e.time))
        .unwrap_or(1.0);
    EventStream::new(events, horizon)
}

pub fn trajectory_to_csv(t: &Trajectory) -> String {
    let mut out = String::from("time,state\n");
    for s in &t.segments {
        out.push_str(&format!("{:.16e},{}\n", s.enter_time, s.state));
    }
    out
}

pub fn trajectory_from_csv(text: &str, horizon: Option<f64>) -> Result<Trajectory> {
    let mut segments = Vec::new();
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "time,state" => {}
        other => {
            return Err(Error::Validation(format!(
                "expected header 'time,state', got {other:?}"
            )))
        }
    }
    for (k, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (t, s) = line
            .split_once(',')
            .ok_or_else(|| Error::Validation(format!("line {}: expected time,state", k + 2)))?;
        let enter_time: f64 = t
            .trim()
            .parse()
            .map_err(|e| Error::Validation(format!("line {}: bad time {t:?}: {e}", k + 2)))?;
        let state: usize = s
            .trim()
            .parse()
            .map_err(|e| Error::Validation(format!("line {}: bad state {s:?}: {e}", k + 2)))?;
        segments.push(Segment { enter_time, state });
    }
    let horizon = horizon
        .or_else(|| segments.last().map(|s| s.enter_time))
        .unwrap_or(1.0);
    Trajectory::new(segments, horizon, false)
}

/// Reads one real value per line (or comma/whitespace separated).
pub fn read_series(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for tok in text.split(|c: char| c.is_whitespace() || c == ',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        out.push(
            tok.parse::<f64>()
                .map_err(|e| Error::Validation(format!("bad series value {tok:?}: {e}")))?,
        );
    }
    Ok(out)
}
