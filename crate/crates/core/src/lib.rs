//! corrkit: quadratic forms on discrete sets, autocorrelation-class
//! membership, and point-process superposition tools.
//!
//! The crate has three pillars:
//!
//! * [`quadform`], [`search`], [`definiteness`] — symmetric-matrix
//!   primitives, serial sign dynamics and exhaustive oracles over the
//!   hypercube {±1}^n and the bounded lattice {±1,…,±M}^n, and
//!   corner/lattice positivity verdicts with self-verifying certificates.
//! * [`membership`] — decides whether a sequence of autocorrelation lags is
//!   realizable by a ±1-valued (or lattice-valued) stationary process up to
//!   a given order, producing either a convex decomposition into sign outer
//!   products or a verified separating witness.
//! * [`pointproc`] — renewal streams, superposition, semi-Markov and Markov
//!   jump processes, uniformization, Poissonness statistics, and
//!   autocorrelation estimation tying simulations back to [`membership`].
//!
//! All randomness flows through [`rng`]: ChaCha8 streams keyed by a master
//! seed with per-source substreams, so every result in the crate is
//! reproducible bit-for-bit, including under parallel execution.

pub mod cli;
pub mod definiteness;
pub mod error;
pub mod membership;
pub mod pointproc;
pub mod quadform;
pub mod rng;
pub mod search;

pub use error::{Error, Result};
