//! Self-contained exact phase-1 simplex over rational arithmetic.
//!
//! Decides feasibility of `A·λ = b, λ ≥ 0` where the columns of `A` are
//! integer-valued and `b` is rational. Either outcome is certified exactly:
//! a feasible basic solution (the nonzero weights of a basis), or a Farkas
//! dual `y` with `yᵀA_j ≤ 0` for every supplied column and `yᵀb > 0`.
//!
//! Pivoting uses Dantzig entering with the lexicographic leaving rule, which
//! rules out cycling, and all arithmetic is `BigRational`, so the verdict is
//! a theorem about the given data rather than a floating-point estimate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const MAX_PIVOTS: usize = 200_000;

pub(crate) fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_f64(x)
        .ok_or_else(|| Error::Validation(format!("cannot represent {x} as a rational")))
}

pub(crate) fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fall back to a lower-precision division for extreme magnitudes.
        let num = x.numer().to_f64().unwrap_or(f64::MAX);
        let den = x.denom().to_f64().unwrap_or(f64::MAX);
        num / den
    })
}

#[derive(Debug)]
pub(crate) enum Phase1Outcome {
    /// Feasible; carries the basic weights `(column index, λ > 0)`.
    Feasible { weights: Vec<(usize, BigRational)> },
    /// Infeasible; `dual` satisfies `dualᵀA_j ≤ 0` for all supplied columns
    /// and `dualᵀb = objective > 0`.
    Infeasible {
        dual: Vec<BigRational>,
        #[allow(dead_code)]
        objective: BigRational,
    },
}

/// Exact dot product of a rational row with an integer column.
pub(crate) fn price_column(y: &[BigRational], col: &[i64]) -> BigRational {
    debug_assert_eq!(y.len(), col.len());
    let mut acc = BigRational::zero();
    for (yi, a) in y.iter().zip(col) {
        match a {
            0 => {}
            1 => acc += yi,
            -1 => acc -= yi,
            a => acc += yi * BigRational::from_integer(BigInt::from(*a)),
        }
    }
    acc
}

struct Tableau {
    m: usize,
    /// Row-major basis inverse.
    binv: Vec<BigRational>,
    /// Current basic values, all ≥ 0.
    xb: Vec<BigRational>,
    /// `Some(j)` = structural column j; `None` = the row's artificial.
    basis: Vec<Option<usize>>,
    in_basis: Vec<bool>,
}

impl Tableau {
    fn new(b: &[BigRational], n_cols: usize) -> Self {
        let m = b.len();
        let mut binv = vec![BigRational::zero(); m * m];
        let mut xb = Vec::with_capacity(m);
        for (i, bi) in b.iter().enumerate() {
            let sign = if bi.is_negative() {
                -BigRational::from_integer(BigInt::from(1))
            } else {
                BigRational::from_integer(BigInt::from(1))
            };
            binv[i * m + i] = sign;
            xb.push(bi.abs());
        }
        Tableau {
            m,
            binv,
            xb,
            basis: vec![None; m],
            in_basis: vec![false; n_cols],
        }
    }

    /// Duals of the phase-1 objective (cost 1 on artificials, 0 elsewhere).
    fn duals(&self) -> Vec<BigRational> {
        let mut y = vec![BigRational::zero(); self.m];
        for (i, var) in self.basis.iter().enumerate() {
            if var.is_none() {
                for (yj, bij) in y.iter_mut().zip(&self.binv[i * self.m..(i + 1) * self.m]) {
                    *yj += bij;
                }
            }
        }
        y
    }

    fn objective(&self) -> BigRational {
        let mut obj = BigRational::zero();
        for (i, var) in self.basis.iter().enumerate() {
            if var.is_none() {
                obj += &self.xb[i];
            }
        }
        obj
    }

    fn direction(&self, col: &[i64]) -> Vec<BigRational> {
        (0..self.m)
            .map(|i| price_column(&self.binv[i * self.m..(i + 1) * self.m], col))
            .collect()
    }

    /// Lexicographic ratio test over rows with positive direction entries.
    fn leaving_row(&self, d: &[BigRational]) -> Option<usize> {
        let mut best: Option<usize> = None;
        for i in 0..self.m {
            if !d[i].is_positive() {
                continue;
            }
            match best {
                None => best = Some(i),
                Some(r) => {
                    if self.lex_less(i, r, d) {
                        best = Some(i);
                    }
                }
            }
        }
        best
    }

    /// Compares rows a and b by the ratio vectors
    /// (xb, binv-row)/d lexicographically.
    fn lex_less(&self, a: usize, b: usize, d: &[BigRational]) -> bool {
        let va = &self.xb[a] * &d[b];
        let vb = &self.xb[b] * &d[a];
        if va != vb {
            return va < vb;
        }
        for k in 0..self.m {
            let va = &self.binv[a * self.m + k] * &d[b];
            let vb = &self.binv[b * self.m + k] * &d[a];
            if va != vb {
                return va < vb;
            }
        }
        false
    }

    fn pivot(&mut self, row: usize, entering: usize, d: &[BigRational]) {
        let m = self.m;
        let pivot = d[row].clone();
        for k in 0..m {
            self.binv[row * m + k] /= &pivot;
        }
        self.xb[row] /= &pivot;
        for i in 0..m {
            if i == row || d[i].is_zero() {
                continue;
            }
            let factor = d[i].clone();
            for k in 0..m {
                let sub = &factor * &self.binv[row * m + k];
                self.binv[i * m + k] -= sub;
            }
            let sub = &factor * &self.xb[row];
            self.xb[i] -= sub;
        }
        if let Some(old) = self.basis[row] {
            self.in_basis[old] = false;
        }
        self.basis[row] = Some(entering);
        self.in_basis[entering] = true;
    }
}

/// Runs phase-1 on the given integer columns and rational right-hand side.
pub(crate) fn phase1_feasibility(columns: &[Vec<i64>], b: &[BigRational]) -> Result<Phase1Outcome> {
    let m = b.len();
    if m == 0 {
        return Err(Error::Validation("feasibility system has no rows".into()));
    }
    for (j, col) in columns.iter().enumerate() {
        if col.len() != m {
            return Err(Error::Dimension(format!(
                "column {j} has {} rows, expected {m}",
                col.len()
            )));
        }
    }

    let mut tab = Tableau::new(b, columns.len());
    for _ in 0..MAX_PIVOTS {
        let y = tab.duals();
        // Dantzig: most positive priced column enters (reduced cost −yᵀA_j).
        let mut entering: Option<(usize, BigRational)> = None;
        for (j, col) in columns.iter().enumerate() {
            if tab.in_basis[j] {
                continue;
            }
            let priced = price_column(&y, col);
            if priced.is_positive() {
                match &entering {
                    Some((_, best)) if *best >= priced => {}
                    _ => entering = Some((j, priced)),
                }
            }
        }
        let Some((j, _)) = entering else {
            let objective = tab.objective();
            if objective.is_zero() {
                let mut weights = Vec::new();
                for (i, var) in tab.basis.iter().enumerate() {
                    if let Some(col) = var {
                        if tab.xb[i].is_positive() {
                            weights.push((*col, tab.xb[i].clone()));
                        }
                    }
                }
                return Ok(Phase1Outcome::Feasible { weights });
            }
            return Ok(Phase1Outcome::Infeasible { dual: y, objective });
        };
        let d = tab.direction(&columns[j]);
        let Some(row) = tab.leaving_row(&d) else {
            return Err(Error::Internal(
                "phase-1 objective unbounded below zero".into(),
            ));
        };
        tab.pivot(row, j, &d);
    }
    Err(Error::Internal(format!(
        "phase-1 did not terminate within {MAX_PIVOTS} pivots"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn rat(x: f64) -> BigRational {
        rational_from_f64(x).unwrap()
    }

    #[test]
    fn feasible_simple_average() {
        // Average of (1,1) and (1,−1) outer products reaches rho = (1, 0):
        // rows are [Σλ, pair product].
        let columns = vec![vec![1, 1], vec![1, -1]];
        let b = vec![rat(1.0), rat(0.0)];
        match phase1_feasibility(&columns, &b).unwrap() {
            Phase1Outcome::Feasible { weights } => {
                let total: BigRational = weights.iter().map(|(_, w)| w.clone()).sum();
                assert!(total.is_one());
                assert_eq!(weights.len(), 2);
                for (_, w) in &weights {
                    assert_eq!(w, &rat(0.5));
                }
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_produces_farkas_dual() {
        // Σλ = 1 with a coordinate forced beyond ±1 is impossible.
        let columns = vec![vec![1, 1], vec![1, -1]];
        let b = vec![rat(1.0), rat(1.5)];
        match phase1_feasibility(&columns, &b).unwrap() {
            Phase1Outcome::Infeasible { dual, objective } => {
                assert!(objective.is_positive());
                for col in &columns {
                    assert!(!price_column(&dual, col).is_positive());
                }
                let ytb = &dual[0] * rat(1.0) + &dual[1] * rat(1.5);
                assert_eq!(ytb, objective);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_zero_rhs_is_feasible() {
        let columns = vec![vec![1, 1], vec![1, -1]];
        let b = vec![rat(0.0), rat(0.0)];
        match phase1_feasibility(&columns, &b).unwrap() {
            Phase1Outcome::Feasible { weights } => assert!(weights.is_empty()),
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn random_systems_agree_with_verdict_checks() {
        use rand::Rng;
        let mut r = crate::rng::master(271);
        for _ in 0..40 {
            let m = 2 + (r.random::<u32>() % 4) as usize;
            let k = 1 + (r.random::<u32>() % 8) as usize;
            let columns: Vec<Vec<i64>> = (0..k)
                .map(|_| (0..m).map(|_| r.random_range(-2..3)).collect())
                .collect();
            let b: Vec<BigRational> = (0..m).map(|_| rat(r.random_range(-2.0..2.0))).collect();
            match phase1_feasibility(&columns, &b).unwrap() {
                Phase1Outcome::Feasible { weights } => {
                    // Recombine exactly and compare with b.
                    let mut lhs = vec![BigRational::zero(); m];
                    for (j, w) in &weights {
                        assert!(w.is_positive());
                        for (i, a) in columns[*j].iter().enumerate() {
                            lhs[i] += w * BigRational::from_integer(BigInt::from(*a));
                        }
                    }
                    assert_eq!(lhs, b);
                }
                Phase1Outcome::Infeasible { dual, objective } => {
                    assert!(objective.is_positive());
                    for col in &columns {
                        assert!(!price_column(&dual, col).is_positive());
                    }
                    let ytb: BigRational =
                        dual.iter().zip(&b).map(|(yi, bi)| yi * bi).sum();
                    assert!(ytb.is_positive());
                }
            }
        }
    }
}
