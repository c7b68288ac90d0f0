//! Dense symmetric-matrix and sign/lattice-vector primitives.
//!
//! Everything downstream (discrete search, definiteness verdicts, membership
//! tests) is built on the types here. Quadratic forms are evaluated in double
//! precision with a fixed row-major summation order, so results are
//! reproducible bit-for-bit; when the inputs are integer-valued the
//! accumulation is exact as long as magnitudes stay below 2^53.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for accepting nearly-symmetric input as symmetric.
pub const ASYMMETRY_TOL: f64 = 1e-12;

/// Dense symmetric matrix, row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl SymmetricMatrix {
    /// Builds from rows, rejecting asymmetry beyond [`ASYMMETRY_TOL`].
    /// Entries within tolerance are averaged so the stored matrix is
    /// exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let square = SquareMatrix::from_rows(rows)?;
        for i in 0..square.n {
            for j in (i + 1)..square.n {
                let d = (square.get(i, j) - square.get(j, i)).abs();
                if d > ASYMMETRY_TOL {
                    return Err(Error::Validation(format!(
                        "matrix not symmetric at ({i},{j}): |{} - {}| = {d:e}",
                        square.get(i, j),
                        square.get(j, i)
                    )));
                }
            }
        }
        Ok(Self::symmetric_part(&square))
    }

    /// Builds the symmetric part (c + cᵀ)/2 of an arbitrary square matrix.
    pub fn symmetric_part(c: &SquareMatrix) -> Self {
        let n = c.n;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = 0.5 * (c.get(i, j) + c.get(j, i));
            }
        }
        Self { n, entries }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = 1.0;
        }
        m
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m.entries[i * d.len() + i] = *v;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Sets entry (i, j) and its mirror (j, i).
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.n + j] = v;
        self.entries[j * self.n + i] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// True when every entry is an integer representable exactly in f64.
    pub fn is_integral(&self) -> bool {
        self.entries
            .iter()
            .all(|v| v.fract() == 0.0 && v.abs() < 2f64.powi(52))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Returns `self + shift·I`.
    pub fn add_diagonal(&self, shift: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            let v = out.get(i, i) + shift;
            out.entries[i * self.n + i] = v;
        }
        out
    }

    /// Returns `scale · self`.
    pub fn scaled(&self, scale: f64) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|v| v * scale).collect(),
        }
    }
}

impl Serialize for SymmetricMatrix {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixDoc {
            n: self.n,
            data: self.rows(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SymmetricMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let doc = MatrixDoc::deserialize(de)?;
        if doc.data.len() != doc.n {
            return Err(serde::de::Error::custom(format!(
                "matrix document declares n={} but has {} rows",
                doc.n,
                doc.data.len()
            )));
        }
        SymmetricMatrix::from_rows(&doc.data).map_err(serde::de::Error::custom)
    }
}

/// Wire shape for matrices: `{"n": N, "data": [[row-major reals]]}`.
#[derive(Serialize, Deserialize)]
pub struct MatrixDoc {
    pub n: usize,
    pub data: Vec<Vec<f64>>,
}

/// General (possibly asymmetric) square matrix, used as input to
/// [`symmetrize_zero_diag`].
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl SquareMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Validation("matrix must have at least one row".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for v in row {
                if !v.is_finite() {
                    return Err(Error::Validation(format!("non-finite entry {v} in row {i}")));
                }
                entries.push(*v);
            }
        }
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }
}

impl From<SymmetricMatrix> for SquareMatrix {
    fn from(m: SymmetricMatrix) -> Self {
        Self {
            n: m.n,
            entries: m.entries,
        }
    }
}

impl From<&SymmetricMatrix> for SquareMatrix {
    fn from(m: &SymmetricMatrix) -> Self {
        Self {
            n: m.n,
            entries: m.entries.clone(),
        }
    }
}

/// A symmetric matrix split into its zero-diagonal part plus the trace it
/// carried. On the sign hypercube the diagonal of a quadratic form is
/// constant, so `xᵀcx = xᵀex + trace_offset` for every sign vector `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricSplit {
    e: SymmetricMatrix,
    trace_offset: f64,
}

impl SymmetricSplit {
    /// Zero-diagonal part of the quadratic form.
    pub fn e(&self) -> &SymmetricMatrix {
        &self.e
    }

    /// Trace of the original matrix.
    pub fn trace_offset(&self) -> f64 {
        self.trace_offset
    }

    pub fn n(&self) -> usize {
        self.e.n()
    }

    /// Builds a split directly from a zero-diagonal symmetric matrix and an
    /// explicit offset. Rejects matrices with nonzero diagonal entries.
    pub fn from_parts(e: SymmetricMatrix, trace_offset: f64) -> Result<Self> {
        for i in 0..e.n() {
            if e.get(i, i) != 0.0 {
                return Err(Error::Validation(format!(
                    "diagonal entry ({i},{i}) = {} must be exactly zero",
                    e.get(i, i)
                )));
            }
        }
        Ok(Self { e, trace_offset })
    }
}

/// Splits an arbitrary square matrix `c` into the zero-diagonal part of its
/// symmetrization plus `Trace(c)`. The symmetrization is applied silently:
/// `xᵀcx` on the hypercube only ever sees the symmetric part.
pub fn symmetrize_zero_diag(c: &SquareMatrix) -> SymmetricSplit {
    let trace_offset = c.trace();
    let mut e = SymmetricMatrix::symmetric_part(c);
    for i in 0..e.n() {
        e.entries[i * e.n + i] = 0.0;
    }
    SymmetricSplit { e, trace_offset }
}

/// Evaluates `xᵀ a x` with a fixed row-major summation order.
pub fn qf_value(a: &SymmetricMatrix, x: &[f64]) -> Result<f64> {
    if x.len() != a.n() {
        return Err(Error::Dimension(format!(
            "vector length {} does not match matrix order {}",
            x.len(),
            a.n()
        )));
    }
    let mut acc = 0.0;
    for i in 0..a.n() {
        let mut row = 0.0;
        for j in 0..a.n() {
            row += a.get(i, j) * x[j];
        }
        acc += x[i] * row;
    }
    Ok(acc)
}

/// `Trace(r · x)` for symmetric `r` and `x`; linear in the entries of `x`.
pub fn trace_product(r: &SymmetricMatrix, x: &SymmetricMatrix) -> Result<f64> {
    if r.n() != x.n() {
        return Err(Error::Dimension(format!(
            "matrix orders differ: {} vs {}",
            r.n(),
            x.n()
        )));
    }
    let mut acc = 0.0;
    for i in 0..r.n() {
        for j in 0..r.n() {
            acc += r.get(i, j) * x.get(j, i);
        }
    }
    Ok(acc)
}

/// Point of the symmetric binary hypercube {+1, −1}^n.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignVector {
    bits: Vec<i32>,
}

impl SignVector {
    pub fn new(bits: Vec<i32>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Validation("sign vector must be non-empty".into()));
        }
        if let Some(v) = bits.iter().find(|v| **v != 1 && **v != -1) {
            return Err(Error::Validation(format!(
                "sign vector component {v} is not ±1"
            )));
        }
        Ok(Self { bits })
    }

    pub fn ones(n: usize) -> Self {
        Self { bits: vec![1; n] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> i32 {
        self.bits[i]
    }

    pub fn bits(&self) -> &[i32] {
        &self.bits
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] = -self.bits[i];
    }

    pub fn set(&mut self, i: usize, v: i32) {
        debug_assert!(v == 1 || v == -1);
        self.bits[i] = v;
    }

    pub fn negated(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|v| -v).collect(),
        }
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.bits.iter().map(|v| *v as f64).collect()
    }

    /// Canonical representative of the pair {x, −x}: first component +1.
    pub fn canonical(&self) -> Self {
        if self.bits[0] < 0 {
            self.negated()
        } else {
            self.clone()
        }
    }
}

/// Point of the bounded symmetric lattice {±1, …, ±M}^n (zero excluded).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeVector {
    vals: Vec<i32>,
    m_bound: u32,
}

impl LatticeVector {
    pub fn new(vals: Vec<i32>, m_bound: u32) -> Result<Self> {
        if m_bound == 0 {
            return Err(Error::Validation("lattice bound M must be ≥ 1".into()));
        }
        if vals.is_empty() {
            return Err(Error::Validation("lattice vector must be non-empty".into()));
        }
        if let Some(v) = vals
            .iter()
            .find(|v| **v == 0 || v.unsigned_abs() > m_bound)
        {
            return Err(Error::Validation(format!(
                "lattice component {v} outside {{±1, …, ±{m_bound}}}"
            )));
        }
        Ok(Self { vals, m_bound })
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn m_bound(&self) -> u32 {
        self.m_bound
    }

    #[inline]
    pub fn get(&self, i: usize) -> i32 {
        self.vals[i]
    }

    pub fn vals(&self) -> &[i32] {
        &self.vals
    }

    pub fn set(&mut self, i: usize, v: i32) {
        debug_assert!(v != 0 && v.unsigned_abs() <= self.m_bound);
        self.vals[i] = v;
    }

    pub fn negated(&self) -> Self {
        Self {
            vals: self.vals.iter().map(|v| -v).collect(),
            m_bound: self.m_bound,
        }
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.vals.iter().map(|v| *v as f64).collect()
    }

    /// Canonical representative of the pair {x, −x}: first component positive.
    pub fn canonical(&self) -> Self {
        if self.vals[0] < 0 {
            self.negated()
        } else {
            self.clone()
        }
    }
}

/// Symmetric Toeplitz matrix built from a sequence of lagged values.
#[derive(Clone, Debug, PartialEq)]
pub struct ToeplitzMatrix {
    matrix: SymmetricMatrix,
    rho: Vec<f64>,
}

impl ToeplitzMatrix {
    pub fn matrix(&self) -> &SymmetricMatrix {
        &self.matrix
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn order(&self) -> usize {
        self.matrix.n()
    }
}

/// Builds the (L+1)×(L+1) matrix with entry (i, j) = rho[|i−j|].
pub fn build_toeplitz(rho: &[f64]) -> Result<ToeplitzMatrix> {
    if rho.is_empty() {
        return Err(Error::Validation("lag sequence must be non-empty".into()));
    }
    if let Some(v) = rho.iter().find(|v| !v.is_finite()) {
        return Err(Error::Validation(format!("non-finite lag value {v}")));
    }
    let n = rho.len();
    let mut matrix = SymmetricMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            matrix.entries[i * n + j] = rho[i.abs_diff(j)];
        }
    }
    Ok(ToeplitzMatrix {
        matrix,
        rho: rho.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split(rows: &[Vec<f64>]) -> SymmetricSplit {
        symmetrize_zero_diag(&SquareMatrix::from_rows(rows).unwrap())
    }

    #[test]
    fn symmetrize_identity() {
        let s = split(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(s.e(), &SymmetricMatrix::zeros(2));
        assert_eq!(s.trace_offset(), 2.0);
    }

    #[test]
    fn symmetrize_zero_diag_passthrough() {
        let s = split(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(s.e().get(0, 1), 1.0);
        assert_eq!(s.trace_offset(), 0.0);
    }

    #[test]
    fn symmetrize_general() {
        // ½(c + cᵀ) of [[1,3],[−1,2]] is [[1,1],[1,2]]; dropping the diagonal
        // leaves [[0,1],[1,0]] with trace offset 3.
        let s = split(&[vec![1.0, 3.0], vec![-1.0, 2.0]]);
        assert_eq!(s.e().get(0, 1), 1.0);
        assert_eq!(s.e().get(0, 0), 0.0);
        assert_eq!(s.trace_offset(), 3.0);

        // Hypercube identity on all four sign vectors.
        let c = SquareMatrix::from_rows(&[vec![1.0, 3.0], vec![-1.0, 2.0]]).unwrap();
        let d = SymmetricMatrix::symmetric_part(&c);
        for x in [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]] {
            let full = qf_value(&d, &x).unwrap();
            let split_val = qf_value(s.e(), &x).unwrap() + s.trace_offset();
            assert!((full - split_val).abs() < 1e-12);
        }
    }

    #[test]
    fn qf_values() {
        let i2 = SymmetricMatrix::identity(2);
        assert_eq!(qf_value(&i2, &[1.0, -1.0]).unwrap(), 2.0);

        let swap = SymmetricMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(qf_value(&swap, &[1.0, 1.0]).unwrap(), 2.0);
        assert_eq!(qf_value(&swap, &[1.0, -1.0]).unwrap(), -2.0);

        let t = build_toeplitz(&[1.0, -0.6, 0.0]).unwrap();
        let v = qf_value(t.matrix(), &[1.0, 1.0, 1.0]).unwrap();
        assert!((v - 0.6).abs() < 1e-12);
    }

    #[test]
    fn qf_dimension_mismatch() {
        let i2 = SymmetricMatrix::identity(2);
        assert!(matches!(
            qf_value(&i2, &[1.0]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn toeplitz_shapes() {
        assert_eq!(build_toeplitz(&[1.0]).unwrap().matrix().rows(), vec![vec![1.0]]);
        let t = build_toeplitz(&[1.0, 0.5]).unwrap();
        assert_eq!(t.matrix().rows(), vec![vec![1.0, 0.5], vec![0.5, 1.0]]);
        let t = build_toeplitz(&[1.0, -0.6, 0.0]).unwrap();
        assert_eq!(
            t.matrix().rows(),
            vec![
                vec![1.0, -0.6, 0.0],
                vec![-0.6, 1.0, -0.6],
                vec![0.0, -0.6, 1.0]
            ]
        );
        assert!(build_toeplitz(&[]).is_err());
    }

    #[test]
    fn asymmetric_rejected() {
        let err = SymmetricMatrix::from_rows(&[vec![0.0, 1.0], vec![0.5, 0.0]]);
        assert!(matches!(err, Err(Error::Validation(_))));
        // Within tolerance: accepted and averaged.
        let ok = SymmetricMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0 + 1e-13, 0.0]]).unwrap();
        assert_eq!(ok.get(0, 1), ok.get(1, 0));
    }

    #[test]
    fn trace_product_symmetric_commutes() {
        let r = build_toeplitz(&[1.0, -0.6, 0.0]).unwrap();
        let x = SymmetricMatrix::from_rows(&[
            vec![0.0, 0.5, -1.0],
            vec![0.5, 0.0, 2.0],
            vec![-1.0, 2.0, 0.0],
        ])
        .unwrap();
        let rx = trace_product(r.matrix(), &x).unwrap();
        let xr = trace_product(&x, r.matrix()).unwrap();
        assert!((rx - xr).abs() < 1e-12);
    }

    #[test]
    fn mcmillan_trace_check_examples() {
        // All-ones witness against rho = (1,1,1): every entry of R sums in.
        let r = build_toeplitz(&[1.0, 1.0, 1.0]).unwrap();
        let mut j = SymmetricMatrix::zeros(3);
        for i in 0..3 {
            for k in 0..3 {
                j.set_sym(i, k, 1.0);
            }
        }
        assert_eq!(trace_product(r.matrix(), &j).unwrap(), 9.0);

        let r = build_toeplitz(&[1.0, -0.6, 0.0]).unwrap();
        let v = trace_product(r.matrix(), &j).unwrap();
        assert!((v - 0.6).abs() < 1e-12);

        let z = SymmetricMatrix::zeros(3);
        assert_eq!(trace_product(r.matrix(), &z).unwrap(), 0.0);
    }

    #[test]
    fn sign_vector_validation() {
        assert!(SignVector::new(vec![1, -1, 1]).is_ok());
        assert!(SignVector::new(vec![1, 0]).is_err());
        assert!(SignVector::new(vec![]).is_err());
        assert_eq!(
            SignVector::new(vec![-1, 1]).unwrap().canonical().bits(),
            &[1, -1]
        );
    }

    #[test]
    fn lattice_vector_validation() {
        assert!(LatticeVector::new(vec![2, -1], 2).is_ok());
        assert!(LatticeVector::new(vec![0, 1], 2).is_err());
        assert!(LatticeVector::new(vec![3, 1], 2).is_err());
        assert!(LatticeVector::new(vec![1], 0).is_err());
    }

    #[test]
    fn matrix_json_roundtrip() {
        let m = SymmetricMatrix::from_rows(&[vec![1.0, -2.0], vec![-2.0, 1.0]]).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.contains("\"n\":2"));
        let back: SymmetricMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(m, back);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn square(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
            prop::collection::vec(prop::collection::vec(-5.0f64..5.0, n), n)
        }

        proptest! {
            /// On every sign vector the form of any square matrix equals the
            /// zero-diagonal part plus the trace.
            #[test]
            fn hypercube_identity(n in 1usize..=6, rows in square(6)) {
                let rows: Vec<Vec<f64>> =
                    rows.iter().take(n).map(|r| r[..n].to_vec()).collect();
                let c = SquareMatrix::from_rows(&rows).unwrap();
                let d = SymmetricMatrix::symmetric_part(&c);
                let split = symmetrize_zero_diag(&c);
                for mask in 0u32..(1 << n) {
                    let x: Vec<f64> = (0..n)
                        .map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 })
                        .collect();
                    let full = qf_value(&d, &x).unwrap();
                    let via_split = qf_value(split.e(), &x).unwrap() + split.trace_offset();
                    prop_assert!((full - via_split).abs() < 1e-12 * (1.0 + full.abs()));
                }
            }

            /// Trace(RX) = Trace(XR) for symmetric operands.
            #[test]
            fn trace_commutes(n in 1usize..=6, a in square(6), b in square(6)) {
                let take = |rows: &Vec<Vec<f64>>| -> SymmetricMatrix {
                    let rows: Vec<Vec<f64>> =
                        rows.iter().take(n).map(|r| r[..n].to_vec()).collect();
                    SymmetricMatrix::symmetric_part(&SquareMatrix::from_rows(&rows).unwrap())
                };
                let (r, x) = (take(&a), take(&b));
                let rx = trace_product(&r, &x).unwrap();
                let xr = trace_product(&x, &r).unwrap();
                prop_assert!((rx - xr).abs() < 1e-12 * (1.0 + rx.abs()));
            }

            /// Toeplitz construction is symmetric and constant on diagonals.
            #[test]
            fn toeplitz_invariants(rho in prop::collection::vec(-3.0f64..3.0, 1..8)) {
                let t = build_toeplitz(&rho).unwrap();
                let m = t.matrix();
                for i in 0..m.n() {
                    for j in 0..m.n() {
                        prop_assert_eq!(m.get(i, j), m.get(j, i));
                        prop_assert_eq!(m.get(i, j), rho[i.abs_diff(j)]);
                    }
                }
            }
        }
    }
}
