//! Exact integer linear algebra over sparse rows: Hermite and Smith normal
//! forms, saturated integer kernels and elementary divisors of lattice
//! quotients.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::Value;
use thiserror::Error;

use crate::json::{int_from_json, int_to_json};
use crate::par;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("generator row {0} does not lie in the ambient lattice")]
    NotSublattice(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("malformed matrix: {0}")]
    Parse(String),
}

/// A sparse integer vector: sorted `(column, value)` pairs with nonzero
/// values.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, BigInt)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    /// Sums duplicate columns and drops zeros.
    pub fn from_entries(mut entries: Vec<(usize, BigInt)>) -> Self {
        entries.sort_by_key(|(c, _)| *c);
        let mut out: Vec<(usize, BigInt)> = Vec::with_capacity(entries.len());
        for (c, v) in entries {
            match out.last_mut() {
                Some((lc, lv)) if *lc == c => *lv += v,
                _ => out.push((c, v)),
            }
        }
        out.retain(|(_, v)| !v.is_zero());
        SparseVec { entries: out }
    }

    pub fn from_dense(values: &[BigInt]) -> Self {
        SparseVec {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(c, v)| (c, v.clone()))
                .collect(),
        }
    }

    pub fn unit(col: usize) -> Self {
        SparseVec { entries: vec![(col, BigInt::one())] }
    }

    pub fn entries(&self) -> &[(usize, BigInt)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(usize, BigInt)> {
        self.entries
    }

    pub fn get(&self, col: usize) -> Option<&BigInt> {
        self.entries
            .binary_search_by_key(&col, |(c, _)| *c)
            .ok()
            .map(|i| &self.entries[i].1)
    }

    pub fn leading(&self) -> Option<(usize, &BigInt)> {
        self.entries.first().map(|(c, v)| (*c, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// `self += q * other`.
    pub fn axpy(&mut self, q: &BigInt, other: &SparseVec) {
        if q.is_zero() || other.is_zero() {
            return;
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let mut a = std::mem::take(&mut self.entries).into_iter().peekable();
        let mut b = other.entries.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some((ca, _)), Some((cb, _))) if ca < cb => out.push(a.next().unwrap()),
                (Some((ca, _)), Some((cb, _))) if ca > cb => {
                    let (c, v) = b.next().unwrap();
                    out.push((*c, q * v));
                }
                (Some(_), Some(_)) => {
                    let (c, mut v) = a.next().unwrap();
                    let (_, w) = b.next().unwrap();
                    v += q * w;
                    if !v.is_zero() {
                        out.push((c, v));
                    }
                }
                (Some(_), None) => out.push(a.next().unwrap()),
                (None, Some(_)) => {
                    let (c, v) = b.next().unwrap();
                    out.push((*c, q * v));
                }
                (None, None) => break,
            }
        }
        self.entries = out;
    }

    pub fn neg_in_place(&mut self) {
        for (_, v) in &mut self.entries {
            *v = -std::mem::take(v);
        }
    }

    pub fn scale(&self, q: &BigInt) -> SparseVec {
        if q.is_zero() {
            return SparseVec::new();
        }
        SparseVec { entries: self.entries.iter().map(|(c, v)| (*c, v * q)).collect() }
    }

    /// Shifts every column index by `offset`.
    pub fn shifted(&self, offset: isize) -> SparseVec {
        SparseVec {
            entries: self
                .entries
                .iter()
                .map(|(c, v)| ((*c as isize + offset) as usize, v.clone()))
                .collect(),
        }
    }

    /// Keeps columns in `lo..hi`, re-based to start at 0.
    pub fn slice(&self, lo: usize, hi: usize) -> SparseVec {
        SparseVec {
            entries: self
                .entries
                .iter()
                .filter(|(c, _)| *c >= lo && *c < hi)
                .map(|(c, v)| (c - lo, v.clone()))
                .collect(),
        }
    }

    pub fn concat(&self, other: &SparseVec, offset: usize) -> SparseVec {
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().map(|(c, v)| (c + offset, v.clone())));
        SparseVec { entries }
    }

    pub fn to_dense(&self, n: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); n];
        for (c, v) in &self.entries {
            out[*c] = v.clone();
        }
        out
    }

    /// Sign-normalized copy: first nonzero entry positive.
    pub fn normalized_sign(&self) -> SparseVec {
        match self.leading() {
            Some((_, v)) if v.is_negative() => self.scale(&BigInt::from(-1)),
            _ => self.clone(),
        }
    }
}

/// A rectangular integer matrix stored as sparse rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![SparseVec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        IntMatrix { rows: n, cols: n, data: (0..n).map(SparseVec::unit).collect() }
    }

    pub fn from_rows(cols: usize, data: Vec<SparseVec>) -> Self {
        debug_assert!(data.iter().all(|r| r.entries.last().is_none_or(|(c, _)| *c < cols)));
        IntMatrix { rows: data.len(), cols, data }
    }

    pub fn from_dense(rows: Vec<Vec<BigInt>>) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        IntMatrix { rows: rows.len(), cols, data: rows.iter().map(|r| SparseVec::from_dense(r)).collect() }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        Self::from_dense(rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.data[i]
    }

    pub fn row_vecs(&self) -> &[SparseVec] {
        &self.data
    }

    pub fn into_rows(self) -> Vec<SparseVec> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        self.data[i].get(j).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        assert!(i < self.rows && j < self.cols);
        let row = &mut self.data[i].entries;
        match row.binary_search_by_key(&j, |(c, _)| *c) {
            Ok(pos) if v.is_zero() => {
                row.remove(pos);
            }
            Ok(pos) => row[pos].1 = v,
            Err(_) if v.is_zero() => {}
            Err(pos) => row.insert(pos, (j, v)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_zero())
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.nnz()).sum()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut buckets: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); self.cols];
        for (i, row) in self.data.iter().enumerate() {
            for (j, v) in &row.entries {
                buckets[*j].push((i, v.clone()));
            }
        }
        IntMatrix {
            rows: self.cols,
            cols: self.rows,
            data: buckets.into_iter().map(|entries| SparseVec { entries }).collect(),
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = par::map(&self.data, |row| {
            let mut acc = SparseVec::new();
            for (j, v) in &row.entries {
                acc.axpy(v, &other.data[*j]);
            }
            acc
        });
        Ok(IntMatrix { rows: self.rows, cols: other.cols, data })
    }

    /// `self · v` for a column vector given sparsely.
    pub fn mul_vec(&self, v: &SparseVec) -> SparseVec {
        let entries = self
            .data
            .iter()
            .enumerate()
            .filter_map(|(i, row)| {
                let s = sparse_dot(row, v);
                (!s.is_zero()).then_some((i, s))
            })
            .collect();
        SparseVec { entries }
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        self.data.iter().map(|r| r.to_dense(self.cols)).collect()
    }

    pub fn to_json(&self) -> Value {
        let data: Vec<Value> = self
            .to_dense()
            .iter()
            .map(|r| Value::Array(r.iter().map(int_to_json).collect()))
            .collect();
        serde_json::json!({ "rows": self.rows, "cols": self.cols, "data": data })
    }

    pub fn from_json(v: &Value) -> Result<Self, LinalgError> {
        let rows = v["rows"].as_u64().ok_or_else(|| LinalgError::Parse("missing rows".into()))? as usize;
        let cols = v["cols"].as_u64().ok_or_else(|| LinalgError::Parse("missing cols".into()))? as usize;
        let data = v["data"].as_array().ok_or_else(|| LinalgError::Parse("missing data".into()))?;
        if data.len() != rows {
            return Err(LinalgError::Parse(format!("expected {rows} rows, got {}", data.len())));
        }
        let mut out = Vec::with_capacity(rows);
        for r in data {
            let r = r.as_array().ok_or_else(|| LinalgError::Parse("row is not an array".into()))?;
            if r.len() != cols {
                return Err(LinalgError::Parse(format!("expected {cols} columns, got {}", r.len())));
            }
            let vals: Option<Vec<BigInt>> = r.iter().map(int_from_json).collect();
            let vals = vals.ok_or_else(|| LinalgError::Parse("bad entry".into()))?;
            out.push(SparseVec::from_dense(&vals));
        }
        Ok(IntMatrix { rows, cols, data: out })
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_dense() {
            let s: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "[{}]", s.join(", "))?;
        }
        Ok(())
    }
}

pub fn sparse_dot(a: &SparseVec, b: &SparseVec) -> BigInt {
    let mut s = BigInt::zero();
    let (mut i, mut j) = (0, 0);
    while i < a.entries.len() && j < b.entries.len() {
        let (ca, va) = &a.entries[i];
        let (cb, vb) = &b.entries[j];
        match ca.cmp(cb) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                s += va * vb;
                i += 1;
                j += 1;
            }
        }
    }
    s
}

/// Quotient of `a / b` rounded to the nearest integer.
fn nearest_quotient(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut q, r) = a.div_mod_floor(b);
    if (&r * 2u32).abs() > b.abs() {
        q += 1;
    }
    q
}

/// Result of integer row echelon reduction over the columns `< limit`.
struct Echelon {
    /// Pivot rows with their pivot column, in increasing column order;
    /// pivot entries are positive.
    pivots: Vec<(usize, SparseVec)>,
    /// Rows whose entries below `limit` vanished.
    rest: Vec<SparseVec>,
}

/// Unimodular row reduction. Rows sharing a leading column are reduced
/// Euclid-style against the row with the smallest leading entry (fewest
/// nonzeros on ties) until one remains.
fn echelon(rows: Vec<SparseVec>, limit: usize, reduce_above: bool) -> Echelon {
    let mut active: Vec<SparseVec> = rows.into_iter().filter(|r| !r.is_zero()).collect();
    let mut rest = Vec::new();
    let mut pivots: Vec<(usize, SparseVec)> = Vec::new();
    // rows with nothing left below the limit are done
    let mut i = 0;
    while i < active.len() {
        if active[i].leading().is_none_or(|(c, _)| c >= limit) {
            rest.push(active.swap_remove(i));
        } else {
            i += 1;
        }
    }
    while !active.is_empty() {
        let col = active.iter().map(|r| r.leading().unwrap().0).min().unwrap();
        let mut group: Vec<usize> = (0..active.len())
            .filter(|&i| active[i].leading().unwrap().0 == col)
            .collect();
        let pivot = loop {
            let &p = group
                .iter()
                .min_by(|&&a, &&b| {
                    let va = active[a].leading().unwrap().1.abs();
                    let vb = active[b].leading().unwrap().1.abs();
                    va.cmp(&vb).then(active[a].nnz().cmp(&active[b].nnz()))
                })
                .unwrap();
            let prow = active[p].clone();
            let lead = prow.leading().unwrap().1.clone();
            let mut next = Vec::new();
            for &q in &group {
                if q == p {
                    continue;
                }
                let lq = active[q].leading().unwrap().1.clone();
                let quot = nearest_quotient(&lq, &lead);
                active[q].axpy(&-quot, &prow);
                if active[q].leading().is_some_and(|(c, _)| c == col) {
                    next.push(q);
                }
            }
            if next.is_empty() {
                break p;
            }
            next.push(p);
            group = next;
        };
        // retire the pivot and any rows that left the elimination range
        let mut prow = active.swap_remove(pivot);
        if prow.leading().unwrap().1.is_negative() {
            prow.neg_in_place();
        }
        pivots.push((col, prow));
        let mut i = 0;
        while i < active.len() {
            if active[i].leading().is_none_or(|(c, _)| c >= limit) {
                rest.push(active.swap_remove(i));
            } else {
                i += 1;
            }
        }
    }
    if reduce_above {
        for i in 1..pivots.len() {
            let (head, tail) = pivots.split_at_mut(i);
            let (col, prow) = &tail[0];
            let lead = prow.get(*col).unwrap();
            for (_, row) in head.iter_mut() {
                if let Some(e) = row.get(*col) {
                    let q = e.div_floor(lead);
                    if !q.is_zero() {
                        row.axpy(&-q, prow);
                    }
                }
            }
        }
    }
    Echelon { pivots, rest }
}

/// Row Hermite normal form: returns `(H, U)` with `U` unimodular and
/// `U·A = H`. Nonzero rows of `H` come first with strictly increasing
/// positive pivots; entries above each pivot lie in `[0, pivot)`.
pub fn hnf(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let m = a.rows;
    let rows: Vec<SparseVec> = a
        .data
        .iter()
        .enumerate()
        .map(|(i, r)| r.concat(&SparseVec::unit(i), a.cols))
        .collect();
    let ech = echelon(rows, a.cols, true);
    let ordered: Vec<SparseVec> = ech.pivots.into_iter().map(|(_, r)| r).chain(ech.rest).collect();
    let h = ordered.iter().map(|r| r.slice(0, a.cols)).collect();
    let u = ordered.iter().map(|r| r.slice(a.cols, a.cols + m)).collect();
    (IntMatrix::from_rows(a.cols, h), IntMatrix::from_rows(m, u))
}

/// Rank over ℚ (equivalently over ℤ).
pub fn rank(a: &IntMatrix) -> usize {
    echelon(a.data.clone(), a.cols, false).pivots.len()
}

/// Rows form a basis of `{v ∈ ℤ^cols : A v = 0}`, in Hermite normal form.
///
/// Computed by reducing `[Aᵀ | I]`: rows whose left part vanishes carry
/// a unimodular transform's kernel block, so the result is saturated.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let n = a.cols;
    let m = a.rows;
    let t = a.transpose();
    let rows: Vec<SparseVec> = t
        .data
        .iter()
        .enumerate()
        .map(|(j, r)| r.concat(&SparseVec::unit(j), m))
        .collect();
    let ech = echelon(rows, m, false);
    let kernel: Vec<SparseVec> = ech.rest.iter().map(|r| r.slice(m, m + n)).collect();
    let reduced = echelon(kernel, n, true);
    debug_assert!(reduced.rest.is_empty());
    IntMatrix::from_rows(n, reduced.pivots.into_iter().map(|(_, r)| r).collect())
}

/// A lattice given by a basis in Hermite normal form, supporting exact
/// coordinate solves.
#[derive(Clone, Debug)]
pub struct LatticeBasis {
    cols: usize,
    rows: Vec<SparseVec>,
    pivot_cols: Vec<usize>,
    by_col: HashMap<usize, usize>,
}

impl LatticeBasis {
    /// The lattice spanned by the rows of `b` (dependent rows allowed).
    pub fn new(b: &IntMatrix) -> Self {
        let ech = echelon(b.data.clone(), b.cols, true);
        Self::from_hnf_rows(b.cols, ech.pivots)
    }

    fn from_hnf_rows(cols: usize, pivots: Vec<(usize, SparseVec)>) -> Self {
        let pivot_cols: Vec<usize> = pivots.iter().map(|(c, _)| *c).collect();
        let by_col = pivot_cols.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let rows = pivots.into_iter().map(|(_, r)| r).collect();
        LatticeBasis { cols, rows, pivot_cols, by_col }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn basis_rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn pivot_cols(&self) -> &[usize] {
        &self.pivot_cols
    }

    pub fn matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(self.cols, self.rows.clone())
    }

    /// Coordinates `c` with `v = Σ c_i row_i`, or `None` when `v` is not
    /// in the lattice.
    pub fn coordinates(&self, v: &SparseVec) -> Option<SparseVec> {
        let mut residual = v.clone();
        let mut coords = Vec::new();
        while let Some((col, e)) = residual.leading() {
            let &i = self.by_col.get(&col)?;
            let row = &self.rows[i];
            let (q, r) = e.div_rem(row.leading().unwrap().1);
            if !r.is_zero() {
                return None;
            }
            residual.axpy(&-&q, row);
            coords.push((i, q));
        }
        Some(SparseVec::from_entries(coords))
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.coordinates(v).is_some()
    }
}

/// `U·A·V = D` with `U`, `V` unimodular and `D` diagonal, `d1 | d2 | ...`.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    /// Diagonal entries of `D` (length `min(rows, cols)`).
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d.get(i, i)).collect()
    }
}

struct DenseSnf {
    a: Vec<Vec<BigInt>>,
    u: Option<Vec<Vec<BigInt>>>,
    v: Option<Vec<Vec<BigInt>>>,
}

impl DenseSnf {
    fn m(&self) -> usize {
        self.a.len()
    }

    fn n(&self) -> usize {
        self.a.first().map_or(0, |r| r.len())
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        if let Some(u) = &mut self.u {
            u.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for r in &mut self.a {
            r.swap(i, j);
        }
        if let Some(v) = &mut self.v {
            for r in v {
                r.swap(i, j);
            }
        }
    }

    /// row_i += q·row_j
    fn add_row(&mut self, i: usize, j: usize, q: &BigInt) {
        fn op(mat: &mut [Vec<BigInt>], i: usize, j: usize, q: &BigInt) {
            let (src, dst) = if i < j {
                let (lo, hi) = mat.split_at_mut(j);
                (&hi[0], &mut lo[i])
            } else {
                let (lo, hi) = mat.split_at_mut(i);
                (&lo[j], &mut hi[0])
            };
            for (d, s) in dst.iter_mut().zip(src.iter()) {
                if !s.is_zero() {
                    *d += q * s;
                }
            }
        }
        op(&mut self.a, i, j, q);
        if let Some(u) = &mut self.u {
            op(u, i, j, q);
        }
    }

    /// col_i += q·col_j
    fn add_col(&mut self, i: usize, j: usize, q: &BigInt) {
        fn op(mat: &mut [Vec<BigInt>], i: usize, j: usize, q: &BigInt) {
            for r in mat.iter_mut() {
                if !r[j].is_zero() {
                    let t = q * &r[j];
                    r[i] += t;
                }
            }
        }
        op(&mut self.a, i, j, q);
        if let Some(v) = &mut self.v {
            op(v, i, j, q);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.a[i] {
            *x = -std::mem::take(x);
        }
        if let Some(u) = &mut self.u {
            for x in &mut u[i] {
                *x = -std::mem::take(x);
            }
        }
    }

    fn run(&mut self) {
        let (m, n) = (self.m(), self.n());
        for t in 0..m.min(n) {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = &self.a[i][j];
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < self.a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { return };
            self.swap_rows(t, bi);
            self.swap_cols(t, bj);
            loop {
                let mut clean = true;
                for i in t + 1..m {
                    if !self.a[i][t].is_zero() {
                        let q = nearest_quotient(&self.a[i][t], &self.a[t][t]);
                        self.add_row(i, t, &-q);
                        clean &= self.a[i][t].is_zero();
                    }
                }
                for j in t + 1..n {
                    if !self.a[t][j].is_zero() {
                        let q = nearest_quotient(&self.a[t][j], &self.a[t][t]);
                        self.add_col(j, t, &-q);
                        clean &= self.a[t][j].is_zero();
                    }
                }
                if !clean {
                    // a smaller remainder appeared in row or column t
                    let mut best = (t, t);
                    for i in t + 1..m {
                        let x = &self.a[i][t];
                        if !x.is_zero() && x.abs() < self.a[best.0][best.1].abs() {
                            best = (i, t);
                        }
                    }
                    for j in t + 1..n {
                        let x = &self.a[t][j];
                        if !x.is_zero() && x.abs() < self.a[best.0][best.1].abs() {
                            best = (t, j);
                        }
                    }
                    self.swap_rows(t, best.0);
                    self.swap_cols(t, best.1);
                    continue;
                }
                let p = self.a[t][t].clone();
                let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(&self.a[i][j] % &p).is_zero()));
                match bad {
                    Some(i) => self.add_row(t, i, &BigInt::one()),
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
        }
    }
}

fn dense_identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

/// Smith normal form with transforms.
pub fn snf(a: &IntMatrix) -> SnfResult {
    let mut s = DenseSnf {
        a: a.to_dense(),
        u: Some(dense_identity(a.rows)),
        v: Some(dense_identity(a.cols)),
    };
    if a.rows > 0 && a.cols > 0 {
        s.run();
    }
    let d = if a.rows == 0 { IntMatrix::zeros(0, a.cols) } else { IntMatrix::from_dense(s.a) };
    let u = IntMatrix::from_dense(s.u.unwrap());
    let v = IntMatrix::from_dense(s.v.unwrap());
    SnfResult {
        u: if a.rows == 0 { IntMatrix::zeros(0, 0) } else { u },
        d,
        v: if a.cols == 0 { IntMatrix::zeros(0, 0) } else { v },
    }
}

/// The nonzero invariant factors `d1 | d2 | ... | dr` of `A`, `r = rank`.
///
/// Two sparse Hermite passes reduce `A` to an `r × r` triangular block
/// before the dense Smith stage.
pub fn elementary_divisors(a: &IntMatrix) -> Vec<BigInt> {
    let ech = echelon(a.data.clone(), a.cols, false);
    let r = ech.pivots.len();
    if r == 0 {
        return Vec::new();
    }
    let p = IntMatrix::from_rows(a.cols, ech.pivots.into_iter().map(|(_, row)| row).collect());
    let pt = p.transpose();
    let ech2 = echelon(pt.data, r, false);
    debug_assert_eq!(ech2.pivots.len(), r);
    let square = IntMatrix::from_rows(r, ech2.pivots.into_iter().map(|(_, row)| row).collect());
    let mut s = DenseSnf { a: square.to_dense(), u: None, v: None };
    s.run();
    (0..r).map(|i| s.a[i][i].clone()).collect()
}

/// Elementary divisors of `⟨B⟩ / ⟨S⟩`, one per rank of the ambient
/// lattice, with zeros for free quotient factors.
pub fn lattice_quotient(ambient: &IntMatrix, sub: &IntMatrix) -> Result<Vec<BigInt>, LinalgError> {
    if ambient.cols != sub.cols {
        return Err(LinalgError::Dimension(format!("ambient has {} columns, sub has {}", ambient.cols, sub.cols)));
    }
    let basis = LatticeBasis::new(ambient);
    lattice_quotient_in(&basis, sub.row_vecs())
}

/// As [`lattice_quotient`], with a prepared ambient basis.
pub fn lattice_quotient_in(basis: &LatticeBasis, sub: &[SparseVec]) -> Result<Vec<BigInt>, LinalgError> {
    let coords = par::map(sub, |v| basis.coordinates(v));
    let mut rows = Vec::with_capacity(coords.len());
    for (i, c) in coords.into_iter().enumerate() {
        rows.push(c.ok_or(LinalgError::NotSublattice(i))?);
    }
    let c = IntMatrix::from_rows(basis.rank(), rows);
    let mut divs = elementary_divisors(&c);
    divs.resize(basis.rank(), BigInt::zero());
    Ok(divs)
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(a: &IntMatrix) -> Result<BigInt, LinalgError> {
    if a.rows != a.cols {
        return Err(LinalgError::Dimension(format!("{}x{} is not square", a.rows, a.cols)));
    }
    let n = a.rows;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut m = a.to_dense();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    Ok(sign * &m[n - 1][n - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_i64(rows)
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hnf_examples() {
        let (h, u) = hnf(&IntMatrix::identity(3));
        assert_eq!(h, IntMatrix::identity(3));
        assert_eq!(u, IntMatrix::identity(3));

        let a = mat(&[vec![2, 4], vec![6, 8]]);
        let (h, u) = hnf(&a);
        assert_eq!(h, mat(&[vec![2, 0], vec![0, 4]]));
        assert_eq!(u.mul(&a).unwrap(), h);
        assert_eq!(determinant(&u).unwrap().abs(), BigInt::one());

        let z = IntMatrix::zeros(2, 3);
        assert!(hnf(&z).0.is_zero());
    }

    #[test]
    fn snf_examples() {
        let d = snf(&mat(&[vec![2, 0], vec![0, 2]])).diagonal();
        assert_eq!(d, ints(&[2, 2]));
        let a = mat(&[vec![2, 4], vec![6, 8]]);
        let r = snf(&a);
        assert_eq!(r.diagonal(), ints(&[2, 4]));
        assert_eq!(r.u.mul(&a).unwrap().mul(&r.v).unwrap(), r.d);
        assert_eq!(elementary_divisors(&a), ints(&[2, 4]));
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&mat(&[vec![1, 1]])), mat(&[vec![1, -1]]));
        assert_eq!(kernel_basis(&mat(&[vec![2, 0], vec![0, 3]])).rows(), 0);
        // saturation: kernel of [2, 4] is spanned by (2, -1), not a multiple
        assert_eq!(kernel_basis(&mat(&[vec![2, 4]])), mat(&[vec![2, -1]]));
    }

    #[test]
    fn quotient_examples() {
        let id = IntMatrix::identity(2);
        assert_eq!(lattice_quotient(&id, &mat(&[vec![2, 0], vec![0, 2]])).unwrap(), ints(&[2, 2]));
        assert_eq!(lattice_quotient(&id, &mat(&[vec![1, 0]])).unwrap(), ints(&[1, 0]));
        assert_eq!(lattice_quotient(&id, &mat(&[vec![1, 1], vec![1, -1]])).unwrap(), ints(&[1, 2]));
        let b = mat(&[vec![2, 0]]);
        assert_eq!(lattice_quotient(&b, &mat(&[vec![1, 0]])), Err(LinalgError::NotSublattice(0)));
    }

    #[test]
    fn determinants() {
        assert_eq!(determinant(&mat(&[vec![2, 4], vec![6, 8]])).unwrap(), BigInt::from(-8));
        assert_eq!(determinant(&mat(&[vec![0, 1], vec![1, 0]])).unwrap(), BigInt::from(-1));
        assert_eq!(determinant(&mat(&[vec![1, 2], vec![2, 4]])).unwrap(), BigInt::zero());
    }

    #[test]
    fn json_round_trip() {
        let a = mat(&[vec![1, -2, 0], vec![0, 0, 7]]);
        assert_eq!(IntMatrix::from_json(&a.to_json()).unwrap(), a);
        assert!(IntMatrix::from_json(&serde_json::json!({"rows": 1, "cols": 2, "data": [[1]]})).is_err());
    }

    #[test]
    fn empty_shapes() {
        let z = IntMatrix::zeros(0, 3);
        assert_eq!(rank(&z), 0);
        assert_eq!(kernel_basis(&z), IntMatrix::identity(3));
        assert!(elementary_divisors(&IntMatrix::zeros(3, 3)).is_empty());
    }
}
