//! Exact linear algebra over prime fields F_q.
//!
//! GF(2) matrices keep their rows as machine-word bitsets so that the
//! exhaustive searches elsewhere in the crate can grind through millions of
//! tiny matrices; every other prime modulus uses plain integer vectors with
//! mod-q arithmetic. Elements are reduced residues carried as `u32` next to
//! their [`PrimeField`].

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A prime modulus together with its element arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    q: u32,
}

fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    if q.is_multiple_of(2) {
        return q == 2;
    }
    let mut d = 3u32;
    while (d as u64) * (d as u64) <= q as u64 {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeField {
    pub fn new(q: u32) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn element(&self, value: u32) -> Result<u32> {
        if value >= self.q {
            return Err(Error::EntryOutOfRange { value, q: self.q });
        }
        Ok(value)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (s % self.q as u64) as u32
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + (self.q - b) as u64;
        (s % self.q as u64) as u32
    }

    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    /// Multiplicative inverse of a nonzero residue.
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "zero has no inverse");
        // extended Euclid on (a, q)
        let (mut r0, mut r1) = (a as i64, self.q as i64);
        let (mut s0, mut s1) = (1i64, 0i64);
        while r1 != 0 {
            let k = r0 / r1;
            (r0, r1) = (r1, r0 - k * r1);
            (s0, s1) = (s1, s0 - k * s1);
        }
        debug_assert_eq!(r0, 1);
        s0.rem_euclid(self.q as i64) as u32
    }
}

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

fn bit_get(words: &[u64], i: usize) -> bool {
    words[i / WORD] >> (i % WORD) & 1 == 1
}

fn bit_set(words: &mut [u64], i: usize, v: bool) {
    let mask = 1u64 << (i % WORD);
    if v {
        words[i / WORD] |= mask;
    } else {
        words[i / WORD] &= !mask;
    }
}

fn first_set_bit(words: &[u64]) -> Option<usize> {
    for (w, word) in words.iter().enumerate() {
        if *word != 0 {
            return Some(w * WORD + word.trailing_zeros() as usize);
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    /// q = 2: one bitset per row, `words_per_row` words each, flattened.
    Bits { words_per_row: usize, words: Vec<u64> },
    /// General prime q: row-major reduced residues.
    Ints(Vec<u32>),
}

/// A dense K×m matrix over a prime field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    repr: Repr,
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        let repr = if field.q() == 2 {
            let wpr = words_for(cols);
            Repr::Bits {
                words_per_row: wpr,
                words: vec![0; rows * wpr],
            }
        } else {
            Repr::Ints(vec![0; rows * cols])
        };
        Self {
            field,
            rows,
            cols,
            repr,
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from explicit rows, validating every entry against q.
    pub fn from_rows(q: u32, cols: usize, rows: Vec<Vec<u32>>) -> Result<Self> {
        let field = PrimeField::new(q)?;
        let mut m = Self::zeros(field, rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    cols
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                field.element(v)?;
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        assert!(i < self.rows && j < self.cols);
        match &self.repr {
            Repr::Bits {
                words_per_row,
                words,
            } => bit_get(&words[i * words_per_row..(i + 1) * words_per_row], j) as u32,
            Repr::Ints(data) => data[i * self.cols + j],
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        assert!(i < self.rows && j < self.cols);
        debug_assert!(v < self.field.q());
        let cols = self.cols;
        match &mut self.repr {
            Repr::Bits {
                words_per_row,
                words,
            } => {
                let wpr = *words_per_row;
                bit_set(&mut words[i * wpr..(i + 1) * wpr], j, v == 1);
            }
            Repr::Ints(data) => data[i * cols + j] = v,
        }
    }

    pub fn row_vec(&self, i: usize) -> Vec<u32> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// A column of a GF(2) matrix packed into words (length = rows).
    pub(crate) fn column_bits(&self, j: usize) -> Vec<u64> {
        debug_assert_eq!(self.q(), 2);
        let mut out = vec![0u64; words_for(self.rows)];
        for i in 0..self.rows {
            if self.get(i, j) == 1 {
                bit_set(&mut out, i, true);
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// The submatrix keeping the listed columns, in the given order.
    pub fn columns_submatrix(&self, idx: &[usize]) -> Matrix {
        let mut s = Matrix::zeros(self.field, self.rows, idx.len());
        for (jj, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                s.set(i, jj, self.get(i, j));
            }
        }
        s
    }

    /// Rank over F_q via exact Gaussian elimination. Pivots are chosen by a
    /// row-major scan for the first nonzero entry, so the result of
    /// [`Matrix::row_basis`] is reproducible.
    pub fn rank(&self) -> usize {
        match &self.repr {
            Repr::Bits { .. } => {
                let rows: Vec<Vec<u64>> = (0..self.rows).map(|i| self.row_words(i)).collect();
                rank_bits(self.cols, rows)
            }
            Repr::Ints(_) => {
                let rows: Vec<Vec<u32>> = (0..self.rows).map(|i| self.row_vec(i)).collect();
                rank_ints(self.field, rows)
            }
        }
    }

    /// The first maximal linearly independent subset of rows, in row order.
    pub fn row_basis(&self) -> Matrix {
        let kept = self.row_basis_indices();
        let rows: Vec<Vec<u32>> = kept.iter().map(|&i| self.row_vec(i)).collect();
        Matrix::from_rows(self.q(), self.cols, rows).expect("rows of a valid matrix are valid")
    }

    pub fn row_basis_indices(&self) -> Vec<usize> {
        match &self.repr {
            Repr::Bits { .. } => {
                let mut basis = XorBasis::new(self.cols);
                (0..self.rows)
                    .filter(|&i| basis.insert(self.row_words(i)))
                    .collect()
            }
            Repr::Ints(_) => {
                let mut basis = ModBasis::new(self.field, self.cols);
                (0..self.rows)
                    .filter(|&i| basis.insert(self.row_vec(i)))
                    .collect()
            }
        }
    }

    fn row_words(&self, i: usize) -> Vec<u64> {
        match &self.repr {
            Repr::Bits {
                words_per_row,
                words,
            } => words[i * words_per_row..(i + 1) * words_per_row].to_vec(),
            Repr::Ints(_) => unreachable!("bit rows requested from an integer matrix"),
        }
    }
}

/// Is `v` an F_q-linear combination of the columns of `m`?
///
/// The zero vector is in every span. Implemented by reducing `v` against a
/// column-space basis, which keeps it an independent code path from the
/// rank-of-augmented-matrix identity it is cross-checked against.
pub fn in_span(v: &[u32], m: &Matrix) -> Result<bool> {
    if v.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "vector has {} entries, matrix has {} rows",
            v.len(),
            m.rows()
        )));
    }
    for &x in v {
        m.field().element(x)?;
    }
    if m.q() == 2 {
        let mut basis = XorBasis::new(m.rows());
        for j in 0..m.cols() {
            basis.insert(m.column_bits(j));
        }
        let mut packed = vec![0u64; words_for(m.rows())];
        for (i, &x) in v.iter().enumerate() {
            bit_set(&mut packed, i, x == 1);
        }
        Ok(basis.reduces_to_zero(packed))
    } else {
        let mut basis = ModBasis::new(m.field(), m.rows());
        for j in 0..m.cols() {
            basis.insert(m.column(j));
        }
        Ok(basis.reduces_to_zero(v.to_vec()))
    }
}

fn rank_bits(cols: usize, rows: Vec<Vec<u64>>) -> usize {
    let mut basis = XorBasis::new(cols);
    rows.into_iter().filter(|r| basis.insert(r.clone())).count()
}

fn rank_ints(field: PrimeField, rows: Vec<Vec<u32>>) -> usize {
    let mut basis = ModBasis::new(field, rows.first().map_or(0, |r| r.len()));
    rows.into_iter().filter(|r| basis.insert(r.clone())).count()
}

/// Incremental GF(2) elimination basis over bit-packed vectors.
pub(crate) struct XorBasis {
    dim: usize,
    by_pivot: Vec<Option<Vec<u64>>>,
    rank: usize,
}

impl XorBasis {
    pub(crate) fn new(dim: usize) -> Self {
        Self {
            dim,
            by_pivot: vec![None; dim],
            rank: 0,
        }
    }

    fn reduce(&self, mut v: Vec<u64>) -> Vec<u64> {
        while let Some(p) = first_set_bit(&v) {
            match &self.by_pivot[p] {
                Some(b) => {
                    for (x, y) in v.iter_mut().zip(b) {
                        *x ^= y;
                    }
                }
                None => break,
            }
        }
        v
    }

    /// Inserts a vector; returns true when it enlarged the span.
    pub(crate) fn insert(&mut self, v: Vec<u64>) -> bool {
        debug_assert!(v.len() == words_for(self.dim) || self.dim == 0);
        let r = self.reduce(v);
        match first_set_bit(&r) {
            Some(p) => {
                self.by_pivot[p] = Some(r);
                self.rank += 1;
                true
            }
            None => false,
        }
    }

    pub(crate) fn reduces_to_zero(&self, v: Vec<u64>) -> bool {
        first_set_bit(&self.reduce(v)).is_none()
    }

    pub(crate) fn rank(&self) -> usize {
        self.rank
    }
}

/// Incremental elimination basis over F_q integer vectors, pivots scaled to 1.
pub(crate) struct ModBasis {
    field: PrimeField,
    by_pivot: Vec<Option<Vec<u32>>>,
    rank: usize,
}

impl ModBasis {
    pub(crate) fn new(field: PrimeField, dim: usize) -> Self {
        Self {
            field,
            by_pivot: vec![None; dim],
            rank: 0,
        }
    }

    fn reduce(&self, mut v: Vec<u32>) -> Vec<u32> {
        for p in 0..v.len() {
            if v[p] == 0 {
                continue;
            }
            if let Some(b) = &self.by_pivot[p] {
                let c = v[p];
                for (x, y) in v.iter_mut().zip(b) {
                    *x = self.field.sub(*x, self.field.mul(c, *y));
                }
                debug_assert_eq!(v[p], 0);
            }
        }
        v
    }

    pub(crate) fn insert(&mut self, v: Vec<u32>) -> bool {
        let r = self.reduce(v);
        match r.iter().position(|&x| x != 0) {
            Some(p) => {
                let inv = self.field.inv(r[p]);
                let scaled = r.iter().map(|&x| self.field.mul(x, inv)).collect();
                self.by_pivot[p] = Some(scaled);
                self.rank += 1;
                true
            }
            None => false,
        }
    }

    pub(crate) fn reduces_to_zero(&self, v: Vec<u32>) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    pub(crate) fn rank(&self) -> usize {
        self.rank
    }
}

/// Wire format: `{"q": int, "rows": int, "cols": int, "data": [[int,...],...]}`
/// row-major; entries must be reduced modulo q.
#[derive(Serialize, Deserialize, Clone)]
struct MatrixJson {
    q: u32,
    rows: usize,
    cols: usize,
    data: Vec<Vec<u32>>,
}

impl TryFrom<MatrixJson> for Matrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        if j.data.len() != j.rows {
            return Err(Error::DimensionMismatch(format!(
                "data has {} rows, header says {}",
                j.data.len(),
                j.rows
            )));
        }
        Matrix::from_rows(j.q, j.cols, j.data)
    }
}

impl From<Matrix> for MatrixJson {
    fn from(m: Matrix) -> Self {
        MatrixJson {
            q: m.q(),
            rows: m.rows(),
            cols: m.cols(),
            data: (0..m.rows()).map(|i| m.row_vec(i)).collect(),
        }
    }
}
