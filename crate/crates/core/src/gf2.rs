//! Bit-packed vectors and matrices over GF(2).
//!
//! One `u64` word holds 64 entries; addition is XOR and multiplication is
//! AND, so matrix-vector products and row reduction run on whole words.
//! Everything downstream (encoders, decoders, rank experiments) goes through
//! the single row-reduction kernel in [`row_reduce`], which keeps rank,
//! null-space, and solve semantics consistent with each other.

use crate::error::Error;
use rand::RngCore;

const WORD_BITS: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    (bits + WORD_BITS - 1) >> 6
}

/// Mask selecting the live bits of the final word of a row of `bits` columns.
#[inline]
fn tail_mask(bits: usize) -> u64 {
    let rem = bits % WORD_BITS;
    if rem == 0 {
        u64::MAX
    } else {
        (1u64 << rem) - 1
    }
}

/// A fixed-length vector over GF(2).
///
/// Invariant: bits past `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Builds from a slice of 0/1 values.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = BitVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            debug_assert!(b <= 1);
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    /// Samples each entry independently as Bernoulli(1/2).
    pub fn random(len: usize, rng: &mut dyn RngCore) -> Self {
        let mut words = vec![0u64; words_for(len)];
        for w in words.iter_mut() {
            *w = rng.next_u64();
        }
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        BitVector { len, words }
    }

    /// Samples each entry independently as Bernoulli(`p1`), one uniform draw
    /// per position. Bit i is 1 when its draw lands in the top `p1` of the
    /// unit interval, the same mapping the pmf sampler uses, so either
    /// sampling route yields the same sequence from the same rng state.
    pub fn bernoulli(len: usize, p1: f64, rng: &mut dyn RngCore) -> Self {
        use rand::Rng;
        let mut v = BitVector::zeros(len);
        for i in 0..len {
            if rng.random::<f64>() >= 1.0 - p1 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 != 0
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Bitwise union; not a field operation, used for merging erasure sets.
    pub fn or_assign(&mut self, other: &BitVector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Parity of the AND with `other` (inner product over GF(2)).
    pub fn dot(&self, other: &BitVector) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones();
        }
        acc & 1 != 0
    }

    /// Number of positions where both vectors are 1.
    pub fn ones_in_common(&self, other: &BitVector) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

impl std::fmt::Debug for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        Ok(())
    }
}

/// A dense matrix over GF(2), stored row-major with bit-packed rows.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    wpr: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let wpr = words_for(cols);
        BitMatrix {
            rows,
            cols,
            wpr,
            words: vec![0; rows * wpr],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds from a flat row-major slice of 0/1 values.
    pub fn from_bits(rows: usize, cols: usize, bits: &[u8]) -> Self {
        assert_eq!(bits.len(), rows * cols);
        let mut m = BitMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if bits[r * cols + c] != 0 {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    pub fn from_rows(rows: &[BitVector]) -> Self {
        let cols = rows.first().map_or(0, BitVector::len);
        let mut m = BitMatrix::zeros(rows.len(), cols);
        for (r, v) in rows.iter().enumerate() {
            assert_eq!(v.len(), cols);
            m.row_words_mut(r).copy_from_slice(v.words());
        }
        m
    }

    /// Samples every entry independently as Bernoulli(1/2).
    ///
    /// Fills row by row, one word draw per packed word, so the result is a
    /// pure function of the generator state.
    pub fn random(rows: usize, cols: usize, rng: &mut dyn RngCore) -> Self {
        let wpr = words_for(cols);
        let mask = tail_mask(cols);
        let mut words = Vec::with_capacity(rows * wpr);
        for _ in 0..rows {
            for w in 0..wpr {
                let mut x = rng.next_u64();
                if w == wpr - 1 {
                    x &= mask;
                }
                words.push(x);
            }
        }
        BitMatrix {
            rows,
            cols,
            wpr,
            words,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.words[r * self.wpr + (c >> 6)] >> (c & 63)) & 1 != 0
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let mask = 1u64 << (c & 63);
        let w = &mut self.words[r * self.wpr + (c >> 6)];
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    fn row_words(&self, r: usize) -> &[u64] {
        &self.words[r * self.wpr..(r + 1) * self.wpr]
    }

    #[inline]
    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.words[r * self.wpr..(r + 1) * self.wpr]
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector {
            len: self.cols,
            words: self.row_words(r).to_vec(),
        }
    }

    pub fn set_row(&mut self, r: usize, v: &BitVector) {
        assert_eq!(v.len(), self.cols);
        self.row_words_mut(r).copy_from_slice(v.words());
    }

    fn xor_rows(&mut self, target: usize, source: usize) {
        debug_assert_ne!(target, source);
        let (t, s) = (target * self.wpr, source * self.wpr);
        for k in 0..self.wpr {
            let x = self.words[s + k];
            self.words[t + k] ^= x;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (a0, b0) = (a * self.wpr, b * self.wpr);
        for k in 0..self.wpr {
            self.words.swap(a0 + k, b0 + k);
        }
    }

    /// Matrix-vector product over GF(2).
    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        assert_eq!(self.cols, v.len(), "dimension mismatch in mul_vec");
        let mut out = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            let mut acc = 0u32;
            for (a, b) in self.row_words(r).iter().zip(v.words()) {
                acc ^= (a & b).count_ones();
            }
            if acc & 1 != 0 {
                out.set(r, true);
            }
        }
        out
    }

    /// Matrix-matrix product over GF(2).
    pub fn mul_mat(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul_mat");
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let mut acc = vec![0u64; other.wpr];
            for c in 0..self.cols {
                if self.get(r, c) {
                    for (a, b) in acc.iter_mut().zip(other.row_words(c)) {
                        *a ^= b;
                    }
                }
            }
            out.row_words_mut(r).copy_from_slice(&acc);
        }
        out
    }

    /// Copies the given rows, in order, into a new matrix.
    pub fn select_rows(&self, indices: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(indices.len(), self.cols);
        for (i, &r) in indices.iter().enumerate() {
            assert!(r < self.rows);
            let src = r * self.wpr;
            let dst = i * out.wpr;
            out.words[dst..dst + self.wpr].copy_from_slice(&self.words[src..src + self.wpr]);
        }
        out
    }

    /// Stacks `self` on top of `other` (column counts must match).
    pub fn vstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.cols);
        let mut out = BitMatrix::zeros(self.rows + other.rows, self.cols);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        out.words[self.words.len()..].copy_from_slice(&other.words);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{}", self.get(r, c) as u8)?;
            }
            if r + 1 < self.rows {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// Result of reducing a matrix to reduced row echelon form.
pub struct RowReduction {
    pub reduced: BitMatrix,
    /// Pivot column of each pivot row, strictly increasing; its length is the rank.
    pub pivot_cols: Vec<usize>,
}

impl RowReduction {
    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }
}

/// Reduces to reduced row echelon form with partial pivoting by column order.
pub fn row_reduce(m: &BitMatrix) -> RowReduction {
    let mut a = m.clone();
    let mut pivot_cols = Vec::new();
    let mut next_row = 0;
    for col in 0..a.cols {
        if next_row == a.rows {
            break;
        }
        let Some(pivot) = (next_row..a.rows).find(|&r| a.get(r, col)) else {
            continue;
        };
        a.swap_rows(next_row, pivot);
        for r in 0..a.rows {
            if r != next_row && a.get(r, col) {
                a.xor_rows(r, next_row);
            }
        }
        pivot_cols.push(col);
        next_row += 1;
    }
    RowReduction {
        reduced: a,
        pivot_cols,
    }
}

pub fn rank(m: &BitMatrix) -> usize {
    row_reduce(m).rank()
}

/// Returns an `n x k` matrix whose columns are the first `k` vectors of the
/// canonical null-space basis of `a` (free columns taken in increasing order,
/// one basis vector per free column).
///
/// Every column `b` satisfies `a * b = 0` and the columns are linearly
/// independent. Errors if the null space has dimension below `k`.
pub fn null_space_complement(a: &BitMatrix, k: usize) -> Result<BitMatrix, Error> {
    let rr = row_reduce(a);
    let n = a.cols();
    let nullity = n - rr.rank();
    if k > nullity {
        return Err(Error::RankShortfall {
            needed: k,
            available: nullity,
        });
    }
    let mut is_pivot = vec![false; n];
    for &p in &rr.pivot_cols {
        is_pivot[p] = true;
    }
    let mut out = BitMatrix::zeros(n, k);
    let mut j = 0;
    for f in 0..n {
        if is_pivot[f] {
            continue;
        }
        if j == k {
            break;
        }
        out.set(f, j, true);
        for (row, &p) in rr.pivot_cols.iter().enumerate() {
            if rr.reduced.get(row, f) {
                out.set(p, j, true);
            }
        }
        j += 1;
    }
    Ok(out)
}

/// Outcome of solving a linear system that may be under- or over-determined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Unique(BitVector),
    NonUnique,
    Inconsistent,
}

/// Solves `a[rows] * x = y` where `a[rows]` is the submatrix of `a` restricted
/// to the given row indices and `y` holds the corresponding entries in the
/// same order.
pub fn solve_restricted(a: &BitMatrix, rows: &[usize], y: &BitVector) -> SolveOutcome {
    assert_eq!(rows.len(), y.len(), "row selection and rhs length differ");
    let sub = a.select_rows(rows);
    match solve_affine(&sub, y) {
        None => SolveOutcome::Inconsistent,
        Some(set) if set.basis.is_empty() => SolveOutcome::Unique(set.particular),
        Some(_) => SolveOutcome::NonUnique,
    }
}

/// The affine solution set of a consistent linear system: `particular` plus
/// the span of `basis`.
pub struct AffineSet {
    pub particular: BitVector,
    pub basis: Vec<BitVector>,
}

impl AffineSet {
    /// log2 of the number of solutions.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Visits every solution in Gray-code order, starting from `particular`.
    /// Stops early when the callback returns `false`.
    pub fn for_each(&self, mut f: impl FnMut(&BitVector) -> bool) {
        let mut x = self.particular.clone();
        if !f(&x) {
            return;
        }
        let count: u64 = 1u64 << self.basis.len();
        for i in 1..count {
            x.xor_assign(&self.basis[i.trailing_zeros() as usize]);
            if !f(&x) {
                return;
            }
        }
    }
}

/// Solves `a * x = y`, returning the full affine solution set, or `None` if
/// the system is inconsistent. The basis is the canonical null-space basis.
pub fn solve_affine(a: &BitMatrix, y: &BitVector) -> Option<AffineSet> {
    assert_eq!(a.rows(), y.len(), "dimension mismatch in solve_affine");
    let n = a.cols();
    // Augment y as an extra column and reduce once.
    let mut aug = BitMatrix::zeros(a.rows(), n + 1);
    for r in 0..a.rows() {
        aug.row_words_mut(r)[..a.wpr].copy_from_slice(a.row_words(r));
        if y.get(r) {
            aug.set(r, n, true);
        }
    }
    let rr = row_reduce(&aug);
    if rr.pivot_cols.last() == Some(&n) {
        return None;
    }
    let mut particular = BitVector::zeros(n);
    for (row, &p) in rr.pivot_cols.iter().enumerate() {
        if rr.reduced.get(row, n) {
            particular.set(p, true);
        }
    }
    let mut is_pivot = vec![false; n];
    for &p in &rr.pivot_cols {
        is_pivot[p] = true;
    }
    let mut basis = Vec::with_capacity(n - rr.rank());
    for f in 0..n {
        if is_pivot[f] {
            continue;
        }
        let mut v = BitVector::zeros(n);
        v.set(f, true);
        for (row, &p) in rr.pivot_cols.iter().enumerate() {
            if rr.reduced.get(row, f) {
                v.set(p, true);
            }
        }
        basis.push(v);
    }
    Some(AffineSet { particular, basis })
}
