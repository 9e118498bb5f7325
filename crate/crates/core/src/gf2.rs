//! Dense bit-packed linear algebra over GF(2).
//!
//! Vectors are row vectors; a product `v · M` XORs together the rows of `M`
//! selected by the set bits of `v`. All indices are zero-based.

use std::fmt;
use std::io::{BufRead, Write};

use thiserror::Error;

const WORD_BITS: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// Mask selecting the addressable bits of the last word of a `bits`-long row.
fn tail_mask(bits: usize) -> u64 {
    match bits % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("dimension mismatch: {what} ({left} vs {right})")]
    Dimension {
        what: &'static str,
        left: usize,
        right: usize,
    },
    #[error("index {index} out of range for length {len}")]
    Index { index: usize, len: usize },
    #[error("malformed matrix text at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Gf2Error {
    fn from(e: std::io::Error) -> Self {
        Gf2Error::Io(e.to_string())
    }
}

/// A binary vector of fixed length.
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

    pub fn ones(len: usize) -> Self {
        let mut v = BitVector {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        v.clear_tail();
        v
    }

    /// Builds a vector from a slice of 0/1 values; any nonzero entry is a one.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = BitVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector from packed words; bits beyond `len` are discarded.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut v = BitVector { len, words };
        v.clear_tail();
        v
    }

    /// Uniformly random vector.
    pub fn random<R: rand::Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let words = (0..words_for(len)).map(|_| rng.random::<u64>()).collect();
        BitVector::from_words(len, words)
    }

    fn clear_tail(&mut self) {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.len);
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &BitVector) -> Result<(), Gf2Error> {
        if self.len != other.len {
            return Err(Gf2Error::Dimension {
                what: "xor of vectors",
                left: self.len,
                right: other.len,
            });
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector, Gf2Error> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    /// Number of positions where the two vectors differ.
    pub fn distance(&self, other: &BitVector) -> Result<usize, Gf2Error> {
        if self.len != other.len {
            return Err(Gf2Error::Dimension {
                what: "distance of vectors",
                left: self.len,
                right: other.len,
            });
        }
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Indices of the set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD_BITS + b)
                }
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Copy of bits `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> BitVector {
        assert!(start <= end && end <= self.len);
        let mut out = BitVector::zeros(end - start);
        if start % WORD_BITS == 0 {
            let first = start / WORD_BITS;
            let n = out.words.len();
            out.words.copy_from_slice(&self.words[first..first + n]);
            out.clear_tail();
        } else {
            for (j, i) in (start..end).enumerate() {
                if self.get(i) {
                    out.set(j, true);
                }
            }
        }
        out
    }

    /// `[self | other]`.
    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.len + other.len);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    /// Parses a `0`/`1` string.
    pub fn parse(s: &str) -> Result<BitVector, Gf2Error> {
        let mut v = BitVector::zeros(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => v.set(i, true),
                other => {
                    return Err(Gf2Error::Parse {
                        line: 0,
                        reason: format!("unexpected character {other:?}"),
                    })
                }
            }
        }
        Ok(v)
    }

    /// `self · m`.
    pub fn mul_matrix(&self, m: &BitMatrix) -> Result<BitVector, Gf2Error> {
        m.left_mul(self)
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector[{}]({})", self.len, self)
    }
}

/// A dense binary matrix, stored row-major with each row padded to whole words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BitMatrix {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = BitMatrix::zeros(k, k);
        for i in 0..k {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self, Gf2Error> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = BitMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Gf2Error::Dimension {
                    what: "ragged row",
                    left: r.len(),
                    right: cols,
                });
            }
            for (j, &b) in r.iter().enumerate() {
                if b != 0 {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    /// Builds a matrix from its row vectors.
    pub fn from_row_vectors(rows: &[BitVector], cols: usize) -> Result<Self, Gf2Error> {
        let mut m = BitMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Gf2Error::Dimension {
                    what: "row vector length",
                    left: r.len(),
                    right: cols,
                });
            }
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        let idx = r * self.stride + c / WORD_BITS;
        let mask = 1u64 << (c % WORD_BITS);
        if value {
            self.data[idx] |= mask;
        } else {
            self.data[idx] &= !mask;
        }
    }

    #[inline]
    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector::from_words(self.cols, self.row_words(r).to_vec())
    }

    pub fn column(&self, c: usize) -> BitVector {
        let mut v = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    /// row[dst] ^= row[src]
    fn xor_rows(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let s = self.stride;
        let (d, sr) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&mut lo[dst * s..dst * s + s], &hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&mut hi[..s], &lo[src * s..src * s + s])
        };
        for (x, y) in d.iter_mut().zip(sr) {
            *x ^= y;
        }
    }

    /// Row-vector product `v · self`.
    pub fn left_mul(&self, v: &BitVector) -> Result<BitVector, Gf2Error> {
        if v.len() != self.rows {
            return Err(Gf2Error::Dimension {
                what: "vector length vs matrix rows",
                left: v.len(),
                right: self.rows,
            });
        }
        let mut acc = vec![0u64; self.stride];
        for i in v.iter_ones() {
            for (a, b) in acc.iter_mut().zip(self.row_words(i)) {
                *a ^= b;
            }
        }
        Ok(BitVector::from_words(self.cols, acc))
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != other.rows {
            return Err(Gf2Error::Dimension {
                what: "inner dimensions of product",
                left: self.cols,
                right: other.rows,
            });
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let prod = other.left_mul(&self.row(r))?;
            out.row_words_mut(r).copy_from_slice(prod.words());
        }
        Ok(out)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row_ones(r) {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Column indices of the set bits in row `r`.
    pub fn row_ones(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(r).iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD_BITS + b)
                }
            })
        })
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == BitMatrix::identity(self.rows)
    }

    /// Gauss–Jordan inverse. `Ok(None)` when the matrix is singular.
    pub fn invert(&self) -> Result<Option<BitMatrix>, Gf2Error> {
        if self.rows != self.cols {
            return Err(Gf2Error::Dimension {
                what: "inverse of non-square matrix",
                left: self.rows,
                right: self.cols,
            });
        }
        let k = self.rows;
        let mut a = self.clone();
        let mut inv = BitMatrix::identity(k);
        for col in 0..k {
            let Some(pivot) = (col..k).find(|&r| a.get(r, col)) else {
                return Ok(None);
            };
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let wi = col / WORD_BITS;
            let mask = 1u64 << (col % WORD_BITS);
            for r in 0..k {
                if r != col && a.data[r * a.stride + wi] & mask != 0 {
                    a.xor_rows(r, col);
                    inv.xor_rows(r, col);
                }
            }
        }
        Ok(Some(inv))
    }

    /// Row rank over GF(2).
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(pivot) = (rank..self.rows).find(|&r| a.get(r, col)) else {
                continue;
            };
            a.swap_rows(rank, pivot);
            for r in rank + 1..self.rows {
                if a.get(r, col) {
                    a.xor_rows(r, rank);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Hamming weight of column `c`.
    pub fn column_weight(&self, c: usize) -> Result<usize, Gf2Error> {
        if c >= self.cols {
            return Err(Gf2Error::Index {
                index: c,
                len: self.cols,
            });
        }
        Ok((0..self.rows).filter(|&r| self.get(r, c)).count())
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn weight(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Fraction of ones.
    pub fn density(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        self.weight() as f64 / (self.rows * self.cols) as f64
    }

    /// Writes `rows cols` followed by one `0`/`1` line per row.
    pub fn write_text<W: Write>(&self, out: &mut W) -> Result<(), Gf2Error> {
        writeln!(out, "{} {}", self.rows, self.cols)?;
        let mut line = String::with_capacity(self.cols + 1);
        for r in 0..self.rows {
            line.clear();
            for c in 0..self.cols {
                line.push(if self.get(r, c) { '1' } else { '0' });
            }
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    /// Reads one matrix in the text format, consuming exactly `rows + 1` lines.
    /// `first_line` is the 1-based line number of the header, for messages.
    pub fn read_text<R: BufRead>(input: &mut R, first_line: usize) -> Result<Self, Gf2Error> {
        let mut header = String::new();
        if input.read_line(&mut header)? == 0 {
            return Err(Gf2Error::Parse {
                line: first_line,
                reason: "missing `rows cols` header".into(),
            });
        }
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|e| Gf2Error::Parse {
                line: first_line,
                reason: format!("bad header: {e}"),
            })?;
        let [rows, cols] = dims[..] else {
            return Err(Gf2Error::Parse {
                line: first_line,
                reason: "header must be `rows cols`".into(),
            });
        };
        let mut m = BitMatrix::zeros(rows, cols);
        let mut line = String::new();
        for r in 0..rows {
            line.clear();
            let lineno = first_line + 1 + r;
            if input.read_line(&mut line)? == 0 {
                return Err(Gf2Error::Parse {
                    line: lineno,
                    reason: format!("expected {rows} rows, found {r}"),
                });
            }
            let row = line.trim_end_matches(['\n', '\r']);
            if row.len() != cols {
                return Err(Gf2Error::Parse {
                    line: lineno,
                    reason: format!("row has {} bits, expected {cols}", row.len()),
                });
            }
            for (c, ch) in row.bytes().enumerate() {
                match ch {
                    b'0' => {}
                    b'1' => m.set(r, c, true),
                    other => {
                        return Err(Gf2Error::Parse {
                            line: lineno,
                            reason: format!("unexpected character {:?}", other as char),
                        })
                    }
                }
            }
        }
        Ok(m)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows.min(16) {
            writeln!(f, "  {}", self.row(r))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Per-bit reference implementations, independent of the packed paths.
    fn naive_left_mul(v: &[u8], m: &[Vec<u8>]) -> Vec<u8> {
        let cols = m.first().map_or(0, Vec::len);
        (0..cols)
            .map(|j| v.iter().zip(m).fold(0u8, |acc, (&vi, row)| acc ^ (vi & row[j])))
            .collect()
    }

    fn naive_mul(a: &[Vec<u8>], b: &[Vec<u8>]) -> Vec<Vec<u8>> {
        a.iter().map(|row| naive_left_mul(row, b)).collect()
    }

    fn dense(m: &BitMatrix) -> Vec<Vec<u8>> {
        (0..m.rows())
            .map(|r| (0..m.cols()).map(|c| m.get(r, c) as u8).collect())
            .collect()
    }

    fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> BitMatrix {
        let vs: Vec<BitVector> = (0..rows).map(|_| BitVector::random(cols, rng)).collect();
        BitMatrix::from_row_vectors(&vs, cols).unwrap()
    }

    /// Rank via the size of the row span, by enumeration.
    fn span_rank(m: &[Vec<u8>]) -> usize {
        let mut span = std::collections::HashSet::new();
        for mask in 0u32..(1 << m.len()) {
            let v: Vec<u8> = (0..m.len()).map(|i| ((mask >> i) & 1) as u8).collect();
            span.insert(naive_left_mul(&v, m));
        }
        span.len().trailing_zeros() as usize
    }

    #[test]
    fn zero_vector_annihilates() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_matrix(70, 130, &mut rng);
        assert!(m.left_mul(&BitVector::zeros(70)).unwrap().is_zero());
    }

    #[test]
    fn identity_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = BitVector::random(100, &mut rng);
        assert_eq!(BitMatrix::identity(100).left_mul(&v).unwrap(), v);
    }

    #[test]
    fn small_product_by_hand() {
        let m = BitMatrix::from_rows(&[vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let v = BitVector::from_bits(&[1, 1, 0]);
        let out = m.left_mul(&v).unwrap();
        assert_eq!(out.to_bits(), vec![1, 1]);
        assert_eq!(out.to_bits(), naive_left_mul(&[1, 1, 0], &dense(&m)));
    }

    #[test]
    fn product_dimension_mismatch() {
        let m = BitMatrix::identity(4);
        assert!(matches!(
            m.left_mul(&BitVector::zeros(5)),
            Err(Gf2Error::Dimension { .. })
        ));
    }

    #[test]
    fn inverse_examples() {
        let id = BitMatrix::identity(9);
        assert_eq!(id.invert().unwrap().unwrap(), id);
        let m = BitMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(m.invert().unwrap().unwrap(), m);
        assert!(m.mul(&m).unwrap().is_identity());
        let s = BitMatrix::from_rows(&[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(s.invert().unwrap(), None);
        assert!(BitMatrix::zeros(2, 3).invert().is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BitMatrix::zeros(4, 4).rank(), 0);
        assert_eq!(BitMatrix::identity(5).rank(), 5);
        let rows = vec![vec![1, 0], vec![1, 0], vec![0, 1]];
        assert_eq!(BitMatrix::from_rows(&rows).unwrap().rank(), 2);
        assert_eq!(span_rank(&rows), 2);
    }

    #[test]
    fn column_weight_examples() {
        assert_eq!(BitMatrix::identity(6).column_weight(3).unwrap(), 1);
        let ones = BitMatrix::from_rows(&vec![vec![1u8; 5]; 5]).unwrap();
        assert_eq!(ones.column_weight(2).unwrap(), 5);
        let m = BitMatrix::from_rows(&[vec![1, 0], vec![1, 1]]).unwrap();
        assert_eq!(m.column_weight(0).unwrap(), 2);
        assert!(matches!(
            m.column_weight(2),
            Err(Gf2Error::Index { index: 2, len: 2 })
        ));
    }

    /// Every k×k matrix for k ≤ 4: inverse exists iff rank is full, and
    /// double inversion is the identity map.
    #[test]
    fn exhaustive_small_inverses() {
        for k in 1..=4usize {
            let mut invertible = 0usize;
            for code in 0u32..(1 << (k * k)) {
                let rows: Vec<Vec<u8>> = (0..k)
                    .map(|r| (0..k).map(|c| ((code >> (r * k + c)) & 1) as u8).collect())
                    .collect();
                let m = BitMatrix::from_rows(&rows).unwrap();
                let rank = m.rank();
                assert_eq!(rank, span_rank(&rows));
                match m.invert().unwrap() {
                    Some(inv) => {
                        invertible += 1;
                        assert_eq!(rank, k);
                        assert!(m.mul(&inv).unwrap().is_identity());
                        assert!(inv.mul(&m).unwrap().is_identity());
                        assert_eq!(inv.invert().unwrap().unwrap(), m);
                    }
                    None => assert!(rank < k),
                }
            }
            // |GL(k, 2)| = prod_{i<k} (2^k - 2^i)
            let order: usize = (0..k).map(|i| (1usize << k) - (1usize << i)).product();
            assert_eq!(invertible, order);
        }
    }

    #[test]
    fn randomized_large_inverses() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in [64usize, 1576] {
            let inv = loop {
                let m = random_matrix(k, k, &mut rng);
                if let Some(inv) = m.invert().unwrap() {
                    break (m, inv);
                }
            };
            let (m, minv) = inv;
            assert!(m.mul(&minv).unwrap().is_identity());
            assert_eq!(minv.invert().unwrap().unwrap(), m);
        }
    }

    #[test]
    fn text_format_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_matrix(7, 70, &mut rng);
        let mut buf = Vec::new();
        m.write_text(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("7 70\n"));
        let back = BitMatrix::read_text(&mut buf.as_slice(), 1).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn text_format_errors_carry_line_numbers() {
        let bad = b"2 3\n101\n1x1\n";
        match BitMatrix::read_text(&mut &bad[..], 1) {
            Err(Gf2Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let short = b"2 3\n101\n";
        assert!(BitMatrix::read_text(&mut &short[..], 1).is_err());
    }

    #[test]
    fn vector_helpers() {
        let v = BitVector::from_bits(&[1, 0, 1, 1, 0]);
        assert_eq!(v.weight(), 3);
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![0, 2, 3]);
        assert_eq!(v.slice(1, 4).to_bits(), vec![0, 1, 1]);
        assert_eq!(v.concat(&BitVector::ones(2)).to_string(), "1011011");
        assert_eq!(BitVector::parse("10110").unwrap(), v);
        assert_eq!(BitVector::ones(70).weight(), 70);
    }

    proptest! {
        #[test]
        fn packed_product_matches_naive(
            rows in 1usize..20, cols in 1usize..150, seed in any::<u64>()
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(rows, cols, &mut rng);
            let v = BitVector::random(rows, &mut rng);
            let packed = m.left_mul(&v).unwrap().to_bits();
            prop_assert_eq!(packed, naive_left_mul(&v.to_bits(), &dense(&m)));
            let n = random_matrix(cols, 9, &mut rng);
            prop_assert_eq!(dense(&m.mul(&n).unwrap()), naive_mul(&dense(&m), &dense(&n)));
        }

        #[test]
        fn product_distributes_over_xor(
            rows in 1usize..100, cols in 1usize..100, seed in any::<u64>()
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(rows, cols, &mut rng);
            let a = BitVector::random(rows, &mut rng);
            let b = BitVector::random(rows, &mut rng);
            let lhs = m.left_mul(&a.xor(&b).unwrap()).unwrap();
            let rhs = m.left_mul(&a).unwrap().xor(&m.left_mul(&b).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn rank_invariant_under_row_operations(
            rows in 2usize..30, cols in 1usize..80, seed in any::<u64>(),
            a in 0usize..30, b in 0usize..30
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(rows, cols, &mut rng);
            let (a, b) = (a % rows, b % rows);
            let mut swapped = m.clone();
            swapped.swap_rows(a, b);
            prop_assert_eq!(swapped.rank(), m.rank());
            if a != b {
                let mut added = m.clone();
                added.xor_rows(a, b);
                prop_assert_eq!(added.rank(), m.rank());
            }
            prop_assert!(m.rank() <= rows.min(cols));
        }
    }
}
