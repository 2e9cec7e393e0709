//! Square matrices over GF(2) with rows packed into machine words.
//!
//! Entry `(r, c)` lives in bit `c` of row word `r`, so row additions are a
//! single XOR. Dimensions up to 64 are supported.
//!
//! Bit vectors of length `q` are stored the same way: component `k` is bit
//! `k` of a `u64`. A computational basis index `i` of a `q`-qubit register
//! maps to the bit vector whose component `k` is the state of qubit `k`, with
//! qubit 0 the most significant bit of `i` (see [`basis_to_bits`]).

use std::fmt;
use std::str::FromStr;

use crate::error::{QuperError, Result};

pub const MAX_DIM: usize = 64;

/// Bit vector of the basis state `index` on `q` qubits (qubit 0 = MSB).
pub fn basis_to_bits(index: usize, q: usize) -> u64 {
    let mut bits = 0u64;
    for k in 0..q {
        if (index >> (q - 1 - k)) & 1 == 1 {
            bits |= 1 << k;
        }
    }
    bits
}

/// Inverse of [`basis_to_bits`].
pub fn bits_to_basis(bits: u64, q: usize) -> usize {
    let mut index = 0usize;
    for k in 0..q {
        if (bits >> k) & 1 == 1 {
            index |= 1 << (q - 1 - k);
        }
    }
    index
}

#[inline]
fn parity(x: u64) -> bool {
    x.count_ones() & 1 == 1
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    q: usize,
    rows: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(q: usize) -> Self {
        assert!(q <= MAX_DIM, "GF(2) matrices are limited to {MAX_DIM} rows");
        Gf2Matrix { q, rows: vec![0; q] }
    }

    pub fn identity(q: usize) -> Self {
        let mut m = Self::zeros(q);
        for i in 0..q {
            m.rows[i] = 1 << i;
        }
        m
    }

    /// Builds a matrix from packed row words; bits at or above `q` must be clear.
    pub fn from_rows(rows: Vec<u64>) -> Result<Self> {
        let q = rows.len();
        if q > MAX_DIM {
            return Err(QuperError::IndexOutOfRange { index: q, dim: MAX_DIM });
        }
        let mask = row_mask(q);
        if rows.iter().any(|r| r & !mask != 0) {
            return Err(QuperError::InvalidArgument(
                "row word has bits beyond the matrix dimension".into(),
            ));
        }
        Ok(Gf2Matrix { q, rows })
    }

    /// Builds a matrix from nested 0/1 rows.
    pub fn from_bits<R: AsRef<[u8]>>(bits: &[R]) -> Result<Self> {
        let q = bits.len();
        let mut m = Self::zeros(q);
        for (r, row) in bits.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != q {
                return Err(QuperError::SizeMismatch { expected: q, got: row.len() });
            }
            for (c, &b) in row.iter().enumerate() {
                match b {
                    0 => {}
                    1 => m.rows[r] |= 1 << c,
                    _ => return Err(QuperError::InvalidArgument(format!("entry {b} is not a bit"))),
                }
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.q
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.rows[r] >> c) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        if value {
            self.rows[r] |= 1 << c;
        } else {
            self.rows[r] &= !(1 << c);
        }
    }

    /// `row[dst] ^= row[src]`, i.e. left multiplication by `I + E_(dst, src)`.
    pub fn add_row(&mut self, src: usize, dst: usize) {
        let s = self.rows[src];
        self.rows[dst] ^= s;
    }

    /// `col[dst] ^= col[src]`, i.e. right multiplication by `I + E_(src, dst)`.
    pub fn add_col(&mut self, src: usize, dst: usize) {
        for row in &mut self.rows {
            if (*row >> src) & 1 == 1 {
                *row ^= 1 << dst;
            }
        }
    }

    pub fn mul(&self, rhs: &Gf2Matrix) -> Gf2Matrix {
        assert_eq!(self.q, rhs.q, "dimension mismatch");
        let rows = self
            .rows
            .iter()
            .map(|&row| {
                let mut acc = 0u64;
                let mut bits = row;
                while bits != 0 {
                    let k = bits.trailing_zeros() as usize;
                    acc ^= rhs.rows[k];
                    bits &= bits - 1;
                }
                acc
            })
            .collect();
        Gf2Matrix { q: self.q, rows }
    }

    /// Matrix-vector product on a packed bit vector.
    pub fn apply(&self, x: u64) -> u64 {
        let mut y = 0u64;
        for (r, &row) in self.rows.iter().enumerate() {
            if parity(row & x) {
                y |= 1 << r;
            }
        }
        y
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut t = Self::zeros(self.q);
        for r in 0..self.q {
            for c in 0..self.q {
                if self.get(r, c) {
                    t.rows[c] |= 1 << r;
                }
            }
        }
        t
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.q {
            let Some(p) = (rank..self.q).find(|&r| (rows[r] >> col) & 1 == 1) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && (*row >> col) & 1 == 1 {
                    *row ^= pivot;
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.q
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Gf2Matrix> {
        let q = self.q;
        let mut a = self.rows.clone();
        let mut inv = Self::identity(q).rows;
        for col in 0..q {
            let p = (col..q).find(|&r| (a[r] >> col) & 1 == 1).ok_or(QuperError::Singular)?;
            a.swap(col, p);
            inv.swap(col, p);
            for r in 0..q {
                if r != col && (a[r] >> col) & 1 == 1 {
                    a[r] ^= a[col];
                    inv[r] ^= inv[col];
                }
            }
        }
        Ok(Gf2Matrix { q, rows: inv })
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.rows.iter().enumerate().all(|(r, &row)| row & ((1u64 << r) - 1) == 0)
    }

    /// Member of the Borel subgroup: upper triangular with all-ones diagonal.
    pub fn is_unit_upper_triangular(&self) -> bool {
        self.is_upper_triangular() && (0..self.q).all(|i| self.get(i, i))
    }

    /// Returns the permutation `w` with `self = matrix(w)` if this is a
    /// permutation matrix (column `i` has its single one in row `w(i)`).
    pub fn as_permutation_map(&self) -> Option<Vec<usize>> {
        let q = self.q;
        if self.rows.iter().any(|r| r.count_ones() != 1) {
            return None;
        }
        let mut map = vec![usize::MAX; q];
        for (r, &row) in self.rows.iter().enumerate() {
            let c = row.trailing_zeros() as usize;
            if map[c] != usize::MAX {
                return None;
            }
            map[c] = r;
        }
        Some(map)
    }

    /// Every `q x q` binary matrix, in increasing order of the packed entries.
    /// Only sensible for `q <= 4`.
    pub fn enumerate_all(q: usize) -> impl Iterator<Item = Gf2Matrix> {
        assert!(q * q < 32, "enumeration only supported for tiny dimensions");
        let row_mask = row_mask(q);
        (0u64..1 << (q * q)).map(move |code| {
            let rows = (0..q).map(|r| (code >> (r * q)) & row_mask).collect();
            Gf2Matrix { q, rows }
        })
    }
}

fn row_mask(q: usize) -> u64 {
    if q == 64 {
        u64::MAX
    } else {
        (1u64 << q) - 1
    }
}

impl fmt::Display for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.q {
            if r > 0 {
                writeln!(f)?;
            }
            for c in 0..self.q {
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.to_string().lines().map(str::to_owned).collect();
        write!(f, "Gf2Matrix[{}]", rows.join(" "))
    }
}

/// Parses whitespace-separated rows of `0`/`1` characters.
impl FromStr for Gf2Matrix {
    type Err = QuperError;

    fn from_str(s: &str) -> Result<Self> {
        let rows: Vec<Vec<u8>> = s
            .split_whitespace()
            .map(|tok| {
                tok.chars()
                    .map(|ch| match ch {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        other => Err(QuperError::Parse(format!("unexpected character {other:?} in matrix row"))),
                    })
                    .collect::<Result<Vec<u8>>>()
            })
            .collect::<Result<_>>()?;
        if rows.is_empty() {
            return Err(QuperError::Parse("empty matrix".into()));
        }
        Gf2Matrix::from_bits(&rows).map_err(|e| QuperError::Parse(e.to_string()))
    }
}
