//! Executable group theory for the permutations reachable with `x` and `cx`
//! gates.
//!
//! The gate groups map onto linear algebra over GF(2): `cx` circuits are
//! `GL_q(F2)`, adding `x` gates gives the affine group `AGL_q(F2)`. Every
//! invertible matrix factors as `u1 * w * u2` with `u1, u2` in the Borel
//! subgroup (upper unitriangular) and `w` a permutation matrix; every Borel
//! element is a subword of one fixed transvection word. Those two facts are
//! what the ansatz circuits are built from.
//!
//! Indices are 0-based throughout. [`Transvection`] prints 1-based.

use std::fmt;

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QuperError, Result};
use crate::gf2::{basis_to_bits, bits_to_basis, Gf2Matrix};
use crate::permutation::Permutation;

/// `T_(jk) = I + E_(jk)`; realized by a `cx` controlled by qubit `k` acting on qubit `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transvection {
    pub j: usize,
    pub k: usize,
}

impl Transvection {
    pub fn new(j: usize, k: usize) -> Result<Self> {
        if j == k {
            return Err(QuperError::InvalidArgument(format!("transvection needs j != k, got ({j}, {k})")));
        }
        Ok(Transvection { j, k })
    }

    /// From the 1-based indices used in printed matrix notation.
    pub fn from_one_based(j: usize, k: usize) -> Result<Self> {
        if j == 0 || k == 0 {
            return Err(QuperError::InvalidArgument("1-based indices start at 1".into()));
        }
        Self::new(j - 1, k - 1)
    }

    pub fn to_matrix(self, q: usize) -> Gf2Matrix {
        let mut m = Gf2Matrix::identity(q);
        m.set(self.j, self.k, true);
        m
    }
}

impl fmt::Display for Transvection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T({},{})", self.j + 1, self.k + 1)
    }
}

/// Left-to-right product of the transvections (the last factor acts first).
pub fn word_to_matrix(word: &[Transvection], q: usize) -> Result<Gf2Matrix> {
    let mut m = Gf2Matrix::identity(q);
    for t in word.iter().rev() {
        for idx in [t.j, t.k] {
            if idx >= q {
                return Err(QuperError::IndexOutOfRange { index: idx, dim: q });
            }
        }
        if t.j == t.k {
            return Err(QuperError::InvalidArgument(format!("degenerate transvection {t}")));
        }
        // T_(jk) * M adds row k of M to row j.
        m.add_row(t.k, t.j);
    }
    Ok(m)
}

/// The universal Borel word: every upper transvection, written in
/// descending lexicographic order so that the rightmost `T_(0,1)` acts first.
pub fn universal_borel_word(q: usize) -> Vec<Transvection> {
    let mut word: Vec<Transvection> =
        (0..q).flat_map(|j| (j + 1..q).map(move |k| Transvection { j, k })).collect();
    word.reverse();
    word
}

/// Subword of the universal Borel word that multiplies out to `a`.
pub fn borel_subword(a: &Gf2Matrix) -> Result<Vec<Transvection>> {
    if !a.is_unit_upper_triangular() {
        return Err(QuperError::NotUnitUpperTriangular);
    }
    Ok(universal_borel_word(a.dim()).into_iter().filter(|t| a.get(t.j, t.k)).collect())
}

/// GF(2) permutation matrix of `w`, with column `i` holding its one in row `w(i)`.
pub fn permutation_matrix(w: &Permutation) -> Gf2Matrix {
    let mut m = Gf2Matrix::zeros(w.len());
    for i in 0..w.len() {
        m.set(w.apply(i), i, true);
    }
    m
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruhatFactors {
    pub u1: Gf2Matrix,
    pub w: Permutation,
    pub u2: Gf2Matrix,
}

impl BruhatFactors {
    pub fn reassemble(&self) -> Gf2Matrix {
        self.u1.mul(&permutation_matrix(&self.w)).mul(&self.u2)
    }
}

/// Factors an invertible matrix as `u1 * matrix(w) * u2`.
///
/// Rows are processed bottom-up. For each row the leftmost remaining one is
/// the pivot; the rest of the row is cleared with rightward column additions
/// and the rest of the pivot column above with upward row additions. Both
/// kinds of operation are multiplications by Borel elements, so when only a
/// permutation matrix is left the accumulated operations invert to `u1, u2`.
pub fn bruhat_decompose(m: &Gf2Matrix) -> Result<BruhatFactors> {
    let q = m.dim();
    let mut work = m.clone();
    let mut left = Gf2Matrix::identity(q);
    let mut right = Gf2Matrix::identity(q);
    let mut used_cols = 0u64;
    for r in (0..q).rev() {
        let free = work.rows()[r] & !used_cols;
        if free == 0 {
            return Err(QuperError::Singular);
        }
        let pivot = free.trailing_zeros() as usize;
        for c in pivot + 1..q {
            if work.get(r, c) {
                work.add_col(pivot, c);
                right.add_col(pivot, c);
            }
        }
        for above in 0..r {
            if work.get(above, pivot) {
                work.add_row(r, above);
                left.add_row(r, above);
            }
        }
        used_cols |= 1 << pivot;
    }
    let map = work.as_permutation_map().ok_or(QuperError::Singular)?;
    Ok(BruhatFactors { u1: left.inverse()?, w: Permutation::new(map)?, u2: right.inverse()? })
}

/// Uniformly random element of `GL_q(F2)` by rejection sampling.
pub fn random_invertible<R: Rng + ?Sized>(q: usize, rng: &mut R) -> Gf2Matrix {
    let mask = if q == 64 { u64::MAX } else { (1u64 << q) - 1 };
    loop {
        let rows = (0..q).map(|_| rng.gen::<u64>() & mask).collect();
        let m = Gf2Matrix::from_rows(rows).expect("masked rows");
        if m.is_invertible() {
            return m;
        }
    }
}

/// `x -> a x + b` on `F_2^q`, acting on basis indices through [`basis_to_bits`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub a: Gf2Matrix,
    pub b: u64,
}

impl AffineMap {
    pub fn new(a: Gf2Matrix, b: u64) -> Result<Self> {
        if !a.is_invertible() {
            return Err(QuperError::Singular);
        }
        Ok(AffineMap { a, b })
    }

    pub fn random<R: Rng + ?Sized>(q: usize, rng: &mut R) -> Self {
        let a = random_invertible(q, rng);
        let b = if q == 0 { 0 } else { rng.gen::<u64>() & ((1u64 << q) - 1) };
        AffineMap { a, b }
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn apply_bits(&self, x: u64) -> u64 {
        self.a.apply(x) ^ self.b
    }

    pub fn apply_index(&self, index: usize) -> usize {
        let q = self.dim();
        bits_to_basis(self.apply_bits(basis_to_bits(index, q)), q)
    }

    pub fn to_permutation(&self) -> Permutation {
        let n = 1usize << self.dim();
        Permutation::new((0..n).map(|i| self.apply_index(i)).collect()).expect("affine maps are bijective")
    }
}

/// `log2(n)` when `n` is a power of two.
pub fn log2_exact(n: usize) -> Result<usize> {
    if n == 0 || !n.is_power_of_two() {
        return Err(QuperError::NotPowerOfTwo(n));
    }
    Ok(n.trailing_zeros() as usize)
}

/// Recovers `(a, b)` with `p(x) = a x + b`, or `None` if `p` is not affine.
pub fn recognize_affine(p: &Permutation) -> Result<Option<AffineMap>> {
    let q = log2_exact(p.len())?;
    let b = basis_to_bits(p.apply(0), q);
    let mut a = Gf2Matrix::zeros(q);
    for i in 0..q {
        let col = basis_to_bits(p.apply(1 << (q - 1 - i)), q) ^ b;
        for r in 0..q {
            a.set(r, i, (col >> r) & 1 == 1);
        }
    }
    if !a.is_invertible() {
        return Ok(None);
    }
    let map = AffineMap { a, b };
    if (0..p.len()).all(|x| map.apply_index(x) == p.apply(x)) {
        Ok(Some(map))
    } else {
        Ok(None)
    }
}

/// `|GL_q(F2)| = prod_{k=0}^{q-1} (2^q - 2^k)`.
pub fn gl_order(q: usize) -> BigUint {
    let full = BigUint::from(1u8) << q;
    (0..q).fold(BigUint::from(1u8), |acc, k| acc * (&full - (BigUint::from(1u8) << k)))
}

/// Number of distinct permutations reachable with `x` and `cx` gates on `q` qubits:
/// `2^{q(q+1)/2} * prod_{k=1}^{q} (2^k - 1)`.
pub fn bruhat_span_size(q: usize) -> BigUint {
    let one = BigUint::from(1u8);
    let mut acc = &one << (q * (q + 1) / 2);
    for k in 1..=q {
        acc *= (&one << k) - &one;
    }
    acc
}

/// `eta[j, k] = |{ l <= j : eta(l) >= k }|`.
fn rank_count(p: &Permutation, j: usize, k: usize) -> usize {
    (0..=j).filter(|&l| p.apply(l) >= k).count()
}

/// Bruhat order on `S_q` via the rank-matrix criterion.
pub fn bruhat_order_leq(eta: &Permutation, rho: &Permutation) -> Result<bool> {
    let q = eta.len();
    if rho.len() != q {
        return Err(QuperError::SizeMismatch { expected: q, got: rho.len() });
    }
    Ok((0..q).all(|j| (0..q).all(|k| rank_count(eta, j, k) <= rank_count(rho, j, k))))
}

/// The adjacent transpositions of the longest Weyl word, in the order a
/// circuit applies them. Entry `i` stands for the swap of positions `i, i+1`.
///
/// For `q = 4` this is `[0, 1, 2, 0, 1, 0]`: passes of decreasing length,
/// each one able to carry any token to the last unfixed position.
pub fn longest_word_sequence(q: usize) -> Vec<usize> {
    (0..q.saturating_sub(1)).flat_map(|pass| 0..q - 1 - pass).collect()
}

/// Which letters of [`longest_word_sequence`] to keep so the kept swaps,
/// applied in order, send the content of position `i` to position `w(i)`.
///
/// Pass `k` moves the token destined for position `q-1-k` up to it. The
/// total number of kept letters is the inversion count of `w`, so the kept
/// letters form a reduced word.
pub fn weyl_subword_mask(w: &Permutation) -> Vec<bool> {
    let q = w.len();
    let target_of = w.map();
    // slot -> token currently there
    let mut slot: Vec<usize> = (0..q).collect();
    let mut mask = Vec::with_capacity(q * q.saturating_sub(1) / 2);
    for pass in 0..q.saturating_sub(1) {
        let last = q - 1 - pass;
        let token = (0..q).find(|&t| target_of[t] == last).expect("bijection");
        let cur = slot.iter().position(|&t| t == token).expect("token placed");
        for i in 0..last {
            let active = i >= cur;
            if active {
                slot.swap(i, i + 1);
            }
            mask.push(active);
        }
    }
    mask
}
