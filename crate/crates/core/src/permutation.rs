//! Permutations of `{0, .., n-1}` in one-line notation.
//!
//! `map[i]` is the image of `i`. The associated permutation matrix `P` sends
//! basis vector `e_i` to `e_{map[i]}`, so `P[map[i]][i] = 1`. With this
//! convention the matrix of `p.compose(&r)` is `matrix(p) * matrix(r)`, and a
//! circuit sending basis state `|i>` to `|map[i]>` has exactly this matrix.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QuperError, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { map: (0..n).collect() }
    }

    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n || seen[v] {
                return Err(QuperError::InvalidPermutation(format!("{map:?} is not a bijection")));
            }
            seen[v] = true;
        }
        Ok(Permutation { map })
    }

    /// The order-reversing permutation `i -> n-1-i`.
    pub fn reversal(n: usize) -> Self {
        Permutation { map: (0..n).rev().collect() }
    }

    /// Transposition of `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(a, b);
        Permutation { map }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.shuffle(rng);
        Permutation { map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// `(self ∘ other)(i) = self(other(i))`: `other` acts first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len(), "permutation sizes differ");
        Permutation { map: other.map.iter().map(|&i| self.map[i]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { map: inv }
    }

    /// Number of pairs `i < j` with `map[i] > map[j]`.
    pub fn inversions(&self) -> usize {
        let n = self.len();
        (0..n).map(|i| (i + 1..n).filter(|&j| self.map[i] > self.map[j]).count()).sum()
    }

    /// Dense 0/1 matrix, row-major, with `P[map[i]][i] = 1`.
    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut m = vec![vec![0.0; n]; n];
        for (i, &v) in self.map.iter().enumerate() {
            m[v][i] = 1.0;
        }
        m
    }

    /// Lexicographic successor, or `None` for the last permutation.
    pub fn next_lexicographic(&self) -> Option<Permutation> {
        let mut a = self.map.clone();
        let n = a.len();
        if n < 2 {
            return None;
        }
        let mut i = n - 1;
        while i > 0 && a[i - 1] >= a[i] {
            i -= 1;
        }
        if i == 0 {
            return None;
        }
        let mut j = n - 1;
        while a[j] <= a[i - 1] {
            j -= 1;
        }
        a.swap(i - 1, j);
        a[i..].reverse();
        Some(Permutation { map: a })
    }

    /// All `n!` permutations in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        std::iter::successors(Some(Permutation::identity(n)), Permutation::next_lexicographic)
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = QuperError;
    fn try_from(map: Vec<usize>) -> Result<Self> {
        Permutation::new(map)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.map
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.map.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

/// Space-separated one-line notation, 0-based.
impl FromStr for Permutation {
    type Err = QuperError;
    fn from_str(s: &str) -> Result<Self> {
        let map = s
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| QuperError::Parse(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(map)
    }
}
