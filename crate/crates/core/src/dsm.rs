//! Doubly-stochastic matrices read out of an ancilla-extended circuit.
//!
//! A job runs a circuit on `m + q` qubits whose `m` most-significant qubits
//! are ancillas. Entangling each qubit with a partner register, applying the
//! circuit and measuring the `2q` system qubits yields
//!
//! ```text
//! p_ij = 2^{-m} * sum_{a,b} |U[(b,i),(a,j)]|^2
//! ```
//!
//! where `(a, j)` indexes ancilla state `a` and system state `j`. The matrix
//! is doubly stochastic for every unitary. [`extract_dsm`] evaluates the sum
//! directly from unitary columns; [`statevector_oracle`] simulates the full
//! doubled register and is kept as a cross-check.
//!
//! With this indexing a permutation circuit at `m = 0` produces exactly the
//! matrix of [`Permutation::to_matrix`].

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::unitary::{self, check_guard, C64};
use crate::circuit::{eval_permutation, Circuit};
use crate::error::{QuperError, Result};
use crate::permutation::Permutation;

pub const STOCHASTIC_TOL: f64 = 1e-9;
pub const DEFAULT_BIRKHOFF_TOL: f64 = 1e-8;

/// Square real matrix, row-major. Double stochasticity is checked on demand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dsm {
    n: usize,
    entries: Vec<f64>,
}

impl Dsm {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(QuperError::SizeMismatch { expected: n * n, got: entries.len() });
        }
        if let Some(i) = entries.iter().position(|x| !x.is_finite()) {
            return Err(QuperError::NonFinite(i));
        }
        Ok(Dsm { n, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(QuperError::SizeMismatch { expected: n, got: r.len() });
        }
        Dsm::new(n, rows.concat())
    }

    /// `d[p(j)][j] = 1`.
    pub fn from_permutation(p: &Permutation) -> Self {
        let n = p.len();
        let mut entries = vec![0.0; n * n];
        for j in 0..n {
            entries[p.apply(j) * n + j] = 1.0;
        }
        Dsm { n, entries }
    }

    pub fn uniform(n: usize) -> Self {
        Dsm { n, entries: vec![1.0 / n as f64; n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.entries.chunks(self.n).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.n).map(|j| (0..self.n).map(|i| self.get(i, j)).sum()).collect()
    }

    /// Largest deviation of a row or column sum from 1.
    pub fn stochastic_defect(&self) -> f64 {
        self.row_sums().into_iter().chain(self.col_sums()).map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn is_doubly_stochastic(&self, tol: f64) -> bool {
        self.stochastic_defect() <= tol && self.entries.iter().all(|&x| (-1e-12..=1.0 + tol).contains(&x))
    }

    /// The permutation this matrix equals exactly, if any.
    pub fn as_permutation(&self) -> Option<Permutation> {
        let n = self.n;
        let mut map = vec![usize::MAX; n];
        for j in 0..n {
            for i in 0..n {
                match self.get(i, j) {
                    x if x == 1.0 && map[j] == usize::MAX => map[j] = i,
                    x if x == 0.0 => {}
                    _ => return None,
                }
            }
        }
        Permutation::new(map).ok()
    }

    pub fn max_abs_diff(&self, other: &Dsm) -> f64 {
        assert_eq!(self.n, other.n);
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Row-major CSV with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.entries.chunks(self.n) {
            let line: Vec<String> = row.iter().map(|&x| format_g17(x)).collect();
            writeln!(out, "{}", line.join(",")).unwrap();
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split(',')
                    .map(|t| t.trim().parse::<f64>().map_err(|e| QuperError::Parse(format!("{t:?}: {e}"))))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Dsm::from_rows(&rows).map_err(|e| QuperError::Parse(e.to_string()))
    }
}

/// C's `%.17g`.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let strip = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..17).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip(mantissa), exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        strip(&format!("{x:.decimals$}"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DsmJob {
    pub circuit: Circuit,
    pub m: usize,
    pub theta: Vec<f64>,
}

impl DsmJob {
    pub fn new(circuit: Circuit, m: usize, theta: Vec<f64>) -> Result<Self> {
        if m >= circuit.q() {
            return Err(QuperError::InvalidArgument(format!(
                "{m} ancillas leave no system qubit in a {}-qubit circuit",
                circuit.q()
            )));
        }
        circuit.check_theta(&theta)?;
        Ok(DsmJob { circuit, m, theta })
    }

    pub fn system_qubits(&self) -> usize {
        self.circuit.q() - self.m
    }

    pub fn n(&self) -> usize {
        1 << self.system_qubits()
    }
}

/// Closed-form readout from the columns of `U`, one statevector run per column.
pub fn extract_dsm(job: &DsmJob) -> Result<Dsm> {
    job.circuit.check_theta(&job.theta)?;
    let (m, q) = (job.m, job.system_qubits());
    check_guard(q + 2 * m)?;
    let total = job.circuit.q();
    let n = 1usize << q;
    let prims = unitary::compile(&job.circuit, &job.theta);
    let scale = 1.0 / (1u64 << m) as f64;
    // column j of the result, summed over ancilla inputs a
    let cols: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut col = vec![0.0; n];
            for a in 0..1usize << m {
                let psi = unitary::unitary_column(total, &prims, (a << q) | j);
                for (row, amp) in psi.iter().enumerate() {
                    col[row & (n - 1)] += amp.norm_sqr();
                }
            }
            col.iter_mut().for_each(|x| *x *= scale);
            col
        })
        .collect();
    let mut entries = vec![0.0; n * n];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            entries[i * n + j] = col[i];
        }
    }
    Dsm::new(n, entries)
}

fn apply_h(state: &mut [C64], mask: usize) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..state.len() {
        if i & mask == 0 {
            let (a, b) = (state[i], state[i | mask]);
            state[i] = (a + b) * h;
            state[i | mask] = (a - b) * h;
        }
    }
}

fn apply_cx(state: &mut [C64], cmask: usize, tmask: usize) {
    for i in 0..state.len() {
        if i & cmask != 0 && i & tmask == 0 {
            state.swap(i, i | tmask);
        }
    }
}

/// Literal simulation of the doubled register.
///
/// Register 1 holds qubits `0..T`, register 2 qubits `T..2T` with
/// `T = m + q`. Each qubit `k` of register 1 is paired with qubit `T + k`
/// by a Hadamard and a `cx`; the circuit unitary (built by Kronecker
/// products, not by the statevector kernel) then acts on register 1, and the
/// joint distribution of the two system registers is scaled by `n`.
pub fn statevector_oracle(job: &DsmJob) -> Result<Dsm> {
    let t = job.circuit.q();
    let q = job.system_qubits();
    check_guard(2 * t)?;
    let u = unitary::dense::eval_unitary_dense(&job.circuit, &job.theta)?;
    let total = 2 * t;
    let dim = 1usize << total;
    let bit = |k: usize| 1usize << (total - 1 - k);
    let mut state = vec![C64::new(0.0, 0.0); dim];
    state[0] = C64::new(1.0, 0.0);
    for k in 0..t {
        apply_h(&mut state, bit(k));
        apply_cx(&mut state, bit(k), bit(t + k));
    }
    // register-1 index is the high half of the full index
    let half = 1usize << t;
    let mut evolved = vec![C64::new(0.0, 0.0); dim];
    for r2 in 0..half {
        for y in 0..half {
            let mut acc = C64::new(0.0, 0.0);
            for x in 0..half {
                acc += u[(y, x)] * state[(x << t) | r2];
            }
            evolved[(y << t) | r2] = acc;
        }
    }
    let n = 1usize << q;
    let mut entries = vec![0.0; n * n];
    for (idx, amp) in evolved.iter().enumerate() {
        let (r1, r2) = (idx >> t, idx & (half - 1));
        let (i, j) = (r1 & (n - 1), r2 & (n - 1));
        entries[i * n + j] += amp.norm_sqr();
    }
    entries.iter_mut().for_each(|x| *x *= n as f64);
    Dsm::new(n, entries)
}

/// DSM of a circuit at binary parameters, from its basis permutation alone.
pub fn binary_dsm(circuit: &Circuit, m: usize, theta: &[f64]) -> Result<Dsm> {
    let total = circuit.q();
    if m >= total {
        return Err(QuperError::InvalidArgument("no system qubits left".into()));
    }
    let q = total - m;
    let n = 1usize << q;
    let p = eval_permutation(circuit, theta)?;
    let w = 1.0 / (1u64 << m) as f64;
    let mut entries = vec![0.0; n * n];
    for a in 0..1usize << m {
        for j in 0..n {
            let i = p.apply((a << q) | j) & (n - 1);
            entries[i * n + j] += w;
        }
    }
    Dsm::new(n, entries)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffTerm {
    pub lambda: f64,
    pub permutation: Permutation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffDecomposition {
    pub terms: Vec<BirkhoffTerm>,
    /// `max |d - sum lambda_i P_i|` entrywise.
    pub residual: f64,
}

impl BirkhoffDecomposition {
    pub fn total_weight(&self) -> f64 {
        self.terms.iter().map(|t| t.lambda).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.terms).expect("terms serialize")
    }
}

/// Perfect matching of columns to rows over entries `>= threshold`, found
/// by augmenting paths. Column `j` tries rows in the order `j ^ 0, j ^ 1, ..`.
fn perfect_matching(res: &[f64], n: usize, threshold: f64) -> Option<Vec<usize>> {
    fn augment(
        j: usize,
        res: &[f64],
        n: usize,
        threshold: f64,
        seen: &mut [bool],
        row_of_col: &mut [usize],
        col_of_row: &mut [usize],
    ) -> bool {
        for t in 0..n.next_power_of_two() {
            let i = j ^ t;
            if i >= n || seen[i] || res[i * n + j] < threshold {
                continue;
            }
            seen[i] = true;
            if col_of_row[i] == usize::MAX
                || augment(col_of_row[i], res, n, threshold, seen, row_of_col, col_of_row)
            {
                col_of_row[i] = j;
                row_of_col[j] = i;
                return true;
            }
        }
        false
    }
    let mut row_of_col = vec![usize::MAX; n];
    let mut col_of_row = vec![usize::MAX; n];
    for j in 0..n {
        let mut seen = vec![false; n];
        if !augment(j, res, n, threshold, &mut seen, &mut row_of_col, &mut col_of_row) {
            return None;
        }
    }
    Some(row_of_col)
}

/// Matching whose smallest used entry is as large as possible.
fn bottleneck_matching(res: &[f64], n: usize, tol: f64) -> Option<Vec<usize>> {
    let mut values: Vec<f64> = res.iter().copied().filter(|&x| x > tol).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let mut best = perfect_matching(res, n, *values.first()?)?;
    let (mut lo, mut hi) = (0usize, values.len() - 1);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        match perfect_matching(res, n, values[mid]) {
            Some(m) => {
                best = m;
                lo = mid;
            }
            None => hi = mid - 1,
        }
    }
    Some(best)
}

/// Greedy Birkhoff-von Neumann peeling.
pub fn birkhoff_decompose(d: &Dsm, tol: f64) -> Result<BirkhoffDecomposition> {
    let n = d.n();
    let mut res = d.entries().to_vec();
    let mut terms = Vec::new();
    let mut remaining = res.iter().sum::<f64>() / n as f64;
    let max_terms = n * n + 1;
    while remaining > tol {
        if terms.len() >= max_terms {
            return Err(QuperError::NoPerfectMatching);
        }
        let map = bottleneck_matching(&res, n, tol).ok_or(QuperError::NoPerfectMatching)?;
        let lambda = (0..n).map(|j| res[map[j] * n + j]).fold(f64::INFINITY, f64::min);
        for (j, &i) in map.iter().enumerate() {
            res[i * n + j] -= lambda;
        }
        remaining -= lambda;
        terms.push(BirkhoffTerm { lambda, permutation: Permutation::new(map)? });
    }
    let mut recon = vec![0.0; n * n];
    for t in &terms {
        for j in 0..n {
            recon[t.permutation.apply(j) * n + j] += t.lambda;
        }
    }
    let residual = d.entries().iter().zip(&recon).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(BirkhoffDecomposition { terms, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_ansatz, AnsatzKind, Gate};
    use crate::group::{bruhat_span_size, recognize_affine};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;
    use std::f64::consts::PI;

    fn random_theta(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..len).map(|_| rng.gen_range(-PI..PI)).collect()
    }

    fn binary_theta(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..len).map(|_| if rng.gen() { PI } else { 0.0 }).collect()
    }

    #[test]
    fn g17_formatting() {
        assert_eq!(format_g17(0.5), "0.5");
        assert_eq!(format_g17(1.0), "1");
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(format_g17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(format_g17(1e20), "1e+20");
        assert_eq!(format_g17(0.0), "0");
        for x in [0.1, 1.0 / 3.0, 2.5e-300, 123456.789] {
            assert_eq!(format_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_round_trip() {
        let d = Dsm::from_rows(&[vec![0.25, 0.75], vec![0.75, 0.25]]).unwrap();
        assert_eq!(d.to_csv(), "0.25,0.75\n0.75,0.25\n");
        assert_eq!(Dsm::from_csv(&d.to_csv()).unwrap(), d);
        assert!(Dsm::from_csv("1,0\n0").is_err());
    }

    #[test]
    fn m0_binary_matches_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = build_ansatz(AnsatzKind::LX, 3, None).unwrap();
        for _ in 0..20 {
            let theta = binary_theta(c.param_count(), &mut rng);
            let p = eval_permutation(&c, &theta).unwrap();
            let job = DsmJob::new(c.clone(), 0, theta.clone()).unwrap();
            let d = extract_dsm(&job).unwrap();
            assert_eq!(d.as_permutation(), Some(p.clone()));
            assert_eq!(binary_dsm(&c, 0, &theta).unwrap(), Dsm::from_permutation(&p));
        }
    }

    #[test]
    fn m0_is_hadamard_square_of_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = build_ansatz(AnsatzKind::LX, 2, None).unwrap();
        let theta = random_theta(c.param_count(), &mut rng);
        let u = unitary::eval_unitary(&c, &theta).unwrap();
        let d = extract_dsm(&DsmJob::new(c, 0, theta).unwrap()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((d.get(i, j) - u[(i, j)].norm_sqr()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn oracle_agreement_and_stochasticity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (kind, q, m) in [(AnsatzKind::Bruhat, 2, 0), (AnsatzKind::Bruhat, 3, 1), (AnsatzKind::LX, 3, 1), (AnsatzKind::SEL, 4, 2)] {
            let c = build_ansatz(kind, q, None).unwrap();
            for _ in 0..10 {
                let job = DsmJob::new(c.clone(), m, random_theta(c.param_count(), &mut rng)).unwrap();
                let d = extract_dsm(&job).unwrap();
                assert!(d.is_doubly_stochastic(1e-10));
                let o = statevector_oracle(&job).unwrap();
                assert!(d.max_abs_diff(&o) <= 1e-10, "{kind} q={q} m={m}");
            }
        }
    }

    #[test]
    fn oracle_trivial_cases() {
        let id = Circuit::new(2, vec![Gate::Rx { target: 0, slot: 0 }]).unwrap();
        let d = statevector_oracle(&DsmJob::new(id, 0, vec![0.0]).unwrap()).unwrap();
        assert!(d.max_abs_diff(&Dsm::from_permutation(&Permutation::identity(4))) < 1e-12);
        let swap = Circuit::new(2, vec![Gate::Pswap { a: 0, b: 1, slot: 0 }]).unwrap();
        let d = statevector_oracle(&DsmJob::new(swap, 0, vec![PI]).unwrap()).unwrap();
        let expected = Dsm::from_permutation(&"0 2 1 3".parse().unwrap());
        assert!(d.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn binary_dsm_matches_extraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let c = build_ansatz(AnsatzKind::LX, 4, None).unwrap();
        for _ in 0..10 {
            let theta = binary_theta(c.param_count(), &mut rng);
            let a = binary_dsm(&c, 1, &theta).unwrap();
            let b = extract_dsm(&DsmJob::new(c.clone(), 1, theta).unwrap()).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12);
        }
    }

    #[test]
    fn birkhoff_trivial() {
        let p: Permutation = "2 0 1".parse().unwrap();
        let dec = birkhoff_decompose(&Dsm::from_permutation(&p), DEFAULT_BIRKHOFF_TOL).unwrap();
        assert_eq!(dec.terms, vec![BirkhoffTerm { lambda: 1.0, permutation: p }]);
        let half = Dsm::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let dec = birkhoff_decompose(&half, DEFAULT_BIRKHOFF_TOL).unwrap();
        assert_eq!(dec.terms.len(), 2);
        assert!(dec.terms.iter().all(|t| t.lambda == 0.5));
        assert!(dec.residual < 1e-15);
        let bad = Dsm::from_rows(&[vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(birkhoff_decompose(&bad, DEFAULT_BIRKHOFF_TOL), Err(QuperError::NoPerfectMatching));
    }

    #[test]
    fn birkhoff_reconstructs_random_dsms() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c = build_ansatz(AnsatzKind::LX, 3, None).unwrap();
        for _ in 0..20 {
            let d = extract_dsm(&DsmJob::new(c.clone(), 1, random_theta(c.param_count(), &mut rng)).unwrap()).unwrap();
            let dec = birkhoff_decompose(&d, DEFAULT_BIRKHOFF_TOL).unwrap();
            assert!(dec.residual < 1e-7);
            assert!(dec.total_weight() <= 1.0 + 1e-9);
            let distinct: HashSet<_> = dec.terms.iter().map(|t| &t.permutation).collect();
            assert_eq!(distinct.len(), dec.terms.len());
        }
    }

    #[test]
    fn binary_terms_are_affine() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for (q, m) in [(2, 1), (3, 1)] {
            let c = build_ansatz(AnsatzKind::Bruhat, q + m, None).unwrap();
            for _ in 0..100 {
                let d = binary_dsm(&c, m, &binary_theta(c.param_count(), &mut rng)).unwrap();
                let dec = birkhoff_decompose(&d, DEFAULT_BIRKHOFF_TOL).unwrap();
                assert!(dec.terms.len() <= 1 << (3 * m * q));
                for t in &dec.terms {
                    assert!(recognize_affine(&t.permutation).unwrap().is_some(), "{:?}", t.permutation);
                }
            }
        }
    }

    #[test]
    fn binary_census_respects_span_cap() {
        let c = build_ansatz(AnsatzKind::LX, 3, None).unwrap();
        let mut seen = HashSet::new();
        for code in 0u32..1 << c.param_count() {
            let theta: Vec<f64> = (0..c.param_count()).map(|i| if (code >> i) & 1 == 1 { PI } else { 0.0 }).collect();
            let d = binary_dsm(&c, 1, &theta).unwrap();
            seen.insert(d.to_csv());
        }
        assert!(num_bigint::BigUint::from(seen.len()) <= bruhat_span_size(3));
    }
}
