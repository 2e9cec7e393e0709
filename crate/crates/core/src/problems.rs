//! Quadratic assignment and graph isomorphism instances.
//!
//! Costs follow the permutation-matrix convention of the rest of the crate:
//! `P[p(i)][i] = 1`. For QAP that gives
//! `f(P) = tr(W P D^T P^T) = sum_ij W[p(i)][p(j)] D[i][j]`, and for GIP
//! `||A - P B P^T||^2 = sum_ij (A[p(i)][p(j)] - B[i][j])^2`.

use crate::dsm::Dsm;
use crate::group::{log2_exact, AffineMap};
use crate::{Permutation, QuperError, Result};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Something the variational driver can minimize.
pub trait Problem: Sync {
    fn n(&self) -> usize;
    /// Exact objective at a permutation.
    fn cost(&self, p: &Permutation) -> f64;
    /// Objective evaluated at a doubly stochastic relaxation.
    fn relaxed_cost(&self, d: &Dsm) -> f64;
}

fn dense(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

fn dsm_matrix(d: &Dsm) -> DMatrix<f64> {
    DMatrix::from_row_slice(d.n(), d.n(), d.entries())
}

fn check_square(rows: &[Vec<f64>], n: usize, what: &str) -> Result<()> {
    if rows.len() != n {
        return Err(QuperError::SizeMismatch { expected: n, got: rows.len() });
    }
    for r in rows {
        if r.len() != n {
            return Err(QuperError::SizeMismatch { expected: n, got: r.len() });
        }
        if r.iter().any(|x| !x.is_finite()) {
            return Err(QuperError::InvalidArgument(format!("{what} has a non-finite entry")));
        }
    }
    Ok(())
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(QuperError::SizeMismatch { expected, got });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QapInstance {
    pub name: String,
    pub n: usize,
    pub w: Vec<Vec<f64>>,
    pub d: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_optimum: Option<f64>,
}

impl QapInstance {
    pub fn new(name: impl Into<String>, w: Vec<Vec<f64>>, d: Vec<Vec<f64>>) -> Result<Self> {
        let n = w.len();
        if n == 0 {
            return Err(QuperError::InvalidArgument("empty instance".into()));
        }
        check_square(&w, n, "W")?;
        check_square(&d, n, "D")?;
        Ok(QapInstance { name: name.into(), n, w, d, known_optimum: None })
    }

    pub fn qap_cost(&self, p: &Permutation) -> Result<f64> {
        check_len(self.n, p.len())?;
        Ok(self.cost_unchecked(p))
    }

    fn cost_unchecked(&self, p: &Permutation) -> f64 {
        let map = p.map();
        let mut total = 0.0;
        for i in 0..self.n {
            let wi = &self.w[map[i]];
            for j in 0..self.n {
                total += wi[map[j]] * self.d[i][j];
            }
        }
        total
    }

    /// `tr(W X D^T X^T)` for a doubly stochastic `X`.
    pub fn qap_cost_relaxed(&self, x: &Dsm) -> Result<f64> {
        check_len(self.n, x.n())?;
        Ok(self.relaxed_unchecked(x))
    }

    fn relaxed_unchecked(&self, x: &Dsm) -> f64 {
        let x = dsm_matrix(x);
        // (X^T W X)[j][i] pairs with D[j][i]
        let t = x.transpose() * dense(&self.w) * &x;
        t.component_mul(&dense(&self.d)).sum()
    }

    /// `(f - f*) / f*` against the attached optimum.
    pub fn relative_gap(&self, value: f64) -> Option<f64> {
        self.known_optimum.and_then(|opt| relative_gap(value, opt))
    }

    /// Attaches a `.sln` optimum. If the stored permutation does not reach
    /// the stored value with the first matrix as `W`, the roles are swapped.
    pub fn attach_solution(&mut self, sln: &SlnRecord) -> Result<()> {
        if sln.n != self.n {
            return Err(QuperError::Parse(format!("solution is for n = {}, instance has n = {}", sln.n, self.n)));
        }
        let close = |v: f64| (v - sln.optimum).abs() <= 1e-6 * sln.optimum.abs().max(1.0);
        if !close(self.cost_unchecked(&sln.permutation)) {
            std::mem::swap(&mut self.w, &mut self.d);
            if !close(self.cost_unchecked(&sln.permutation)) {
                std::mem::swap(&mut self.w, &mut self.d);
                return Err(QuperError::Parse(format!(
                    "solution value {} is not reached by its permutation in either matrix order",
                    sln.optimum
                )));
            }
        }
        self.known_optimum = Some(sln.optimum);
        Ok(())
    }

    /// QAPLIB text: `n`, then `W` and `D` row by row.
    pub fn to_qaplib(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for m in [&self.w, &self.d] {
            out.push('\n');
            for row in m {
                let cells: Vec<String> = row.iter().map(|&x| format_number(x)).collect();
                out.push_str(&cells.join(" "));
                out.push('\n');
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    /// Exhaustive optimum; only sensible for small `n`.
    pub fn brute_force(&self) -> (Permutation, f64) {
        brute_force(self)
    }
}

impl Problem for QapInstance {
    fn n(&self) -> usize {
        self.n
    }
    fn cost(&self, p: &Permutation) -> f64 {
        self.cost_unchecked(p)
    }
    fn relaxed_cost(&self, d: &Dsm) -> f64 {
        self.relaxed_unchecked(d)
    }
}

fn format_number(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// Minimum over all of `S_n`.
pub fn brute_force<P: Problem + ?Sized>(problem: &P) -> (Permutation, f64) {
    let mut best = (Permutation::identity(problem.n()), f64::INFINITY);
    for p in Permutation::all(problem.n()) {
        let v = problem.cost(&p);
        if v < best.1 {
            best = (p, v);
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlnRecord {
    pub name: String,
    pub n: usize,
    pub optimum: f64,
    pub permutation: Permutation,
}

fn integer_tokens(text: &str) -> Result<Vec<i64>> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().map_err(|_| QuperError::Parse(format!("non-integer token {t:?}"))))
        .collect()
}

fn leading_size(tokens: &[i64]) -> Result<usize> {
    match tokens.first() {
        None => Err(QuperError::Parse("empty input".into())),
        Some(&n) if n <= 0 => Err(QuperError::Parse(format!("size must be positive, got {n}"))),
        Some(&n) => Ok(n as usize),
    }
}

/// Reads a QAPLIB `.dat` file body; the first matrix becomes `W`.
pub fn parse_qaplib(text: &str) -> Result<QapInstance> {
    let tokens = integer_tokens(text)?;
    let n = leading_size(&tokens)?;
    let expected = n.checked_mul(n).and_then(|s| s.checked_mul(2)).map(|s| s + 1);
    if expected != Some(tokens.len()) {
        return Err(QuperError::Parse(format!(
            "expected {} tokens for n = {n}, found {}",
            expected.map_or("too many".to_string(), |e| e.to_string()),
            tokens.len()
        )));
    }
    let matrix = |offset: usize| -> Vec<Vec<f64>> {
        (0..n).map(|i| (0..n).map(|j| tokens[offset + i * n + j] as f64).collect()).collect()
    };
    QapInstance::new("", matrix(1), matrix(1 + n * n))
}

/// Reads a QAPLIB `.sln` body: `n`, the optimum, then a 1-based permutation.
pub fn parse_sln(name: &str, text: &str) -> Result<SlnRecord> {
    let tokens = integer_tokens(text)?;
    let n = leading_size(&tokens)?;
    if tokens.len() != n + 2 {
        return Err(QuperError::Parse(format!("expected {} tokens for n = {n}, found {}", n + 2, tokens.len())));
    }
    let map = tokens[2..]
        .iter()
        .map(|&v| if v >= 1 { Ok(v as usize - 1) } else { Err(QuperError::Parse(format!("bad index {v}"))) })
        .collect::<Result<Vec<_>>>()?;
    let permutation = Permutation::new(map).map_err(|e| QuperError::Parse(e.to_string()))?;
    Ok(SlnRecord { name: name.to_string(), n, optimum: tokens[1] as f64, permutation })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| QuperError::Io(format!("{}: {e}", path.display())))
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Loads `name.dat`, and `name.sln` next to it when present.
pub fn load_qaplib(path: &Path) -> Result<QapInstance> {
    let mut inst = parse_qaplib(&read(path)?)?;
    inst.name = stem(path);
    let sln = path.with_extension("sln");
    if sln.exists() {
        let record = parse_sln(&inst.name, &read(&sln)?)?;
        inst.attach_solution(&record)?;
    }
    Ok(inst)
}

/// Entries i.i.d. uniform on `[0, 10]` from ChaCha8 seeded with `seed`.
pub fn random_qap(n: usize, seed: u64) -> Result<QapInstance> {
    if n < 2 {
        return Err(QuperError::InvalidArgument(format!("random QAP needs n >= 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matrix = || -> Vec<Vec<f64>> { (0..n).map(|_| (0..n).map(|_| rng.gen_range(0.0..=10.0)).collect()).collect() };
    let w = matrix();
    let d = matrix();
    QapInstance::new(format!("random-{n}-{seed}"), w, d)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GipInstance {
    pub n: usize,
    pub a: Vec<Vec<u8>>,
    pub b: Vec<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planted: Option<Permutation>,
}

fn check_adjacency(m: &[Vec<u8>], n: usize) -> Result<()> {
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(QuperError::InvalidArgument(format!("adjacency matrix is not {n}x{n}")));
    }
    for i in 0..n {
        if m[i][i] != 0 {
            return Err(QuperError::InvalidArgument(format!("self loop at vertex {i}")));
        }
        for j in 0..n {
            if m[i][j] > 1 || m[i][j] != m[j][i] {
                return Err(QuperError::InvalidArgument(format!("entry ({i}, {j}) is not symmetric 0/1")));
            }
        }
    }
    Ok(())
}

fn as_real(m: &[Vec<u8>]) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect()
}

impl GipInstance {
    pub fn new(a: Vec<Vec<u8>>, b: Vec<Vec<u8>>) -> Result<Self> {
        let n = a.len();
        if n == 0 {
            return Err(QuperError::InvalidArgument("empty graph".into()));
        }
        check_adjacency(&a, n)?;
        check_adjacency(&b, n)?;
        Ok(GipInstance { n, a, b, planted: None })
    }

    pub fn gip_cost(&self, p: &Permutation) -> Result<f64> {
        check_len(self.n, p.len())?;
        Ok(self.cost_unchecked(p))
    }

    fn cost_unchecked(&self, p: &Permutation) -> f64 {
        let map = p.map();
        let mut mismatches = 0u64;
        for i in 0..self.n {
            for j in 0..self.n {
                mismatches += u64::from(self.a[map[i]][map[j]] != self.b[i][j]);
            }
        }
        mismatches as f64
    }

    /// `||A - X B X^T||^2` for a doubly stochastic `X`.
    pub fn gip_cost_relaxed(&self, x: &Dsm) -> Result<f64> {
        check_len(self.n, x.n())?;
        Ok(self.relaxed_unchecked(x))
    }

    fn relaxed_unchecked(&self, x: &Dsm) -> f64 {
        let x = dsm_matrix(x);
        let diff = dense(&as_real(&self.a)) - &x * dense(&as_real(&self.b)) * x.transpose();
        diff.norm_squared()
    }

    /// `W = A`, `D = -B`.
    pub fn to_qap(&self) -> QapInstance {
        let d = as_real(&self.b).into_iter().map(|r| r.into_iter().map(|x| -x).collect()).collect();
        QapInstance { name: "gip".into(), n: self.n, w: as_real(&self.a), d, known_optimum: None }
    }

    pub fn edge_counts(&self) -> (usize, usize) {
        let count = |m: &[Vec<u8>]| m.iter().flatten().filter(|&&x| x == 1).count() / 2;
        (count(&self.a), count(&self.b))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }
}

impl Problem for GipInstance {
    fn n(&self) -> usize {
        self.n
    }
    fn cost(&self, p: &Permutation) -> f64 {
        self.cost_unchecked(p)
    }
    fn relaxed_cost(&self, d: &Dsm) -> f64 {
        self.relaxed_unchecked(d)
    }
}

pub fn gip_to_qap(inst: &GipInstance) -> QapInstance {
    inst.to_qap()
}

/// `B[i][j] = A[p(i)][p(j)]`, so the planted permutation has cost 0.
pub fn relabel(a: &[Vec<u8>], p: &Permutation) -> Vec<Vec<u8>> {
    let map = p.map();
    (0..a.len()).map(|i| (0..a.len()).map(|j| a[map[i]][map[j]]).collect()).collect()
}

/// Random graph with a planted isomorphic copy. With `span_restricted` the
/// planted permutation is a uniformly random affine map of `F_2^q`.
pub fn random_gip(n: usize, edge_prob: f64, seed: u64, span_restricted: bool) -> Result<GipInstance> {
    if n < 2 {
        return Err(QuperError::InvalidArgument(format!("random GIP needs n >= 2, got {n}")));
    }
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(QuperError::InvalidArgument(format!("edge probability {edge_prob} outside [0, 1]")));
    }
    let q = if span_restricted { Some(log2_exact(n)?) } else { None };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = vec![vec![0u8; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let e = u8::from(rng.gen_bool(edge_prob));
            a[i][j] = e;
            a[j][i] = e;
        }
    }
    let planted = match q {
        Some(q) => AffineMap::random(q, &mut rng).to_permutation(),
        None => Permutation::random(n, &mut rng),
    };
    let b = relabel(&a, &planted);
    Ok(GipInstance { n, a, b, planted: Some(planted) })
}

/// Edge list text: the vertex count, then `u v` pairs (0-based).
pub fn parse_edge_list(text: &str) -> Result<Vec<Vec<u8>>> {
    let tokens = text
        .split_whitespace()
        .filter(|t| !t.starts_with('#'))
        .map(|t| t.parse::<usize>().map_err(|_| QuperError::Parse(format!("bad token {t:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let (&n, rest) = tokens.split_first().ok_or_else(|| QuperError::Parse("empty edge list".into()))?;
    if n == 0 {
        return Err(QuperError::Parse("vertex count must be positive".into()));
    }
    if rest.len() % 2 != 0 {
        return Err(QuperError::Parse("odd number of endpoint tokens".into()));
    }
    let mut a = vec![vec![0u8; n]; n];
    for e in rest.chunks(2) {
        let (u, v) = (e[0], e[1]);
        if u >= n || v >= n {
            return Err(QuperError::Parse(format!("edge ({u}, {v}) out of range for {n} vertices")));
        }
        if u == v {
            return Err(QuperError::Parse(format!("self loop at vertex {u}")));
        }
        a[u][v] = 1;
        a[v][u] = 1;
    }
    Ok(a)
}

/// Adjacency CSV: one row per line, `0`/`1` cells.
pub fn parse_adjacency_csv(text: &str) -> Result<Vec<Vec<u8>>> {
    let rows = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split(',')
                .map(|c| match c.trim() {
                    "0" => Ok(0u8),
                    "1" => Ok(1u8),
                    other => Err(QuperError::Parse(format!("bad adjacency cell {other:?}"))),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    check_adjacency(&rows, rows.len()).map_err(|e| QuperError::Parse(e.to_string()))?;
    Ok(rows)
}

/// Picks the graph parser from the file extension (`.csv` or edge list).
pub fn load_graph(path: &Path) -> Result<Vec<Vec<u8>>> {
    let text = read(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        parse_adjacency_csv(&text)
    } else {
        parse_edge_list(&text)
    }
}

/// `(found - optimum) / optimum`; `None` when the optimum is 0 and missed.
pub fn relative_gap(found: f64, optimum: f64) -> Option<f64> {
    if optimum == 0.0 {
        (found == 0.0).then_some(0.0)
    } else {
        Some((found - optimum) / optimum)
    }
}

/// `(quantum - heuristic) / (n^2 / 2)`.
pub fn normalized_heuristic_gap(quantum: f64, heuristic: f64, n: usize) -> f64 {
    (quantum - heuristic) / ((n * n) as f64 / 2.0)
}
