use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::unitary::dense::{embed_controlled, embed_single, gate_matrix};
use crate::circuit::unitary::{max_abs_diff, pauli_x, Mat2, C64};
use crate::circuit::{binary_affine, build_ansatz, AnsatzKind, Gate};
use crate::dsm::{extract_dsm, statevector_oracle, DsmJob, STOCHASTIC_TOL};
use crate::group::{borel_subword, bruhat_decompose, bruhat_span_size, gl_order, word_to_matrix};
use crate::Gf2Matrix;

use super::census::{run_census, CensusConfig, CensusMode};

const UNITARY_TOL: f64 = 1e-12;

/// Deliberate defects for exercising the failure path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Perturbs the standalone `x` matrix used by the gate identities.
    CorruptX,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub q_max: usize,
    pub deep: bool,
    pub fault: Option<Fault>,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { q_max: 3, deep: false, fault: None, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

/// Counts checks and keeps the first failure.
struct Suite {
    name: &'static str,
    checks: usize,
    failure: Option<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite { name, checks: 0, failure: None }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(describe());
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name.to_string(),
            passed: self.failure.is_none(),
            checks: self.checks,
            counterexample: self.failure,
        }
    }
}

fn x_matrix(fault: Option<Fault>) -> Mat2 {
    let mut x = pauli_x();
    if fault == Some(Fault::CorruptX) {
        x[1][1] = C64::new(1e-3, 0.0);
    }
    x
}

fn cx(control: usize, target: usize, q: usize) -> DMatrix<C64> {
    embed_controlled(&pauli_x(), control, target, q)
}

fn show(m: &DMatrix<C64>) -> String {
    let rows: Vec<String> = m
        .row_iter()
        .map(|r| r.iter().map(|z| format!("{:+.3}{:+.3}i", z.re, z.im)).collect::<Vec<_>>().join(" "))
        .collect();
    rows.join("; ")
}

/// `x` propagation through `cx` on two qubits and the LX relations on three.
fn gate_identities(fault: Option<Fault>) -> SuiteResult {
    let mut s = Suite::new("gate-identities");
    let x = x_matrix(fault);
    let (xc, xt) = (embed_single(&x, 0, 2), embed_single(&x, 1, 2));
    let xx = &xc * &xt;
    let c = cx(0, 1, 2);
    let relations = [
        ("cx (x (x) i) = (x (x) x) cx", &c * &xc, &xx * &c),
        ("cx (i (x) x) = (i (x) x) cx", &c * &xt, &xt * &c),
        ("cx (x (x) x) = (x (x) i) cx", &c * &xx, &xc * &c),
    ];
    for (name, lhs, rhs) in relations {
        let err = max_abs_diff(&lhs, &rhs);
        s.check(err <= UNITARY_TOL, || format!("{name}: deviation {err:e}, lhs = [{}], rhs = [{}]", show(&lhs), show(&rhs)));
    }
    // (x_j cx_jk)^2 = x_k and (x_j cx_kl)^2 = I for j outside {k, l}
    let q = 3;
    let id = DMatrix::<C64>::identity(8, 8);
    for j in 0..q {
        for k in 0..q {
            for l in 0..q {
                if k == l {
                    continue;
                }
                let step = cx(k, l, q) * embed_single(&x, j, q);
                let sq = &step * &step;
                let expected = if j == k {
                    embed_single(&x, l, q)
                } else if j == l {
                    continue;
                } else {
                    id.clone()
                };
                let err = max_abs_diff(&sq, &expected);
                s.check(err <= UNITARY_TOL, || format!("(x_{j} cx_{k}{l})^2: deviation {err:e}"));
            }
        }
    }
    s.finish()
}

/// `(cx_kl cx_lm)^2 = cx_km` for distinct qubits.
fn cx_commutators(q_max: usize) -> SuiteResult {
    let mut s = Suite::new("cx-commutator");
    for q in 3..=q_max.max(3) {
        for k in 0..q {
            for l in 0..q {
                for m in 0..q {
                    if k == l || l == m || k == m {
                        continue;
                    }
                    let ab = cx(k, l, q) * cx(l, m, q);
                    let err = max_abs_diff(&(&ab * &ab), &cx(k, m, q));
                    s.check(err <= UNITARY_TOL, || format!("q={q}: (cx_{k}{l} cx_{l}{m})^2 != cx_{k}{m}, deviation {err:e}"));
                    let ba = cx(l, m, q) * cx(k, l, q);
                    let err = max_abs_diff(&ab, &ba);
                    s.check(err > 0.5, || format!("q={q}: cx_{k}{l} and cx_{l}{m} commute"));
                }
            }
        }
    }
    s.finish()
}

/// `pcx(pi) = cx`, `pswap(pi) = swap`, `pswap(0) = I`.
fn parametrized_gates() -> SuiteResult {
    let mut s = Suite::new("parametrized-gates");
    let swap = DMatrix::from_fn(4, 4, |r, c| {
        let swapped = ((c & 1) << 1) | (c >> 1);
        if r == swapped { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
    });
    let id = DMatrix::<C64>::identity(4, 4);
    for (control, target) in [(0, 1), (1, 0)] {
        let g = gate_matrix(&Gate::Pcx { control, target, slot: 0 }, &[PI], 2);
        let err = max_abs_diff(&g, &cx(control, target, 2));
        s.check(err <= UNITARY_TOL, || format!("pcx({control}->{target}, pi) differs from cx by {err:e}"));
        let g = gate_matrix(&Gate::Pcx { control, target, slot: 0 }, &[0.0], 2);
        let err = max_abs_diff(&g, &id);
        s.check(err <= UNITARY_TOL, || format!("pcx({control}->{target}, 0) differs from I by {err:e}"));
    }
    let g = gate_matrix(&Gate::Pswap { a: 0, b: 1, slot: 0 }, &[PI], 2);
    let err = max_abs_diff(&g, &swap);
    s.check(err <= UNITARY_TOL, || format!("pswap(pi) differs from swap by {err:e}: [{}]", show(&g)));
    let g = gate_matrix(&Gate::Pswap { a: 0, b: 1, slot: 0 }, &[0.0], 2);
    let err = max_abs_diff(&g, &id);
    s.check(err <= UNITARY_TOL, || format!("pswap(0) differs from I by {err:e}"));
    s.finish()
}

/// Every binary setting of the Borel ansatz gives a distinct unit upper
/// triangular matrix, `2^(q choose 2)` in all, and words round-trip.
fn borel_enumeration(q_max: usize, deep: bool) -> SuiteResult {
    let mut s = Suite::new("borel-enumeration");
    let top = if deep { q_max.max(4) } else { q_max };
    for q in 2..=top {
        let c = build_ansatz(AnsatzKind::Borel, q, None).expect("borel ansatz");
        let len = c.param_count();
        let mut seen = std::collections::HashSet::new();
        for mask in 0u64..1 << len {
            let theta: Vec<f64> = (0..len).map(|i| if mask >> i & 1 == 1 { PI } else { 0.0 }).collect();
            let a = binary_affine(&c, &theta).expect("binary parameters").a;
            s.check(a.is_unit_upper_triangular(), || format!("q={q} mask {mask:b}: not unit upper triangular:\n{a}"));
            let back = borel_subword(&a).and_then(|w| word_to_matrix(&w, q));
            s.check(back.as_ref() == Ok(&a), || format!("q={q}: word round trip failed for\n{a}"));
            seen.insert(a);
        }
        let expected = 1usize << (q * (q - 1) / 2);
        s.check(seen.len() == expected, || format!("q={q}: {} distinct Borel matrices, expected {expected}", seen.len()));
    }
    s.finish()
}

/// Decomposes and reassembles all of `GL_q`.
fn bruhat_reassembly(q_max: usize, deep: bool) -> SuiteResult {
    let mut s = Suite::new("bruhat-reassembly");
    let top = if deep { 4 } else { q_max.min(3) };
    for q in 1..=top {
        let mut invertible = 0u64;
        for m in Gf2Matrix::enumerate_all(q) {
            match bruhat_decompose(&m) {
                Ok(f) => {
                    invertible += 1;
                    let ok = f.u1.is_unit_upper_triangular() && f.u2.is_unit_upper_triangular() && f.reassemble() == m;
                    s.check(ok, || format!("q={q}: factors do not reassemble\n{m}"));
                }
                Err(_) => s.check(!m.is_invertible(), || format!("q={q}: invertible matrix rejected\n{m}")),
            }
        }
        let order = gl_order(q);
        s.check(order == invertible.into(), || format!("q={q}: {invertible} invertible matrices, expected {order}"));
    }
    s.finish()
}

/// Exhaustive binary census of the LX ansatz against the span formula.
fn span_census(q_max: usize) -> SuiteResult {
    let mut s = Suite::new("span-census");
    for q in 2..=q_max.min(3) {
        let c = build_ansatz(AnsatzKind::LX, q, None).expect("lx ansatz");
        let expected = bruhat_span_size(q);
        match run_census(&CensusConfig::new(c, 0, CensusMode::Exhaustive)) {
            Ok(row) => s.check(expected == row.count_hungarian.into(), || {
                format!("q={q}: {} permutations, expected {expected}", row.count_hungarian)
            }),
            Err(e) => s.check(false, || format!("q={q}: {e}")),
        }
    }
    s.finish()
}

/// Closed-form DSM readout against the doubled-register simulation.
fn dsm_oracle(seed: u64) -> SuiteResult {
    let mut s = Suite::new("dsm-oracle");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (kind, q, m) in [(AnsatzKind::LX, 2, 0), (AnsatzKind::LX, 2, 1), (AnsatzKind::LX, 3, 0), (AnsatzKind::Bruhat, 2, 1)] {
        let c = build_ansatz(kind, q + m, None).expect("ansatz");
        for _ in 0..5 {
            let theta: Vec<f64> = (0..c.param_count()).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
            let job = DsmJob::new(c.clone(), m, theta).expect("job");
            match (extract_dsm(&job), statevector_oracle(&job)) {
                (Ok(a), Ok(b)) => {
                    let err = a.max_abs_diff(&b);
                    s.check(err <= 1e-10, || format!("{kind} q={q} m={m}: readouts differ by {err:e}, theta = {:?}", job.theta));
                    let defect = a.stochastic_defect();
                    s.check(defect <= STOCHASTIC_TOL, || format!("{kind} q={q} m={m}: stochastic defect {defect:e}"));
                }
                (Err(e), _) | (_, Err(e)) => s.check(false, || format!("{kind} q={q} m={m}: {e}")),
            }
        }
    }
    s.finish()
}

pub fn run_verify(cfg: &VerifyConfig) -> VerifyReport {
    let suites = vec![
        gate_identities(cfg.fault),
        cx_commutators(cfg.q_max),
        parametrized_gates(),
        borel_enumeration(cfg.q_max, cfg.deep),
        bruhat_reassembly(cfg.q_max, cfg.deep),
        span_census(cfg.q_max),
        dsm_oracle(cfg.seed),
    ];
    VerifyReport { passed: suites.iter().all(|s| s.passed), suites }
}
