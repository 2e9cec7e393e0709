//! The regularized loss, its finite-difference gradient, Adam with Nesterov
//! momentum and the ancilla-escalating driver.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_8};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{solver_ansatz, Circuit, SlotTag, SolverAnsatz};
use crate::circuit::unitary::check_guard;
use crate::dsm::{extract_dsm, Dsm, DsmJob};
use crate::group::log2_exact;
use crate::problems::Problem;
use crate::projection::{best_projection, DEFAULT_TRIALS};
use crate::{Permutation, QuperError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    pub w_st: f64,
    pub w_entropy: f64,
    pub w_ort: f64,
    pub entropy_eps: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig { w_st: 0.1, w_entropy: 0.15, w_ort: 0.01, entropy_eps: 1e-8 }
    }
}

impl LossConfig {
    pub fn unregularized() -> Self {
        LossConfig { w_st: 0.0, w_entropy: 0.0, w_ort: 0.0, ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regularizers {
    pub st: f64,
    pub entropy: f64,
    pub ort: f64,
}

/// Column-sum defect, entropy `-sum d log(d + eps)` and `||D^T D - I||^2`.
pub fn regularizers(d: &Dsm, entropy_eps: f64) -> Regularizers {
    let n = d.n();
    let st = d.col_sums().iter().map(|s| (s - 1.0).powi(2)).sum();
    let entropy = -d.entries().iter().filter(|&&x| x != 0.0).map(|&x| x * (x + entropy_eps).ln()).sum::<f64>();
    let mut ort = 0.0;
    for a in 0..n {
        for b in 0..n {
            let g: f64 = (0..n).map(|i| d.get(i, a) * d.get(i, b)).sum();
            let e = g - f64::from(u8::from(a == b));
            ort += e * e;
        }
    }
    Regularizers { st, entropy, ort }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LossValue {
    pub total: f64,
    pub raw_cost: f64,
    pub regularizers: Regularizers,
    pub dsm: Dsm,
}

pub fn loss<P: Problem + ?Sized>(job: &DsmJob, problem: &P, cfg: &LossConfig) -> Result<LossValue> {
    let dsm = extract_dsm(job)?;
    Ok(loss_of_dsm(dsm, problem, cfg))
}

fn loss_of_dsm<P: Problem + ?Sized>(dsm: Dsm, problem: &P, cfg: &LossConfig) -> LossValue {
    let raw_cost = problem.relaxed_cost(&dsm);
    let r = regularizers(&dsm, cfg.entropy_eps);
    let total = raw_cost + cfg.w_st * r.st + cfg.w_entropy * r.entropy + cfg.w_ort * r.ort;
    LossValue { total, raw_cost, regularizers: r, dsm }
}

/// Central differences, one coordinate per task.
pub fn fd_gradient<F>(f: F, theta: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(QuperError::InvalidArgument(format!("step {h} must be positive")));
    }
    (0..theta.len())
        .into_par_iter()
        .map(|i| {
            let mut x = theta.to_vec();
            x[i] = theta[i] + h;
            let up = f(&x)?;
            x[i] = theta[i] - h;
            let down = f(&x)?;
            let g = (up - down) / (2.0 * h);
            if g.is_finite() {
                Ok(g)
            } else {
                Err(QuperError::NonFinite(i))
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamParams {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamParams {
    fn default() -> Self {
        AdamParams { lr: 0.005, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub theta: Vec<f64>,
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    /// Index of the next step, starting at 1.
    pub k: u64,
    pub params: AdamParams,
}

impl AdamState {
    pub fn new(theta: Vec<f64>, params: AdamParams) -> Self {
        let n = theta.len();
        AdamState { theta, mu: vec![0.0; n], nu: vec![0.0; n], k: 1, params }
    }

    pub fn step(&mut self, g: &[f64]) -> Result<()> {
        if g.len() != self.theta.len() {
            return Err(QuperError::SizeMismatch { expected: self.theta.len(), got: g.len() });
        }
        let AdamParams { lr, beta1: b1, beta2: b2, eps } = self.params;
        let k = self.k as i32;
        let c1 = b1 / (1.0 - b1.powi(k + 1));
        let c2 = (1.0 - b1) / (1.0 - b1.powi(k));
        let c3 = 1.0 / (1.0 - b2.powi(k));
        for i in 0..g.len() {
            self.mu[i] = b1 * self.mu[i] + (1.0 - b1) * g[i];
            self.nu[i] = b2 * self.nu[i] + (1.0 - b2) * g[i] * g[i];
            let mu_bar = c1 * self.mu[i] + c2 * g[i];
            let nu_bar = c3 * self.nu[i];
            self.theta[i] -= lr * mu_bar / (nu_bar.sqrt() + eps);
        }
        self.k += 1;
        Ok(())
    }
}

pub fn adam_nesterov_step(s: &AdamState, g: &[f64]) -> Result<AdamState> {
    let mut next = s.clone();
    next.step(g)?;
    Ok(next)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuperConfig {
    pub ansatz: SolverAnsatz,
    pub m_max: usize,
    pub iterations: usize,
    pub seed: u64,
    pub lr: f64,
    pub h: f64,
    pub projection_trials: usize,
    /// Value given to slots that appear when an ancilla is added.
    pub pad: f64,
    pub loss: LossConfig,
}

impl Default for QuperConfig {
    fn default() -> Self {
        QuperConfig {
            ansatz: SolverAnsatz::Bruhat,
            m_max: 0,
            iterations: 1000,
            seed: 0,
            lr: AdamParams::default().lr,
            h: 1e-5,
            projection_trials: DEFAULT_TRIALS,
            pad: FRAC_PI_8,
            loss: LossConfig::default(),
        }
    }
}

impl QuperConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(QuperError::InvalidArgument("at least one iteration is needed".into()));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(QuperError::InvalidArgument(format!("learning rate {} must be positive", self.lr)));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(QuperError::InvalidArgument(format!("gradient step {} must be positive", self.h)));
        }
        if !(self.loss.entropy_eps > 0.0) {
            return Err(QuperError::InvalidArgument("entropy epsilon must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterRecord {
    pub iter: usize,
    pub m: usize,
    pub loss: f64,
    pub raw_cost: f64,
    pub proj_hungarian_cost: f64,
    pub proj_random_cost: f64,
    pub best: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelResult {
    pub m: usize,
    pub params: usize,
    pub value: f64,
    pub permutation: Permutation,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QuperTrace {
    pub records: Vec<IterRecord>,
    pub levels: Vec<LevelResult>,
}

impl QuperTrace {
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn is_monotone(&self) -> bool {
        self.records.windows(2).all(|w| w[1].best <= w[0].best)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuperResult {
    pub permutation: Permutation,
    pub value: f64,
    pub theta: Vec<f64>,
    pub trace: QuperTrace,
}

fn shifted_tag(t: &SlotTag) -> SlotTag {
    SlotTag { block: t.block, kind: t.kind, qubits: t.qubits.iter().map(|&k| k + 1).collect() }
}

/// Carries parameters from a circuit on `T` qubits to one on `T + 1` whose
/// extra qubit is prepended as qubit 0. Slots are matched by block, gate kind
/// and qubits, in order of occurrence; the rest get `pad`.
pub fn reembed(old: &Circuit, theta: &[f64], new: &Circuit, pad: f64) -> Result<Vec<f64>> {
    old.check_theta(theta)?;
    if new.q() != old.q() + 1 {
        return Err(QuperError::SizeMismatch { expected: old.q() + 1, got: new.q() });
    }
    let mut carried: HashMap<SlotTag, VecDeque<f64>> = HashMap::new();
    for (t, &v) in old.slot_tags().iter().zip(theta) {
        carried.entry(shifted_tag(t)).or_default().push_back(v);
    }
    Ok(new
        .slot_tags()
        .iter()
        .map(|t| carried.get_mut(t).and_then(VecDeque::pop_front).unwrap_or(pad))
        .collect())
}

fn projection_seed(seed: u64, m: usize, iter: usize) -> u64 {
    seed ^ ((m as u64) << 56) ^ (iter as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Trains the ansatz with `m = 0, 1, .., m_max` ancillas, `iterations`
/// Adam steps per level, projecting after every evaluation and keeping the
/// best permutation seen.
pub fn quper_solve<P: Problem + ?Sized>(problem: &P, cfg: &QuperConfig) -> Result<QuperResult> {
    cfg.validate()?;
    let q = log2_exact(problem.n())?;
    for m in 0..=cfg.m_max {
        check_guard(q + 2 * m)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let adam = AdamParams { lr: cfg.lr, ..AdamParams::default() };
    let cost = |p: &Permutation| problem.cost(p);

    let mut circuit = solver_ansatz(cfg.ansatz, q)?;
    let mut theta: Vec<f64> =
        (0..circuit.param_count()).map(|_| FRAC_PI_2 + rng.gen_range(-0.05..=0.05)).collect();
    let mut best = (Permutation::identity(problem.n()), f64::INFINITY);
    let mut trace = QuperTrace::default();

    for m in 0..=cfg.m_max {
        if m > 0 {
            let bigger = solver_ansatz(cfg.ansatz, q + m)?;
            theta = reembed(&circuit, &theta, &bigger, cfg.pad)?;
            circuit = bigger;
        }
        let mut state = AdamState::new(theta, adam);
        let objective = |x: &[f64]| -> Result<f64> {
            let job = DsmJob::new(circuit.clone(), m, x.to_vec())?;
            Ok(loss(&job, problem, &cfg.loss)?.total)
        };
        for iter in 0..cfg.iterations {
            let value = loss(&DsmJob::new(circuit.clone(), m, state.theta.clone())?, problem, &cfg.loss)?;
            if !value.total.is_finite() {
                return Err(QuperError::NonFinite(iter));
            }
            let proj = best_projection(&value.dsm, cost, projection_seed(cfg.seed, m, iter), cfg.projection_trials);
            if proj.best_cost < best.1 {
                best = (proj.best.clone(), proj.best_cost);
            }
            trace.records.push(IterRecord {
                iter,
                m,
                loss: value.total,
                raw_cost: value.raw_cost,
                proj_hungarian_cost: proj.hungarian_cost,
                proj_random_cost: proj.random_cost,
                best: best.1,
            });
            let g = fd_gradient(objective, &state.theta, cfg.h)?;
            state.step(&g)?;
        }
        theta = state.theta;
        trace.levels.push(LevelResult {
            m,
            params: circuit.param_count(),
            value: best.1,
            permutation: best.0.clone(),
        });
    }
    Ok(QuperResult { permutation: best.0, value: best.1, theta, trace })
}

/// Trial count matched to `iterations` optimizer steps.
pub fn baseline_trials(iterations: usize) -> usize {
    50 * iterations.div_ceil(10)
}

/// Best of `50 * ceil(iterations / 10)` uniform random permutations.
pub fn random_baseline<P: Problem + ?Sized>(problem: &P, iterations: usize, seed: u64) -> (Permutation, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (Permutation::identity(problem.n()), f64::INFINITY);
    for _ in 0..baseline_trials(iterations.max(1)) {
        let p = Permutation::random(problem.n(), &mut rng);
        let v = problem.cost(&p);
        if v < best.1 {
            best = (p, v);
        }
    }
    best
}
