use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::optimizer::{quper_solve, random_baseline, LevelResult, QuperConfig, QuperTrace};
use crate::problems::{
    load_graph, load_qaplib, normalized_heuristic_gap, random_gip, random_qap, relative_gap, GipInstance, Problem,
    QapInstance,
};
use crate::{Permutation, Result};

/// Where a run's instance comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum InstanceSpec {
    Qaplib { path: PathBuf },
    RandomQap { n: usize, seed: u64 },
    RandomGip { n: usize, seed: u64, edge_prob: f64, span_restricted: bool },
    Graphs { a: PathBuf, b: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub instance: InstanceSpec,
    pub solver: QuperConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: SolveConfig,
    pub problem: String,
    pub name: String,
    pub n: usize,
    pub seed: u64,
    pub levels: Vec<LevelResult>,
    pub best_value: f64,
    pub best_permutation: Permutation,
    pub baseline_value: f64,
    pub baseline_permutation: Permutation,
    pub known_optimum: Option<f64>,
    pub relative_gap: Option<f64>,
    pub baseline_relative_gap: Option<f64>,
    /// `(quper - baseline) / (n^2 / 2)`.
    pub normalized_gap_to_baseline: f64,
    pub wall_time_secs: f64,
}

pub enum LoadedInstance {
    Qap(QapInstance),
    Gip(GipInstance),
}

impl LoadedInstance {
    pub fn problem(&self) -> &dyn Problem {
        match self {
            LoadedInstance::Qap(q) => q,
            LoadedInstance::Gip(g) => g,
        }
    }
}

pub fn load_instance(spec: &InstanceSpec) -> Result<LoadedInstance> {
    Ok(match spec {
        InstanceSpec::Qaplib { path } => LoadedInstance::Qap(load_qaplib(path)?),
        InstanceSpec::RandomQap { n, seed } => LoadedInstance::Qap(random_qap(*n, *seed)?),
        InstanceSpec::RandomGip { n, seed, edge_prob, span_restricted } => {
            LoadedInstance::Gip(random_gip(*n, *edge_prob, *seed, *span_restricted)?)
        }
        InstanceSpec::Graphs { a, b } => LoadedInstance::Gip(GipInstance::new(load_graph(a)?, load_graph(b)?)?),
    })
}

/// Runs the solver and the matched random baseline on one instance.
pub fn run_solve(cfg: &SolveConfig) -> Result<(RunReport, QuperTrace)> {
    let start = Instant::now();
    let inst = load_instance(&cfg.instance)?;
    let (problem, name, known_optimum) = match &inst {
        LoadedInstance::Qap(q) => ("qap", q.name.clone(), q.known_optimum),
        LoadedInstance::Gip(g) => ("gip", "gip".to_string(), g.planted.as_ref().map(|_| 0.0)),
    };
    let p = inst.problem();
    let solved = quper_solve(p, &cfg.solver)?;
    let (baseline_permutation, baseline_value) = random_baseline(p, cfg.solver.iterations, cfg.solver.seed);
    let report = RunReport {
        config: cfg.clone(),
        problem: problem.to_string(),
        name,
        n: p.n(),
        seed: cfg.solver.seed,
        levels: solved.trace.levels.clone(),
        best_value: solved.value,
        best_permutation: solved.permutation,
        baseline_value,
        baseline_permutation,
        known_optimum,
        relative_gap: known_optimum.and_then(|o| relative_gap(solved.value, o)),
        baseline_relative_gap: known_optimum.and_then(|o| relative_gap(baseline_value, o)),
        normalized_gap_to_baseline: normalized_heuristic_gap(solved.value, baseline_value, p.n()),
        wall_time_secs: start.elapsed().as_secs_f64(),
    };
    Ok((report, solved.trace))
}
