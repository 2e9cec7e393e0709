use std::collections::HashSet;
use std::f64::consts::PI;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{eval_permutation, Circuit};
use crate::dsm::binary_dsm;
use crate::group::bruhat_span_size;
use crate::projection::{project_hungarian, project_random_order};
use crate::{Permutation, QuperError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CensusMode {
    Exhaustive,
    Sample(usize),
}

/// Largest exhaustive census allowed by default, as a power of two.
pub const DEFAULT_EXHAUSTIVE_BITS: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct CensusConfig {
    /// Circuit on `m + q` qubits, ancillas first.
    pub circuit: Circuit,
    pub m: usize,
    /// Only the first `params` slots vary; the others stay at 0.
    pub params: Option<usize>,
    pub mode: CensusMode,
    pub seed: u64,
    pub max_exhaustive_bits: usize,
}

impl CensusConfig {
    pub fn new(circuit: Circuit, m: usize, mode: CensusMode) -> Self {
        CensusConfig { circuit, m, params: None, mode, seed: 0, max_exhaustive_bits: DEFAULT_EXHAUSTIVE_BITS }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CensusRow {
    pub params: usize,
    pub count_hungarian: usize,
    pub count_random_order: usize,
    pub theoretical_cap: BigUint,
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, k| acc * BigUint::from(k))
}

/// `min(2^l, |Bruhat span of q + m qubits|, n!)`.
pub fn theoretical_cap(params: usize, q: usize, m: usize) -> BigUint {
    let n = 1usize << q;
    let mut cap = BigUint::from(1u32) << params;
    for other in [bruhat_span_size(q + m), factorial(n)] {
        if other < cap {
            cap = other;
        }
    }
    cap
}

type Sets = (HashSet<Permutation>, HashSet<Permutation>);

fn merge(mut a: Sets, b: Sets) -> Sets {
    a.0.extend(b.0);
    a.1.extend(b.1);
    a
}

/// Distinct permutations reached at binary parameters. With ancillas each
/// DSM is projected twice: by the Hungarian method and by one random-order
/// trial.
pub fn run_census(cfg: &CensusConfig) -> Result<CensusRow> {
    let total = cfg.circuit.q();
    if cfg.m >= total {
        return Err(QuperError::InvalidArgument(format!("{} ancillas leave no system qubit", cfg.m)));
    }
    let len = cfg.circuit.param_count();
    let params = cfg.params.unwrap_or(len);
    if params > len {
        return Err(QuperError::InvalidArgument(format!("circuit has {len} parameters, {params} requested")));
    }
    let samples = match cfg.mode {
        CensusMode::Exhaustive => {
            if params > cfg.max_exhaustive_bits {
                return Err(QuperError::Budget(format!(
                    "exhaustive census over 2^{params} settings exceeds the limit of 2^{}",
                    cfg.max_exhaustive_bits
                )));
            }
            1u64 << params
        }
        CensusMode::Sample(n) => n as u64,
    };
    let theta_of = |index: u64| -> Vec<f64> {
        let mut theta = vec![0.0; len];
        let bits = match cfg.mode {
            CensusMode::Exhaustive => index,
            CensusMode::Sample(_) => {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(index);
                rng.gen::<u64>()
            }
        };
        for (i, t) in theta.iter_mut().enumerate().take(params) {
            // past 64 slots, sampled settings draw fresh words
            let word = if i < 64 { bits } else { splitmix(bits ^ (i as u64 / 64)) };
            if (word >> (i % 64)) & 1 == 1 {
                *t = PI;
            }
        }
        theta
    };
    let (hungarian, random) = (0..samples)
        .into_par_iter()
        .try_fold(
            || (HashSet::new(), HashSet::new()),
            |mut sets: Sets, index| -> Result<Sets> {
                let theta = theta_of(index);
                if cfg.m == 0 {
                    let p = eval_permutation(&cfg.circuit, &theta)?;
                    sets.0.insert(p.clone());
                    sets.1.insert(p);
                } else {
                    let d = binary_dsm(&cfg.circuit, cfg.m, &theta)?;
                    sets.0.insert(project_hungarian(&d));
                    let seed = cfg.seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
                    let r = project_random_order(&d, seed, 1).candidates.swap_remove(0);
                    sets.1.insert(r);
                }
                Ok(sets)
            },
        )
        .try_reduce(|| (HashSet::new(), HashSet::new()), |a, b| Ok(merge(a, b)))?;
    Ok(CensusRow {
        params,
        count_hungarian: hungarian.len(),
        count_random_order: random.len(),
        theoretical_cap: theoretical_cap(params, total - cfg.m, cfg.m),
    })
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One row per prefix length `0..=params`.
pub fn run_census_sweep(cfg: &CensusConfig) -> Result<Vec<CensusRow>> {
    let top = cfg.params.unwrap_or(cfg.circuit.param_count());
    (0..=top).map(|l| run_census(&CensusConfig { params: Some(l), ..cfg.clone() })).collect()
}

pub fn census_csv(rows: &[CensusRow]) -> String {
    let mut out = String::from("params,count_hungarian,count_random_order,theoretical_cap\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.params, r.count_hungarian, r.count_random_order, r.theoretical_cap));
    }
    out
}
