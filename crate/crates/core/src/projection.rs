//! Rounding a doubly-stochastic matrix to permutations.
//!
//! [`project_hungarian`] solves the linear assignment that is closest in
//! Frobenius norm. [`project_random_order`] multiplies the matrix with a
//! shuffled vector of powers of two and reads a permutation off how the
//! ordering moves; repeated with different shuffles it produces a small
//! neighbourhood of candidates that the objective then chooses from.
//!
//! Permutations follow the [`Dsm::from_permutation`] convention: `p` stands
//! for the matrix with ones at `(p(j), j)`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dsm::Dsm;
use crate::permutation::Permutation;

pub const DEFAULT_TRIALS: usize = 50;

/// Largest `n` for which the base vector holds exact powers of two.
pub const MAX_POWER_BASE: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionSource {
    Hungarian,
    RandomOrder,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionResult {
    pub candidates: Vec<Permutation>,
    pub source: ProjectionSource,
}

/// Minimum-cost assignment of rows to columns for a square cost matrix,
/// by shortest augmenting paths with potentials. `O(n^3)`.
pub fn min_cost_assignment(cost: &[f64], n: usize) -> Vec<usize> {
    assert_eq!(cost.len(), n * n);
    let inf = f64::INFINITY;
    // 1-based internally; index 0 is the virtual root
    let (mut u, mut v) = (vec![0.0; n + 1], vec![0.0; n + 1]);
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of_row = vec![0; n];
    for j in 1..=n {
        col_of_row[row_of[j] - 1] = j - 1;
    }
    col_of_row
}

/// `sum_j d[p(j)][j]`.
pub fn assignment_objective(d: &Dsm, p: &Permutation) -> f64 {
    (0..d.n()).map(|j| d.get(p.apply(j), j)).sum()
}

/// The permutation maximizing [`assignment_objective`].
pub fn project_hungarian(d: &Dsm) -> Permutation {
    let n = d.n();
    // assignment rows are the columns j of d
    let cost: Vec<f64> = (0..n).flat_map(|j| (0..n).map(move |i| -d.get(i, j))).collect();
    Permutation::new(min_cost_assignment(&cost, n)).expect("assignment is a bijection")
}

fn base_vector(n: usize) -> Vec<f64> {
    if n <= MAX_POWER_BASE {
        (0..n).map(|i| 2f64.powi(i as i32)).collect()
    } else {
        (0..n).map(|i| i as f64).collect()
    }
}

fn ordering(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    idx
}

/// One trial: shuffle the base vector, apply `d`, match ranks.
pub fn random_order_trial(d: &Dsm, rng: &mut ChaCha8Rng) -> Permutation {
    let n = d.n();
    let mut v = base_vector(n);
    v.shuffle(rng);
    let y: Vec<f64> = (0..n).map(|i| (0..n).map(|j| d.get(i, j) * v[j]).sum()).collect();
    let (ov, oy) = (ordering(&v), ordering(&y));
    let mut map = vec![0; n];
    for r in 0..n {
        map[ov[r]] = oy[r];
    }
    Permutation::new(map).expect("rank matching is a bijection")
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Distinct permutations from `trials` independent shuffles, in trial order.
/// Trial `t` draws from stream `t` of a generator seeded with `seed`.
pub fn project_random_order(d: &Dsm, seed: u64, trials: usize) -> ProjectionResult {
    let all: Vec<Permutation> =
        (0..trials).into_par_iter().map(|t| random_order_trial(d, &mut trial_rng(seed, t))).collect();
    let mut candidates: Vec<Permutation> = Vec::new();
    for p in all {
        if !candidates.contains(&p) {
            candidates.push(p);
        }
    }
    ProjectionResult { candidates, source: ProjectionSource::RandomOrder }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestProjection {
    pub hungarian: Permutation,
    pub hungarian_cost: f64,
    pub random: Permutation,
    pub random_cost: f64,
    pub best: Permutation,
    pub best_cost: f64,
}

/// Scores the Hungarian projection and every random-order candidate with
/// `cost` and keeps the cheapest; ties go to the Hungarian candidate, then
/// to earlier trials.
pub fn best_projection<F>(d: &Dsm, cost: F, seed: u64, trials: usize) -> BestProjection
where
    F: Fn(&Permutation) -> f64 + Sync,
{
    let hungarian = project_hungarian(d);
    let hungarian_cost = cost(&hungarian);
    let cands = project_random_order(d, seed, trials).candidates;
    let costs: Vec<f64> = cands.par_iter().map(&cost).collect();
    let (mut ri, mut rc) = (0, f64::INFINITY);
    for (i, &c) in costs.iter().enumerate() {
        if c < rc {
            ri = i;
            rc = c;
        }
    }
    let random = cands.into_iter().nth(ri).unwrap_or_else(|| hungarian.clone());
    let random_cost = if rc.is_finite() { rc } else { hungarian_cost };
    let (best, best_cost) =
        if random_cost < hungarian_cost { (random.clone(), random_cost) } else { (hungarian.clone(), hungarian_cost) };
    BestProjection { hungarian, hungarian_cost, random, random_cost, best, best_cost }
}
