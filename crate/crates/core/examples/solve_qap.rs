//! Solve a small random QAP and compare with brute force and random search.
//!
//! ```bash
//! cargo run --release -p quper --example solve_qap
//! ```

use quper::circuit::SolverAnsatz;
use quper::optimizer::{quper_solve, random_baseline, QuperConfig};
use quper::problems::{brute_force, random_qap};

fn main() -> quper::Result<()> {
    let inst = random_qap(4, 11)?;
    let cfg = QuperConfig { ansatz: SolverAnsatz::Bruhat, m_max: 1, iterations: 200, seed: 3, ..QuperConfig::default() };
    let r = quper_solve(&inst, &cfg)?;
    for level in &r.trace.levels {
        println!("m={} params={} best={:.3}", level.m, level.params, level.value);
    }
    let (opt_p, opt) = brute_force(&inst);
    let (_, baseline) = random_baseline(&inst, cfg.iterations, cfg.seed);
    println!("found {}  {:.3}", r.permutation, r.value);
    println!("optimum {opt_p}  {opt:.3}");
    println!("random search {baseline:.3}");
    Ok(())
}
