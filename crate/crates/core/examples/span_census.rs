//! Count the permutations an ansatz reaches at binary angles, with and
//! without an ancilla.
//!
//! ```bash
//! cargo run --release -p quper --example span_census
//! ```

use quper::circuit::{build_ansatz, AnsatzKind};
use quper::experiments::{census_csv, run_census, run_census_sweep, CensusConfig, CensusMode};
use quper::group::bruhat_span_size;

fn main() -> quper::Result<()> {
    for q in 2..=5 {
        println!("affine maps on {q} qubits: {}", bruhat_span_size(q));
    }

    let lx = build_ansatz(AnsatzKind::LX, 3, None)?;
    let rows = run_census_sweep(&CensusConfig::new(lx, 0, CensusMode::Exhaustive))?;
    print!("{}", census_csv(&rows));

    // one ancilla, sampled settings
    let lx = build_ansatz(AnsatzKind::LX, 4, None)?;
    let mut cfg = CensusConfig::new(lx, 1, CensusMode::Sample(20_000));
    cfg.seed = 1;
    print!("{}", census_csv(&[run_census(&cfg)?]));
    Ok(())
}
