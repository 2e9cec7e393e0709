//! Round a doubly stochastic matrix to a permutation, two ways.

use quper::dsm::Dsm;
use quper::projection::{assignment_objective, project_hungarian, project_random_order};

fn main() -> quper::Result<()> {
    let d = Dsm::from_rows(&[
        vec![0.5, 0.25, 0.25, 0.0],
        vec![0.25, 0.5, 0.0, 0.25],
        vec![0.25, 0.0, 0.5, 0.25],
        vec![0.0, 0.25, 0.25, 0.5],
    ])?;
    let p = project_hungarian(&d);
    println!("hungarian    {p}  objective {}", assignment_objective(&d, &p));
    let r = project_random_order(&d, 7, 10);
    for p in &r.candidates {
        println!("random order {p}  objective {}", assignment_objective(&d, p));
    }
    Ok(())
}
