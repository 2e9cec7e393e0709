//! Recover a hidden relabelling between two graphs.

use quper::optimizer::{quper_solve, QuperConfig};
use quper::problems::{random_gip, Problem};

fn main() -> quper::Result<()> {
    let g = random_gip(8, 0.5, 4, true)?;
    let cfg = QuperConfig { m_max: 0, iterations: 200, lr: 0.4, ..QuperConfig::default() };
    let r = quper_solve(&g, &cfg)?;
    println!("planted {}", g.planted.as_ref().unwrap());
    println!("found   {}  cost {}", r.permutation, g.cost(&r.permutation));
    Ok(())
}
