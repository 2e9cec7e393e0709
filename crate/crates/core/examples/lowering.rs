//! Rewrite long-range gates as nearest-neighbour ladders.

use quper::circuit::{build_ansatz, circuit_stats, eval_permutation, lower_to_linear_topology, AnsatzKind};

fn main() -> quper::Result<()> {
    let c = build_ansatz(AnsatzKind::Borel, 4, None)?;
    let low = lower_to_linear_topology(&c);
    println!("before: {:?}", circuit_stats(&c));
    println!("after:  {:?}", circuit_stats(&low));
    print!("{}", low.to_text());

    let theta = vec![std::f64::consts::PI; c.param_count()];
    assert_eq!(eval_permutation(&c, &theta)?, eval_permutation(&low, &theta)?);
    Ok(())
}
