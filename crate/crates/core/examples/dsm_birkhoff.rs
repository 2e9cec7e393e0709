//! Extract the doubly stochastic matrix of a circuit with one ancilla and
//! split it into weighted permutations.

use std::f64::consts::PI;

use quper::circuit::{build_ansatz, AnsatzKind};
use quper::dsm::{birkhoff_decompose, extract_dsm, statevector_oracle, DsmJob, DEFAULT_BIRKHOFF_TOL};
use quper::group::recognize_affine;

fn main() -> quper::Result<()> {
    let c = build_ansatz(AnsatzKind::Bruhat, 3, None)?;
    let theta: Vec<f64> = (0..c.param_count()).map(|i| if i % 3 == 0 { PI } else { 0.0 }).collect();
    let job = DsmJob::new(c, 1, theta)?;
    let d = extract_dsm(&job)?;
    print!("{}", d.to_csv());
    println!("defect {:.2e}, oracle gap {:.2e}", d.stochastic_defect(), d.max_abs_diff(&statevector_oracle(&job)?));

    let dec = birkhoff_decompose(&d, DEFAULT_BIRKHOFF_TOL)?;
    for t in &dec.terms {
        let affine = recognize_affine(&t.permutation)?.is_some();
        println!("{:.4}  {}  affine={affine}", t.lambda, t.permutation);
    }
    Ok(())
}
