//! Factor an invertible GF(2) matrix into Bruhat pieces, then compile an
//! affine map into binary circuit parameters and check the result.
//!
//! ```bash
//! cargo run -p quper --example affine_synthesis
//! ```

use quper::circuit::{eval_permutation, synthesize_params};
use quper::group::{bruhat_decompose, random_invertible, AffineMap};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> quper::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = random_invertible(3, &mut rng);
    println!("A =\n{a}");
    let f = bruhat_decompose(&a)?;
    println!("{f:?}");
    assert_eq!(f.reassemble(), a);

    let map = AffineMap::new(a, 0b101)?;
    let (circuit, theta) = synthesize_params(&map)?;
    println!("{}", circuit.to_text());
    let p = eval_permutation(&circuit, &theta)?;
    println!("target   {}", map.to_permutation());
    println!("compiled {p}");
    assert_eq!(p, map.to_permutation());
    Ok(())
}
