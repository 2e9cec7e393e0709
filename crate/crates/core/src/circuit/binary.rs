use std::f64::consts::PI;

use super::{Circuit, Gate};
use crate::error::{QuperError, Result};
use crate::gf2::Gf2Matrix;
use crate::group::AffineMap;
use crate::permutation::Permutation;

const BINARY_TOL: f64 = 1e-9;

/// `Some(false)` for 0, `Some(true)` for pi, `None` otherwise.
pub fn is_binary_angle(theta: f64) -> Option<bool> {
    if theta.abs() <= BINARY_TOL {
        Some(false)
    } else if (theta - PI).abs() <= BINARY_TOL {
        Some(true)
    } else {
        None
    }
}

fn swap_rows(a: &mut Gf2Matrix, i: usize, j: usize) {
    a.add_row(i, j);
    a.add_row(j, i);
    a.add_row(i, j);
}

fn swap_bits(b: u64, i: usize, j: usize) -> u64 {
    if (b >> i) & 1 != (b >> j) & 1 {
        b ^ (1 << i) ^ (1 << j)
    } else {
        b
    }
}

/// The affine map on bit vectors computed by the circuit at binary parameters.
///
/// Gates are folded in one at a time: `rx(pi)` adds a constant, `cx` a row
/// operation, `swap` a row exchange; phases do not move basis states.
pub fn binary_affine(c: &Circuit, theta: &[f64]) -> Result<AffineMap> {
    c.check_theta(theta)?;
    let bits = theta
        .iter()
        .enumerate()
        .map(|(index, &value)| is_binary_angle(value).ok_or(QuperError::NonBinaryParameter { index, value }))
        .collect::<Result<Vec<bool>>>()?;
    let mut a = Gf2Matrix::identity(c.q());
    let mut b = 0u64;
    let cx = |a: &mut Gf2Matrix, b: &mut u64, control: usize, target: usize| {
        a.add_row(control, target);
        if (*b >> control) & 1 == 1 {
            *b ^= 1 << target;
        }
    };
    for g in c.gates() {
        match *g {
            Gate::Rx { target, slot } => {
                if bits[slot] {
                    b ^= 1 << target;
                }
            }
            Gate::Phase { .. } => {}
            Gate::Cx { control, target } => cx(&mut a, &mut b, control, target),
            Gate::Pcx { control, target, slot } => {
                if bits[slot] {
                    cx(&mut a, &mut b, control, target);
                }
            }
            Gate::Pswap { a: qa, b: qb, slot } => {
                if bits[slot] {
                    swap_rows(&mut a, qa, qb);
                    b = swap_bits(b, qa, qb);
                }
            }
        }
    }
    AffineMap::new(a, b)
}

/// The basis-state permutation of the circuit at parameters in `{0, pi}`.
pub fn eval_permutation(c: &Circuit, theta: &[f64]) -> Result<Permutation> {
    Ok(binary_affine(c, theta)?.to_permutation())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::unitary::eval_unitary;
    use crate::circuit::{build_ansatz, AnsatzKind};
    use crate::group::recognize_affine;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn binary_thetas(len: usize) -> impl Iterator<Item = Vec<f64>> {
        (0u64..1 << len).map(move |code| (0..len).map(|i| if (code >> i) & 1 == 1 { PI } else { 0.0 }).collect())
    }

    #[test]
    fn lx_span_counts() {
        for (q, expected) in [(2, 24), (3, 1344)] {
            let c = build_ansatz(AnsatzKind::LX, q, None).unwrap();
            let seen: HashSet<Permutation> =
                binary_thetas(c.param_count()).map(|t| eval_permutation(&c, &t).unwrap()).collect();
            assert_eq!(seen.len(), expected);
            assert!(seen.iter().all(|p| recognize_affine(p).unwrap().is_some()));
        }
    }

    #[test]
    fn zero_theta_is_identity() {
        let c = build_ansatz(AnsatzKind::LX, 4, None).unwrap();
        assert!(eval_permutation(&c, &vec![0.0; c.param_count()]).unwrap().is_identity());
    }

    #[test]
    fn rejects_non_binary() {
        let c = build_ansatz(AnsatzKind::XLayer, 2, None).unwrap();
        assert_eq!(
            eval_permutation(&c, &[0.0, 1.0]),
            Err(QuperError::NonBinaryParameter { index: 1, value: 1.0 })
        );
    }

    #[test]
    fn agrees_with_dense_moduli() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for kind in [AnsatzKind::LX, AnsatzKind::Bruhat, AnsatzKind::SEL] {
            let c = build_ansatz(kind, 3, None).unwrap();
            for _ in 0..30 {
                let theta: Vec<f64> = (0..c.param_count()).map(|_| if rng.gen() { PI } else { 0.0 }).collect();
                let p = eval_permutation(&c, &theta).unwrap();
                let u = eval_unitary(&c, &theta).unwrap();
                for r in 0..8 {
                    for col in 0..8 {
                        let modulus = u[(r, col)].norm();
                        let expected = if p.apply(col) == r { 1.0 } else { 0.0 };
                        assert!((modulus - expected).abs() <= 1e-12);
                    }
                }
            }
        }
    }
}
