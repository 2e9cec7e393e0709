use super::{Circuit, Gate};

/// Nearest-neighbour gates needed for one `cx` spanning distance `p`.
pub fn ladder_gate_count(p: usize) -> usize {
    if p <= 1 {
        1
    } else {
        4 * (p - 1)
    }
}

/// Nearest-neighbour replacement of `control -> target`. With the path
/// `r_0 = target, .., r_p = control`, the ladder climbs and descends once
/// from `r_1` and once more from `r_2`; only the two `r_1 -> r_0` gates carry
/// the parameter, so the rest cancel when it is 0.
fn push_ladder(control: usize, target: usize, slot: Option<usize>, out: &mut Vec<Gate>) {
    let p = control.abs_diff(target);
    let step = |i: usize| if control > target { target + i } else { target - i };
    let link = |hi: usize, slot: Option<usize>| {
        let (control, target) = (step(hi), step(hi - 1));
        match slot {
            Some(slot) if hi == 1 => Gate::Pcx { control, target, slot },
            _ => Gate::Cx { control, target },
        }
    };
    if p <= 1 {
        out.push(link(1, slot));
        return;
    }
    for start in [1, 2] {
        for hi in start..=p {
            out.push(link(hi, slot));
        }
        for hi in (start..p).rev() {
            out.push(link(hi, slot));
        }
    }
}

/// Rewrites every two-qubit gate to act on neighbouring qubits only.
///
/// At parameters in `{0, pi}` the lowered circuit induces the same
/// permutation; in between the unitaries differ.
pub fn lower_to_linear_topology(c: &Circuit) -> Circuit {
    let mut gates = Vec::with_capacity(c.gates().len());
    for g in c.gates() {
        match *g {
            Gate::Cx { control, target } => push_ladder(control, target, None, &mut gates),
            Gate::Pcx { control, target, slot } => push_ladder(control, target, Some(slot), &mut gates),
            Gate::Pswap { a, b, slot } if a.abs_diff(b) > 1 => {
                push_ladder(b, a, None, &mut gates);
                push_ladder(a, b, Some(slot), &mut gates);
                push_ladder(b, a, None, &mut gates);
            }
            other => gates.push(other),
        }
    }
    Circuit { gates, ..c.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_ansatz, eval_permutation, AnsatzKind};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn neighbour_only(c: &Circuit) -> bool {
        c.gates().iter().all(|g| {
            let qs = g.qubits();
            qs.len() < 2 || qs[0].abs_diff(qs[1]) == 1
        })
    }

    #[test]
    fn ladder_sizes() {
        for (control, target) in [(1, 0), (0, 1), (3, 0), (0, 3), (5, 1)] {
            let c = Circuit::new(6, vec![Gate::Pcx { control, target, slot: 0 }]).unwrap();
            let low = lower_to_linear_topology(&c);
            let p = control.abs_diff(target);
            assert_eq!(low.gates().len(), ladder_gate_count(p));
            assert!(neighbour_only(&low));
            let carried = low.gates().iter().filter(|g| g.slot().is_some()).count();
            assert_eq!(carried, if p == 1 { 1 } else { 2 });
            for theta in [0.0, PI] {
                assert_eq!(eval_permutation(&low, &[theta]).unwrap(), eval_permutation(&c, &[theta]).unwrap());
            }
        }
        assert_eq!(ladder_gate_count(3), 8);
    }

    #[test]
    fn lowered_borel_keeps_permutations() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for q in [4, 5] {
            let c = build_ansatz(AnsatzKind::Borel, q, None).unwrap();
            let low = lower_to_linear_topology(&c);
            assert!(neighbour_only(&low));
            assert_eq!(low.param_count(), c.param_count());
            for _ in 0..50 {
                let theta: Vec<f64> = (0..c.param_count()).map(|_| if rng.gen() { PI } else { 0.0 }).collect();
                assert_eq!(eval_permutation(&low, &theta).unwrap(), eval_permutation(&c, &theta).unwrap());
            }
        }
    }

    #[test]
    fn long_swaps_and_plain_cx() {
        let c = Circuit::new(4, vec![Gate::Pswap { a: 0, b: 3, slot: 0 }, Gate::Cx { control: 0, target: 2 }]).unwrap();
        let low = lower_to_linear_topology(&c);
        assert!(neighbour_only(&low));
        for theta in [0.0, PI] {
            assert_eq!(eval_permutation(&low, &[theta]).unwrap(), eval_permutation(&c, &[theta]).unwrap());
        }
    }
}
