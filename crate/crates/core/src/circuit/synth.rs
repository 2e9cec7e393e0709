use std::f64::consts::PI;

use super::{build_ansatz, AnsatzKind, Circuit};
use crate::error::Result;
use crate::gf2::Gf2Matrix;
use crate::group::{bruhat_decompose, weyl_subword_mask, AffineMap};

fn angle(on: bool) -> f64 {
    if on {
        PI
    } else {
        0.0
    }
}

fn borel_angles(u: &Gf2Matrix, out: &mut Vec<f64>) {
    let q = u.dim();
    for j in 0..q {
        for k in j + 1..q {
            out.push(angle(u.get(j, k)));
        }
    }
}

/// LX circuit and binary parameters realizing `x -> a x + b`.
///
/// The circuit applies its `rx` layer first, so it computes `a (x + c)`;
/// the layer therefore encodes `c = a^{-1} b`. The remaining blocks act as
/// `u1 * w * u2` right to left: the first Borel block carries `u2`, the
/// second `u1`.
pub fn synthesize_params(m: &AffineMap) -> Result<(Circuit, Vec<f64>)> {
    let q = m.dim();
    let circuit = build_ansatz(AnsatzKind::LX, q, None)?;
    let f = bruhat_decompose(&m.a)?;
    let shift = m.a.inverse()?.apply(m.b);
    let mut theta = Vec::with_capacity(circuit.param_count());
    theta.extend((0..q).map(|i| angle((shift >> i) & 1 == 1)));
    borel_angles(&f.u2, &mut theta);
    theta.extend(weyl_subword_mask(&f.w).into_iter().map(angle));
    borel_angles(&f.u1, &mut theta);
    debug_assert_eq!(theta.len(), circuit.param_count());
    Ok((circuit, theta))
}
