//! Exact statevector evaluation of circuits.
//!
//! Gates are expanded into primitives (a 2x2 matrix on one qubit, possibly
//! controlled by another) and applied in place to a statevector. The
//! [`dense`] submodule rebuilds the same unitaries by Kronecker products and
//! serves as an oracle for the kernel.
//!
//! Dense work is capped by a qubit guard, [`DEFAULT_GUARD`] unless the
//! environment variable named by [`GUARD_ENV`] holds another value.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{Circuit, Gate};
use crate::error::{QuperError, Result};

pub type C64 = Complex64;
pub type Mat2 = [[C64; 2]; 2];

pub const GUARD_ENV: &str = "QUPER_MAX_DENSE_QUBITS";
pub const DEFAULT_GUARD: usize = 14;

pub fn max_dense_qubits() -> usize {
    std::env::var(GUARD_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_GUARD)
}

pub fn check_guard(needed: usize) -> Result<()> {
    let guard = max_dense_qubits();
    if needed > guard {
        return Err(QuperError::GuardExceeded { needed, guard });
    }
    Ok(())
}

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

pub fn identity2() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn pauli_x() -> Mat2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

pub fn hadamard() -> Mat2 {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

/// `sin_cos` that is exact at the quarter turns the binary parameter values
/// produce, so permutation circuits evaluate to exact 0/1 moduli.
fn sin_cos_exact(x: f64) -> (f64, f64) {
    use std::f64::consts::{FRAC_PI_2, PI};
    match x {
        _ if x == 0.0 => (0.0, 1.0),
        _ if x == FRAC_PI_2 => (1.0, 0.0),
        _ if x == -FRAC_PI_2 => (-1.0, 0.0),
        _ if x == PI || x == -PI => (0.0, -1.0),
        _ => x.sin_cos(),
    }
}

/// `exp(-i theta X / 2)`; note `rx(pi) = -i X`.
pub fn rx(theta: f64) -> Mat2 {
    let (s, c) = sin_cos_exact(theta / 2.0);
    let c = C64::new(c, 0.0);
    let ms = C64::new(0.0, -s);
    [[c, ms], [ms, c]]
}

pub fn phase(phi: f64) -> Mat2 {
    let (s, c) = sin_cos_exact(phi);
    [[ONE, ZERO], [ZERO, C64::new(c, s)]]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Primitive {
    Single { target: usize, m: Mat2 },
    Controlled { control: usize, target: usize, m: Mat2 },
}

fn expand_pcx(control: usize, target: usize, theta: f64, out: &mut Vec<Primitive>) {
    out.push(Primitive::Single { target: control, m: phase(theta / 2.0) });
    out.push(Primitive::Controlled { control, target, m: rx(theta) });
}

/// The primitive sequence of one gate, in application order.
pub fn expand(g: &Gate, theta: &[f64]) -> Vec<Primitive> {
    let mut out = Vec::with_capacity(3);
    match *g {
        Gate::Rx { target, slot } => out.push(Primitive::Single { target, m: rx(theta[slot]) }),
        Gate::Phase { target, slot, scale } => out.push(Primitive::Single { target, m: phase(scale * theta[slot]) }),
        Gate::Cx { control, target } => out.push(Primitive::Controlled { control, target, m: pauli_x() }),
        Gate::Pcx { control, target, slot } => expand_pcx(control, target, theta[slot], &mut out),
        Gate::Pswap { a, b, slot } => {
            out.push(Primitive::Controlled { control: b, target: a, m: pauli_x() });
            expand_pcx(a, b, theta[slot], &mut out);
            out.push(Primitive::Controlled { control: b, target: a, m: pauli_x() });
        }
    }
    out
}

/// Applies one primitive in place; qubit 0 is the most significant index bit.
pub fn apply_primitive(state: &mut [C64], q: usize, p: &Primitive) {
    let (cmask, target, m) = match *p {
        Primitive::Single { target, m } => (0usize, target, m),
        Primitive::Controlled { control, target, m } => (1usize << (q - 1 - control), target, m),
    };
    let tmask = 1usize << (q - 1 - target);
    for i in 0..state.len() {
        if i & tmask != 0 || i & cmask != cmask {
            continue;
        }
        let j = i | tmask;
        let (a, b) = (state[i], state[j]);
        state[i] = m[0][0] * a + m[0][1] * b;
        state[j] = m[1][0] * a + m[1][1] * b;
    }
}

/// Runs the circuit on a statevector of length `2^q`. No guard check.
pub fn apply_circuit(state: &mut [C64], c: &Circuit, theta: &[f64]) {
    for g in c.gates() {
        for p in expand(g, theta) {
            apply_primitive(state, c.q(), &p);
        }
    }
}

/// Precomputed primitive list for repeated evaluation at a fixed `theta`.
pub fn compile(c: &Circuit, theta: &[f64]) -> Vec<Primitive> {
    c.gates().iter().flat_map(|g| expand(g, theta)).collect()
}

pub fn apply_compiled(state: &mut [C64], q: usize, prims: &[Primitive]) {
    for p in prims {
        apply_primitive(state, q, p);
    }
}

/// Column `col` of the circuit unitary.
pub fn unitary_column(q: usize, prims: &[Primitive], col: usize) -> Vec<C64> {
    let mut state = vec![ZERO; 1 << q];
    state[col] = ONE;
    apply_compiled(&mut state, q, prims);
    state
}

/// Dense unitary `U` with `U[r][c] = <r| circuit |c>`.
pub fn eval_unitary(c: &Circuit, theta: &[f64]) -> Result<DMatrix<C64>> {
    c.check_theta(theta)?;
    check_guard(c.q())?;
    let n = 1usize << c.q();
    let prims = compile(c, theta);
    let cols: Vec<Vec<C64>> = (0..n).into_par_iter().map(|col| unitary_column(c.q(), &prims, col)).collect();
    Ok(DMatrix::from_fn(n, n, |r, col| cols[col][r]))
}

/// `max |(U^dagger U - I)_ij|`.
pub fn unitarity_defect(u: &DMatrix<C64>) -> f64 {
    let prod = u.adjoint() * u;
    let n = u.nrows();
    let mut worst = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            let target = if r == c { ONE } else { ZERO };
            worst = worst.max((prod[(r, c)] - target).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Kronecker-product reconstruction of gate unitaries.
pub mod dense {
    use super::*;

    pub fn mat2(m: &Mat2) -> DMatrix<C64> {
        DMatrix::from_fn(2, 2, |r, c| m[r][c])
    }

    fn kron_chain(factors: &[DMatrix<C64>]) -> DMatrix<C64> {
        factors.iter().fold(DMatrix::from_element(1, 1, ONE), |acc, f| acc.kronecker(f))
    }

    /// `I (x) .. (x) m (x) .. (x) I` with `m` at position `target` (qubit 0 leftmost).
    pub fn embed_single(m: &Mat2, target: usize, q: usize) -> DMatrix<C64> {
        let factors: Vec<_> =
            (0..q).map(|k| if k == target { mat2(m) } else { mat2(&identity2()) }).collect();
        kron_chain(&factors)
    }

    /// `|0><0|_c (x) I + |1><1|_c (x) m_t`.
    pub fn embed_controlled(m: &Mat2, control: usize, target: usize, q: usize) -> DMatrix<C64> {
        let p0 = [[ONE, ZERO], [ZERO, ZERO]];
        let p1 = [[ZERO, ZERO], [ZERO, ONE]];
        let a: Vec<_> = (0..q).map(|k| if k == control { mat2(&p0) } else { mat2(&identity2()) }).collect();
        let b: Vec<_> = (0..q)
            .map(|k| {
                if k == control {
                    mat2(&p1)
                } else if k == target {
                    mat2(m)
                } else {
                    mat2(&identity2())
                }
            })
            .collect();
        kron_chain(&a) + kron_chain(&b)
    }

    pub fn primitive_matrix(p: &Primitive, q: usize) -> DMatrix<C64> {
        match *p {
            Primitive::Single { target, m } => embed_single(&m, target, q),
            Primitive::Controlled { control, target, m } => embed_controlled(&m, control, target, q),
        }
    }

    pub fn gate_matrix(g: &Gate, theta: &[f64], q: usize) -> DMatrix<C64> {
        let n = 1usize << q;
        expand(g, theta).iter().fold(DMatrix::identity(n, n), |acc, p| primitive_matrix(p, q) * acc)
    }

    /// Product of dense gate matrices, last gate leftmost.
    pub fn eval_unitary_dense(c: &Circuit, theta: &[f64]) -> Result<DMatrix<C64>> {
        c.check_theta(theta)?;
        check_guard(c.q())?;
        let n = 1usize << c.q();
        Ok(c.gates().iter().fold(DMatrix::identity(n, n), |acc, g| gate_matrix(g, theta, c.q()) * acc))
    }
}
