use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{AnsatzKind, Builder, Circuit, Gate};
use crate::error::{QuperError, Result};
use crate::group::longest_word_sequence;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitStats {
    pub param_count: usize,
    pub depth: usize,
    pub two_qubit_gate_count: usize,
}

fn binom2(q: usize) -> usize {
    q * q.saturating_sub(1) / 2
}

fn push_xlayer(b: &mut Builder, q: usize) {
    for t in 0..q {
        b.param(Gate::Rx { target: t, slot: 0 });
    }
}

/// One `pcx` per upper transvection `T_(jk)`, control `k`, target `j`, ascending in `(j, k)`.
fn push_borel(b: &mut Builder, q: usize) {
    for j in 0..q {
        for k in j + 1..q {
            b.param(Gate::Pcx { control: k, target: j, slot: 0 });
        }
    }
}

fn push_weyl(b: &mut Builder, q: usize) {
    for i in longest_word_sequence(q) {
        b.param(Gate::Pswap { a: i, b: i + 1, slot: 0 });
    }
}

/// One `rx` per qubit then a ring of `pcx(i -> i+1 mod q)`, repeated.
fn push_sel(b: &mut Builder, q: usize, layers: usize) {
    for layer in 0..layers {
        b.block(layer);
        push_xlayer(b, q);
        for i in 0..q {
            b.param(Gate::Pcx { control: i, target: (i + 1) % q, slot: 0 });
        }
    }
}

/// Layer count giving SEL roughly the parameter budget of the LX ansatz.
pub fn default_sel_layers(q: usize) -> usize {
    (q + 3 * binom2(q)).div_ceil(2 * q).max(1)
}

fn need(kind: AnsatzKind, q: usize, min: usize) -> Result<()> {
    if q < min {
        return Err(QuperError::TooFewQubits { kind: kind.to_string(), min, got: q });
    }
    Ok(())
}

/// Builds one of the named ansatze on `q` qubits.
///
/// All parametrized gates get their own slot, numbered in gate order. The
/// two Borel blocks of Bruhat and LX are independent.
pub fn build_ansatz(kind: AnsatzKind, q: usize, sel_layers: Option<usize>) -> Result<Circuit> {
    let mut b = Builder::new(q, kind);
    match kind {
        AnsatzKind::XLayer => {
            need(kind, q, 1)?;
            push_xlayer(&mut b, q);
        }
        AnsatzKind::Borel => {
            need(kind, q, 2)?;
            push_borel(&mut b, q);
        }
        AnsatzKind::Weyl => {
            need(kind, q, 2)?;
            push_weyl(&mut b, q);
        }
        AnsatzKind::Bruhat => {
            need(kind, q, 2)?;
            push_borel(&mut b, q);
            b.block(1);
            push_weyl(&mut b, q);
            b.block(2);
            push_borel(&mut b, q);
        }
        AnsatzKind::LX => {
            need(kind, q, 1)?;
            push_xlayer(&mut b, q);
            b.block(1);
            push_borel(&mut b, q);
            b.block(2);
            push_weyl(&mut b, q);
            b.block(3);
            push_borel(&mut b, q);
        }
        AnsatzKind::SEL => {
            need(kind, q, 2)?;
            let layers = sel_layers.unwrap_or_else(|| default_sel_layers(q));
            if layers == 0 {
                return Err(QuperError::InvalidArgument("SEL needs at least one layer".into()));
            }
            push_sel(&mut b, q, layers);
        }
        AnsatzKind::Custom => {
            return Err(QuperError::InvalidArgument("custom circuits are parsed, not built".into()));
        }
    }
    Ok(b.finish())
}

/// Ansatz families offered to the solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverAnsatz {
    /// The full LX circuit: `rx` layer, Borel, Weyl, Borel.
    Bruhat,
    /// An `rx` layer followed by one Borel block.
    Borel,
    Sel,
}

impl FromStr for SolverAnsatz {
    type Err = QuperError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bruhat" => Ok(SolverAnsatz::Bruhat),
            "borel" => Ok(SolverAnsatz::Borel),
            "sel" => Ok(SolverAnsatz::Sel),
            other => Err(QuperError::InvalidArgument(format!("unknown ansatz {other:?} (bruhat|borel|sel)"))),
        }
    }
}

impl std::fmt::Display for SolverAnsatz {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverAnsatz::Bruhat => "bruhat",
            SolverAnsatz::Borel => "borel",
            SolverAnsatz::Sel => "sel",
        })
    }
}

/// The circuit the solver trains on a register of `total_q = m + q` qubits.
pub fn solver_ansatz(kind: SolverAnsatz, total_q: usize) -> Result<Circuit> {
    match kind {
        SolverAnsatz::Bruhat => build_ansatz(AnsatzKind::LX, total_q, None),
        SolverAnsatz::Sel => build_ansatz(AnsatzKind::SEL, total_q, None),
        SolverAnsatz::Borel => {
            need(AnsatzKind::Borel, total_q, 2)?;
            let mut b = Builder::new(total_q, AnsatzKind::Borel);
            push_xlayer(&mut b, total_q);
            b.block(1);
            push_borel(&mut b, total_q);
            Ok(b.finish())
        }
    }
}

fn duration(g: &Gate) -> usize {
    match g {
        Gate::Pswap { .. } => 3,
        _ => 1,
    }
}

/// Parameter count, greedy as-soon-as-possible depth (a `pswap` lasts 3
/// layers, everything else 1) and the number of two-qubit gates with a
/// `pswap` counted as three.
pub fn circuit_stats(c: &Circuit) -> CircuitStats {
    let mut free_at = vec![0usize; c.q()];
    let mut two_qubit = 0;
    for g in c.gates() {
        let qs = g.qubits();
        let start = qs.iter().map(|&k| free_at[k]).max().unwrap_or(0);
        let end = start + duration(g);
        for &k in &qs {
            free_at[k] = end;
        }
        if qs.len() == 2 {
            two_qubit += duration(g);
        }
    }
    CircuitStats {
        param_count: c.param_count(),
        depth: free_at.into_iter().max().unwrap_or(0),
        two_qubit_gate_count: two_qubit,
    }
}
