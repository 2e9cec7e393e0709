//! Parametrized circuits over `rx`, phase, `cx` and their controlled/swap
//! variants.
//!
//! A [`Circuit`] is an ordered gate list; the first gate acts first on the
//! state. Parametrized gates read their angle from a named slot of the
//! parameter vector. At slot values in `{0, pi}` every gate is a signless
//! permutation of basis states, which is what makes the ansatze usable as
//! permutation generators.
//!
//! Qubit 0 is the most significant bit of a basis index.
//!
//! # Text format
//!
//! One gate per line: `PCX c t slot`, `PSWAP a b slot`, `RX t slot`,
//! `PHASE t slot scale`, `CX c t`. Blank lines and `#` comments are skipped;
//! an optional `qubits N` line fixes the register size, otherwise it is the
//! largest qubit index plus one.

mod ansatz;
mod binary;
mod lowering;
mod synth;
pub mod unitary;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{QuperError, Result};

pub use ansatz::{build_ansatz, circuit_stats, solver_ansatz, CircuitStats, SolverAnsatz};
pub use binary::{binary_affine, eval_permutation, is_binary_angle};
pub use lowering::{ladder_gate_count, lower_to_linear_topology};
pub use synth::synthesize_params;
pub use unitary::{eval_unitary, max_dense_qubits, GUARD_ENV};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    Rx,
    Phase,
    Cx,
    Pcx,
    Pswap,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "lowercase")]
pub enum Gate {
    /// `exp(-i theta X / 2)`.
    Rx { target: usize, slot: usize },
    /// `diag(1, e^{i scale theta})`.
    Phase { target: usize, slot: usize, scale: f64 },
    Cx { control: usize, target: usize },
    /// Phase-corrected controlled rotation; `cx` at `pi`, identity at 0.
    Pcx { control: usize, target: usize, slot: usize },
    /// `cx(b -> a)`, `pcx(a -> b)`, `cx(b -> a)`; `swap` at `pi`, identity at 0.
    Pswap { a: usize, b: usize, slot: usize },
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Rx { .. } => GateKind::Rx,
            Gate::Phase { .. } => GateKind::Phase,
            Gate::Cx { .. } => GateKind::Cx,
            Gate::Pcx { .. } => GateKind::Pcx,
            Gate::Pswap { .. } => GateKind::Pswap,
        }
    }

    /// Qubits touched, control (or first swap qubit) first.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Rx { target, .. } | Gate::Phase { target, .. } => vec![target],
            Gate::Cx { control, target } | Gate::Pcx { control, target, .. } => vec![control, target],
            Gate::Pswap { a, b, .. } => vec![a, b],
        }
    }

    pub fn slot(&self) -> Option<usize> {
        match *self {
            Gate::Rx { slot, .. } | Gate::Phase { slot, .. } | Gate::Pcx { slot, .. } | Gate::Pswap { slot, .. } => {
                Some(slot)
            }
            Gate::Cx { .. } => None,
        }
    }

    fn with_slot(self, new: usize) -> Gate {
        match self {
            Gate::Rx { target, .. } => Gate::Rx { target, slot: new },
            Gate::Phase { target, scale, .. } => Gate::Phase { target, slot: new, scale },
            Gate::Pcx { control, target, .. } => Gate::Pcx { control, target, slot: new },
            Gate::Pswap { a, b, .. } => Gate::Pswap { a, b, slot: new },
            g @ Gate::Cx { .. } => g,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnsatzKind {
    XLayer,
    Borel,
    Weyl,
    Bruhat,
    LX,
    SEL,
    Custom,
}

impl fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AnsatzKind::XLayer => "xlayer",
            AnsatzKind::Borel => "borel",
            AnsatzKind::Weyl => "weyl",
            AnsatzKind::Bruhat => "bruhat",
            AnsatzKind::LX => "lx",
            AnsatzKind::SEL => "sel",
            AnsatzKind::Custom => "custom",
        };
        f.write_str(s)
    }
}

impl FromStr for AnsatzKind {
    type Err = QuperError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "xlayer" | "x" => AnsatzKind::XLayer,
            "borel" => AnsatzKind::Borel,
            "weyl" => AnsatzKind::Weyl,
            "bruhat" => AnsatzKind::Bruhat,
            "lx" => AnsatzKind::LX,
            "sel" => AnsatzKind::SEL,
            "custom" => AnsatzKind::Custom,
            other => return Err(QuperError::InvalidArgument(format!("unknown ansatz {other:?}"))),
        })
    }
}

/// Structural identity of a parameter slot: the gate that reads it and the
/// sub-block of the ansatz it sits in.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlotTag {
    pub block: usize,
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    q: usize,
    gates: Vec<Gate>,
    param_count: usize,
    kind: AnsatzKind,
    slot_tags: Vec<SlotTag>,
}

impl Circuit {
    /// Validates qubit and slot indices; slots are tagged by first use, all in block 0.
    pub fn new(q: usize, gates: Vec<Gate>) -> Result<Self> {
        let param_count = gates.iter().filter_map(Gate::slot).map(|s| s + 1).max().unwrap_or(0);
        let mut tags: Vec<Option<SlotTag>> = vec![None; param_count];
        for g in &gates {
            if let Some(s) = g.slot() {
                tags[s].get_or_insert_with(|| SlotTag { block: 0, kind: g.kind(), qubits: g.qubits() });
            }
        }
        let slot_tags = tags
            .into_iter()
            .enumerate()
            .map(|(i, t)| t.ok_or_else(|| QuperError::InvalidArgument(format!("slot {i} is never used"))))
            .collect::<Result<Vec<_>>>()?;
        let c = Circuit { q, gates, param_count, kind: AnsatzKind::Custom, slot_tags };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        for g in &self.gates {
            let qs = g.qubits();
            for &k in &qs {
                if k >= self.q {
                    return Err(QuperError::IndexOutOfRange { index: k, dim: self.q });
                }
            }
            if qs.len() == 2 && qs[0] == qs[1] {
                return Err(QuperError::InvalidArgument(format!("two-qubit gate on a single qubit: {g:?}")));
            }
            if let Some(s) = g.slot() {
                if s >= self.param_count {
                    return Err(QuperError::IndexOutOfRange { index: s, dim: self.param_count });
                }
            }
        }
        Ok(())
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn param_count(&self) -> usize {
        self.param_count
    }

    pub fn kind(&self) -> AnsatzKind {
        self.kind
    }

    pub fn slot_tags(&self) -> &[SlotTag] {
        &self.slot_tags
    }

    pub fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.param_count {
            return Err(QuperError::SizeMismatch { expected: self.param_count, got: theta.len() });
        }
        Ok(())
    }

    /// The same gates acting on a larger register, every qubit index shifted by `offset`.
    pub fn shifted(&self, offset: usize, new_q: usize) -> Result<Circuit> {
        let shift = |k: usize| k + offset;
        let gates = self
            .gates
            .iter()
            .map(|g| match *g {
                Gate::Rx { target, slot } => Gate::Rx { target: shift(target), slot },
                Gate::Phase { target, slot, scale } => Gate::Phase { target: shift(target), slot, scale },
                Gate::Cx { control, target } => Gate::Cx { control: shift(control), target: shift(target) },
                Gate::Pcx { control, target, slot } => Gate::Pcx { control: shift(control), target: shift(target), slot },
                Gate::Pswap { a, b, slot } => Gate::Pswap { a: shift(a), b: shift(b), slot },
            })
            .collect();
        let slot_tags = self
            .slot_tags
            .iter()
            .map(|t| SlotTag { block: t.block, kind: t.kind, qubits: t.qubits.iter().map(|&k| shift(k)).collect() })
            .collect();
        let c = Circuit { q: new_q, gates, param_count: self.param_count, kind: self.kind, slot_tags };
        c.validate()?;
        Ok(c)
    }

    /// Lines in the text format of the module docs.
    pub fn to_text(&self) -> String {
        let mut out = format!("qubits {}\n", self.q);
        for g in &self.gates {
            let line = match *g {
                Gate::Rx { target, slot } => format!("RX {target} {slot}"),
                Gate::Phase { target, slot, scale } => format!("PHASE {target} {slot} {scale:?}"),
                Gate::Cx { control, target } => format!("CX {control} {target}"),
                Gate::Pcx { control, target, slot } => format!("PCX {control} {target} {slot}"),
                Gate::Pswap { a, b, slot } => format!("PSWAP {a} {b} {slot}"),
            };
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Circuit> {
        let mut declared_q = None;
        let mut gates = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let bad = |msg: &str| QuperError::Parse(format!("line {}: {msg}: {raw:?}", lineno + 1));
            let num = |i: usize| -> Result<usize> {
                toks.get(i).ok_or_else(|| bad("missing field"))?.parse::<usize>().map_err(|_| bad("bad integer"))
            };
            let arity = |n: usize| if toks.len() == n { Ok(()) } else { Err(bad("wrong field count")) };
            let gate = match toks[0].to_ascii_uppercase().as_str() {
                "QUBITS" => {
                    arity(2)?;
                    declared_q = Some(num(1)?);
                    continue;
                }
                "RX" => {
                    arity(3)?;
                    Gate::Rx { target: num(1)?, slot: num(2)? }
                }
                "PHASE" => {
                    arity(4)?;
                    let scale = toks[3].parse::<f64>().map_err(|_| bad("bad scale"))?;
                    Gate::Phase { target: num(1)?, slot: num(2)?, scale }
                }
                "CX" => {
                    arity(3)?;
                    Gate::Cx { control: num(1)?, target: num(2)? }
                }
                "PCX" => {
                    arity(4)?;
                    Gate::Pcx { control: num(1)?, target: num(2)?, slot: num(3)? }
                }
                "PSWAP" => {
                    arity(4)?;
                    Gate::Pswap { a: num(1)?, b: num(2)?, slot: num(3)? }
                }
                _ => return Err(bad("unknown gate")),
            };
            gates.push(gate);
        }
        let inferred = gates.iter().flat_map(Gate::qubits).map(|k| k + 1).max().unwrap_or(0);
        let q = declared_q.unwrap_or(inferred);
        Circuit::new(q, gates).map_err(|e| match e {
            QuperError::Parse(_) => e,
            other => QuperError::Parse(other.to_string()),
        })
    }
}

/// Assembles ansatz circuits, handing out fresh slots and recording block tags.
pub(crate) struct Builder {
    q: usize,
    kind: AnsatzKind,
    gates: Vec<Gate>,
    tags: Vec<SlotTag>,
    block: usize,
}

impl Builder {
    pub(crate) fn new(q: usize, kind: AnsatzKind) -> Self {
        Builder { q, kind, gates: Vec::new(), tags: Vec::new(), block: 0 }
    }

    pub(crate) fn block(&mut self, block: usize) {
        self.block = block;
    }

    /// Appends a parametrized gate; its slot field is overwritten with a fresh slot.
    pub(crate) fn param(&mut self, g: Gate) {
        let slot = self.tags.len();
        self.tags.push(SlotTag { block: self.block, kind: g.kind(), qubits: g.qubits() });
        self.gates.push(g.with_slot(slot));
    }

    pub(crate) fn finish(self) -> Circuit {
        let c = Circuit { q: self.q, param_count: self.tags.len(), gates: self.gates, kind: self.kind, slot_tags: self.tags };
        c.validate().expect("builder emits valid circuits");
        c
    }
}
