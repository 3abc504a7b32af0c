//! Gate-level circuits for state preparation and Trotter evolution.
//!
//! Circuits are flat gate lists on a ring of qubits (qubit `l` is link `l`)
//! plus a global phase, so that simulated circuits can be compared with
//! statevector evolution amplitude by amplitude.
//!
//! Text format, one item per line, `#` starts a comment:
//!
//! ```text
//! QUBITS 12
//! PHASE -0.75
//! H 3
//! RZ 3 0.125
//! CX 2 3
//! ```
//!
//! Gate lines are `NAME q0 [q1] [angle]`. Names are `H`, `S`, `SDG`, `RX`,
//! `RY`, `RZ` and `CX` (control first). Rotations are
//! `R_a(angle) = exp(-i angle a / 2)`. `QUBITS` must come before any gate;
//! `PHASE` is optional and defaults to zero.

mod compile;
mod peephole;
mod simulate;

pub use compile::{
    compile_diagonal_layer, compile_evolution, compile_full_evolution, compile_kinetic_layer,
    compile_kinetic_pair, compile_state_prep, convention_report, CompileOptions,
    CountingConvention, ConventionMetrics, Variant,
};
pub use peephole::{cancel_junctions, peephole, simplify};
pub use simulate::simulate_circuit;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rotation axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    Rotation { axis: Axis, qubit: usize, angle: f64 },
    Cx { control: usize, target: usize },
}

impl Gate {
    pub fn rz(qubit: usize, angle: f64) -> Gate {
        Gate::Rotation { axis: Axis::Z, qubit, angle }
    }

    pub fn rx(qubit: usize, angle: f64) -> Gate {
        Gate::Rotation { axis: Axis::X, qubit, angle }
    }

    pub fn ry(qubit: usize, angle: f64) -> Gate {
        Gate::Rotation { axis: Axis::Y, qubit, angle }
    }

    pub fn cx(control: usize, target: usize) -> Gate {
        Gate::Cx { control, target }
    }

    /// Qubits acted on; the second entry is `None` for one-qubit gates.
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) => (q, None),
            Gate::Rotation { qubit, .. } => (qubit, None),
            Gate::Cx { control, target } => (control, Some(target)),
        }
    }

    pub fn touches(&self, q: usize) -> bool {
        let (a, b) = self.qubits();
        a == q || b == Some(q)
    }

    pub fn is_cx(&self) -> bool {
        matches!(self, Gate::Cx { .. })
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            Gate::Rotation { axis, qubit, angle } => Gate::Rotation {
                axis,
                qubit,
                angle: -angle,
            },
            g => g,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::S(q) => write!(f, "S {q}"),
            Gate::Sdg(q) => write!(f, "SDG {q}"),
            Gate::Rotation { axis, qubit, angle } => {
                let name = match axis {
                    Axis::X => "RX",
                    Axis::Y => "RY",
                    Axis::Z => "RZ",
                };
                write!(f, "{name} {qubit} {angle:?}")
            }
            Gate::Cx { control, target } => write!(f, "CX {control} {target}"),
        }
    }
}

/// A gate list on `n_qubits` qubits with a global phase `e^{i phase}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateCircuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    phase: f64,
}

impl GateCircuit {
    pub fn new(n_qubits: usize) -> Self {
        GateCircuit {
            n_qubits,
            gates: Vec::new(),
            phase: 0.0,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let (a, b) = gate.qubits();
        for q in std::iter::once(a).chain(b) {
            if q >= self.n_qubits {
                return Err(Error::IndexOutOfRange {
                    index: q,
                    limit: self.n_qubits,
                });
            }
        }
        if b == Some(a) {
            return Err(Error::InvalidArgument(format!("CX with control = target = {a}")));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn add_phase(&mut self, phase: f64) {
        self.phase += phase;
    }

    /// Appends `other` after `self`.
    pub fn append(&mut self, other: &GateCircuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                actual: other.n_qubits,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        self.phase += other.phase;
        Ok(())
    }

    /// The inverse circuit.
    pub fn inverse(&self) -> GateCircuit {
        GateCircuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            phase: -self.phase,
        }
    }

    pub(crate) fn from_parts(n_qubits: usize, gates: Vec<Gate>, phase: f64) -> Self {
        GateCircuit {
            n_qubits,
            gates,
            phase,
        }
    }

    pub fn metrics(&self) -> CircuitMetrics {
        circuit_metrics(self)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("QUBITS {}\nPHASE {:?}\n", self.n_qubits, self.phase);
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<GateCircuit> {
        text.parse()
    }
}

impl FromStr for GateCircuit {
    type Err = Error;

    fn from_str(text: &str) -> Result<GateCircuit> {
        let mut circ: Option<GateCircuit> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: i + 1, message };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let int = |k: usize| -> Result<usize> {
                fields
                    .get(k)
                    .ok_or_else(|| err(format!("missing field {k}")))?
                    .parse()
                    .map_err(|e| err(format!("bad qubit index: {e}")))
            };
            let real = |k: usize| -> Result<f64> {
                fields
                    .get(k)
                    .ok_or_else(|| err(format!("missing field {k}")))?
                    .parse()
                    .map_err(|e| err(format!("bad angle: {e}")))
            };
            let name = fields[0].to_ascii_uppercase();
            let arity = match name.as_str() {
                "QUBITS" | "H" | "S" | "SDG" | "PHASE" => 2,
                "RX" | "RY" | "RZ" | "CX" => 3,
                other => return Err(err(format!("unknown gate {other}"))),
            };
            if fields.len() != arity {
                return Err(err(format!("{name} takes {} fields", arity - 1)));
            }
            match name.as_str() {
                "QUBITS" => {
                    if circ.is_some() {
                        return Err(err("QUBITS given twice".into()));
                    }
                    circ = Some(GateCircuit::new(int(1)?));
                    continue;
                }
                "PHASE" => {
                    let c = circ.as_mut().ok_or_else(|| err("PHASE before QUBITS".into()))?;
                    c.phase = real(1)?;
                    continue;
                }
                _ => {}
            }
            let gate = match name.as_str() {
                "H" => Gate::H(int(1)?),
                "S" => Gate::S(int(1)?),
                "SDG" => Gate::Sdg(int(1)?),
                "RX" => Gate::rx(int(1)?, real(2)?),
                "RY" => Gate::ry(int(1)?, real(2)?),
                "RZ" => Gate::rz(int(1)?, real(2)?),
                _ => Gate::cx(int(1)?, int(2)?),
            };
            let c = circ.as_mut().ok_or_else(|| err("gate before QUBITS".into()))?;
            c.push(gate).map_err(|e| err(e.to_string()))?;
        }
        circ.ok_or(Error::Parse {
            line: 0,
            message: "no QUBITS line".into(),
        })
    }
}

/// Gate counts and depths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CircuitMetrics {
    pub cnot_count: usize,
    /// Layers of a greedy as-soon-as-possible schedule in which only CNOTs
    /// occupy a layer.
    pub cnot_depth: usize,
    pub total_gates: usize,
    /// The same schedule with every gate occupying a layer.
    pub depth: usize,
}

/// Counts and depths recomputed from the gate list.
pub fn circuit_metrics(circ: &GateCircuit) -> CircuitMetrics {
    let mut cx_level = vec![0usize; circ.n_qubits];
    let mut level = vec![0usize; circ.n_qubits];
    let mut cnot_count = 0;
    for g in &circ.gates {
        match *g {
            Gate::Cx { control, target } => {
                cnot_count += 1;
                let c = cx_level[control].max(cx_level[target]) + 1;
                cx_level[control] = c;
                cx_level[target] = c;
                let d = level[control].max(level[target]) + 1;
                level[control] = d;
                level[target] = d;
            }
            _ => {
                let (q, _) = g.qubits();
                level[q] += 1;
            }
        }
    }
    CircuitMetrics {
        cnot_count,
        cnot_depth: cx_level.into_iter().max().unwrap_or(0),
        total_gates: circ.gates.len(),
        depth: level.into_iter().max().unwrap_or(0),
    }
}
