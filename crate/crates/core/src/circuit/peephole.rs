//! Local simplification that never changes the circuit unitary.
//!
//! Two passes alternate until neither changes anything:
//!
//! - cancellation: each gate is moved backwards past gates it commutes with
//!   until it meets its inverse (removed together), a rotation about the same
//!   axis (merged), or a gate that blocks it
//! - junctions: `CX(x,y); H x; H y; CX(y,x)` with nothing else on `x` or `y`
//!   in between becomes `H x; H y`, because Hadamards on both qubits reverse
//!   a CNOT

use super::{Axis, Gate, GateCircuit};

const ANGLE_EPS: f64 = 1e-14;

fn is_diagonal(g: &Gate) -> bool {
    matches!(
        g,
        Gate::S(_) | Gate::Sdg(_) | Gate::Rotation { axis: Axis::Z, .. }
    )
}

fn is_x_type(g: &Gate) -> bool {
    matches!(g, Gate::Rotation { axis: Axis::X, .. })
}

/// Whether `a` and `b` commute by one of the local rules. `false` means
/// "not known to commute".
fn commute(a: &Gate, b: &Gate) -> bool {
    let (a0, a1) = a.qubits();
    let (b0, b1) = b.qubits();
    let disjoint = !b.touches(a0) && a1.is_none_or(|q| !b.touches(q));
    if disjoint {
        return true;
    }
    match (*a, *b) {
        (
            Gate::Cx {
                control: c1,
                target: t1,
            },
            Gate::Cx {
                control: c2,
                target: t2,
            },
        ) => c1 != t2 && c2 != t1,
        (Gate::Cx { control, target }, g) | (g, Gate::Cx { control, target }) => {
            let q = g.qubits().0;
            (q == control && is_diagonal(&g)) || (q == target && is_x_type(&g))
        }
        _ => {
            debug_assert_eq!((a0, a1, b1), (b0, None, None));
            let same_kind = |x: &Gate, y: &Gate| match (x, y) {
                (Gate::Rotation { axis: p, .. }, Gate::Rotation { axis: q, .. }) => p == q,
                _ => false,
            };
            (is_diagonal(a) && is_diagonal(b)) || same_kind(a, b)
        }
    }
}

enum Fuse {
    Cancel,
    Merge(Gate),
}

fn fuse(earlier: &Gate, later: &Gate) -> Option<Fuse> {
    match (*earlier, *later) {
        (Gate::H(p), Gate::H(q)) if p == q => Some(Fuse::Cancel),
        (Gate::S(p), Gate::Sdg(q)) | (Gate::Sdg(p), Gate::S(q)) if p == q => Some(Fuse::Cancel),
        (
            Gate::Cx {
                control: c1,
                target: t1,
            },
            Gate::Cx {
                control: c2,
                target: t2,
            },
        ) if c1 == c2 && t1 == t2 => Some(Fuse::Cancel),
        (
            Gate::Rotation {
                axis: a1,
                qubit: q1,
                angle: x1,
            },
            Gate::Rotation {
                axis: a2,
                qubit: q2,
                angle: x2,
            },
        ) if a1 == a2 && q1 == q2 => {
            let angle = x1 + x2;
            if angle.abs() < ANGLE_EPS {
                Some(Fuse::Cancel)
            } else {
                Some(Fuse::Merge(Gate::Rotation {
                    axis: a1,
                    qubit: q1,
                    angle,
                }))
            }
        }
        _ => None,
    }
}

fn is_identity(g: &Gate) -> bool {
    matches!(g, Gate::Rotation { angle, .. } if angle.abs() < ANGLE_EPS)
}

/// One cancellation sweep. Returns the number of gates removed.
fn cancel_pass(circ: &mut GateCircuit) -> usize {
    let n = circ.n_qubits();
    let before = circ.gates.len();
    let mut out: Vec<Option<Gate>> = Vec::with_capacity(before);
    // indices into `out` of live gates touching each qubit, in order
    let mut wires: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &g in &circ.gates {
        if is_identity(&g) {
            continue;
        }
        let (q0, q1) = g.qubits();
        let mut handled = false;
        // walk back through gates sharing a qubit with g, newest first
        let (mut i0, mut i1) = (wires[q0].len(), q1.map_or(0, |q| wires[q].len()));
        loop {
            let c0 = if i0 > 0 { Some(wires[q0][i0 - 1]) } else { None };
            let c1 = match q1 {
                Some(q) if i1 > 0 => Some(wires[q][i1 - 1]),
                _ => None,
            };
            let idx = match (c0, c1) {
                (None, None) => break,
                (Some(a), None) => a,
                (None, Some(b)) => b,
                (Some(a), Some(b)) => a.max(b),
            };
            if c0 == Some(idx) {
                i0 -= 1;
            }
            if c1 == Some(idx) {
                i1 -= 1;
            }
            let h = out[idx].expect("wire lists hold live gates");
            if let Some(f) = fuse(&h, &g) {
                match f {
                    Fuse::Cancel => {
                        out[idx] = None;
                        let (h0, h1) = h.qubits();
                        for q in std::iter::once(h0).chain(h1) {
                            wires[q].retain(|&k| k != idx);
                        }
                    }
                    Fuse::Merge(m) => out[idx] = Some(m),
                }
                handled = true;
                break;
            }
            if !commute(&h, &g) {
                break;
            }
        }
        if !handled {
            let k = out.len();
            out.push(Some(g));
            wires[q0].push(k);
            if let Some(q) = q1 {
                wires[q].push(k);
            }
        }
    }
    circ.gates = out.into_iter().flatten().collect();
    before - circ.gates.len()
}

/// Removes every CNOT pair joined by Hadamards on both wires. Returns the
/// number of CNOTs removed.
pub fn cancel_junctions(circ: &mut GateCircuit) -> usize {
    let n = circ.n_qubits();
    let gates = &circ.gates;
    // previous gate index on each wire, per gate and wire slot
    let mut last: Vec<Option<usize>> = vec![None; n];
    let mut prev: Vec<[Option<usize>; 2]> = Vec::with_capacity(gates.len());
    for (k, g) in gates.iter().enumerate() {
        let (q0, q1) = g.qubits();
        prev.push([last[q0], q1.and_then(|q| last[q])]);
        last[q0] = Some(k);
        if let Some(q) = q1 {
            last[q] = Some(k);
        }
    }
    let mut dead = vec![false; gates.len()];
    let mut removed = 0;
    for k in 0..gates.len() {
        let Gate::Cx { control: y, target: x } = gates[k] else {
            continue;
        };
        // prev[k][0] is on the control wire y, prev[k][1] on the target wire x
        let (Some(hy), Some(hx)) = (prev[k][0], prev[k][1]) else {
            continue;
        };
        if gates[hy] != Gate::H(y) || gates[hx] != Gate::H(x) {
            continue;
        }
        let (Some(j), Some(j2)) = (prev[hy][0], prev[hx][0]) else {
            continue;
        };
        if j != j2 || dead[j] || gates[j] != Gate::cx(x, y) {
            continue;
        }
        dead[j] = true;
        dead[k] = true;
        removed += 2;
    }
    if removed > 0 {
        let kept = gates
            .iter()
            .zip(&dead)
            .filter(|(_, &d)| !d)
            .map(|(g, _)| *g)
            .collect();
        circ.gates = kept;
    }
    removed
}

/// Commutation-aware cancellation and merging only.
pub fn simplify(circ: &GateCircuit) -> GateCircuit {
    let mut out = circ.clone();
    while cancel_pass(&mut out) > 0 {}
    out
}

/// Full peephole optimization: cancellation, merging and CNOT junctions.
pub fn peephole(circ: &GateCircuit) -> GateCircuit {
    let mut out = circ.clone();
    loop {
        let a = cancel_pass(&mut out);
        let b = cancel_junctions(&mut out);
        if a == 0 && b == 0 {
            break;
        }
    }
    out
}
