//! Lowering to the `{Rz, SX, X, CX}` basis and peephole optimization.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use crate::error::{Error, Result};
use crate::sim::{Circuit, Gate};

/// Rotations whose angle is within this distance of a multiple of `2 pi`
/// are dropped.
pub const ANGLE_EPS: f64 = 1e-12;

/// A circuit using only `Rz`, `SX`, `X`, `CX`, measure, reset and barrier.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisCircuit(Circuit);

impl BasisCircuit {
    pub fn as_circuit(&self) -> &Circuit {
        &self.0
    }

    pub fn into_circuit(self) -> Circuit {
        self.0
    }

    pub fn ops(&self) -> &[Gate] {
        self.0.ops()
    }
}

fn in_basis(g: &Gate) -> bool {
    matches!(
        g,
        Gate::Rz(..)
            | Gate::SX(_)
            | Gate::X(_)
            | Gate::CX { .. }
            | Gate::Measure { .. }
            | Gate::Reset(_)
            | Gate::Barrier
    )
}

/// `(c, t)` controlled phase via two CX.
fn controlled_phase(c: usize, t: usize, a: f64) -> Vec<Gate> {
    vec![
        Gate::P(c, a / 2.0),
        Gate::CX {
            control: c,
            target: t,
        },
        Gate::P(t, -a / 2.0),
        Gate::CX {
            control: c,
            target: t,
        },
        Gate::P(t, a / 2.0),
    ]
}

/// Expand one gate into gates closer to the basis. Returns the gate itself
/// when it is already a basis gate.
fn expand(g: &Gate) -> Result<Vec<Gate>> {
    Ok(match g {
        Gate::H(q) => vec![
            Gate::Rz(*q, FRAC_PI_2),
            Gate::SX(*q),
            Gate::Rz(*q, FRAC_PI_2),
        ],
        Gate::P(q, a) => vec![Gate::Rz(*q, *a)],
        Gate::MCX { controls, target } => match controls.as_slice() {
            [] => vec![Gate::X(*target)],
            [c] => vec![Gate::CX {
                control: *c,
                target: *target,
            }],
            &[a, b] => {
                let c = *target;
                let t = |q| Gate::P(q, FRAC_PI_4);
                let tdg = |q| Gate::P(q, -FRAC_PI_4);
                let cx = |control, target| Gate::CX { control, target };
                vec![
                    Gate::H(c),
                    cx(b, c),
                    tdg(c),
                    cx(a, c),
                    t(c),
                    cx(b, c),
                    tdg(c),
                    cx(a, c),
                    t(b),
                    t(c),
                    Gate::H(c),
                    cx(a, b),
                    t(a),
                    tdg(b),
                    cx(a, b),
                ]
            }
            more => {
                return Err(Error::UnsupportedArity {
                    gate: "mcx",
                    controls: more.len(),
                })
            }
        },
        Gate::MCP {
            controls,
            target,
            angle,
        } => match controls.as_slice() {
            [] => vec![Gate::P(*target, *angle)],
            [c] => controlled_phase(*c, *target, *angle),
            &[a, b] => {
                let t = *target;
                let mcp = |c: usize, angle| Gate::MCP {
                    controls: vec![c],
                    target: t,
                    angle,
                };
                vec![
                    mcp(b, angle / 2.0),
                    Gate::CX {
                        control: a,
                        target: b,
                    },
                    mcp(b, -angle / 2.0),
                    Gate::CX {
                        control: a,
                        target: b,
                    },
                    mcp(a, angle / 2.0),
                ]
            }
            more => {
                return Err(Error::UnsupportedArity {
                    gate: "mcp",
                    controls: more.len(),
                })
            }
        },
        other => vec![other.clone()],
    })
}

/// Rewrite every gate into the basis; equal to the input up to a global
/// phase. Measurements and resets are kept as they are.
pub fn decompose(circ: &Circuit) -> Result<BasisCircuit> {
    let mut out = Circuit::new(circ.n_qubits(), circ.n_clbits());
    let mut pending: Vec<Gate> = circ.ops().iter().rev().cloned().collect();
    while let Some(g) = pending.pop() {
        if in_basis(&g) {
            out.push(g);
        } else {
            pending.extend(expand(&g)?.into_iter().rev());
        }
    }
    Ok(BasisCircuit(out))
}

/// Map an angle into `(-pi, pi]`.
fn normalize(a: f64) -> f64 {
    if a > -PI && a <= PI {
        return a;
    }
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

fn is_identity_angle(a: f64) -> bool {
    let r = a.rem_euclid(TAU);
    r.min(TAU - r) < ANGLE_EPS
}

/// Whether `g` blocks peephole moves across it on `qubit`.
fn on_wire(g: &Gate, qubit: usize) -> bool {
    matches!(g, Gate::Barrier) || g.touches(qubit)
}

/// Peephole rewrites applied to a fixed point:
/// merge adjacent `Rz`, cancel adjacent `X` pairs, move `X` past `Rz` as
/// `X Rz(a) = Rz(-a) X`, and drop identity rotations. Adjacency is per
/// qubit wire; measure, reset and barrier block every rewrite.
pub fn optimize(circ: &BasisCircuit) -> BasisCircuit {
    let src = circ.as_circuit();
    let mut ops: Vec<Option<Gate>> = src.ops().iter().cloned().map(Some).collect();

    loop {
        let mut changed = false;
        for i in 0..ops.len() {
            let Some(g) = ops[i].clone() else { continue };
            if let Gate::Rz(_, a) = g {
                if is_identity_angle(a) {
                    ops[i] = None;
                    changed = true;
                    continue;
                }
            }
            let q = match g {
                Gate::Rz(q, _) | Gate::X(q) => q,
                _ => continue,
            };
            let Some(j) =
                (i + 1..ops.len()).find(|&j| ops[j].as_ref().is_some_and(|h| on_wire(h, q)))
            else {
                continue;
            };
            let next = ops[j].clone().expect("found above");
            match (g, next) {
                (Gate::Rz(_, a), Gate::Rz(_, b)) => {
                    ops[i] = Some(Gate::Rz(q, normalize(a + b)));
                    ops[j] = None;
                }
                (Gate::X(_), Gate::X(_)) => {
                    ops[i] = None;
                    ops[j] = None;
                }
                (Gate::X(_), Gate::Rz(_, a)) => {
                    ops[i] = Some(Gate::Rz(q, normalize(-a)));
                    ops[j] = Some(Gate::X(q));
                }
                _ => continue,
            }
            changed = true;
        }
        ops.retain(Option::is_some);
        if !changed {
            break;
        }
    }

    let mut out = Circuit::new(src.n_qubits(), src.n_clbits());
    out.extend(ops.into_iter().flatten());
    BasisCircuit(out)
}

/// `optimize(decompose(circ))`
pub fn transpile(circ: &Circuit) -> Result<BasisCircuit> {
    decompose(circ).map(|b| optimize(&b))
}

/// Gate tally and depth of a circuit.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GateCounts {
    pub counts: BTreeMap<&'static str, usize>,
    pub depth: usize,
}

impl GateCounts {
    pub fn get(&self, name: &str) -> usize {
        self.counts.get(name).copied().unwrap_or(0)
    }

    pub fn rz(&self) -> usize {
        self.get("rz")
    }

    pub fn sx(&self) -> usize {
        self.get("sx")
    }

    pub fn cx(&self) -> usize {
        self.get("cx")
    }

    pub fn x(&self) -> usize {
        self.get("x")
    }
}

impl std::fmt::Display for GateCounts {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "SX: {}, Rz: {}, X: {}, CX: {}, measure: {}, reset: {}, depth {}",
            self.sx(),
            self.rz(),
            self.x(),
            self.cx(),
            self.get("measure"),
            self.get("reset"),
            self.depth
        )
    }
}

/// Count instructions by kind. Depth is the longest chain of instructions
/// sharing a qubit or clbit; every instruction except barriers counts as
/// one layer, measurements and resets included.
pub fn gate_counts(circ: &Circuit) -> GateCounts {
    let mut counts = BTreeMap::new();
    let mut qubit_level = vec![0usize; circ.n_qubits()];
    let mut clbit_level = vec![0usize; circ.n_clbits()];
    for g in circ.ops() {
        if matches!(g, Gate::Barrier) {
            continue;
        }
        *counts.entry(g.name()).or_insert(0) += 1;
        let qubits = g.qubits();
        let clbit = match g {
            Gate::Measure { clbit, .. } => Some(*clbit),
            _ => None,
        };
        let level = 1 + qubits
            .iter()
            .map(|&q| qubit_level[q])
            .chain(clbit.map(|c| clbit_level[c]))
            .max()
            .unwrap_or(0);
        for q in qubits {
            qubit_level[q] = level;
        }
        if let Some(c) = clbit {
            clbit_level[c] = level;
        }
    }
    let depth = qubit_level
        .iter()
        .chain(&clbit_level)
        .copied()
        .max()
        .unwrap_or(0);
    GateCounts { counts, depth }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{equal_up_to_global_phase, unitary_matrix};

    fn same_unitary(a: &Circuit, b: &Circuit) -> bool {
        equal_up_to_global_phase(
            &unitary_matrix(a).unwrap(),
            &unitary_matrix(b).unwrap(),
            1e-10,
        )
    }

    #[test]
    fn hadamard_and_phase() {
        let mut c = Circuit::new(1, 0);
        c.h(0);
        let b = decompose(&c).unwrap();
        let n = gate_counts(b.as_circuit());
        assert_eq!((n.rz(), n.sx()), (2, 1));
        assert!(same_unitary(&c, b.as_circuit()));

        let mut c = Circuit::new(1, 0);
        c.p(0, 0.37);
        let b = decompose(&c).unwrap();
        assert_eq!(b.ops(), &[Gate::Rz(0, 0.37)]);
        assert!(same_unitary(&c, b.as_circuit()));
    }

    #[test]
    fn controlled_gates_match() {
        let mut c = Circuit::new(3, 0);
        c.h(0)
            .h(1)
            .h(2)
            .mcx(&[0, 1], 2)
            .mcp(&[0], 1, 0.9)
            .mcp(&[2, 0], 1, -1.3)
            .mcx(&[2], 0)
            .mcp(&[], 2, 0.2);
        let b = decompose(&c).unwrap();
        assert!(b.ops().iter().all(in_basis));
        assert!(same_unitary(&c, b.as_circuit()));
        assert!(same_unitary(&c, optimize(&b).as_circuit()));
    }

    #[test]
    fn too_many_controls() {
        let mut c = Circuit::new(4, 0);
        c.mcx(&[0, 1, 2], 3);
        assert!(matches!(
            decompose(&c),
            Err(Error::UnsupportedArity { controls: 3, .. })
        ));
    }

    #[test]
    fn peephole_rules() {
        let basis = |c: Circuit| optimize(&decompose(&c).unwrap());

        let mut c = Circuit::new(1, 0);
        c.rz(0, 0.4).rz(0, -0.4);
        assert!(basis(c).ops().is_empty());

        let mut c = Circuit::new(1, 0);
        c.x(0).rz(0, 0.4).x(0);
        assert_eq!(basis(c).ops(), &[Gate::Rz(0, -0.4)]);

        let mut c = Circuit::new(1, 0);
        c.rz(0, TAU);
        assert!(basis(c).ops().is_empty());

        // Gates on other wires do not block.
        let mut c = Circuit::new(2, 0);
        c.rz(0, 0.1).sx(1).rz(0, 0.2);
        assert_eq!(basis(c).ops().len(), 2);

        // Measurement blocks.
        let mut c = Circuit::new(1, 1);
        c.rz(0, 0.1).measure(0, 0).rz(0, 0.2);
        assert_eq!(basis(c).ops().len(), 3);
    }

    #[test]
    fn optimize_is_idempotent() {
        let mut c = Circuit::new(2, 1);
        c.h(0)
            .p(0, 0.3)
            .x(0)
            .p(0, 1.1)
            .x(1)
            .cx(0, 1)
            .x(0)
            .p(1, 0.5)
            .h(1)
            .measure(1, 0);
        let once = optimize(&decompose(&c).unwrap());
        assert_eq!(optimize(&once), once);
        assert!(same_unitary(&c, once.as_circuit()));
    }

    #[test]
    fn depth_counts_measurement() {
        let mut c = Circuit::new(2, 2);
        c.h(0).cx(0, 1).measure(0, 0).measure(1, 1);
        assert_eq!(gate_counts(&c).depth, 3);
        let mut c = Circuit::new(1, 1);
        c.barrier().measure(0, 0);
        let n = gate_counts(&c);
        assert_eq!((n.depth, n.get("barrier")), (1, 0));
    }
}
