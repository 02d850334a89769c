use std::fmt;

use crate::error::{Error, Result};

/// One circuit instruction. Angles are in radians.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    SX(usize),
    /// `diag(e^{-i a/2}, e^{i a/2})`
    Rz(usize, f64),
    /// `diag(1, e^{i a})`
    P(usize, f64),
    CX {
        control: usize,
        target: usize,
    },
    /// Multi-controlled NOT; an empty control list is a plain X.
    MCX {
        controls: Vec<usize>,
        target: usize,
    },
    /// Multi-controlled phase; an empty control list is a plain P.
    MCP {
        controls: Vec<usize>,
        target: usize,
        angle: f64,
    },
    Measure {
        qubit: usize,
        clbit: usize,
    },
    Reset(usize),
    Barrier,
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "h",
            Gate::X(_) => "x",
            Gate::SX(_) => "sx",
            Gate::Rz(..) => "rz",
            Gate::P(..) => "p",
            Gate::CX { .. } => "cx",
            Gate::MCX { .. } => "mcx",
            Gate::MCP { .. } => "mcp",
            Gate::Measure { .. } => "measure",
            Gate::Reset(_) => "reset",
            Gate::Barrier => "barrier",
        }
    }

    /// Qubits the instruction acts on (controls first, target last).
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H(q)
            | Gate::X(q)
            | Gate::SX(q)
            | Gate::Rz(q, _)
            | Gate::P(q, _)
            | Gate::Reset(q) => vec![*q],
            Gate::Measure { qubit, .. } => vec![*qubit],
            Gate::CX { control, target } => vec![*control, *target],
            Gate::MCX { controls, target }
            | Gate::MCP {
                controls, target, ..
            } => {
                let mut v = controls.clone();
                v.push(*target);
                v
            }
            Gate::Barrier => Vec::new(),
        }
    }

    pub fn touches(&self, qubit: usize) -> bool {
        match self {
            Gate::Barrier => false,
            _ => self.qubits().contains(&qubit),
        }
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(self, Gate::Measure { .. } | Gate::Reset(_) | Gate::Barrier)
    }

    /// Single-qubit unitary target, if the gate is one.
    pub fn single_qubit(&self) -> Option<usize> {
        match self {
            Gate::H(q) | Gate::X(q) | Gate::SX(q) | Gate::Rz(q, _) | Gate::P(q, _) => Some(*q),
            _ => None,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qs = |v: &[usize]| {
            v.iter()
                .map(|q| format!("q{q}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        match self {
            Gate::Rz(q, a) | Gate::P(q, a) => write!(f, "{}({a:.6}) q{q}", self.name()),
            Gate::MCP { angle, .. } => write!(f, "mcp({angle:.6}) {}", qs(&self.qubits())),
            Gate::Measure { qubit, clbit } => write!(f, "measure q{qubit} -> c{clbit}"),
            Gate::Barrier => write!(f, "barrier"),
            _ => write!(f, "{} {}", self.name(), qs(&self.qubits())),
        }
    }
}

/// An ordered instruction list over `n_qubits` qubits and `n_clbits`
/// classical bits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    n_clbits: usize,
    ops: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, n_clbits: usize) -> Self {
        Self {
            n_qubits,
            n_clbits,
            ops: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_clbits(&self) -> usize {
        self.n_clbits
    }

    pub fn ops(&self) -> &[Gate] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Number of measure instructions.
    pub fn measurement_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|g| matches!(g, Gate::Measure { .. }))
            .count()
    }

    pub fn check(&self, gate: &Gate) -> Result<()> {
        let qubits = gate.qubits();
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
            if qubits[..i].contains(&q) {
                return Err(Error::DuplicateBit(q));
            }
        }
        if let Gate::Measure { clbit, .. } = gate {
            if *clbit >= self.n_clbits {
                return Err(Error::ClbitOutOfRange {
                    index: *clbit,
                    n_clbits: self.n_clbits,
                });
            }
        }
        Ok(())
    }

    pub fn try_push(&mut self, gate: Gate) -> Result<&mut Self> {
        self.check(&gate)?;
        self.ops.push(gate);
        Ok(self)
    }

    /// Append a gate. Panics on out-of-range or repeated indices; use
    /// [`Circuit::try_push`] for unchecked input.
    pub fn push(&mut self, gate: Gate) -> &mut Self {
        if let Err(e) = self.check(&gate) {
            panic!("invalid gate {gate}: {e}");
        }
        self.ops.push(gate);
        self
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> &mut Self {
        for g in gates {
            self.push(g);
        }
        self
    }

    /// Append every instruction of `other`, which must fit this register.
    pub fn append(&mut self, other: &Circuit) -> &mut Self {
        self.extend(other.ops.iter().cloned())
    }

    pub fn h(&mut self, q: usize) -> &mut Self {
        self.push(Gate::H(q))
    }

    pub fn x(&mut self, q: usize) -> &mut Self {
        self.push(Gate::X(q))
    }

    pub fn sx(&mut self, q: usize) -> &mut Self {
        self.push(Gate::SX(q))
    }

    pub fn rz(&mut self, q: usize, angle: f64) -> &mut Self {
        self.push(Gate::Rz(q, angle))
    }

    pub fn p(&mut self, q: usize, angle: f64) -> &mut Self {
        self.push(Gate::P(q, angle))
    }

    pub fn cx(&mut self, control: usize, target: usize) -> &mut Self {
        self.push(Gate::CX { control, target })
    }

    pub fn mcx(&mut self, controls: &[usize], target: usize) -> &mut Self {
        self.push(Gate::MCX {
            controls: controls.to_vec(),
            target,
        })
    }

    pub fn mcp(&mut self, controls: &[usize], target: usize, angle: f64) -> &mut Self {
        self.push(Gate::MCP {
            controls: controls.to_vec(),
            target,
            angle,
        })
    }

    pub fn measure(&mut self, qubit: usize, clbit: usize) -> &mut Self {
        self.push(Gate::Measure { qubit, clbit })
    }

    pub fn reset(&mut self, q: usize) -> &mut Self {
        self.push(Gate::Reset(q))
    }

    pub fn barrier(&mut self) -> &mut Self {
        self.push(Gate::Barrier)
    }

    /// The circuit with all measure, reset and barrier instructions removed.
    pub fn unitary_part(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            n_clbits: self.n_clbits,
            ops: self
                .ops
                .iter()
                .filter(|g| g.is_unitary())
                .cloned()
                .collect(),
        }
    }

    /// Whether any measure or reset is followed by an instruction on the
    /// same qubit (or any later measure overwrites its clbit).
    pub fn has_mid_circuit_measurement(&self) -> bool {
        (0..self.ops.len()).any(|i| match &self.ops[i] {
            Gate::Reset(_) => true,
            Gate::Measure { .. } => !self.is_terminal_measure(i),
            _ => false,
        })
    }

    /// A measure at `index` whose qubit is never touched again and whose
    /// clbit is never rewritten.
    pub(crate) fn is_terminal_measure(&self, index: usize) -> bool {
        let Gate::Measure { qubit, clbit } = self.ops[index] else {
            return false;
        };
        self.ops[index + 1..].iter().all(|g| {
            !g.touches(qubit) && !matches!(g, Gate::Measure { clbit: c, .. } if *c == clbit)
        })
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {} clbits {}", self.n_qubits, self.n_clbits)?;
        for g in &self.ops {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}
