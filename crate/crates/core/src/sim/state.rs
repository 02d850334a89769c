use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::Gate;
use crate::error::{Error, Result};

type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense `2^n` amplitude vector. Qubit `k` is bit `k` of the amplitude index
/// (little-endian).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>`
    pub fn zero(n_qubits: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Self { n_qubits, amps }
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[index] = ONE;
        Self { n_qubits, amps }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(amps.len()));
        }
        Ok(Self {
            n_qubits: amps.len().trailing_zeros() as usize,
            amps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(Complex64::norm_sqr).collect()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: self.n_qubits,
            })
        } else {
            Ok(())
        }
    }

    fn control_mask(&self, controls: &[usize], target: usize) -> Result<usize> {
        self.check_qubit(target)?;
        let mut mask = 0usize;
        for &c in controls {
            self.check_qubit(c)?;
            if c == target || mask & (1 << c) != 0 {
                return Err(Error::DuplicateBit(c));
            }
            mask |= 1 << c;
        }
        Ok(mask)
    }

    /// Apply `m` to `target` on the subspace where every bit in `controls`
    /// is set.
    fn apply_matrix(&mut self, m: &Matrix2, controls: usize, target: usize) {
        let bit = 1 << target;
        for i in 0..self.amps.len() {
            if i & bit != 0 || i & controls != controls {
                continue;
            }
            let (a0, a1) = (self.amps[i], self.amps[i | bit]);
            self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    /// Apply a unitary gate.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        match gate {
            Gate::H(q) | Gate::X(q) | Gate::SX(q) | Gate::Rz(q, _) | Gate::P(q, _) => {
                self.check_qubit(*q)?;
                self.apply_matrix(&single_qubit_matrix(gate), 0, *q);
            }
            Gate::CX { control, target } => {
                let mask = self.control_mask(&[*control], *target)?;
                self.apply_matrix(&X_MATRIX, mask, *target);
            }
            Gate::MCX { controls, target } => {
                let mask = self.control_mask(controls, *target)?;
                self.apply_matrix(&X_MATRIX, mask, *target);
            }
            Gate::MCP {
                controls,
                target,
                angle,
            } => {
                let mask = self.control_mask(controls, *target)? | (1 << target);
                let phase = Complex64::from_polar(1.0, *angle);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a *= phase;
                    }
                }
            }
            Gate::Measure { .. } | Gate::Reset(_) | Gate::Barrier => {
                if !matches!(gate, Gate::Barrier) {
                    return Err(Error::NotUnitary(gate.name()));
                }
            }
        }
        Ok(())
    }

    /// Probability of reading `1` on qubit `q`.
    pub fn prob_one(&self, q: usize) -> f64 {
        let bit = 1 << q;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Project qubit `q` onto `outcome` and renormalize. `prob` is the
    /// probability of that outcome and must be positive.
    pub fn collapse(&mut self, q: usize, outcome: bool, prob: f64) {
        let bit = 1 << q;
        let scale = 1.0 / prob.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i & bit) != 0) == outcome {
                *a *= scale;
            } else {
                *a = ZERO;
            }
        }
    }

    /// Flip qubit `q` without validation (used after a collapse to reset).
    pub(crate) fn flip(&mut self, q: usize) {
        self.apply_matrix(&X_MATRIX, 0, q);
    }
}

const X_MATRIX: Matrix2 = [[ZERO, ONE], [ONE, ZERO]];

/// 2x2 matrix of a single-qubit gate. Panics for anything else.
pub fn single_qubit_matrix(gate: &Gate) -> Matrix2 {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    match *gate {
        Gate::H(_) => [[h, h], [h, -h]],
        Gate::X(_) => X_MATRIX,
        Gate::SX(_) => {
            let p = Complex64::new(0.5, 0.5);
            let m = Complex64::new(0.5, -0.5);
            [[p, m], [m, p]]
        }
        Gate::Rz(_, a) => [
            [Complex64::from_polar(1.0, -a / 2.0), ZERO],
            [ZERO, Complex64::from_polar(1.0, a / 2.0)],
        ],
        Gate::P(_, a) => [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, a)]],
        _ => panic!("{} is not a single-qubit gate", gate.name()),
    }
}
