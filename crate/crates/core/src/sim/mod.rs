//! Dense statevector simulation with mid-circuit measurement and reset.
//!
//! Two execution paths are provided. [`run_exact`] enumerates every
//! measurement branch and returns the exact outcome distribution;
//! [`sample_counts`] draws shots. Terminal measurements (qubit never touched
//! again) are not branched on: their outcomes are read off the final
//! amplitudes, which is equivalent and keeps wide parallel circuits cheap.

mod circuit;
mod counts;
mod state;

pub use circuit::{Circuit, Gate};
pub use counts::{format_bits, marginal_counts, parse_bits, prob_of, Counts, Distribution};
pub use state::{single_qubit_matrix, StateVector};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

/// Apply one unitary gate to `state`.
pub fn apply_gate(state: &mut StateVector, gate: &Gate) -> Result<()> {
    state.apply(gate)
}

/// Run the unitary part of `circ` on `|0...0>`.
pub fn run_statevector(circ: &Circuit) -> Result<StateVector> {
    let mut s = StateVector::zero(circ.n_qubits());
    for g in circ.ops().iter().filter(|g| g.is_unitary()) {
        s.apply(g)?;
    }
    Ok(s)
}

/// Full unitary of the measurement-free part, column `j` being the image of
/// basis state `|j>`. Intended for small circuits.
pub fn unitary_matrix(circ: &Circuit) -> Result<Vec<Vec<Complex64>>> {
    let dim = 1usize << circ.n_qubits();
    let unitary = circ.unitary_part();
    (0..dim)
        .map(|j| {
            let mut s = StateVector::basis(circ.n_qubits(), j);
            for g in unitary.ops() {
                s.apply(g)?;
            }
            Ok(s.amplitudes().to_vec())
        })
        .collect()
}

/// Whether two column-major unitaries agree up to a global phase.
pub fn equal_up_to_global_phase(a: &[Vec<Complex64>], b: &[Vec<Complex64>], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    // Phase reference: the largest entry of `a`.
    let mut best = (0, 0, 0.0);
    for (j, col) in a.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            if z.norm() > best.2 {
                best = (j, i, z.norm());
            }
        }
    }
    let (j, i, _) = best;
    if b[j][i].norm() < 1e-12 {
        return false;
    }
    let phase = a[j][i] / b[j][i];
    let phase = phase / phase.norm();
    a.iter().zip(b).all(|(ca, cb)| {
        ca.len() == cb.len() && ca.iter().zip(cb).all(|(x, y)| (x - phase * y).norm() < tol)
    })
}

/// Exact outcome distribution of `circ` by branching on every non-terminal
/// measurement and reset.
pub fn run_exact(circ: &Circuit) -> Result<Distribution> {
    let ops = circ.ops();
    let terminal: Vec<bool> = (0..ops.len())
        .map(|i| circ.is_terminal_measure(i))
        .collect();
    let mut dist = Distribution::new(circ.n_clbits());

    struct Branch {
        pc: usize,
        state: StateVector,
        weight: f64,
        creg: u64,
        deferred: Vec<(usize, usize)>,
    }

    let mut stack = vec![Branch {
        pc: 0,
        state: StateVector::zero(circ.n_qubits()),
        weight: 1.0,
        creg: 0,
        deferred: Vec::new(),
    }];

    while let Some(mut b) = stack.pop() {
        let mut forked = false;
        while b.pc < ops.len() {
            let op = &ops[b.pc];
            b.pc += 1;
            match *op {
                Gate::Barrier => {}
                Gate::Measure { qubit, clbit } if terminal[b.pc - 1] => {
                    b.deferred.push((qubit, clbit))
                }
                Gate::Measure { qubit, clbit } => {
                    let p1 = b.state.prob_one(qubit);
                    for (outcome, p) in [(false, 1.0 - p1), (true, p1)] {
                        if p <= 0.0 {
                            continue;
                        }
                        let mut state = b.state.clone();
                        state.collapse(qubit, outcome, p);
                        let creg = (b.creg & !(1 << clbit)) | ((outcome as u64) << clbit);
                        stack.push(Branch {
                            pc: b.pc,
                            state,
                            weight: b.weight * p,
                            creg,
                            deferred: b.deferred.clone(),
                        });
                    }
                    forked = true;
                    break;
                }
                Gate::Reset(qubit) => {
                    let p1 = b.state.prob_one(qubit);
                    for (outcome, p) in [(false, 1.0 - p1), (true, p1)] {
                        if p <= 0.0 {
                            continue;
                        }
                        let mut state = b.state.clone();
                        state.collapse(qubit, outcome, p);
                        if outcome {
                            state.flip(qubit);
                        }
                        stack.push(Branch {
                            pc: b.pc,
                            state,
                            weight: b.weight * p,
                            creg: b.creg,
                            deferred: b.deferred.clone(),
                        });
                    }
                    forked = true;
                    break;
                }
                _ => b.state.apply(op)?,
            }
        }
        if forked {
            continue;
        }
        if b.deferred.is_empty() {
            dist.add(b.creg, b.weight);
            continue;
        }
        for (index, amp) in b.state.amplitudes().iter().enumerate() {
            let p = amp.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let creg = b.deferred.iter().fold(b.creg, |acc, &(q, c)| {
                (acc & !(1 << c)) | ((((index >> q) & 1) as u64) << c)
            });
            dist.add(creg, b.weight * p);
        }
    }
    Ok(dist)
}

/// How shots are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampler {
    /// Draw from the exact distribution when every measurement is terminal,
    /// otherwise simulate one trajectory per shot.
    #[default]
    Auto,
    /// One collapsed trajectory per shot.
    Trajectory,
    /// Draw i.i.d. from [`run_exact`]'s distribution.
    Distribution,
}

/// `shots` samples of `circ`, reproducible for a given `seed`.
pub fn sample_counts(circ: &Circuit, shots: u64, seed: u64) -> Result<Counts> {
    sample_counts_with(circ, shots, seed, Sampler::Auto)
}

pub fn sample_counts_with(
    circ: &Circuit,
    shots: u64,
    seed: u64,
    sampler: Sampler,
) -> Result<Counts> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let use_trajectories = match sampler {
        Sampler::Auto => circ.has_mid_circuit_measurement(),
        Sampler::Trajectory => true,
        Sampler::Distribution => false,
    };
    if use_trajectories {
        let mut counts = Counts::new(circ.n_clbits());
        for _ in 0..shots {
            counts.add(run_trajectory(circ, &mut rng)?, 1);
        }
        return Ok(counts);
    }

    let dist = run_exact(circ)?;
    let mut cumulative = Vec::new();
    let mut acc = 0.0;
    for (k, p) in dist.iter() {
        acc += p;
        cumulative.push((k, acc));
    }
    let mut counts = Counts::new(circ.n_clbits());
    for _ in 0..shots {
        let r = rng.random::<f64>() * acc;
        let i = cumulative
            .partition_point(|&(_, c)| c <= r)
            .min(cumulative.len() - 1);
        counts.add(cumulative[i].0, 1);
    }
    Ok(counts)
}

fn run_trajectory(circ: &Circuit, rng: &mut impl Rng) -> Result<u64> {
    let mut state = StateVector::zero(circ.n_qubits());
    let mut creg = 0u64;
    for op in circ.ops() {
        match *op {
            Gate::Barrier => {}
            Gate::Measure { qubit, clbit } => {
                let outcome = collapse_random(&mut state, qubit, rng);
                creg = (creg & !(1 << clbit)) | ((outcome as u64) << clbit);
            }
            Gate::Reset(qubit) => {
                if collapse_random(&mut state, qubit, rng) {
                    state.flip(qubit);
                }
            }
            _ => state.apply(op)?,
        }
    }
    Ok(creg)
}

fn collapse_random(state: &mut StateVector, qubit: usize, rng: &mut impl Rng) -> bool {
    let p1 = state.prob_one(qubit);
    let outcome = rng.random::<f64>() < p1;
    let p = if outcome { p1 } else { 1.0 - p1 };
    state.collapse(qubit, outcome, p);
    outcome
}

/// Per-circuit seed from a master seed and the circuit's index, so results
/// do not depend on execution order.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_add(0x51_7c_c1_b7_27_22_0a_95)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn hadamard_measure_is_fair() {
        let mut c = Circuit::new(1, 1);
        c.h(0).measure(0, 0);
        let d = run_exact(&c).unwrap();
        assert!((d.get(0) - 0.5).abs() < 1e-12);
        assert!((d.get(1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn deterministic_sampling() {
        let mut c = Circuit::new(1, 1);
        c.x(0).measure(0, 0);
        let counts = sample_counts(&c, 50, 1).unwrap();
        assert_eq!(counts.to_bitstrings(), vec![("1".to_string(), 50)]);

        let mut h = Circuit::new(1, 1);
        h.h(0).measure(0, 0);
        assert_eq!(
            sample_counts(&h, 100, 9).unwrap(),
            sample_counts(&h, 100, 9).unwrap()
        );
    }

    #[test]
    fn hadamard_sampling_converges() {
        let mut c = Circuit::new(1, 1);
        c.h(0).measure(0, 0);
        let counts = sample_counts(&c, 32_000, 20_240_611).unwrap();
        let p0 = counts.prob_of(0, false).unwrap();
        assert!((p0 - 0.5).abs() < 0.02, "p0 = {p0}");
    }

    #[test]
    fn reset_returns_to_zero() {
        let mut c = Circuit::new(1, 2);
        c.h(0).measure(0, 0).reset(0).measure(0, 1);
        let d = run_exact(&c).unwrap();
        assert!((d.get(0b00) - 0.5).abs() < 1e-12);
        assert!((d.get(0b01) - 0.5).abs() < 1e-12);
        assert!((d.total() - 1.0).abs() < 1e-12);
        let counts = sample_counts(&c, 200, 3).unwrap();
        assert_eq!(counts.marginal(&[1]).unwrap().get(0), 200);
    }

    #[test]
    fn mid_circuit_measurement_decoheres() {
        // H, measure, H: the second measurement is uniform regardless of
        // the first.
        let mut c = Circuit::new(1, 2);
        c.h(0).measure(0, 0).h(0).measure(0, 1);
        let d = run_exact(&c).unwrap();
        for k in 0..4 {
            assert!((d.get(k) - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn entangled_terminal_measurements() {
        let mut c = Circuit::new(2, 2);
        c.h(0).cx(0, 1).measure(0, 0).measure(1, 1);
        let d = run_exact(&c).unwrap();
        assert!((d.get(0b00) - 0.5).abs() < 1e-12);
        assert!((d.get(0b11) - 0.5).abs() < 1e-12);
        assert_eq!(d.get(0b01), 0.0);
    }

    #[test]
    fn samplers_agree_statistically() {
        let mut c = Circuit::new(2, 3);
        c.h(0)
            .p(0, 0.9)
            .h(0)
            .measure(0, 0)
            .h(1)
            .cx(1, 0)
            .measure(0, 1)
            .measure(1, 2);
        let exact = run_exact(&c).unwrap();
        let shots = 20_000u64;
        for sampler in [Sampler::Trajectory, Sampler::Distribution] {
            let counts = sample_counts_with(&c, shots, 77, sampler).unwrap();
            assert_eq!(counts.total(), shots);
            for (k, p) in exact.iter() {
                let f = counts.get(k) as f64 / shots as f64;
                let sigma = (p * (1.0 - p) / shots as f64).sqrt();
                assert!(
                    (f - p).abs() <= 4.0 * sigma + 1e-12,
                    "{sampler:?} {k}: {f} vs {p}"
                );
            }
        }
    }

    #[test]
    fn phase_kickback_distribution() {
        let mut c = Circuit::new(1, 1);
        c.h(0).p(0, PI / 3.0).h(0).measure(0, 0);
        let d = run_exact(&c).unwrap();
        assert!((d.get(0) - (PI / 6.0).cos().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
        assert_eq!(derive_seed(5, 7), derive_seed(5, 7));
    }

    #[test]
    fn global_phase_comparison() {
        let mut a = Circuit::new(1, 0);
        a.h(0);
        let mut b = Circuit::new(1, 0);
        b.rz(0, PI / 2.0).sx(0).rz(0, PI / 2.0);
        let ua = unitary_matrix(&a).unwrap();
        let ub = unitary_matrix(&b).unwrap();
        assert!(equal_up_to_global_phase(&ua, &ub, 1e-12));
        let mut x = Circuit::new(1, 0);
        x.x(0);
        assert!(!equal_up_to_global_phase(
            &ua,
            &unitary_matrix(&x).unwrap(),
            1e-6
        ));
    }
}
