//! Quantum-neuron circuits and their closed-form activations.
//!
//! A neuron compares phase-encoded inputs `theta` with phase-encoded weights
//! `gamma`. For `N = 2^n` entries the activation is
//! `|<Gamma|Theta>|^2 = |sum_j exp(i (theta_j - gamma_j))|^2 / N^2`.
//! The two-entry case is realized on a single qubit without an ancilla and
//! is read out on `|0>`; the four-entry case uses two data qubits and an
//! ancilla read out on `|1>`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::encoding::{gray_to_angle_value, mask_1d, mask_2d, AngleVector};
use crate::error::{Error, Result};
use crate::image::{Direction, GrayImage};
use crate::sim::{Circuit, Gate};

/// Input and weight angles of one neuron evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuronSpec {
    theta: AngleVector,
    gamma: AngleVector,
}

impl NeuronSpec {
    pub fn new(theta: AngleVector, gamma: AngleVector) -> Result<Self> {
        if !theta.len().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(theta.len()));
        }
        if theta.len() != gamma.len() {
            return Err(Error::WrongLength {
                expected: theta.len(),
                got: gamma.len(),
            });
        }
        Ok(Self { theta, gamma })
    }

    pub fn theta(&self) -> &[f64] {
        self.theta.as_slice()
    }

    pub fn gamma(&self) -> &[f64] {
        self.gamma.as_slice()
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// `theta_j - gamma_j`
    pub fn lambda(&self) -> Vec<f64> {
        self.theta()
            .iter()
            .zip(self.gamma())
            .map(|(t, g)| t - g)
            .collect()
    }

    /// Closed-form activation `|sum_j exp(i lambda_j)|^2 / N^2`.
    pub fn activation(&self) -> f64 {
        let sum: Complex64 = self
            .lambda()
            .iter()
            .map(|&l| Complex64::from_polar(1.0, l))
            .sum();
        sum.norm_sqr() / (self.len() * self.len()) as f64
    }
}

fn log2_exact(n: usize) -> Result<usize> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    Ok(n.trailing_zeros() as usize)
}

/// Diagonal phase unitary `U(angles)` on `qubits`, with the phase of basis
/// state 0 factored out as a global phase. Each basis state `j > 0` gets
/// X-gates on its 0-bits, a multi-controlled phase of `angles[j] - angles[0]`,
/// and the undo X-gates.
fn diagonal_phase(angles: &[f64], qubits: &[usize], sign: f64) -> Vec<Gate> {
    let n = qubits.len();
    let (controls, target) = qubits.split_at(n - 1);
    let mut gates = Vec::new();
    for (j, &a) in angles.iter().enumerate().skip(1) {
        let flips: Vec<usize> = (0..n)
            .filter(|k| j & (1 << k) == 0)
            .map(|k| qubits[k])
            .collect();
        gates.extend(flips.iter().map(|&q| Gate::X(q)));
        gates.push(Gate::MCP {
            controls: controls.to_vec(),
            target: target[0],
            angle: sign * (a - angles[0]),
        });
        gates.extend(flips.iter().map(|&q| Gate::X(q)));
    }
    gates
}

/// `U(theta) H^n` on `qubits`; basis index bit `k` lives on `qubits[k]`.
pub fn input_unitary(theta: &[f64], qubits: &[usize]) -> Result<Vec<Gate>> {
    let n = log2_exact(theta.len())?;
    if qubits.len() != n {
        return Err(Error::WrongLength {
            expected: n,
            got: qubits.len(),
        });
    }
    let mut gates: Vec<Gate> = qubits.iter().map(|&q| Gate::H(q)).collect();
    gates.extend(diagonal_phase(theta, qubits, 1.0));
    Ok(gates)
}

/// `X^n H^n U(gamma)^dagger` on `qubits`: the conjugated phase factors in
/// reverse order, then Hadamards, then X-gates so that the overlap lands on
/// `|1...1>`.
pub fn weight_unitary(gamma: &[f64], qubits: &[usize]) -> Result<Vec<Gate>> {
    let n = log2_exact(gamma.len())?;
    if qubits.len() != n {
        return Err(Error::WrongLength {
            expected: n,
            got: qubits.len(),
        });
    }
    let mut gates = diagonal_phase(gamma, qubits, -1.0);
    gates.reverse();
    gates.extend(qubits.iter().map(|&q| Gate::H(q)));
    gates.extend(qubits.iter().map(|&q| Gate::X(q)));
    Ok(gates)
}

/// Input-state fragment on `log2(len)` qubits.
pub fn build_input_unitary(theta: &AngleVector) -> Result<Circuit> {
    let n = log2_exact(theta.len())?;
    let qubits: Vec<usize> = (0..n).collect();
    let mut c = Circuit::new(n, 0);
    c.extend(input_unitary(theta.as_slice(), &qubits)?);
    Ok(c)
}

/// Weight fragment on `log2(len)` qubits.
pub fn build_weight_unitary(gamma: &AngleVector) -> Result<Circuit> {
    let n = log2_exact(gamma.len())?;
    let qubits: Vec<usize> = (0..n).collect();
    let mut c = Circuit::new(n, 0);
    c.extend(weight_unitary(gamma.as_slice(), &qubits)?);
    Ok(c)
}

/// Four-entry neuron: data qubits 0 and 1, ancilla qubit 2, one clbit.
/// `P(clbit = 1)` equals the activation.
pub fn build_2d_circuit(spec: &NeuronSpec) -> Result<Circuit> {
    if spec.len() != 4 {
        return Err(Error::WrongLength {
            expected: 4,
            got: spec.len(),
        });
    }
    let mut c = Circuit::new(3, 1);
    c.extend(input_unitary(spec.theta(), &[0, 1])?);
    c.extend(weight_unitary(spec.gamma(), &[0, 1])?);
    c.mcx(&[0, 1], 2).measure(2, 0);
    Ok(c)
}

/// Gate sequence of the two-entry neuron on `qubit`, without measurement:
/// `H, P(t0), X, P(t1), P(-g1), X, P(-g0), H`.
pub fn neuron_1d_gates(qubit: usize, theta: [f64; 2], gamma: [f64; 2]) -> [Gate; 8] {
    [
        Gate::H(qubit),
        Gate::P(qubit, theta[0]),
        Gate::X(qubit),
        Gate::P(qubit, theta[1]),
        Gate::P(qubit, -gamma[1]),
        Gate::X(qubit),
        Gate::P(qubit, -gamma[0]),
        Gate::H(qubit),
    ]
}

/// Two-entry neuron on one qubit. `P(clbit = 0)` equals the activation.
pub fn build_1d_circuit(spec: &NeuronSpec) -> Result<Circuit> {
    let (theta, gamma) = two_entries(spec)?;
    let mut c = Circuit::new(1, 1);
    c.extend(neuron_1d_gates(0, theta, gamma));
    c.measure(0, 0);
    Ok(c)
}

fn two_entries(spec: &NeuronSpec) -> Result<([f64; 2], [f64; 2])> {
    if spec.len() != 2 {
        return Err(Error::WrongLength {
            expected: 2,
            got: spec.len(),
        });
    }
    Ok((
        [spec.theta()[0], spec.theta()[1]],
        [spec.gamma()[0], spec.gamma()[1]],
    ))
}

/// `|e^{i lambda_1} + e^{i lambda_0}|^2 / 4` for a two-entry neuron.
pub fn analytic_probability(spec: &NeuronSpec) -> Result<f64> {
    let (theta, gamma) = two_entries(spec)?;
    let l0 = theta[0] - gamma[0];
    let l1 = theta[1] - gamma[1];
    Ok((Complex64::from_polar(1.0, l1) + Complex64::from_polar(1.0, l0)).norm_sqr() / 4.0)
}

/// Closed-form response of the 1D derivative mask to the pixel pair
/// `(c0, c1)`.
pub fn pair_probability(c0: u8, c1: u8) -> f64 {
    let gamma = mask_1d(Direction::Horizontal).weights;
    let g = gamma.as_slice();
    let l0 = gray_to_angle_value(c0) - g[0];
    let l1 = gray_to_angle_value(c1) - g[1];
    (Complex64::from_polar(1.0, l1) + Complex64::from_polar(1.0, l0)).norm_sqr() / 4.0
}

/// Closed-form response of a 2x2 mask to a raster-order patch.
pub fn patch_probability(patch: [u8; 4], direction: Direction) -> Result<f64> {
    let mask = mask_2d(direction)
        .ok_or_else(|| Error::Config("2x2 masks exist only for horizontal and vertical".into()))?;
    let theta = patch.iter().map(|&c| gray_to_angle_value(c)).collect();
    NeuronSpec::new(AngleVector::unchecked(theta), mask.weights).map(|s| s.activation())
}

/// The seven execution strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VariantKind {
    /// One 1D circuit per pixel and direction, many shots.
    Std32T,
    /// As `Std32T` with few shots.
    Std50,
    /// Directions measured sequentially on one qubit with reset in between.
    Seq50,
    /// One qubit per direction.
    Para50,
    /// `Para50` for three pixels side by side on nine qubits.
    Para50ThreePix,
    /// Two qubits, two pixels in sequence on each.
    SeqPara50,
    /// 2x2 patches with 2D masks and an ancilla readout.
    TwoD,
}

impl VariantKind {
    /// The six 1D variants.
    pub const ONE_D: [VariantKind; 6] = [
        VariantKind::Std32T,
        VariantKind::Std50,
        VariantKind::Seq50,
        VariantKind::Para50,
        VariantKind::Para50ThreePix,
        VariantKind::SeqPara50,
    ];

    pub const ALL: [VariantKind; 7] = [
        VariantKind::Std32T,
        VariantKind::Std50,
        VariantKind::Seq50,
        VariantKind::Para50,
        VariantKind::Para50ThreePix,
        VariantKind::SeqPara50,
        VariantKind::TwoD,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VariantKind::Std32T => "std32t",
            VariantKind::Std50 => "std50",
            VariantKind::Seq50 => "seq50",
            VariantKind::Para50 => "para50",
            VariantKind::Para50ThreePix => "para50-3pix",
            VariantKind::SeqPara50 => "seqpara50",
            VariantKind::TwoD => "twod",
        }
    }

    pub fn default_shots(self) -> u64 {
        match self {
            VariantKind::Std32T | VariantKind::TwoD => 32_000,
            _ => 50,
        }
    }

    /// Pixels encoded in one circuit.
    pub fn pixels_per_circuit(self) -> usize {
        match self {
            VariantKind::Para50ThreePix => 3,
            VariantKind::SeqPara50 => 4,
            _ => 1,
        }
    }

    /// Whether one circuit covers every direction of its pixels.
    pub fn bundles_directions(self) -> bool {
        !matches!(
            self,
            VariantKind::Std32T | VariantKind::Std50 | VariantKind::TwoD
        )
    }

    /// Qubits of a full circuit for `n_dirs` directions.
    pub fn qubits(self, n_dirs: usize) -> usize {
        match self {
            VariantKind::Std32T | VariantKind::Std50 | VariantKind::Seq50 => 1,
            VariantKind::Para50 => n_dirs,
            VariantKind::Para50ThreePix => 3 * n_dirs,
            VariantKind::SeqPara50 => 2,
            VariantKind::TwoD => 3,
        }
    }

    /// Measurements of a full circuit for `n_dirs` directions.
    pub fn measurements_per_circuit(self, n_dirs: usize) -> usize {
        if self.bundles_directions() {
            self.pixels_per_circuit() * n_dirs
        } else {
            1
        }
    }

    /// Circuits needed for `pixels` pixels and `n_dirs` directions.
    pub fn circuit_count(self, pixels: usize, n_dirs: usize) -> usize {
        if self.bundles_directions() {
            pixels.div_ceil(self.pixels_per_circuit())
        } else {
            pixels * n_dirs
        }
    }

    pub fn default_directions(self) -> Vec<Direction> {
        match self {
            VariantKind::TwoD => vec![Direction::Horizontal, Direction::Vertical],
            _ => canonical_directions(&Direction::ALL),
        }
    }
}

impl std::fmt::Display for VariantKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for VariantKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        VariantKind::ALL
            .into_iter()
            .find(|k| k.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown variant {s:?}")))
    }
}

/// Sort and deduplicate directions into readout order: diagonal,
/// horizontal, vertical (clbits 0, 1, 2 of a full block).
pub fn canonical_directions(dirs: &[Direction]) -> Vec<Direction> {
    let rank = |d: &Direction| match d {
        Direction::Diagonal => 0,
        Direction::Horizontal => 1,
        Direction::Vertical => 2,
    };
    let mut v = dirs.to_vec();
    v.sort_by_key(rank);
    v.dedup();
    v
}

/// Which classical bit of which circuit carries the value for one pixel
/// and direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Readout {
    pub clbit: usize,
    /// Raster index of the pixel.
    pub pixel: usize,
    pub direction: Direction,
    /// The outcome whose probability is the filter response.
    pub outcome: bool,
}

/// Circuits of one variant together with their readout bookkeeping.
#[derive(Debug, Clone)]
pub struct VariantCircuits {
    pub kind: VariantKind,
    pub directions: Vec<Direction>,
    pub circuits: Vec<Circuit>,
    pub readouts: Vec<Vec<Readout>>,
}

impl VariantCircuits {
    pub fn len(&self) -> usize {
        self.circuits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circuits.is_empty()
    }

    pub fn measurements(&self) -> Vec<usize> {
        self.circuits
            .iter()
            .map(Circuit::measurement_count)
            .collect()
    }
}

/// Build every circuit needed to filter `img` with variant `kind` along
/// `directions`.
pub fn build_variant_circuits(
    kind: VariantKind,
    img: &GrayImage,
    directions: &[Direction],
) -> Result<VariantCircuits> {
    let dirs = canonical_directions(directions);
    if dirs.is_empty() {
        return Err(Error::Config("no directions requested".into()));
    }
    if kind == VariantKind::TwoD && dirs.contains(&Direction::Diagonal) {
        return Err(Error::Config("the 2D variant has no diagonal mask".into()));
    }

    let width = img.width();
    let pixels = img.len();
    let pair_angles = |p: usize, d: Direction| {
        let (a, b) = img.pair(p % width, p / width, d);
        [gray_to_angle_value(a), gray_to_angle_value(b)]
    };
    let gamma = [0.0, PI];
    let m = dirs.len();

    let mut circuits = Vec::with_capacity(kind.circuit_count(pixels, m));
    let mut readouts = Vec::with_capacity(circuits.capacity());

    match kind {
        VariantKind::Std32T | VariantKind::Std50 => {
            for p in 0..pixels {
                for &d in &dirs {
                    let mut c = Circuit::new(1, 1);
                    c.extend(neuron_1d_gates(0, pair_angles(p, d), gamma))
                        .measure(0, 0);
                    circuits.push(c);
                    readouts.push(vec![readout(0, p, d)]);
                }
            }
        }
        VariantKind::TwoD => {
            for p in 0..pixels {
                let patch = img.patch_2x2(p % width, p / width);
                let theta =
                    AngleVector::unchecked(patch.iter().map(|&c| gray_to_angle_value(c)).collect());
                for &d in &dirs {
                    let mask = mask_2d(d).expect("diagonal rejected above");
                    circuits.push(build_2d_circuit(&NeuronSpec::new(
                        theta.clone(),
                        mask.weights,
                    )?)?);
                    readouts.push(vec![Readout {
                        clbit: 0,
                        pixel: p,
                        direction: d,
                        outcome: true,
                    }]);
                }
            }
        }
        VariantKind::Seq50
        | VariantKind::Para50
        | VariantKind::Para50ThreePix
        | VariantKind::SeqPara50 => {
            let per = kind.pixels_per_circuit();
            for start in (0..pixels).step_by(per) {
                let slots: Vec<usize> = (start..pixels.min(start + per)).collect();
                let (c, r) = bundled_circuit(kind, &slots, &dirs, &pair_angles, gamma);
                circuits.push(c);
                readouts.push(r);
            }
        }
    }

    Ok(VariantCircuits {
        kind,
        directions: dirs,
        circuits,
        readouts,
    })
}

fn readout(clbit: usize, pixel: usize, direction: Direction) -> Readout {
    Readout {
        clbit,
        pixel,
        direction,
        outcome: false,
    }
}

/// One circuit of a direction-bundling variant. Slot `s` (the `s`-th pixel
/// of the circuit) owns clbits `s*m .. s*m + m`, one per direction.
fn bundled_circuit(
    kind: VariantKind,
    slots: &[usize],
    dirs: &[Direction],
    pair_angles: &impl Fn(usize, Direction) -> [f64; 2],
    gamma: [f64; 2],
) -> (Circuit, Vec<Readout>) {
    let m = dirs.len();
    let n_clbits = slots.len() * m;
    // (qubit, clbit, pixel, direction) for every block, in program order per
    // qubit.
    let mut blocks: Vec<(usize, usize, usize, Direction)> = Vec::with_capacity(n_clbits);
    for (s, &p) in slots.iter().enumerate() {
        for (k, &d) in dirs.iter().enumerate() {
            let qubit = match kind {
                VariantKind::Seq50 => 0,
                VariantKind::Para50 | VariantKind::Para50ThreePix => s * m + k,
                VariantKind::SeqPara50 => s / 2,
                _ => unreachable!("not a bundling variant"),
            };
            blocks.push((qubit, s * m + k, p, d));
        }
    }
    let n_qubits = blocks.iter().map(|b| b.0).max().map_or(0, |q| q + 1);
    let mut c = Circuit::new(n_qubits, n_clbits);
    let mut readouts = Vec::with_capacity(n_clbits);
    for (i, &(q, clbit, p, d)) in blocks.iter().enumerate() {
        c.extend(neuron_1d_gates(q, pair_angles(p, d), gamma));
        c.measure(q, clbit);
        // Reset only when the qubit is reused by a later block.
        if blocks[i + 1..].iter().any(|b| b.0 == q) {
            c.reset(q);
        }
        readouts.push(readout(clbit, p, d));
    }
    (c, readouts)
}
