//! Edge detection with phase-encoded quantum neurons.
//!
//! Gray values are encoded as phases, compared against derivative masks by a
//! single quantum neuron, and the per-direction responses are merged and
//! binarized with Otsu's threshold. A state-vector simulator, a basis-gate
//! transpiler and a job planner come with it.

pub mod encoding;
pub mod error;
pub mod image;
pub mod neuron;
pub mod pipeline;
pub mod samples;
pub mod sim;
pub mod transpile;

pub use encoding::{AngleVector, FilterMask, PhaseVector};
pub use error::{Error, Result};
pub use image::{BinaryImage, Direction, GrayImage, ProbabilityImage};
pub use neuron::{NeuronSpec, VariantKind};
pub use sim::{Circuit, Counts, Distribution, Gate};
