//! End-to-end edge detection: build circuits, batch them into jobs, execute,
//! assemble per-direction response images, combine and binarize.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{
    otsu_threshold, pixelwise_max, BinaryImage, Direction, GrayImage, ProbabilityImage,
};
use crate::neuron::{
    build_variant_circuits, canonical_directions, pair_probability, patch_probability, VariantKind,
};
use crate::sim::{derive_seed, run_exact, sample_counts, Circuit};

/// Master seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_240_611;
pub const DEFAULT_CIRCUITS_PER_JOB: usize = 300;
pub const DEFAULT_MEASUREMENTS_PER_JOB: usize = 16_000;

/// Per-job submission limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JobLimits {
    pub circuits: usize,
    pub measurements: usize,
}

impl Default for JobLimits {
    fn default() -> Self {
        Self {
            circuits: DEFAULT_CIRCUITS_PER_JOB,
            measurements: DEFAULT_MEASUREMENTS_PER_JOB,
        }
    }
}

/// How one variant is executed.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantConfig {
    pub kind: VariantKind,
    pub shots: u64,
    pub limits: JobLimits,
    pub seed: u64,
    /// Use exact outcome probabilities instead of sampling.
    pub exact: bool,
    pub directions: Vec<Direction>,
}

impl VariantConfig {
    pub fn new(kind: VariantKind) -> Self {
        Self {
            kind,
            shots: kind.default_shots(),
            limits: JobLimits::default(),
            seed: DEFAULT_SEED,
            exact: false,
            directions: kind.default_directions(),
        }
    }

    pub fn with_shots(mut self, shots: u64) -> Self {
        self.shots = shots;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_exact(mut self, exact: bool) -> Self {
        self.exact = exact;
        self
    }

    pub fn with_directions(mut self, directions: &[Direction]) -> Self {
        self.directions = directions.to_vec();
        self
    }

    pub fn with_limits(mut self, limits: JobLimits) -> Self {
        self.limits = limits;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        if self.limits.circuits == 0 || self.limits.measurements == 0 {
            return Err(Error::Config("job limits must be at least 1".into()));
        }
        Ok(())
    }
}

/// A contiguous range of circuits submitted together.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Job {
    pub start: usize,
    pub end: usize,
    pub measurements: usize,
}

impl Job {
    pub fn circuits(&self) -> usize {
        self.end - self.start
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct JobPlan {
    pub jobs: Vec<Job>,
}

impl JobPlan {
    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn circuits(&self) -> usize {
        self.jobs.iter().map(Job::circuits).sum()
    }

    pub fn measurements(&self) -> usize {
        self.jobs.iter().map(|j| j.measurements).sum()
    }
}

/// Greedy packing of circuits, given by their measurement counts, in order.
/// A job is closed as soon as the next circuit would break either limit.
pub fn plan_measurements(measurements: &[usize], limits: JobLimits) -> Result<JobPlan> {
    let mut jobs = Vec::new();
    let mut current = Job {
        start: 0,
        end: 0,
        measurements: 0,
    };
    for (i, &m) in measurements.iter().enumerate() {
        if m > limits.measurements {
            return Err(Error::CircuitExceedsJob {
                index: i,
                measurements: m,
                limit: limits.measurements,
            });
        }
        if current.circuits() == limits.circuits || current.measurements + m > limits.measurements {
            jobs.push(current);
            current = Job {
                start: i,
                end: i,
                measurements: 0,
            };
        }
        current.end = i + 1;
        current.measurements += m;
    }
    if current.circuits() > 0 {
        jobs.push(current);
    }
    Ok(JobPlan { jobs })
}

pub fn plan_jobs(circuits: &[Circuit], limits: JobLimits) -> Result<JobPlan> {
    let m: Vec<usize> = circuits.iter().map(Circuit::measurement_count).collect();
    plan_measurements(&m, limits)
}

/// Output of one variant run.
#[derive(Debug, Clone)]
pub struct EdgeResult {
    pub kind: VariantKind,
    pub directions: Vec<(Direction, ProbabilityImage)>,
    pub combined: ProbabilityImage,
    pub combined_gray: GrayImage,
    pub threshold: u8,
    pub edges: BinaryImage,
    pub plan: JobPlan,
    pub fidelity: Option<f64>,
}

impl EdgeResult {
    pub fn direction(&self, dir: Direction) -> Option<&ProbabilityImage> {
        self.directions
            .iter()
            .find(|(d, _)| *d == dir)
            .map(|(_, p)| p)
    }
}

/// Run one variant over `img`.
pub fn run_variant(img: &GrayImage, config: &VariantConfig) -> Result<EdgeResult> {
    config.validate()?;
    let built = build_variant_circuits(config.kind, img, &config.directions)?;
    let plan = plan_jobs(&built.circuits, config.limits)?;

    let dirs = built.directions.clone();
    let mut planes = vec![vec![0.0; img.len()]; dirs.len()];
    let slot = |d: Direction| {
        dirs.iter()
            .position(|&x| x == d)
            .expect("direction was requested")
    };

    for job in &plan.jobs {
        let values: Vec<Vec<(usize, usize, f64)>> = (job.start..job.end)
            .into_par_iter()
            .map(|i| -> Result<Vec<(usize, usize, f64)>> {
                let circ = &built.circuits[i];
                let readouts = &built.readouts[i];
                if config.exact {
                    let dist = run_exact(circ)?;
                    readouts
                        .iter()
                        .map(|r| {
                            Ok((
                                slot(r.direction),
                                r.pixel,
                                dist.prob_of(r.clbit, r.outcome)?,
                            ))
                        })
                        .collect()
                } else {
                    let counts =
                        sample_counts(circ, config.shots, derive_seed(config.seed, i as u64))?;
                    readouts
                        .iter()
                        .map(|r| {
                            Ok((
                                slot(r.direction),
                                r.pixel,
                                counts.prob_of(r.clbit, r.outcome)?,
                            ))
                        })
                        .collect()
                }
            })
            .collect::<Result<_>>()?;
        for (s, pixel, p) in values.into_iter().flatten() {
            planes[s][pixel] = p;
        }
    }

    let directions = dirs
        .iter()
        .zip(planes)
        .map(|(&d, plane)| Ok((d, ProbabilityImage::new(img.width(), img.height(), plane)?)))
        .collect::<Result<Vec<_>>>()?;
    finish(config.kind, directions, plan)
}

fn finish(
    kind: VariantKind,
    directions: Vec<(Direction, ProbabilityImage)>,
    plan: JobPlan,
) -> Result<EdgeResult> {
    let refs: Vec<&ProbabilityImage> = directions.iter().map(|(_, p)| p).collect();
    let combined = pixelwise_max(&refs)?;
    let combined_gray = combined.to_gray();
    let (threshold, edges) = otsu_threshold(&combined_gray);
    Ok(EdgeResult {
        kind,
        directions,
        combined,
        combined_gray,
        threshold,
        edges,
        plan,
        fidelity: None,
    })
}

/// Run one variant and score it against the closed-form reference.
pub fn run_and_score(img: &GrayImage, config: &VariantConfig) -> Result<EdgeResult> {
    let mut result = run_variant(img, config)?;
    let reference = reference_for(config.kind, img, &config.directions)?;
    result.fidelity = Some(hellinger_fidelity(&result.combined_gray, &reference)?);
    Ok(result)
}

/// Closed-form per-direction responses of the 1D neuron.
pub fn reference_probabilities(
    img: &GrayImage,
    directions: &[Direction],
) -> Result<Vec<(Direction, ProbabilityImage)>> {
    canonical_directions(directions)
        .into_iter()
        .map(|d| {
            let data = img
                .pairs(d)
                .into_iter()
                .map(|(a, b)| pair_probability(a, b))
                .collect();
            Ok((d, ProbabilityImage::new(img.width(), img.height(), data)?))
        })
        .collect()
}

/// Closed-form per-direction responses of the 2x2 neuron.
pub fn reference_probabilities_2d(
    img: &GrayImage,
    directions: &[Direction],
) -> Result<Vec<(Direction, ProbabilityImage)>> {
    let patches = img.patches();
    canonical_directions(directions)
        .into_iter()
        .map(|d| {
            let data = patches
                .iter()
                .map(|&p| patch_probability(p, d))
                .collect::<Result<_>>()?;
            Ok((d, ProbabilityImage::new(img.width(), img.height(), data)?))
        })
        .collect()
}

fn combine_gray(planes: &[(Direction, ProbabilityImage)]) -> Result<GrayImage> {
    let refs: Vec<&ProbabilityImage> = planes.iter().map(|(_, p)| p).collect();
    Ok(pixelwise_max(&refs)?.to_gray())
}

/// Gray image of the pixelwise maximum of the closed-form 1D responses.
pub fn reference_image(img: &GrayImage, directions: &[Direction]) -> Result<GrayImage> {
    combine_gray(&reference_probabilities(img, directions)?)
}

/// Gray image of the pixelwise maximum of the closed-form 2x2 responses.
pub fn reference_image_2d(img: &GrayImage, directions: &[Direction]) -> Result<GrayImage> {
    combine_gray(&reference_probabilities_2d(img, directions)?)
}

/// The closed-form reference matching `kind`.
pub fn reference_for(
    kind: VariantKind,
    img: &GrayImage,
    directions: &[Direction],
) -> Result<GrayImage> {
    match kind {
        VariantKind::TwoD => reference_image_2d(img, directions),
        _ => reference_image(img, directions),
    }
}

/// `(sum_j sqrt(p_j q_j))^2` of two non-negative weight vectors, each
/// normalized to sum 1.
pub fn hellinger_fidelity_weights(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::WrongLength {
            expected: p.len(),
            got: q.len(),
        });
    }
    let (sp, sq): (f64, f64) = (p.iter().sum(), q.iter().sum());
    if sp <= 0.0 || sq <= 0.0 {
        return Err(Error::EmptyCounts);
    }
    // Normalizing after the sum keeps identical integer histograms at exactly 1.
    let bc: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum::<f64>() / (sp * sq).sqrt();
    Ok((bc * bc).min(1.0))
}

/// Hellinger fidelity of the gray-value histograms of two images.
pub fn hellinger_fidelity(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    if (a.width(), a.height()) != (b.width(), b.height()) {
        return Err(Error::DimensionMismatch(
            a.width(),
            a.height(),
            b.width(),
            b.height(),
        ));
    }
    let to_f = |h: [u64; 256]| h.map(|c| c as f64);
    hellinger_fidelity_weights(&to_f(a.histogram()), &to_f(b.histogram()))
}

/// One row of a variant comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityRow {
    pub kind: VariantKind,
    pub seed: u64,
    pub fidelity: f64,
}

/// Options shared by every run of a comparison.
#[derive(Debug, Clone, Default)]
pub struct CompareOptions {
    pub exact: bool,
    /// Overrides each variant's default shot count.
    pub shots: Option<u64>,
    /// Overrides each variant's default directions.
    pub directions: Option<Vec<Direction>>,
    pub limits: JobLimits,
}

/// Fidelity against the closed-form reference for every kind and seed, in
/// kind-major order.
pub fn compare_variants(
    img: &GrayImage,
    kinds: &[VariantKind],
    seeds: &[u64],
    options: &CompareOptions,
) -> Result<Vec<FidelityRow>> {
    let mut rows = Vec::with_capacity(kinds.len() * seeds.len());
    for &kind in kinds {
        let mut config = VariantConfig::new(kind)
            .with_exact(options.exact)
            .with_limits(options.limits);
        if let Some(shots) = options.shots {
            config.shots = shots;
        }
        if let Some(dirs) = &options.directions {
            config.directions = dirs.clone();
        }
        let reference = reference_for(kind, img, &config.directions)?;
        for &seed in seeds {
            let result = run_variant(img, &config.clone().with_seed(seed))?;
            rows.push(FidelityRow {
                kind,
                seed,
                fidelity: hellinger_fidelity(&result.combined_gray, &reference)?,
            });
        }
    }
    Ok(rows)
}

/// `bin,count` lines for all 256 gray levels.
pub fn histogram_csv(hist: &[u64; 256]) -> String {
    let mut out = String::from("bin,count\n");
    for (bin, count) in hist.iter().enumerate() {
        let _ = writeln!(out, "{bin},{count}");
    }
    out
}

/// `variant,seed,fidelity` lines.
pub fn fidelity_csv(rows: &[FidelityRow]) -> String {
    let mut out = String::from("variant,seed,fidelity\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{:.6}", r.kind, r.seed, r.fidelity);
    }
    out
}
