//! Exact stochastic realization of the jump process whose expectations
//! the forward equations describe, using the Gillespie direct method.
//!
//! Every run is reproducible from a single `u64` seed. The generator and
//! the per-replication seed derivation below are part of the crate's
//! compatibility surface: given the same model, grid, seed, and
//! replication count, any build must produce bit-identical paths.

use crate::kolmogorov::Trajectory;
use crate::model::{summarize_violations, StateGraph, Violation};
use thiserror::Error;

/// SplitMix64 generator. State advances by the golden-gamma increment
/// 0x9E3779B97F4A7C15; each output is the multiply-xorshift finalizer of
/// the new state:
///
/// ```text
/// z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
/// z ^= z >> 27; z *= 0x94D049BB133111EB;
/// z ^= z >> 31;
/// ```
///
/// The stream has period exactly 2^64, every seed included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        mix64(self.state)
    }

    /// Uniform draw in the half-open interval [0, 1), 53 significant bits.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform draw in (0, 1]: ((x >> 11) + 1) / 2^53. Never zero, so a
    /// log of it is always finite.
    pub fn next_unit_positive(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / 9007199254740992.0)
    }
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `replication` (0-based) for a run seeded with
/// `seed`: the multiply-xorshift finalizer applied to `seed XOR
/// replication`. Replications are decorrelated yet independent of
/// execution order, so ensembles can be resumed or parallelized without
/// changing results.
pub fn derive_replication_seed(seed: u64, replication: u64) -> u64 {
    mix64(seed ^ replication)
}

/// Failure of a stochastic run or of the deterministic cross-check.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SsaError {
    #[error("invalid model: {}", summarize_violations(.0))]
    InvalidModel(Vec<Violation>),
    #[error("invalid output grid: {0}")]
    BadGrid(&'static str),
    #[error("initial level of state '{state}' is {value}, stochastic runs need whole elements")]
    NonIntegerInitial { state: String, value: f64 },
    #[error("at least one replication is required")]
    NoReplications,
    #[error("comparison needs standard errors, run at least two replications")]
    MissingStderr,
    #[error("ensemble and trajectory disagree in shape or grid")]
    ShapeMismatch,
}

/// One stochastic realization sampled on a fixed grid. Counts are whole
/// elements, row-major like [`Trajectory`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplePath {
    pub times_len: usize,
    pub n_states: usize,
    pub counts: Vec<u64>,
}

impl SamplePath {
    pub fn row(&self, k: usize) -> &[u64] {
        &self.counts[k * self.n_states..(k + 1) * self.n_states]
    }
}

fn check_grid(grid: &[f64]) -> Result<(), SsaError> {
    if grid.is_empty() {
        return Err(SsaError::BadGrid("grid must contain at least one time"));
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(SsaError::BadGrid("grid times must be finite"));
    }
    if grid[0] < 0.0 {
        return Err(SsaError::BadGrid("grid must start at or after t = 0"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SsaError::BadGrid("grid must be strictly increasing"));
    }
    Ok(())
}

fn integer_counts(graph: &StateGraph) -> Result<Vec<u64>, SsaError> {
    let mut counts = Vec::with_capacity(graph.len());
    for (i, &level) in graph.initial_levels.iter().enumerate() {
        if level < 0.0 || level.fract() != 0.0 || level > 9.0e15 {
            return Err(SsaError::NonIntegerInitial {
                state: graph.states[i].clone(),
                value: level,
            });
        }
        counts.push(level as u64);
    }
    Ok(counts)
}

/// Simulates one exact path of the jump process, recording counts at
/// every grid time.
///
/// The direct method: total propensity R is the source rate plus
/// count * rate over transitions; waiting times are exponential with
/// rate R; the event is picked by a cumulative walk along the source
/// first, then the transitions in declared order. An event landing
/// exactly on a grid time is applied before that time is sampled.
pub fn sample_path(graph: &StateGraph, grid: &[f64], seed: u64) -> Result<SamplePath, SsaError> {
    let report = graph.validate();
    if !report.is_ok() {
        return Err(SsaError::InvalidModel(report.violations));
    }
    check_grid(grid)?;
    let n = graph.len();
    let mut counts = integer_counts(graph)?;
    let mut rng = SplitMix64::new(seed);

    let mut out: Vec<u64> = Vec::with_capacity(grid.len() * n);
    let mut next_record = 0usize;
    let mut t = 0.0_f64;

    loop {
        // Propensity sum walks the same order as event selection so the
        // final accumulator equals R bit for bit.
        let mut total = graph.source_rate;
        for tr in &graph.transitions {
            total += counts[tr.from] as f64 * tr.rate;
        }
        if total <= 0.0 {
            // Absorbed: counts stay frozen for all remaining grid times.
            while next_record < grid.len() {
                out.extend_from_slice(&counts);
                next_record += 1;
            }
            break;
        }

        let t_next = t + -rng.next_unit_positive().ln() / total;
        while next_record < grid.len() && grid[next_record] < t_next {
            out.extend_from_slice(&counts);
            next_record += 1;
        }
        if next_record == grid.len() {
            break;
        }
        t = t_next;

        let threshold = rng.next_unit() * total;
        let mut acc = graph.source_rate;
        let mut fired = false;
        if graph.source_rate > 0.0 && threshold < acc {
            counts[0] += 1;
            fired = true;
        }
        if !fired {
            // Remember the last live event in case round-off pushes the
            // threshold past every partial sum.
            let mut last_live: Option<usize> = None;
            for (idx, tr) in graph.transitions.iter().enumerate() {
                let propensity = counts[tr.from] as f64 * tr.rate;
                acc += propensity;
                if propensity > 0.0 {
                    last_live = Some(idx);
                    if threshold < acc {
                        break;
                    }
                }
            }
            match last_live {
                Some(idx) => {
                    let tr = &graph.transitions[idx];
                    counts[tr.from] -= 1;
                    counts[tr.to] += 1;
                }
                // Positive total with no live transition means the
                // source is the only live event.
                None => counts[0] += 1,
            }
        }
    }

    Ok(SamplePath { times_len: grid.len(), n_states: n, counts: out })
}

/// Ensemble statistics of repeated stochastic runs on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub times: Vec<f64>,
    pub n_states: usize,
    pub replications: u64,
    /// Per-cell sample mean, row-major.
    pub mean: Vec<f64>,
    /// Per-cell standard error of the mean. `None` when fewer than two
    /// replications ran, since a single run has no spread estimate.
    pub stderr: Option<Vec<f64>>,
}

impl EnsembleSummary {
    pub fn mean_at(&self, k: usize, i: usize) -> f64 {
        self.mean[k * self.n_states + i]
    }
}

/// Runs `replications` independent paths and accumulates their mean and
/// standard error cell by cell. Replication r uses the seed
/// [`derive_replication_seed`]`(seed, r)`.
pub fn ensemble_mean(
    graph: &StateGraph,
    grid: &[f64],
    seed: u64,
    replications: u64,
) -> Result<EnsembleSummary, SsaError> {
    if replications == 0 {
        return Err(SsaError::NoReplications);
    }
    let n = graph.len();
    let cells = grid.len() * n;
    let mut sum = vec![0.0_f64; cells];
    let mut sum_sq = vec![0.0_f64; cells];

    for r in 0..replications {
        let path = sample_path(graph, grid, derive_replication_seed(seed, r))?;
        for (cell, &count) in path.counts.iter().enumerate() {
            let v = count as f64;
            sum[cell] += v;
            sum_sq[cell] += v * v;
        }
    }

    let reps = replications as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / reps).collect();
    let stderr = if replications >= 2 {
        Some(
            (0..cells)
                .map(|c| {
                    let var = (sum_sq[c] - sum[c] * sum[c] / reps) / (reps - 1.0);
                    (var.max(0.0) / reps).sqrt()
                })
                .collect(),
        )
    } else {
        None
    };

    Ok(EnsembleSummary { times: grid.to_vec(), n_states: n, replications, mean, stderr })
}

/// Outcome of checking an ensemble against deterministic expectations.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub cells: usize,
    pub within: usize,
    pub pass: bool,
    /// Largest |mean - expectation| / allowance over all cells; at most
    /// 1 in a cell that passes.
    pub worst_ratio: f64,
}

/// Checks each ensemble cell against the deterministic expectation.
///
/// A cell passes when |mean - expectation| <= max(3.5 stderr, 1e-9); the
/// absolute floor keeps exactly-conserved cells with zero spread from
/// failing on round-off. The ensemble passes when at least 95% of cells
/// do, evaluated in integer arithmetic as 20 * within >= 19 * cells.
pub fn compare_to_ode(summary: &EnsembleSummary, ode: &Trajectory) -> Result<Comparison, SsaError> {
    let stderr = summary.stderr.as_ref().ok_or(SsaError::MissingStderr)?;
    if summary.n_states != ode.n_states
        || summary.times.len() != ode.times.len()
        || summary.times != ode.times
    {
        return Err(SsaError::ShapeMismatch);
    }
    let cells = summary.mean.len();
    let mut within = 0usize;
    let mut worst_ratio = 0.0_f64;
    for ((&mean, &level), &se) in summary.mean.iter().zip(&ode.levels).zip(stderr) {
        let allowance = (3.5 * se).max(1e-9);
        let diff = (mean - level).abs();
        worst_ratio = worst_ratio.max(diff / allowance);
        if diff <= allowance {
            within += 1;
        }
    }
    let pass = 20 * within >= 19 * cells;
    Ok(Comparison { cells, within, pass, worst_ratio })
}
