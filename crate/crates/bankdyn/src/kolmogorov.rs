//! Deterministic evolution of expected state occupancy.
//!
//! The expected number of elements in each state follows the forward
//! equations of the underlying Markov jump process:
//!
//! ```text
//! dm_i/dt = sum_l m_l(t) lambda_li  -  m_i(t) sum_k lambda_ik   (+ delta for i = 0)
//! ```
//!
//! Transients are integrated with classic fixed-step fourth-order
//! Runge-Kutta; steady states come from the linear balance system with the
//! normalization sum(m) = N replacing one redundant balance row.

use crate::model::{summarize_violations, StateGraph, Violation};
use thiserror::Error;

/// Levels can dip this far below zero before the integrator treats the
/// run as numerically broken. Fourth-order truncation error on a valid
/// model stays orders of magnitude above this line.
pub const NEGATIVITY_TOLERANCE: f64 = 1e-9;

/// Relative slack when clamping steady-state round-off to zero.
const STEADY_CLAMP: f64 = 1e-12;

/// Failure of a deterministic computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid model: {}", summarize_violations(.0))]
    InvalidModel(Vec<Violation>),
    #[error("invalid output grid: {0}")]
    BadGrid(&'static str),
    #[error("step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("level of state '{state}' fell to {value:e} at t = {time}")]
    NegativeLevel { state: String, time: f64, value: f64 },
    #[error("levels became non-finite at t = {time}")]
    NonFinite { time: f64 },
    #[error("balance system is singular: no unique steady state")]
    NoUniqueSteadyState,
    #[error("steady level of state '{state}' is negative ({value:e})")]
    NegativeSteadyLevel { state: String, value: f64 },
    #[error("steady state requires a zero source rate, got {rate}")]
    SourceForbidden { rate: f64 },
}

/// Sampled time course of all state levels.
///
/// Row k holds the levels at `times[k]`; storage is row-major so a row is
/// contiguous. The column count is fixed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub n_states: usize,
    /// Flat row-major level samples, `times.len() * n_states` entries.
    pub levels: Vec<f64>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, n_states: usize, levels: Vec<f64>) -> Self {
        assert_eq!(levels.len(), times.len() * n_states, "trajectory shape mismatch");
        Self { times, n_states, levels }
    }

    /// Number of sample rows.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Levels at sample `k`.
    pub fn row(&self, k: usize) -> &[f64] {
        &self.levels[k * self.n_states..(k + 1) * self.n_states]
    }

    /// Level of state `i` at sample `k`.
    pub fn value(&self, k: usize, i: usize) -> f64 {
        self.levels[k * self.n_states + i]
    }

    /// Time course of a single state.
    pub fn state_series(&self, i: usize) -> Vec<f64> {
        (0..self.len()).map(|k| self.value(k, i)).collect()
    }

    /// Levels at the last sample.
    pub fn final_row(&self) -> &[f64] {
        self.row(self.len() - 1)
    }
}

/// Writes the forward-equation right-hand side for `levels` into `out`.
///
/// One pass over the transitions: each moves mass `m_from * rate` per unit
/// time, and the source feeds state 0. Callers guarantee slice lengths
/// match the graph.
pub fn forward_rhs(graph: &StateGraph, levels: &[f64], out: &mut [f64]) {
    out.fill(0.0);
    for t in &graph.transitions {
        let flow = levels[t.from] * t.rate;
        out[t.from] -= flow;
        out[t.to] += flow;
    }
    if !out.is_empty() {
        out[0] += graph.source_rate;
    }
}

/// Default integration step for a graph: fine enough that the fastest
/// transition is resolved, never coarser than 1e-3, never longer than the
/// horizon.
pub fn default_step(graph: &StateGraph, t_end: f64) -> f64 {
    let max_rate = graph.max_rate();
    let mut dt = 1e-3_f64;
    if max_rate > 0.0 {
        dt = dt.min(0.1 / max_rate);
    }
    dt.min(t_end)
}

/// Integrates `dy/dt = rhs(t, y)` with fixed-step RK4, recording `y` at
/// every grid time. Integration starts at t = 0 with `initial`; grid
/// times are landed on exactly by shortening the final step of each
/// interval. `labels` name the components in diagnostics.
pub fn integrate_ode<F>(
    initial: &[f64],
    grid: &[f64],
    dt: f64,
    mut rhs: F,
    labels: &[String],
) -> Result<Trajectory, EngineError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    check_grid(grid)?;
    if dt <= 0.0 || !dt.is_finite() {
        return Err(EngineError::BadStep(dt));
    }
    let n = initial.len();
    let mut y = initial.to_vec();
    let mut levels = Vec::with_capacity(grid.len() * n);

    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut stage = vec![0.0; n];

    let mut t = 0.0_f64;
    for &target in grid {
        while t < target {
            let h = (target - t).min(dt);
            rhs(t, &y, &mut k1);
            for i in 0..n {
                stage[i] = y[i] + 0.5 * h * k1[i];
            }
            rhs(t + 0.5 * h, &stage, &mut k2);
            for i in 0..n {
                stage[i] = y[i] + 0.5 * h * k2[i];
            }
            rhs(t + 0.5 * h, &stage, &mut k3);
            for i in 0..n {
                stage[i] = y[i] + h * k3[i];
            }
            rhs(t + h, &stage, &mut k4);
            for i in 0..n {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            // Advance so the interval end is hit exactly, not by accumulation.
            t = if target - t > dt { t + dt } else { target };
            check_levels(&y, t, labels)?;
        }
        levels.extend_from_slice(&y);
    }
    Ok(Trajectory::new(grid.to_vec(), n, levels))
}

fn check_grid(grid: &[f64]) -> Result<(), EngineError> {
    if grid.is_empty() {
        return Err(EngineError::BadGrid("grid must contain at least one time"));
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(EngineError::BadGrid("grid times must be finite"));
    }
    if grid[0] < 0.0 {
        return Err(EngineError::BadGrid("grid must start at or after t = 0"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EngineError::BadGrid("grid must be strictly increasing"));
    }
    Ok(())
}

fn check_levels(y: &[f64], t: f64, labels: &[String]) -> Result<(), EngineError> {
    for (i, &v) in y.iter().enumerate() {
        if !v.is_finite() {
            return Err(EngineError::NonFinite { time: t });
        }
        if v < -NEGATIVITY_TOLERANCE {
            let state = labels.get(i).cloned().unwrap_or_else(|| format!("#{i}"));
            return Err(EngineError::NegativeLevel { state, time: t, value: v });
        }
    }
    Ok(())
}

/// Integrates the forward equations of `graph` from its initial levels,
/// sampling at `grid`.
pub fn integrate(graph: &StateGraph, grid: &[f64], dt: f64) -> Result<Trajectory, EngineError> {
    let report = graph.validate();
    if !report.is_ok() {
        return Err(EngineError::InvalidModel(report.violations));
    }
    integrate_ode(
        &graph.initial_levels,
        grid,
        dt,
        |_, y, out| forward_rhs(graph, y, out),
        &graph.states,
    )
}

/// Solves the balance system for the steady occupancy of a closed graph
/// (zero source rate), normalized to the initial total population N.
///
/// The system Q^T m = 0 always has the redundant row sum(rows) = 0, so
/// one balance row is replaced by the normalization sum(m) = N. Dense
/// Gaussian elimination with partial pivoting; a vanishing pivot means
/// the chain does not have a unique steady state (for example, two
/// disconnected communicating classes).
pub fn steady_state(graph: &StateGraph) -> Result<Vec<f64>, EngineError> {
    let report = graph.validate();
    if !report.is_ok() {
        return Err(EngineError::InvalidModel(report.violations));
    }
    if graph.source_rate > 0.0 {
        return Err(EngineError::SourceForbidden { rate: graph.source_rate });
    }
    let n = graph.len();
    let total = graph.total_population();

    // a[i][j]: coefficient of m_j in equation i. Rows 1.. are balance
    // equations (Q^T)_i; row 0 is the normalization.
    let mut a = vec![vec![0.0_f64; n]; n];
    let mut b = vec![0.0_f64; n];
    for t in &graph.transitions {
        if t.from != 0 {
            a[t.from][t.from] -= t.rate;
        }
        if t.to != 0 {
            a[t.to][t.from] += t.rate;
        }
    }
    a[0].fill(1.0);
    b[0] = total;

    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(1.0_f64, |acc, &v| acc.max(v.abs()));
    let pivot_floor = 1e-12 * scale;

    // Forward elimination with row pivoting.
    for col in 0..n {
        let mut pivot_row = col;
        for r in col + 1..n {
            if a[r][col].abs() > a[pivot_row][col].abs() {
                pivot_row = r;
            }
        }
        if a[pivot_row][col].abs() <= pivot_floor {
            return Err(EngineError::NoUniqueSteadyState);
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let (pivot_rows, lower_rows) = a.split_at_mut(col + 1);
        let pivot = &pivot_rows[col];
        for (r, row) in lower_rows.iter_mut().enumerate() {
            let factor = row[col] / pivot[col];
            if factor == 0.0 {
                continue;
            }
            row[col] = 0.0;
            for (x, &p) in row[col + 1..].iter_mut().zip(&pivot[col + 1..]) {
                *x -= factor * p;
            }
            b[col + 1 + r] -= factor * b[col];
        }
    }

    let mut m = vec![0.0_f64; n];
    for row in (0..n).rev() {
        let mut rhs = b[row];
        for c in row + 1..n {
            rhs -= a[row][c] * m[c];
        }
        m[row] = rhs / a[row][row];
    }

    // Round-off can leave tiny negative levels; anything larger is a
    // genuine failure, not noise.
    let clamp = STEADY_CLAMP * total.max(1.0);
    for (i, v) in m.iter_mut().enumerate() {
        if *v < 0.0 {
            if *v >= -clamp {
                *v = 0.0;
            } else {
                return Err(EngineError::NegativeSteadyLevel {
                    state: graph.states[i].clone(),
                    value: *v,
                });
            }
        }
    }
    Ok(m)
}

/// Largest deviation of the sampled total population from the conserved
/// quantity N + delta * t.
pub fn conservation_residual(graph: &StateGraph, trajectory: &Trajectory) -> f64 {
    let n0 = graph.total_population();
    let mut worst = 0.0_f64;
    for k in 0..trajectory.len() {
        let mut total = 0.0;
        for &v in trajectory.row(k) {
            total += v;
        }
        let expected = n0 + graph.source_rate * trajectory.times[k];
        worst = worst.max((total - expected).abs());
    }
    worst
}
