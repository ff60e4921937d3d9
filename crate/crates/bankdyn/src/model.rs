//! Domain types for the simulation engine: labeled state graphs with
//! transition intensities, delayed bank/client interaction parameters,
//! delay/cost matrices for meta-operations, and run scenarios.
//!
//! All types are immutable after construction and freely shareable
//! between threads. Graph validity is a *report*, not a panic: build a
//! [`StateGraph`] from plain data, then ask it to [`StateGraph::validate`].

use thiserror::Error;

/// One directed transition between two states of a [`StateGraph`].
///
/// `rate` is an intensity in 1/time units: an element in state `from`
/// moves to state `to` at this rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub rate: f64,
}

impl Transition {
    pub fn new(from: usize, to: usize, rate: f64) -> Self {
        Self { from, to, rate }
    }
}

/// A labeled directed graph of client/product states.
///
/// States are referenced by stable integer index; names are retained for
/// output. State index 0 is distinguished: the exogenous source feeds it
/// at `source_rate` elements per unit time.
#[derive(Debug, Clone, PartialEq)]
pub struct StateGraph {
    /// State names, in declaration order. Index is identity.
    pub states: Vec<String>,
    /// Expected element count per state at t = 0.
    pub initial_levels: Vec<f64>,
    /// Directed transitions with their intensities.
    pub transitions: Vec<Transition>,
    /// Exogenous arrival rate into state 0 (elements/time).
    pub source_rate: f64,
}

impl StateGraph {
    pub fn new(
        states: Vec<String>,
        initial_levels: Vec<f64>,
        transitions: Vec<Transition>,
        source_rate: f64,
    ) -> Self {
        Self {
            states,
            initial_levels,
            transitions,
            source_rate,
        }
    }

    /// Number of states.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Checks every structural invariant and returns the full list of
    /// violations. Violations are data, not errors: an invalid graph is
    /// still a value you can inspect and fix.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let n = self.states.len();

        if n == 0 {
            violations.push(Violation::NoStates);
        }
        for (i, name) in self.states.iter().enumerate() {
            if name.is_empty() {
                violations.push(Violation::EmptyStateName { index: i });
            }
            for (j, other) in self.states.iter().enumerate().skip(i + 1) {
                if !name.is_empty() && name == other {
                    violations.push(Violation::DuplicateStateName {
                        name: name.clone(),
                        first: i,
                        second: j,
                    });
                }
            }
        }

        if self.initial_levels.len() != n {
            violations.push(Violation::LevelCountMismatch {
                expected: n,
                found: self.initial_levels.len(),
            });
        }
        for (i, &level) in self.initial_levels.iter().enumerate() {
            if !level.is_finite() {
                violations.push(Violation::NonFiniteInitialLevel { state: i });
            } else if level < 0.0 {
                violations.push(Violation::NegativeInitialLevel { state: i, value: level });
            }
        }

        let mut seen_pairs: Vec<(usize, usize)> = Vec::new();
        for t in &self.transitions {
            if t.from >= n || t.to >= n {
                violations.push(Violation::TransitionOutOfRange { from: t.from, to: t.to });
                continue;
            }
            if t.from == t.to {
                violations.push(Violation::SelfTransition { state: t.from });
            }
            if seen_pairs.contains(&(t.from, t.to)) {
                violations.push(Violation::DuplicateTransition { from: t.from, to: t.to });
            } else {
                seen_pairs.push((t.from, t.to));
            }
            if !t.rate.is_finite() {
                violations.push(Violation::NonFiniteIntensity { from: t.from, to: t.to });
            } else if t.rate < 0.0 {
                violations.push(Violation::NegativeIntensity {
                    from: t.from,
                    to: t.to,
                    value: t.rate,
                });
            }
        }

        if !self.source_rate.is_finite() {
            violations.push(Violation::NonFiniteSource);
        } else if self.source_rate < 0.0 {
            violations.push(Violation::NegativeSource { value: self.source_rate });
        }

        if self.initial_levels.len() == n && !self.total_population().is_finite() {
            violations.push(Violation::NonFinitePopulation);
        }

        ValidationReport { violations }
    }

    /// Total population N = sum of initial levels, summed left to right
    /// in state order.
    pub fn total_population(&self) -> f64 {
        let mut total = 0.0;
        for &level in &self.initial_levels {
            total += level;
        }
        total
    }

    /// Largest transition intensity, or 0 for a graph with no transitions.
    pub fn max_rate(&self) -> f64 {
        self.transitions.iter().fold(0.0, |acc, t| acc.max(t.rate))
    }

    /// Out-neighbors of state `i` with their rates.
    pub fn outgoing(&self, i: usize) -> impl Iterator<Item = &Transition> {
        self.transitions.iter().filter(move |t| t.from == i)
    }

    /// In-neighbors of state `i` with their rates.
    pub fn incoming(&self, i: usize) -> impl Iterator<Item = &Transition> {
        self.transitions.iter().filter(move |t| t.to == i)
    }

    /// Name of state `i`, or a positional placeholder for out-of-range
    /// indices (used in diagnostics only).
    pub fn state_name(&self, i: usize) -> &str {
        self.states.get(i).map(String::as_str).unwrap_or("<unknown>")
    }
}

/// A single invariant breach found by [`StateGraph::validate`] or
/// [`InteractionConfig::validate`]. Indices refer to state order.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoStates,
    EmptyStateName { index: usize },
    DuplicateStateName { name: String, first: usize, second: usize },
    LevelCountMismatch { expected: usize, found: usize },
    NegativeInitialLevel { state: usize, value: f64 },
    NonFiniteInitialLevel { state: usize },
    SelfTransition { state: usize },
    DuplicateTransition { from: usize, to: usize },
    TransitionOutOfRange { from: usize, to: usize },
    NegativeIntensity { from: usize, to: usize, value: f64 },
    NonFiniteIntensity { from: usize, to: usize },
    NegativeSource { value: f64 },
    NonFiniteSource,
    NonFinitePopulation,
    /// Interaction config: probability outside [0, 1].
    ProbabilityOutOfRange { field: &'static str, value: f64 },
    /// Interaction config: rate, time, or delay below zero.
    NegativeParameter { field: &'static str, value: f64 },
    /// Interaction config: pool size must be strictly positive.
    NonPositivePool { field: &'static str, value: f64 },
    /// Interaction config: any non-finite field.
    NonFiniteParameter { field: &'static str },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NoStates => write!(f, "graph has no states"),
            Violation::EmptyStateName { index } => {
                write!(f, "state {index} has an empty name")
            }
            Violation::DuplicateStateName { name, first, second } => {
                write!(f, "duplicate state name '{name}' (states {first} and {second})")
            }
            Violation::LevelCountMismatch { expected, found } => {
                write!(f, "expected {expected} initial levels, found {found}")
            }
            Violation::NegativeInitialLevel { state, value } => {
                write!(f, "negative initial level {value} on state {state}")
            }
            Violation::NonFiniteInitialLevel { state } => {
                write!(f, "non-finite initial level on state {state}")
            }
            Violation::SelfTransition { state } => {
                write!(f, "self-transition on state {state}")
            }
            Violation::DuplicateTransition { from, to } => {
                write!(f, "duplicate transition {from} -> {to}")
            }
            Violation::TransitionOutOfRange { from, to } => {
                write!(f, "transition {from} -> {to} references a missing state")
            }
            Violation::NegativeIntensity { from, to, value } => {
                write!(f, "negative intensity {value} on transition {from} -> {to}")
            }
            Violation::NonFiniteIntensity { from, to } => {
                write!(f, "non-finite intensity on transition {from} -> {to}")
            }
            Violation::NegativeSource { value } => {
                write!(f, "negative source rate {value}")
            }
            Violation::NonFiniteSource => write!(f, "non-finite source rate"),
            Violation::NonFinitePopulation => write!(f, "total population is not finite"),
            Violation::ProbabilityOutOfRange { field, value } => {
                write!(f, "{field} = {value} is outside [0, 1]")
            }
            Violation::NegativeParameter { field, value } => {
                write!(f, "{field} = {value} must be nonnegative")
            }
            Violation::NonPositivePool { field, value } => {
                write!(f, "{field} = {value} must be strictly positive")
            }
            Violation::NonFiniteParameter { field } => {
                write!(f, "{field} is not finite")
            }
        }
    }
}

/// One line summarizing a violation list, for diagnostics that must stay
/// on a single line.
pub(crate) fn summarize_violations(violations: &[Violation]) -> String {
    match violations.len() {
        0 => "unknown violation".to_string(),
        1 => violations[0].to_string(),
        n => format!("{} (+{} more)", violations[0], n - 1),
    }
}

/// Outcome of a validation pass: empty means every invariant holds.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Parameters of one side (bank or client) of the delayed interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideParams {
    /// Probability that an interaction attempt succeeds, in [0, 1].
    pub success_probability: f64,
    /// Productivity of this side, 1/time.
    pub productivity: f64,
    /// Operation time: how far back the partner pool is observed (time).
    pub operation_time: f64,
    /// Attention-switch delay: how stale this side's own pool information
    /// is when decisions are made (time).
    pub attention_delay: f64,
    /// Pool size before any interaction, strictly positive.
    pub initial_pool: f64,
}

/// Parameters of the delayed {banks; clients} interaction system.
///
/// Both pools start at their initial sizes and only shrink as pairs enter
/// interaction; the pre-history on t <= 0 is the constant initial pool.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionConfig {
    pub bank: SideParams,
    pub client: SideParams,
}

impl InteractionConfig {
    /// Checks every field invariant; empty report means the config is usable.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (side, params) in [("bank", &self.bank), ("client", &self.client)] {
            let fields: [(&'static str, f64); 5] = [
                (field_name(side, "success_probability"), params.success_probability),
                (field_name(side, "productivity"), params.productivity),
                (field_name(side, "operation_time"), params.operation_time),
                (field_name(side, "attention_delay"), params.attention_delay),
                (field_name(side, "initial_pool"), params.initial_pool),
            ];
            for (name, value) in fields {
                if !value.is_finite() {
                    violations.push(Violation::NonFiniteParameter { field: name });
                }
            }
            if params.success_probability.is_finite()
                && !(0.0..=1.0).contains(&params.success_probability)
            {
                violations.push(Violation::ProbabilityOutOfRange {
                    field: field_name(side, "success_probability"),
                    value: params.success_probability,
                });
            }
            for (name, value) in [
                (field_name(side, "productivity"), params.productivity),
                (field_name(side, "operation_time"), params.operation_time),
                (field_name(side, "attention_delay"), params.attention_delay),
            ] {
                if value.is_finite() && value < 0.0 {
                    violations.push(Violation::NegativeParameter { field: name, value });
                }
            }
            if params.initial_pool.is_finite() && params.initial_pool <= 0.0 {
                violations.push(Violation::NonPositivePool {
                    field: field_name(side, "initial_pool"),
                    value: params.initial_pool,
                });
            }
        }
        ValidationReport { violations }
    }

    /// Largest of the four lags; lookups never reach further back.
    pub fn max_lag(&self) -> f64 {
        self.bank
            .operation_time
            .max(self.bank.attention_delay)
            .max(self.client.operation_time)
            .max(self.client.attention_delay)
    }

    /// Smallest strictly positive lag, if any.
    pub fn min_positive_lag(&self) -> Option<f64> {
        [
            self.bank.operation_time,
            self.bank.attention_delay,
            self.client.operation_time,
            self.client.attention_delay,
        ]
        .into_iter()
        .filter(|&lag| lag > 0.0)
        .fold(None, |acc: Option<f64>, lag| {
            Some(acc.map_or(lag, |a| a.min(lag)))
        })
    }
}

fn field_name(side: &str, field: &str) -> &'static str {
    // Static names keep Violation free of allocations for the common fields.
    match (side, field) {
        ("bank", "success_probability") => "bank.success_probability",
        ("bank", "productivity") => "bank.productivity",
        ("bank", "operation_time") => "bank.operation_time",
        ("bank", "attention_delay") => "bank.attention_delay",
        ("bank", "initial_pool") => "bank.initial_pool",
        ("client", "success_probability") => "client.success_probability",
        ("client", "productivity") => "client.productivity",
        ("client", "operation_time") => "client.operation_time",
        ("client", "attention_delay") => "client.attention_delay",
        ("client", "initial_pool") => "client.initial_pool",
        _ => "<unknown field>",
    }
}

/// Dense row-major matrix of `f64`. Small helper shared by the cost
/// model, the aggregation index, and CSV parsing; not a linear-algebra
/// library.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Construction error for [`Matrix`] and shape checks built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShapeError {
    #[error("row {row} has {found} columns, expected {expected}")]
    RaggedRows { row: usize, expected: usize, found: usize },
    #[error("data length {found} does not match {rows}x{cols}")]
    LengthMismatch { rows: usize, cols: usize, found: usize },
}

impl Matrix {
    /// Builds a matrix from equal-length rows. An empty slice yields the
    /// 0x0 matrix.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, ShapeError> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(ShapeError::RaggedRows {
                    row: i,
                    expected: n_cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { rows: n_rows, cols: n_cols, data })
    }

    /// Builds a matrix from a flat row-major buffer.
    pub fn from_flat(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, ShapeError> {
        if data.len() != rows * cols {
            return Err(ShapeError::LengthMismatch { rows, cols, found: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        debug_assert!(row < self.rows && col < self.cols);
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn same_shape(&self, other: &Matrix) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    /// Flattens a single-row or single-column matrix into a vector.
    /// Returns `None` for genuinely two-dimensional shapes.
    pub fn as_vector(&self) -> Option<Vec<f64>> {
        if self.rows == 1 || self.cols == 1 {
            Some(self.data.clone())
        } else {
            None
        }
    }
}

/// Construction error for [`DelayCostModel`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DelayCostError {
    #[error("time-cost matrix is {d_rows}x{d_cols} but unit-cost matrix is {v_rows}x{v_cols}")]
    ShapeMismatch { d_rows: usize, d_cols: usize, v_rows: usize, v_cols: usize },
    #[error("column split {staff}+{external} does not match {cols} columns")]
    BadColumnSplit { staff: usize, external: usize, cols: usize },
    #[error("negative unit cost {value} at row {row}, column {col}")]
    NegativeUnitCost { row: usize, col: usize, value: f64 },
    #[error("non-finite entry at row {row}, column {col} of the {which} matrix")]
    NonFiniteEntry { which: &'static str, row: usize, col: usize },
}

/// Time and money costs of the meta-operations that make up one unit of
/// banking production.
///
/// Rows are meta-operations; the first `staff_columns` columns are
/// elementary operations executed by staff, the remaining
/// `external_columns` are external delays. Time costs may be negative:
/// a negative entry is an amplification that shortens the process.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayCostModel {
    time_costs: Matrix,
    unit_costs: Matrix,
    staff_columns: usize,
    external_columns: usize,
}

impl DelayCostModel {
    pub fn new(
        time_costs: Matrix,
        unit_costs: Matrix,
        staff_columns: usize,
        external_columns: usize,
    ) -> Result<Self, DelayCostError> {
        if !time_costs.same_shape(&unit_costs) {
            return Err(DelayCostError::ShapeMismatch {
                d_rows: time_costs.rows(),
                d_cols: time_costs.cols(),
                v_rows: unit_costs.rows(),
                v_cols: unit_costs.cols(),
            });
        }
        if staff_columns + external_columns != time_costs.cols() {
            return Err(DelayCostError::BadColumnSplit {
                staff: staff_columns,
                external: external_columns,
                cols: time_costs.cols(),
            });
        }
        for (which, m) in [("time-cost", &time_costs), ("unit-cost", &unit_costs)] {
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    if !m.get(r, c).is_finite() {
                        return Err(DelayCostError::NonFiniteEntry { which, row: r, col: c });
                    }
                }
            }
        }
        for r in 0..unit_costs.rows() {
            for c in 0..unit_costs.cols() {
                let v = unit_costs.get(r, c);
                if v < 0.0 {
                    return Err(DelayCostError::NegativeUnitCost { row: r, col: c, value: v });
                }
            }
        }
        Ok(Self { time_costs, unit_costs, staff_columns, external_columns })
    }

    /// Number of meta-operations (rows).
    pub fn meta_operations(&self) -> usize {
        self.time_costs.rows()
    }

    pub fn staff_columns(&self) -> usize {
        self.staff_columns
    }

    pub fn external_columns(&self) -> usize {
        self.external_columns
    }

    /// Time-cost matrix D.
    pub fn time_costs(&self) -> &Matrix {
        &self.time_costs
    }

    /// Unit-cost matrix V (currency per unit time, all entries >= 0).
    pub fn unit_costs(&self) -> &Matrix {
        &self.unit_costs
    }
}

/// Construction error for [`AggregateIndexSpec`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndexSpecError {
    #[error("weight matrix must be at least 1x1")]
    Empty,
    #[error("negative weight {value} at row {row}, column {col}")]
    NegativeWeight { row: usize, col: usize, value: f64 },
    #[error("weights sum to {sum}, expected 1 within 1e-12")]
    WeightSum { sum: f64 },
}

/// Weighting scheme for the aggregated productivity index over a grid of
/// economic indicators (rows) by branches (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateIndexSpec {
    weights: Matrix,
}

impl AggregateIndexSpec {
    /// Weights must be nonnegative and sum to 1 within 1e-12.
    pub fn new(weights: Matrix) -> Result<Self, IndexSpecError> {
        if weights.rows() == 0 || weights.cols() == 0 {
            return Err(IndexSpecError::Empty);
        }
        for r in 0..weights.rows() {
            for c in 0..weights.cols() {
                let w = weights.get(r, c);
                // NaN is rejected here too; infinities fall to the sum check.
                if w.is_nan() || w < 0.0 {
                    return Err(IndexSpecError::NegativeWeight { row: r, col: c, value: w });
                }
            }
        }
        let mut sum = 0.0;
        for &w in weights.as_slice() {
            sum += w;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(IndexSpecError::WeightSum { sum });
        }
        Ok(Self { weights })
    }

    /// Indicator count (rows).
    pub fn indicators(&self) -> usize {
        self.weights.rows()
    }

    /// Branch count (columns).
    pub fn branches(&self) -> usize {
        self.weights.cols()
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }
}

/// Construction error for [`Scenario`] run controls.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("horizon must be positive, got {0}")]
    NonPositiveHorizon(f64),
    #[error("step must be positive and at most the horizon, got {0}")]
    BadStep(f64),
    #[error("output grid must contain at least two points")]
    TooFewGridPoints,
    #[error("output grid must be strictly increasing")]
    GridNotSorted,
    #[error("output grid must start at 0 and end at the horizon")]
    GridSpanMismatch,
    #[error("output grid contains a non-finite time")]
    GridNotFinite,
}

/// A parsed model plus everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub graph: StateGraph,
    pub horizon: f64,
    pub step: f64,
    pub output_grid: Vec<f64>,
    pub seed: u64,
}

impl Scenario {
    pub fn new(
        graph: StateGraph,
        horizon: f64,
        step: f64,
        output_grid: Vec<f64>,
        seed: u64,
    ) -> Result<Self, ScenarioError> {
        if horizon <= 0.0 || !horizon.is_finite() {
            return Err(ScenarioError::NonPositiveHorizon(horizon));
        }
        if step.is_nan() || step <= 0.0 || step > horizon {
            return Err(ScenarioError::BadStep(step));
        }
        if output_grid.len() < 2 {
            return Err(ScenarioError::TooFewGridPoints);
        }
        if output_grid.iter().any(|t| !t.is_finite()) {
            return Err(ScenarioError::GridNotFinite);
        }
        if output_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ScenarioError::GridNotSorted);
        }
        if output_grid[0] != 0.0 || *output_grid.last().unwrap() != horizon {
            return Err(ScenarioError::GridSpanMismatch);
        }
        Ok(Self { graph, horizon, step, output_grid, seed })
    }
}

/// `points` uniformly spaced sample times covering [0, t_end], endpoints
/// landed exactly.
pub fn uniform_grid(t_end: f64, points: usize) -> Result<Vec<f64>, ScenarioError> {
    if points < 2 {
        return Err(ScenarioError::TooFewGridPoints);
    }
    if t_end <= 0.0 || !t_end.is_finite() {
        return Err(ScenarioError::NonPositiveHorizon(t_end));
    }
    let last = (points - 1) as f64;
    Ok((0..points).map(|k| t_end * (k as f64 / last)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state() -> StateGraph {
        StateGraph::new(
            vec!["A".into(), "B".into()],
            vec![1.0, 0.0],
            vec![Transition::new(0, 1, 1.0)],
            0.0,
        )
    }

    #[test]
    fn minimal_graph_validates_ok() {
        assert!(two_state().validate().is_ok());
    }

    #[test]
    fn negative_intensity_is_reported() {
        let mut g = two_state();
        g.transitions[0].rate = -0.5;
        let report = g.validate();
        assert_eq!(
            report.violations,
            vec![Violation::NegativeIntensity { from: 0, to: 1, value: -0.5 }]
        );
    }

    #[test]
    fn self_transition_is_reported() {
        let mut g = two_state();
        g.transitions.push(Transition::new(1, 1, 0.3));
        let report = g.validate();
        assert_eq!(report.violations, vec![Violation::SelfTransition { state: 1 }]);
    }

    #[test]
    fn duplicate_transition_is_reported() {
        let mut g = two_state();
        g.transitions.push(Transition::new(0, 1, 2.0));
        let report = g.validate();
        assert_eq!(report.violations, vec![Violation::DuplicateTransition { from: 0, to: 1 }]);
    }

    #[test]
    fn empty_graph_is_rejected() {
        let g = StateGraph::new(vec![], vec![], vec![], 0.0);
        assert!(g.validate().violations.contains(&Violation::NoStates));
    }

    #[test]
    fn zero_rate_transition_is_accepted() {
        let mut g = two_state();
        g.transitions[0].rate = 0.0;
        assert!(g.validate().is_ok());
    }

    #[test]
    fn total_population_sums_in_order() {
        let g = StateGraph::new(
            vec!["A".into(), "B".into()],
            vec![100.0, 0.0],
            vec![],
            0.0,
        );
        assert_eq!(g.total_population(), 100.0);

        let g = StateGraph::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![1.0, 2.0, 3.0],
            vec![],
            0.0,
        );
        assert_eq!(g.total_population(), 6.0);
    }

    #[test]
    fn interaction_config_bounds() {
        let ok = InteractionConfig {
            bank: SideParams {
                success_probability: 0.5,
                productivity: 1.0,
                operation_time: 1.0,
                attention_delay: 0.5,
                initial_pool: 10.0,
            },
            client: SideParams {
                success_probability: 0.1,
                productivity: 2.0,
                operation_time: 0.0,
                attention_delay: 0.0,
                initial_pool: 50.0,
            },
        };
        assert!(ok.validate().is_ok());
        assert_eq!(ok.max_lag(), 1.0);
        assert_eq!(ok.min_positive_lag(), Some(0.5));

        let mut bad = ok;
        bad.client.success_probability = 1.5;
        let report = bad.validate();
        assert_eq!(
            report.violations,
            vec![Violation::ProbabilityOutOfRange {
                field: "client.success_probability",
                value: 1.5,
            }]
        );

        let mut bad = ok;
        bad.bank.initial_pool = 0.0;
        assert!(!bad.validate().is_ok());
    }

    #[test]
    fn min_positive_lag_none_when_all_zero() {
        let mut cfg = InteractionConfig {
            bank: SideParams {
                success_probability: 0.0,
                productivity: 0.0,
                operation_time: 0.0,
                attention_delay: 0.0,
                initial_pool: 1.0,
            },
            client: SideParams {
                success_probability: 0.0,
                productivity: 0.0,
                operation_time: 0.0,
                attention_delay: 0.0,
                initial_pool: 1.0,
            },
        };
        assert_eq!(cfg.min_positive_lag(), None);
        cfg.client.operation_time = 0.25;
        assert_eq!(cfg.min_positive_lag(), Some(0.25));
    }

    #[test]
    fn matrix_rejects_ragged_rows() {
        let err = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).unwrap_err();
        assert_eq!(err, ShapeError::RaggedRows { row: 1, expected: 2, found: 1 });
    }

    #[test]
    fn delay_cost_model_shape_checks() {
        let d = Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let v = Matrix::from_rows(&[vec![1.0]]).unwrap();
        assert!(matches!(
            DelayCostModel::new(d.clone(), v, 2, 0),
            Err(DelayCostError::ShapeMismatch { .. })
        ));

        let v = Matrix::from_rows(&[vec![1.0, -1.0]]).unwrap();
        assert!(matches!(
            DelayCostModel::new(d.clone(), v, 2, 0),
            Err(DelayCostError::NegativeUnitCost { row: 0, col: 1, .. })
        ));

        let v = Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            DelayCostModel::new(d.clone(), v.clone(), 1, 0),
            Err(DelayCostError::BadColumnSplit { .. })
        ));
        // Negative time costs are amplifications, not errors.
        let d_neg = Matrix::from_rows(&[vec![-3.0, 2.0]]).unwrap();
        assert!(DelayCostModel::new(d_neg, v, 1, 1).is_ok());
    }

    #[test]
    fn index_spec_requires_unit_weight_sum() {
        let w = Matrix::from_rows(&[vec![0.5, 0.25]]).unwrap();
        assert!(matches!(AggregateIndexSpec::new(w), Err(IndexSpecError::WeightSum { .. })));
        let w = Matrix::from_rows(&[vec![0.5, 0.5]]).unwrap();
        assert!(AggregateIndexSpec::new(w).is_ok());
        let w = Matrix::from_rows(&[vec![1.5, -0.5]]).unwrap();
        assert!(matches!(
            AggregateIndexSpec::new(w),
            Err(IndexSpecError::NegativeWeight { .. })
        ));
    }

    #[test]
    fn scenario_grid_rules() {
        let g = two_state();
        let grid = uniform_grid(2.0, 5).unwrap();
        assert_eq!(grid.len(), 5);
        assert_eq!(grid[0], 0.0);
        assert_eq!(grid[4], 2.0);
        assert!(Scenario::new(g.clone(), 2.0, 0.1, grid.clone(), 7).is_ok());

        assert!(matches!(
            Scenario::new(g.clone(), 2.0, 3.0, grid.clone(), 7),
            Err(ScenarioError::BadStep(_))
        ));
        assert!(matches!(
            Scenario::new(g.clone(), 1.0, 0.1, grid, 7),
            Err(ScenarioError::GridSpanMismatch)
        ));
        assert!(matches!(uniform_grid(1.0, 1), Err(ScenarioError::TooFewGridPoints)));
    }
}
