//! Diagnostics over meta-operation structure: total and per-operation
//! time and money costs, utilization-based bottleneck flags, and the
//! weighted aggregate productivity index.

use crate::model::{AggregateIndexSpec, DelayCostModel, Matrix};
use thiserror::Error;

/// Utilization at or above this fraction of capacity earns a warning
/// flag when no explicit threshold is given.
pub const DEFAULT_WARN_THRESHOLD: f64 = 0.8;

/// Failure of an analysis computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("value matrix is {found_rows}x{found_cols}, weights are {expected_rows}x{expected_cols}")]
    ShapeMismatch {
        expected_rows: usize,
        expected_cols: usize,
        found_rows: usize,
        found_cols: usize,
    },
    #[error("{arrivals} arrival rates but {services} service rates")]
    MismatchedLengths { arrivals: usize, services: usize },
    #[error("arrival rate at row {index} must be finite and nonnegative, got {value}")]
    BadArrival { index: usize, value: f64 },
    #[error("service rate at row {index} must be finite and positive, got {value}")]
    BadService { index: usize, value: f64 },
    #[error("warning threshold must be in (0, 1], got {0}")]
    BadThreshold(f64),
    #[error("non-finite indicator value at row {row}, column {col}")]
    NonFiniteValue { row: usize, col: usize },
}

/// Time and money cost of one meta-operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetaOpCost {
    /// Row sum of time costs; negative means the operation amplifies
    /// (shortens) the process.
    pub time: f64,
    /// Row sum of time costs weighted by unit costs, never negative
    /// contributions from the money side.
    pub cost: f64,
}

fn row_time(model: &DelayCostModel, r: usize) -> f64 {
    let mut sum = 0.0;
    for &d in model.time_costs().row(r) {
        sum += d;
    }
    sum
}

fn row_cost(model: &DelayCostModel, r: usize) -> f64 {
    let d = model.time_costs().row(r);
    let v = model.unit_costs().row(r);
    let mut sum = 0.0;
    for c in 0..d.len() {
        sum += d[c] * v[c];
    }
    sum
}

/// Cost breakdown per meta-operation, in row order.
pub fn per_meta_operation(model: &DelayCostModel) -> Vec<MetaOpCost> {
    (0..model.meta_operations())
        .map(|r| MetaOpCost { time: row_time(model, r), cost: row_cost(model, r) })
        .collect()
}

/// Total production time of one banking product: every time cost summed,
/// rows in order and each row left to right. Accumulation order matches
/// [`per_meta_operation`], so the breakdown reproduces this value
/// exactly.
pub fn total_delay(model: &DelayCostModel) -> f64 {
    let mut total = 0.0;
    for r in 0..model.meta_operations() {
        total += row_time(model, r);
    }
    total
}

/// Total money cost of one banking product: sum of time costs weighted
/// by unit costs, accumulated in the same order as
/// [`per_meta_operation`].
pub fn unit_cost(model: &DelayCostModel) -> f64 {
    let mut total = 0.0;
    for r in 0..model.meta_operations() {
        total += row_cost(model, r);
    }
    total
}

/// Load classification of one meta-operation. Ordering follows severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LoadFlag {
    Normal,
    Warning,
    Bottleneck,
}

impl std::fmt::Display for LoadFlag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoadFlag::Normal => write!(f, "normal"),
            LoadFlag::Warning => write!(f, "warning"),
            LoadFlag::Bottleneck => write!(f, "bottleneck"),
        }
    }
}

/// Flags a utilization: at or past capacity is a bottleneck, at or past
/// the warning threshold is a warning.
pub fn classify_load(rho: f64, warn_threshold: f64) -> LoadFlag {
    if rho >= 1.0 {
        LoadFlag::Bottleneck
    } else if rho >= warn_threshold {
        LoadFlag::Warning
    } else {
        LoadFlag::Normal
    }
}

/// Utilization and flag of one meta-operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilizationRow {
    pub index: usize,
    /// Utilization rho = arrival rate / service rate.
    pub rho: f64,
    pub flag: LoadFlag,
}

/// Computes utilization rho = arrival / service per meta-operation and
/// flags each against the warning threshold (in (0, 1]).
pub fn utilization(
    arrivals: &[f64],
    services: &[f64],
    warn_threshold: f64,
) -> Result<Vec<UtilizationRow>, AnalysisError> {
    if arrivals.len() != services.len() {
        return Err(AnalysisError::MismatchedLengths {
            arrivals: arrivals.len(),
            services: services.len(),
        });
    }
    if !warn_threshold.is_finite() || !(0.0..=1.0).contains(&warn_threshold) || warn_threshold == 0.0
    {
        return Err(AnalysisError::BadThreshold(warn_threshold));
    }
    let mut rows = Vec::with_capacity(arrivals.len());
    for i in 0..arrivals.len() {
        if !arrivals[i].is_finite() || arrivals[i] < 0.0 {
            return Err(AnalysisError::BadArrival { index: i, value: arrivals[i] });
        }
        if !services[i].is_finite() || services[i] <= 0.0 {
            return Err(AnalysisError::BadService { index: i, value: services[i] });
        }
        let rho = arrivals[i] / services[i];
        rows.push(UtilizationRow { index: i, rho, flag: classify_load(rho, warn_threshold) });
    }
    Ok(rows)
}

/// Weighted aggregate of an indicator-by-branch value grid. With weights
/// nonnegative and summing to one, the result is a convex combination:
/// it always lies between the smallest and largest value.
pub fn aggregate_index(spec: &AggregateIndexSpec, values: &Matrix) -> Result<f64, AnalysisError> {
    let w = spec.weights();
    if !w.same_shape(values) {
        return Err(AnalysisError::ShapeMismatch {
            expected_rows: w.rows(),
            expected_cols: w.cols(),
            found_rows: values.rows(),
            found_cols: values.cols(),
        });
    }
    for r in 0..values.rows() {
        for c in 0..values.cols() {
            if !values.get(r, c).is_finite() {
                return Err(AnalysisError::NonFiniteValue { row: r, col: c });
            }
        }
    }
    let mut index = 0.0;
    for r in 0..values.rows() {
        for c in 0..values.cols() {
            index += w.get(r, c) * values.get(r, c);
        }
    }
    Ok(index)
}
