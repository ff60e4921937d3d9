//! Deterministic and stochastic simulation of client/service dynamics in
//! financial institutions.
//!
//! The crate models a service network as a labeled directed graph whose
//! states hold expected element counts. Four capabilities build on that
//! shared representation:
//!
//! * [`kolmogorov`]: transient evolution of the expected occupancy via
//!   the forward equations, plus steady states from the linear balance
//!   system.
//! * [`interaction`]: the delay-coupled decline of bank and client pools
//!   engaged in mutual search, integrated by the method of steps.
//! * [`ssa`]: an exact stochastic realization of the same jump process,
//!   with ensemble statistics and a consistency check against the
//!   deterministic expectations.
//! * [`analysis`]: time and money costs of meta-operations, utilization
//!   flags for bottleneck scanning, and the aggregated productivity
//!   index.
//!
//! [`io`] parses and serializes the model description language, the
//! interaction config format, and numeric CSV; [`cli`] wires everything
//! into the `bankdyn` command-line tool. Start with the `examples/`
//! directory: each file is a runnable tour of one capability.

pub mod analysis;
pub mod cli;
pub mod interaction;
pub mod io;
pub mod kolmogorov;
pub mod model;
pub mod ssa;

pub use analysis::{
    aggregate_index, per_meta_operation, total_delay, unit_cost, utilization, AnalysisError,
    LoadFlag, MetaOpCost, UtilizationRow, DEFAULT_WARN_THRESHOLD,
};
pub use interaction::{DdeError, Side, SINGULARITY_FLOOR};
pub use kolmogorov::{
    conservation_residual, default_step, integrate, steady_state, EngineError, Trajectory,
    NEGATIVITY_TOLERANCE,
};
pub use model::{
    uniform_grid, AggregateIndexSpec, DelayCostError, DelayCostModel, IndexSpecError,
    InteractionConfig, Matrix, Scenario, ScenarioError, ShapeError, SideParams, StateGraph,
    Transition, ValidationReport, Violation,
};
pub use ssa::{
    compare_to_ode, derive_replication_seed, ensemble_mean, sample_path, Comparison,
    EnsembleSummary, SamplePath, SplitMix64, SsaError,
};
