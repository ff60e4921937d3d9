//! Monte Carlo validation of the expectation engine.
//!
//! Samples exact event-driven paths of a two-state churn model, averages
//! them, and checks every (time, state) cell of the ensemble mean against
//! the integrated forward equations within 3.5 standard errors.
//!
//! Run with: cargo run --example stochastic_cross_check

use bankdyn::{integrate, ssa, uniform_grid, StateGraph, Transition};

fn main() {
    let graph = StateGraph::new(
        vec!["open".into(), "busy".into()],
        vec![100.0, 0.0],
        vec![
            Transition { from: 0, to: 1, rate: 1.0 },
            Transition { from: 1, to: 0, rate: 2.0 },
        ],
        0.0,
    );
    assert!(graph.validate().is_ok());

    let grid = uniform_grid(5.0, 11).expect("valid grid");
    let expected = integrate(&graph, &grid, 1e-3).expect("closed graph integrates");
    let summary = ssa::ensemble_mean(&graph, &grid, 42, 2000).expect("ensemble runs");
    let stderr = summary.stderr.as_ref().expect("more than one replication");

    println!("2000 replications, seed 42");
    println!("{:>5}  {:>12}  {:>10}  {:>12}", "t", "mean(open)", "stderr", "ode(open)");
    for k in 0..grid.len() {
        println!(
            "{:>5.1}  {:>12.4}  {:>10.4}  {:>12.4}",
            summary.times[k],
            summary.mean_at(k, 0),
            stderr[k * summary.n_states],
            expected.row(k)[0]
        );
    }

    let comparison = ssa::compare_to_ode(&summary, &expected).expect("shapes match");
    println!(
        "\n{} of {} cells within 3.5 standard errors (worst ratio {:.3})",
        comparison.within, comparison.cells, comparison.worst_ratio
    );
    println!("verdict: {}", if comparison.pass { "PASS" } else { "FAIL" });
}
