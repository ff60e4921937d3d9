//! Limiting regime of a client lifecycle chain.
//!
//! Solves the stationary balance problem for a three-stage lifecycle
//! and shows the transient expectations relaxing onto it.
//!
//! Run with: cargo run --example steady_state_balance

use bankdyn::{integrate, steady_state, uniform_grid, StateGraph, Transition};

fn main() {
    // prospect -> active -> dormant, with reactivation and churn back
    // to prospect. Irreducible, so the steady state is unique.
    let graph = StateGraph::new(
        vec!["prospect".into(), "active".into(), "dormant".into()],
        vec![50.0, 10.0, 0.0],
        vec![
            Transition { from: 0, to: 1, rate: 0.6 },
            Transition { from: 1, to: 2, rate: 0.2 },
            Transition { from: 1, to: 0, rate: 0.1 },
            Transition { from: 2, to: 1, rate: 0.5 },
            Transition { from: 2, to: 0, rate: 0.05 },
        ],
        0.0,
    );
    assert!(graph.validate().is_ok());

    let steady = steady_state(&graph).expect("irreducible chain");
    println!("steady state (population {}):", graph.total_population());
    for (name, level) in graph.states.iter().zip(steady.iter()) {
        println!("  {name:>9}  {level:.6}");
    }

    let grid = uniform_grid(30.0, 7).expect("valid grid");
    let trajectory = integrate(&graph, &grid, 1e-3).expect("closed graph integrates");
    println!("\nrelaxation toward the limit:");
    println!("{:>6}  {:>10}  {:>10}  {:>10}  {:>12}", "t", "prospect", "active", "dormant", "gap");
    for k in 0..trajectory.len() {
        let row = trajectory.row(k);
        let gap = row
            .iter()
            .zip(steady.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        println!(
            "{:>6.1}  {:>10.4}  {:>10.4}  {:>10.4}  {gap:>12.3e}",
            trajectory.times[k], row[0], row[1], row[2]
        );
    }
}
