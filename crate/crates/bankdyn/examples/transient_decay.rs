//! Expectation dynamics of a pure-decay client book.
//!
//! A hundred open agreements close independently at unit intensity, so
//! the expected open count follows 100·exp(-t). The run integrates the
//! forward equations and prints the trajectory against the closed form.
//!
//! Run with: cargo run --example transient_decay

use bankdyn::{default_step, integrate, uniform_grid, StateGraph, Transition};

fn main() {
    let graph = StateGraph::new(
        vec!["open".into(), "closed".into()],
        vec![100.0, 0.0],
        vec![Transition { from: 0, to: 1, rate: 1.0 }],
        0.0,
    );
    assert!(graph.validate().is_ok());

    let t_end = 3.0;
    let grid = uniform_grid(t_end, 13).expect("valid grid");
    let dt = default_step(&graph, t_end);
    let trajectory = integrate(&graph, &grid, dt).expect("decay integrates");

    println!("pure decay, dt = {dt}");
    println!("{:>6}  {:>12}  {:>12}  {:>9}", "t", "open", "closed form", "error");
    for k in 0..trajectory.len() {
        let t = trajectory.times[k];
        let open = trajectory.row(k)[0];
        let exact = 100.0 * (-t).exp();
        println!("{t:>6.2}  {open:>12.6}  {exact:>12.6}  {:>9.2e}", (open - exact).abs());
    }

    let residual = bankdyn::conservation_residual(&graph, &trajectory);
    println!("\nworst conservation residual: {residual:.2e}");
}
