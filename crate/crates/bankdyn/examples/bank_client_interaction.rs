//! Delay-coupled contraction of a bank pool and a client pool.
//!
//! Each successful interaction binds one bank unit to one client, so
//! both pools shrink together. Each side reacts to the partner pool as
//! it looked one operation time ago, scaled by how stale its own pool
//! information is. Before any lag elapses the bank pool follows a bare
//! exponential; the run prints both to show where history kicks in.
//!
//! Run with: cargo run --example bank_client_interaction

use bankdyn::{interaction, io, uniform_grid};

const CONFIG: &str = "
# gentle desk-scale coupling
p_B = 0.3
p_C = 0.2
lambda_B = 0.25
lambda_C = 0.15
tau_B = 0.5
tau_C = 0.7
delta_B = 0.2
delta_C = 0.3
N_B = 12
N_C = 30
";

fn main() {
    let config = io::parse_interaction(CONFIG).expect("config parses");
    let t_end = 5.0;
    let grid = uniform_grid(t_end, 26).expect("valid grid");
    let dt = interaction::default_step(&config, t_end);
    let trajectory = interaction::integrate(&config, &grid, dt).expect("gentle coupling integrates");

    // On [0, min(tau_C, delta_B)] every delayed argument still reads the
    // constant pre-history, so the bank equation is linear.
    let first_interval = config.client.operation_time.min(config.bank.attention_delay);
    let rate = config.client.success_probability * config.client.productivity
        * config.client.initial_pool
        / config.bank.initial_pool;

    println!("delay-coupled interaction, dt = {dt}");
    println!("first interval ends at t = {first_interval}");
    println!("{:>5}  {:>10}  {:>10}  {:>14}", "t", "bank", "client", "bare exponential");
    for k in 0..trajectory.len() {
        let t = trajectory.times[k];
        let row = trajectory.row(k);
        let bare = config.bank.initial_pool * (-rate * t).exp();
        let marker = if t <= first_interval { " <- exact here" } else { "" };
        println!("{t:>5.1}  {:>10.5}  {:>10.5}  {bare:>14.5}{marker}", row[0], row[1]);
    }
}
