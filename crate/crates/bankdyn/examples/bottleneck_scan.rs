//! Utilization scan across a demand sweep.
//!
//! Holds service intensities fixed and scales arrivals from quiet to
//! overloaded, printing how each operation's load flag degrades from
//! normal through warning to bottleneck.
//!
//! Run with: cargo run --example bottleneck_scan

use bankdyn::{utilization, LoadFlag, DEFAULT_WARN_THRESHOLD};

fn main() {
    let base_arrivals = [3.0, 5.0, 2.0, 7.0];
    let services = [4.0, 6.0, 4.0, 8.0];
    let names = ["teller", "transfer", "review", "settlement"];

    println!("warning threshold {DEFAULT_WARN_THRESHOLD}, service rates {services:?}\n");
    print!("{:>8}", "demand");
    for name in names {
        print!("  {name:>12}");
    }
    println!();

    for step in 0..7 {
        let factor = 0.5 + 0.15 * step as f64;
        let arrivals: Vec<f64> = base_arrivals.iter().map(|a| a * factor).collect();
        let rows = utilization(&arrivals, &services, DEFAULT_WARN_THRESHOLD)
            .expect("positive service rates");
        print!("{factor:>7.2}x");
        for row in &rows {
            let mark = match row.flag {
                LoadFlag::Normal => ' ',
                LoadFlag::Warning => '!',
                LoadFlag::Bottleneck => 'X',
            };
            print!("  {:>10.3} {mark}", row.rho);
        }
        println!();
    }

    println!("\n(blank = normal, ! = warning, X = bottleneck)");
}
