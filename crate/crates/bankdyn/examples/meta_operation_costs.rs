//! Time and money cost of a product line's meta-operations.
//!
//! Each row of the delay matrix is one client-facing product broken into
//! elementary operations (staff columns) and external waits. A negative
//! entry is an amplification: a feature that saves time instead of
//! spending it. Unit costs price each elementary delay.
//!
//! Run with: cargo run --example meta_operation_costs

use bankdyn::{
    aggregate_index, per_meta_operation, total_delay, unit_cost, AggregateIndexSpec,
    DelayCostModel, Matrix,
};

fn main() {
    let products = ["account opening", "payment order", "credit review"];

    // Two staff columns (front office, back office), two external
    // columns (courier, registry). The payment order's back-office step
    // is automated away: its entry is negative.
    let delays = Matrix::from_rows(&[
        vec![0.5, 1.0, 2.0, 0.0],
        vec![0.25, -0.75, 0.0, 0.5],
        vec![1.5, 4.0, 1.0, 3.0],
    ])
    .expect("rectangular matrix");
    let prices = Matrix::from_rows(&[
        vec![40.0, 25.0, 10.0, 8.0],
        vec![40.0, 25.0, 10.0, 8.0],
        vec![60.0, 25.0, 10.0, 8.0],
    ])
    .expect("rectangular matrix");

    let model = DelayCostModel::new(delays, prices, 2, 2).expect("consistent cost model");
    let rows = per_meta_operation(&model);

    println!(
        "{} meta-operations, {} staff + {} external columns\n",
        model.meta_operations(),
        model.staff_columns(),
        model.external_columns()
    );
    println!("{:>16}  {:>10}  {:>10}", "product", "time", "cost");
    for (name, row) in products.iter().zip(rows.iter()) {
        println!("{name:>16}  {:>10.3}  {:>10.2}", row.time, row.cost);
    }
    println!("{:>16}  {:>10.3}  {:>10.2}", "total", total_delay(&model), unit_cost(&model));

    // A convex management index over the three products: weight credit
    // review twice as heavily as the other two.
    let weights =
        AggregateIndexSpec::new(Matrix::from_rows(&[vec![0.25, 0.25, 0.5]]).expect("one row"))
            .expect("weights are convex");
    let times: Vec<f64> = rows.iter().map(|r| r.time).collect();
    let index = aggregate_index(&weights, &Matrix::from_rows(&[times]).expect("one row"))
        .expect("shapes match");
    println!("\nweighted delay index: {index:.4}");
}
