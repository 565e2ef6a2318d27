//! Closed-form counts for the scheme of lines in PG(3,3) and PG(5,2).
//!
//! ```bash
//! cargo run --example formulas
//! ```

use clg::exactmath::{
    d2prime, num_kspaces, p_matrix, parameter_range, qbinom, s1, w_sigma, w_sigma_bar, w_total,
    within_classification_bound,
};
use clg::SchemeParams;
use num_rational::BigRational;

fn main() -> clg::Result<()> {
    println!("[4,2]_3 = {}", qbinom(4, 2, 3)?);

    let p = SchemeParams::new(3, 1, 3)?;
    println!("\n{p}: {} lines", num_kspaces(&p));
    for (j, row) in p_matrix(&p).iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        println!("  P[{j}] = [{}]", cells.join(", "));
    }
    let (lo, hi) = parameter_range(&p);
    println!("  parameters run from {lo} to {hi}");

    let p = SchemeParams::new(5, 1, 2)?;
    let x = BigRational::from_integer(3.into());
    println!("\n{p}, x = {x}");
    println!("  W = {}, W_sigma = {}, W_sigma_bar = {}", w_total(&p)?, w_sigma(&p)?, w_sigma_bar(&p)?);
    println!("  members meeting a member: {}", s1(&p, &x)?);
    println!("  members skew to two skew members with x in the span: {}", d2prime(&p, &x)?);
    println!("  within classification bound: {}", within_classification_bound(&p, &x)?);
    Ok(())
}
