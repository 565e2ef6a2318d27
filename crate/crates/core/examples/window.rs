//! Certifies that no Cameron-Liebler line set of PG(4,2) has a parameter
//! strictly between 1 and 2.
//!
//! ```bash
//! cargo run --release --example window
//! ```

use clg::search::{nonexistence_window, SearchConfig};
use clg::{projspace::GeometryCtx, scheme::Scheme, SchemeParams};
use num_rational::BigRational;

fn main() -> clg::Result<()> {
    let ctx = GeometryCtx::enumerate(SchemeParams::new(4, 1, 2)?)?;
    let scheme = Scheme::build(&ctx)?;
    let (lo, hi) = (BigRational::from_integer(1.into()), BigRational::from_integer(2.into()));
    let report = nonexistence_window(&ctx, &scheme, &lo, &hi, &SearchConfig::default())?;
    for e in &report.entries {
        let why = e.reason.as_deref().unwrap_or("searched");
        println!("size {:3}  x = {}/{}  nodes {:6}  {why}", e.size, e.x_num, e.x_den, e.nodes);
    }
    println!("window ({lo}, {hi}) empty: {}", report.is_empty());
    Ok(())
}
