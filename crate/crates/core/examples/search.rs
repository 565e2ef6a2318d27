//! Exhaustive search for Cameron-Liebler line sets of parameter 1.
//!
//! ```bash
//! cargo run --release --example search
//! ```

use clg::search::{is_trivial_x1, search_all, SearchConfig};
use clg::{projspace::GeometryCtx, scheme::Scheme, SchemeParams};
use num_rational::BigRational;

fn main() -> clg::Result<()> {
    let x = BigRational::from_integer(1.into());
    for n in [3, 4] {
        let ctx = GeometryCtx::enumerate(SchemeParams::new(n, 1, 2)?)?;
        let scheme = Scheme::build(&ctx)?;
        let config = SearchConfig { threads: 4, ..Default::default() };
        let res = search_all(&ctx, &scheme, &x, &config)?;
        let trivial = res.families.iter().filter(|f| is_trivial_x1(&ctx, f)).count();
        println!(
            "PG({n},2), x = 1: {} families ({trivial} pencils or hyperplane families), {} nodes, {:?}",
            res.families.len(),
            res.stats.nodes,
            res.elapsed
        );
    }
    Ok(())
}
