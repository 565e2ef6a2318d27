//! Subspace enumeration and line spreads of PG(3,2) and PG(3,3).
//!
//! ```bash
//! cargo run --example spreads
//! ```

use clg::projspace::GeometryCtx;
use clg::SchemeParams;

fn main() -> clg::Result<()> {
    let ctx = GeometryCtx::enumerate(SchemeParams::new(3, 1, 2)?)?;
    println!("PG(3,2): {} points, {} lines", ctx.num_points(), ctx.num_kspaces());

    let spread = ctx.construct_spread()?;
    println!("field-reduction spread: {:?} (spread: {})", spread.ids(), ctx.is_spread(&spread));

    let all = ctx.enumerate_all_spreads(usize::MAX)?;
    let reduced = ctx.reduced_spreads()?;
    println!("{} spreads in total, {} of them coordinate images of the reduced one", all.len(), reduced.len());

    let a = ctx.kspace(0);
    let b = (0..ctx.num_kspaces() as u32).find(|&id| ctx.disjoint(0, id)).unwrap();
    println!("line 0 and line {b} are skew; their join has dimension {}", a.join(ctx.field(), ctx.kspace(b)).dim());

    let ctx3 = GeometryCtx::enumerate(SchemeParams::new(3, 1, 3)?)?;
    let start = std::time::Instant::now();
    let n = ctx3.enumerate_all_spreads(usize::MAX)?.len();
    println!("PG(3,3): {n} spreads found in {:?}", start.elapsed());
    Ok(())
}
