//! Runs the full battery of equivalent characterisations on a pencil, a
//! union of a pencil and a hyperplane family, and a random family.
//!
//! ```bash
//! cargo run --example battery
//! ```

use clg::clset::{
    make_hyperplane_family, make_point_pencil, random_family, run_battery, BatteryData, BatteryLevel, CLCandidate,
    SpreadMode,
};
use clg::{projspace::GeometryCtx, scheme::Scheme, SchemeParams};
use rand::SeedableRng;

fn main() -> clg::Result<()> {
    let ctx = GeometryCtx::enumerate(SchemeParams::new(3, 1, 3)?)?;
    let scheme = Scheme::build(&ctx)?;
    let data = BatteryData::generate(&ctx, SpreadMode::Exhaustive)?;

    let pencil = make_point_pencil(0, &ctx)?;
    println!("{}", run_battery(&pencil, &scheme, &data, BatteryLevel::All)?.render_text());

    let h = (0..ctx.num_hyperplanes() as u32)
        .map(|h| ctx.hyperplane(h))
        .find(|h| !h.contains_vector(ctx.field(), ctx.point(0)))
        .unwrap();
    let union = pencil.disjoint_union(&make_hyperplane_family(&h, &ctx)?)?;
    println!("{}", run_battery(&union, &scheme, &data, BatteryLevel::All)?.render_text());

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let random = CLCandidate::new(&ctx, random_family(&ctx, 13, &mut rng))?;
    let report = run_battery(&random, &scheme, &data, BatteryLevel::All)?;
    println!("{}", report.render_text());
    println!("first witness: {:?}", report.witness());
    Ok(())
}
