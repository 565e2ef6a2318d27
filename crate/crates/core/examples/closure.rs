//! Complements, disjoint unions and differences of Cameron-Liebler sets,
//! plus the point/subspace intersection identity.
//!
//! ```bash
//! cargo run --example closure
//! ```

use clg::clset::{
    extra_property_check, make_hyperplane_family, make_point_pencil, run_battery, BatteryData, BatteryLevel,
    CLCandidate, SpreadMode,
};
use clg::{projspace::GeometryCtx, scheme::Scheme, SchemeParams};

fn main() -> clg::Result<()> {
    let ctx = GeometryCtx::enumerate(SchemeParams::new(3, 1, 2)?)?;
    let scheme = Scheme::build(&ctx)?;
    let data = BatteryData::generate(&ctx, SpreadMode::Exhaustive)?;
    let is_cl = |c: &CLCandidate<'_>| -> clg::Result<bool> {
        Ok(run_battery(c, &scheme, &data, BatteryLevel::All)?.passed() == Some(true))
    };

    let pencil = make_point_pencil(0, &ctx)?;
    let off = ctx.hyperplane(
        (0..ctx.num_hyperplanes() as u32)
            .find(|&h| !ctx.hyperplane(h).contains_vector(ctx.field(), ctx.point(0)))
            .unwrap(),
    );
    let hyp = make_hyperplane_family(&off, &ctx)?;
    let union = pencil.disjoint_union(&hyp)?;
    let complement = union.complement();
    let back = union.difference(&hyp)?;
    println!("pencil ∪ hyperplane: x = {}, CL: {}", union.x(), is_cl(&union)?);
    println!("its complement: x = {}, CL: {}", complement.x(), is_cl(&complement)?);
    println!("(pencil ∪ hyperplane) \\ hyperplane is the pencil: {}", back.family() == pencil.family());

    let on = ctx.hyperplane(0);
    let p = (0..ctx.num_points() as u32).find(|&p| on.contains_vector(ctx.field(), ctx.point(p))).unwrap();
    println!("identity at (P{p}, hyperplane 0) for the union: {}", extra_property_check(&union, p, &on)?);

    if let Err(e) = pencil.disjoint_union(&make_point_pencil(1, &ctx)?) {
        println!("two pencils overlap: {e}");
    }
    Ok(())
}
