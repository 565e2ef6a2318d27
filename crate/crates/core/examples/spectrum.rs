//! Relation matrices, the row space of the incidence matrix and the
//! eigenspace decomposition for lines of PG(3,2).
//!
//! ```bash
//! cargo run --example spectrum
//! ```

use clg::scheme::{build_all_relations, relations_commute, rowspace_equals_v0v1, verify_spectrum, Scheme};
use clg::{projspace::GeometryCtx, SchemeParams};

fn main() -> clg::Result<()> {
    let ctx = GeometryCtx::enumerate(SchemeParams::new(3, 1, 2)?)?;
    let scheme = Scheme::build(&ctx)?;
    println!("incidence rank {}, kernel dimension {}", scheme.rank(), scheme.kernel().len());
    println!("relation matrices commute: {}", relations_commute(&build_all_relations(scheme.relations())?));

    let v = rowspace_equals_v0v1(&scheme)?;
    println!("dim V0 = {}, dim V1 = {}, row space = V0 + V1: {}", v.dim_v0, v.dim_v1, v.holds());

    let spec = verify_spectrum(&scheme)?;
    println!("eigenspace multiplicities {:?}", spec.multiplicities);
    println!("every eigenvalue confirmed: {}", spec.all_verified(ctx.num_kspaces()));
    Ok(())
}
