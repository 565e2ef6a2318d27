//! Writes a spread of PG(3,4) in the CLKSET format, reads it back, and
//! loads relation tables through the on-disk cache.
//!
//! ```bash
//! cargo run --example file_io
//! ```

use clg::cache::Cache;
use clg::format::ClksetFile;
use clg::{projspace::GeometryCtx, SchemeParams};

fn main() -> clg::Result<()> {
    let dir = std::env::temp_dir().join(format!("clg-example-{}", std::process::id()));
    let ctx = GeometryCtx::enumerate(SchemeParams::new(3, 1, 4)?)?;
    let spread = ctx.construct_spread()?;
    let path = dir.join("spread.clk");
    ClksetFile::from_family(&ctx, &spread).write(&path)?;
    let text = std::fs::read_to_string(&path)?;
    print!("{}", text.lines().take(4).map(|l| format!("{l}\n")).collect::<String>());
    println!("... {} lines", text.lines().count());

    let back = ClksetFile::read(&path)?.to_family(&ctx)?;
    println!("round trip preserved the family: {}", back == spread);

    let cache = Cache::new(dir.join("cache"));
    let (_, first) = cache.relations(&ctx)?;
    let (_, second) = cache.relations(&ctx)?;
    println!("relation table: {first:?}, then {second:?}");
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
