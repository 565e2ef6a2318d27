//! Arithmetic in GF(9) and the field-reduction map GF(4)^2 -> GF(2)^4.
//!
//! ```bash
//! cargo run --example fields
//! ```

use clg::gfq::{FieldCtx, FieldReduction};

fn main() -> clg::Result<()> {
    let f = FieldCtx::new(9)?;
    println!("GF(9) modulus coefficients, low degree first: {:?}", f.modulus());
    let g = f
        .elements()
        .find(|&a| !a.is_zero() && (1..8).all(|e| f.pow(a, e).index() != 1))
        .expect("multiplicative group is cyclic");
    let powers: Vec<usize> = (0..8).map(|e| f.pow(g, e).index()).collect();
    println!("powers of primitive element {}: {powers:?}", g.index());
    let a = f.element(5);
    println!("5 * 5^-1 = {}", f.mul(a, f.inv(a)?).index());

    let red = FieldReduction::new(FieldCtx::new(4)?, FieldCtx::new(2)?)?;
    let v = [red.big().element(1), red.big().element(2)];
    let line = red.image_of_point(&v);
    println!("\npoint (1,2) of PG(1,4) becomes a line of PG(3,2) spanned by:");
    for row in line {
        let cells: Vec<usize> = row.iter().map(|e| e.index()).collect();
        println!("  {cells:?}");
    }
    Ok(())
}
