//! The vacuum idempotents and their normalization from the product oracle.

use starweyl::linalg::{ONE, ZERO};
use starweyl::quadexp::{QuadM1, Sign};
use starweyl::verify::vacuum_resolution;
use starweyl::Context;

fn main() -> starweyl::Result<()> {
    let ctx = Context::new(1)?;
    let q = QuadM1::new(ZERO, ZERO, ONE);
    for sign in [Sign::Plus, Sign::Minus] {
        let v = vacuum_resolution(&ctx, &q, sign)?;
        println!("{sign:?}");
        println!("  (E*E)/E on the grid:   {:.12} (spread {:.1e})", v.ratio, v.ratio_spread);
        println!("  idempotent amplitude:  {:.12}", v.fixed_amplitude);
        println!("  library amplitude:     {}", v.library_amplitude);
        println!("  |vac*vac - vac|:       {:.1e} ({} resummed points)", v.idempotence_deviation, v.resummed_points);
        println!("  mismatched limit:      {:.1e}", v.opposite_limit);
    }
    Ok(())
}
