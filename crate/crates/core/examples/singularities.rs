//! Singular parameters of crossed exponentials under the special ordering.

use std::f64::consts::PI;

use starweyl::holonomy::{diagonal_degeneracy_check, find_singularities, ScanTarget, SpecialParams, Vertex};
use starweyl::Context;

fn main() -> starweyl::Result<()> {
    let m = 3;
    let ctx = Context::new(m)?;
    let p = SpecialParams::new(2.0, 1.0, 3.0, m)?;
    println!("alpha = {:.4}, beta = {:.4}, d+ = {:.4}", p.alpha(), p.beta(), p.d_plus());

    for k in 0..m {
        let roots = find_singularities(&ctx, &p, ScanTarget::Single(k), &Vertex::origin(m), (0.0, 2.0 * PI))?;
        println!("coordinate {} alone: {} roots", k + 1, roots.len());
    }
    for s in find_singularities(&ctx, &p, ScanTarget::Pair(0, 1), &Vertex::from_bits(&[false, false, true]), (0.0, 2.0 * PI))? {
        println!("pair (1,2) over raised 3: t = {:.12}, |det| = {:.1e}", s.t.re, s.det_abs);
    }
    println!("arccos(3/5) = {:.12}", 0.6f64.acos());

    for ell in 0..3 {
        let r = diagonal_degeneracy_check(&p, ell)?;
        println!(
            "ell = {ell}: A0 - B0 = {:.1e}, A1 - B1 - d+ = {:.1e}, double root {:.6} at t = {:.6}, |det| = {:.1e}",
            r.a0_minus_b0, r.a1_minus_b1_residual, r.double_root, r.t_root, r.det_at_root
        );
    }
    Ok(())
}
