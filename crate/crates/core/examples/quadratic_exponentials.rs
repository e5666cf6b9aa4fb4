//! Star-exponentials of `au² + bv² + 2c uv` at normal and Weyl ordering.

use starweyl::gauss::GaussElement;
use starweyl::intertwine::{intertwine_gauss, BranchPath};
use starweyl::linalg::{c, r};
use starweyl::quadexp::{star_exp_quad_m1_normal, star_exp_quad_m1_normal_with, star_exp_quad_m1_weyl, CrossTerm, QuadM1};
use starweyl::{Context, ExpressionParameter};

fn main() -> starweyl::Result<()> {
    let ctx = Context::new(1)?.with_hbar(0.8)?;
    let q = QuadM1::new(c(0.3, 0.1), c(-0.2, 0.0), c(0.5, 0.2));
    println!("discriminant c^2 - ab = {:.4}", q.discriminant());
    for t in [0.1, 0.4, 0.9] {
        let normal = star_exp_quad_m1_normal(&ctx, &q, r(t))?;
        let circ = star_exp_quad_m1_normal_with(&ctx, &q, r(t), CrossTerm::Circ, None)?;
        let weyl = star_exp_quad_m1_weyl(&ctx, &q, r(t / ctx.hbar))?;
        let moved = intertwine_gauss(
            &ctx,
            &ExpressionParameter::normal(1),
            &ExpressionParameter::weyl(1),
            &GaussElement::from(circ),
            BranchPath::Principal,
        )?;
        println!(
            "t = {t}: normal amplitude {:.5}, Weyl amplitude {:.5}, normal moved to Weyl vs Weyl form {:.1e}",
            normal.amplitude,
            weyl.amplitude,
            moved.as_gauss().unwrap().max_diff(&weyl)
        );
    }
    Ok(())
}
