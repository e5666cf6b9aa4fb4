//! Moving polynomials and Gaussians between orderings.

use starweyl::gauss::{GaussElement, Gaussian};
use starweyl::intertwine::{intertwine_gauss, intertwine_poly, singular_det, BranchPath};
use starweyl::linalg::{self, c, r};
use starweyl::star::star_poly;
use starweyl::{Context, ExpressionParameter, WeylPolynomial};

fn main() -> starweyl::Result<()> {
    let ctx = Context::new(1)?;
    let (k0, kw) = (ExpressionParameter::normal(1), ExpressionParameter::weyl(1));
    let u = WeylPolynomial::var(2, 0);
    let v = WeylPolynomial::var(2, 1);

    let uv = &u * &v;
    let w = intertwine_poly(&ctx, &k0, &kw, &uv)?;
    let terms: Vec<String> = w.terms().map(|(e, z)| format!("({z:.2})u^{}v^{}", e[0], e[1])).collect();
    println!("uv at normal ordering is {} at Weyl ordering", terms.join(" + "));

    let f = &u.pow(3) + &v.pow(2);
    let lhs = intertwine_poly(&ctx, &k0, &kw, &star_poly(&ctx, &k0, &f, &uv)?)?;
    let rhs = star_poly(&ctx, &kw, &intertwine_poly(&ctx, &k0, &kw, &f)?, &w)?;
    println!("homomorphism defect: {:.2e}", lhs.max_abs_diff(&rhs));

    let a = linalg::from_rows(&[vec![c(0.2, 0.1), r(0.3)], vec![r(0.3), c(-0.1, 0.0)]])?;
    let g = GaussElement::from(Gaussian::pure(r(1.0), a.clone()));
    println!("det(I - A dK) = {:.6}", singular_det(&ctx, &k0, &kw, &a));
    let gw = intertwine_gauss(&ctx, &k0, &kw, &g, BranchPath::Principal)?;
    let back = intertwine_gauss(&ctx, &kw, &k0, &gw, BranchPath::Principal)?;
    let gw = gw.as_gauss().unwrap();
    println!("at Weyl: amplitude {:.6}", gw.amplitude);
    for row in linalg::to_rows(gw.phase()) {
        println!("  phase row {:.6} {:.6}", row[0], row[1]);
    }
    println!("round trip defect: {:.2e}", back.as_gauss().unwrap().max_diff(g.as_gauss().unwrap()));
    Ok(())
}
