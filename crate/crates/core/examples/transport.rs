//! Transporting a Gaussian around loops in the space of orderings.

use std::f64::consts::PI;

use starweyl::gauss::{GaussElement, Gaussian};
use starweyl::intertwine::{k_point, transport_gauss};
use starweyl::linalg::{self, c, r, CMat, I, ZERO};
use starweyl::path::PathSpec;
use starweyl::{Context, ExpressionParameter};

fn main() -> starweyl::Result<()> {
    let ctx = Context::new(1)?;
    let k0 = ExpressionParameter::normal(1);
    let a = linalg::from_rows(&[vec![r(0.5), r(0.1)], vec![r(0.1), r(-0.25)]])?;
    let g = Gaussian::pure(c(1.0, 0.0), a.clone());
    let eig = a.clone().eigenvalues().unwrap();
    println!("det(I - zA) vanishes at z = {:.4}, {:.4}", 1.0 / eig[0], 1.0 / eig[1]);

    for (center, radius) in [(1.0 / eig[0], 0.4), (ZERO, 0.5), (ZERO, 5.0)] {
        let mut ks: Vec<CMat> = vec![k0.k().clone()];
        ks.extend((0..=64).map(|j| k0.k() + linalg::identity(2) * (center + radius * (I * (PI / 2.0 + 2.0 * PI * j as f64 / 64.0)).exp())));
        ks.push(k0.k().clone());
        let path = PathSpec::new(ks.iter().map(k_point).collect());
        let out = transport_gauss(&ctx, &GaussElement::from(g.clone()), &path)?;
        let h = out.as_gauss().unwrap();
        println!("loop around {center:.3} radius {radius}: amplitude {:.6}, sheet {}", h.amplitude, h.branch.sheet);
    }
    Ok(())
}
