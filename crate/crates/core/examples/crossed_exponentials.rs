//! Crossed star-exponentials and their group law at normal ordering.

use std::f64::consts::PI;

use starweyl::linalg::{self, c, CMat, I};
use starweyl::quadexp::{crossed_product, gl_product, star_exp_crossed};
use starweyl::Context;

fn main() -> starweyl::Result<()> {
    let ctx = Context::new(2)?;
    let cm = linalg::from_rows(&[vec![c(0.4, 0.0), c(0.1, 0.2)], vec![c(-0.3, 0.0), c(0.0, 0.5)]])?;
    let (s, t) = (c(0.3, 0.1), c(-0.7, 0.4));
    let prod = crossed_product(&ctx, &star_exp_crossed(&ctx, &cm, s), &star_exp_crossed(&ctx, &cm, t))?;
    let direct = star_exp_crossed(&ctx, &cm, s + t);
    println!("exponential law defect: {:.2e}", prod.max_diff(&direct));

    let a = direct.crossed_block();
    let inv = starweyl::quadexp::gl_inverse(&a, 1e-12)?;
    println!("gl_product(A, A^-1) = {:.2e}", linalg::max_abs(&gl_product(&a, &inv)));

    let one = CMat::from_element(1, 1, c(1.0, 0.0));
    let ctx1 = Context::new(1)?;
    for k in 1..=4 {
        let g = star_exp_crossed(&ctx1, &one, I * PI * k as f64);
        println!("t = {k} pi i: amplitude {:.3}, crossed block {:.3}", g.amplitude, g.crossed_block()[(0, 0)]);
    }
    Ok(())
}
