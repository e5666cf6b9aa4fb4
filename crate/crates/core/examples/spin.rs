//! Products of polar elements as a double cover of complex rotations.

use std::f64::consts::PI;

use starweyl::linalg::{self, rvec};
use starweyl::quadexp::{reflect, spin_element};
use starweyl::Context;

fn main() -> starweyl::Result<()> {
    let ctx = Context::new(3)?;
    let a = rvec(&[1.0, 0.0, 0.0]);
    let b = rvec(&[(PI / 3.0).cos(), (PI / 3.0).sin(), 0.0]);
    let x = rvec(&[0.2, -0.5, 0.9]);
    let rx: Vec<f64> = reflect(&a, &x, 1e-12)?.iter().map(|z| z.re).collect();
    println!("reflect(a, x) = {rx:.3?}");

    let (amp, ad) = spin_element(&ctx, &[(a.clone(), 1), (b.clone(), 1)])?;
    println!("eps(a) eps(b): amplitude {amp:.4}, det Ad = {:.4}", linalg::det(&ad));

    let word: Vec<_> = (0..3).flat_map(|_| [(a.clone(), 1), (b.clone(), 1)]).collect();
    let (amp, ad) = spin_element(&ctx, &word)?;
    println!(
        "(eps(a) eps(b))^3: amplitude {amp:.4}, |Ad - I| = {:.1e}",
        linalg::max_abs_diff(&ad, &linalg::identity(3))
    );
    Ok(())
}
