//! Star products of polynomials under several orderings.

use starweyl::linalg::c;
use starweyl::star::star_poly;
use starweyl::{Context, ExpressionParameter, WeylPolynomial};

fn show(p: &WeylPolynomial) -> String {
    let terms: Vec<String> = p.terms().map(|(e, z)| format!("({:.3}{:+.3}i)u^{}v^{}", z.re, z.im, e[0], e[1])).collect();
    if terms.is_empty() { "0".into() } else { terms.join(" + ") }
}

fn main() -> starweyl::Result<()> {
    let ctx = Context::new(1)?;
    let u = WeylPolynomial::var(2, 0);
    let v = WeylPolynomial::var(2, 1);
    for (name, k) in [
        ("normal", ExpressionParameter::normal(1)),
        ("anti-normal", ExpressionParameter::antinormal(1)),
        ("Weyl", ExpressionParameter::weyl(1)),
    ] {
        let uv = star_poly(&ctx, &k, &u, &v)?;
        let vu = star_poly(&ctx, &k, &v, &u)?;
        println!("{name:>11}: u*v = {}   v*u = {}   [u,v] = {}", show(&uv), show(&vu), show(&(&uv - &vu)));
    }

    let k = ExpressionParameter::normal(1);
    let f = &u.pow(2) + &v.scale(c(0.0, 1.0));
    let g = &(&u * &v) + &WeylPolynomial::constant(2, c(2.0, 0.0));
    println!("f*g = {}", show(&star_poly(&ctx, &k, &f, &g)?));
    println!("g*f = {}", show(&star_poly(&ctx, &k, &g, &f)?));
    Ok(())
}
