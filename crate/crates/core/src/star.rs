//! Star products of polynomials, polynomial×Gaussian products and the
//! Heisenberg group of linear star-exponentials.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::context::{standard_skew, Context, ExpressionParameter};
use crate::error::{Error, Result};
use crate::gauss::{GaussElement, Gaussian};
use crate::intertwine::{intertwine_gauss, BranchPath};
use crate::linalg::{self, CMat, CVec, ONE, ZERO};
use crate::poly::{Exponent, WeylPolynomial};
use crate::quadexp::star_exp_crossed;

fn check_dims(ctx: &Context, k: &ExpressionParameter, polys: &[&WeylPolynomial]) -> Result<()> {
    let n = ctx.n();
    if k.m() != ctx.m {
        return Err(Error::Dimension(format!("K is for m={}, context has m={}", k.m(), ctx.m)));
    }
    for p in polys {
        if p.nvars() != n {
            return Err(Error::Dimension(format!(
                "polynomial has {} generators, context expects {}",
                p.nvars(),
                n
            )));
        }
    }
    Ok(())
}

fn add_exp(a: &[u32], b: &[u32]) -> Exponent {
    a.iter().zip(b.iter()).map(|(x, y)| x + y).collect()
}

/// `f *_K g = Σ_k (iℏ)^k/(k! 2^k) Λ_{i₁j₁}…Λ_{iₖjₖ} ∂ⁱf ∂ʲg` with Λ = K + J.
pub fn star_poly(
    ctx: &Context,
    k: &ExpressionParameter,
    f: &WeylPolynomial,
    g: &WeylPolynomial,
) -> Result<WeylPolynomial> {
    check_dims(ctx, k, &[f, g])?;
    let n = ctx.n();
    let lam = k.lambda();
    let nz: Vec<(usize, usize, Complex64)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter_map(|(i, j)| {
            let l = lam[(i, j)];
            (l != ZERO).then_some((i, j, l))
        })
        .collect();

    let mut level: BTreeMap<(Exponent, Exponent), Complex64> = BTreeMap::new();
    for (a, ca) in f.terms() {
        for (b, cb) in g.terms() {
            *level.entry((a.clone(), b.clone())).or_insert(ZERO) += ca * cb;
        }
    }

    let half_ih = ctx.ih() * 0.5;
    let mut weight = ONE;
    let mut out = WeylPolynomial::zero(n);
    let mut order = 0u32;
    while !level.is_empty() {
        for ((a, b), c) in &level {
            out.add_term(add_exp(a, b), c * weight);
        }
        order += 1;
        weight = weight * half_ih / order as f64;
        let mut next: BTreeMap<(Exponent, Exponent), Complex64> = BTreeMap::new();
        for ((a, b), c) in &level {
            for &(i, j, l) in &nz {
                if a[i] == 0 || b[j] == 0 {
                    continue;
                }
                let mut a2 = a.clone();
                let mut b2 = b.clone();
                a2[i] -= 1;
                b2[j] -= 1;
                *next.entry((a2, b2)).or_insert(ZERO) += c * l * (a[i] * b[j]) as f64;
            }
        }
        level = next;
    }
    out.prune();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `p * G`
    Left,
    /// `G * p`
    Right,
}

/// `p * G` or `G * p`; the chain terminates at the degree of `p`, so the
/// result is exact: the same Gaussian with a new polynomial prefactor.
pub fn star_poly_gauss(
    ctx: &Context,
    k: &ExpressionParameter,
    p: &WeylPolynomial,
    g: &GaussElement,
    side: Side,
) -> Result<GaussElement> {
    check_dims(ctx, k, &[p])?;
    let g = match g {
        GaussElement::Zero { m } => return Ok(GaussElement::Zero { m: *m }),
        GaussElement::Gauss(g) => g,
    };
    if g.nvars() != ctx.n() {
        return Err(Error::Dimension("Gaussian does not match context".into()));
    }
    let n = ctx.n();
    let lam = k.lambda();
    let q = g.exponent_poly(ctx);
    let dq: Vec<WeylPolynomial> = (0..n).map(|j| q.derivative(j)).collect();
    // D_j R = ∂_j R + R ∂_j q
    let d = |r: &WeylPolynomial, j: usize| -> WeylPolynomial { &r.derivative(j) + &(r * &dq[j]) };

    let mut level: BTreeMap<Exponent, WeylPolynomial> = BTreeMap::new();
    for (a, c) in p.terms() {
        level.insert(a.clone(), g.prefactor.scale(*c));
    }
    let half_ih = ctx.ih() * 0.5;
    let mut weight = ONE;
    let mut order = 0u32;
    let mut pre = WeylPolynomial::zero(n);
    while !level.is_empty() {
        for (a, rpoly) in &level {
            let mono = WeylPolynomial::monomial(a.clone(), weight);
            pre = &pre + &(&mono * rpoly);
        }
        order += 1;
        weight = weight * half_ih / order as f64;
        let mut next: BTreeMap<Exponent, WeylPolynomial> = BTreeMap::new();
        for (a, rpoly) in &level {
            for pi in 0..n {
                if a[pi] == 0 {
                    continue;
                }
                let mut a2 = a.clone();
                a2[pi] -= 1;
                for gj in 0..n {
                    let l = match side {
                        Side::Left => lam[(pi, gj)],
                        Side::Right => lam[(gj, pi)],
                    };
                    if l == ZERO {
                        continue;
                    }
                    let term = d(rpoly, gj).scale(l * a[pi] as f64);
                    let slot = next.entry(a2.clone()).or_insert_with(|| WeylPolynomial::zero(n));
                    *slot = &*slot + &term;
                }
            }
        }
        level = next;
    }
    let mut out = g.clone();
    out.prefactor = pre;
    Ok(GaussElement::from(out))
}

/// `e^c · e_*^{(s/iℏ)⟨a,u⟩}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearExp {
    pub a: CVec,
    pub s: Complex64,
    pub c: Complex64,
}

impl LinearExp {
    pub fn new(a: CVec, s: Complex64, c: Complex64) -> Self {
        LinearExp { a, s, c }
    }

    pub fn unit(n: usize) -> Self {
        LinearExp { a: CVec::zeros(n), s: ONE, c: ZERO }
    }

    pub fn inverse(&self) -> Self {
        LinearExp { a: self.a.clone(), s: -self.s, c: -self.c }
    }

    /// The effective covector `s·a`.
    pub fn covector(&self) -> CVec {
        &self.a * self.s
    }
}

/// K-expression `e^{c + (s²/4iℏ)⟨aK,a⟩} e^{(s/iℏ)⟨a,u⟩}`.
pub fn k_expression_linear(ctx: &Context, k: &ExpressionParameter, e: &LinearExp) -> Gaussian {
    let n = ctx.n();
    let sa = e.covector();
    let amp = (e.c + linalg::pair(&sa, k.k(), &sa) / (ctx.ih() * 4.0)).exp();
    Gaussian::new(amp, linalg::zeros(n), sa, WeylPolynomial::one(n))
}

/// Heisenberg group law: the covectors add and the log-prefactor gains
/// `(1/2iℏ)⟨a₁J, a₂⟩`.
pub fn linear_exp_product(ctx: &Context, e1: &LinearExp, e2: &LinearExp) -> LinearExp {
    let j = standard_skew(ctx).j;
    let a1 = e1.covector();
    let a2 = e2.covector();
    let shift = linalg::pair(&a1, &j, &a2) / (ctx.ih() * 2.0);
    LinearExp { a: &a1 + &a2, s: ONE, c: e1.c + e2.c + shift }
}

/// `e_*^{-⟨b,u⟩/iℏ} * e_*^{-⟨a,u⟩/iℏ} * e_*^{⟨b,u⟩/iℏ} * e_*^{⟨a,u⟩/iℏ} = e^{(1/iℏ)⟨bJ,a⟩}`.
pub fn multiplicative_commutator(ctx: &Context, a: &CVec, b: &CVec) -> Complex64 {
    let j = standard_skew(ctx).j;
    (linalg::pair(b, &j, a) / ctx.ih()).exp()
}

/// Objects on which `u ↦ u + w` can be substituted.
pub trait Translate: Sized {
    fn translated(&self, ctx: &Context, w: &CVec) -> Self;
}

impl Translate for WeylPolynomial {
    fn translated(&self, _ctx: &Context, w: &CVec) -> Self {
        self.shift(w.as_slice())
    }
}

impl Translate for Gaussian {
    fn translated(&self, ctx: &Context, w: &CVec) -> Self {
        let a = self.phase();
        let shift_const = linalg::pair(w, a, w) + linalg::dot(&self.linear, w);
        let mut g = self.clone();
        g.amplitude *= (shift_const / ctx.ih()).exp();
        g.linear = &self.linear + (a * w) * linalg::r(2.0);
        g.prefactor = self.prefactor.shift(w.as_slice());
        g
    }
}

impl Translate for GaussElement {
    fn translated(&self, ctx: &Context, w: &CVec) -> Self {
        match self {
            GaussElement::Zero { m } => GaussElement::Zero { m: *m },
            GaussElement::Gauss(g) => GaussElement::Gauss(g.translated(ctx, w)),
        }
    }
}

/// Conjugation by `e_*^{(s/iℏ)⟨a,u⟩}`: substitutes `u → u + s·aJ`.
/// The result does not depend on the ordering parameter.
pub fn adjoint_translate<T: Translate>(ctx: &Context, a: &CVec, s: Complex64, f: &T) -> T {
    let j = standard_skew(ctx).j;
    let w = (j.transpose() * a) * s;
    f.translated(ctx, &w)
}

/// K-expression of the Weyl-symmetrized monomial `W_*(ũᵏṽˡ)` for m = 1,
/// averaging the star products of all distinct words.
pub fn weyl_symmetrize(ctx: &Context, k: &ExpressionParameter, ku: u32, lv: u32) -> Result<WeylPolynomial> {
    if ctx.m != 1 {
        return Err(Error::InvalidParams("weyl_symmetrize requires m = 1".into()));
    }
    let total = ku + lv;
    if total > 12 {
        return Err(Error::InvalidParams("k + l <= 12 required".into()));
    }
    let u = WeylPolynomial::var(2, 0);
    let v = WeylPolynomial::var(2, 1);
    let mut sum = WeylPolynomial::zero(2);
    let mut count = 0u64;
    for mask in 0u32..(1u32 << total) {
        if mask.count_ones() != ku {
            continue;
        }
        let mut acc = WeylPolynomial::one(2);
        for pos in 0..total {
            let letter = if mask & (1 << pos) != 0 { &u } else { &v };
            acc = star_poly(ctx, k, &acc, letter)?;
        }
        sum = &sum + &acc;
        count += 1;
    }
    Ok(sum.scale(linalg::r(1.0 / count as f64)))
}

#[derive(Debug, Clone, Serialize)]
pub struct BumpingReport {
    pub t: Complex64,
    /// Max over the grid of `|v * e_*^{it u*v} - e_*^{it v*u} * v|`.
    pub deviation: f64,
    /// Same comparison for `e_*^{it u*v} * u` against `u * e_*^{it v*u}`.
    pub deviation_u: f64,
    pub points: usize,
}

/// Checks `v * e_*^{it u*v} = e_*^{it v*u} * v` and its companion for the
/// u generator, for m = 1 under K.
pub fn bumping_check(ctx: &Context, k: &ExpressionParameter, t: Complex64) -> Result<BumpingReport> {
    if ctx.m != 1 {
        return Err(Error::InvalidParams("bumping_check requires m = 1".into()));
    }
    let k0 = ExpressionParameter::normal(1);
    // e_*^{it u∘v} = e_*^{(s/iℏ) u∘v} with s = -tℏ
    let s = -t * ctx.hbar;
    let circ = star_exp_crossed(ctx, &CMat::from_element(1, 1, ONE), s);
    let circ_k = intertwine_gauss(ctx, &k0, k, &GaussElement::Gauss(circ), BranchPath::Principal)
        .map_err(|e| match e {
            Error::SingularIntertwiner(msg) | Error::BranchObstruction(msg) => {
                Error::SingularExpression(format!("e_*^(it u o v) at t = {t}: {msg}"))
            }
            other => other,
        })?;
    let half = ctx.ih() * t * 0.5;
    // u*v = u∘v - iℏ/2, v*u = u∘v + iℏ/2
    let uv = scale_elem(&circ_k, (half * (-linalg::I)).exp());
    let vu = scale_elem(&circ_k, (half * linalg::I).exp());
    let u = WeylPolynomial::var(2, 0);
    let v = WeylPolynomial::var(2, 1);
    let lhs = star_poly_gauss(ctx, k, &v, &uv, Side::Left)?;
    let rhs = star_poly_gauss(ctx, k, &v, &vu, Side::Right)?;
    let lhs_u = star_poly_gauss(ctx, k, &u, &uv, Side::Right)?;
    let rhs_u = star_poly_gauss(ctx, k, &u, &vu, Side::Left)?;
    let grid = crate::oracle::default_grid(1);
    let mut dev: f64 = 0.0;
    let mut dev_u: f64 = 0.0;
    for x in &grid {
        dev = dev.max((lhs.eval(ctx, x) - rhs.eval(ctx, x)).norm());
        dev_u = dev_u.max((lhs_u.eval(ctx, x) - rhs_u.eval(ctx, x)).norm());
    }
    Ok(BumpingReport { t, deviation: dev, deviation_u: dev_u, points: grid.len() })
}

fn scale_elem(g: &GaussElement, s: Complex64) -> GaussElement {
    match g {
        GaussElement::Zero { m } => GaussElement::Zero { m: *m },
        GaussElement::Gauss(g) => GaussElement::Gauss(g.scaled(s)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, r};

    fn ctx1() -> Context {
        Context::new(1).unwrap()
    }

    #[test]
    fn normal_order_commutation() {
        let ctx = ctx1();
        let k0 = ExpressionParameter::normal(1);
        let u = WeylPolynomial::var(2, 0);
        let v = WeylPolynomial::var(2, 1);
        let vu = star_poly(&ctx, &k0, &v, &u).unwrap();
        assert_eq!(vu.coef(&[1, 1]), ONE);
        assert!((vu.coef(&[0, 0]) - c(0.0, 1.0)).norm() < 1e-15);
        let uv = star_poly(&ctx, &k0, &u, &v).unwrap();
        assert_eq!(uv, &u * &v);
    }

    #[test]
    fn unit_order_square() {
        let ctx = ctx1();
        let k = ExpressionParameter::unit(1);
        let u = WeylPolynomial::var(2, 0);
        let p = star_poly(&ctx, &k, &u, &u).unwrap();
        assert_eq!(p.coef(&[2, 0]), ONE);
        assert!((p.coef(&[0, 0]) - c(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn weyl_symmetric_product() {
        let ctx = ctx1();
        let k = ExpressionParameter::weyl(1);
        let u = WeylPolynomial::var(2, 0);
        let v = WeylPolynomial::var(2, 1);
        let s = &star_poly(&ctx, &k, &u, &v).unwrap() + &star_poly(&ctx, &k, &v, &u).unwrap();
        assert!(s.scale(r(0.5)).max_abs_diff(&(&u * &v)) < 1e-15);
    }

    #[test]
    fn commutator_is_minus_ih_for_any_k() {
        let ctx = Context::new(2).unwrap().with_hbar(0.37).unwrap();
        let kmat = CMat::from_fn(4, 4, |i, j| c(0.1 * (i + j) as f64, 0.05 * (i * j) as f64));
        let k = crate::context::make_expression_parameter(&ctx, crate::context::KSpec::Matrix(kmat)).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let ui = WeylPolynomial::var(4, i);
                let vj = WeylPolynomial::var(4, 2 + j);
                let comm = &star_poly(&ctx, &k, &ui, &vj).unwrap() - &star_poly(&ctx, &k, &vj, &ui).unwrap();
                let want = if i == j { c(0.0, -0.37) } else { ZERO };
                assert!(comm.max_abs_diff(&WeylPolynomial::constant(4, want)) < 1e-14);
            }
        }
    }

    #[test]
    fn polynomial_kills_gaussian() {
        let ctx = ctx1();
        let k = ExpressionParameter::weyl(1);
        let a = linalg::from_rows(&[vec![r(0.0), r(-1.0)], vec![r(-1.0), r(0.0)]]).unwrap();
        let g = GaussElement::Gauss(Gaussian::pure(ONE, a));
        let v = WeylPolynomial::var(2, 1);
        assert!(star_poly_gauss(&ctx, &k, &v, &g, Side::Left).unwrap().is_zero());

        let ku = ExpressionParameter::unit(1);
        let a = linalg::from_rows(&[vec![r(-1.0), r(0.0)], vec![r(0.0), r(0.0)]]).unwrap();
        let g = GaussElement::Gauss(Gaussian::pure(ONE, a));
        let u = WeylPolynomial::var(2, 0);
        assert!(star_poly_gauss(&ctx, &ku, &u, &g, Side::Left).unwrap().is_zero());
    }

    #[test]
    fn unit_polynomial_leaves_gaussian() {
        let ctx = ctx1();
        let k = ExpressionParameter::normal(1);
        let a = linalg::from_rows(&[vec![c(0.1, 0.2), r(0.3)], vec![r(0.3), r(0.0)]]).unwrap();
        let g = GaussElement::Gauss(Gaussian::pure(c(2.0, 1.0), a));
        let one = WeylPolynomial::one(2);
        assert_eq!(star_poly_gauss(&ctx, &k, &one, &g, Side::Left).unwrap(), g);
        assert_eq!(star_poly_gauss(&ctx, &k, &one, &g, Side::Right).unwrap(), g);
    }

    #[test]
    fn linear_k_expression() {
        let ctx = ctx1();
        let k0 = ExpressionParameter::normal(1);
        let e = LinearExp::new(linalg::rvec(&[1.0, 1.0]), ONE, ZERO);
        let g = k_expression_linear(&ctx, &k0, &e);
        assert!((g.amplitude - c(0.0, -0.5).exp()).norm() < 1e-15);
        let w = k_expression_linear(&ctx, &ExpressionParameter::weyl(1), &e);
        assert_eq!(w.amplitude, ONE);
    }

    #[test]
    fn heisenberg_prefactor() {
        let ctx = ctx1();
        let e1 = LinearExp::new(linalg::rvec(&[1.0, 0.0]), ONE, ZERO);
        let e2 = LinearExp::new(linalg::rvec(&[0.0, 1.0]), ONE, ZERO);
        let p = linear_exp_product(&ctx, &e1, &e2);
        assert!((p.c - c(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn commutator_examples() {
        let ctx = ctx1();
        let a = linalg::rvec(&[0.0, 1.0]);
        let b = linalg::rvec(&[1.0, 0.0]);
        assert!((multiplicative_commutator(&ctx, &a, &b) - c(0.0, 1.0).exp()).norm() < 1e-15);
        assert!((multiplicative_commutator(&ctx, &a, &a) - ONE).norm() < 1e-15);
        let a2 = &a * r(2.0);
        let lhs = multiplicative_commutator(&ctx, &a2, &b);
        let rhs = multiplicative_commutator(&ctx, &a, &b).powu(2);
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn translate_generator() {
        let ctx = ctx1();
        let u = WeylPolynomial::var(2, 0);
        let out = adjoint_translate(&ctx, &linalg::rvec(&[0.0, 1.0]), ONE, &u);
        assert_eq!(out, &u + &WeylPolynomial::one(2));
        assert_eq!(adjoint_translate(&ctx, &linalg::rvec(&[0.0, 1.0]), ZERO, &u), u);
    }

    #[test]
    fn translate_gaussian_keeps_phase() {
        let ctx = ctx1();
        let a = linalg::from_rows(&[vec![c(0.1, 0.2), r(0.3)], vec![r(0.3), r(0.0)]]).unwrap();
        let g = Gaussian::pure(ONE, a);
        let w = linalg::cvec(&[c(0.2, 0.1), c(-0.3, 0.0)]);
        let out = adjoint_translate(&ctx, &w, c(0.5, 0.0), &g);
        assert_eq!(out.phase(), g.phase());
        let shift = (standard_skew(&ctx).j.transpose() * &w) * c(0.5, 0.0);
        let x = [c(0.4, -0.1), c(0.2, 0.3)];
        let xs = [x[0] + shift[0], x[1] + shift[1]];
        assert!((out.eval(&ctx, &x) - g.eval(&ctx, &xs)).norm() < 1e-13);
    }

    #[test]
    fn symmetrized_words_at_weyl() {
        let ctx = ctx1();
        let k = ExpressionParameter::weyl(1);
        let u = WeylPolynomial::var(2, 0);
        let v = WeylPolynomial::var(2, 1);
        let w = weyl_symmetrize(&ctx, &k, 1, 1).unwrap();
        assert!(w.max_abs_diff(&(&u * &v)) < 1e-15);
        let w = weyl_symmetrize(&ctx, &k, 2, 2).unwrap();
        assert!(w.max_abs_diff(&(&u.pow(2) * &v.pow(2))) < 1e-14);
        assert_eq!(weyl_symmetrize(&ctx, &k, 0, 0).unwrap(), WeylPolynomial::one(2));
    }

    #[test]
    fn bumping_at_zero_and_random() {
        let ctx = ctx1();
        let k0 = ExpressionParameter::normal(1);
        let rep = bumping_check(&ctx, &k0, ZERO).unwrap();
        assert!(rep.deviation < 1e-14);
        for t in [c(0.3, 0.1), c(-0.5, 0.7), c(0.9, -0.2)] {
            let rep = bumping_check(&ctx, &k0, t).unwrap();
            assert!(rep.deviation < 1e-10, "{t}: {}", rep.deviation);
            assert!(rep.deviation_u < 1e-10, "{t}: {}", rep.deviation_u);
        }
    }
}
