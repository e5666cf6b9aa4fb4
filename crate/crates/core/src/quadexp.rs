//! Closed-form star-exponentials of quadratic forms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::context::{Context, ExpressionParameter};
use crate::error::{Error, Result};
use crate::gauss::{Branch, GaussElement, Gaussian};
use crate::intertwine::{intertwine_gauss, BranchPath};
use crate::linalg::{self, CMat, CVec, I, ONE, ZERO};
use crate::path::{self, PathSpec};

/// `A + B + 2AB`, the group law of crossed phases at normal ordering.
pub fn gl_product(a: &CMat, b: &CMat) -> CMat {
    a + b + (a * b) * linalg::r(2.0)
}

/// `−(I + 2X)⁻¹X`.
pub fn gl_inverse(x: &CMat, tol: f64) -> Result<CMat> {
    let n = x.nrows();
    let g = linalg::identity(n) + x * linalg::r(2.0);
    let inv = linalg::inverse(&g, tol.max(1e-14))
        .map_err(|_| Error::NotInGroup(format!("det(I + 2X) = {}", linalg::det(&g))))?;
    Ok(-(inv * x))
}

/// A crossed phase `C` standing for `e^{(2/iℏ) Σ C_kl ũ_k ṽ_l}` at K₀.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossedForm {
    pub c: CMat,
}

impl CrossedForm {
    pub fn new(c: CMat) -> Self {
        CrossedForm { c }
    }

    pub fn to_gauss(&self, amplitude: Complex64) -> Gaussian {
        Gaussian::crossed(amplitude, &self.c)
    }

    /// The crossed block of a pure Gaussian whose diagonal blocks vanish.
    pub fn from_gauss(g: &Gaussian, tol: f64) -> Result<Self> {
        let m = g.m();
        let a = g.phase();
        let diag = a.view((0, 0), (m, m)).iter().chain(a.view((m, m), (m, m)).iter()).map(|z| z.norm()).fold(0.0, f64::max);
        if diag > tol || !g.is_pure() {
            return Err(Error::Unsupported("Gaussian is not of crossed form".into()));
        }
        Ok(CrossedForm { c: g.crossed_block() })
    }
}

/// `e_*^{(t/iℏ) Σ C_ij ũ_i∘ṽ_j}` at K₀: amplitude `e^{(t/2)Tr C}`, crossed
/// block `(e^{tC} − I)/2`.
pub fn star_exp_crossed(ctx: &Context, c: &CMat, t: Complex64) -> Gaussian {
    let _ = ctx;
    let m = c.nrows();
    let e = linalg::expm(&(c * t));
    let x = (e - linalg::identity(m)) * linalg::r(0.5);
    Gaussian::crossed((t * 0.5 * c.trace()).exp(), &x)
}

/// Product of two crossed Gaussians at K₀.
pub fn crossed_product(ctx: &Context, g1: &Gaussian, g2: &Gaussian) -> Result<Gaussian> {
    let a = CrossedForm::from_gauss(g1, ctx.tol)?;
    let b = CrossedForm::from_gauss(g2, ctx.tol)?;
    let mut out = Gaussian::crossed(g1.amplitude * g2.amplitude, &gl_product(&a.c, &b.c));
    out.branch = Branch { sheet: g1.branch.sheet * g2.branch.sheet, path_hash: None };
    Ok(out)
}

/// Product of crossed-class Gaussians at K by the round trip through K₀.
pub fn gauss_product(
    ctx: &Context,
    k: &ExpressionParameter,
    g1: &GaussElement,
    g2: &GaussElement,
) -> Result<GaussElement> {
    if g1.is_zero() || g2.is_zero() {
        return Ok(GaussElement::Zero { m: ctx.m });
    }
    let k0 = ExpressionParameter::normal(ctx.m);
    let obstruct = |e: Error| match e {
        Error::SingularIntertwiner(msg) => Error::BranchObstruction(format!("round trip through K0: {msg}")),
        other => other,
    };
    let a = intertwine_gauss(ctx, k, &k0, g1, BranchPath::Principal).map_err(obstruct)?;
    let b = intertwine_gauss(ctx, k, &k0, g2, BranchPath::Principal).map_err(obstruct)?;
    let (a, b) = match (a, b) {
        (GaussElement::Gauss(a), GaussElement::Gauss(b)) => (a, b),
        _ => return Ok(GaussElement::Zero { m: ctx.m }),
    };
    let p = crossed_product(ctx, &a, &b)?;
    intertwine_gauss(ctx, &k0, k, &GaussElement::Gauss(p), BranchPath::Principal).map_err(obstruct)
}

/// The m = 1 form `aũ² + bṽ² + 2c·(ũṽ-term)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadM1 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

impl QuadM1 {
    pub fn new(a: Complex64, b: Complex64, c: Complex64) -> Self {
        QuadM1 { a, b, c }
    }

    pub fn discriminant(&self) -> Complex64 {
        self.c * self.c - self.a * self.b
    }

    fn matrix(&self) -> CMat {
        linalg::from_rows(&[vec![self.a, self.c], vec![self.c, self.b]]).expect("2x2")
    }
}

/// Which product the cross term uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossTerm {
    /// `2c ũ*ṽ`
    Star,
    /// `2c ũ∘ṽ`
    Circ,
}

/// `cos(2√D t)`.
fn cos_d(d: Complex64, t: Complex64) -> Complex64 {
    (d.sqrt() * t * 2.0).cos()
}

/// `sin(2√D t)/√D`, continuous at D = 0.
fn sinc_d(d: Complex64, t: Complex64) -> Complex64 {
    let s = d.sqrt();
    let x = s * t * 2.0;
    if x.norm() < 1e-6 {
        t * 2.0 * (ONE - x * x / 6.0 + x.powu(4) / 120.0)
    } else {
        x.sin() / s
    }
}

fn w_of(p: &[Complex64]) -> Complex64 {
    let q = QuadM1::new(p[0], p[1], p[2]);
    let d = q.discriminant();
    cos_d(d, p[3]) - I * q.c * sinc_d(d, p[3])
}

fn require_m1(ctx: &Context, what: &str) -> Result<()> {
    if ctx.m != 1 {
        return Err(Error::InvalidParams(format!("{what} requires m = 1")));
    }
    Ok(())
}

fn to_expression_error(e: Error) -> Error {
    match e {
        Error::SingularIntertwiner(msg) | Error::BranchObstruction(msg) => {
            Error::SingularExpression(format!("cos(2t) - ic sin(2t) vanishes: {msg}"))
        }
        other => other,
    }
}

/// Normal-ordered expression of `e_*^{(t/ℏ)(aũ² + bṽ² + 2c ũ·ṽ)}` continued
/// along a path in `(a, b, c, t)`-space starting at `t = 0`.
pub fn star_exp_quad_m1_normal_along(ctx: &Context, path4: &PathSpec, cross: CrossTerm) -> Result<Gaussian> {
    require_m1(ctx, "star_exp_quad_m1_normal")?;
    if path4.dim() != 4 {
        return Err(Error::Dimension("(a, b, c, t) path must have 4 coordinates".into()));
    }
    if path4.start()[3] != ZERO {
        return Err(Error::InvalidParams("path must start at t = 0".into()));
    }
    let cont = path::continue_sqrt(w_of, path4, ctx.sing_eps).map_err(to_expression_error)?;
    let end = path4.end();
    let q = QuadM1::new(end[0], end[1], end[2]);
    let t = end[3];
    let w = cont.value;
    let sd = sinc_d(q.discriminant(), t);
    let x = q.a * 0.5 * sd / w;
    let y = q.b * 0.5 * sd / w;
    let z = I * 0.5 * (ONE - ONE / w);
    let mut psi = ONE / cont.sqrt;
    if cross == CrossTerm::Star {
        psi *= (-I * t * q.c).exp();
    }
    let phase = linalg::from_rows(&[vec![x, z], vec![z, y]]).expect("2x2") * I;
    let _ = ctx;
    Ok(Gaussian::pure(psi, phase).with_branch(Branch { sheet: cont.sheet, path_hash: Some(path4.hash_id()) }))
}

/// As [`star_exp_quad_m1_normal_along`] with `(a, b, c)` fixed and `t`
/// following `tpath` (default: the straight segment from 0).
pub fn star_exp_quad_m1_normal_with(
    ctx: &Context,
    q: &QuadM1,
    t: Complex64,
    cross: CrossTerm,
    tpath: Option<&PathSpec>,
) -> Result<Gaussian> {
    let owned;
    let tp = match tpath {
        Some(p) => {
            if p.dim() != 1 || p.start()[0] != ZERO || path::dist(p.end(), &[t]) > 1e-12 {
                return Err(Error::InvalidParams("t-path must run from 0 to t".into()));
            }
            p
        }
        None => {
            if t == ZERO {
                return Ok(Gaussian::unit(1));
            }
            owned = PathSpec::straight(vec![ZERO], vec![t]);
            &owned
        }
    };
    let lifted = PathSpec {
        points: tp.points.iter().map(|p| vec![q.a, q.b, q.c, p[0]]).collect(),
        detours: tp.detours.clone(),
    };
    star_exp_quad_m1_normal_along(ctx, &lifted, cross)
}

/// `:e_*^{(t/ℏ)(aũ² + bṽ² + 2c ũ*ṽ)}:_{K₀}` along the straight segment.
pub fn star_exp_quad_m1_normal(ctx: &Context, q: &QuadM1, t: Complex64) -> Result<Gaussian> {
    star_exp_quad_m1_normal_with(ctx, q, t, CrossTerm::Star, None)
}

/// `:e_*^{tH}:_0 = (1/cos(ℏ√D t))·exp(tan(ℏ√D t)/(ℏ√D)·H)` with
/// `H = aũ² + bṽ² + 2cũṽ`.
pub fn star_exp_quad_m1_weyl(ctx: &Context, q: &QuadM1, t: Complex64) -> Result<Gaussian> {
    require_m1(ctx, "star_exp_quad_m1_weyl")?;
    let d = q.discriminant();
    let h = ctx.hbar;
    let s = d.sqrt();
    let x = s * t * h;
    let cosx = x.cos();
    if cosx.norm() <= ctx.tol.max(1e-15) {
        return Err(Error::SingularExpression(format!("cos(hbar sqrt(D) t) = 0 at t = {t}")));
    }
    // sin(x)/√D, continuous at D = 0
    let sin_over = if x.norm() < 1e-6 {
        t * h * (ONE - x * x / 6.0 + x.powu(4) / 120.0)
    } else {
        x.sin() / s
    };
    let factor = sin_over / (cosx * h);
    let phase = q.matrix() * (ctx.ih() * factor);
    Ok(Gaussian::pure(ONE / cosx, phase))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Amplitude convention of [`vacuum`]: the limit of `e^{±t}` times the
/// family (2), or the bare Gaussian (1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VacuumNormalization {
    #[default]
    Limit,
    Bare,
}

fn require_unit_discriminant(ctx: &Context, q: &QuadM1) -> Result<()> {
    let d = q.discriminant();
    if (d - ONE).norm() > ctx.tol.max(1e-9) {
        return Err(Error::InvalidParams(format!("c^2 - ab = 1 violated (got {d})")));
    }
    Ok(())
}

/// `e^{σt}·:e_*^{(t/iℏ)H}:_0 = (e^{σt}/cosh t)·e^{tanh t·H/iℏ}`.
pub fn vacuum_family(ctx: &Context, q: &QuadM1, t: f64, scale: Sign) -> Result<Gaussian> {
    require_m1(ctx, "vacuum_family")?;
    require_unit_discriminant(ctx, q)?;
    let g = star_exp_quad_m1_weyl(ctx, q, linalg::r(t) / ctx.ih())?;
    Ok(g.scaled(linalg::r((scale.value() * t).exp())))
}

/// `lim_{t→σ∞} e^{σt}·:e_*^{(t/iℏ)H}:_0 = 2e^{σH/iℏ}` at Weyl ordering.
pub fn vacuum(ctx: &Context, sign: Sign, q: &QuadM1, norm: VacuumNormalization) -> Result<GaussElement> {
    require_m1(ctx, "vacuum")?;
    require_unit_discriminant(ctx, q)?;
    let amp = match norm {
        VacuumNormalization::Limit => linalg::r(2.0),
        VacuumNormalization::Bare => ONE,
    };
    Ok(GaussElement::Gauss(Gaussian::pure(amp, q.matrix() * linalg::r(sign.value()))))
}

/// Limit of the family scaled by `e^{scale·t}` as `t → direction·∞`; the
/// mismatched limit is zero.
pub fn vacuum_limit(
    ctx: &Context,
    q: &QuadM1,
    direction: Sign,
    scale: Sign,
    norm: VacuumNormalization,
) -> Result<GaussElement> {
    if direction == scale {
        vacuum(ctx, direction, q, norm)
    } else {
        require_unit_discriminant(ctx, q)?;
        Ok(GaussElement::Zero { m: 1 })
    }
}

/// Which polar element to build.
#[derive(Debug, Clone, PartialEq)]
pub enum PolarTarget {
    /// `ε₀₀(k)` for a 0-based coordinate index.
    Index(usize),
    /// `ε₀₀(ã)` for a unit vector.
    Vector(CVec),
    /// The product of all `ε₀₀(k)`.
    Total,
}

fn check_unit(a: &CVec, tol: f64) -> Result<()> {
    let n = linalg::dot(a, a);
    if (n - ONE).norm() > tol.max(1e-12) {
        return Err(Error::NotUnit(n.to_string()));
    }
    Ok(())
}

/// Normal-ordered expression of a polar element.
pub fn polar_at_normal(ctx: &Context, target: &PolarTarget) -> Result<Gaussian> {
    let m = ctx.m;
    match target {
        PolarTarget::Index(k) => {
            if *k >= m {
                return Err(Error::Dimension(format!("index {k} out of range for m = {m}")));
            }
            let mut c = linalg::zeros(m);
            c[(*k, *k)] = -ONE;
            Ok(Gaussian::crossed(I, &c))
        }
        PolarTarget::Vector(a) => {
            if a.len() != m {
                return Err(Error::Dimension(format!("vector of length {} for m = {m}", a.len())));
            }
            check_unit(a, ctx.tol)?;
            Ok(Gaussian::crossed(I, &-(a * a.transpose())))
        }
        PolarTarget::Total => Ok(Gaussian::crossed(I.powu(m as u32), &-linalg::identity(m))),
    }
}

/// `ε₀₀(ã)` expressed at K by intertwining `i·e^{−(2/iℏ)⟨ã,ũ⟩⟨ã,ṽ⟩}` from K₀.
pub fn polar_element(
    ctx: &Context,
    k: &ExpressionParameter,
    target: &PolarTarget,
    branch: BranchPath,
) -> Result<GaussElement> {
    let g = polar_at_normal(ctx, target)?;
    let k0 = ExpressionParameter::normal(ctx.m);
    intertwine_gauss(ctx, &k0, k, &GaussElement::Gauss(g), branch).map_err(|e| match e {
        Error::BranchObstruction(msg) => Error::SingularIntertwiner(msg),
        other => other,
    })
}

/// `b − 2⟨a,b⟩a`.
pub fn reflect(a: &CVec, b: &CVec, tol: f64) -> Result<CVec> {
    if a.len() != b.len() {
        return Err(Error::Dimension("reflect: vectors of different length".into()));
    }
    check_unit(a, tol)?;
    Ok(b - a * (linalg::dot(a, b) * 2.0))
}

/// Amplitude and `I + 2X` of a product of `ε₀₀(ãᵢ)^{nᵢ}` at K₀.
pub fn spin_element(ctx: &Context, word: &[(CVec, i32)]) -> Result<(Complex64, CMat)> {
    let m = ctx.m;
    let mut amp = ONE;
    let mut x = linalg::zeros(m);
    for (a, n) in word {
        if a.len() != m {
            return Err(Error::Dimension(format!("vector of length {} for m = {m}", a.len())));
        }
        check_unit(a, ctx.tol)?;
        let g = star_exp_crossed(ctx, &(a * a.transpose()), I * std::f64::consts::PI * (*n as f64));
        amp *= g.amplitude;
        x = gl_product(&x, &g.crossed_block());
    }
    Ok((amp, linalg::identity(m) + x * linalg::r(2.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, r};
    use std::f64::consts::PI;

    #[test]
    fn gl_examples() {
        let h = linalg::identity(2) * r(-0.5);
        assert_eq!(gl_product(&h, &h), h);
        assert!(matches!(gl_inverse(&h, 1e-10), Err(Error::NotInGroup(_))));
        let z = linalg::zeros(2);
        assert_eq!(gl_inverse(&z, 1e-10).unwrap(), z);
        let p = linalg::from_rows(&[vec![r(1.0), r(0.0)], vec![r(0.0), r(0.0)]]).unwrap();
        assert!(linalg::max_abs(&gl_product(&-p.clone(), &-p)) < 1e-15);
    }

    #[test]
    fn polar_from_crossed_exponential() {
        let ctx = Context::new(1).unwrap();
        let g = star_exp_crossed(&ctx, &CMat::from_element(1, 1, ONE), I * PI);
        assert!((g.amplitude - I).norm() < 1e-15);
        assert!((g.crossed_block()[(0, 0)] + ONE).norm() < 1e-15);
        let full = star_exp_crossed(&ctx, &linalg::identity(3), I * 2.0 * PI);
        assert!((full.amplitude + ONE).norm() < 1e-14);
        assert!(linalg::max_abs(full.phase()) < 1e-14);
    }

    #[test]
    fn quad_normal_uv_case() {
        let ctx = Context::new(1).unwrap();
        let q = QuadM1::new(ZERO, ZERO, ONE);
        let t = c(0.3, 0.2);
        let g = star_exp_quad_m1_normal(&ctx, &q, t).unwrap();
        assert!((g.amplitude - ONE).norm() < 1e-13);
        let want = I * (ONE - (I * t * 2.0).exp());
        // exponent 2Z uv with A = i[[X, Z], [Z, Y]]
        let z = g.phase()[(0, 1)] / I;
        assert!((z * 2.0 - want).norm() < 1e-13);
    }

    #[test]
    fn full_period_amplitude() {
        let ctx = Context::new(1).unwrap();
        let (a, b) = (c(0.3, 0.4), c(-0.2, 0.7));
        let cc = (ONE + a * b).sqrt();
        let q = QuadM1::new(a, b, cc);
        let g = star_exp_quad_m1_normal(&ctx, &q, r(PI)).unwrap();
        assert!((g.amplitude + (-I * PI * cc).exp()).norm() < 1e-9);
        assert!(linalg::max_abs(g.phase()) < 1e-9);
    }

    #[test]
    fn weyl_examples() {
        let ctx = Context::new(1).unwrap();
        let q = QuadM1::new(ONE, ZERO, ZERO);
        let t = c(0.7, -0.1);
        let g = star_exp_quad_m1_weyl(&ctx, &q, t).unwrap();
        assert_eq!(g.amplitude, ONE);
        assert!((g.phase()[(0, 0)] / ctx.ih() - t).norm() < 1e-15);
        let q1 = QuadM1::new(ZERO, ZERO, ONE);
        assert!(matches!(star_exp_quad_m1_weyl(&ctx, &q1, r(PI / 2.0)), Err(Error::SingularExpression(_))));
        assert!((star_exp_quad_m1_weyl(&ctx, &q1, r(PI)).unwrap().amplitude + ONE).norm() < 1e-12);
    }

    #[test]
    fn reflections() {
        let e1 = linalg::rvec(&[1.0, 0.0, 0.0]);
        let e2 = linalg::rvec(&[0.0, 1.0, 0.0]);
        assert_eq!(reflect(&e1, &e1, 1e-10).unwrap(), -e1.clone());
        assert_eq!(reflect(&e1, &e2, 1e-10).unwrap(), e2.clone());
        let s = 0.5f64.sqrt();
        let a = linalg::rvec(&[s, s, 0.0]);
        let out = reflect(&a, &e1, 1e-10).unwrap();
        assert!(linalg::vec_max_abs_diff(&out, &linalg::rvec(&[0.0, -1.0, 0.0])) < 1e-15);
        assert!(matches!(reflect(&linalg::rvec(&[1.0, 1.0, 0.0]), &e1, 1e-10), Err(Error::NotUnit(_))));
    }

    #[test]
    fn spin_of_single_polar_is_reflection() {
        let ctx = Context::new(2).unwrap();
        let a = linalg::rvec(&[0.6, 0.8]);
        let (amp, mat) = spin_element(&ctx, &[(a.clone(), 1)]).unwrap();
        assert!((amp - I).norm() < 1e-14);
        let b = linalg::rvec(&[0.3, -1.1]);
        assert!(linalg::vec_max_abs_diff(&(&mat * &b), &reflect(&a, &b, 1e-10).unwrap()) < 1e-13);
        let (amp0, mat0) = spin_element(&ctx, &[]).unwrap();
        assert_eq!(amp0, ONE);
        assert_eq!(mat0, linalg::identity(2));
    }

    #[test]
    fn vacuum_limits() {
        let ctx = Context::new(1).unwrap();
        let q = QuadM1::new(ZERO, ZERO, ONE);
        let v = vacuum(&ctx, Sign::Plus, &q, VacuumNormalization::Limit).unwrap();
        let fam = vacuum_family(&ctx, &q, 30.0, Sign::Plus).unwrap();
        assert!(v.as_gauss().unwrap().max_diff(&fam) < 1e-12);
        assert!(vacuum_limit(&ctx, &q, Sign::Minus, Sign::Plus, VacuumNormalization::Limit)
            .unwrap()
            .is_zero());
        assert!(vacuum_family(&ctx, &q, -30.0, Sign::Plus).unwrap().amplitude.norm() < 1e-25);
    }
}
