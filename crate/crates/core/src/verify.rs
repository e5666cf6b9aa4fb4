//! Self-check suites behind `starweyl verify`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;
use std::f64::consts::PI;

use crate::context::{Context, ExpressionParameter};
use crate::error::Result;
use crate::gauss::Gaussian;
use crate::holonomy;
use crate::linalg::{self, CMat, CVec, I, ONE, ZERO};
use crate::oracle::{self, Summation};
use crate::path::PathSpec;
use crate::poly::WeylPolynomial;
use crate::quadexp::{self, CrossTerm, PolarTarget, QuadM1, Sign, VacuumNormalization};
use crate::star::star_poly;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub deviation: f64,
    pub detail: String,
}

impl Check {
    fn within(name: &str, deviation: f64, tol: f64, detail: impl Into<String>) -> Self {
        Check { name: name.into(), pass: deviation < tol, deviation, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<Value>,
}

impl SuiteReport {
    fn new(suite: &str, checks: Vec<Check>, report: Option<Value>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        SuiteReport { suite: suite.into(), checks, pass, report }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn rand_c(rng: &mut ChaCha8Rng, scale: f64) -> Complex64 {
    linalg::c(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
}

/// The Clifford relations of [`holonomy::verify_clifford_with`] as a suite.
pub fn suite_clifford(ctx: &Context, k: &ExpressionParameter, seed: u64) -> Result<SuiteReport> {
    let rep = holonomy::verify_clifford_with(ctx, k, 8, seed, holonomy::DetourPolicy::Ccw)?;
    let s = &rep.summary;
    let worst = |name: &str| {
        rep.relations.iter().filter(|r| r.relation == name).map(|r| r.deviation).fold(0.0, f64::max)
    };
    let count = |name: &str| rep.relations.iter().filter(|r| r.relation == name).count();
    let mut checks = vec![Check::within(
        "square",
        worst("square"),
        holonomy::CLIFFORD_TOL,
        format!("eps_k^2 V = -V on {} samples", count("square")),
    )];
    if ctx.m > 1 {
        checks.push(Check::within(
            "pair_square",
            worst("pair_square"),
            holonomy::CLIFFORD_TOL,
            format!("(eps_k eps_l)^2 V = -V on {} samples", count("pair_square")),
        ));
        let comm = rep
            .relations
            .iter()
            .filter_map(|r| r.commute_deviation)
            .fold(0.0, f64::max);
        checks.push(Check::within(
            "anticommute",
            worst("anticommute"),
            holonomy::CLIFFORD_TOL,
            format!(
                "eps_k eps_l V = -eps_l eps_k V on {} samples; commutation deviation {comm:e}{}",
                count("anticommute"),
                if s.commutation_observed { " (the factors commute)" } else { "" }
            ),
        ));
    }
    checks.push(Check {
        name: "sheet_consistency".into(),
        pass: s.sheet_consistent,
        deviation: if s.sheet_consistent { 0.0 } else { 1.0 },
        detail: format!("sign of eps_k^2 independent of k: {:?}", s.square_sign),
    });
    let report = serde_json::to_value(&rep).ok();
    Ok(SuiteReport::new("clifford", checks, report))
}

/// Largest difference of t-Taylor coefficients `0..=order` between a closed
/// form and the truncated series, over the given points.
pub fn taylor_deviation<F>(
    ctx: &Context,
    k: &ExpressionParameter,
    q: &WeylPolynomial,
    closed: F,
    points: &[Vec<Complex64>],
    order: usize,
) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Gaussian>,
{
    let series = oracle::star_exp_series(ctx, k, q, order)?;
    let circle = oracle::cauchy_circle(0.25, 64);
    let values: Vec<Gaussian> = circle.iter().map(|&t| closed(t)).collect::<Result<_>>()?;
    let mut dev: f64 = 0.0;
    for x in points {
        let vals: Vec<Complex64> = values.iter().map(|g| g.eval(ctx, x)).collect();
        let coefs = oracle::cauchy_coeffs(&circle, &vals, order);
        for (n, cn) in coefs.iter().enumerate() {
            dev = dev.max((cn - series.coeffs[n].eval(x)).norm());
        }
    }
    Ok(dev)
}

fn random_points(rng: &mut ChaCha8Rng, m: usize, count: usize) -> Vec<Vec<Complex64>> {
    (0..count).map(|_| (0..2 * m).map(|_| linalg::r(rng.random_range(-1.0..1.0))).collect()).collect()
}

/// `ũ∘ṽ`-type polynomials at K₀: `Σ C_ij (ũ_i*ṽ_j + ṽ_j*ũ_i)/2`.
fn circ_form(ctx: &Context, c: &CMat) -> Result<WeylPolynomial> {
    let m = ctx.m;
    let n = ctx.n();
    let k0 = ExpressionParameter::normal(m);
    let mut out = WeylPolynomial::zero(n);
    for i in 0..m {
        for j in 0..m {
            let u = WeylPolynomial::var(n, i);
            let v = WeylPolynomial::var(n, m + j);
            let sym = &star_poly(ctx, &k0, &u, &v)? + &star_poly(ctx, &k0, &v, &u)?;
            out = &out + &sym.scale(c[(i, j)] * 0.5);
        }
    }
    Ok(out)
}

fn quad_m1_poly(ctx: &Context, k: &ExpressionParameter, q: &QuadM1, cross: CrossTerm) -> Result<WeylPolynomial> {
    let u = WeylPolynomial::var(2, 0);
    let v = WeylPolynomial::var(2, 1);
    let uv = star_poly(ctx, k, &u, &v)?;
    let mixed = match cross {
        CrossTerm::Star => uv,
        CrossTerm::Circ => (&uv + &star_poly(ctx, k, &v, &u)?).scale(linalg::r(0.5)),
    };
    Ok(&(&u.pow(2).scale(q.a) + &v.pow(2).scale(q.b)) + &mixed.scale(q.c * 2.0))
}

/// Per-family worst deviation of the closed forms from the series oracle.
#[derive(Debug, Clone, Serialize)]
pub struct OracleAgreement {
    pub crossed: f64,
    pub quad_normal: f64,
    pub quad_weyl: f64,
    pub draws: usize,
    pub order: usize,
}

pub fn oracle_agreement(hbar: f64, seed: u64, draws: usize, order: usize) -> Result<OracleAgreement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = OracleAgreement { crossed: 0.0, quad_normal: 0.0, quad_weyl: 0.0, draws, order };
    for d in 0..draws {
        let m = 1 + d % 2;
        let ctx = Context::new(m)?.with_hbar(hbar)?;
        let k0 = ExpressionParameter::normal(m);
        let c = CMat::from_fn(m, m, |_, _| rand_c(&mut rng, 0.8));
        let q = circ_form(&ctx, &c)?.scale(ONE / ctx.ih());
        let pts = random_points(&mut rng, m, 4);
        let dev = taylor_deviation(&ctx, &k0, &q, |t| Ok(quadexp::star_exp_crossed(&ctx, &c, t)), &pts, order)?;
        out.crossed = out.crossed.max(dev);
    }
    let ctx = Context::new(1)?.with_hbar(hbar)?;
    let k0 = ExpressionParameter::normal(1);
    let kw = ExpressionParameter::weyl(1);
    for _ in 0..draws {
        let q = QuadM1::new(rand_c(&mut rng, 0.8), rand_c(&mut rng, 0.8), rand_c(&mut rng, 0.8));
        let pts = random_points(&mut rng, 1, 4);
        let star = quad_m1_poly(&ctx, &k0, &q, CrossTerm::Star)?.scale(linalg::r(1.0 / hbar));
        let dev = taylor_deviation(&ctx, &k0, &star, |t| quadexp::star_exp_quad_m1_normal(&ctx, &q, t), &pts, order)?;
        out.quad_normal = out.quad_normal.max(dev);
        let h = quad_m1_poly(&ctx, &kw, &q, CrossTerm::Circ)?;
        let dev = taylor_deviation(&ctx, &kw, &h, |t| quadexp::star_exp_quad_m1_weyl(&ctx, &q, t), &pts, order)?;
        out.quad_weyl = out.quad_weyl.max(dev);
    }
    Ok(out)
}

/// Vacuum normalization as fixed by the pointwise product oracle.
#[derive(Debug, Clone, Serialize)]
pub struct VacuumResolution {
    pub q: QuadM1,
    pub sign: Sign,
    /// `(E * E)(x) / E(x)` for the bare Gaussian `E = e^{±H/iℏ}`, averaged
    /// over the grid.
    pub ratio: Complex64,
    /// Spread of that ratio over the grid.
    pub ratio_spread: f64,
    /// The amplitude κ making `κE` idempotent: `1/ratio`.
    pub fixed_amplitude: Complex64,
    /// `|vacuum * vacuum − vacuum|` on the grid with the library amplitude.
    pub idempotence_deviation: f64,
    pub library_amplitude: Complex64,
    pub resummed_points: usize,
    /// `max |e^{σt}·family(t)|` on the grid at t = 24 with mismatched σ.
    pub opposite_limit: f64,
}

pub fn vacuum_resolution(ctx: &Context, q: &QuadM1, sign: Sign) -> Result<VacuumResolution> {
    let grid = oracle::default_grid(1);
    let kw = ExpressionParameter::weyl(1);
    let bare = quadexp::vacuum(ctx, sign, q, VacuumNormalization::Bare)?;
    let prod = oracle::gauss_pointwise_product_detailed(ctx, &kw, &bare, &bare, &grid, 1e-14)?;
    let ratios: Vec<Complex64> = grid.iter().zip(&prod).map(|(x, (p, _))| p / bare.eval(ctx, x)).collect();
    let ratio = ratios.iter().sum::<Complex64>() / ratios.len() as f64;
    let ratio_spread = ratios.iter().map(|z| (z - ratio).norm()).fold(0.0, f64::max);
    let vac = quadexp::vacuum(ctx, sign, q, VacuumNormalization::Limit)?;
    let vv = oracle::gauss_pointwise_product_detailed(ctx, &kw, &vac, &vac, &grid, 1e-14)?;
    let idempotence_deviation =
        grid.iter().zip(&vv).map(|(x, (p, _))| (p - vac.eval(ctx, x)).norm()).fold(0.0, f64::max);
    let resummed_points = prod.iter().chain(&vv).filter(|(_, s)| *s != Summation::Direct).count();
    let opposite = match sign {
        Sign::Plus => Sign::Minus,
        Sign::Minus => Sign::Plus,
    };
    let t = 24.0 * sign.value();
    let fam = quadexp::vacuum_family(ctx, q, t, opposite)?;
    let opposite_limit = grid.iter().map(|x| fam.eval(ctx, x).norm()).fold(0.0, f64::max);
    Ok(VacuumResolution {
        q: *q,
        sign,
        ratio,
        ratio_spread,
        fixed_amplitude: ONE / ratio,
        idempotence_deviation,
        library_amplitude: vac.as_gauss().map(|g| g.amplitude).unwrap_or(ZERO),
        resummed_points,
        opposite_limit,
    })
}

/// Closed forms against the series oracle, and the vacuum normalization.
pub fn suite_oracle(hbar: f64, seed: u64, draws: usize) -> Result<SuiteReport> {
    let agree = oracle_agreement(hbar, seed, draws, 8)?;
    let tol = 1e-8;
    let mut checks = vec![
        Check::within("crossed_vs_series", agree.crossed, tol, format!("{draws} draws, order 8")),
        Check::within("quad_normal_vs_series", agree.quad_normal, tol, format!("{draws} draws, order 8")),
        Check::within("quad_weyl_vs_series", agree.quad_weyl, tol, format!("{draws} draws, order 8")),
    ];
    let ctx = Context::new(1)?.with_hbar(hbar)?;
    let mut vacua = Vec::new();
    for (q, sign) in [
        (QuadM1::new(ZERO, ZERO, ONE), Sign::Plus),
        (QuadM1::new(ZERO, ZERO, ONE), Sign::Minus),
        (QuadM1::new(linalg::c(0.0, 0.3), linalg::c(0.0, 0.3), ZERO), Sign::Plus),
    ] {
        let q = unit_discriminant(q);
        let v = vacuum_resolution(&ctx, &q, sign)?;
        checks.push(Check::within(
            "vacuum_idempotent",
            v.idempotence_deviation,
            1e-6,
            format!(
                "oracle fixes amplitude {:.12} (library {}), ratio spread {:e}",
                v.fixed_amplitude, v.library_amplitude, v.ratio_spread
            ),
        ));
        checks.push(Check::within("vacuum_opposite_limit", v.opposite_limit, 1e-12, "mismatched limit vanishes"));
        vacua.push(v);
    }
    Ok(SuiteReport::new("oracle", checks, serde_json::to_value(&vacua).ok()))
}

/// Adjusts `c` so that `c² − ab = 1`.
fn unit_discriminant(q: QuadM1) -> QuadM1 {
    QuadM1::new(q.a, q.b, (ONE + q.a * q.b).sqrt())
}

fn real_unit(rng: &mut ChaCha8Rng, m: usize) -> CVec {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 {
            return linalg::rvec(&v.iter().map(|x| x / n).collect::<Vec<_>>());
        }
    }
}

/// Complex unit vector `cosh(s)e₁ + i sinh(s)e₂`-type, rotated randomly.
fn complex_unit(rng: &mut ChaCha8Rng, m: usize) -> CVec {
    let a = real_unit(rng, m);
    let mut b = real_unit(rng, m);
    b -= &a * linalg::dot(&a, &b);
    let nb = linalg::dot(&b, &b).sqrt();
    if nb.norm() < 1e-6 {
        return a;
    }
    b /= nb;
    let s = rng.random_range(-0.8..0.8f64);
    a * linalg::r(s.cosh()) + b * (I * s.sinh())
}

fn orthogonality(r: &CMat) -> f64 {
    linalg::max_abs_diff(&(r.transpose() * r), &linalg::identity(r.nrows()))
}

/// Reflections, their composites, and a closed loop with amplitude −1.
pub fn suite_spin(m: usize, seed: u64) -> Result<SuiteReport> {
    let ctx = Context::new(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut orth: f64 = 0.0;
    let mut det1: f64 = 0.0;
    let mut ad_vs_reflect: f64 = 0.0;
    let mut involution: f64 = 0.0;
    for j in 0..20 {
        let (a, b) = if j % 2 == 0 {
            (real_unit(&mut rng, m), real_unit(&mut rng, m))
        } else {
            (complex_unit(&mut rng, m), complex_unit(&mut rng, m))
        };
        let x = CVec::from_fn(m, |_, _| rand_c(&mut rng, 1.0));
        let rx = quadexp::reflect(&a, &x, ctx.tol)?;
        involution = involution.max(linalg::vec_max_abs_diff(&quadexp::reflect(&a, &rx, ctx.tol)?, &x));
        let ra = linalg::identity(m) - &a * a.transpose() * linalg::r(2.0);
        let rb = linalg::identity(m) - &b * b.transpose() * linalg::r(2.0);
        let comp = &ra * &rb;
        orth = orth.max(orthogonality(&comp));
        det1 = det1.max((linalg::det(&comp) - ONE).norm());
        let (_, ad) = quadexp::spin_element(&ctx, &[(a, 1), (b, 1)])?;
        ad_vs_reflect = ad_vs_reflect.max(linalg::max_abs_diff(&ad, &comp));
    }
    let mut checks = vec![
        Check::within("reflection_involution", involution, 1e-10, "reflect(a, reflect(a, x)) = x"),
        Check::within("composite_orthogonal", orth, 1e-10, "R_a R_b is complex orthogonal"),
        Check::within("composite_det_one", det1, 1e-10, "det R_a R_b = 1"),
        Check::within("ad_is_reflection_pair", ad_vs_reflect, 1e-10, "Ad of eps(a) eps(b) equals R_a R_b"),
    ];
    if m >= 2 {
        // a and b at angle π/3: (R_a R_b)³ = I while the amplitude is i⁶ = −1
        let mut a = vec![0.0; m];
        let mut b = vec![0.0; m];
        a[0] = 1.0;
        b[0] = (PI / 3.0).cos();
        b[1] = (PI / 3.0).sin();
        let (a, b) = (linalg::rvec(&a), linalg::rvec(&b));
        let word: Vec<(CVec, i32)> = (0..3).flat_map(|_| [(a.clone(), 1), (b.clone(), 1)]).collect();
        let (amp, ad) = quadexp::spin_element(&ctx, &word)?;
        let (amp0, ad0) = quadexp::spin_element(&ctx, &[])?;
        checks.push(Check::within(
            "closed_loop_amplitude",
            (amp + ONE).norm().max(linalg::max_abs_diff(&ad, &linalg::identity(m))),
            1e-10,
            format!("(eps(a) eps(b))^3 at angle pi/3: Ad = I, amplitude {amp:.12}"),
        ));
        checks.push(Check::within(
            "double_cover",
            linalg::max_abs_diff(&ad, &ad0).max((amp + amp0).norm()),
            1e-10,
            "two preimages of Ad = I with opposite amplitudes",
        ));
    }
    Ok(SuiteReport::new("spin", checks, None))
}

/// Values of the m = 1 polar element `ε₀₀` and the sign anomaly.
#[derive(Debug, Clone, Serialize)]
pub struct AnomalyValues {
    /// Crossed exponential at `t = πi` (amplitude, crossed block).
    pub polar: (Complex64, Complex64),
    pub full_period: Complex64,
    /// `(a,b,c)` continued from `(0,0,1)` to `(0,0,−1)` at `t = π/2`.
    pub contra_amplitude: Complex64,
    /// `t` continued from 0 to `π/2` at `(0,0,−1)`.
    pub direct_amplitude: Complex64,
    pub square: Complex64,
}

fn target_polar(ctx: &Context) -> Gaussian {
    // i·e^{−2ũṽ/iℏ}
    let mut a = linalg::zeros(2);
    a[(0, 1)] = -ONE;
    a[(1, 0)] = -ONE;
    let _ = ctx;
    Gaussian::pure(I, a)
}

pub fn suite_anomaly(m: usize, hbar: f64, seed: u64) -> Result<SuiteReport> {
    let ctx = Context::new(1)?.with_hbar(hbar)?;
    let target = target_polar(&ctx);
    let one = CMat::from_element(1, 1, ONE);
    let mut checks = Vec::new();

    let eps = quadexp::star_exp_crossed(&ctx, &one, I * PI);
    let circ_half = quadexp::star_exp_quad_m1_normal_with(&ctx, &QuadM1::new(ZERO, ZERO, ONE), linalg::r(PI / 2.0), CrossTerm::Circ, None)?;
    checks.push(Check::within(
        "polar_normal_form",
        eps.max_diff(&target).max(circ_half.max_diff(&target)),
        1e-9,
        "eps00 at K0 = i exp(-2uv/ih)",
    ));

    let full = quadexp::star_exp_crossed(&ctx, &one, I * 2.0 * PI);
    let circ_full = quadexp::star_exp_quad_m1_normal_with(&ctx, &QuadM1::new(ZERO, ZERO, ONE), linalg::r(PI), CrossTerm::Circ, None)?;
    let minus_one = Gaussian::unit(1).scaled(-ONE);
    checks.push(Check::within(
        "full_period",
        full.max_diff(&minus_one).max(circ_full.max_diff(&minus_one)),
        1e-9,
        "value at the full period is -1",
    ));

    // (a, b, c) = (i sinθ, i sinθ, cosθ) keeps c² − ab = 1
    let t_half = linalg::r(PI / 2.0);
    let mut points = vec![vec![ZERO, ZERO, ONE, ZERO], vec![ZERO, ZERO, ONE, t_half]];
    for j in 1..=16 {
        let th = PI * j as f64 / 16.0;
        points.push(vec![I * th.sin(), I * th.sin(), linalg::r(th.cos()), t_half]);
    }
    let contra = quadexp::star_exp_quad_m1_normal_along(&ctx, &PathSpec::new(points), CrossTerm::Circ)?;
    let direct = quadexp::star_exp_quad_m1_normal_with(&ctx, &QuadM1::new(ZERO, ZERO, -ONE), t_half, CrossTerm::Circ, None)?;
    checks.push(Check::within(
        "contra",
        contra.max_diff(&target),
        1e-9,
        "continuing (0,0,1) to (0,0,-1) inside c^2-ab=1 at t=pi/2 keeps i exp(-2uv/ih)",
    ));
    checks.push(Check::within(
        "anomalous_identity",
        direct.max_diff(&target.scaled(-ONE)),
        1e-9,
        "continuing t from 0 at c=-1 gives -i exp(-2uv/ih): the same element with both signs",
    ));

    let sq = quadexp::crossed_product(&ctx, &eps, &eps)?;
    checks.push(Check::within("anomary", sq.max_diff(&minus_one), 1e-9, "eps00 * eps00 = -1"));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fam: f64 = 0.0;
    for _ in 0..10 {
        let a = rand_c(&mut rng, 1.0);
        let c = linalg::c(rng.random_range(0.3..1.5), rng.random_range(-1.0..1.0));
        let q = QuadM1::new(a, (c * c - ONE) / a, c);
        let g = quadexp::star_exp_quad_m1_normal(&ctx, &q, linalg::r(PI))?;
        let want = Gaussian::unit(1).scaled(-(-I * PI * c).exp());
        fam = fam.max(g.max_diff(&want) / want.amplitude.norm().max(1.0));
    }
    checks.push(Check::within("unit_discriminant_family", fam, 1e-9, "-exp(-pi i c) at t = pi for 10 draws"));

    if m > 1 {
        let ctxm = Context::new(m)?.with_hbar(hbar)?;
        let total = quadexp::polar_at_normal(&ctxm, &PolarTarget::Total)?;
        let sq = quadexp::crossed_product(&ctxm, &total, &total)?;
        let want = Gaussian::unit(m).scaled(I.powu(2 * m as u32));
        checks.push(Check::within("total_polar_square", sq.max_diff(&want), 1e-9, "eps00^2 = (-1)^m"));
    }

    let values = AnomalyValues {
        polar: (eps.amplitude, eps.crossed_block()[(0, 0)]),
        full_period: full.amplitude,
        contra_amplitude: contra.amplitude,
        direct_amplitude: direct.amplitude,
        square: sq.amplitude,
    };
    Ok(SuiteReport::new("anomaly", checks, serde_json::to_value(&values).ok()))
}
