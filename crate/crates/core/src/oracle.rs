//! Brute-force reference engines: truncated series, pointwise Gaussian
//! products and exact ℏ-formal products.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::context::{Context, ExpressionParameter};
use crate::error::{Error, Result};
use crate::gauss::GaussElement;
use crate::linalg::{self, CMat, ONE, ZERO};
use crate::poly::{Exponent, WeylPolynomial};
use crate::star::star_poly;

/// 25 real points of `[−1,1]²` in the (ũ₁, ṽ₁) plane; other coordinates 0.
pub fn default_grid(m: usize) -> Vec<Vec<Complex64>> {
    let ticks = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let mut out = Vec::with_capacity(25);
    for &x in &ticks {
        for &y in &ticks {
            let mut p = vec![ZERO; 2 * m];
            p[0] = linalg::r(x);
            p[m] = linalg::r(y);
            out.push(p);
        }
    }
    out
}

/// Coefficients of `t⁰..t^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    pub order: usize,
    pub coeffs: Vec<WeylPolynomial>,
}

impl TruncatedSeries {
    pub fn eval(&self, t: Complex64, x: &[Complex64]) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * t + c.eval(x))
    }
}

/// `Q^{*n}/n!` for `n = 0..N` by iterated star products.
pub fn star_exp_series(
    ctx: &Context,
    k: &ExpressionParameter,
    q: &WeylPolynomial,
    order: usize,
) -> Result<TruncatedSeries> {
    let mut coeffs = vec![WeylPolynomial::one(ctx.n())];
    for n in 1..=order {
        let next = star_poly(ctx, k, &coeffs[n - 1], q)?.scale(linalg::r(1.0 / n as f64));
        coeffs.push(next);
    }
    Ok(TruncatedSeries { order, coeffs })
}

/// `samples` equispaced points on the circle `|t| = radius`.
pub fn cauchy_circle(radius: f64, samples: usize) -> Vec<Complex64> {
    (0..samples)
        .map(|j| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * j as f64 / samples as f64))
        .collect()
}

/// Taylor coefficients `0..=order` from values at [`cauchy_circle`] points.
pub fn cauchy_coeffs(pts: &[Complex64], vals: &[Complex64], order: usize) -> Vec<Complex64> {
    (0..=order)
        .map(|n| {
            let s: Complex64 = pts.iter().zip(vals).map(|(z, v)| v / z.powu(n as u32)).sum();
            s / pts.len() as f64
        })
        .collect()
}

/// Taylor coefficients `0..=order` of an analytic `f` at 0 from `samples`
/// values on the circle of the given radius.
pub fn cauchy_taylor<F: Fn(Complex64) -> Complex64>(f: F, order: usize, radius: f64, samples: usize) -> Vec<Complex64> {
    let pts = cauchy_circle(radius, samples);
    let vals: Vec<Complex64> = pts.iter().map(|&z| f(z)).collect();
    cauchy_coeffs(&pts, &vals, order)
}

/// Multi-indices of `nvars` variables with total degree exactly `d`.
fn indices_of_degree(nvars: usize, d: u32) -> Vec<Exponent> {
    fn rec(i: usize, left: u32, cur: &mut Exponent, out: &mut Vec<Exponent>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for v in (0..=left).rev() {
            cur[i] = v;
            rec(i + 1, left - v, cur, out);
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        return out;
    }
    rec(0, d, &mut vec![0; nvars], &mut out);
    out
}

/// Taylor coefficients of `G(x0 + h)` in `h` up to total degree `deg`.
fn gauss_taylor(ctx: &Context, g: &GaussElement, x0: &[Complex64], deg: u32) -> HashMap<Exponent, Complex64> {
    let n = x0.len();
    let mut out = HashMap::new();
    let g = match g {
        GaussElement::Zero { .. } => return out,
        GaussElement::Gauss(g) => g,
    };
    let inv = ONE / ctx.ih();
    let a = g.phase();
    let xv = linalg::cvec(x0);
    // ∂_i q = grad_i + Σ_j hess_ij h_j
    let grad: Vec<Complex64> = (0..n)
        .map(|i| ((a * &xv)[i] * 2.0 + g.linear[i]) * inv)
        .collect();
    let hess = a * (inv * 2.0);
    let base = g.amplitude * ((linalg::pair(&xv, a, &xv) + linalg::dot(&g.linear, &xv)) * inv).exp();
    let mut f: HashMap<Exponent, Complex64> = HashMap::new();
    f.insert(vec![0; n], ONE);
    for d in 1..=deg {
        for alpha in indices_of_degree(n, d) {
            let i = alpha.iter().position(|&e| e > 0).expect("positive degree");
            let mut beta = alpha.clone();
            beta[i] -= 1;
            let mut acc = grad[i] * f.get(&beta).copied().unwrap_or(ZERO);
            for j in 0..n {
                if beta[j] > 0 && hess[(i, j)] != ZERO {
                    let mut gamma = beta.clone();
                    gamma[j] -= 1;
                    acc += hess[(i, j)] * f.get(&gamma).copied().unwrap_or(ZERO);
                }
            }
            f.insert(alpha, acc / (beta[i] + 1) as f64);
        }
    }
    let pre = g.prefactor.shift(x0);
    for (e, fc) in &f {
        for (pe, pc) in pre.terms() {
            let tot: Exponent = e.iter().zip(pe).map(|(x, y)| x + y).collect();
            if tot.iter().sum::<u32>() <= deg {
                *out.entry(tot).or_insert(ZERO) += fc * pc * base;
            }
        }
    }
    out
}

fn factorial_multi(e: &[u32]) -> f64 {
    e.iter().map(|&k| (1..=k).map(|x| x as f64).product::<f64>()).product()
}

/// Terms `c_k` of the product series at one point; `Σ c_k` is the product.
fn product_terms(
    ctx: &Context,
    lam: &CMat,
    g1: &GaussElement,
    g2: &GaussElement,
    x0: &[Complex64],
    kmax: u32,
) -> Vec<Complex64> {
    let n = x0.len();
    let t1 = gauss_taylor(ctx, g1, x0, kmax);
    let t2 = gauss_taylor(ctx, g2, x0, kmax);
    let nz: Vec<(usize, usize, Complex64)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| (lam[(i, j)] != ZERO)).map(|(i, j)| (i, j, lam[(i, j)]))
        .collect();
    let half_ih = ctx.ih() * 0.5;
    let mut weight = ONE;
    let mut level: HashMap<(Exponent, Exponent), Complex64> = HashMap::new();
    level.insert((vec![0; n], vec![0; n]), ONE);
    let mut terms = Vec::with_capacity(kmax as usize + 1);
    for k in 0..=kmax {
        let mut s = ZERO;
        for ((a, b), p) in &level {
            let (Some(ta), Some(tb)) = (t1.get(a), t2.get(b)) else { continue };
            s += p * ta * tb * factorial_multi(a) * factorial_multi(b);
        }
        terms.push(s * weight);
        weight = weight * half_ih / (k + 1) as f64;
        let mut next: HashMap<(Exponent, Exponent), Complex64> = HashMap::new();
        for ((a, b), p) in &level {
            for &(i, j, l) in &nz {
                let mut a2 = a.clone();
                let mut b2 = b.clone();
                a2[i] += 1;
                b2[j] += 1;
                *next.entry((a2, b2)).or_insert(ZERO) += p * l;
            }
        }
        level = next;
    }
    terms
}

/// Diagonal Padé approximant `[L/L]` of `Σ c_k λ^k` evaluated at `λ = 1`.
/// Diagonal `[l/l]` Padé approximant of `Σ c_k λ^k`, held in the rescaled
/// variable `λ/ρ`.
struct Pade {
    num: Vec<Complex64>,
    den: Vec<Complex64>,
    rho: f64,
}

impl Pade {
    fn new(c: &[Complex64], l: usize) -> Option<Self> {
        if c.len() < 2 * l + 1 || l == 0 {
            return None;
        }
        // rescale λ so that the coefficients stay of moderate size
        let rho = c[1..=2 * l]
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > 0.0)
            .map(|(k, z)| z.norm().powf(1.0 / (k + 1) as f64))
            .fold(0.0, f64::max)
            .max(1e-300);
        let d: Vec<Complex64> = c.iter().enumerate().map(|(k, z)| z / rho.powi(k as i32)).collect();
        let mut mat = CMat::zeros(l, l);
        let mut rhs = linalg::CVec::zeros(l);
        for i in 1..=l {
            for j in 1..=l {
                mat[(i - 1, j - 1)] = d[l + i - j];
            }
            rhs[i - 1] = -d[l + i];
        }
        let q = mat.lu().solve(&rhs)?;
        let mut den = vec![ONE];
        den.extend(q.iter().copied());
        let num = (0..=l).map(|i| (0..=i).map(|j| den[j] * d[i - j]).sum()).collect();
        Some(Pade { num, den, rho })
    }

    fn eval(&self, lambda: f64) -> Complex64 {
        let mu = linalg::r(lambda * self.rho);
        let horner = |p: &[Complex64]| p.iter().rev().fold(ZERO, |acc, c| acc * mu + c);
        horner(&self.num) / horner(&self.den)
    }
}

fn pade_at_one(c: &[Complex64], l: usize) -> Option<Complex64> {
    let v = Pade::new(c, l)?.eval(1.0);
    v.is_finite().then_some(v)
}

/// `F(1) = F(0)·exp ∫₀¹ F′/F` with `F′/F` replaced by its `[l/l]` Padé
/// approximant; exact when `F` is a rational function times the exponential
/// of a rational function.
fn log_pade_at_one(c: &[Complex64], l: usize) -> Option<Complex64> {
    let c0 = *c.first()?;
    if c0.norm() == 0.0 {
        return None;
    }
    let mut g: Vec<Complex64> = Vec::with_capacity(c.len() - 1);
    for k in 0..c.len() - 1 {
        let mut acc = c[k + 1] * (k + 1) as f64;
        for j in 1..=k {
            acc -= c[j] * g[k - j];
        }
        g.push(acc / c0);
    }
    let p = Pade::new(&g, l)?;
    // composite Simpson on [0, 1]
    let n = 512;
    let h = 1.0 / n as f64;
    let mut s = p.eval(0.0) + p.eval(1.0);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += p.eval(i as f64 * h) * w;
    }
    let v = c0 * (s * (h / 3.0)).exp();
    v.is_finite().then_some(v)
}

fn stable_value(vals: &[Complex64]) -> Option<Complex64> {
    vals.windows(3).rev().find_map(|w| {
        let spread = (w[0] - w[2]).norm().max((w[1] - w[2]).norm());
        (spread < 1e-8 * w[2].norm().max(1.0)).then_some(w[2])
    })
}

/// Resummation outcome at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Summation {
    Direct,
    /// Padé approximant of the logarithmic derivative, integrated.
    LogPade,
    Pade,
}

/// Star product of two Gaussian elements at each grid point by summing the
/// derivative series; diverging series are resummed in the scale of the
/// bidifferential operator by diagonal Padé approximants, of the logarithmic
/// derivative first and of the series itself as a fallback.
pub fn gauss_pointwise_product(
    ctx: &Context,
    k: &ExpressionParameter,
    g1: &GaussElement,
    g2: &GaussElement,
    grid: &[Vec<Complex64>],
    tail_tol: f64,
) -> Result<Vec<Complex64>> {
    Ok(gauss_pointwise_product_detailed(ctx, k, g1, g2, grid, tail_tol)?
        .into_iter()
        .map(|(v, _)| v)
        .collect())
}

pub fn gauss_pointwise_product_detailed(
    ctx: &Context,
    k: &ExpressionParameter,
    g1: &GaussElement,
    g2: &GaussElement,
    grid: &[Vec<Complex64>],
    tail_tol: f64,
) -> Result<Vec<(Complex64, Summation)>> {
    let n = ctx.n();
    if g1.m() != ctx.m || g2.m() != ctx.m || k.m() != ctx.m {
        return Err(Error::Dimension("operands do not match context".into()));
    }
    // beyond two generators the bookkeeping grows too fast for long series
    let kmax: u32 = if n <= 2 { 72 } else if n <= 4 { 16 } else { 8 };
    let lam = k.lambda();
    let mut out = Vec::with_capacity(grid.len());
    for x0 in grid {
        if x0.len() != n {
            return Err(Error::Dimension("grid point of wrong dimension".into()));
        }
        let terms = product_terms(ctx, &lam, g1, g2, x0, kmax);
        let mut sum = ZERO;
        let mut done = None;
        for (kk, t) in terms.iter().enumerate() {
            sum += t;
            if kk >= 3 {
                let tail = terms[kk - 2..=kk].iter().map(|z| z.norm()).fold(0.0, f64::max);
                if tail < tail_tol * sum.norm().max(1.0) {
                    done = Some(sum);
                    break;
                }
            }
        }
        if let Some(v) = done {
            out.push((v, Summation::Direct));
            continue;
        }
        let lmax = (terms.len() - 2) / 2;
        let logs: Vec<Complex64> = (lmax.saturating_sub(4).max(1)..=lmax).filter_map(|l| log_pade_at_one(&terms, l)).collect();
        let pades: Vec<Complex64> = (lmax.saturating_sub(4).max(1)..=lmax).filter_map(|l| pade_at_one(&terms, l)).collect();
        let accepted = stable_value(&logs)
            .map(|v| (v, Summation::LogPade))
            .or_else(|| stable_value(&pades).map(|v| (v, Summation::Pade)));
        match accepted {
            Some(v) => out.push(v),
            None => {
                return Err(Error::NoConvergence(format!(
                    "product series does not converge at {:?}",
                    x0.iter().map(|z| (z.re, z.im)).collect::<Vec<_>>()
                )))
            }
        }
    }
    Ok(out)
}

/// Exact complex rationals.
pub type QComplex = Complex<BigRational>;

pub fn q_int(re: i64, im: i64) -> QComplex {
    Complex::new(BigRational::from_integer(BigInt::from(re)), BigRational::from_integer(BigInt::from(im)))
}

pub fn q_ratio(num: i64, den: i64) -> QComplex {
    Complex::new(BigRational::new(BigInt::from(num), BigInt::from(den)), BigRational::zero())
}

/// Polynomial in `u` and a formal `ℏ` with exact coefficients; keys are
/// (u-exponent, ℏ-power).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HbarPoly {
    pub nvars: usize,
    pub terms: BTreeMap<(Exponent, u32), QComplex>,
}

impl HbarPoly {
    pub fn zero(nvars: usize) -> Self {
        HbarPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: QComplex) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], 0, c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, 0, q_int(1, 0));
        p
    }

    pub fn hbar(nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], 1, q_int(1, 0));
        p
    }

    pub fn add_term(&mut self, e: Exponent, h: u32, c: QComplex) {
        let key = (e, h);
        let v = self.terms.remove(&key).unwrap_or_else(QComplex::zero) + c;
        if !v.is_zero() {
            self.terms.insert(key, v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for ((e, h), c) in &o.terms {
            p.add_term(e.clone(), *h, c.clone());
        }
        p
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&q_int(-1, 0)))
    }

    pub fn scale(&self, s: &QComplex) -> Self {
        let mut p = Self::zero(self.nvars);
        for ((e, h), c) in &self.terms {
            p.add_term(e.clone(), *h, c * s);
        }
        p
    }

    /// Commutative product.
    pub fn mul(&self, o: &Self) -> Self {
        let mut p = Self::zero(self.nvars);
        for ((e1, h1), c1) in &self.terms {
            for ((e2, h2), c2) in &o.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, h1 + h2, c1 * c2);
            }
        }
        p
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut p = Self::zero(self.nvars);
        for ((e, h), c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                p.add_term(f, *h, c * q_int(e[i] as i64, 0));
            }
        }
        p
    }

    /// Drops every term with a positive power of ℏ.
    pub fn at_hbar_zero(&self) -> Self {
        let mut p = Self::zero(self.nvars);
        for ((e, h), c) in &self.terms {
            if *h == 0 {
                p.add_term(e.clone(), 0, c.clone());
            }
        }
        p
    }

    /// Multiplies by ℏ^k.
    pub fn times_hbar(&self, k: u32) -> Self {
        let mut p = Self::zero(self.nvars);
        for ((e, h), c) in &self.terms {
            p.add_term(e.clone(), h + k, c.clone());
        }
        p
    }
}

/// `Λ = K + J` for an exact K.
pub fn exact_lambda(k: &[Vec<QComplex>]) -> Vec<Vec<QComplex>> {
    let n = k.len();
    let m = n / 2;
    let mut lam = k.to_vec();
    for i in 0..m {
        lam[i][m + i] = &lam[i][m + i] - q_int(1, 0);
        lam[m + i][i] = &lam[m + i][i] + q_int(1, 0);
    }
    lam
}

/// `f *_Λ g` with ℏ formal, by enumerating every index sequence
/// `(i₁j₁)…(iₖjₖ)` separately.
pub fn hbar_formal_product(f: &HbarPoly, g: &HbarPoly, k: &[Vec<QComplex>]) -> HbarPoly {
    let lam = exact_lambda(k);
    let n = f.nvars;
    let mut out = HbarPoly::zero(n);
    let half_i = Complex::new(BigRational::zero(), BigRational::new(BigInt::one(), BigInt::from(2)));

    #[allow(clippy::too_many_arguments)]
    fn rec(
        depth: u32,
        df: &HbarPoly,
        dg: &HbarPoly,
        w: &QComplex,
        lam: &[Vec<QComplex>],
        coef: &QComplex,
        half_i: &QComplex,
        out: &mut HbarPoly,
    ) {
        let term = df.mul(dg).scale(&(w * coef)).times_hbar(depth);
        *out = out.add(&term);
        let next_coef = coef * half_i / q_int(depth as i64 + 1, 0);
        let n = lam.len();
        for i in 0..n {
            let di = df.derivative(i);
            if di.is_zero() {
                continue;
            }
            for j in 0..n {
                if lam[i][j].is_zero() {
                    continue;
                }
                let dj = dg.derivative(j);
                if dj.is_zero() {
                    continue;
                }
                rec(depth + 1, &di, &dj, &(w * &lam[i][j]), lam, &next_coef, half_i, out);
            }
        }
    }

    rec(0, f, g, &q_int(1, 0), &lam, &q_int(1, 0), &half_i, &mut out);
    out
}

/// Exact normal-ordering K₀ for m pairs.
pub fn exact_normal(m: usize) -> Vec<Vec<QComplex>> {
    let n = 2 * m;
    let mut k = vec![vec![q_int(0, 0); n]; n];
    for i in 0..m {
        k[i][m + i] = q_int(1, 0);
        k[m + i][i] = q_int(1, 0);
    }
    k
}
