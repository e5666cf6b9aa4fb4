//! The special ordering K_s, singularities of crossed exponentials on the
//! lattice `{0, π}^m`, path-connecting products and the Clifford verifier.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

use crate::context::{Context, ExpressionParameter, Label};
use crate::error::{Error, Result};
use crate::gauss::{Branch, GaussElement, Gaussian};
use crate::linalg::{self, CMat, I, ONE, ZERO};
use crate::path::{self, Orientation, PathSpec};

/// Parameters `(a, b, ρ)` of K_s with `α = a + iρ`, `β = a + ib`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpecialParams {
    pub a: f64,
    pub b: f64,
    pub rho: f64,
    pub m: usize,
}

impl SpecialParams {
    pub fn new(a: f64, b: f64, rho: f64, m: usize) -> Result<Self> {
        let p = SpecialParams { a, b, rho, m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0) {
            return Err(Error::InvalidParams("b > 0 violated".into()));
        }
        if !(self.a > self.b) {
            return Err(Error::InvalidParams("a > b violated".into()));
        }
        if !(self.rho > self.b) {
            return Err(Error::InvalidParams("rho > b violated".into()));
        }
        if self.m < 1 {
            return Err(Error::InvalidParams("m >= 1 violated".into()));
        }
        Ok(())
    }

    pub fn alpha(&self) -> Complex64 {
        linalg::c(self.a, self.rho)
    }

    pub fn beta(&self) -> Complex64 {
        linalg::c(self.a, self.b)
    }

    pub fn d_plus(&self) -> f64 {
        self.rho - self.b
    }
}

/// `K_s = [[iρI + S′, aI + T′], [aI + T′, iρI + S′]]` with off-diagonals
/// `S′ ≡ ib`, `T′ ≡ a`.
pub fn build_special_k(ctx: &Context, p: &SpecialParams) -> Result<ExpressionParameter> {
    p.validate()?;
    if p.m != ctx.m {
        return Err(Error::Dimension(format!("params for m={}, context has m={}", p.m, ctx.m)));
    }
    let (s, t) = special_blocks(p);
    Ok(ExpressionParameter::from_symmetric(linalg::block2(&s, &t, &t, &s), Label::Special))
}

fn special_blocks(p: &SpecialParams) -> (CMat, CMat) {
    let m = p.m;
    let s = CMat::from_fn(m, m, |i, j| if i == j { I * p.rho } else { I * p.b });
    let t = CMat::from_fn(m, m, |_, _| linalg::r(p.a));
    (s, t)
}

/// A point of `{0, π}^m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Vertex {
    raised: Vec<bool>,
}

impl Vertex {
    pub fn origin(m: usize) -> Self {
        Vertex { raised: vec![false; m] }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        Vertex { raised: bits.to_vec() }
    }

    /// Entries must be 0 or π.
    pub fn from_deltas(d: &[f64]) -> Result<Self> {
        let mut raised = Vec::with_capacity(d.len());
        for &x in d {
            if x == 0.0 {
                raised.push(false);
            } else if (x - PI).abs() < 1e-12 {
                raised.push(true);
            } else {
                return Err(Error::InvalidParams(format!("vertex entry {x} is neither 0 nor pi")));
            }
        }
        Ok(Vertex { raised })
    }

    pub fn m(&self) -> usize {
        self.raised.len()
    }

    pub fn index(&self) -> usize {
        self.raised.iter().filter(|&&r| r).count()
    }

    pub fn is_raised(&self, k: usize) -> bool {
        self.raised[k]
    }

    pub fn deltas(&self) -> Vec<f64> {
        self.raised.iter().map(|&r| if r { PI } else { 0.0 }).collect()
    }

    pub fn point(&self) -> Vec<Complex64> {
        self.deltas().into_iter().map(linalg::r).collect()
    }

    /// Edge path from 0 raising the coordinates in increasing index order.
    pub fn edge_points(&self) -> Vec<Vec<Complex64>> {
        let mut cur = vec![ZERO; self.m()];
        let mut pts = vec![cur.clone()];
        for (i, &r) in self.raised.iter().enumerate() {
            if r {
                cur[i] = linalg::r(PI);
                pts.push(cur.clone());
            }
        }
        pts
    }
}

/// Value of a path-connecting product with the path that fixed its sheet.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedGauss {
    pub value: GaussElement,
    pub path: PathSpec,
    pub sheet: i8,
}

/// Crossed phase at K₀ of `e_*^{(i/iℏ)Σ t_k ũ_k∘ṽ_k}`.
fn crossed_phase(t: &[Complex64]) -> CMat {
    let m = t.len();
    let c = CMat::from_fn(m, m, |i, j| if i == j { ((I * t[i]).exp() - ONE) * 0.5 } else { ZERO });
    let z = linalg::zeros(m);
    linalg::block2(&z, &c, &c, &z)
}

/// `det(I − A(t)(K − K₀))`.
pub fn lattice_det(k: &ExpressionParameter, t: &[Complex64]) -> Complex64 {
    let m = t.len();
    let k0 = ExpressionParameter::normal(m);
    let dk = k.k() - k0.k();
    linalg::det(&(linalg::identity(2 * m) - crossed_phase(t) * dk))
}

/// The two reduced factors `det(I − C(T+S−I))` and `det(I − C(T−S−I))` for
/// a K of block form `[[S, T], [T, S]]`.
pub fn reduced_factors(k: &ExpressionParameter, t: &[Complex64]) -> (Complex64, Complex64) {
    let m = t.len();
    let s = k.k().view((0, 0), (m, m)).into_owned();
    let tt = k.k().view((0, m), (m, m)).into_owned();
    let c = CMat::from_fn(m, m, |i, j| if i == j { ((I * t[i]).exp() - ONE) * 0.5 } else { ZERO });
    let id = linalg::identity(m);
    let f1 = linalg::det(&(&id - &c * (&tt + &s - &id)));
    let f2 = linalg::det(&(&id - &c * (&tt - &s - &id)));
    (f1, f2)
}

/// `I_{K₀}^{K}(e^{(i/2)Σt_k}·e^{(1/iℏ)⟨uA(t),u⟩})` at the end of `tpath`, with
/// the square root continued from +1 at `t = 0`.
pub fn amplitude_along_path(ctx: &Context, k: &ExpressionParameter, tpath: &PathSpec) -> Result<SignedGauss> {
    let m = ctx.m;
    if tpath.dim() != m || k.m() != m {
        return Err(Error::Dimension(format!("t-path of dimension {} for m = {m}", tpath.dim())));
    }
    if tpath.start().iter().any(|z| *z != ZERO) {
        return Err(Error::InvalidParams("t-path must start at 0".into()));
    }
    let cont = path::continue_sqrt(|t| lattice_det(k, t), tpath, ctx.sing_eps)?;
    let t = tpath.end();
    let a = crossed_phase(t);
    let k0 = ExpressionParameter::normal(m);
    let dk = k.k() - k0.k();
    let minv = linalg::inverse(&(linalg::identity(2 * m) - &a * dk), ctx.sing_eps)?;
    let amp = (I * 0.5 * t.iter().sum::<Complex64>()).exp() / cont.sqrt;
    let g = Gaussian::pure(amp, &minv * a).with_branch(Branch { sheet: cont.sheet, path_hash: Some(tpath.hash_id()) });
    Ok(SignedGauss { value: GaussElement::from(g), path: tpath.clone(), sheet: cont.sheet })
}

/// A root of the lattice determinant on a segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SegmentRoot {
    /// Position along the segment in `[0, 1]`.
    pub s: f64,
    pub det_abs: f64,
}

const ROOT_ACCEPT: f64 = 1e-12;

/// Real roots of `s ↦ det(I − A(from + s(to − from))(K − K₀))` in `(0, 1)`:
/// minima of `|det|` on a sample grid refined by complex Newton.
pub fn scan_segment(k: &ExpressionParameter, from: &[Complex64], to: &[Complex64]) -> Vec<SegmentRoot> {
    let at = |s: Complex64| -> Complex64 {
        let p: Vec<Complex64> = from.iter().zip(to).map(|(a, b)| a + (b - a) * s).collect();
        lattice_det(k, &p)
    };
    let samples = 256usize;
    let vals: Vec<f64> = (0..=samples).map(|i| at(linalg::r(i as f64 / samples as f64)).norm()).collect();
    let mut roots: Vec<SegmentRoot> = Vec::new();
    for i in 0..=samples {
        let left = if i > 0 { vals[i - 1] } else { f64::INFINITY };
        let right = if i < samples { vals[i + 1] } else { f64::INFINITY };
        if !(vals[i] <= left && vals[i] <= right) {
            continue;
        }
        let mut s = linalg::r(i as f64 / samples as f64);
        let h = 1e-7;
        for _ in 0..60 {
            let f = at(s);
            let df = (at(s + h) - at(s - h)) / (2.0 * h);
            if df == ZERO {
                break;
            }
            let step = f / df;
            s -= step;
            if step.norm() < 1e-16 {
                break;
            }
        }
        let val = at(s).norm();
        if val < ROOT_ACCEPT && s.im.abs() < 1e-9 && s.re > 1e-9 && s.re < 1.0 - 1e-9
            && roots.iter().all(|r| (r.s - s.re).abs() > 1e-7) {
                roots.push(SegmentRoot { s: s.re, det_abs: val });
            }
    }
    roots.sort_by(|a, b| a.s.partial_cmp(&b.s).unwrap());
    roots
}

/// What to scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScanTarget {
    /// Coordinate `k` alone (0-based).
    Single(usize),
    /// Coordinates `k` and `l` together along the diagonal (0-based).
    Pair(usize, usize),
}

/// A located singular parameter value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Singularity {
    pub t: Complex64,
    pub det_abs: f64,
}

/// `t₀ ∈ (0, π)` with `cot(t₀/2) = d₊`.
pub fn pair_root(p: &SpecialParams) -> f64 {
    2.0 * (1.0 / p.d_plus()).atan()
}

/// Singular parameters on `[lo, hi]` above `vertex`: closed form for pairs,
/// numeric scan for single coordinates.
pub fn find_singularities(
    ctx: &Context,
    p: &SpecialParams,
    target: ScanTarget,
    vertex: &Vertex,
    segment: (f64, f64),
) -> Result<Vec<Singularity>> {
    let k = build_special_k(ctx, p)?;
    let m = ctx.m;
    if vertex.m() != m {
        return Err(Error::Dimension(format!("vertex of length {} for m = {m}", vertex.m())));
    }
    let (lo, hi) = segment;
    if !(hi > lo) {
        return Err(Error::InvalidParams("segment must have hi > lo".into()));
    }
    let coords: Vec<usize> = match target {
        ScanTarget::Single(i) => vec![i],
        ScanTarget::Pair(i, j) => {
            if i == j {
                return Err(Error::InvalidParams("pair needs two distinct coordinates".into()));
            }
            vec![i, j]
        }
    };
    for &c in &coords {
        if c >= m {
            return Err(Error::Dimension(format!("coordinate {c} out of range for m = {m}")));
        }
        if vertex.is_raised(c) {
            return Err(Error::InvalidParams(format!("vertex involves coordinate {}", c + 1)));
        }
    }
    let point_at = |t: f64| -> Vec<Complex64> {
        let mut x = vertex.point();
        for &c in &coords {
            x[c] = linalg::r(t);
        }
        x
    };
    let mut out = Vec::new();
    match target {
        ScanTarget::Pair(..) => {
            let t0 = pair_root(p);
            let first = ((lo - 2.0 * PI) / (2.0 * PI)).floor() as i64;
            let last = (hi / (2.0 * PI)).ceil() as i64;
            for n in first..=last {
                for base in [t0, 2.0 * PI - t0] {
                    let t = base + 2.0 * PI * n as f64;
                    if t >= lo && t <= hi {
                        out.push(Singularity { t: linalg::r(t), det_abs: lattice_det(&k, &point_at(t)).norm() });
                    }
                }
            }
            out.sort_by(|a, b| a.t.re.partial_cmp(&b.t.re).unwrap());
        }
        ScanTarget::Single(_) => {
            for r in scan_segment(&k, &point_at(lo), &point_at(hi)) {
                let t = lo + r.s * (hi - lo);
                out.push(Singularity { t: linalg::r(t), det_abs: r.det_abs });
            }
        }
    }
    Ok(out)
}

/// Quantities of the two-variable singularity equation at vertex index ℓ.
#[derive(Debug, Clone, Serialize)]
pub struct DegeneracyReport {
    pub ell: usize,
    pub a_coef: Complex64,
    pub b_coef: Complex64,
    pub a0: f64,
    pub a1: f64,
    pub b0: f64,
    pub b1: f64,
    /// `|A₀ − B₀|`
    pub a0_minus_b0: f64,
    /// `|A₁ − B₁ − d₊|`
    pub a1_minus_b1_residual: f64,
    pub a0_positive: bool,
    pub a1_sq_gt_b1_sq: bool,
    /// `|x + y − 2(B₁ − A₁)|`
    pub sum_residual: f64,
    /// `|xy − (B₁ − A₁)²|`
    pub product_residual: f64,
    /// The double root `x = y = B₁ − A₁`.
    pub double_root: f64,
    /// Diagonal parameter with `cot(t/2) = −x`.
    pub t_root: f64,
    /// `|det|` at `(t, t, π, …, π)` with ℓ raised coordinates, m = ℓ + 2.
    pub det_at_root: f64,
}

/// Checks the degeneracy of `(ix + A)(iy + A) − B² = 0` with
/// `A = (α+ℓβ)(α−β)/(α+(ℓ−1)β)`, `B = (α−β)β/(α+(ℓ−1)β)`.
pub fn diagonal_degeneracy_check(p: &SpecialParams, ell: usize) -> Result<DegeneracyReport> {
    p.validate()?;
    let (al, be) = (p.alpha(), p.beta());
    let l = ell as f64;
    let den = al + be * (l - 1.0);
    let acoef = (al + be * l) * (al - be) / den;
    let bcoef = (al - be) * be / den;
    let (a0, a1, b0, b1) = (acoef.re, acoef.im, bcoef.re, bcoef.im);
    // Real and imaginary parts of (ix + A)(iy + A) = B² with x, y real:
    //   A₀² − A₁² − (x+y)A₁ − xy = B₀² − B₁²
    //   (x+y)A₀ + 2A₀A₁ = 2B₀B₁
    let sum = (2.0 * b0 * b1 - 2.0 * a0 * a1) / a0;
    let prod = a0 * a0 - a1 * a1 - sum * a1 - b0 * b0 + b1 * b1;
    let target = b1 - a1;
    let x = sum / 2.0;
    let t_root = 2.0 * (1.0 / -x).atan();
    let mm = ell + 2;
    let ctx = Context::new(mm)?;
    let k = build_special_k(&ctx, &SpecialParams { m: mm, ..*p })?;
    let mut pt = vec![linalg::r(t_root), linalg::r(t_root)];
    pt.extend(std::iter::repeat_n(linalg::r(PI), ell));
    Ok(DegeneracyReport {
        ell,
        a_coef: acoef,
        b_coef: bcoef,
        a0,
        a1,
        b0,
        b1,
        a0_minus_b0: (a0 - b0).abs(),
        a1_minus_b1_residual: (a1 - b1 - p.d_plus()).abs(),
        a0_positive: a0 > 0.0,
        a1_sq_gt_b1_sq: a1 * a1 > b1 * b1,
        sum_residual: (sum - 2.0 * target).abs(),
        product_residual: (prod - target * target).abs(),
        double_root: target,
        t_root,
        det_at_root: lattice_det(&k, &pt).norm(),
    })
}

/// One factor of a path-connecting product.
#[derive(Debug, Clone, PartialEq)]
pub enum WordItem {
    /// `ε₀₀(k)`: raise coordinate k (0-based) by π.
    Polar(usize),
    /// A crossed exponential moving the parameter by the given vector.
    Segment(Vec<Complex64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DetourPolicy {
    Ccw,
    Cw,
    /// No automatic detours; a root on a segment is an error.
    Explicit,
}

/// Default detour radius: `min(0.1, half the gap to the nearest other root
/// or segment end)`.
fn detour_radius(len: f64, roots: &[f64], i: usize) -> f64 {
    let s = roots[i];
    let mut gap = (s * len).min((1.0 - s) * len);
    if i > 0 {
        gap = gap.min((s - roots[i - 1]) * len);
    }
    if i + 1 < roots.len() {
        gap = gap.min((roots[i + 1] - s) * len);
    }
    (0.5 * gap).min(0.1)
}

/// Builds the t-path of `item₁ * … * item_p * V` (the rightmost item acts
/// first, each raising its coordinate last) with detours at singularities.
pub fn word_path(
    k: &ExpressionParameter,
    base: &Vertex,
    word: &[WordItem],
    policy: DetourPolicy,
) -> Result<PathSpec> {
    let m = base.m();
    let mut corners = base.edge_points();
    let mut cur = corners.last().cloned().unwrap_or_else(|| vec![ZERO; m]);
    for item in word.iter().rev() {
        let next: Vec<Complex64> = match item {
            WordItem::Polar(i) => {
                if *i >= m {
                    return Err(Error::Dimension(format!("polar index {} out of range for m = {m}", i + 1)));
                }
                let mut n = cur.clone();
                n[*i] += linalg::r(PI);
                n
            }
            WordItem::Segment(d) => {
                if d.len() != m {
                    return Err(Error::Dimension(format!("segment of length {} for m = {m}", d.len())));
                }
                cur.iter().zip(d).map(|(a, b)| a + b).collect()
            }
        };
        corners.push(next.clone());
        cur = next;
    }
    let mut points = vec![corners[0].clone()];
    let mut detours = Vec::new();
    for w in corners.windows(2) {
        let (from, to) = (&w[0], &w[1]);
        let len = path::dist(from, to);
        let roots: Vec<f64> = scan_segment(k, from, to).iter().map(|r| r.s).collect();
        for (i, &s) in roots.iter().enumerate() {
            let pt: Vec<Complex64> = from.iter().zip(to).map(|(a, b)| a + (b - a) * s).collect();
            let orientation = match policy {
                DetourPolicy::Ccw => Orientation::Ccw,
                DetourPolicy::Cw => Orientation::Cw,
                DetourPolicy::Explicit => {
                    let parts: Vec<String> = pt.iter().map(|z| format!("{:.9}", z.re)).collect();
                    return Err(Error::BranchObstruction(format!(
                        "singular parameter at t = ({}) with no detour",
                        parts.join(", ")
                    )));
                }
            };
            points.push(pt);
            detours.push(path::Detour { at: points.len() - 1, radius: detour_radius(len, &roots, i), orientation });
        }
        points.push(to.clone());
    }
    // drop the degenerate start when the base vertex is the origin and the word is empty
    if points.len() == 1 {
        points.push(points[0].clone());
    }
    Ok(PathSpec { points, detours })
}

/// Evaluates `item₁ * … * item_p * V` under K along its edge path.
pub fn path_product(
    ctx: &Context,
    k: &ExpressionParameter,
    base: &Vertex,
    word: &[WordItem],
    policy: DetourPolicy,
) -> Result<SignedGauss> {
    if base.m() != ctx.m {
        return Err(Error::Dimension(format!("vertex of length {} for m = {}", base.m(), ctx.m)));
    }
    let tpath = word_path(k, base, word, policy)?;
    if path::dist(tpath.start(), tpath.end()) == 0.0 && tpath.points.len() == 2 {
        let unit = Gaussian::unit(ctx.m);
        return Ok(SignedGauss { value: GaussElement::Gauss(unit), path: tpath, sheet: 1 });
    }
    amplitude_along_path(ctx, k, &tpath)
}

/// One checked relation.
#[derive(Debug, Clone, Serialize)]
pub struct RelationCheck {
    /// 1-based coordinates.
    pub pair: Vec<usize>,
    pub vertex: Vec<f64>,
    pub relation: String,
    pub pass: bool,
    pub deviation: f64,
    /// For anticommute checks: deviation from commutation instead.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub commute_deviation: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CliffordSummary {
    pub relations: usize,
    pub passed: usize,
    pub square_pass: bool,
    pub pair_square_pass: bool,
    pub anticommute_pass: bool,
    /// Every pair commutes instead of anticommuting.
    pub commutation_observed: bool,
    /// `ε_k² V = s V` with the same `s` for every k and vertex.
    pub sheet_consistent: bool,
    pub square_sign: Option<f64>,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub all_pass: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "PascalCase")]
pub struct CliffordReport {
    #[serde(rename = "K")]
    pub k: Vec<Vec<Complex64>>,
    #[serde(rename = "relations")]
    pub relations: Vec<RelationCheck>,
    #[serde(rename = "summary")]
    pub summary: CliffordSummary,
}

pub const CLIFFORD_TOL: f64 = 1e-8;

fn signed_diff(a: &SignedGauss, b: &SignedGauss, sign: f64) -> f64 {
    match (&a.value, &b.value) {
        (GaussElement::Gauss(x), GaussElement::Gauss(y)) => x.max_diff(&y.scaled(linalg::r(sign))),
        (GaussElement::Zero { .. }, GaussElement::Zero { .. }) => 0.0,
        _ => f64::INFINITY,
    }
}

fn vertices_avoiding(m: usize, avoid: &[usize], max: usize, rng: &mut ChaCha8Rng) -> Vec<Vertex> {
    let free: Vec<usize> = (0..m).filter(|i| !avoid.contains(i)).collect();
    let mut all = Vec::new();
    let count = 1usize << free.len().min(20);
    for mask in 0..count {
        let mut bits = vec![false; m];
        for (j, &i) in free.iter().enumerate() {
            bits[i] = mask & (1 << j) != 0;
        }
        all.push(Vertex::from_bits(&bits));
    }
    if all.len() > max {
        all.shuffle(rng);
        all.truncate(max);
        all.sort_by_key(|v| v.deltas().iter().map(|d| (*d > 0.0) as usize).collect::<Vec<_>>());
    }
    all
}

/// Checks `ε_k² V = −V`, `(ε_kε_l)² V = −V` and `ε_kε_l V = −ε_lε_k V` on
/// vertices not involving k, l.
pub fn verify_clifford(ctx: &Context, k: &ExpressionParameter) -> Result<CliffordReport> {
    verify_clifford_with(ctx, k, 8, 0, DetourPolicy::Ccw)
}

pub fn verify_clifford_with(
    ctx: &Context,
    k: &ExpressionParameter,
    max_vertices: usize,
    seed: u64,
    policy: DetourPolicy,
) -> Result<CliffordReport> {
    let m = ctx.m;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut relations = Vec::new();
    let mut signs = Vec::new();
    let eval = |v: &Vertex, w: &[WordItem]| path_product(ctx, k, v, w, policy);

    for kk in 0..m {
        for v in vertices_avoiding(m, &[kk], max_vertices, &mut rng) {
            let base = eval(&v, &[])?;
            let sq = eval(&v, &[WordItem::Polar(kk), WordItem::Polar(kk)])?;
            let dev = signed_diff(&sq, &base, -1.0);
            if let (Some(x), Some(y)) = (sq.value.as_gauss(), base.value.as_gauss()) {
                let ratio = x.amplitude / y.amplitude;
                signs.push(ratio.re.signum());
            }
            relations.push(RelationCheck {
                pair: vec![kk + 1],
                vertex: v.deltas(),
                relation: "square".into(),
                pass: dev < CLIFFORD_TOL,
                deviation: dev,
                commute_deviation: None,
            });
        }
    }
    for kk in 0..m {
        for ll in (kk + 1)..m {
            for v in vertices_avoiding(m, &[kk, ll], max_vertices, &mut rng) {
                let base = eval(&v, &[])?;
                let p = WordItem::Polar(kk);
                let q = WordItem::Polar(ll);
                let sq = eval(&v, &[p.clone(), q.clone(), p.clone(), q.clone()])?;
                let dev = signed_diff(&sq, &base, -1.0);
                relations.push(RelationCheck {
                    pair: vec![kk + 1, ll + 1],
                    vertex: v.deltas(),
                    relation: "pair_square".into(),
                    pass: dev < CLIFFORD_TOL,
                    deviation: dev,
                    commute_deviation: None,
                });
                let kl = eval(&v, &[p.clone(), q.clone()])?;
                let lk = eval(&v, &[q, p])?;
                let anti = signed_diff(&kl, &lk, -1.0);
                let comm = signed_diff(&kl, &lk, 1.0);
                relations.push(RelationCheck {
                    pair: vec![kk + 1, ll + 1],
                    vertex: v.deltas(),
                    relation: "anticommute".into(),
                    pass: anti < CLIFFORD_TOL,
                    deviation: anti,
                    commute_deviation: Some(comm),
                });
            }
        }
    }
    let by = |name: &str| relations.iter().filter(|r| r.relation == name).all(|r| r.pass);
    let anti: Vec<&RelationCheck> = relations.iter().filter(|r| r.relation == "anticommute").collect();
    let commutation_observed =
        !anti.is_empty() && anti.iter().all(|r| r.commute_deviation.map(|d| d < CLIFFORD_TOL).unwrap_or(false));
    let sheet_consistent = signs.windows(2).all(|w| w[0] == w[1]);
    let passed = relations.iter().filter(|r| r.pass).count();
    let max_deviation = relations.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let summary = CliffordSummary {
        relations: relations.len(),
        passed,
        square_pass: by("square"),
        pair_square_pass: by("pair_square"),
        anticommute_pass: by("anticommute"),
        commutation_observed,
        sheet_consistent,
        square_sign: if sheet_consistent { signs.first().copied() } else { None },
        max_deviation,
        tolerance: CLIFFORD_TOL,
        all_pass: passed == relations.len(),
    };
    Ok(CliffordReport { k: linalg::to_rows(k.k()), relations, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(m: usize) -> (Context, ExpressionParameter, SpecialParams) {
        let ctx = Context::new(m).unwrap();
        let p = SpecialParams::new(2.0, 1.0, 3.0, m).unwrap();
        let k = build_special_k(&ctx, &p).unwrap();
        (ctx, k, p)
    }

    #[test]
    fn params_validation() {
        let e = SpecialParams::new(1.0, 2.0, 3.0, 2).unwrap_err();
        assert!(e.to_string().contains("a > b"));
        assert!(SpecialParams::new(2.0, 1.0, 0.5, 2).unwrap_err().to_string().contains("rho > b"));
        assert!(SpecialParams::new(2.0, -1.0, 3.0, 2).unwrap_err().to_string().contains("b > 0"));
    }

    #[test]
    fn special_k_layout() {
        let (_, k, _) = setup(2);
        let km = k.k();
        assert_eq!(km[(0, 0)], linalg::c(0.0, 3.0));
        assert_eq!(km[(0, 1)], linalg::c(0.0, 1.0));
        assert_eq!(km[(0, 2)], linalg::r(2.0));
        assert_eq!(km[(0, 3)], linalg::r(2.0));
        assert_eq!(km, &km.transpose());
    }

    #[test]
    fn origin_is_unit() {
        let (ctx, k, _) = setup(2);
        let out = path_product(&ctx, &k, &Vertex::origin(2), &[], DetourPolicy::Ccw).unwrap();
        assert_eq!(out.sheet, 1);
        assert!(out.value.as_gauss().unwrap().max_diff(&Gaussian::unit(2)) < 1e-15);
    }

    #[test]
    fn single_coordinate_full_turn() {
        let (ctx, k, _) = setup(2);
        let path = PathSpec::straight(vec![ZERO, ZERO], vec![linalg::r(2.0 * PI), ZERO]);
        let out = amplitude_along_path(&ctx, &k, &path).unwrap();
        let g = out.value.as_gauss().unwrap();
        assert!((g.amplitude + ONE).norm() < 1e-9);
        assert!(linalg::max_abs(g.phase()) < 1e-9);
    }

    #[test]
    fn polar_at_normal_ordering() {
        let ctx = Context::new(1).unwrap();
        let k0 = ExpressionParameter::normal(1);
        let path = PathSpec::straight(vec![ZERO], vec![linalg::r(PI)]);
        let out = amplitude_along_path(&ctx, &k0, &path).unwrap();
        let g = out.value.as_gauss().unwrap();
        assert!((g.amplitude - I).norm() < 1e-12);
        assert!((g.phase()[(0, 1)] + ONE).norm() < 1e-12);
    }

    #[test]
    fn pair_roots_match_scan() {
        let (ctx, k, p) = setup(3);
        let v = Vertex::from_bits(&[false, false, true]);
        let closed = find_singularities(&ctx, &p, ScanTarget::Pair(0, 1), &v, (0.0, 2.0 * PI)).unwrap();
        assert_eq!(closed.len(), 2);
        assert!((closed[0].t.re - 0.6f64.acos()).abs() < 1e-12);
        let mut from = v.point();
        let mut to = v.point();
        to[0] = linalg::r(2.0 * PI);
        to[1] = linalg::r(2.0 * PI);
        from[0] = ZERO;
        let numeric = scan_segment(&k, &from, &to);
        assert_eq!(numeric.len(), 2);
        for (n, c) in numeric.iter().zip(&closed) {
            assert!((n.s * 2.0 * PI - c.t.re).abs() < 1e-10);
        }
    }

    #[test]
    fn no_roots_on_lines() {
        let (ctx, _, p) = setup(2);
        for v in [Vertex::origin(2), Vertex::from_bits(&[false, true])] {
            let r = find_singularities(&ctx, &p, ScanTarget::Single(0), &v, (0.0, 2.0 * PI)).unwrap();
            assert!(r.is_empty());
        }
    }

    #[test]
    fn factorization() {
        let (_, k, _) = setup(3);
        let t = [linalg::c(0.3, 0.1), linalg::r(1.7), linalg::c(-0.4, 0.2)];
        let (f1, f2) = reduced_factors(&k, &t);
        assert!((f1 * f2 - lattice_det(&k, &t)).norm() < 1e-10);
    }

    #[test]
    fn degeneracy_identities() {
        let p = SpecialParams::new(2.0, 1.0, 3.0, 2).unwrap();
        for ell in 0..3 {
            let r = diagonal_degeneracy_check(&p, ell).unwrap();
            assert!(r.a0_minus_b0 < 1e-12 && r.a1_minus_b1_residual < 1e-12);
            assert!(r.sum_residual < 1e-12 && r.product_residual < 1e-12);
            assert!(r.a0_positive && r.a1_sq_gt_b1_sq);
            assert!(r.det_at_root < 1e-10, "ell {ell}: {}", r.det_at_root);
        }
    }

    #[test]
    fn explicit_policy_reports_root() {
        let (ctx, k, _) = setup(2);
        let d = vec![linalg::r(2.0 * PI), linalg::r(2.0 * PI)];
        let out = path_product(&ctx, &k, &Vertex::origin(2), &[WordItem::Segment(d)], DetourPolicy::Explicit);
        assert!(matches!(out, Err(Error::BranchObstruction(_))));
    }
}
