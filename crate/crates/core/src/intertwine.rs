//! Intertwiners between K-ordered expressions.

use num_complex::Complex64;

use crate::context::{Context, ExpressionParameter};
use crate::error::{Error, Result};
use crate::gauss::{Branch, GaussElement, Gaussian};
use crate::linalg::{self, CMat, ONE};
use crate::path::{self, PathSpec};
use crate::poly::WeylPolynomial;

/// How the square root of `det(I − A(K′−K))` is resolved.
#[derive(Debug, Clone, Copy)]
pub enum BranchPath<'a> {
    /// Continuation along the straight segment K → K′.
    Principal,
    /// Continuation along a K-space path (points are row-major flattened K).
    Path(&'a PathSpec),
}

/// Row-major entries of a K matrix, used as a K-space path point.
pub fn k_point(k: &CMat) -> Vec<Complex64> {
    (0..k.nrows()).flat_map(|i| (0..k.ncols()).map(move |j| k[(i, j)])).collect()
}

pub fn k_from_point(p: &[Complex64]) -> Result<CMat> {
    let n = (p.len() as f64).sqrt().round() as usize;
    if n * n != p.len() {
        return Err(Error::Dimension(format!("{} entries do not form a square matrix", p.len())));
    }
    Ok(linalg::symmetrize(&CMat::from_fn(n, n, |i, j| p[i * n + j])))
}

/// Polyline through the given expression parameters.
pub fn k_path(ks: &[&ExpressionParameter]) -> PathSpec {
    PathSpec::new(ks.iter().map(|k| k_point(k.k())).collect())
}

/// `exp((iℏ/4) Σ (K′−K)_ij ∂_i∂_j) f`, a finite sum.
pub fn intertwine_poly(
    ctx: &Context,
    k: &ExpressionParameter,
    k2: &ExpressionParameter,
    f: &WeylPolynomial,
) -> Result<WeylPolynomial> {
    let n = ctx.n();
    if k.m() != ctx.m || k2.m() != ctx.m || f.nvars() != n {
        return Err(Error::Dimension("intertwine_poly operands do not match context".into()));
    }
    let dk = k2.k() - k.k();
    let coef = ctx.ih() * 0.25;
    let mut out = f.clone();
    let mut term = f.clone();
    let mut order = 0u32;
    while !term.is_zero() {
        order += 1;
        let mut next = WeylPolynomial::zero(n);
        for i in 0..n {
            let di = term.derivative(i);
            if di.is_zero() {
                continue;
            }
            for j in 0..n {
                if dk[(i, j)] == linalg::ZERO {
                    continue;
                }
                next = &next + &di.derivative(j).scale(dk[(i, j)]);
            }
        }
        term = next.scale(coef / order as f64);
        out = &out + &term;
    }
    Ok(out)
}

/// `det(I − A(K′−K))`.
pub fn singular_det(ctx: &Context, k: &ExpressionParameter, k2: &ExpressionParameter, a: &CMat) -> Complex64 {
    let dk = k2.k() - k.k();
    linalg::det(&(linalg::identity(ctx.n()) - a * dk))
}

/// The phase map `A ↦ (I − AΔK)⁻¹A`.
pub fn phase_map(a: &CMat, dk: &CMat, eps: f64) -> Result<CMat> {
    let m = linalg::identity(a.nrows()) - a * dk;
    Ok(linalg::symmetrize(&(linalg::inverse(&m, eps)? * a)))
}

/// Applies the intertwiner with increment `dk` given an already resolved
/// `√det(I − AΔK)`.
fn apply_step(ctx: &Context, g: &Gaussian, dk: &CMat, root: Complex64) -> Result<Gaussian> {
    let n = ctx.n();
    let a = g.phase();
    let minv = linalg::inverse(&(linalg::identity(n) - a * dk), ctx.sing_eps)?;
    let phase = &minv * a;
    let b = &g.linear;
    let b2 = &minv * b;
    // constant picked up by the linear part: bᵀΔK(I − AΔK)⁻¹b / 4iℏ
    let shift = linalg::pair(b, dk, &b2) / (ctx.ih() * 4.0);
    Ok(Gaussian::new(g.amplitude * shift.exp() / root, phase, b2, g.prefactor.clone()))
}

fn check_operand(ctx: &Context, g: &Gaussian) -> Result<()> {
    if g.nvars() != ctx.n() {
        return Err(Error::Dimension(format!(
            "Gaussian has {} generators, context expects {}",
            g.nvars(),
            ctx.n()
        )));
    }
    if !g.has_unit_prefactor() {
        return Err(Error::Unsupported("intertwining a Gaussian with a polynomial prefactor".into()));
    }
    Ok(())
}

fn rename_singular(e: Error, target: &ExpressionParameter) -> Error {
    match e {
        Error::SingularIntertwiner(msg) => {
            Error::SingularIntertwiner(format!("target K ({:?}) is singular for this phase: {msg}", target.label))
        }
        other => other,
    }
}

/// `I_K^{K′}` on a Gaussian element: amplitude `g·det(I−AΔK)^{−1/2}`, phase
/// `(I−AΔK)⁻¹A`, linear part `(I−AΔK)⁻¹b`.
pub fn intertwine_gauss(
    ctx: &Context,
    k: &ExpressionParameter,
    k2: &ExpressionParameter,
    g: &GaussElement,
    branch: BranchPath,
) -> Result<GaussElement> {
    let g = match g {
        GaussElement::Zero { m } => return Ok(GaussElement::Zero { m: *m }),
        GaussElement::Gauss(g) => g,
    };
    if k.m() != ctx.m || k2.m() != ctx.m {
        return Err(Error::Dimension("expression parameters do not match context".into()));
    }
    if k.k() == k2.k() && matches!(branch, BranchPath::Principal) {
        return Ok(GaussElement::Gauss(g.clone()));
    }
    check_operand(ctx, g)?;
    let n = ctx.n();
    let owned;
    let kpath = match branch {
        BranchPath::Principal => {
            owned = PathSpec::straight(k_point(k.k()), k_point(k2.k()));
            &owned
        }
        BranchPath::Path(p) => {
            if path::dist(p.start(), &k_point(k.k())) > ctx.tol.max(1e-12)
                || path::dist(p.end(), &k_point(k2.k())) > ctx.tol.max(1e-12)
            {
                return Err(Error::InvalidParams("K-space path must run from K to K'".into()));
            }
            p
        }
    };
    let a = g.phase().clone();
    let k0 = k.k().clone();
    let det_at = |p: &[Complex64]| -> Complex64 {
        match k_from_point(p) {
            Ok(kp) => linalg::det(&(linalg::identity(n) - &a * (kp - &k0))),
            Err(_) => linalg::ZERO,
        }
    };
    let cont = path::continue_sqrt(det_at, kpath, ctx.sing_eps).map_err(|e| rename_singular(e, k2))?;
    let dk = k2.k() - k.k();
    let out = apply_step(ctx, g, &dk, cont.sqrt).map_err(|e| rename_singular(e, k2))?;
    let hash = match branch {
        BranchPath::Principal => None,
        BranchPath::Path(p) => Some(p.hash_id()),
    };
    Ok(GaussElement::from(out.with_branch(Branch { sheet: cont.sheet * g.branch.sheet, path_hash: hash })))
}

/// Parallel transport along a K-space path by composing exact intertwiners
/// over small steps.
pub fn transport_gauss(ctx: &Context, g: &GaussElement, kpath: &PathSpec) -> Result<GaussElement> {
    let g = match g {
        GaussElement::Zero { m } => return Ok(GaussElement::Zero { m: *m }),
        GaussElement::Gauss(g) => g,
    };
    check_operand(ctx, g)?;
    let n = ctx.n();
    if kpath.dim() != n * n {
        return Err(Error::Dimension(format!("K-space path has dimension {}, expected {}", kpath.dim(), n * n)));
    }
    let pieces = kpath.pieces()?;
    let a0 = g.phase().clone();
    let kstart = k_from_point(kpath.start())?;
    let total_det = |kp: &CMat| linalg::det(&(linalg::identity(n) - &a0 * (kp - &kstart)));

    let mut cur = g.clone();
    let mut kcur = kstart.clone();
    let mut root_prod = ONE;
    let mut det_prod = ONE;
    let mut steps = 0usize;
    let last = pieces.len().saturating_sub(1);
    for (pi, piece) in pieces.iter().enumerate() {
        let mut s = 0.0f64;
        let mut h = 1.0 / 16.0;
        while s < 1.0 {
            let s_next = (s + h).min(1.0);
            let knext = k_from_point(&piece.at(s_next))?;
            let dk = &knext - &kcur;
            let d = linalg::det(&(linalg::identity(n) - cur.phase() * &dk));
            let overall = total_det(&knext);
            if overall.norm() < ctx.sing_eps || !d.is_finite() {
                let at = if pi == last && s_next >= 1.0 { "endpoint" } else { "path" };
                let msg = format!("|det| = {:e} on the {at} at step {steps}", overall.norm());
                return Err(if at == "endpoint" {
                    Error::SingularIntertwiner(msg)
                } else {
                    Error::BranchObstruction(format!("{msg}; supply a detour"))
                });
            }
            if (d - ONE).norm() > 0.1 {
                h *= 0.5;
                if h * piece.length() < 1e-14 {
                    return Err(Error::BranchObstruction(format!(
                        "zero of det near step {steps}; supply a detour"
                    )));
                }
                continue;
            }
            let root = d.sqrt();
            cur = apply_step(ctx, &cur, &dk, root)?;
            root_prod *= root;
            det_prod *= d;
            kcur = knext;
            s = s_next;
            steps += 1;
            if steps > path::MAX_STEPS {
                return Err(Error::StepLimit(steps));
            }
            if (d - ONE).norm() < 0.025 {
                h = (h * 1.5).min(0.25);
            }
        }
    }
    let sheet = path::sheet_of(root_prod, det_prod) * g.branch.sheet;
    Ok(GaussElement::from(cur.with_branch(Branch { sheet, path_hash: Some(kpath.hash_id()) })))
}
