//! Gaussian elements `g · P(u) · exp((1/iℏ)(⟨uA,u⟩ + ⟨b,u⟩))`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::context::Context;
use crate::linalg::{self, CMat, CVec, ONE, ZERO};
use crate::poly::WeylPolynomial;

/// Which square-root sheet an amplitude was resolved on, relative to the
/// principal root at the endpoint, and the hash of the path that fixed it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub sheet: i8,
    pub path_hash: Option<u64>,
}

impl Default for Branch {
    fn default() -> Self {
        Branch { sheet: 1, path_hash: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gaussian {
    pub amplitude: Complex64,
    pub branch: Branch,
    phase: CMat,
    pub linear: CVec,
    pub prefactor: WeylPolynomial,
}

impl Gaussian {
    /// `phase` is symmetrized exactly.
    pub fn new(amplitude: Complex64, phase: CMat, linear: CVec, prefactor: WeylPolynomial) -> Self {
        Gaussian {
            amplitude,
            branch: Branch::default(),
            phase: linalg::symmetrize(&phase),
            linear,
            prefactor,
        }
    }

    pub fn pure(amplitude: Complex64, phase: CMat) -> Self {
        let n = phase.nrows();
        Self::new(amplitude, phase, CVec::zeros(n), WeylPolynomial::one(n))
    }

    pub fn unit(m: usize) -> Self {
        Self::pure(ONE, linalg::zeros(2 * m))
    }

    /// Phase `[[0, C], [Cᵀ, 0]]`, i.e. `⟨uA,u⟩ = 2 Σ C_ij ũ_i ṽ_j`.
    pub fn crossed(amplitude: Complex64, c: &CMat) -> Self {
        let m = c.nrows();
        let z = linalg::zeros(m);
        Self::pure(amplitude, linalg::block2(&z, c, &c.transpose(), &z))
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    pub fn phase(&self) -> &CMat {
        &self.phase
    }

    pub fn nvars(&self) -> usize {
        self.phase.nrows()
    }

    pub fn m(&self) -> usize {
        self.nvars() / 2
    }

    /// Upper-right m×m block of the phase.
    pub fn crossed_block(&self) -> CMat {
        let m = self.m();
        self.phase.view((0, m), (m, m)).into_owned()
    }

    pub fn has_unit_prefactor(&self) -> bool {
        self.prefactor == WeylPolynomial::one(self.nvars())
    }

    pub fn is_pure(&self) -> bool {
        self.has_unit_prefactor() && self.linear.iter().all(|z| *z == ZERO)
    }

    /// `(1/iℏ)(⟨uA,u⟩ + ⟨b,u⟩)` as a polynomial.
    pub fn exponent_poly(&self, ctx: &Context) -> WeylPolynomial {
        let n = self.nvars();
        let inv = ctx.ih().inv();
        let mut terms = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let mut e = vec![0u32; n];
                e[i] += 1;
                e[j] += 1;
                terms.push((e, self.phase[(i, j)] * inv));
            }
            let mut e = vec![0u32; n];
            e[i] = 1;
            terms.push((e, self.linear[i] * inv));
        }
        WeylPolynomial::from_terms(n, terms).expect("exponent dimensions")
    }

    pub fn eval(&self, ctx: &Context, x: &[Complex64]) -> Complex64 {
        let xv = linalg::cvec(x);
        let q = linalg::pair(&xv, &self.phase, &xv) + linalg::dot(&self.linear, &xv);
        self.amplitude * self.prefactor.eval(x) * (q / ctx.ih()).exp()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut g = self.clone();
        g.amplitude *= s;
        g
    }

    /// Largest difference over amplitude, phase, linear part and prefactor.
    pub fn max_diff(&self, other: &Gaussian) -> f64 {
        let pre = self
            .prefactor
            .scale(self.amplitude)
            .max_abs_diff(&other.prefactor.scale(other.amplitude));
        let amp = (self.amplitude - other.amplitude).norm();
        amp.max(pre)
            .max(linalg::max_abs_diff(&self.phase, &other.phase))
            .max(linalg::vec_max_abs_diff(&self.linear, &other.linear))
    }
}

/// A Gaussian element or the distinguished zero element.
#[derive(Debug, Clone, PartialEq)]
pub enum GaussElement {
    Zero { m: usize },
    Gauss(Gaussian),
}

impl From<Gaussian> for GaussElement {
    fn from(g: Gaussian) -> Self {
        if g.amplitude == ZERO || g.prefactor.is_zero() {
            GaussElement::Zero { m: g.m() }
        } else {
            GaussElement::Gauss(g)
        }
    }
}

impl GaussElement {
    pub fn unit(m: usize) -> Self {
        GaussElement::Gauss(Gaussian::unit(m))
    }

    pub fn m(&self) -> usize {
        match self {
            GaussElement::Zero { m } => *m,
            GaussElement::Gauss(g) => g.m(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, GaussElement::Zero { .. })
    }

    pub fn as_gauss(&self) -> Option<&Gaussian> {
        match self {
            GaussElement::Zero { .. } => None,
            GaussElement::Gauss(g) => Some(g),
        }
    }

    pub fn into_gauss(self) -> Option<Gaussian> {
        match self {
            GaussElement::Zero { .. } => None,
            GaussElement::Gauss(g) => Some(g),
        }
    }

    pub fn eval(&self, ctx: &Context, x: &[Complex64]) -> Complex64 {
        match self {
            GaussElement::Zero { .. } => ZERO,
            GaussElement::Gauss(g) => g.eval(ctx, x),
        }
    }
}
