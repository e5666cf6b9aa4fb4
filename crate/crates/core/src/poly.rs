//! Sparse polynomials in the generators `u = (ũ₁..ũₘ, ṽ₁..ṽₘ)`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ONE, ZERO};

/// Coefficients at or below this modulus are dropped.
pub const PRUNE_EPS: f64 = 1e-15;

pub type Exponent = Vec<u32>;

#[derive(Debug, Clone, PartialEq)]
pub struct WeylPolynomial {
    nvars: usize,
    terms: BTreeMap<Exponent, Complex64>,
}

impl WeylPolynomial {
    pub fn zero(nvars: usize) -> Self {
        WeylPolynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, ONE)
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p.prune();
        p
    }

    /// The generator `u_i` (0-based; `i < m` is ũ, `i ≥ m` is ṽ).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, ONE)
    }

    pub fn monomial(exp: Exponent, coef: Complex64) -> Self {
        let mut p = Self::zero(exp.len());
        p.add_term(exp, coef);
        p.prune();
        p
    }

    /// Linear form `⟨a, u⟩`.
    pub fn linear(a: &[Complex64]) -> Self {
        let n = a.len();
        let mut p = Self::zero(n);
        for (i, &ai) in a.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, ai);
        }
        p.prune();
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponent, Complex64)>>(nvars: usize, it: I) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in it {
            if e.len() != nvars {
                return Err(Error::Dimension(format!(
                    "exponent of length {} in a polynomial with {} generators",
                    e.len(),
                    nvars
                )));
            }
            p.add_term(e, c);
        }
        p.prune();
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coef(&self, exp: &[u32]) -> Complex64 {
        self.terms.get(exp).copied().unwrap_or(ZERO)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Accumulate without pruning; call [`prune`](Self::prune) afterwards.
    pub(crate) fn add_term(&mut self, exp: Exponent, c: Complex64) {
        *self.terms.entry(exp).or_insert(ZERO) += c;
    }

    pub fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() > PRUNE_EPS);
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut p = WeylPolynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        };
        p.prune();
        p
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                p.add_term(f, c * e[i] as f64);
            }
        }
        p.prune();
        p
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(x.iter())
                    .fold(*c, |acc, (&k, xi)| acc * xi.powu(k))
            })
            .sum()
    }

    /// `f(u + w)`.
    pub fn shift(&self, w: &[Complex64]) -> Self {
        let n = self.nvars;
        let mut out = Self::zero(n);
        for (e, c) in &self.terms {
            let mut acc = Self::constant(n, *c);
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let mut lin = Self::var(n, i);
                lin = &lin + &Self::constant(n, w[i]);
                for _ in 0..k {
                    acc = &acc * &lin;
                }
            }
            out = &out + &acc;
        }
        out
    }

    pub fn max_abs_coef(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient difference over the union of supports.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).max_abs_coef()
    }

    /// `max_abs_diff` divided by `max(1, max coefficient)`.
    pub fn rel_diff(&self, other: &Self) -> f64 {
        let scale = self.max_abs_coef().max(other.max_abs_coef()).max(1.0);
        self.max_abs_diff(other) / scale
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }
}

impl Add for &WeylPolynomial {
    type Output = WeylPolynomial;
    fn add(self, rhs: &WeylPolynomial) -> WeylPolynomial {
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.clone(), *c);
        }
        p.prune();
        p
    }
}

impl Sub for &WeylPolynomial {
    type Output = WeylPolynomial;
    fn sub(self, rhs: &WeylPolynomial) -> WeylPolynomial {
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.clone(), -c);
        }
        p.prune();
        p
    }
}

impl Neg for &WeylPolynomial {
    type Output = WeylPolynomial;
    fn neg(self) -> WeylPolynomial {
        self.scale(-ONE)
    }
}

impl Mul for &WeylPolynomial {
    type Output = WeylPolynomial;
    fn mul(self, rhs: &WeylPolynomial) -> WeylPolynomial {
        let mut p = WeylPolynomial::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponent = e1.iter().zip(e2.iter()).map(|(a, b)| a + b).collect();
                p.add_term(e, c1 * c2);
            }
        }
        p.prune();
        p
    }
}
