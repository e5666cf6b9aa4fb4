use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, ONE};

/// Number of canonical pairs, Planck constant and numeric thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Context {
    pub m: usize,
    pub hbar: f64,
    pub tol: f64,
    pub sing_eps: f64,
}

impl Context {
    pub fn new(m: usize) -> Result<Self> {
        Self::with(m, 1.0, 1e-10, 1e-9)
    }

    pub fn with(m: usize, hbar: f64, tol: f64, sing_eps: f64) -> Result<Self> {
        let ctx = Context { m, hbar, tol, sing_eps };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        self.hbar = hbar;
        self.validate()?;
        Ok(self)
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        self.tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::InvalidParams("m >= 1 violated".into()));
        }
        if !(self.hbar > 0.0) || !self.hbar.is_finite() {
            return Err(Error::InvalidParams("hbar > 0 violated".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidParams("tol >= 0 violated".into()));
        }
        if !(self.sing_eps > 0.0) {
            return Err(Error::InvalidParams("sing_eps > 0 violated".into()));
        }
        Ok(())
    }

    /// Number of generators, 2m.
    pub fn n(&self) -> usize {
        2 * self.m
    }

    /// `iℏ`.
    pub fn ih(&self) -> num_complex::Complex64 {
        linalg::c(0.0, self.hbar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Weyl,
    Normal,
    Antinormal,
    Unit,
    Special,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Weyl,
    Normal,
    Antinormal,
    Unit,
}

impl std::str::FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weyl" => Ok(Preset::Weyl),
            "normal" => Ok(Preset::Normal),
            "antinormal" => Ok(Preset::Antinormal),
            "unit" => Ok(Preset::Unit),
            other => Err(Error::Parse(format!("unknown ordering preset '{other}'"))),
        }
    }
}

/// Either a named ordering or an explicit 2m×2m matrix.
#[derive(Debug, Clone)]
pub enum KSpec {
    Preset(Preset),
    Matrix(CMat),
}

/// The 2m×2m symmetric matrix K selecting a K-ordered expression.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionParameter {
    k: CMat,
    pub label: Label,
}

impl ExpressionParameter {
    /// Wraps a matrix that is already exactly symmetric.
    pub(crate) fn from_symmetric(k: CMat, label: Label) -> Self {
        debug_assert!(k == k.transpose());
        ExpressionParameter { k, label }
    }

    pub fn k(&self) -> &CMat {
        &self.k
    }

    pub fn m(&self) -> usize {
        self.k.nrows() / 2
    }

    /// Λ = K + J.
    pub fn lambda(&self) -> CMat {
        &self.k + standard_skew_m(self.m()).j
    }

    pub fn weyl(m: usize) -> Self {
        Self::from_symmetric(linalg::zeros(2 * m), Label::Weyl)
    }

    pub fn normal(m: usize) -> Self {
        Self::from_symmetric(normal_matrix(m), Label::Normal)
    }

    pub fn antinormal(m: usize) -> Self {
        Self::from_symmetric(-normal_matrix(m), Label::Antinormal)
    }

    pub fn unit(m: usize) -> Self {
        Self::from_symmetric(linalg::identity(2 * m), Label::Unit)
    }
}

/// The standard skew matrix J.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewForm {
    pub j: CMat,
}

fn normal_matrix(m: usize) -> CMat {
    let z = linalg::zeros(m);
    let e = linalg::identity(m);
    linalg::block2(&z, &e, &e, &z)
}

fn standard_skew_m(m: usize) -> SkewForm {
    let mut j = linalg::zeros(2 * m);
    for i in 0..m {
        j[(i, m + i)] = -ONE;
        j[(m + i, i)] = ONE;
    }
    SkewForm { j }
}

pub fn standard_skew(ctx: &Context) -> SkewForm {
    standard_skew_m(ctx.m)
}

pub fn make_expression_parameter(ctx: &Context, spec: KSpec) -> Result<ExpressionParameter> {
    let m = ctx.m;
    match spec {
        KSpec::Preset(Preset::Weyl) => Ok(ExpressionParameter::weyl(m)),
        KSpec::Preset(Preset::Normal) => Ok(ExpressionParameter::normal(m)),
        KSpec::Preset(Preset::Antinormal) => Ok(ExpressionParameter::antinormal(m)),
        KSpec::Preset(Preset::Unit) => Ok(ExpressionParameter::unit(m)),
        KSpec::Matrix(k) => {
            if k.nrows() != 2 * m || k.ncols() != 2 * m {
                return Err(Error::Dimension(format!(
                    "expected {0}x{0} matrix, got {1}x{2}",
                    2 * m,
                    k.nrows(),
                    k.ncols()
                )));
            }
            let asym = linalg::asymmetry(&k);
            if asym > ctx.tol {
                return Err(Error::NonSymmetric(asym));
            }
            Ok(ExpressionParameter::from_symmetric(linalg::symmetrize(&k), Label::Custom))
        }
    }
}
