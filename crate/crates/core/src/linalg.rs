//! Thin helpers over `nalgebra` complex matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

/// Assemble `[[a, b], [c, d]]` from equally sized square blocks.
pub fn block2(a: &CMat, b: &CMat, cc: &CMat, d: &CMat) -> CMat {
    let m = a.nrows();
    let mut out = CMat::zeros(2 * m, 2 * m);
    out.view_mut((0, 0), (m, m)).copy_from(a);
    out.view_mut((0, m), (m, m)).copy_from(b);
    out.view_mut((m, 0), (m, m)).copy_from(cc);
    out.view_mut((m, m), (m, m)).copy_from(d);
    out
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn vec_max_abs_diff(a: &CVec, b: &CVec) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn asymmetry(a: &CMat) -> f64 {
    max_abs_diff(a, &a.transpose())
}

/// Exact symmetrization `(A + Aᵀ)/2`; afterwards `A == Aᵀ` bit for bit.
pub fn symmetrize(a: &CMat) -> CMat {
    let n = a.nrows();
    let mut out = a.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = (a[(i, j)] + a[(j, i)]) * 0.5;
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

pub fn det(a: &CMat) -> Complex64 {
    a.clone().lu().determinant()
}

/// Inverse by partial-pivot LU; fails when the matrix is numerically singular
/// relative to `eps` (smallest pivot ratio).
pub fn inverse(a: &CMat, eps: f64) -> Result<CMat> {
    let lu = a.clone().lu();
    let u = lu.u();
    let n = a.nrows();
    let mut pmax: f64 = 0.0;
    let mut pmin = f64::INFINITY;
    for i in 0..n {
        let p = u[(i, i)].norm();
        pmax = pmax.max(p);
        pmin = pmin.min(p);
    }
    if n > 0 && (pmin == 0.0 || pmin < eps * pmax.max(1.0)) {
        return Err(Error::SingularIntertwiner(format!(
            "matrix is singular (pivot ratio {:e})",
            if pmax > 0.0 { pmin / pmax } else { 0.0 }
        )));
    }
    lu.try_inverse()
        .ok_or_else(|| Error::SingularIntertwiner("matrix is not invertible".into()))
}

pub fn expm(a: &CMat) -> CMat {
    a.clone().exp()
}

pub fn trace(a: &CMat) -> Complex64 {
    a.trace()
}

/// Bilinear pairing `Σ aᵢ bᵢ` (no conjugation).
pub fn dot(a: &CVec, b: &CVec) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// `⟨a M, b⟩ = Σ a_i M_ij b_j`.
pub fn pair(a: &CVec, m: &CMat, b: &CVec) -> Complex64 {
    dot(&(m.transpose() * a), b)
}

pub fn cvec(v: &[Complex64]) -> CVec {
    CVec::from_column_slice(v)
}

pub fn rvec(v: &[f64]) -> CVec {
    CVec::from_iterator(v.len(), v.iter().map(|&x| r(x)))
}

pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<CMat> {
    let n = rows.len();
    let cols = rows.first().map(|r| r.len()).unwrap_or(0);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Dimension("ragged matrix rows".into()));
    }
    Ok(CMat::from_fn(n, cols, |i, j| rows[i][j]))
}

pub fn to_rows(a: &CMat) -> Vec<Vec<Complex64>> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)]).collect())
        .collect()
}

/// Square root whose sign is chosen nearest to `prev`.
pub fn sqrt_near(z: Complex64, prev: Complex64) -> Complex64 {
    let s = z.sqrt();
    if (s - prev).norm() <= (s + prev).norm() {
        s
    } else {
        -s
    }
}
