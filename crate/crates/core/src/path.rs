//! Piecewise-linear parameter paths with half-circle detours, and square-root
//! continuation along them.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Ccw,
    Cw,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::Ccw => Orientation::Cw,
            Orientation::Cw => Orientation::Ccw,
        }
    }
}

/// Replace the vertex `points[at]` by a half circle of `radius` around it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detour {
    pub at: usize,
    pub radius: f64,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub points: Vec<Vec<Complex64>>,
    #[serde(default)]
    pub detours: Vec<Detour>,
}

/// One piece of a path, parametrized by `s ∈ [0,1]`.
#[derive(Debug, Clone)]
pub enum Piece {
    Line { from: Vec<Complex64>, to: Vec<Complex64> },
    /// `center - radius·dir·e^{±iπs}`; the sign is `+` for ccw.
    Arc { center: Vec<Complex64>, dir: Vec<Complex64>, radius: f64, orientation: Orientation },
}

impl Piece {
    pub fn at(&self, s: f64) -> Vec<Complex64> {
        match self {
            Piece::Line { from, to } => from.iter().zip(to).map(|(a, b)| a + (b - a) * s).collect(),
            Piece::Arc { center, dir, radius, orientation } => {
                let sign = match orientation {
                    Orientation::Ccw => 1.0,
                    Orientation::Cw => -1.0,
                };
                let rot = linalg::c(0.0, sign * std::f64::consts::PI * s).exp();
                center.iter().zip(dir).map(|(c, d)| c - d * rot * *radius).collect()
            }
        }
    }

    pub fn length(&self) -> f64 {
        match self {
            Piece::Line { from, to } => dist(from, to),
            Piece::Arc { radius, .. } => std::f64::consts::PI * radius,
        }
    }
}

pub fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn unit_dir(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let d = dist(a, b);
    a.iter().zip(b).map(|(x, y)| (y - x) / d).collect()
}

impl PathSpec {
    pub fn new(points: Vec<Vec<Complex64>>) -> Self {
        PathSpec { points, detours: Vec::new() }
    }

    pub fn straight(from: Vec<Complex64>, to: Vec<Complex64>) -> Self {
        Self::new(vec![from, to])
    }

    pub fn with_detour(mut self, at: usize, radius: f64, orientation: Orientation) -> Self {
        self.detours.push(Detour { at, radius, orientation });
        self
    }

    pub fn dim(&self) -> usize {
        self.points.first().map(|p| p.len()).unwrap_or(0)
    }

    pub fn start(&self) -> &[Complex64] {
        &self.points[0]
    }

    pub fn end(&self) -> &[Complex64] {
        self.points.last().expect("nonempty path")
    }

    /// Stable identifier of the path, recorded in branch tags.
    pub fn hash_id(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for p in &self.points {
            for z in p {
                z.re.to_bits().hash(&mut h);
                z.im.to_bits().hash(&mut h);
            }
        }
        for d in &self.detours {
            d.at.hash(&mut h);
            d.radius.to_bits().hash(&mut h);
            (d.orientation == Orientation::Ccw).hash(&mut h);
        }
        h.finish()
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::InvalidParams("path has no points".into()));
        }
        let dim = self.dim();
        if self.points.iter().any(|p| p.len() != dim) {
            return Err(Error::Dimension("path points of different dimensions".into()));
        }
        for w in self.points.windows(2) {
            if dist(&w[0], &w[1]) == 0.0 {
                return Err(Error::InvalidParams("consecutive path points coincide".into()));
            }
        }
        for d in &self.detours {
            if !(d.radius > 0.0) {
                return Err(Error::InvalidParams("detour radius must be positive".into()));
            }
            if d.at == 0 || d.at + 1 >= self.points.len() {
                return Err(Error::InvalidParams(format!("detour at {} is not an interior point", d.at)));
            }
        }
        Ok(())
    }

    /// Lines and arcs making up the path.
    pub fn pieces(&self) -> Result<Vec<Piece>> {
        self.validate()?;
        let n = self.points.len();
        let radius_at = |i: usize| self.detours.iter().find(|d| d.at == i);
        let mut pieces = Vec::new();
        let mut cursor = self.points[0].clone();
        for i in 1..n {
            let p = &self.points[i];
            let prev = &self.points[i - 1];
            if let Some(d) = radius_at(i) {
                let din = unit_dir(prev, p);
                let dout = unit_dir(p, &self.points[i + 1]);
                if dist(&din, &dout) > 1e-9 {
                    return Err(Error::InvalidParams(format!(
                        "detour at {i} needs collinear incoming and outgoing segments"
                    )));
                }
                if d.radius >= dist(prev, p) || d.radius >= dist(p, &self.points[i + 1]) {
                    return Err(Error::InvalidParams(format!("detour radius at {i} exceeds segment length")));
                }
                let entry: Vec<Complex64> = p.iter().zip(&din).map(|(c, e)| c - e * d.radius).collect();
                pieces.push(Piece::Line { from: cursor.clone(), to: entry });
                pieces.push(Piece::Arc {
                    center: p.clone(),
                    dir: din.clone(),
                    radius: d.radius,
                    orientation: d.orientation,
                });
                cursor = p.iter().zip(&din).map(|(c, e)| c + e * d.radius).collect();
            } else {
                pieces.push(Piece::Line { from: cursor.clone(), to: p.clone() });
                cursor = p.clone();
            }
        }
        Ok(pieces)
    }
}

/// Result of continuing `√f` along a path from `√f(start) = 1`.
#[derive(Debug, Clone, Copy)]
pub struct Continued {
    pub value: Complex64,
    pub sqrt: Complex64,
    /// +1 if `sqrt` equals the principal root of `value`, −1 otherwise.
    pub sheet: i8,
    pub steps: usize,
}

pub const MAX_STEPS: usize = 1_000_000;
const MAX_RATIO: f64 = 0.1;

fn describe(p: &[Complex64]) -> String {
    let parts: Vec<String> = p.iter().map(|z| format!("{:.6}{:+.6}i", z.re, z.im)).collect();
    format!("({})", parts.join(", "))
}

pub fn sheet_of(sqrt: Complex64, value: Complex64) -> i8 {
    let principal = value.sqrt();
    if (sqrt - principal).norm() <= (sqrt + principal).norm() {
        1
    } else {
        -1
    }
}

/// Continues `√f` along the path with adaptive steps (relative change of `f`
/// per step below 0.1). `f(start)` must be 1.
pub fn continue_sqrt<F>(f: F, path: &PathSpec, sing_eps: f64) -> Result<Continued>
where
    F: Fn(&[Complex64]) -> Complex64,
{
    let pieces = path.pieces()?;
    let mut val = f(path.start());
    if (val - ONE).norm() > 1e-9 {
        return Err(Error::InvalidParams(format!("continuation must start where f = 1, got {val}")));
    }
    let end = f(path.end());
    if end.norm() < sing_eps {
        return Err(Error::SingularIntertwiner(format!(
            "|det| = {:e} at endpoint {}",
            end.norm(),
            describe(path.end())
        )));
    }
    let mut root = ONE;
    let mut steps = 0usize;
    for piece in &pieces {
        let mut s = 0.0f64;
        let mut h = 1.0 / 16.0;
        while s < 1.0 {
            let s_next = (s + h).min(1.0);
            let p = piece.at(s_next);
            let v = f(&p);
            if v.norm() < sing_eps {
                return Err(Error::BranchObstruction(format!(
                    "|det| = {:e} at {} on the path; supply a detour",
                    v.norm(),
                    describe(&p)
                )));
            }
            let ratio = (v / val - ONE).norm();
            if ratio > MAX_RATIO {
                h *= 0.5;
                if h * piece.length() < 1e-14 {
                    return Err(Error::BranchObstruction(format!(
                        "zero of det near {} on the path; supply a detour",
                        describe(&p)
                    )));
                }
                continue;
            }
            root = linalg::sqrt_near(v, root);
            val = v;
            s = s_next;
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::StepLimit(steps));
            }
            if ratio < MAX_RATIO / 4.0 {
                h = (h * 1.5).min(0.25);
            }
        }
    }
    Ok(Continued { value: val, sqrt: root, sheet: sheet_of(root, val), steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, r};
    use std::f64::consts::PI;

    #[test]
    fn sqrt_around_origin_flips() {
        // f(z) = z/z0 on a loop around 0 starting at z0 = 1.
        let pts: Vec<Vec<Complex64>> = (0..=8)
            .map(|k| vec![c(0.0, 2.0 * PI * k as f64 / 8.0).exp()])
            .collect();
        let path = PathSpec::new(pts);
        let out = continue_sqrt(|p| p[0], &path, 1e-9).unwrap();
        assert!((out.value - ONE).norm() < 1e-12);
        assert!((out.sqrt + ONE).norm() < 1e-12);
        assert_eq!(out.sheet, -1);
    }

    #[test]
    fn detour_orientations_differ() {
        // f(t) = (1 - t) passes through 0 at t = 1 on [0, 2].
        let base = PathSpec::new(vec![vec![r(0.0)], vec![r(1.0)], vec![r(2.0)]]);
        let ccw = continue_sqrt(|p| ONE - p[0], &base.clone().with_detour(1, 0.1, Orientation::Ccw), 1e-9).unwrap();
        let cw = continue_sqrt(|p| ONE - p[0], &base.clone().with_detour(1, 0.1, Orientation::Cw), 1e-9).unwrap();
        assert!((ccw.sqrt + cw.sqrt).norm() < 1e-12);
        assert!((ccw.value - r(-1.0)).norm() < 1e-12);
        assert!(matches!(continue_sqrt(|p| ONE - p[0], &base, 1e-9), Err(Error::BranchObstruction(_))));
    }

    #[test]
    fn ccw_passes_below() {
        let path = PathSpec::new(vec![vec![r(0.0)], vec![r(1.0)], vec![r(2.0)]]).with_detour(1, 0.5, Orientation::Ccw);
        let pieces = path.pieces().unwrap();
        let mid = pieces[1].at(0.5);
        assert!(mid[0].im < 0.0);
    }

    #[test]
    fn endpoint_singularity() {
        let path = PathSpec::straight(vec![r(0.0)], vec![r(1.0)]);
        assert!(matches!(continue_sqrt(|p| ONE - p[0], &path, 1e-9), Err(Error::SingularIntertwiner(_))));
    }

    #[test]
    fn rejects_bad_paths() {
        assert!(PathSpec::new(vec![vec![r(0.0)], vec![r(0.0)]]).validate().is_err());
        let p = PathSpec::new(vec![vec![r(0.0)], vec![r(1.0)]]).with_detour(0, 0.1, Orientation::Ccw);
        assert!(p.validate().is_err());
    }
}
