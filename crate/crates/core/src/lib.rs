//! K-ordered expressions of the Weyl algebra.
//!
//! Elements are represented in a fixed ordering chosen by a symmetric matrix
//! K; the intertwiners translate between orderings. Gaussian elements carry
//! a square-root sheet tag that records the path used to fix the sign of
//! their amplitude.

pub mod error;
pub mod linalg;
pub mod context;
pub mod poly;
pub mod gauss;
pub mod star;
pub mod path;
pub mod intertwine;
pub mod quadexp;
pub mod oracle;
pub mod holonomy;
pub mod json;
pub mod verify;
pub mod cli;

pub use context::{Context, ExpressionParameter, KSpec, Label, Preset};
pub use error::{Error, Result};
pub use gauss::{Branch, GaussElement, Gaussian};
pub use poly::WeylPolynomial;
