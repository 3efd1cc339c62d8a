//! Dense complex eigenvalues and two-resolution trust filtering.

mod eigen;
mod matrix;
mod trust;

pub use eigen::{balance, eigenvalues_dense, hessenberg, MAX_DIMENSION};
pub use matrix::CMatrix;
pub use trust::{filter_trusted, EigenvalueCloud, DEFAULT_MATCH_TOL};
