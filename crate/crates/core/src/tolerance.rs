//! Numerical tolerances shared by every validator and functional.
//!
//! [`Tolerances::default`] holds the crate-wide values; validators have
//! `*_with` variants that accept an override.

use serde::{Deserialize, Serialize};

/// Hermiticity threshold on `max |m - m†|`.
pub const TOL_HERM: f64 = 1e-9;
/// Eigenvalues in `[-TOL_PSD, 0)` are clipped to zero; below that is an error.
pub const TOL_PSD: f64 = 1e-9;
/// Residual allowed for `psd_sqrt(m)^2 - m`.
pub const TOL_SQRT: f64 = 1e-8;
/// Orthonormality of eigenvectors.
pub const TOL_ORTHO: f64 = 1e-10;
/// Completeness / trace conditions on observables, operations and instruments.
pub const TOL_SUM: f64 = 1e-8;
/// Unit trace of a state.
pub const TOL_TRACE: f64 = 1e-9;
/// Probabilities at or below this are treated as zero (0 ln 0 := 0).
pub const PROB_ZERO_TOL: f64 = 1e-12;
/// Eigenvalues at or below this do not contribute to von Neumann entropy.
pub const EIG_ZERO_TOL: f64 = 1e-12;
/// Eigenvalues closer than this are grouped into one spectral projection.
pub const EIG_GROUP_TOL: f64 = 1e-10;
/// Largest imaginary part tolerated on a trace that should be real.
pub const TOL_IMAG: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub hermitian: f64,
    pub psd: f64,
    pub sqrt_residual: f64,
    pub completeness: f64,
    pub trace: f64,
    pub prob_zero: f64,
    pub eig_zero: f64,
    pub eig_group: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermitian: TOL_HERM,
            psd: TOL_PSD,
            sqrt_residual: TOL_SQRT,
            completeness: TOL_SUM,
            trace: TOL_TRACE,
            prob_zero: PROB_ZERO_TOL,
            eig_zero: EIG_ZERO_TOL,
            eig_group: EIG_GROUP_TOL,
        }
    }
}
