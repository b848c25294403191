//! Entropy functionals, all in nats.
//!
//! The ρ-entropy of a nonzero effect is `S_a(ρ) = −tr(ρa) ln[tr(ρa)/tr(a)]`,
//! extended continuously by `S_a(ρ) = 0` when `tr(ρa) = 0`. Observable and
//! instrument entropies are sums of effect entropies over outcomes.

use std::fmt;

use serde::Serialize;

use crate::error::{QmeError, Result};
use crate::linalg::ComplexMatrix;
use crate::objects::{Effect, Instrument, Observable, State};
use crate::tolerance::{EIG_GROUP_TOL, EIG_ZERO_TOL, PROB_ZERO_TOL, TOL_IMAG};

/// A nonnegative entropy in nats.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct EntropyValue(f64);

impl EntropyValue {
    pub const ZERO: EntropyValue = EntropyValue(0.0);

    /// Clamps rounding noise in `[−1e-12, 0)` to zero.
    pub fn from_nats(x: f64) -> Self {
        debug_assert!(x.is_finite(), "entropy must be finite, got {x}");
        debug_assert!(x >= -1e-12, "entropy below zero beyond rounding: {x}");
        EntropyValue(if x < 0.0 && x >= -1e-12 { 0.0 } else { x })
    }

    pub fn nats(self) -> f64 {
        self.0
    }
}

impl fmt::Display for EntropyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} nats", self.0)
    }
}

/// The two-sided bound on `S_a(ρ)` in terms of the spectrum of ρ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectEntropyBounds {
    pub lower: f64,
    pub upper: f64,
}

/// `tr(AB)` without forming the product.
pub(crate) fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> num_complex::Complex64 {
    let n = a.dim();
    let (a, b) = (a.as_nalgebra(), b.as_nalgebra());
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// `tr(ρa)` as a real probability.
pub fn probability(a: &Effect, rho: &State) -> Result<f64> {
    real_trace_product(a.matrix(), rho.matrix())
}

pub(crate) fn real_trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(QmeError::Dimension(format!(
            "operator of dimension {} against one of dimension {}",
            a.dim(),
            b.dim()
        )));
    }
    let t = trace_product(a, b);
    debug_assert!(t.im.abs() <= TOL_IMAG, "tr(ρa) has imaginary part {:e}", t.im);
    Ok(t.re)
}

/// `−p ln(p / volume)` with the zero-probability convention.
fn weighted_log_term(p: f64, volume: f64) -> f64 {
    if p <= PROB_ZERO_TOL {
        0.0
    } else {
        -p * (p / volume).ln()
    }
}

/// `S(ρ) = −Σ λ ln λ` over eigenvalues above `EIG_ZERO_TOL`.
pub fn von_neumann_entropy(rho: &State) -> EntropyValue {
    let eig = rho
        .matrix()
        .hermitian_eig()
        .expect("a validated state is Hermitian");
    let s = eig
        .eigenvalues
        .iter()
        .filter(|&&l| l > EIG_ZERO_TOL)
        .map(|&l| -l * l.ln())
        .sum();
    EntropyValue::from_nats(s)
}

/// `S_a(ρ) = −tr(ρa) ln[tr(ρa)/tr(a)]`.
pub fn effect_entropy(a: &Effect, rho: &State) -> Result<EntropyValue> {
    let p = probability(a, rho)?;
    Ok(EntropyValue::from_nats(weighted_log_term(p, a.trace())))
}

/// Lower bound `−Σ tr(P_i a) λ_i ln λ_i` over the spectral projections of ρ
/// and upper bound `ln[tr(a)/tr(ρa)]`.
pub fn effect_entropy_bounds(a: &Effect, rho: &State) -> Result<EffectEntropyBounds> {
    let p = probability(a, rho)?;
    if p <= PROB_ZERO_TOL {
        return Err(QmeError::UndefinedBound(format!("tr(ρa) = {p:.3e} is zero")));
    }
    let eig = rho.matrix().hermitian_eig()?;
    let mut lower = 0.0;
    for (lambda, proj) in eig.spectral_projections(EIG_GROUP_TOL) {
        if lambda > EIG_ZERO_TOL {
            lower -= real_trace_product(&proj, a.matrix())? * lambda * lambda.ln();
        }
    }
    Ok(EffectEntropyBounds {
        lower,
        upper: (a.trace() / p).ln(),
    })
}

/// `S_A(ρ) = Σ_x S_{A_x}(ρ)`.
pub fn observable_entropy(obs: &Observable, rho: &State) -> Result<EntropyValue> {
    let mut total = 0.0;
    for e in obs.effects() {
        total += effect_entropy(e, rho)?.nats();
    }
    Ok(EntropyValue::from_nats(total))
}

/// `S_ℐ(ρ) = −Σ_x tr[ℐ_x(ρ)] ln{tr[ℐ_x(ρ)] / tr[ℐ_x(I)]}`.
pub fn instrument_entropy(inst: &Instrument, rho: &State) -> Result<EntropyValue> {
    let identity = ComplexMatrix::identity(inst.dim());
    let mut total = 0.0;
    for outcome in inst.outcomes() {
        let p = outcome.operation.apply(rho.matrix())?.trace().re;
        let volume = outcome.operation.apply(&identity)?.trace().re;
        total += weighted_log_term(p, volume);
    }
    Ok(EntropyValue::from_nats(total))
}
