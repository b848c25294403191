//! Seeded random ensembles built from complex Ginibre matrices.
//!
//! Generators take the RNG by `&mut`, so the caller owns the stream. The same
//! [`RngSeed`] always yields bit-identical output.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{QmeError, Result};
use crate::linalg::ComplexMatrix;
use crate::objects::{Effect, Instrument, Observable, Operation, State};

pub type SeededRng = ChaCha8Rng;

/// Relative eigenvalue floor below which a Gram matrix counts as singular.
const SINGULAR_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> SeededRng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// A child seed for stream `(name, index)`. Pure function of its inputs.
    pub fn derive(self, name: &str, index: u64) -> RngSeed {
        // FNV-1a over the name, then splitmix64 finalization.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in name.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        RngSeed(splitmix64(splitmix64(self.0 ^ h) ^ splitmix64(index.wrapping_add(0x9e37_79b9))))
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Square matrix of i.i.d. standard complex normal entries.
pub fn ginibre_square<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let entries: Vec<Complex64> = (0..dim * dim).map(|_| complex_normal(rng)).collect();
    ComplexMatrix::from_fn(dim, |i, j| entries[i * dim + j])
}

/// Ginibre state `GG†/tr(GG†)` with `G` of size `dim × rank`.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<State> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(QmeError::Dimension(format!("need 1 ≤ rank ≤ dim, got rank {rank}, dim {dim}")));
    }
    let g: Vec<Complex64> = (0..dim * rank).map(|_| complex_normal(rng)).collect();
    let gg = ComplexMatrix::from_fn(dim, |i, j| {
        (0..rank).map(|k| g[i * rank + k] * g[j * rank + k].conj()).sum()
    });
    let tr = gg.trace().re;
    State::new(gg.scale(1.0 / tr))
}

/// GUE matrix with its spectrum mapped affinely onto `[lo, hi] ⊂ [0, 1]`.
pub fn random_effect<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Effect> {
    let h = ginibre_square(dim, rng).hermitian_part();
    let eig = h.hermitian_eig()?;
    let (lo, hi) = loop {
        let (u, v): (f64, f64) = (rng.random(), rng.random());
        let (lo, hi) = (u.min(v), u.max(v));
        if lo < hi && hi > 1e-6 {
            break (lo, hi);
        }
    };
    let (min, max) = (eig.min_eigenvalue(), eig.max_eigenvalue());
    let span = max - min;
    let a = eig.map_spectrum(|l| {
        if span <= f64::EPSILON * max.abs().max(1.0) {
            hi
        } else {
            (lo + (l - min) / span * (hi - lo)).clamp(0.0, 1.0)
        }
    });
    Effect::new(a.hermitian_part())
}

/// POVM `A_x = S^{-1/2} B_x S^{-1/2}` with `B_x = G_x†G_x`, `S = Σ B_x`.
pub fn random_observable<R: Rng + ?Sized>(dim: usize, outcomes: usize, rng: &mut R) -> Result<Observable> {
    if outcomes < 2 {
        return Err(QmeError::Config(format!("random observables need at least 2 outcomes, got {outcomes}")));
    }
    let grams: Vec<ComplexMatrix> = (0..outcomes)
        .map(|_| {
            let g = ginibre_square(dim, rng);
            &g.adjoint() * &g
        })
        .collect();
    let mut total = ComplexMatrix::zeros(dim);
    for b in &grams {
        total += b;
    }
    let s = total.psd_inv_sqrt(SINGULAR_FLOOR)?;
    let effects = grams
        .iter()
        .enumerate()
        .map(|(x, b)| Ok((x.to_string(), Effect::new((&(&s * b) * &s).hermitian_part())?)))
        .collect::<Result<Vec<_>>>()?;
    Observable::new(effects)
}

/// Instrument with `K_j = V_j T^{-1/2}`, `T = Σ V_j†V_j`, split evenly over outcomes.
pub fn random_instrument<R: Rng + ?Sized>(
    dim: usize,
    outcomes: usize,
    kraus_per_outcome: usize,
    rng: &mut R,
) -> Result<Instrument> {
    if outcomes == 0 || kraus_per_outcome == 0 {
        return Err(QmeError::Config("instrument needs at least one outcome and one Kraus operator".into()));
    }
    let vs: Vec<ComplexMatrix> = (0..outcomes * kraus_per_outcome)
        .map(|_| ginibre_square(dim, rng))
        .collect();
    let mut t = ComplexMatrix::zeros(dim);
    for v in &vs {
        t += &(&v.adjoint() * v);
    }
    let t_inv_sqrt = t.psd_inv_sqrt(SINGULAR_FLOOR)?;
    let ks: Vec<ComplexMatrix> = vs.iter().map(|v| v * &t_inv_sqrt).collect();
    let ops = ks
        .chunks(kraus_per_outcome)
        .enumerate()
        .map(|(x, chunk)| Ok((x.to_string(), Operation::new(chunk.to_vec())?)))
        .collect::<Result<Vec<_>>>()?;
    Instrument::new(ops)
}

/// Random channel: a one-outcome [`random_instrument`].
pub fn random_channel<R: Rng + ?Sized>(dim: usize, kraus: usize, rng: &mut R) -> Result<Operation> {
    let inst = random_instrument(dim, 1, kraus, rng)?;
    Ok(inst.outcomes()[0].operation.clone())
}

/// Unitary from the eigenvectors of a GUE matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexMatrix> {
    Ok(ginibre_square(dim, rng).hermitian_part().hermitian_eig()?.eigenvectors)
}

/// Atomic observable: rank-one projections onto a random orthonormal basis.
pub fn random_atomic_observable<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Observable> {
    let u = random_unitary(dim, rng)?;
    let effects = (0..dim)
        .map(|j| {
            let v = u.column(j);
            Ok((j.to_string(), Effect::new(ComplexMatrix::outer(&v, &v))?))
        })
        .collect::<Result<Vec<_>>>()?;
    Observable::new(effects)
}

/// Uniform point on the probability simplex with `k` vertices.
pub fn random_simplex<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let draws: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / total).collect()
}
