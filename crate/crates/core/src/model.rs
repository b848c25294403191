//! Instruments and observables induced by a measurement model
//! `(H, K, ν, σ, P)`, where `ℐ_x(ρ) = tr_K[ν(ρ⊗σ)(I⊗P_x)]`.

use num_complex::Complex64;
use serde::Serialize;

use crate::entropy::{observable_entropy, real_trace_product};
use crate::error::{QmeError, Result};
use crate::linalg::{ComplexMatrix, TraceOut};
use crate::objects::{Effect, Instrument, MeasurementModel, Observable, Operation, State};
use crate::tolerance::{EIG_ZERO_TOL, PROB_ZERO_TOL};

/// Residual allowed in `S_{I⊗P}[ν(ρ⊗σ)] = S_A(ρ) − gap`.
const GAP_IDENTITY_TOL: f64 = 1e-9;

/// The instrument on `H` realized by the model.
///
/// Built as the Kraus composite of `ρ ↦ ρ⊗σ`, `ν`, the Lüders map of `I⊗P_x`
/// and the partial trace over `K`. The composite operators are square on `H`.
pub fn model_instrument(model: &MeasurementModel) -> Result<Instrument> {
    let (dh, dk) = (model.dim_h(), model.dim_k());
    let sigma = model.sigma().matrix().hermitian_eig()?;
    let embeddings: Vec<(f64, Vec<Complex64>)> = sigma
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &mu)| mu > EIG_ZERO_TOL)
        .map(|(j, &mu)| (mu.sqrt(), sigma.eigenvectors.column(j)))
        .collect();
    let id_h = ComplexMatrix::identity(dh);
    let mut ops = Vec::with_capacity(model.probe().len());
    for outcome in model.probe().outcomes() {
        let lift = id_h.kron(&outcome.effect.matrix().psd_sqrt()?);
        let mut kraus = Vec::new();
        for n in model.nu().kraus() {
            let m = &lift * n;
            for (weight, phi) in &embeddings {
                for k in 0..dk {
                    // (I⊗⟨k|) m (I⊗|φ⟩), scaled by √μ
                    let op = ComplexMatrix::from_fn(dh, |r, c| {
                        let row = r * dk + k;
                        (0..dk).map(|q| m.get(row, c * dk + q) * phi[q]).sum::<Complex64>() * *weight
                    });
                    kraus.push(op);
                }
            }
        }
        ops.push((outcome.label.clone(), Operation::new(kraus)?));
    }
    Instrument::new(ops)
}

/// `tr_K[ν(ρ⊗σ)(I⊗P_x)]` evaluated literally with dense products.
pub fn model_outcome_state(model: &MeasurementModel, rho: &State, label: &str) -> Result<ComplexMatrix> {
    let p = model
        .probe()
        .get(label)
        .ok_or_else(|| QmeError::Label(format!("probe has no outcome `{label}`")))?;
    let evolved = model.nu().apply(&rho.matrix().kron(model.sigma().matrix()))?;
    let projected = &evolved * &ComplexMatrix::identity(model.dim_h()).kron(p.matrix());
    projected.partial_trace(model.dim_h(), model.dim_k(), TraceOut::Right)
}

/// `ν(ρ⊗σ)` as a state on `H ⊗ K`.
pub fn model_joint_state(model: &MeasurementModel, rho: &State) -> Result<State> {
    if rho.dim() != model.dim_h() {
        return Err(QmeError::Dimension(format!(
            "state has dimension {}, model system has {}",
            rho.dim(),
            model.dim_h()
        )));
    }
    State::new(model.nu().apply(&rho.matrix().kron(model.sigma().matrix()))?)
}

/// The observable measured by the model, `A_x = tr_K[(I⊗σ) ν*(I⊗P_x)]`.
pub fn model_observable(model: &MeasurementModel) -> Result<Observable> {
    let (dh, dk) = (model.dim_h(), model.dim_k());
    let id_h = ComplexMatrix::identity(dh);
    let lifted_sigma = id_h.kron(model.sigma().matrix());
    let outcomes = model
        .probe()
        .outcomes()
        .iter()
        .map(|o| {
            let pulled = model.nu().apply_dual(&id_h.kron(o.effect.matrix()))?;
            let reduced = (&lifted_sigma * &pulled).partial_trace(dh, dk, TraceOut::Right)?;
            let effect = Effect::new(reduced.hermitian_part()).map_err(|e| {
                QmeError::invariant(format!("model outcome `{}` yields an effect", o.label), e.to_string())
            })?;
            Ok((o.label.clone(), effect))
        })
        .collect::<Result<Vec<_>>>()?;
    Observable::new(outcomes)
}

/// The two entropies compared for a measurement model and the gap between them.
#[derive(Debug, Clone, Serialize)]
pub struct ModelEntropyGap {
    /// `S_A(ρ)` for the model observable.
    pub observable_entropy: f64,
    /// `S_{I⊗P}[ν(ρ⊗σ)]`.
    pub probe_entropy: f64,
    /// `Σ_x tr(ρA_x) ln[tr(A_x) / (n tr(P_x))]`; `S_A ≤ S_{I⊗P}` iff this is ≤ 0.
    pub gap: f64,
}

pub fn model_entropy_gap(model: &MeasurementModel, rho: &State) -> Result<ModelEntropyGap> {
    let a = model_observable(model)?;
    let joint = model_joint_state(model, rho)?;
    let n = model.dim_h() as f64;
    let id_h = ComplexMatrix::identity(model.dim_h());

    let mut gap = 0.0;
    let mut probe_entropy = 0.0;
    for (ax, px) in a.outcomes().iter().zip(model.probe().outcomes()) {
        let p = real_trace_product(ax.effect.matrix(), rho.matrix())?;
        if p > PROB_ZERO_TOL {
            gap += p * (ax.effect.trace() / (n * px.effect.trace())).ln();
        }
        let lifted = id_h.kron(px.effect.matrix());
        let q = real_trace_product(&lifted, joint.matrix())?;
        if q > PROB_ZERO_TOL {
            probe_entropy -= q * (q / lifted.trace().re).ln();
        }
    }
    let observable_entropy = observable_entropy(&a, rho)?.nats();
    let residual = (probe_entropy - (observable_entropy - gap)).abs();
    if residual > GAP_IDENTITY_TOL {
        return Err(QmeError::Numerical(format!(
            "S_(I⊗P) differs from S_A − gap by {residual:.3e}"
        )));
    }
    Ok(ModelEntropyGap {
        observable_entropy,
        probe_entropy,
        gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{random_channel, random_observable, random_state, RngSeed};
    use crate::sequential::{distribution, measured_observable};

    fn random_model(seed: u64, dh: usize, dk: usize) -> MeasurementModel {
        let mut rng = RngSeed(seed).rng();
        let nu = random_channel(dh * dk, 2, &mut rng).unwrap();
        let sigma = random_state(dk, dk, &mut rng).unwrap();
        let probe = random_observable(dk, 3, &mut rng).unwrap();
        MeasurementModel::new(dh, dk, nu, sigma, probe).unwrap()
    }

    #[test]
    fn identity_interaction_gives_product_form() {
        let mut rng = RngSeed(1).rng();
        let sigma = random_state(2, 2, &mut rng).unwrap();
        let probe = Observable::new(vec![
            ("0".into(), Effect::new(ComplexMatrix::diag(&[1.0, 0.0])).unwrap()),
            ("1".into(), Effect::new(ComplexMatrix::diag(&[0.0, 1.0])).unwrap()),
        ])
        .unwrap();
        let model = MeasurementModel::new(3, 2, Operation::identity(6), sigma.clone(), probe.clone()).unwrap();
        let inst = model_instrument(&model).unwrap();
        let rho = random_state(3, 3, &mut rng).unwrap();
        let obs = model_observable(&model).unwrap();
        for o in probe.outcomes() {
            let w = real_trace_product(sigma.matrix(), o.effect.matrix()).unwrap();
            let out = inst.get(&o.label).unwrap().apply(rho.matrix()).unwrap();
            assert!(out.max_abs_diff(&rho.matrix().scale(w)) <= 1e-12);
            let ax = obs.get(&o.label).unwrap();
            assert!(ax.matrix().max_abs_diff(&ComplexMatrix::identity(3).scale(w)) <= 1e-12);
        }
        let s = observable_entropy(&obs, &rho).unwrap().nats();
        assert!((s - 3f64.ln()).abs() <= 1e-9);
    }

    #[test]
    fn instrument_route_matches_literal_formula() {
        for seed in 0..10 {
            let model = random_model(seed, 2 + (seed as usize % 3), 2 + (seed as usize % 2));
            let inst = model_instrument(&model).unwrap();
            let rho = random_state(model.dim_h(), model.dim_h(), &mut RngSeed(seed + 100).rng()).unwrap();
            for o in inst.outcomes() {
                let direct = model_outcome_state(&model, &rho, &o.label).unwrap();
                assert!(o.operation.apply(rho.matrix()).unwrap().max_abs_diff(&direct) <= 1e-9);
            }
        }
    }

    #[test]
    fn observable_route_matches_instrument_route() {
        for seed in 0..10 {
            let model = random_model(seed + 20, 2 + (seed as usize % 3), 2);
            let via_instrument = measured_observable(&model_instrument(&model).unwrap()).unwrap();
            let reduced = model_observable(&model).unwrap();
            for (x, y) in via_instrument.outcomes().iter().zip(reduced.outcomes()) {
                assert_eq!(x.label, y.label);
                assert!(x.effect.matrix().max_abs_diff(y.effect.matrix()) <= 1e-8);
            }
        }
    }

    #[test]
    fn distributions_agree() {
        let model = random_model(40, 3, 2);
        let rho = random_state(3, 2, &mut RngSeed(41).rng()).unwrap();
        let a = model_observable(&model).unwrap();
        let joint = model_joint_state(&model, &rho).unwrap();
        let lifted = crate::sequential::tensor_observable(&Observable::unit(3, "I"), model.probe());
        let lhs = distribution(&a, &rho).unwrap();
        let rhs = distribution(&lifted, &joint).unwrap();
        for ((_, p), (_, q)) in lhs.weights.iter().zip(&rhs.weights) {
            assert!((p - q).abs() <= 1e-9);
        }
    }

    #[test]
    fn gap_identity_holds() {
        let model = random_model(50, 3, 3);
        let rho = random_state(3, 3, &mut RngSeed(51).rng()).unwrap();
        let g = model_entropy_gap(&model, &rho).unwrap();
        assert!((g.probe_entropy - (g.observable_entropy - g.gap)).abs() <= 1e-9);
    }
}
