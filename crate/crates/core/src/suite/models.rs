//! Checks on observables and instruments induced by measurement models.

use rand::Rng;

use super::effects::any_state;
use super::observables::sa;
use super::Trial;
use crate::ensembles::{random_atomic_observable, random_channel, random_observable, random_state, random_unitary};
use crate::entropy::real_trace_product;
use crate::error::Result;
use crate::linalg::ComplexMatrix;
use crate::model::{model_entropy_gap, model_instrument, model_joint_state, model_observable, model_outcome_state};
use crate::objects::{Effect, MeasurementModel, Observable};
use crate::sequential::{measured_observable, tensor_observable};

const ROUTE_TOL: f64 = 1e-8;

#[derive(Clone, Copy)]
enum Probe {
    Generic,
    Atomic,
    Sharp,
}

fn probe_observable(t: &mut Trial, dk: usize, kind: Probe) -> Result<Observable> {
    match kind {
        Probe::Generic => {
            let k = t.rng().random_range(2..=4);
            random_observable(dk, k, t.rng())
        }
        Probe::Atomic => random_atomic_observable(dk, t.rng()),
        Probe::Sharp => {
            // Projections onto two complementary blocks of a random basis.
            let u = random_unitary(dk, t.rng())?;
            let cut = t.rng().random_range(1..dk);
            let block = |range: std::ops::Range<usize>| {
                let mut acc = ComplexMatrix::zeros(dk);
                for j in range {
                    let v = u.column(j);
                    acc += &ComplexMatrix::outer(&v, &v);
                }
                Effect::new(acc.hermitian_part())
            };
            Observable::new(vec![("0".into(), block(0..cut)?), ("1".into(), block(cut..dk)?)])
        }
    }
}

fn random_model(t: &mut Trial, kind: Probe) -> Result<MeasurementModel> {
    let dh = t.dim;
    let dk = 2 + t.index % 2;
    let kraus = t.rng().random_range(1..=2);
    let nu = random_channel(dh * dk, kraus, t.rng())?;
    let rank = t.rng().random_range(1..=dk);
    let sigma = random_state(dk, rank, t.rng())?;
    let probe = probe_observable(t, dk, kind)?;
    MeasurementModel::new(dh, dk, nu, sigma, probe)
}

pub(super) fn model_distribution(t: &mut Trial) -> Result<()> {
    let model = random_model(t, Probe::Generic)?;
    let rho = any_state(t)?;
    t.record("model", &model);
    t.record("rho", &rho);
    let inst = model_instrument(&model)?;
    let a = model_observable(&model)?;
    let via_instrument = measured_observable(&inst)?;
    let joint = model_joint_state(&model, &rho)?;
    let id_h = ComplexMatrix::identity(model.dim_h());
    for (o, px) in inst.outcomes().iter().zip(model.probe().outcomes()) {
        let ax = a.get(&o.label).expect("model observable keeps probe labels");
        let out = o.operation.apply(rho.matrix())?;
        t.close(
            "Kraus route = tr_K[ν(ρ⊗σ)(I⊗P_x)]",
            &out,
            &model_outcome_state(&model, &rho, &o.label)?,
            ROUTE_TOL,
        );
        t.close(
            "reduced form = observable measured by the instrument",
            ax.matrix(),
            via_instrument.get(&o.label).expect("same labels").matrix(),
            ROUTE_TOL,
        );
        let prob = real_trace_product(ax.matrix(), rho.matrix())?;
        t.eq("tr(ρA_x) = tr ℐ_x(ρ)", prob, out.trace().re);
        t.eq(
            "tr(ρA_x) = tr[ν(ρ⊗σ)(I⊗P_x)]",
            prob,
            real_trace_product(&id_h.kron(px.effect.matrix()), joint.matrix())?,
        );
    }
    Ok(())
}

/// For atomic (and sharp) probes the gap is nonpositive, so `S_A ≤ S_(I⊗P)`.
pub(super) fn model_atomic_probe(t: &mut Trial) -> Result<()> {
    let kind = if t.index % 2 == 0 { Probe::Atomic } else { Probe::Sharp };
    let model = random_model(t, kind)?;
    let rho = any_state(t)?;
    t.record("model", &model);
    t.record("rho", &rho);
    let g = model_entropy_gap(&model, &rho)?;
    t.le("gap ≤ 0", g.gap, 0.0);
    t.le("S_A(ρ) ≤ S_(I⊗P)[ν(ρ⊗σ)]", g.observable_entropy, g.probe_entropy);
    Ok(())
}

pub(super) fn eq_3_3_gap_identity(t: &mut Trial) -> Result<()> {
    let model = random_model(t, Probe::Generic)?;
    let rho = any_state(t)?;
    t.record("model", &model);
    t.record("rho", &rho);
    let g = model_entropy_gap(&model, &rho)?;
    let lifted = tensor_observable(&Observable::unit(model.dim_h(), "I"), model.probe());
    let joint = model_joint_state(&model, &rho)?;
    let probe_entropy = sa(&lifted, &joint)?;
    let a = model_observable(&model)?;
    t.eq("S_(I⊗P)[ν(ρ⊗σ)] = S_A(ρ) − gap", probe_entropy, sa(&a, &rho)? - g.gap);
    // The sign of the gap decides the comparison.
    let agree = (g.gap <= 0.0) == (g.observable_entropy <= g.probe_entropy);
    let decisive = g.gap.abs() > t.tol;
    t.require("S_A ≤ S_(I⊗P) iff gap ≤ 0", if agree || !decisive { t.tol } else { -g.gap.abs() });
    Ok(())
}
