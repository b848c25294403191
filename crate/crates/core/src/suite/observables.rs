//! Checks on observables, instruments and their sequential products.

use rand::seq::SliceRandom;
use rand::Rng;

use super::effects::{any_state, invisible_perturbation, log_term, p};
use super::Trial;
use crate::ensembles::{random_instrument, random_observable, random_simplex, random_state};
use crate::entropy::{instrument_entropy, observable_entropy, trace_product, von_neumann_entropy};
use crate::error::Result;
use crate::linalg::ComplexMatrix;
use crate::objects::{Effect, Instrument, Observable, State};
use crate::sequential::{
    coarse_grain, compose_instruments, holevo_instrument, luders_instrument, measured_observable,
    observable_sequential, pair_label, tensor_observable, CoarseGraining,
};
use crate::tolerance::TOL_PSD;

const ROUTE_TOL: f64 = 1e-8;

/// States are this far below `ln n` when the claim is that they fall short.
const STRICT_DEFICIT: f64 = 1e-6;

/// How many random states to try before the explicit construction.
const SEARCH_STATES: usize = 64;

pub(super) fn sa(obs: &Observable, rho: &State) -> Result<f64> {
    Ok(observable_entropy(obs, rho)?.nats())
}

pub(super) fn observable(t: &mut Trial) -> Result<Observable> {
    let (d, k) = (t.dim, t.rng().random_range(2..=5));
    random_observable(d, k, t.rng())
}

fn trivial(t: &mut Trial) -> Result<Observable> {
    let k = t.rng().random_range(1..=4);
    let weights = random_simplex(k, t.rng());
    let labeled: Vec<(String, f64)> = weights.into_iter().enumerate().map(|(i, w)| (i.to_string(), w)).collect();
    Observable::trivial(t.dim, &labeled)
}

/// An instrument and the observable it measures: generic, Lüders or Holevo.
fn instrument_for(t: &mut Trial, variant: usize) -> Result<(Instrument, Observable)> {
    let d = t.dim;
    let inst = match variant % 3 {
        0 => {
            let (k, kraus) = (t.rng().random_range(2..=4), t.rng().random_range(1..=2));
            random_instrument(d, k, kraus, t.rng())?
        }
        1 => luders_instrument(&observable(t)?)?,
        _ => {
            let a = observable(t)?;
            let alphas = (0..a.len()).map(|_| any_state(t)).collect::<Result<Vec<_>>>()?;
            holevo_instrument(&a, &alphas)?
        }
    };
    let a = measured_observable(&inst)?;
    Ok((inst, a))
}

/// The atomic observable of `ρ`'s eigenbasis.
fn spectral_observable(rho: &State) -> Result<Observable> {
    let eig = rho.matrix().hermitian_eig()?;
    let outcomes = (0..rho.dim())
        .map(|j| {
            let v = eig.eigenvectors.column(j);
            Ok((j.to_string(), Effect::new(ComplexMatrix::outer(&v, &v))?))
        })
        .collect::<Result<Vec<_>>>()?;
    Observable::new(outcomes)
}

/// `max_{x,y} |tr(A_x) tr(ρA_y) − tr(A_y) tr(ρA_x)|`.
fn proportionality_violation(effects: &[&Effect], rho: &State) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, ax) in effects.iter().enumerate() {
        for ay in &effects[i + 1..] {
            let v = ax.trace() * p(ay, rho)? - ay.trace() * p(ax, rho)?;
            worst = worst.max(v.abs());
        }
    }
    Ok(worst)
}

pub(super) fn eq_3_1(t: &mut Trial) -> Result<()> {
    let a = observable(t)?;
    t.record("A", &a);
    let n = t.dim as f64;
    t.eq("S_A(I/n) = ln n", sa(&a, &State::maximally_mixed(t.dim))?, n.ln());
    Ok(())
}

pub(super) fn thm_3_1(t: &mut Trial) -> Result<()> {
    let (a, rho) = (observable(t)?, any_state(t)?);
    t.record("A", &a);
    t.record("rho", &rho);
    let s = sa(&a, &rho)?;
    t.le("S(ρ) ≤ S_A(ρ)", von_neumann_entropy(&rho).nats(), s);
    t.le("S_A(ρ) ≤ ln n", s, (t.dim as f64).ln());
    // The spectral observable of ρ attains the lower end.
    t.eq("S_A(ρ) = S(ρ) for the eigenbasis of ρ", sa(&spectral_observable(&rho)?, &rho)?, von_neumann_entropy(&rho).nats());
    Ok(())
}

/// For fixed full-rank ρ: `S_A(ρ) = ln n` iff `tr(A_x)tr(ρA_y) = tr(A_y)tr(ρA_x)`.
///
/// Rank-deficient draws are skipped. The "if" direction is checked on
/// constructed instances; "only if" is checked where the Jensen bound
/// `V² λ_min² / 2` certifies a gap above tolerance.
pub(super) fn cor_3_2_i(t: &mut Trial) -> Result<()> {
    let d = t.dim;
    let n = d as f64;
    let rank = if t.index % 4 == 3 { t.rng().random_range(1..=d) } else { d };
    let rho = random_state(d, rank, t.rng())?;
    t.record("rho", &rho);
    let lambda_min = rho.matrix().hermitian_eig()?.min_eigenvalue();
    if lambda_min <= 1e-9 {
        t.skip(format!("rank-deficient ρ (λ_min = {lambda_min:.2e})"));
        return Ok(());
    }

    let triv = trivial(t)?;
    t.eq("S_A(ρ) = ln n for trivial A", sa(&triv, &rho)?, n.ln());

    let c: f64 = t.rng().random_range(0.1..0.9);
    let h = invisible_perturbation(t, &rho, 0.9 * c.min(1.0 - c))?;
    let id = ComplexMatrix::identity(d);
    let balanced = Observable::new(vec![
        ("0".into(), Effect::new(&id.scale(c) + &h)?),
        ("1".into(), Effect::new(&id.scale(1.0 - c) - &h)?),
    ])?;
    t.record("balanced", &balanced);
    let effects: Vec<&Effect> = balanced.effects().collect();
    t.eq("condition holds for the balanced observable", proportionality_violation(&effects, &rho)?, 0.0);
    t.eq("S_A(ρ) = ln n for the balanced observable", sa(&balanced, &rho)?, n.ln());

    let generic = observable(t)?;
    t.record("generic", &generic);
    let s = sa(&generic, &rho)?;
    t.le("S_A(ρ) ≤ ln n", s, n.ln());
    let effects: Vec<&Effect> = generic.effects().collect();
    let v = proportionality_violation(&effects, &rho)?;
    if v * v * lambda_min * lambda_min / 2.0 > 2.0 * t.tol {
        t.gt_strict("S_A(ρ) < ln n when the condition fails", n.ln(), s);
    }
    Ok(())
}

/// `A` trivial iff `S_A(ρ) = ln n` for all ρ. "If" is exact on trivial
/// observables; "only if" is sampled: for a random non-trivial `A` some state
/// (random search, then the top eigenvector of the least uniform effect)
/// falls short of `ln n`.
pub(super) fn cor_3_2_ii(t: &mut Trial) -> Result<()> {
    let d = t.dim;
    let n = d as f64;
    let triv = trivial(t)?;
    let rho = any_state(t)?;
    t.record("trivial", &triv);
    t.record("rho", &rho);
    t.eq("S_A(ρ) = ln n for trivial A", sa(&triv, &rho)?, n.ln());

    let a = observable(t)?;
    t.record("A", &a);
    let mut best = f64::INFINITY;
    for _ in 0..SEARCH_STATES {
        let r = any_state(t)?;
        best = best.min(sa(&a, &r)?);
    }
    if best >= n.ln() - STRICT_DEFICIT {
        let (_, spread, top) = a
            .effects()
            .map(|e| {
                let eig = e.matrix().hermitian_eig()?;
                let spread = eig.max_eigenvalue() - eig.min_eigenvalue();
                Ok((e, spread, eig.eigenvectors.column(d - 1)))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("observables are nonempty");
        if spread > TOL_PSD {
            let pure = State::new(ComplexMatrix::outer(&top, &top))?;
            best = best.min(sa(&a, &pure)?);
        }
    }
    t.require("some ρ has S_A(ρ) < ln n − 1e-6", (n.ln() - STRICT_DEFICIT) - best);
    Ok(())
}

/// `ρ = I/n` iff `S_A(ρ) = ln n` for all `A`. "If" is exact on random
/// observables; "only if" uses the eigenbasis observable of a random ρ.
pub(super) fn cor_3_2_iii(t: &mut Trial) -> Result<()> {
    let d = t.dim;
    let n = d as f64;
    let a = observable(t)?;
    t.record("A", &a);
    t.eq("S_A(I/n) = ln n", sa(&a, &State::maximally_mixed(d))?, n.ln());

    let rho = any_state(t)?;
    t.record("rho", &rho);
    let distance = trace_distance_to_mixed(&rho)?;
    // ln n − S(ρ) ≥ ½‖ρ − I/n‖₁², so a trace distance of 2e-3 leaves 2e-6.
    if distance < 2e-3 {
        t.skip("ρ within trace distance 2e-3 of I/n");
        return Ok(());
    }
    let spectral = spectral_observable(&rho)?;
    t.gt_strict("S_A(ρ) < ln n − 1e-6 for the eigenbasis of ρ", n.ln() - STRICT_DEFICIT, sa(&spectral, &rho)?);
    Ok(())
}

fn trace_distance_to_mixed(rho: &State) -> Result<f64> {
    let n = rho.dim();
    let diff = rho.matrix() - &ComplexMatrix::identity(n).scale(1.0 / n as f64);
    Ok(diff.hermitian_eig()?.eigenvalues.iter().map(|l| l.abs()).sum())
}

pub(super) fn cor_3_2_iv(t: &mut Trial) -> Result<()> {
    let d = t.dim;
    let n = d as f64;
    t.eq("S(I/n) = ln n", von_neumann_entropy(&State::maximally_mixed(d)).nats(), n.ln());
    let rho = any_state(t)?;
    t.record("rho", &rho);
    if trace_distance_to_mixed(&rho)? < 2e-3 {
        t.skip("ρ within trace distance 2e-3 of I/n");
        return Ok(());
    }
    t.gt_strict("S(ρ) < ln n − 1e-6 for ρ ≠ I/n", n.ln() - STRICT_DEFICIT, von_neumann_entropy(&rho).nats());
    Ok(())
}

pub(super) fn thm_3_3_i(t: &mut Trial) -> Result<()> {
    let d = t.dim;
    let (m, k) = (t.rng().random_range(2..=3), t.rng().random_range(2..=4));
    let lambdas = random_simplex(m, t.rng());
    let parts = (0..m).map(|_| random_observable(d, k, t.rng())).collect::<Result<Vec<_>>>()?;
    let rho = any_state(t)?;
    t.record("lambdas", &lambdas);
    t.record("observables", &parts);
    t.record("rho", &rho);
    let combined = (0..k)
        .map(|x| {
            let mut acc = ComplexMatrix::zeros(d);
            for (w, obs) in lambdas.iter().zip(&parts) {
                acc += &obs.outcomes()[x].effect.matrix().scale(*w);
            }
            Ok((x.to_string(), Effect::new(acc)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let combined = Observable::new(combined)?;
    let weighted: f64 = lambdas
        .iter()
        .zip(&parts)
        .map(|(w, obs)| Ok(w * sa(obs, &rho)?))
        .sum::<Result<f64>>()?;
    t.ge("S_(ΣλA)(ρ) ≥ Σ λ S_A(ρ)", sa(&combined, &rho)?, weighted);
    Ok(())
}

pub(super) fn thm_3_3_ii(t: &mut Trial) -> Result<()> {
    let a = observable(t)?;
    let m = t.rng().random_range(2..=4);
    let lambdas = random_simplex(m, t.rng());
    let states = (0..m).map(|_| any_state(t)).collect::<Result<Vec<_>>>()?;
    t.record("A", &a);
    t.record("lambdas", &lambdas);
    t.record("states", &states);
    let mix = State::mixture(&lambdas, &states)?;
    let weighted: f64 = lambdas
        .iter()
        .zip(&states)
        .map(|(w, r)| Ok(w * sa(&a, r)?))
        .sum::<Result<f64>>()?;
    t.ge("S_A(Σλρ) ≥ Σ λ S_A(ρ)", sa(&a, &mix)?, weighted);
    Ok(())
}

/// A random surjection from the labels of `a` onto `r` targets.
fn random_surjection(t: &mut Trial, a: &Observable, r: usize) -> CoarseGraining {
    let mut labels: Vec<String> = a.labels().map(str::to_string).collect();
    labels.shuffle(t.rng());
    let targets: Vec<String> = (0..r).map(|y| format!("y{y}")).collect();
    let pairs: Vec<(String, String)> = labels
        .into_iter()
        .enumerate()
        .map(|(i, x)| {
            let y = if i < r { i } else { t.rng().random_range(0..r) };
            (x, targets[y].clone())
        })
        .collect();
    CoarseGraining::new(targets, pairs)
}

pub(super) fn thm_3_4(t: &mut Trial) -> Result<()> {
    let d = t.dim;
    let k = t.rng().random_range(2..=6);
    let a = random_observable(d, k, t.rng())?;
    let r = t.rng().random_range(1..k);
    let f = random_surjection(t, &a, r);
    let rho = any_state(t)?;
    t.record("A", &a);
    t.record("f", &f.map);
    t.record("rho", &rho);
    let b = coarse_grain(&a, &f)?;
    t.ge("S_B(ρ) ≥ S_A(ρ)", sa(&b, &rho)?, sa(&a, &rho)?);
    Ok(())
}

/// Equality for all ρ when effects within each fiber are proportional; a
/// violated fiber condition (above 1e-3) makes the inequality strict.
pub(super) fn cor_3_5(t: &mut Trial) -> Result<()> {
    let d = t.dim;
    let r = t.rng().random_range(2..=4);
    let c = random_observable(d, r, t.rng())?;
    let mut pieces = Vec::new();
    let mut pairs = Vec::new();
    for o in c.outcomes() {
        let split = t.rng().random_range(1..=3);
        for (j, w) in random_simplex(split, t.rng()).into_iter().enumerate() {
            let label = format!("{}.{j}", o.label);
            pieces.push((label.clone(), o.effect.scale(w)?));
            pairs.push((label, o.label.clone()));
        }
    }
    let a = Observable::new(pieces)?;
    let targets: Vec<String> = c.labels().map(str::to_string).collect();
    let f = CoarseGraining::new(targets, pairs);
    let b = coarse_grain(&a, &f)?;
    t.record("A", &a);
    t.record("f", &f.map);
    for (x, y) in b.outcomes().iter().zip(c.outcomes()) {
        t.close("coarse-graining restores the original effect", x.effect.matrix(), y.effect.matrix(), ROUTE_TOL);
    }
    for i in 0..3 {
        let rho = any_state(t)?;
        t.record(&format!("rho{i}"), &rho);
        t.eq("S_B(ρ) = S_A(ρ) for proportional fibers", sa(&b, &rho)?, sa(&a, &rho)?);
    }

    // Converse on a generic observable with a two-element fiber.
    let generic = random_observable(d, 3, t.rng())?;
    let g = CoarseGraining::from_pairs([("0", "y"), ("1", "y"), ("2", "z")]);
    let coarse = coarse_grain(&generic, &g)?;
    let rho = any_state(t)?;
    t.record("generic", &generic);
    t.record("generic_rho", &rho);
    let e: Vec<&Effect> = generic.effects().take(2).collect();
    if proportionality_violation(&e, &rho)? > 1e-3 {
        t.gt_strict("S_B(ρ) > S_A(ρ) when a fiber is not proportional", sa(&coarse, &rho)?, sa(&generic, &rho)?);
    }
    Ok(())
}

pub(super) fn cor_3_6(t: &mut Trial) -> Result<()> {
    let (inst, a) = instrument_for(t, t.index)?;
    let b = observable(t)?;
    let rho = any_state(t)?;
    t.record("instrument", &inst);
    t.record("B", &b);
    t.record("rho", &rho);
    let prod = observable_sequential(&a, &inst, &b)?;
    t.le("S_(A∘B)(ρ) ≤ S_A(ρ)", sa(&prod.observable, &rho)?, sa(&a, &rho)?);
    // A is the coarse-graining (x, y) ↦ x of A∘B.
    for o in a.outcomes() {
        let mut sum = ComplexMatrix::zeros(t.dim);
        for y in b.labels() {
            if let Some(e) = prod.observable.get(&pair_label(&o.label, y)) {
                sum += e.matrix();
            }
        }
        t.close("Σ_y (A∘B)_(x,y) = A_x", &sum, o.effect.matrix(), ROUTE_TOL);
    }
    Ok(())
}

pub(super) fn cor_3_6_holevo_equality(t: &mut Trial) -> Result<()> {
    let (inst, a) = instrument_for(t, 2)?;
    let b = observable(t)?;
    let rho = any_state(t)?;
    t.record("instrument", &inst);
    t.record("B", &b);
    t.record("rho", &rho);
    let prod = observable_sequential(&a, &inst, &b)?;
    t.eq("S_(A∘B)(ρ) = S_A(ρ) for a Holevo instrument", sa(&prod.observable, &rho)?, sa(&a, &rho)?);
    // Within each x the ratios tr(ρ A_x∘B_y)/tr(A_x∘B_y) all equal tr(ρA_x)/tr(A_x).
    for o in prod.observable.outcomes() {
        let x = o.label[1..].split(',').next().expect("pair label");
        let ax = a.get(x).expect("product labels come from A");
        t.eq("ratio within a fiber is constant", p(&o.effect, &rho)? / o.effect.trace(), p(ax, &rho)? / ax.trace());
    }
    Ok(())
}

pub(super) fn cor_3_7(t: &mut Trial) -> Result<()> {
    let (i1, a1) = instrument_for(t, t.index)?;
    let (i2, a2) = instrument_for(t, t.index + 1)?;
    let a3 = observable(t)?;
    let rho = any_state(t)?;
    t.record("instrument1", &i1);
    t.record("instrument2", &i2);
    t.record("A3", &a3);
    t.record("rho", &rho);
    let tail = observable_sequential(&a2, &i2, &a3)?.observable;
    let three = observable_sequential(&a1, &i1, &tail)?.observable;
    let two = observable_sequential(&a1, &i1, &a2)?.observable;
    t.le("S_(A¹∘A²∘A³)(ρ) ≤ S_(A¹∘A²)(ρ)", sa(&three, &rho)?, sa(&two, &rho)?);
    Ok(())
}

pub(super) fn instrument_entropy_def(t: &mut Trial) -> Result<()> {
    let (inst, a) = instrument_for(t, t.index)?;
    let rho = any_state(t)?;
    t.record("instrument", &inst);
    t.record("rho", &rho);
    t.eq("S_ℐ(ρ) = S_A(ρ)", instrument_entropy(&inst, &rho)?.nats(), sa(&a, &rho)?);
    let id = ComplexMatrix::identity(t.dim);
    for o in inst.outcomes() {
        let ax = a.get(&o.label).expect("same labels");
        t.eq("tr A_x = tr ℐ_x(I)", ax.trace(), o.operation.apply(&id)?.trace().re);
    }
    Ok(())
}

/// The observable measured by composed instruments is the sequential product
/// of the measured observables, for two and three stages.
pub(super) fn instrument_composition(t: &mut Trial) -> Result<()> {
    let (i1, a1) = instrument_for(t, t.index)?;
    let (i2, a2) = instrument_for(t, t.index + 1)?;
    let rho = any_state(t)?;
    t.record("instrument1", &i1);
    t.record("instrument2", &i2);
    t.record("rho", &rho);

    let composed = compose_instruments(&i2, &i1)?;
    let product = observable_sequential(&a1, &i1, &a2)?;
    for o in composed.outcomes() {
        let gram = o.operation.map().gram();
        match product.observable.get(&o.label) {
            Some(e) => t.close("ℐ²∘ℐ¹ measures A¹∘A²", &gram, e.matrix(), ROUTE_TOL),
            None => t.require("dropped entries vanish", ROUTE_TOL - gram.max_abs()),
        }
    }
    t.eq("S_(ℐ²∘ℐ¹)(ρ) = S_(A¹∘A²)(ρ)", instrument_entropy(&composed, &rho)?.nats(), sa(&product.observable, &rho)?);

    if t.index % 2 == 0 {
        let (i3, a3) = instrument_for(t, t.index + 2)?;
        t.record("instrument3", &i3);
        let composed = compose_instruments(&i3, &composed)?;
        let nested = observable_sequential(&a1, &i1, &observable_sequential(&a2, &i2, &a3)?.observable)?;
        for x in a1.labels() {
            for y in a2.labels() {
                for z in a3.labels() {
                    let gram = composed
                        .get(&pair_label(&pair_label(x, y), z))
                        .expect("composition covers every triple")
                        .map()
                        .gram();
                    let expected = nested
                        .observable
                        .get(&pair_label(x, &pair_label(y, z)))
                        .map_or_else(|| ComplexMatrix::zeros(t.dim), |e| e.matrix().clone());
                    t.close("ℐ³∘ℐ²∘ℐ¹ measures A¹∘A²∘A³", &gram, &expected, ROUTE_TOL);
                }
            }
        }
    }
    Ok(())
}

pub(super) fn lem_3_8(t: &mut Trial) -> Result<()> {
    let d2 = 2 + t.index % 2;
    let a = observable(t)?;
    let r1 = any_state(t)?;
    let k = t.rng().random_range(2..=3);
    let b = random_observable(d2, k, t.rng())?;
    let rank = t.rng().random_range(1..=d2);
    let r2 = random_state(d2, rank, t.rng())?;
    t.record("A", &a);
    t.record("B", &b);
    t.record("rho1", &r1);
    t.record("rho2", &r2);
    let ab = tensor_observable(&a, &b);
    t.eq("S_(A⊗B)(ρ₁⊗ρ₂) = S_A(ρ₁) + S_B(ρ₂)", sa(&ab, &r1.tensor(&r2))?, sa(&a, &r1)? + sa(&b, &r2)?);
    Ok(())
}

pub(super) fn luders_seqprod_form(t: &mut Trial) -> Result<()> {
    let (a, b, rho) = (observable(t)?, observable(t)?, any_state(t)?);
    t.record("A", &a);
    t.record("B", &b);
    t.record("rho", &rho);
    let inst = luders_instrument(&a)?;
    let prod = observable_sequential(&a, &inst, &b)?;
    let mut direct_entropy = 0.0;
    for x in a.outcomes() {
        let root = x.effect.matrix().psd_sqrt()?;
        let conjugated = &(&root * rho.matrix()) * &root;
        for y in b.outcomes() {
            let direct = &(&root * y.effect.matrix()) * &root;
            let label = pair_label(&x.label, &y.label);
            match prod.observable.get(&label) {
                Some(e) => t.close("(A∘B)_(x,y) = A_x^{1/2} B_y A_x^{1/2}", e.matrix(), &direct, ROUTE_TOL),
                None => t.require("dropped entries vanish", ROUTE_TOL - direct.max_abs()),
            }
            let q = trace_product(&conjugated, y.effect.matrix()).re;
            let v = trace_product(x.effect.matrix(), y.effect.matrix()).re;
            direct_entropy += log_term(q, v);
        }
    }
    t.eq("S_(A∘B)(ρ) = −Σ tr(A_x^{1/2}ρA_x^{1/2}B_y) ln[⋯/tr(A_xB_y)]", sa(&prod.observable, &rho)?, direct_entropy);
    Ok(())
}
