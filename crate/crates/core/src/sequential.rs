//! Operations, duals and sequential products.
//!
//! If an operation `ℐ` measures `a` (that is `tr[ℐ(ρ)] = tr(ρa)` for all ρ),
//! the `ℐ`-sequential product is `a∘b = ℐ*(b)`. For observables and an
//! instrument measuring `A`, `(A∘B)_(x,y) = ℐ_x*(B_y)`.

use std::collections::{HashMap, HashSet};

use num_complex::Complex64;
use serde::Serialize;

use crate::entropy::real_trace_product;
use crate::error::{QmeError, Result};
use crate::linalg::ComplexMatrix;
use crate::objects::{Effect, Instrument, KrausMap, Observable, Operation, State};
use crate::tolerance::{EIG_ZERO_TOL, TOL_PSD, TOL_SUM};

/// Residual allowed when a constructed Kraus form is checked against its
/// defining action.
const SELF_TEST_TOL: f64 = 1e-10;

/// Label of the pair `(x, y)` in a product outcome space.
pub fn pair_label(x: &str, y: &str) -> String {
    format!("({x},{y})")
}

/// `Σ K m K†`.
pub fn apply_operation(op: &Operation, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    op.apply(m)
}

/// The dual map `B ↦ Σ K† B K`, characterized by `tr[ℐ(A)B] = tr[Aℐ*(B)]`.
///
/// The dual of an operation is unital-bounded rather than trace-nonincreasing,
/// so it is returned as a bare [`KrausMap`].
pub fn dual_operation(op: &Operation) -> KrausMap {
    op.map().dual()
}

/// The effect `ℐ*(I)` measured by `op`.
pub fn measured_effect(op: &Operation) -> Result<Effect> {
    Effect::new(op.map().gram()).map_err(|e| match e {
        QmeError::ZeroEffect(d) => QmeError::ZeroEffect(format!("operation measures the zero operator ({d})")),
        other => other,
    })
}

/// `ℒ^a(A) = a^{1/2} A a^{1/2}`.
pub fn luders_operation(a: &Effect) -> Result<Operation> {
    Operation::new(vec![a.matrix().psd_sqrt()?])
}

/// `ℋ^{(a,α)}(A) = tr(Aa) α`, realized with Kraus operators
/// `√μ_j |φ_j⟩⟨e_i| a^{1/2}` over the eigenpairs `(μ_j, φ_j)` of α.
///
/// The Kraus form is checked against the defining action on every matrix unit.
pub fn holevo_operation(a: &Effect, alpha: &State) -> Result<Operation> {
    let n = a.dim();
    if alpha.dim() != n {
        return Err(QmeError::Dimension(format!(
            "effect has dimension {n}, state α has {}",
            alpha.dim()
        )));
    }
    let root = a.matrix().psd_sqrt()?;
    let eig = alpha.matrix().hermitian_eig()?;
    let mut kraus = Vec::new();
    for (j, &mu) in eig.eigenvalues.iter().enumerate() {
        if mu <= EIG_ZERO_TOL {
            continue;
        }
        let phi = eig.eigenvectors.column(j);
        let weight = mu.sqrt();
        for i in 0..n {
            // (|φ⟩⟨e_i| a^{1/2})[r, c] = φ_r · (a^{1/2})[i, c]
            kraus.push(ComplexMatrix::from_fn(n, |r, c| phi[r] * root.get(i, c) * weight));
        }
    }
    let op = Operation::new(kraus)?;
    for r in 0..n {
        for c in 0..n {
            let unit = ComplexMatrix::from_fn(n, |i, j| {
                if i == r && j == c {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            // tr(E_rc a) = a[c, r]
            let expected = alpha.matrix().scale_complex(a.matrix().get(c, r));
            let residual = op.apply(&unit)?.max_abs_diff(&expected);
            if residual > SELF_TEST_TOL {
                return Err(QmeError::Numerical(format!(
                    "Holevo Kraus form deviates from tr(Aa)α by {residual:.3e}"
                )));
            }
        }
    }
    Ok(op)
}

/// `a∘b = ℐ*(b)` where `ℐ` measures `a`.
pub fn sequential_product_effect(op: &Operation, b: &Effect) -> Result<Effect> {
    measured_effect(op)?;
    if b.dim() != op.dim() {
        return Err(QmeError::Dimension(format!(
            "operation acts on dimension {}, effect has {}",
            op.dim(),
            b.dim()
        )));
    }
    let product = op.apply_dual(b.matrix())?;
    Effect::new(product.hermitian_part())
}

/// `a₁∘a₂∘⋯∘a_m` for Holevo operations `ℋ^{(a_k, α_k)}`, `k < m`, via the
/// closed form `tr(α_{m−1}a_m) ⋯ tr(α₁a₂) a₁`.
pub fn holevo_chain(effects: &[Effect], alphas: &[State]) -> Result<Effect> {
    let Some(first) = effects.first() else {
        return Err(QmeError::Config("a chain needs at least one effect".into()));
    };
    if alphas.len() + 1 != effects.len() {
        return Err(QmeError::Config(format!(
            "{} effects need {} states, got {}",
            effects.len(),
            effects.len() - 1,
            alphas.len()
        )));
    }
    let mut coefficient = 1.0;
    for (alpha, next) in alphas.iter().zip(&effects[1..]) {
        coefficient *= real_trace_product(alpha.matrix(), next.matrix())?;
    }
    if coefficient * first.matrix().max_abs() <= TOL_PSD {
        return Err(QmeError::ZeroEffect(format!("chain coefficient {coefficient:.3e} vanishes")));
    }
    Effect::new(first.matrix().scale(coefficient))
}

/// Lüders instrument `ℒ_x^A(B) = A_x^{1/2} B A_x^{1/2}`.
pub fn luders_instrument(obs: &Observable) -> Result<Instrument> {
    let ops = obs
        .outcomes()
        .iter()
        .map(|o| Ok((o.label.clone(), luders_operation(&o.effect)?)))
        .collect::<Result<Vec<_>>>()?;
    Instrument::new(ops)
}

/// Holevo instrument `ℋ_x(B) = tr(B A_x) α_x`, one state per outcome.
pub fn holevo_instrument(obs: &Observable, alphas: &[State]) -> Result<Instrument> {
    if alphas.len() != obs.len() {
        return Err(QmeError::Config(format!(
            "Holevo instrument needs {} states, got {}",
            obs.len(),
            alphas.len()
        )));
    }
    let ops = obs
        .outcomes()
        .iter()
        .zip(alphas)
        .map(|(o, alpha)| Ok((o.label.clone(), holevo_operation(&o.effect, alpha)?)))
        .collect::<Result<Vec<_>>>()?;
    Instrument::new(ops)
}

/// The observable `A_x = ℐ_x*(I)` measured by an instrument.
pub fn measured_observable(inst: &Instrument) -> Result<Observable> {
    let outcomes = inst
        .outcomes()
        .iter()
        .map(|o| Ok((o.label.clone(), measured_effect(&o.operation)?)))
        .collect::<Result<Vec<_>>>()?;
    Observable::new(outcomes)
}

/// Checks that `inst` measures `obs`: same labels and `ℐ_x*(I) = A_x` within 1e-8.
pub fn check_measures(inst: &Instrument, obs: &Observable) -> Result<()> {
    if inst.dim() != obs.dim() {
        return Err(QmeError::InstrumentMismatch(format!(
            "instrument dimension {} vs observable dimension {}",
            inst.dim(),
            obs.dim()
        )));
    }
    if inst.len() != obs.len() {
        return Err(QmeError::InstrumentMismatch(format!(
            "instrument has {} outcomes, observable has {}",
            inst.len(),
            obs.len()
        )));
    }
    for o in obs.outcomes() {
        let op = inst
            .get(&o.label)
            .ok_or_else(|| QmeError::InstrumentMismatch(format!("instrument has no outcome `{}`", o.label)))?;
        let deviation = op.map().gram().max_abs_diff(o.effect.matrix());
        if deviation > TOL_SUM {
            return Err(QmeError::InstrumentMismatch(format!(
                "ℐ_x*(I) differs from A_x at `{}` by {deviation:.3e}",
                o.label
            )));
        }
    }
    Ok(())
}

/// `A∘B` together with the product labels whose operator vanished.
#[derive(Debug, Clone)]
pub struct SequentialProduct {
    pub observable: Observable,
    pub dropped: Vec<String>,
}

/// `(A∘B)_(x,y) = ℐ_x*(B_y)` on `Ω_A × Ω_B`.
///
/// Entries whose operator is zero to within the effect threshold are dropped
/// and listed in [`SequentialProduct::dropped`]; they carry no probability.
pub fn observable_sequential(a: &Observable, inst: &Instrument, b: &Observable) -> Result<SequentialProduct> {
    check_measures(inst, a)?;
    if b.dim() != a.dim() {
        return Err(QmeError::Dimension(format!(
            "observables act on dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let mut outcomes = Vec::with_capacity(a.len() * b.len());
    let mut dropped = Vec::new();
    for x in a.outcomes() {
        let dual = inst.get(&x.label).expect("labels checked").map().dual();
        for y in b.outcomes() {
            let label = pair_label(&x.label, &y.label);
            let m = dual.apply(y.effect.matrix())?.hermitian_part();
            if m.max_abs() <= TOL_PSD {
                dropped.push(label);
            } else {
                outcomes.push((label, Effect::new(m)?));
            }
        }
    }
    Ok(SequentialProduct {
        observable: Observable::new(outcomes)?,
        dropped,
    })
}

/// Sequential composition: outcome `(x, y)` acts as `j_y ∘ i_x` (first `i`, then `j`).
pub fn compose_instruments(j: &Instrument, i: &Instrument) -> Result<Instrument> {
    if i.dim() != j.dim() {
        return Err(QmeError::Dimension(format!(
            "instruments act on dimensions {} and {}",
            i.dim(),
            j.dim()
        )));
    }
    let mut ops = Vec::with_capacity(i.len() * j.len());
    for x in i.outcomes() {
        for y in j.outcomes() {
            let map = y.operation.map().after(x.operation.map())?;
            ops.push((pair_label(&x.label, &y.label), Operation::from_map(map)?));
        }
    }
    Instrument::new(ops)
}

/// A surjection `f: Ω_A → Ω_B`, given by its codomain and its graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoarseGraining {
    pub targets: Vec<String>,
    pub map: HashMap<String, String>,
}

impl CoarseGraining {
    pub fn new(targets: Vec<String>, pairs: impl IntoIterator<Item = (String, String)>) -> Self {
        CoarseGraining {
            targets,
            map: pairs.into_iter().collect(),
        }
    }

    /// The codomain is the image of `pairs`, in first-appearance order.
    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, S)>) -> Self {
        let mut targets = Vec::new();
        let mut map = HashMap::new();
        for (from, to) in pairs {
            let to = to.into();
            if !targets.contains(&to) {
                targets.push(to.clone());
            }
            map.insert(from.into(), to);
        }
        CoarseGraining { targets, map }
    }
}

/// `B_y = Σ { A_x : f(x) = y }`.
pub fn coarse_grain(obs: &Observable, f: &CoarseGraining) -> Result<Observable> {
    let known: HashSet<&str> = obs.labels().collect();
    if let Some(extra) = f.map.keys().find(|k| !known.contains(k.as_str())) {
        return Err(QmeError::Label(format!("assignment mentions unknown outcome `{extra}`")));
    }
    let mut sums: Vec<Option<ComplexMatrix>> = vec![None; f.targets.len()];
    for o in obs.outcomes() {
        let target = f
            .map
            .get(&o.label)
            .ok_or_else(|| QmeError::Label(format!("assignment does not cover outcome `{}`", o.label)))?;
        let slot = f
            .targets
            .iter()
            .position(|t| t == target)
            .ok_or_else(|| QmeError::Label(format!("`{target}` is not in the target outcome space")))?;
        match &mut sums[slot] {
            Some(acc) => *acc += o.effect.matrix(),
            empty => *empty = Some(o.effect.matrix().clone()),
        }
    }
    let outcomes = f
        .targets
        .iter()
        .zip(sums)
        .map(|(label, sum)| {
            let m = sum.ok_or_else(|| QmeError::NotSurjective(format!("no outcome maps to `{label}`")))?;
            Ok((label.clone(), Effect::new(m)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Observable::new(outcomes)
}

/// Outcome probabilities `Φ_ρ^A({x}) = tr(ρA_x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    pub weights: Vec<(String, f64)>,
}

impl Distribution {
    pub fn total(&self) -> f64 {
        self.weights.iter().map(|(_, p)| p).sum()
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.weights.iter().find(|(l, _)| l == label).map(|(_, p)| *p)
    }
}

pub fn distribution(obs: &Observable, rho: &State) -> Result<Distribution> {
    let weights = obs
        .outcomes()
        .iter()
        .map(|o| Ok((o.label.clone(), real_trace_product(o.effect.matrix(), rho.matrix())?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Distribution { weights })
}

/// `Φ_ρ^A(Δ) = Σ_{x∈Δ} tr(ρA_x)`.
pub fn distribution_of_subset<S: AsRef<str>>(obs: &Observable, rho: &State, subset: &[S]) -> Result<f64> {
    let dist = distribution(obs, rho)?;
    let mut seen = HashSet::new();
    let mut total = 0.0;
    for label in subset {
        let label = label.as_ref();
        let p = dist
            .get(label)
            .ok_or_else(|| QmeError::Label(format!("`{label}` is not an outcome")))?;
        if seen.insert(label) {
            total += p;
        }
    }
    Ok(total)
}

/// `(A⊗B)_(x,y) = A_x ⊗ B_y` on `H ⊗ K`.
pub fn tensor_observable(a: &Observable, b: &Observable) -> Observable {
    let outcomes = a
        .outcomes()
        .iter()
        .flat_map(|x| {
            b.outcomes()
                .iter()
                .map(move |y| (pair_label(&x.label, &y.label), x.effect.tensor(&y.effect)))
        })
        .collect();
    Observable::new(outcomes).expect("tensor product of observables is an observable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{random_effect, random_instrument, random_observable, random_state, RngSeed};
    use crate::entropy::{effect_entropy, observable_entropy};

    fn diag_effect(values: &[f64]) -> Effect {
        Effect::new(ComplexMatrix::diag(values)).unwrap()
    }

    #[test]
    fn identity_channel_is_identity() {
        let m = crate::ensembles::ginibre_square(3, &mut RngSeed(1).rng());
        assert_eq!(apply_operation(&Operation::identity(3), &m).unwrap(), m);
        assert_eq!(measured_effect(&Operation::identity(3)).unwrap(), Effect::identity(3));
    }

    #[test]
    fn luders_examples() {
        let p = diag_effect(&[1.0, 0.0]);
        let op = luders_operation(&p).unwrap();
        assert!(op.kraus()[0].max_abs_diff(p.matrix()) < 1e-15);
        let id = luders_operation(&Effect::identity(2)).unwrap();
        assert!(id.kraus()[0].max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        let b = diag_effect(&[0.5, 0.5]);
        let ab = sequential_product_effect(&op, &b).unwrap();
        assert!(ab.matrix().max_abs_diff(&ComplexMatrix::diag(&[0.5, 0.0])) < 1e-15);
    }

    #[test]
    fn luders_is_self_dual_and_measures_its_effect() {
        let mut rng = RngSeed(2).rng();
        let a = random_effect(3, &mut rng).unwrap();
        let op = luders_operation(&a).unwrap();
        let m = crate::ensembles::ginibre_square(3, &mut rng);
        let forward = op.apply(&m).unwrap();
        let backward = dual_operation(&op).apply(&m).unwrap();
        assert!(forward.max_abs_diff(&backward) <= 1e-12);
        assert!(measured_effect(&op).unwrap().matrix().max_abs_diff(a.matrix()) <= 1e-10);
    }

    #[test]
    fn holevo_examples() {
        let mut rng = RngSeed(3).rng();
        let a = random_effect(3, &mut rng).unwrap();
        let alpha = random_state(3, 2, &mut rng).unwrap();
        let rho = random_state(3, 3, &mut rng).unwrap();
        let op = holevo_operation(&a, &alpha).unwrap();
        let p = real_trace_product(rho.matrix(), a.matrix()).unwrap();
        assert!(op.apply(rho.matrix()).unwrap().max_abs_diff(&alpha.matrix().scale(p)) <= 1e-10);
        let b = random_effect(3, &mut rng).unwrap();
        let q = real_trace_product(alpha.matrix(), b.matrix()).unwrap();
        assert!(op.apply_dual(b.matrix()).unwrap().max_abs_diff(&a.matrix().scale(q)) <= 1e-10);
        assert!(measured_effect(&op).unwrap().matrix().max_abs_diff(a.matrix()) <= 1e-10);
        let ab = sequential_product_effect(&op, &b).unwrap();
        assert!(ab.matrix().max_abs_diff(&a.matrix().scale(q)) <= 1e-10);
        let ai = sequential_product_effect(&op, &Effect::identity(3)).unwrap();
        assert!(ai.matrix().max_abs_diff(a.matrix()) <= 1e-10);
    }

    #[test]
    fn holevo_with_unit_effect_and_pure_alpha_prepares_alpha() {
        let mut rng = RngSeed(4).rng();
        let alpha = random_state(2, 1, &mut rng).unwrap();
        let op = holevo_operation(&Effect::identity(2), &alpha).unwrap();
        for _ in 0..5 {
            let rho = random_state(2, 2, &mut rng).unwrap();
            assert!(op.apply(rho.matrix()).unwrap().max_abs_diff(alpha.matrix()) <= 1e-12);
        }
    }

    #[test]
    fn chain_small_cases() {
        let mut rng = RngSeed(5).rng();
        let a1 = random_effect(2, &mut rng).unwrap();
        let a2 = random_effect(2, &mut rng).unwrap();
        let alpha = random_state(2, 2, &mut rng).unwrap();
        assert_eq!(holevo_chain(std::slice::from_ref(&a1), &[]).unwrap(), a1);
        let two = holevo_chain(&[a1.clone(), a2.clone()], std::slice::from_ref(&alpha)).unwrap();
        let c = real_trace_product(alpha.matrix(), a2.matrix()).unwrap();
        assert!(two.matrix().max_abs_diff(&a1.matrix().scale(c)) <= 1e-12);
        assert!(holevo_chain(&[a1, a2], &[]).is_err());
    }

    #[test]
    fn chain_vanishing_coefficient() {
        let a1 = diag_effect(&[0.5, 0.5]);
        let a2 = diag_effect(&[1.0, 0.0]);
        let alpha = State::new(ComplexMatrix::diag(&[0.0, 1.0])).unwrap();
        assert!(matches!(holevo_chain(&[a1, a2], &[alpha]), Err(QmeError::ZeroEffect(_))));
    }

    #[test]
    fn product_with_unit_observable_recovers_a() {
        let mut rng = RngSeed(6).rng();
        let a = random_observable(3, 3, &mut rng).unwrap();
        let inst = luders_instrument(&a).unwrap();
        let prod = observable_sequential(&a, &inst, &Observable::unit(3, "I")).unwrap();
        assert!(prod.dropped.is_empty());
        for o in a.outcomes() {
            let e = prod.observable.get(&pair_label(&o.label, "I")).unwrap();
            assert!(e.matrix().max_abs_diff(o.effect.matrix()) <= 1e-10);
        }
    }

    #[test]
    fn mismatched_instrument_is_rejected() {
        let mut rng = RngSeed(7).rng();
        let a = random_observable(2, 2, &mut rng).unwrap();
        let inst = random_instrument(2, 2, 1, &mut rng).unwrap();
        let b = random_observable(2, 2, &mut rng).unwrap();
        assert!(matches!(observable_sequential(&a, &inst, &b), Err(QmeError::InstrumentMismatch(_))));
    }

    #[test]
    fn zero_entries_are_dropped() {
        let a = Observable::new(vec![("0".into(), diag_effect(&[1.0, 0.0])), ("1".into(), diag_effect(&[0.0, 1.0]))])
            .unwrap();
        let inst = luders_instrument(&a).unwrap();
        let prod = observable_sequential(&a, &inst, &a).unwrap();
        assert_eq!(prod.observable.len(), 2);
        assert_eq!(prod.dropped, vec!["(0,1)".to_string(), "(1,0)".to_string()]);
    }

    #[test]
    fn holevo_product_keeps_entropy() {
        let mut rng = RngSeed(8).rng();
        let a = random_observable(3, 2, &mut rng).unwrap();
        let alphas = vec![random_state(3, 1, &mut rng).unwrap(), random_state(3, 3, &mut rng).unwrap()];
        let inst = holevo_instrument(&a, &alphas).unwrap();
        let b = random_observable(3, 3, &mut rng).unwrap();
        let rho = random_state(3, 3, &mut rng).unwrap();
        let prod = observable_sequential(&a, &inst, &b).unwrap();
        let lhs = observable_entropy(&prod.observable, &rho).unwrap().nats();
        let rhs = observable_entropy(&a, &rho).unwrap().nats();
        assert!((lhs - rhs).abs() <= 1e-9);
    }

    #[test]
    fn coarse_grain_examples() {
        let mut rng = RngSeed(9).rng();
        let a = random_observable(3, 4, &mut rng).unwrap();
        let identity = CoarseGraining::from_pairs(a.labels().map(|l| (l.to_string(), l.to_string())));
        let same = coarse_grain(&a, &identity).unwrap();
        for (x, y) in a.outcomes().iter().zip(same.outcomes()) {
            assert_eq!(x, y);
        }
        let all = CoarseGraining::from_pairs(a.labels().map(|l| (l.to_string(), "*".to_string())));
        let unit = coarse_grain(&a, &all).unwrap();
        assert_eq!(unit.len(), 1);
        assert!(unit.outcomes()[0].effect.matrix().max_abs_diff(&ComplexMatrix::identity(3)) <= 1e-8);

        let mut pairs: Vec<(String, String)> = a.labels().map(|l| (l.to_string(), "y".to_string())).collect();
        let empty_fiber = CoarseGraining::new(vec!["y".into(), "z".into()], pairs.clone());
        assert!(matches!(coarse_grain(&a, &empty_fiber), Err(QmeError::NotSurjective(_))));
        pairs.pop();
        let partial = CoarseGraining::new(vec!["y".into()], pairs);
        assert!(matches!(coarse_grain(&a, &partial), Err(QmeError::Label(_))));
    }

    #[test]
    fn distribution_examples() {
        let rho = State::new(ComplexMatrix::diag(&[0.75, 0.25])).unwrap();
        let a = Observable::new(vec![("0".into(), diag_effect(&[1.0, 0.0])), ("1".into(), diag_effect(&[0.0, 1.0]))])
            .unwrap();
        assert!((distribution_of_subset(&a, &rho, &["0", "1"]).unwrap() - 1.0).abs() <= 1e-10);
        assert_eq!(distribution_of_subset::<&str>(&a, &rho, &[]).unwrap(), 0.0);
        assert!((distribution_of_subset(&a, &rho, &["0"]).unwrap() - 0.75).abs() <= 1e-15);
        assert!(matches!(distribution_of_subset(&a, &rho, &["2"]), Err(QmeError::Label(_))));
    }

    #[test]
    fn tensor_examples() {
        let mut rng = RngSeed(10).rng();
        let a = random_observable(2, 2, &mut rng).unwrap();
        let b = random_observable(3, 3, &mut rng).unwrap();
        let (r1, r2) = (random_state(2, 2, &mut rng).unwrap(), random_state(3, 2, &mut rng).unwrap());
        let ab = tensor_observable(&a, &b);
        assert_eq!(ab.len(), 6);
        let lhs = observable_entropy(&ab, &r1.tensor(&r2)).unwrap().nats();
        let rhs = observable_entropy(&a, &r1).unwrap().nats() + observable_entropy(&b, &r2).unwrap().nats();
        assert!((lhs - rhs).abs() <= 1e-9);
        let embedded = tensor_observable(&a, &Observable::unit(3, "I"));
        for o in a.outcomes() {
            let e = embedded.get(&pair_label(&o.label, "I")).unwrap();
            assert!(e.matrix().max_abs_diff(&o.effect.matrix().kron(&ComplexMatrix::identity(3))) == 0.0);
        }
    }

    #[test]
    fn compose_with_identity_instrument() {
        let mut rng = RngSeed(11).rng();
        let inst = random_instrument(3, 2, 2, &mut rng).unwrap();
        let id = Instrument::new(vec![("id".into(), Operation::identity(3))]).unwrap();
        let composed = compose_instruments(&id, &inst).unwrap();
        let rho = random_state(3, 3, &mut rng).unwrap();
        for o in inst.outcomes() {
            let c = composed.get(&pair_label(&o.label, "id")).unwrap();
            let lhs = c.apply(rho.matrix()).unwrap();
            assert!(lhs.max_abs_diff(&o.operation.apply(rho.matrix()).unwrap()) <= 1e-12);
        }
    }

    #[test]
    fn sequential_product_never_increases_entropy() {
        let mut rng = RngSeed(12).rng();
        for _ in 0..20 {
            let inst = random_instrument(3, 2, 2, &mut rng).unwrap();
            let op = &inst.outcomes()[0].operation;
            let a = measured_effect(op).unwrap();
            let b = random_effect(3, &mut rng).unwrap();
            let rho = random_state(3, 2, &mut rng).unwrap();
            let ab = sequential_product_effect(op, &b).unwrap();
            assert!(effect_entropy(&ab, &rho).unwrap().nats() <= effect_entropy(&a, &rho).unwrap().nats() + 1e-9);
        }
    }
}
