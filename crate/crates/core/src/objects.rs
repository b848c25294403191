//! Validated states, effects, observables, operations, instruments and
//! measurement models.
//!
//! Every constructor validates and rejects; nothing is silently normalized.
//! Raw operators that fail a check stay representable as [`ComplexMatrix`].

use std::collections::HashSet;

use crate::error::{QmeError, Result};
use crate::linalg::ComplexMatrix;
use crate::tolerance::Tolerances;

/// A density operator: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    rho: ComplexMatrix,
}

impl State {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(m, &Tolerances::default())
    }

    pub fn with_tolerances(m: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        check_hermitian(&m, tol, "state is Hermitian")?;
        let eig = m.hermitian_eig_with(tol.hermitian)?;
        let min = eig.min_eigenvalue();
        if min < -tol.psd {
            return Err(QmeError::invariant(
                "state is positive semidefinite",
                format!("negative eigenvalue {min:.3e} (tolerance {:.1e})", tol.psd),
            ));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(QmeError::invariant(
                "state has unit trace",
                format!("trace = {:.12}{:+.3e}i (tolerance {:.1e})", tr.re, tr.im, tol.trace),
            ));
        }
        Ok(State { rho: m })
    }

    /// `I/n`.
    pub fn maximally_mixed(dim: usize) -> Self {
        State {
            rho: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    /// `ρ₁ ⊗ ρ₂`.
    pub fn tensor(&self, other: &State) -> State {
        State {
            rho: self.rho.kron(&other.rho),
        }
    }

    /// `Σ wᵢ ρᵢ` for nonnegative weights summing to one.
    pub fn mixture(weights: &[f64], states: &[State]) -> Result<State> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(QmeError::Dimension("mixture needs one weight per state".into()));
        }
        let mut acc = ComplexMatrix::zeros(states[0].dim());
        for (w, s) in weights.iter().zip(states) {
            if s.dim() != acc.dim() {
                return Err(QmeError::Dimension("mixture of states with different dimensions".into()));
            }
            acc += &s.rho.scale(*w);
        }
        State::new(acc)
    }
}

pub fn validate_state(m: ComplexMatrix) -> Result<State> {
    State::new(m)
}

/// A nonzero operator with `0 ≤ a ≤ I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect {
    a: ComplexMatrix,
}

impl Effect {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(m, &Tolerances::default())
    }

    pub fn with_tolerances(m: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        check_hermitian(&m, tol, "effect is Hermitian")?;
        if m.max_abs() <= tol.psd {
            return Err(QmeError::ZeroEffect(format!(
                "max |a_ij| = {:.3e} is within {:.1e} of zero",
                m.max_abs(),
                tol.psd
            )));
        }
        let eig = m.hermitian_eig_with(tol.hermitian)?;
        let (min, max) = (eig.min_eigenvalue(), eig.max_eigenvalue());
        if min < -tol.psd || max > 1.0 + tol.psd {
            return Err(QmeError::invariant(
                "0 ≤ a ≤ I",
                format!("spectrum [{min:.6e}, {max:.6e}] leaves [0, 1] by more than {:.1e}", tol.psd),
            ));
        }
        Ok(Effect { a: m })
    }

    pub fn identity(dim: usize) -> Self {
        Effect {
            a: ComplexMatrix::identity(dim),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.a
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// `tr(a)`, real part.
    pub fn trace(&self) -> f64 {
        self.a.trace().re
    }

    /// `a′ = I − a`.
    pub fn complement(&self) -> Result<Effect> {
        let c = &ComplexMatrix::identity(self.dim()) - &self.a;
        if c.max_abs() <= Tolerances::default().psd {
            return Err(QmeError::ZeroEffect("the complement of I is zero".into()));
        }
        Effect::new(c)
    }

    /// `λa` for `0 < λ ≤ 1`.
    pub fn scale(&self, lambda: f64) -> Result<Effect> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(QmeError::invariant("0 < λ ≤ 1", format!("λ = {lambda}")));
        }
        Effect::new(self.a.scale(lambda))
    }

    /// `a + b`, defined when `a ⊥ b`.
    pub fn orthosum(&self, other: &Effect) -> Result<Effect> {
        if self.dim() != other.dim() {
            return Err(QmeError::Dimension("orthosum of effects with different dimensions".into()));
        }
        Effect::new(&self.a + &other.a)
    }

    /// `a₁ ⊗ a₂`.
    pub fn tensor(&self, other: &Effect) -> Effect {
        Effect {
            a: self.a.kron(&other.a),
        }
    }
}

pub fn validate_effect(m: ComplexMatrix) -> Result<Effect> {
    Effect::new(m)
}

/// `I − a`; fails when `a = I`.
pub fn complement(a: &Effect) -> Result<Effect> {
    a.complement()
}

/// A labelled outcome of an [`Observable`].
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub label: String,
    pub effect: Effect,
}

/// A finite POVM: nonzero effects with distinct labels summing to `I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    outcomes: Vec<Outcome>,
}

impl Observable {
    pub fn new(outcomes: Vec<(String, Effect)>) -> Result<Self> {
        Self::with_tolerances(outcomes, &Tolerances::default())
    }

    pub fn with_tolerances(outcomes: Vec<(String, Effect)>, tol: &Tolerances) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(QmeError::invariant("observable is nonempty", "no outcomes"));
        }
        check_labels(outcomes.iter().map(|(l, _)| l.as_str()))?;
        let dim = outcomes[0].1.dim();
        let mut total = ComplexMatrix::zeros(dim);
        for (label, e) in &outcomes {
            if e.dim() != dim {
                return Err(QmeError::Dimension(format!(
                    "outcome `{label}` has dimension {}, expected {dim}",
                    e.dim()
                )));
            }
            total += e.matrix();
        }
        let deviation = total.max_abs_diff(&ComplexMatrix::identity(dim));
        if deviation > tol.completeness {
            return Err(QmeError::invariant(
                "Σ A_x = I",
                format!("max |Σ A_x − I| = {deviation:.3e} (tolerance {:.1e})", tol.completeness),
            ));
        }
        Ok(Observable {
            outcomes: outcomes
                .into_iter()
                .map(|(label, effect)| Outcome { label, effect })
                .collect(),
        })
    }

    /// `A_x = λ_x I`.
    pub fn trivial(dim: usize, weights: &[(String, f64)]) -> Result<Self> {
        let outcomes = weights
            .iter()
            .map(|(l, w)| Ok((l.clone(), Effect::new(ComplexMatrix::identity(dim).scale(*w))?)))
            .collect::<Result<Vec<_>>>()?;
        Observable::new(outcomes)
    }

    /// The single-outcome observable `{I}`.
    pub fn unit(dim: usize, label: &str) -> Self {
        Observable {
            outcomes: vec![Outcome {
                label: label.to_string(),
                effect: Effect::identity(dim),
            }],
        }
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].effect.dim()
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.outcomes.iter().map(|o| o.label.as_str())
    }

    pub fn effects(&self) -> impl Iterator<Item = &Effect> {
        self.outcomes.iter().map(|o| &o.effect)
    }

    pub fn get(&self, label: &str) -> Option<&Effect> {
        self.outcomes.iter().find(|o| o.label == label).map(|o| &o.effect)
    }
}

pub fn validate_observable(outcomes: Vec<(String, ComplexMatrix)>) -> Result<Observable> {
    let effects = outcomes
        .into_iter()
        .map(|(label, m)| {
            Effect::new(m)
                .map(|e| (label.clone(), e))
                .map_err(|e| QmeError::invariant(format!("outcome `{label}` is an effect"), e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    Observable::new(effects)
}

/// A completely positive map in Kraus form, `X ↦ Σ K X K†`, with no trace
/// condition attached. Duals of operations live here.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausMap {
    kraus: Vec<ComplexMatrix>,
}

impl KrausMap {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return Err(QmeError::invariant("Kraus list is nonempty", "no Kraus operators"));
        };
        let dim = first.dim();
        if let Some(k) = kraus.iter().position(|k| k.dim() != dim) {
            return Err(QmeError::Dimension(format!(
                "Kraus operator {k} has dimension {}, expected {dim}",
                kraus[k].dim()
            )));
        }
        Ok(KrausMap { kraus })
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].dim()
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `Σ K X K†`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.dim() != self.dim() {
            return Err(QmeError::Dimension(format!(
                "map acts on dimension {}, input has {}",
                self.dim(),
                x.dim()
            )));
        }
        let mut acc = ComplexMatrix::zeros(x.dim());
        for k in &self.kraus {
            acc += &(&(k * x) * &k.adjoint());
        }
        Ok(acc)
    }

    /// Kraus list replaced by adjoints: `X ↦ Σ K† X K`.
    pub fn dual(&self) -> KrausMap {
        KrausMap {
            kraus: self.kraus.iter().map(ComplexMatrix::adjoint).collect(),
        }
    }

    /// `Σ K† K`.
    pub fn gram(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim());
        for k in &self.kraus {
            acc += &(&k.adjoint() * k);
        }
        acc
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &KrausMap) -> Result<KrausMap> {
        if self.dim() != first.dim() {
            return Err(QmeError::Dimension("composition of maps with different dimensions".into()));
        }
        let kraus = self
            .kraus
            .iter()
            .flat_map(|outer| first.kraus.iter().map(move |inner| outer * inner))
            .collect();
        Ok(KrausMap { kraus })
    }
}

/// A trace-nonincreasing completely positive map.
#[derive(Debug, Clone, PartialEq)]
pub struct Operation {
    map: KrausMap,
}

impl Operation {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        Self::from_map(KrausMap::new(kraus)?)
    }

    pub fn from_map(map: KrausMap) -> Result<Self> {
        Self::from_map_with(map, &Tolerances::default())
    }

    pub fn from_map_with(map: KrausMap, tol: &Tolerances) -> Result<Self> {
        let slack = &ComplexMatrix::identity(map.dim()) - &map.gram();
        let min = slack.hermitian_eig_with(tol.hermitian)?.min_eigenvalue();
        if min < -tol.completeness {
            return Err(QmeError::invariant(
                "Σ K†K ≤ I",
                format!("I − Σ K†K has eigenvalue {min:.3e} (tolerance {:.1e})", tol.completeness),
            ));
        }
        Ok(Operation { map })
    }

    pub fn identity(dim: usize) -> Self {
        Operation {
            map: KrausMap {
                kraus: vec![ComplexMatrix::identity(dim)],
            },
        }
    }

    pub fn map(&self) -> &KrausMap {
        &self.map
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        self.map.kraus()
    }

    pub fn dim(&self) -> usize {
        self.map.dim()
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.map.apply(x)
    }

    pub fn apply_dual(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.map.dual().apply(x)
    }

    /// True when `Σ K†K = I` within `tol`.
    pub fn is_channel(&self, tol: f64) -> bool {
        self.map.gram().max_abs_diff(&ComplexMatrix::identity(self.dim())) <= tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstrumentOutcome {
    pub label: String,
    pub operation: Operation,
}

/// Labelled operations whose sum is a channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    outcomes: Vec<InstrumentOutcome>,
}

impl Instrument {
    pub fn new(outcomes: Vec<(String, Operation)>) -> Result<Self> {
        Self::with_tolerances(outcomes, &Tolerances::default())
    }

    pub fn with_tolerances(outcomes: Vec<(String, Operation)>, tol: &Tolerances) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(QmeError::invariant("instrument is nonempty", "no outcomes"));
        }
        check_labels(outcomes.iter().map(|(l, _)| l.as_str()))?;
        let dim = outcomes[0].1.dim();
        let mut total = ComplexMatrix::zeros(dim);
        for (label, op) in &outcomes {
            if op.dim() != dim {
                return Err(QmeError::Dimension(format!(
                    "operation `{label}` has dimension {}, expected {dim}",
                    op.dim()
                )));
            }
            total += &op.map().gram();
        }
        let deviation = total.max_abs_diff(&ComplexMatrix::identity(dim));
        if deviation > tol.completeness {
            return Err(QmeError::invariant(
                "Σ_x Σ_i K†K = I",
                format!("max deviation {deviation:.3e} (tolerance {:.1e})", tol.completeness),
            ));
        }
        Ok(Instrument {
            outcomes: outcomes
                .into_iter()
                .map(|(label, operation)| InstrumentOutcome { label, operation })
                .collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].operation.dim()
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[InstrumentOutcome] {
        &self.outcomes
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.outcomes.iter().map(|o| o.label.as_str())
    }

    pub fn get(&self, label: &str) -> Option<&Operation> {
        self.outcomes.iter().find(|o| o.label == label).map(|o| &o.operation)
    }
}

pub fn validate_instrument(outcomes: Vec<(String, Vec<ComplexMatrix>)>) -> Result<Instrument> {
    let ops = outcomes
        .into_iter()
        .map(|(label, kraus)| Operation::new(kraus).map(|op| (label, op)))
        .collect::<Result<Vec<_>>>()?;
    Instrument::new(ops)
}

/// System space `H`, probe space `K`, interaction channel `ν` on `H ⊗ K`,
/// probe state `σ` and probe observable `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementModel {
    dim_h: usize,
    dim_k: usize,
    nu: Operation,
    sigma: State,
    probe: Observable,
}

impl MeasurementModel {
    pub fn new(dim_h: usize, dim_k: usize, nu: Operation, sigma: State, probe: Observable) -> Result<Self> {
        let tol = Tolerances::default();
        if dim_h == 0 || dim_k == 0 {
            return Err(QmeError::invariant("dimH, dimK ≥ 1", format!("dimH = {dim_h}, dimK = {dim_k}")));
        }
        if nu.dim() != dim_h * dim_k {
            return Err(QmeError::invariant(
                "nu acts on H ⊗ K",
                format!("nu has dimension {}, expected dimH·dimK = {}", nu.dim(), dim_h * dim_k),
            ));
        }
        if !nu.is_channel(tol.completeness) {
            return Err(QmeError::invariant("nu is trace-preserving", "Σ K†K ≠ I"));
        }
        if sigma.dim() != dim_k {
            return Err(QmeError::invariant(
                "sigma acts on K",
                format!("sigma has dimension {}, expected dimK = {dim_k}", sigma.dim()),
            ));
        }
        if probe.dim() != dim_k {
            return Err(QmeError::invariant(
                "probe acts on K",
                format!("probe has dimension {}, expected dimK = {dim_k}", probe.dim()),
            ));
        }
        Ok(MeasurementModel {
            dim_h,
            dim_k,
            nu,
            sigma,
            probe,
        })
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn dim_k(&self) -> usize {
        self.dim_k
    }

    pub fn nu(&self) -> &Operation {
        &self.nu
    }

    pub fn sigma(&self) -> &State {
        &self.sigma
    }

    pub fn probe(&self) -> &Observable {
        &self.probe
    }
}

fn check_hermitian(m: &ComplexMatrix, tol: &Tolerances, invariant: &str) -> Result<()> {
    let deviation = m.hermitian_deviation();
    if deviation > tol.hermitian {
        return Err(QmeError::invariant(
            invariant,
            format!("max |m − m†| = {deviation:.3e} (tolerance {:.1e})", tol.hermitian),
        ));
    }
    Ok(())
}

fn check_labels<'a>(labels: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut seen = HashSet::new();
    for label in labels {
        if label.is_empty() {
            return Err(QmeError::Label("outcome labels must be nonempty".into()));
        }
        if !seen.insert(label) {
            return Err(QmeError::Label(format!("duplicate outcome label `{label}`")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn states() {
        assert!(validate_state(ComplexMatrix::identity(2).scale(0.5)).is_ok());
        assert!(validate_state(ComplexMatrix::diag(&[0.75, 0.25])).is_ok());
        let err = validate_state(ComplexMatrix::diag(&[1.5, -0.5])).unwrap_err();
        assert!(matches!(&err, QmeError::InvariantViolation { invariant, .. } if invariant.contains("positive")));
        let err = validate_state(ComplexMatrix::diag(&[0.5, 0.25])).unwrap_err();
        assert!(matches!(&err, QmeError::InvariantViolation { invariant, .. } if invariant.contains("trace")));
        let skew = ComplexMatrix::from_real_rows(&[&[0.5, 0.1], &[0.0, 0.5]]);
        assert!(matches!(validate_state(skew), Err(QmeError::InvariantViolation { .. })));
    }

    #[test]
    fn effects() {
        assert!(validate_effect(ComplexMatrix::diag(&[0.3, 0.8])).is_ok());
        assert!(matches!(validate_effect(ComplexMatrix::zeros(2)), Err(QmeError::ZeroEffect(_))));
        assert!(matches!(
            validate_effect(ComplexMatrix::diag(&[1.2, 0.0])),
            Err(QmeError::InvariantViolation { .. })
        ));
    }

    #[test]
    fn complement_examples() {
        let a = Effect::new(ComplexMatrix::diag(&[0.3, 0.8])).unwrap();
        let c = complement(&a).unwrap();
        assert!(c.matrix().max_abs_diff(&ComplexMatrix::diag(&[0.7, 0.2])) < 1e-15);
        assert!(complement(&c).unwrap().matrix().max_abs_diff(a.matrix()) <= 1e-12);
        assert!(matches!(complement(&Effect::identity(3)), Err(QmeError::ZeroEffect(_))));
    }

    #[test]
    fn observables() {
        let proj = validate_observable(vec![
            ("0".into(), ComplexMatrix::diag(&[1.0, 0.0])),
            ("1".into(), ComplexMatrix::diag(&[0.0, 1.0])),
        ]);
        assert!(proj.is_ok());
        let trivial = validate_observable(vec![
            ("a".into(), ComplexMatrix::identity(2).scale(0.6)),
            ("b".into(), ComplexMatrix::identity(2).scale(0.4)),
        ]);
        assert!(trivial.is_ok());
        let err = validate_observable(vec![
            ("0".into(), ComplexMatrix::diag(&[1.0, 0.0])),
            ("1".into(), ComplexMatrix::diag(&[1.0, 0.0])),
        ])
        .unwrap_err();
        assert!(matches!(&err, QmeError::InvariantViolation { invariant, .. } if invariant.contains("Σ A_x")));
        let dup = validate_observable(vec![
            ("0".into(), ComplexMatrix::diag(&[1.0, 0.0])),
            ("0".into(), ComplexMatrix::diag(&[0.0, 1.0])),
        ]);
        assert!(matches!(dup, Err(QmeError::Label(_))));
        let zero = validate_observable(vec![
            ("0".into(), ComplexMatrix::identity(2)),
            ("1".into(), ComplexMatrix::zeros(2)),
        ]);
        assert!(zero.is_err());
    }

    #[test]
    fn operations_and_instruments() {
        assert!(Operation::new(vec![ComplexMatrix::identity(2).scale(0.5)]).is_ok());
        assert!(Operation::new(vec![ComplexMatrix::identity(2).scale(1.1)]).is_err());
        assert!(Operation::new(vec![]).is_err());
        let inst = validate_instrument(vec![
            ("0".into(), vec![ComplexMatrix::diag(&[1.0, 0.0])]),
            ("1".into(), vec![ComplexMatrix::diag(&[0.0, 1.0])]),
        ]);
        assert!(inst.is_ok());
        let lossy = validate_instrument(vec![("0".into(), vec![ComplexMatrix::diag(&[1.0, 0.0])])]);
        assert!(matches!(lossy, Err(QmeError::InvariantViolation { .. })));
    }

    #[test]
    fn model_dimension_errors_name_the_field() {
        let probe = Observable::unit(2, "p");
        let err = MeasurementModel::new(2, 2, Operation::identity(4), State::maximally_mixed(3), probe.clone())
            .unwrap_err();
        assert!(err.to_string().contains("sigma"));
        let err = MeasurementModel::new(2, 2, Operation::identity(3), State::maximally_mixed(2), probe).unwrap_err();
        assert!(err.to_string().contains("nu"));
    }
}
