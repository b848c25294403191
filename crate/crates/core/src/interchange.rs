//! JSON interchange.
//!
//! A matrix is `{"dim": n, "entries": [[re, im], ...]}` in row-major order.
//! States and effects are bare matrices. Observables are
//! `{"outcomes": [{"label", "effect"}]}`, operations `{"kraus": [...]}`,
//! instruments `{"outcomes": [{"label", "operation"}]}` and measurement models
//! `{"dimH", "dimK", "nu", "sigma", "probe"}`.
//!
//! Parsing is two-stage: a syntax or shape problem is [`QmeError::Parse`] and
//! carries a byte offset; a well-formed document that violates a physical
//! invariant surfaces the validator's error unchanged.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{QmeError, Result};
use crate::linalg::ComplexMatrix;
use crate::objects::{Effect, Instrument, MeasurementModel, Observable, Operation, State};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeDoc {
    pub label: String,
    pub effect: ComplexMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableDoc {
    pub outcomes: Vec<OutcomeDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperationDoc {
    pub kraus: Vec<ComplexMatrix>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstrumentOutcomeDoc {
    pub label: String,
    pub operation: OperationDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstrumentDoc {
    pub outcomes: Vec<InstrumentOutcomeDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ModelDoc {
    pub dim_h: usize,
    pub dim_k: usize,
    pub nu: OperationDoc,
    pub sigma: ComplexMatrix,
    pub probe: ObservableDoc,
}

impl From<&Observable> for ObservableDoc {
    fn from(obs: &Observable) -> Self {
        ObservableDoc {
            outcomes: obs
                .outcomes()
                .iter()
                .map(|o| OutcomeDoc {
                    label: o.label.clone(),
                    effect: o.effect.matrix().clone(),
                })
                .collect(),
        }
    }
}

impl From<&Operation> for OperationDoc {
    fn from(op: &Operation) -> Self {
        OperationDoc {
            kraus: op.kraus().to_vec(),
        }
    }
}

impl From<&Instrument> for InstrumentDoc {
    fn from(inst: &Instrument) -> Self {
        InstrumentDoc {
            outcomes: inst
                .outcomes()
                .iter()
                .map(|o| InstrumentOutcomeDoc {
                    label: o.label.clone(),
                    operation: (&o.operation).into(),
                })
                .collect(),
        }
    }
}

impl From<&MeasurementModel> for ModelDoc {
    fn from(m: &MeasurementModel) -> Self {
        ModelDoc {
            dim_h: m.dim_h(),
            dim_k: m.dim_k(),
            nu: m.nu().into(),
            sigma: m.sigma().matrix().clone(),
            probe: m.probe().into(),
        }
    }
}

impl ObservableDoc {
    pub fn validate(self) -> Result<Observable> {
        let outcomes = self
            .outcomes
            .into_iter()
            .map(|o| {
                let effect = Effect::new(o.effect).map_err(|e| in_field(&format!("effect `{}`", o.label), e))?;
                Ok((o.label, effect))
            })
            .collect::<Result<Vec<_>>>()?;
        Observable::new(outcomes)
    }
}

impl OperationDoc {
    pub fn validate(self) -> Result<Operation> {
        Operation::new(self.kraus)
    }
}

impl InstrumentDoc {
    pub fn validate(self) -> Result<Instrument> {
        let outcomes = self
            .outcomes
            .into_iter()
            .map(|o| {
                let op = o
                    .operation
                    .validate()
                    .map_err(|e| in_field(&format!("operation `{}`", o.label), e))?;
                Ok((o.label, op))
            })
            .collect::<Result<Vec<_>>>()?;
        Instrument::new(outcomes)
    }
}

impl ModelDoc {
    pub fn validate(self) -> Result<MeasurementModel> {
        let nu = self.nu.validate().map_err(|e| in_field("nu", e))?;
        let sigma = State::new(self.sigma).map_err(|e| in_field("sigma", e))?;
        let probe = self.probe.validate().map_err(|e| in_field("probe", e))?;
        MeasurementModel::new(self.dim_h, self.dim_k, nu, sigma, probe)
    }
}

/// Prefixes the message of a validation error with the field it came from.
fn in_field(field: &str, err: QmeError) -> QmeError {
    match err {
        QmeError::Dimension(d) => QmeError::Dimension(format!("{field}: {d}")),
        QmeError::ZeroEffect(d) => QmeError::ZeroEffect(format!("{field}: {d}")),
        QmeError::Label(d) => QmeError::Label(format!("{field}: {d}")),
        QmeError::Numerical(d) => QmeError::Numerical(format!("{field}: {d}")),
        QmeError::InvariantViolation { invariant, detail } => QmeError::InvariantViolation {
            invariant,
            detail: format!("{field}: {detail}"),
        },
        QmeError::NotHermitian { .. } | QmeError::NotPositive { .. } => QmeError::InvariantViolation {
            invariant: format!("{field} is a valid operator"),
            detail: err.to_string(),
        },
        other => other,
    }
}

/// Byte offset of a serde_json error position in `text`.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = text.split_inclusive('\n').take(line - 1).map(str::len).sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}

/// Deserializes `text` into a document type, mapping failures to [`QmeError::Parse`].
pub fn parse_doc<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        let offset = byte_offset(text, e.line(), e.column());
        let msg = e.to_string();
        // serde appends " at line L column C"; the offset replaces it.
        let msg = msg.rsplit_once(" at line ").map_or(msg.as_str(), |(head, _)| head);
        QmeError::Parse(format!("byte {offset}: {msg}"))
    })
}

/// A bare matrix that fails its own shape checks is a parse error, not a
/// physics error.
fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    parse_doc(text)
}

pub fn parse_state(text: &str) -> Result<State> {
    State::new(parse_matrix(text)?)
}

pub fn parse_effect(text: &str) -> Result<Effect> {
    Effect::new(parse_matrix(text)?)
}

pub fn parse_observable(text: &str) -> Result<Observable> {
    parse_doc::<ObservableDoc>(text)?.validate()
}

pub fn parse_operation(text: &str) -> Result<Operation> {
    parse_doc::<OperationDoc>(text)?.validate()
}

pub fn parse_instrument(text: &str) -> Result<Instrument> {
    parse_doc::<InstrumentDoc>(text)?.validate()
}

pub fn parse_model(text: &str) -> Result<MeasurementModel> {
    parse_doc::<ModelDoc>(text)?.validate()
}

impl Serialize for State {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.matrix().serialize(s)
    }
}

impl Serialize for Effect {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.matrix().serialize(s)
    }
}

impl Serialize for Observable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ObservableDoc::from(self).serialize(s)
    }
}

impl Serialize for Operation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperationDoc::from(self).serialize(s)
    }
}

impl Serialize for Instrument {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        InstrumentDoc::from(self).serialize(s)
    }
}

impl Serialize for MeasurementModel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ModelDoc::from(self).serialize(s)
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("interchange types always serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{random_channel, random_instrument, random_observable, random_state, RngSeed};

    #[test]
    fn round_trips_are_exact() {
        let mut rng = RngSeed(1).rng();
        let rho = random_state(3, 2, &mut rng).unwrap();
        assert_eq!(parse_state(&to_json(&rho)).unwrap(), rho);
        let obs = random_observable(3, 4, &mut rng).unwrap();
        assert_eq!(parse_observable(&to_json(&obs)).unwrap(), obs);
        let inst = random_instrument(2, 3, 2, &mut rng).unwrap();
        assert_eq!(parse_instrument(&to_json(&inst)).unwrap(), inst);
        let model = MeasurementModel::new(
            2,
            2,
            random_channel(4, 2, &mut rng).unwrap(),
            random_state(2, 1, &mut rng).unwrap(),
            random_observable(2, 2, &mut rng).unwrap(),
        )
        .unwrap();
        assert_eq!(parse_model(&to_json(&model)).unwrap(), model);
    }

    #[test]
    fn syntax_errors_report_byte_offsets() {
        let text = "{\"dim\": 2,\n \"entries\": [[1, 0], oops]}";
        match parse_state(text) {
            Err(QmeError::Parse(msg)) => {
                let offset = text.find("oops").unwrap();
                assert!(msg.starts_with(&format!("byte {offset}")), "{msg}");
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn shape_errors_are_parse_errors() {
        assert!(matches!(parse_state(r#"{"dim": 2, "entries": [[1, 0]]}"#), Err(QmeError::Parse(_))));
        assert!(matches!(parse_observable(r#"{"outcome": []}"#), Err(QmeError::Parse(_))));
    }

    #[test]
    fn invalid_physics_is_not_a_parse_error() {
        let text = r#"{"dim": 2, "entries": [[0.5, 0], [0, 0], [0, 0], [0.4, 0]]}"#;
        assert!(matches!(parse_state(text), Err(QmeError::InvariantViolation { .. })));
    }

    #[test]
    fn model_errors_name_the_field() {
        let mut rng = RngSeed(2).rng();
        let mut doc = ModelDoc::from(
            &MeasurementModel::new(
                2,
                2,
                random_channel(4, 1, &mut rng).unwrap(),
                random_state(2, 2, &mut rng).unwrap(),
                random_observable(2, 2, &mut rng).unwrap(),
            )
            .unwrap(),
        );
        doc.sigma = random_state(3, 3, &mut rng).unwrap().into_matrix();
        let err = doc.validate().unwrap_err();
        assert!(err.to_string().contains("sigma"), "{err}");
    }
}
