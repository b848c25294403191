//! Entropy of quantum effects, observables and instruments, and how it behaves
//! under sequential products, coarse-graining and measurement models.
//!
//! Everything is finite-dimensional and dense. Matrices are [`ComplexMatrix`];
//! the validated physical objects live in [`objects`].

pub mod cli;
pub mod ensembles;
pub mod entropy;
pub mod error;
pub mod interchange;
pub mod linalg;
pub mod model;
pub mod objects;
pub mod sequential;
pub mod suite;
pub mod tolerance;

pub use entropy::{
    effect_entropy, effect_entropy_bounds, instrument_entropy, observable_entropy, probability,
    von_neumann_entropy, EffectEntropyBounds, EntropyValue,
};
pub use error::{QmeError, Result};
pub use linalg::{ComplexMatrix, EigenDecomposition, TraceOut};
pub use model::{model_entropy_gap, model_instrument, model_observable, ModelEntropyGap};
pub use objects::{Effect, Instrument, KrausMap, MeasurementModel, Observable, Operation, State};
pub use sequential::{
    coarse_grain, compose_instruments, distribution, distribution_of_subset, holevo_chain, holevo_instrument,
    holevo_operation, luders_instrument, luders_operation, measured_effect, measured_observable,
    observable_sequential, sequential_product_effect, tensor_observable, CoarseGraining, SequentialProduct,
};
pub use tolerance::Tolerances;
