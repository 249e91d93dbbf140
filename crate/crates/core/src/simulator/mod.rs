//! Synthetic networked data and numerical verification of the
//! concentration results.
//!
//! Features are drawn once per vertex, labels once per hyperedge given the
//! composed feature vector, and the hypergraph is fixed before anything is
//! drawn.

pub mod exact;
pub mod experiment;
pub mod model;
mod sampling;
mod statistic;

pub use exact::{concavity_check, exact_mgf_check, ConcavityOutcome, MgfCheck, ENUMERATION_CAP};
pub use experiment::{
    concentration_experiment, erm_comparison_experiment, ConcentrationConfig, ConcentrationReport,
    ConcentrationRow, ErmConfig, ErmReport, ErmRow, ExperimentMetadata, FamilySpec,
    HypergraphSource, InstanceSummary, RowKind,
};
pub use model::{DiscreteScalar, FeatureDistribution, GenerativeModel, LabelModel, Noise};
pub use sampling::{
    sample_iid, sample_networked, sample_networked_trial, Example, NetworkedSample,
};
pub use statistic::{Moments, Statistic};
