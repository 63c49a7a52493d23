//! Parallel repetition: threshold-game probabilities, the exact joint
//! distribution of `n` rounds, dependency-breaking variables, inequality audits,
//! correlated sampling and the classical extraction protocol.

pub mod audit;
pub mod binomial;
pub mod corrsamp;
pub mod events;
pub mod joint;
pub mod montecarlo;
pub mod prop32;
pub mod protocol;
pub mod table;

pub use audit::{lemma_audit, AuditConfig, AuditReport, LemmaCheck};
pub use binomial::{hoeffding_completeness_bound, iid_threshold_win_prob};
pub use corrsamp::{
    agreement_probability, correlated_sample, correlated_sample_trials, correlated_sampling_joint,
    CorrelatedSampleStats, SharedStream,
};
pub use events::{condition_on_event, WinEventSpec};
pub use joint::{
    augment_dependency_breaking, dependency_breaking_deviation, enumerate_joint, omega_names,
    RoundBehavior, RoundLayout, DEFAULT_TABLE_BUDGET,
};
pub use montecarlo::{monte_carlo_threshold, wilson_interval, MonteCarloResult};
pub use prop32::{prop32_search, Prop32Search, WinMasks};
pub use protocol::{
    extraction_protocol_exact, extraction_protocol_sampled, ProtocolConfig, ProtocolReport,
    ProtocolSimulation, SkippedPair,
};
pub use table::{JointTable, Var, NULL_EVENT};
