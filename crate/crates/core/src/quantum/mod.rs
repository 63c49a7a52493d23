//! Small-dimension quantum states and information measures.

pub mod chain;
pub mod entanglement;
pub mod info;
pub mod linalg;
pub mod random;
pub mod raz;
pub mod state;

pub use chain::{
    classical_relative_entropy, conditional_mutual_information_cq, randomized_chain_rule,
    relative_entropy_chain, total_mutual_information_cq, ChainRuleAudit,
};
pub use entanglement::{concurrence, entanglement_entropy, eof_two_qubit};
pub use info::{
    binary_entropy, fidelity, mutual_information, relative_entropy, relative_min_entropy,
    shannon_entropy, trace_distance, von_neumann_entropy,
};
pub use linalg::{kron as tensor, partial_trace, CMat, CVec, Side};
pub use raz::{quantum_raz_audit, RazAudit};
pub use state::{BipartitePureState, CqState, DensityMatrix};
