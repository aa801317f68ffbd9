//! Rate control: chained per-node VDFs, signed transactions,
//! reputation-proportional difficulty and the admission filter.

pub mod admission;
pub mod config;
pub mod identity;
pub mod reputation;
pub mod transaction;

pub use admission::{Admission, AdmissionCounters, RejectReason, Verdict};
pub use config::ProtocolConfig;
pub use identity::{wire_lambda, NodeIdentity};
pub use reputation::{
    difficulty_for, raw_difficulty, rounding_quantum, speedup, CalibrationCurve, NodeId,
    ReputationMap, TauBounds,
};
pub use transaction::{timestamp_link, Transaction};
