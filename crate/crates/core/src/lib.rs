//! Entropic weight of algorithm events.
//!
//! Small imperative programs are run on every input of a fixed size. Each
//! event of a run contributes a literal over the inputs; inputs are grouped by
//! the literals occurring in their traces, and each group gets an entropy-like
//! weight measuring how much uncertainty about the result it leaves under a
//! measure that makes all results equiprobable.
//!
//! ```
//! use entropic_core::{build_domain, build_event_index, class_weights, weighted_volume_profile};
//! use entropic_core::{LiteralFilter, ModelId};
//!
//! let dom = build_domain(ModelId::Xor, 4, 2, 1 << 20).unwrap();
//! let index = build_event_index(ModelId::Xor.program(), &dom, LiteralFilter::Essential).unwrap();
//! let weights = class_weights(&dom, &index);
//! let volume = weighted_volume_profile(&dom, &index, &weights);
//! assert!((volume.at(2).unwrap() - 4.0).abs() < 1e-12);
//! ```

pub mod domain;
pub mod entropy;
pub mod error;
pub mod models;
pub mod prog;
pub mod symimg;
pub mod words;

pub use domain::{
    build_domain, build_event_index, configured_cap, Domain, EventClass, EventIndex, InputSet,
    LiteralFilter, OrderedPartition, DEFAULT_CAP,
};
pub use entropy::{
    check_bounds, class_weights, delta, entropic_weight, entropic_weight_alt, trace_profile,
    weighted_volume_profile, BoundCheck, ClassWeights, ConvergenceProfile, WeightedVolumeProfile,
};
pub use error::{Error, ParseError, Result, RunError};
pub use models::{builtin_program, maxps_oracle, sigma_oracle, ModelId};
pub use prog::{parse_program, run, InputInstance, Program, Trace};
pub use symimg::{SymTerm, TraceLiteral, WeededTrace};
