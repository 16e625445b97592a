//! Error exponents for joint source-channel coding over a two-user
//! multiple-access channel with message-dependent random coding.
//!
//! Each user splits its source messages into two classes by a probability
//! threshold and draws codewords from a class-specific input distribution.
//! The crate evaluates the resulting achievable exponent, optimizes the
//! thresholds, and brackets the exponent between a threshold-free lower bound
//! and a concave-hull upper bound. All exponents are in nats.

pub mod bounds;
pub mod classexp;
pub mod engine;
pub mod error;
pub mod extreal;
pub mod format;
pub mod gallager;
pub mod model;
pub mod oracle;
pub mod paperex;
pub mod parallel;
pub mod registry;
pub mod search;

pub use engine::{EngineOptions, ExponentEngine, ExponentReport};
pub use error::{Error, Result};
pub use extreal::ExtReal;
pub use gallager::ErrorType;
pub use model::{Class, ClassPolicy, InputDistribution, MacChannel, SourceSpec, SystemModel, User};
pub use registry::Registry;
