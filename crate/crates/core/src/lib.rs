//! Object-centric event logs with timestamped object attributes and
//! timestamped object-to-object relations.
//!
//! The crate covers the log model, a domain specification format, readers
//! and writers for four log representations, converters between them,
//! quality checks, goal queries and a cargo pickup simulator.

pub mod cli;
pub mod convert;
pub mod domain;
pub mod formats;
pub mod model;
pub mod quality;
pub mod queries;
pub mod sim;

pub use domain::{DomainSpec, SpecError};
pub use formats::{Format, FormatError};
pub use model::{DirigoLog, ModelError, Timestamp};
