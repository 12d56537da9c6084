//! Command-line front end for `quatode-core`: scenario files, reports,
//! trajectory export and the golden verification suite.

pub mod commands;
pub mod error;
pub mod report;
pub mod scenario;
pub mod trajectory;
pub mod verify;

pub use error::{CliError, Result};
pub use scenario::{Kind, Scenario};
