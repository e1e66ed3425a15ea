//! Session service and command-line front end for the model-selection
//! workbench.

pub mod api;
pub mod cli;
pub mod error;
pub mod payloads;
pub mod session;

pub use api::{router, AppState};
pub use error::{ApiError, ErrorBody};
pub use session::{ConfigOverrides, CreateSession, Mutation, Session, Snapshot};
