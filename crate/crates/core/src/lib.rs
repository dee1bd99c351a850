//! Construction-site coordination: meeting reports with numbered remarks,
//! plan exchange with diffusion tracking, cross-project search, linked
//! multi-view navigation, all recorded in a tamper-evident exchange log.

pub mod changes;
pub mod crossview;
pub mod error;
pub mod export;
pub mod ids;
pub mod model;
pub mod plan;
pub mod platform;
pub mod report;
pub mod search;
pub mod state;
pub mod store;
pub mod time;
pub mod trace;

pub use changes::{Change, SubjectRef};
pub use error::{Error, ErrorClass, Result};
pub use ids::EntityId;
pub use model::Project;
pub use platform::{Platform, ProjectSummary, SelectionRequest};
pub use state::ProjectState;
pub use store::{ExchangeEvent, Snapshot, Store};
pub use time::Timestamp;
