use crate::ids::EntityId;
use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure a platform operation can report.
///
/// [`Error::code`] gives the stable machine-readable name used on the wire
/// and by the command line; [`Error::class`] groups codes by how a caller
/// should react (and drives the HTTP status mapping).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown {kind} `{id}`")]
    UnknownId { kind: &'static str, id: EntityId },
    #[error("unknown id `{0}` in search scope")]
    UnknownScopeId(EntityId),
    #[error("project `{0}` already exists")]
    DuplicateProject(EntityId),
    #[error("project failed integrity validation ({} violation(s))", .0.len())]
    InvalidProject(Vec<Violation>),

    #[error("actor `{0}` is not a coordinator of this project")]
    NotCoordinator(EntityId),
    #[error("actor `{actor}` may not {action}")]
    NotAuthorized { actor: EntityId, action: &'static str },
    #[error("actor `{0}` is not on the diffusion list of this plan version")]
    NotARecipient(EntityId),

    #[error("report #{0} is still a draft; validate it before opening another")]
    PreviousDraftOpen(u32),
    #[error("report `{0}` is validated and can no longer change")]
    ReportValidated(EntityId),
    #[error("report `{0}` is already validated")]
    AlreadyValidated(EntityId),
    #[error("remark `{0}` is already closed")]
    AlreadyClosed(EntityId),
    #[error("plan code `{0}` is already used")]
    DuplicateCode(String),
    #[error("{recipient} already acknowledged version {version} of plan `{plan}`")]
    AlreadyAcknowledged {
        plan: EntityId,
        version: u32,
        recipient: EntityId,
    },
    #[error("remark `{0}` was opened in an earlier report and can no longer be amended")]
    RemarkFrozen(EntityId),

    #[error("a report needs a non-empty diffusion list")]
    EmptyDiffusionList,
    #[error("a plan version needs a non-empty diffusion list")]
    EmptyDiffusion,
    #[error("a remark needs at least one responsible actor")]
    EmptyResponsible,
    #[error("a report cannot be validated without a presence list")]
    EmptyPresence,
    #[error("body must not be empty")]
    EmptyBody,
    #[error("{what} {value} is out of range")]
    OutOfRange { what: &'static str, value: i64 },
    #[error("invalid range: {from} is after {to}")]
    InvalidRange { from: String, to: String },
    #[error("view `{0}` appears twice in the arrangement")]
    DuplicateView(String),
    #[error("an arrangement needs between 2 and 4 views, got {0}")]
    TooFewViews(usize),
    #[error("{0}")]
    MissingContext(&'static str),
    #[error("{0}")]
    InvalidInput(String),
    #[error("concept {kind} `{id}` is not in the graph")]
    NodeNotInGraph { kind: String, id: EntityId },

    #[error("intent was validated against sequence {expected} but the log is at {actual}")]
    StaleSnapshot { expected: u64, actual: u64 },
    #[error("exchange log is corrupt at sequence {sequence}: {reason}")]
    CorruptChain { sequence: u64, reason: String },
    #[error("corrupt file {path}: {reason}")]
    CorruptFile { path: String, reason: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Coarse grouping of error codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    NotFound,
    Forbidden,
    Conflict,
    Invalid,
    Internal,
}

impl Error {
    pub fn unknown(kind: &'static str, id: &EntityId) -> Self {
        Error::UnknownId {
            kind,
            id: id.clone(),
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            Error::UnknownId { .. } => "unknown-id",
            Error::UnknownScopeId(_) => "unknown-scope-id",
            Error::DuplicateProject(_) => "duplicate-project",
            Error::InvalidProject(_) => "invalid-project",
            Error::NotCoordinator(_) => "not-coordinator",
            Error::NotAuthorized { .. } => "not-authorized",
            Error::NotARecipient(_) => "not-a-recipient",
            Error::PreviousDraftOpen(_) => "previous-draft-open",
            Error::ReportValidated(_) => "report-validated",
            Error::AlreadyValidated(_) => "already-validated",
            Error::AlreadyClosed(_) => "already-closed",
            Error::DuplicateCode(_) => "duplicate-code",
            Error::AlreadyAcknowledged { .. } => "already-acknowledged",
            Error::RemarkFrozen(_) => "remark-frozen",
            Error::EmptyDiffusionList => "empty-diffusion-list",
            Error::EmptyDiffusion => "empty-diffusion",
            Error::EmptyResponsible => "empty-responsible",
            Error::EmptyPresence => "empty-presence",
            Error::EmptyBody => "empty-body",
            Error::OutOfRange { .. } => "out-of-range",
            Error::InvalidRange { .. } => "invalid-range",
            Error::DuplicateView(_) => "duplicate-view",
            Error::TooFewViews(_) => "too-few-views",
            Error::MissingContext(_) => "missing-context",
            Error::InvalidInput(_) => "invalid-input",
            Error::NodeNotInGraph { .. } => "node-not-in-graph",
            Error::StaleSnapshot { .. } => "stale-snapshot",
            Error::CorruptChain { .. } => "corrupt-chain",
            Error::CorruptFile { .. } => "corrupt-file",
            Error::Io { .. } => "io-error",
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::UnknownId { .. } | Error::UnknownScopeId(_) | Error::NodeNotInGraph { .. } => {
                ErrorClass::NotFound
            }
            Error::NotCoordinator(_) | Error::NotAuthorized { .. } | Error::NotARecipient(_) => {
                ErrorClass::Forbidden
            }
            Error::DuplicateProject(_)
            | Error::PreviousDraftOpen(_)
            | Error::ReportValidated(_)
            | Error::AlreadyValidated(_)
            | Error::AlreadyClosed(_)
            | Error::DuplicateCode(_)
            | Error::AlreadyAcknowledged { .. }
            | Error::RemarkFrozen(_)
            | Error::StaleSnapshot { .. } => ErrorClass::Conflict,
            Error::InvalidProject(_)
            | Error::EmptyDiffusionList
            | Error::EmptyDiffusion
            | Error::EmptyResponsible
            | Error::EmptyPresence
            | Error::EmptyBody
            | Error::OutOfRange { .. }
            | Error::InvalidRange { .. }
            | Error::DuplicateView(_)
            | Error::TooFewViews(_)
            | Error::MissingContext(_)
            | Error::InvalidInput(_) => ErrorClass::Invalid,
            Error::CorruptChain { .. } | Error::CorruptFile { .. } | Error::Io { .. } => {
                ErrorClass::Internal
            }
        }
    }
}
