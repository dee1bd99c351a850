//! Error responses: `{"code": ..., "message": ...}` with an HTTP status
//! chosen by the error's class.
//!
//! | class / case                       | status |
//! |------------------------------------|--------|
//! | missing or unknown bearer token    | 401    |
//! | permission (not-coordinator, ...)  | 403    |
//! | unknown id, node not in graph      | 404    |
//! | freeze, duplicates, stale snapshot | 409    |
//! | validation, malformed request      | 422    |
//! | corrupt log, I/O                   | 500    |

use axum::extract::rejection::{JsonRejection, PathRejection, QueryRejection};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};
use sitecoord_core::{Error, ErrorClass};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

pub fn status_for(class: ErrorClass) -> StatusCode {
    match class {
        ErrorClass::NotFound => StatusCode::NOT_FOUND,
        ErrorClass::Forbidden => StatusCode::FORBIDDEN,
        ErrorClass::Conflict => StatusCode::CONFLICT,
        ErrorClass::Invalid => StatusCode::UNPROCESSABLE_ENTITY,
        ErrorClass::Internal => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

impl ApiError {
    pub fn unauthorized(message: &str) -> Self {
        ApiError {
            status: StatusCode::UNAUTHORIZED,
            body: ErrorBody {
                code: "unknown-token".into(),
                message: message.into(),
                details: None,
            },
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into()).into()
    }

    pub fn not_found_route() -> Self {
        ApiError {
            status: StatusCode::NOT_FOUND,
            body: ErrorBody {
                code: "unknown-route".into(),
                message: "no such route".into(),
                details: None,
            },
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let details = match &e {
            Error::InvalidProject(violations) => serde_json::to_value(violations).ok(),
            _ => None,
        };
        if e.class() == ErrorClass::Internal {
            tracing::error!(error = %e, "internal error");
        }
        ApiError {
            status: status_for(e.class()),
            body: ErrorBody {
                code: e.code().into(),
                message: e.to_string(),
                details,
            },
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::invalid(r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        ApiError::invalid(r.body_text())
    }
}

impl From<PathRejection> for ApiError {
    fn from(r: PathRejection) -> Self {
        ApiError::invalid(r.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}
