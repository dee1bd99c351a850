use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::changes::Change;
use crate::ids::EntityId;
use crate::time::Timestamp;

/// Prior digest of the first event in every log.
pub const GENESIS_DIGEST: &str = "0000000000000000000000000000000000000000000000000000000000000000";

/// One line of the exchange log.
///
/// Field declaration order is the wire order and must not change: each
/// event's `prior_digest` is computed over the exact bytes of the previous
/// serialized line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExchangeEvent {
    pub sequence: u64,
    pub at: Timestamp,
    pub actor: EntityId,
    pub kind: String,
    pub prior_digest: String,
    pub payload: Value,
}

impl ExchangeEvent {
    pub fn new(sequence: u64, at: Timestamp, actor: EntityId, change: &Change, prior_digest: String) -> Self {
        let (kind, payload) = change.to_parts();
        ExchangeEvent {
            sequence,
            at,
            actor,
            kind,
            prior_digest,
            payload,
        }
    }

    /// Serialized form without the trailing newline.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("event serializes")
    }

    pub fn from_line(line: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(line)
    }

    pub fn digest(&self) -> String {
        digest_line(&self.to_line())
    }

    pub fn change(&self) -> Result<Change, serde_json::Error> {
        Change::from_parts(&self.kind, self.payload.clone())
    }
}

/// Lowercase hex SHA-256 of a serialized line.
pub fn digest_line(line: &str) -> String {
    hex::encode(Sha256::digest(line.as_bytes()))
}
