use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::event::GENESIS_DIGEST;
use crate::error::{Error, Result};
use crate::state::ProjectState;
use crate::time::Timestamp;

/// Project state folded from events `1..=as_of_sequence`, plus what is needed
/// to keep chaining appends after it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Snapshot {
    pub state: ProjectState,
    pub as_of_sequence: u64,
    pub head_digest: String,
    pub last_at: Option<Timestamp>,
}

impl Default for Snapshot {
    fn default() -> Self {
        Snapshot {
            state: ProjectState::default(),
            as_of_sequence: 0,
            head_digest: GENESIS_DIGEST.to_owned(),
            last_at: None,
        }
    }
}

impl Snapshot {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec(self).expect("snapshot serializes");
        bytes.push(b'\n');
        bytes
    }

    pub fn from_bytes(bytes: &[u8]) -> std::result::Result<Self, String> {
        let snapshot: Snapshot = serde_json::from_slice(bytes).map_err(|e| e.to_string())?;
        if snapshot.head_digest.len() != GENESIS_DIGEST.len() {
            return Err("head digest has the wrong length".into());
        }
        Ok(snapshot)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        f.write_all(&self.to_bytes()).map_err(|e| Error::io(&tmp, e))?;
        f.sync_data().map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Snapshot::from_bytes(&bytes).map_err(|reason| Error::CorruptFile {
            path: path.display().to_string(),
            reason,
        })
    }
}
