use std::borrow::Borrow;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Opaque identifier, unique within a project across every entity kind.
///
/// Ids of imported entities come from the interchange file; ids of entities
/// created on the platform (reports, remarks, plans) are generated as a
/// reserved prefix plus a zero-padded counter so they sort in creation order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(String);

/// Prefixes used for generated ids. Imported ids may not take this shape.
pub const GENERATED_PREFIXES: [&str; 3] = ["rpt", "rmk", "pln"];

const GENERATED_WIDTH: usize = 6;

impl EntityId {
    pub fn new(value: impl Into<String>) -> Self {
        EntityId(value.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn generated(prefix: &str, counter: u32) -> Self {
        EntityId(format!("{prefix}-{counter:0GENERATED_WIDTH$}"))
    }

    /// True when the id has the shape of a platform-generated id.
    pub fn is_generated_shape(&self) -> bool {
        let Some((prefix, digits)) = self.0.split_once('-') else {
            return false;
        };
        GENERATED_PREFIXES.contains(&prefix)
            && digits.len() >= GENERATED_WIDTH
            && digits.bytes().all(|b| b.is_ascii_digit())
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EntityId {
    fn from(value: &str) -> Self {
        EntityId(value.to_owned())
    }
}

impl From<String> for EntityId {
    fn from(value: String) -> Self {
        EntityId(value)
    }
}

impl Borrow<str> for EntityId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for EntityId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}
