//! Bearer tokens mapped to acting actors.
//!
//! The token file is JSON: `{"tokens": {"<token>": "<actor id>", ...}}`.
//! It is read at start-up and again on [`Tokens::reload`]; a token removed
//! from the file stops working as soon as the reload returns.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use axum::http::HeaderMap;
use serde::Deserialize;
use sitecoord_core::EntityId;

use crate::error::ApiError;

#[derive(Debug, thiserror::Error)]
pub enum TokenFileError {
    #[error("cannot read token file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("token file {path} is malformed: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
}

#[derive(Deserialize)]
struct TokenFile {
    tokens: HashMap<String, EntityId>,
}

#[derive(Debug, Default)]
pub struct Tokens {
    source: Option<PathBuf>,
    map: RwLock<HashMap<String, EntityId>>,
}

impl Tokens {
    /// A fixed map with no backing file; `reload` keeps it as is.
    pub fn fixed<I, T, A>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (T, A)>,
        T: Into<String>,
        A: Into<EntityId>,
    {
        Tokens {
            source: None,
            map: RwLock::new(pairs.into_iter().map(|(t, a)| (t.into(), a.into())).collect()),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, TokenFileError> {
        let map = read(path)?;
        Ok(Tokens {
            source: Some(path.to_owned()),
            map: RwLock::new(map),
        })
    }

    /// Re-reads the backing file. On error the previous map stays active.
    pub fn reload(&self) -> Result<usize, TokenFileError> {
        let Some(path) = &self.source else {
            return Ok(self.len());
        };
        let fresh = read(path)?;
        let n = fresh.len();
        *self.map.write().expect("token map poisoned") = fresh;
        Ok(n)
    }

    /// Adds or replaces one token until the next reload.
    pub fn insert(&self, token: impl Into<String>, actor: impl Into<EntityId>) {
        self.map
            .write()
            .expect("token map poisoned")
            .insert(token.into(), actor.into());
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("token map poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn actor_for(&self, token: &str) -> Option<EntityId> {
        self.map.read().expect("token map poisoned").get(token).cloned()
    }

    /// Resolves the `Authorization: Bearer <token>` header.
    pub fn authenticate(&self, headers: &HeaderMap) -> Result<EntityId, ApiError> {
        let value = headers
            .get(axum::http::header::AUTHORIZATION)
            .ok_or_else(|| ApiError::unauthorized("missing bearer token"))?;
        let token = value
            .to_str()
            .ok()
            .and_then(|v| v.strip_prefix("Bearer "))
            .map(str::trim)
            .ok_or_else(|| ApiError::unauthorized("malformed authorization header"))?;
        self.actor_for(token)
            .ok_or_else(|| ApiError::unauthorized("unknown token"))
    }
}

fn read(path: &Path) -> Result<HashMap<String, EntityId>, TokenFileError> {
    let text = fs::read_to_string(path).map_err(|source| TokenFileError::Read {
        path: path.to_owned(),
        source,
    })?;
    let file: TokenFile = serde_json::from_str(&text).map_err(|source| TokenFileError::Parse {
        path: path.to_owned(),
        source,
    })?;
    Ok(file.tokens)
}
