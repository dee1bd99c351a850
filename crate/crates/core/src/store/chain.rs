use serde::{Deserialize, Serialize};

use super::event::{digest_line, ExchangeEvent, GENESIS_DIGEST};
use crate::time::Timestamp;

/// Digest of the newest event, stored next to the log so that tampering with
/// the final line is detectable too.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Head {
    pub sequence: u64,
    pub digest: String,
}

/// Outcome of a chain check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "camelCase")]
pub enum ChainReport {
    Ok,
    Bad { sequence: u64, reason: String },
}

impl ChainReport {
    pub fn is_ok(&self) -> bool {
        matches!(self, ChainReport::Ok)
    }

    pub fn bad_sequence(&self) -> Option<u64> {
        match self {
            ChainReport::Ok => None,
            ChainReport::Bad { sequence, .. } => Some(*sequence),
        }
    }
}

/// Checks an in-memory log: gapless sequence from 1, non-decreasing
/// timestamps and an unbroken digest chain.
pub fn verify_chain(events: &[ExchangeEvent]) -> ChainReport {
    let items: Vec<_> = events.iter().map(|e| (Ok(e.clone()), e.digest())).collect();
    verify_items(&items, None)
}

/// Checks raw log lines as stored on disk, hashing the exact bytes, and
/// optionally the stored head.
pub fn verify_lines(lines: &[&str], head: Option<&Head>) -> ChainReport {
    let items: Vec<_> = lines
        .iter()
        .map(|l| (ExchangeEvent::from_line(l).map_err(|e| e.to_string()), digest_line(l)))
        .collect();
    verify_items(&items, head)
}

fn verify_items(items: &[(Result<ExchangeEvent, String>, String)], head: Option<&Head>) -> ChainReport {
    let bad = |sequence: u64, reason: String| ChainReport::Bad { sequence, reason };
    let mut prior = GENESIS_DIGEST.to_owned();
    let mut last_at: Option<Timestamp> = None;
    for (i, (parsed, digest)) in items.iter().enumerate() {
        let expected = i as u64 + 1;
        let event = match parsed {
            Ok(e) => e,
            Err(e) => return bad(expected, format!("unreadable event: {e}")),
        };
        if event.sequence != expected {
            return bad(
                expected,
                format!("expected sequence {expected}, found {}", event.sequence),
            );
        }
        if last_at.is_some_and(|t| event.at < t) {
            return bad(expected, "timestamp earlier than its predecessor".into());
        }
        if event.prior_digest != prior {
            // Either the predecessor's bytes or this event's prior field was
            // altered. If this event's own digest also fails to match what
            // follows it, the damage is here; otherwise it is upstream.
            let next_link_ok = match items.get(i + 1) {
                Some((Ok(next), _)) => next.prior_digest == *digest,
                Some((Err(_), _)) => false,
                None => head.is_none_or(|h| h.digest == *digest),
            };
            let culprit = if expected == 1 || !next_link_ok {
                expected
            } else {
                expected - 1
            };
            return bad(culprit, "digest chain broken".into());
        }
        prior = digest.clone();
        last_at = Some(event.at);
    }
    if let Some(h) = head {
        let len = items.len() as u64;
        if h.sequence != len {
            return bad(
                h.sequence.min(len) + 1,
                format!("head names sequence {} but the log holds {len} event(s)", h.sequence),
            );
        }
        if h.digest != prior {
            return bad(len.max(1), "head digest does not match the last event".into());
        }
    }
    ChainReport::Ok
}
