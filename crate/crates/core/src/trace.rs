//! Exchange traceability: the chronological slice of the log touching one
//! plan, remark, report or actor.

use serde::{Deserialize, Serialize};

use crate::changes::SubjectRef;
use crate::error::{Error, Result};
use crate::ids::EntityId;
use crate::state::ProjectState;
use crate::store::ExchangeEvent;
use crate::time::Timestamp;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceEntry {
    pub sequence: u64,
    pub at: Timestamp,
    pub actor: EntityId,
    pub kind: String,
    pub subject: SubjectRef,
    pub summary: String,
}

/// True when the event touches the subject: an actor is touched by events
/// they authored and by events naming them as recipient or responsible.
pub fn touches(event: &ExchangeEvent, subject: &SubjectRef) -> bool {
    if let SubjectRef::Actor(a) = subject {
        if &event.actor == a {
            return true;
        }
    }
    event
        .change()
        .map(|c| c.references().contains(subject))
        .unwrap_or(false)
}

fn resolve(state: &ProjectState, subject: &SubjectRef) -> Result<()> {
    let known = match subject {
        SubjectRef::Plan(id) => state.plan(id).is_some(),
        SubjectRef::Remark(id) => state.remark(id).is_some(),
        SubjectRef::Report(id) => state.report(id).is_some(),
        SubjectRef::Actor(id) => state.project.actor(id).is_some(),
    };
    if known {
        Ok(())
    } else {
        Err(Error::unknown(subject.kind(), subject.id()))
    }
}

/// Log entries touching `subject`, in log order, optionally restricted to a
/// closed time range on the event instant.
pub fn trace(
    state: &ProjectState,
    events: &[ExchangeEvent],
    subject: &SubjectRef,
    range: Option<(Timestamp, Timestamp)>,
) -> Result<Vec<TraceEntry>> {
    resolve(state, subject)?;
    if let Some((from, to)) = range {
        if from > to {
            return Err(Error::InvalidRange {
                from: from.to_string(),
                to: to.to_string(),
            });
        }
    }
    Ok(events
        .iter()
        .filter(|e| range.is_none_or(|(from, to)| from <= e.at && e.at <= to))
        .filter(|e| touches(e, subject))
        .map(|e| TraceEntry {
            sequence: e.sequence,
            at: e.at,
            actor: e.actor.clone(),
            kind: e.kind.clone(),
            subject: subject.clone(),
            summary: e
                .change()
                .map(|c| c.summary())
                .unwrap_or_else(|_| e.kind.clone()),
        })
        .collect())
}
