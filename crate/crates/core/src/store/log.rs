use std::path::Path;
use std::sync::Arc;

use super::chain::{verify_chain, verify_lines, ChainReport};
use super::clock::Clock;
use super::event::{digest_line, ExchangeEvent};
use super::file::{self, LogFile};
use super::snapshot::Snapshot;
use crate::changes::Change;
use crate::error::{Error, Result};
use crate::ids::EntityId;

/// A change validated against the snapshot at `based_on`.
#[derive(Debug, Clone)]
pub struct Intent {
    pub based_on: u64,
    pub actor: EntityId,
    pub change: Change,
}

/// The append-only log of one project and its current snapshot.
///
/// When restored from a snapshot, `events` holds only what was appended
/// afterwards; sequences continue from the snapshot.
pub struct ProjectLog {
    events: Vec<ExchangeEvent>,
    snapshot: Arc<Snapshot>,
    file: Option<LogFile>,
}

impl Default for ProjectLog {
    fn default() -> Self {
        ProjectLog::in_memory()
    }
}

impl ProjectLog {
    pub fn in_memory() -> Self {
        ProjectLog {
            events: Vec::new(),
            snapshot: Arc::new(Snapshot::default()),
            file: None,
        }
    }

    pub fn create_in(dir: &Path) -> Result<Self> {
        Ok(ProjectLog {
            file: Some(LogFile::create(dir)?),
            ..ProjectLog::in_memory()
        })
    }

    /// Continues from a saved snapshot, in memory.
    pub fn from_snapshot(snapshot: Snapshot) -> Self {
        ProjectLog {
            events: Vec::new(),
            snapshot: Arc::new(snapshot),
            file: None,
        }
    }

    /// Loads a log directory: repairs an interrupted append, verifies the
    /// whole chain against the head, and replays it.
    pub fn open_dir(dir: &Path) -> Result<Self> {
        let contents = file::recover(dir)?;
        let lines: Vec<&str> = contents.lines.iter().map(String::as_str).collect();
        if let ChainReport::Bad { sequence, reason } = verify_lines(&lines, contents.head.as_ref()) {
            return Err(Error::CorruptChain { sequence, reason });
        }
        let events: Vec<ExchangeEvent> = lines
            .iter()
            .map(|l| ExchangeEvent::from_line(l).expect("verified lines parse"))
            .collect();
        let mut snapshot = fold(&events)?;
        // Chain onward from the bytes actually on disk.
        if let Some(last) = lines.last() {
            snapshot.head_digest = digest_line(last);
        }
        Ok(ProjectLog {
            events,
            snapshot: Arc::new(snapshot),
            file: Some(LogFile::open_append(dir)?),
        })
    }

    pub fn events(&self) -> &[ExchangeEvent] {
        &self.events
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        Arc::clone(&self.snapshot)
    }

    pub fn sequence(&self) -> u64 {
        self.snapshot.as_of_sequence
    }

    /// Appends a validated intent. Fails with `StaleSnapshot` when the log
    /// moved since the intent was validated.
    pub fn append(&mut self, intent: Intent, clock: &dyn Clock) -> Result<ExchangeEvent> {
        let current = self.snapshot.as_of_sequence;
        if intent.based_on != current {
            return Err(Error::StaleSnapshot {
                expected: intent.based_on,
                actual: current,
            });
        }
        let state = &self.snapshot.state;
        state.check(&intent.change, &intent.actor)?;

        let mut at = clock.now();
        if let Some(last) = self.snapshot.last_at {
            at = at.max(last);
        }
        if let Some(floor) = state.earliest_instant(&intent.change) {
            at = at.max(floor);
        }
        let event = ExchangeEvent::new(
            current + 1,
            at,
            intent.actor.clone(),
            &intent.change,
            self.snapshot.head_digest.clone(),
        );
        let line = event.to_line();
        if let Some(f) = self.file.as_mut() {
            f.append(event.sequence, &line)?;
        }

        let next = Arc::make_mut(&mut self.snapshot);
        next.state
            .evolve(intent.change, &intent.actor, at, event.sequence);
        next.as_of_sequence = event.sequence;
        next.head_digest = digest_line(&line);
        next.last_at = Some(at);
        self.events.push(event.clone());
        Ok(event)
    }
}

/// Folds a complete log (starting at sequence 1) into a snapshot, refusing
/// logs whose chain does not verify or whose events break a domain rule.
pub fn replay(events: &[ExchangeEvent]) -> Result<Snapshot> {
    if let ChainReport::Bad { sequence, reason } = verify_chain(events) {
        return Err(Error::CorruptChain { sequence, reason });
    }
    fold(events)
}

fn fold(events: &[ExchangeEvent]) -> Result<Snapshot> {
    let mut snapshot = Snapshot::default();
    for event in events {
        apply(&mut snapshot, event)?;
    }
    Ok(snapshot)
}

/// Applies one already chain-verified event.
pub fn apply(snapshot: &mut Snapshot, event: &ExchangeEvent) -> Result<()> {
    let corrupt = |reason: String| Error::CorruptChain {
        sequence: event.sequence,
        reason,
    };
    let change = event
        .change()
        .map_err(|e| corrupt(format!("undecodable payload: {e}")))?;
    snapshot
        .state
        .check(&change, &event.actor)
        .map_err(|e| corrupt(format!("event breaks a domain rule: {e}")))?;
    snapshot
        .state
        .evolve(change, &event.actor, event.at, event.sequence);
    snapshot.as_of_sequence = event.sequence;
    snapshot.head_digest = event.digest();
    snapshot.last_at = Some(event.at);
    Ok(())
}
