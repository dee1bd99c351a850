//! The exchange log: an append-only, digest-chained, per-project event log
//! that is the only way state changes. Every snapshot is a replay of it.

mod chain;
mod clock;
mod event;
mod file;
mod log;
mod snapshot;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use parking_lot::{Mutex, RwLock};

pub use chain::{verify_chain, verify_lines, ChainReport, Head};
pub use clock::{Clock, ManualClock, SystemClock};
pub use event::{digest_line, ExchangeEvent, GENESIS_DIGEST};
pub use file::{read_contents, LogContents, HEAD_FILE, LOG_FILE};
pub use log::{apply, replay, Intent, ProjectLog};
pub use snapshot::Snapshot;

use crate::changes::Change;
use crate::error::{Error, Result};
use crate::ids::EntityId;
use crate::model::Project;
use crate::state::ProjectState;

/// Verifies a log directory exactly as stored, without repairing it.
pub fn verify_dir(dir: &Path) -> Result<ChainReport> {
    let contents = read_contents(dir)?;
    let lines: Vec<&str> = contents.lines.iter().map(String::as_str).collect();
    Ok(verify_lines(&lines, contents.head.as_ref()))
}

struct ProjectHandle {
    writer: Mutex<ProjectLog>,
    published: RwLock<Published>,
}

struct Published {
    snapshot: Arc<Snapshot>,
    events: Vec<ExchangeEvent>,
}

impl ProjectHandle {
    fn new(log: ProjectLog) -> Self {
        let published = Published {
            snapshot: log.snapshot(),
            events: log.events().to_vec(),
        };
        ProjectHandle {
            writer: Mutex::new(log),
            published: RwLock::new(published),
        }
    }
}

/// All project logs of one platform instance.
///
/// Appends to a project are serialized by that project's writer lock; reads
/// take the last published snapshot and never wait for a disk write.
pub struct Store {
    root: Option<PathBuf>,
    clock: Arc<dyn Clock>,
    projects: RwLock<BTreeMap<EntityId, Arc<ProjectHandle>>>,
}

const PROJECTS_DIR: &str = "projects";

/// Directory name for a project id: safe characters are kept, others are
/// percent-encoded.
pub fn project_dir_name(id: &EntityId) -> String {
    let mut out = String::new();
    for b in id.as_str().bytes() {
        if b.is_ascii_alphanumeric() || b == b'-' || b == b'_' {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

impl Store {
    pub fn in_memory(clock: Arc<dyn Clock>) -> Self {
        Store {
            root: None,
            clock,
            projects: RwLock::new(BTreeMap::new()),
        }
    }

    /// Opens (or initializes) a data directory and replays every project log
    /// found in it.
    pub fn open(root: &Path, clock: Arc<dyn Clock>) -> Result<Self> {
        let meta = fs::metadata(root).map_err(|e| Error::io(root, e))?;
        if !meta.is_dir() {
            return Err(Error::io(
                root,
                std::io::Error::new(std::io::ErrorKind::NotADirectory, "not a directory"),
            ));
        }
        let projects_dir = root.join(PROJECTS_DIR);
        fs::create_dir_all(&projects_dir).map_err(|e| Error::io(&projects_dir, e))?;
        let mut projects = BTreeMap::new();
        let mut entries: Vec<_> = fs::read_dir(&projects_dir)
            .map_err(|e| Error::io(&projects_dir, e))?
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::io(&projects_dir, e))?;
        entries.sort_by_key(|e| e.file_name());
        for entry in entries {
            let dir = entry.path();
            if !dir.join(LOG_FILE).exists() {
                continue;
            }
            let log = ProjectLog::open_dir(&dir)?;
            let snapshot = log.snapshot();
            if !snapshot.state.is_initialized() {
                continue;
            }
            projects.insert(snapshot.state.id().clone(), Arc::new(ProjectHandle::new(log)));
        }
        Ok(Store {
            root: Some(root.to_owned()),
            clock,
            projects: RwLock::new(projects),
        })
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    pub fn project_dir(&self, id: &EntityId) -> Option<PathBuf> {
        self.root
            .as_ref()
            .map(|r| r.join(PROJECTS_DIR).join(project_dir_name(id)))
    }

    fn handle(&self, id: &EntityId) -> Result<Arc<ProjectHandle>> {
        self.projects
            .read()
            .get(id)
            .cloned()
            .ok_or_else(|| Error::unknown("project", id))
    }

    pub fn project_ids(&self) -> Vec<EntityId> {
        self.projects.read().keys().cloned().collect()
    }

    pub fn contains(&self, id: &EntityId) -> bool {
        self.projects.read().contains_key(id)
    }

    /// Creates a project log whose first event imports `project`.
    pub fn import(&self, actor: &EntityId, project: Project) -> Result<ExchangeEvent> {
        let mut projects = self.projects.write();
        if projects.contains_key(&project.id) {
            return Err(Error::DuplicateProject(project.id.clone()));
        }
        let id = project.id.clone();
        let change = Change::ProjectImported { project };
        ProjectState::default().check(&change, actor)?;
        let mut log = match self.project_dir(&id) {
            Some(dir) => {
                if dir.join(LOG_FILE).exists() {
                    return Err(Error::DuplicateProject(id));
                }
                ProjectLog::create_in(&dir)?
            }
            None => ProjectLog::in_memory(),
        };
        let event = log.append(
            Intent {
                based_on: 0,
                actor: actor.clone(),
                change,
            },
            self.clock.as_ref(),
        )?;
        projects.insert(id, Arc::new(ProjectHandle::new(log)));
        Ok(event)
    }

    /// Decides a change against the current state and appends it, with no
    /// window for the state to move in between.
    pub fn execute<F>(&self, project: &EntityId, actor: &EntityId, decide: F) -> Result<(ExchangeEvent, Arc<Snapshot>)>
    where
        F: FnOnce(&ProjectState) -> Result<Change>,
    {
        let handle = self.handle(project)?;
        let mut log = handle.writer.lock();
        let current = log.snapshot();
        let change = decide(&current.state)?;
        self.append_locked(&handle, &mut log, Intent {
            based_on: current.as_of_sequence,
            actor: actor.clone(),
            change,
        })
    }

    /// Appends an intent validated elsewhere; fails with `StaleSnapshot` if
    /// the log moved past `intent.based_on`.
    pub fn submit(&self, project: &EntityId, intent: Intent) -> Result<(ExchangeEvent, Arc<Snapshot>)> {
        let handle = self.handle(project)?;
        let mut log = handle.writer.lock();
        self.append_locked(&handle, &mut log, intent)
    }

    fn append_locked(
        &self,
        handle: &ProjectHandle,
        log: &mut ProjectLog,
        intent: Intent,
    ) -> Result<(ExchangeEvent, Arc<Snapshot>)> {
        let event = log.append(intent, self.clock.as_ref())?;
        let snapshot = log.snapshot();
        let mut published = handle.published.write();
        published.snapshot = Arc::clone(&snapshot);
        published.events.push(event.clone());
        Ok((event, snapshot))
    }

    pub fn snapshot(&self, project: &EntityId) -> Result<Arc<Snapshot>> {
        Ok(Arc::clone(&self.handle(project)?.published.read().snapshot))
    }

    /// Snapshots of every project, in id order.
    pub fn portfolio(&self) -> Vec<Arc<Snapshot>> {
        let handles: Vec<_> = self.projects.read().values().cloned().collect();
        handles
            .iter()
            .map(|h| Arc::clone(&h.published.read().snapshot))
            .collect()
    }

    pub fn events(&self, project: &EntityId) -> Result<Vec<ExchangeEvent>> {
        Ok(self.handle(project)?.published.read().events.clone())
    }

    /// Runs `f` over the published events without copying them.
    pub fn with_events<T>(&self, project: &EntityId, f: impl FnOnce(&[ExchangeEvent]) -> T) -> Result<T> {
        let handle = self.handle(project)?;
        let published = handle.published.read();
        Ok(f(&published.events))
    }
}
