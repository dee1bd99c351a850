//! Typed operations over a [`Store`]: every mutation is decided against the
//! current snapshot and appended in one step; reads work on published
//! snapshots.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::changes::SubjectRef;
use crate::crossview::{
    build_graph, project_view, resolve_selection, Arrangement, HighlightSet, SelectionEvent, ViewItem, ViewKind,
};
use crate::error::Result;
use crate::export;
use crate::ids::EntityId;
use crate::model::Project;
use crate::plan::{
    self, Annotate, Annotation, DiffusionRecord, DiffusionStatus, PlanDocument, PlanRecord, PlanVersion,
    PublishVersion, RegisterPlan,
};
use crate::report::{
    self, AmendRemark, MeetingReport, NewRemark, OpenReport, PresenceEntry, Reaction, Remark, ReportStatus,
    SetProgress,
};
use crate::search::{self, Filter, SearchHit, SearchScope};
use crate::state::ProjectState;
use crate::store::{ExchangeEvent, Snapshot, Store};
use crate::time::Timestamp;
use crate::trace::{self, TraceEntry};

/// One line of the project list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProjectSummary {
    pub id: EntityId,
    pub name: String,
    pub reports: usize,
    pub remarks: usize,
    pub plans: usize,
    pub sequence: u64,
}

impl ProjectSummary {
    fn of(snapshot: &Snapshot) -> Self {
        let s = &snapshot.state;
        ProjectSummary {
            id: s.id().clone(),
            name: s.project.name.clone(),
            reports: s.reports.len(),
            remarks: s.remarks.len(),
            plans: s.plans.len(),
            sequence: snapshot.as_of_sequence,
        }
    }
}

/// A selection request: the clicked node, the views on screen and how far
/// to look.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SelectionRequest {
    #[serde(flatten)]
    pub selection: SelectionEvent,
    #[serde(default)]
    pub arrangement: Arrangement,
    #[serde(default = "default_max_bridge")]
    pub max_bridge: u32,
    /// Report shown in the meeting report view; the latest when absent.
    #[serde(default)]
    pub report: Option<EntityId>,
}

fn default_max_bridge() -> u32 {
    crate::crossview::DEFAULT_MAX_BRIDGE
}

pub struct Platform {
    store: Store,
}

impl Platform {
    pub fn new(store: Store) -> Self {
        Platform { store }
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    fn state(&self, project: &EntityId) -> Result<Arc<Snapshot>> {
        self.store.snapshot(project)
    }

    fn apply<T>(
        &self,
        project: &EntityId,
        actor: &EntityId,
        decide: impl FnOnce(&ProjectState) -> Result<crate::changes::Change>,
        pick: impl FnOnce(&ProjectState, &ExchangeEvent) -> Option<T>,
    ) -> Result<T> {
        let (event, snapshot) = self.store.execute(project, actor, decide)?;
        Ok(pick(&snapshot.state, &event).expect("appended change is visible in the new snapshot"))
    }

    // ---- projects ----

    pub fn import_project(&self, actor: &EntityId, project: Project) -> Result<Project> {
        let id = project.id.clone();
        self.store.import(actor, project)?;
        Ok(self.state(&id)?.state.project.clone())
    }

    pub fn list_projects(&self) -> Vec<ProjectSummary> {
        self.store.portfolio().iter().map(|s| ProjectSummary::of(s)).collect()
    }

    pub fn project(&self, project: &EntityId) -> Result<Project> {
        Ok(self.state(project)?.state.project.clone())
    }

    pub fn snapshot(&self, project: &EntityId) -> Result<Arc<Snapshot>> {
        self.state(project)
    }

    pub fn events(&self, project: &EntityId) -> Result<Vec<ExchangeEvent>> {
        self.store.events(project)
    }

    // ---- reports ----

    pub fn open_report(&self, project: &EntityId, actor: &EntityId, form: OpenReport) -> Result<MeetingReport> {
        self.apply(
            project,
            actor,
            |s| report::open_report(s, actor, form),
            |s, _| s.reports.last().cloned(),
        )
    }

    pub fn set_presence(
        &self,
        project: &EntityId,
        actor: &EntityId,
        report_id: &EntityId,
        presence: Vec<PresenceEntry>,
    ) -> Result<MeetingReport> {
        self.apply(
            project,
            actor,
            |s| report::set_presence(s, actor, report_id, presence),
            |s, _| s.report(report_id).cloned(),
        )
    }

    pub fn add_remark(
        &self,
        project: &EntityId,
        actor: &EntityId,
        report_id: &EntityId,
        form: NewRemark,
    ) -> Result<Remark> {
        self.apply(
            project,
            actor,
            |s| report::add_remark(s, actor, report_id, form),
            |s, _| s.remarks.last().cloned(),
        )
    }

    pub fn amend_remark(
        &self,
        project: &EntityId,
        actor: &EntityId,
        report_id: &EntityId,
        remark: &EntityId,
        form: AmendRemark,
    ) -> Result<Remark> {
        self.apply(
            project,
            actor,
            |s| report::amend_remark(s, actor, report_id, remark, form),
            |s, _| s.remark(remark).cloned(),
        )
    }

    pub fn set_progress(
        &self,
        project: &EntityId,
        actor: &EntityId,
        report_id: &EntityId,
        form: SetProgress,
    ) -> Result<MeetingReport> {
        self.apply(
            project,
            actor,
            |s| report::set_progress(s, actor, report_id, form),
            |s, _| s.report(report_id).cloned(),
        )
    }

    pub fn close_remark(
        &self,
        project: &EntityId,
        actor: &EntityId,
        report_id: &EntityId,
        remark: &EntityId,
    ) -> Result<Remark> {
        self.apply(
            project,
            actor,
            |s| report::close_remark(s, actor, report_id, remark),
            |s, _| s.remark(remark).cloned(),
        )
    }

    pub fn validate_report(&self, project: &EntityId, actor: &EntityId, report_id: &EntityId) -> Result<MeetingReport> {
        self.apply(
            project,
            actor,
            |s| report::validate_report(s, actor, report_id),
            |s, _| s.report(report_id).cloned(),
        )
    }

    pub fn react(&self, project: &EntityId, actor: &EntityId, remark: &EntityId, body: String) -> Result<Reaction> {
        self.apply(
            project,
            actor,
            |s| report::react_to_remark(s, actor, remark, body),
            |s, e| {
                s.remark(remark)?
                    .reactions
                    .iter()
                    .find(|r| r.sequence == e.sequence)
                    .cloned()
            },
        )
    }

    pub fn list_reports(&self, project: &EntityId, status: Option<ReportStatus>) -> Result<Vec<MeetingReport>> {
        let snap = self.state(project)?;
        Ok(report::list_reports(&snap.state, status).into_iter().cloned().collect())
    }

    pub fn report(&self, project: &EntityId, report_id: &EntityId) -> Result<MeetingReport> {
        let snap = self.state(project)?;
        report::get_report(&snap.state, report_id).cloned()
    }

    pub fn remarks(&self, project: &EntityId) -> Result<Vec<Remark>> {
        Ok(self.state(project)?.state.remarks.clone())
    }

    pub fn remark(&self, project: &EntityId, remark: &EntityId) -> Result<Remark> {
        self.state(project)?.state.require_remark(remark).cloned()
    }

    pub fn export_report(&self, project: &EntityId, report_id: &EntityId) -> Result<String> {
        export::render_report(&self.state(project)?.state, report_id)
    }

    // ---- plans ----

    pub fn register_plan(&self, project: &EntityId, actor: &EntityId, form: RegisterPlan) -> Result<PlanDocument> {
        self.apply(
            project,
            actor,
            |s| plan::register_plan(s, actor, form),
            |s, _| s.plans.last().map(|p| p.document.clone()),
        )
    }

    pub fn publish_version(
        &self,
        project: &EntityId,
        actor: &EntityId,
        plan_id: &EntityId,
        form: PublishVersion,
    ) -> Result<PlanVersion> {
        self.apply(
            project,
            actor,
            |s| plan::publish_version(s, actor, plan_id, form),
            |s, _| s.plan(plan_id)?.versions.last().cloned(),
        )
    }

    pub fn annotate(
        &self,
        project: &EntityId,
        actor: &EntityId,
        plan_id: &EntityId,
        version: u32,
        form: Annotate,
    ) -> Result<Annotation> {
        self.apply(
            project,
            actor,
            |s| plan::annotate(s, actor, plan_id, version, form),
            |s, _| s.plan(plan_id)?.version(version)?.annotations.last().cloned(),
        )
    }

    pub fn acknowledge(
        &self,
        project: &EntityId,
        actor: &EntityId,
        plan_id: &EntityId,
        version: u32,
    ) -> Result<DiffusionRecord> {
        self.apply(
            project,
            actor,
            |s| plan::acknowledge(s, actor, plan_id, version),
            |s, _| {
                s.diffusion
                    .iter()
                    .find(|d| &d.plan_id == plan_id && d.version == version && &d.recipient == actor)
                    .cloned()
            },
        )
    }

    pub fn plans(&self, project: &EntityId) -> Result<Vec<PlanRecord>> {
        Ok(self.state(project)?.state.plans.clone())
    }

    pub fn diffusion_status(&self, project: &EntityId, plan_id: &EntityId, version: u32) -> Result<DiffusionStatus> {
        plan::diffusion_status(&self.state(project)?.state, plan_id, version)
    }

    // ---- consultation ----

    pub fn search(&self, scope: &SearchScope, filter: &Filter) -> Result<Vec<SearchHit>> {
        let portfolio = self.store.portfolio();
        search::search(portfolio.iter().map(|s| &s.state), scope, filter)
    }

    pub fn trace(
        &self,
        project: &EntityId,
        subject: &SubjectRef,
        range: Option<(Timestamp, Timestamp)>,
    ) -> Result<Vec<TraceEntry>> {
        let snap = self.state(project)?;
        self.store
            .with_events(project, |events| trace::trace(&snap.state, events, subject, range))?
    }

    // ---- linked views ----

    pub fn view(&self, project: &EntityId, kind: ViewKind, report_id: Option<&EntityId>) -> Result<Vec<ViewItem>> {
        let graph = build_graph(&self.state(project)?.state)?;
        project_view(&graph, kind, report_id)
    }

    pub fn select(&self, project: &EntityId, request: &SelectionRequest) -> Result<HighlightSet> {
        let graph = build_graph(&self.state(project)?.state)?;
        resolve_selection(
            &graph,
            &request.selection,
            &request.arrangement,
            request.max_bridge,
            request.report.as_ref(),
        )
    }
}

impl From<Store> for Platform {
    fn from(store: Store) -> Self {
        Platform::new(store)
    }
}

