//! Project state as a pure fold of the exchange log.
//!
//! [`ProjectState::check`] holds every business rule; it runs both when an
//! operation is decided and again when an event is replayed, so a log can
//! only ever fold into a state the live operations could have produced.

use serde::{Deserialize, Serialize};

use crate::changes::Change;
use crate::error::{Error, Result};
use crate::ids::EntityId;
use crate::model::{validate_integrity, Actor, Project, Role};
use crate::plan::{Annotation, DiffusionRecord, PlanDocument, PlanRecord, PlanVersion, PLAN_AUTHOR_ROLES};
use crate::report::{
    MeetingReport, PresenceEntry, ProgressEntry, Reaction, Remark, RemarkDisposition,
    RemarkStatus, ReportStatus,
};
use crate::time::Timestamp;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProjectState {
    pub project: Project,
    /// In sequence order.
    pub reports: Vec<MeetingReport>,
    /// In number order.
    pub remarks: Vec<Remark>,
    /// In registration order.
    pub plans: Vec<PlanRecord>,
    /// In publication order, then recipient order.
    pub diffusion: Vec<DiffusionRecord>,
}

impl Default for ProjectState {
    fn default() -> Self {
        ProjectState {
            project: Project::empty("", ""),
            reports: Vec::new(),
            remarks: Vec::new(),
            plans: Vec::new(),
            diffusion: Vec::new(),
        }
    }
}

impl ProjectState {
    pub fn is_initialized(&self) -> bool {
        !self.project.id.is_empty()
    }

    pub fn id(&self) -> &EntityId {
        &self.project.id
    }

    pub fn report(&self, id: &EntityId) -> Option<&MeetingReport> {
        self.reports.iter().find(|r| &r.id == id)
    }

    pub fn remark(&self, id: &EntityId) -> Option<&Remark> {
        self.remarks.iter().find(|r| &r.id == id)
    }

    pub fn plan(&self, id: &EntityId) -> Option<&PlanRecord> {
        self.plans.iter().find(|p| &p.document.id == id)
    }

    pub fn require_report(&self, id: &EntityId) -> Result<&MeetingReport> {
        self.report(id).ok_or_else(|| Error::unknown("report", id))
    }

    pub fn require_remark(&self, id: &EntityId) -> Result<&Remark> {
        self.remark(id).ok_or_else(|| Error::unknown("remark", id))
    }

    pub fn require_plan(&self, id: &EntityId) -> Result<&PlanRecord> {
        self.plan(id).ok_or_else(|| Error::unknown("plan", id))
    }

    pub fn diffusion_records<'a>(
        &'a self,
        plan: &'a EntityId,
        version: u32,
    ) -> impl Iterator<Item = &'a DiffusionRecord> + 'a {
        self.diffusion
            .iter()
            .filter(move |d| &d.plan_id == plan && d.version == version)
    }

    fn require_coordinator(&self, actor: &EntityId) -> Result<&Actor> {
        match self.project.actor(actor) {
            Some(a) if a.role == Role::Coordinator => Ok(a),
            _ => Err(Error::NotCoordinator(actor.clone())),
        }
    }

    fn require_member(&self, actor: &EntityId, action: &'static str) -> Result<&Actor> {
        self.project.actor(actor).ok_or_else(|| Error::NotAuthorized {
            actor: actor.clone(),
            action,
        })
    }

    /// Report exists, author coordinates the project, report is a draft.
    pub fn require_draft_for(&self, author: &EntityId, report: &EntityId) -> Result<&MeetingReport> {
        let r = self.require_report(report)?;
        self.require_coordinator(author)?;
        if r.is_validated() {
            return Err(Error::ReportValidated(report.clone()));
        }
        Ok(r)
    }

    fn check_presence(&self, presence: &[PresenceEntry]) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for p in presence {
            self.project.require_actor(&p.actor_id)?;
            if !seen.insert(&p.actor_id) {
                return Err(Error::InvalidInput(format!(
                    "actor `{}` listed twice in presence",
                    p.actor_id
                )));
            }
        }
        Ok(())
    }

    fn check_responsible(&self, responsible: &[EntityId]) -> Result<()> {
        if responsible.is_empty() {
            return Err(Error::EmptyResponsible);
        }
        responsible
            .iter()
            .try_for_each(|a| self.project.require_actor(a).map(drop))
    }

    fn expect<T: PartialEq + std::fmt::Display>(what: &str, expected: T, got: &T) -> Result<()> {
        if &expected == got {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("{what} must be {expected}, got {got}")))
        }
    }

    /// Whether `change`, authored by `actor`, is allowed in this state.
    pub fn check(&self, change: &Change, actor: &EntityId) -> Result<()> {
        if !self.is_initialized() && !matches!(change, Change::ProjectImported { .. }) {
            return Err(Error::InvalidInput(
                "the first event of a project log must import the project".into(),
            ));
        }
        match change {
            Change::ProjectImported { project } => {
                if self.is_initialized() {
                    return Err(Error::DuplicateProject(self.project.id.clone()));
                }
                let violations = validate_integrity(project);
                if !violations.is_empty() {
                    return Err(Error::InvalidProject(violations));
                }
            }
            Change::ReportOpened {
                report_id,
                sequence,
                presence,
                diffusion_list,
                ..
            } => {
                self.require_coordinator(actor)?;
                if let Some(last) = self.reports.last() {
                    if !last.is_validated() {
                        return Err(Error::PreviousDraftOpen(last.sequence));
                    }
                }
                if diffusion_list.is_empty() {
                    return Err(Error::EmptyDiffusionList);
                }
                let next = self.reports.len() as u32 + 1;
                Self::expect("report sequence", next, sequence)?;
                Self::expect("report id", EntityId::generated("rpt", next), report_id)?;
                for a in diffusion_list {
                    self.project.require_actor(a)?;
                }
                self.check_presence(presence)?;
            }
            Change::PresenceSet {
                report_id,
                presence,
            } => {
                self.require_draft_for(actor, report_id)?;
                self.check_presence(presence)?;
            }
            Change::ProgressSet {
                report_id,
                lot_id,
                percent_complete,
                ..
            } => {
                self.require_draft_for(actor, report_id)?;
                if *percent_complete > 100 {
                    return Err(Error::OutOfRange {
                        what: "percent",
                        value: i64::from(*percent_complete),
                    });
                }
                self.project.require_lot(lot_id)?;
            }
            Change::ReportValidated { report_id } => {
                let r = self.require_report(report_id)?;
                self.require_coordinator(actor)?;
                if r.is_validated() {
                    return Err(Error::AlreadyValidated(report_id.clone()));
                }
                if r.presence.is_empty() {
                    return Err(Error::EmptyPresence);
                }
            }
            Change::RemarkAdded {
                report_id,
                remark_id,
                number,
                text,
                responsible,
                lot_id,
                elements,
                ..
            } => {
                self.require_draft_for(actor, report_id)?;
                self.check_responsible(responsible)?;
                if text.trim().is_empty() {
                    return Err(Error::EmptyBody);
                }
                self.project.require_lot(lot_id)?;
                for e in elements {
                    self.project.require_element(e)?;
                }
                let next = self.remarks.len() as u32 + 1;
                Self::expect("remark number", next, number)?;
                Self::expect("remark id", EntityId::generated("rmk", next), remark_id)?;
            }
            Change::RemarkAmended {
                report_id,
                remark_id,
                text,
                responsible,
            } => {
                let remark = self.require_remark(remark_id)?;
                self.require_draft_for(actor, report_id)?;
                if &remark.opened_in_report != report_id {
                    return Err(Error::RemarkFrozen(remark_id.clone()));
                }
                if let Some(r) = responsible {
                    self.check_responsible(r)?;
                }
                if text.as_ref().is_some_and(|t| t.trim().is_empty()) {
                    return Err(Error::EmptyBody);
                }
            }
            Change::RemarkClosed {
                report_id,
                remark_id,
            } => {
                let remark = self.require_remark(remark_id)?;
                self.require_draft_for(actor, report_id)?;
                if remark.status == RemarkStatus::Closed {
                    return Err(Error::AlreadyClosed(remark_id.clone()));
                }
            }
            Change::RemarkReacted { remark_id, body } => {
                self.require_remark(remark_id)?;
                self.require_member(actor, "react to remarks of this project")?;
                if body.trim().is_empty() {
                    return Err(Error::EmptyBody);
                }
            }
            Change::PlanRegistered {
                plan_id,
                lot_id,
                elements,
                code,
                ..
            } => {
                let author = self.require_member(actor, "register plans")?;
                if !PLAN_AUTHOR_ROLES.contains(&author.role) {
                    return Err(Error::NotAuthorized {
                        actor: actor.clone(),
                        action: "register plans",
                    });
                }
                if code.trim().is_empty() {
                    return Err(Error::InvalidInput("plan code must not be empty".into()));
                }
                if self.plans.iter().any(|p| &p.document.code == code) {
                    return Err(Error::DuplicateCode(code.clone()));
                }
                self.project.require_lot(lot_id)?;
                for e in elements {
                    self.project.require_element(e)?;
                }
                let next = self.plans.len() as u32 + 1;
                Self::expect("plan id", EntityId::generated("pln", next), plan_id)?;
            }
            Change::PlanPublished {
                plan_id,
                version,
                content_digest,
                diffusion_list,
            } => {
                let plan = self.require_plan(plan_id)?;
                self.require_member(actor, "publish plans")?;
                if diffusion_list.is_empty() {
                    return Err(Error::EmptyDiffusion);
                }
                if content_digest.trim().is_empty() {
                    return Err(Error::InvalidInput("content digest must not be empty".into()));
                }
                for a in diffusion_list {
                    self.project.require_actor(a)?;
                }
                let mut sorted = diffusion_list.clone();
                sorted.sort();
                sorted.dedup();
                if sorted.len() != diffusion_list.len() {
                    return Err(Error::InvalidInput("diffusion list repeats a recipient".into()));
                }
                Self::expect("plan version", plan.versions.len() as u32 + 1, version)?;
            }
            Change::PlanAnnotated {
                plan_id,
                version,
                body,
                ..
            } => {
                self.require_version(plan_id, *version)?;
                self.require_member(actor, "annotate plans")?;
                if body.trim().is_empty() {
                    return Err(Error::EmptyBody);
                }
            }
            Change::PlanAcknowledged { plan_id, version } => {
                self.require_version(plan_id, *version)?;
                let record = self
                    .diffusion_records(plan_id, *version)
                    .find(|d| &d.recipient == actor)
                    .ok_or_else(|| Error::NotARecipient(actor.clone()))?;
                if record.acknowledged_at.is_some() {
                    return Err(Error::AlreadyAcknowledged {
                        plan: plan_id.clone(),
                        version: *version,
                        recipient: actor.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    fn require_version(&self, plan: &EntityId, version: u32) -> Result<&PlanVersion> {
        self.require_plan(plan)?
            .version(version)
            .ok_or_else(|| Error::UnknownId {
                kind: "plan version",
                id: EntityId::new(format!("{plan}@{version}")),
            })
    }

    /// Earliest instant the log may stamp on `change`. Plan versions need
    /// strictly increasing publication instants.
    pub fn earliest_instant(&self, change: &Change) -> Option<Timestamp> {
        match change {
            Change::PlanPublished { plan_id, .. } => self
                .plan(plan_id)
                .and_then(|p| p.versions.last())
                .map(|v| v.published_at.plus_millis(1)),
            _ => None,
        }
    }

    /// Applies an already-checked change recorded at `at` by `actor`.
    pub fn evolve(&mut self, change: Change, actor: &EntityId, at: Timestamp, sequence: u64) {
        match change {
            Change::ProjectImported { project } => self.project = project,
            Change::ReportOpened {
                report_id,
                sequence: report_sequence,
                meeting_date,
                presence,
                diffusion_list,
            } => {
                let carried = self
                    .remarks
                    .iter()
                    .filter(|r| r.status == RemarkStatus::Open)
                    .map(|r| RemarkDisposition {
                        remark_id: r.id.clone(),
                        snapshot_text: r.text.clone(),
                        status_at_validation: RemarkStatus::Open,
                    })
                    .collect();
                self.reports.push(MeetingReport {
                    id: report_id,
                    project_id: self.project.id.clone(),
                    sequence: report_sequence,
                    meeting_date,
                    presence,
                    diffusion_list,
                    progress: Vec::new(),
                    remark_dispositions: carried,
                    status: ReportStatus::Draft,
                    validated_at: None,
                });
            }
            Change::PresenceSet {
                report_id,
                presence,
            } => {
                self.report_mut(&report_id).presence = presence;
            }
            Change::ProgressSet {
                report_id,
                lot_id,
                note,
                percent_complete,
            } => {
                let report = self.report_mut(&report_id);
                let entry = ProgressEntry {
                    lot_id,
                    note,
                    percent_complete,
                };
                match report.progress.iter_mut().find(|p| p.lot_id == entry.lot_id) {
                    Some(existing) => *existing = entry,
                    None => report.progress.push(entry),
                }
            }
            Change::ReportValidated { report_id } => {
                let statuses: Vec<(EntityId, RemarkStatus)> =
                    self.remarks.iter().map(|r| (r.id.clone(), r.status)).collect();
                let report = self.report_mut(&report_id);
                for d in &mut report.remark_dispositions {
                    if let Some((_, s)) = statuses.iter().find(|(id, _)| id == &d.remark_id) {
                        d.status_at_validation = *s;
                    }
                }
                report.status = ReportStatus::Validated;
                report.validated_at = Some(at);
            }
            Change::RemarkAdded {
                report_id,
                remark_id,
                number,
                text,
                responsible,
                lot_id,
                elements,
                attachments,
            } => {
                self.report_mut(&report_id)
                    .remark_dispositions
                    .push(RemarkDisposition {
                        remark_id: remark_id.clone(),
                        snapshot_text: text.clone(),
                        status_at_validation: RemarkStatus::Open,
                    });
                self.remarks.push(Remark {
                    id: remark_id,
                    number,
                    text,
                    responsible,
                    lot_id,
                    elements,
                    status: RemarkStatus::Open,
                    opened_in_report: report_id,
                    closed_in_report: None,
                    attachments,
                    reactions: Vec::new(),
                });
            }
            Change::RemarkAmended {
                report_id,
                remark_id,
                text,
                responsible,
            } => {
                let remark = self.remark_mut(&remark_id);
                if let Some(r) = responsible {
                    remark.responsible = r;
                }
                if let Some(t) = text {
                    remark.text = t.clone();
                    if let Some(d) = self
                        .report_mut(&report_id)
                        .remark_dispositions
                        .iter_mut()
                        .find(|d| d.remark_id == remark_id)
                    {
                        d.snapshot_text = t;
                    }
                }
            }
            Change::RemarkClosed {
                report_id,
                remark_id,
            } => {
                let remark = self.remark_mut(&remark_id);
                remark.status = RemarkStatus::Closed;
                remark.closed_in_report = Some(report_id.clone());
                if let Some(d) = self
                    .report_mut(&report_id)
                    .remark_dispositions
                    .iter_mut()
                    .find(|d| d.remark_id == remark_id)
                {
                    d.status_at_validation = RemarkStatus::Closed;
                }
            }
            Change::RemarkReacted { remark_id, body } => {
                let remark = self.remark_mut(&remark_id);
                remark.reactions.push(Reaction {
                    author: actor.clone(),
                    at,
                    sequence,
                    body,
                });
                remark.reactions.sort_by_key(|r| (r.at, r.sequence));
            }
            Change::PlanRegistered {
                plan_id,
                title,
                lot_id,
                elements,
                code,
            } => self.plans.push(PlanRecord {
                document: PlanDocument {
                    id: plan_id,
                    title,
                    lot_id,
                    elements,
                    code,
                },
                versions: Vec::new(),
            }),
            Change::PlanPublished {
                plan_id,
                version,
                content_digest,
                diffusion_list,
            } => {
                self.diffusion
                    .extend(diffusion_list.into_iter().map(|recipient| DiffusionRecord {
                        plan_id: plan_id.clone(),
                        version,
                        recipient,
                        notified_at: at,
                        acknowledged_at: None,
                    }));
                self.plan_mut(&plan_id).versions.push(PlanVersion {
                    plan_id: plan_id.clone(),
                    version,
                    published_by: actor.clone(),
                    published_at: at,
                    content_digest,
                    annotations: Vec::new(),
                });
            }
            Change::PlanAnnotated {
                plan_id,
                version,
                anchor,
                body,
            } => {
                let v = &mut self.plan_mut(&plan_id).versions[version as usize - 1];
                v.annotations.push(Annotation {
                    author: actor.clone(),
                    at,
                    anchor,
                    body,
                });
            }
            Change::PlanAcknowledged { plan_id, version } => {
                if let Some(record) = self
                    .diffusion
                    .iter_mut()
                    .find(|d| d.plan_id == plan_id && d.version == version && &d.recipient == actor)
                {
                    record.acknowledged_at = Some(at);
                }
            }
        }
    }

    fn report_mut(&mut self, id: &EntityId) -> &mut MeetingReport {
        self.reports
            .iter_mut()
            .find(|r| &r.id == id)
            .expect("checked change references an existing report")
    }

    fn remark_mut(&mut self, id: &EntityId) -> &mut Remark {
        self.remarks
            .iter_mut()
            .find(|r| &r.id == id)
            .expect("checked change references an existing remark")
    }

    fn plan_mut(&mut self, id: &EntityId) -> &mut PlanRecord {
        self.plans
            .iter_mut()
            .find(|p| &p.document.id == id)
            .expect("checked change references an existing plan")
    }
}
