//! Meeting reports: the writing service (forms for presence, progress and
//! remarks), validation freeze, and the reaction service on remarks.
//!
//! Remarks live at project level. A report holds dated snapshots of the
//! remarks it discusses ("dispositions"), so a validated report never
//! changes even as its remarks are later closed or reacted to.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::changes::Change;
use crate::error::{Error, Result};
use crate::ids::EntityId;
use crate::state::ProjectState;
use crate::time::Timestamp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attendance {
    Present,
    Excused,
    Absent,
}

impl Attendance {
    pub fn as_str(self) -> &'static str {
        match self {
            Attendance::Present => "present",
            Attendance::Excused => "excused",
            Attendance::Absent => "absent",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PresenceEntry {
    pub actor_id: EntityId,
    pub status: Attendance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProgressEntry {
    pub lot_id: EntityId,
    pub note: String,
    pub percent_complete: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RemarkStatus {
    Open,
    Closed,
}

impl RemarkStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RemarkStatus::Open => "open",
            RemarkStatus::Closed => "closed",
        }
    }
}

/// A remark as recorded in one particular report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RemarkDisposition {
    pub remark_id: EntityId,
    pub snapshot_text: String,
    pub status_at_validation: RemarkStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportStatus {
    Draft,
    Validated,
}

impl ReportStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportStatus::Draft => "draft",
            ReportStatus::Validated => "validated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MeetingReport {
    pub id: EntityId,
    pub project_id: EntityId,
    pub sequence: u32,
    pub meeting_date: NaiveDate,
    pub presence: Vec<PresenceEntry>,
    pub diffusion_list: Vec<EntityId>,
    pub progress: Vec<ProgressEntry>,
    pub remark_dispositions: Vec<RemarkDisposition>,
    pub status: ReportStatus,
    pub validated_at: Option<Timestamp>,
}

impl MeetingReport {
    pub fn is_validated(&self) -> bool {
        self.status == ReportStatus::Validated
    }

    pub fn disposition(&self, remark: &EntityId) -> Option<&RemarkDisposition> {
        self.remark_dispositions.iter().find(|d| &d.remark_id == remark)
    }
}

/// A reader's response to a remark. `sequence` is the exchange-log position
/// that recorded it and breaks ties between equal instants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Reaction {
    pub author: EntityId,
    pub at: Timestamp,
    pub sequence: u64,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Remark {
    pub id: EntityId,
    pub number: u32,
    pub text: String,
    pub responsible: Vec<EntityId>,
    pub lot_id: EntityId,
    pub elements: Vec<EntityId>,
    pub status: RemarkStatus,
    pub opened_in_report: EntityId,
    pub closed_in_report: Option<EntityId>,
    pub attachments: Vec<String>,
    pub reactions: Vec<Reaction>,
}

/// Form data for a new report.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OpenReport {
    pub meeting_date: NaiveDate,
    #[serde(default)]
    pub presence: Vec<PresenceEntry>,
    pub diffusion_list: Vec<EntityId>,
}

/// Form data for a new remark.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NewRemark {
    pub text: String,
    pub responsible: Vec<EntityId>,
    pub lot_id: EntityId,
    #[serde(default)]
    pub elements: Vec<EntityId>,
    #[serde(default)]
    pub attachments: Vec<String>,
}

/// Changes to a remark that is still inside the draft that opened it.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AmendRemark {
    #[serde(default)]
    pub text: Option<String>,
    #[serde(default)]
    pub responsible: Option<Vec<EntityId>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SetProgress {
    pub lot_id: EntityId,
    #[serde(default)]
    pub note: String,
    pub percent: i64,
}

fn sorted_set(ids: Vec<EntityId>) -> Vec<EntityId> {
    let mut ids = ids;
    ids.sort();
    ids.dedup();
    ids
}

fn checked(state: &ProjectState, author: &EntityId, change: Change) -> Result<Change> {
    state.check(&change, author)?;
    Ok(change)
}

pub fn open_report(state: &ProjectState, author: &EntityId, form: OpenReport) -> Result<Change> {
    let sequence = state.reports.len() as u32 + 1;
    checked(
        state,
        author,
        Change::ReportOpened {
            report_id: EntityId::generated("rpt", sequence),
            sequence,
            meeting_date: form.meeting_date,
            presence: form.presence,
            diffusion_list: sorted_set(form.diffusion_list),
        },
    )
}

pub fn set_presence(
    state: &ProjectState,
    author: &EntityId,
    report: &EntityId,
    presence: Vec<PresenceEntry>,
) -> Result<Change> {
    checked(
        state,
        author,
        Change::PresenceSet {
            report_id: report.clone(),
            presence,
        },
    )
}

pub fn add_remark(
    state: &ProjectState,
    author: &EntityId,
    report: &EntityId,
    form: NewRemark,
) -> Result<Change> {
    let number = state.remarks.len() as u32 + 1;
    checked(
        state,
        author,
        Change::RemarkAdded {
            report_id: report.clone(),
            remark_id: EntityId::generated("rmk", number),
            number,
            text: form.text,
            responsible: sorted_set(form.responsible),
            lot_id: form.lot_id,
            elements: sorted_set(form.elements),
            attachments: form.attachments,
        },
    )
}

pub fn amend_remark(
    state: &ProjectState,
    author: &EntityId,
    report: &EntityId,
    remark: &EntityId,
    form: AmendRemark,
) -> Result<Change> {
    checked(
        state,
        author,
        Change::RemarkAmended {
            report_id: report.clone(),
            remark_id: remark.clone(),
            text: form.text,
            responsible: form.responsible.map(sorted_set),
        },
    )
}

pub fn set_progress(
    state: &ProjectState,
    author: &EntityId,
    report: &EntityId,
    form: SetProgress,
) -> Result<Change> {
    // Range is checked here so the payload can carry a plain percentage.
    state.require_draft_for(author, report)?;
    if !(0..=100).contains(&form.percent) {
        return Err(Error::OutOfRange {
            what: "percent",
            value: form.percent,
        });
    }
    checked(
        state,
        author,
        Change::ProgressSet {
            report_id: report.clone(),
            lot_id: form.lot_id,
            note: form.note,
            percent_complete: form.percent as u8,
        },
    )
}

pub fn close_remark(
    state: &ProjectState,
    author: &EntityId,
    report: &EntityId,
    remark: &EntityId,
) -> Result<Change> {
    checked(
        state,
        author,
        Change::RemarkClosed {
            report_id: report.clone(),
            remark_id: remark.clone(),
        },
    )
}

pub fn validate_report(state: &ProjectState, author: &EntityId, report: &EntityId) -> Result<Change> {
    checked(
        state,
        author,
        Change::ReportValidated {
            report_id: report.clone(),
        },
    )
}

pub fn react_to_remark(
    state: &ProjectState,
    author: &EntityId,
    remark: &EntityId,
    body: String,
) -> Result<Change> {
    checked(
        state,
        author,
        Change::RemarkReacted {
            remark_id: remark.clone(),
            body,
        },
    )
}

pub fn get_report<'a>(state: &'a ProjectState, report: &EntityId) -> Result<&'a MeetingReport> {
    state.report(report).ok_or_else(|| Error::unknown("report", report))
}

/// Reports in sequence order, optionally restricted to one status.
pub fn list_reports(state: &ProjectState, status: Option<ReportStatus>) -> Vec<&MeetingReport> {
    state
        .reports
        .iter()
        .filter(|r| status.is_none_or(|s| r.status == s))
        .collect()
}
