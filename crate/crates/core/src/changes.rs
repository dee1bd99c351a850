//! The kinds of change recorded in the exchange log, one per mutating
//! operation. A change is written as a `kind` tag plus a structured payload.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::ids::EntityId;
use crate::model::Project;
use crate::report::PresenceEntry;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all_fields = "camelCase")]
pub enum Change {
    #[serde(rename = "project.imported")]
    ProjectImported { project: Project },
    #[serde(rename = "report.opened")]
    ReportOpened {
        report_id: EntityId,
        sequence: u32,
        meeting_date: NaiveDate,
        presence: Vec<PresenceEntry>,
        diffusion_list: Vec<EntityId>,
    },
    #[serde(rename = "report.presenceSet")]
    PresenceSet {
        report_id: EntityId,
        presence: Vec<PresenceEntry>,
    },
    #[serde(rename = "report.progressSet")]
    ProgressSet {
        report_id: EntityId,
        lot_id: EntityId,
        note: String,
        percent_complete: u8,
    },
    #[serde(rename = "report.validated")]
    ReportValidated { report_id: EntityId },
    #[serde(rename = "remark.added")]
    RemarkAdded {
        report_id: EntityId,
        remark_id: EntityId,
        number: u32,
        text: String,
        responsible: Vec<EntityId>,
        lot_id: EntityId,
        elements: Vec<EntityId>,
        attachments: Vec<String>,
    },
    #[serde(rename = "remark.amended")]
    RemarkAmended {
        report_id: EntityId,
        remark_id: EntityId,
        text: Option<String>,
        responsible: Option<Vec<EntityId>>,
    },
    #[serde(rename = "remark.closed")]
    RemarkClosed {
        report_id: EntityId,
        remark_id: EntityId,
    },
    #[serde(rename = "remark.reacted")]
    RemarkReacted { remark_id: EntityId, body: String },
    #[serde(rename = "plan.registered")]
    PlanRegistered {
        plan_id: EntityId,
        title: String,
        lot_id: EntityId,
        elements: Vec<EntityId>,
        code: String,
    },
    #[serde(rename = "plan.published")]
    PlanPublished {
        plan_id: EntityId,
        version: u32,
        content_digest: String,
        diffusion_list: Vec<EntityId>,
    },
    #[serde(rename = "plan.annotated")]
    PlanAnnotated {
        plan_id: EntityId,
        version: u32,
        anchor: String,
        body: String,
    },
    #[serde(rename = "plan.acknowledged")]
    PlanAcknowledged { plan_id: EntityId, version: u32 },
}

impl Change {
    pub fn kind(&self) -> &'static str {
        match self {
            Change::ProjectImported { .. } => "project.imported",
            Change::ReportOpened { .. } => "report.opened",
            Change::PresenceSet { .. } => "report.presenceSet",
            Change::ProgressSet { .. } => "report.progressSet",
            Change::ReportValidated { .. } => "report.validated",
            Change::RemarkAdded { .. } => "remark.added",
            Change::RemarkAmended { .. } => "remark.amended",
            Change::RemarkClosed { .. } => "remark.closed",
            Change::RemarkReacted { .. } => "remark.reacted",
            Change::PlanRegistered { .. } => "plan.registered",
            Change::PlanPublished { .. } => "plan.published",
            Change::PlanAnnotated { .. } => "plan.annotated",
            Change::PlanAcknowledged { .. } => "plan.acknowledged",
        }
    }

    /// Splits the change into its wire `kind` and `payload`.
    pub fn to_parts(&self) -> (String, Value) {
        let Value::Object(mut map) = serde_json::to_value(self).expect("change serializes") else {
            unreachable!("adjacently tagged enums serialize to objects")
        };
        let payload = map.remove("payload").unwrap_or(Value::Null);
        (self.kind().to_owned(), payload)
    }

    pub fn from_parts(kind: &str, payload: Value) -> std::result::Result<Self, serde_json::Error> {
        let mut map = serde_json::Map::new();
        map.insert("kind".into(), Value::String(kind.to_owned()));
        map.insert("payload".into(), payload);
        serde_json::from_value(Value::Object(map))
    }

    /// Entities this change touches, other than its author.
    pub fn references(&self) -> Vec<SubjectRef> {
        use SubjectRef as S;
        match self {
            Change::ProjectImported { .. } => Vec::new(),
            Change::ReportOpened {
                report_id,
                diffusion_list,
                ..
            } => std::iter::once(S::Report(report_id.clone()))
                .chain(diffusion_list.iter().cloned().map(S::Actor))
                .collect(),
            Change::PresenceSet { report_id, .. }
            | Change::ProgressSet { report_id, .. }
            | Change::ReportValidated { report_id } => vec![S::Report(report_id.clone())],
            Change::RemarkAdded {
                report_id,
                remark_id,
                responsible,
                ..
            } => [S::Remark(remark_id.clone()), S::Report(report_id.clone())]
                .into_iter()
                .chain(responsible.iter().cloned().map(S::Actor))
                .collect(),
            Change::RemarkAmended {
                report_id,
                remark_id,
                responsible,
                ..
            } => [S::Remark(remark_id.clone()), S::Report(report_id.clone())]
                .into_iter()
                .chain(responsible.iter().flatten().cloned().map(S::Actor))
                .collect(),
            Change::RemarkClosed {
                report_id,
                remark_id,
            } => vec![S::Remark(remark_id.clone()), S::Report(report_id.clone())],
            Change::RemarkReacted { remark_id, .. } => vec![S::Remark(remark_id.clone())],
            Change::PlanRegistered { plan_id, .. }
            | Change::PlanAnnotated { plan_id, .. }
            | Change::PlanAcknowledged { plan_id, .. } => vec![S::Plan(plan_id.clone())],
            Change::PlanPublished {
                plan_id,
                diffusion_list,
                ..
            } => std::iter::once(S::Plan(plan_id.clone()))
                .chain(diffusion_list.iter().cloned().map(S::Actor))
                .collect(),
        }
    }

    /// One-line human description, used in traces.
    pub fn summary(&self) -> String {
        match self {
            Change::ProjectImported { project } => format!("project `{}` imported", project.name),
            Change::ReportOpened {
                sequence,
                meeting_date,
                ..
            } => format!("report #{sequence} opened for meeting of {meeting_date}"),
            Change::PresenceSet { presence, .. } => {
                format!("presence list set ({} entries)", presence.len())
            }
            Change::ProgressSet {
                lot_id,
                percent_complete,
                ..
            } => format!("progress of lot {lot_id} set to {percent_complete}%"),
            Change::ReportValidated { report_id } => format!("report {report_id} validated"),
            Change::RemarkAdded { number, .. } => format!("remark #{number} added"),
            Change::RemarkAmended { remark_id, .. } => format!("remark {remark_id} amended"),
            Change::RemarkClosed { remark_id, .. } => format!("remark {remark_id} closed"),
            Change::RemarkReacted { remark_id, .. } => format!("reaction on remark {remark_id}"),
            Change::PlanRegistered { code, .. } => format!("plan {code} registered"),
            Change::PlanPublished {
                version,
                diffusion_list,
                ..
            } => format!(
                "version {version} published to {} recipient(s)",
                diffusion_list.len()
            ),
            Change::PlanAnnotated { version, .. } => format!("version {version} annotated"),
            Change::PlanAcknowledged { version, .. } => format!("version {version} acknowledged"),
        }
    }
}

/// A traceable entity, written `kind:id` (e.g. `plan:pln-000001`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SubjectRef {
    Plan(EntityId),
    Remark(EntityId),
    Actor(EntityId),
    Report(EntityId),
}

impl SubjectRef {
    pub fn id(&self) -> &EntityId {
        match self {
            SubjectRef::Plan(id)
            | SubjectRef::Remark(id)
            | SubjectRef::Actor(id)
            | SubjectRef::Report(id) => id,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SubjectRef::Plan(_) => "plan",
            SubjectRef::Remark(_) => "remark",
            SubjectRef::Actor(_) => "actor",
            SubjectRef::Report(_) => "report",
        }
    }
}

impl fmt::Display for SubjectRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind(), self.id())
    }
}

impl FromStr for SubjectRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, id) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidInput(format!("subject `{s}` is not of the form kind:id")))?;
        let id = EntityId::from(id);
        match kind {
            "plan" => Ok(SubjectRef::Plan(id)),
            "remark" => Ok(SubjectRef::Remark(id)),
            "actor" => Ok(SubjectRef::Actor(id)),
            "report" => Ok(SubjectRef::Report(id)),
            other => Err(Error::InvalidInput(format!("unknown subject kind `{other}`"))),
        }
    }
}

impl Serialize for SubjectRef {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SubjectRef {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
