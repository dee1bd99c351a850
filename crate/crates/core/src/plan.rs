//! Plan exchange: registration under a classification code, versioned
//! publication with a diffusion list, annotation, acknowledgment and
//! diffusion monitoring.

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::changes::Change;
use crate::error::{Error, Result};
use crate::ids::EntityId;
use crate::model::Role;
use crate::state::ProjectState;
use crate::time::Timestamp;

/// Roles allowed to register plans.
pub const PLAN_AUTHOR_ROLES: [Role; 3] = [Role::Coordinator, Role::Architect, Role::Engineer];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlanDocument {
    pub id: EntityId,
    pub title: String,
    pub lot_id: EntityId,
    pub elements: Vec<EntityId>,
    pub code: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Annotation {
    pub author: EntityId,
    pub at: Timestamp,
    pub anchor: String,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlanVersion {
    pub plan_id: EntityId,
    pub version: u32,
    pub published_by: EntityId,
    pub published_at: Timestamp,
    pub content_digest: String,
    pub annotations: Vec<Annotation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiffusionRecord {
    pub plan_id: EntityId,
    pub version: u32,
    pub recipient: EntityId,
    pub notified_at: Timestamp,
    pub acknowledged_at: Option<Timestamp>,
}

/// A registered plan with its published versions, oldest first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlanRecord {
    pub document: PlanDocument,
    pub versions: Vec<PlanVersion>,
}

impl PlanRecord {
    pub fn version(&self, version: u32) -> Option<&PlanVersion> {
        version
            .checked_sub(1)
            .and_then(|i| self.versions.get(i as usize))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RegisterPlan {
    pub title: String,
    pub lot_id: EntityId,
    #[serde(default)]
    pub elements: Vec<EntityId>,
    pub code: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PublishVersion {
    pub content_digest: String,
    pub diffusion_list: Vec<EntityId>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Annotate {
    pub anchor: String,
    pub body: String,
}

fn sorted_set(mut ids: Vec<EntityId>) -> Vec<EntityId> {
    ids.sort();
    ids.dedup();
    ids
}

pub fn register_plan(state: &ProjectState, author: &EntityId, form: RegisterPlan) -> Result<Change> {
    let n = state.plans.len() as u32 + 1;
    let change = Change::PlanRegistered {
        plan_id: EntityId::generated("pln", n),
        title: form.title,
        lot_id: form.lot_id,
        elements: sorted_set(form.elements),
        code: form.code,
    };
    state.check(&change, author)?;
    Ok(change)
}

pub fn publish_version(
    state: &ProjectState,
    publisher: &EntityId,
    plan: &EntityId,
    form: PublishVersion,
) -> Result<Change> {
    let version = state
        .plan(plan)
        .map(|p| p.versions.len() as u32 + 1)
        .unwrap_or(1);
    let change = Change::PlanPublished {
        plan_id: plan.clone(),
        version,
        content_digest: form.content_digest,
        diffusion_list: sorted_set(form.diffusion_list),
    };
    state.check(&change, publisher)?;
    Ok(change)
}

pub fn annotate(
    state: &ProjectState,
    author: &EntityId,
    plan: &EntityId,
    version: u32,
    form: Annotate,
) -> Result<Change> {
    let change = Change::PlanAnnotated {
        plan_id: plan.clone(),
        version,
        anchor: form.anchor,
        body: form.body,
    };
    state.check(&change, author)?;
    Ok(change)
}

pub fn acknowledge(
    state: &ProjectState,
    recipient: &EntityId,
    plan: &EntityId,
    version: u32,
) -> Result<Change> {
    let change = Change::PlanAcknowledged {
        plan_id: plan.clone(),
        version,
    };
    state.check(&change, recipient)?;
    Ok(change)
}

/// Who has been notified of a plan version and who has acknowledged it.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiffusionStatus {
    pub plan_id: EntityId,
    pub version: u32,
    pub notified: usize,
    pub acknowledged: usize,
    pub pending: Vec<EntityId>,
    pub recipients: Vec<DiffusionRecord>,
}

// Field order is part of the dashboard polling contract.
impl Serialize for DiffusionStatus {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("DiffusionStatus", 6)?;
        s.serialize_field("planId", &self.plan_id)?;
        s.serialize_field("version", &self.version)?;
        s.serialize_field("notified", &self.notified)?;
        s.serialize_field("acknowledged", &self.acknowledged)?;
        s.serialize_field("pending", &self.pending)?;
        s.serialize_field("recipients", &self.recipients)?;
        s.end()
    }
}

pub fn diffusion_status(state: &ProjectState, plan: &EntityId, version: u32) -> Result<DiffusionStatus> {
    let record = state.require_plan(plan)?;
    if record.version(version).is_none() {
        return Err(Error::UnknownId {
            kind: "plan version",
            id: EntityId::new(format!("{plan}@{version}")),
        });
    }
    let mut recipients: Vec<DiffusionRecord> = state
        .diffusion_records(plan, version)
        .cloned()
        .collect();
    recipients.sort_by(|a, b| a.recipient.cmp(&b.recipient));
    let pending: Vec<EntityId> = recipients
        .iter()
        .filter(|r| r.acknowledged_at.is_none())
        .map(|r| r.recipient.clone())
        .collect();
    Ok(DiffusionStatus {
        plan_id: plan.clone(),
        version,
        notified: recipients.len(),
        acknowledged: recipients.len() - pending.len(),
        pending,
        recipients,
    })
}
