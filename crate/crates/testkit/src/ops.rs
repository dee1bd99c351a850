//! Random operation sequences, applicable either directly to a [`Platform`]
//! or as HTTP requests against the service.

use chrono::{Duration, NaiveDate};
use rand::seq::IndexedRandom;
use rand::Rng;
use serde_json::{json, Value};
use sitecoord_core::model::Role;
use sitecoord_core::plan::{Annotate, PublishVersion, RegisterPlan};
use sitecoord_core::report::{AmendRemark, Attendance, NewRemark, OpenReport, PresenceEntry, RemarkStatus, SetProgress};
use sitecoord_core::{EntityId, Platform, ProjectState, Result};

use crate::fixtures::day;

#[derive(Debug, Clone)]
pub enum Op {
    OpenReport { actor: EntityId, form: OpenReport },
    SetPresence { actor: EntityId, report: EntityId, presence: Vec<PresenceEntry> },
    AddRemark { actor: EntityId, report: EntityId, form: NewRemark },
    AmendRemark { actor: EntityId, report: EntityId, remark: EntityId, form: AmendRemark },
    SetProgress { actor: EntityId, report: EntityId, form: SetProgress },
    CloseRemark { actor: EntityId, report: EntityId, remark: EntityId },
    Validate { actor: EntityId, report: EntityId },
    React { actor: EntityId, remark: EntityId, body: String },
    RegisterPlan { actor: EntityId, form: RegisterPlan },
    Publish { actor: EntityId, plan: EntityId, form: PublishVersion },
    Annotate { actor: EntityId, plan: EntityId, version: u32, form: Annotate },
    Acknowledge { actor: EntityId, plan: EntityId, version: u32 },
}

/// An HTTP request equivalent to an operation.
#[derive(Debug, Clone, PartialEq)]
pub struct HttpCall {
    pub method: &'static str,
    pub path: String,
    pub body: Option<Value>,
    pub actor: EntityId,
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

impl Op {
    pub fn actor(&self) -> &EntityId {
        match self {
            Op::OpenReport { actor, .. }
            | Op::SetPresence { actor, .. }
            | Op::AddRemark { actor, .. }
            | Op::AmendRemark { actor, .. }
            | Op::SetProgress { actor, .. }
            | Op::CloseRemark { actor, .. }
            | Op::Validate { actor, .. }
            | Op::React { actor, .. }
            | Op::RegisterPlan { actor, .. }
            | Op::Publish { actor, .. }
            | Op::Annotate { actor, .. }
            | Op::Acknowledge { actor, .. } => actor,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Op::OpenReport { .. } => "open-report",
            Op::SetPresence { .. } => "set-presence",
            Op::AddRemark { .. } => "add-remark",
            Op::AmendRemark { .. } => "amend-remark",
            Op::SetProgress { .. } => "set-progress",
            Op::CloseRemark { .. } => "close-remark",
            Op::Validate { .. } => "validate-report",
            Op::React { .. } => "react",
            Op::RegisterPlan { .. } => "register-plan",
            Op::Publish { .. } => "publish-version",
            Op::Annotate { .. } => "annotate",
            Op::Acknowledge { .. } => "acknowledge",
        }
    }

    /// Runs the operation and serializes what it returns.
    pub fn apply(&self, platform: &Platform, project: &EntityId) -> Result<Value> {
        let p = project;
        Ok(match self.clone() {
            Op::OpenReport { actor, form } => to_json(&platform.open_report(p, &actor, form)?),
            Op::SetPresence { actor, report, presence } => {
                to_json(&platform.set_presence(p, &actor, &report, presence)?)
            }
            Op::AddRemark { actor, report, form } => to_json(&platform.add_remark(p, &actor, &report, form)?),
            Op::AmendRemark { actor, report, remark, form } => {
                to_json(&platform.amend_remark(p, &actor, &report, &remark, form)?)
            }
            Op::SetProgress { actor, report, form } => to_json(&platform.set_progress(p, &actor, &report, form)?),
            Op::CloseRemark { actor, report, remark } => {
                to_json(&platform.close_remark(p, &actor, &report, &remark)?)
            }
            Op::Validate { actor, report } => to_json(&platform.validate_report(p, &actor, &report)?),
            Op::React { actor, remark, body } => to_json(&platform.react(p, &actor, &remark, body)?),
            Op::RegisterPlan { actor, form } => to_json(&platform.register_plan(p, &actor, form)?),
            Op::Publish { actor, plan, form } => to_json(&platform.publish_version(p, &actor, &plan, form)?),
            Op::Annotate { actor, plan, version, form } => {
                to_json(&platform.annotate(p, &actor, &plan, version, form)?)
            }
            Op::Acknowledge { actor, plan, version } => to_json(&platform.acknowledge(p, &actor, &plan, version)?),
        })
    }

    pub fn request(&self, project: &EntityId) -> HttpCall {
        let base = format!("/projects/{project}");
        let (method, path, body) = match self {
            Op::OpenReport { form, .. } => ("POST", format!("{base}/reports"), Some(to_json(form))),
            Op::SetPresence { report, presence, .. } => (
                "POST",
                format!("{base}/reports/{report}/presence"),
                Some(json!({ "presence": presence })),
            ),
            Op::AddRemark { report, form, .. } => {
                ("POST", format!("{base}/reports/{report}/remarks"), Some(to_json(form)))
            }
            Op::AmendRemark { report, remark, form, .. } => (
                "PATCH",
                format!("{base}/reports/{report}/remarks/{remark}"),
                Some(to_json(form)),
            ),
            Op::SetProgress { report, form, .. } => {
                ("POST", format!("{base}/reports/{report}/progress"), Some(to_json(form)))
            }
            Op::CloseRemark { report, remark, .. } => {
                ("POST", format!("{base}/reports/{report}/close/{remark}"), None)
            }
            Op::Validate { report, .. } => ("POST", format!("{base}/reports/{report}/validate"), None),
            Op::React { remark, body, .. } => (
                "POST",
                format!("{base}/remarks/{remark}/reactions"),
                Some(json!({ "body": body })),
            ),
            Op::RegisterPlan { form, .. } => ("POST", format!("{base}/plans"), Some(to_json(form))),
            Op::Publish { plan, form, .. } => ("POST", format!("{base}/plans/{plan}/versions"), Some(to_json(form))),
            Op::Annotate { plan, version, form, .. } => (
                "POST",
                format!("{base}/plans/{plan}/versions/{version}/annotations"),
                Some(to_json(form)),
            ),
            Op::Acknowledge { plan, version, .. } => {
                ("POST", format!("{base}/plans/{plan}/versions/{version}/ack"), None)
            }
        };
        HttpCall {
            method,
            path,
            body,
            actor: self.actor().clone(),
        }
    }
}

/// Draws plausible operations for the current state. Most are valid; a
/// fraction deliberately break one rule (wrong role, frozen report, bad
/// range, unknown reference, ...).
pub struct OpGen {
    /// Probability of drawing a deliberately broken operation.
    pub invalid_rate: f64,
}

impl Default for OpGen {
    fn default() -> Self {
        OpGen { invalid_rate: 0.15 }
    }
}

fn pick<'a, T>(rng: &mut impl Rng, items: &'a [T]) -> Option<&'a T> {
    items.choose(rng)
}

fn subset(rng: &mut impl Rng, ids: &[EntityId], max: usize) -> Vec<EntityId> {
    let n = rng.random_range(0..=ids.len().min(max));
    ids.choose_multiple(rng, n).cloned().collect()
}

fn nonempty_subset(rng: &mut impl Rng, ids: &[EntityId], max: usize) -> Vec<EntityId> {
    let n = rng.random_range(1..=ids.len().min(max).max(1));
    ids.choose_multiple(rng, n).cloned().collect()
}

const PHRASES: &[&str] = &[
    "Check alignment of",
    "Missing protection on",
    "Delay reported for",
    "Synchronize work on",
    "Crack observed on",
    "Provide drawings for",
];

impl OpGen {
    pub fn next<R: Rng>(&self, rng: &mut R, state: &ProjectState) -> Op {
        let broken = rng.random_bool(self.invalid_rate);
        let p = &state.project;
        let actors: Vec<EntityId> = p.actors.iter().map(|a| a.id.clone()).collect();
        let coordinators: Vec<EntityId> = p
            .actors
            .iter()
            .filter(|a| a.role == Role::Coordinator)
            .map(|a| a.id.clone())
            .collect();
        let others: Vec<EntityId> = p
            .actors
            .iter()
            .filter(|a| a.role != Role::Coordinator)
            .map(|a| a.id.clone())
            .collect();
        let lots: Vec<EntityId> = p.lots.iter().map(|l| l.id.clone()).collect();
        let elements: Vec<EntityId> = p.elements.iter().map(|e| e.id.clone()).collect();
        let coordinator = |rng: &mut R| -> EntityId {
            if broken && !others.is_empty() && rng.random_bool(0.5) {
                pick(rng, &others).cloned().expect("non-empty")
            } else {
                pick(rng, &coordinators).cloned().expect("projects have a coordinator")
            }
        };
        let last = state.reports.last();
        let draft = last.filter(|r| !r.is_validated());
        // Broken draws may target an older, frozen report.
        let target_report = |rng: &mut R| -> Option<EntityId> {
            if broken && rng.random_bool(0.5) {
                pick(rng, &state.reports).map(|r| r.id.clone())
            } else {
                draft.map(|r| r.id.clone())
            }
        };

        let roll = rng.random_range(0..100);
        if draft.is_none() && roll < 40 {
            let next_date: NaiveDate = last
                .map(|r| r.meeting_date + Duration::days(7))
                .unwrap_or_else(|| day(2024, 1, 8));
            let presence = subset(rng, &actors, 4)
                .into_iter()
                .map(|a| PresenceEntry {
                    actor_id: a,
                    status: *[Attendance::Present, Attendance::Absent, Attendance::Excused]
                        .choose(rng)
                        .expect("non-empty"),
                })
                .collect();
            let diffusion_list = if broken && rng.random_bool(0.3) {
                vec![]
            } else {
                nonempty_subset(rng, &actors, 4)
            };
            return Op::OpenReport {
                actor: coordinator(rng),
                form: OpenReport {
                    meeting_date: next_date,
                    presence,
                    diffusion_list,
                },
            };
        }
        if let Some(report) = target_report(rng).filter(|_| roll < 70) {
            let actor = coordinator(rng);
            let open_remarks: Vec<EntityId> = state
                .remarks
                .iter()
                .filter(|r| r.status == RemarkStatus::Open || broken)
                .map(|r| r.id.clone())
                .collect();
            match rng.random_range(0..10) {
                0..=3 => {
                    let text = if broken && rng.random_bool(0.3) {
                        "  ".to_owned()
                    } else {
                        format!(
                            "{} {}",
                            PHRASES.choose(rng).expect("non-empty"),
                            pick(rng, &elements).map(|e| e.as_str()).unwrap_or("site")
                        )
                    };
                    let mut els = subset(rng, &elements, 2);
                    if broken && rng.random_bool(0.3) {
                        els.push(EntityId::from("el-unknown"));
                    }
                    return Op::AddRemark {
                        actor,
                        report,
                        form: NewRemark {
                            text,
                            responsible: nonempty_subset(rng, &actors, 2),
                            lot_id: pick(rng, &lots).cloned().expect("a lot"),
                            elements: els,
                            attachments: vec![],
                        },
                    };
                }
                4 => {
                    let pct = if broken {
                        *[-5i64, 101, 250].choose(rng).expect("non-empty")
                    } else {
                        rng.random_range(0..=100)
                    };
                    return Op::SetProgress {
                        actor,
                        report,
                        form: SetProgress {
                            lot_id: pick(rng, &lots).cloned().expect("a lot"),
                            note: format!("progress {pct}"),
                            percent: pct,
                        },
                    };
                }
                5 if !open_remarks.is_empty() => {
                    return Op::CloseRemark {
                        actor,
                        report,
                        remark: pick(rng, &open_remarks).cloned().expect("non-empty"),
                    };
                }
                6 if !state.remarks.is_empty() => {
                    let remark = pick(rng, &state.remarks).expect("non-empty").id.clone();
                    return Op::AmendRemark {
                        actor,
                        report,
                        remark,
                        form: AmendRemark {
                            text: Some(format!("Amended: {}", PHRASES.choose(rng).expect("non-empty"))),
                            responsible: rng
                                .random_bool(0.5)
                                .then(|| nonempty_subset(rng, &actors, 2)),
                        },
                    };
                }
                7 => {
                    let presence = nonempty_subset(rng, &actors, 4)
                        .into_iter()
                        .map(|a| PresenceEntry {
                            actor_id: a,
                            status: Attendance::Present,
                        })
                        .collect();
                    return Op::SetPresence {
                        actor,
                        report,
                        presence,
                    };
                }
                _ => return Op::Validate { actor, report },
            }
        }
        if !state.remarks.is_empty() && roll < 80 {
            let body = if broken && rng.random_bool(0.3) {
                String::new()
            } else {
                "Noted, will follow up".to_owned()
            };
            return Op::React {
                actor: pick(rng, &actors).cloned().expect("an actor"),
                remark: pick(rng, &state.remarks).expect("non-empty").id.clone(),
                body,
            };
        }
        // Plan exchange.
        let versioned: Vec<(EntityId, u32)> = state
            .plans
            .iter()
            .flat_map(|p| p.versions.iter().map(|v| (v.plan_id.clone(), v.version)))
            .collect();
        let choice = rng.random_range(0..10);
        if state.plans.is_empty() || choice < 2 {
            let code = if broken && !state.plans.is_empty() {
                state.plans[0].document.code.clone()
            } else {
                format!("PL-{:03}", state.plans.len() + 1)
            };
            return Op::RegisterPlan {
                actor: pick(rng, &actors).cloned().expect("an actor"),
                form: RegisterPlan {
                    title: format!("Plan of {}", pick(rng, &elements).map(|e| e.as_str()).unwrap_or("site")),
                    lot_id: pick(rng, &lots).cloned().expect("a lot"),
                    elements: subset(rng, &elements, 2),
                    code,
                },
            };
        }
        if versioned.is_empty() || choice < 5 {
            let plan = pick(rng, &state.plans).expect("non-empty").document.id.clone();
            let diffusion_list = if broken && rng.random_bool(0.3) {
                vec![]
            } else {
                nonempty_subset(rng, &actors, 4)
            };
            return Op::Publish {
                actor: pick(rng, &actors).cloned().expect("an actor"),
                plan,
                form: PublishVersion {
                    content_digest: format!("sha256:{:016x}", rng.random::<u64>()),
                    diffusion_list,
                },
            };
        }
        let (plan, version) = pick(rng, &versioned).cloned().expect("non-empty");
        if choice < 7 {
            let (version, body) = match (broken, rng.random_bool(0.5)) {
                (true, true) => (version, String::new()),
                (true, false) => (version + 100, "Dimension to confirm".to_owned()),
                _ => (version, "Dimension to confirm".to_owned()),
            };
            return Op::Annotate {
                actor: pick(rng, &actors).cloned().expect("an actor"),
                plan,
                version,
                form: Annotate {
                    anchor: format!("grid {}", rng.random_range(1..9)),
                    body,
                },
            };
        }
        // Mostly a pending recipient; broken draws pick anyone.
        let pending: Vec<EntityId> = state
            .diffusion_records(&plan, version)
            .filter(|d| d.acknowledged_at.is_none() || broken)
            .map(|d| d.recipient.clone())
            .collect();
        let actor = if broken || pending.is_empty() {
            pick(rng, &actors).cloned().expect("an actor")
        } else {
            pick(rng, &pending).cloned().expect("non-empty")
        };
        Op::Acknowledge { actor, plan, version }
    }
}
