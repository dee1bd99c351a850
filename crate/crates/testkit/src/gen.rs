//! Seeded random projects.

use chrono::Duration;
use rand::seq::IndexedRandom;
use rand::Rng;
use sitecoord_core::model::{Actor, BuildingElement, Lot, Project, Role, Task};
use sitecoord_core::report::RemarkStatus;
use sitecoord_core::search::{Filter, ScopeLevel, SearchScope};
use sitecoord_core::state::ProjectState;
use sitecoord_core::EntityId;

use crate::fixtures::day;

const WORDS: &[&str] = &[
    "wall", "slab", "beam", "column", "roof", "stair", "facade", "window", "door", "duct", "pipe", "screed",
    "truss", "lintel", "footing",
];

const ROLES: &[Role] = &[Role::Owner, Role::Architect, Role::Engineer, Role::Contractor, Role::Other];

/// Entity counts of a generated project.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub actors: usize,
    pub lots: usize,
    pub elements: usize,
    pub tasks: usize,
}

impl Shape {
    /// Small random shape: at most `max_total` entities in all.
    pub fn random(rng: &mut impl Rng, max_total: usize) -> Self {
        let mut shape = Shape {
            actors: rng.random_range(1..=6),
            lots: rng.random_range(1..=4),
            elements: rng.random_range(0..=10),
            tasks: rng.random_range(0..=8),
        };
        while shape.total() > max_total {
            if shape.elements > 0 {
                shape.elements -= 1;
            } else if shape.tasks > 0 {
                shape.tasks -= 1;
            } else if shape.actors > 1 {
                shape.actors -= 1;
            } else {
                break;
            }
        }
        shape
    }

    pub fn total(&self) -> usize {
        self.actors + self.lots + self.elements + self.tasks
    }
}

fn label(rng: &mut impl Rng) -> String {
    let word = WORDS.choose(rng).expect("non-empty");
    // A small range so that equal labels occur.
    format!("{word} {}", rng.random_range(1..=5))
}

/// A project passing every integrity rule. Actor `act-1` always coordinates;
/// further coordinators may appear.
pub fn random_project(rng: &mut impl Rng, project_id: &str, shape: Shape) -> Project {
    let actors = (1..=shape.actors.max(1))
        .map(|i| Actor {
            id: EntityId::new(format!("act-{i}")),
            name: format!("Actor {i}"),
            organization: format!("Org {}", rng.random_range(1..=3)),
            role: if i == 1 || rng.random_bool(0.15) {
                Role::Coordinator
            } else {
                *ROLES.choose(rng).expect("non-empty")
            },
        })
        .collect();
    let lots: Vec<Lot> = (1..=shape.lots.max(1))
        .map(|i| Lot {
            id: EntityId::new(format!("lot-{i}")),
            code: format!("{i:02}"),
            label: format!("Lot {i}"),
        })
        .collect();
    let mut elements: Vec<BuildingElement> = Vec::new();
    for i in 1..=shape.elements {
        let parent = if !elements.is_empty() && rng.random_bool(0.4) {
            elements.choose(rng).map(|e| e.id.clone())
        } else {
            None
        };
        elements.push(BuildingElement {
            id: EntityId::new(format!("el-{i}")),
            label: label(rng),
            element_type: WORDS.choose(rng).expect("non-empty").to_string(),
            parent,
            bounds: None,
        });
    }
    let mut tasks: Vec<Task> = Vec::new();
    for i in 1..=shape.tasks {
        let start = day(2024, 1, 1) + Duration::days(rng.random_range(0..120));
        let end = start + Duration::days(rng.random_range(0..30));
        let n_el = rng.random_range(0..=elements.len().min(3));
        let mut els: Vec<EntityId> = elements.choose_multiple(rng, n_el).map(|e| e.id.clone()).collect();
        els.sort();
        let n_pred = rng.random_range(0..=tasks.len().min(2));
        let mut preds: Vec<EntityId> = tasks.choose_multiple(rng, n_pred).map(|t| t.id.clone()).collect();
        preds.sort();
        tasks.push(Task {
            id: EntityId::new(format!("tsk-{i}")),
            label: label(rng),
            start,
            end,
            lot: lots.choose(rng).expect("at least one lot").id.clone(),
            elements: els,
            predecessors: preds,
        });
    }
    Project {
        id: EntityId::new(project_id),
        name: format!("Project {project_id}"),
        actors,
        lots,
        elements,
        tasks,
    }
}

fn pick_id<'a>(rng: &mut impl Rng, ids: impl Iterator<Item = &'a EntityId>, unknown: &str) -> EntityId {
    let ids: Vec<_> = ids.collect();
    if ids.is_empty() || rng.random_bool(0.08) {
        return EntityId::from(unknown);
    }
    (*ids.choose(rng).expect("non-empty")).clone()
}

/// A random search request over `portfolio`: mostly well-formed and
/// resolvable, occasionally naming unknown ids, a malformed scope or a
/// reversed date range.
pub fn random_query(rng: &mut impl Rng, portfolio: &[ProjectState]) -> (SearchScope, Filter) {
    let project = portfolio.choose(rng);
    let project_id = project.map_or(EntityId::from("site-none"), |s| s.project.id.clone());
    let mut scope = match rng.random_range(0..3) {
        0 => SearchScope::portfolio(),
        1 => SearchScope::project(if rng.random_bool(0.05) { EntityId::from("site-none") } else { project_id }),
        _ => {
            let report = pick_id(rng, project.into_iter().flat_map(|s| s.reports.iter().map(|r| &r.id)), "rpt-999999");
            SearchScope::report(project_id, report)
        }
    };
    if scope.level != ScopeLevel::Portfolio && rng.random_bool(0.03) {
        scope.project_id = None;
    }
    let source = portfolio.choose(rng);
    let mut filter = Filter::default();
    if let Some(s) = source {
        let p = &s.project;
        if rng.random_bool(0.4) {
            filter.responsible = Some(pick_id(rng, p.actors.iter().map(|a| &a.id), "act-999"));
        }
        if rng.random_bool(0.4) {
            filter.lot = Some(pick_id(rng, p.lots.iter().map(|l| &l.id), "lot-999"));
        }
        if rng.random_bool(0.3) {
            filter.element = Some(pick_id(rng, p.elements.iter().map(|e| &e.id), "el-999"));
        }
        if rng.random_bool(0.3) {
            let dates: Vec<_> = s.reports.iter().map(|r| r.meeting_date).collect();
            let base = dates.choose(rng).copied().unwrap_or(day(2024, 1, 8));
            let from = base - Duration::days(rng.random_range(-7..=14));
            let to = from + Duration::days(rng.random_range(-3..=40));
            filter.date_range = Some((from, to));
        }
    }
    if rng.random_bool(0.4) {
        filter.status = Some(if rng.random_bool(0.5) { RemarkStatus::Open } else { RemarkStatus::Closed });
    }
    (scope, filter)
}
