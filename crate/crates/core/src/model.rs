//! Shared project context: actors, lots, the building-element forest and the
//! schedule. Every other module refers to these entities by id.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::EntityId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Owner,
    Architect,
    Engineer,
    Contractor,
    Coordinator,
    Other,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Owner => "owner",
            Role::Architect => "architect",
            Role::Engineer => "engineer",
            Role::Contractor => "contractor",
            Role::Coordinator => "coordinator",
            Role::Other => "other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Actor {
    pub id: EntityId,
    pub name: String,
    pub organization: String,
    pub role: Role,
}

/// A trade work package (masonry, roofing, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Lot {
    pub id: EntityId,
    pub code: String,
    pub label: String,
}

/// Axis-aligned box in meters, used to draw the desk-scale mock-up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundingBox {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl BoundingBox {
    pub fn is_well_formed(&self) -> bool {
        self.min.iter().zip(&self.max).all(|(lo, hi)| lo <= hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct BuildingElement {
    pub id: EntityId,
    pub label: String,
    pub element_type: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<EntityId>,
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundingBox>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Task {
    pub id: EntityId,
    pub label: String,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub lot: EntityId,
    #[serde(default)]
    pub elements: Vec<EntityId>,
    #[serde(default)]
    pub predecessors: Vec<EntityId>,
}

/// The project interchange document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Project {
    pub id: EntityId,
    pub name: String,
    #[serde(default)]
    pub actors: Vec<Actor>,
    #[serde(default)]
    pub lots: Vec<Lot>,
    #[serde(default)]
    pub elements: Vec<BuildingElement>,
    #[serde(default)]
    pub tasks: Vec<Task>,
}

/// Position-annotated failure to read an interchange file.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    EmptyId,
    DuplicateId,
    ReservedId,
    DuplicateLotCode,
    UnknownParent,
    ElementForestBroken,
    InvalidBox,
    InvalidTaskDates,
    UnknownLot,
    UnknownElement,
    UnknownPredecessor,
    TaskCycle,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::EmptyId => "empty id",
            Rule::DuplicateId => "duplicate id",
            Rule::ReservedId => "reserved id",
            Rule::DuplicateLotCode => "duplicate lot code",
            Rule::UnknownParent => "unknown parent",
            Rule::ElementForestBroken => "element forest broken",
            Rule::InvalidBox => "invalid box",
            Rule::InvalidTaskDates => "invalid task dates",
            Rule::UnknownLot => "unknown lot",
            Rule::UnknownElement => "unknown element",
            Rule::UnknownPredecessor => "unknown predecessor",
            Rule::TaskCycle => "task cycle",
        }
    }
}

/// One broken integrity rule, naming the offending entity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub entity: EntityId,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} ({})", self.entity, self.rule.as_str(), self.detail)
    }
}

impl Project {
    pub fn empty(id: impl Into<EntityId>, name: impl Into<String>) -> Self {
        Project {
            id: id.into(),
            name: name.into(),
            actors: Vec::new(),
            lots: Vec::new(),
            elements: Vec::new(),
            tasks: Vec::new(),
        }
    }

    pub fn from_json(text: &str) -> std::result::Result<Project, ParseError> {
        serde_json::from_str(text).map_err(|e| ParseError {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("project serializes")
    }

    pub fn actor(&self, id: &EntityId) -> Option<&Actor> {
        self.actors.iter().find(|a| &a.id == id)
    }

    pub fn lot(&self, id: &EntityId) -> Option<&Lot> {
        self.lots.iter().find(|l| &l.id == id)
    }

    pub fn element(&self, id: &EntityId) -> Option<&BuildingElement> {
        self.elements.iter().find(|e| &e.id == id)
    }

    pub fn task(&self, id: &EntityId) -> Option<&Task> {
        self.tasks.iter().find(|t| &t.id == id)
    }

    pub fn require_actor(&self, id: &EntityId) -> Result<&Actor> {
        self.actor(id).ok_or_else(|| Error::unknown("actor", id))
    }

    pub fn require_lot(&self, id: &EntityId) -> Result<&Lot> {
        self.lot(id).ok_or_else(|| Error::unknown("lot", id))
    }

    pub fn require_element(&self, id: &EntityId) -> Result<&BuildingElement> {
        self.element(id).ok_or_else(|| Error::unknown("building element", id))
    }

    /// Children of every element, keyed by parent id, in declaration order.
    pub fn children_index(&self) -> HashMap<&EntityId, Vec<&EntityId>> {
        let mut children: HashMap<&EntityId, Vec<&EntityId>> = HashMap::new();
        for e in &self.elements {
            if let Some(parent) = &e.parent {
                children.entry(parent).or_default().push(&e.id);
            }
        }
        children
    }

    /// Every id declared in the project, whatever its collection.
    pub fn all_ids(&self) -> impl Iterator<Item = &EntityId> {
        self.actors
            .iter()
            .map(|a| &a.id)
            .chain(self.lots.iter().map(|l| &l.id))
            .chain(self.elements.iter().map(|e| &e.id))
            .chain(self.tasks.iter().map(|t| &t.id))
    }
}

/// Checks every structural invariant of a project. An empty result means the
/// project is usable by all other modules.
pub fn validate_integrity(project: &Project) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |entity: &EntityId, rule: Rule, detail: String| {
        out.push(Violation {
            entity: entity.clone(),
            rule,
            detail,
        })
    };

    if project.id.is_empty() {
        push(&project.id, Rule::EmptyId, "project id is empty".into());
    }
    let mut seen: BTreeSet<&EntityId> = BTreeSet::new();
    for id in project.all_ids() {
        if id.is_empty() {
            push(id, Rule::EmptyId, "entity id is empty".into());
        } else if !seen.insert(id) {
            push(id, Rule::DuplicateId, "id declared more than once".into());
        }
        if id.is_generated_shape() {
            push(
                id,
                Rule::ReservedId,
                "id shape is reserved for platform-generated entities".into(),
            );
        }
    }

    let mut codes: BTreeSet<&str> = BTreeSet::new();
    for lot in &project.lots {
        if !codes.insert(lot.code.as_str()) {
            push(&lot.id, Rule::DuplicateLotCode, format!("code `{}`", lot.code));
        }
    }

    let element_ids: BTreeSet<&EntityId> = project.elements.iter().map(|e| &e.id).collect();
    for e in &project.elements {
        if let Some(parent) = &e.parent {
            if !element_ids.contains(parent) {
                push(&e.id, Rule::UnknownParent, format!("parent `{parent}`"));
            }
        }
        if let Some(b) = &e.bounds {
            if !b.is_well_formed() {
                push(&e.id, Rule::InvalidBox, "min exceeds max on some axis".into());
            }
        }
    }
    for cycle in element_parent_cycles(project) {
        let head = cycle.iter().min().expect("cycle is non-empty");
        push(
            head,
            Rule::ElementForestBroken,
            format!("parent chain loops through {}", join_ids(&cycle)),
        );
    }

    let lot_ids: BTreeSet<&EntityId> = project.lots.iter().map(|l| &l.id).collect();
    let task_ids: BTreeSet<&EntityId> = project.tasks.iter().map(|t| &t.id).collect();
    for t in &project.tasks {
        if t.start > t.end {
            push(
                &t.id,
                Rule::InvalidTaskDates,
                format!("start {} is after end {}", t.start, t.end),
            );
        }
        if !lot_ids.contains(&t.lot) {
            push(&t.id, Rule::UnknownLot, format!("lot `{}`", t.lot));
        }
        for e in &t.elements {
            if !element_ids.contains(e) {
                push(&t.id, Rule::UnknownElement, format!("element `{e}`"));
            }
        }
        for p in &t.predecessors {
            if !task_ids.contains(p) {
                push(&t.id, Rule::UnknownPredecessor, format!("task `{p}`"));
            }
        }
    }
    for cycle in task_cycles(project) {
        let head = cycle.iter().min().expect("cycle is non-empty");
        push(
            head,
            Rule::TaskCycle,
            format!("predecessors loop through {}", join_ids(&cycle)),
        );
    }
    out
}

fn join_ids(ids: &[EntityId]) -> String {
    ids.iter().map(EntityId::as_str).collect::<Vec<_>>().join(", ")
}

/// Each parent-pointer cycle once, members sorted.
fn element_parent_cycles(project: &Project) -> Vec<Vec<EntityId>> {
    let parent: HashMap<&EntityId, &EntityId> = project
        .elements
        .iter()
        .filter_map(|e| e.parent.as_ref().map(|p| (&e.id, p)))
        .collect();
    // 1 = on the current walk, 2 = settled
    let mut state: HashMap<&EntityId, u8> = HashMap::new();
    let mut cycles = Vec::new();
    for e in &project.elements {
        if state.contains_key(&e.id) {
            continue;
        }
        let mut walk = Vec::new();
        let mut cur = Some(&e.id);
        while let Some(id) = cur {
            match state.get(id) {
                Some(1) => {
                    let at = walk.iter().position(|w| *w == id).expect("on walk");
                    let mut cycle: Vec<EntityId> = walk[at..].iter().map(|w: &&EntityId| (*w).clone()).collect();
                    cycle.sort();
                    cycles.push(cycle);
                    break;
                }
                Some(_) => break,
                None => {
                    state.insert(id, 1);
                    walk.push(id);
                    cur = parent.get(id).copied();
                }
            }
        }
        for id in walk {
            state.insert(id, 2);
        }
    }
    cycles.sort();
    cycles
}

/// Strongly connected components of the predecessor relation that contain a
/// cycle (size > 1, or a task listing itself).
fn task_cycles(project: &Project) -> Vec<Vec<EntityId>> {
    let mut index: BTreeMap<&EntityId, usize> = BTreeMap::new();
    for t in &project.tasks {
        let next = index.len();
        index.entry(&t.id).or_insert(next);
    }
    let n = index.len();
    let mut ids: Vec<&EntityId> = vec![&project.id; n];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in &project.tasks {
        let from = index[&t.id];
        ids[from] = &t.id;
        for p in &t.predecessors {
            if let Some(&to) = index.get(p) {
                adj[from].push(to);
            }
        }
    }

    // Iterative Tarjan.
    const UNSET: usize = usize::MAX;
    let mut order = vec![UNSET; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut cycles = Vec::new();
    for root in 0..n {
        if order[root] != UNSET {
            continue;
        }
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        order[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut next)) = frames.last_mut() {
            if *next < adj[v].len() {
                let w = adj[v][*next];
                *next += 1;
                if order[w] == UNSET {
                    order[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(order[w]);
                }
            } else {
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == order[v] {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    let cyclic = component.len() > 1 || adj[v].contains(&v);
                    if cyclic {
                        let mut members: Vec<EntityId> =
                            component.iter().map(|&i| ids[i].clone()).collect();
                        members.sort();
                        cycles.push(members);
                    }
                }
            }
        }
    }
    cycles.sort();
    cycles
}

/// The root element plus all of its transitive children.
pub fn element_subtree(project: &Project, root: &EntityId) -> Result<BTreeSet<EntityId>> {
    project.require_element(root)?;
    let children = project.children_index();
    let mut out = BTreeSet::new();
    let mut queue = vec![root];
    while let Some(id) = queue.pop() {
        if !out.insert(id.clone()) {
            continue;
        }
        if let Some(kids) = children.get(id) {
            queue.extend(kids.iter().copied());
        }
    }
    Ok(out)
}

/// Tasks building the element or anything below it.
pub fn tasks_for_element(project: &Project, element: &EntityId) -> Result<BTreeSet<EntityId>> {
    let subtree = element_subtree(project, element)?;
    Ok(project
        .tasks
        .iter()
        .filter(|t| t.elements.iter().any(|e| subtree.contains(e)))
        .map(|t| t.id.clone())
        .collect())
}

/// Tasks whose closed date interval meets `[from, to]`.
pub fn schedule_window(
    project: &Project,
    from: NaiveDate,
    to: NaiveDate,
) -> Result<BTreeSet<EntityId>> {
    if from > to {
        return Err(Error::InvalidRange {
            from: from.to_string(),
            to: to.to_string(),
        });
    }
    Ok(project
        .tasks
        .iter()
        .filter(|t| t.start.max(from) <= t.end.min(to))
        .map(|t| t.id.clone())
        .collect())
}
