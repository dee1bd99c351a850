//! Slow, obviously-correct reference implementations. None of them call the
//! code they check.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::Value;
use sitecoord_core::crossview::{ConceptKind, ConceptNode, Relation, ViewKind};
use sitecoord_core::model::Project;
use sitecoord_core::report::RemarkStatus;
use sitecoord_core::search::{Filter, ScopeLevel, SearchScope};
use sitecoord_core::{EntityId, ExchangeEvent, ProjectState, SubjectRef};

// ---------------------------------------------------------------- search

/// Expected `(project, report, remark)` hits, or the error code expected.
pub fn naive_search(
    portfolio: &[ProjectState],
    scope: &SearchScope,
    filter: &Filter,
) -> Result<Vec<(EntityId, EntityId, EntityId)>, &'static str> {
    match scope.level {
        ScopeLevel::Portfolio => {}
        ScopeLevel::Project if scope.project_id.is_none() => return Err("invalid-input"),
        ScopeLevel::Report if scope.project_id.is_none() || scope.report_id.is_none() => {
            return Err("invalid-input")
        }
        _ => {}
    }
    if let Some((from, to)) = filter.date_range {
        if from > to {
            return Err("invalid-range");
        }
    }
    let known_in = |s: &ProjectState| {
        filter
            .responsible
            .as_ref()
            .is_none_or(|a| s.project.actors.iter().any(|x| &x.id == a))
            && filter.lot.as_ref().is_none_or(|l| s.project.lots.iter().any(|x| &x.id == l))
            && filter
                .element
                .as_ref()
                .is_none_or(|e| s.project.elements.iter().any(|x| &x.id == e))
    };
    // Each filter field must resolve somewhere in the portfolio.
    let resolves_anywhere = |f: &Filter| {
        let any = |pred: &dyn Fn(&ProjectState) -> bool| portfolio.iter().any(pred);
        f.responsible
            .as_ref()
            .is_none_or(|a| any(&|s| s.project.actors.iter().any(|x| &x.id == a)))
            && f.lot
                .as_ref()
                .is_none_or(|l| any(&|s| s.project.lots.iter().any(|x| &x.id == l)))
            && f.element
                .as_ref()
                .is_none_or(|e| any(&|s| s.project.elements.iter().any(|x| &x.id == e)))
    };

    let mut hits = Vec::new();
    match scope.level {
        ScopeLevel::Portfolio => {
            if !resolves_anywhere(filter) {
                return Err("unknown-id");
            }
            for s in portfolio {
                for r in &s.remarks {
                    if remark_matches(s, &r.id, r.status, filter) {
                        hits.push((s.project.id.clone(), r.opened_in_report.clone(), r.id.clone(), r.number));
                    }
                }
            }
        }
        ScopeLevel::Project | ScopeLevel::Report => {
            let pid = scope.project_id.as_ref().expect("checked");
            let Some(s) = portfolio.iter().find(|s| &s.project.id == pid) else {
                return Err("unknown-scope-id");
            };
            if !known_in(s) {
                return Err("unknown-id");
            }
            if scope.level == ScopeLevel::Project {
                for r in &s.remarks {
                    if remark_matches(s, &r.id, r.status, filter) {
                        hits.push((s.project.id.clone(), r.opened_in_report.clone(), r.id.clone(), r.number));
                    }
                }
            } else {
                let rid = scope.report_id.as_ref().expect("checked");
                let Some(report) = s.reports.iter().find(|r| &r.id == rid) else {
                    return Err("unknown-scope-id");
                };
                for d in &report.remark_dispositions {
                    let number = s.remarks.iter().find(|r| r.id == d.remark_id).map(|r| r.number);
                    if remark_matches(s, &d.remark_id, d.status_at_validation, filter) {
                        hits.push((s.project.id.clone(), rid.clone(), d.remark_id.clone(), number.unwrap_or(0)));
                    }
                }
            }
        }
    }
    hits.sort_by(|a, b| a.0.cmp(&b.0).then(a.3.cmp(&b.3)));
    Ok(hits.into_iter().map(|(p, r, m, _)| (p, r, m)).collect())
}

/// Whether `ancestor` is `element` or above it in the part-of forest,
/// found by climbing parent links.
fn is_within(project: &Project, element: &EntityId, ancestor: &EntityId) -> bool {
    let mut current = Some(element.clone());
    let mut steps = 0;
    while let Some(e) = current {
        if &e == ancestor {
            return true;
        }
        steps += 1;
        if steps > project.elements.len() {
            return false;
        }
        current = project
            .elements
            .iter()
            .find(|x| x.id == e)
            .and_then(|x| x.parent.clone());
    }
    false
}

fn remark_matches(s: &ProjectState, remark: &EntityId, status: RemarkStatus, f: &Filter) -> bool {
    let r = s.remarks.iter().find(|r| &r.id == remark).expect("remark exists");
    if let Some(a) = &f.responsible {
        if !r.responsible.iter().any(|x| x == a) {
            return false;
        }
    }
    if let Some(l) = &f.lot {
        if &r.lot_id != l {
            return false;
        }
    }
    if let Some(e) = &f.element {
        if !r.elements.iter().any(|x| is_within(&s.project, x, e)) {
            return false;
        }
    }
    if let Some(st) = f.status {
        if st != status {
            return false;
        }
    }
    if let Some((from, to)) = f.date_range {
        let opened = s.reports.iter().find(|x| x.id == r.opened_in_report);
        match opened {
            Some(rep) if rep.meeting_date >= from && rep.meeting_date <= to => {}
            _ => return false,
        }
    }
    true
}

// ---------------------------------------------------------------- crossview

/// Every edge the relation signatures call for, as `(from, relation, to)`.
pub fn expected_edges(s: &ProjectState) -> BTreeSet<(ConceptNode, Relation, ConceptNode)> {
    use ConceptKind as K;
    let n = |k, id: &EntityId| ConceptNode::new(k, id.clone());
    let mut out = BTreeSet::new();
    for r in &s.remarks {
        for e in &r.elements {
            out.insert((n(K::Remark, &r.id), Relation::Concerns, n(K::BuildingElement, e)));
        }
        for a in &r.responsible {
            out.insert((n(K::Remark, &r.id), Relation::Responsible, n(K::Actor, a)));
        }
        out.insert((n(K::Remark, &r.id), Relation::InLot, n(K::Lot, &r.lot_id)));
    }
    for t in &s.project.tasks {
        out.insert((n(K::Task, &t.id), Relation::InLot, n(K::Lot, &t.lot)));
        for e in &t.elements {
            out.insert((n(K::Task, &t.id), Relation::Builds, n(K::BuildingElement, e)));
        }
    }
    for p in &s.plans {
        let d = &p.document;
        out.insert((n(K::PlanDocument, &d.id), Relation::InLot, n(K::Lot, &d.lot_id)));
        for e in &d.elements {
            out.insert((n(K::PlanDocument, &d.id), Relation::Depicts, n(K::BuildingElement, e)));
        }
    }
    for e in &s.project.elements {
        if let Some(parent) = &e.parent {
            out.insert((n(K::BuildingElement, &e.id), Relation::PartOf, n(K::BuildingElement, parent)));
        }
    }
    out
}

/// Every node the project calls for.
pub fn expected_nodes(s: &ProjectState) -> BTreeSet<ConceptNode> {
    use ConceptKind as K;
    let p = &s.project;
    let mut out = BTreeSet::new();
    out.extend(p.actors.iter().map(|x| ConceptNode::new(K::Actor, x.id.clone())));
    out.extend(p.lots.iter().map(|x| ConceptNode::new(K::Lot, x.id.clone())));
    out.extend(p.elements.iter().map(|x| ConceptNode::new(K::BuildingElement, x.id.clone())));
    out.extend(p.tasks.iter().map(|x| ConceptNode::new(K::Task, x.id.clone())));
    out.extend(s.remarks.iter().map(|x| ConceptNode::new(K::Remark, x.id.clone())));
    out.extend(s.plans.iter().map(|x| ConceptNode::new(K::PlanDocument, x.document.id.clone())));
    out
}

fn is_bridge(kind: ConceptKind) -> bool {
    kind == ConceptKind::BuildingElement || kind == ConceptKind::Lot
}

/// Nodes related to `selected` by explicit enumeration of every simple path
/// of length at most `1 + max_bridge` from each seed whose inner nodes are
/// all building elements or lots. Seeds: the node, plus every element
/// below it when it is an element.
pub fn enumerate_related(
    edges: &BTreeSet<(ConceptNode, Relation, ConceptNode)>,
    selected: &ConceptNode,
    max_bridge: u32,
) -> BTreeSet<ConceptNode> {
    let mut seeds: BTreeSet<ConceptNode> = BTreeSet::from([selected.clone()]);
    if selected.kind == ConceptKind::BuildingElement {
        loop {
            let before = seeds.len();
            let found: Vec<ConceptNode> = edges
                .iter()
                .filter(|(child, rel, parent)| *rel == Relation::PartOf && seeds.contains(parent) && !seeds.contains(child))
                .map(|(child, _, _)| child.clone())
                .collect();
            seeds.extend(found);
            if seeds.len() == before {
                break;
            }
        }
    }

    let limit = 1 + max_bridge as usize;
    let mut related = seeds.clone();
    for seed in &seeds {
        let mut path = vec![seed.clone()];
        walk(edges, &mut path, limit, &mut related);
    }
    related
}

fn walk(
    edges: &BTreeSet<(ConceptNode, Relation, ConceptNode)>,
    path: &mut Vec<ConceptNode>,
    limit: usize,
    related: &mut BTreeSet<ConceptNode>,
) {
    let steps = path.len() - 1;
    if steps == limit {
        return;
    }
    let here = path.last().expect("non-empty").clone();
    // The current end becomes an inner node if we continue past it.
    if steps > 0 && !is_bridge(here.kind) {
        return;
    }
    let neighbours: Vec<ConceptNode> = edges
        .iter()
        .filter_map(|(a, _, b)| {
            if a == &here {
                Some(b.clone())
            } else if b == &here {
                Some(a.clone())
            } else {
                None
            }
        })
        .collect();
    for next in neighbours {
        if path.contains(&next) {
            continue;
        }
        related.insert(next.clone());
        path.push(next);
        walk(edges, path, limit, related);
        path.pop();
    }
}

/// Item ids of one view, computed straight from the state.
pub fn view_item_ids(s: &ProjectState, kind: ViewKind, report: Option<&EntityId>) -> BTreeSet<ConceptNode> {
    use ConceptKind as K;
    match kind {
        ViewKind::Planning => s
            .project
            .tasks
            .iter()
            .map(|t| ConceptNode::new(K::Task, t.id.clone()))
            .collect(),
        ViewKind::Mockup3d => s
            .project
            .elements
            .iter()
            .map(|e| ConceptNode::new(K::BuildingElement, e.id.clone()))
            .collect(),
        ViewKind::RemarksOverview => s
            .remarks
            .iter()
            .map(|r| ConceptNode::new(K::Remark, r.id.clone()))
            .collect(),
        ViewKind::MeetingReport => {
            let rep = match report {
                Some(id) => s.reports.iter().find(|r| &r.id == id),
                None => s.reports.last(),
            };
            let mut out = BTreeSet::new();
            for d in rep.map(|r| r.remark_dispositions.as_slice()).unwrap_or(&[]) {
                let r = s.remarks.iter().find(|r| r.id == d.remark_id).expect("remark exists");
                out.insert(ConceptNode::new(K::Remark, r.id.clone()));
                out.extend(r.responsible.iter().map(|a| ConceptNode::new(K::Actor, a.clone())));
                out.extend(r.elements.iter().map(|e| ConceptNode::new(K::BuildingElement, e.clone())));
            }
            out
        }
    }
}

/// Expected highlight set per view: related view items, with the selected
/// node itself only in its source view.
pub fn expected_highlights(
    s: &ProjectState,
    selected: &ConceptNode,
    source: ViewKind,
    views: &[ViewKind],
    max_bridge: u32,
    report: Option<&EntityId>,
) -> BTreeMap<ViewKind, BTreeSet<EntityId>> {
    let related = enumerate_related(&expected_edges(s), selected, max_bridge);
    views
        .iter()
        .map(|&v| {
            let ids = view_item_ids(s, v, report)
                .into_iter()
                .filter(|n| related.contains(n) && (n != selected || v == source))
                .map(|n| n.id)
                .collect();
            (v, ids)
        })
        .collect()
}

// ---------------------------------------------------------------- model

/// Whether the task predecessor graph has a cycle (three-colour DFS).
pub fn has_task_cycle(project: &Project) -> bool {
    fn visit(p: &Project, id: &EntityId, colour: &mut BTreeMap<EntityId, u8>) -> bool {
        match colour.get(id) {
            Some(1) => return true,
            Some(2) => return false,
            _ => {}
        }
        colour.insert(id.clone(), 1);
        if let Some(t) = p.tasks.iter().find(|t| &t.id == id) {
            for pred in &t.predecessors {
                if p.tasks.iter().any(|t| &t.id == pred) && visit(p, pred, colour) {
                    return true;
                }
            }
        }
        colour.insert(id.clone(), 2);
        false
    }
    let mut colour = BTreeMap::new();
    project.tasks.iter().any(|t| visit(project, &t.id, &mut colour))
}

// ---------------------------------------------------------------- trace

fn mentions(payload: &Value, key: &str, id: &str) -> bool {
    match payload.get(key) {
        Some(Value::String(s)) => s == id,
        Some(Value::Array(items)) => items.iter().any(|v| v.as_str() == Some(id)),
        _ => false,
    }
}

/// Sequences of events touching `subject`, from the raw JSON payloads.
pub fn naive_trace(events: &[ExchangeEvent], subject: &SubjectRef) -> Vec<u64> {
    events
        .iter()
        .filter(|e| match subject {
            SubjectRef::Plan(id) => mentions(&e.payload, "planId", id.as_str()),
            SubjectRef::Remark(id) => mentions(&e.payload, "remarkId", id.as_str()),
            SubjectRef::Report(id) => mentions(&e.payload, "reportId", id.as_str()),
            SubjectRef::Actor(id) => {
                &e.actor == id
                    || mentions(&e.payload, "diffusionList", id.as_str())
                    || mentions(&e.payload, "responsible", id.as_str())
            }
        })
        .map(|e| e.sequence)
        .collect()
}
