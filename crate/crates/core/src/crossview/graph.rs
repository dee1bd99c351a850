use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::EntityId;
use crate::model::validate_integrity;
use crate::state::ProjectState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ConceptKind {
    Remark,
    Actor,
    Task,
    BuildingElement,
    PlanDocument,
    Lot,
}

impl ConceptKind {
    pub const ALL: [ConceptKind; 6] = [
        ConceptKind::Remark,
        ConceptKind::Actor,
        ConceptKind::Task,
        ConceptKind::BuildingElement,
        ConceptKind::PlanDocument,
        ConceptKind::Lot,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConceptKind::Remark => "remark",
            ConceptKind::Actor => "actor",
            ConceptKind::Task => "task",
            ConceptKind::BuildingElement => "buildingElement",
            ConceptKind::PlanDocument => "planDocument",
            ConceptKind::Lot => "lot",
        }
    }

    /// Kinds a selection may pass through on its way to another view.
    pub fn is_bridge(self) -> bool {
        matches!(self, ConceptKind::BuildingElement | ConceptKind::Lot)
    }
}

impl fmt::Display for ConceptKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConceptNode {
    pub kind: ConceptKind,
    pub id: EntityId,
}

impl ConceptNode {
    pub fn new(kind: ConceptKind, id: impl Into<EntityId>) -> Self {
        ConceptNode { kind, id: id.into() }
    }
}

impl fmt::Display for ConceptNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Relation {
    /// remark → building element
    Concerns,
    /// remark → actor
    Responsible,
    /// remark | task | plan → lot
    InLot,
    /// task → building element
    Builds,
    /// plan → building element
    Depicts,
    /// building element → parent element
    PartOf,
}

impl Relation {
    /// Whether `(from, to)` kinds fit the relation's signature.
    pub fn admits(self, from: ConceptKind, to: ConceptKind) -> bool {
        use ConceptKind as K;
        match self {
            Relation::Concerns => from == K::Remark && to == K::BuildingElement,
            Relation::Responsible => from == K::Remark && to == K::Actor,
            Relation::InLot => {
                matches!(from, K::Remark | K::Task | K::PlanDocument) && to == K::Lot
            }
            Relation::Builds => from == K::Task && to == K::BuildingElement,
            Relation::Depicts => from == K::PlanDocument && to == K::BuildingElement,
            Relation::PartOf => from == K::BuildingElement && to == K::BuildingElement,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConceptEdge {
    pub from: ConceptNode,
    pub to: ConceptNode,
    pub relation: Relation,
}

/// Ordered item lists of the four view models, as node indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct ViewModels {
    pub planning: Vec<usize>,
    pub mockup: Vec<usize>,
    pub overview: Vec<usize>,
    /// Report id → remarks, actors and elements it mentions, in reading order.
    pub reports: BTreeMap<EntityId, Vec<usize>>,
    /// Report ids in sequence order.
    pub report_order: Vec<EntityId>,
}

/// Typed nodes and relations linking the items shown in every view.
///
/// Nodes are sorted by (kind, id) and edges are stored once; adjacency is
/// indexed in both directions.
#[derive(Debug, Clone, PartialEq)]
pub struct ConceptGraph {
    nodes: Vec<ConceptNode>,
    labels: Vec<String>,
    edges: Vec<ConceptEdge>,
    index: HashMap<ConceptNode, usize>,
    adjacency: Vec<Vec<usize>>,
    /// Element → direct sub-elements (reverse `partOf`).
    children: Vec<Vec<usize>>,
    pub(crate) views: ViewModels,
}

impl ConceptGraph {
    pub fn nodes(&self) -> &[ConceptNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[ConceptEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, node: &ConceptNode) -> Option<usize> {
        self.index.get(node).copied()
    }

    pub fn contains(&self, node: &ConceptNode) -> bool {
        self.index.contains_key(node)
    }

    pub(crate) fn node(&self, i: usize) -> &ConceptNode {
        &self.nodes[i]
    }

    pub(crate) fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub(crate) fn neighbor_indices(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// `i` and every element below it through `partOf`.
    pub(crate) fn subtree_indices(&self, i: usize) -> Vec<usize> {
        let mut out = vec![i];
        let mut next = 0;
        while next < out.len() {
            let at = out[next];
            for &c in &self.children[at] {
                if !out.contains(&c) {
                    out.push(c);
                }
            }
            next += 1;
        }
        out
    }

    /// Nodes adjacent to `node` through any relation, either direction.
    pub fn neighbors(&self, node: &ConceptNode) -> Vec<&ConceptNode> {
        self.index_of(node)
            .map(|i| self.adjacency[i].iter().map(|&j| &self.nodes[j]).collect())
            .unwrap_or_default()
    }

    /// Builds a graph directly from nodes and edges, without view models.
    /// Edge endpoints must be listed nodes whose kinds fit the relation.
    pub fn from_parts(nodes: Vec<(ConceptNode, String)>, edges: Vec<ConceptEdge>) -> Result<Self> {
        let mut builder = Builder::default();
        for (node, label) in nodes {
            builder.node(node, label);
        }
        for e in &edges {
            for end in [&e.from, &e.to] {
                if !builder.labels.contains_key(end) {
                    return Err(Error::NodeNotInGraph {
                        kind: end.kind.to_string(),
                        id: end.id.clone(),
                    });
                }
            }
            if !e.relation.admits(e.from.kind, e.to.kind) {
                return Err(Error::InvalidInput(format!(
                    "relation {:?} cannot link {} to {}",
                    e.relation, e.from, e.to
                )));
            }
        }
        builder.edges.extend(edges);
        Ok(builder.finish())
    }
}

#[derive(Default)]
struct Builder {
    labels: BTreeMap<ConceptNode, String>,
    edges: BTreeSet<ConceptEdge>,
}

impl Builder {
    fn node(&mut self, node: ConceptNode, label: String) {
        self.labels.insert(node, label);
    }

    fn edge(&mut self, from: ConceptNode, relation: Relation, to: ConceptNode) {
        debug_assert!(relation.admits(from.kind, to.kind));
        self.edges.insert(ConceptEdge { from, to, relation });
    }

    fn finish(self) -> ConceptGraph {
        let (nodes, labels): (Vec<_>, Vec<_>) = self.labels.into_iter().unzip();
        let index: HashMap<ConceptNode, usize> =
            nodes.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        let mut adjacency = vec![Vec::new(); nodes.len()];
        let mut children = vec![Vec::new(); nodes.len()];
        let edges: Vec<ConceptEdge> = self.edges.into_iter().collect();
        for e in &edges {
            let (a, b) = (index[&e.from], index[&e.to]);
            adjacency[a].push(b);
            if a != b {
                adjacency[b].push(a);
            }
            if e.relation == Relation::PartOf {
                children[b].push(a);
            }
        }
        for adj in adjacency.iter_mut().chain(children.iter_mut()) {
            adj.sort_unstable();
            adj.dedup();
        }
        ConceptGraph {
            nodes,
            labels,
            edges,
            index,
            adjacency,
            children,
            views: ViewModels::default(),
        }
    }
}

/// Builds the concept graph of a project snapshot, with the item lists of
/// every view. Same state in, same graph out.
pub fn build_graph(state: &ProjectState) -> Result<ConceptGraph> {
    let violations = validate_integrity(&state.project);
    if !violations.is_empty() {
        return Err(Error::InvalidProject(violations));
    }
    use ConceptKind as K;
    let p = &state.project;
    let mut b = Builder::default();
    let n = ConceptNode::new;

    for a in &p.actors {
        b.node(n(K::Actor, a.id.clone()), a.name.clone());
    }
    for l in &p.lots {
        b.node(n(K::Lot, l.id.clone()), format!("{} {}", l.code, l.label));
    }
    for e in &p.elements {
        b.node(n(K::BuildingElement, e.id.clone()), e.label.clone());
        if let Some(parent) = &e.parent {
            b.edge(
                n(K::BuildingElement, e.id.clone()),
                Relation::PartOf,
                n(K::BuildingElement, parent.clone()),
            );
        }
    }
    for t in &p.tasks {
        let task = n(K::Task, t.id.clone());
        b.node(task.clone(), t.label.clone());
        b.edge(task.clone(), Relation::InLot, n(K::Lot, t.lot.clone()));
        for e in &t.elements {
            b.edge(task.clone(), Relation::Builds, n(K::BuildingElement, e.clone()));
        }
    }
    for r in &state.remarks {
        let remark = n(K::Remark, r.id.clone());
        b.node(remark.clone(), format!("#{} {}", r.number, r.text));
        b.edge(remark.clone(), Relation::InLot, n(K::Lot, r.lot_id.clone()));
        for a in &r.responsible {
            b.edge(remark.clone(), Relation::Responsible, n(K::Actor, a.clone()));
        }
        for e in &r.elements {
            b.edge(remark.clone(), Relation::Concerns, n(K::BuildingElement, e.clone()));
        }
    }
    for plan in &state.plans {
        let d = &plan.document;
        let node = n(K::PlanDocument, d.id.clone());
        b.node(node.clone(), format!("{} {}", d.code, d.title));
        b.edge(node.clone(), Relation::InLot, n(K::Lot, d.lot_id.clone()));
        for e in &d.elements {
            b.edge(node.clone(), Relation::Depicts, n(K::BuildingElement, e.clone()));
        }
    }

    let mut graph = b.finish();
    graph.views = view_models(&graph, state);
    Ok(graph)
}

fn view_models(graph: &ConceptGraph, state: &ProjectState) -> ViewModels {
    use ConceptKind as K;
    let idx = |kind: K, id: &EntityId| graph.index[&ConceptNode::new(kind, id.clone())];
    let p = &state.project;

    let mut tasks: Vec<_> = p.tasks.iter().collect();
    tasks.sort_by(|a, b| a.start.cmp(&b.start).then_with(|| a.id.cmp(&b.id)));
    let mut elements: Vec<_> = p.elements.iter().collect();
    elements.sort_by(|a, b| a.label.cmp(&b.label).then_with(|| a.id.cmp(&b.id)));
    let mut remarks: Vec<_> = state.remarks.iter().collect();
    remarks.sort_by_key(|r| r.number);

    let mut reports = BTreeMap::new();
    for report in &state.reports {
        let mut seen = BTreeSet::new();
        let mut items = Vec::new();
        for d in &report.remark_dispositions {
            let Some(remark) = state.remark(&d.remark_id) else {
                continue;
            };
            let mentions = std::iter::once(idx(K::Remark, &remark.id))
                .chain(remark.responsible.iter().map(|a| idx(K::Actor, a)))
                .chain(remark.elements.iter().map(|e| idx(K::BuildingElement, e)));
            for i in mentions {
                if seen.insert(i) {
                    items.push(i);
                }
            }
        }
        reports.insert(report.id.clone(), items);
    }

    ViewModels {
        planning: tasks.iter().map(|t| idx(K::Task, &t.id)).collect(),
        mockup: elements.iter().map(|e| idx(K::BuildingElement, &e.id)).collect(),
        overview: remarks.iter().map(|r| idx(K::Remark, &r.id)).collect(),
        reports,
        report_order: state.reports.iter().map(|r| r.id.clone()).collect(),
    }
}
