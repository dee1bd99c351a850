use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::graph::{ConceptGraph, ConceptKind, ConceptNode};
use super::views::{view_indices, Arrangement, ViewKind};
use crate::error::{Error, Result};
use crate::ids::EntityId;

/// Bridge hops allowed when no value is given.
pub const DEFAULT_MAX_BRIDGE: u32 = 1;
/// Upper bound on bridge hops; beyond a few hops everything lights up.
pub const MAX_BRIDGE_LIMIT: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SelectionEvent {
    pub source_view: ViewKind,
    pub node: ConceptNode,
}

/// Per-view item ids to highlight after a selection, for exactly the views
/// of the active arrangement and in its order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HighlightSet {
    pub selection: ConceptNode,
    #[serde(with = "ordered_views")]
    pub views: Vec<(ViewKind, Vec<EntityId>)>,
}

impl HighlightSet {
    pub fn view(&self, kind: ViewKind) -> Option<&[EntityId]> {
        self.views
            .iter()
            .find(|(k, _)| *k == kind)
            .map(|(_, ids)| ids.as_slice())
    }

    /// Whether no view besides the source echo lights up.
    pub fn is_echo_only(&self, source: ViewKind) -> bool {
        self.views.iter().all(|(k, ids)| {
            if *k == source {
                ids.iter().all(|id| id == &self.selection.id)
            } else {
                ids.is_empty()
            }
        })
    }
}

mod ordered_views {
    use super::*;

    pub fn serialize<S: Serializer>(views: &[(ViewKind, Vec<EntityId>)], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(views.len()))?;
        for (k, ids) in views {
            map.serialize_entry(k, ids)?;
        }
        map.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<(ViewKind, Vec<EntityId>)>, D::Error> {
        struct Ordered;

        impl<'de> Visitor<'de> for Ordered {
            type Value = Vec<(ViewKind, Vec<EntityId>)>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from view kind to item ids")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Self::Value, A::Error> {
                let mut out: Self::Value = Vec::new();
                while let Some((k, ids)) = map.next_entry::<ViewKind, Vec<EntityId>>()? {
                    if out.iter().any(|(seen, _)| *seen == k) {
                        return Err(serde::de::Error::custom(format!("view `{k}` listed twice")));
                    }
                    out.push((k, ids));
                }
                Ok(out)
            }
        }

        d.deserialize_map(Ordered)
    }
}

/// Concept nodes corresponding to `node`.
///
/// Seeds are the node itself plus, for a building element, every element
/// below it. A node is related when some path from a seed of length at most
/// `1 + max_bridge` passes only through building elements and lots on the
/// inside. The result includes `node`.
pub fn highlighted_nodes(graph: &ConceptGraph, node: &ConceptNode, max_bridge: u32) -> Result<BTreeSet<ConceptNode>> {
    let start = locate(graph, node)?;
    Ok(reach(graph, start, max_bridge)
        .into_iter()
        .enumerate()
        .filter(|&(_, hit)| hit)
        .map(|(i, _)| graph.node(i).clone())
        .collect())
}

fn locate(graph: &ConceptGraph, node: &ConceptNode) -> Result<usize> {
    graph.index_of(node).ok_or_else(|| Error::NodeNotInGraph {
        kind: node.kind.to_string(),
        id: node.id.clone(),
    })
}

/// Breadth-first search that only expands seeds and bridge nodes: the
/// shortest such path to each node is exactly its shortest admissible path.
fn reach(graph: &ConceptGraph, start: usize, max_bridge: u32) -> Vec<bool> {
    let limit = 1 + max_bridge as usize;
    let mut dist: Vec<Option<usize>> = vec![None; graph.len()];
    let mut seed = vec![false; graph.len()];
    let mut queue = VecDeque::new();
    let seeds = if graph.node(start).kind == ConceptKind::BuildingElement {
        graph.subtree_indices(start)
    } else {
        vec![start]
    };
    for s in seeds {
        seed[s] = true;
        dist[s] = Some(0);
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        let d = dist[u].expect("queued nodes have a distance");
        if d >= limit || !(seed[u] || graph.node(u).kind.is_bridge()) {
            continue;
        }
        for &v in graph.neighbor_indices(u) {
            if dist[v].is_none() {
                dist[v] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist.into_iter().map(|d| d.is_some()).collect()
}

/// Resolves a selection into highlights for every arranged view.
///
/// Related nodes are projected onto each view's items. The selected node
/// itself is only echoed in the view it was selected from, and only if that
/// view shows it. The meeting report view shows `report`, or the latest
/// report when none is given.
pub fn resolve_selection(
    graph: &ConceptGraph,
    selection: &SelectionEvent,
    arrangement: &Arrangement,
    max_bridge: u32,
    report: Option<&EntityId>,
) -> Result<HighlightSet> {
    if max_bridge > MAX_BRIDGE_LIMIT {
        return Err(Error::OutOfRange {
            what: "maxBridge",
            value: max_bridge as i64,
        });
    }
    let start = locate(graph, &selection.node)?;
    let related = reach(graph, start, max_bridge);
    let latest = graph.views.report_order.last();

    let mut views = Vec::with_capacity(arrangement.views().len());
    for &kind in arrangement.views() {
        let items: &[usize] = match (kind, report.or(latest)) {
            (ViewKind::MeetingReport, None) => &[],
            (_, context) => view_indices(graph, kind, context)?,
        };
        let ids = items
            .iter()
            .filter(|&&i| related[i] && (i != start || kind == selection.source_view))
            .map(|&i| graph.node(i).id.clone())
            .collect();
        views.push((kind, ids));
    }
    Ok(HighlightSet {
        selection: selection.node.clone(),
        views,
    })
}
