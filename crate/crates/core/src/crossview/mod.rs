//! Linked multi-view navigation: a typed concept graph over one project,
//! the four view models drawn from it, and selection propagation between
//! them.

mod graph;
mod selection;
mod views;

pub use graph::{build_graph, ConceptEdge, ConceptGraph, ConceptKind, ConceptNode, Relation};
pub use selection::{
    highlighted_nodes, resolve_selection, HighlightSet, SelectionEvent, DEFAULT_MAX_BRIDGE,
    MAX_BRIDGE_LIMIT,
};
pub use views::{project_view, set_arrangement, Arrangement, Layout, ViewItem, ViewKind, MIN_VIEWS};
