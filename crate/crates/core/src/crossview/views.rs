use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::graph::{ConceptGraph, ConceptNode};
use crate::error::{Error, Result};
use crate::ids::EntityId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ViewKind {
    MeetingReport,
    Planning,
    Mockup3d,
    RemarksOverview,
}

impl ViewKind {
    pub const ALL: [ViewKind; 4] = [
        ViewKind::MeetingReport,
        ViewKind::Planning,
        ViewKind::Mockup3d,
        ViewKind::RemarksOverview,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ViewKind::MeetingReport => "meetingReport",
            ViewKind::Planning => "planning",
            ViewKind::Mockup3d => "mockup3d",
            ViewKind::RemarksOverview => "remarksOverview",
        }
    }
}

impl fmt::Display for ViewKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ViewKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ViewKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown view `{s}`")))
    }
}

/// One entry shown in a view, mapped to exactly one concept node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ViewItem {
    pub view: ViewKind,
    pub item_id: EntityId,
    pub node: ConceptNode,
    pub label: String,
}

/// Node indices of a view's items, in display order. `None` for a meeting
/// report view with no report to show.
pub(crate) fn view_indices<'g>(
    graph: &'g ConceptGraph,
    kind: ViewKind,
    report: Option<&EntityId>,
) -> Result<&'g [usize]> {
    let v = &graph.views;
    Ok(match kind {
        ViewKind::Planning => &v.planning,
        ViewKind::Mockup3d => &v.mockup,
        ViewKind::RemarksOverview => &v.overview,
        ViewKind::MeetingReport => {
            let report = report.ok_or(Error::MissingContext("report"))?;
            v.reports
                .get(report)
                .ok_or_else(|| Error::unknown("report", report))?
        }
    })
}

/// Full item list of one view, in its stable order: tasks by start date,
/// elements by label, remarks by number, report mentions in reading order.
pub fn project_view(graph: &ConceptGraph, kind: ViewKind, report: Option<&EntityId>) -> Result<Vec<ViewItem>> {
    Ok(view_indices(graph, kind, report)?
        .iter()
        .map(|&i| {
            let node = graph.node(i).clone();
            ViewItem {
                view: kind,
                item_id: node.id.clone(),
                node,
                label: graph.label(i).to_owned(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    #[default]
    Row,
    Grid,
}

/// A chosen set of two to four distinct views and how to lay them out.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ArrangementSpec")]
pub struct Arrangement {
    id: String,
    views: Vec<ViewKind>,
    layout: Layout,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ArrangementSpec {
    #[serde(default)]
    #[allow(dead_code)]
    id: Option<String>,
    views: Vec<ViewKind>,
    #[serde(default)]
    layout: Layout,
}

impl TryFrom<ArrangementSpec> for Arrangement {
    type Error = Error;

    fn try_from(spec: ArrangementSpec) -> Result<Self> {
        set_arrangement(spec.views, spec.layout)
    }
}

impl Arrangement {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn views(&self) -> &[ViewKind] {
        &self.views
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn contains(&self, kind: ViewKind) -> bool {
        self.views.contains(&kind)
    }
}

impl Default for Arrangement {
    /// The 3D mock-up, planning and meeting report side by side.
    fn default() -> Self {
        set_arrangement(
            vec![ViewKind::Mockup3d, ViewKind::Planning, ViewKind::MeetingReport],
            Layout::Row,
        )
        .expect("valid default arrangement")
    }
}

pub const MIN_VIEWS: usize = 2;

pub fn set_arrangement(views: Vec<ViewKind>, layout: Layout) -> Result<Arrangement> {
    for (i, v) in views.iter().enumerate() {
        if views[..i].contains(v) {
            return Err(Error::DuplicateView(v.to_string()));
        }
    }
    // With duplicates excluded there can be at most four views.
    if views.len() < MIN_VIEWS {
        return Err(Error::TooFewViews(views.len()));
    }
    let id = views.iter().map(|v| v.as_str()).collect::<Vec<_>>().join("+");
    Ok(Arrangement { id, views, layout })
}
