//! Dynamic consultation: conjunctive remark filters over three nested scopes
//! (all sites, one site, one meeting report).

use std::collections::BTreeSet;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::EntityId;
use crate::model::element_subtree;
use crate::report::{MeetingReport, Remark, RemarkStatus};
use crate::state::ProjectState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScopeLevel {
    Portfolio,
    Project,
    Report,
}

impl std::str::FromStr for ScopeLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "portfolio" => Ok(ScopeLevel::Portfolio),
            "project" => Ok(ScopeLevel::Project),
            "report" => Ok(ScopeLevel::Report),
            other => Err(Error::InvalidInput(format!("unknown scope `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchScope {
    pub level: ScopeLevel,
    #[serde(default)]
    pub project_id: Option<EntityId>,
    #[serde(default)]
    pub report_id: Option<EntityId>,
}

impl SearchScope {
    pub fn portfolio() -> Self {
        SearchScope {
            level: ScopeLevel::Portfolio,
            project_id: None,
            report_id: None,
        }
    }

    pub fn project(project: impl Into<EntityId>) -> Self {
        SearchScope {
            level: ScopeLevel::Project,
            project_id: Some(project.into()),
            report_id: None,
        }
    }

    pub fn report(project: impl Into<EntityId>, report: impl Into<EntityId>) -> Self {
        SearchScope {
            level: ScopeLevel::Report,
            project_id: Some(project.into()),
            report_id: Some(report.into()),
        }
    }

    /// Required ids present for the level.
    pub fn well_formed(&self) -> Result<()> {
        let needs_project = self.level != ScopeLevel::Portfolio;
        let needs_report = self.level == ScopeLevel::Report;
        if needs_project && self.project_id.is_none() {
            return Err(Error::InvalidInput("this scope needs a project".into()));
        }
        if needs_report && self.report_id.is_none() {
            return Err(Error::InvalidInput("report scope needs a report".into()));
        }
        Ok(())
    }
}

/// Unset fields match everything; set fields must all match.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Filter {
    #[serde(default)]
    pub responsible: Option<EntityId>,
    #[serde(default)]
    pub lot: Option<EntityId>,
    /// Matches remarks on this element or anything below it.
    #[serde(default)]
    pub element: Option<EntityId>,
    #[serde(default)]
    pub status: Option<RemarkStatus>,
    /// Closed range on the meeting date of the report that opened the remark.
    #[serde(default)]
    pub date_range: Option<(NaiveDate, NaiveDate)>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchHit {
    pub project_id: EntityId,
    pub report_id: EntityId,
    pub remark_id: EntityId,
}

fn resolves_in(state: &ProjectState, filter: &Filter) -> Option<(&'static str, EntityId)> {
    let p = &state.project;
    if let Some(a) = &filter.responsible {
        if p.actor(a).is_none() {
            return Some(("actor", a.clone()));
        }
    }
    if let Some(l) = &filter.lot {
        if p.lot(l).is_none() {
            return Some(("lot", l.clone()));
        }
    }
    if let Some(e) = &filter.element {
        if p.element(e).is_none() {
            return Some(("building element", e.clone()));
        }
    }
    None
}

struct Matcher<'a> {
    filter: &'a Filter,
    subtree: Option<BTreeSet<EntityId>>,
}

impl<'a> Matcher<'a> {
    fn new(state: &ProjectState, filter: &'a Filter) -> Self {
        let subtree = filter
            .element
            .as_ref()
            .map(|e| element_subtree(&state.project, e).unwrap_or_default());
        Matcher { filter, subtree }
    }

    fn matches(&self, state: &ProjectState, remark: &Remark, status: RemarkStatus) -> bool {
        let f = self.filter;
        if f.responsible.as_ref().is_some_and(|a| !remark.responsible.contains(a)) {
            return false;
        }
        if f.lot.as_ref().is_some_and(|l| &remark.lot_id != l) {
            return false;
        }
        if let Some(subtree) = &self.subtree {
            if !remark.elements.iter().any(|e| subtree.contains(e)) {
                return false;
            }
        }
        if f.status.is_some_and(|s| s != status) {
            return false;
        }
        if let Some((from, to)) = f.date_range {
            let opened = state
                .report(&remark.opened_in_report)
                .map(|r| r.meeting_date);
            if !opened.is_some_and(|d| from <= d && d <= to) {
                return false;
            }
        }
        true
    }
}

fn search_project(state: &ProjectState, filter: &Filter, out: &mut Vec<(u32, SearchHit)>) {
    let m = Matcher::new(state, filter);
    for r in &state.remarks {
        if m.matches(state, r, r.status) {
            out.push((
                r.number,
                SearchHit {
                    project_id: state.id().clone(),
                    report_id: r.opened_in_report.clone(),
                    remark_id: r.id.clone(),
                },
            ));
        }
    }
}

fn search_report(state: &ProjectState, report: &MeetingReport, filter: &Filter, out: &mut Vec<(u32, SearchHit)>) {
    let m = Matcher::new(state, filter);
    for d in &report.remark_dispositions {
        let Some(r) = state.remark(&d.remark_id) else {
            continue;
        };
        if m.matches(state, r, d.status_at_validation) {
            out.push((
                r.number,
                SearchHit {
                    project_id: state.id().clone(),
                    report_id: report.id.clone(),
                    remark_id: r.id.clone(),
                },
            ));
        }
    }
}

/// Remarks matching every set filter field within the scope, ordered by
/// project id then remark number.
///
/// Inside a report, the status filter applies to the status the report
/// records for the remark; elsewhere it applies to the current status.
pub fn search<'a, I>(portfolio: I, scope: &SearchScope, filter: &Filter) -> Result<Vec<SearchHit>>
where
    I: IntoIterator<Item = &'a ProjectState>,
{
    scope.well_formed()?;
    if let Some((from, to)) = filter.date_range {
        if from > to {
            return Err(Error::InvalidRange {
                from: from.to_string(),
                to: to.to_string(),
            });
        }
    }
    let mut projects: Vec<&ProjectState> = portfolio.into_iter().collect();
    projects.sort_by(|a, b| a.id().cmp(b.id()));

    let mut hits: Vec<(u32, SearchHit)> = Vec::new();
    match scope.level {
        ScopeLevel::Portfolio => {
            if let Some((kind, id)) = first_unresolved_everywhere(&projects, filter) {
                return Err(Error::UnknownId { kind, id });
            }
            for state in &projects {
                search_project(state, filter, &mut hits);
            }
        }
        ScopeLevel::Project | ScopeLevel::Report => {
            let pid = scope.project_id.as_ref().expect("well formed");
            let state = projects
                .iter()
                .find(|s| s.id() == pid)
                .ok_or_else(|| Error::UnknownScopeId(pid.clone()))?;
            if let Some((kind, id)) = resolves_in(state, filter) {
                return Err(Error::UnknownId { kind, id });
            }
            if scope.level == ScopeLevel::Project {
                search_project(state, filter, &mut hits);
            } else {
                let rid = scope.report_id.as_ref().expect("well formed");
                let report = state
                    .report(rid)
                    .ok_or_else(|| Error::UnknownScopeId(rid.clone()))?;
                search_report(state, report, filter, &mut hits);
            }
        }
    }
    hits.sort_by(|(na, a), (nb, b)| a.project_id.cmp(&b.project_id).then(na.cmp(nb)));
    Ok(hits.into_iter().map(|(_, h)| h).collect())
}

type Resolves = fn(&ProjectState, &EntityId) -> bool;

fn first_unresolved_everywhere(projects: &[&ProjectState], filter: &Filter) -> Option<(&'static str, EntityId)> {
    let checks: [(&'static str, Option<&EntityId>, Resolves); 3] = [
        ("actor", filter.responsible.as_ref(), |s, id| s.project.actor(id).is_some()),
        ("lot", filter.lot.as_ref(), |s, id| s.project.lot(id).is_some()),
        ("building element", filter.element.as_ref(), |s, id| {
            s.project.element(id).is_some()
        }),
    ];
    checks.into_iter().find_map(|(kind, id, known)| {
        let id = id?;
        (!projects.iter().any(|s| known(s, id))).then(|| (kind, id.clone()))
    })
}
