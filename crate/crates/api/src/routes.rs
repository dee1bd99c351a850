use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, PathRejection, QueryRejection};
use axum::extract::{Path, Query, Request, State};
use axum::http::{header, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Extension, Json, Router};
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sitecoord_core::crossview::ViewKind;
use sitecoord_core::model::Project;
use sitecoord_core::plan::{Annotate, PublishVersion, RegisterPlan};
use sitecoord_core::report::{AmendRemark, NewRemark, OpenReport, PresenceEntry, RemarkStatus, ReportStatus, SetProgress};
use sitecoord_core::search::{Filter, ScopeLevel, SearchScope};
use sitecoord_core::{EntityId, Error, Platform, SelectionRequest, SubjectRef, Timestamp};

use crate::auth::Tokens;
use crate::error::ApiError;

#[derive(Clone)]
pub struct AppState {
    pub platform: Arc<Platform>,
    pub tokens: Arc<Tokens>,
}

/// The authenticated actor of a request.
#[derive(Debug, Clone)]
pub struct Acting(pub EntityId);

type ApiResult<T> = Result<T, ApiError>;

/// Runs a platform call off the async workers: appends wait on fsync.
async fn run<T, F>(state: &AppState, f: F) -> ApiResult<T>
where
    T: Send + 'static,
    F: FnOnce(&Platform) -> sitecoord_core::Result<T> + Send + 'static,
{
    let platform = Arc::clone(&state.platform);
    tokio::task::spawn_blocking(move || f(&platform))
        .await
        .map_err(|e| ApiError::from(Error::InvalidInput(format!("request aborted: {e}"))))?
        .map_err(ApiError::from)
}

fn created<T: Serialize>(value: T) -> Response {
    (StatusCode::CREATED, Json(value)).into_response()
}

fn ok<T: Serialize>(value: T) -> Response {
    Json(value).into_response()
}

async fn require_actor(State(state): State<AppState>, mut req: Request, next: Next) -> Response {
    match state.tokens.authenticate(req.headers()) {
        Ok(actor) => {
            req.extensions_mut().insert(Acting(actor));
            next.run(req).await
        }
        Err(e) => e.into_response(),
    }
}

pub fn router(state: AppState) -> Router {
    let project = Router::new()
        .route("/", get(get_project))
        .route("/snapshot", get(get_snapshot))
        .route("/events", get(get_events))
        .route("/reports", post(open_report).get(list_reports))
        .route("/reports/{r}", get(get_report))
        .route("/reports/{r}/export", get(export_report))
        .route("/reports/{r}/presence", post(set_presence))
        .route("/reports/{r}/remarks", post(add_remark))
        .route("/reports/{r}/remarks/{m}", patch(amend_remark))
        .route("/reports/{r}/progress", post(set_progress))
        .route("/reports/{r}/close/{m}", post(close_remark))
        .route("/reports/{r}/validate", post(validate_report))
        .route("/remarks", get(list_remarks))
        .route("/remarks/{m}", get(get_remark))
        .route("/remarks/{m}/reactions", post(react))
        .route("/plans", post(register_plan).get(list_plans))
        .route("/plans/{id}/versions", post(publish_version))
        .route("/plans/{id}/versions/{v}/annotations", post(annotate))
        .route("/plans/{id}/versions/{v}/ack", post(acknowledge))
        .route("/plans/{id}/diffusion/{v}", get(diffusion_status))
        .route("/trace", get(trace))
        .route("/views/{kind}", get(view))
        .route("/selection", post(select));

    let authenticated = Router::new()
        .route("/projects", post(import_project).get(list_projects))
        .nest("/projects/{p}", project)
        .route("/search", get(search))
        .route_layer(middleware::from_fn_with_state(state.clone(), require_actor));

    Router::new()
        .route("/health", get(health))
        .merge(authenticated)
        .fallback(|| async { ApiError::not_found_route() })
        .with_state(state)
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

// ---- projects ----

async fn import_project(State(s): State<AppState>, Extension(Acting(actor)): Extension<Acting>, body: String) -> ApiResult<Response> {
    let project = Project::from_json(&body).map_err(|e| ApiError::invalid(format!("project file: {e}")))?;
    let p = run(&s, move |p| p.import_project(&actor, project)).await?;
    Ok(created(p))
}

async fn list_projects(State(s): State<AppState>) -> ApiResult<Response> {
    Ok(ok(run(&s, |p| Ok(p.list_projects())).await?))
}

type ProjectPath = Result<Path<EntityId>, PathRejection>;

async fn get_project(State(s): State<AppState>, path: ProjectPath) -> ApiResult<Response> {
    let Path(project) = path?;
    Ok(ok(run(&s, move |p| p.project(&project)).await?))
}

async fn get_snapshot(State(s): State<AppState>, path: ProjectPath) -> ApiResult<Response> {
    let Path(project) = path?;
    let snapshot = run(&s, move |p| p.snapshot(&project)).await?;
    Ok(ok(&*snapshot))
}

#[derive(Debug, Default, Deserialize)]
pub struct EventsParams {
    #[serde(default)]
    pub after: u64,
    pub limit: Option<usize>,
}

/// Events after a sequence number, for clients polling for changes.
async fn get_events(
    State(s): State<AppState>,
    path: ProjectPath,
    query: Result<Query<EventsParams>, QueryRejection>,
) -> ApiResult<Response> {
    let Path(project) = path?;
    let Query(q) = query?;
    let events = run(&s, move |p| {
        p.store().with_events(&project, |events| {
            events
                .iter()
                .filter(|e| e.sequence > q.after)
                .take(q.limit.unwrap_or(usize::MAX))
                .cloned()
                .collect::<Vec<_>>()
        })
    })
    .await?;
    Ok(ok(events))
}

// ---- reports ----

type Body<T> = Result<Json<T>, JsonRejection>;

async fn open_report(
    State(s): State<AppState>,
    Extension(Acting(actor)): Extension<Acting>,
    path: ProjectPath,
    body: Body<OpenReport>,
) -> ApiResult<Response> {
    let (Path(project), Json(form)) = (path?, body?);
    Ok(created(run(&s, move |p| p.open_report(&project, &actor, form)).await?))
}

#[derive(Debug, Deserialize)]
struct ReportsParams {
    status: Option<ReportStatus>,
}

async fn list_reports(
    State(s): State<AppState>,
    path: ProjectPath,
    query: Result<Query<ReportsParams>, QueryRejection>,
) -> ApiResult<Response> {
    let (Path(project), Query(q)) = (path?, query?);
    Ok(ok(run(&s, move |p| p.list_reports(&project, q.status)).await?))
}

type ReportPath = Result<Path<(EntityId, EntityId)>, PathRejection>;

async fn get_report(State(s): State<AppState>, path: ReportPath) -> ApiResult<Response> {
    let Path((project, report)) = path?;
    Ok(ok(run(&s, move |p| p.report(&project, &report)).await?))
}

async fn export_report(State(s): State<AppState>, path: ReportPath) -> ApiResult<Response> {
    let Path((project, report)) = path?;
    let html = run(&s, move |p| p.export_report(&project, &report)).await?;
    Ok(([(header::CONTENT_TYPE, "text/html; charset=utf-8")], html).into_response())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PresenceBody {
    pub presence: Vec<PresenceEntry>,
}

async fn set_presence(
    State(s): State<AppState>,
    Extension(Acting(actor)): Extension<Acting>,
    path: ReportPath,
    body: Body<PresenceBody>,
) -> ApiResult<Response> {
    let (Path((project, report)), Json(b)) = (path?, body?);
    Ok(ok(run(&s, move |p| p.set_presence(&project, &actor, &report, b.presence)).await?))
}

async fn add_remark(
    State(s): State<AppState>,
    Extension(Acting(actor)): Extension<Acting>,
    path: ReportPath,
    body: Body<NewRemark>,
) -> ApiResult<Response> {
    let (Path((project, report)), Json(form)) = (path?, body?);
    Ok(created(run(&s, move |p| p.add_remark(&project, &actor, &report, form)).await?))
}

type RemarkInReportPath = Result<Path<(EntityId, EntityId, EntityId)>, PathRejection>;

async fn amend_remark(
    State(s): State<AppState>,
    Extension(Acting(actor)): Extension<Acting>,
    path: RemarkInReportPath,
    body: Body<AmendRemark>,
) -> ApiResult<Response> {
    let (Path((project, report, remark)), Json(form)) = (path?, body?);
    Ok(ok(run(&s, move |p| p.amend_remark(&project, &actor, &report, &remark, form)).await?))
}

async fn set_progress(
    State(s): State<AppState>,
    Extension(Acting(actor)): Extension<Acting>,
    path: ReportPath,
    body: Body<SetProgress>,
) -> ApiResult<Response> {
    let (Path((project, report)), Json(form)) = (path?, body?);
    Ok(ok(run(&s, move |p| p.set_progress(&project, &actor, &report, form)).await?))
}

async fn close_remark(
    State(s): State<AppState>,
    Extension(Acting(actor)): Extension<Acting>,
    path: RemarkInReportPath,
) -> ApiResult<Response> {
    let Path((project, report, remark)) = path?;
    Ok(ok(run(&s, move |p| p.close_remark(&project, &actor, &report, &remark)).await?))
}

async fn validate_report(
    State(s): State<AppState>,
    Extension(Acting(actor)): Extension<Acting>,
    path: ReportPath,
) -> ApiResult<Response> {
    let Path((project, report)) = path?;
    Ok(ok(run(&s, move |p| p.validate_report(&project, &actor, &report)).await?))
}

async fn list_remarks(State(s): State<AppState>, path: ProjectPath) -> ApiResult<Response> {
    let Path(project) = path?;
    Ok(ok(run(&s, move |p| p.remarks(&project)).await?))
}

async fn get_remark(State(s): State<AppState>, path: ReportPath) -> ApiResult<Response> {
    let Path((project, remark)) = path?;
    Ok(ok(run(&s, move |p| p.remark(&project, &remark)).await?))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ReactionBody {
    pub body: String,
}

async fn react(
    State(s): State<AppState>,
    Extension(Acting(actor)): Extension<Acting>,
    path: ReportPath,
    body: Body<ReactionBody>,
) -> ApiResult<Response> {
    let (Path((project, remark)), Json(b)) = (path?, body?);
    Ok(created(run(&s, move |p| p.react(&project, &actor, &remark, b.body)).await?))
}

// ---- plans ----

async fn register_plan(
    State(s): State<AppState>,
    Extension(Acting(actor)): Extension<Acting>,
    path: ProjectPath,
    body: Body<RegisterPlan>,
) -> ApiResult<Response> {
    let (Path(project), Json(form)) = (path?, body?);
    Ok(created(run(&s, move |p| p.register_plan(&project, &actor, form)).await?))
}

async fn list_plans(State(s): State<AppState>, path: ProjectPath) -> ApiResult<Response> {
    let Path(project) = path?;
    Ok(ok(run(&s, move |p| p.plans(&project)).await?))
}

async fn publish_version(
    State(s): State<AppState>,
    Extension(Acting(actor)): Extension<Acting>,
    path: ReportPath,
    body: Body<PublishVersion>,
) -> ApiResult<Response> {
    let (Path((project, plan)), Json(form)) = (path?, body?);
    Ok(created(run(&s, move |p| p.publish_version(&project, &actor, &plan, form)).await?))
}

type VersionPath = Result<Path<(EntityId, EntityId, u32)>, PathRejection>;

async fn annotate(
    State(s): State<AppState>,
    Extension(Acting(actor)): Extension<Acting>,
    path: VersionPath,
    body: Body<Annotate>,
) -> ApiResult<Response> {
    let (Path((project, plan, version)), Json(form)) = (path?, body?);
    Ok(created(run(&s, move |p| p.annotate(&project, &actor, &plan, version, form)).await?))
}

async fn acknowledge(
    State(s): State<AppState>,
    Extension(Acting(actor)): Extension<Acting>,
    path: VersionPath,
) -> ApiResult<Response> {
    let Path((project, plan, version)) = path?;
    Ok(ok(run(&s, move |p| p.acknowledge(&project, &actor, &plan, version)).await?))
}

async fn diffusion_status(State(s): State<AppState>, path: VersionPath) -> ApiResult<Response> {
    let Path((project, plan, version)) = path?;
    Ok(ok(run(&s, move |p| p.diffusion_status(&project, &plan, version)).await?))
}

#[derive(Debug, Default, Serialize, Deserialize)]
pub struct TraceParams {
    pub subject: String,
    pub from: Option<String>,
    pub to: Option<String>,
}

impl TraceParams {
    pub fn parse(&self) -> sitecoord_core::Result<(SubjectRef, Option<(Timestamp, Timestamp)>)> {
        let subject: SubjectRef = self.subject.parse()?;
        let instant = |s: &str| {
            s.parse::<Timestamp>()
                .map_err(|e| Error::InvalidInput(format!("bad instant `{s}`: {e}")))
        };
        let range = match (&self.from, &self.to) {
            (None, None) => None,
            (Some(f), Some(t)) => Some((instant(f)?, instant(t)?)),
            _ => return Err(Error::InvalidInput("give both `from` and `to`, or neither".into())),
        };
        Ok((subject, range))
    }
}

async fn trace(
    State(s): State<AppState>,
    path: ProjectPath,
    query: Result<Query<TraceParams>, QueryRejection>,
) -> ApiResult<Response> {
    let (Path(project), Query(q)) = (path?, query?);
    let (subject, range) = q.parse()?;
    Ok(ok(run(&s, move |p| p.trace(&project, &subject, range)).await?))
}

// ---- views ----

#[derive(Debug, Deserialize)]
struct ViewParams {
    report: Option<EntityId>,
}

async fn view(
    State(s): State<AppState>,
    path: Result<Path<(EntityId, String)>, PathRejection>,
    query: Result<Query<ViewParams>, QueryRejection>,
) -> ApiResult<Response> {
    let (Path((project, kind)), Query(q)) = (path?, query?);
    let kind: ViewKind = kind.parse()?;
    Ok(ok(run(&s, move |p| p.view(&project, kind, q.report.as_ref())).await?))
}

async fn select(State(s): State<AppState>, path: ProjectPath, body: Body<SelectionRequest>) -> ApiResult<Response> {
    let (Path(project), Json(request)) = (path?, body?);
    Ok(ok(run(&s, move |p| p.select(&project, &request)).await?))
}

// ---- search ----

/// Query string of the search endpoint; also what the command line builds.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SearchParams {
    pub scope: Option<String>,
    pub project: Option<EntityId>,
    pub report: Option<EntityId>,
    pub responsible: Option<EntityId>,
    pub lot: Option<EntityId>,
    pub element: Option<EntityId>,
    pub status: Option<RemarkStatus>,
    pub from: Option<NaiveDate>,
    pub to: Option<NaiveDate>,
}

impl SearchParams {
    /// Scope and filter, checked for shape; the scope defaults to the
    /// portfolio.
    pub fn to_request(&self) -> sitecoord_core::Result<(SearchScope, Filter)> {
        let level: ScopeLevel = self.scope.as_deref().unwrap_or("portfolio").parse()?;
        let scope = SearchScope {
            level,
            project_id: self.project.clone(),
            report_id: self.report.clone(),
        };
        scope.well_formed()?;
        let date_range = match (self.from, self.to) {
            (None, None) => None,
            (Some(f), Some(t)) => Some((f, t)),
            _ => return Err(Error::InvalidInput("give both `from` and `to`, or neither".into())),
        };
        let filter = Filter {
            responsible: self.responsible.clone(),
            lot: self.lot.clone(),
            element: self.element.clone(),
            status: self.status,
            date_range,
        };
        Ok((scope, filter))
    }
}

async fn search(State(s): State<AppState>, query: Result<Query<SearchParams>, QueryRejection>) -> ApiResult<Response> {
    let Query(q) = query?;
    let (scope, filter) = q.to_request()?;
    Ok(ok(run(&s, move |p| p.search(&scope, &filter)).await?))
}
