use std::fs;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use sitecoord_api::{router, status_for, AppState, ErrorBody, SearchParams, Tokens};
use sitecoord_core::crossview::{ConceptKind, ConceptNode, SelectionEvent, ViewKind};
use sitecoord_core::report::{NewRemark, OpenReport};
use sitecoord_core::store::{read_contents, ExchangeEvent};
use sitecoord_core::{EntityId, Platform, SelectionRequest, Store, SubjectRef};
use sitecoord_testkit::fixtures::{self, day, id, COORDINATOR, MASON, SYNC_REMARK};
use sitecoord_testkit::{gen, memory_platform, rng, test_clock, HttpCall, OpGen};
use tower::ServiceExt;

fn token_of(actor: &EntityId) -> String {
    format!("tok-{actor}")
}

struct App {
    router: Router,
    platform: Arc<Platform>,
    tokens: Arc<Tokens>,
}

impl App {
    fn new(platform: Platform) -> Self {
        let platform = Arc::new(platform);
        let tokens = Arc::new(Tokens::fixed([
            (token_of(&id(COORDINATOR)), id(COORDINATOR)),
            (token_of(&id(MASON)), id(MASON)),
            ("tok-act-1".to_owned(), id("act-1")),
        ]));
        let router = router(AppState {
            platform: Arc::clone(&platform),
            tokens: Arc::clone(&tokens),
        });
        App {
            router,
            platform,
            tokens,
        }
    }

    async fn raw(&self, method: &str, path: &str, token: Option<&str>, body: Option<String>) -> (StatusCode, Vec<u8>) {
        let mut req = Request::builder().method(method).uri(path);
        if let Some(t) = token {
            req = req.header("authorization", format!("Bearer {t}"));
        }
        let req = match body {
            Some(b) => req.header("content-type", "application/json").body(Body::from(b)),
            None => req.body(Body::empty()),
        }
        .unwrap();
        let resp = self.router.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
        (status, bytes)
    }

    async fn call(&self, method: &str, path: &str, actor: &str, body: Option<Value>) -> (StatusCode, Value) {
        let token = token_of(&id(actor));
        let (status, bytes) = self.raw(method, path, Some(&token), body.map(|b| b.to_string())).await;
        let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
        (status, value)
    }

    async fn send(&self, call: &HttpCall) -> (StatusCode, Value) {
        self.tokens.insert(token_of(&call.actor), call.actor.clone());
        self.call(call.method, &call.path, call.actor.as_str(), call.body.clone()).await
    }
}

fn json_of<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap()
}

fn house_app() -> App {
    let app = App::new(memory_platform());
    app.platform.import_project(&id(COORDINATOR), fixtures::house()).unwrap();
    app
}

#[tokio::test]
async fn health_needs_no_token_and_everything_else_does() {
    let app = house_app();
    let (status, body) = app.raw("GET", "/health", None, None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(serde_json::from_slice::<Value>(&body).unwrap(), json!({"status": "ok"}));

    for (token, why) in [(None, "missing"), (Some("nope"), "unknown")] {
        let (status, body) = app.raw("GET", "/projects", token, None).await;
        assert_eq!(status, StatusCode::UNAUTHORIZED, "{why}");
        let err: ErrorBody = serde_json::from_slice(&body).unwrap();
        assert_eq!(err.code, "unknown-token");
    }
    // A rejected token must not reach the operation.
    let before = app.platform.events(&id("house")).unwrap().len();
    let form = json!({"meetingDate": "2024-03-04", "presence": [], "diffusionList": [MASON]});
    let (status, _) = app
        .raw("POST", "/projects/house/reports", Some("nope"), Some(form.to_string()))
        .await;
    assert_eq!(status, StatusCode::UNAUTHORIZED);
    assert_eq!(app.platform.events(&id("house")).unwrap().len(), before);

    let (status, body) = app.call("GET", "/nowhere", COORDINATOR, None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["code"], "unknown-route");
}

#[tokio::test]
async fn report_flow_and_error_statuses() {
    let app = house_app();
    let form = json!({"meetingDate": "2024-03-04", "presence": [{"actorId": COORDINATOR, "status": "present"}], "diffusionList": [MASON]});
    let (status, report) = app.call("POST", "/projects/house/reports", COORDINATOR, Some(form.clone())).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(report["id"], "rpt-000001");

    let (status, body) = app.call("POST", "/projects/house/reports", MASON, Some(form)).await;
    assert_eq!((status, body["code"].as_str()), (StatusCode::FORBIDDEN, Some("not-coordinator")));

    let remark = json!({"text": SYNC_REMARK, "responsible": [MASON], "lotId": "lot-shell", "elements": ["el-wall"]});
    let (status, created) = app
        .call("POST", "/projects/house/reports/rpt-000001/remarks", COORDINATOR, Some(remark.clone()))
        .await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(created, json_of(&app.platform.remark(&id("house"), &id("rmk-000001")).unwrap()));

    let (status, _) = app.call("POST", "/projects/house/reports/rpt-000001/validate", COORDINATOR, None).await;
    assert_eq!(status, StatusCode::OK);
    let (status, body) = app
        .call("POST", "/projects/house/reports/rpt-000001/remarks", COORDINATOR, Some(remark))
        .await;
    assert_eq!((status, body["code"].as_str()), (StatusCode::CONFLICT, Some("report-validated")));

    // The contractor reacts to a remark of the validated report.
    let (status, reaction) = app
        .call("POST", "/projects/house/remarks/rmk-000001/reactions", MASON, Some(json!({"body": "Will fix"})))
        .await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(reaction["author"], MASON);
    assert_eq!(reaction["body"], "Will fix");

    let (status, body) = app.call("GET", "/projects/house/reports/rpt-000009", COORDINATOR, None).await;
    assert_eq!((status, body["code"].as_str()), (StatusCode::NOT_FOUND, Some("unknown-id")));
    let (status, body) = app
        .call("POST", "/projects/house/reports/rpt-000001/progress", COORDINATOR, Some(json!({"lotId": 3})))
        .await;
    assert_eq!((status, body["code"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("invalid-input")));

    let (status, list) = app.call("GET", "/projects/house/reports?status=validated", COORDINATOR, None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(list.as_array().unwrap().len(), 1);
    let (status, list) = app.call("GET", "/projects/house/reports?status=draft", COORDINATOR, None).await;
    assert_eq!((status, list), (StatusCode::OK, json!([])));

    let (status, html) = app
        .raw("GET", "/projects/house/reports/rpt-000001/export", Some(&token_of(&id(MASON))), None)
        .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(
        String::from_utf8(html).unwrap(),
        app.platform.export_report(&id("house"), &id("rpt-000001")).unwrap()
    );
}

#[tokio::test]
async fn import_over_http() {
    let app = App::new(memory_platform());
    let text = fixtures::house().to_json_pretty();
    let (status, body) = app.raw("POST", "/projects", Some("tok-act-coord"), Some(text.clone())).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(serde_json::from_slice::<Value>(&body).unwrap()["id"], "house");
    let (status, body) = app.raw("POST", "/projects", Some("tok-act-coord"), Some(text)).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(serde_json::from_slice::<ErrorBody>(&body).unwrap().code, "duplicate-project");

    let (status, body) = app.raw("POST", "/projects", Some("tok-act-coord"), Some("{\n  \"id\": ,".into())).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let err: ErrorBody = serde_json::from_slice(&body).unwrap();
    assert_eq!(err.code, "invalid-input");
    assert!(err.message.contains("line 2"), "{}", err.message);

    let mut cyclic = fixtures::house();
    cyclic.id = id("cyclic");
    cyclic.tasks[0].predecessors = vec![id("tsk-roof")];
    let (status, body) = app
        .raw("POST", "/projects", Some("tok-act-coord"), Some(cyclic.to_json_pretty()))
        .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let err: ErrorBody = serde_json::from_slice(&body).unwrap();
    assert_eq!(err.code, "invalid-project");
    assert_eq!(err.details.unwrap()[0]["rule"], "task-cycle");

    let (_, list) = app.call("GET", "/projects", COORDINATOR, None).await;
    assert_eq!(list, json_of(&app.platform.list_projects()));
    assert_eq!(list.as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn selection_endpoint_returns_the_highlight_set() {
    let app = house_app();
    let project = id("house");
    let report = app
        .platform
        .open_report(
            &project,
            &id(COORDINATOR),
            OpenReport {
                meeting_date: day(2024, 3, 18),
                presence: vec![],
                diffusion_list: vec![id(MASON)],
            },
        )
        .unwrap();
    app.platform
        .add_remark(
            &project,
            &id(COORDINATOR),
            &report.id,
            NewRemark {
                text: SYNC_REMARK.into(),
                responsible: vec![id(MASON)],
                lot_id: id("lot-shell"),
                elements: vec![id("el-wall"), id("el-roof")],
                attachments: vec![],
            },
        )
        .unwrap();
    let body = json!({"sourceView": "mockup3d", "node": {"kind": "buildingElement", "id": "el-wall"}});
    let (status, h) = app
        .raw("POST", "/projects/house/selection", Some("tok-act-mason"), Some(body.to_string()))
        .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(
        String::from_utf8(h).unwrap(),
        r#"{"selection":{"kind":"buildingElement","id":"el-wall"},"views":{"mockup3d":["el-wall"],"planning":["tsk-wall"],"meetingReport":["rmk-000001"]}}"#
    );
    let body = json!({"sourceView": "planning", "node": {"kind": "task", "id": "tsk-wall"},
        "arrangement": {"views": ["planning", "remarksOverview"], "layout": "grid"}, "maxBridge": 0});
    let (_, h) = app.call("POST", "/projects/house/selection", MASON, Some(body)).await;
    assert_eq!(h["views"], json!({"planning": ["tsk-wall"], "remarksOverview": []}));
    let body = json!({"sourceView": "planning", "node": {"kind": "task", "id": "tsk-wall"},
        "arrangement": {"views": ["planning"]}});
    let (status, err) = app.call("POST", "/projects/house/selection", MASON, Some(body)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{err}");
    let body = json!({"sourceView": "planning", "node": {"kind": "task", "id": "tsk-ghost"}});
    let (status, err) = app.call("POST", "/projects/house/selection", MASON, Some(body)).await;
    assert_eq!((status, err["code"].as_str()), (StatusCode::NOT_FOUND, Some("node-not-in-graph")));

    let (status, items) = app.call("GET", "/projects/house/views/planning", MASON, None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(items, json_of(&app.platform.view(&project, ViewKind::Planning, None).unwrap()));
    let (status, err) = app.call("GET", "/projects/house/views/meetingReport", MASON, None).await;
    assert_eq!((status, err["code"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("missing-context")));
    let (status, _) = app.call("GET", "/projects/house/views/meetingReport?report=rpt-000001", MASON, None).await;
    assert_eq!(status, StatusCode::OK);
    let (status, _) = app.call("GET", "/projects/house/views/gallery", MASON, None).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn search_and_trace_query_strings() {
    let app = house_app();
    let (status, _) = app.call("GET", "/search?scope=report&project=house", COORDINATOR, None).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = app.call("GET", "/search?scope=everywhere", COORDINATOR, None).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = app.call("GET", "/search?from=2024-01-01", COORDINATOR, None).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, body) = app.call("GET", "/search?scope=project&project=elsewhere", COORDINATOR, None).await;
    assert_eq!((status, body["code"].as_str()), (StatusCode::NOT_FOUND, Some("unknown-scope-id")));
    let (status, body) = app.call("GET", "/search", COORDINATOR, None).await;
    assert_eq!((status, body), (StatusCode::OK, json!([])));

    let (status, _) = app.call("GET", "/projects/house/trace?subject=actor:act-mason", COORDINATOR, None).await;
    assert_eq!(status, StatusCode::OK);
    let (status, _) = app.call("GET", "/projects/house/trace?subject=wall", COORDINATOR, None).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = app
        .call(
            "GET",
            "/projects/house/trace?subject=actor:act-mason&from=2024-02-01T00:00:00Z&to=2024-01-01T00:00:00Z",
            COORDINATOR,
            None,
        )
        .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, events) = app.call("GET", "/projects/house/events?after=0", COORDINATOR, None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(events.as_array().unwrap().len(), 1);
}

/// Applies the same random operations directly to one platform and over
/// HTTP to a twin; responses, refusals and final logs must agree.
#[tokio::test]
async fn every_endpoint_passes_module_output_through() {
    for seed in 0..12u64 {
        let direct = memory_platform();
        let app = App::new(memory_platform());
        let mut r = rng(seed);
        let shape = gen::Shape::random(&mut r, 30);
        let project = gen::random_project(&mut r, &format!("site-{seed}"), shape);
        let pid = project.id.clone();
        direct.import_project(&id("act-1"), project.clone()).unwrap();
        let (status, _) = app
            .raw("POST", "/projects", Some("tok-act-1"), Some(project.to_json_pretty()))
            .await;
        assert_eq!(status, StatusCode::CREATED);

        let gen = OpGen::default();
        let mut refused = 0;
        for _ in 0..120 {
            let op = gen.next(&mut r, &direct.snapshot(&pid).unwrap().state);
            let expected = op.apply(&direct, &pid);
            let (status, body) = app.send(&op.request(&pid)).await;
            match expected {
                Ok(v) => {
                    assert!(status.is_success(), "{} → {status} {body}", op.name());
                    assert_eq!(body, v, "{}", op.name());
                }
                Err(e) => {
                    refused += 1;
                    assert_eq!(status, status_for(e.class()), "{}: {e}", op.name());
                    assert_eq!(body["code"], e.code(), "{}", op.name());
                }
            }
        }
        assert!(refused > 0);
        let lines = |events: Vec<ExchangeEvent>| events.iter().map(ExchangeEvent::to_line).collect::<Vec<_>>();
        assert_eq!(lines(app.platform.events(&pid).unwrap()), lines(direct.events(&pid).unwrap()));

        // Reads on identical state.
        let state = direct.snapshot(&pid).unwrap().state.clone();
        let actor = "act-1";
        let get = |path: String| {
            let app = &app;
            async move {
                let (status, body) = app.call("GET", &path, actor, None).await;
                assert_eq!(status, StatusCode::OK, "{path}: {body}");
                body
            }
        };
        assert_eq!(get(format!("/projects/{pid}")).await, json_of(&direct.project(&pid).unwrap()));
        assert_eq!(get(format!("/projects/{pid}/snapshot")).await, json_of(&*direct.snapshot(&pid).unwrap()));
        assert_eq!(get(format!("/projects/{pid}/reports")).await, json_of(&direct.list_reports(&pid, None).unwrap()));
        assert_eq!(get(format!("/projects/{pid}/remarks")).await, json_of(&direct.remarks(&pid).unwrap()));
        assert_eq!(get(format!("/projects/{pid}/plans")).await, json_of(&direct.plans(&pid).unwrap()));
        for rep in &state.reports {
            assert_eq!(
                get(format!("/projects/{pid}/reports/{}", rep.id)).await,
                json_of(&direct.report(&pid, &rep.id).unwrap())
            );
            let mr = get(format!("/projects/{pid}/views/meetingReport?report={}", rep.id)).await;
            assert_eq!(mr, json_of(&direct.view(&pid, ViewKind::MeetingReport, Some(&rep.id)).unwrap()));
        }
        for rem in &state.remarks {
            assert_eq!(
                get(format!("/projects/{pid}/remarks/{}", rem.id)).await,
                json_of(&direct.remark(&pid, &rem.id).unwrap())
            );
            let subject = SubjectRef::Remark(rem.id.clone());
            assert_eq!(
                get(format!("/projects/{pid}/trace?subject={subject}")).await,
                json_of(&direct.trace(&pid, &subject, None).unwrap())
            );
        }
        for plan in &state.plans {
            for v in &plan.versions {
                assert_eq!(
                    get(format!("/projects/{pid}/plans/{}/diffusion/{}", plan.document.id, v.version)).await,
                    json_of(&direct.diffusion_status(&pid, &plan.document.id, v.version).unwrap())
                );
            }
        }
        for a in &state.project.actors {
            let subject = SubjectRef::Actor(a.id.clone());
            assert_eq!(
                get(format!("/projects/{pid}/trace?subject={subject}")).await,
                json_of(&direct.trace(&pid, &subject, None).unwrap())
            );
        }
        for kind in [ViewKind::Planning, ViewKind::Mockup3d, ViewKind::RemarksOverview] {
            assert_eq!(
                get(format!("/projects/{pid}/views/{kind}")).await,
                json_of(&direct.view(&pid, kind, None).unwrap())
            );
        }
        for e in state.project.elements.iter().take(5) {
            let request = SelectionRequest {
                selection: SelectionEvent {
                    source_view: ViewKind::Mockup3d,
                    node: ConceptNode::new(ConceptKind::BuildingElement, e.id.clone()),
                },
                arrangement: Default::default(),
                max_bridge: 1,
                report: None,
            };
            let (status, body) = app
                .call("POST", &format!("/projects/{pid}/selection"), actor, Some(json_of(&request)))
                .await;
            assert_eq!(status, StatusCode::OK);
            assert_eq!(body, json_of(&direct.select(&pid, &request).unwrap()));
        }

        let states = vec![state.clone()];
        let mut qr = rng(seed + 1000);
        for _ in 0..20 {
            let (scope, filter) = gen::random_query(&mut qr, &states);
            let params = SearchParams {
                scope: Some(json_of(&scope.level).as_str().unwrap().to_owned()),
                project: scope.project_id.clone(),
                report: scope.report_id.clone(),
                responsible: filter.responsible.clone(),
                lot: filter.lot.clone(),
                element: filter.element.clone(),
                status: filter.status,
                from: filter.date_range.map(|d| d.0),
                to: filter.date_range.map(|d| d.1),
            };
            let query = query_string(&params);
            let (status, body) = app.call("GET", &format!("/search?{query}"), actor, None).await;
            match direct.search(&scope, &filter) {
                Ok(hits) if scope.project_id.is_some() || scope.level == sitecoord_core::search::ScopeLevel::Portfolio => {
                    assert_eq!(status, StatusCode::OK, "{query}: {body}");
                    assert_eq!(body, json_of(&hits), "{query}");
                }
                Ok(_) => unreachable!("malformed scopes are refused"),
                Err(e) => {
                    assert_eq!(status, status_for(e.class()), "{query}");
                    assert_eq!(body["code"], e.code());
                }
            }
        }
    }
}

fn query_string(p: &SearchParams) -> String {
    let v = json_of(p);
    v.as_object()
        .unwrap()
        .iter()
        .filter_map(|(k, v)| v.as_str().map(|s| format!("{k}={s}")))
        .collect::<Vec<_>>()
        .join("&")
}

/// Only the event store writes the log: after an HTTP session on disk, the
/// log holds exactly one event per accepted mutation, in dispatch order and
/// under the authenticated actor.
#[tokio::test]
async fn log_matches_the_dispatch_history() {
    let dir = tempfile::tempdir().unwrap();
    let app = App::new(Platform::new(Store::open(dir.path(), test_clock()).unwrap()));
    let mut r = rng(99);
    let shape = gen::Shape::random(&mut r, 30);
    let project = gen::random_project(&mut r, "logged", shape);
    let pid = project.id.clone();
    let (status, _) = app
        .raw("POST", "/projects", Some("tok-act-1"), Some(project.to_json_pretty()))
        .await;
    assert_eq!(status, StatusCode::CREATED);
    let mut accepted: Vec<(String, EntityId)> = vec![("project.imported".into(), id("act-1"))];
    let gen = OpGen::default();
    for _ in 0..150 {
        let op = gen.next(&mut r, &app.platform.snapshot(&pid).unwrap().state);
        let call = op.request(&pid);
        let (status, _) = app.send(&call).await;
        // Reads interleave and must never write.
        app.call("GET", &format!("/projects/{pid}/reports"), "act-1", None).await;
        if status.is_success() {
            accepted.push((op.name().to_owned(), call.actor.clone()));
        }
    }
    let contents = read_contents(&app.platform.store().project_dir(&pid).unwrap()).unwrap();
    let events: Vec<ExchangeEvent> = contents.lines.iter().map(|l| ExchangeEvent::from_line(l).unwrap()).collect();
    assert_eq!(events.len(), accepted.len());
    for (e, (name, actor)) in events.iter().zip(&accepted) {
        assert_eq!(&e.actor, actor);
        let expected_kind = match name.as_str() {
            "project.imported" => "project.imported",
            "open-report" => "report.opened",
            "set-presence" => "report.presenceSet",
            "set-progress" => "report.progressSet",
            "validate-report" => "report.validated",
            "add-remark" => "remark.added",
            "amend-remark" => "remark.amended",
            "close-remark" => "remark.closed",
            "react" => "remark.reacted",
            "register-plan" => "plan.registered",
            "publish-version" => "plan.published",
            "annotate" => "plan.annotated",
            "acknowledge" => "plan.acknowledged",
            other => panic!("unmapped op {other}"),
        };
        assert_eq!(e.kind, expected_kind, "op {name}");
    }
    assert_eq!(events, app.platform.events(&pid).unwrap());

    // And a restart brings back the same state.
    let live = app.platform.snapshot(&pid).unwrap();
    drop(app);
    let reopened = sitecoord_api::open_platform(dir.path(), test_clock()).unwrap();
    assert_eq!(*reopened.snapshot(&pid).unwrap(), *live);
}

#[tokio::test]
async fn reload_revokes_removed_tokens() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tokens.json");
    fs::write(&path, json!({"tokens": {"alpha": COORDINATOR, "beta": MASON}}).to_string()).unwrap();
    let tokens = Arc::new(Tokens::from_file(&path).unwrap());
    let platform = Arc::new(memory_platform());
    let router = router(AppState {
        platform,
        tokens: Arc::clone(&tokens),
    });
    let get = |token: &'static str| {
        let router = router.clone();
        async move {
            let req = Request::get("/projects")
                .header("authorization", format!("Bearer {token}"))
                .body(Body::empty())
                .unwrap();
            router.oneshot(req).await.unwrap().status()
        }
    };
    assert_eq!(get("beta").await, StatusCode::OK);
    fs::write(&path, json!({"tokens": {"alpha": COORDINATOR}}).to_string()).unwrap();
    assert_eq!(get("beta").await, StatusCode::OK, "no reload yet");
    assert_eq!(tokens.reload().unwrap(), 1);
    assert_eq!(get("beta").await, StatusCode::UNAUTHORIZED);
    assert_eq!(get("alpha").await, StatusCode::OK);

    fs::write(&path, "not json").unwrap();
    assert!(tokens.reload().is_err());
    assert_eq!(get("alpha").await, StatusCode::OK, "a bad file keeps the previous tokens");
}
