//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit when
//! any criterion fails. Every check compares the implementation against an
//! independent oracle or against an earlier observation of itself.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Child, Command, ExitCode, Stdio};
use std::time::{Duration, Instant};

use rand::Rng;
use serde_json::Value;
use sitecoord_core::crossview::{
    build_graph, highlighted_nodes, resolve_selection, set_arrangement, ConceptKind, ConceptNode, Layout,
    SelectionEvent, ViewKind,
};
use sitecoord_core::report::{NewRemark, OpenReport, ReportStatus};
use sitecoord_core::store::{read_contents, replay, verify_dir, LOG_FILE};
use sitecoord_core::{EntityId, ExchangeEvent, Platform, SelectionRequest, Snapshot};
use sitecoord_testkit::fixtures::{self, day, id, COORDINATOR, MASON, ROOFER, SYNC_REMARK};
use sitecoord_testkit::{drive, gen, memory_platform, oracle, random_portfolio, random_site, rng, test_clock, Op, OpGen};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("wall-selection-scenario", wall_selection_scenario),
        ("propagation-oracle", propagation_oracle),
        ("search-equivalence", search_equivalence),
        ("freeze-and-numbering", freeze_and_numbering),
        ("replay-and-tamper-evidence", replay_and_tamper_evidence),
        ("diffusion-completeness", diffusion_completeness),
        ("durability", durability),
        ("cli-determinism", cli_determinism),
    ];
    // Panics become FAIL lines instead of aborting the suite.
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let started = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name} ({secs:.2}s): {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL {name} ({secs:.2}s): {reason}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

// ------------------------------------------------------------ wall-selection-scenario

fn wall_selection_scenario() -> Outcome {
    let started = Instant::now();
    let p = memory_platform();
    let house = fixtures::house();
    let label = |eid: &str| -> String {
        let e = id(eid);
        house
            .elements
            .iter()
            .find(|x| x.id == e)
            .map(|x| x.label.clone())
            .or_else(|| house.tasks.iter().find(|t| t.id == e).map(|t| t.label.clone()))
            .unwrap_or_default()
    };
    ensure!(label("el-wall") == "main wall", "fixture wall label");
    ensure!(label("tsk-wall") == "wall construction", "fixture wall task label");
    ensure!(label("el-roof") == "roof frame", "fixture roof label");
    p.import_project(&id(COORDINATOR), house.clone()).map_err(|e| e.to_string())?;
    let project = id("house");
    let report = p
        .open_report(
            &project,
            &id(COORDINATOR),
            OpenReport {
                meeting_date: day(2024, 3, 18),
                presence: vec![],
                diffusion_list: vec![id(MASON), id(ROOFER)],
            },
        )
        .map_err(|e| e.to_string())?;
    let remark = p
        .add_remark(
            &project,
            &id(COORDINATOR),
            &report.id,
            NewRemark {
                text: SYNC_REMARK.into(),
                responsible: vec![id(MASON), id(ROOFER)],
                lot_id: id("lot-shell"),
                elements: vec![id("el-wall"), id("el-roof")],
                attachments: vec![],
            },
        )
        .map_err(|e| e.to_string())?;
    let request = SelectionRequest {
        selection: SelectionEvent {
            source_view: ViewKind::Mockup3d,
            node: ConceptNode::new(ConceptKind::BuildingElement, "el-wall"),
        },
        arrangement: Default::default(),
        max_bridge: 1,
        report: None,
    };
    let h = p.select(&project, &request).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let got: BTreeMap<ViewKind, Vec<EntityId>> = h.views.iter().cloned().collect();
    let expected: BTreeMap<ViewKind, Vec<EntityId>> = [
        // The selection itself stays marked in the pane it was made in.
        (ViewKind::Mockup3d, vec![id("el-wall")]),
        (ViewKind::Planning, vec![id("tsk-wall")]),
        (ViewKind::MeetingReport, vec![remark.id.clone()]),
    ]
    .into_iter()
    .collect();
    ensure!(got == expected, "highlights {got:?}, expected {expected:?}");
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!(
        "planning={{tsk-wall}} meetingReport={{{}}} nothing else, {:.1} ms",
        remark.id,
        elapsed.as_secs_f64() * 1000.0
    ))
}

// ------------------------------------------------------- propagation-oracle

fn propagation_oracle() -> Outcome {
    const PROJECTS: usize = 500;
    const MAX_NODES: usize = 50;
    let started = Instant::now();
    let all = set_arrangement(ViewKind::ALL.to_vec(), Layout::Grid).map_err(|e| e.to_string())?;
    let (mut checked, mut skipped, mut comparisons, mut non_trivial) = (0, 0, 0usize, 0usize);
    let mut largest = 0;
    let mut seed = 0u64;
    while checked < PROJECTS {
        seed += 1;
        let ops = (seed % 80) as usize;
        let (p, project, _) = random_site(seed, 48, ops);
        let snapshot = p.snapshot(&project).map_err(|e| e.to_string())?;
        let state = &snapshot.state;
        let graph = build_graph(state).map_err(|e| e.to_string())?;
        if graph.len() > MAX_NODES {
            skipped += 1;
            continue;
        }
        checked += 1;
        largest = largest.max(graph.len());
        let edges = oracle::expected_edges(state);
        let nodes: BTreeSet<ConceptNode> = graph.nodes().iter().cloned().collect();
        ensure!(nodes == oracle::expected_nodes(state), "seed {seed}: node set differs");
        let latest = state.reports.last().map(|r| r.id.clone());
        let view_items: BTreeMap<ViewKind, BTreeSet<ConceptNode>> = ViewKind::ALL
            .iter()
            .map(|&v| (v, oracle::view_item_ids(state, v, latest.as_ref())))
            .collect();
        for max_bridge in 0..=2 {
            for node in graph.nodes() {
                let related = oracle::enumerate_related(&edges, node, max_bridge);
                let got = highlighted_nodes(&graph, node, max_bridge).map_err(|e| e.to_string())?;
                ensure!(got == related, "seed {seed}: related set of {node} at {max_bridge}");
                non_trivial += usize::from(related.len() > 1);
                for source in ViewKind::ALL {
                    let selection = SelectionEvent {
                        source_view: source,
                        node: node.clone(),
                    };
                    let h = resolve_selection(&graph, &selection, &all, max_bridge, latest.as_ref())
                        .map_err(|e| e.to_string())?;
                    ensure!(h.views.len() == ViewKind::ALL.len(), "seed {seed}: missing views");
                    for (kind, ids) in &h.views {
                        let expected: BTreeSet<EntityId> = view_items[kind]
                            .iter()
                            .filter(|n| related.contains(n) && (*n != node || *kind == source))
                            .map(|n| n.id.clone())
                            .collect();
                        let as_set: BTreeSet<EntityId> = ids.iter().cloned().collect();
                        ensure!(as_set.len() == ids.len(), "seed {seed}: duplicate highlight");
                        ensure!(
                            as_set == expected,
                            "seed {seed}: {node} from {source} at {max_bridge}, view {kind}: {as_set:?} vs {expected:?}"
                        );
                        comparisons += 1;
                    }
                }
            }
        }
    }
    let elapsed = started.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    ensure!(non_trivial > 0, "no selection ever reached another node");
    Ok(format!(
        "{checked} projects (largest {largest} nodes; {skipped} over {MAX_NODES} drawn and set aside), \
         {comparisons} view comparisons, 100% equal, {:.1}s",
        elapsed.as_secs_f64()
    ))
}

// ------------------------------------------------------- search-equivalence

fn search_equivalence() -> Outcome {
    let (mut triples, mut errors, mut non_empty) = (0usize, 0usize, 0usize);
    let mut seed = 0u64;
    while triples < 1000 {
        seed += 1;
        let (p, _) = random_portfolio(seed, 1 + (seed % 3) as usize, 30, 120);
        let states: Vec<_> = p.store().portfolio().iter().map(|s| s.state.clone()).collect();
        let mut r = rng(seed ^ 0x5eed);
        for _ in 0..25 {
            let (scope, filter) = gen::random_query(&mut r, &states);
            let got = p
                .search(&scope, &filter)
                .map(|hits| hits.into_iter().map(|h| (h.project_id, h.report_id, h.remark_id)).collect::<Vec<_>>())
                .map_err(|e| e.code());
            let want = oracle::naive_search(&states, &scope, &filter);
            ensure!(got == want, "seed {seed}: {scope:?} {filter:?}: {got:?} vs {want:?}");
            triples += 1;
            match &got {
                Err(_) => errors += 1,
                Ok(h) if !h.is_empty() => non_empty += 1,
                Ok(_) => {}
            }
        }
    }
    ensure!(non_empty * 4 >= triples, "only {non_empty}/{triples} queries matched anything");
    Ok(format!(
        "{triples} triples equal to the full scan ({non_empty} with hits, {errors} refused alike)"
    ))
}

// ----------------------------------------------------- freeze-and-numbering

/// A validated report together with what its meeting authored: the remarks
/// it opened, minus what later meetings may legitimately change (closure
/// and reactions).
fn frozen_bytes(state: &sitecoord_core::ProjectState, report: &EntityId) -> Vec<u8> {
    let r = state.reports.iter().find(|r| &r.id == report).expect("report exists");
    let authored: Vec<_> = state
        .remarks
        .iter()
        .filter(|m| &m.opened_in_report == report)
        .map(|m| (&m.id, m.number, &m.text, &m.responsible, &m.lot_id, &m.elements, &m.attachments))
        .collect();
    serde_json::to_vec(&(r, authored)).expect("serializable")
}

fn freeze_and_numbering() -> Outcome {
    const SEQUENCES: u64 = 1000;
    let gen = OpGen::default();
    let (mut validated, mut remarks, mut ops_total) = (0usize, 0usize, 0usize);
    for seed in 0..SEQUENCES {
        let (p, project, _) = random_site(seed, 30, 0);
        let mut r = rng(seed ^ 0xf4ee);
        let ops = r.random_range(10..70);
        let mut frozen: BTreeMap<EntityId, Vec<u8>> = BTreeMap::new();
        let mut next_number = 1u64;
        for _ in 0..ops {
            let before = p.snapshot(&project).map_err(|e| e.to_string())?;
            let op = gen.next(&mut r, &before.state);
            let outcome = op.apply(&p, &project);
            ops_total += 1;
            if let (Op::AddRemark { .. }, Ok(v)) = (&op, &outcome) {
                ensure!(v["number"].as_u64() == Some(next_number), "seed {seed}: remark numbered {}", v["number"]);
                next_number += 1;
            }
            let after = p.snapshot(&project).map_err(|e| e.to_string())?;
            for report in &after.state.reports {
                let bytes = frozen_bytes(&after.state, &report.id);
                match frozen.get(&report.id) {
                    Some(prev) => ensure!(prev == &bytes, "seed {seed}: validated {} changed after {}", report.id, op.name()),
                    None if report.status == ReportStatus::Validated => {
                        frozen.insert(report.id.clone(), bytes);
                    }
                    None => {}
                }
            }
        }
        let state = &p.snapshot(&project).map_err(|e| e.to_string())?.state;
        let numbers: Vec<u32> = state.remarks.iter().map(|m| m.number).collect();
        ensure!(
            numbers == (1..=state.remarks.len() as u32).collect::<Vec<_>>(),
            "seed {seed}: remark numbers {numbers:?}"
        );
        let sequences: Vec<u32> = state.reports.iter().map(|r| r.sequence).collect();
        ensure!(
            sequences == (1..=state.reports.len() as u32).collect::<Vec<_>>(),
            "seed {seed}: report sequence {sequences:?}"
        );
        validated += frozen.len();
        remarks += state.remarks.len();
    }
    ensure!(validated > SEQUENCES as usize / 4, "only {validated} reports ever validated");
    Ok(format!(
        "{SEQUENCES} sequences, {ops_total} operations, {validated} validated reports never changed, \
         {remarks} remarks numbered without gaps"
    ))
}

// ------------------------------------------------ replay-and-tamper-evidence

fn disk_site(dir: &Path, seed: u64, ops: usize) -> Result<(Platform, EntityId), String> {
    fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    let p = sitecoord_api::open_platform(dir, test_clock()).map_err(|e| e.to_string())?;
    let mut r = rng(seed);
    let shape = gen::Shape::random(&mut r, 30);
    let project = gen::random_project(&mut r, &format!("site-{seed}"), shape);
    let pid = project.id.clone();
    p.import_project(&id("act-1"), project).map_err(|e| e.to_string())?;
    drive(&p, &pid, &mut r, &OpGen::default(), ops);
    Ok((p, pid))
}

fn detected(log_dir: &Path) -> bool {
    !matches!(verify_dir(log_dir), Ok(report) if report.is_ok())
}

fn replay_and_tamper_evidence() -> Outcome {
    // Replay of the in-memory log equals the live state.
    let mut live_checked = 0;
    for seed in 0..300u64 {
        let (p, project, _) = random_site(seed, 30, (seed % 120) as usize);
        let live = p.snapshot(&project).map_err(|e| e.to_string())?;
        let events = p.events(&project).map_err(|e| e.to_string())?;
        let replayed = replay(&events).map_err(|e| e.to_string())?;
        ensure!(replayed == *live, "seed {seed}: replay differs from live state");
        live_checked += 1;
    }

    // On disk: reopening replays the persisted log to the same state, and
    // any single flipped byte is noticed.
    let (mut reopened, mut flips) = (0, 0usize);
    for seed in 0..40u64 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let (p, project) = disk_site(dir.path(), seed, 10 + (seed as usize % 50))?;
        let live = p.snapshot(&project).map_err(|e| e.to_string())?;
        let log_dir = p.store().project_dir(&project).expect("disk store");
        drop(p);
        let again = sitecoord_api::open_platform(dir.path(), test_clock()).map_err(|e| e.to_string())?;
        ensure!(*again.snapshot(&project).map_err(|e| e.to_string())? == *live, "seed {seed}: reopened state differs");
        drop(again);
        reopened += 1;

        ensure!(!detected(&log_dir), "seed {seed}: intact log reported as damaged");
        let log = log_dir.join(LOG_FILE);
        let original = fs::read(&log).map_err(|e| e.to_string())?;
        let mut r = rng(seed ^ 0x7a3);
        // The first logs are swept byte by byte; the rest are sampled.
        let offsets: Vec<usize> = if seed < 3 {
            (0..original.len()).collect()
        } else {
            (0..50).map(|_| r.random_range(0..original.len())).collect()
        };
        for at in offsets {
            let mask: u8 = r.random_range(1..=255);
            let mut bytes = original.clone();
            bytes[at] ^= mask;
            fs::write(&log, &bytes).map_err(|e| e.to_string())?;
            ensure!(detected(&log_dir), "seed {seed}: byte {at} ^ {mask:#04x} went unnoticed");
            flips += 1;
        }
        fs::write(&log, &original).map_err(|e| e.to_string())?;
    }
    Ok(format!(
        "{live_checked} in-memory logs replay to the live state, {reopened} on-disk logs reopen identically, \
         {flips} single-byte corruptions all detected"
    ))
}

// ---------------------------------------------------- diffusion-completeness

fn diffusion_completeness() -> Outcome {
    let (mut publications, mut acks) = (0usize, 0usize);
    for seed in 0..300u64 {
        let (p, project, steps) = random_site(seed, 30, 20 + (seed as usize % 130));
        let state = &p.snapshot(&project).map_err(|e| e.to_string())?.state;
        let mut published = 0;
        for step in &steps {
            if let (Op::Publish { form, .. }, Ok(v)) = (&step.op, &step.outcome) {
                published += 1;
                let plan = EntityId::new(v["planId"].as_str().unwrap_or_default());
                let version = v["version"].as_u64().unwrap_or_default() as u32;
                let records: Vec<_> = state.diffusion_records(&plan, version).map(|d| d.recipient.clone()).collect();
                let unique: BTreeSet<_> = records.iter().cloned().collect();
                let expected: BTreeSet<_> = form.diffusion_list.iter().cloned().collect();
                ensure!(unique.len() == records.len(), "seed {seed}: duplicate record for {plan} v{version}");
                ensure!(unique == expected, "seed {seed}: records {unique:?} vs recipients {expected:?}");
            }
        }
        let total: usize = state.plans.iter().map(|pl| pl.versions.len()).sum();
        ensure!(total == published, "seed {seed}: {total} versions but {published} publications");
        for plan in &state.plans {
            for v in &plan.versions {
                let status = p
                    .diffusion_status(&project, &plan.document.id, v.version)
                    .map_err(|e| e.to_string())?;
                let records: Vec<_> = state.diffusion_records(&plan.document.id, v.version).collect();
                let acked = records.iter().filter(|d| d.acknowledged_at.is_some()).count();
                let pending: Vec<_> = records
                    .iter()
                    .filter(|d| d.acknowledged_at.is_none())
                    .map(|d| d.recipient.clone())
                    .collect();
                ensure!(status.notified == records.len(), "seed {seed}: notified count");
                ensure!(status.acknowledged == acked, "seed {seed}: acknowledged count");
                ensure!(status.notified == status.acknowledged + status.pending.len(), "seed {seed}: arithmetic");
                let got: BTreeSet<_> = status.pending.iter().cloned().collect();
                ensure!(got == pending.into_iter().collect(), "seed {seed}: pending list");
                acks += acked;
            }
        }
        for d in &state.diffusion {
            ensure!(
                d.acknowledged_at.is_none_or(|a| a >= d.notified_at),
                "seed {seed}: acknowledged before notified"
            );
        }
        publications += published;
    }
    ensure!(publications > 100 && acks > 50, "too few publications ({publications}) or acknowledgements ({acks})");
    Ok(format!("{publications} publications, {acks} acknowledgements, all consistent"))
}

// ---------------------------------------------------------------- durability

struct Service {
    child: Child,
    addr: String,
}

fn start(data: &Path, tokens: &Path) -> Result<Service, String> {
    let mut child = Command::new(env!("CARGO_BIN_EXE_sitecoord"))
        .arg("--data-dir")
        .arg(data)
        .args(["serve", "--addr", "127.0.0.1:0", "--tokens"])
        .arg(tokens)
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| e.to_string())?;
    let mut line = String::new();
    BufReader::new(child.stdout.take().expect("piped"))
        .read_line(&mut line)
        .map_err(|e| e.to_string())?;
    let addr = line
        .trim()
        .strip_prefix("listening on ")
        .ok_or_else(|| format!("service did not start: {line:?}"))?
        .to_owned();
    Ok(Service { child, addr })
}

impl Service {
    fn kill(mut self) {
        // SIGKILL: no shutdown code runs.
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

fn raw_request(method: &str, path: &str, actor: &EntityId, body: Option<&Value>) -> Vec<u8> {
    let body = body.map(|b| b.to_string()).unwrap_or_default();
    format!(
        "{method} {path} HTTP/1.1\r\nHost: localhost\r\nAuthorization: Bearer tok-{actor}\r\n\
         Content-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    )
    .into_bytes()
}

fn http(addr: &str, request: &[u8]) -> Result<(u16, String), String> {
    let mut stream = TcpStream::connect(addr).map_err(|e| e.to_string())?;
    stream.set_read_timeout(Some(Duration::from_secs(10))).map_err(|e| e.to_string())?;
    stream.write_all(request).map_err(|e| e.to_string())?;
    let mut raw = String::new();
    stream.read_to_string(&mut raw).map_err(|e| e.to_string())?;
    let status = raw
        .get(9..12)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| format!("bad response {raw:?}"))?;
    let body = raw.split_once("\r\n\r\n").map(|(_, b)| b.to_owned()).unwrap_or_default();
    Ok((status, body))
}

fn fetch_snapshot(addr: &str, project: &EntityId, actor: &EntityId) -> Result<Snapshot, String> {
    let (status, body) = http(addr, &raw_request("GET", &format!("/projects/{project}/snapshot"), actor, None))?;
    ensure!(status == 200, "snapshot answered {status}: {body}");
    serde_json::from_str(&body).map_err(|e| e.to_string())
}

/// Replays the log exactly as persisted, read straight from the file.
fn replay_from_disk(log_dir: &Path) -> Result<Snapshot, String> {
    let contents = read_contents(log_dir).map_err(|e| e.to_string())?;
    let events = contents
        .lines
        .iter()
        .map(|l| ExchangeEvent::from_line(l))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    replay(&events).map_err(|e| e.to_string())
}

fn durability() -> Outcome {
    let (mut restarts, mut acknowledged, mut in_flight, mut landed) = (0, 0usize, 0, 0);
    for seed in 0..3u64 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let data = dir.path().join("data");
        let mut r = rng(seed ^ 0xd0d0);
        let shape = gen::Shape::random(&mut r, 30);
        let project = gen::random_project(&mut r, &format!("site-{seed}"), shape);
        let pid = project.id.clone();
        let reader = project.actors.first().map(|a| a.id.clone()).ok_or("project without actors")?;
        let tokens: serde_json::Map<String, Value> = project
            .actors
            .iter()
            .map(|a| (format!("tok-{}", a.id), Value::String(a.id.to_string())))
            .collect();
        let token_file = dir.path().join("tokens.json");
        fs::write(&token_file, serde_json::json!({ "tokens": tokens }).to_string()).map_err(|e| e.to_string())?;
        let project_file = dir.path().join("project.json");
        fs::write(&project_file, project.to_json_pretty()).map_err(|e| e.to_string())?;
        let import = Command::new(env!("CARGO_BIN_EXE_sitecoord"))
            .arg("--data-dir")
            .arg(&data)
            .args(["--actor", "act-1", "import"])
            .arg(&project_file)
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(import.status.success(), "import failed: {}", String::from_utf8_lossy(&import.stderr));

        let gen = OpGen::default();
        let mut service = start(&data, &token_file)?;
        let mut current = fetch_snapshot(&service.addr, &pid, &reader)?;
        let log_dir = data.join("projects").join(sitecoord_core::store::project_dir_name(&pid));
        for lifetime in 0..15 {
            let ops = r.random_range(1..=4);
            for _ in 0..ops {
                let op = gen.next(&mut r, &current.state);
                let call = op.request(&pid);
                let (status, body) = http(&service.addr, &raw_request(call.method, &call.path, &call.actor, call.body.as_ref()))?;
                let after = fetch_snapshot(&service.addr, &pid, &reader)?;
                let expected = current.as_of_sequence + u64::from((200..300).contains(&status));
                ensure!(
                    after.as_of_sequence == expected,
                    "{} answered {status} ({body}) but sequence went {} -> {}",
                    op.name(),
                    current.as_of_sequence,
                    after.as_of_sequence
                );
                acknowledged += usize::from((200..300).contains(&status));
                current = after;
            }
            // Every other lifetime ends with a request still in flight.
            let pending = lifetime % 2 == 1;
            if pending {
                let op = gen.next(&mut r, &current.state);
                let call = op.request(&pid);
                let mut stream = TcpStream::connect(&service.addr).map_err(|e| e.to_string())?;
                let _ = stream.write_all(&raw_request(call.method, &call.path, &call.actor, call.body.as_ref()));
                std::thread::sleep(Duration::from_micros(r.random_range(0..800)));
                in_flight += 1;
            }
            service.kill();
            service = start(&data, &token_file)?;
            restarts += 1;
            let restored = fetch_snapshot(&service.addr, &pid, &reader)?;
            let persisted = replay_from_disk(&log_dir)?;
            ensure!(restored == persisted, "seed {seed}: restarted state differs from replay of the log");
            if pending && restored.as_of_sequence == current.as_of_sequence + 1 {
                landed += 1;
            } else {
                ensure!(
                    restored == current,
                    "seed {seed}: state before the kill (seq {}) lost or altered (seq {})",
                    current.as_of_sequence,
                    restored.as_of_sequence
                );
            }
            current = restored;
        }
        service.kill();
    }
    Ok(format!(
        "{restarts} kill -9 restarts, {acknowledged} acknowledged writes all kept, \
         {in_flight} kills mid-request ({landed} of those writes landed), state always equal to log replay"
    ))
}

// ----------------------------------------------------------- cli-determinism

fn export(data: &Path, project: &EntityId, report: &EntityId, out: &Path) -> Result<Vec<u8>, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_sitecoord"))
        .arg("--data-dir")
        .arg(data)
        .args(["export-report", "--project", project.as_str(), "--report", report.as_str(), "--output"])
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(o.status.success(), "export failed: {}", String::from_utf8_lossy(&o.stderr));
    fs::read(out).map_err(|e| e.to_string())
}

fn cli_determinism() -> Outcome {
    let (mut reports, mut frozen) = (0, 0);
    for seed in 0..12u64 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let data = dir.path().join("data");
        let (p, project) = disk_site(&data, seed, 80)?;
        let state = p.snapshot(&project).map_err(|e| e.to_string())?.state.clone();
        let direct: Vec<(EntityId, String)> = state
            .reports
            .iter()
            .map(|r| p.export_report(&project, &r.id).map(|h| (r.id.clone(), h)))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        drop(p);
        for (report, html) in direct {
            let a = export(&data, &project, &report, &dir.path().join("a.html"))?;
            let b = export(&data, &project, &report, &dir.path().join("b.html"))?;
            ensure!(a == b, "seed {seed}: two exports of {report} differ");
            ensure!(a == html.as_bytes(), "seed {seed}: CLI export of {report} differs from the library");
            reports += 1;
            let status = state.reports.iter().find(|r| r.id == report).map(|r| r.status);
            frozen += usize::from(status == Some(ReportStatus::Validated));
        }
    }
    ensure!(reports >= 12, "only {reports} reports exported");
    Ok(format!("{reports} reports ({frozen} validated) exported twice, byte-identical"))
}
