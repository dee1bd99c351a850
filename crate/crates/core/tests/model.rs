use std::collections::BTreeSet;

use chrono::Duration;
use proptest::prelude::*;
use rand::Rng;
use sitecoord_core::model::{
    element_subtree, schedule_window, tasks_for_element, validate_integrity, BuildingElement, Project, Rule, Task,
};
use sitecoord_core::{EntityId, Error};
use sitecoord_testkit::fixtures::{self, day, id};
use sitecoord_testkit::{gen, oracle, rng};

fn rules(p: &Project) -> Vec<Rule> {
    validate_integrity(p).into_iter().map(|v| v.rule).collect()
}

fn group(i: &str, parent: Option<&str>) -> BuildingElement {
    BuildingElement {
        id: id(i),
        label: i.into(),
        element_type: "group".into(),
        parent: parent.map(id),
        bounds: None,
    }
}

fn task(i: &str, from: (u32, u32), to: (u32, u32), elements: &[&str]) -> Task {
    Task {
        id: id(i),
        label: i.into(),
        start: day(2024, from.0, from.1),
        end: day(2024, to.0, to.1),
        lot: id("lot-shell"),
        elements: elements.iter().map(|e| id(e)).collect(),
        predecessors: vec![],
    }
}

/// A building with two wall children and the house's lots.
fn building() -> Project {
    let mut p = fixtures::house();
    p.elements = vec![
        group("el-building", None),
        group("el-wall-n", Some("el-building")),
        group("el-wall-s", Some("el-building")),
        group("el-door", Some("el-wall-s")),
        group("el-shed", None),
    ];
    p.tasks = vec![
        task("tsk-n", (1, 10), (1, 20), &["el-wall-n"]),
        task("tsk-s", (1, 21), (2, 2), &["el-wall-s"]),
        task("tsk-door", (2, 5), (2, 5), &["el-door"]),
    ];
    p
}

fn set(ids: &[&str]) -> BTreeSet<EntityId> {
    ids.iter().map(|s| id(s)).collect()
}

#[test]
fn empty_project_is_valid() {
    assert!(validate_integrity(&Project::empty("p", "Empty")).is_empty());
    assert!(validate_integrity(&fixtures::house()).is_empty());
    assert!(validate_integrity(&building()).is_empty());
}

#[test]
fn two_task_cycle_is_one_violation() {
    let mut p = fixtures::house();
    p.tasks[0].predecessors = vec![id("tsk-roof")];
    assert_eq!(rules(&p), [Rule::TaskCycle]);
    assert!(oracle::has_task_cycle(&p));
}

#[test]
fn element_parent_cycle_is_one_violation() {
    let mut p = fixtures::house();
    p.elements[0].parent = Some(id("el-roof"));
    p.elements[1].parent = Some(id("el-wall"));
    assert_eq!(rules(&p), [Rule::ElementForestBroken]);
}

#[test]
fn other_rules_are_named() {
    let mut p = fixtures::house();
    p.tasks[0].end = day(2024, 1, 1);
    p.tasks[1].lot = id("lot-ghost");
    p.lots[1].code = p.lots[0].code.clone();
    p.elements[0].bounds.as_mut().unwrap().min[2] = 9.0;
    let got: BTreeSet<_> = rules(&p).into_iter().collect();
    let want = BTreeSet::from([Rule::InvalidTaskDates, Rule::UnknownLot, Rule::DuplicateLotCode, Rule::InvalidBox]);
    assert_eq!(got, want);
    let v = &validate_integrity(&p)[0];
    assert!(!v.entity.as_str().is_empty());
}

#[test]
fn subtrees() {
    let p = building();
    assert_eq!(element_subtree(&p, &id("el-door")).unwrap(), set(&["el-door"]));
    assert_eq!(
        element_subtree(&p, &id("el-building")).unwrap(),
        set(&["el-building", "el-wall-n", "el-wall-s", "el-door"])
    );
    assert!(matches!(element_subtree(&p, &id("el-ghost")), Err(Error::UnknownId { .. })));
}

#[test]
fn tasks_of_elements() {
    let house = fixtures::house();
    assert_eq!(tasks_for_element(&house, &id("el-wall")).unwrap(), set(&["tsk-wall"]));
    let p = building();
    assert!(tasks_for_element(&p, &id("el-shed")).unwrap().is_empty());
    assert_eq!(
        tasks_for_element(&p, &id("el-building")).unwrap(),
        set(&["tsk-n", "tsk-s", "tsk-door"])
    );
    assert!(matches!(tasks_for_element(&p, &id("el-ghost")), Err(Error::UnknownId { .. })));
}

#[test]
fn schedule_windows_are_closed() {
    let p = building();
    assert_eq!(schedule_window(&p, day(2023, 1, 1), day(2025, 1, 1)).unwrap().len(), 3);
    assert!(schedule_window(&p, day(2023, 1, 1), day(2024, 1, 9)).unwrap().is_empty());
    assert_eq!(schedule_window(&p, day(2024, 1, 20), day(2024, 1, 20)).unwrap(), set(&["tsk-n"]));
    assert_eq!(schedule_window(&p, day(2024, 2, 5), day(2024, 2, 5)).unwrap(), set(&["tsk-door"]));
    assert!(matches!(
        schedule_window(&p, day(2024, 2, 5), day(2024, 2, 4)),
        Err(Error::InvalidRange { .. })
    ));
}

#[test]
fn interchange_format_round_trips_and_locates_errors() {
    let p = building();
    let text = p.to_json_pretty();
    assert_eq!(Project::from_json(&text).unwrap(), p);
    let broken = text.replacen("\"tasks\"", "\"tasks\" oops", 1);
    let err = Project::from_json(&broken).unwrap_err();
    let line = broken.lines().position(|l| l.contains("oops")).unwrap() + 1;
    assert_eq!(err.line, line);
    assert!(err.column > 0);
}

/// Subtree by climbing each element's parent links.
fn climb_subtree(p: &Project, root: &EntityId) -> BTreeSet<EntityId> {
    p.elements
        .iter()
        .filter(|e| {
            let mut cur = Some(e.id.clone());
            for _ in 0..=p.elements.len() {
                match cur {
                    Some(ref c) if c == root => return true,
                    Some(c) => cur = p.element(&c).and_then(|x| x.parent.clone()),
                    None => return false,
                }
            }
            false
        })
        .map(|e| e.id.clone())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generated_projects_obey_the_element_and_task_queries(seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = gen::Shape::random(&mut r, 100);
        let p = gen::random_project(&mut r, "p", shape);
        prop_assert!(validate_integrity(&p).is_empty());
        prop_assert_eq!(Project::from_json(&p.to_json_pretty()).unwrap(), p.clone());
        for e in &p.elements {
            let sub = element_subtree(&p, &e.id).unwrap();
            prop_assert_eq!(&sub, &climb_subtree(&p, &e.id));
            for member in &sub {
                prop_assert!(element_subtree(&p, member).unwrap().is_subset(&sub));
            }
            let joined: BTreeSet<_> = p.tasks.iter()
                .filter(|t| t.elements.iter().any(|x| sub.contains(x)))
                .map(|t| t.id.clone())
                .collect();
            prop_assert_eq!(tasks_for_element(&p, &e.id).unwrap(), joined);
        }
        let from = day(2024, 1, 1) + Duration::days(r.random_range(0..200));
        let to = from + Duration::days(r.random_range(0..60));
        let window = schedule_window(&p, from, to).unwrap();
        for t in &p.tasks {
            prop_assert_eq!(window.contains(&t.id), t.start.max(from) <= t.end.min(to));
        }
    }

    /// Extra random predecessor links: the cycle rule fires iff a DFS finds
    /// a cycle.
    #[test]
    fn task_cycles_match_dfs(seed in any::<u64>(), extra in 1usize..6) {
        let mut r = rng(seed);
        let shape = gen::Shape::random(&mut r, 60);
        let mut p = gen::random_project(&mut r, "p", shape);
        prop_assume!(p.tasks.len() >= 2);
        for _ in 0..extra {
            let a = r.random_range(0..p.tasks.len());
            let b = r.random_range(0..p.tasks.len());
            let pred = p.tasks[b].id.clone();
            if !p.tasks[a].predecessors.contains(&pred) {
                p.tasks[a].predecessors.push(pred);
            }
        }
        let flagged = rules(&p).contains(&Rule::TaskCycle);
        prop_assert_eq!(flagged, oracle::has_task_cycle(&p));
    }
}
