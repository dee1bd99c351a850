//! Hand-written fixtures shared by several test suites.

use chrono::NaiveDate;
use sitecoord_core::model::{Actor, BoundingBox, BuildingElement, Lot, Project, Role, Task};
use sitecoord_core::EntityId;

pub fn id(s: &str) -> EntityId {
    EntityId::from(s)
}

pub fn day(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid date")
}

pub const COORDINATOR: &str = "act-coord";
pub const ARCHITECT: &str = "act-arch";
pub const MASON: &str = "act-mason";
pub const ROOFER: &str = "act-roofer";
pub const OWNER: &str = "act-owner";

fn actor(i: &str, name: &str, org: &str, role: Role) -> Actor {
    Actor {
        id: id(i),
        name: name.into(),
        organization: org.into(),
        role,
    }
}

fn bounds(min: [f64; 3], max: [f64; 3]) -> Option<BoundingBox> {
    Some(BoundingBox { min, max })
}

/// A small house: a main wall and a roof frame, each built by one task in
/// its own lot. Nothing links the two except the remark a test adds.
pub fn house() -> Project {
    Project {
        id: id("house"),
        name: "Detached house".into(),
        actors: vec![
            actor(COORDINATOR, "Claire Martin", "Martin Coordination", Role::Coordinator),
            actor(ARCHITECT, "Alain Roche", "Roche Architects", Role::Architect),
            actor(MASON, "Marc Petit", "Petit Masonry", Role::Contractor),
            actor(ROOFER, "Rita Moreau", "Moreau Roofing", Role::Contractor),
            actor(OWNER, "Olivier Blanc", "Private owner", Role::Owner),
        ],
        lots: vec![
            Lot {
                id: id("lot-shell"),
                code: "02".into(),
                label: "Structural shell".into(),
            },
            Lot {
                id: id("lot-roof"),
                code: "04".into(),
                label: "Roof framing".into(),
            },
        ],
        elements: vec![
            BuildingElement {
                id: id("el-wall"),
                label: "main wall".into(),
                element_type: "wall".into(),
                parent: None,
                bounds: bounds([0.0, 0.0, 0.0], [12.0, 0.3, 2.7]),
            },
            BuildingElement {
                id: id("el-roof"),
                label: "roof frame".into(),
                element_type: "roof".into(),
                parent: None,
                bounds: bounds([0.0, 0.0, 2.7], [12.0, 8.0, 5.0]),
            },
        ],
        tasks: vec![
            Task {
                id: id("tsk-wall"),
                label: "wall construction".into(),
                start: day(2024, 3, 4),
                end: day(2024, 3, 22),
                lot: id("lot-shell"),
                elements: vec![id("el-wall")],
                predecessors: vec![],
            },
            Task {
                id: id("tsk-roof"),
                label: "roof frame construction".into(),
                start: day(2024, 3, 25),
                end: day(2024, 4, 12),
                lot: id("lot-roof"),
                elements: vec![id("el-roof")],
                predecessors: vec![id("tsk-wall")],
            },
        ],
    }
}

pub const SYNC_REMARK: &str =
    "There is a problem of synchronization between wall construction and roof frame construction";
