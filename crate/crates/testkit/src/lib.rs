//! Shared test support: fixtures, seeded generators and reference oracles.

pub mod fixtures;
pub mod gen;
pub mod ops;
pub mod oracle;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sitecoord_core::store::{Clock, ManualClock};
use sitecoord_core::{EntityId, Platform, Result, Store, Timestamp};

pub use ops::{HttpCall, Op, OpGen};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A deterministic clock starting on 2024-01-08, one second per reading.
pub fn test_clock() -> std::sync::Arc<dyn Clock> {
    let start: Timestamp = "2024-01-08T08:00:00.000Z".parse().expect("valid instant");
    std::sync::Arc::new(ManualClock::new(start, 1000))
}

pub fn memory_platform() -> Platform {
    Platform::new(Store::in_memory(test_clock()))
}

/// One applied operation and its outcome.
pub struct Step {
    pub op: Op,
    pub outcome: Result<serde_json::Value>,
}

/// Draws and applies `count` operations to `project`.
pub fn drive(
    platform: &Platform,
    project: &EntityId,
    rng: &mut impl rand::Rng,
    gen: &OpGen,
    count: usize,
) -> Vec<Step> {
    (0..count)
        .map(|_| {
            let snapshot = platform.snapshot(project).expect("project exists");
            let op = gen.next(rng, &snapshot.state);
            let outcome = op.apply(platform, project);
            Step { op, outcome }
        })
        .collect()
}

/// A random project imported into a fresh in-memory platform, then driven
/// through `ops` random operations.
pub fn random_site(seed: u64, max_entities: usize, ops: usize) -> (Platform, EntityId, Vec<Step>) {
    let mut rng = rng(seed);
    let shape = gen::Shape::random(&mut rng, max_entities);
    let project = gen::random_project(&mut rng, &format!("site-{seed}"), shape);
    let id = project.id.clone();
    let platform = memory_platform();
    platform
        .import_project(&EntityId::from("act-1"), project)
        .expect("generated projects are valid");
    let steps = drive(&platform, &id, &mut rng, &OpGen::default(), ops);
    (platform, id, steps)
}

/// Several random projects in one in-memory platform, each driven through
/// `ops` random operations.
pub fn random_portfolio(seed: u64, projects: usize, max_entities: usize, ops: usize) -> (Platform, Vec<EntityId>) {
    let mut rng = rng(seed);
    let platform = memory_platform();
    let ids = (0..projects)
        .map(|i| {
            let shape = gen::Shape::random(&mut rng, max_entities);
            let project = gen::random_project(&mut rng, &format!("site-{seed}-{i}"), shape);
            let id = project.id.clone();
            platform
                .import_project(&EntityId::from("act-1"), project)
                .expect("generated projects are valid");
            drive(&platform, &id, &mut rng, &OpGen::default(), ops);
            id
        })
        .collect();
    (platform, ids)
}
