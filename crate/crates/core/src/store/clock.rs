use std::sync::atomic::{AtomicI64, Ordering};

use crate::time::Timestamp;

/// Source of wall-clock time for event stamping.
pub trait Clock: Send + Sync {
    fn now(&self) -> Timestamp;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> Timestamp {
        Timestamp::now()
    }
}

/// Deterministic clock for tests: starts at a fixed instant and advances by
/// `step_millis` on every reading.
#[derive(Debug)]
pub struct ManualClock {
    next: AtomicI64,
    step_millis: i64,
}

impl ManualClock {
    pub fn new(start: Timestamp, step_millis: i64) -> Self {
        ManualClock {
            next: AtomicI64::new(start.as_millis()),
            step_millis,
        }
    }

    pub fn set(&self, at: Timestamp) {
        self.next.store(at.as_millis(), Ordering::SeqCst);
    }
}

impl Clock for ManualClock {
    fn now(&self) -> Timestamp {
        Timestamp::from_millis(self.next.fetch_add(self.step_millis, Ordering::SeqCst))
    }
}
