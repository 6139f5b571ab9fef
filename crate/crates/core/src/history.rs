//! Fixed-capacity ring buffer of past vehicle-pair observations.
//!
//! The delayed driver model looks `k` integration steps into the past. The
//! buffer keeps the most recent `capacity` records and clamps lookbacks
//! beyond the stored history to the oldest record it still holds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One observation of the leader/follower pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub v_follow: f64,
    pub v_lead: f64,
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct HistoryBuffer {
    records: Vec<Snapshot>,
    capacity: usize,
    /// Slot that receives the next push.
    head: usize,
}

impl HistoryBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "history capacity must be positive");
        Self {
            records: Vec::with_capacity(capacity),
            capacity,
            head: 0,
        }
    }

    /// Capacity able to serve any reaction time up to `r_max` at step `dt`.
    pub fn capacity_for(r_max: f64, dt: f64) -> usize {
        (r_max / dt).ceil() as usize + 1
    }

    /// A full buffer holding `initial` in every slot, so that lookbacks
    /// before the start of a run see the initial condition.
    pub fn prefilled(capacity: usize, initial: Snapshot) -> Self {
        assert!(capacity > 0, "history capacity must be positive");
        Self {
            records: vec![initial; capacity],
            capacity,
            head: 0,
        }
    }

    pub fn push(&mut self, record: Snapshot) {
        if self.records.len() < self.capacity {
            self.records.push(record);
            self.head = self.records.len() % self.capacity;
        } else {
            self.records[self.head] = record;
            self.head = (self.head + 1) % self.capacity;
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Record `k` steps ago (`k = 0` is the newest). Requests older than the
    /// stored history return the oldest record.
    pub fn lookback(&self, k: usize) -> Result<Snapshot> {
        let len = self.records.len();
        if len == 0 {
            return Err(Error::EmptyHistory);
        }
        let k = k.min(len - 1);
        let newest = (self.head + self.capacity - 1) % self.capacity;
        let idx = if len < self.capacity {
            newest - k
        } else {
            (newest + self.capacity - k) % self.capacity
        };
        Ok(self.records[idx])
    }

    pub fn latest(&self) -> Result<Snapshot> {
        self.lookback(0)
    }
}
