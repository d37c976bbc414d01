//! Domain types shared by every stage of the pipeline.
//!
//! Objects and timestamps are densely re-indexed at ingest and all mining
//! works on the indices; the original labels live in [`Labels`].

mod matrix;
mod params;
mod pattern;
mod tidset;

use std::fmt;

pub use matrix::{ClusterMatrix, Column, MatrixKind};
pub use params::{MiningParams, Mode};
pub use pattern::{canonical_sort, Pattern, PatternKind, TimeSpan};
pub use tidset::{tidset_intersect, Tidset};

/// Dense object index `0..n_objects`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjectId(pub u32);

/// Dense time index `0..n_times`; order matches the label order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimeIndex(pub u32);

/// A cluster at a time unit. Global column order is `(time, ordinal)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClusterId {
    pub time: TimeIndex,
    pub ordinal: u32,
}

impl ClusterId {
    pub fn new(time: u32, ordinal: u32) -> Self {
        ClusterId { time: TimeIndex(time), ordinal }
    }
}

impl fmt::Display for ClusterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.time.0, self.ordinal)
    }
}

/// Label tables for the dense indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Labels {
    pub objects: Vec<String>,
    pub times: Vec<i64>,
}

impl Labels {
    /// Labels `0..n` for both axes, as used by synthetic matrices.
    pub fn numbered(n_objects: u32, n_times: u32) -> Self {
        Labels { objects: (0..n_objects).map(|i| i.to_string()).collect(), times: (0..n_times as i64).collect() }
    }

    pub fn object(&self, id: ObjectId) -> &str {
        &self.objects[id.0 as usize]
    }

    pub fn time(&self, t: TimeIndex) -> i64 {
        self.times[t.0 as usize]
    }

    pub fn object_index(&self, label: &str) -> Option<ObjectId> {
        self.objects.iter().position(|o| o == label).map(|i| ObjectId(i as u32))
    }

    pub fn time_index(&self, label: i64) -> Option<TimeIndex> {
        self.times.binary_search(&label).ok().map(|i| TimeIndex(i as u32))
    }
}

/// A frequent closed itemset with its supporting objects.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fci {
    /// Ascending by `(time, ordinal)`; at most one item per time unit.
    pub items: Vec<ClusterId>,
    pub tidset: Tidset,
}

impl Fci {
    pub fn new(mut items: Vec<ClusterId>, tidset: Tidset) -> Self {
        items.sort();
        Fci { items, tidset }
    }

    pub fn support(&self) -> usize {
        self.tidset.len()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = TimeIndex> + '_ {
        self.items.iter().map(|c| c.time)
    }

    pub fn has_distinct_times(&self) -> bool {
        self.items.windows(2).all(|w| w[0].time < w[1].time)
    }
}
