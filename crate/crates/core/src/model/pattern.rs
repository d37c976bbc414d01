use std::cmp::Ordering;

use super::{ClusterId, Tidset, TimeIndex};

/// Inclusive range of consecutive time indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimeSpan {
    pub start: TimeIndex,
    pub end: TimeIndex,
}

impl TimeSpan {
    pub fn new(start: u32, end: u32) -> Self {
        debug_assert!(start <= end);
        TimeSpan { start: TimeIndex(start), end: TimeIndex(end) }
    }

    pub fn len(&self) -> usize {
        (self.end.0 - self.start.0 + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, t: TimeIndex) -> bool {
        self.start <= t && t <= self.end
    }

    pub fn times(&self) -> impl Iterator<Item = TimeIndex> {
        (self.start.0..=self.end.0).map(TimeIndex)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternKind {
    ClosedSwarm,
    Convoy,
    MovingCluster,
    GroupPattern,
    PeriodicPattern,
}

impl PatternKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PatternKind::ClosedSwarm => "closed_swarm",
            PatternKind::Convoy => "convoy",
            PatternKind::MovingCluster => "moving_cluster",
            PatternKind::GroupPattern => "group_pattern",
            PatternKind::PeriodicPattern => "periodic_pattern",
        }
    }

    pub const ALL: [PatternKind; 5] = [
        PatternKind::ClosedSwarm,
        PatternKind::Convoy,
        PatternKind::MovingCluster,
        PatternKind::GroupPattern,
        PatternKind::PeriodicPattern,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pattern {
    ClosedSwarm {
        objects: Tidset,
        times: Vec<TimeIndex>,
    },
    Convoy {
        objects: Tidset,
        span: TimeSpan,
    },
    MovingCluster {
        clusters: Vec<ClusterId>,
    },
    /// `total_times` is the denominator of the coverage weight.
    GroupPattern {
        objects: Tidset,
        segments: Vec<TimeSpan>,
        total_times: u32,
    },
    PeriodicPattern {
        subtrajectories: Tidset,
        offsets: Vec<TimeIndex>,
    },
}

impl Pattern {
    pub fn kind(&self) -> PatternKind {
        match self {
            Pattern::ClosedSwarm { .. } => PatternKind::ClosedSwarm,
            Pattern::Convoy { .. } => PatternKind::Convoy,
            Pattern::MovingCluster { .. } => PatternKind::MovingCluster,
            Pattern::GroupPattern { .. } => PatternKind::GroupPattern,
            Pattern::PeriodicPattern { .. } => PatternKind::PeriodicPattern,
        }
    }

    /// The defining object set; `None` for moving clusters, whose identity
    /// is their cluster sequence.
    pub fn objects(&self) -> Option<&Tidset> {
        match self {
            Pattern::ClosedSwarm { objects, .. }
            | Pattern::Convoy { objects, .. }
            | Pattern::GroupPattern { objects, .. } => Some(objects),
            Pattern::PeriodicPattern { subtrajectories, .. } => Some(subtrajectories),
            Pattern::MovingCluster { .. } => None,
        }
    }

    pub fn first_time(&self) -> Option<TimeIndex> {
        match self {
            Pattern::ClosedSwarm { times, .. } => times.first().copied(),
            Pattern::Convoy { span, .. } => Some(span.start),
            Pattern::MovingCluster { clusters } => clusters.first().map(|c| c.time),
            Pattern::GroupPattern { segments, .. } => segments.first().map(|s| s.start),
            Pattern::PeriodicPattern { offsets, .. } => offsets.first().copied(),
        }
    }

    pub fn last_time(&self) -> Option<TimeIndex> {
        match self {
            Pattern::ClosedSwarm { times, .. } => times.last().copied(),
            Pattern::Convoy { span, .. } => Some(span.end),
            Pattern::MovingCluster { clusters } => clusters.last().map(|c| c.time),
            Pattern::GroupPattern { segments, .. } => segments.last().map(|s| s.end),
            Pattern::PeriodicPattern { offsets, .. } => offsets.last().copied(),
        }
    }

    /// Coverage weight of a group pattern.
    pub fn weight(&self) -> Option<f64> {
        match self {
            Pattern::GroupPattern { segments, total_times, .. } => {
                let covered: usize = segments.iter().map(TimeSpan::len).sum();
                Some(covered as f64 / *total_times as f64)
            }
            _ => None,
        }
    }

    fn detail_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Pattern::ClosedSwarm { times: a, .. }, Pattern::ClosedSwarm { times: b, .. }) => a.cmp(b),
            (Pattern::Convoy { span: a, .. }, Pattern::Convoy { span: b, .. }) => a.cmp(b),
            (Pattern::MovingCluster { clusters: a }, Pattern::MovingCluster { clusters: b }) => a.cmp(b),
            (
                Pattern::GroupPattern { segments: a, total_times: ta, .. },
                Pattern::GroupPattern { segments: b, total_times: tb, .. },
            ) => a.cmp(b).then(ta.cmp(tb)),
            (Pattern::PeriodicPattern { offsets: a, .. }, Pattern::PeriodicPattern { offsets: b, .. }) => a.cmp(b),
            _ => Ordering::Equal,
        }
    }
}

impl Ord for Pattern {
    /// Variant tag, then objects lexicographically, then first time index;
    /// remaining fields break the few leftover ties.
    fn cmp(&self, other: &Self) -> Ordering {
        self.kind()
            .cmp(&other.kind())
            .then_with(|| self.objects().cmp(&other.objects()))
            .then_with(|| self.first_time().cmp(&other.first_time()))
            .then_with(|| self.detail_cmp(other))
    }
}

impl PartialOrd for Pattern {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sorts into canonical order and removes exact duplicates.
pub fn canonical_sort(mut patterns: Vec<Pattern>) -> Vec<Pattern> {
    patterns.sort();
    patterns.dedup();
    patterns
}
