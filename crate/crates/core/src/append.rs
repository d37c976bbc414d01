//! Merging the FCIs of an existing database with the FCIs of appended time
//! units without re-mining the whole matrix.
//!
//! Both sides are scanned in ascending support. The first pair whose tidset
//! intersection is `γ` is the pair of smallest closed sets containing `γ`
//! on each side, so its union is the closed itemset of `γ`; later pairs
//! with the same `γ` are skipped via a lookup keyed by support.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::model::{ClusterId, Fci, Tidset, TimeIndex};

/// FCIs over a contiguous range of time units. Item times are local to the
/// set (`0..n_units`); `offset` places the range on the global timeline.
#[derive(Debug, Clone, PartialEq)]
pub struct FciSet {
    pub n_objects: u32,
    pub offset: u32,
    pub n_units: u32,
    pub fcis: Vec<Fci>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CombineStats {
    /// Pairs whose intersection was computed.
    pub pairs_evaluated: u64,
    /// Lookups into the new-FCI partitions.
    pub lookup_probes: u64,
}

fn by_support(fcis: &[Fci]) -> Vec<&Fci> {
    let mut v: Vec<&Fci> = fcis.iter().collect();
    v.sort_by(|a, b| a.support().cmp(&b.support()).then_with(|| a.cmp(b)));
    v
}

fn shifted(items: &[ClusterId], by: u32) -> impl Iterator<Item = ClusterId> + '_ {
    items.iter().map(move |c| ClusterId { time: TimeIndex(c.time.0 + by), ordinal: c.ordinal })
}

/// Combines `existing` with `incoming`, which must start after `existing`
/// ends. The result covers both ranges with `existing`'s offset.
pub fn combine_fcis(existing: &FciSet, incoming: &FciSet, epsilon: usize) -> Result<(FciSet, CombineStats)> {
    if epsilon < 1 {
        return Err(Error::Param(format!("epsilon must be >= 1, got {epsilon}")));
    }
    if existing.n_objects != incoming.n_objects {
        return Err(Error::Universe(format!(
            "existing data has {} objects, appended data has {}",
            existing.n_objects, incoming.n_objects
        )));
    }
    for f in existing.fcis.iter().chain(&incoming.fcis) {
        if f.tidset.universe() != existing.n_objects {
            return Err(Error::Universe("an FCI tidset does not match the object count".into()));
        }
    }
    let end = existing.offset + existing.n_units;
    if incoming.offset < end {
        return Err(Error::Range(format!(
            "appended data starts at unit {} but existing data runs to unit {}",
            incoming.offset,
            end.saturating_sub(1)
        )));
    }
    for (set, name) in [(existing, "existing"), (incoming, "appended")] {
        if set.fcis.iter().flat_map(|f| f.items.iter()).any(|c| c.time.0 >= set.n_units) {
            return Err(Error::Range(format!("an {name} FCI has an item outside its time range")));
        }
    }
    let shift = incoming.offset - existing.offset;

    let left = by_support(&existing.fcis);
    let right = by_support(&incoming.fcis);
    let mut left_alive = vec![true; left.len()];
    let mut right_alive = vec![true; right.len()];
    let mut seen: HashMap<usize, HashSet<Tidset>> = HashMap::new();
    let mut fresh: Vec<Fci> = Vec::new();
    let mut stats = CombineStats::default();

    for (j, ci2) in right.iter().enumerate() {
        for (i, ci) in left.iter().enumerate() {
            if !left_alive[i] {
                continue;
            }
            stats.pairs_evaluated += 1;
            let gamma = ci.tidset.intersect(&ci2.tidset);
            let size = gamma.len();
            if size < epsilon {
                continue;
            }
            stats.lookup_probes += 1;
            let absorbs_left = gamma == ci.tidset;
            let absorbs_right = gamma == ci2.tidset;
            let partition = seen.entry(size).or_default();
            if !partition.contains(&gamma) {
                let items: Vec<ClusterId> = ci.items.iter().copied().chain(shifted(&ci2.items, shift)).collect();
                partition.insert(gamma.clone());
                fresh.push(Fci::new(items, gamma));
            }
            if absorbs_left {
                left_alive[i] = false;
            }
            if absorbs_right {
                right_alive[j] = false;
                break;
            }
        }
    }

    let mut fcis: Vec<Fci> = left
        .iter()
        .zip(&left_alive)
        .filter(|(f, alive)| **alive && f.support() >= epsilon)
        .map(|(f, _)| (*f).clone())
        .collect();
    fcis.extend(
        right
            .iter()
            .zip(&right_alive)
            .filter(|(f, alive)| **alive && f.support() >= epsilon)
            .map(|(f, _)| Fci::new(shifted(&f.items, shift).collect(), f.tidset.clone())),
    );
    fcis.extend(fresh);
    fcis.sort();
    let out =
        FciSet { n_objects: existing.n_objects, offset: existing.offset, n_units: shift + incoming.n_units, fcis };
    Ok((out, stats))
}

/// Whether appending `len_incoming` units to `len_existing` units is in the
/// range where combining beats re-mining (under 15 percent).
pub fn should_update(len_existing: u64, len_incoming: u64) -> bool {
    len_incoming.saturating_mul(100) < len_existing.saturating_mul(15)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n_units: u32, offset: u32, fcis: Vec<Fci>) -> FciSet {
        FciSet { n_objects: 4, offset, n_units, fcis }
    }

    fn fci(t: u32, ids: &[u32]) -> Fci {
        Fci::new(vec![ClusterId::new(t, 0)], Tidset::from_ids(4, ids.iter().copied()))
    }

    #[test]
    fn empty_incoming_keeps_existing() {
        let e = set(2, 0, vec![fci(0, &[0, 1]), fci(1, &[2, 3])]);
        let (out, stats) = combine_fcis(&e, &set(1, 2, vec![]), 2).unwrap();
        assert_eq!(out.fcis, e.fcis);
        assert_eq!(out.n_units, 3);
        assert_eq!(stats.pairs_evaluated, 0);
    }

    #[test]
    fn universe_and_range_are_checked() {
        let e = set(2, 0, vec![]);
        let mut other = set(1, 2, vec![]);
        other.n_objects = 5;
        assert!(matches!(combine_fcis(&e, &other, 1), Err(Error::Universe(_))));
        assert!(matches!(combine_fcis(&e, &set(1, 1, vec![]), 1), Err(Error::Range(_))));
    }

    #[test]
    fn update_advice_threshold() {
        assert!(should_update(1000, 100));
        assert!(!should_update(1000, 150));
        assert!(!should_update(1000, 500));
    }
}
