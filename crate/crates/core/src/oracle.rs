//! Exhaustive reference implementations of the pattern definitions, a
//! definition checker, and random instance generators for tests.
//!
//! Everything here works on `u64` object masks and plain loops and shares no
//! code with the miner or the extractor.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{
    ClusterId, ClusterMatrix, Column, Fci, MatrixKind, MiningParams, ObjectId, Pattern, Tidset, TimeSpan,
};

const MAX_CHOICES: f64 = (1u64 << 22) as f64;
const MAX_SUBSET_OBJECTS: u32 = 12;

fn mask_of(t: &Tidset) -> u64 {
    t.ids().fold(0u64, |m, o| m | (1u64 << o.0))
}

fn tidset_of_mask(n: u32, mask: u64) -> Tidset {
    Tidset::from_ids(n, (0..n).filter(|i| mask >> i & 1 == 1))
}

/// Column masks grouped by time unit.
fn units(matrix: &ClusterMatrix) -> Vec<Vec<(ClusterId, u64)>> {
    let mut out = vec![Vec::new(); matrix.n_units() as usize];
    for c in matrix.columns() {
        out[c.id.time.0 as usize].push((c.id, mask_of(&c.tidset)));
    }
    out
}

fn require_snapshot(matrix: &ClusterMatrix) -> Result<()> {
    if matrix.kind().is_snapshot() {
        Ok(())
    } else {
        Err(Error::Kind("the oracles only accept snapshot matrices".into()))
    }
}

/// Every itemset with at most one column per time unit and support at least
/// `epsilon` that no single additional column keeps at the same support.
pub fn brute_fcis(matrix: &ClusterMatrix, epsilon: usize) -> Result<Vec<Fci>> {
    require_snapshot(matrix)?;
    if epsilon < 1 {
        return Err(Error::Param(format!("epsilon must be >= 1, got {epsilon}")));
    }
    let n = matrix.n_objects();
    if n > 64 {
        return Err(Error::TooLarge(format!("{n} objects exceed the 64-bit mask")));
    }
    let units = units(matrix);
    let choices: f64 = units.iter().map(|u| (u.len() + 1) as f64).product();
    if choices > MAX_CHOICES {
        return Err(Error::TooLarge(format!("{choices} candidate itemsets")));
    }
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut found: Vec<(Vec<ClusterId>, u64)> = Vec::new();
    let mut chosen: Vec<ClusterId> = Vec::new();
    walk(&units, 0, full, epsilon, &mut chosen, &mut found);
    let mut out: Vec<Fci> = found
        .into_iter()
        .filter(|(items, mask)| {
            // closed when no free unit offers a column covering the whole tidset
            let used: Vec<u32> = items.iter().map(|c| c.time.0).collect();
            !units
                .iter()
                .enumerate()
                .any(|(t, cols)| !used.contains(&(t as u32)) && cols.iter().any(|(_, m)| mask & m == *mask))
        })
        .map(|(items, mask)| Fci::new(items, tidset_of_mask(n, mask)))
        .collect();
    out.sort();
    Ok(out)
}

fn walk(
    units: &[Vec<(ClusterId, u64)>],
    t: usize,
    mask: u64,
    epsilon: usize,
    chosen: &mut Vec<ClusterId>,
    found: &mut Vec<(Vec<ClusterId>, u64)>,
) {
    if t == units.len() {
        if !chosen.is_empty() {
            found.push((chosen.clone(), mask));
        }
        return;
    }
    walk(units, t + 1, mask, epsilon, chosen, found);
    for &(id, m) in &units[t] {
        let next = mask & m;
        if next.count_ones() as usize >= epsilon {
            chosen.push(id);
            walk(units, t + 1, next, epsilon, chosen, found);
            chosen.pop();
        }
    }
}

struct Subsets {
    n: u32,
    units: Vec<Vec<(ClusterId, u64)>>,
}

impl Subsets {
    fn new(matrix: &ClusterMatrix) -> Result<Self> {
        require_snapshot(matrix)?;
        let n = matrix.n_objects();
        if n > MAX_SUBSET_OBJECTS {
            return Err(Error::TooLarge(format!("{n} objects, at most {MAX_SUBSET_OBJECTS} allowed")));
        }
        Ok(Subsets { n, units: units(matrix) })
    }

    fn masks(&self, epsilon: usize) -> impl Iterator<Item = u64> {
        (1u64..(1u64 << self.n)).filter(move |m| m.count_ones() as usize >= epsilon)
    }

    /// Whether the objects of `mask` share a cluster at unit `t`.
    fn together(&self, mask: u64, t: usize) -> bool {
        self.units[t].iter().any(|(_, m)| mask & m == mask)
    }

    fn times(&self, mask: u64) -> Vec<u32> {
        (0..self.units.len()).filter(|&t| self.together(mask, t)).map(|t| t as u32).collect()
    }

    /// Whether some extra object stays with `mask` at every unit of `times`.
    fn extendable(&self, mask: u64, times: &[u32]) -> bool {
        (0..self.n).filter(|o| mask >> o & 1 == 0).any(|o| {
            let bigger = mask | (1 << o);
            times.iter().all(|&t| self.together(bigger, t as usize))
        })
    }

    /// Maximal runs of consecutive units in `times` with at least `min_t` units.
    fn runs(times: &[u32], min_t: usize) -> Vec<TimeSpan> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < times.len() {
            let mut j = i;
            while j + 1 < times.len() && times[j + 1] == times[j] + 1 {
                j += 1;
            }
            if j - i + 1 >= min_t {
                out.push(TimeSpan::new(times[i], times[j]));
            }
            i = j + 1;
        }
        out
    }

    fn object_closed_convoys(&self, mask: u64, min_t: usize) -> Vec<TimeSpan> {
        let times = self.times(mask);
        Self::runs(&times, min_t)
            .into_iter()
            .filter(|span| {
                let span_times: Vec<u32> = span.times().map(|t| t.0).collect();
                !self.extendable(mask, &span_times)
            })
            .collect()
    }
}

/// Object sets of size at least `epsilon` together at at least `min_t`
/// units, closed in both objects and time.
pub fn brute_closed_swarms(matrix: &ClusterMatrix, epsilon: usize, min_t: usize) -> Result<Vec<Pattern>> {
    let s = Subsets::new(matrix)?;
    let mut out = Vec::new();
    for mask in s.masks(epsilon) {
        let times = s.times(mask);
        if times.len() >= min_t && !times.is_empty() && !s.extendable(mask, &times) {
            out.push(Pattern::ClosedSwarm {
                objects: tidset_of_mask(s.n, mask),
                times: times.into_iter().map(crate::model::TimeIndex).collect(),
            });
        }
    }
    out.sort();
    Ok(out)
}

/// Object sets together over a maximal run of consecutive units, with no
/// extra object joining them over the whole run.
pub fn brute_convoys(matrix: &ClusterMatrix, epsilon: usize, min_t: usize) -> Result<Vec<Pattern>> {
    let s = Subsets::new(matrix)?;
    let mut out = Vec::new();
    for mask in s.masks(epsilon) {
        for span in s.object_closed_convoys(mask, min_t) {
            out.push(Pattern::Convoy { objects: tidset_of_mask(s.n, mask), span });
        }
    }
    out.sort();
    Ok(out)
}

/// Object sets whose convoys number at least `min_c` and cover at least a
/// `min_wei` share of all units.
pub fn brute_group_patterns(
    matrix: &ClusterMatrix,
    epsilon: usize,
    min_t: usize,
    min_c: usize,
    min_wei: f64,
) -> Result<Vec<Pattern>> {
    let s = Subsets::new(matrix)?;
    let total = matrix.n_units();
    let mut out = Vec::new();
    if total == 0 {
        return Ok(out);
    }
    for mask in s.masks(epsilon) {
        let segments = s.object_closed_convoys(mask, min_t);
        let covered: usize = segments.iter().map(TimeSpan::len).sum();
        if !segments.is_empty() && segments.len() >= min_c && covered as f64 / total as f64 >= min_wei {
            out.push(Pattern::GroupPattern { objects: tidset_of_mask(s.n, mask), segments, total_times: total });
        }
    }
    out.sort();
    Ok(out)
}

/// Re-checks a pattern against the raw definitions on `matrix`. Returns a
/// description of the first violated condition.
pub fn validate_pattern(
    pattern: &Pattern,
    matrix: &ClusterMatrix,
    params: &MiningParams,
) -> std::result::Result<(), String> {
    let n = matrix.n_objects();
    let together = |objects: &Tidset, t: u32| {
        matrix.unit_columns(crate::model::TimeIndex(t)).iter().any(|c| objects.is_subset(&c.tidset))
    };
    let extendable = |objects: &Tidset, times: &[u32]| {
        (0..n).map(ObjectId).filter(|o| !objects.contains(*o)).any(|o| {
            let mut bigger = objects.clone();
            bigger.insert(o);
            times.iter().all(|&t| together(&bigger, t))
        })
    };
    let check_swarm = |objects: &Tidset, times: &[u32]| -> std::result::Result<(), String> {
        if objects.len() < params.epsilon {
            return Err(format!("{} objects, fewer than epsilon", objects.len()));
        }
        if times.len() < params.min_t {
            return Err(format!("{} times, fewer than min_t", times.len()));
        }
        if let Some(t) = times.iter().find(|&&t| !together(objects, t)) {
            return Err(format!("objects not together at unit {t}"));
        }
        if extendable(objects, times) {
            return Err("not object-closed".into());
        }
        if let Some(t) = (0..matrix.n_units()).find(|t| !times.contains(t) && together(objects, *t)) {
            return Err(format!("not time-closed, also together at unit {t}"));
        }
        Ok(())
    };
    let check_convoy = |objects: &Tidset, span: &TimeSpan| -> std::result::Result<(), String> {
        let times: Vec<u32> = span.times().map(|t| t.0).collect();
        if objects.len() < params.epsilon {
            return Err("too few objects".into());
        }
        if times.len() < params.min_t {
            return Err("span shorter than min_t".into());
        }
        if let Some(t) = times.iter().find(|&&t| !together(objects, t)) {
            return Err(format!("objects not together at unit {t}"));
        }
        if extendable(objects, &times) {
            return Err("not object-closed over the span".into());
        }
        let before = span.start.0.checked_sub(1).is_some_and(|t| together(objects, t));
        let after = span.end.0 + 1 < matrix.n_units() && together(objects, span.end.0 + 1);
        if before || after {
            return Err("span is not maximal".into());
        }
        Ok(())
    };
    match pattern {
        Pattern::ClosedSwarm { objects, times }
        | Pattern::PeriodicPattern { subtrajectories: objects, offsets: times } => {
            let times: Vec<u32> = times.iter().map(|t| t.0).collect();
            check_swarm(objects, &times)
        }
        Pattern::Convoy { objects, span } => check_convoy(objects, span),
        Pattern::MovingCluster { clusters } => {
            if clusters.len() < params.min_t {
                return Err("chain shorter than min_t".into());
            }
            for pair in clusters.windows(2) {
                if pair[1].time.0 != pair[0].time.0 + 1 {
                    return Err("chain times are not consecutive".into());
                }
                let a = matrix.tidset_of(pair[0]).ok_or("unknown cluster")?;
                let b = matrix.tidset_of(pair[1]).ok_or("unknown cluster")?;
                let jaccard = a.intersection_len(b) as f64 / a.union(b).len() as f64;
                if jaccard < params.theta {
                    return Err(format!("Jaccard {jaccard} below theta between {} and {}", pair[0], pair[1]));
                }
            }
            Ok(())
        }
        Pattern::GroupPattern { objects, segments, total_times } => {
            if segments.len() < params.min_c {
                return Err("fewer segments than min_c".into());
            }
            for pair in segments.windows(2) {
                if pair[0].end >= pair[1].start {
                    return Err("segments overlap or are unordered".into());
                }
            }
            for s in segments {
                check_convoy(objects, s)?;
            }
            let covered: usize = segments.iter().map(TimeSpan::len).sum();
            if (covered as f64 / *total_times as f64) < params.min_wei {
                return Err("weight below min_wei".into());
            }
            Ok(())
        }
    }
}

/// A random snapshot matrix: at each unit up to `max_clusters` clusters,
/// every object joining one of them or none.
pub fn random_matrix<R: Rng>(rng: &mut R, n_objects: u32, n_units: u32, max_clusters: u32) -> ClusterMatrix {
    let mut columns = Vec::new();
    for t in 0..n_units {
        let k = rng.gen_range(0..=max_clusters);
        let mut groups = vec![Vec::new(); k as usize];
        for o in 0..n_objects {
            let slot = rng.gen_range(0..=k);
            if slot < k {
                groups[slot as usize].push(o);
            }
        }
        for (ordinal, g) in groups.into_iter().filter(|g| !g.is_empty()).enumerate() {
            columns.push(Column::new(ClusterId::new(t, ordinal as u32), Tidset::from_ids(n_objects, g)));
        }
    }
    ClusterMatrix::new(MatrixKind::PerTimestamp, n_objects, n_units, columns).expect("generated matrix is valid")
}

/// A random fully nested chain of `len` columns at units `0..len`.
pub fn random_nested_chain<R: Rng>(rng: &mut R, n_objects: u32, len: u32) -> Vec<Column> {
    let mut current: Vec<u32> = (0..n_objects).filter(|_| rng.gen_bool(0.8)).collect();
    if current.is_empty() {
        current.push(rng.gen_range(0..n_objects));
    }
    let mut chain = Vec::new();
    for t in 0..len {
        chain.push(Column::new(ClusterId::new(t, 0), Tidset::from_ids(n_objects, current.iter().copied())));
        if current.len() > 1 && rng.gen_bool(0.5) {
            let drop = rng.gen_range(0..current.len());
            current.remove(drop);
        }
    }
    chain
}
