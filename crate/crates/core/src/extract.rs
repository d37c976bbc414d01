//! Decoding FCIs into co-movement patterns, plus CSV and GeoJSON output.

use std::io::Write;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ingest::TrajectoryDb;
use crate::model::{
    canonical_sort, ClusterId, ClusterMatrix, Fci, Labels, MatrixKind, MiningParams, Pattern, Tidset, TimeIndex,
    TimeSpan,
};

/// What the extractor needs besides the FCIs: thresholds and the matrix the
/// FCIs were mined from (for the full column tidsets).
#[derive(Debug, Clone, Copy)]
pub struct ExtractionContext<'a> {
    pub params: MiningParams,
    pub total_times: u32,
    pub matrix: &'a ClusterMatrix,
}

impl<'a> ExtractionContext<'a> {
    pub fn new(matrix: &'a ClusterMatrix, params: MiningParams) -> Result<Self> {
        params.validate()?;
        Ok(ExtractionContext { params, total_times: matrix.n_units().max(1), matrix })
    }

    fn column(&self, id: ClusterId) -> &'a Tidset {
        self.matrix.tidset_of(id).expect("FCI item belongs to the matrix")
    }

    fn kind(&self) -> MatrixKind {
        self.matrix.kind()
    }
}

/// Maximal runs of consecutive time units among the FCI's items, as index
/// ranges into `fci.items`.
fn runs(fci: &Fci) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=fci.items.len() {
        if i == fci.items.len() || fci.items[i].time.0 != fci.items[i - 1].time.0 + 1 {
            out.push(start..i);
            start = i;
        }
    }
    out
}

fn frequent(fci: &Fci, ctx: &ExtractionContext) -> bool {
    !fci.is_empty() && fci.support() >= ctx.params.epsilon
}

pub fn closed_swarm_of(fci: &Fci, ctx: &ExtractionContext) -> Option<Pattern> {
    if !frequent(fci, ctx) || fci.len() < ctx.params.min_t {
        return None;
    }
    Some(Pattern::ClosedSwarm { objects: fci.tidset.clone(), times: fci.times().collect() })
}

pub fn convoys_of(fci: &Fci, ctx: &ExtractionContext) -> Vec<Pattern> {
    if !frequent(fci, ctx) {
        return Vec::new();
    }
    runs(fci)
        .into_iter()
        .filter(|r| r.len() >= ctx.params.min_t)
        .filter(|r| {
            let mut acc = ctx.column(fci.items[r.start]).clone();
            for id in &fci.items[r.start + 1..r.end] {
                acc.intersect_with(ctx.column(*id));
            }
            acc == fci.tidset
        })
        .map(|r| Pattern::Convoy {
            objects: fci.tidset.clone(),
            span: TimeSpan::new(fci.items[r.start].time.0, fci.items[r.end - 1].time.0),
        })
        .collect()
}

fn jaccard(a: &Tidset, b: &Tidset) -> f64 {
    let inter = a.intersection_len(b);
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

pub fn moving_clusters_of(fci: &Fci, ctx: &ExtractionContext) -> Vec<Pattern> {
    if !frequent(fci, ctx) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut emit = |chain: &[ClusterId]| {
        if chain.len() >= ctx.params.min_t {
            out.push(Pattern::MovingCluster { clusters: chain.to_vec() });
        }
    };
    for r in runs(fci) {
        let items = &fci.items[r];
        let mut start = 0;
        for i in 1..items.len() {
            if jaccard(ctx.column(items[i - 1]), ctx.column(items[i])) < ctx.params.theta {
                emit(&items[start..i]);
                start = i;
            }
        }
        emit(&items[start..]);
    }
    out
}

pub fn group_pattern_of(fci: &Fci, ctx: &ExtractionContext) -> Option<Pattern> {
    let segments: Vec<TimeSpan> = convoys_of(fci, ctx)
        .into_iter()
        .filter_map(|p| match p {
            Pattern::Convoy { span, .. } => Some(span),
            _ => None,
        })
        .collect();
    if segments.is_empty() || segments.len() < ctx.params.min_c {
        return None;
    }
    let covered: usize = segments.iter().map(TimeSpan::len).sum();
    if (covered as f64 / ctx.total_times as f64) < ctx.params.min_wei {
        return None;
    }
    Some(Pattern::GroupPattern { objects: fci.tidset.clone(), segments, total_times: ctx.total_times })
}

pub fn periodic_patterns(fcis: &[Fci], ctx: &ExtractionContext) -> Result<Vec<Pattern>> {
    if ctx.kind() != MatrixKind::Periodic {
        return Err(Error::Kind(format!("periodic patterns need a periodic matrix, got {}", ctx.kind().as_str())));
    }
    let patterns = fcis
        .par_iter()
        .filter_map(|f| closed_swarm_of(f, ctx))
        .map(|p| match p {
            Pattern::ClosedSwarm { objects, times } => {
                Pattern::PeriodicPattern { subtrajectories: objects, offsets: times }
            }
            other => other,
        })
        .collect();
    Ok(canonical_sort(patterns))
}

/// All patterns carried by `fcis`, deduplicated and in canonical order.
/// Periodic matrices yield periodic patterns only.
pub fn extract_patterns(fcis: &[Fci], ctx: &ExtractionContext) -> Result<Vec<Pattern>> {
    match ctx.kind() {
        MatrixKind::ClosedItemset => {
            Err(Error::Kind("expand closed-itemset matrix FCIs into cluster items before extraction".into()))
        }
        MatrixKind::Periodic => periodic_patterns(fcis, ctx),
        MatrixKind::PerTimestamp => {
            let patterns = fcis
                .par_iter()
                .flat_map_iter(|f| {
                    let mut out = Vec::new();
                    out.extend(closed_swarm_of(f, ctx));
                    out.extend(convoys_of(f, ctx));
                    out.extend(moving_clusters_of(f, ctx));
                    out.extend(group_pattern_of(f, ctx));
                    out
                })
                .collect();
            Ok(canonical_sort(patterns))
        }
    }
}

fn object_labels(objects: &Tidset, labels: &Labels) -> Vec<String> {
    objects.ids().map(|o| labels.object(o).to_string()).collect()
}

fn moving_cluster_objects(clusters: &[ClusterId], matrix: &ClusterMatrix) -> Tidset {
    let mut acc = Tidset::full(matrix.n_objects());
    for c in clusters {
        if let Some(t) = matrix.tidset_of(*c) {
            acc.intersect_with(t);
        }
    }
    acc
}

fn pattern_objects(pattern: &Pattern, matrix: &ClusterMatrix) -> Tidset {
    match pattern {
        Pattern::MovingCluster { clusters } => moving_cluster_objects(clusters, matrix),
        other => other.objects().cloned().expect("non-moving patterns carry objects"),
    }
}

fn span_text(span: &TimeSpan, labels: &Labels) -> String {
    format!("{}..{}", labels.time(span.start), labels.time(span.end))
}

fn times_text(pattern: &Pattern, labels: &Labels) -> String {
    let list = |ts: &[TimeIndex]| ts.iter().map(|t| labels.time(*t).to_string()).collect::<Vec<_>>().join(" ");
    match pattern {
        Pattern::ClosedSwarm { times, .. } => list(times),
        Pattern::PeriodicPattern { offsets, .. } => list(offsets),
        Pattern::Convoy { span, .. } => span_text(span, labels),
        Pattern::GroupPattern { segments, .. } => {
            segments.iter().map(|s| span_text(s, labels)).collect::<Vec<_>>().join(" ")
        }
        Pattern::MovingCluster { clusters } => {
            clusters.iter().map(|c| format!("{}:{}", labels.time(c.time), c.ordinal)).collect::<Vec<_>>().join(" ")
        }
    }
}

/// Writes `kind,objects,times,weight` rows. Lists are space separated,
/// intervals are written `start..end`, moving-cluster objects are the
/// members shared by all of its clusters.
pub fn write_patterns_csv<W: Write>(
    patterns: &[Pattern],
    matrix: &ClusterMatrix,
    labels: &Labels,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "objects", "times", "weight"])?;
    for p in patterns {
        let objects = object_labels(&pattern_objects(p, matrix), labels).join(" ");
        let weight = p.weight().map(|w| format!("{w}")).unwrap_or_default();
        w.write_record([p.kind().as_str(), &objects, &times_text(p, labels), &weight])?;
    }
    w.flush()?;
    Ok(())
}

fn covered_times(pattern: &Pattern) -> Vec<TimeIndex> {
    match pattern {
        Pattern::ClosedSwarm { times, .. } => times.clone(),
        Pattern::PeriodicPattern { offsets, .. } => offsets.clone(),
        Pattern::Convoy { span, .. } => span.times().collect(),
        Pattern::GroupPattern { segments, .. } => segments.iter().flat_map(TimeSpan::times).collect(),
        Pattern::MovingCluster { clusters } => clusters.iter().map(|c| c.time).collect(),
    }
}

/// One feature per pattern; the geometry is a MultiLineString of each
/// member's positions from the pattern's first to last time unit.
pub fn patterns_geojson(patterns: &[Pattern], matrix: &ClusterMatrix, labels: &Labels, db: &TrajectoryDb) -> Value {
    let features: Vec<Value> = patterns
        .iter()
        .map(|p| {
            let objects = pattern_objects(p, matrix);
            let (first, last) = (p.first_time(), p.last_time());
            let lines: Vec<Vec<[f64; 2]>> = match (first, last) {
                (Some(first), Some(last)) => objects
                    .ids()
                    .filter(|o| o.0 < db.n_objects())
                    .map(|o| {
                        (first.0..=last.0.min(db.n_times().saturating_sub(1)))
                            .filter_map(|t| db.position(o, TimeIndex(t)))
                            .map(|pt| [pt.x, pt.y])
                            .collect::<Vec<_>>()
                    })
                    .filter(|l| !l.is_empty())
                    .collect(),
                _ => Vec::new(),
            };
            let geometry =
                if lines.is_empty() { Value::Null } else { json!({ "type": "MultiLineString", "coordinates": lines }) };
            let times: Vec<i64> = covered_times(p).iter().map(|t| labels.time(*t)).collect();
            let mut properties = json!({
                "kind": p.kind().as_str(),
                "objects": object_labels(&objects, labels),
                "times": times,
            });
            if let Some(w) = p.weight() {
                properties["weight"] = json!(w);
            }
            if let Pattern::MovingCluster { clusters } = p {
                properties["clusters"] = json!(clusters
                    .iter()
                    .map(|c| format!("{}:{}", labels.time(c.time), c.ordinal))
                    .collect::<Vec<_>>());
            }
            json!({ "type": "Feature", "geometry": geometry, "properties": properties })
        })
        .collect();
    json!({ "type": "FeatureCollection", "features": features })
}

pub fn write_patterns_geojson<W: Write>(
    patterns: &[Pattern],
    matrix: &ClusterMatrix,
    labels: &Labels,
    db: &TrajectoryDb,
    mut out: W,
) -> Result<()> {
    let doc = patterns_geojson(patterns, matrix, labels, db);
    serde_json::to_writer_pretty(&mut out, &doc).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}
