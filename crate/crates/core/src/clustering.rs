//! Per-timestamp DBSCAN and cluster-matrix assembly.
//!
//! Neighbourhoods are closed Euclidean balls (`distance <= eps`) on raw
//! planar coordinates. Seeds are visited in ascending object order and a
//! border point joins the first cluster that reaches it; clusters are then
//! numbered by their smallest member, so the result does not depend on the
//! order of the input points.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ingest::{sort_object_labels, validate_label, Point, TrajectoryDb};
use crate::model::{ClusterId, ClusterMatrix, Column, Labels, MatrixKind, ObjectId, Tidset, TimeIndex};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DbscanParams {
    pub eps: f64,
    pub min_pts: usize,
}

impl Default for DbscanParams {
    fn default() -> Self {
        DbscanParams { eps: 0.001, min_pts: 2 }
    }
}

impl DbscanParams {
    pub fn new(eps: f64, min_pts: usize) -> Result<Self> {
        let p = DbscanParams { eps, min_pts };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::Param(format!("DBSCAN eps must be a positive number, got {}", self.eps)));
        }
        if self.min_pts < 2 {
            return Err(Error::Param(format!("DBSCAN min_pts must be >= 2, got {}", self.min_pts)));
        }
        Ok(())
    }
}

/// Clusters one snapshot. Returns the clusters as sorted object lists,
/// ordered by smallest member; noise points are left out.
pub fn dbscan_snapshot(points: &[(ObjectId, Point)], params: DbscanParams) -> Vec<Vec<ObjectId>> {
    let mut pts = points.to_vec();
    pts.sort_by_key(|p| p.0);
    let n = pts.len();
    let eps2 = params.eps * params.eps;
    let mut neighbours: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        neighbours[i].push(i);
        for j in i + 1..n {
            let dx = pts[i].1.x - pts[j].1.x;
            let dy = pts[i].1.y - pts[j].1.y;
            if dx * dx + dy * dy <= eps2 {
                neighbours[i].push(j);
                neighbours[j].push(i);
            }
        }
    }
    let core: Vec<bool> = neighbours.iter().map(|nb| nb.len() >= params.min_pts).collect();
    let mut label: Vec<Option<usize>> = vec![None; n];
    let mut n_clusters = 0;
    for seed in 0..n {
        if label[seed].is_some() || !core[seed] {
            continue;
        }
        let c = n_clusters;
        n_clusters += 1;
        label[seed] = Some(c);
        let mut queue = vec![seed];
        while let Some(p) = queue.pop() {
            if !core[p] {
                continue;
            }
            for &q in &neighbours[p] {
                if label[q].is_none() {
                    label[q] = Some(c);
                    queue.push(q);
                }
            }
        }
    }
    let mut clusters = vec![Vec::new(); n_clusters];
    for (i, l) in label.iter().enumerate() {
        if let Some(c) = l {
            clusters[*c].push(pts[i].0);
        }
    }
    for c in clusters.iter_mut() {
        c.sort();
    }
    clusters.sort_by_key(|c| c[0]);
    clusters
}

/// Clusters every timestamp of `db` and assembles the per-timestamp matrix
/// (or a periodic matrix when `kind` says so). Timestamps without clusters
/// contribute no columns but still count as time units.
pub fn build_cluster_matrix_of_kind(
    db: &TrajectoryDb,
    params: DbscanParams,
    kind: MatrixKind,
) -> Result<ClusterMatrix> {
    params.validate()?;
    if !kind.is_snapshot() {
        return Err(Error::Kind("snapshot clustering cannot produce a closed-itemset matrix".into()));
    }
    let n_objects = db.n_objects();
    let columns: Vec<Column> = (0..db.n_times())
        .into_par_iter()
        .flat_map_iter(|t| {
            let snapshot = db.snapshot(TimeIndex(t));
            dbscan_snapshot(&snapshot, params)
                .into_iter()
                .enumerate()
                .map(move |(k, members)| {
                    Column::new(
                        ClusterId::new(t, k as u32),
                        Tidset::from_ids(n_objects, members.into_iter().map(|o| o.0)),
                    )
                })
                .collect::<Vec<_>>()
        })
        .collect();
    ClusterMatrix::new(kind, n_objects, db.n_times(), columns)
}

pub fn build_cluster_matrix(db: &TrajectoryDb, params: DbscanParams) -> Result<ClusterMatrix> {
    build_cluster_matrix_of_kind(db, params, MatrixKind::PerTimestamp)
}

/// Reads externally computed clusters, one column per line:
/// `timestamp<TAB>cluster_ordinal<TAB>object_id[,object_id...]`.
///
/// Lines starting with `#` are comments, except the directives
/// `# objects=a,b,...` and `# times=t1,t2,...` which fix the object table
/// and the timeline (otherwise both are taken from the lines themselves).
pub fn parse_pre_clustered<R: BufRead>(source: R, kind: MatrixKind) -> Result<(ClusterMatrix, Labels)> {
    let mut declared_objects: Option<Vec<String>> = None;
    let mut declared_times: Option<Vec<i64>> = None;
    let mut lines: Vec<(usize, i64, u32, Vec<String>)> = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(list) = comment.strip_prefix("objects=") {
                let objs: Vec<String> = split_list(list).map(str::to_string).collect();
                for o in &objs {
                    validate_label(o, line_no)?;
                }
                declared_objects = Some(objs);
            } else if let Some(list) = comment.strip_prefix("times=") {
                let times = split_list(list)
                    .map(|t| {
                        t.parse::<i64>().map_err(|_| Error::Parse {
                            line: line_no,
                            message: format!("unreadable timestamp `{t}` in times directive"),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                declared_times = Some(times);
            }
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let time = fields[0]
            .trim()
            .parse::<i64>()
            .map_err(|_| Error::Parse { line: line_no, message: format!("unreadable timestamp `{}`", fields[0]) })?;
        let ordinal = fields[1].trim().parse::<u32>().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("unreadable cluster ordinal `{}`", fields[1]),
        })?;
        let members: Vec<String> = split_list(fields[2]).map(str::to_string).collect();
        if members.is_empty() {
            return Err(Error::Parse { line: line_no, message: "cluster without objects".into() });
        }
        for m in &members {
            validate_label(m, line_no)?;
        }
        lines.push((line_no, time, ordinal, members));
    }

    let objects = match declared_objects {
        Some(objs) => objs,
        None => {
            let mut objs: Vec<String> = lines.iter().flat_map(|l| l.3.iter().cloned()).collect();
            objs.sort();
            objs.dedup();
            sort_object_labels(&mut objs);
            objs
        }
    };
    let times = match declared_times {
        Some(mut t) => {
            t.sort_unstable();
            t.dedup();
            t
        }
        None => {
            let mut t: Vec<i64> = lines.iter().map(|l| l.1).collect();
            t.sort_unstable();
            t.dedup();
            t
        }
    };
    let object_index: HashMap<&str, u32> = objects.iter().enumerate().map(|(i, o)| (o.as_str(), i as u32)).collect();
    let n_objects = objects.len() as u32;
    let mut columns: BTreeMap<ClusterId, (usize, Tidset)> = BTreeMap::new();
    for (line_no, time, ordinal, members) in &lines {
        let t = times.binary_search(time).map_err(|_| Error::Value {
            line: *line_no,
            message: format!("timestamp {time} is not in the declared timeline"),
        })?;
        let id = ClusterId::new(t as u32, *ordinal);
        let mut tidset = Tidset::empty(n_objects);
        for m in members {
            let o = object_index.get(m.as_str()).ok_or_else(|| Error::Value {
                line: *line_no,
                message: format!("object `{m}` is not in the declared object table"),
            })?;
            tidset.insert(ObjectId(*o));
        }
        if columns.insert(id, (*line_no, tidset)).is_some() {
            return Err(Error::Value {
                line: *line_no,
                message: format!("cluster {ordinal} at timestamp {time} appears twice"),
            });
        }
    }
    let columns = columns.into_iter().map(|(id, (_, t))| Column::new(id, t)).collect();
    let matrix = ClusterMatrix::new(kind, n_objects, times.len() as u32, columns)?;
    Ok((matrix, Labels { objects, times }))
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty())
}

/// Writes a matrix in the pre-clustered format, including the object and
/// time directives so that empty timestamps survive a round trip.
pub fn write_pre_clustered<W: Write>(matrix: &ClusterMatrix, labels: &Labels, mut out: W) -> Result<()> {
    writeln!(out, "# objects={}", labels.objects.join(","))?;
    let times: Vec<String> = labels.times.iter().map(i64::to_string).collect();
    writeln!(out, "# times={}", times.join(","))?;
    for col in matrix.columns() {
        let members: Vec<&str> = col.tidset.ids().map(|o| labels.object(o)).collect();
        writeln!(out, "{}\t{}\t{}", labels.time(col.id.time), col.id.ordinal, members.join(","))?;
    }
    Ok(())
}
