//! Trajectory input: parsing, gap interpolation and periodic decomposition.
//!
//! Input is CSV with one observation per line, `object_id,timestamp,x,y`.
//! A header line is recognised when its second field is neither an integer
//! nor an ISO-8601 timestamp. ISO timestamps are mapped to Unix seconds.

use std::collections::HashMap;
use std::io::{Read, Write};

use chrono::{DateTime, NaiveDate, NaiveDateTime};

use crate::error::{Error, Result};
use crate::model::{Labels, ObjectId, TimeIndex};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

/// Positions of every object over a dense timeline. `tracks[o][t]` is the
/// position of object `o` at time index `t`, if known.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryDb {
    labels: Labels,
    tracks: Vec<Vec<Option<Point>>>,
}

impl TrajectoryDb {
    pub fn new(labels: Labels, tracks: Vec<Vec<Option<Point>>>) -> Result<Self> {
        if tracks.len() != labels.objects.len() {
            return Err(Error::Param("one track per object label is required".into()));
        }
        if tracks.iter().any(|t| t.len() != labels.times.len()) {
            return Err(Error::Param("every track must span the whole timeline".into()));
        }
        if labels.times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Param("time labels must be strictly increasing".into()));
        }
        Ok(TrajectoryDb { labels, tracks })
    }

    pub fn empty() -> Self {
        TrajectoryDb { labels: Labels::default(), tracks: Vec::new() }
    }

    pub fn labels(&self) -> &Labels {
        &self.labels
    }

    pub fn n_objects(&self) -> u32 {
        self.labels.objects.len() as u32
    }

    pub fn n_times(&self) -> u32 {
        self.labels.times.len() as u32
    }

    pub fn position(&self, object: ObjectId, time: TimeIndex) -> Option<Point> {
        self.tracks[object.0 as usize][time.0 as usize]
    }

    pub fn track(&self, object: ObjectId) -> &[Option<Point>] {
        &self.tracks[object.0 as usize]
    }

    /// Observed (or interpolated) positions at one timestamp, by object id.
    pub fn snapshot(&self, time: TimeIndex) -> Vec<(ObjectId, Point)> {
        self.tracks
            .iter()
            .enumerate()
            .filter_map(|(o, track)| track[time.0 as usize].map(|p| (ObjectId(o as u32), p)))
            .collect()
    }

    pub fn n_observations(&self) -> usize {
        self.tracks.iter().map(|t| t.iter().filter(|p| p.is_some()).count()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TimeFormat {
    Integer,
    Iso,
}

fn parse_time(field: &str) -> Option<(i64, TimeFormat)> {
    if let Ok(v) = field.parse::<i64>() {
        return Some((v, TimeFormat::Integer));
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(field) {
        return Some((dt.timestamp(), TimeFormat::Iso));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(field, fmt) {
            return Some((dt.and_utc().timestamp(), TimeFormat::Iso));
        }
    }
    if let Ok(d) = NaiveDate::parse_from_str(field, "%Y-%m-%d") {
        return Some((d.and_hms_opt(0, 0, 0)?.and_utc().timestamp(), TimeFormat::Iso));
    }
    None
}

/// Characters reserved by the output formats.
pub(crate) fn validate_label(label: &str, line: usize) -> Result<()> {
    if label.is_empty() {
        return Err(Error::Value { line, message: "empty object id".into() });
    }
    if label.starts_with('#') || label.chars().any(|c| c.is_whitespace() || matches!(c, ',' | ';' | ':')) {
        return Err(Error::Value {
            line,
            message: format!("object id `{label}` contains a reserved character (whitespace , ; : or a leading #)"),
        });
    }
    Ok(())
}

/// Orders object labels numerically when all of them are integers,
/// lexicographically otherwise.
pub(crate) fn sort_object_labels(labels: &mut [String]) {
    if labels.iter().all(|l| l.parse::<i64>().is_ok()) {
        labels.sort_by_key(|l| l.parse::<i64>().unwrap());
    } else {
        labels.sort();
    }
}

pub fn parse_trajectories<R: Read>(source: R) -> Result<TrajectoryDb> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(source);

    let mut rows: Vec<(usize, String, i64, Point)> = Vec::new();
    let mut format: Option<TimeFormat> = None;
    let mut first = true;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if first {
            first = false;
            if record.len() >= 2 && parse_time(&record[1]).is_none() {
                continue;
            }
        }
        if record.len() != 4 {
            return Err(Error::Parse {
                line,
                message: format!("expected 4 fields `object_id,timestamp,x,y`, found {}", record.len()),
            });
        }
        let object = record[0].to_string();
        validate_label(&object, line)?;
        let (time, fmt) = parse_time(&record[1])
            .ok_or_else(|| Error::Parse { line, message: format!("unreadable timestamp `{}`", &record[1]) })?;
        match format {
            None => format = Some(fmt),
            Some(f) if f != fmt => {
                return Err(Error::Value { line, message: "mixed integer and ISO-8601 timestamps".into() })
            }
            _ => {}
        }
        let coord = |i: usize, name: &str| -> Result<f64> {
            let v: f64 = record[i].parse().map_err(|_| Error::Parse {
                line,
                message: format!("unreadable {name} coordinate `{}`", &record[i]),
            })?;
            if !v.is_finite() {
                return Err(Error::Value { line, message: format!("non-finite {name} coordinate `{}`", &record[i]) });
            }
            Ok(v)
        };
        let point = Point { x: coord(2, "x")?, y: coord(3, "y")? };
        rows.push((line, object, time, point));
    }

    let mut objects: Vec<String> = rows.iter().map(|r| r.1.clone()).collect();
    objects.sort();
    objects.dedup();
    sort_object_labels(&mut objects);
    let mut times: Vec<i64> = rows.iter().map(|r| r.2).collect();
    times.sort_unstable();
    times.dedup();

    let object_index: HashMap<&str, usize> = objects.iter().enumerate().map(|(i, o)| (o.as_str(), i)).collect();
    let mut tracks = vec![vec![None; times.len()]; objects.len()];
    for (line, object, time, point) in &rows {
        let o = object_index[object.as_str()];
        let t = times.binary_search(time).expect("time collected above");
        if tracks[o][t].is_some() {
            return Err(Error::Conflict { line: *line, object: object.clone(), time: time.to_string() });
        }
        tracks[o][t] = Some(*point);
    }
    let labels = Labels { objects, times };
    Ok(TrajectoryDb { labels, tracks })
}

pub fn write_trajectories<W: Write>(db: &TrajectoryDb, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["object_id", "timestamp", "x", "y"])?;
    for (o, track) in db.tracks.iter().enumerate() {
        for (t, p) in track.iter().enumerate() {
            if let Some(p) = p {
                w.write_record([
                    db.labels.objects[o].clone(),
                    db.labels.times[t].to_string(),
                    p.x.to_string(),
                    p.y.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Fills interior gaps of every track by linear interpolation against the
/// time labels. Positions before the first or after the last observation of
/// an object stay empty.
pub fn interpolate(db: &TrajectoryDb) -> TrajectoryDb {
    let times = &db.labels.times;
    let tracks = db
        .tracks
        .iter()
        .map(|track| {
            let mut filled = track.clone();
            let observed: Vec<usize> = (0..track.len()).filter(|&t| track[t].is_some()).collect();
            for pair in observed.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                let (pa, pb) = (track[a].unwrap(), track[b].unwrap());
                let span = (times[b] - times[a]) as f64;
                for (t, slot) in filled.iter_mut().enumerate().take(b).skip(a + 1) {
                    let w = (times[t] - times[a]) as f64 / span;
                    *slot = Some(Point { x: pa.x + w * (pb.x - pa.x), y: pa.y + w * (pb.y - pa.y) });
                }
            }
            filled
        })
        .collect();
    TrajectoryDb { labels: db.labels.clone(), tracks }
}

/// Rows of a periodic decomposition: sub-trajectory `i` is period instance
/// `subtrajectories[i].1` of object `subtrajectories[i].0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicDecomposition {
    pub period: u32,
    pub subtrajectories: Vec<(ObjectId, u32)>,
    /// Dense time index at which each sub-trajectory starts.
    pub starts: Vec<TimeIndex>,
}

/// Cuts each object's trajectory into `floor(N / period)` consecutive
/// sub-trajectories of `period` timestamps, starting at its first
/// observation. The incomplete final period is dropped. The returned
/// database has one row per sub-trajectory (labelled `object#k`) over the
/// offsets `0..period`.
pub fn periodic_decompose(db: &TrajectoryDb, period: u32) -> Result<(PeriodicDecomposition, TrajectoryDb)> {
    if period < 2 {
        return Err(Error::Param(format!("period must be >= 2, got {period}")));
    }
    let p = period as usize;
    let mut subtrajectories = Vec::new();
    let mut starts = Vec::new();
    let mut names = Vec::new();
    let mut tracks = Vec::new();
    for (o, track) in db.tracks.iter().enumerate() {
        let Some(first) = track.iter().position(Option::is_some) else { continue };
        let last = track.iter().rposition(Option::is_some).unwrap();
        let n = last - first + 1;
        for k in 0..n / p {
            let start = first + k * p;
            subtrajectories.push((ObjectId(o as u32), k as u32));
            starts.push(TimeIndex(start as u32));
            names.push(format!("{}#{}", db.labels.objects[o], k));
            tracks.push(track[start..start + p].to_vec());
        }
    }
    let labels = Labels { objects: names, times: (0..period as i64).collect() };
    let decomposition = PeriodicDecomposition { period, subtrajectories, starts };
    Ok((decomposition, TrajectoryDb { labels, tracks }))
}
