//! FCI store: a TSV file of FCIs with a small compatibility header.
//!
//! ```text
//! # epsilon=2
//! # n_objects=3
//! # time_range=1..4
//! # kind=per-timestamp
//! # objects=o1,o2,o3
//! # times=1,2,3,4
//! 2    o1,o2    1:0;2:0;3:0
//! ```
//!
//! Items are written `time_label:ordinal`.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::model::{ClusterId, Fci, Labels, MatrixKind, ObjectId, Tidset};

#[derive(Debug, Clone, PartialEq)]
pub struct FciStore {
    pub epsilon: usize,
    pub kind: MatrixKind,
    pub labels: Labels,
    pub fcis: Vec<Fci>,
}

impl FciStore {
    pub fn n_objects(&self) -> u32 {
        self.labels.objects.len() as u32
    }
}

pub fn write_store<W: Write>(store: &FciStore, mut out: W) -> Result<()> {
    let labels = &store.labels;
    writeln!(out, "# epsilon={}", store.epsilon)?;
    writeln!(out, "# n_objects={}", labels.objects.len())?;
    match (labels.times.first(), labels.times.last()) {
        (Some(a), Some(b)) => writeln!(out, "# time_range={a}..{b}")?,
        _ => writeln!(out, "# time_range=")?,
    }
    writeln!(out, "# kind={}", store.kind.as_str())?;
    writeln!(out, "# objects={}", labels.objects.join(","))?;
    let times: Vec<String> = labels.times.iter().map(i64::to_string).collect();
    writeln!(out, "# times={}", times.join(","))?;
    for f in &store.fcis {
        let objects: Vec<&str> = f.tidset.ids().map(|o| labels.object(o)).collect();
        let items: Vec<String> = f.items.iter().map(|c| format!("{}:{}", labels.time(c.time), c.ordinal)).collect();
        writeln!(out, "{}\t{}\t{}", f.support(), objects.join(","), items.join(";"))?;
    }
    Ok(())
}

fn store_err(line: usize, message: impl std::fmt::Display) -> Error {
    Error::Store(format!("line {line}: {message}"))
}

fn list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).collect()
}

pub fn read_store<R: BufRead>(source: R) -> Result<FciStore> {
    let mut header: HashMap<String, (usize, String)> = HashMap::new();
    let mut body: Vec<(usize, String)> = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some((k, v)) = rest.trim().split_once('=') {
                header.insert(k.trim().to_string(), (i + 1, v.trim().to_string()));
            }
            continue;
        }
        body.push((i + 1, line));
    }
    let get = |key: &str| header.get(key).ok_or_else(|| Error::Store(format!("missing `{key}` header")));

    let (line, v) = get("epsilon")?;
    let epsilon: usize = v.parse().map_err(|_| store_err(*line, format!("bad epsilon `{v}`")))?;
    let (line, v) = get("kind")?;
    let kind = MatrixKind::parse(v).ok_or_else(|| store_err(*line, format!("unknown kind `{v}`")))?;
    let objects: Vec<String> = list(&get("objects")?.1).into_iter().map(str::to_string).collect();
    let (line, v) = get("n_objects")?;
    let n_objects: usize = v.parse().map_err(|_| store_err(*line, format!("bad n_objects `{v}`")))?;
    if n_objects != objects.len() {
        return Err(store_err(*line, format!("n_objects={n_objects} but {} objects are listed", objects.len())));
    }
    let (line, v) = get("times")?;
    let times = list(v)
        .into_iter()
        .map(|t| t.parse::<i64>().map_err(|_| store_err(*line, format!("bad timestamp `{t}`"))))
        .collect::<Result<Vec<_>>>()?;
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(store_err(*line, "timestamps are not strictly increasing"));
    }
    let labels = Labels { objects, times };
    let object_index: HashMap<&str, u32> =
        labels.objects.iter().enumerate().map(|(i, o)| (o.as_str(), i as u32)).collect();

    let mut fcis = Vec::with_capacity(body.len());
    for (line, text) in body {
        let fields: Vec<&str> = text.split('\t').collect();
        if fields.len() != 3 {
            return Err(store_err(line, format!("expected 3 tab-separated fields, found {}", fields.len())));
        }
        let support: usize =
            fields[0].trim().parse().map_err(|_| store_err(line, format!("bad support `{}`", fields[0])))?;
        let mut tidset = Tidset::empty(n_objects as u32);
        for o in list(fields[1]) {
            let idx = object_index.get(o).ok_or_else(|| store_err(line, format!("unknown object `{o}`")))?;
            tidset.insert(ObjectId(*idx));
        }
        if tidset.len() != support {
            return Err(store_err(line, format!("support {support} but {} objects", tidset.len())));
        }
        let mut items = Vec::new();
        for item in fields[2].split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (t, k) = item.rsplit_once(':').ok_or_else(|| store_err(line, format!("bad item `{item}`")))?;
            let t: i64 = t.parse().map_err(|_| store_err(line, format!("bad item `{item}`")))?;
            let k: u32 = k.parse().map_err(|_| store_err(line, format!("bad item `{item}`")))?;
            let ti =
                labels.time_index(t).ok_or_else(|| store_err(line, format!("timestamp {t} is not in the header")))?;
            items.push(ClusterId { time: ti, ordinal: k });
        }
        let fci = Fci::new(items, tidset);
        if fci.is_empty() || !fci.has_distinct_times() {
            return Err(store_err(line, "an FCI needs items at distinct time units"));
        }
        fcis.push(fci);
    }
    fcis.sort();
    Ok(FciStore { epsilon, kind, labels, fcis })
}
