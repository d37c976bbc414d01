use super::{ClusterId, ObjectId, Tidset, TimeIndex};
use crate::error::{Error, Result};

/// What the columns and the time unit of a [`ClusterMatrix`] stand for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MatrixKind {
    /// Snapshot clusters; the time unit is a timestamp.
    PerTimestamp,
    /// Snapshot clusters over period-aligned sub-trajectories; the time unit
    /// is an offset inside the period.
    Periodic,
    /// Local closed itemsets of blocks; the time unit is a block id and
    /// columns of one block may overlap.
    ClosedItemset,
}

impl MatrixKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MatrixKind::PerTimestamp => "per-timestamp",
            MatrixKind::Periodic => "periodic",
            MatrixKind::ClosedItemset => "closed-itemset",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "per-timestamp" => Some(MatrixKind::PerTimestamp),
            "periodic" => Some(MatrixKind::Periodic),
            "closed-itemset" => Some(MatrixKind::ClosedItemset),
            _ => None,
        }
    }

    /// Snapshot kinds require same-unit columns to be disjoint.
    pub fn is_snapshot(self) -> bool {
        !matches!(self, MatrixKind::ClosedItemset)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Column {
    pub id: ClusterId,
    pub tidset: Tidset,
}

impl Column {
    pub fn new(id: ClusterId, tidset: Tidset) -> Self {
        Column { id, tidset }
    }
}

/// The 0-1 matrix of objects (rows) by clusters (columns).
///
/// Columns are kept sorted by `(time, ordinal)`. For snapshot kinds the
/// columns of one time unit are pairwise disjoint. A per-object row index is
/// built at construction so closures can be computed without a full scan.
#[derive(Debug, Clone)]
pub struct ClusterMatrix {
    kind: MatrixKind,
    n_objects: u32,
    n_units: u32,
    columns: Vec<Column>,
    rows: Vec<Vec<u32>>,
}

impl ClusterMatrix {
    pub fn new(kind: MatrixKind, n_objects: u32, n_units: u32, mut columns: Vec<Column>) -> Result<Self> {
        columns.sort_by_key(|c| c.id);
        for pair in columns.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::Matrix(format!("duplicate column {}", pair[0].id)));
            }
        }
        for col in &columns {
            if col.tidset.universe() != n_objects {
                return Err(Error::Matrix(format!(
                    "column {} has universe {} but the matrix has {} objects",
                    col.id,
                    col.tidset.universe(),
                    n_objects
                )));
            }
            if col.tidset.is_empty() {
                return Err(Error::Matrix(format!("column {} is empty", col.id)));
            }
            if col.id.time.0 >= n_units {
                return Err(Error::Matrix(format!("column {} lies outside the {} time units", col.id, n_units)));
            }
        }
        if kind.is_snapshot() {
            let mut start = 0;
            while start < columns.len() {
                let unit = columns[start].id.time;
                let end = start + columns[start..].iter().take_while(|c| c.id.time == unit).count();
                for i in start..end {
                    for j in i + 1..end {
                        if !columns[i].tidset.is_disjoint(&columns[j].tidset) {
                            return Err(Error::Matrix(format!(
                                "clusters {} and {} share objects",
                                columns[i].id, columns[j].id
                            )));
                        }
                    }
                }
                start = end;
            }
        }
        let mut rows = vec![Vec::new(); n_objects as usize];
        for (ci, col) in columns.iter().enumerate() {
            for o in col.tidset.ids() {
                rows[o.0 as usize].push(ci as u32);
            }
        }
        Ok(ClusterMatrix { kind, n_objects, n_units, columns, rows })
    }

    pub fn empty(kind: MatrixKind, n_objects: u32, n_units: u32) -> Self {
        ClusterMatrix { kind, n_objects, n_units, columns: Vec::new(), rows: vec![Vec::new(); n_objects as usize] }
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn n_objects(&self) -> u32 {
        self.n_objects
    }

    /// Number of time units: timestamps, offsets or blocks depending on kind.
    pub fn n_units(&self) -> u32 {
        self.n_units
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, index: usize) -> &Column {
        &self.columns[index]
    }

    pub fn position(&self, id: ClusterId) -> Option<usize> {
        self.columns.binary_search_by_key(&id, |c| c.id).ok()
    }

    pub fn tidset_of(&self, id: ClusterId) -> Option<&Tidset> {
        self.position(id).map(|i| &self.columns[i].tidset)
    }

    /// Column positions containing `object`, ascending.
    pub fn row(&self, object: ObjectId) -> &[u32] {
        &self.rows[object.0 as usize]
    }

    /// Columns whose tidset contains `tidset`, ascending. Empty for an empty
    /// tidset argument is not meaningful and returns every column.
    pub fn closure(&self, tidset: &Tidset) -> Vec<usize> {
        let pivot = tidset.ids().min_by_key(|o| self.rows[o.0 as usize].len());
        match pivot {
            None => (0..self.columns.len()).collect(),
            Some(o) => self.rows[o.0 as usize]
                .iter()
                .map(|&c| c as usize)
                .filter(|&c| tidset.is_subset(&self.columns[c].tidset))
                .collect(),
        }
    }

    /// Intersection of the tidsets of the given cluster ids; the full object
    /// set for an empty list. Unknown ids yield an empty set.
    pub fn support_set(&self, items: &[ClusterId]) -> Tidset {
        let mut acc = Tidset::full(self.n_objects);
        for id in items {
            match self.tidset_of(*id) {
                Some(t) => acc.intersect_with(t),
                None => return Tidset::empty(self.n_objects),
            }
        }
        acc
    }

    /// Columns belonging to time unit `unit`.
    pub fn unit_columns(&self, unit: TimeIndex) -> &[Column] {
        let start = self.columns.partition_point(|c| c.id.time < unit);
        let end = self.columns.partition_point(|c| c.id.time <= unit);
        &self.columns[start..end]
    }
}
