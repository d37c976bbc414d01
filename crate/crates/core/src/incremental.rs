//! Block-wise mining: fixed-size time blocks, nested column blocks, the
//! closed-itemset matrix built from local FCIs, and expansion back to the
//! original clusters.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extract::{extract_patterns, ExtractionContext};
use crate::miner::{mine_fci, mine_fci_nested};
use crate::model::{ClusterId, ClusterMatrix, Column, Fci, Labels, MatrixKind, MiningParams, Mode, Pattern, TimeSpan};

/// A slice of the matrix columns. Fixed-size blocks cover a time window;
/// nested blocks are column runs in reordered position.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub id: u32,
    /// Time window for fixed-size blocks, column time range otherwise.
    pub span: Option<TimeSpan>,
    pub columns: Vec<Column>,
    /// Whether `columns` form a fully nested chain in the stored order.
    pub nested: bool,
}

impl Block {
    fn from_columns(id: u32, columns: Vec<Column>, nested: bool) -> Self {
        let first = columns.iter().map(|c| c.id.time.0).min();
        let last = columns.iter().map(|c| c.id.time.0).max();
        let span = first.zip(last).map(|(a, b)| TimeSpan::new(a, b));
        Block { id, span, columns, nested }
    }
}

/// Consecutive windows of `block_size` time units; the last one may be
/// shorter. Windows without columns are kept.
pub fn split_blocks(matrix: &ClusterMatrix, block_size: usize) -> Result<Vec<Block>> {
    if block_size < 1 {
        return Err(Error::Param("block_size must be >= 1".into()));
    }
    let n = matrix.n_units();
    let size = block_size.min(u32::MAX as usize) as u32;
    let mut blocks = Vec::new();
    let mut start = 0u32;
    while start < n {
        let end = start.saturating_add(size).min(n) - 1;
        let columns: Vec<Column> =
            matrix.columns().iter().filter(|c| (start..=end).contains(&c.id.time.0)).cloned().collect();
        blocks.push(Block { id: blocks.len() as u32, span: Some(TimeSpan::new(start, end)), columns, nested: false });
        start = end + 1;
    }
    Ok(blocks)
}

/// Matrix whose columns are the local FCIs of each block; the time unit is
/// the block id.
#[derive(Debug, Clone)]
pub struct ClosedItemsetMatrix {
    pub matrix: ClusterMatrix,
    /// `expansion[block][ordinal]` lists the original clusters of a column.
    pub expansion: Vec<Vec<Vec<ClusterId>>>,
}

impl ClosedItemsetMatrix {
    pub fn expand(&self, fci: &Fci) -> Vec<ClusterId> {
        let mut items: Vec<ClusterId> = fci
            .items
            .iter()
            .flat_map(|c| self.expansion[c.time.0 as usize][c.ordinal as usize].iter().copied())
            .collect();
        items.sort();
        items.dedup();
        items
    }
}

fn mine_block(matrix: &ClusterMatrix, block: &Block, epsilon: usize) -> Result<Vec<Fci>> {
    if block.nested {
        return mine_fci_nested(&block.columns, epsilon);
    }
    let sub = ClusterMatrix::new(matrix.kind(), matrix.n_objects(), matrix.n_units(), block.columns.clone())?;
    mine_fci(&sub, epsilon)
}

pub fn build_closed_itemset_matrix(
    matrix: &ClusterMatrix,
    blocks: &[Block],
    epsilon: usize,
) -> Result<ClosedItemsetMatrix> {
    if !matrix.kind().is_snapshot() {
        return Err(Error::Kind("blocks must come from a snapshot matrix".into()));
    }
    let local: Vec<Vec<Fci>> = blocks.par_iter().map(|b| mine_block(matrix, b, epsilon)).collect::<Result<Vec<_>>>()?;
    let mut columns = Vec::new();
    let mut expansion = Vec::with_capacity(blocks.len());
    for (b, fcis) in local.into_iter().enumerate() {
        let mut items = Vec::with_capacity(fcis.len());
        for (k, f) in fcis.into_iter().enumerate() {
            columns.push(Column::new(ClusterId::new(b as u32, k as u32), f.tidset));
            items.push(f.items);
        }
        expansion.push(items);
    }
    let cim = ClusterMatrix::new(MatrixKind::ClosedItemset, matrix.n_objects(), blocks.len() as u32, columns)?;
    Ok(ClosedItemsetMatrix { matrix: cim, expansion })
}

/// Mines the closed-itemset matrix and maps every result back to original
/// clusters, closing it against `matrix` and dropping duplicates.
pub fn mine_blocks(matrix: &ClusterMatrix, blocks: &[Block], epsilon: usize) -> Result<Vec<Fci>> {
    let cim = build_closed_itemset_matrix(matrix, blocks, epsilon)?;
    let top = mine_fci(&cim.matrix, epsilon)?;
    let mut fcis: Vec<Fci> = top
        .par_iter()
        .map(|f| {
            let tidset = matrix.support_set(&cim.expand(f));
            let items = matrix.closure(&tidset).into_iter().map(|c| matrix.column(c).id).collect();
            Fci::new(items, tidset)
        })
        .collect();
    fcis.sort();
    fcis.dedup();
    Ok(fcis)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockReport {
    pub id: u32,
    pub span: Option<TimeSpan>,
    pub n_columns: usize,
    pub nested: bool,
}

#[derive(Debug, Clone)]
pub struct MiningOutput {
    pub fcis: Vec<Fci>,
    pub patterns: Vec<Pattern>,
    pub blocks: Vec<BlockReport>,
}

fn reports(blocks: &[Block]) -> Vec<BlockReport> {
    blocks
        .iter()
        .map(|b| BlockReport { id: b.id, span: b.span, n_columns: b.columns.len(), nested: b.nested })
        .collect()
}

fn finish(matrix: &ClusterMatrix, params: MiningParams, fcis: Vec<Fci>, blocks: &[Block]) -> Result<MiningOutput> {
    let ctx = ExtractionContext::new(matrix, params)?;
    let patterns = extract_patterns(&fcis, &ctx)?;
    Ok(MiningOutput { fcis, patterns, blocks: reports(blocks) })
}

pub fn mine_incremental(matrix: &ClusterMatrix, params: MiningParams) -> Result<MiningOutput> {
    params.validate()?;
    let blocks = split_blocks(matrix, params.block_size)?;
    let fcis = mine_blocks(matrix, &blocks, params.epsilon)?;
    finish(matrix, params, fcis, &blocks)
}

/// Columns in reordered position; `permutation[i]` is the original position
/// of `columns[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedOrder {
    pub columns: Vec<Column>,
    pub permutation: Vec<usize>,
}

/// Number of adjacent pairs where the left column contains the right one.
pub fn nested_pairs(columns: &[Column]) -> usize {
    columns.windows(2).filter(|w| w[1].tidset.is_subset(&w[0].tidset)).count()
}

/// Reorders columns to make adjacent columns nested. Columns are ranked by
/// descending size; chains are grown greedily by appending the largest
/// remaining subset of the chain tail, then one pass of adjacent swaps
/// tidies the seams. The original order wins whenever it is at least as
/// nested.
pub fn nested_reorder(matrix: &ClusterMatrix) -> NestedOrder {
    let cols = matrix.columns();
    let mut ranked: Vec<usize> = (0..cols.len()).collect();
    ranked.sort_by(|&a, &b| {
        cols[b]
            .tidset
            .len()
            .cmp(&cols[a].tidset.len())
            .then_with(|| cols[a].tidset.cmp(&cols[b].tidset))
            .then_with(|| cols[a].id.cmp(&cols[b].id))
    });
    let mut used = vec![false; cols.len()];
    let mut order = Vec::with_capacity(cols.len());
    let mut lowest_free = 0;
    while order.len() < cols.len() {
        while used[ranked[lowest_free]] {
            lowest_free += 1;
        }
        let mut tail = ranked[lowest_free];
        used[tail] = true;
        order.push(tail);
        let mut from = lowest_free + 1;
        loop {
            let next = (from..ranked.len())
                .find(|&r| !used[ranked[r]] && cols[ranked[r]].tidset.is_subset(&cols[tail].tidset));
            match next {
                Some(r) => {
                    tail = ranked[r];
                    used[tail] = true;
                    order.push(tail);
                    from = r + 1;
                }
                None => break,
            }
        }
    }
    let nested = |a: usize, b: usize| cols[b].tidset.is_subset(&cols[a].tidset);
    for i in 0..order.len().saturating_sub(1) {
        let local = |o: &[usize]| {
            let lo = i.saturating_sub(1);
            let hi = (i + 2).min(o.len() - 1);
            (lo..hi).filter(|&j| nested(o[j], o[j + 1])).count()
        };
        let before = local(&order);
        order.swap(i, i + 1);
        if local(&order) <= before {
            order.swap(i, i + 1);
        }
    }
    let reordered: Vec<Column> = order.iter().map(|&i| cols[i].clone()).collect();
    if nested_pairs(&reordered) > nested_pairs(cols) {
        NestedOrder { columns: reordered, permutation: order }
    } else {
        NestedOrder { columns: cols.to_vec(), permutation: (0..cols.len()).collect() }
    }
}

/// Cuts the columns into maximal fully nested runs. Runs of one column go to
/// a sparse block, which is always appended last (possibly empty).
pub fn nested_block_partition(columns: &[Column]) -> Vec<Block> {
    let mut blocks = Vec::new();
    let mut spare = Vec::new();
    let mut start = 0;
    for i in 1..=columns.len() {
        let breaks = i == columns.len() || !columns[i].tidset.is_subset(&columns[i - 1].tidset);
        if breaks {
            if i - start >= 2 {
                blocks.push(Block::from_columns(blocks.len() as u32, columns[start..i].to_vec(), true));
            } else {
                spare.extend_from_slice(&columns[start..i]);
            }
            start = i;
        }
    }
    blocks.push(Block::from_columns(blocks.len() as u32, spare, false));
    blocks
}

pub fn mine_parameter_free(matrix: &ClusterMatrix, params: MiningParams) -> Result<MiningOutput> {
    params.validate()?;
    let order = nested_reorder(matrix);
    let blocks = nested_block_partition(&order.columns);
    let fcis = mine_blocks(matrix, &blocks, params.epsilon)?;
    finish(matrix, params, fcis, &blocks)
}

pub fn mine_monolithic(matrix: &ClusterMatrix, params: MiningParams) -> Result<MiningOutput> {
    params.validate()?;
    let fcis = mine_fci(matrix, params.epsilon)?;
    finish(matrix, params, fcis, &[])
}

/// Runs the mode selected in `params`.
pub fn mine(matrix: &ClusterMatrix, params: MiningParams) -> Result<MiningOutput> {
    match params.mode {
        Mode::Monolithic => mine_monolithic(matrix, params),
        Mode::Incremental => mine_incremental(matrix, params),
        Mode::Nested => mine_parameter_free(matrix, params),
    }
}

/// `block_id first_time last_time n_columns nested?`, one line per block.
pub fn write_block_report<W: Write>(blocks: &[BlockReport], labels: &Labels, mut out: W) -> Result<()> {
    for b in blocks {
        let (first, last) = match b.span {
            Some(s) => (labels.time(s.start).to_string(), labels.time(s.end).to_string()),
            None => ("-".to_string(), "-".to_string()),
        };
        writeln!(out, "{} {} {} {} {}", b.id, first, last, b.n_columns, if b.nested { "yes" } else { "no" })?;
    }
    Ok(())
}
