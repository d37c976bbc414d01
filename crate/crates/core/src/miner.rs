//! Frequent closed itemset enumeration.
//!
//! The search is LCM's prefix-preserving closure extension over bitmap
//! tidsets. Candidate supports come from occurrence delivery over the
//! per-object rows, the recursion runs on an explicit stack, and the
//! subtrees below distinct first items are mined in parallel.
//!
//! On snapshot matrices the columns of one time unit are disjoint, so every
//! closure already holds at most one item per unit and the time rule never
//! has to reject a candidate. On closed-itemset matrices the columns of a
//! unit overlap; there each closed tidset is realized by picking, per unit,
//! the smallest column containing it.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ClusterMatrix, Column, Fci, MatrixKind, Tidset};

struct Node {
    /// Closure items as ascending column positions.
    items: Vec<usize>,
    tidset: Tidset,
    core: Option<usize>,
}

struct Search<'a> {
    matrix: &'a ClusterMatrix,
    epsilon: usize,
}

impl<'a> Search<'a> {
    fn root(&self) -> Node {
        let full = Tidset::full(self.matrix.n_objects());
        Node { items: self.matrix.closure(&full), tidset: full, core: None }
    }

    /// Positions `e` past the core whose extension stays frequent, ascending.
    fn candidates(&self, node: &Node, counts: &mut [u32], touched: &mut Vec<usize>) -> Vec<usize> {
        let from = node.core.map_or(0, |c| c + 1);
        for o in node.tidset.ids() {
            let row = self.matrix.row(o);
            let start = row.partition_point(|&c| (c as usize) < from);
            for &c in &row[start..] {
                let c = c as usize;
                if counts[c] == 0 {
                    touched.push(c);
                }
                counts[c] += 1;
            }
        }
        let mut out: Vec<usize> = touched
            .iter()
            .copied()
            .filter(|&c| counts[c] as usize >= self.epsilon && node.items.binary_search(&c).is_err())
            .collect();
        for &c in touched.iter() {
            counts[c] = 0;
        }
        touched.clear();
        out.sort_unstable();
        out
    }

    /// The ppc child of `node` on `e`, if the closure preserves the prefix.
    fn extend(&self, node: &Node, e: usize) -> Option<Node> {
        let tidset = node.tidset.intersect(&self.matrix.column(e).tidset);
        let closure = self.matrix.closure(&tidset);
        let mut parent = node.items.iter().peekable();
        for &c in &closure {
            if c >= e {
                break;
            }
            while parent.next_if(|&&p| p < c).is_some() {}
            if parent.peek() != Some(&&c) {
                return None;
            }
        }
        Some(Node { items: closure, tidset, core: Some(e) })
    }

    fn mine_subtree(&self, start: Node, out: &mut Vec<Node>) {
        let mut counts = vec![0u32; self.matrix.columns().len()];
        let mut touched = Vec::new();
        let mut stack = vec![start];
        while let Some(node) = stack.pop() {
            let cands = self.candidates(&node, &mut counts, &mut touched);
            for &e in cands.iter().rev() {
                if let Some(child) = self.extend(&node, e) {
                    stack.push(child);
                }
            }
            out.push(node);
        }
    }

    fn run(&self) -> Vec<Node> {
        let root = self.root();
        if root.tidset.len() < self.epsilon {
            return Vec::new();
        }
        let mut counts = vec![0u32; self.matrix.columns().len()];
        let mut touched = Vec::new();
        let cands = self.candidates(&root, &mut counts, &mut touched);
        let mut nodes: Vec<Node> = cands
            .par_iter()
            .filter_map(|&e| self.extend(&root, e))
            .flat_map_iter(|child| {
                let mut out = Vec::new();
                self.mine_subtree(child, &mut out);
                out
            })
            .collect();
        if !root.items.is_empty() {
            nodes.push(root);
        }
        nodes
    }
}

/// All closed itemsets of `matrix` with support at least `epsilon` and at
/// most one item per time unit, in canonical order.
pub fn mine_fci(matrix: &ClusterMatrix, epsilon: usize) -> Result<Vec<Fci>> {
    if epsilon < 1 {
        return Err(Error::Param(format!("epsilon must be >= 1, got {epsilon}")));
    }
    let nodes = Search { matrix, epsilon }.run();
    let mut fcis: Vec<Fci> = if matrix.kind() == MatrixKind::ClosedItemset {
        nodes.into_iter().map(|n| realize_per_unit(matrix, n)).collect()
    } else {
        nodes.into_iter().map(|n| Fci::new(n.items.iter().map(|&c| matrix.column(c).id).collect(), n.tidset)).collect()
    };
    fcis.sort();
    Ok(fcis)
}

fn realize_per_unit(matrix: &ClusterMatrix, node: Node) -> Fci {
    let mut chosen: Vec<usize> = Vec::new();
    for &c in &node.items {
        let col = matrix.column(c);
        match chosen.last_mut() {
            Some(last) if matrix.column(*last).id.time == col.id.time => {
                if col.tidset.len() < matrix.column(*last).tidset.len() {
                    *last = c;
                }
            }
            _ => chosen.push(c),
        }
    }
    Fci::new(chosen.into_iter().map(|c| matrix.column(c).id).collect(), node.tidset)
}

/// Checks that each column contains the next one.
pub fn is_fully_nested(chain: &[Column]) -> bool {
    chain.windows(2).all(|w| w[1].tidset.is_subset(&w[0].tidset))
}

/// Mines a fully nested chain by extending only with the next column: the
/// closed itemsets are the prefixes ending where the support drops.
pub fn mine_fci_nested(chain: &[Column], epsilon: usize) -> Result<Vec<Fci>> {
    if epsilon < 1 {
        return Err(Error::Param(format!("epsilon must be >= 1, got {epsilon}")));
    }
    if let Some(i) = chain.windows(2).position(|w| !w[1].tidset.is_subset(&w[0].tidset)) {
        return Err(Error::NotNested(format!("column {} does not contain column {}", chain[i].id, chain[i + 1].id)));
    }
    let mut fcis = Vec::new();
    for (i, col) in chain.iter().enumerate() {
        if col.tidset.len() < epsilon {
            break;
        }
        let drops = chain.get(i + 1).is_none_or(|next| next.tidset.len() < col.tidset.len());
        if drops {
            let items = chain[..=i].iter().map(|c| c.id).collect();
            fcis.push(Fci::new(items, col.tidset.clone()));
        }
    }
    fcis.sort();
    Ok(fcis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ClusterId, ObjectId};

    fn col(t: u32, k: u32, n: u32, ids: &[u32]) -> Column {
        Column::new(ClusterId::new(t, k), Tidset::from_ids(n, ids.iter().copied()))
    }

    fn items(f: &Fci) -> Vec<(u32, u32)> {
        f.items.iter().map(|c| (c.time.0, c.ordinal)).collect()
    }

    fn objs(f: &Fci) -> Vec<u32> {
        f.tidset.ids().map(|o: ObjectId| o.0).collect()
    }

    #[test]
    fn empty_matrix_has_no_fcis() {
        let m = ClusterMatrix::empty(MatrixKind::PerTimestamp, 4, 3);
        assert!(mine_fci(&m, 1).unwrap().is_empty());
    }

    #[test]
    fn epsilon_zero_is_rejected() {
        let m = ClusterMatrix::empty(MatrixKind::PerTimestamp, 4, 3);
        assert!(matches!(mine_fci(&m, 0), Err(Error::Param(_))));
    }

    #[test]
    fn small_hand_instance() {
        // t0: {0,1,2} | t1: {0,1}, {2,3} | t2: {0,1,2,3}
        let m = ClusterMatrix::new(
            MatrixKind::PerTimestamp,
            4,
            3,
            vec![col(0, 0, 4, &[0, 1, 2]), col(1, 0, 4, &[0, 1]), col(1, 1, 4, &[2, 3]), col(2, 0, 4, &[0, 1, 2, 3])],
        )
        .unwrap();
        let got: Vec<_> = mine_fci(&m, 2).unwrap().iter().map(|f| (items(f), objs(f))).collect();
        assert_eq!(
            got,
            vec![
                (vec![(0, 0), (1, 0), (2, 0)], vec![0, 1]),
                (vec![(0, 0), (2, 0)], vec![0, 1, 2]),
                (vec![(1, 1), (2, 0)], vec![2, 3]),
                (vec![(2, 0)], vec![0, 1, 2, 3]),
            ]
        );
    }

    #[test]
    fn closed_itemset_matrix_picks_smallest_column_per_unit() {
        // unit 0 holds nested local sets {0,1,2} ⊇ {0,1}; unit 1 holds {0,1,2}
        let m = ClusterMatrix::new(
            MatrixKind::ClosedItemset,
            3,
            2,
            vec![col(0, 0, 3, &[0, 1, 2]), col(0, 1, 3, &[0, 1]), col(1, 0, 3, &[0, 1, 2])],
        )
        .unwrap();
        let got: Vec<_> = mine_fci(&m, 2).unwrap().iter().map(|f| (items(f), objs(f))).collect();
        assert_eq!(got, vec![(vec![(0, 0), (1, 0)], vec![0, 1, 2]), (vec![(0, 1), (1, 0)], vec![0, 1])]);
    }

    #[test]
    fn nested_chain_example() {
        let chain = vec![col(0, 0, 3, &[0, 1, 2]), col(1, 0, 3, &[0, 1]), col(2, 0, 3, &[0])];
        let got: Vec<_> = mine_fci_nested(&chain, 1).unwrap().iter().map(|f| (f.len(), f.support())).collect();
        let mut expect = vec![(1, 3), (2, 2), (3, 1)];
        expect.sort();
        let mut got_sorted = got.clone();
        got_sorted.sort();
        assert_eq!(got_sorted, expect);
        let m = ClusterMatrix::new(MatrixKind::PerTimestamp, 3, 3, chain.clone()).unwrap();
        assert_eq!(mine_fci_nested(&chain, 1).unwrap(), mine_fci(&m, 1).unwrap());
    }

    #[test]
    fn single_column_chain() {
        let chain = vec![col(0, 0, 3, &[0, 1])];
        assert_eq!(mine_fci_nested(&chain, 2).unwrap().len(), 1);
        assert!(mine_fci_nested(&chain, 3).unwrap().is_empty());
    }

    #[test]
    fn equal_columns_are_absorbed() {
        let chain = vec![col(0, 0, 3, &[0, 1]), col(1, 0, 3, &[0, 1]), col(2, 0, 3, &[0])];
        let got = mine_fci_nested(&chain, 1).unwrap();
        let lens: Vec<usize> = got.iter().map(Fci::len).collect();
        assert_eq!(lens.len(), 2);
        assert!(lens.contains(&2) && lens.contains(&3));
    }

    #[test]
    fn non_nested_chain_is_rejected() {
        let chain = vec![col(0, 0, 3, &[0, 1]), col(1, 0, 3, &[1, 2])];
        assert!(matches!(mine_fci_nested(&chain, 1), Err(Error::NotNested(_))));
    }

    #[test]
    fn random_matrices_match_the_oracle() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let m = crate::oracle::random_matrix(&mut rng, 8, 8, 3);
            for eps in 1..=3 {
                assert_eq!(mine_fci(&m, eps).unwrap(), crate::oracle::brute_fcis(&m, eps).unwrap(), "{m:?}");
            }
        }
    }
}
