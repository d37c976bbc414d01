use comove::append::{combine_fcis, FciSet};
use comove::extract::{extract_patterns, ExtractionContext};
use comove::incremental::{mine_incremental, mine_parameter_free, nested_pairs, nested_reorder};
use comove::miner::{mine_fci, mine_fci_nested};
use comove::model::{ClusterId, ClusterMatrix, Column, MatrixKind, MiningParams, Mode, Pattern, PatternKind};
use comove::oracle::{
    brute_closed_swarms, brute_convoys, brute_fcis, brute_group_patterns, random_matrix, random_nested_chain,
    validate_pattern,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn matrix_from(seed: u64) -> ClusterMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=8);
    let t = rng.gen_range(1..=10);
    random_matrix(&mut rng, n, t, 3)
}

fn only(ps: &[Pattern], kind: PatternKind) -> Vec<Pattern> {
    ps.iter().filter(|p| p.kind() == kind).cloned().collect()
}

fn slice(m: &ClusterMatrix, from: u32, to: u32) -> ClusterMatrix {
    let cols = m
        .columns()
        .iter()
        .filter(|c| (from..to).contains(&c.id.time.0))
        .map(|c| Column::new(ClusterId::new(c.id.time.0 - from, c.id.ordinal), c.tidset.clone()))
        .collect();
    ClusterMatrix::new(MatrixKind::PerTimestamp, m.n_objects(), to - from, cols).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn miner_matches_brute_force(seed in any::<u64>(), eps in 1usize..=3) {
        let m = matrix_from(seed);
        prop_assert_eq!(mine_fci(&m, eps).unwrap(), brute_fcis(&m, eps).unwrap());
    }

    #[test]
    fn extracted_patterns_match_definitions(seed in any::<u64>(), eps in 1usize..=3, min_t in 1usize..=3,
                                             min_c in 1usize..=2, wei in 0u32..=4) {
        let m = matrix_from(seed);
        let min_wei = wei as f64 / 4.0;
        let p = MiningParams { epsilon: eps, min_t, min_c, min_wei, ..Default::default() };
        let ps = extract_patterns(&mine_fci(&m, eps).unwrap(), &ExtractionContext::new(&m, p).unwrap()).unwrap();
        prop_assert_eq!(only(&ps, PatternKind::ClosedSwarm), brute_closed_swarms(&m, eps, min_t).unwrap());
        prop_assert_eq!(only(&ps, PatternKind::Convoy), brute_convoys(&m, eps, min_t).unwrap());
        prop_assert_eq!(only(&ps, PatternKind::GroupPattern), brute_group_patterns(&m, eps, min_t, min_c, min_wei).unwrap());
        for pat in &ps {
            prop_assert!(validate_pattern(pat, &m, &p).is_ok(), "{:?}: {:?}", pat, validate_pattern(pat, &m, &p));
        }
    }

    #[test]
    fn convoys_lie_inside_closed_swarms(seed in any::<u64>(), eps in 1usize..=3, min_t in 1usize..=3) {
        let m = matrix_from(seed);
        let p = MiningParams { epsilon: eps, min_t, ..Default::default() };
        let ps = extract_patterns(&mine_fci(&m, eps).unwrap(), &ExtractionContext::new(&m, p).unwrap()).unwrap();
        for c in only(&ps, PatternKind::Convoy) {
            let Pattern::Convoy { objects, span } = &c else { unreachable!() };
            let covered = only(&ps, PatternKind::ClosedSwarm).iter().any(|s| match s {
                Pattern::ClosedSwarm { objects: so, times } => {
                    objects.is_subset(so) && span.times().all(|t| times.contains(&t))
                }
                _ => false,
            });
            prop_assert!(covered, "{:?}", c);
        }
    }

    #[test]
    fn fcis_are_closed_and_consistent(seed in any::<u64>(), eps in 1usize..=3) {
        let m = matrix_from(seed);
        for f in mine_fci(&m, eps).unwrap() {
            prop_assert!(f.has_distinct_times());
            prop_assert!(f.support() >= eps);
            prop_assert_eq!(&m.support_set(&f.items), &f.tidset);
            prop_assert!(f.len() <= m.n_units() as usize);
            for c in m.columns() {
                if !f.items.contains(&c.id) && f.items.iter().all(|i| i.time != c.id.time) {
                    prop_assert!(f.tidset.intersection_len(&c.tidset) < f.support());
                }
            }
        }
    }

    #[test]
    fn every_block_size_matches_monolithic(seed in any::<u64>(), eps in 1usize..=3) {
        let m = matrix_from(seed);
        let mono = mine_fci(&m, eps).unwrap();
        for bs in 1..=m.n_units() as usize {
            let p = MiningParams { epsilon: eps, block_size: bs, mode: Mode::Incremental, ..Default::default() };
            prop_assert_eq!(&mine_incremental(&m, p).unwrap().fcis, &mono, "block size {}", bs);
        }
    }

    #[test]
    fn parameter_free_matches_monolithic(seed in any::<u64>(), eps in 1usize..=3, min_t in 1usize..=3) {
        let m = matrix_from(seed);
        let p = MiningParams { epsilon: eps, min_t, ..Default::default() };
        let mono = comove::incremental::mine_monolithic(&m, p).unwrap();
        let free = mine_parameter_free(&m, p).unwrap();
        prop_assert_eq!(free.fcis, mono.fcis);
        prop_assert_eq!(free.patterns, mono.patterns);
    }

    #[test]
    fn reorder_never_loses_nested_pairs(seed in any::<u64>()) {
        let m = matrix_from(seed);
        let r = nested_reorder(&m);
        prop_assert!(nested_pairs(&r.columns) >= nested_pairs(m.columns()));
        let mut perm = r.permutation.clone();
        perm.sort_unstable();
        prop_assert_eq!(perm, (0..m.columns().len()).collect::<Vec<_>>());
        for (c, &i) in r.columns.iter().zip(&r.permutation) {
            prop_assert_eq!(c, &m.columns()[i]);
        }
    }

    #[test]
    fn nested_chains_mine_like_the_general_miner(seed in any::<u64>(), eps in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=10);
        let len = rng.gen_range(1..=8);
        let chain = random_nested_chain(&mut rng, n, len);
        let m = ClusterMatrix::new(MatrixKind::PerTimestamp, n, len, chain.clone()).unwrap();
        prop_assert_eq!(mine_fci_nested(&chain, eps).unwrap(), mine_fci(&m, eps).unwrap());
    }

    #[test]
    fn append_round_trip(seed in any::<u64>(), eps in 1usize..=3) {
        let m = matrix_from(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let cut = rng.gen_range(0..=m.n_units());
        let (left, right) = (slice(&m, 0, cut), slice(&m, cut, m.n_units()));
        let lf = mine_fci(&left, eps).unwrap();
        let rf = mine_fci(&right, eps).unwrap();
        let a = FciSet { n_objects: m.n_objects(), offset: 0, n_units: cut, fcis: lf.clone() };
        let b = FciSet { n_objects: m.n_objects(), offset: cut, n_units: m.n_units() - cut, fcis: rf.clone() };
        let (out, stats) = combine_fcis(&a, &b, eps).unwrap();
        prop_assert_eq!(&out.fcis, &mine_fci(&m, eps).unwrap());
        prop_assert!(stats.pairs_evaluated <= (lf.len() * rf.len()) as u64);
        prop_assert!(stats.lookup_probes <= stats.pairs_evaluated);
        // combined FCIs pair the tightest FCI of each side around their tidset
        for f in out.fcis.iter().filter(|f| f.items.first().unwrap().time.0 < cut && f.items.last().unwrap().time.0 >= cut) {
            let left_items: Vec<ClusterId> = f.items.iter().copied().filter(|c| c.time.0 < cut).collect();
            let left_t = left.support_set(&left_items);
            prop_assert!(lf.iter().any(|p| p.items == left_items));
            prop_assert!(!lf.iter().any(|p| f.tidset.is_subset(&p.tidset) && p.tidset.is_subset(&left_t) && p.tidset != left_t));
            let right_items: Vec<ClusterId> =
                f.items.iter().filter(|c| c.time.0 >= cut).map(|c| ClusterId::new(c.time.0 - cut, c.ordinal)).collect();
            let right_t = right.support_set(&right_items);
            prop_assert!(rf.iter().any(|p| p.items == right_items));
            prop_assert!(!rf.iter().any(|p| f.tidset.is_subset(&p.tidset) && p.tidset.is_subset(&right_t) && p.tidset != right_t));
        }
    }

    #[test]
    fn column_order_does_not_matter(seed in any::<u64>()) {
        let m = matrix_from(seed);
        let mut cols = m.columns().to_vec();
        cols.reverse();
        let again = ClusterMatrix::new(MatrixKind::PerTimestamp, m.n_objects(), m.n_units(), cols).unwrap();
        prop_assert_eq!(mine_fci(&again, 1).unwrap(), mine_fci(&m, 1).unwrap());
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let m = random_matrix(&mut rng, 30, 40, 3);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
            comove::incremental::mine(&m, MiningParams { mode: Mode::Nested, ..Default::default() }).unwrap()
        })
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(a.fcis, b.fcis);
    assert_eq!(a.patterns, b.patterns);
}
