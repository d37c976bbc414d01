use comove::append::{combine_fcis, FciSet};
use comove::clustering::{build_cluster_matrix_of_kind, DbscanParams};
use comove::extract::{extract_patterns, ExtractionContext};
use comove::gen::gen_synthetic;
use comove::incremental::{build_closed_itemset_matrix, mine_incremental, split_blocks};
use comove::ingest::periodic_decompose;
use comove::miner::mine_fci;
use comove::model::{
    ClusterId, ClusterMatrix, Fci, Labels, MatrixKind, MiningParams, Pattern, Tidset, TimeIndex, TimeSpan,
};
use comove::oracle::{brute_closed_swarms, brute_convoys, brute_group_patterns};
use comove::samples;

fn objects(labels: &Labels, names: &[&str]) -> Tidset {
    let n = labels.objects.len() as u32;
    Tidset::from_ids(n, names.iter().map(|s| labels.object_index(s).unwrap().0))
}

fn item(labels: &Labels, time: i64, ordinal: u32) -> ClusterId {
    ClusterId { time: labels.time_index(time).unwrap(), ordinal }
}

fn times(labels: &Labels, ts: &[i64]) -> Vec<TimeIndex> {
    ts.iter().map(|t| labels.time_index(*t).unwrap()).collect()
}

fn span(labels: &Labels, a: i64, b: i64) -> TimeSpan {
    TimeSpan { start: labels.time_index(a).unwrap(), end: labels.time_index(b).unwrap() }
}

fn params(epsilon: usize, min_t: usize) -> MiningParams {
    MiningParams { epsilon, min_t, ..Default::default() }
}

fn patterns(m: &ClusterMatrix, p: MiningParams) -> Vec<Pattern> {
    let fcis = mine_fci(m, p.epsilon).unwrap();
    extract_patterns(&fcis, &ExtractionContext::new(m, p).unwrap()).unwrap()
}

fn of_kind(ps: &[Pattern], kind: comove::model::PatternKind) -> Vec<Pattern> {
    ps.iter().filter(|p| p.kind() == kind).cloned().collect()
}

#[test]
fn five_object_example_fcis_and_patterns() {
    let (m, l) = samples::five_objects();
    let fcis = mine_fci(&m, 2).unwrap();
    let swarm_fci = Fci::new(vec![item(&l, 1, 0), item(&l, 3, 0)], objects(&l, &["o1", "o2", "o3"]));
    let convoy_fci = Fci::new(vec![item(&l, 1, 0), item(&l, 2, 0), item(&l, 3, 0)], objects(&l, &["o1", "o2"]));
    assert!(fcis.contains(&swarm_fci));
    assert!(fcis.contains(&convoy_fci));
    assert_eq!(swarm_fci.support(), 3);

    let ps = patterns(&m, params(2, 2));
    assert!(ps.contains(&Pattern::ClosedSwarm { objects: objects(&l, &["o1", "o2", "o3"]), times: times(&l, &[1, 3]) }));
    assert!(ps.contains(&Pattern::Convoy { objects: objects(&l, &["o1", "o2"]), span: span(&l, 1, 3) }));
}

#[test]
fn gapped_swarm_is_the_only_closed_swarm() {
    let (m, l) = samples::gapped_swarm();
    let ps = patterns(&m, params(2, 2));
    let expect = vec![Pattern::ClosedSwarm { objects: objects(&l, &["o1", "o2"]), times: times(&l, &[1, 3, 4]) }];
    assert_eq!(of_kind(&ps, comove::model::PatternKind::ClosedSwarm), expect);
    assert_eq!(brute_closed_swarms(&m, 2, 2).unwrap(), expect);
}

#[test]
fn joining_object_gives_two_convoys() {
    let (m, l) = samples::joining_convoy();
    let ps = patterns(&m, params(2, 2));
    let mut expect = vec![
        Pattern::Convoy { objects: objects(&l, &["o1", "o2"]), span: span(&l, 1, 4) },
        Pattern::Convoy { objects: objects(&l, &["o1", "o2", "o3"]), span: span(&l, 3, 4) },
    ];
    expect.sort();
    assert_eq!(of_kind(&ps, comove::model::PatternKind::Convoy), expect);
    assert_eq!(brute_convoys(&m, 2, 2).unwrap(), expect);
}

#[test]
fn interrupted_group_has_weight_four_fifths() {
    let (m, l) = samples::interrupted_group();
    let p = MiningParams { epsilon: 2, min_t: 2, min_c: 1, min_wei: 0.5, ..Default::default() };
    let groups = of_kind(&patterns(&m, p), comove::model::PatternKind::GroupPattern);
    let expect = Pattern::GroupPattern {
        objects: objects(&l, &["o1", "o2"]),
        segments: vec![span(&l, 1, 2), span(&l, 4, 5)],
        total_times: 5,
    };
    assert_eq!(groups, vec![expect.clone()]);
    assert_eq!(groups[0].weight(), Some(4.0 / 5.0));
    assert_eq!(brute_group_patterns(&m, 2, 2, 1, 0.5).unwrap(), vec![expect]);
    let strict = MiningParams { min_wei: 0.9, ..p };
    assert!(of_kind(&patterns(&m, strict), comove::model::PatternKind::GroupPattern).is_empty());
}

#[test]
fn shared_route_is_one_periodic_pattern() {
    let (m, l) = samples::shared_route();
    let ps = patterns(&m, params(2, 2));
    assert_eq!(
        ps,
        vec![Pattern::PeriodicPattern {
            subtrajectories: objects(&l, &["st1", "st2", "st3"]),
            offsets: times(&l, &[1, 2, 3])
        }]
    );
}

#[test]
fn daily_route_gives_two_periodic_patterns() {
    let db = samples::daily_route();
    let (dec, sub) = periodic_decompose(&db, 4).unwrap();
    assert_eq!(dec.subtrajectories.len(), 3);
    let m = build_cluster_matrix_of_kind(&sub, DbscanParams::default(), MatrixKind::Periodic).unwrap();
    let ps = patterns(&m, params(2, 2));
    let all = Tidset::from_ids(3, [0, 1, 2]);
    let first_two = Tidset::from_ids(3, [0, 1]);
    let mut expect = vec![
        Pattern::PeriodicPattern { subtrajectories: first_two, offsets: (0..4).map(TimeIndex).collect() },
        Pattern::PeriodicPattern { subtrajectories: all, offsets: [0, 2, 3].into_iter().map(TimeIndex).collect() },
    ];
    expect.sort();
    assert_eq!(ps, expect);
}

fn fci_set(m: &ClusterMatrix, offset: u32) -> FciSet {
    FciSet { n_objects: m.n_objects(), offset, n_units: m.n_units(), fcis: mine_fci(m, 2).unwrap() }
}

fn concat(a: &ClusterMatrix, b: &ClusterMatrix) -> ClusterMatrix {
    let mut cols = a.columns().to_vec();
    for c in b.columns() {
        cols.push(comove::model::Column::new(
            ClusterId::new(c.id.time.0 + a.n_units(), c.id.ordinal),
            c.tidset.clone(),
        ));
    }
    ClusterMatrix::new(MatrixKind::PerTimestamp, a.n_objects(), a.n_units() + b.n_units(), cols).unwrap()
}

#[test]
fn append_pair_combines_as_expected() {
    let ((left, l), (right, _)) = samples::append_pair();
    let (out, _) = combine_fcis(&fci_set(&left, 0), &fci_set(&right, 1), 2).unwrap();
    let whole = concat(&left, &right);
    assert_eq!(out.fcis, mine_fci(&whole, 2).unwrap());
    let o = |names: &[&str]| objects(&l, names);
    let got: Vec<(Vec<(u32, u32)>, Tidset)> =
        out.fcis.iter().map(|f| (f.items.iter().map(|c| (c.time.0, c.ordinal)).collect(), f.tidset.clone())).collect();
    let mut expect = vec![
        (vec![(0, 0), (1, 0)], o(&["o1", "o2"])),
        (vec![(0, 1), (2, 0)], o(&["o3", "o4"])),
        (vec![(2, 0)], o(&["o2", "o3", "o4"])),
    ];
    expect.sort_by(|a, b| a.0.cmp(&b.0));
    let mut got_sorted = got;
    got_sorted.sort_by(|a, b| a.0.cmp(&b.0));
    assert_eq!(got_sorted, expect);
}

#[test]
fn splitting_pairs_compress_to_three_local_fcis() {
    let db = gen_synthetic(&samples::splitting_pairs()).unwrap();
    let m = comove::clustering::build_cluster_matrix(&db, DbscanParams::default()).unwrap();
    assert_eq!(m.n_units(), 200);
    let blocks = split_blocks(&m, 100).unwrap();
    assert_eq!(blocks.len(), 2);
    let cim = build_closed_itemset_matrix(&m, &blocks, 2).unwrap();
    let per_block: Vec<Vec<Vec<u32>>> = (0..2)
        .map(|b| cim.matrix.unit_columns(TimeIndex(b)).iter().map(|c| c.tidset.ids().map(|o| o.0).collect()).collect())
        .collect();
    assert_eq!(per_block[0], vec![vec![0, 1, 2, 3]]);
    let mut second = per_block[1].clone();
    second.sort();
    assert_eq!(second, vec![vec![0, 1], vec![2, 3]]);
    let inc = mine_incremental(&m, MiningParams { block_size: 100, ..Default::default() }).unwrap();
    assert_eq!(inc.fcis, mine_fci(&m, 2).unwrap());
    assert_eq!(inc.fcis.len(), 3);
}
