//! Small hand-built instances with known answers. The test-suite uses them
//! and they make quick inputs for trying the command-line tool.

use crate::clustering::parse_pre_clustered;
use crate::gen::{SwitchEvent, SyntheticSpec};
use crate::ingest::{parse_trajectories, TrajectoryDb};
use crate::model::{ClusterMatrix, Labels, MatrixKind};

fn clusters(text: &str, kind: MatrixKind) -> (ClusterMatrix, Labels) {
    parse_pre_clustered(text.as_bytes(), kind).expect("sample is well formed")
}

/// Five objects over three timestamps. `o1,o2,o3` share `c11` and `c13`;
/// `o1,o2` share all three first clusters.
pub const FIVE_OBJECTS: &str = "\
# objects=o1,o2,o3,o4,o5
# times=1,2,3
1\t0\to1,o2,o3
1\t1\to5
1\t2\to4
2\t0\to1,o2,o4
2\t1\to3
2\t2\to5
3\t0\to1,o2,o3,o5
3\t1\to4
";

pub fn five_objects() -> (ClusterMatrix, Labels) {
    clusters(FIVE_OBJECTS, MatrixKind::PerTimestamp)
}

/// `o1,o2` together at times 1, 3 and 4 but split at time 2.
pub const GAPPED_SWARM: &str = "\
# objects=o1,o2,o3
# times=1,2,3,4
1\t0\to1,o2
2\t0\to1,o3
3\t0\to1,o2
4\t0\to1,o2
";

pub fn gapped_swarm() -> (ClusterMatrix, Labels) {
    clusters(GAPPED_SWARM, MatrixKind::PerTimestamp)
}

/// `o1,o2` travel together from time 1 to 4 and `o3` joins them at 3.
pub const JOINING_CONVOY: &str = "\
# objects=o1,o2,o3
# times=1,2,3,4
1\t0\to1,o2
2\t0\to1,o2
3\t0\to1,o2,o3
4\t0\to1,o2,o3
";

pub fn joining_convoy() -> (ClusterMatrix, Labels) {
    clusters(JOINING_CONVOY, MatrixKind::PerTimestamp)
}

/// `o1,o2` together over `[1,2]` and `[4,5]`, apart at 3.
pub const INTERRUPTED_GROUP: &str = "\
# objects=o1,o2,o3
# times=1,2,3,4,5
1\t0\to1,o2
2\t0\to1,o2
3\t0\to1,o3
4\t0\to1,o2
5\t0\to1,o2
";

pub fn interrupted_group() -> (ClusterMatrix, Labels) {
    clusters(INTERRUPTED_GROUP, MatrixKind::PerTimestamp)
}

/// Three period-long sub-trajectories sharing one cluster at every offset.
pub const SHARED_ROUTE: &str = "\
# objects=st1,st2,st3
# times=1,2,3
1\t0\tst1,st2,st3
2\t0\tst1,st2,st3
3\t0\tst1,st2,st3
";

pub fn shared_route() -> (ClusterMatrix, Labels) {
    clusters(SHARED_ROUTE, MatrixKind::Periodic)
}

/// One object followed for three days of four timestamps. It repeats its
/// route except for a detour at the second timestamp of the last day.
pub fn daily_route() -> TrajectoryDb {
    let mut text = String::from("object,time,x,y\n");
    for day in 0..3 {
        for k in 0..4 {
            let t = day * 4 + k;
            let y = if day == 2 && k == 1 { 5.0 } else { 0.0 };
            text.push_str(&format!("o1,{t},{k}.0,{y}\n"));
        }
    }
    parse_trajectories(text.as_bytes()).expect("sample is well formed")
}

/// Existing data has `{o1,o2}` and `{o3,o4}` apart; the appended data
/// first pairs `o1,o2`, then groups `o2,o3,o4`.
pub const APPEND_EXISTING: &str = "\
# objects=o1,o2,o3,o4
# times=1
1\t0\to1,o2
1\t1\to3,o4
";

pub const APPEND_INCOMING: &str = "\
# objects=o1,o2,o3,o4
# times=2,3
2\t0\to1,o2
3\t0\to2,o3,o4
";

pub fn append_pair() -> ((ClusterMatrix, Labels), (ClusterMatrix, Labels)) {
    (clusters(APPEND_EXISTING, MatrixKind::PerTimestamp), clusters(APPEND_INCOMING, MatrixKind::PerTimestamp))
}

/// Four objects move together for 100 timestamps, then split into the
/// pairs `{0,1}` and `{2,3}` for another 100.
pub fn splitting_pairs() -> SyntheticSpec {
    let mut events: Vec<SwitchEvent> = (0..4).map(|o| SwitchEvent { time: 0, object: o, group: 0 }).collect();
    events.push(SwitchEvent { time: 100, object: 2, group: 1 });
    events.push(SwitchEvent { time: 100, object: 3, group: 1 });
    SyntheticSpec { n_objects: 4, n_times: 200, n_groups: 2, switch_prob: 0.0, events, ..SyntheticSpec::default() }
}
