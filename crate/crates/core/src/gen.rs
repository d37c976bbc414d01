//! Synthetic moving groups.
//!
//! Group `g` travels in a straight line at `x = g * separation`, moving up
//! in `y` at its own speed. Members are scattered uniformly within `spread`
//! of the group centre. Objects start round-robin over the groups and may
//! switch group at each step, either at random or by script.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ingest::{Point, TrajectoryDb};
use crate::model::Labels;

/// Moves `object` into `group` from `time` on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwitchEvent {
    pub time: u32,
    pub object: u32,
    pub group: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub n_objects: u32,
    pub n_times: u32,
    pub n_groups: u32,
    pub switch_prob: f64,
    pub spread: f64,
    pub separation: f64,
    pub speed: f64,
    pub seed: u64,
    pub events: Vec<SwitchEvent>,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n_objects: 100,
            n_times: 500,
            n_groups: 5,
            switch_prob: 0.001,
            spread: 0.0003,
            separation: 1.0,
            speed: 0.01,
            seed: 42,
            events: Vec::new(),
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_groups < 1 {
            return Err(Error::Param("n_groups must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.switch_prob) {
            return Err(Error::Param(format!("switch_prob must lie in [0, 1], got {}", self.switch_prob)));
        }
        for (name, v) in [("spread", self.spread), ("separation", self.separation), ("speed", self.speed)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Param(format!("{name} must be a finite non-negative number, got {v}")));
            }
        }
        for e in &self.events {
            if e.object >= self.n_objects || e.group >= self.n_groups {
                return Err(Error::Param(format!(
                    "switch event moves object {} to group {}, outside the spec",
                    e.object, e.group
                )));
            }
        }
        Ok(())
    }
}

pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<TrajectoryDb> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut group: Vec<u32> = (0..spec.n_objects).map(|o| o % spec.n_groups).collect();
    let mut tracks: Vec<Vec<Option<Point>>> = vec![Vec::with_capacity(spec.n_times as usize); spec.n_objects as usize];
    for t in 0..spec.n_times {
        if t > 0 && spec.n_groups > 1 && spec.switch_prob > 0.0 {
            for g in group.iter_mut() {
                if rng.gen_bool(spec.switch_prob) {
                    let other = rng.gen_range(0..spec.n_groups - 1);
                    *g = if other >= *g { other + 1 } else { other };
                }
            }
        }
        for e in spec.events.iter().filter(|e| e.time == t) {
            group[e.object as usize] = e.group;
        }
        for (o, &g) in group.iter().enumerate() {
            let cx = g as f64 * spec.separation;
            let cy = t as f64 * spec.speed * (g + 1) as f64;
            let (dx, dy) = if spec.spread > 0.0 {
                (rng.gen_range(-spec.spread..=spec.spread), rng.gen_range(-spec.spread..=spec.spread))
            } else {
                (0.0, 0.0)
            };
            tracks[o].push(Some(Point { x: cx + dx, y: cy + dy }));
        }
    }
    TrajectoryDb::new(Labels::numbered(spec.n_objects, spec.n_times), tracks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::{build_cluster_matrix, DbscanParams};
    use crate::miner::mine_fci;

    fn small() -> SyntheticSpec {
        SyntheticSpec { n_objects: 12, n_times: 30, n_groups: 3, switch_prob: 0.05, ..Default::default() }
    }

    #[test]
    fn same_seed_same_data() {
        assert_eq!(gen_synthetic(&small()).unwrap(), gen_synthetic(&small()).unwrap());
        let other = SyntheticSpec { seed: 7, ..small() };
        assert_ne!(gen_synthetic(&small()).unwrap(), gen_synthetic(&other).unwrap());
    }

    #[test]
    fn one_group_stays_together() {
        let spec = SyntheticSpec { n_objects: 6, n_times: 20, n_groups: 1, switch_prob: 0.0, ..Default::default() };
        let db = gen_synthetic(&spec).unwrap();
        let m = build_cluster_matrix(&db, DbscanParams::default()).unwrap();
        assert_eq!(m.columns().len(), 20);
        let fcis = mine_fci(&m, 2).unwrap();
        assert_eq!(fcis.len(), 1);
        assert_eq!(fcis[0].len(), 20);
        assert_eq!(fcis[0].support(), 6);
    }

    #[test]
    fn groups_are_separate_clusters() {
        let spec = SyntheticSpec { n_objects: 9, n_times: 5, n_groups: 3, switch_prob: 0.0, ..Default::default() };
        let db = gen_synthetic(&spec).unwrap();
        let m = build_cluster_matrix(&db, DbscanParams::default()).unwrap();
        assert_eq!(m.columns().len(), 15);
        assert!(m.columns().iter().all(|c| c.tidset.len() == 3));
    }

    #[test]
    fn bad_spec_is_rejected() {
        assert!(gen_synthetic(&SyntheticSpec { n_groups: 0, ..small() }).is_err());
        assert!(gen_synthetic(&SyntheticSpec { switch_prob: 2.0, ..small() }).is_err());
    }
}
