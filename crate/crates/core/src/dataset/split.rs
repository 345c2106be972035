//! Train/validation/test splits that keep every target structure in one
//! split.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{DatasetError, GameLogRecord};
use crate::world::Structure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitName {
    Train,
    Val,
    Test,
}

impl SplitName {
    pub const ALL: [SplitName; 3] = [SplitName::Train, SplitName::Val, SplitName::Test];

    pub fn label(&self) -> &'static str {
        match self {
            SplitName::Train => "train",
            SplitName::Val => "val",
            SplitName::Test => "test",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    /// Relative sizes of train, val and test, measured in items.
    pub ratios: [f64; 3],
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec { ratios: [0.8, 0.1, 0.1], seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub key: String,
    pub split: SplitName,
    pub logs: Vec<String>,
    pub items: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Split {
    pub train: Vec<GameLogRecord>,
    pub val: Vec<GameLogRecord>,
    pub test: Vec<GameLogRecord>,
    /// One entry per target, sorted by key.
    pub manifest: Vec<ManifestEntry>,
}

impl Split {
    pub fn part(&self, name: SplitName) -> &[GameLogRecord] {
        match name {
            SplitName::Train => &self.train,
            SplitName::Val => &self.val,
            SplitName::Test => &self.test,
        }
    }

    fn part_mut(&mut self, name: SplitName) -> &mut Vec<GameLogRecord> {
        match name {
            SplitName::Train => &mut self.train,
            SplitName::Val => &mut self.val,
            SplitName::Test => &mut self.test,
        }
    }
}

/// SHA-256 of the sorted block list; equal exactly when the block sets are
/// equal.
pub fn target_key(s: &Structure) -> String {
    let mut h = Sha256::new();
    for (c, color) in s.iter() {
        h.update(format!("{},{},{},{color};", c.x, c.y, c.z).as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Groups logs by target, shuffles the groups with `spec.seed` and hands
/// each group to the split furthest below its item quota. Logs keep their
/// input order within a split.
pub fn split_by_target(logs: Vec<GameLogRecord>, spec: &SplitSpec) -> Result<Split, DatasetError> {
    if spec.ratios.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(DatasetError::Split(format!("ratios must be non-negative, got {:?}", spec.ratios)));
    }
    if !logs.is_empty() && spec.ratios.contains(&0.0) {
        return Err(DatasetError::Split(format!("every split needs a positive ratio, got {:?}", spec.ratios)));
    }
    let mut groups: BTreeMap<String, (Vec<String>, usize)> = BTreeMap::new();
    let keys: Vec<String> = logs.iter().map(|l| target_key(&l.target)).collect();
    for (log, key) in logs.iter().zip(&keys) {
        let g = groups.entry(key.clone()).or_default();
        g.0.push(log.id.clone());
        g.1 += log.item_count();
    }
    let total: usize = groups.values().map(|g| g.1).sum();
    let sum: f64 = spec.ratios.iter().sum();
    let quota: Vec<f64> = spec.ratios.iter().map(|r| r / sum * total as f64).collect();

    let mut order: Vec<&String> = groups.keys().collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    let mut filled = [0usize; 3];
    let mut assigned: BTreeMap<String, SplitName> = BTreeMap::new();
    for key in order {
        let k = (0..3)
            .max_by(|a, b| {
                let da = quota[*a] - filled[*a] as f64;
                let db = quota[*b] - filled[*b] as f64;
                // earlier splits win ties
                da.total_cmp(&db).then(b.cmp(a))
            })
            .expect("three splits");
        filled[k] += groups[key].1;
        assigned.insert(key.clone(), SplitName::ALL[k]);
    }

    let mut split = Split::default();
    for (log, key) in logs.into_iter().zip(&keys) {
        split.part_mut(assigned[key]).push(log);
    }
    split.manifest = groups
        .into_iter()
        .map(|(key, (logs, items))| ManifestEntry { split: assigned[&key], key, logs, items })
        .collect();
    Ok(split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{ItemFlags, Source, TurnRecord, SCHEMA_VERSION};
    use crate::metrics::BoardKind;
    use crate::world::{BlockColor, BuilderPose, Cell};

    fn log(id: usize, target: usize) -> GameLogRecord {
        let target: Structure = [(Cell::new(target as i32 - 5, 1, 0), BlockColor::Red)].into_iter().collect();
        let turn = TurnRecord {
            pose: BuilderPose::new([0.0, 1.0, -3.0], 0.0, 0.0),
            utterances: vec![],
            actions: vec![format!("place red {} 1 0", target.cells().next().unwrap().x)],
            after: vec![],
            flags: ItemFlags { board_kind: BoardKind::Empty, multi_interp: true },
            relation: None,
        };
        GameLogRecord { schema: SCHEMA_VERSION, id: format!("l{id}"), source: Source::SyntheticBlocks, target, turns: vec![turn] }
    }

    #[test]
    fn ten_targets_split_eight_one_one() {
        let logs: Vec<GameLogRecord> = (0..30).map(|i| log(i, i % 10)).collect();
        let spec = SplitSpec { ratios: [0.8, 0.1, 0.1], seed: 4 };
        let s = split_by_target(logs.clone(), &spec).unwrap();
        let count = |n: SplitName| s.manifest.iter().filter(|m| m.split == n).count();
        assert_eq!((count(SplitName::Train), count(SplitName::Val), count(SplitName::Test)), (8, 1, 1));
        assert!(s.manifest.iter().all(|m| m.logs.len() == 3));
        assert_eq!((s.train.len(), s.val.len(), s.test.len()), (24, 3, 3));
        let again = split_by_target(logs, &spec).unwrap();
        assert_eq!(s.manifest, again.manifest);
    }

    #[test]
    fn zero_ratio_is_rejected() {
        let spec = SplitSpec { ratios: [1.0, 0.0, 0.0], seed: 0 };
        assert!(split_by_target(vec![log(0, 0)], &spec).is_err());
        assert!(split_by_target(vec![], &spec).unwrap().manifest.is_empty());
    }

    #[test]
    fn key_depends_on_blocks_only() {
        let a: Structure = [(Cell::new(0, 1, 0), BlockColor::Red), (Cell::new(1, 1, 0), BlockColor::Blue)].into_iter().collect();
        let b: Structure = [(Cell::new(1, 1, 0), BlockColor::Blue), (Cell::new(0, 1, 0), BlockColor::Red)].into_iter().collect();
        assert_eq!(target_key(&a), target_key(&b));
        assert_eq!(target_key(&a).len(), 64);
        let c: Structure = [(Cell::new(0, 1, 0), BlockColor::Red)].into_iter().collect();
        assert_ne!(target_key(&a), target_key(&c));
    }
}
