//! Referring expressions for blocks: the last block placed, a block of a
//! unique color, or a block singled out by a superlative in the Builder's
//! frame ("the leftmost red block").

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::templates::pick;
use crate::geometry::{eye_point, perspective_delta, PoseBounds};
use crate::world::{BlockColor, BuilderPose, Cell, Structure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Superlative {
    Leftmost,
    Rightmost,
    Closest,
    Farthest,
    Topmost,
    Bottommost,
}

impl Superlative {
    pub const ALL: [Superlative; 6] = [
        Superlative::Leftmost,
        Superlative::Rightmost,
        Superlative::Closest,
        Superlative::Farthest,
        Superlative::Topmost,
        Superlative::Bottommost,
    ];

    pub fn word(&self) -> &'static str {
        match self {
            Superlative::Leftmost => "leftmost",
            Superlative::Rightmost => "rightmost",
            Superlative::Closest => "closest",
            Superlative::Farthest => "farthest",
            Superlative::Topmost => "topmost",
            Superlative::Bottommost => "bottommost",
        }
    }
}

/// How a reference block is named, in priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefTier {
    LastPlaced,
    UniqueColor,
    Superlative(Superlative),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockDescription {
    pub cell: Cell,
    pub color: BlockColor,
    pub tier: RefTier,
}

impl BlockDescription {
    pub fn noun_phrase<R: Rng + ?Sized>(&self, rng: &mut R) -> String {
        match self.tier {
            RefTier::LastPlaced => pick(rng, &["the last block you added", "the last block you placed", "the block you just placed"])
                .to_string(),
            RefTier::UniqueColor => {
                let noun = pick(rng, &["block", "one"]);
                format!("the {} {noun}", self.color)
            }
            RefTier::Superlative(s) => format!("the {} {} block", s.word(), self.color),
        }
    }
}

/// Scalar used to rank blocks for a superlative; larger wins.
fn rank(s: Superlative, cell: &Cell, pose: &BuilderPose, bounds: &PoseBounds) -> f64 {
    let feet = [pose.loc[0].round() as i32, pose.loc[1].round() as i32, pose.loc[2].round() as i32];
    let p = perspective_delta([cell.x - feet[0], cell.y - feet[1], cell.z - feet[2]], pose);
    let e = eye_point(pose, bounds);
    let d = ((cell.x as f64 - e[0]).powi(2) + (cell.y as f64 - e[1]).powi(2) + (cell.z as f64 - e[2]).powi(2)).sqrt();
    match s {
        Superlative::Leftmost => p[0] as f64,
        Superlative::Rightmost => -(p[0] as f64),
        Superlative::Topmost => p[1] as f64,
        Superlative::Bottommost => -(p[1] as f64),
        Superlative::Closest => -d,
        Superlative::Farthest => d,
    }
}

/// True when `cell` strictly wins `s` among `others`.
pub fn is_unique_extreme(s: Superlative, cell: &Cell, others: &[Cell], pose: &BuilderPose, bounds: &PoseBounds) -> bool {
    let mine = rank(s, cell, pose, bounds);
    others.iter().filter(|o| *o != cell).all(|o| rank(s, o, pose, bounds) < mine)
}

/// Names the block at `cell` by the highest applicable tier, or `None` when
/// no referring expression singles it out under `pose`.
pub fn describe_block<R: Rng + ?Sized>(
    rng: &mut R,
    cell: &Cell,
    world: &Structure,
    pose: &BuilderPose,
    bounds: &PoseBounds,
    last_placed: Option<Cell>,
) -> Option<BlockDescription> {
    let color = world.get(cell)?;
    if last_placed == Some(*cell) {
        return Some(BlockDescription { cell: *cell, color, tier: RefTier::LastPlaced });
    }
    let same: Vec<Cell> = world.iter().filter(|(_, c)| *c == color).map(|(c, _)| c).collect();
    if same.len() == 1 {
        return Some(BlockDescription { cell: *cell, color, tier: RefTier::UniqueColor });
    }
    let mut order = Superlative::ALL;
    order.shuffle(rng);
    order
        .into_iter()
        .find(|s| is_unique_extreme(*s, cell, &same, pose, bounds))
        .map(|s| BlockDescription { cell: *cell, color, tier: RefTier::Superlative(s) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(x: i32, y: i32, z: i32) -> Cell {
        Cell::new(x, y, z)
    }

    #[test]
    fn tiers_in_priority_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let world: Structure = [(c(0, 1, 0), BlockColor::Blue), (c(1, 1, 0), BlockColor::Red), (c(2, 1, 0), BlockColor::Red)]
            .into_iter()
            .collect();
        let pose = BuilderPose::new([0.0, 1.0, -5.0], 0.0, 0.0);
        let b = PoseBounds::default();
        let d = describe_block(&mut rng, &c(0, 1, 0), &world, &pose, &b, Some(c(0, 1, 0))).unwrap();
        assert_eq!(d.tier, RefTier::LastPlaced);
        let d = describe_block(&mut rng, &c(0, 1, 0), &world, &pose, &b, None).unwrap();
        assert_eq!(d.tier, RefTier::UniqueColor);
        // yaw 0: +x is the Builder's left, so (2,1,0) is the leftmost red block
        assert!(is_unique_extreme(Superlative::Leftmost, &c(2, 1, 0), &[c(1, 1, 0), c(2, 1, 0)], &pose, &b));
        let d = describe_block(&mut rng, &c(2, 1, 0), &world, &pose, &b, None).unwrap();
        assert!(matches!(d.tier, RefTier::Superlative(_)));
    }

    #[test]
    fn middle_of_a_row_is_not_describable() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let world: Structure = (0..3).map(|x| (c(x, 1, 0), BlockColor::Red)).collect();
        // looking along the row: the middle block is neither nearest nor farthest
        let pose = BuilderPose::new([-5.0, 1.0, 0.0], 90.0, 0.0);
        assert!(describe_block(&mut rng, &c(1, 1, 0), &world, &pose, &PoseBounds::default(), None).is_none());
    }
}
