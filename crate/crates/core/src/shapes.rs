//! Elementary shapes and the composite target generator.
//!
//! Every shape is a set of lattice points `(i, j)` mapped to cells as
//! `anchor + i·primary + j·secondary`, where `primary` and `secondary` are
//! perpendicular unit directions.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::world::{connected_components, BlockColor, Cell, Structure, X_MAX, X_MIN, Y_MAX, Y_MIN, Z_MAX, Z_MIN};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("{kind} size {sizes:?} is below the minimum for its kind")]
    Size { kind: ShapeKind, sizes: (u32, u32) },
    #[error("{kind} directions must be perpendicular")]
    Orientation { kind: ShapeKind },
    #[error("shape cell {0} falls outside the build region")]
    OutOfRegion(Cell),
    #[error("no valid target found in {0} attempts")]
    Budget(usize),
    #[error("invalid target configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Row,
    Diagonal,
    TShape,
    LShape,
    UShape,
    Plane,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 6] = [
        ShapeKind::Row,
        ShapeKind::Diagonal,
        ShapeKind::TShape,
        ShapeKind::LShape,
        ShapeKind::UShape,
        ShapeKind::Plane,
    ];
}

impl fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ShapeKind::Row => "row",
            ShapeKind::Diagonal => "diagonal",
            ShapeKind::TShape => "T-shape",
            ShapeKind::LShape => "L-shape",
            ShapeKind::UShape => "U-shape",
            ShapeKind::Plane => "plane",
        };
        f.write_str(s)
    }
}

/// One of the six signed axis directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    PosX,
    NegX,
    PosY,
    NegY,
    PosZ,
    NegZ,
}

impl Direction {
    pub const ALL: [Direction; 6] = [
        Direction::PosX,
        Direction::NegX,
        Direction::PosY,
        Direction::NegY,
        Direction::PosZ,
        Direction::NegZ,
    ];

    pub fn vector(&self) -> [i32; 3] {
        match self {
            Direction::PosX => [1, 0, 0],
            Direction::NegX => [-1, 0, 0],
            Direction::PosY => [0, 1, 0],
            Direction::NegY => [0, -1, 0],
            Direction::PosZ => [0, 0, 1],
            Direction::NegZ => [0, 0, -1],
        }
    }

    fn axis(&self) -> usize {
        self.vector().iter().position(|v| *v != 0).expect("unit vector")
    }

    pub fn is_vertical(&self) -> bool {
        self.axis() == 1
    }

    pub fn perpendicular_to(&self, other: &Direction) -> bool {
        self.axis() != other.axis()
    }
}

/// A sized, oriented, colored shape at a location.
///
/// Meaning of `sizes = (a, b)` per kind:
/// * Row, Diagonal: `a` blocks (`b` unused).
/// * Plane: `a` along `primary` by `b` along `secondary`.
/// * L: arms of `a` (along `primary`) and `b` (along `secondary`) sharing the corner at the anchor.
/// * T: a bar of odd length `b` along `secondary` centered on the anchor and a
///   stem of `a` blocks (junction included) along `primary`.
/// * U: a base of `a` along `primary` from the anchor, plus two sides of `b`
///   blocks along `secondary` rising from the base's end blocks (base cells excluded).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShapeInstance {
    pub kind: ShapeKind,
    pub color: BlockColor,
    pub anchor: Cell,
    pub primary: Direction,
    pub secondary: Direction,
    pub sizes: (u32, u32),
}

fn min_sizes_ok(kind: ShapeKind, (a, b): (u32, u32)) -> bool {
    match kind {
        ShapeKind::Row | ShapeKind::Diagonal => a >= 3,
        ShapeKind::Plane => a.min(b) >= 2 && a.max(b) >= 3,
        ShapeKind::LShape => a >= 2 && b >= 2,
        ShapeKind::TShape => a >= 3 && b >= 3 && b % 2 == 1,
        ShapeKind::UShape => a >= 3 && b >= 2,
    }
}

impl ShapeInstance {
    pub fn validate(&self) -> Result<(), ShapeError> {
        if !min_sizes_ok(self.kind, self.sizes) {
            return Err(ShapeError::Size { kind: self.kind, sizes: self.sizes });
        }
        if !self.primary.perpendicular_to(&self.secondary) {
            return Err(ShapeError::Orientation { kind: self.kind });
        }
        Ok(())
    }

    /// Lattice points `(i, j)` of the shape, in a fixed order.
    pub fn lattice(&self) -> Vec<(i32, i32)> {
        let (a, b) = (self.sizes.0 as i32, self.sizes.1 as i32);
        match self.kind {
            ShapeKind::Row => (0..a).map(|i| (i, 0)).collect(),
            ShapeKind::Diagonal => (0..a).map(|i| (i, i)).collect(),
            ShapeKind::Plane => (0..a).flat_map(|i| (0..b).map(move |j| (i, j))).collect(),
            ShapeKind::LShape => (0..a).map(|i| (i, 0)).chain((1..b).map(|j| (0, j))).collect(),
            ShapeKind::TShape => {
                let h = (b - 1) / 2;
                (-h..=h).map(|j| (0, j)).chain((1..a).map(|i| (i, 0))).collect()
            }
            ShapeKind::UShape => (0..a)
                .map(|i| (i, 0))
                .chain((1..=b).map(|j| (0, j)))
                .chain((1..=b).map(move |j| (a - 1, j)))
                .collect(),
        }
    }

    pub fn cell_at(&self, (i, j): (i32, i32)) -> Cell {
        let p = self.primary.vector();
        let s = self.secondary.vector();
        self.anchor.offset(i * p[0] + j * s[0], i * p[1] + j * s[1], i * p[2] + j * s[2])
    }

    pub fn block_count(&self) -> usize {
        self.lattice().len()
    }

    /// The same shape moved so that its anchor is `anchor`.
    pub fn moved_to(&self, anchor: Cell) -> ShapeInstance {
        ShapeInstance { anchor, ..*self }
    }
}

/// The cells of a shape.
pub fn materialize(shape: &ShapeInstance) -> Result<BTreeSet<Cell>, ShapeError> {
    shape.validate()?;
    let mut out = BTreeSet::new();
    for ij in shape.lattice() {
        let c = shape.cell_at(ij);
        if !c.in_region() {
            return Err(ShapeError::OutOfRegion(c));
        }
        out.insert(c);
    }
    Ok(out)
}

/// Shapes plus their merged block set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetStructure {
    pub shapes: Vec<ShapeInstance>,
    pub merged: Structure,
}

impl TargetStructure {
    /// Merges shapes in order; errors on out-of-region cells. Overlaps are
    /// reported by [`validate_target`], not here.
    pub fn from_shapes(shapes: Vec<ShapeInstance>) -> Result<Self, ShapeError> {
        let mut merged = Structure::new();
        for s in &shapes {
            for c in materialize(s)? {
                merged.insert(c, s.color).map_err(|_| ShapeError::OutOfRegion(c))?;
            }
        }
        Ok(TargetStructure { shapes, merged })
    }

    /// A target without a shape decomposition.
    pub fn from_structure(merged: Structure) -> Self {
        TargetStructure { shapes: Vec::new(), merged }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetViolation {
    Empty,
    Disconnected { components: usize },
    NoGroundBlock,
    ShapeOverlap(Cell),
    InvalidShape(ShapeError),
    MergeMismatch,
}

impl fmt::Display for TargetViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetViolation::Empty => f.write_str("empty structure"),
            TargetViolation::Disconnected { components } => write!(f, "disconnected ({components} components)"),
            TargetViolation::NoGroundBlock => f.write_str("no ground block"),
            TargetViolation::ShapeOverlap(c) => write!(f, "two shapes claim {c}"),
            TargetViolation::InvalidShape(e) => write!(f, "invalid shape: {e}"),
            TargetViolation::MergeMismatch => f.write_str("merged blocks differ from the shapes"),
        }
    }
}

/// Named violations of the target invariants; empty when valid.
///
/// Connectivity is checked globally: the blocks must form one component
/// under face-or-edge sharing.
pub fn validate_target(t: &TargetStructure) -> Vec<TargetViolation> {
    let mut out = Vec::new();
    if t.merged.is_empty() {
        out.push(TargetViolation::Empty);
        return out;
    }
    let cells: BTreeSet<Cell> = t.merged.cells().collect();
    let components = connected_components(&cells).len();
    if components > 1 {
        out.push(TargetViolation::Disconnected { components });
    }
    if !t.merged.cells().any(|c| c.on_ground()) {
        out.push(TargetViolation::NoGroundBlock);
    }
    if !t.shapes.is_empty() {
        let mut claimed = Structure::new();
        let mut ok = true;
        for s in &t.shapes {
            match materialize(s) {
                Ok(cells) => {
                    for c in cells {
                        if claimed.is_occupied(&c) {
                            out.push(TargetViolation::ShapeOverlap(c));
                            ok = false;
                        }
                        let _ = claimed.insert(c, s.color);
                    }
                }
                Err(e) => {
                    out.push(TargetViolation::InvalidShape(e));
                    ok = false;
                }
            }
        }
        if ok && claimed != t.merged {
            out.push(TargetViolation::MergeMismatch);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TargetConfig {
    pub kinds: Vec<ShapeKind>,
    pub count: usize,
    /// Largest value drawn for any size parameter.
    pub max_size: u32,
    pub colors: Vec<BlockColor>,
    pub max_attempts: usize,
}

impl Default for TargetConfig {
    fn default() -> Self {
        TargetConfig {
            kinds: ShapeKind::ALL.to_vec(),
            count: 3,
            max_size: 5,
            colors: BlockColor::ALL.to_vec(),
            max_attempts: 1000,
        }
    }
}

impl TargetConfig {
    /// Three shapes of any kind.
    pub fn blocks_regime() -> Self {
        TargetConfig::default()
    }

    /// Two shapes among rows, diagonals and planes.
    pub fn shapes_regime() -> Self {
        TargetConfig {
            kinds: vec![ShapeKind::Row, ShapeKind::Diagonal, ShapeKind::Plane],
            count: 2,
            ..TargetConfig::default()
        }
    }
}

fn random_sizes<R: Rng + ?Sized>(rng: &mut R, kind: ShapeKind, max: u32) -> (u32, u32) {
    match kind {
        ShapeKind::Row | ShapeKind::Diagonal => (rng.random_range(3..=max), 0),
        ShapeKind::Plane => loop {
            let s = (rng.random_range(2..=max), rng.random_range(2..=max));
            if s.0.max(s.1) >= 3 {
                break s;
            }
        },
        ShapeKind::LShape => (rng.random_range(2..=max), rng.random_range(2..=max)),
        ShapeKind::TShape => {
            let odd: Vec<u32> = (3..=max).filter(|b| b % 2 == 1).collect();
            (rng.random_range(3..=max), *odd.choose(rng).expect("max_size >= 3"))
        }
        ShapeKind::UShape => (rng.random_range(3..=max), rng.random_range(2..=max)),
    }
}

fn random_shape<R: Rng + ?Sized>(rng: &mut R, cfg: &TargetConfig) -> ShapeInstance {
    let kind = *cfg.kinds.choose(rng).expect("non-empty kinds");
    let color = *cfg.colors.choose(rng).expect("non-empty colors");
    let primary = *Direction::ALL.choose(rng).expect("six directions");
    let perpendicular: Vec<Direction> = Direction::ALL.into_iter().filter(|d| d.perpendicular_to(&primary)).collect();
    let secondary = *perpendicular.choose(rng).expect("four perpendicular directions");
    ShapeInstance {
        kind,
        color,
        anchor: Cell::new(0, 0, 0),
        primary,
        secondary,
        sizes: random_sizes(rng, kind, cfg.max_size),
    }
}

/// Places the first shape on the ground at a random horizontal position.
fn place_grounded<R: Rng + ?Sized>(rng: &mut R, shape: &ShapeInstance) -> Option<ShapeInstance> {
    let rel: Vec<Cell> = shape.lattice().into_iter().map(|ij| shape.cell_at(ij)).collect();
    let (mut x0, mut x1, mut y0, mut y1, mut z0, mut z1) = (i32::MAX, i32::MIN, i32::MAX, i32::MIN, i32::MAX, i32::MIN);
    for c in &rel {
        (x0, x1) = (x0.min(c.x), x1.max(c.x));
        (y0, y1) = (y0.min(c.y), y1.max(c.y));
        (z0, z1) = (z0.min(c.z), z1.max(c.z));
    }
    let dy = Y_MIN - y0;
    if y1 + dy > Y_MAX || x1 - x0 > X_MAX - X_MIN || z1 - z0 > Z_MAX - Z_MIN {
        return None;
    }
    let dx = rng.random_range(X_MIN - x0..=X_MAX - x1);
    let dz = rng.random_range(Z_MIN - z0..=Z_MAX - z1);
    Some(shape.moved_to(Cell::new(dx, dy, dz)))
}

/// Attaches a shape so that one of its cells lands next to (face or edge)
/// an existing block, without overlapping it.
fn place_attached<R: Rng + ?Sized>(rng: &mut R, shape: &ShapeInstance, existing: &Structure) -> Option<ShapeInstance> {
    let existing_cells: Vec<Cell> = existing.cells().collect();
    let lattice = shape.lattice();
    for _ in 0..40 {
        let host = existing_cells.choose(rng)?;
        let slot = *host.connected_neighborhood().choose(rng)?;
        if !slot.in_region() || existing.is_occupied(&slot) {
            continue;
        }
        let pivot = shape.moved_to(Cell::new(0, 0, 0)).cell_at(*lattice.choose(rng)?);
        let moved = shape.moved_to(slot.offset(-pivot.x, -pivot.y, -pivot.z));
        let fits = lattice.iter().all(|ij| {
            let c = moved.cell_at(*ij);
            c.in_region() && !existing.is_occupied(&c)
        });
        if fits {
            return Some(moved);
        }
    }
    None
}

/// Draws shapes until their merge is a valid target.
pub fn generate_target<R: Rng + ?Sized>(rng: &mut R, cfg: &TargetConfig) -> Result<TargetStructure, ShapeError> {
    if cfg.kinds.is_empty() || cfg.colors.is_empty() || cfg.count == 0 {
        return Err(ShapeError::Config("kinds, colors and count must be non-empty".into()));
    }
    if cfg.max_size < 3 {
        return Err(ShapeError::Config("max_size must be at least 3".into()));
    }
    for _ in 0..cfg.max_attempts {
        let mut shapes = Vec::with_capacity(cfg.count);
        let mut merged = Structure::new();
        for k in 0..cfg.count {
            let proto = random_shape(rng, cfg);
            let placed = if k == 0 { place_grounded(rng, &proto) } else { place_attached(rng, &proto, &merged) };
            let Some(shape) = placed else { break };
            for ij in shape.lattice() {
                merged
                    .insert(shape.cell_at(ij), shape.color)
                    .expect("placement keeps cells in region");
            }
            shapes.push(shape);
        }
        if shapes.len() != cfg.count {
            continue;
        }
        let t = TargetStructure { shapes, merged };
        if validate_target(&t).is_empty() {
            return Ok(t);
        }
    }
    Err(ShapeError::Budget(cfg.max_attempts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(x: i32, y: i32, z: i32) -> Cell {
        Cell::new(x, y, z)
    }

    fn shape(kind: ShapeKind, sizes: (u32, u32), primary: Direction, secondary: Direction) -> ShapeInstance {
        ShapeInstance { kind, color: BlockColor::Red, anchor: c(0, 1, 0), primary, secondary, sizes }
    }

    #[test]
    fn row_cells() {
        let s = shape(ShapeKind::Row, (3, 0), Direction::PosX, Direction::PosZ);
        assert_eq!(materialize(&s).unwrap(), BTreeSet::from([c(0, 1, 0), c(1, 1, 0), c(2, 1, 0)]));
    }

    #[test]
    fn vertical_u_has_seven_cells() {
        let s = shape(ShapeKind::UShape, (3, 2), Direction::PosX, Direction::PosY);
        let cells = materialize(&s).unwrap();
        assert_eq!(cells.len(), 7);
        assert!(cells.contains(&c(0, 3, 0)) && cells.contains(&c(2, 3, 0)));
        assert!(!cells.contains(&c(1, 2, 0)));
    }

    #[test]
    fn horizontal_plane_is_flat() {
        let s = shape(ShapeKind::Plane, (3, 2), Direction::PosX, Direction::PosZ);
        let cells = materialize(&s).unwrap();
        assert_eq!(cells.len(), 6);
        assert!(cells.iter().all(|c| c.y == 1));
    }

    #[test]
    fn size_minima_and_errors() {
        assert!(materialize(&shape(ShapeKind::Row, (2, 0), Direction::PosX, Direction::PosZ)).is_err());
        assert!(materialize(&shape(ShapeKind::TShape, (3, 4), Direction::PosX, Direction::PosZ)).is_err());
        assert!(materialize(&shape(ShapeKind::Plane, (2, 2), Direction::PosX, Direction::PosZ)).is_err());
        assert!(materialize(&shape(ShapeKind::Row, (3, 0), Direction::PosX, Direction::NegX)).is_err());
        let long = shape(ShapeKind::Row, (9, 0), Direction::PosX, Direction::PosZ).moved_to(c(0, 1, 0));
        assert!(matches!(materialize(&long), Err(ShapeError::OutOfRegion(_))));
    }

    #[test]
    fn cell_count_formulas() {
        for a in 1..=6u32 {
            for b in 0..=6u32 {
                for kind in ShapeKind::ALL {
                    let s = ShapeInstance {
                        kind,
                        color: BlockColor::Blue,
                        anchor: c(-2, 3, -2),
                        primary: Direction::PosX,
                        secondary: Direction::PosZ,
                        sizes: (a, b),
                    };
                    let Ok(cells) = materialize(&s) else { continue };
                    let (a, b) = (a as usize, b as usize);
                    let expected = match kind {
                        ShapeKind::Row | ShapeKind::Diagonal => a,
                        ShapeKind::Plane => a * b,
                        ShapeKind::LShape | ShapeKind::TShape => a + b - 1,
                        ShapeKind::UShape => a + 2 * b,
                    };
                    assert_eq!(cells.len(), expected, "{kind} {a}x{b}");
                }
            }
        }
    }

    #[test]
    fn validation_examples() {
        let single = TargetStructure::from_structure([(c(0, 1, 0), BlockColor::Red)].into_iter().collect());
        assert!(validate_target(&single).is_empty());
        let far = TargetStructure::from_shapes(vec![
            shape(ShapeKind::Row, (3, 0), Direction::PosX, Direction::PosZ).moved_to(c(-5, 1, -5)),
            shape(ShapeKind::Row, (3, 0), Direction::PosX, Direction::PosZ).moved_to(c(2, 1, 4)),
        ])
        .unwrap();
        assert_eq!(validate_target(&far), vec![TargetViolation::Disconnected { components: 2 }]);
        let floating = TargetStructure::from_structure([(c(0, 3, 0), BlockColor::Red)].into_iter().collect());
        assert_eq!(validate_target(&floating), vec![TargetViolation::NoGroundBlock]);
    }

    #[test]
    fn generated_targets_are_valid_and_deterministic() {
        for cfg in [TargetConfig::blocks_regime(), TargetConfig::shapes_regime()] {
            for seed in 0..200 {
                let t = generate_target(&mut ChaCha8Rng::seed_from_u64(seed), &cfg).unwrap();
                assert_eq!(t.shapes.len(), cfg.count);
                assert!(validate_target(&t).is_empty());
                let again = generate_target(&mut ChaCha8Rng::seed_from_u64(seed), &cfg).unwrap();
                assert_eq!(t, again);
            }
        }
    }

    #[test]
    fn target_round_trips_through_json() {
        let t = generate_target(&mut ChaCha8Rng::seed_from_u64(5), &TargetConfig::default()).unwrap();
        let text = serde_json::to_string(&t).unwrap();
        let back: TargetStructure = serde_json::from_str(&text).unwrap();
        assert_eq!(t, back);
    }
}
