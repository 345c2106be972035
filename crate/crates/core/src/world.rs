//! Voxel-grid world semantics.
//!
//! Blocks live in an 11×9×11 build region (`x, z ∈ [-5, 5]`, `y ∈ [1, 9]`,
//! ground at `y = 1`). A [`Structure`] maps occupied cells to one of six
//! colors. Placement feasibility uses face adjacency; structural
//! connectivity of targets uses face-or-edge sharing.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actions::{Action, ActionKind};

pub const X_MIN: i32 = -5;
pub const X_MAX: i32 = 5;
pub const Y_MIN: i32 = 1;
pub const Y_MAX: i32 = 9;
pub const Z_MIN: i32 = -5;
pub const Z_MAX: i32 = 5;
pub const GROUND_Y: i32 = Y_MIN;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorldError {
    #[error("cell {0} lies outside the build region")]
    OutOfRegion(Cell),
    #[error("action {action} is infeasible: {rule}")]
    Infeasible { action: Action, rule: FeasibilityRule },
    #[error("ground-block check is undefined for an empty structure")]
    EmptyStructure,
    #[error("action {index} of sequence failed: {source}")]
    Sequence {
        index: usize,
        #[source]
        source: Box<WorldError>,
    },
}

/// Which feasibility rule an action violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibilityRule {
    CellOccupied,
    NoSupport,
    CellEmpty,
    ColorMismatch,
}

impl fmt::Display for FeasibilityRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FeasibilityRule::CellOccupied => "target cell is already occupied",
            FeasibilityRule::NoSupport => "cell is neither on the ground nor adjacent to a block",
            FeasibilityRule::CellEmpty => "no block to remove at the cell",
            FeasibilityRule::ColorMismatch => "block at the cell has a different color",
        };
        f.write_str(s)
    }
}

/// An integer grid cell. `y` is vertical.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

impl Cell {
    pub const fn new(x: i32, y: i32, z: i32) -> Self {
        Cell { x, y, z }
    }

    pub fn in_region(&self) -> bool {
        (X_MIN..=X_MAX).contains(&self.x)
            && (Y_MIN..=Y_MAX).contains(&self.y)
            && (Z_MIN..=Z_MAX).contains(&self.z)
    }

    pub fn on_ground(&self) -> bool {
        self.y == GROUND_Y
    }

    pub fn offset(&self, dx: i32, dy: i32, dz: i32) -> Cell {
        Cell::new(self.x + dx, self.y + dy, self.z + dz)
    }

    pub fn delta(&self, other: &Cell) -> [i32; 3] {
        [other.x - self.x, other.y - self.y, other.z - self.z]
    }

    pub fn manhattan(&self, other: &Cell) -> i32 {
        (self.x - other.x).abs() + (self.y - other.y).abs() + (self.z - other.z).abs()
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [self.x as f64, self.y as f64, self.z as f64]
    }

    /// The six face neighbors (not filtered by region).
    pub fn face_neighbors(&self) -> [Cell; 6] {
        [
            self.offset(1, 0, 0),
            self.offset(-1, 0, 0),
            self.offset(0, 1, 0),
            self.offset(0, -1, 0),
            self.offset(0, 0, 1),
            self.offset(0, 0, -1),
        ]
    }

    /// The 18 cells sharing a face or an edge with this one (not filtered
    /// by region): 6 face neighbors followed by 12 edge-diagonals.
    pub fn connected_neighborhood(&self) -> Vec<Cell> {
        let mut out = Vec::with_capacity(18);
        out.extend_from_slice(&self.face_neighbors());
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let nonzero = (dx != 0) as u8 + (dy != 0) as u8 + (dz != 0) as u8;
                    if nonzero == 2 {
                        out.push(self.offset(dx, dy, dz));
                    }
                }
            }
        }
        out
    }

    /// Every in-region cell, in `(x, y, z)` order.
    pub fn region() -> impl Iterator<Item = Cell> {
        (X_MIN..=X_MAX).flat_map(|x| {
            (Y_MIN..=Y_MAX).flat_map(move |y| (Z_MIN..=Z_MAX).map(move |z| Cell::new(x, y, z)))
        })
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockColor {
    Red,
    Orange,
    Yellow,
    Green,
    Blue,
    Purple,
}

impl BlockColor {
    pub const ALL: [BlockColor; 6] = [
        BlockColor::Red,
        BlockColor::Orange,
        BlockColor::Yellow,
        BlockColor::Green,
        BlockColor::Blue,
        BlockColor::Purple,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BlockColor::Red => "red",
            BlockColor::Orange => "orange",
            BlockColor::Yellow => "yellow",
            BlockColor::Green => "green",
            BlockColor::Blue => "blue",
            BlockColor::Purple => "purple",
        }
    }
}

impl fmt::Display for BlockColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown block color `{0}`")]
pub struct UnknownColor(pub String);

impl FromStr for BlockColor {
    type Err = UnknownColor;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BlockColor::ALL
            .iter()
            .copied()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownColor(s.to_string()))
    }
}

/// One block as stored in files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub x: i32,
    pub y: i32,
    pub z: i32,
    pub color: BlockColor,
}

/// A built configuration: at most one colored block per in-region cell.
///
/// Serializes as a list of [`BlockRecord`]s in cell order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<BlockRecord>", try_from = "Vec<BlockRecord>")]
pub struct Structure {
    blocks: BTreeMap<Cell, BlockColor>,
}

impl Structure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_blocks<I>(blocks: I) -> Result<Self, WorldError>
    where
        I: IntoIterator<Item = (Cell, BlockColor)>,
    {
        let mut s = Structure::new();
        for (cell, color) in blocks {
            s.insert(cell, color)?;
        }
        Ok(s)
    }

    /// Inserts or overwrites a block. Does not check placement feasibility.
    pub fn insert(&mut self, cell: Cell, color: BlockColor) -> Result<Option<BlockColor>, WorldError> {
        if !cell.in_region() {
            return Err(WorldError::OutOfRegion(cell));
        }
        Ok(self.blocks.insert(cell, color))
    }

    pub fn remove(&mut self, cell: &Cell) -> Option<BlockColor> {
        self.blocks.remove(cell)
    }

    pub fn get(&self, cell: &Cell) -> Option<BlockColor> {
        self.blocks.get(cell).copied()
    }

    pub fn is_occupied(&self, cell: &Cell) -> bool {
        self.blocks.contains_key(cell)
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Cell, BlockColor)> + '_ {
        self.blocks.iter().map(|(c, col)| (*c, *col))
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.blocks.keys().copied()
    }

    pub fn count_color(&self, color: BlockColor) -> usize {
        self.blocks.values().filter(|c| **c == color).count()
    }

    /// True when `cell` is face-adjacent to an occupied cell.
    pub fn touches_block(&self, cell: &Cell) -> bool {
        cell.face_neighbors().iter().any(|n| self.is_occupied(n))
    }

    /// True when a block could be placed at `cell` right now.
    pub fn can_place_at(&self, cell: &Cell) -> bool {
        cell.in_region() && !self.is_occupied(cell) && (cell.on_ground() || self.touches_block(cell))
    }
}

impl From<Structure> for Vec<BlockRecord> {
    fn from(s: Structure) -> Self {
        s.iter()
            .map(|(c, color)| BlockRecord { x: c.x, y: c.y, z: c.z, color })
            .collect()
    }
}

impl TryFrom<Vec<BlockRecord>> for Structure {
    type Error = WorldError;

    fn try_from(records: Vec<BlockRecord>) -> Result<Self, Self::Error> {
        Structure::from_blocks(records.into_iter().map(|b| (Cell::new(b.x, b.y, b.z), b.color)))
    }
}

impl FromIterator<(Cell, BlockColor)> for Structure {
    /// Panics on out-of-region cells; use [`Structure::from_blocks`] for
    /// untrusted input.
    fn from_iter<T: IntoIterator<Item = (Cell, BlockColor)>>(iter: T) -> Self {
        Structure::from_blocks(iter).expect("cell outside build region")
    }
}

/// Builder location plus orientation. Angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BuilderPose {
    pub loc: [f64; 3],
    pub yaw: f64,
    pub pitch: f64,
}

impl BuilderPose {
    pub fn new(loc: [f64; 3], yaw: f64, pitch: f64) -> Self {
        BuilderPose { loc, yaw, pitch }
    }

    pub fn angles_valid(&self) -> bool {
        (-180.0..=180.0).contains(&self.yaw) && (-90.0..=90.0).contains(&self.pitch)
    }
}

/// How [`apply_sequence`] treats infeasible actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApplyMode {
    /// Every action must be feasible; the first failure aborts.
    Strict,
    /// Placements go into any empty in-region cell (occupied targets are
    /// ignored); removals delete whatever occupies the cell, no-op if empty.
    Relaxed,
}

pub fn is_adjacent(a: &Cell, b: &Cell) -> bool {
    let d = a.delta(b);
    d.iter().map(|v| v.abs()).sum::<i32>() == 1
}

fn check_feasible(action: &Action, s: &Structure) -> Result<Result<(), FeasibilityRule>, WorldError> {
    if !action.cell.in_region() {
        return Err(WorldError::OutOfRegion(action.cell));
    }
    Ok(match action.kind {
        ActionKind::Place => {
            if s.is_occupied(&action.cell) {
                Err(FeasibilityRule::CellOccupied)
            } else if !(action.cell.on_ground() || s.touches_block(&action.cell)) {
                Err(FeasibilityRule::NoSupport)
            } else {
                Ok(())
            }
        }
        ActionKind::Remove => match s.get(&action.cell) {
            None => Err(FeasibilityRule::CellEmpty),
            Some(c) if c != action.color => Err(FeasibilityRule::ColorMismatch),
            Some(_) => Ok(()),
        },
    })
}

pub fn is_feasible(action: &Action, s: &Structure) -> Result<bool, WorldError> {
    Ok(check_feasible(action, s)?.is_ok())
}

pub fn apply_action(s: &Structure, action: &Action) -> Result<Structure, WorldError> {
    let mut next = s.clone();
    apply_in_place(&mut next, action)?;
    Ok(next)
}

pub(crate) fn apply_in_place(s: &mut Structure, action: &Action) -> Result<(), WorldError> {
    if let Err(rule) = check_feasible(action, s)? {
        return Err(WorldError::Infeasible { action: *action, rule });
    }
    match action.kind {
        ActionKind::Place => {
            s.blocks.insert(action.cell, action.color);
        }
        ActionKind::Remove => {
            s.blocks.remove(&action.cell);
        }
    }
    Ok(())
}

fn apply_relaxed(s: &mut Structure, action: &Action) -> Result<(), WorldError> {
    if !action.cell.in_region() {
        return Err(WorldError::OutOfRegion(action.cell));
    }
    match action.kind {
        ActionKind::Place => {
            s.blocks.entry(action.cell).or_insert(action.color);
        }
        ActionKind::Remove => {
            s.blocks.remove(&action.cell);
        }
    }
    Ok(())
}

pub fn apply_sequence(s: &Structure, seq: &[Action], mode: ApplyMode) -> Result<Structure, WorldError> {
    let mut cur = s.clone();
    for (index, action) in seq.iter().enumerate() {
        let res = match mode {
            ApplyMode::Strict => apply_in_place(&mut cur, action),
            ApplyMode::Relaxed => apply_relaxed(&mut cur, action),
        };
        res.map_err(|e| WorldError::Sequence { index, source: Box::new(e) })?;
    }
    Ok(cur)
}

/// Face-or-edge sharing (26-neighborhood minus the 8 corners).
pub fn shares_face_or_edge(a: &Cell, b: &Cell) -> bool {
    let d = a.delta(b);
    let cheb = d.iter().map(|v| v.abs()).max().unwrap_or(0);
    let nonzero = d.iter().filter(|v| **v != 0).count();
    cheb == 1 && nonzero <= 2
}

/// Every block shares a face or an edge with at least one other block.
pub fn is_connected(s: &Structure) -> bool {
    if s.len() <= 1 {
        return true;
    }
    s.cells().all(|c| {
        c.connected_neighborhood()
            .iter()
            .any(|n| s.is_occupied(n))
    })
}

/// Groups `cells` into components under face-or-edge sharing.
pub fn connected_components(cells: &BTreeSet<Cell>) -> Vec<BTreeSet<Cell>> {
    let mut seen: BTreeSet<Cell> = BTreeSet::new();
    let mut out = Vec::new();
    for &start in cells {
        if seen.contains(&start) {
            continue;
        }
        let mut comp = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        while let Some(c) = queue.pop_front() {
            comp.insert(c);
            for n in c.connected_neighborhood() {
                if cells.contains(&n) && seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        out.push(comp);
    }
    out
}

pub fn has_ground_block(s: &Structure) -> Result<bool, WorldError> {
    if s.is_empty() {
        return Err(WorldError::EmptyStructure);
    }
    Ok(s.cells().any(|c| c.on_ground()))
}
