//! Evaluation metrics: strict F1, alignment-aware fairer F1, the auxiliary
//! Type/Color/Location/Shape scores and micro-averaged reports.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actions::{net_actions, Action, ActionKind, ActionSequence, NetActionSet};
use crate::world::{apply_sequence, ApplyMode, BlockColor, Cell, Structure, WorldError, X_MAX, X_MIN, Z_MAX, Z_MIN};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("alignment search is undefined for an empty structure")]
    EmptyStructure,
    #[error("cannot build a report from zero items")]
    NoItems,
    #[error(transparent)]
    World(#[from] WorldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoardKind {
    #[serde(rename = "EB")]
    Empty,
    #[serde(rename = "NEB")]
    NonEmpty,
}

impl BoardKind {
    pub fn of(before: &Structure) -> Self {
        if before.is_empty() {
            BoardKind::Empty
        } else {
            BoardKind::NonEmpty
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            BoardKind::Empty => "EB",
            BoardKind::NonEmpty => "NEB",
        }
    }
}

/// One scored unit: the board before the turn, the reference and predicted
/// sequences, and whether the item admits several correct placements.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalItem {
    pub before: Structure,
    pub reference: ActionSequence,
    pub predicted: ActionSequence,
    pub board: BoardKind,
    pub multi_interp: bool,
}

impl EvalItem {
    pub fn new(before: Structure, reference: ActionSequence, predicted: ActionSequence, multi_interp: bool) -> Self {
        let board = BoardKind::of(&before);
        EvalItem { before, reference, predicted, board, multi_interp }
    }
}

/// Counts behind a precision/recall/F1 triple. Counts add under micro
/// averaging.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prf {
    pub tp: usize,
    pub pred_size: usize,
    pub ref_size: usize,
}

impl Prf {
    pub fn new(tp: usize, pred_size: usize, ref_size: usize) -> Self {
        Prf { tp, pred_size, ref_size }
    }

    fn degenerate(&self) -> Option<f64> {
        match (self.pred_size, self.ref_size) {
            (0, 0) => Some(1.0),
            (0, _) | (_, 0) => Some(0.0),
            _ => None,
        }
    }

    pub fn precision(&self) -> f64 {
        self.degenerate().unwrap_or(self.tp as f64 / self.pred_size as f64)
    }

    pub fn recall(&self) -> f64 {
        self.degenerate().unwrap_or(self.tp as f64 / self.ref_size as f64)
    }

    pub fn f1(&self) -> f64 {
        self.degenerate()
            .unwrap_or(2.0 * self.tp as f64 / (self.pred_size + self.ref_size) as f64)
    }
}

impl std::ops::Add for Prf {
    type Output = Prf;

    fn add(self, o: Prf) -> Prf {
        Prf::new(self.tp + o.tp, self.pred_size + o.pred_size, self.ref_size + o.ref_size)
    }
}

impl std::ops::AddAssign for Prf {
    fn add_assign(&mut self, o: Prf) {
        *self = *self + o;
    }
}

pub fn strict_prf(pred: &NetActionSet, reference: &NetActionSet) -> Prf {
    Prf::new(pred.intersection_count(reference), pred.len(), reference.len())
}

/// Horizontal translation followed by a quarter-turn rotation about the
/// vertical axis through `x = 0, z = 0`; one turn maps `(x, z)` to `(z, -x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Alignment {
    pub rotation: u8,
    pub dx: i32,
    pub dz: i32,
}

impl Alignment {
    pub const IDENTITY: Alignment = Alignment { rotation: 0, dx: 0, dz: 0 };

    pub fn apply(&self, c: Cell) -> Cell {
        let (mut x, mut z) = (c.x + self.dx, c.z + self.dz);
        for _ in 0..self.rotation % 4 {
            (x, z) = (z, -x);
        }
        Cell::new(x, c.y, z)
    }

    pub fn apply_structure(&self, s: &Structure) -> Structure {
        s.iter().map(|(c, col)| (self.apply(c), col)).collect()
    }

    pub fn apply_net(&self, net: &NetActionSet) -> NetActionSet {
        net.map_cells(|c| self.apply(c))
    }
}

fn rotate_inverse(c: Cell, rotation: u8) -> Cell {
    let (mut x, mut z) = (c.x, c.z);
    for _ in 0..rotation % 4 {
        (x, z) = (-z, x);
    }
    Cell::new(x, c.y, z)
}

fn translation_ranges<'a>(cells: impl Iterator<Item = &'a Cell>) -> Option<((i32, i32), (i32, i32))> {
    let mut bounds: Option<(i32, i32, i32, i32)> = None;
    for c in cells {
        bounds = Some(match bounds {
            None => (c.x, c.x, c.z, c.z),
            Some((x0, x1, z0, z1)) => (x0.min(c.x), x1.max(c.x), z0.min(c.z), z1.max(c.z)),
        });
    }
    bounds.map(|(x0, x1, z0, z1)| ((X_MIN - x0, X_MAX - x1), (Z_MIN - z0, Z_MAX - z1)))
}

fn alignments_for(cells: &[Cell]) -> Vec<Alignment> {
    let Some(((dx0, dx1), (dz0, dz1))) = translation_ranges(cells.iter()) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for rotation in 0..4u8 {
        for dx in dx0..=dx1 {
            for dz in dz0..=dz1 {
                out.push(Alignment { rotation, dx, dz });
            }
        }
    }
    out
}

/// All alignments keeping `s` inside the build region, ordered by
/// `(rotation, dx, dz)`.
pub fn enumerate_alignments(s: &Structure) -> Result<Vec<Alignment>, MetricsError> {
    if s.is_empty() {
        return Err(MetricsError::EmptyStructure);
    }
    Ok(alignments_for(&s.cells().collect::<Vec<_>>()))
}

fn same_color_matches(pred: &Structure, reference: &HashMap<Cell, BlockColor>, a: &Alignment) -> usize {
    pred.iter()
        .filter(|(c, col)| reference.get(&a.apply(*c)) == Some(col))
        .count()
}

/// The alignment minimizing `Δ(aligned pred, ref)`, with remaining ties
/// broken by `tie_score` (higher wins) and then by `(rotation, dx, dz)`.
fn best_structure_alignment(
    pred: &Structure,
    reference: &Structure,
    mut tie_score: impl FnMut(&Alignment) -> usize,
) -> Alignment {
    if pred.is_empty() {
        return Alignment::IDENTITY;
    }
    let ref_map: HashMap<Cell, BlockColor> = reference.iter().collect();
    // Δ = |pred| + |ref| - 2 * matches, so minimizing Δ maximizes matches.
    let mut best: Option<(usize, Vec<Alignment>)> = None;
    for a in alignments_for(&pred.cells().collect::<Vec<_>>()) {
        let m = same_color_matches(pred, &ref_map, &a);
        match &mut best {
            Some((bm, list)) if m == *bm => list.push(a),
            Some((bm, _)) if m < *bm => {}
            _ => best = Some((m, vec![a])),
        }
    }
    let (_, tied) = best.expect("identity alignment is always valid for in-region cells");
    if tied.len() == 1 {
        return tied[0];
    }
    let mut winner = tied[0];
    let mut winner_score = tie_score(&winner);
    for a in &tied[1..] {
        let s = tie_score(a);
        if s > winner_score {
            winner = *a;
            winner_score = s;
        }
    }
    winner
}

/// Alignment of `pred` minimizing the distance to `reference`. Ties go to
/// the smallest `(rotation, dx, dz)`; an empty `pred` yields the identity.
pub fn optimal_alignment(pred: &Structure, reference: &Structure) -> Alignment {
    best_structure_alignment(pred, reference, |_| 0)
}

/// Net sets and final structures of an item, computed under relaxed replay.
#[derive(Debug, Clone)]
pub struct ItemNets {
    pub reference: NetActionSet,
    pub predicted: NetActionSet,
    pub ref_after: Structure,
    pub pred_after: Structure,
}

impl ItemNets {
    pub fn of(item: &EvalItem) -> Result<Self, MetricsError> {
        let ref_after = apply_sequence(&item.before, &item.reference, ApplyMode::Relaxed)?;
        let pred_after = apply_sequence(&item.before, &item.predicted, ApplyMode::Relaxed)?;
        Ok(ItemNets {
            reference: net_actions(&item.before, &item.reference)?,
            predicted: net_actions(&item.before, &item.predicted)?,
            ref_after,
            pred_after,
        })
    }

    /// The predicted net set as compared by the fair metrics: aligned onto
    /// the reference for multi-interpretation items, untouched otherwise.
    pub fn fair_prediction(&self, multi_interp: bool) -> NetActionSet {
        if !multi_interp {
            return self.predicted.clone();
        }
        let a = best_structure_alignment(&self.pred_after, &self.ref_after, |a| {
            a.apply_net(&self.predicted).intersection_count(&self.reference)
        });
        a.apply_net(&self.predicted)
    }
}

pub fn fairer_prf(item: &EvalItem) -> Result<Prf, MetricsError> {
    let nets = ItemNets::of(item)?;
    Ok(strict_prf(&nets.fair_prediction(item.multi_interp), &nets.reference))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dimension {
    Type,
    Color,
    Location,
}

/// Projection key of one net action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProjectedKey {
    Type(ActionKind),
    Color(ActionKind, BlockColor),
    Location(Cell),
}

fn key(a: &Action, dim: Dimension) -> ProjectedKey {
    match dim {
        Dimension::Type => ProjectedKey::Type(a.kind),
        Dimension::Color => ProjectedKey::Color(a.kind, a.color),
        Dimension::Location => ProjectedKey::Location(a.cell),
    }
}

/// Multiset (key → multiplicity) of a net set along one dimension.
pub fn project(net: &NetActionSet, dim: Dimension) -> BTreeMap<ProjectedKey, usize> {
    let mut out = BTreeMap::new();
    for a in net {
        *out.entry(key(a, dim)).or_insert(0) += 1;
    }
    out
}

fn multiset_intersection(a: &BTreeMap<ProjectedKey, usize>, b: &BTreeMap<ProjectedKey, usize>) -> usize {
    a.iter().map(|(k, n)| (*n).min(b.get(k).copied().unwrap_or(0))).sum()
}

/// Multiset-intersection PRF along one dimension, on already-aligned sets.
pub fn auxiliary_prf(pred: &NetActionSet, reference: &NetActionSet, dim: Dimension) -> Prf {
    let tp = multiset_intersection(&project(pred, dim), &project(reference, dim));
    Prf::new(tp, pred.len(), reference.len())
}

fn net_cells(net: &NetActionSet) -> Vec<Cell> {
    let mut cells: Vec<Cell> = net.iter().map(|a| a.cell).collect();
    cells.dedup();
    cells
}

/// Shape PRF by trying every alignment of the predicted cells.
pub fn shape_prf_exhaustive(pred: &NetActionSet, reference: &NetActionSet) -> Prf {
    let best = alignments_for(&net_cells(pred))
        .iter()
        .map(|a| a.apply_net(pred).intersection_count(reference))
        .max()
        .unwrap_or(0);
    Prf::new(best, pred.len(), reference.len())
}

/// Shape PRF: strict intersection maximized over alignments of the
/// predicted net set.
///
/// Only alignments carrying some predicted action onto a reference action
/// of the same kind and color can score above zero, so each such pair votes
/// for the one alignment (per rotation) it implies and the best vote count
/// is the answer.
pub fn shape_prf(pred: &NetActionSet, reference: &NetActionSet) -> Prf {
    let Some(((dx0, dx1), (dz0, dz1))) = translation_ranges(net_cells(pred).iter()) else {
        return Prf::new(0, 0, reference.len());
    };
    let mut by_kind: HashMap<(ActionKind, BlockColor, i32), Vec<Cell>> = HashMap::new();
    for b in reference {
        by_kind.entry((b.kind, b.color, b.cell.y)).or_default().push(b.cell);
    }
    let mut votes: HashMap<Alignment, usize> = HashMap::new();
    let mut best = 0;
    for rotation in 0..4u8 {
        for a in pred {
            let Some(targets) = by_kind.get(&(a.kind, a.color, a.cell.y)) else {
                continue;
            };
            for b in targets {
                let pre = rotate_inverse(*b, rotation);
                let (dx, dz) = (pre.x - a.cell.x, pre.z - a.cell.z);
                if !(dx0..=dx1).contains(&dx) || !(dz0..=dz1).contains(&dz) {
                    continue;
                }
                let v = votes.entry(Alignment { rotation, dx, dz }).or_insert(0);
                *v += 1;
                best = best.max(*v);
            }
        }
    }
    Prf::new(best, pred.len(), reference.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    Type,
    Color,
    Location,
    Shape,
    Overall,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::Type, Metric::Color, Metric::Location, Metric::Shape, Metric::Overall];

    pub fn label(&self) -> &'static str {
        match self {
            Metric::Type => "Type",
            Metric::Color => "Color",
            Metric::Location => "Location",
            Metric::Shape => "Shape",
            Metric::Overall => "Overall",
        }
    }
}

/// All five metric counts for one item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemScores {
    pub board: BoardKind,
    pub type_: Prf,
    pub color: Prf,
    pub location: Prf,
    pub shape: Prf,
    pub overall: Prf,
}

impl ItemScores {
    pub fn get(&self, m: Metric) -> Prf {
        match m {
            Metric::Type => self.type_,
            Metric::Color => self.color,
            Metric::Location => self.location,
            Metric::Shape => self.shape,
            Metric::Overall => self.overall,
        }
    }
}

pub fn score_item(item: &EvalItem) -> Result<ItemScores, MetricsError> {
    let nets = ItemNets::of(item)?;
    let fair = nets.fair_prediction(item.multi_interp);
    Ok(ItemScores {
        board: item.board,
        type_: auxiliary_prf(&fair, &nets.reference, Dimension::Type),
        color: auxiliary_prf(&fair, &nets.reference, Dimension::Color),
        location: auxiliary_prf(&fair, &nets.reference, Dimension::Location),
        shape: shape_prf(&nets.predicted, &nets.reference),
        overall: strict_prf(&fair, &nets.reference),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Partition {
    #[serde(rename = "EB")]
    Empty,
    #[serde(rename = "NEB")]
    NonEmpty,
    Overall,
}

impl Partition {
    pub const ALL: [Partition; 3] = [Partition::Empty, Partition::NonEmpty, Partition::Overall];

    pub fn label(&self) -> &'static str {
        match self {
            Partition::Empty => "EB",
            Partition::NonEmpty => "NEB",
            Partition::Overall => "Overall",
        }
    }
}

/// Micro-averaged counts for one report row.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub items: usize,
    pub type_: Prf,
    pub color: Prf,
    pub location: Prf,
    pub shape: Prf,
    pub overall: Prf,
}

impl ReportRow {
    fn add(&mut self, s: &ItemScores) {
        self.items += 1;
        self.type_ += s.type_;
        self.color += s.color;
        self.location += s.location;
        self.shape += s.shape;
        self.overall += s.overall;
    }

    /// `None` when the partition holds no items.
    pub fn get(&self, m: Metric) -> Option<Prf> {
        if self.items == 0 {
            return None;
        }
        Some(match m {
            Metric::Type => self.type_,
            Metric::Color => self.color,
            Metric::Location => self.location,
            Metric::Shape => self.shape,
            Metric::Overall => self.overall,
        })
    }
}

/// EB / NEB / Overall rows × Type / Color / Location / Shape / Overall.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreReport {
    #[serde(rename = "EB")]
    pub empty: ReportRow,
    #[serde(rename = "NEB")]
    pub non_empty: ReportRow,
    pub overall: ReportRow,
}

impl ScoreReport {
    pub fn from_scores<'a>(scores: impl IntoIterator<Item = &'a ItemScores>) -> Result<Self, MetricsError> {
        let mut r = ScoreReport::default();
        for s in scores {
            match s.board {
                BoardKind::Empty => r.empty.add(s),
                BoardKind::NonEmpty => r.non_empty.add(s),
            }
            r.overall.add(s);
        }
        if r.overall.items == 0 {
            return Err(MetricsError::NoItems);
        }
        Ok(r)
    }

    pub fn row(&self, p: Partition) -> &ReportRow {
        match p {
            Partition::Empty => &self.empty,
            Partition::NonEmpty => &self.non_empty,
            Partition::Overall => &self.overall,
        }
    }

    pub fn f1(&self, p: Partition, m: Metric) -> Option<f64> {
        self.row(p).get(m).map(|prf| prf.f1())
    }
}

impl fmt::Display for ScoreReport {
    /// F1 as a percentage with one decimal; `-` marks an empty partition.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<8}{:>7}", "", "items")?;
        for m in Metric::ALL {
            write!(f, "{:>10}", m.label())?;
        }
        writeln!(f)?;
        for p in Partition::ALL {
            write!(f, "{:<8}{:>7}", p.label(), self.row(p).items)?;
            for m in Metric::ALL {
                match self.f1(p, m) {
                    Some(v) => write!(f, "{:>10.1}", v * 100.0)?,
                    None => write!(f, "{:>10}", "-")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub fn micro_report(items: &[EvalItem]) -> Result<ScoreReport, MetricsError> {
    if items.is_empty() {
        return Err(MetricsError::NoItems);
    }
    let scores = items.iter().map(score_item).collect::<Result<Vec<_>, _>>()?;
    ScoreReport::from_scores(&scores)
}
