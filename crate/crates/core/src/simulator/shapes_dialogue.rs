//! Shape-level instructions for two-shape targets: each turn names a whole
//! row, diagonal or plane by size, color, start and growth direction.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use super::builder::realize_placements;
use super::reference::RefTier;
use super::templates::{self, article, counted_relation_phrase, direction_phrase, fill, number_word, pick, shape_names};
use super::{maybe_confirm, robust_pose, GameState, Growth, SimConfig, SimError, Slot, Turn, TurnPlan, Utterance};
use crate::actions::Action;
use crate::geometry::{classify_anchored_direction, classify_relation, dominant_horizontal, perspective_offset};
use crate::geometry::{AnchoredDirection, DominantAxis};
use crate::shapes::{materialize, ShapeInstance, ShapeKind};
use crate::shapes::TargetStructure;
use crate::world::{BlockColor, BuilderPose, Cell};

fn grounded(s: &ShapeInstance) -> Result<bool, SimError> {
    Ok(materialize(s)?.iter().any(|c| c.on_ground()))
}

/// Lattice corners of a row, diagonal or plane.
fn corner_lattice(s: &ShapeInstance) -> Vec<(i32, i32)> {
    let (a, b) = (s.sizes.0 as i32, s.sizes.1 as i32);
    match s.kind {
        ShapeKind::Row => vec![(0, 0), (a - 1, 0)],
        ShapeKind::Diagonal => vec![(0, 0), (a - 1, a - 1)],
        _ => vec![(0, 0), (a - 1, 0), (0, b - 1), (a - 1, b - 1)],
    }
}

/// Corners at the lowest level, with their lattice points.
fn bottom_corners(s: &ShapeInstance) -> Vec<((i32, i32), Cell)> {
    let corners: Vec<((i32, i32), Cell)> = corner_lattice(s).into_iter().map(|ij| (ij, s.cell_at(ij))).collect();
    let low = corners.iter().map(|(_, c)| c.y).min().expect("corners");
    let mut out: Vec<_> = corners.into_iter().filter(|(_, c)| c.y == low).collect();
    out.sort_by_key(|(_, c)| *c);
    out.dedup_by_key(|(_, c)| *c);
    out
}

fn sign_from(start: i32, far: i32) -> i32 {
    if start == 0 && far > 0 {
        1
    } else {
        -1
    }
}

/// A lattice growth step and how many blocks it extends over.
type Step = ((i32, i32), usize);

/// Fill order from the start corner plus the lattice growth steps (one for
/// lines, two for planes) and their extents.
fn fill_order<R: Rng + ?Sized>(
    rng: &mut R,
    s: &ShapeInstance,
    start: (i32, i32),
) -> (Vec<Cell>, Vec<Step>) {
    let (a, b) = (s.sizes.0 as i32, s.sizes.1 as i32);
    match s.kind {
        ShapeKind::Row => {
            let si = sign_from(start.0, a - 1);
            let cells = (0..a).map(|k| s.cell_at((start.0 + si * k, 0))).collect();
            (cells, vec![((si, 0), a as usize)])
        }
        ShapeKind::Diagonal => {
            let si = sign_from(start.0, a - 1);
            let cells = (0..a).map(|k| s.cell_at((start.0 + si * k, start.1 + si * k))).collect();
            (cells, vec![((si, si), a as usize)])
        }
        _ => {
            let si = sign_from(start.0, a - 1);
            let sj = sign_from(start.1, b - 1);
            let i_outer = rng.random_bool(0.5);
            let zigzag = rng.random_bool(0.5);
            let (outer, inner) = if i_outer { (a, b) } else { (b, a) };
            let mut cells = Vec::with_capacity((a * b) as usize);
            for u in 0..outer {
                for v in 0..inner {
                    let v = if zigzag && u % 2 == 1 { inner - 1 - v } else { v };
                    let (di, dj) = if i_outer { (u, v) } else { (v, u) };
                    cells.push(s.cell_at((start.0 + si * di, start.1 + sj * dj)));
                }
            }
            (cells, vec![((si, 0), a as usize), ((0, sj), b as usize)])
        }
    }
}

fn world_step(s: &ShapeInstance, ij: (i32, i32)) -> [i32; 3] {
    let origin = s.cell_at((0, 0));
    origin.delta(&s.cell_at(ij))
}

fn merge(dirs: &[AnchoredDirection]) -> AnchoredDirection {
    dirs.iter().fold(AnchoredDirection { lateral: None, vertical: None, depth: None }, |acc, d| AnchoredDirection {
        lateral: acc.lateral.or(d.lateral),
        vertical: acc.vertical.or(d.vertical),
        depth: acc.depth.or(d.depth),
    })
}

struct ShapeWords {
    name: &'static str,
    size: String,
    size_answer: String,
    direction: String,
}

fn shape_words<R: Rng + ?Sized>(rng: &mut R, s: &ShapeInstance, extents: &[usize], growth: &[Growth]) -> ShapeWords {
    let vertical = growth.iter().any(|g| g.step[1] != 0);
    let name = pick(rng, shape_names(s.kind, vertical));
    let merged = merge(&growth.iter().map(|g| g.direction).collect::<Vec<_>>());
    let verb = if s.kind == ShapeKind::Plane { "extending" } else { "going" };
    let direction = format!("{verb} {}", direction_phrase(&merged));
    let (size, size_answer) = if s.kind == ShapeKind::Plane {
        let (a, b) = (extents[0], extents[1]);
        match rng.random_bool(0.5) {
            true => (format!("{a}x{b}"), format!("{a}x{b}")),
            false => (format!("{} by {}", number_word(a), number_word(b)), format!("{} by {}", number_word(a), number_word(b))),
        }
    } else {
        let n = number_word(extents[0]);
        let unit = if vertical && s.kind == ShapeKind::Row { "tall" } else { "long" };
        (format!("{n} block {unit}"), format!("{n} blocks {unit}"))
    };
    ShapeWords { name, size, size_answer, direction }
}

fn noun_phrase(words: &ShapeWords, color: BlockColor, omit: Option<Slot>) -> String {
    let size = if omit == Some(Slot::Size) { "" } else { words.size.as_str() };
    let color = if omit == Some(Slot::Color) { "" } else { color.name() };
    let body = [size, color, words.name].into_iter().filter(|w| !w.is_empty()).collect::<Vec<_>>().join(" ");
    format!("{} {body}", article(&body))
}

pub(crate) fn simulate<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &SimConfig,
    target: &TargetStructure,
) -> Result<Vec<Turn>, SimError> {
    if target.shapes.len() != 2 {
        return Err(SimError::Config(format!("shape instructions need two shapes, got {}", target.shapes.len())));
    }
    if let Some(s) = target.shapes.iter().find(|s| !matches!(s.kind, ShapeKind::Row | ShapeKind::Diagonal | ShapeKind::Plane)) {
        return Err(SimError::Config(format!("shape instructions cover rows, diagonals and planes, not {}", s.kind)));
    }
    let g = [grounded(&target.shapes[0])?, grounded(&target.shapes[1])?];
    let order = match g {
        [true, true] => {
            let mut o = [0, 1];
            o.shuffle(rng);
            o
        }
        [true, false] => [0, 1],
        [false, true] => [1, 0],
        [false, false] => return Err(SimError::Config("neither shape touches the ground".into())),
    };
    let first = &target.shapes[order[0]];
    let second = &target.shapes[order[1]];
    let second_cells = materialize(second)?;

    let mut state = GameState::default();
    let mut turns = Vec::with_capacity(2);

    // farthest bottom corner from the other shape; ties go to the lowest cell
    let (start_ij, start) = *bottom_corners(first)
        .iter()
        .max_by_key(|(_, c)| {
            let d = second_cells.iter().map(|o| c.manhattan(o)).min().unwrap_or(0);
            (d, std::cmp::Reverse(*c))
        })
        .expect("corners");
    let pose = robust_pose(rng, &start, &state.built, cfg)?;
    turns.push(shape_turn(rng, cfg, &mut state, first, order[0], start_ij, start, pose, None)?);

    let reference = state.last_placed().expect("first shape placed");
    let (start_ij, start) = *bottom_corners(second)
        .iter()
        .min_by_key(|(_, c)| (c.manhattan(&reference), *c))
        .expect("corners");
    let pose = robust_pose(rng, &reference, &state.built, cfg)?;
    turns.push(shape_turn(rng, cfg, &mut state, second, order[1], start_ij, start, pose, Some(reference))?);
    Ok(turns)
}

#[allow(clippy::too_many_arguments)]
fn shape_turn<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &SimConfig,
    state: &mut GameState,
    shape: &ShapeInstance,
    index: usize,
    start_ij: (i32, i32),
    start: Cell,
    pose: BuilderPose,
    reference: Option<Cell>,
) -> Result<Turn, SimError> {
    let (cells, steps) = fill_order(rng, shape, start_ij);
    let growth = steps
        .iter()
        .map(|(ij, _)| {
            let step = world_step(shape, *ij);
            Ok(Growth { step, direction: classify_anchored_direction(step, &pose)? })
        })
        .collect::<Result<Vec<_>, SimError>>()?;
    let extents: Vec<usize> = steps.iter().map(|(_, n)| *n).collect();
    let words = shape_words(rng, shape, &extents, &growth);

    let (location, location_answer, relation, extent) = match reference {
        None => ("on the ground".to_string(), "on the ground".to_string(), None, None),
        Some(r) => {
            let rel = classify_relation(&start, &r, &pose)?;
            let offset = perspective_offset(&start, &r, &pose);
            let lateral_first = matches!(dominant_horizontal(&start, &r, &pose), Some(DominantAxis::Lateral(_)));
            let counted = counted_relation_phrase(&rel, offset, lateral_first);
            let anchor = pick(rng, &["the last block you placed", "the last block you added"]);
            let extent = offset.iter().map(|v| v.abs()).max().unwrap_or(0);
            (format!("starting {counted} from {anchor}"), format!("start {counted} from {anchor}"), Some(rel), Some(extent))
        }
    };

    let mut slots = vec![Slot::Color, Slot::Size, Slot::Direction];
    if reference.is_some() {
        slots.push(Slot::Location);
    }
    let omit = rng.random_bool(cfg.p_clarify).then(|| *slots.choose(rng).expect("slots"));
    let shape_np = noun_phrase(&words, shape.color, omit);
    let instruction = fill(
        pick(rng, templates::SHAPE_TEMPLATES),
        &[
            ("shape", &shape_np),
            ("location", if omit == Some(Slot::Location) { "" } else { &location }),
            ("direction", if omit == Some(Slot::Direction) { "" } else { &words.direction }),
        ],
    )?;
    let mut dialogue = vec![Utterance::architect(instruction)];
    if let Some(slot) = omit {
        let (questions, answer) = match slot {
            Slot::Color => {
                (templates::COLOR_QUESTIONS, fill(pick(rng, templates::COLOR_ANSWERS), &[("color", shape.color.name())])?)
            }
            Slot::Size => (templates::SIZE_QUESTIONS, fill(&words.size_answer, &[])?),
            Slot::Direction => (
                templates::DIRECTION_QUESTIONS,
                fill(pick(rng, templates::DIRECTION_ANSWERS), &[("direction", &words.direction)])?,
            ),
            Slot::Location => (templates::WHERE_QUESTIONS, fill(&location_answer, &[])?),
        };
        dialogue.push(Utterance::builder(fill(pick(rng, questions), &[])?));
        dialogue.push(Utterance::architect(answer));
    }

    let placements: Vec<(Cell, BlockColor)> = cells.iter().map(|c| (*c, shape.color)).collect();
    let (actions, supports) = realize_placements(rng, &state.built, &placements)?;
    let last = *cells.last().expect("non-empty shape");
    state.apply(&actions, Action::place(shape.color, last))?;
    let plan = TurnPlan {
        reference,
        reference_tier: reference.map(|_| RefTier::LastPlaced),
        relation,
        relation_extent: extent,
        located: Some(start),
        growth,
        shape_index: Some(index),
        intended: cells.len(),
        supports,
        clarified: omit,
        ellipsis: false,
    };
    Ok(Turn { pose, dialogue, actions, confirmation: maybe_confirm(rng, cfg), plan })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::Direction;
    use std::collections::BTreeSet;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plane() -> ShapeInstance {
        ShapeInstance {
            kind: ShapeKind::Plane,
            color: BlockColor::Blue,
            anchor: Cell::new(0, 1, 0),
            primary: Direction::PosX,
            secondary: Direction::PosY,
            sizes: (3, 2),
        }
    }

    #[test]
    fn vertical_plane_has_two_bottom_corners() {
        let corners: Vec<Cell> = bottom_corners(&plane()).into_iter().map(|(_, c)| c).collect();
        assert_eq!(corners, vec![Cell::new(0, 1, 0), Cell::new(2, 1, 0)]);
    }

    #[test]
    fn fill_from_far_corner_covers_the_plane() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = plane();
        let (cells, steps) = fill_order(&mut rng, &s, (2, 0));
        assert_eq!(cells[0], Cell::new(2, 1, 0));
        assert_eq!(cells.iter().collect::<BTreeSet<_>>(), materialize(&s).unwrap().iter().collect());
        assert_eq!(steps, vec![((-1, 0), 3), ((0, 1), 2)]);
    }
}
