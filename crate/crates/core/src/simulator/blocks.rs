//! Block-level instructions for shape-based targets. Shapes are completed
//! one at a time; each turn names one block (or a straight run of
//! same-colored blocks) relative to a block already built.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::Rng;

use super::builder::{needs_support, realize_placements};
use super::instruct::{allow_ellipsis, find_reference, location_words, render_placement, Placement};
use super::reference::{BlockDescription, RefTier};
use super::{maybe_confirm, robust_pose, GameState, SimConfig, SimError, Turn, TurnPlan};
use crate::actions::Action;
use crate::geometry::{classify_relation, perspective_offset};
use crate::shapes::{materialize, TargetStructure};
use crate::world::{connected_components, shares_face_or_edge, Cell, Structure};

/// Cells of each shape, or the whole target as one shape when it carries no
/// decomposition.
fn shape_cells(target: &TargetStructure) -> Result<Vec<BTreeSet<Cell>>, SimError> {
    if target.shapes.is_empty() {
        return Ok(vec![target.merged.cells().collect()]);
    }
    Ok(target.shapes.iter().map(materialize).collect::<Result<_, _>>()?)
}

/// Ordering key for the next block: avoid supports, continue next to the
/// last block when it has the same color, keep the rest of the shape in one
/// piece, open few new frontier cells, then lowest coordinates.
fn candidate_key(
    p: &Cell,
    built: &Structure,
    target: &Structure,
    unbuilt: &BTreeSet<Cell>,
    last: Option<Action>,
) -> (bool, bool, usize, usize, Cell) {
    let color = target.get(p);
    let near_last_same = last.is_some_and(|a| a.is_place() && Some(a.color) == color && shares_face_or_edge(p, &a.cell));
    let rest: BTreeSet<Cell> = unbuilt.iter().filter(|c| *c != p).copied().collect();
    let pieces = connected_components(&rest).len();
    let fresh = rest
        .iter()
        .filter(|c| shares_face_or_edge(c, p) && !built.cells().any(|b| shares_face_or_edge(c, &b)))
        .count();
    (needs_support(built, p), !near_last_same, pieces, fresh, *p)
}

pub(crate) fn simulate<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &SimConfig,
    target: &TargetStructure,
) -> Result<Vec<Turn>, SimError> {
    if target.merged.is_empty() {
        return Err(SimError::Config("empty target".into()));
    }
    let shapes = shape_cells(target)?;
    let limit = target.merged.len() + 1;
    let mut state = GameState::default();
    let mut turns = Vec::new();
    while state.built != target.merged {
        let t = turns.len();
        if t >= limit {
            return Err(SimError::Deadlock { turn: t, reason: "turn budget exhausted".into() });
        }
        let Some(cur) = shapes.iter().position(|s| s.iter().any(|c| !state.built.is_occupied(c))) else {
            return Err(SimError::Deadlock { turn: t, reason: "built blocks outside the target".into() });
        };
        let unbuilt: BTreeSet<Cell> = shapes[cur].iter().filter(|c| !state.built.is_occupied(c)).copied().collect();
        let turn = if state.built.is_empty() {
            opening(rng, cfg, target, &shapes[cur], &mut state)?
        } else {
            block_turn(rng, cfg, target, &unbuilt, cur, &mut state, t)?
        };
        turns.push(turn);
    }
    Ok(turns)
}

fn opening<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &SimConfig,
    target: &TargetStructure,
    shape: &BTreeSet<Cell>,
    state: &mut GameState,
) -> Result<Turn, SimError> {
    let mut ground: Vec<Cell> = shape.iter().filter(|c| c.on_ground()).copied().collect();
    if ground.is_empty() {
        ground = target.merged.cells().filter(|c| c.on_ground()).collect();
    }
    let p = *ground
        .choose(rng)
        .ok_or_else(|| SimError::Config("target has no ground block".into()))?;
    let color = target.merged.get(&p).expect("target cell");
    let pose = robust_pose(rng, &p, &state.built, cfg)?;
    let (actions, supports) = realize_placements(rng, &state.built, &[(p, color)])?;
    let (dialogue, clarified) =
        render_placement(rng, cfg, &Placement { count: 1, color, floating: false, start: true, location: "" })?;
    state.apply(&actions, Action::place(color, p))?;
    let plan = TurnPlan { located: Some(p), shape_index: Some(0), intended: 1, supports, clarified, ..TurnPlan::default() };
    Ok(Turn { pose, dialogue, actions, confirmation: maybe_confirm(rng, cfg), plan })
}

fn block_turn<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &SimConfig,
    target: &TargetStructure,
    unbuilt: &BTreeSet<Cell>,
    cur: usize,
    state: &mut GameState,
    turn: usize,
) -> Result<Turn, SimError> {
    let p = unbuilt
        .iter()
        .filter(|c| state.built.cells().any(|b| shares_face_or_edge(c, &b)))
        .min_by_key(|c| candidate_key(c, &state.built, &target.merged, unbuilt, state.last))
        .copied()
        .ok_or_else(|| SimError::Deadlock { turn, reason: format!("shape {cur} does not touch the structure") })?;
    let color = target.merged.get(&p).expect("target cell");

    let refs: Vec<Cell> = state.built.cells().filter(|b| shares_face_or_edge(&p, b)).collect();
    let (pose, desc) = match find_reference(rng, cfg, state, refs)? {
        Some(found) => found,
        None => {
            // fall back to the last block, however far away, with counts
            let last = state
                .last_placed()
                .ok_or_else(|| SimError::Deadlock { turn, reason: "no nameable reference".into() })?;
            let pose = robust_pose(rng, &last, &state.built, cfg)?;
            let color = state.built.get(&last).expect("last block is built");
            (pose, BlockDescription { cell: last, color, tier: RefTier::LastPlaced })
        }
    };
    let relation = classify_relation(&p, &desc.cell, &pose)?;
    let extent = perspective_offset(&p, &desc.cell, &pose).iter().map(|v| v.abs()).max().unwrap_or(0);

    let mut run = vec![(p, color)];
    if extent == 1 {
        let step = desc.cell.delta(&p);
        let mut q = p.offset(step[0], step[1], step[2]);
        while unbuilt.contains(&q) && target.merged.get(&q) == Some(color) {
            run.push((q, color));
            q = q.offset(step[0], step[1], step[2]);
        }
    }

    let ellipsis = allow_ellipsis(rng, cfg, &desc, extent);
    let location = location_words(rng, &p, &desc, &pose, ellipsis)?;
    let (actions, supports) = realize_placements(rng, &state.built, &run)?;
    let spec = Placement { count: run.len(), color, floating: supports > 0, start: false, location: &location };
    let (dialogue, clarified) = render_placement(rng, cfg, &spec)?;
    let (last_cell, _) = *run.last().expect("non-empty run");
    state.apply(&actions, Action::place(color, last_cell))?;
    let plan = TurnPlan {
        reference: Some(desc.cell),
        reference_tier: Some(desc.tier),
        relation: Some(relation),
        relation_extent: Some(extent),
        located: Some(p),
        shape_index: Some(cur),
        intended: run.len(),
        supports,
        clarified,
        ellipsis,
        ..TurnPlan::default()
    };
    Ok(Turn { pose, dialogue, actions, confirmation: maybe_confirm(rng, cfg), plan })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::{Direction, ShapeInstance, ShapeKind};
    use crate::world::BlockColor;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn builds_a_single_row() {
        let row = ShapeInstance {
            kind: ShapeKind::Row,
            color: BlockColor::Red,
            anchor: Cell::new(0, 1, 0),
            primary: Direction::PosX,
            secondary: Direction::PosZ,
            sizes: (4, 0),
        };
        let target = TargetStructure::from_shapes(vec![row]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let turns = simulate(&mut rng, &SimConfig::default(), &target).unwrap();
        let mut s = Structure::new();
        for t in &turns {
            s = crate::world::apply_sequence(&s, &t.actions, crate::world::ApplyMode::Strict).unwrap();
        }
        assert_eq!(s, target.merged);
        assert!(turns.len() <= 4);
    }
}
