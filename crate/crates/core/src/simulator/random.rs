//! Random-structure regime: one action per turn, placements next to the
//! existing structure and occasional removals.

use std::collections::BTreeSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use super::builder::{realize_placements, support_chain};
use super::instruct::{allow_ellipsis, find_reference, location_words, render_placement, Placement};
use super::reference::describe_block;
use super::templates::{self, fill, pick};
use super::{maybe_confirm, robust_pose, GameState, PoseSampler, SimConfig, SimError, Turn, TurnPlan, Utterance};
use crate::actions::Action;
use crate::geometry::classify_relation;
use crate::shapes::TargetStructure;
use crate::world::{shares_face_or_edge, BlockColor, Cell, Structure};

pub(crate) fn simulate<R: Rng + ?Sized>(rng: &mut R, cfg: &SimConfig) -> Result<(TargetStructure, Vec<Turn>), SimError> {
    let n_turns = rng.random_range(cfg.min_turns..=cfg.max_turns);
    let mut state = GameState::default();
    let mut turns = Vec::with_capacity(n_turns);
    for t in 0..n_turns {
        let want_removal = state.actions_done >= cfg.placements_first && rng.random_bool(cfg.p_remove);
        let turn = match want_removal && !state.built.is_empty() {
            true => match removal_turn(rng, cfg, &mut state)? {
                Some(turn) => turn,
                None => placement_turn(rng, cfg, &mut state, t)?,
            },
            false => placement_turn(rng, cfg, &mut state, t)?,
        };
        turns.push(turn);
    }
    Ok((TargetStructure::from_structure(state.built), turns))
}

/// Empty cells sharing a face or edge with the structure.
fn frontier(built: &Structure) -> Vec<Cell> {
    let set: BTreeSet<Cell> = built
        .cells()
        .flat_map(|c| c.connected_neighborhood())
        .filter(|c| c.in_region() && !built.is_occupied(c))
        .collect();
    set.into_iter().collect()
}

fn placement_turn<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &SimConfig,
    state: &mut GameState,
    turn: usize,
) -> Result<Turn, SimError> {
    let color = *BlockColor::ALL.choose(rng).expect("six colors");
    if state.built.is_empty() {
        let ground: Vec<Cell> = Cell::region().filter(|c| c.on_ground()).collect();
        let p = *ground.choose(rng).expect("ground cells");
        let pose = robust_pose(rng, &p, &state.built, cfg)?;
        let (actions, supports) = realize_placements(rng, &state.built, &[(p, color)])?;
        let spec = Placement { count: 1, color, floating: false, start: true, location: "" };
        let (dialogue, clarified) = render_placement(rng, cfg, &spec)?;
        state.apply(&actions, Action::place(color, p))?;
        let plan = TurnPlan { located: Some(p), intended: 1, supports, clarified, ..TurnPlan::default() };
        return Ok(Turn { pose, dialogue, actions, confirmation: maybe_confirm(rng, cfg), plan });
    }
    let mut cells = frontier(&state.built);
    cells.shuffle(rng);
    for p in cells {
        if support_chain(&state.built, &p).is_none() {
            continue;
        }
        let refs: Vec<Cell> = state.built.cells().filter(|b| shares_face_or_edge(&p, b)).collect();
        let Some((pose, desc)) = find_reference(rng, cfg, state, refs)? else { continue };
        let relation = classify_relation(&p, &desc.cell, &pose)?;
        let ellipsis = allow_ellipsis(rng, cfg, &desc, 1);
        let location = location_words(rng, &p, &desc, &pose, ellipsis)?;
        let (actions, supports) = realize_placements(rng, &state.built, &[(p, color)])?;
        let spec = Placement { count: 1, color, floating: supports > 0, start: false, location: &location };
        let (dialogue, clarified) = render_placement(rng, cfg, &spec)?;
        state.apply(&actions, Action::place(color, p))?;
        let plan = TurnPlan {
            reference: Some(desc.cell),
            reference_tier: Some(desc.tier),
            relation: Some(relation),
            relation_extent: Some(1),
            located: Some(p),
            intended: 1,
            supports,
            clarified,
            ellipsis,
            ..TurnPlan::default()
        };
        return Ok(Turn { pose, dialogue, actions, confirmation: maybe_confirm(rng, cfg), plan });
    }
    Err(SimError::Deadlock { turn, reason: "no describable placement next to the structure".into() })
}

/// A removal of a nameable block, or `None` when no block can be named.
fn removal_turn<R: Rng + ?Sized>(rng: &mut R, cfg: &SimConfig, state: &mut GameState) -> Result<Option<Turn>, SimError> {
    let mut blocks: Vec<(Cell, BlockColor)> = state.built.iter().collect();
    blocks.shuffle(rng);
    let last = state.last_placed();
    for (b, color) in blocks {
        let sampler = PoseSampler::new(&b, &state.built, cfg)?;
        let found = if Some(b) == last {
            let text = fill(pick(rng, templates::REMOVE_LAST_TEMPLATES), &[])?;
            Some((sampler.sample(rng, cfg)?, text, None))
        } else {
            let mut hit = None;
            for _ in 0..cfg.pose_attempts {
                let pose = sampler.sample(rng, cfg)?;
                if let Some(d) = describe_block(rng, &b, &state.built, &pose, &cfg.pose, None) {
                    let target = d.noun_phrase(rng);
                    let text = fill(pick(rng, templates::REMOVE_TEMPLATES), &[("target", &target)])?;
                    hit = Some((pose, text, Some(d.tier)));
                    break;
                }
            }
            hit
        };
        let Some((pose, text, tier)) = found else { continue };
        let action = Action::remove(color, b);
        let actions = vec![action];
        state.apply(&actions, action)?;
        let plan = TurnPlan {
            reference: tier.map(|_| b),
            reference_tier: tier,
            located: Some(b),
            intended: 1,
            ..TurnPlan::default()
        };
        let dialogue = vec![Utterance::architect(text)];
        return Ok(Some(Turn { pose, dialogue, actions, confirmation: maybe_confirm(rng, cfg), plan }));
    }
    Ok(None)
}
