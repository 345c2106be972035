//! Block-level instruction rendering shared by the random and
//! blocks-for-shapes regimes.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use super::reference::{describe_block, BlockDescription, RefTier};
use super::templates::{self, block_phrase, counted_relation_phrase, fill, pick, relation_phrase};
use super::{GameState, PoseSampler, SimConfig, SimError, Slot, Utterance};
use crate::geometry::{dominant_horizontal, perspective_offset, DominantAxis};
use crate::world::{BlockColor, BuilderPose, Cell};

pub(crate) struct Placement<'a> {
    pub count: usize,
    pub color: BlockColor,
    pub floating: bool,
    /// Empty-board opening ("... on the ground").
    pub start: bool,
    /// Location words; ignored for openings.
    pub location: &'a str,
}

/// Instruction for a placement, with an optional clarification exchange.
pub(crate) fn render_placement<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &SimConfig,
    p: &Placement<'_>,
) -> Result<(Vec<Utterance>, Option<Slot>), SimError> {
    let slot = rng
        .random_bool(cfg.p_clarify)
        .then(|| *[Slot::Location, Slot::Color].choose(rng).expect("two slots"));
    let color = if slot == Some(Slot::Color) { "" } else { p.color.name() };
    let block = block_phrase(p.count, color, p.floating);
    let template = match (p.start, slot == Some(Slot::Location)) {
        (true, false) => pick(rng, templates::START_TEMPLATES),
        (true, true) => pick(rng, templates::START_NO_LOCATION_TEMPLATES),
        (false, false) => pick(rng, templates::PLACE_TEMPLATES),
        (false, true) => pick(rng, templates::PLACE_NO_LOCATION_TEMPLATES),
    };
    let mut out = vec![Utterance::architect(fill(template, &[("block", &block), ("location", p.location)])?)];
    let location = if p.start { "on the ground" } else { p.location };
    match slot {
        Some(Slot::Location) => {
            out.push(Utterance::builder(fill(pick(rng, templates::WHERE_QUESTIONS), &[])?));
            out.push(Utterance::architect(fill("{location}", &[("location", location)])?));
        }
        Some(Slot::Color) => {
            out.push(Utterance::builder(fill(pick(rng, templates::COLOR_QUESTIONS), &[])?));
            let answer = pick(rng, templates::COLOR_ANSWERS);
            out.push(Utterance::architect(fill(answer, &[("color", p.color.name())])?));
        }
        _ => {}
    }
    Ok((out, slot))
}

/// Location words for `p` relative to a described reference. Neighbors get
/// plain relation words (dropping the reference under ellipsis); farther
/// cells get per-axis counts.
pub(crate) fn location_words<R: Rng + ?Sized>(
    rng: &mut R,
    p: &Cell,
    reference: &BlockDescription,
    pose: &BuilderPose,
    ellipsis: bool,
) -> Result<String, SimError> {
    let rel = crate::geometry::classify_relation(p, &reference.cell, pose)?;
    let lateral_first = matches!(dominant_horizontal(p, &reference.cell, pose), Some(DominantAxis::Lateral(_)));
    let offset = perspective_offset(p, &reference.cell, pose);
    let extent = offset.iter().map(|v| v.abs()).max().unwrap_or(0);
    if extent > 1 {
        let counted = counted_relation_phrase(&rel, offset, lateral_first);
        return Ok(format!("{counted} from {}", reference.noun_phrase(rng)));
    }
    if ellipsis {
        return Ok(relation_phrase(rng, &rel, false, lateral_first));
    }
    Ok(format!("{} {}", relation_phrase(rng, &rel, true, lateral_first), reference.noun_phrase(rng)))
}

/// Tries each candidate reference (in random order) under a few poses and
/// returns the first pose under which it can be named.
pub(crate) fn find_reference<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &SimConfig,
    state: &GameState,
    mut refs: Vec<Cell>,
) -> Result<Option<(BuilderPose, BlockDescription)>, SimError> {
    refs.shuffle(rng);
    let last = state.last_placed();
    // the last placed block is always nameable, so try it first when eligible
    if let Some(pos) = last.and_then(|l| refs.iter().position(|c| *c == l)) {
        refs.swap(0, pos);
    }
    for r in refs {
        let sampler = PoseSampler::new(&r, &state.built, cfg)?;
        for _ in 0..cfg.pose_attempts {
            let pose = sampler.sample(rng, cfg)?;
            if let Some(d) = describe_block(rng, &r, &state.built, &pose, &cfg.pose, last) {
                return Ok(Some((pose, d)));
            }
        }
    }
    Ok(None)
}

/// Whether an ellipsis may replace the reference.
pub(crate) fn allow_ellipsis<R: Rng + ?Sized>(rng: &mut R, cfg: &SimConfig, d: &BlockDescription, extent: i32) -> bool {
    d.tier == RefTier::LastPlaced && extent == 1 && rng.random_bool(cfg.p_ellipsis)
}
