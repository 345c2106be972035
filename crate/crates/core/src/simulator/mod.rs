//! Dialogue simulators.
//!
//! Each game loops over turns: the Architect plans the next change, a
//! Builder pose is sampled around the reference block, the instruction is
//! rendered (optionally with a clarification exchange), the Builder plans a
//! feasible action sequence (with temporary supports where needed), and the
//! Architect may confirm.
//!
//! Three regimes are provided: random structures ([`SimulatorKind::Random`]),
//! block-level instructions for shape-based targets
//! ([`SimulatorKind::BlocksForShapes`]) and shape-level instructions for
//! two-shape targets ([`SimulatorKind::ShapesForShapes`]).

mod blocks;
pub mod builder;
mod instruct;
mod random;
pub mod reference;
mod shapes_dialogue;
pub mod templates;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actions::{Action, ActionSequence};
use crate::geometry::{
    feasible_positions, sample_pose_among, AnchoredDirection, FieldOfView, GeometryError, PoseBounds, SpatialRelation,
};
use crate::shapes::{generate_target, ShapeError, TargetConfig, TargetStructure};
use crate::world::{apply_sequence, ApplyMode, BuilderPose, Cell, Structure, WorldError};

pub use reference::{RefTier, Superlative};
pub use templates::TemplateError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("turn {turn}: planner found no feasible next step ({reason})")]
    Deadlock { turn: usize, reason: String },
    #[error("no support chain reaches {0}")]
    NoSupport(Cell),
    #[error(transparent)]
    Pose(#[from] GeometryError),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Target(#[from] ShapeError),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("invalid simulator configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimulatorKind {
    Random,
    BlocksForShapes,
    ShapesForShapes,
}

impl SimulatorKind {
    /// The target regime this simulator consumes, if any.
    pub fn target_config(&self) -> Option<TargetConfig> {
        match self {
            SimulatorKind::Random => None,
            SimulatorKind::BlocksForShapes => Some(TargetConfig::blocks_regime()),
            SimulatorKind::ShapesForShapes => Some(TargetConfig::shapes_regime()),
        }
    }
}

/// Tunable simulator parameters. Probabilities not fixed by the task
/// description (`p_clarify`, `p_confirm`, `p_ellipsis`) are defaults chosen
/// here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Chance that an action after the fourth is a removal (random regime).
    pub p_remove: f64,
    /// Chance that an instruction omits a detail and triggers a question.
    pub p_clarify: f64,
    /// Chance that the Architect confirms after the Builder acts.
    pub p_confirm: f64,
    /// Chance of dropping "the last block you added" after a placement.
    pub p_ellipsis: f64,
    /// Number of placements before removals may occur.
    pub placements_first: usize,
    pub min_turns: usize,
    pub max_turns: usize,
    pub fov: FieldOfView,
    pub pose: PoseBounds,
    /// Pose draws per reference before trying another reference.
    pub pose_attempts: usize,
    /// Target generation settings for the shape-based regimes; `None`
    /// selects the regime default.
    pub target: Option<TargetConfig>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            p_remove: 0.10,
            p_clarify: 0.15,
            p_confirm: 0.10,
            p_ellipsis: 0.05,
            placements_first: 4,
            min_turns: 8,
            max_turns: 30,
            fov: FieldOfView::default(),
            pose: PoseBounds::default(),
            pose_attempts: 20,
            target: None,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        for (name, p) in [
            ("p_remove", self.p_remove),
            ("p_clarify", self.p_clarify),
            ("p_confirm", self.p_confirm),
            ("p_ellipsis", self.p_ellipsis),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SimError::Config(format!("{name} = {p} is not a probability")));
            }
        }
        if self.min_turns == 0 || self.min_turns > self.max_turns {
            return Err(SimError::Config("turn bounds must satisfy 1 <= min_turns <= max_turns".into()));
        }
        if self.pose_attempts == 0 {
            return Err(SimError::Config("pose_attempts must be positive".into()));
        }
        if !(self.fov.horizontal > 0.0 && self.fov.horizontal < 180.0 && self.fov.vertical > 0.0 && self.fov.vertical < 180.0) {
            return Err(SimError::Config("field of view angles must lie in (0, 180)".into()));
        }
        Ok(())
    }

    pub fn target_config(&self, kind: SimulatorKind) -> Option<TargetConfig> {
        kind.target_config().map(|default| self.target.clone().unwrap_or(default))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Speaker {
    Architect,
    Builder,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub speaker: Speaker,
    pub text: String,
}

impl Utterance {
    pub fn architect(text: impl Into<String>) -> Self {
        Utterance { speaker: Speaker::Architect, text: text.into() }
    }

    pub fn builder(text: impl Into<String>) -> Self {
        Utterance { speaker: Speaker::Builder, text: text.into() }
    }
}

/// Instruction detail left out to prompt a clarification question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    Location,
    Color,
    Size,
    Direction,
}

/// A growth step of a shape and the words used for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Growth {
    pub step: [i32; 3],
    pub direction: AnchoredDirection,
}

/// Planning metadata kept with each turn for verification.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnPlan {
    /// Reference block the location is expressed against.
    pub reference: Option<Cell>,
    pub reference_tier: Option<RefTier>,
    /// Relation of `located` to `reference`, as uttered.
    pub relation: Option<SpatialRelation>,
    /// Largest per-axis distance between `located` and `reference`.
    pub relation_extent: Option<i32>,
    /// The cell whose location the instruction conveys.
    pub located: Option<Cell>,
    pub growth: Vec<Growth>,
    pub shape_index: Option<usize>,
    /// Intended number of net block changes.
    pub intended: usize,
    pub supports: usize,
    pub clarified: Option<Slot>,
    pub ellipsis: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Turn {
    pub pose: BuilderPose,
    /// Instruction and any clarification exchange, in order.
    pub dialogue: Vec<Utterance>,
    pub actions: ActionSequence,
    /// Optional confirmation spoken after the actions.
    pub confirmation: Option<Utterance>,
    pub plan: TurnPlan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameLog {
    pub id: String,
    pub kind: SimulatorKind,
    pub target: TargetStructure,
    pub turns: Vec<Turn>,
}

impl GameLog {
    /// Structures before the first turn and after each turn, under strict
    /// replay.
    pub fn states(&self) -> Result<Vec<Structure>, WorldError> {
        let mut out = vec![Structure::new()];
        for t in &self.turns {
            let next = apply_sequence(out.last().expect("non-empty"), &t.actions, ApplyMode::Strict)?;
            out.push(next);
        }
        Ok(out)
    }
}

/// Mutable game state shared by the planners.
#[derive(Debug, Clone, Default)]
pub(crate) struct GameState {
    pub built: Structure,
    /// Last net action applied, if any.
    pub last: Option<Action>,
    pub actions_done: usize,
}

impl GameState {
    pub fn last_placed(&self) -> Option<Cell> {
        self.last.filter(|a| a.is_place()).map(|a| a.cell)
    }

    pub fn apply(&mut self, seq: &[Action], net_last: Action) -> Result<(), SimError> {
        self.built = apply_sequence(&self.built, seq, ApplyMode::Strict)?;
        self.last = Some(net_last);
        self.actions_done += 1;
        Ok(())
    }
}

/// Feet positions for looking at `reference`, widening the distance bounds
/// and finally ignoring occlusion when no position qualifies.
pub(crate) struct PoseSampler {
    reference: Cell,
    candidates: Vec<[f64; 3]>,
    bounds: PoseBounds,
}

impl PoseSampler {
    pub fn new(reference: &Cell, world: &Structure, cfg: &SimConfig) -> Result<Self, SimError> {
        let mut bounds = cfg.pose;
        for widen in [0.0, 4.0] {
            bounds.max_dist = cfg.pose.max_dist + widen;
            let candidates = feasible_positions(reference, world, &bounds);
            if !candidates.is_empty() {
                return Ok(PoseSampler { reference: *reference, candidates, bounds });
            }
        }
        bounds.require_line_of_sight = false;
        let candidates = feasible_positions(reference, world, &bounds);
        if candidates.is_empty() {
            return Err(GeometryError::NoFeasiblePosition(*reference).into());
        }
        Ok(PoseSampler { reference: *reference, candidates, bounds })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, cfg: &SimConfig) -> Result<BuilderPose, SimError> {
        Ok(sample_pose_among(rng, &self.reference, &self.candidates, &cfg.fov, &self.bounds)?)
    }
}

/// One pose looking at `reference`.
pub(crate) fn robust_pose<R: Rng + ?Sized>(
    rng: &mut R,
    reference: &Cell,
    world: &Structure,
    cfg: &SimConfig,
) -> Result<BuilderPose, SimError> {
    PoseSampler::new(reference, world, cfg)?.sample(rng, cfg)
}

/// Optionally appends a confirmation utterance.
pub(crate) fn maybe_confirm<R: Rng + ?Sized>(rng: &mut R, cfg: &SimConfig) -> Option<Utterance> {
    rng.random_bool(cfg.p_confirm).then(|| {
        let text = templates::pick(rng, templates::CONFIRMATIONS);
        Utterance::architect(templates::fill(text, &[]).expect("confirmations have no slots"))
    })
}

/// Runs one game. Shape-based regimes need a target; the random regime
/// builds its own and must not be given one.
pub fn simulate_game(
    rng: &mut ChaCha8Rng,
    kind: SimulatorKind,
    cfg: &SimConfig,
    target: Option<TargetStructure>,
) -> Result<GameLog, SimError> {
    cfg.validate()?;
    let (target, turns) = match (kind, target) {
        (SimulatorKind::Random, None) => random::simulate(rng, cfg)?,
        (SimulatorKind::Random, Some(_)) => {
            return Err(SimError::Config("the random regime generates its own target".into()))
        }
        (_, None) => return Err(SimError::Config("shape-based regimes require a target".into())),
        (SimulatorKind::BlocksForShapes, Some(t)) => {
            let turns = blocks::simulate(rng, cfg, &t)?;
            (t, turns)
        }
        (SimulatorKind::ShapesForShapes, Some(t)) => {
            let turns = shapes_dialogue::simulate(rng, cfg, &t)?;
            (t, turns)
        }
    };
    Ok(GameLog { id: String::new(), kind, target, turns })
}

/// Draws a target for `kind` (if it needs one) and simulates the game, all
/// from one random stream.
pub fn generate_game(rng: &mut ChaCha8Rng, kind: SimulatorKind, cfg: &SimConfig) -> Result<GameLog, SimError> {
    let target = match cfg.target_config(kind) {
        Some(tc) => Some(generate_target(rng, &tc)?),
        None => None,
    };
    simulate_game(rng, kind, cfg, target)
}

/// The per-game random stream: the root seed selects the generator and the
/// game index selects an independent stream within it.
pub fn game_rng(root_seed: u64, index: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
    rng.set_stream(index);
    rng
}
