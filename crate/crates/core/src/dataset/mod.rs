//! Game-log records, item extraction, prompt rendering and target-disjoint
//! splits.
//!
//! Logs are stored as JSON lines, one game per line. Field order is fixed
//! by the record types and pose numbers are quantized to one decimal, so a
//! read/write cycle reproduces the input bytes.

#[cfg(feature = "mdc-import")]
pub mod mdc;
mod prompt;
mod split;

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actions::{Action, ActionToken};
use crate::metrics::BoardKind;
use crate::simulator::{GameLog, SimulatorKind, Utterance};
use crate::world::{apply_action, BlockColor, BuilderPose, Cell, Structure, WorldError};

pub use prompt::{render_prompt, PromptVariant, POSITION_SENTENCE_PREFIX, PROMPT_HEADER, PROMPT_TERMINATOR};
pub use split::{split_by_target, target_key, ManifestEntry, Split, SplitName, SplitSpec};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("unsupported schema version {found} (expected {SCHEMA_VERSION})")]
    Schema { found: u32 },
    #[error("log {id}, turn {turn}: {reason}")]
    CorruptLog { id: String, turn: usize, reason: String },
    #[error("line {line}: {error}")]
    ActionLine { line: usize, error: ActionParseError },
    #[error("invalid split: {0}")]
    Split(String),
    #[error(transparent)]
    World(#[from] WorldError),
}

/// Where a log came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Source {
    #[serde(rename = "synthetic-random")]
    SyntheticRandom,
    #[serde(rename = "synthetic-blocks")]
    SyntheticBlocks,
    #[serde(rename = "synthetic-shapes")]
    SyntheticShapes,
    #[serde(rename = "human")]
    Human,
}

impl From<SimulatorKind> for Source {
    fn from(k: SimulatorKind) -> Self {
        match k {
            SimulatorKind::Random => Source::SyntheticRandom,
            SimulatorKind::BlocksForShapes => Source::SyntheticBlocks,
            SimulatorKind::ShapesForShapes => Source::SyntheticShapes,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemFlags {
    pub board_kind: BoardKind,
    pub multi_interp: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnRecord {
    pub pose: BuilderPose,
    /// Instruction and clarification exchange, spoken before the actions.
    pub utterances: Vec<Utterance>,
    /// Action lines in prompt syntax.
    pub actions: Vec<String>,
    /// Utterances after the actions (confirmations).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub after: Vec<Utterance>,
    pub flags: ItemFlags,
    /// Spatial relation the instruction used, e.g. `Left+Above`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameLogRecord {
    pub schema: u32,
    pub id: String,
    pub source: Source,
    pub target: Structure,
    pub turns: Vec<TurnRecord>,
}

fn quantize(v: f64) -> f64 {
    let r = (v * 10.0).round() / 10.0;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn quantized_pose(p: &BuilderPose) -> BuilderPose {
    BuilderPose::new(p.loc.map(quantize), quantize(p.yaw), quantize(p.pitch))
}

impl GameLogRecord {
    /// Converts a simulated game. Synthetic empty-board items admit several
    /// placements, so they are flagged multi-interpretation.
    pub fn from_game(log: &GameLog) -> Result<Self, DatasetError> {
        let states = log.states()?;
        let turns = log
            .turns
            .iter()
            .zip(&states)
            .map(|(t, before)| {
                let board_kind = BoardKind::of(before);
                TurnRecord {
                    pose: quantized_pose(&t.pose),
                    utterances: t.dialogue.clone(),
                    actions: t.actions.iter().map(|a| a.token().to_string()).collect(),
                    after: t.confirmation.iter().cloned().collect(),
                    flags: ItemFlags { board_kind, multi_interp: board_kind == BoardKind::Empty },
                    relation: t.plan.relation.map(|r| r.to_string()),
                }
            })
            .collect();
        Ok(GameLogRecord {
            schema: SCHEMA_VERSION,
            id: log.id.clone(),
            source: log.kind.into(),
            target: log.target.merged.clone(),
            turns,
        })
    }

    /// Structure before each turn and the resolved actions of each turn,
    /// under strict replay.
    pub fn replay(&self) -> Result<Vec<(Structure, Vec<Action>)>, DatasetError> {
        if self.schema != SCHEMA_VERSION {
            return Err(DatasetError::Schema { found: self.schema });
        }
        let corrupt = |turn: usize, reason: String| DatasetError::CorruptLog { id: self.id.clone(), turn, reason };
        let mut cur = Structure::new();
        let mut out = Vec::with_capacity(self.turns.len());
        for (k, t) in self.turns.iter().enumerate() {
            let before = cur.clone();
            let mut actions = Vec::with_capacity(t.actions.len());
            for line in &t.actions {
                let token = parse_action_line(line).map_err(|e| corrupt(k, format!("`{line}`: {e}")))?;
                let action = token.resolve(&cur).ok_or_else(|| corrupt(k, format!("`{line}` picks an empty cell")))?;
                cur = apply_action(&cur, &action).map_err(|e| corrupt(k, e.to_string()))?;
                actions.push(action);
            }
            out.push((before, actions));
        }
        Ok(out)
    }

    /// Number of items the log yields.
    pub fn item_count(&self) -> usize {
        self.turns.iter().filter(|t| !t.actions.is_empty()).count()
    }
}

/// Why an action line did not parse.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionParseError {
    #[error("empty line")]
    Empty,
    #[error("unknown verb `{0}`")]
    Verb(String),
    #[error("`{verb}` takes {expected} arguments, got {found}")]
    Arity { verb: &'static str, expected: usize, found: usize },
    #[error("unknown color `{0}`")]
    Color(String),
    #[error("`{0}` is not an integer coordinate")]
    Coordinate(String),
    #[error("cell {0} is outside the build region")]
    OutOfRegion(Cell),
}

/// Parses `place <color> <x> <y> <z>` or `pick <x> <y> <z>`.
pub fn parse_action_line(text: &str) -> Result<ActionToken, ActionParseError> {
    let words: Vec<&str> = text.split_whitespace().collect();
    let (&verb, args) = words.split_first().ok_or(ActionParseError::Empty)?;
    let coords = |xs: &[&str]| -> Result<Cell, ActionParseError> {
        let mut v = [0i32; 3];
        for (slot, s) in v.iter_mut().zip(xs) {
            *slot = s.parse().map_err(|_| ActionParseError::Coordinate(s.to_string()))?;
        }
        let c = Cell::new(v[0], v[1], v[2]);
        if !c.in_region() {
            return Err(ActionParseError::OutOfRegion(c));
        }
        Ok(c)
    };
    match verb {
        "place" => {
            if args.len() != 4 {
                return Err(ActionParseError::Arity { verb: "place", expected: 4, found: args.len() });
            }
            let color = BlockColor::from_str(args[0]).map_err(|_| ActionParseError::Color(args[0].to_string()))?;
            Ok(ActionToken::Place { color, cell: coords(&args[1..])? })
        }
        "pick" => {
            if args.len() != 3 {
                return Err(ActionParseError::Arity { verb: "pick", expected: 3, found: args.len() });
            }
            Ok(ActionToken::Pick { cell: coords(args)? })
        }
        other => Err(ActionParseError::Verb(other.to_string())),
    }
}

/// Parses a block of action lines, skipping blank ones. Returns the parsed
/// tokens and every malformed line (1-based line numbers).
pub fn parse_action_block(text: &str) -> (Vec<ActionToken>, Vec<DatasetError>) {
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match parse_action_line(line) {
            Ok(t) => tokens.push(t),
            Err(error) => errors.push(DatasetError::ActionLine { line: i + 1, error }),
        }
    }
    (tokens, errors)
}

/// One prediction unit: everything said and done before the turn's actions,
/// plus the reference action lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BapItem {
    pub id: String,
    pub game_id: String,
    pub turn: usize,
    /// Prior lines in prompt syntax: `<Speaker> text` and action lines.
    pub context: Vec<String>,
    pub before: Structure,
    pub pose: BuilderPose,
    pub reference: Vec<String>,
    pub board: BoardKind,
    pub multi_interp: bool,
}

impl BapItem {
    /// Reference text as a model would emit it.
    pub fn target_text(&self) -> String {
        self.reference.join("\n")
    }
}

fn utterance_line(u: &Utterance) -> String {
    format!("<{:?}> {}", u.speaker, u.text)
}

/// One item per turn with actions, each carrying the full history.
pub fn extract_items(log: &GameLogRecord) -> Result<Vec<BapItem>, DatasetError> {
    let replayed = log.replay()?;
    let mut history: Vec<String> = Vec::new();
    let mut items = Vec::new();
    for (k, (t, (before, _))) in log.turns.iter().zip(replayed).enumerate() {
        history.extend(t.utterances.iter().map(utterance_line));
        if !t.actions.is_empty() {
            items.push(BapItem {
                id: format!("{}-{k:02}", log.id),
                game_id: log.id.clone(),
                turn: k,
                context: history.clone(),
                board: BoardKind::of(&before),
                before,
                pose: t.pose,
                reference: t.actions.clone(),
                multi_interp: t.flags.multi_interp,
            });
        }
        history.extend(t.actions.iter().cloned());
        history.extend(t.after.iter().map(utterance_line));
    }
    Ok(items)
}

/// A model output for one item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    /// Newline-separated action lines.
    pub output: String,
}

/// Writes one JSON value per line.
pub fn write_jsonl<T: Serialize, W: Write>(mut w: W, values: &[T]) -> Result<(), DatasetError> {
    for v in values {
        serde_json::to_writer(&mut w, v).map_err(|source| DatasetError::Json { line: 0, source })?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads one JSON value per non-blank line.
pub fn read_jsonl<T: DeserializeOwned, R: BufRead>(r: R) -> Result<Vec<T>, DatasetError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| DatasetError::Json { line: i + 1, source })?);
    }
    Ok(out)
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::SyntheticRandom => "synthetic-random",
            Source::SyntheticBlocks => "synthetic-blocks",
            Source::SyntheticShapes => "synthetic-shapes",
            Source::Human => "human",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{game_rng, generate_game, SimConfig};

    fn sample_log(kind: SimulatorKind, index: u64) -> GameLogRecord {
        let mut g = generate_game(&mut game_rng(3, index), kind, &SimConfig::default()).unwrap();
        g.id = format!("g{index}");
        GameLogRecord::from_game(&g).unwrap()
    }

    #[test]
    fn parses_action_lines() {
        assert_eq!(
            parse_action_line("place yellow 5 1 0").unwrap(),
            ActionToken::Place { color: BlockColor::Yellow, cell: Cell::new(5, 1, 0) }
        );
        assert_eq!(parse_action_line("pick 3 2 1").unwrap(), ActionToken::Pick { cell: Cell::new(3, 2, 1) });
        assert_eq!(parse_action_line("place magenta 0 1 0"), Err(ActionParseError::Color("magenta".into())));
        assert!(matches!(parse_action_line("pick 1 2"), Err(ActionParseError::Arity { .. })));
        assert!(matches!(parse_action_line("pick 1 x 2"), Err(ActionParseError::Coordinate(_))));
        assert!(matches!(parse_action_line("pick 1 0 2"), Err(ActionParseError::OutOfRegion(_))));
        let (tokens, errors) = parse_action_block("place red 0 1 0\n\nplace red 0 1\npick 0 1 0\n");
        assert_eq!(tokens.len(), 2);
        assert!(matches!(errors.as_slice(), [DatasetError::ActionLine { line: 3, .. }]));
    }

    #[test]
    fn record_round_trip_is_byte_identical() {
        for kind in [SimulatorKind::Random, SimulatorKind::BlocksForShapes, SimulatorKind::ShapesForShapes] {
            let logs: Vec<GameLogRecord> = (0..10).map(|i| sample_log(kind, i)).collect();
            let mut first = Vec::new();
            write_jsonl(&mut first, &logs).unwrap();
            let back: Vec<GameLogRecord> = read_jsonl(first.as_slice()).unwrap();
            let mut second = Vec::new();
            write_jsonl(&mut second, &back).unwrap();
            assert_eq!(first, second);
            assert_eq!(logs, back);
        }
    }

    #[test]
    fn items_follow_turns() {
        let log = sample_log(SimulatorKind::BlocksForShapes, 1);
        let items = extract_items(&log).unwrap();
        assert_eq!(items.len(), log.turns.len());
        assert_eq!(items[0].board, BoardKind::Empty);
        assert!(items[0].multi_interp);
        assert!(items[1..].iter().all(|i| i.board == BoardKind::NonEmpty && !i.multi_interp));
        // each context extends the previous one
        for w in items.windows(2) {
            assert!(w[1].context.starts_with(&w[0].context));
            assert!(w[1].context[w[0].context.len()..].starts_with(&w[0].reference));
        }
    }

    #[test]
    fn corrupt_logs_are_rejected() {
        let mut log = sample_log(SimulatorKind::Random, 2);
        log.turns[0].actions = vec!["pick 0 1 0".into()];
        assert!(matches!(log.replay(), Err(DatasetError::CorruptLog { turn: 0, .. })));
    }
}
