//! Adapter for human game logs stored as a sequence of world-state
//! snapshots.
//!
//! Expected input: a JSON object
//!
//! ```text
//! {
//!   "WorldStates": [
//!     {
//!       "BuilderPosition": { "X": f64, "Y": f64, "Z": f64, "Yaw": f64, "Pitch": f64 },
//!       "BlocksInGrid": [ { "X": i32, "Y": i32, "Z": i32, "Colour": "red" }, ... ],
//!       "ChatHistory": [ "<Architect> ...", "<Builder> ...", ... ]
//!     },
//!     ...
//!   ]
//! }
//! ```
//!
//! `ChatHistory` is cumulative. Consecutive snapshots are diffed: chat lines
//! that appear after some blocks changed start a new turn, and block changes
//! become that turn's actions (removals first). Items are flagged
//! single-interpretation; the last snapshot is the target.

use std::str::FromStr;

use serde::Deserialize;

use super::{DatasetError, GameLogRecord, ItemFlags, Source, TurnRecord, SCHEMA_VERSION};
use crate::actions::{structure_diff, Action, ActionKind};
use crate::metrics::BoardKind;
use crate::simulator::Utterance;
use crate::world::{BlockColor, BuilderPose, Cell, Structure};

#[derive(Debug, Deserialize)]
#[serde(rename_all = "PascalCase")]
struct RawLog {
    world_states: Vec<RawState>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "PascalCase")]
struct RawState {
    builder_position: RawPose,
    #[serde(default)]
    blocks_in_grid: Vec<RawBlock>,
    #[serde(default)]
    chat_history: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "PascalCase")]
struct RawPose {
    x: f64,
    y: f64,
    z: f64,
    yaw: f64,
    pitch: f64,
}

#[derive(Debug, Deserialize)]
struct RawBlock {
    #[serde(rename = "X")]
    x: i32,
    #[serde(rename = "Y")]
    y: i32,
    #[serde(rename = "Z")]
    z: i32,
    #[serde(rename = "Colour")]
    colour: String,
}

fn structure(state: &RawState, id: &str, k: usize) -> Result<Structure, DatasetError> {
    let corrupt = |reason: String| DatasetError::CorruptLog { id: id.to_string(), turn: k, reason };
    let mut s = Structure::new();
    for b in &state.blocks_in_grid {
        let color = BlockColor::from_str(&b.colour).map_err(|e| corrupt(e.to_string()))?;
        s.insert(Cell::new(b.x, b.y, b.z), color).map_err(|e| corrupt(e.to_string()))?;
    }
    Ok(s)
}

fn utterance(line: &str) -> Utterance {
    match line.split_once("> ") {
        Some(("<Builder", rest)) => Utterance::builder(rest),
        Some(("<Architect", rest)) => Utterance::architect(rest),
        _ => Utterance::architect(line),
    }
}

/// Converts one snapshot log into a [`GameLogRecord`].
pub fn import_log(id: &str, json: &str) -> Result<GameLogRecord, DatasetError> {
    let raw: RawLog = serde_json::from_str(json).map_err(|source| DatasetError::Json { line: 1, source })?;
    let mut prev = Structure::new();
    let mut seen_chat = 0;
    let mut turns: Vec<TurnRecord> = Vec::new();
    for (k, state) in raw.world_states.iter().enumerate() {
        let cur = structure(state, id, k)?;
        let new_chat: Vec<Utterance> =
            state.chat_history.iter().skip(seen_chat).map(|l| utterance(l)).collect();
        seen_chat = seen_chat.max(state.chat_history.len());
        let pose = BuilderPose::new(
            [state.builder_position.x, state.builder_position.y, state.builder_position.z],
            state.builder_position.yaw,
            state.builder_position.pitch,
        );
        let opens_turn = !new_chat.is_empty() && turns.last().is_none_or(|t| !t.actions.is_empty());
        if opens_turn || turns.is_empty() {
            let board_kind = BoardKind::of(&prev);
            turns.push(TurnRecord {
                pose: super::quantized_pose(&pose),
                utterances: new_chat,
                actions: Vec::new(),
                after: Vec::new(),
                flags: ItemFlags { board_kind, multi_interp: false },
                relation: None,
            });
        } else if let Some(t) = turns.last_mut() {
            t.utterances.extend(new_chat);
        }
        let diff = structure_diff(&prev, &cur);
        let turn = turns.last_mut().expect("a turn is open");
        let (removals, placements): (Vec<&Action>, Vec<&Action>) = diff.iter().partition(|a| a.kind == ActionKind::Remove);
        turn.actions.extend(removals.into_iter().chain(placements).map(|a| a.token().to_string()));
        prev = cur;
    }
    turns.retain(|t| !t.actions.is_empty() || !t.utterances.is_empty());
    Ok(GameLogRecord { schema: SCHEMA_VERSION, id: id.to_string(), source: Source::Human, target: prev, turns })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshots_become_turns() {
        let json = r#"{"WorldStates": [
            {"BuilderPosition": {"X": 0, "Y": 1, "Z": -4, "Yaw": 0, "Pitch": 10},
             "BlocksInGrid": [], "ChatHistory": ["<Architect> put a red block in the middle"]},
            {"BuilderPosition": {"X": 0, "Y": 1, "Z": -4, "Yaw": 0, "Pitch": 10},
             "BlocksInGrid": [{"X": 0, "Y": 1, "Z": 0, "Colour": "red"}],
             "ChatHistory": ["<Architect> put a red block in the middle"]},
            {"BuilderPosition": {"X": 1, "Y": 1, "Z": -4, "Yaw": 5, "Pitch": 10},
             "BlocksInGrid": [{"X": 0, "Y": 1, "Z": 0, "Colour": "red"}, {"X": 0, "Y": 2, "Z": 0, "Colour": "blue"}],
             "ChatHistory": ["<Architect> put a red block in the middle", "<Architect> now blue on top"]}
        ]}"#;
        let log = import_log("h1", json).unwrap();
        assert_eq!(log.turns.len(), 2);
        assert_eq!(log.turns[0].actions, vec!["place red 0 1 0".to_string()]);
        assert_eq!(log.turns[1].actions, vec!["place blue 0 2 0".to_string()]);
        assert_eq!(log.turns[1].flags.board_kind, BoardKind::NonEmpty);
        assert_eq!(log.target.len(), 2);
        assert_eq!(super::super::extract_items(&log).unwrap().len(), 2);
    }
}
