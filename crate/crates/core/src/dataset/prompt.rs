//! Prompt text in three nested variants: narrative only, plus the Builder's
//! position, plus the current structure.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::BapItem;
use crate::world::{BlockColor, Cell};

pub const PROMPT_HEADER: &str = "Predict the action sequence (AS) for the Minecraft excerpt:";
pub const PROMPT_TERMINATOR: &str = "### AS:";
pub const POSITION_SENTENCE_PREFIX: &str = "Builder's current position is";
const STRUCTURE_HEADER: &str = "Current built structure is:";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PromptVariant {
    /// Dialogue and prior actions.
    #[serde(rename = "N")]
    Narrative,
    /// Adds the Builder's position and yaw.
    #[serde(rename = "N+PosB")]
    WithPosition,
    /// Adds the built structure as well.
    #[serde(rename = "N+PosB+S")]
    WithStructure,
}

impl PromptVariant {
    pub const ALL: [PromptVariant; 3] =
        [PromptVariant::Narrative, PromptVariant::WithPosition, PromptVariant::WithStructure];

    pub fn label(&self) -> &'static str {
        match self {
            PromptVariant::Narrative => "N",
            PromptVariant::WithPosition => "N+PosB",
            PromptVariant::WithStructure => "N+PosB+S",
        }
    }
}

impl fmt::Display for PromptVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for PromptVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PromptVariant::ALL
            .into_iter()
            .find(|v| v.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown prompt variant `{s}` (expected N, N+PosB or N+PosB+S)"))
    }
}

/// Renders the prompt for `item`; every line ends with a newline.
pub fn render_prompt(item: &BapItem, variant: PromptVariant) -> String {
    let mut out = String::new();
    out.push_str(PROMPT_HEADER);
    out.push('\n');
    for line in &item.context {
        out.push_str(line);
        out.push('\n');
    }
    if variant != PromptVariant::Narrative {
        let [x, y, z] = item.pose.loc;
        out.push_str(&format!(
            "{POSITION_SENTENCE_PREFIX} {x:.1} {y:.1} {z:.1} and orientation (yaw) is {:.1} degrees\n",
            item.pose.yaw
        ));
    }
    if variant == PromptVariant::WithStructure {
        out.push_str(STRUCTURE_HEADER);
        out.push('\n');
        let mut blocks: Vec<(Cell, BlockColor)> = item.before.iter().collect();
        blocks.sort_by_key(|b| std::cmp::Reverse((b.0.x, b.0.y, b.0.z)));
        for (c, color) in blocks {
            out.push_str(&format!(" {color} {} {} {}\n", c.x, c.y, c.z));
        }
    }
    out.push_str(PROMPT_TERMINATOR);
    out.push('\n');
    out
}
