use std::collections::BTreeSet;

use bapkit_core::actions::ActionToken;
use bapkit_core::dataset::{
    extract_items, parse_action_line, render_prompt, BapItem, GameLogRecord, PromptVariant, PROMPT_TERMINATOR,
};
use bapkit_core::metrics::BoardKind;
use bapkit_core::simulator::{game_rng, generate_game, SimConfig, SimulatorKind};
use bapkit_core::world::{BlockColor, BuilderPose, Cell, Structure};

const GOLDEN_N: &str = include_str!("golden/excerpt_n.txt");
const GOLDEN_POSB: &str = include_str!("golden/excerpt_n_posb.txt");
const GOLDEN_POSB_S: &str = include_str!("golden/excerpt_n_posb_s.txt");
const GOLDEN_TARGET: &str = include_str!("golden/excerpt_target.txt");

/// The worked excerpt: context lines, the board before the turn and the
/// Builder's pose.
fn excerpt_item() -> BapItem {
    let context = GOLDEN_N.lines().skip(1).take_while(|l| *l != PROMPT_TERMINATOR).map(String::from).collect();
    let blocks = [
        (5, 1, 0, BlockColor::Yellow),
        (4, 1, 1, BlockColor::Yellow),
        (4, 1, -1, BlockColor::Yellow),
        (3, 1, 2, BlockColor::Yellow),
        (3, 1, -2, BlockColor::Yellow),
        (2, 1, 2, BlockColor::Orange),
        (1, 2, 2, BlockColor::Orange),
    ];
    // insertion order differs from the rendered order on purpose
    let before: Structure = blocks.iter().rev().map(|&(x, y, z, c)| (Cell::new(x, y, z), c)).collect();
    BapItem {
        id: "excerpt".into(),
        game_id: "excerpt".into(),
        turn: 0,
        context,
        board: BoardKind::of(&before),
        before,
        pose: BuilderPose::new([0.2, 1.0, -0.4], -6.5, 0.0),
        reference: GOLDEN_TARGET.lines().map(String::from).collect(),
        multi_interp: false,
    }
}

#[test]
fn excerpt_renders_byte_exactly() {
    let item = excerpt_item();
    assert_eq!(render_prompt(&item, PromptVariant::Narrative), GOLDEN_N);
    assert_eq!(render_prompt(&item, PromptVariant::WithPosition), GOLDEN_POSB);
    assert_eq!(render_prompt(&item, PromptVariant::WithStructure), GOLDEN_POSB_S);
    assert_eq!(item.target_text() + "\n", GOLDEN_TARGET);
}

#[test]
fn excerpt_lines_parse() {
    assert_eq!(
        parse_action_line("place yellow 5 1 0").unwrap(),
        ActionToken::Place { color: BlockColor::Yellow, cell: Cell::new(5, 1, 0) }
    );
    for line in GOLDEN_TARGET.lines() {
        assert_eq!(parse_action_line(line).unwrap().to_string(), line);
    }
}

#[test]
fn structure_section_matches_replay() {
    for kind in [SimulatorKind::Random, SimulatorKind::BlocksForShapes, SimulatorKind::ShapesForShapes] {
        for i in 0..20 {
            let mut g = generate_game(&mut game_rng(21, i), kind, &SimConfig::default()).unwrap();
            g.id = format!("g{i}");
            let states = g.states().unwrap();
            let log = GameLogRecord::from_game(&g).unwrap();
            for item in extract_items(&log).unwrap() {
                let text = render_prompt(&item, PromptVariant::WithStructure);
                let section: BTreeSet<String> = text
                    .split("Current built structure is:\n")
                    .nth(1)
                    .unwrap()
                    .lines()
                    .filter(|l| l.starts_with(' '))
                    .map(String::from)
                    .collect();
                let expected: BTreeSet<String> = states[item.turn]
                    .iter()
                    .map(|(c, color)| format!(" {color} {} {} {}", c.x, c.y, c.z))
                    .collect();
                assert_eq!(section, expected);
            }
        }
    }
}
