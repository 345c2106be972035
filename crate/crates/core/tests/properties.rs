use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bapkit_core::actions::{net_actions, structure_diff, Action, ActionToken, NetActionSet};
use bapkit_core::dataset::parse_action_line;
use bapkit_core::geometry::{
    classify_relation, perspective_delta, perspective_offset, relation_offset_set, wrap_degrees, world_delta,
};
use bapkit_core::metrics::{fairer_prf, shape_prf, shape_prf_exhaustive, strict_prf, EvalItem};
use bapkit_core::shapes::{materialize, Direction, ShapeInstance, ShapeKind};
use bapkit_core::simulator::{game_rng, generate_game, SimConfig, SimulatorKind};
use bapkit_core::world::{
    apply_sequence, is_connected, is_feasible, ApplyMode, BlockColor, BuilderPose, Cell, Structure,
};

fn cell() -> impl Strategy<Value = Cell> {
    (-5i32..=5, 1i32..=9, -5i32..=5).prop_map(|(x, y, z)| Cell::new(x, y, z))
}

fn color() -> impl Strategy<Value = BlockColor> {
    prop::sample::select(BlockColor::ALL.to_vec())
}

fn pose() -> impl Strategy<Value = BuilderPose> {
    (-1800i32..=1800, -900i32..=900).prop_map(|(y, p)| BuilderPose::new([0.0, 1.0, 0.0], y as f64 / 10.0, p as f64 / 10.0))
}

/// A strictly feasible sequence grown from a random structure.
fn feasible_walk(seed: u64, blocks: usize, len: usize) -> (Structure, Vec<Action>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let region: Vec<Cell> = Cell::region().collect();
    let step = |s: &Structure, rng: &mut ChaCha8Rng| loop {
        let a = if !s.is_empty() && rng.random_bool(0.3) {
            let (c, col) = *s.iter().collect::<Vec<_>>().choose(rng).unwrap();
            Action::remove(col, c)
        } else {
            Action::place(*BlockColor::ALL.choose(rng).unwrap(), *region.choose(rng).unwrap())
        };
        if is_feasible(&a, s).unwrap() {
            return a;
        }
    };
    let mut before = Structure::new();
    for _ in 0..blocks {
        let a = step(&before, &mut rng);
        before = apply_sequence(&before, &[a], ApplyMode::Strict).unwrap();
    }
    let mut s = before.clone();
    let mut seq = Vec::new();
    for _ in 0..len {
        let a = step(&s, &mut rng);
        s = apply_sequence(&s, &[a], ApplyMode::Strict).unwrap();
        seq.push(a);
    }
    (before, seq)
}

fn ground_placements(cells: &[(i32, i32)], color: BlockColor) -> NetActionSet {
    let before = Structure::new();
    let seq: Vec<Action> = cells.iter().map(|&(x, z)| Action::place(color, Cell::new(x, 1, z))).collect();
    net_actions(&before, &seq).unwrap()
}

proptest! {
    #[test]
    fn perspective_and_world_deltas_invert(d in prop::array::uniform3(-10i32..=10), pose in pose()) {
        prop_assert_eq!(world_delta(perspective_delta(d, &pose), &pose), d);
    }

    #[test]
    fn wrapped_angles_stay_in_range(a in -2000.0f64..2000.0) {
        let w = wrap_degrees(a);
        prop_assert!((-180.0..=180.0).contains(&w));
        prop_assert!(((a - w) / 360.0 - ((a - w) / 360.0).round()).abs() < 1e-9);
    }

    #[test]
    fn a_cell_lies_in_the_set_of_its_relation(p in cell(), r in cell(), pose in pose()) {
        prop_assume!(p != r);
        let rel = classify_relation(&p, &r, &pose).unwrap();
        let extent = perspective_offset(&p, &r, &pose).iter().map(|v| v.abs()).max().unwrap();
        prop_assert!(relation_offset_set(&rel, &r, &pose, extent).contains(&p));
        prop_assert_eq!(rel.arity(), perspective_offset(&p, &r, &pose).iter().filter(|v| **v != 0).count());
    }

    #[test]
    fn action_lines_round_trip(c in cell(), col in color(), place in any::<bool>()) {
        let token = if place { ActionToken::Place { color: col, cell: c } } else { ActionToken::Pick { cell: c } };
        prop_assert_eq!(parse_action_line(&token.to_string()).unwrap(), token);
    }

    #[test]
    fn undoing_a_sequence_leaves_no_net_actions(seed in any::<u64>(), blocks in 0usize..8, len in 1usize..8) {
        let (before, seq) = feasible_walk(seed, blocks, len);
        let after = apply_sequence(&before, &seq, ApplyMode::Strict).unwrap();
        prop_assert_eq!(net_actions(&before, &seq).unwrap(), structure_diff(&before, &after));
        let mut round = seq.clone();
        round.extend(seq.iter().rev().map(Action::inverse));
        prop_assert!(net_actions(&before, &round).unwrap().is_empty());
    }

    #[test]
    fn strict_f1_is_bounded_and_symmetric(a in any::<u64>(), b in any::<u64>()) {
        let (before, x) = feasible_walk(a, 3, 5);
        let (_, y) = feasible_walk(b, 0, 5);
        let (nx, ny) = (net_actions(&before, &x).unwrap(), net_actions(&before, &y).unwrap());
        let f = strict_prf(&nx, &ny).f1();
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((f - strict_prf(&ny, &nx).f1()).abs() < 1e-12);
    }

    #[test]
    fn pruned_shape_score_matches_exhaustive(a in any::<u64>(), b in any::<u64>()) {
        let (before, x) = feasible_walk(a, 4, 6);
        let (_, y) = feasible_walk(b, 4, 6);
        let (nx, ny) = (net_actions(&before, &x).unwrap(), net_actions(&before, &y).unwrap());
        prop_assert_eq!(shape_prf(&nx, &ny), shape_prf_exhaustive(&nx, &ny));
        prop_assert_eq!(shape_prf(&ny, &ny).f1(), 1.0);
    }

    #[test]
    fn moved_predictions_score_fully_on_multi_items(
        cells in prop::collection::btree_set((-2i32..=2, -2i32..=2), 1..6),
        dx in -3i32..=3,
        dz in -3i32..=3,
        col in color(),
    ) {
        let cells: Vec<(i32, i32)> = cells.into_iter().collect();
        let moved: Vec<(i32, i32)> = cells.iter().map(|&(x, z)| (x + dx, z + dz)).collect();
        let reference: Vec<Action> = ground_placements(&cells, col).iter().copied().collect();
        let predicted: Vec<Action> = ground_placements(&moved, col).iter().copied().collect();
        let item = EvalItem::new(Structure::new(), reference, predicted, true);
        prop_assert_eq!(fairer_prf(&item).unwrap().f1(), 1.0);
    }

    #[test]
    fn shapes_materialize_connected(
        kind in prop::sample::select(ShapeKind::ALL.to_vec()),
        a in 3u32..=5,
        b in 2u32..=5,
        dirs in prop::sample::select(vec![
            (Direction::PosX, Direction::PosZ),
            (Direction::NegZ, Direction::PosX),
            (Direction::PosX, Direction::PosY),
            (Direction::PosY, Direction::NegX),
        ]),
    ) {
        let b = if kind == ShapeKind::TShape { b | 1 } else { b };
        let shape = ShapeInstance { kind, color: BlockColor::Red, anchor: Cell::new(0, 1, 0), primary: dirs.0, secondary: dirs.1, sizes: (a, b) };
        if let Ok(cells) = materialize(&shape) {
            prop_assert_eq!(cells.len(), shape.block_count());
            let s: Structure = cells.iter().map(|c| (*c, BlockColor::Red)).collect();
            prop_assert!(is_connected(&s));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn any_seed_yields_a_replayable_game(
        seed in any::<u64>(),
        kind in prop::sample::select(vec![SimulatorKind::Random, SimulatorKind::BlocksForShapes, SimulatorKind::ShapesForShapes]),
    ) {
        let g = generate_game(&mut game_rng(seed, 0), kind, &SimConfig::default()).unwrap();
        let states = g.states().unwrap();
        for (k, t) in g.turns.iter().enumerate() {
            prop_assert_eq!(net_actions(&states[k], &t.actions).unwrap().len(), t.plan.intended);
        }
    }
}
