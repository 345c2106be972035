use bapkit_core::actions::{net_actions, Action};
use bapkit_core::geometry::{classify_anchored_direction, relation_offset_set};
use bapkit_core::simulator::{game_rng, generate_game, GameLog, SimConfig, SimulatorKind};
use bapkit_core::world::{apply_sequence, ApplyMode};

const KINDS: [SimulatorKind; 3] = [SimulatorKind::Random, SimulatorKind::BlocksForShapes, SimulatorKind::ShapesForShapes];

fn games(kind: SimulatorKind, n: u64) -> Vec<GameLog> {
    let cfg = SimConfig::default();
    (0..n)
        .map(|i| generate_game(&mut game_rng(11, i), kind, &cfg).unwrap_or_else(|e| panic!("{kind:?} game {i}: {e}")))
        .collect()
}

#[test]
fn games_replay_strictly_and_supports_cancel() {
    for kind in KINDS {
        for g in games(kind, 150) {
            let states = g.states().expect("strict replay");
            for (k, t) in g.turns.iter().enumerate() {
                let net = net_actions(&states[k], &t.actions).unwrap();
                assert_eq!(net.len(), t.plan.intended, "{kind:?} turn {k}");
                let placed: Vec<&Action> = net.iter().filter(|a| a.is_place()).collect();
                for a in placed {
                    assert_eq!(states[k + 1].get(&a.cell), Some(a.color));
                }
            }
            if kind != SimulatorKind::Random {
                assert_eq!(states.last().unwrap(), &g.target.merged);
            }
            assert!(apply_sequence(&states[0], &g.turns.iter().flat_map(|t| t.actions.clone()).collect::<Vec<_>>(), ApplyMode::Strict).is_ok());
        }
    }
}

#[test]
fn uttered_relations_round_trip() {
    for kind in KINDS {
        for g in games(kind, 150) {
            for t in &g.turns {
                if let (Some(r), Some(rel), Some(ext), Some(p)) =
                    (t.plan.reference, t.plan.relation, t.plan.relation_extent, t.plan.located)
                {
                    assert!(relation_offset_set(&rel, &r, &t.pose, ext).contains(&p));
                }
                for gr in &t.plan.growth {
                    assert_eq!(classify_anchored_direction(gr.step, &t.pose).unwrap(), gr.direction);
                }
            }
        }
    }
}

#[test]
fn same_seed_same_game() {
    let cfg = SimConfig::default();
    for kind in KINDS {
        let a = generate_game(&mut game_rng(5, 9), kind, &cfg).unwrap();
        let b = generate_game(&mut game_rng(5, 9), kind, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
