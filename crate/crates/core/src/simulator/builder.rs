//! Builder low-level planning: ordering placements and adding temporary
//! supports for blocks that would otherwise float.

use std::collections::{BTreeMap, VecDeque};

use rand::seq::IndexedRandom;
use rand::Rng;

use super::SimError;
use crate::actions::{Action, ActionSequence};
use crate::world::{apply_action, BlockColor, Cell, Structure};

/// Shortest chain of empty cells that makes `target` placeable: the first
/// cell is placeable right now and each following cell touches the previous
/// one by a face, the last touching `target`. Empty when `target` is
/// already placeable; `None` when no chain exists in the region.
pub fn support_chain(world: &Structure, target: &Cell) -> Option<Vec<Cell>> {
    if world.can_place_at(target) {
        return Some(Vec::new());
    }
    let usable = |c: &Cell| c.in_region() && !world.is_occupied(c) && c != target;
    let mut parent: BTreeMap<Cell, Option<Cell>> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for n in target.face_neighbors() {
        if usable(&n) && !parent.contains_key(&n) {
            parent.insert(n, None);
            queue.push_back(n);
        }
    }
    while let Some(c) = queue.pop_front() {
        if world.can_place_at(&c) {
            // walk back toward the target: c is placed first
            let mut chain = vec![c];
            let mut cur = c;
            while let Some(Some(p)) = parent.get(&cur) {
                chain.push(*p);
                cur = *p;
            }
            return Some(chain);
        }
        for n in c.face_neighbors() {
            if usable(&n) && !parent.contains_key(&n) {
                parent.insert(n, Some(c));
                queue.push_back(n);
            }
        }
    }
    None
}

/// Whether placing at `cell` needs temporary supports.
pub fn needs_support(world: &Structure, cell: &Cell) -> bool {
    !world.can_place_at(cell)
}

/// Strictly feasible actions placing `cells` in order. Each floating cell
/// gets a support chain that is removed, in reverse order, right after the
/// cell is placed. Returns the actions and the number of support blocks.
pub fn realize_placements<R: Rng + ?Sized>(
    rng: &mut R,
    world: &Structure,
    cells: &[(Cell, BlockColor)],
) -> Result<(ActionSequence, usize), SimError> {
    let mut cur = world.clone();
    let mut out = Vec::new();
    let mut supports = 0;
    for &(cell, color) in cells {
        let chain = support_chain(&cur, &cell).ok_or(SimError::NoSupport(cell))?;
        let support_color = *BlockColor::ALL.choose(rng).expect("six colors");
        let mut step = Vec::with_capacity(2 * chain.len() + 1);
        step.extend(chain.iter().map(|c| Action::place(support_color, *c)));
        step.push(Action::place(color, cell));
        step.extend(chain.iter().rev().map(|c| Action::remove(support_color, *c)));
        for a in &step {
            cur = apply_action(&cur, a)?;
        }
        supports += chain.len();
        out.extend(step);
    }
    Ok((out, supports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::net_actions;
    use crate::world::{apply_sequence, ApplyMode};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(x: i32, y: i32, z: i32) -> Cell {
        Cell::new(x, y, z)
    }

    #[test]
    fn floating_cell_gets_a_vertical_chain() {
        let empty = Structure::new();
        let chain = support_chain(&empty, &c(0, 3, 0)).unwrap();
        assert_eq!(chain.len(), 2);
        assert!(chain[0].on_ground());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (seq, supports) = realize_placements(&mut rng, &empty, &[(c(0, 3, 0), BlockColor::Red)]).unwrap();
        assert_eq!(supports, 2);
        assert_eq!(seq.len(), 1 + 2 * supports);
        apply_sequence(&empty, &seq, ApplyMode::Strict).unwrap();
        let net = net_actions(&empty, &seq).unwrap();
        assert_eq!(net.len(), 1);
        assert!(net.contains(&Action::place(BlockColor::Red, c(0, 3, 0))));
    }

    #[test]
    fn supported_cells_need_nothing() {
        let s: Structure = [(c(0, 1, 0), BlockColor::Blue)].into_iter().collect();
        assert_eq!(support_chain(&s, &c(0, 2, 0)).unwrap(), Vec::<Cell>::new());
        let chain = support_chain(&s, &c(1, 2, 0)).unwrap();
        assert_eq!(chain.len(), 1);
    }

    #[test]
    fn plane_fill_prefixes_are_feasible() {
        let empty = Structure::new();
        let cells: Vec<(Cell, BlockColor)> = (0..3)
            .flat_map(|y| (0..3).map(move |x| (c(x, 1 + y, 0), BlockColor::Green)))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (seq, supports) = realize_placements(&mut rng, &empty, &cells).unwrap();
        assert_eq!(supports, 0);
        assert_eq!(seq.len(), 9);
        for k in 0..=seq.len() {
            apply_sequence(&empty, &seq[..k], ApplyMode::Strict).unwrap();
        }
    }
}
