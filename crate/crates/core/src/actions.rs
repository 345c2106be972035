//! Action algebra: typed placements/removals, inverses, net-action sets and
//! structure distance.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::world::{apply_sequence, ApplyMode, BlockColor, Cell, Structure, WorldError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ActionKind {
    Place,
    Remove,
}

impl ActionKind {
    pub fn flipped(self) -> Self {
        match self {
            ActionKind::Place => ActionKind::Remove,
            ActionKind::Remove => ActionKind::Place,
        }
    }
}

/// A typed block change `(kind, color, cell)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Action {
    pub kind: ActionKind,
    pub color: BlockColor,
    pub cell: Cell,
}

impl Action {
    pub fn place(color: BlockColor, cell: Cell) -> Self {
        Action { kind: ActionKind::Place, color, cell }
    }

    pub fn remove(color: BlockColor, cell: Cell) -> Self {
        Action { kind: ActionKind::Remove, color, cell }
    }

    pub fn inverse(&self) -> Self {
        Action { kind: self.kind.flipped(), ..*self }
    }

    pub fn is_place(&self) -> bool {
        self.kind == ActionKind::Place
    }

    /// The textual form used in prompts: removals drop their color.
    pub fn token(&self) -> ActionToken {
        match self.kind {
            ActionKind::Place => ActionToken::Place { color: self.color, cell: self.cell },
            ActionKind::Remove => ActionToken::Pick { cell: self.cell },
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ActionKind::Place => "place",
            ActionKind::Remove => "remove",
        };
        write!(f, "{kind}({}, {})", self.color, self.cell)
    }
}

pub type ActionSequence = Vec<Action>;

/// An action as it appears in text: `place <color> x y z` or `pick x y z`.
///
/// A pick carries no color; it is resolved against the structure it is
/// applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActionToken {
    Place { color: BlockColor, cell: Cell },
    Pick { cell: Cell },
}

impl ActionToken {
    pub fn cell(&self) -> Cell {
        match self {
            ActionToken::Place { cell, .. } | ActionToken::Pick { cell } => *cell,
        }
    }

    /// Resolves against the current structure. A pick of an empty cell
    /// resolves to `None`.
    pub fn resolve(&self, s: &Structure) -> Option<Action> {
        match *self {
            ActionToken::Place { color, cell } => Some(Action::place(color, cell)),
            ActionToken::Pick { cell } => s.get(&cell).map(|color| Action::remove(color, cell)),
        }
    }
}

impl fmt::Display for ActionToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionToken::Place { color, cell } => {
                write!(f, "place {} {} {} {}", color, cell.x, cell.y, cell.z)
            }
            ActionToken::Pick { cell } => write!(f, "pick {} {} {}", cell.x, cell.y, cell.z),
        }
    }
}

/// Every legal action value over the build region: six placements and one
/// removal per cell.
pub fn action_space() -> impl Iterator<Item = ActionToken> {
    Cell::region().flat_map(|cell| {
        BlockColor::ALL
            .into_iter()
            .map(move |color| ActionToken::Place { color, cell })
            .chain(std::iter::once(ActionToken::Pick { cell }))
    })
}

/// Replays tokens in relaxed mode, resolving each pick's color against the
/// state at that point. Returns the resolved actions (unresolvable picks are
/// dropped) and the final structure.
pub fn resolve_tokens(before: &Structure, tokens: &[ActionToken]) -> Result<(ActionSequence, Structure), WorldError> {
    let mut cur = before.clone();
    let mut out = Vec::with_capacity(tokens.len());
    for token in tokens {
        if let Some(action) = token.resolve(&cur) {
            cur = apply_sequence(&cur, std::slice::from_ref(&action), ApplyMode::Relaxed)?;
            out.push(action);
        }
    }
    Ok((out, cur))
}

/// Order-free, cancellation-reduced effect of an action sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct NetActionSet {
    actions: BTreeSet<Action>,
}

impl NetActionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn contains(&self, a: &Action) -> bool {
        self.actions.contains(a)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Action> + '_ {
        self.actions.iter()
    }

    /// Number of actions present in both sets (full-triplet equality).
    pub fn intersection_count(&self, other: &NetActionSet) -> usize {
        self.actions.intersection(&other.actions).count()
    }

    /// Applies a cell mapping to every action, keeping kinds and colors.
    pub fn map_cells(&self, mut f: impl FnMut(Cell) -> Cell) -> NetActionSet {
        NetActionSet {
            actions: self.actions.iter().map(|a| Action { cell: f(a.cell), ..*a }).collect(),
        }
    }
}

impl FromIterator<Action> for NetActionSet {
    fn from_iter<T: IntoIterator<Item = Action>>(iter: T) -> Self {
        NetActionSet { actions: iter.into_iter().collect() }
    }
}

impl<'a> IntoIterator for &'a NetActionSet {
    type Item = &'a Action;
    type IntoIter = std::collections::btree_set::Iter<'a, Action>;

    fn into_iter(self) -> Self::IntoIter {
        self.actions.iter()
    }
}

/// The state delta between two structures. A recolored cell yields a
/// removal of the old color and a placement of the new one.
pub fn structure_diff(before: &Structure, after: &Structure) -> NetActionSet {
    let mut out = BTreeSet::new();
    for (cell, old) in before.iter() {
        match after.get(&cell) {
            None => {
                out.insert(Action::remove(old, cell));
            }
            Some(new) if new != old => {
                out.insert(Action::remove(old, cell));
                out.insert(Action::place(new, cell));
            }
            Some(_) => {}
        }
    }
    for (cell, new) in after.iter() {
        if !before.is_occupied(&cell) {
            out.insert(Action::place(new, cell));
        }
    }
    NetActionSet { actions: out }
}

/// Net actions of `seq` applied (relaxed) to `before`, computed by replay
/// and diff.
pub fn net_actions(before: &Structure, seq: &[Action]) -> Result<NetActionSet, WorldError> {
    let after = apply_sequence(before, seq, ApplyMode::Relaxed)?;
    Ok(structure_diff(before, &after))
}

pub fn distance(a: &Structure, b: &Structure) -> usize {
    structure_diff(a, b).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use BlockColor::*;

    fn c(x: i32, y: i32, z: i32) -> Cell {
        Cell::new(x, y, z)
    }

    #[test]
    fn inverse_flips_kind() {
        assert_eq!(Action::place(Red, c(0, 1, 0)).inverse(), Action::remove(Red, c(0, 1, 0)));
        assert_eq!(Action::remove(Blue, c(1, 2, 3)).inverse(), Action::place(Blue, c(1, 2, 3)));
    }

    #[test]
    fn diff_cases() {
        let empty = Structure::new();
        let blue: Structure = [(c(0, 1, 0), Blue)].into_iter().collect();
        let red: Structure = [(c(0, 1, 0), Red)].into_iter().collect();
        let d = structure_diff(&empty, &blue);
        assert_eq!(d, [Action::place(Blue, c(0, 1, 0))].into_iter().collect());
        let d = structure_diff(&red, &blue);
        assert_eq!(
            d,
            [Action::remove(Red, c(0, 1, 0)), Action::place(Blue, c(0, 1, 0))].into_iter().collect()
        );
        assert!(structure_diff(&blue, &blue).is_empty());
    }

    #[test]
    fn net_actions_cancel_pairs() {
        let cell = c(0, 1, 0);
        let seq = [Action::place(Red, cell), Action::remove(Red, cell), Action::place(Blue, cell)];
        let net = net_actions(&Structure::new(), &seq).unwrap();
        assert_eq!(net, [Action::place(Blue, cell)].into_iter().collect());
        assert!(net_actions(&Structure::new(), &[]).unwrap().is_empty());
    }

    #[test]
    fn net_actions_of_worked_prompt_output() {
        // Structure context from the prompt example, then its ground-truth output.
        let before: Structure = [
            (c(5, 1, 0), Yellow),
            (c(4, 1, 1), Yellow),
            (c(4, 1, -1), Yellow),
            (c(3, 1, 2), Yellow),
            (c(3, 1, -2), Yellow),
            (c(2, 1, 2), Orange),
            (c(1, 2, 2), Orange),
        ]
        .into_iter()
        .collect();
        let tokens = [
            ActionToken::Place { color: Orange, cell: c(1, 3, 2) },
            ActionToken::Place { color: Orange, cell: c(0, 3, 2) },
            ActionToken::Pick { cell: c(1, 3, 2) },
        ];
        let (seq, _) = resolve_tokens(&before, &tokens).unwrap();
        assert_eq!(seq[2], Action::remove(Orange, c(1, 3, 2)));
        // strict replay succeeds: the example output is a feasible sequence
        apply_sequence(&before, &seq, ApplyMode::Strict).unwrap();
        let net = net_actions(&before, &seq).unwrap();
        assert_eq!(net, [Action::place(Orange, c(0, 3, 2))].into_iter().collect());
    }

    #[test]
    fn distances() {
        let empty = Structure::new();
        let row: Structure = (0..3).map(|x| (c(x, 1, 0), Red)).collect();
        assert_eq!(distance(&empty, &row), 3);
        assert_eq!(distance(&row, &row), 0);
        let red: Structure = [(c(0, 1, 0), Red)].into_iter().collect();
        let blue: Structure = [(c(0, 1, 0), Blue)].into_iter().collect();
        assert_eq!(distance(&red, &blue), 2);
    }

    #[test]
    fn action_space_has_7623_values() {
        assert_eq!(action_space().count(), 7623);
        let distinct: BTreeSet<_> = action_space().collect();
        assert_eq!(distinct.len(), 7623);
    }

    #[test]
    fn token_rendering() {
        assert_eq!(Action::place(Yellow, c(5, 1, 0)).token().to_string(), "place yellow 5 1 0");
        assert_eq!(Action::remove(Red, c(3, 2, 1)).token().to_string(), "pick 3 2 1");
    }
}
