//! Finite-horizon single-selection games: One names a move from a fixed pool,
//! Two picks one item of it, and after `horizon` rounds a predicate on the
//! picked items decides the winner.

mod solve;
mod strategy;
mod transversal;

pub use solve::{s1_holds, solve, SolveOptions, SolveReport, DEFAULT_BUDGET};
pub use strategy::{all_move_sequences, first_loss_for_one, first_loss_for_two, play, OneStrategy, Play, TwoStrategy};
pub use transversal::minimal_transversals;

use crate::funcspace::{FunctionGrid, GridCondition};
use crate::topology::{CoverClass, FiniteSpace, PointSet};
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Opaque item id: an open-set bitmask, a point index, a grid member index or
/// an abstract label, depending on the win condition.
pub type Item = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Player {
    One,
    Two,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("the move pool is empty")]
    EmptyPool,
    #[error("move {0} is empty")]
    EmptyMove(usize),
    #[error("move {index} repeats item {item}")]
    DuplicateItem { index: usize, item: Item },
    #[error("move {0} repeats an earlier move")]
    DuplicateMove(usize),
    #[error("item {0} is not valid for the win condition")]
    ItemOutOfUniverse(Item),
    #[error("invalid win condition: {0}")]
    InvalidWin(String),
    #[error("malformed strategy: {0}")]
    MalformedStrategy(String),
    #[error("node budget of {budget} exceeded")]
    BudgetExceeded { budget: u64 },
}

pub type Predicate = Arc<dyn Fn(&[Item]) -> bool + Send + Sync>;

/// Decides whether Two wins a complete play.
#[derive(Clone)]
pub enum WinCondition {
    Always,
    Not(Box<WinCondition>),
    Class {
        space: Arc<FiniteSpace>,
        class: CoverClass,
    },
    Grid {
        grid: Arc<FunctionGrid>,
        condition: GridCondition,
    },
    /// The winning item sequences, listed.
    Table(BTreeSet<Vec<Item>>),
    Custom {
        name: String,
        predicate: Predicate,
    },
}

impl fmt::Debug for WinCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

impl std::ops::Not for WinCondition {
    type Output = WinCondition;

    fn not(self) -> WinCondition {
        match self {
            WinCondition::Not(inner) => *inner,
            other => WinCondition::Not(Box::new(other)),
        }
    }
}

impl WinCondition {
    pub fn custom(name: impl Into<String>, predicate: impl Fn(&[Item]) -> bool + Send + Sync + 'static) -> Self {
        WinCondition::Custom { name: name.into(), predicate: Arc::new(predicate) }
    }

    pub fn class(space: &Arc<FiniteSpace>, class: CoverClass) -> Self {
        WinCondition::Class { space: Arc::clone(space), class }
    }

    pub fn holds(&self, items: &[Item]) -> bool {
        match self {
            WinCondition::Always => true,
            WinCondition::Not(inner) => !inner.holds(items),
            WinCondition::Class { space, class } => class.holds(space, items),
            WinCondition::Grid { grid, condition } => condition.holds(grid, items).unwrap_or(false),
            WinCondition::Table(t) => t.contains(items),
            WinCondition::Custom { predicate, .. } => predicate(items),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            WinCondition::Always => "always".into(),
            WinCondition::Not(inner) => format!("not({})", inner.describe()),
            WinCondition::Class { class, .. } => format!("{class:?}"),
            WinCondition::Grid { condition, .. } => format!("{condition:?}"),
            WinCondition::Table(t) => format!("table({} winning sequences)", t.len()),
            WinCondition::Custom { name, .. } => name.clone(),
        }
    }

    fn check_item(&self, item: Item) -> Result<(), GameError> {
        let ok = match self {
            WinCondition::Always | WinCondition::Table(_) | WinCondition::Custom { .. } => true,
            WinCondition::Not(inner) => return inner.check_item(item),
            WinCondition::Class { space, class } => {
                if class.items_are_points() {
                    (item as usize) < space.point_count()
                } else {
                    space.is_open(PointSet(item))
                }
            }
            WinCondition::Grid { grid, .. } => (item as usize) < grid.len(),
        };
        if ok {
            Ok(())
        } else {
            Err(GameError::ItemOutOfUniverse(item))
        }
    }

    fn validate(&self) -> Result<(), GameError> {
        match self {
            WinCondition::Not(inner) => inner.validate(),
            WinCondition::Class { space, class } => {
                class.validate(space).map_err(|e| GameError::InvalidWin(e.to_string()))
            }
            _ => Ok(()),
        }
    }
}

/// A validated game: pool of moves, horizon, and Two's win condition.
#[derive(Debug, Clone)]
pub struct GameSpec {
    horizon: usize,
    pool: Vec<Vec<Item>>,
    win: WinCondition,
}

impl GameSpec {
    pub fn new(horizon: usize, pool: Vec<Vec<Item>>, win: WinCondition) -> Result<Self, GameError> {
        if horizon == 0 {
            return Err(GameError::ZeroHorizon);
        }
        if pool.is_empty() {
            return Err(GameError::EmptyPool);
        }
        win.validate()?;
        let mut seen_moves: BTreeSet<Vec<Item>> = BTreeSet::new();
        for (index, m) in pool.iter().enumerate() {
            if m.is_empty() {
                return Err(GameError::EmptyMove(index));
            }
            let mut seen = BTreeSet::new();
            for &item in m {
                if !seen.insert(item) {
                    return Err(GameError::DuplicateItem { index, item });
                }
                win.check_item(item)?;
            }
            if !seen_moves.insert(seen.into_iter().collect()) {
                return Err(GameError::DuplicateMove(index));
            }
        }
        Ok(GameSpec { horizon, pool, win })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn pool(&self) -> &[Vec<Item>] {
        &self.pool
    }

    pub fn win(&self) -> &WinCondition {
        &self.win
    }

    /// Same pool and condition, different horizon.
    pub fn with_horizon(&self, horizon: usize) -> Result<Self, GameError> {
        GameSpec::new(horizon, self.pool.clone(), self.win.clone())
    }

    pub fn two_wins(&self, items: &[Item]) -> bool {
        self.win.holds(items)
    }

    /// Distinct items in order of first appearance.
    pub fn items(&self) -> Vec<Item> {
        let mut seen = BTreeSet::new();
        self.pool.iter().flatten().copied().filter(|x| seen.insert(*x)).collect()
    }
}

/// Caps the worker count used by parallel solving. Only the first call has an effect.
#[cfg(feature = "parallel")]
pub fn configure_threads(n: usize) -> bool {
    rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().is_ok()
}

#[cfg(not(feature = "parallel"))]
pub fn configure_threads(_n: usize) -> bool {
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ops::Not;

    #[test]
    fn validation() {
        assert_eq!(GameSpec::new(0, vec![vec![1]], WinCondition::Always).unwrap_err(), GameError::ZeroHorizon);
        assert_eq!(GameSpec::new(1, vec![], WinCondition::Always).unwrap_err(), GameError::EmptyPool);
        assert_eq!(GameSpec::new(1, vec![vec![]], WinCondition::Always).unwrap_err(), GameError::EmptyMove(0));
        assert_eq!(
            GameSpec::new(1, vec![vec![1, 1]], WinCondition::Always).unwrap_err(),
            GameError::DuplicateItem { index: 0, item: 1 }
        );
        assert_eq!(
            GameSpec::new(1, vec![vec![1, 2], vec![2, 1]], WinCondition::Always).unwrap_err(),
            GameError::DuplicateMove(1)
        );
        let space = Arc::new(FiniteSpace::sierpinski());
        let cover = WinCondition::class(&space, CoverClass::OpenCover);
        // {0} is not open in the Sierpiński space
        assert_eq!(GameSpec::new(1, vec![vec![0b01]], cover).unwrap_err(), GameError::ItemOutOfUniverse(1));
        let at = WinCondition::class(&space, CoverClass::ClusterAt { point: 5 });
        assert!(matches!(GameSpec::new(1, vec![vec![0]], at), Err(GameError::InvalidWin(_))));
    }

    #[test]
    fn double_negation_collapses() {
        let w = WinCondition::Always.not().not();
        assert!(matches!(w, WinCondition::Always));
        assert!(!WinCondition::Always.not().holds(&[]));
    }
}
