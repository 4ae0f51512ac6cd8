//! Strategies, play, and exhaustive checks of a strategy against every opponent.

use super::{GameError, GameSpec, Item, Player};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OneStrategy {
    /// Move index to play after each sequence of Two's picks.
    Full { entries: Vec<(Vec<Item>, usize)> },
    /// Move index for each turn.
    Predetermined { moves: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TwoStrategy {
    /// Item index to pick after each sequence of One's move indices (current move last).
    Full { entries: Vec<(Vec<usize>, usize)> },
    /// `table[turn][move]` is the index of the picked item within that move.
    Markov { table: Vec<Vec<usize>> },
}

impl OneStrategy {
    pub fn full(mut entries: Vec<(Vec<Item>, usize)>) -> Self {
        entries.sort();
        entries.dedup_by(|a, b| a.0 == b.0);
        OneStrategy::Full { entries }
    }

    pub fn decide(&self, turn: usize, picks: &[Item]) -> Result<usize, GameError> {
        match self {
            OneStrategy::Predetermined { moves } => {
                moves.get(turn).copied().ok_or_else(|| GameError::MalformedStrategy(format!("no move for turn {turn}")))
            }
            OneStrategy::Full { entries } => entries
                .binary_search_by(|(h, _)| h.as_slice().cmp(picks))
                .map(|i| entries[i].1)
                .map_err(|_| GameError::MalformedStrategy(format!("no move after picks {picks:?}"))),
        }
    }
}

impl TwoStrategy {
    pub fn full(mut entries: Vec<(Vec<usize>, usize)>) -> Self {
        entries.sort();
        entries.dedup_by(|a, b| a.0 == b.0);
        TwoStrategy::Full { entries }
    }

    /// `moves` ends with the move being answered.
    pub fn decide(&self, turn: usize, moves: &[usize]) -> Result<usize, GameError> {
        match self {
            TwoStrategy::Markov { table } => {
                let current = *moves.last().expect("a move to answer");
                table
                    .get(turn)
                    .and_then(|row| row.get(current))
                    .copied()
                    .ok_or_else(|| GameError::MalformedStrategy(format!("no entry for turn {turn}, move {current}")))
            }
            TwoStrategy::Full { entries } => entries
                .binary_search_by(|(h, _)| h.as_slice().cmp(moves))
                .map(|i| entries[i].1)
                .map_err(|_| GameError::MalformedStrategy(format!("no pick after moves {moves:?}"))),
        }
    }
}

/// A complete play: (move index, picked item) per turn.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Play {
    pub transcript: Vec<(usize, Item)>,
    pub winner: Player,
}

impl Play {
    pub fn items(&self) -> Vec<Item> {
        self.transcript.iter().map(|&(_, x)| x).collect()
    }

    pub fn moves(&self) -> Vec<usize> {
        self.transcript.iter().map(|&(m, _)| m).collect()
    }
}

fn finish(game: &GameSpec, transcript: Vec<(usize, Item)>) -> Play {
    let items: Vec<Item> = transcript.iter().map(|&(_, x)| x).collect();
    let winner = if game.two_wins(&items) { Player::Two } else { Player::One };
    Play { transcript, winner }
}

pub fn play(game: &GameSpec, one: &OneStrategy, two: &TwoStrategy) -> Result<Play, GameError> {
    let mut moves = Vec::with_capacity(game.horizon());
    let mut picks = Vec::with_capacity(game.horizon());
    for turn in 0..game.horizon() {
        let m = one.decide(turn, &picks)?;
        let mv =
            game.pool().get(m).ok_or_else(|| GameError::MalformedStrategy(format!("move index {m} out of range")))?;
        moves.push(m);
        let k = two.decide(turn, &moves)?;
        let x = *mv
            .get(k)
            .ok_or_else(|| GameError::MalformedStrategy(format!("item index {k} out of range for move {m}")))?;
        picks.push(x);
    }
    Ok(finish(game, moves.into_iter().zip(picks).collect()))
}

/// Every sequence of `len` indices below `base`, in lexicographic order.
pub fn all_move_sequences(base: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut next = if base == 0 && len > 0 { None } else { Some(vec![0; len]) };
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        let mut i = len;
        while i > 0 {
            i -= 1;
            succ[i] += 1;
            if succ[i] < base {
                next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    })
}

/// The lexicographically first sequence of One's moves that beats `two`, if any.
/// Against a fixed Two strategy, One's adaptive strategies produce exactly the
/// plays of the fixed move sequences.
pub fn first_loss_for_two(game: &GameSpec, two: &TwoStrategy) -> Result<Option<Play>, GameError> {
    for moves in all_move_sequences(game.pool().len(), game.horizon()) {
        let p = play(game, &OneStrategy::Predetermined { moves }, two)?;
        if p.winner == Player::One {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// The first play (Two's picks in lexicographic index order) where `one` loses, if any.
pub fn first_loss_for_one(game: &GameSpec, one: &OneStrategy) -> Result<Option<Play>, GameError> {
    fn go(game: &GameSpec, one: &OneStrategy, transcript: &mut Vec<(usize, Item)>) -> Result<Option<Play>, GameError> {
        let turn = transcript.len();
        if turn == game.horizon() {
            let p = finish(game, transcript.clone());
            return Ok((p.winner == Player::Two).then_some(p));
        }
        let picks: Vec<Item> = transcript.iter().map(|&(_, x)| x).collect();
        let m = one.decide(turn, &picks)?;
        let mv =
            game.pool().get(m).ok_or_else(|| GameError::MalformedStrategy(format!("move index {m} out of range")))?;
        for &x in mv {
            transcript.push((m, x));
            let r = go(game, one, transcript)?;
            transcript.pop();
            if r.is_some() {
                return Ok(r);
            }
        }
        Ok(None)
    }
    go(game, one, &mut Vec::new())
}
