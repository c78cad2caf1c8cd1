use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::IntegerMatrix;
use crate::error::{Error, Result};

/// Which of the two rightmost intervals wins a Rauzy move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    /// The last interval of the top row is longer.
    #[serde(rename = "t")]
    Top,
    /// The last interval of the bottom row is longer.
    #[serde(rename = "b")]
    Bottom,
}

impl Move {
    pub fn letter(self) -> char {
        match self {
            Move::Top => 't',
            Move::Bottom => 'b',
        }
    }

    pub fn from_letter(c: char) -> Result<Self> {
        match c {
            't' | 'T' => Ok(Move::Top),
            'b' | 'B' => Ok(Move::Bottom),
            other => Err(Error::InvalidCombinatorics(format!(
                "unknown move '{other}', expected 't' or 'b'"
            ))),
        }
    }
}

/// Labeled permutation pair of an IET: the order of the labeled intervals
/// before (`top`) and after (`bottom`) the exchange. Labels are `0..d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IetCombinatorics {
    top: Vec<usize>,
    bottom: Vec<usize>,
}

/// Effect of one Rauzy move on tower words: the loser's tower absorbs the
/// winner's tower. With `loser_first` the new loser word is
/// `w_loser ++ w_winner`, otherwise `w_winner ++ w_loser`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WordUpdate {
    pub winner: usize,
    pub loser: usize,
    pub loser_first: bool,
}

impl WordUpdate {
    pub fn apply(&self, words: &mut [Vec<usize>]) {
        let winner = words[self.winner].clone();
        let loser = &mut words[self.loser];
        if self.loser_first {
            loser.extend_from_slice(&winner);
        } else {
            let mut w = winner;
            w.extend_from_slice(loser);
            *loser = w;
        }
    }

    /// `I + e_{winner, loser}`: column `loser` gains column `winner`.
    pub fn elementary_matrix(&self, d: usize) -> IntegerMatrix {
        let mut e = IntegerMatrix::identity(d);
        e[(self.winner, self.loser)] += 1;
        e
    }
}

fn check_permutation(row: &[usize], d: usize, name: &str) -> Result<()> {
    let mut seen = vec![false; d];
    for &x in row {
        if x >= d || seen[x] {
            return Err(Error::InvalidCombinatorics(format!(
                "{name} ordering is not a permutation of 1..{d}"
            )));
        }
        seen[x] = true;
    }
    Ok(())
}

impl IetCombinatorics {
    /// Validates and builds combinatorics from 0-based label orderings.
    pub fn new(top: Vec<usize>, bottom: Vec<usize>) -> Result<Self> {
        let d = top.len();
        if d < 2 {
            return Err(Error::InvalidCombinatorics(format!(
                "need at least 2 intervals, got {d}"
            )));
        }
        if bottom.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bottom.len(),
            });
        }
        check_permutation(&top, d, "top")?;
        check_permutation(&bottom, d, "bottom")?;
        let c = Self { top, bottom };
        if let Some(k) = c.invariant_prefix() {
            return Err(Error::Reducible(k));
        }
        Ok(c)
    }

    /// Builds combinatorics from 1-based label orderings, as in instance files.
    pub fn from_one_based(top: &[usize], bottom: &[usize]) -> Result<Self> {
        let shift = |row: &[usize], name: &str| -> Result<Vec<usize>> {
            row.iter()
                .map(|&x| {
                    x.checked_sub(1).ok_or_else(|| {
                        Error::InvalidCombinatorics(format!("{name} ordering uses label 0"))
                    })
                })
                .collect()
        };
        Self::new(shift(top, "top")?, shift(bottom, "bottom")?)
    }

    pub fn d(&self) -> usize {
        self.top.len()
    }

    pub fn top(&self) -> &[usize] {
        &self.top
    }

    pub fn bottom(&self) -> &[usize] {
        &self.bottom
    }

    pub fn top_one_based(&self) -> Vec<usize> {
        self.top.iter().map(|x| x + 1).collect()
    }

    pub fn bottom_one_based(&self) -> Vec<usize> {
        self.bottom.iter().map(|x| x + 1).collect()
    }

    /// Smallest `k < d` whose top prefix is a bottom prefix as a set.
    fn invariant_prefix(&self) -> Option<usize> {
        let d = self.d();
        let mut in_top = vec![false; d];
        let mut in_bottom = vec![false; d];
        let mut balance = 0i64;
        for k in 0..d - 1 {
            let x = self.top[k];
            in_top[x] = true;
            if in_bottom[x] {
                balance += 1;
            }
            let y = self.bottom[k];
            in_bottom[y] = true;
            if in_top[y] {
                balance += 1;
            }
            if balance == (k + 1) as i64 {
                return Some(k + 1);
            }
        }
        None
    }

    /// One Rauzy move and the word/matrix rule it induces on towers.
    pub fn rauzy_step(&self, mv: Move) -> Result<(IetCombinatorics, WordUpdate)> {
        if let Some(k) = self.invariant_prefix() {
            return Err(Error::Reducible(k));
        }
        let d = self.d();
        let last_top = self.top[d - 1];
        let last_bottom = self.bottom[d - 1];
        let mut next = self.clone();
        let update = match mv {
            Move::Top => {
                next.bottom.pop();
                let pos = next
                    .bottom
                    .iter()
                    .position(|&x| x == last_top)
                    .expect("winner is present in bottom row");
                next.bottom.insert(pos + 1, last_bottom);
                WordUpdate {
                    winner: last_top,
                    loser: last_bottom,
                    loser_first: true,
                }
            }
            Move::Bottom => {
                next.top.pop();
                let pos = next
                    .top
                    .iter()
                    .position(|&x| x == last_bottom)
                    .expect("winner is present in top row");
                next.top.insert(pos + 1, last_top);
                WordUpdate {
                    winner: last_bottom,
                    loser: last_top,
                    loser_first: false,
                }
            }
        };
        Ok((next, update))
    }
}

impl fmt::Display for IetCombinatorics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |r: &[usize]| {
            r.iter()
                .map(|x| (x + 1).to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        write!(f, "[{} / {}]", row(&self.top), row(&self.bottom))
    }
}
