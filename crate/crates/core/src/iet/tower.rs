use num_traits::ToPrimitive;

use super::combinatorics::{IetCombinatorics, Move};
use crate::algebra::IntegerMatrix;
use crate::error::{Error, Result};

/// A closed path in the Rauzy diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RauzyLoop {
    start: IetCombinatorics,
    steps: Vec<Move>,
}

impl RauzyLoop {
    pub fn new(start: IetCombinatorics, steps: Vec<Move>) -> Result<Self> {
        let lp = Self { start, steps };
        lp.endpoint()?;
        Ok(lp)
    }

    fn endpoint(&self) -> Result<()> {
        let mut c = self.start.clone();
        for &mv in &self.steps {
            c = c.rauzy_step(mv)?.0;
        }
        if c != self.start {
            return Err(Error::NotALoop);
        }
        Ok(())
    }

    pub fn start(&self) -> &IetCombinatorics {
        &self.start
    }

    pub fn steps(&self) -> &[Move] {
        &self.steps
    }

    pub fn d(&self) -> usize {
        self.start.d()
    }

    /// The loop traversed `times` times.
    pub fn repeated(&self, times: usize) -> Self {
        Self {
            start: self.start.clone(),
            steps: self.steps.repeat(times),
        }
    }

    /// Product of the elementary matrices along one traversal.
    pub fn matrix(&self) -> IntegerMatrix {
        let d = self.d();
        let mut a = IntegerMatrix::identity(d);
        let mut c = self.start.clone();
        for &mv in &self.steps {
            let (next, up) = c.rauzy_step(mv).expect("validated at construction");
            a = &a * &up.elementary_matrix(d);
            c = next;
        }
        a
    }

    /// Smallest power `p <= 2 d^2` of the loop whose matrix is strictly positive.
    pub fn positivity_exponent(&self) -> Result<u32> {
        let d = self.d();
        let bound = 2 * d * d;
        let a = self.matrix();
        let mut acc = a.clone();
        for p in 1..=bound {
            if acc.is_strictly_positive() {
                return Ok(p as u32);
            }
            acc = &acc * &a;
        }
        Err(Error::NotPositive(bound))
    }

    pub fn steps_string(&self) -> String {
        self.steps.iter().map(|m| m.letter()).collect()
    }
}

/// Rokhlin towers of one induction period: for each tower `j`, the word of
/// interval labels visited by its floors, its height `q_j`, and the incidence
/// matrix `A` with `A[i][j]` = occurrences of `i` in `w_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerSystem {
    words: Vec<Vec<usize>>,
    a: IntegerMatrix,
    q: Vec<u64>,
}

impl TowerSystem {
    /// Tower system of a substitution `j -> words[j]` on `d = words.len()` letters.
    pub fn from_words(words: Vec<Vec<usize>>) -> Result<Self> {
        let d = words.len();
        if d == 0 {
            return Err(Error::InvalidTower("no towers".into()));
        }
        let mut a = IntegerMatrix::zeros(d, d);
        for (j, w) in words.iter().enumerate() {
            if w.is_empty() {
                return Err(Error::InvalidTower(format!("tower {} is empty", j + 1)));
            }
            for &i in w {
                if i >= d {
                    return Err(Error::InvalidTower(format!(
                        "tower {} uses label {} outside 1..{d}",
                        j + 1,
                        i + 1
                    )));
                }
                a[(i, j)] += 1;
            }
        }
        let q = words.iter().map(|w| w.len() as u64).collect();
        Ok(Self { words, a, q })
    }

    pub fn identity(d: usize) -> Self {
        Self::from_words((0..d).map(|j| vec![j]).collect()).expect("d > 0")
    }

    pub fn d(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    pub fn word(&self, j: usize) -> &[usize] {
        &self.words[j]
    }

    pub fn matrix(&self) -> &IntegerMatrix {
        &self.a
    }

    pub fn heights(&self) -> &[u64] {
        &self.q
    }

    pub fn total_floors(&self) -> u64 {
        self.q.iter().sum()
    }

    /// Towers of `self` followed by `next`: `w_j = concat_{c in next.w_j} self.w_c`.
    pub fn compose(&self, next: &TowerSystem) -> Result<TowerSystem> {
        if self.d() != next.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                found: next.d(),
            });
        }
        let words = next
            .words
            .iter()
            .map(|w| w.iter().flat_map(|&c| self.words[c].iter().copied()).collect())
            .collect();
        Self::from_words(words)
    }

    /// `k`-fold self-substitution; `k = 0` is the identity system.
    pub fn power(&self, k: usize) -> Result<TowerSystem> {
        let mut acc = Self::identity(self.d());
        for _ in 0..k {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }

    /// Letters a tower word is required to start with when it comes from an IET:
    /// not checked here, exposed for diagnostics.
    pub fn base_letters(&self) -> Vec<usize> {
        self.words.iter().map(|w| w[0]).collect()
    }

    /// Fault injection helper: swap two adjacent distinct letters of one word.
    /// Returns `None` if no word has two distinct adjacent letters.
    pub fn with_swapped_letters(&self) -> Option<TowerSystem> {
        for (j, w) in self.words.iter().enumerate() {
            if let Some(pos) = w.windows(2).position(|p| p[0] != p[1]) {
                let mut words = self.words.clone();
                words[j].swap(pos, pos + 1);
                return Self::from_words(words).ok();
            }
        }
        None
    }

    pub fn max_height(&self) -> u64 {
        self.q.iter().copied().max().unwrap_or(0)
    }
}

/// Towers of `lp` traversed `repeat` times, built move by move.
pub fn compose_loop(lp: &RauzyLoop, repeat: usize) -> Result<TowerSystem> {
    lp.endpoint()?;
    let d = lp.d();
    let mut words: Vec<Vec<usize>> = (0..d).map(|j| vec![j]).collect();
    for _ in 0..repeat {
        let mut c = lp.start().clone();
        for &mv in lp.steps() {
            let (next, up) = c.rauzy_step(mv)?;
            up.apply(&mut words);
            c = next;
        }
    }
    TowerSystem::from_words(words)
}

/// Heights `|sigma^k(j)|` of the level-`k` towers, computed from `A^k`.
pub fn level_heights(tower: &TowerSystem, k: u32) -> Result<Vec<u64>> {
    let ak = tower.matrix().pow(k)?;
    ak.column_sums()
        .iter()
        .map(|x| x.to_u64().ok_or(Error::Overflow("tower heights")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation() -> IetCombinatorics {
        IetCombinatorics::new(vec![0, 1], vec![1, 0]).unwrap()
    }

    #[test]
    fn empty_loop_gives_identity_towers() {
        let lp = RauzyLoop::new(rotation(), vec![]).unwrap();
        let t = compose_loop(&lp, 1).unwrap();
        assert_eq!(t, TowerSystem::identity(2));
        assert_eq!(t.matrix(), &IntegerMatrix::identity(2));
        assert!(lp.positivity_exponent().is_err());
    }

    #[test]
    fn counts_match_columns() {
        let lp = RauzyLoop::new(rotation(), vec![Move::Top, Move::Bottom]).unwrap();
        let t = compose_loop(&lp, 2).unwrap();
        assert_eq!(t.matrix(), &lp.matrix().pow(2).unwrap());
        let sums: Vec<u64> = t
            .matrix()
            .column_sums()
            .iter()
            .map(|x| x.to_u64().unwrap())
            .collect();
        assert_eq!(sums, t.heights());
    }

    #[test]
    fn not_a_loop() {
        let c = IetCombinatorics::new(vec![0, 1, 2], vec![2, 1, 0]).unwrap();
        assert!(matches!(
            RauzyLoop::new(c, vec![Move::Top]),
            Err(Error::NotALoop)
        ));
    }

    #[test]
    fn substitution_power_matches_repetition() {
        let c = IetCombinatorics::new(vec![0, 1, 2], vec![2, 1, 0]).unwrap();
        let steps = "tbtbtb".chars().map(|x| Move::from_letter(x).unwrap()).collect();
        let lp = RauzyLoop::new(c, steps).unwrap();
        let one = compose_loop(&lp, 1).unwrap();
        for k in 0..=4 {
            let t = compose_loop(&lp, k).unwrap();
            assert_eq!(t, one.power(k).unwrap());
            assert_eq!(t.matrix(), &lp.matrix().pow(k as u32).unwrap());
        }
        // q^(2)_j = sum_i A_ij q^(1)_i, counted on word lengths
        let two = compose_loop(&lp, 2).unwrap();
        for j in 0..3 {
            let expect: u64 = one
                .word(j)
                .iter()
                .map(|&i| one.heights()[i])
                .sum();
            assert_eq!(two.heights()[j], expect);
        }
        assert_eq!(lp.positivity_exponent().unwrap(), 1);
    }

    #[test]
    fn heights_from_matrix_power() {
        let lp = RauzyLoop::new(rotation(), vec![Move::Top, Move::Bottom]).unwrap();
        let t = compose_loop(&lp, 1).unwrap();
        assert_eq!(level_heights(&t, 0).unwrap(), vec![1, 1]);
        assert_eq!(level_heights(&t, 1).unwrap(), vec![2, 3]);
        assert_eq!(level_heights(&t, 2).unwrap(), vec![5, 8]);
    }

    #[test]
    fn rejects_bad_words() {
        assert!(TowerSystem::from_words(vec![vec![0], vec![]]).is_err());
        assert!(TowerSystem::from_words(vec![vec![0], vec![2]]).is_err());
    }
}
