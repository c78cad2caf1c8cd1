//! Fixed-point simulation of the IET and its first returns, used as an
//! oracle for the combinatorial tower words.

use super::combinatorics::IetCombinatorics;
use super::lengths::{Fixed, LengthData};
use crate::error::{Error, Result};

/// Orbits must stay this far from discontinuities.
pub const PRECISION_MARGIN: f64 = 1e-9;
pub const DEFAULT_HORIZON: usize = 50_000_000;

/// Piecewise translation of `[0, L)` exchanging labeled intervals.
#[derive(Clone, Debug)]
pub struct IntervalExchange {
    top: Vec<usize>,
    lengths: Vec<Fixed>,
    top_start: Vec<Fixed>,
    bottom_start: Vec<Fixed>,
    cuts: Vec<Fixed>,
    total: Fixed,
}

impl IntervalExchange {
    pub fn new(c: &IetCombinatorics, lengths: &[Fixed]) -> Result<Self> {
        let d = c.d();
        if lengths.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: lengths.len(),
            });
        }
        let starts = |row: &[usize]| {
            let mut s = vec![Fixed::ZERO; d];
            let mut x = Fixed::ZERO;
            for &label in row {
                s[label] = x;
                x = x + lengths[label];
            }
            s
        };
        let top_start = starts(c.top());
        let bottom_start = starts(c.bottom());
        let cuts = c.top()[1..].iter().map(|&l| top_start[l]).collect();
        Ok(Self {
            top: c.top().to_vec(),
            lengths: lengths.to_vec(),
            top_start,
            bottom_start,
            cuts,
            total: lengths.iter().copied().sum(),
        })
    }

    pub fn total_length(&self) -> Fixed {
        self.total
    }

    /// Label of the interval containing `x`.
    pub fn label_at(&self, x: Fixed) -> usize {
        for &label in self.top.iter().rev() {
            if x >= self.top_start[label] {
                return label;
            }
        }
        self.top[0]
    }

    pub fn apply(&self, x: Fixed) -> Fixed {
        let label = self.label_at(x);
        x - self.top_start[label] + self.bottom_start[label]
    }

    /// Distance from `x` to the nearest interior marked point.
    pub fn distance_to_cut(&self, x: Fixed) -> Fixed {
        self.cuts
            .iter()
            .map(|&c| (x - c).abs())
            .min()
            .unwrap_or(self.total)
    }

    pub fn interval_start(&self, label: usize) -> Fixed {
        self.top_start[label]
    }

    pub fn interval_length(&self, label: usize) -> Fixed {
        self.lengths[label]
    }
}

/// First-return times and visited-label words of the level-`k` induction
/// intervals. Each tower is followed from the midpoint of its base.
pub fn simulate_return_times(
    c: &IetCombinatorics,
    lengths: &LengthData,
    level: u32,
) -> Result<(Vec<u64>, Vec<Vec<usize>>)> {
    simulate_with_horizon(c, lengths, level, DEFAULT_HORIZON)
}

pub fn simulate_with_horizon(
    c: &IetCombinatorics,
    lengths: &LengthData,
    level: u32,
    horizon: usize,
) -> Result<(Vec<u64>, Vec<Vec<usize>>)> {
    let t = IntervalExchange::new(c, lengths.lengths())?;
    let base = IntervalExchange::new(c, &lengths.lengths_at_level(level))?;
    let base_end = base.total_length();
    let margin = Fixed::from_f64(PRECISION_MARGIN);
    let d = c.d();
    let mut q = vec![0u64; d];
    let mut words = vec![Vec::new(); d];
    let mut budget = horizon;
    for j in 0..d {
        let mut x = base.interval_start(j) + base.interval_length(j).half();
        loop {
            if budget == 0 {
                return Err(Error::HorizonExceeded(horizon));
            }
            budget -= 1;
            let dist = t.distance_to_cut(x).min((x - base_end).abs());
            if dist < margin {
                return Err(Error::PrecisionAlarm {
                    step: words[j].len(),
                    distance: dist.to_f64(),
                });
            }
            words[j].push(t.label_at(x));
            x = t.apply(x);
            if x < base_end {
                break;
            }
        }
        q[j] = words[j].len() as u64;
    }
    Ok((q, words))
}

/// Empirical frequencies of visits to each interval along a forward orbit.
pub fn visit_frequencies(
    c: &IetCombinatorics,
    lengths: &LengthData,
    start: f64,
    steps: usize,
) -> Result<Vec<f64>> {
    let t = IntervalExchange::new(c, lengths.lengths())?;
    let mut x = Fixed::from_f64(start);
    let mut counts = vec![0u64; c.d()];
    for _ in 0..steps {
        counts[t.label_at(x)] += 1;
        x = t.apply(x);
    }
    Ok(counts
        .into_iter()
        .map(|n| n as f64 / steps as f64)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::IntegerMatrix;
    use crate::iet::lengths::pf_lengths;

    fn golden() -> (IetCombinatorics, LengthData) {
        let c = IetCombinatorics::new(vec![0, 1], vec![1, 0]).unwrap();
        let a = IntegerMatrix::from_rows(&[[1, 1], [1, 2]]).unwrap();
        (c, pf_lengths(&a).unwrap())
    }

    #[test]
    fn level_zero_is_trivial() {
        let (c, l) = golden();
        let (q, w) = simulate_return_times(&c, &l, 0).unwrap();
        assert_eq!(q, vec![1, 1]);
        assert_eq!(w, vec![vec![0], vec![1]]);
    }

    #[test]
    fn golden_rotation_returns_are_fibonacci() {
        // continued fraction [1;1,1,...]: consecutive return times are
        // consecutive Fibonacci numbers, advancing two indices per level
        let fib: Vec<u64> = {
            let mut f = vec![1u64, 1];
            while f.len() < 20 {
                let n = f.len();
                f.push(f[n - 1] + f[n - 2]);
            }
            f
        };
        let (c, l) = golden();
        for k in 1..=5u32 {
            let (q, _) = simulate_return_times(&c, &l, k).unwrap();
            let i = 2 * k as usize;
            assert_eq!(q, vec![fib[i], fib[i + 1]], "level {k}");
        }
    }

    #[test]
    fn horizon_limit() {
        let (c, l) = golden();
        assert!(matches!(
            simulate_with_horizon(&c, &l, 4, 10),
            Err(Error::HorizonExceeded(10))
        ));
    }

    #[test]
    fn frequencies_match_lengths() {
        let (c, l) = golden();
        let f = visit_frequencies(&c, &l, 0.123456789, 100_000).unwrap();
        for (a, b) in f.iter().zip(l.lengths_f64()) {
            assert!((a - b).abs() < 1e-3);
        }
    }
}
