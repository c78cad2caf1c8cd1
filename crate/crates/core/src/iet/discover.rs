//! Bounded enumeration of Rauzy loops, used to find instances carrying
//! integer eigencocycles.

use super::combinatorics::{IetCombinatorics, Move};
use super::tower::RauzyLoop;
use crate::algebra::{integer_kernel, IntegerMatrix};

/// A loop found by [`enumerate_loops`] with its derived invariants.
#[derive(Clone, Debug)]
pub struct LoopCandidate {
    pub lp: RauzyLoop,
    /// Rank of `ker(A^T - I)`.
    pub kernel_rank: usize,
    pub positive: bool,
    /// Smallest power of the loop with a strictly positive matrix.
    pub positivity_exponent: Option<u32>,
    /// `sum_ij` of the amplified matrix, a cheap proxy for the growth rate.
    pub weight: u64,
}

/// `A^T - I` for a square matrix.
pub fn fixed_cocycle_equation(a: &IntegerMatrix) -> IntegerMatrix {
    let mut b = a.transpose();
    for i in 0..b.rows() {
        b[(i, i)] -= 1;
    }
    b
}

/// All loops at `start` of length `1..=max_len`, sorted by weight and then
/// by length. Loops may pass through `start` before the end.
pub fn enumerate_loops(start: &IetCombinatorics, max_len: usize) -> Vec<LoopCandidate> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    dfs(start, start, max_len, &mut path, &mut out);
    out.sort_by_key(|c| (c.weight, c.lp.steps().len()));
    out
}

fn dfs(
    start: &IetCombinatorics,
    current: &IetCombinatorics,
    remaining: usize,
    path: &mut Vec<Move>,
    out: &mut Vec<LoopCandidate>,
) {
    if remaining == 0 {
        return;
    }
    for mv in [Move::Top, Move::Bottom] {
        let Ok((next, _)) = current.rauzy_step(mv) else {
            continue;
        };
        path.push(mv);
        if &next == start {
            let lp = RauzyLoop::new(start.clone(), path.clone()).expect("closed by construction");
            let a = lp.matrix();
            let kernel_rank = integer_kernel(&fixed_cocycle_equation(&a)).len();
            let positivity_exponent = lp.positivity_exponent().ok();
            let amplified = a.pow(positivity_exponent.unwrap_or(1)).expect("square");
            let weight = amplified
                .to_i64_rows()
                .map(|rows| rows.iter().flatten().sum::<i64>() as u64)
                .unwrap_or(u64::MAX);
            out.push(LoopCandidate {
                positive: a.is_strictly_positive(),
                positivity_exponent,
                lp,
                kernel_rank,
                weight,
            });
        }
        dfs(start, &next, remaining - 1, path, out);
        path.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_loops() {
        let c = IetCombinatorics::new(vec![0, 1], vec![1, 0]).unwrap();
        let loops = enumerate_loops(&c, 2);
        // every word in {t,b}^{1,2} is a loop on the single vertex
        assert_eq!(loops.len(), 6);
        let tb = loops.iter().find(|l| l.lp.steps_string() == "tb").unwrap();
        // [[1,1],[1,2]] has characteristic polynomial x^2 - 3x + 1, no root 1
        assert!(tb.positive);
        assert_eq!(tb.kernel_rank, 0);
        // a unipotent single move keeps eigenvalue 1
        let t = loops.iter().find(|l| l.lp.steps_string() == "t").unwrap();
        assert_eq!(t.kernel_rank, 1);
    }

    #[test]
    fn three_intervals_always_have_a_fixed_cocycle() {
        let c = IetCombinatorics::new(vec![0, 1, 2], vec![2, 1, 0]).unwrap();
        let loops = enumerate_loops(&c, 8);
        assert!(loops.iter().any(|l| l.positive));
        // genus one: a positive loop matrix has spectrum {alpha, 1/alpha, 1}
        for l in loops.iter().filter(|l| l.positive) {
            assert_eq!(l.kernel_rank, 1, "loop {}", l.lp.steps_string());
        }
        assert!(loops.iter().all(|l| l.kernel_rank >= 1));
    }
}
