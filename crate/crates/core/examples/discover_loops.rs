//! Enumerates Rauzy loops of bounded length and prints those with a
//! nontrivial integer fixed cocycle.
//!
//! `cargo run --example discover_loops -- 3 2 1 8` searches loops of length
//! at most 8 at the combinatorics `[1 2 3 / 3 2 1]`.

use skewadic::iet::discover::enumerate_loops;
use skewadic::iet::IetCombinatorics;

fn main() {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("integer argument"))
        .collect();
    let (max_len, bottom) = args.split_last().expect("usage: BOTTOM... MAX_LEN");
    let top: Vec<usize> = (1..=bottom.len()).collect();
    let c = IetCombinatorics::from_one_based(&top, bottom).expect("valid combinatorics");
    let loops = enumerate_loops(&c, *max_len);
    println!("{} loops at {c}", loops.len());
    for l in loops.iter().filter(|l| l.kernel_rank > 0 && l.positivity_exponent.is_some()).take(20) {
        println!(
            "{:>3} power={} rank={} weight={} matrix={:?}",
            l.lp.steps_string(),
            l.positivity_exponent.unwrap(),
            l.kernel_rank,
            l.weight,
            l.lp.matrix().to_i64_rows().unwrap()
        );
    }
    let ranks: std::collections::BTreeMap<usize, usize> =
        loops.iter().fold(Default::default(), |mut m, l| {
            *m.entry(l.kernel_rank).or_default() += 1;
            m
        });
    println!("kernel ranks: {ranks:?}");
}
