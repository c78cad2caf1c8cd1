//! Interval exchange combinatorics, Rauzy loops, towers and length data.

mod combinatorics;
pub mod discover;
mod lengths;
mod simulate;
mod tower;

pub use combinatorics::{IetCombinatorics, Move, WordUpdate};
pub use lengths::{pf_lengths, Fixed, LengthData};
pub use simulate::{
    simulate_return_times, simulate_with_horizon, visit_frequencies, IntervalExchange,
    DEFAULT_HORIZON, PRECISION_MARGIN,
};
pub use tower::{compose_loop, level_heights, RauzyLoop, TowerSystem};
