//! Periodic-type `Z^m` skew-products over interval exchange transformations.
//!
//! The pipeline: a Rauzy loop ([`iet`]) yields a tower system and a
//! self-similar IET; integer eigencocycles of the loop matrix give skewing
//! cocycles ([`skew`]); the towers define a stationary ordered Bratteli
//! diagram ([`bratteli`]) on which the floor cocycle and the aperiodicity
//! certificate live ([`cocycles`]); the level-counting Laurent matrix gives
//! closed-form Maharam measures of cylinders ([`maharam`]).

pub mod algebra;
pub mod bratteli;
pub mod cli;
pub mod cocycles;
pub mod error;
pub mod iet;
pub mod instance;
pub mod maharam;
pub mod skew;
pub mod verify;

pub use error::{Error, Result};
