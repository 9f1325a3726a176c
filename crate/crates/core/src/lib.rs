//! Exact combinatorics of the semistable minimal model program for
//! threefolds over a discrete valuation ring.
//!
//! - [`numbers`]: rationals, gcd data, Hirzebruch-Jung continued fractions
//! - [`cyclic_quotient`]: surface germs `1/n(q,1)` and their resolutions
//! - [`terminal3fold`]: the `xy + G(z^r)` germ model and its standard blowup
//! - [`flip_engine`]: intersection numbers of flipping curves, the (3b)
//!   exclusion sweep and the flip/flop sequence simulator
//! - [`cli`]: instance files, reports and the `mmp` command line

pub mod cli;
pub mod cyclic_quotient;
pub mod error;
pub mod flip_engine;
pub mod numbers;
pub mod terminal3fold;

pub use error::{Error, Result};
