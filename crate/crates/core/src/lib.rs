//! Exact arithmetic for Q-Cantor series expansions.
//!
//! A basic sequence `Q = (q_n)` with every `q_n >= 2` gives each real `x` an
//! expansion `x = E_0 + sum E_n / (q_1 ... q_n)` with `0 <= E_n < q_n`. This
//! crate provides:
//!
//! - [`series`]: basic sequences, digit prefixes, exact expansion and
//!   reconstruction of rationals, the shift map `T_{Q,n}` and the block
//!   weights `Q_n^(k)`.
//! - [`construction`]: one explicit, computable basic sequence built from
//!   blocks `X_i = [[i]^{n_i} [(i!)^2]^{n_i}]^{l_i}` together with the digits
//!   of a number `eta` living in the associated Moran set, addressed by
//!   arbitrary-precision positions.
//! - [`transforms`]: the affine maps `x -> r x + s` on rationals and on digit
//!   streams.
//! - [`stats`]: block counts, normality ratios and exact star discrepancy.
//! - [`combinatorics`]: exact block counting and certified checks of
//!   exponential tail bounds.
//! - [`interval`]: the outward-rounded interval arithmetic behind every
//!   certified comparison.
//!
//! Everything is exact or certified; no floating point value ever decides an
//! outcome.

pub mod combinatorics;
pub mod construction;
pub mod error;
pub mod interval;
pub mod rational;
pub mod series;
pub mod stats;
pub mod transforms;

pub use error::{Error, Result};
pub use rational::{parse_rational, Rational};
pub use series::{BasicSequence, DigitPrefix, Expansion, Periodic, Position};
