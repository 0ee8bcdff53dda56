//! Exact arithmetic, nearest-point continued fractions, circular units and
//! certified numerics over the real 2-power cyclotomic tower
//! `B_n = Q(2cos(pi / 2^(n+1)))`.

pub mod analytic;
pub mod cfrac;
pub mod embedding;
pub mod error;
pub mod field;
pub mod interval;
pub mod matrix;
pub mod parse;
pub mod poly;
pub mod report;
pub mod units;

pub use error::{Error, Result};
pub use field::{arith, make_level, ArithOp, FieldElem, Level, Tower, TowerPair};
pub use interval::{Dyadic, Interval};
pub use matrix::IntegerMatrix;
pub use report::{CheckRecord, Verdict};
