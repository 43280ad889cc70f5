//! Exact arithmetic engine for q-multiple zeta values.
//!
//! The crate expands `zeta_q(k)` and its modified form as exact q-series,
//! checks the cyclic sum, Ohno and Ohno-Zagier relations order by order,
//! computes exact ranks of coefficient matrices, mines and certifies linear
//! relations, and evaluates the `q -> 1` limits numerically.

pub mod cli;
pub mod error;
pub mod expander;
pub mod genfun;
pub mod index;
pub mod numeric;
pub mod qseries;
pub mod ranklab;
pub mod relations;

pub use error::{Error, Result};
pub use expander::{Expander, Expansion, Kind};
pub use index::{Code, Index};
pub use qseries::QSeries;
