//! Exact search and verification for set families on `[n]` with bounded
//! matching number.
//!
//! Families live on ground sets of at most 24 elements as dense membership
//! tables. All counting, densities and bounds use exact big integers and
//! rationals; nothing here touches floating point.

pub mod circle;
pub mod error;
pub mod family;
pub mod format;
pub mod formulas;
pub mod gallery;
pub mod invariants;
pub mod params;
pub mod report;
pub mod sampling;
pub mod solver;
pub mod stats;

pub use error::{Error, Result};
pub use family::{FullShift, LevelProfile, SetFamily, SubsetMask, MAX_N};
pub use report::{Check, Outcome, Report};
