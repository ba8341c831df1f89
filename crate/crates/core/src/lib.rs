//! Executable companion to the Lubell-function approach to Boolean-algebra
//! Turán problems.
//!
//! Families of subsets of `[n]` are measured by their Lubell value
//! `h_n(F) = Σ 1 / C(n, |A|)`. Once `h_n(F)` exceeds the threshold
//! `α_d(n)`, the family contains a `d`-dimensional Boolean algebra, and
//! [`extraction::extract_bd`] finds one. Around that core sit exact
//! detectors, extremal searches, the affine-cube correspondence for integer
//! sets, and Ramsey-type constructions and verifiers.

pub mod alpha;
pub mod binomial;
pub mod cubes;
pub mod error;
pub mod extraction;
pub mod io;
pub mod lattice;
pub mod lubell;
pub mod ramsey;
pub mod real;
pub mod search;
pub mod selftest;

pub use error::{Error, Result};
pub use lattice::{AlgebraWitness, Interval, SetFamily, SubsetCode};
pub use real::{BoundedReal, Enclosure, Verdict};
