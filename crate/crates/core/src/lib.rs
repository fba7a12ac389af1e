//! Diffraction of weighted point sets in ℝᵈ together with numerical checks of
//! positive definiteness, Krein's inequality, sparseness of high-intensity
//! Bragg peaks, rigidity of positive definite Dirac combs and the Meyer
//! property of visible Bragg sets.
//!
//! Every infinite object is handled through finite windowed realizations;
//! reports say so explicitly and never claim more than the windows show.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cases;
pub mod diffraction;
pub mod dualsets;
pub mod error;
pub mod geometry;
pub mod io;
pub mod measure;
pub mod posdef;
pub mod report;

pub use error::{Error, Result};
pub use report::Verdict;
