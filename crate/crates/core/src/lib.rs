//! Numerical workbench for gradient Einstein-type warped products
//! `Ψ(ξ)⁻²g_Euc + f(ξ)²g_F` in the translation-invariant ansatz ξ = ᾱ·x.

// `!(a < b)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod catalog;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod lichnerowicz;
pub mod oracle;
pub mod profiles;
pub mod solver;
pub mod system;

pub use error::{Error, Result};
pub use grid::{Exec, Grid, SupNorm};
pub use profiles::{Interval, Jet2, Profile};
pub use system::{Params, WarpedAnsatz};
