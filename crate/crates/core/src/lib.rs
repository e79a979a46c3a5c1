//! Speaker attention measured from facial-landmark streams, and the
//! intraday event study relating changes in attention to index returns
//! and volatility around press conferences.
//!
//! The crate is organised by stage: [`geometry`] turns landmark frames into
//! eye aspect ratios, [`identity`] keeps the frames that show the target
//! speaker, [`attention`] integrates the EAR series into a reading measure,
//! [`market`] builds event windows from minute bars and [`regression`] fits
//! the univariate models. [`pipeline`] chains them over a registry of
//! conferences and [`synth`] generates fixtures with known answers.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attention;
pub mod error;
pub mod geometry;
pub mod identity;
pub mod io;
pub mod market;
pub mod pipeline;
pub mod registry;
pub mod regression;
pub mod synth;

pub use error::{Error, Result};
