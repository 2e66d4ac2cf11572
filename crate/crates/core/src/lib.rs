//! Exact symbolic and numeric momentum mappings for first-order field theory.
//!
//! Two phase spaces are modelled in a single global adapted chart over
//! `R^n x R^k`: the multiphase space `Z` ([`multiphase`]) and the vertically
//! adapted frame bundle `L_V Y` ([`vframe`]). Every symbolic identity is
//! decided by normalizing an exact rational-function [`symexpr::Expr`] to zero.
//! Flows are integrated with fixed-step RK4 ([`flows`]).

pub mod config;
pub mod error;
pub mod flows;
pub mod forms;
pub mod geobundle;
pub mod linalg;
pub mod multiphase;
pub mod par;
pub mod random;
pub mod report;
pub mod suite;
pub mod symexpr;
pub mod symobs;
pub mod vframe;

pub use error::{Error, Result};
