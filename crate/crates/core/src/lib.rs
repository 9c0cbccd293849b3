//! Aleksandrov–Clark measures of holomorphic self-maps of the unit disc and
//! of semigroups of such maps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clark;
pub mod config;
pub mod derivative;
pub mod disc;
pub mod error;
pub mod limits;
pub mod maps;
pub mod semigroup;
pub mod verify;

pub use error::{Error, Result};
