//! Attractors of generalized iterated function systems of infinite order.
//!
//! The crate is organised bottom-up: [`metric`] and [`seq`] provide the
//! spaces, [`maps`] the contractions, [`engine`] the set-valued iteration,
//! [`code`] the symbolic code space, and [`cantor`] the planar Cantor set
//! that is an attractor of an infinite-order system but of no finite-order one.

// `!(x < 1.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cantor;
pub mod code;
pub mod config;
pub mod engine;
pub mod error;
pub mod interval;
pub mod io;
pub mod maps;
pub mod metric;
pub mod seq;
pub mod systems;
pub mod verify;

pub use error::{Error, Result};
pub use metric::{BaseMetric, FiniteSet, MetricParams, Point, TailSeq};
