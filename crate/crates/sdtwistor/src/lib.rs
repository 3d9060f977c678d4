//! Numerical pipeline from a generating function on the 2-sphere to
//! de Sitter wave solutions, monopoles, indefinite self-dual metrics on
//! S²×S², and the holomorphic disk family in projective 3-space.
//!
//! Every identity the pipeline relies on is exposed as a residual so that
//! it can be checked independently of the construction that produced it.

// Tensor code indexes several arrays by the same frame index.
#![allow(clippy::needless_range_loop)]

pub mod curvature;
pub mod dual;
pub mod error;
pub mod harmonics;
pub mod monopole;
pub mod sphere;
pub mod transforms;
pub mod twistor;
pub mod wave;

pub use error::{Error, Result};
