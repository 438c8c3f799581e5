//! Stochastic argmax tricks and their stochastic softmax relaxations.
//!
//! A stochastic argmax trick draws random utilities `U` and returns the
//! vertex `argmax_{x in X} U^T x` of a combinatorial structure `X`. The
//! stochastic softmax trick replaces the linear program by the regularized
//! program `argmax_{x in hull(X)} U^T x - t f(x)`, whose solution is
//! continuous and almost everywhere differentiable in `U`.
//!
//! * [`structures`]: structure descriptors, embeddings, enumeration.
//! * [`utilities`]: reparameterized random utilities.
//! * [`argmax`]: exact solvers and equivalent categorical samplers.
//! * [`relax`]: regularized relaxations at temperature `t`.
//! * [`grad`]: Jacobians and finite-difference vector-Jacobian products.
//! * [`verify`]: brute-force oracles and statistical tests.
//! * [`cli`]: the `sst` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod argmax;
pub mod cli;
mod dsu;
pub mod error;
pub mod grad;
pub mod relax;
pub mod rng;
pub mod structures;
pub mod utilities;
pub mod verify;

pub use error::{Error, Result};
pub use structures::{Graph, StructureKind, StructureSpec, Vertex};
pub use utilities::{NoiseFamily, UtilityDraw, UtilitySpec};
