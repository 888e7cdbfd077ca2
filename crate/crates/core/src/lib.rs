//! Full-batch gradient descent for one-hidden-layer rectified networks with
//! hidden and output biases, together with the machinery needed to certify
//! its linear convergence rate at a given dataset:
//!
//! * dense vectors and small symmetric matrices with a Jacobi eigensolver
//!   ([`linalg`]),
//! * the network, its empirical risk, exact risk gradients, and a softplus
//!   smoothing family used as a gradient oracle ([`network`]),
//! * seeded random initialization and the training loop with a frozen output
//!   layer ([`train`]),
//! * stochastic and deterministic Gram matrices of the activation pattern and
//!   their smallest eigenvalues ([`gram`]),
//! * the rate constant, step-size/width thresholds, and initialization event
//!   checks that make up the convergence certificate ([`certificates`]),
//! * Monte Carlo probes for the supporting concentration inequalities
//!   ([`probes`]).
//!
//! The numeric core ([`linalg`], [`network`]) is generic over the scalar type
//! through [`scalar::Real`]; everything downstream of the seeded RNG runs in
//! `f64`, and the aliases below pin that choice.

// Index loops keep the fixed ascending summation order explicit, and the
// negated comparisons in domain checks also reject NaN.
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificates;
pub mod error;
pub mod gram;
pub mod io;
pub mod linalg;
pub mod network;
pub mod probes;
pub mod rng;
pub mod scalar;
pub mod train;

pub use error::{Error, Result};

/// Dense real vector over `f64`.
pub type Vector = linalg::RealVector<f64>;
/// Symmetric matrix over `f64`.
pub type SymMat = linalg::SymMatrix<f64>;
/// Rectangular matrix over `f64`.
pub type RectMat = linalg::RectMatrix<f64>;
/// Width-`width` rectified network over `f64`.
pub type ReluNet = network::ShallowReluNet<f64>;
/// Training set over `f64`.
pub type TrainSet = network::Dataset<f64>;
