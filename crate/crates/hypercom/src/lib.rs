//! Graph embedding and community detection in the Poincaré ball.
//!
//! The crate embeds the nodes of an undirected graph into low-dimensional
//! hyperbolic space and fits a mixture of Riemannian Gaussians on top of the
//! embedding, so that node positions and community structure reinforce each
//! other during training. The pieces compose bottom-up:
//!
//! - [`geometry`] — Möbius arithmetic, geodesic distance, exp/log maps, and
//!   Riemannian gradient-descent steps on the open unit ball;
//! - [`gaussian`] — the isotropic Riemannian Gaussian, its normalization
//!   constant, and maximum-likelihood estimation via a precomputed σ table;
//! - [`mixture`] — weighted barycenters, EM, and K-Means for mixtures of
//!   Riemannian Gaussians;
//! - [`graph`] — edge-list/label loading, random walks, context extraction,
//!   and degree-weighted negative sampling;
//! - [`trainer`] — the embedding objectives (first-order adjacency, skip-gram
//!   with negatives, community closeness) and the training loop;
//! - [`classify`] — supervised community prediction: nearest-barycenter,
//!   supervised mixtures, hyperbolic logistic regression, and a
//!   most-common-communities baseline;
//! - [`metrics`] — conductance, NMI, Precision@n with cluster matching, and
//!   k-fold cross-validation;
//! - [`plot`] — SVG rendering of 2-D embeddings and fitted mixtures.

pub mod classify;
pub mod error;
pub mod gaussian;
pub mod geometry;
pub mod graph;
pub mod metrics;
pub mod mixture;
pub(crate) mod numeric;
pub mod plot;
pub mod trainer;

pub use error::{Error, Result};
pub use geometry::{BallPoint, TangentVector};

/// Highest embedding dimension supported by the Gaussian layer (the
/// normalization constant is tabulated per dimension up to this bound).
pub const MAX_DIM: usize = 10;
