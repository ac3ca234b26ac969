//! Normalized-Laplacian spectral moments from sampled egonets, and
//! certified bounds on the Laplacian spectral radius from those moments.
//!
//! The pipeline is: load a [`graph::Graph`], either sweep every node or
//! sample centers ([`sampling`]), turn each radius-r [`egonet::Egonet`] into
//! local walk sums ([`laplacian::phi`]), average them into a
//! [`moments::MomentSequence`], and feed the sequence to the Hankel-matrix
//! programs in [`bounds`]. The [`oracle`] module holds dense ground-truth
//! routines used only by tests.

pub mod bounds;
pub mod egonet;
pub mod error;
pub mod graph;
pub mod laplacian;
pub mod linalg;
mod lmi;
pub mod moments;
pub mod oracle;
pub mod sampling;

pub use error::{Error, Result};
pub use graph::{Graph, GraphKind};
pub use moments::{MomentSequence, Provenance};
