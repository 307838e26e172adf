//! Overlapping community detection by merging the partial communities seen
//! from each vertex's ego network.
//!
//! The pipeline has three stages:
//!
//! 1. [`ego`] fits a mixed-membership model to every qualifying ego network
//!    and emits partial communities (unit scores, `l = 1`).
//! 2. [`merger`] merges partial communities with the best-merger-candidate
//!    chain walk, tracking occurrence scores `S`, merge counts `l` and the
//!    overlap density `g`.
//! 3. [`postprocess`] prunes weakly attached members and drops untrustworthy
//!    communities, producing a [`Cover`].
//!
//! [`bench`], [`nmi`] and [`stats`] provide planted benchmarks, the overlapping
//! NMI score and per-community statistics.
//!
//! The crate is `no_std` (it needs `alloc`); file formats, parallel drivers
//! and the command line live in the `pcma` crate.

#![no_std]

extern crate alloc;

pub mod bench;
pub mod ego;
mod error;
pub mod graph;
pub mod merger;
pub mod nmi;
pub mod pipeline;
pub mod postprocess;
pub mod rng;
pub mod stats;

pub use error::Error;
pub use graph::{EgoNetwork, Graph, VertexId};
pub use merger::Community;
pub use postprocess::{Cover, ScoredCommunity, Thresholds};

pub type Result<T, E = Error> = core::result::Result<T, E>;
