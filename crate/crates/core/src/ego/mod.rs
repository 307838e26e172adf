//! Partial communities from ego networks.
//!
//! For every vertex that passes the degree and clustering filters, the ego
//! network is fitted with [`fit_belonging`], thresholded into member sets with
//! the center as a default member, and strongly overlapping sets inside the
//! same ego are unioned.

mod em;
mod partials;

pub use em::{fit_belonging, BelongingFit, BelongingMatrix, EmSettings};
pub use partials::{
    estimate_k, extract_partials, find_all_partials, merge_intra_ego, partials_for_vertex, qualifies,
    EgoConfig, PartialCommunity, MIN_PARTIAL_SIZE,
};
