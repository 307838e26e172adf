//! Merging partial communities into complete ones.
//!
//! Communities carry occurrence scores `S`, merge counts `l` and score mass
//! `w`. Merger decisions use the symmetric similarity `f_s`; a pair merges
//! when the two are each other's best merger candidate and `f_s` exceeds the
//! threshold `t_fs`. Candidate searches only visit communities that share a
//! member, found through the incidence index, which keeps total work linear in
//! the number of partials for bounded community sizes.

mod community;
mod engine;
#[cfg(any(test, feature = "oracle"))]
pub mod naive;

pub use community::{f_asym, f_sym, g_value, merge, score_dot, Community, Similarity};
pub use engine::{run_merger, CommunityId, MergerConfig, MergerState};
