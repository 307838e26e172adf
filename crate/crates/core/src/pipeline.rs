//! The three stages wired together, single threaded.

use alloc::vec::Vec;

use crate::ego::{find_all_partials, EgoConfig, PartialCommunity};
use crate::graph::Graph;
use crate::merger::{Community, MergerConfig, MergerState};
use crate::postprocess::{postprocess, Cover, ScoredCommunity, Thresholds};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DetectConfig {
    pub ego: EgoConfig,
    pub thresholds: Thresholds,
}

#[derive(Debug, Clone)]
pub struct Detection {
    pub partials: Vec<PartialCommunity>,
    /// The merged pool before cleaning, in id order.
    pub merged: Vec<Community>,
    pub cover: Cover,
    pub merges: usize,
}

/// Merges and cleans `partials`; `n` is the vertex count of the graph.
pub fn detect_from_partials(partials: Vec<PartialCommunity>, th: &Thresholds, n: usize) -> Result<Detection> {
    th.validate()?;
    let mut state = MergerState::new(partials.iter().map(|p| Community::from_partial(&p.members)));
    state.run(&MergerConfig {
        t_fs: th.t_fs,
        t_f0: th.t_f0,
    });
    let merges = state.merges();
    let merged = state.into_communities();
    let cover = postprocess(merged.iter().map(ScoredCommunity::from), th, n);
    Ok(Detection {
        partials,
        merged,
        cover,
        merges,
    })
}

pub fn detect(g: &Graph, cfg: &DetectConfig) -> Result<Detection> {
    cfg.thresholds.validate()?;
    let partials = find_all_partials(g, &cfg.ego)?;
    detect_from_partials(partials, &cfg.thresholds, g.vertex_count())
}
