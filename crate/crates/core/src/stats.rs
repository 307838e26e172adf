//! Per-community and per-vertex statistics of a cover on a graph.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::Graph;
use crate::postprocess::Cover;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CommunityRow {
    pub size: usize,
    /// Merge history, when the cover carries it.
    pub l: Option<u32>,
    pub g: Option<f64>,
    /// Edge endpoints inside the community: twice the internal edge count.
    pub internal_endpoints: u64,
    /// Edges with exactly one end in the community.
    pub external_edges: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramCell {
    pub size: usize,
    /// Lower edge of the `g` bin.
    pub g_bin: f64,
    /// Count divided by the largest count in the same size column.
    pub rescaled: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommunityStats {
    pub communities: Vec<CommunityRow>,
    /// Communities each vertex belongs to.
    pub memberships: Vec<u32>,
    /// Nonzero cells of the (size, g) histogram, ordered by size then bin.
    pub histogram: Vec<HistogramCell>,
}

/// Tabulates `cover` against `g`, binning `g` into `g_bins` equal bins on
/// `[0, 1]`. Communities without merge history are left out of the histogram.
pub fn community_stats(graph: &Graph, cover: &Cover, g_bins: usize) -> Result<CommunityStats> {
    let n = graph.vertex_count();
    if g_bins == 0 {
        return Err(Error::InvalidParameter {
            name: "g_bins",
            reason: "must be positive",
        });
    }
    let mut inside = vec![false; n];
    let mut memberships = vec![0u32; n];
    let mut rows = Vec::with_capacity(cover.len());
    for c in &cover.communities {
        for &v in &c.members {
            if v as usize >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            inside[v as usize] = true;
            memberships[v as usize] += 1;
        }
        let (mut internal, mut external) = (0u64, 0u64);
        for &v in &c.members {
            for &u in graph.neighbors(v) {
                if inside[u as usize] {
                    internal += 1;
                } else {
                    external += 1;
                }
            }
        }
        for &v in &c.members {
            inside[v as usize] = false;
        }
        rows.push(CommunityRow {
            size: c.len(),
            l: c.stats.as_ref().map(|s| s.l),
            g: c.stats.as_ref().map(|s| s.g),
            internal_endpoints: internal,
            external_edges: external,
        });
    }
    let histogram = histogram(&rows, g_bins);
    Ok(CommunityStats {
        communities: rows,
        memberships,
        histogram,
    })
}

fn histogram(rows: &[CommunityRow], bins: usize) -> Vec<HistogramCell> {
    let mut cells: Vec<(usize, usize)> = rows
        .iter()
        .filter_map(|r| {
            let g = r.g?;
            let bin = ((g * bins as f64) as usize).min(bins - 1);
            Some((r.size, bin))
        })
        .collect();
    cells.sort_unstable();
    let mut counted: Vec<(usize, usize, u64)> = Vec::new();
    for (size, bin) in cells {
        match counted.last_mut() {
            Some(last) if last.0 == size && last.1 == bin => last.2 += 1,
            _ => counted.push((size, bin, 1)),
        }
    }
    let mut out = Vec::with_capacity(counted.len());
    for column in counted.chunk_by(|a, b| a.0 == b.0) {
        let max = column.iter().map(|c| c.2).max().unwrap() as f64;
        out.extend(column.iter().map(|&(size, bin, count)| HistogramCell {
            size,
            g_bin: bin as f64 / bins as f64,
            rescaled: count as f64 / max,
        }));
    }
    out
}

/// Median of the available `g` values.
pub fn median_g(rows: &[CommunityRow]) -> Option<f64> {
    let mut gs: Vec<f64> = rows.iter().filter_map(|r| r.g).collect();
    if gs.is_empty() {
        return None;
    }
    gs.sort_unstable_by(f64::total_cmp);
    let mid = gs.len() / 2;
    Some(if gs.len() % 2 == 1 {
        gs[mid]
    } else {
        0.5 * (gs[mid - 1] + gs[mid])
    })
}
