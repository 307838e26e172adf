use alloc::vec::Vec;

use super::em::{fit_belonging, BelongingMatrix, EmSettings};
use crate::graph::{EgoNetwork, Graph, VertexId};
use crate::rng;
use crate::Result;

/// Smaller candidate sets are bare edges and carry no merge signal.
pub const MIN_PARTIAL_SIZE: usize = 3;

/// A community fragment seen from one ego network: unit scores, `l = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialCommunity {
    /// Center of the ego network the partial was found in.
    pub origin: VertexId,
    /// Sorted, duplicate free, always containing `origin`.
    pub members: Vec<VertexId>,
}

impl PartialCommunity {
    pub fn new(origin: VertexId, mut members: Vec<VertexId>) -> Self {
        members.sort_unstable();
        members.dedup();
        if let Err(at) = members.binary_search(&origin) {
            members.insert(at, origin);
        }
        PartialCommunity { origin, members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EgoConfig {
    pub min_degree: usize,
    /// Vertices whose local clustering exceeds this are skipped.
    pub clustering_cap: f64,
    pub belong_threshold: f64,
    pub intra_overlap: f64,
    /// Fixed community count per ego; `None` uses [`estimate_k`].
    pub k_override: Option<usize>,
    pub em: EmSettings,
    pub seed: u64,
}

impl Default for EgoConfig {
    fn default() -> Self {
        EgoConfig {
            min_degree: 20,
            clustering_cap: 0.95,
            belong_threshold: 0.20,
            intra_overlap: 0.30,
            k_override: None,
            em: EmSettings::default(),
            seed: 0,
        }
    }
}

/// Over-estimated community count for an ego network of `ego_size` vertices:
/// one per 30 vertices, clamped to `[5, 20]`.
pub fn estimate_k(ego_size: usize) -> usize {
    ego_size.div_ceil(30).clamp(5, 20)
}

/// Thresholds belonging rows into member sets. Vertex `j` joins community `z`
/// iff `b[j][z] > belong_threshold`; the center joins every nonempty one.
pub fn extract_partials(
    ego: &EgoNetwork,
    belonging: &BelongingMatrix,
    belong_threshold: f64,
) -> Vec<PartialCommunity> {
    let locals = ego.locals();
    let mut out = Vec::new();
    for z in 0..belonging.cols() {
        let members: Vec<VertexId> = (1..locals.len())
            .filter(|&j| belonging.get(j, z) > belong_threshold)
            .map(|j| locals[j])
            .collect();
        if members.len() + 1 >= MIN_PARTIAL_SIZE {
            out.push(PartialCommunity::new(ego.center(), members));
        }
    }
    out
}

fn intersection_size(a: &[VertexId], b: &[VertexId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Unions partials of the same ego while any pair shares more than
/// `overlap_threshold` of either side's members. Each round merges whole
/// connected components of the qualifying relation, so the result does not
/// depend on input order. Output is sorted by size descending, then by
/// smallest member.
pub fn merge_intra_ego(mut partials: Vec<PartialCommunity>, overlap_threshold: f64) -> Vec<PartialCommunity> {
    loop {
        let count = partials.len();
        let mut parent: Vec<usize> = (0..count).collect();
        let mut merged_any = false;
        for x in 0..count {
            for y in x + 1..count {
                let common = intersection_size(&partials[x].members, &partials[y].members) as f64;
                if common / partials[x].len() as f64 > overlap_threshold
                    || common / partials[y].len() as f64 > overlap_threshold
                {
                    let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                    if rx != ry {
                        parent[rx.max(ry)] = rx.min(ry);
                        merged_any = true;
                    }
                }
            }
        }
        if !merged_any {
            break;
        }
        let mut groups: Vec<Option<PartialCommunity>> = alloc::vec![None; count];
        for (i, p) in partials.into_iter().enumerate() {
            let root = find(&mut parent, i);
            match &mut groups[root] {
                Some(acc) => {
                    acc.members.extend_from_slice(&p.members);
                    acc.members.sort_unstable();
                    acc.members.dedup();
                }
                slot => *slot = Some(p),
            }
        }
        partials = groups.into_iter().flatten().collect();
    }
    partials.sort_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then_with(|| a.members.first().cmp(&b.members.first()))
            .then_with(|| a.members.cmp(&b.members))
    });
    partials
}

/// Whether `v` passes the degree and clustering filters.
pub fn qualifies(g: &Graph, v: VertexId, cfg: &EgoConfig) -> bool {
    let degree = g.degree(v);
    degree > 0 && degree >= cfg.min_degree && g.local_clustering(v).is_ok_and(|c| c <= cfg.clustering_cap)
}

/// The complete ego stage for one vertex. Returns nothing for vertices that
/// fail [`qualifies`].
pub fn partials_for_vertex(g: &Graph, v: VertexId, cfg: &EgoConfig) -> Result<Vec<PartialCommunity>> {
    if !qualifies(g, v, cfg) {
        return Ok(Vec::new());
    }
    let ego = g.ego_network(v)?;
    if ego.edge_count() == 0 {
        return Ok(Vec::new());
    }
    let k = cfg.k_override.unwrap_or_else(|| estimate_k(ego.len()));
    let mut rng = rng::stream(cfg.seed, rng::INDEXED_STREAM_BASE + v as u64);
    let fit = fit_belonging(&ego, k, &mut rng, cfg.em)?;
    let partials = extract_partials(&ego, &fit.belonging, cfg.belong_threshold);
    Ok(merge_intra_ego(partials, cfg.intra_overlap))
}

/// Runs [`partials_for_vertex`] over all vertices in id order.
pub fn find_all_partials(g: &Graph, cfg: &EgoConfig) -> Result<Vec<PartialCommunity>> {
    let mut out = Vec::new();
    for v in 0..g.vertex_count() as VertexId {
        out.extend(partials_for_vertex(g, v, cfg)?);
    }
    Ok(out)
}
