//! Immutable undirected simple graphs in compressed adjacency form.

use alloc::vec::Vec;

use crate::{Error, Result};

pub type VertexId = u32;

/// Undirected simple graph. Adjacency lists are sorted and duplicate free,
/// with no self-loops; the structure is never mutated after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
}

/// What [`Graph::from_edges`] had to drop while building.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildReport {
    pub self_loops: usize,
    pub duplicates: usize,
}

impl BuildReport {
    pub fn dropped(&self) -> usize {
        self.self_loops + self.duplicates
    }
}

impl Graph {
    /// Builds a graph from an arbitrary edge sequence. Self-loops and repeated
    /// edges (in either orientation) are dropped and counted. The vertex count
    /// is `max(min_vertices, largest id + 1)`.
    pub fn from_edges<I>(min_vertices: usize, edges: I) -> (Self, BuildReport)
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut report = BuildReport::default();
        let mut n = min_vertices;
        let mut pairs: Vec<(VertexId, VertexId)> = Vec::new();
        for (a, b) in edges {
            n = n.max(a.max(b) as usize + 1);
            if a == b {
                report.self_loops += 1;
                continue;
            }
            pairs.push((a.min(b), a.max(b)));
        }
        pairs.sort_unstable();
        let before = pairs.len();
        pairs.dedup();
        report.duplicates = before - pairs.len();
        (Self::from_canonical(n, &pairs), report)
    }

    /// `pairs` must be sorted, deduplicated and satisfy `a < b`.
    fn from_canonical(n: usize, pairs: &[(VertexId, VertexId)]) -> Self {
        let mut degree = alloc::vec![0usize; n];
        for &(a, b) in pairs {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor: Vec<usize> = offsets[..n].to_vec();
        let mut neighbors = alloc::vec![0; 2 * pairs.len()];
        // Pairs are sorted by (a, b). Filling the smaller-id neighbors of every
        // vertex first leaves each list sorted.
        for &(a, b) in pairs {
            neighbors[cursor[b as usize]] = a;
            cursor[b as usize] += 1;
        }
        for &(a, b) in pairs {
            neighbors[cursor[a as usize]] = b;
            cursor[a as usize] += 1;
        }
        Graph { offsets, neighbors }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        (a as usize) < self.vertex_count() && self.neighbors(a).binary_search(&b).is_ok()
    }

    /// Canonical edge list: `a < b`, sorted lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.vertex_count() as VertexId).flat_map(move |a| {
            self.neighbors(a)
                .iter()
                .copied()
                .filter(move |&b| b > a)
                .map(move |b| (a, b))
        })
    }

    fn check(&self, v: VertexId) -> Result<()> {
        if (v as usize) < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.vertex_count(),
            })
        }
    }

    /// Induced subgraph on `v` and its neighbors, `v` first.
    pub fn ego_network(&self, v: VertexId) -> Result<EgoNetwork> {
        self.check(v)?;
        let around = self.neighbors(v);
        let mut locals = Vec::with_capacity(around.len() + 1);
        locals.push(v);
        locals.extend_from_slice(around);

        let mut adjacency = Vec::with_capacity(locals.len());
        adjacency.push((1..locals.len() as u32).collect::<Vec<_>>());
        for &u in around {
            let mut local = Vec::new();
            local.push(0);
            for_each_common(self.neighbors(u), around, |pos| local.push(pos as u32 + 1));
            adjacency.push(local);
        }
        Ok(EgoNetwork { locals, adjacency })
    }

    /// Fraction of neighbor pairs of `v` that are themselves adjacent; 0 when
    /// `deg(v) < 2`.
    pub fn local_clustering(&self, v: VertexId) -> Result<f64> {
        self.check(v)?;
        let around = self.neighbors(v);
        let k = around.len();
        if k < 2 {
            return Ok(0.0);
        }
        let mut twice_links = 0usize;
        for &u in around {
            for_each_common(self.neighbors(u), around, |_| twice_links += 1);
        }
        Ok(twice_links as f64 / (k * (k - 1)) as f64)
    }
}

/// Calls `hit(pos)` for every element of `probe` found in `sorted`, where `pos`
/// is the position in `sorted`. Both slices must be strictly increasing.
fn for_each_common(probe: &[VertexId], sorted: &[VertexId], mut hit: impl FnMut(usize)) {
    let (mut i, mut j) = (0, 0);
    while i < probe.len() && j < sorted.len() {
        match probe[i].cmp(&sorted[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                hit(j);
                i += 1;
                j += 1;
            }
        }
    }
}

/// The subgraph induced by a center vertex and its neighbors, in local indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EgoNetwork {
    /// Global ids; the center is at index 0, neighbors follow in increasing order.
    locals: Vec<VertexId>,
    adjacency: Vec<Vec<u32>>,
}

impl EgoNetwork {
    pub fn center(&self) -> VertexId {
        self.locals[0]
    }

    pub fn locals(&self) -> &[VertexId] {
        &self.locals
    }

    pub fn len(&self) -> usize {
        self.locals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locals.is_empty()
    }

    pub fn local_neighbors(&self, i: usize) -> &[u32] {
        &self.adjacency[i]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Local edges with `a < b`.
    pub fn local_edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(a, list)| {
            list.iter()
                .copied()
                .filter(move |&b| b as usize > a)
                .map(move |b| (a as u32, b))
        })
    }
}
