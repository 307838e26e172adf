use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::graph::{Graph, VertexId};
use crate::postprocess::Cover;
use crate::rng::{self, StreamRng};
use crate::{Error, Result};

/// Erdős–Rényi background plus planted communities of Poisson(`s_mean`) size,
/// each internally connected with probability `p`. There are
/// `round(n * c_mean / s_mean)` communities, so a vertex joins `c_mean` of them
/// on average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimpleBenchmarkParams {
    pub n: usize,
    /// Mean degree of the background noise.
    pub k_mean: f64,
    pub p: f64,
    pub s_mean: f64,
    /// Expected number of communities per vertex.
    pub c_mean: f64,
    pub seed: u64,
}

impl Default for SimpleBenchmarkParams {
    fn default() -> Self {
        SimpleBenchmarkParams {
            n: 10_000,
            k_mean: 3.0,
            p: 0.3,
            s_mean: 40.0,
            c_mean: 2.0,
            seed: 0,
        }
    }
}

impl SimpleBenchmarkParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason| Err(Error::InvalidParameter { name, reason });
        if self.n == 0 {
            return bad("n", "must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.p) {
            return bad("p", "must lie in [0, 1]");
        }
        if !(self.k_mean >= 0.0 && self.s_mean >= 0.0 && self.c_mean >= 0.0) {
            return bad("k_mean/s_mean/c_mean", "must be nonnegative");
        }
        Ok(())
    }

    pub fn community_count(&self) -> usize {
        if self.s_mean <= 0.0 {
            return 0;
        }
        libm::round(self.n as f64 * self.c_mean / self.s_mean) as usize
    }
}

const BACKGROUND_STREAM: u64 = 0;

/// Appends a G(n, q) sample, skipping geometrically over absent pairs.
fn erdos_renyi(n: usize, q: f64, rng: &mut StreamRng, edges: &mut Vec<(VertexId, VertexId)>) {
    if q <= 0.0 || n < 2 {
        return;
    }
    if q >= 1.0 {
        for a in 0..n as VertexId {
            for b in a + 1..n as VertexId {
                edges.push((a, b));
            }
        }
        return;
    }
    let log_q = libm::log(1.0 - q);
    let (mut v, mut w) = (1usize, -1i64);
    while v < n {
        let r: f64 = rng.random();
        w += 1 + libm::floor(libm::log(1.0 - r) / log_q) as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as VertexId, v as VertexId));
        }
    }
}

/// Generates the graph and its planted cover. Deterministic per seed: the
/// background and every community draw from their own random streams.
pub fn gen_simple(params: &SimpleBenchmarkParams) -> Result<(Graph, Cover)> {
    params.validate()?;
    let n = params.n;
    let mut edges = Vec::new();
    let q = if n > 1 {
        params.k_mean / (n - 1) as f64
    } else {
        0.0
    };
    erdos_renyi(n, q, &mut rng::stream(params.seed, BACKGROUND_STREAM), &mut edges);

    let sizes = if params.s_mean > 0.0 {
        Some(Poisson::new(params.s_mean).map_err(|_| Error::InvalidParameter {
            name: "s_mean",
            reason: "not a valid Poisson mean",
        })?)
    } else {
        None
    };

    let mut communities = Vec::with_capacity(params.community_count());
    for c in 0..params.community_count() {
        let mut rng = rng::stream(params.seed, rng::INDEXED_STREAM_BASE + c as u64);
        let size = match &sizes {
            Some(dist) => loop {
                let s = dist.sample(&mut rng) as usize;
                if s <= n {
                    break s;
                }
            },
            None => 0,
        };
        let mut members: Vec<VertexId> = index::sample(&mut rng, n, size)
            .into_iter()
            .map(|v| v as VertexId)
            .collect();
        members.sort_unstable();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                if rng.random::<f64>() < params.p {
                    edges.push((a, b));
                }
            }
        }
        communities.push(members);
    }

    let (graph, _) = Graph::from_edges(n, edges);
    Ok((graph, Cover::from_sets(n, communities)))
}
