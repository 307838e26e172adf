//! LFR-style benchmark with overlapping vertices.
//!
//! Degrees follow a truncated power law on `[k_min, k_max]` where `k_min` is
//! solved so the continuous mean equals `k_mean`; community sizes follow a
//! power law on `[c_min, c_max]`. A vertex of degree `k` gets
//! `round((1 - mu) k)` internal stubs split evenly over its communities, the
//! rest external. Stubs are matched at random; rejected pairs (self-loops,
//! repeats, external pairs sharing a community) are retried, then repaired by
//! rewiring an existing edge, and finally dropped.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::graph::{Graph, VertexId};
use crate::postprocess::Cover;
use crate::rng::{self, StreamRng};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LfrParams {
    pub n: usize,
    pub k_mean: f64,
    pub k_max: usize,
    /// Fraction of each vertex's edges leaving its communities.
    pub mu: f64,
    /// Degree exponent.
    pub tau1: f64,
    /// Community size exponent.
    pub tau2: f64,
    pub c_min: usize,
    pub c_max: usize,
    pub overlap_fraction: f64,
    pub memberships_per_overlapper: usize,
    pub seed: u64,
}

impl Default for LfrParams {
    fn default() -> Self {
        LfrParams {
            n: 10_000,
            k_mean: 40.0,
            k_max: 100,
            mu: 0.3,
            tau1: 2.0,
            tau2: 1.0,
            c_min: 20,
            c_max: 100,
            overlap_fraction: 0.1,
            memberships_per_overlapper: 2,
            seed: 0,
        }
    }
}

impl LfrParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason| Err(Error::InvalidParameter { name, reason });
        if self.n < 2 {
            return bad("n", "must be at least 2");
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return bad("mu", "must lie in [0, 1]");
        }
        if !(self.tau1 > 0.0 && self.tau2 > 0.0) {
            return bad("tau1/tau2", "must be positive");
        }
        if !(0.0..=1.0).contains(&self.overlap_fraction) {
            return bad("overlap_fraction", "must lie in [0, 1]");
        }
        if self.memberships_per_overlapper == 0 {
            return bad("memberships_per_overlapper", "must be at least 1");
        }
        if self.c_min > self.c_max {
            return Err(Error::Infeasible("c_min exceeds c_max"));
        }
        if self.c_min < 2 {
            return bad("c_min", "must be at least 2");
        }
        if self.c_max > self.n {
            return Err(Error::Infeasible("c_max exceeds n"));
        }
        if !(1.0..=self.k_max as f64).contains(&self.k_mean) {
            return Err(Error::Infeasible("k_mean must lie in [1, k_max]"));
        }
        Ok(())
    }
}

/// `∫_a^b x^e dx`.
fn power_integral(a: f64, b: f64, e: f64) -> f64 {
    if libm::fabs(e + 1.0) < 1e-12 {
        libm::log(b / a)
    } else {
        (libm::pow(b, e + 1.0) - libm::pow(a, e + 1.0)) / (e + 1.0)
    }
}

fn power_law_mean(a: f64, b: f64, tau: f64) -> f64 {
    power_integral(a, b, 1.0 - tau) / power_integral(a, b, -tau)
}

/// The lower cutoff giving a continuous power law on `[k_min, k_max]` with
/// exponent `tau` the requested mean.
pub fn solve_min_degree(k_mean: f64, k_max: f64, tau: f64) -> Result<f64> {
    let (mut lo, mut hi) = (1.0, k_max);
    if power_law_mean(lo, k_max, tau) > k_mean || k_mean > k_max {
        return Err(Error::Infeasible("no minimum degree reaches k_mean"));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if power_law_mean(mid, k_max, tau) < k_mean {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn sample_power_law(rng: &mut StreamRng, a: f64, b: f64, tau: f64) -> f64 {
    let u: f64 = rng.random();
    if libm::fabs(tau - 1.0) < 1e-12 {
        a * libm::pow(b / a, u)
    } else {
        let e = 1.0 - tau;
        let (lo, hi) = (libm::pow(a, e), libm::pow(b, e));
        libm::pow(lo + u * (hi - lo), 1.0 / e)
    }
}

const DEGREE_STREAM: u64 = 0;
const OVERLAP_STREAM: u64 = 1;
const SIZE_STREAM: u64 = 2;
const ASSIGN_STREAM: u64 = 3;
const INTERNAL_STREAM: u64 = 4;
const EXTERNAL_STREAM: u64 = 5;

const MATCH_ROUNDS: usize = 30;
const REWIRE_TRIES: usize = 50;
const PLACE_TRIES: usize = 40;

struct Adjacency(Vec<Vec<VertexId>>);

impl Adjacency {
    fn has(&self, a: VertexId, b: VertexId) -> bool {
        self.0[a as usize].contains(&b)
    }

    fn add(&mut self, a: VertexId, b: VertexId) {
        self.0[a as usize].push(b);
        self.0[b as usize].push(a);
    }

    fn remove(&mut self, a: VertexId, b: VertexId) {
        for (x, y) in [(a, b), (b, a)] {
            let list = &mut self.0[x as usize];
            let at = list.iter().position(|&z| z == y).unwrap();
            list.swap_remove(at);
        }
    }
}

/// Matches `stubs` into edges accepted by `ok`, appending to `edges`. Returns
/// the number of stubs that could not be placed.
fn match_stubs(
    mut stubs: Vec<VertexId>,
    rng: &mut StreamRng,
    adj: &mut Adjacency,
    edges: &mut Vec<(VertexId, VertexId)>,
    ok: impl Fn(VertexId, VertexId) -> bool,
) -> usize {
    let valid = |adj: &Adjacency, a: VertexId, b: VertexId| a != b && !adj.has(a, b) && ok(a, b);
    for _ in 0..MATCH_ROUNDS {
        if stubs.len() < 2 {
            break;
        }
        stubs.shuffle(rng);
        let mut left = Vec::new();
        for pair in stubs.chunks(2) {
            match *pair {
                [a, b] if valid(adj, a, b) => {
                    adj.add(a, b);
                    edges.push((a, b));
                }
                _ => left.extend_from_slice(pair),
            }
        }
        if left.len() == stubs.len() {
            stubs = left;
            break;
        }
        stubs = left;
    }
    // Rewire: replace an existing edge (x, y) by (a, x) and (b, y).
    let mut dropped = stubs.len() % 2;
    for pair in stubs.chunks_exact(2) {
        let (a, b) = (pair[0], pair[1]);
        let mut placed = false;
        for _ in 0..REWIRE_TRIES {
            if edges.is_empty() {
                break;
            }
            let at = rng.random_range(0..edges.len());
            let (x, y) = edges[at];
            let (x, y) = if rng.random::<bool>() { (x, y) } else { (y, x) };
            if valid(adj, a, x) && valid(adj, b, y) && a != y && b != x && !(a == b && x == y) {
                if a == b && adj.has(a, x) {
                    continue;
                }
                adj.remove(x, y);
                edges.swap_remove(at);
                adj.add(a, x);
                edges.push((a, x));
                if !adj.has(b, y) && b != y {
                    adj.add(b, y);
                    edges.push((b, y));
                    placed = true;
                    break;
                }
                // (b, y) collided with the edge just added; undo.
                adj.remove(a, x);
                edges.pop();
                adj.add(x, y);
                edges.push((x, y));
            }
        }
        if !placed {
            dropped += 2;
        }
    }
    dropped
}

/// Generates an LFR-style graph with its planted cover.
pub fn gen_lfr(params: &LfrParams) -> Result<(Graph, Cover)> {
    params.validate()?;
    let n = params.n;
    let om = params.memberships_per_overlapper;
    let seed = params.seed;

    let k_min = solve_min_degree(params.k_mean, params.k_max as f64, params.tau1)?;
    let mut rng_deg = rng::stream(seed, DEGREE_STREAM);
    let degrees: Vec<usize> = (0..n)
        .map(|_| {
            let k = sample_power_law(&mut rng_deg, k_min, params.k_max as f64, params.tau1);
            (libm::round(k) as usize).clamp(1, params.k_max)
        })
        .collect();

    let overlappers = libm::round(params.overlap_fraction * n as f64) as usize;
    let mut memberships = vec![1usize; n];
    for v in index::sample(&mut rng::stream(seed, OVERLAP_STREAM), n, overlappers) {
        memberships[v] = om;
    }
    let total: usize = memberships.iter().sum();

    // Community sizes summing exactly to the membership total.
    let mut rng_size = rng::stream(seed, SIZE_STREAM);
    let mut sizes = Vec::new();
    let mut sum = 0;
    while sum < total {
        let s = sample_power_law(
            &mut rng_size,
            params.c_min as f64,
            params.c_max as f64 + 0.5,
            params.tau2,
        );
        let s = (libm::floor(s) as usize).clamp(params.c_min, params.c_max);
        sizes.push(s);
        sum += s;
    }
    let mut excess = sum - total;
    while excess > 0 {
        let shrinkable: Vec<usize> = (0..sizes.len()).filter(|&c| sizes[c] > params.c_min).collect();
        if shrinkable.is_empty() {
            return Err(Error::Infeasible(
                "community sizes cannot match the membership total",
            ));
        }
        let c = shrinkable[rng_size.random_range(0..shrinkable.len())];
        let cut = excess.min(sizes[c] - params.c_min);
        sizes[c] -= cut;
        excess -= cut;
    }
    if sizes.len() < om {
        return Err(Error::Infeasible(
            "fewer communities than memberships per overlapping vertex",
        ));
    }

    // Internal degree share of each membership slot.
    let internal: Vec<usize> = degrees
        .iter()
        .map(|&k| libm::round((1.0 - params.mu) * k as f64) as usize)
        .collect();
    let share = |v: usize, slot: usize| {
        let m = memberships[v];
        internal[v] / m + usize::from(slot < internal[v] % m)
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| core::cmp::Reverse(share(v, 0)));

    let mut rng_assign = rng::stream(seed, ASSIGN_STREAM);
    let mut members: Vec<Vec<(VertexId, usize)>> = sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
    let mut joined: Vec<Vec<usize>> = vec![Vec::new(); n];
    let count = sizes.len();
    for &v in &order {
        for slot in 0..memberships[v] {
            let need = share(v, slot);
            let fits = |c: usize, members: &[Vec<(VertexId, usize)>], joined: &[Vec<usize>]| {
                members[c].len() < sizes[c] && sizes[c] > need && !joined[v].contains(&c)
            };
            let mut chosen = None;
            for _ in 0..PLACE_TRIES {
                let c = rng_assign.random_range(0..count);
                if fits(c, &members, &joined) {
                    chosen = Some(c);
                    break;
                }
            }
            if chosen.is_none() {
                let start = rng_assign.random_range(0..count);
                chosen = (0..count)
                    .map(|i| (start + i) % count)
                    .find(|&c| fits(c, &members, &joined));
            }
            let c = match chosen {
                Some(c) => c,
                None => displace(v, need, &sizes, &mut members, &mut joined, &mut rng_assign)?,
            };
            members[c].push((v as VertexId, need));
            joined[v].push(c);
        }
    }

    let mut adj = Adjacency(vec![Vec::new(); n]);
    let mut edges = Vec::new();
    let mut rng_int = rng::stream(seed, INTERNAL_STREAM);
    for list in &members {
        let mut stubs: Vec<VertexId> = list
            .iter()
            .flat_map(|&(v, k)| core::iter::repeat_n(v, k.min(list.len() - 1)))
            .collect();
        if stubs.len() % 2 == 1 {
            stubs.pop();
        }
        let mut local = Vec::new();
        match_stubs(stubs, &mut rng_int, &mut adj, &mut local, |_, _| true);
        edges.extend(local);
    }

    let mut external_stubs = Vec::new();
    for v in 0..n {
        let k_out = degrees[v] - internal[v].min(degrees[v]);
        external_stubs.extend(core::iter::repeat_n(v as VertexId, k_out));
    }
    if external_stubs.len() % 2 == 1 {
        external_stubs.pop();
    }
    let mut external = Vec::new();
    let disjoint =
        |a: VertexId, b: VertexId| !joined[a as usize].iter().any(|c| joined[b as usize].contains(c));
    match_stubs(
        external_stubs,
        &mut rng::stream(seed, EXTERNAL_STREAM),
        &mut adj,
        &mut external,
        disjoint,
    );
    edges.extend(external);

    let (graph, _) = Graph::from_edges(n, edges);
    let cover = Cover::from_sets(
        n,
        members
            .into_iter()
            .map(|list| list.into_iter().map(|(v, _)| v).collect()),
    );
    Ok((graph, cover))
}

/// Frees a slot for `v` in a full community that fits it by moving one member
/// to a community that still has room.
fn displace(
    v: usize,
    need: usize,
    sizes: &[usize],
    members: &mut [Vec<(VertexId, usize)>],
    joined: &mut [Vec<usize>],
    rng: &mut StreamRng,
) -> Result<usize> {
    let count = sizes.len();
    let open: Vec<usize> = (0..count).filter(|&c| members[c].len() < sizes[c]).collect();
    for _ in 0..PLACE_TRIES * count.max(1) {
        let c = rng.random_range(0..count);
        if sizes[c] <= need || joined[v].contains(&c) || members[c].is_empty() {
            continue;
        }
        let at = rng.random_range(0..members[c].len());
        let (u, u_need) = members[c][at];
        let target = open.iter().copied().find(|&d| {
            d != c && sizes[d] > u_need && members[d].len() < sizes[d] && !joined[u as usize].contains(&d)
        });
        if let Some(d) = target {
            members[c].swap_remove(at);
            let slot = joined[u as usize].iter().position(|&x| x == c).unwrap();
            joined[u as usize][slot] = d;
            members[d].push((u, u_need));
            return Ok(c);
        }
    }
    Err(Error::Infeasible(
        "memberships cannot be placed within community size limits",
    ))
}
