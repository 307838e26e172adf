//! Expectation-maximization fit of the Poisson overlapping-community model
//! to a single ego network.
//!
//! Each edge count is Poisson with mean `sum_z theta[i][z] * theta[j][z]`, and
//! the maximized objective is
//!
//! ```text
//! L = sum_{(i,j) in E} ln(sum_z theta_iz theta_jz) - 1/2 sum_z (sum_i theta_iz)^2
//! ```
//!
//! The E-step splits every edge over the communities in proportion to
//! `theta_iz * theta_jz`; the M-step has the closed form
//! `theta_iz = k_iz / sqrt(K_z)` where `k_iz` is the edge mass of vertex `i`
//! assigned to `z` and `K_z` its total over ordered vertex pairs.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::graph::EgoNetwork;
use crate::rng::StreamRng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmSettings {
    pub max_iterations: usize,
    /// Stop once the relative log-likelihood gain drops below this.
    pub tolerance: f64,
    /// Independent random starts; the fit with the highest final
    /// log-likelihood is kept.
    pub restarts: usize,
    /// Columns whose fitted parameter vectors have at least this cosine
    /// similarity are reported as one community.
    pub parallel_cosine: f64,
}

impl Default for EmSettings {
    fn default() -> Self {
        EmSettings {
            max_iterations: 200,
            tolerance: 1e-6,
            restarts: 3,
            parallel_cosine: 0.999,
        }
    }
}

/// Nonnegative vertex-by-community coefficients for one ego network. Row `j`
/// is the fraction of vertex `j`'s ego edges attributed to each community.
#[derive(Debug, Clone, PartialEq)]
pub struct BelongingMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl BelongingMatrix {
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged belonging rows");
        BelongingMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.data[j * self.cols..(j + 1) * self.cols]
    }

    pub fn get(&self, j: usize, z: usize) -> f64 {
        self.data[j * self.cols + z]
    }
}

#[derive(Debug, Clone)]
pub struct BelongingFit {
    pub belonging: BelongingMatrix,
    /// Log-likelihood at the start of every iteration, ending with the value
    /// for the returned parameters.
    pub log_likelihood: Vec<f64>,
}

impl BelongingFit {
    pub fn iterations(&self) -> usize {
        self.log_likelihood.len() - 1
    }

    pub fn final_log_likelihood(&self) -> f64 {
        *self.log_likelihood.last().unwrap()
    }
}

/// Fits `k` overlapping communities to `ego`. Deterministic for a given `rng`
/// state.
pub fn fit_belonging(
    ego: &EgoNetwork,
    k: usize,
    rng: &mut StreamRng,
    settings: EmSettings,
) -> Result<BelongingFit> {
    if k == 0 {
        return Err(Error::InvalidParameter {
            name: "community count",
            reason: "must be at least 1",
        });
    }
    let edges: Vec<(u32, u32)> = ego.local_edges().collect();
    if edges.is_empty() {
        return Err(Error::EmptyEgoNetwork { center: ego.center() });
    }
    let mut best: Option<BelongingFit> = None;
    for _ in 0..settings.restarts.max(1) {
        let fit = fit_once(ego, &edges, k, rng, settings);
        let better = match &best {
            None => true,
            Some(b) => fit.final_log_likelihood() > b.final_log_likelihood(),
        };
        if better {
            best = Some(fit);
        }
    }
    Ok(best.unwrap())
}

fn fit_once(
    ego: &EgoNetwork,
    edges: &[(u32, u32)],
    k: usize,
    rng: &mut StreamRng,
    settings: EmSettings,
) -> BelongingFit {
    let n = ego.len();

    // (0, 1]: a zero start would pin that entry at zero forever.
    let mut theta: Vec<f64> = (0..n * k).map(|_| 1.0 - rng.random::<f64>()).collect();
    let mut mass = vec![0.0; n * k];
    let mut totals = vec![0.0; k];
    let mut q = vec![0.0; k];
    let mut trace = Vec::new();

    loop {
        let ll = expectation(edges, &theta, k, &mut mass, &mut totals, &mut q);
        trace.push(ll);
        let done = match trace.len() {
            1 => false,
            len => {
                let prev = trace[len - 2];
                (ll - prev).abs() <= settings.tolerance * prev.abs()
            }
        };
        if done || trace.len() > settings.max_iterations {
            break;
        }
        for z in 0..k {
            let norm = libm::sqrt(totals[z]);
            for i in 0..n {
                theta[i * k + z] = if norm > 0.0 { mass[i * k + z] / norm } else { 0.0 };
            }
        }
    }

    // `mass` holds the edge split for the final parameters; each row sums to
    // the vertex's ego degree.
    for i in 0..n {
        let row = &mut mass[i * k..(i + 1) * k];
        let degree: f64 = ego.local_neighbors(i).len() as f64;
        if degree > 0.0 {
            row.iter_mut().for_each(|x| *x /= degree);
        }
    }
    fold_parallel_columns(&theta, &mut mass, n, k, settings.parallel_cosine);
    BelongingFit {
        belonging: BelongingMatrix {
            rows: n,
            cols: k,
            data: mass,
        },
        log_likelihood: trace,
    }
}

/// Adds every column of `belonging` into the first earlier column whose
/// parameter vector is parallel to its own, leaving it zero. Parallel columns
/// `a` and `c a` act as the single column `sqrt(1 + c^2) a`, so the rate of
/// every pair and the likelihood are unchanged.
fn fold_parallel_columns(theta: &[f64], belonging: &mut [f64], n: usize, k: usize, min_cosine: f64) {
    let column = |z: usize| (0..n).map(move |i| theta[i * k + z]);
    let norms: Vec<f64> = (0..k)
        .map(|z| libm::sqrt(column(z).map(|x| x * x).sum()))
        .collect();
    let mut target: Vec<usize> = (0..k).collect();
    for z in 1..k {
        if norms[z] == 0.0 {
            continue;
        }
        for y in 0..z {
            if target[y] != y || norms[y] == 0.0 {
                continue;
            }
            let dot: f64 = column(y).zip(column(z)).map(|(a, b)| a * b).sum();
            if dot >= min_cosine * norms[y] * norms[z] {
                target[z] = y;
                break;
            }
        }
    }
    for z in 0..k {
        let y = target[z];
        if y != z {
            for i in 0..n {
                belonging[i * k + y] += belonging[i * k + z];
                belonging[i * k + z] = 0.0;
            }
        }
    }
}

/// Returns the objective at `theta` and fills the per-vertex edge mass and the
/// per-community totals over ordered pairs.
fn expectation(
    edges: &[(u32, u32)],
    theta: &[f64],
    k: usize,
    mass: &mut [f64],
    totals: &mut [f64],
    q: &mut [f64],
) -> f64 {
    mass.iter_mut().for_each(|x| *x = 0.0);
    totals.iter_mut().for_each(|x| *x = 0.0);
    let mut ll = 0.0;
    for &(a, b) in edges {
        let (a, b) = (a as usize, b as usize);
        let ta = &theta[a * k..(a + 1) * k];
        let tb = &theta[b * k..(b + 1) * k];
        let mut rate = 0.0;
        for z in 0..k {
            q[z] = ta[z] * tb[z];
            rate += q[z];
        }
        if rate > f64::MIN_POSITIVE {
            ll += libm::log(rate);
            q.iter_mut().for_each(|x| *x /= rate);
        } else {
            // Supports have drifted apart; spread the edge evenly.
            ll += libm::log(f64::MIN_POSITIVE);
            q.iter_mut().for_each(|x| *x = 1.0 / k as f64);
        }
        for z in 0..k {
            mass[a * k + z] += q[z];
            mass[b * k + z] += q[z];
            totals[z] += 2.0 * q[z];
        }
    }
    let mut penalty = 0.0;
    for z in 0..k {
        let column: f64 = (0..theta.len() / k).map(|i| theta[i * k + z]).sum();
        penalty += column * column;
    }
    ll - 0.5 * penalty
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::rng;
    use rand::Rng;

    fn two_cliques(size: u32) -> Graph {
        // Two `size`-cliques sharing vertex 0.
        let mut edges = Vec::new();
        let blocks = [
            (0..size).collect::<Vec<_>>(),
            core::iter::once(0).chain(size..2 * size - 1).collect(),
        ];
        for block in &blocks {
            for (i, &a) in block.iter().enumerate() {
                for &b in &block[i + 1..] {
                    edges.push((a, b));
                }
            }
        }
        Graph::from_edges(0, edges).0
    }

    fn assert_monotone(trace: &[f64]) {
        for w in trace.windows(2) {
            assert!(
                w[1] >= w[0] - 1e-9 * w[0].abs(),
                "log-likelihood decreased: {} -> {}",
                w[0],
                w[1]
            );
        }
    }

    #[test]
    fn rows_sum_to_one() {
        let g = two_cliques(10);
        let ego = g.ego_network(0).unwrap();
        let fit = fit_belonging(&ego, 5, &mut rng::stream(1, 0), EmSettings::default()).unwrap();
        for j in 0..ego.len() {
            let s: f64 = fit.belonging.row(j).iter().sum();
            assert!((s - 1.0).abs() < 1e-9, "row {j} sums to {s}");
            assert!(fit.belonging.row(j).iter().all(|&x| x >= 0.0));
        }
        assert_monotone(&fit.log_likelihood);
    }

    #[test]
    fn two_cliques_separate() {
        let g = two_cliques(10);
        let ego = g.ego_network(0).unwrap();
        let fit = fit_belonging(&ego, 5, &mut rng::stream(3, 0), EmSettings::default()).unwrap();
        let b = &fit.belonging;
        // Columns carrying the first clique carry (almost) nothing of the second.
        let first: Vec<usize> = (1..10).collect();
        let second: Vec<usize> = (10..19).collect();
        for z in 0..5 {
            let m1: f64 = first.iter().map(|&j| b.get(j, z)).sum();
            let m2: f64 = second.iter().map(|&j| b.get(j, z)).sum();
            let total = m1 + m2;
            if total > 0.5 {
                assert!(m1.min(m2) / total < 0.1, "column {z} mixes cliques: {m1} vs {m2}");
            }
        }
    }

    #[test]
    fn empty_ego_is_rejected() {
        let (g, _) = Graph::from_edges(3, [(1, 2)]);
        let ego = g.ego_network(0).unwrap();
        assert!(matches!(
            fit_belonging(&ego, 5, &mut rng::stream(0, 0), EmSettings::default()),
            Err(Error::EmptyEgoNetwork { center: 0 })
        ));
    }

    #[test]
    fn random_small_egos_are_monotone() {
        let mut r = rng::stream(99, 1);
        for trial in 0..100u64 {
            let n: u32 = r.random_range(4..25);
            let p: f64 = r.random_range(0.2..0.8);
            let mut edges = Vec::new();
            for a in 1..n {
                edges.push((0, a));
                for b in a + 1..n {
                    if r.random::<f64>() < p {
                        edges.push((a, b));
                    }
                }
            }
            let g = Graph::from_edges(0, edges).0;
            let ego = g.ego_network(0).unwrap();
            let k = r.random_range(1..8);
            let fit = fit_belonging(&ego, k, &mut rng::stream(trial, 0), EmSettings::default()).unwrap();
            assert_monotone(&fit.log_likelihood);
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let g = two_cliques(8);
        let ego = g.ego_network(0).unwrap();
        let a = fit_belonging(&ego, 5, &mut rng::stream(5, 9), EmSettings::default()).unwrap();
        let b = fit_belonging(&ego, 5, &mut rng::stream(5, 9), EmSettings::default()).unwrap();
        assert_eq!(a.belonging, b.belonging);
    }
}
