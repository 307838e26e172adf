//! Parallel pipeline driver with per-stage timings, and the scaling harness.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use pcma_core::bench::{gen_simple, SimpleBenchmarkParams};
use pcma_core::ego::{partials_for_vertex, qualifies, EgoConfig, PartialCommunity};
use pcma_core::merger::{Community, MergerConfig, MergerState};
use pcma_core::pipeline::DetectConfig;
use pcma_core::postprocess::{filter_communities, prune_members, ScoredCommunity};
use pcma_core::{Cover, Graph, VertexId};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] pcma_core::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("timing needs at least 3 sizes spanning a factor of 10 or more")]
    TooFewSizes,
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, RunError> {
    Ok(rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()?)
}

/// Partials of every vertex, concatenated in vertex order. Each vertex draws
/// from its own random stream, so the result does not depend on `workers`.
pub fn find_partials(g: &Graph, cfg: &EgoConfig, workers: usize) -> Result<Vec<PartialCommunity>, RunError> {
    let per_vertex = pool(workers)?.install(|| {
        (0..g.vertex_count() as VertexId)
            .into_par_iter()
            .map(|v| partials_for_vertex(g, v, cfg))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(per_vertex.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimes {
    pub partials: Duration,
    pub merger: Duration,
    pub postprocess: Duration,
}

impl StageTimes {
    pub fn total(&self) -> Duration {
        self.partials + self.merger + self.postprocess
    }
}

#[derive(Debug, Clone)]
pub struct DetectRun {
    pub partials: Vec<PartialCommunity>,
    pub merged: Vec<Community>,
    pub cover: Cover,
    pub merges: usize,
    /// Vertices that passed the degree and clustering filters.
    pub qualified: usize,
    pub times: StageTimes,
}

/// Runs the three stages; the ego stage and pruning use `workers` threads.
pub fn detect(g: &Graph, cfg: &DetectConfig, workers: usize) -> Result<DetectRun, RunError> {
    let th = &cfg.thresholds;
    th.validate()?;
    let threads = pool(workers)?;

    let start = Instant::now();
    let partials = find_partials(g, &cfg.ego, workers)?;
    let qualified = threads.install(|| {
        (0..g.vertex_count() as VertexId)
            .into_par_iter()
            .filter(|&v| qualifies(g, v, &cfg.ego))
            .count()
    });
    let t_partials = start.elapsed();

    let start = Instant::now();
    let mut state = MergerState::new(partials.iter().map(|p| Community::from_partial(&p.members)));
    state.run(&MergerConfig {
        t_fs: th.t_fs,
        t_f0: th.t_f0,
    });
    let merges = state.merges();
    let merged = state.into_communities();
    let t_merger = start.elapsed();

    let start = Instant::now();
    let pruned: Vec<ScoredCommunity> = threads.install(|| {
        merged
            .par_iter()
            .map(|c| {
                let c = ScoredCommunity::from(c);
                prune_members(&c, th.t_s, th.ratio_cut_for(c.g))
            })
            .collect()
    });
    let cover = filter_communities(pruned, th.t_l, th.min_size, g.vertex_count());
    let t_post = start.elapsed();

    Ok(DetectRun {
        partials,
        merged,
        cover,
        merges,
        qualified,
        times: StageTimes {
            partials: t_partials,
            merger: t_merger,
            postprocess: t_post,
        },
    })
}

fn summary(values: &mut [f64]) -> String {
    if values.is_empty() {
        return "none".into();
    }
    values.sort_unstable_by(f64::total_cmp);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    format!(
        "min={} median={} mean={:.3} max={}",
        values[0],
        values[values.len() / 2],
        mean,
        values[values.len() - 1]
    )
}

/// Human-readable run report: counts, distribution summaries, stage times and
/// warnings.
pub fn report(g: &Graph, run: &DetectRun, workers: usize, warnings: &[String]) -> String {
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "vertices\t{}", g.vertex_count()).unwrap();
    writeln!(w, "edges\t{}", g.edge_count()).unwrap();
    writeln!(w, "qualified_vertices\t{}", run.qualified).unwrap();
    writeln!(w, "partials\t{}", run.partials.len()).unwrap();
    writeln!(w, "merges\t{}", run.merges).unwrap();
    writeln!(w, "merged_pool\t{}", run.merged.len()).unwrap();
    writeln!(w, "communities\t{}", run.cover.len()).unwrap();
    let mut sizes: Vec<f64> = run.cover.sets().map(|s| s.len() as f64).collect();
    let mut ls = Vec::new();
    let mut gs = Vec::new();
    for c in &run.cover.communities {
        if let Some(s) = &c.stats {
            ls.push(s.l as f64);
            gs.push(s.g);
        }
    }
    writeln!(w, "size\t{}", summary(&mut sizes)).unwrap();
    writeln!(w, "l\t{}", summary(&mut ls)).unwrap();
    writeln!(w, "g\t{}", summary(&mut gs)).unwrap();
    writeln!(w, "workers\t{workers}").unwrap();
    let t = &run.times;
    for (stage, d) in [
        ("partials", t.partials),
        ("merger", t.merger),
        ("postprocess", t.postprocess),
        ("total", t.total()),
    ] {
        writeln!(w, "seconds_{stage}\t{:.3}", d.as_secs_f64()).unwrap();
    }
    for warning in warnings {
        writeln!(w, "warning\t{warning}").unwrap();
    }
    out
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub n: usize,
    pub seconds: f64,
    pub communities: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingTable {
    pub rows: Vec<TimingRow>,
    pub slope: f64,
    pub workers: usize,
}

/// Times the full pipeline (graph generation excluded) on a fresh simple
/// benchmark per size.
pub fn time_pipeline(
    sizes: &[usize],
    template: &SimpleBenchmarkParams,
    cfg: &DetectConfig,
    workers: usize,
) -> Result<TimingTable, RunError> {
    let (lo, hi) = (sizes.iter().min(), sizes.iter().max());
    match (lo, hi) {
        (Some(&lo), Some(&hi)) if sizes.len() >= 3 && lo > 0 && hi >= 10 * lo => {}
        _ => return Err(RunError::TooFewSizes),
    }
    let mut rows = Vec::new();
    for &n in sizes {
        let (g, _) = gen_simple(&SimpleBenchmarkParams { n, ..*template })?;
        let start = Instant::now();
        let run = detect(&g, cfg, workers)?;
        rows.push(TimingRow {
            n,
            seconds: start.elapsed().as_secs_f64(),
            communities: run.cover.len(),
        });
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.seconds)).collect();
    Ok(TimingTable {
        slope: loglog_slope(&points),
        rows,
        workers,
    })
}
