//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::fs;
use std::process::{Command, ExitCode};
use std::time::Instant;

use pcma::config::{Preset, Settings};
use pcma::run;
use pcma_core::bench::{applicability_knn, gen_simple, SimpleBenchmarkParams};
use pcma_core::ego::{fit_belonging, partials_for_vertex, EgoConfig, EmSettings};
use pcma_core::merger::naive::run_merger_naive;
use pcma_core::merger::{f_asym, f_sym, merge, run_merger, Community, MergerConfig};
use pcma_core::nmi::onmi;
use pcma_core::pipeline::{detect, DetectConfig};
use pcma_core::rng::{self, StreamRng};
use pcma_core::{Cover, Graph, VertexId};
use rand::Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn settings(preset: Preset, seed: u64, extra: &[(&str, &str)]) -> Settings {
    let mut s = Settings::from_preset(preset);
    s.set("seed", &seed.to_string()).unwrap();
    for &(k, v) in extra {
        s.set(k, v).unwrap();
    }
    s
}

/// Runs the detection pipeline on a freshly generated simple benchmark.
fn benchmark_run(s: &Settings) -> (Graph, Cover, run::DetectRun) {
    let (g, truth) = gen_simple(&s.simple().unwrap()).unwrap();
    let result = run::detect(&g, &s.detect().unwrap(), s.workers().unwrap()).unwrap();
    (g, truth, result)
}

// ---- criterion 1 ----------------------------------------------------------

struct Tracked {
    community: Community,
    partials: Vec<BTreeSet<VertexId>>,
}

fn random_partial(r: &mut StreamRng) -> BTreeSet<VertexId> {
    let size = r.random_range(1..12);
    (0..size).map(|_| r.random_range(0..40)).collect()
}

fn random_tracked(r: &mut StreamRng) -> Tracked {
    let count = r.random_range(1..6);
    let partials: Vec<BTreeSet<VertexId>> = (0..count).map(|_| random_partial(r)).collect();
    let mut parts = partials
        .iter()
        .map(|p| Community::from_partial(&p.iter().copied().collect::<Vec<_>>()));
    let first = parts.next().unwrap();
    Tracked {
        community: parts.fold(first, |acc, c| merge(&acc, &c)),
        partials,
    }
}

fn union(a: &Tracked, b: &Tracked) -> Tracked {
    Tracked {
        community: merge(&a.community, &b.community),
        partials: a.partials.iter().chain(&b.partials).cloned().collect(),
    }
}

fn common(x: &BTreeSet<VertexId>, y: &BTreeSet<VertexId>) -> f64 {
    x.intersection(y).count() as f64
}

fn f_reference(a: &Tracked, b: &Tracked) -> f64 {
    let w_a: usize = a.partials.iter().map(BTreeSet::len).sum();
    let total: f64 = a
        .partials
        .iter()
        .flat_map(|x| b.partials.iter().map(move |y| common(x, y)))
        .sum();
    total / (w_a as f64 * b.partials.len() as f64)
}

fn g_reference(c: &Tracked) -> f64 {
    let l = c.partials.len();
    if l == 1 {
        return 1.0;
    }
    let w: usize = c.partials.iter().map(BTreeSet::len).sum();
    let mut total = 0.0;
    for (i, x) in c.partials.iter().enumerate() {
        for (j, y) in c.partials.iter().enumerate() {
            if i != j {
                total += common(x, y);
            }
        }
    }
    total / (w as f64 * (l - 1) as f64)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1e-300)
}

fn identities() -> Verdict {
    const CASES: usize = 1000;
    let mut r = rng::stream(2024, 1);
    let mut failures: Vec<&str> = Vec::new();
    let mut check = |name: &'static str, ok: bool| {
        if !ok && !failures.contains(&name) {
            failures.push(name);
        }
    };
    for _ in 0..CASES {
        let (a, b, c) = (
            random_tracked(&mut r),
            random_tracked(&mut r),
            random_tracked(&mut r),
        );
        let (ca, cb, cc) = (&a.community, &b.community, &c.community);
        let bc = union(&b, &c);

        check("f from partial pairs", close(f_asym(ca, cb), f_reference(&a, &b)));

        let (lb, lc) = (cb.l() as f64, cc.l() as f64);
        let by_l = (lb * f_asym(ca, cb) + lc * f_asym(ca, cc)) / (lb + lc);
        check("f(A, B+C) weighted by l", close(f_asym(ca, &bc.community), by_l));

        let (wb, wc) = (cb.w() as f64, cc.w() as f64);
        let by_w = (wb * f_asym(cb, ca) + wc * f_asym(cc, ca)) / (wb + wc);
        check("f(B+C, A) weighted by w", close(f_asym(&bc.community, ca), by_w));

        let m = merge(ca, cb);
        let lhs = m.w() as f64 * (m.l() - 1) as f64 * m.g();
        let weight = (ca.w() * cb.l() as u64 + cb.w() * ca.l() as u64) as f64;
        let rhs = ca.w() as f64 * (ca.l() - 1) as f64 * ca.g()
            + cb.w() as f64 * (cb.l() - 1) as f64 * cb.g()
            + weight * f_sym(ca, cb, 0.0);
        check("g update", close(lhs, rhs));

        let (wa, la, wb, lb) = (ca.w() as f64, ca.l() as f64, cb.w() as f64, cb.l() as f64);
        let average = (wa * lb * f_asym(ca, cb) + wb * la * f_asym(cb, ca)) / (wa * lb + wb * la);
        check("f_s weighted average", close(f_sym(ca, cb, 0.0), average));

        check("g definition", close(m.g(), g_reference(&union(&a, &b))));
    }
    match failures.is_empty() {
        true => verdict(true, format!("6 identities x {CASES} cases within 1e-10")),
        false => verdict(false, format!("violated: {}", failures.join(", "))),
    }
}

// ---- criterion 2 ----------------------------------------------------------

/// Partials drawn around a few planted groups so that merges actually happen.
fn merger_instance(seed: u64) -> Vec<Community> {
    let mut r = rng::stream(seed, 2);
    let groups: Vec<Vec<VertexId>> = (0..r.random_range(2..6))
        .map(|_| {
            let start = r.random_range(0..80);
            (start..start + r.random_range(8..20)).collect()
        })
        .collect();
    let count = r.random_range(2..=40);
    (0..count)
        .map(|_| {
            let group = &groups[r.random_range(0..groups.len())];
            let mut members: Vec<VertexId> = group
                .iter()
                .copied()
                .filter(|_| r.random::<f64>() < 0.6)
                .collect();
            if r.random::<f64>() < 0.3 {
                members.push(r.random_range(0..100));
            }
            if members.is_empty() {
                members.push(group[0]);
            }
            members.sort_unstable();
            members.dedup();
            Community::from_partial(&members)
        })
        .collect()
}

fn canonical(pool: Vec<Community>) -> Vec<(Vec<(VertexId, u32)>, u32)> {
    let mut out: Vec<_> = pool.into_iter().map(|c| (c.members().to_vec(), c.l())).collect();
    out.sort();
    out
}

fn oracle_equivalence() -> Verdict {
    let cfg = MergerConfig { t_fs: 0.1, t_f0: 0.0 };
    // Suppression breaks the reducibility the chain walk relies on, so agreement
    // with t_f0 > 0 is reported but not required.
    let suppressed = MergerConfig { t_fs: 0.1, t_f0: 4.0 };
    let (mut merges, mut agree_suppressed) = (0, 0);
    for seed in 0..50 {
        let instance = merger_instance(seed);
        let before = instance.len();
        let fast = canonical(run_merger(instance.clone(), &cfg));
        let slow = canonical(run_merger_naive(instance.clone(), &cfg));
        if fast != slow {
            return verdict(false, format!("instance {seed} differs"));
        }
        merges += before - fast.len();
        agree_suppressed += usize::from(
            canonical(run_merger(instance.clone(), &suppressed))
                == canonical(run_merger_naive(instance, &suppressed)),
        );
    }
    verdict(
        true,
        format!(
            "50 instances identical at t_f0=0 ({merges} merges in total); \
             {agree_suppressed}/50 agree at t_f0=4"
        ),
    )
}

// ---- criterion 3 ----------------------------------------------------------

fn g_tracks_p() -> Verdict {
    let mut total = 0.0;
    for seed in 0..10 {
        let params = SimpleBenchmarkParams {
            n: 200,
            k_mean: 0.3 * 199.0,
            p: 0.0,
            s_mean: 0.0,
            c_mean: 0.0,
            seed,
        };
        let (g, _) = gen_simple(&params).unwrap();
        let mut cfg = DetectConfig::default();
        cfg.ego.seed = seed;
        let detection = detect(&g, &cfg).unwrap();
        let top = detection.merged.iter().max_by_key(|c| c.l()).unwrap();
        total += top.g();
    }
    let mean = total / 10.0;
    verdict(
        (mean - 0.3).abs() <= 0.05,
        format!("mean g {mean:.4} over 10 seeds"),
    )
}

// ---- criterion 4 ----------------------------------------------------------

fn sparse_benchmark() -> Verdict {
    let s = settings(Preset::Sparse, 1, &[]);
    let (_, truth, result) = benchmark_run(&s);
    let planted = truth.len() as f64;
    let found = result.cover.len() as f64;
    let mean_size = result.cover.sets().map(<[VertexId]>::len).sum::<usize>() as f64 / found.max(1.0);
    let t_l = s.thresholds().unwrap().t_l;
    const SMALL: usize = 20;
    let spurious = result
        .merged
        .iter()
        .filter(|c| c.l() < t_l && c.len() <= SMALL)
        .count();
    let planted_small = truth.sets().filter(|c| c.len() <= SMALL).count();
    let count_ok = (found / planted - 1.0).abs() <= 0.15;
    let size_ok = (mean_size / 40.0 - 1.0).abs() <= 0.10;
    let peak_ok = spurious > planted_small;
    verdict(
        count_ok && size_ok && peak_ok,
        format!(
            "{found} of {planted} communities, mean size {mean_size:.2}, \
             {spurious} merged with l<{t_l} and size<={SMALL} vs {planted_small} planted"
        ),
    )
}

// ---- criteria 5 and 6 -----------------------------------------------------

const SEEDS: [u64; 3] = [1, 2, 3];

fn mean_nmi(extra: &[(&str, &str)]) -> f64 {
    let mut total = 0.0;
    for seed in SEEDS {
        let s = settings(Preset::Dense, seed, extra);
        let (g, truth, result) = benchmark_run(&s);
        total += onmi(&truth, &result.cover, g.vertex_count());
    }
    total / SEEDS.len() as f64
}

fn nmi_across_p() -> Verdict {
    let ps = ["0.26", "0.30", "0.34", "0.38"];
    let values: Vec<f64> = ps.iter().map(|p| mean_nmi(&[("p", p)])).collect();
    let monotone = values.windows(2).all(|w| w[1] >= w[0]);
    let at_030 = values[1];
    let listing: Vec<String> = ps
        .iter()
        .zip(&values)
        .map(|(p, v)| format!("p={p}: {v:.4}"))
        .collect();
    verdict(at_030 >= 0.90 && monotone, listing.join(", "))
}

fn nmi_across_memberships() -> Verdict {
    let two = mean_nmi(&[("c_mean", "2")]);
    let five = mean_nmi(&[("c_mean", "5")]);
    verdict(
        (two - five).abs() <= 0.05,
        format!("c=2: {two:.4}, c=5: {five:.4}, gap {:.4}", (two - five).abs()),
    )
}

// ---- criterion 7 ----------------------------------------------------------

fn knn() -> Verdict {
    let value = applicability_knn(40.0, 0.28);
    let rounded = (value * 100.0).round() / 100.0;
    verdict(
        (value - 2.7776).abs() < 1e-9 && rounded == 2.78,
        format!("<k_nn>(40, 0.28) = {value:.4}"),
    )
}

// ---- criterion 8 ----------------------------------------------------------

fn timing() -> Verdict {
    let s = settings(Preset::Sparse, 1, &[]);
    let table = run::time_pipeline(
        &[10_000, 30_000, 100_000],
        &s.simple().unwrap(),
        &s.detect().unwrap(),
        1,
    )
    .unwrap();
    let rows: Vec<String> = table
        .rows
        .iter()
        .map(|r| format!("n={} {:.2}s", r.n, r.seconds))
        .collect();
    verdict(
        table.slope <= 1.15,
        format!("slope {:.3} ({})", table.slope, rows.join(", ")),
    )
}

// ---- criterion 9 ----------------------------------------------------------

fn monotone(trace: &[f64]) -> bool {
    trace.windows(2).all(|w| w[1] >= w[0] - 1e-9 * w[0].abs())
}

fn em() -> Verdict {
    let mut r = rng::stream(99, 9);
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
        let single = EmSettings {
            restarts: 1,
            ..Default::default()
        };
        for settings in [single, EmSettings::default()] {
            let fit = fit_belonging(&ego, k, &mut rng::stream(trial, 0), settings).unwrap();
            if !monotone(&fit.log_likelihood) {
                return verdict(false, format!("log-likelihood decreased on random ego {trial}"));
            }
        }
    }

    let size = 10u32;
    let first: Vec<VertexId> = (0..size).collect();
    let second: Vec<VertexId> = std::iter::once(0).chain(size..2 * size - 1).collect();
    let mut edges = Vec::new();
    for block in [&first, &second] {
        for (i, &a) in block.iter().enumerate() {
            for &b in &block[i + 1..] {
                edges.push((a, b));
            }
        }
    }
    let g = Graph::from_edges(0, edges).0;
    let expected: BTreeSet<Vec<VertexId>> = [first, second].into_iter().collect();
    for seed in 0..10 {
        let cfg = EgoConfig {
            min_degree: 1,
            seed,
            ..Default::default()
        };
        let found: BTreeSet<Vec<VertexId>> = partials_for_vertex(&g, 0, &cfg)
            .unwrap()
            .into_iter()
            .map(|p| p.members)
            .collect();
        if found != expected {
            return verdict(
                false,
                format!("two-clique ego gave {} partials at seed {seed}", found.len()),
            );
        }
    }
    verdict(
        true,
        "100 random egos monotone; two-clique ego gives both cliques over 10 seeds",
    )
}

// ---- criterion 10 ---------------------------------------------------------

fn random_cover(n: usize, seed: u64) -> Cover {
    let mut r = rng::stream(seed, 10);
    let sets = (0..250).map(|_| (0..80).map(|_| r.random_range(0..n as VertexId)).collect());
    Cover::from_sets(n, sets)
}

fn nmi() -> Verdict {
    let n = 10_000;
    let (_, planted) = gen_simple(&SimpleBenchmarkParams {
        seed: 4,
        ..Default::default()
    })
    .unwrap();
    let identity = onmi(&planted, &planted, n);
    let (x, y) = (random_cover(n, 1), random_cover(n, 2));
    let independent = onmi(&x, &y, n);
    let mut asymmetry: f64 = (onmi(&planted, &x, n) - onmi(&x, &planted, n)).abs();
    asymmetry = asymmetry.max((independent - onmi(&y, &x, n)).abs());
    let pass = format!("{identity:.4}") == "1.0000" && independent < 0.05 && asymmetry <= 1e-12;
    verdict(
        pass,
        format!("identity {identity:.4}, independent {independent:.4}, asymmetry {asymmetry:.1e}"),
    )
}

// ---- criterion 11 ---------------------------------------------------------

fn determinism() -> Verdict {
    let dir = tempfile::TempDir::new().unwrap();
    let bin = env!("CARGO_BIN_EXE_pcma");
    let prefix = dir.path().join("bench");
    let generated = Command::new(bin)
        .args([
            "generate", "simple", "--preset", "sparse", "--n", "3000", "--seed", "11", "--out",
        ])
        .arg(&prefix)
        .output()
        .unwrap();
    if !generated.status.success() {
        return verdict(false, "generate failed");
    }
    let graph = dir.path().join("bench.edges");
    let mut outputs = Vec::new();
    for (i, workers) in ["1", "1", "4", "4"].into_iter().enumerate() {
        let out = dir.path().join(format!("cover{i}"));
        let status = Command::new(bin)
            .args([
                "detect",
                "--preset",
                "sparse",
                "--seed",
                "11",
                "--annotated",
                "--workers",
                workers,
                "--graph",
            ])
            .arg(&graph)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        if !status.status.success() {
            return verdict(
                false,
                format!("detect failed: {}", String::from_utf8_lossy(&status.stderr)),
            );
        }
        outputs.push(fs::read(&out).unwrap());
    }
    let identical = outputs.windows(2).all(|w| w[0] == w[1]);
    let communities = outputs[0].iter().filter(|&&b| b == b'\n').count();
    verdict(
        identical && communities > 0,
        format!("4 runs at workers 1,1,4,4: identical={identical}, {communities} communities"),
    )
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("merger identities", identities),
        ("oracle equivalence", oracle_equivalence),
        ("g tracks p", g_tracks_p),
        ("simple benchmark reproduction", sparse_benchmark),
        ("NMI across p", nmi_across_p),
        ("NMI across memberships", nmi_across_memberships),
        ("applicability threshold", knn),
        ("linear scaling", timing),
        ("EM correctness", em),
        ("NMI scorer", nmi),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {status} {name}: {} [{:.1}s]",
            i + 1,
            v.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!v.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
