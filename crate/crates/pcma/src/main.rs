use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use pcma::config::{Preset, Settings};
use pcma::io::{self as formats, LoadedGraph};
use pcma::{run, tables};
use pcma_core::bench::{gen_lfr, gen_simple};
use pcma_core::nmi::onmi;
use pcma_core::pipeline::DetectConfig;
use pcma_core::stats::community_stats;

#[derive(Parser)]
#[command(
    name = "pcma",
    version,
    about = "Overlapping community detection by partial community merging"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect communities in an edge list.
    Detect(DetectArgs),
    /// Generate a benchmark graph with its planted cover.
    Generate(GenerateArgs),
    /// Overlapping NMI between two covers.
    Score(ScoreArgs),
    /// Per-community, per-vertex and (size, g) histogram tables.
    Stats(StatsArgs),
    /// Pipeline wall time over simple benchmarks of growing size.
    BenchTime(BenchArgs),
}

macro_rules! overrides {
    ($($field:ident => $help:literal),* $(,)?) => {
        /// Setting flags; each maps to the config key of the same name.
        #[derive(Args, Default)]
        struct Overrides {
            $(
                #[arg(long, help = $help)]
                $field: Option<String>,
            )*
        }

        impl Overrides {
            fn pairs(&self) -> Vec<(&'static str, &str)> {
                let mut out = Vec::new();
                $(
                    if let Some(v) = &self.$field {
                        out.push((stringify!($field), v.as_str()));
                    }
                )*
                out
            }
        }
    };
}

overrides! {
    t_fs => "Merger threshold on the symmetric similarity",
    t_l => "Minimum merged partials per community",
    t_s => "Minimum occurrence score of a member",
    t_sl => "Members need S / l above this",
    t_f0 => "Suppression mass for small mergers (0 disables)",
    min_size => "Minimum members per final community",
    ratio_cut => "'uniform', 'g' or 'g:<factor>'",
    min_degree => "Vertices below this degree get no ego fit",
    clustering_cap => "Vertices above this local clustering get no ego fit",
    belong_threshold => "Belonging coefficient a member must exceed",
    intra_overlap => "Overlap portion that joins partials of one ego",
    ego_k => "Fixed communities per ego fit",
    em_iterations => "EM iteration cap",
    em_tolerance => "EM relative convergence tolerance",
    em_restarts => "EM random starts per ego",
    em_parallel_cosine => "Cosine at which fitted ego communities fold together",
    seed => "Random seed",
    workers => "Worker threads",
    n => "Generator: vertices",
    k_mean => "Generator: mean degree",
    p => "Simple: intra-community edge probability",
    s_mean => "Simple: mean community size",
    c_mean => "Simple: mean memberships per vertex",
    k_max => "LFR: maximum degree",
    mu => "LFR: mixing fraction",
    tau1 => "LFR: degree exponent",
    tau2 => "LFR: community size exponent",
    c_min => "LFR: minimum community size",
    c_max => "LFR: maximum community size",
    overlap_fraction => "LFR: fraction of overlapping vertices",
    memberships_per_overlapper => "LFR: communities per overlapping vertex",
    sizes => "bench-time: comma-separated vertex counts",
}

#[derive(Args)]
struct Layers {
    /// key=value settings file; flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named parameter set applied beneath the config file.
    #[arg(long, value_parser = parse_preset)]
    preset: Option<Preset>,
    #[command(flatten)]
    overrides: Overrides,
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse()
        .map_err(|_| format!("unknown preset {s:?} (sparse, dense, lfr)"))
}

impl Layers {
    fn settings(&self) -> Result<Settings> {
        let mut s = self.preset.map(Settings::from_preset).unwrap_or_default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            s.overlay(&Settings::parse(&text).with_context(|| format!("in {}", path.display()))?);
        }
        let mut flags = Settings::default();
        for (k, v) in self.overrides.pairs() {
            flags.set(k, v)?;
        }
        s.overlay(&flags);
        Ok(s)
    }
}

#[derive(Args)]
struct DetectArgs {
    /// Edge list to analyze.
    #[arg(long)]
    graph: PathBuf,
    /// Cover file to write.
    #[arg(long)]
    out: PathBuf,
    /// Write members as id:S with l, w and g per community.
    #[arg(long)]
    annotated: bool,
    /// Treat vertex ids as arbitrary tokens and write the id mapping here.
    #[arg(long)]
    relabel: Option<PathBuf>,
    /// Also write the partial communities to <out>.partials.
    #[arg(long)]
    dump_partials: bool,
    /// Also write the merged pool before cleaning to <out>.merged.
    #[arg(long)]
    dump_merged: bool,
    #[command(flatten)]
    layers: Layers,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Simple,
    Lfr,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    kind: Kind,
    /// Output prefix: writes <out>.edges, <out>.cover and <out>.manifest.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    layers: Layers,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    detected: PathBuf,
    /// Vertex count; defaults to the graph's when --graph is given, else to one
    /// past the largest id in either cover.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, conflicts_with = "n")]
    graph: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    cover: PathBuf,
    /// Equal-width g bins on [0, 1] for the histogram.
    #[arg(long, default_value_t = 20)]
    g_bins: usize,
    /// Output prefix for <out>.communities.tsv, <out>.vertices.tsv and
    /// <out>.histogram.tsv; tables go to stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Write the timing table here as well as to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    layers: Layers,
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w)
        .and_then(|()| w.flush())
        .with_context(|| format!("writing {}", path.display()))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

fn load_graph(path: &Path, relabel: bool) -> Result<LoadedGraph> {
    let reader = open(path)?;
    let loaded = if relabel {
        formats::load_edge_list_relabeled(reader)
    } else {
        formats::load_edge_list(reader)
    };
    loaded.with_context(|| format!("reading {}", path.display()))
}

fn detect_manifest(cfg: &DetectConfig, workers: usize, graph: &Path) -> String {
    let (e, t) = (&cfg.ego, &cfg.thresholds);
    let ratio = match t.ratio_cut {
        pcma_core::postprocess::RatioCut::Uniform => "uniform".to_string(),
        pcma_core::postprocess::RatioCut::ScaledByG(f) => format!("g:{f}"),
    };
    let ego_k = e.k_override.map_or_else(|| "auto".into(), |k| k.to_string());
    format!(
        "# pcma {} detect\ngraph={}\nseed={}\nworkers={workers}\n\
         min_degree={}\nclustering_cap={}\nbelong_threshold={}\nintra_overlap={}\nego_k={ego_k}\n\
         em_iterations={}\nem_tolerance={}\nem_restarts={}\nem_parallel_cosine={}\n\
         t_fs={}\nt_l={}\nt_s={}\nt_sl={}\nt_f0={}\nmin_size={}\nratio_cut={ratio}\n",
        env!("CARGO_PKG_VERSION"),
        graph.display(),
        e.seed,
        e.min_degree,
        e.clustering_cap,
        e.belong_threshold,
        e.intra_overlap,
        e.em.max_iterations,
        e.em.tolerance,
        e.em.restarts,
        e.em.parallel_cosine,
        t.t_fs,
        t.t_l,
        t.t_s,
        t.t_sl,
        t.t_f0,
        t.min_size,
    )
}

fn cmd_detect(args: &DetectArgs) -> Result<()> {
    let settings = args.layers.settings()?;
    let cfg = settings.detect()?;
    let workers = settings.workers()?;
    let loaded = load_graph(&args.graph, args.relabel.is_some())?;
    let g = &loaded.graph;

    let mut warnings = Vec::new();
    if loaded.report.self_loops > 0 {
        warnings.push(format!("dropped {} self-loops", loaded.report.self_loops));
    }
    if loaded.report.duplicates > 0 {
        warnings.push(format!("dropped {} duplicate edges", loaded.report.duplicates));
    }

    let result = run::detect(g, &cfg, workers)?;
    if result.qualified == 0 {
        warnings.push(format!(
            "no vertex passes min_degree={} and clustering_cap={}; the cover is empty",
            cfg.ego.min_degree, cfg.ego.clustering_cap
        ));
    }

    write_file(&args.out, |w| {
        formats::write_cover(&result.cover, args.annotated, w)
    })?;
    fs::write(
        with_suffix(&args.out, ".manifest"),
        detect_manifest(&cfg, workers, &args.graph),
    )
    .context("writing manifest")?;
    let report = run::report(g, &result, workers, &warnings);
    fs::write(with_suffix(&args.out, ".report"), &report).context("writing report")?;
    eprint!("{report}");
    if let (Some(path), Some(labels)) = (&args.relabel, &loaded.labels) {
        write_file(path, |w| formats::write_mapping(labels, w))?;
    }
    if args.dump_partials {
        write_file(&with_suffix(&args.out, ".partials"), |w| {
            formats::write_partials(&result.partials, w)
        })?;
    }
    if args.dump_merged {
        write_file(&with_suffix(&args.out, ".merged"), |w| {
            formats::write_merged(&result.merged, w)
        })?;
    }
    Ok(())
}

fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    let settings = args.layers.settings()?;
    let (graph, cover, manifest) = match args.kind {
        Kind::Simple => {
            let p = settings.simple()?;
            let (g, c) = gen_simple(&p)?;
            let m = format!(
                "# pcma {} generate simple\nn={}\nk_mean={}\np={}\ns_mean={}\nc_mean={}\nseed={}\n",
                env!("CARGO_PKG_VERSION"),
                p.n,
                p.k_mean,
                p.p,
                p.s_mean,
                p.c_mean,
                p.seed
            );
            (g, c, m)
        }
        Kind::Lfr => {
            let p = settings.lfr()?;
            let (g, c) = gen_lfr(&p)?;
            let m = format!(
                "# pcma {} generate lfr\nn={}\nk_mean={}\nk_max={}\nmu={}\ntau1={}\ntau2={}\nc_min={}\nc_max={}\n\
                 overlap_fraction={}\nmemberships_per_overlapper={}\nseed={}\n",
                env!("CARGO_PKG_VERSION"),
                p.n,
                p.k_mean,
                p.k_max,
                p.mu,
                p.tau1,
                p.tau2,
                p.c_min,
                p.c_max,
                p.overlap_fraction,
                p.memberships_per_overlapper,
                p.seed
            );
            (g, c, m)
        }
    };
    write_file(&with_suffix(&args.out, ".edges"), |w| {
        formats::write_edge_list(&graph, w)
    })?;
    write_file(&with_suffix(&args.out, ".cover"), |w| {
        formats::write_cover(&cover, false, w)
    })?;
    fs::write(with_suffix(&args.out, ".manifest"), manifest).context("writing manifest")?;
    eprintln!(
        "wrote {} vertices, {} edges, {} communities",
        graph.vertex_count(),
        graph.edge_count(),
        cover.len()
    );
    Ok(())
}

fn read_cover(path: &Path, n: Option<usize>) -> Result<pcma_core::Cover> {
    formats::read_cover(open(path)?, n).with_context(|| format!("reading {}", path.display()))
}

fn cmd_score(args: &ScoreArgs) -> Result<()> {
    let n = match (&args.graph, args.n) {
        (Some(path), _) => Some(load_graph(path, false)?.graph.vertex_count()),
        (None, n) => n,
    };
    let mut truth = read_cover(&args.truth, n)?;
    let mut detected = read_cover(&args.detected, n)?;
    let n = n.unwrap_or(truth.n.max(detected.n));
    truth.n = n;
    detected.n = n;
    println!("nmi\t{:.4}", onmi(&truth, &detected, n));
    println!("truth_communities\t{}", truth.len());
    println!("detected_communities\t{}", detected.len());
    Ok(())
}

fn cmd_stats(args: &StatsArgs) -> Result<()> {
    let g = load_graph(&args.graph, false)?.graph;
    let cover = read_cover(&args.cover, None)?;
    if cover.n > g.vertex_count() {
        bail!(
            "cover mentions vertex {} but the graph has {} vertices",
            cover.n - 1,
            g.vertex_count()
        );
    }
    let stats = community_stats(&g, &cover, args.g_bins)?;
    match &args.out {
        Some(prefix) => {
            write_file(&with_suffix(prefix, ".communities.tsv"), |w| {
                tables::write_communities(&stats, w)
            })?;
            write_file(&with_suffix(prefix, ".vertices.tsv"), |w| {
                tables::write_memberships(&stats, w)
            })?;
            write_file(&with_suffix(prefix, ".histogram.tsv"), |w| {
                tables::write_histogram(&stats, w)
            })?;
        }
        None => {
            let mut out = io::stdout().lock();
            tables::write_communities(&stats, &mut out)?;
            writeln!(out)?;
            tables::write_memberships(&stats, &mut out)?;
            writeln!(out)?;
            tables::write_histogram(&stats, &mut out)?;
        }
    }
    Ok(())
}

fn cmd_bench_time(args: &BenchArgs) -> Result<()> {
    let settings = args.layers.settings()?;
    let sizes = settings.sizes()?;
    let template = settings.simple()?;
    let cfg = settings.detect()?;
    let workers = settings.workers()?;
    let table = run::time_pipeline(&sizes, &template, &cfg, workers)?;
    tables::write_timing(&table, io::stdout().lock())?;
    if let Some(path) = &args.out {
        write_file(path, |w| tables::write_timing(&table, w))?;
        fs::write(
            with_suffix(path, ".manifest"),
            format!("# pcma bench-time\n{settings}"),
        )
        .context("writing manifest")?;
    }
    Ok(())
}

/// 3 for infeasible generator parameters, 2 for every other failure.
fn exit_code(err: &anyhow::Error) -> u8 {
    use pcma_core::Error::Infeasible;
    let infeasible = err.chain().any(|cause| {
        matches!(cause.downcast_ref::<pcma_core::Error>(), Some(Infeasible(_)))
            || matches!(
                cause.downcast_ref::<run::RunError>(),
                Some(run::RunError::Core(Infeasible(_)))
            )
    });
    if infeasible {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Detect(a) => cmd_detect(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Score(a) => cmd_score(a),
        Command::Stats(a) => cmd_stats(a),
        Command::BenchTime(a) => cmd_bench_time(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
