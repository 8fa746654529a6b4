//! `hypercom` — embed graphs in the Poincaré ball, detect and classify
//! communities, evaluate predictions, and plot 2-D embeddings.
//!
//! Exit codes: 0 success, 1 runtime failure (divergence, non-convergence),
//! 2 usage failure (bad flags, malformed or missing inputs).

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use hypercom::classify::{
    cross_validate, ClassifierKind, CvOptions, HlrOptions, LabelMatrix,
};
use hypercom::error::{Error, Result};
use hypercom::gaussian::{GridSpec, ZetaTable};
use hypercom::geometry::BallPoint;
use hypercom::graph::{load_edge_list, load_labels, Graph};
use hypercom::metrics::{
    conductance, nmi, precision_at_n, summarize, Matching, EXHAUSTIVE_MATCHING_LIMIT,
};
use hypercom::mixture::{
    em_fit, kmeans_fit, BarycenterOptions, EmOptions, InitPolicy, KmeansOptions, MixtureModel,
};
use hypercom::plot::{render_svg, PlotOptions};
use hypercom::trainer::{read_embeddings_csv, train, write_embeddings_csv, TrainConfig};

/// Directory for cached σ-tables; set to skip recomputing the
/// normalization grid on every invocation.
const ZETA_CACHE_ENV: &str = "HYPERCOM_ZETA_CACHE";

#[derive(Parser)]
#[command(
    name = "hypercom",
    version,
    about = "Hyperbolic graph embedding and community detection"
)]
struct Cli {
    /// Worker threads for parallel sections (0 = one per core). Results
    /// are reproducible at any thread count; use 1 for strict
    /// single-threaded replay.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed an edge list and fit the community mixture.
    Embed(EmbedArgs),
    /// Cluster an embedding (unsupervised) and score it against the graph
    /// and optional ground truth.
    Detect(DetectArgs),
    /// Cross-validate a supervised classifier on a labeled embedding.
    Classify(ClassifyArgs),
    /// Score an existing assignment file against ground truth.
    Eval(EvalArgs),
    /// Render a 2-D embedding (and optionally its mixture) to SVG.
    Plot(PlotArgs),
}

#[derive(clap::Args)]
struct EmbedArgs {
    /// Edge list: one "u v" pair per line, '#' comments allowed.
    edges: PathBuf,
    /// Ball dimension.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Total training epochs, including warmup.
    #[arg(long, default_value_t = 50)]
    epochs: usize,
    /// Leading epochs that skip the community loss.
    #[arg(long, default_value_t = 10)]
    warmup: usize,
    /// Weight of the edge-attraction loss.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Weight of the context (skip-gram) loss.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Weight of the community loss.
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    /// Riemannian learning rate.
    #[arg(long, default_value_t = 1e-2)]
    lr: f64,
    /// Random walks started per node.
    #[arg(long, default_value_t = 10)]
    walks: usize,
    /// Nodes per random walk.
    #[arg(long = "walk-len", default_value_t = 80)]
    walk_len: usize,
    /// Context windows are drawn uniformly from 1..=window.
    #[arg(long, default_value_t = 5)]
    window: usize,
    /// Negative samples per (center, context) pair.
    #[arg(long, default_value_t = 5)]
    negatives: usize,
    /// Number of mixture components.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Master seed; every random stream derives from it.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Accumulate gradients over batches of this many pairs instead of
    /// stepping per pair.
    #[arg(long)]
    batch: Option<usize>,
    /// Directory receiving embeddings.csv, mixture.json, manifest.json.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum DetectMethod {
    /// Expectation-maximization mixture fit.
    Em,
    /// Geodesic K-Means.
    Kmeans,
}

#[derive(clap::Args)]
struct DetectArgs {
    /// Embeddings CSV produced by `embed`.
    embeddings: PathBuf,
    /// Number of communities to detect.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, value_enum, default_value_t = DetectMethod::Em)]
    method: DetectMethod,
    /// Edge list; enables the conductance column.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Ground-truth labels ("token id[,id...]" per line); enables the
    /// Precision@1 and NMI columns.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write the per-node assignment ("token cluster" per line) here
    /// instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ClassifyMethod {
    /// Nearest community barycenter.
    Kmeans,
    /// Supervised mixture + Bayes rule.
    Gmm,
    /// Hyperbolic logistic regression.
    Hlr,
    /// Most-common-community baseline.
    Mcc,
}

#[derive(clap::Args)]
struct ClassifyArgs {
    /// Embeddings CSV produced by `embed`.
    embeddings: PathBuf,
    /// Ground-truth labels ("token id[,id...]" per line).
    labels: PathBuf,
    #[arg(long, value_enum)]
    method: ClassifyMethod,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Precision@n levels to report, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    topn: Vec<usize>,
    /// Repeat the whole cross-validation this many times with shifted
    /// seeds and pool the fold scores.
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Learning rate for the logistic-regression method.
    #[arg(long = "hlr-lr", default_value_t = 5e-2)]
    hlr_lr: f64,
    /// Training epochs for the logistic-regression method.
    #[arg(long = "hlr-epochs", default_value_t = 300)]
    hlr_epochs: usize,
    /// Write the JSON metrics report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(clap::Args)]
struct EvalArgs {
    /// Assignment file ("token cluster" per line), e.g. from `detect`.
    #[arg(long)]
    pred: PathBuf,
    /// Ground-truth labels ("token id[,id...]" per line).
    #[arg(long)]
    labels: PathBuf,
    /// Edge list; enables the conductance column.
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(clap::Args)]
struct PlotArgs {
    /// Embeddings CSV produced by `embed` (2-D only).
    embeddings: PathBuf,
    /// Labels for coloring the scatter.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Mixture JSON for means and σ-circles.
    #[arg(long)]
    mixture: Option<PathBuf>,
    /// Output SVG path.
    #[arg(long, default_value = "plot.svg")]
    out: PathBuf,
    /// Rendered size in pixels.
    #[arg(long, default_value_t = 640)]
    size: usize,
}

fn main() {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // A second build_global in one process is harmless for tests.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    let outcome = match cli.command {
        Command::Embed(args) => cmd_embed(args, cli.threads),
        Command::Detect(args) => cmd_detect(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Plot(args) => cmd_plot(args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        std::process::exit(if e.is_usage() { 2 } else { 1 });
    }
}

/// Opens an input file, naming it in the error when it does not exist.
fn open_input(path: &Path) -> Result<BufReader<File>> {
    match File::open(path) {
        Ok(f) => Ok(BufReader::new(f)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            Err(Error::Usage(format!("no such input: {}", path.display())))
        }
        Err(e) => Err(e.into()),
    }
}

/// Source identifier recorded in manifests: an explicit build revision
/// when one was baked in, the crate version otherwise.
fn revision() -> String {
    option_env!("HYPERCOM_REVISION").unwrap_or(env!("CARGO_PKG_VERSION")).to_string()
}

/// σ-table for dimension `m`, cached under `HYPERCOM_ZETA_CACHE` when that
/// directory is set. Stale or foreign cache files are recomputed and
/// overwritten, never trusted.
fn zeta_table(m: usize) -> Result<ZetaTable> {
    let dir = match std::env::var(ZETA_CACHE_ENV) {
        Ok(d) if !d.is_empty() => d,
        _ => return ZetaTable::new(m),
    };
    let path = Path::new(&dir).join(format!("zeta-dim{m}.json"));
    if let Ok(f) = File::open(&path) {
        if let Ok(table) = ZetaTable::load_for(BufReader::new(f), m, &GridSpec::default()) {
            return Ok(table);
        }
    }
    let table = ZetaTable::new(m)?;
    fs::create_dir_all(&dir)?;
    table.save(BufWriter::new(File::create(&path)?))?;
    Ok(table)
}

fn cmd_embed(args: EmbedArgs, threads: usize) -> Result<()> {
    let started = Instant::now();
    let g = load_edge_list(open_input(&args.edges)?)?;
    let cfg = TrainConfig {
        dim: args.dim,
        alpha: args.alpha,
        beta: args.beta,
        gamma: args.gamma,
        lr: args.lr,
        epochs: args.epochs,
        warmup_epochs: args.warmup,
        walks_per_node: args.walks,
        walk_length: args.walk_len,
        max_window: args.window,
        negatives: args.negatives,
        k: args.k,
        batch: args.batch,
        seed: args.seed,
    };

    let train_started = Instant::now();
    let result = train(&g, &cfg)?;
    let train_ms = train_started.elapsed().as_millis();

    fs::create_dir_all(&args.out_dir)?;
    let emb_path = args.out_dir.join("embeddings.csv");
    let mix_path = args.out_dir.join("mixture.json");
    let man_path = args.out_dir.join("manifest.json");
    write_embeddings_csv(&result.table, &g, BufWriter::new(File::create(&emb_path)?))?;
    result.model.save(BufWriter::new(File::create(&mix_path)?))?;

    let last = result.losses.last().expect("training always runs >= 1 epoch");
    let manifest = serde_json::json!({
        "command": "embed",
        "revision": revision(),
        "seed": cfg.seed,
        "threads": threads,
        "inputs": { "edges": args.edges.display().to_string() },
        "outputs": {
            "embeddings": emb_path.display().to_string(),
            "mixture": mix_path.display().to_string(),
        },
        "config": cfg,
        "metrics": {
            "nodes": g.n_nodes(),
            "edges": g.n_edges(),
            "final_loss": { "o1": last.o1, "o2": last.o2, "o3": last.o3 },
        },
        "timings_ms": {
            "train": train_ms,
            "total": started.elapsed().as_millis(),
        },
    });
    let mut man = BufWriter::new(File::create(&man_path)?);
    serde_json::to_writer_pretty(&mut man, &manifest)?;
    man.write_all(b"\n")?;
    man.flush()?;

    println!(
        "embedded {} nodes / {} edges in {} ms (o1 {:.4}, o2 {:.4}, o3 {:.4})",
        g.n_nodes(),
        g.n_edges(),
        train_ms,
        last.o1,
        last.o2,
        last.o3
    );
    println!("wrote {}", emb_path.display());
    println!("wrote {}", mix_path.display());
    println!("wrote {}", man_path.display());
    Ok(())
}

/// Loads an embeddings CSV and aligns it with `g`'s node order. Every
/// graph node must be embedded; embedded tokens missing from the graph are
/// rejected too, so metrics always talk about the same node set.
fn aligned_points(
    tokens: &[String],
    points: Vec<BallPoint>,
    g: &Graph,
) -> Result<Vec<BallPoint>> {
    if tokens.len() != g.n_nodes() {
        return Err(Error::Usage(format!(
            "embedding covers {} nodes but the graph has {}",
            tokens.len(),
            g.n_nodes()
        )));
    }
    let mut slots: Vec<Option<BallPoint>> = vec![None; g.n_nodes()];
    for (t, p) in tokens.iter().zip(points) {
        let id = g
            .id_of(t)
            .ok_or_else(|| Error::Usage(format!("embedded token '{t}' is not in the graph")))?;
        slots[id as usize] = Some(p);
    }
    Ok(slots.into_iter().map(|s| s.expect("counts matched and tokens were distinct")).collect())
}

/// Loads labels onto `g`, rejecting label tokens that have no embedding.
fn labels_for_embedded(path: &Path, g: &mut Graph, embedded: usize) -> Result<LabelMatrix> {
    let labels = load_labels(open_input(path)?, g)?;
    if g.n_nodes() > embedded {
        let extra: Vec<&str> =
            (embedded..g.n_nodes()).map(|i| g.token(i as u32)).collect();
        return Err(Error::Usage(format!(
            "label file names nodes with no embedding: {}",
            extra.join(", ")
        )));
    }
    Ok(labels)
}

/// The three-column score line shared by `detect` and `eval`:
/// Precision@1 and NMI against optional truth, conductance against an
/// optional graph.
fn report_metrics(
    g: &Graph,
    assign: &[usize],
    labels: Option<&LabelMatrix>,
    with_conductance: bool,
) -> Result<()> {
    let mut precision_col = "-".to_string();
    let mut nmi_col = "-".to_string();
    let mut conductance_col = "-".to_string();

    if let Some(y) = labels {
        let k_pred = assign.iter().max().map_or(0, |m| m + 1);
        let matching = if k_pred.max(y.k()) <= EXHAUSTIVE_MATCHING_LIMIT {
            Matching::Exhaustive
        } else {
            Matching::Greedy
        };
        let pred_topn: Vec<Vec<u32>> = assign.iter().map(|&c| vec![c as u32]).collect();
        let p1 = precision_at_n(&pred_topn, y, matching)?;
        let tag = if matching == Matching::Exhaustive { "exhaustive" } else { "greedy" };
        precision_col = format!("{p1:.4} ({tag})");

        // NMI compares two total single-label partitions; restrict to the
        // labeled single-label nodes.
        let pairs: Vec<(usize, usize)> = (0..y.n())
            .filter_map(|i| match y.memberships(i) {
                [one] => Some((assign[i], *one as usize)),
                _ => None,
            })
            .collect();
        if pairs.len() == y.labeled_nodes().len() && !pairs.is_empty() {
            let (pred, truth): (Vec<usize>, Vec<usize>) = pairs.into_iter().unzip();
            let score = nmi(&pred, &truth)?;
            nmi_col = if score.degenerate {
                format!("{:.4} (degenerate)", score.value)
            } else {
                format!("{:.4}", score.value)
            };
        } else {
            nmi_col = "- (multi-label truth)".to_string();
        }
    }

    if with_conductance {
        let c = conductance(g, assign)?;
        conductance_col = if c.degenerate_clusters.is_empty() {
            format!("{:.4}", c.mean)
        } else {
            format!("{:.4} (degenerate: {:?})", c.mean, c.degenerate_clusters)
        };
    }

    println!("Precision@1 / Conductance / NMI");
    println!("{precision_col} / {conductance_col} / {nmi_col}");
    Ok(())
}

fn cmd_detect(args: DetectArgs) -> Result<()> {
    let (tokens, raw_points) = read_embeddings_csv(open_input(&args.embeddings)?)?;
    let (mut g, points) = match &args.graph {
        Some(path) => {
            let g = load_edge_list(open_input(path)?)?;
            let points = aligned_points(&tokens, raw_points, &g)?;
            (g, points)
        }
        None => (Graph::from_tokens(&tokens)?, raw_points),
    };
    if args.k == 0 || args.k > points.len() {
        return Err(Error::Usage(format!(
            "k ({}) must be in 1..={} (the number of embedded nodes)",
            args.k,
            points.len()
        )));
    }
    let table = zeta_table(points[0].dim())?;
    let assign: Vec<usize> = match args.method {
        DetectMethod::Em => {
            let fit = em_fit(
                &points,
                args.k,
                InitPolicy::KMeansPlusPlus { seed: args.seed },
                &table,
                &EmOptions { rescue_seed: args.seed, ..EmOptions::default() },
            )?;
            (0..points.len()).map(|i| fit.resp.argmax(i)).collect()
        }
        DetectMethod::Kmeans => {
            kmeans_fit(
                &points,
                args.k,
                InitPolicy::KMeansPlusPlus { seed: args.seed },
                &table,
                &KmeansOptions::default(),
            )?
            .assignments
        }
    };

    match &args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            for (i, c) in assign.iter().enumerate() {
                writeln!(w, "{} {c}", g.token(i as u32))?;
            }
            w.flush()?;
            println!("wrote {}", path.display());
        }
        None => {
            for (i, c) in assign.iter().enumerate() {
                println!("{} {c}", g.token(i as u32));
            }
        }
    }

    let labels = match &args.labels {
        Some(path) => Some(labels_for_embedded(path, &mut g, points.len())?),
        None => None,
    };
    report_metrics(&g, &assign, labels.as_ref(), args.graph.is_some())
}

fn cmd_classify(args: ClassifyArgs) -> Result<()> {
    let (tokens, points) = read_embeddings_csv(open_input(&args.embeddings)?)?;
    let mut g = Graph::from_tokens(&tokens)?;
    let labels = labels_for_embedded(&args.labels, &mut g, points.len())?;
    let kind = match args.method {
        ClassifyMethod::Kmeans => ClassifierKind::NearestBarycenter,
        ClassifyMethod::Gmm => ClassifierKind::SupervisedGmm,
        ClassifyMethod::Hlr => ClassifierKind::LogisticRegression,
        ClassifyMethod::Mcc => ClassifierKind::MostCommon,
    };
    if args.runs == 0 {
        return Err(Error::Usage("--runs must be at least 1".into()));
    }

    let mut pooled: Vec<Vec<f64>> = vec![Vec::new(); args.topn.len()];
    let mut skipped = 0usize;
    for r in 0..args.runs {
        let opts = CvOptions {
            folds: args.folds,
            seed: args.seed.wrapping_add(r as u64),
            topn: args.topn.clone(),
            bary: BarycenterOptions::default(),
            hlr: HlrOptions {
                lr: args.hlr_lr,
                epochs: args.hlr_epochs,
                bary: BarycenterOptions::default(),
            },
        };
        let report = cross_validate(&points, &labels, kind, &opts)?;
        skipped += report.skipped_folds.len();
        for (t, values) in report.per_fold.into_iter().enumerate() {
            pooled[t].extend(values);
        }
    }

    let mut metric_json = serde_json::Map::new();
    for (t, &n) in args.topn.iter().enumerate() {
        let s = summarize(&pooled[t])?;
        println!(
            "Precision@{n}: {:.4} \u{00b1} {:.4} over {} folds{}",
            s.mean,
            s.std,
            pooled[t].len(),
            if skipped > 0 { format!(" ({skipped} skipped)") } else { String::new() }
        );
        metric_json.insert(
            format!("precision@{n}"),
            serde_json::json!({ "mean": s.mean, "std": s.std, "per_fold": pooled[t] }),
        );
    }

    if let Some(path) = &args.report {
        let report = serde_json::json!({
            "command": "classify",
            "revision": revision(),
            "inputs": {
                "embeddings": args.embeddings.display().to_string(),
                "labels": args.labels.display().to_string(),
            },
            "config": {
                "method": format!("{:?}", kind),
                "folds": args.folds,
                "runs": args.runs,
                "seed": args.seed,
                "topn": args.topn,
                "hlr_lr": args.hlr_lr,
                "hlr_epochs": args.hlr_epochs,
            },
            "metrics": metric_json,
            "skipped_folds": skipped,
        });
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, &report)?;
        w.write_all(b"\n")?;
        w.flush()?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    // Predictions: one "token cluster" pair per line.
    let mut pred_pairs: Vec<(String, usize)> = Vec::new();
    for (idx, line) in open_input(&args.pred)?.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let (token, cluster) = match (parts.next(), parts.next(), parts.next()) {
            (Some(t), Some(c), None) => (t, c),
            _ => {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected 'token cluster', got '{trimmed}'"),
                })
            }
        };
        let cluster: usize = cluster.parse().map_err(|_| Error::Parse {
            line: idx + 1,
            msg: format!("cluster id '{cluster}' is not an integer"),
        })?;
        pred_pairs.push((token.to_string(), cluster));
    }
    if pred_pairs.is_empty() {
        return Err(Error::EmptyInput { what: "predictions" });
    }

    let mut g = match &args.graph {
        Some(path) => load_edge_list(open_input(path)?)?,
        None => {
            let tokens: Vec<&str> = pred_pairs.iter().map(|(t, _)| t.as_str()).collect();
            Graph::from_tokens(&tokens)?
        }
    };
    let n = g.n_nodes();
    let mut assign: Vec<Option<usize>> = vec![None; n];
    for (token, cluster) in &pred_pairs {
        let id = g.id_of(token).ok_or_else(|| {
            Error::Usage(format!("predicted token '{token}' is not in the graph"))
        })?;
        if assign[id as usize].replace(*cluster).is_some() {
            return Err(Error::Usage(format!("token '{token}' predicted twice")));
        }
    }
    let assign: Vec<usize> = assign
        .into_iter()
        .enumerate()
        .map(|(i, a)| {
            a.ok_or_else(|| Error::Usage(format!("node '{}' has no prediction", g.token(i as u32))))
        })
        .collect::<Result<_>>()?;

    let labels = labels_for_embedded(&args.labels, &mut g, n)?;
    report_metrics(&g, &assign, Some(&labels), args.graph.is_some())
}

fn cmd_plot(args: PlotArgs) -> Result<()> {
    let (tokens, points) = read_embeddings_csv(open_input(&args.embeddings)?)?;
    let labels = match &args.labels {
        Some(path) => {
            let mut g = Graph::from_tokens(&tokens)?;
            Some(labels_for_embedded(path, &mut g, points.len())?)
        }
        None => None,
    };
    let model = match &args.mixture {
        Some(path) => Some(MixtureModel::load(open_input(path)?)?),
        None => None,
    };
    let opts = PlotOptions { size_px: args.size, ..PlotOptions::default() };
    let svg = render_svg(&points, labels.as_ref(), model.as_ref(), &opts)?;
    fs::write(&args.out, svg)?;
    println!("wrote {}", args.out.display());
    Ok(())
}
