//! `hc2l` command-line tool. Vertex ids on the command line and in pair
//! files are 1-based, as in DIMACS files. Reports are `key=value` lines.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand};
use hc2l::dimacs::read_dimacs_file;
use hc2l::label::labelling_stats;
use hc2l::store::{load_from_path, save_to_path};
use hc2l::workload::{generate_workload, run_bench, BenchConfig, BenchStats};
use hc2l::{dijkstra, Beta, BuildConfig, Distance, DistanceIndex, Graph, Vertex, INFINITY};

/// Largest graph accepted by `verify --all-pairs`.
const ALL_PAIRS_LIMIT: usize = 5000;
/// Mismatches listed before the rest are only counted.
const LISTED_MISMATCHES: usize = 20;

#[derive(Parser)]
#[command(name = "hc2l", version, about = "Exact distance oracle from a hierarchy of balanced vertex cuts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index from a DIMACS graph.
    Build {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "0.2")]
        beta: Beta,
        #[arg(long, default_value_t = 1)]
        leaf_size: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        no_tail_pruning: bool,
        #[arg(long)]
        no_contraction: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Answer distance queries.
    #[command(group(ArgGroup::new("input").required(true).args(["s", "pairs"])))]
    Query {
        #[arg(long)]
        index: PathBuf,
        #[arg(long, requires = "t")]
        s: Option<u64>,
        #[arg(long, requires = "s")]
        t: Option<u64>,
        /// File with one `s t` pair per line.
        #[arg(long)]
        pairs: Option<PathBuf>,
        /// Answer a pairs file on all cores.
        #[arg(long)]
        parallel: bool,
    },
    /// Compare index answers with Dijkstra on the source graph.
    #[command(group(ArgGroup::new("mode").required(true).args(["samples", "all_pairs"])))]
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        all_pairs: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Time queries on a random or distance-bucketed workload.
    #[command(group(ArgGroup::new("workload").required(true).args(["random", "buckets"])))]
    Bench {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        random: Option<usize>,
        #[arg(long)]
        buckets: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        per_bucket: usize,
        #[arg(long, default_value_t = 1000)]
        lmin: Distance,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Print index statistics.
    Stats {
        #[arg(long)]
        index: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let out = std::io::stdout();
    let mut out = BufWriter::new(out.lock());
    let result = match cli.command {
        Command::Build {
            graph,
            beta,
            leaf_size,
            threads,
            no_tail_pruning,
            no_contraction,
            out: path,
        } => {
            let cfg = BuildConfig {
                beta,
                leaf_size,
                threads: threads.max(1),
                tail_pruning: !no_tail_pruning,
                contraction: !no_contraction,
            };
            build(&mut out, &graph, &cfg, &path)
        }
        Command::Query {
            index,
            s,
            t,
            pairs,
            parallel,
        } => query(&mut out, &index, s.zip(t), pairs.as_deref(), parallel),
        Command::Verify {
            graph,
            index,
            samples,
            all_pairs,
            seed,
        } => verify(&mut out, &graph, &index, samples, all_pairs, seed),
        Command::Bench {
            index,
            random,
            buckets,
            per_bucket,
            lmin,
            seed,
        } => {
            let cfg = match (random, buckets) {
                (Some(count), _) => BenchConfig::random(count, seed),
                (None, Some(b)) => BenchConfig::buckets(b, per_bucket, lmin, seed),
                (None, None) => unreachable!("clap requires one workload"),
            };
            bench(&mut out, &index, &cfg)
        }
        Command::Stats { index } => stats(&mut out, &index),
    };
    let flushed = out.flush().map_err(anyhow::Error::from);
    match result.and_then(|ok| flushed.map(|_| ok)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn fmt_dist(d: Distance) -> String {
    if d == INFINITY {
        "INF".into()
    } else {
        d.to_string()
    }
}

fn load_index(path: &Path) -> Result<DistanceIndex> {
    load_from_path(path).with_context(|| format!("loading index {}", path.display()))
}

fn load_graph(path: &Path) -> Result<Graph> {
    read_dimacs_file(path).with_context(|| format!("reading graph {}", path.display()))
}

/// Converts a 1-based id to an internal vertex.
fn vertex(id: u64, n: usize) -> Result<Vertex> {
    if id == 0 || id > n as u64 {
        bail!("vertex {id} outside 1..={n}");
    }
    Ok((id - 1) as Vertex)
}

fn build(out: &mut impl Write, graph: &Path, cfg: &BuildConfig, path: &Path) -> Result<bool> {
    let g = load_graph(graph)?;
    log::info!("building index for {} vertices", g.vertex_count());
    let (idx, r) = DistanceIndex::build(&g, cfg)?;
    let bytes = save_to_path(&idx, path).with_context(|| format!("writing {}", path.display()))?;
    writeln!(out, "index={}", path.display())?;
    writeln!(out, "index_bytes={bytes}")?;
    writeln!(out, "beta={}", cfg.beta)?;
    writeln!(out, "threads={}", cfg.threads)?;
    writeln!(out, "tail_pruning={}", cfg.tail_pruning)?;
    writeln!(out, "contraction={}", cfg.contraction)?;
    writeln!(out, "build_seconds={:.3}", r.build_time.as_secs_f64())?;
    writeln!(out, "vertices={}", r.vertex_count)?;
    writeln!(out, "edges={}", r.edge_count)?;
    writeln!(out, "core_vertices={}", r.core_vertex_count)?;
    writeln!(out, "core_edges={}", r.core_edge_count)?;
    writeln!(out, "height={}", r.height)?;
    writeln!(out, "height_bound={}", r.height_bound)?;
    writeln!(out, "max_cut={}", r.max_cut)?;
    writeln!(out, "nodes={}", r.node_count)?;
    writeln!(out, "leaves={}", r.leaf_count)?;
    writeln!(out, "entries={}", r.entry_count)?;
    writeln!(out, "label_bytes={}", r.label_bytes)?;
    writeln!(out, "shortcuts={}", r.shortcut_count)?;
    writeln!(out, "naive_upper_bound={}", r.naive_upper_bound)?;
    writeln!(out, "cut_cover_lower_bound={}", r.cut_cover_lower_bound)?;
    writeln!(out, "max_bottleneck_depth={}", r.max_bottleneck_depth)?;
    Ok(true)
}

fn parse_pair(line: &str, n: usize) -> Result<(Vertex, Vertex)> {
    let mut it = line.split_whitespace();
    let (Some(s), Some(t), None) = (it.next(), it.next(), it.next()) else {
        bail!("expected two vertex ids");
    };
    let s = s.parse().with_context(|| format!("bad id `{s}`"))?;
    let t = t.parse().with_context(|| format!("bad id `{t}`"))?;
    Ok((vertex(s, n)?, vertex(t, n)?))
}

fn query(
    out: &mut impl Write,
    index: &Path,
    single: Option<(u64, u64)>,
    pairs: Option<&Path>,
    parallel: bool,
) -> Result<bool> {
    let idx = load_index(index)?;
    let n = idx.vertex_count();
    if let Some((s, t)) = single {
        let d = idx.query(vertex(s, n)?, vertex(t, n)?)?;
        writeln!(out, "{}", fmt_dist(d))?;
        return Ok(true);
    }
    let path = pairs.expect("clap requires --pairs without --s");
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    // blank lines and `#` comments are skipped; bad lines answer `ERR`
    let mut parsed = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        parsed.push((i + 1, parse_pair(trimmed, n)));
    }
    let good: Vec<(Vertex, Vertex)> = parsed.iter().filter_map(|(_, p)| p.as_ref().ok().copied()).collect();
    let answers = if parallel { idx.par_batch_query(&good)? } else { idx.batch_query(&good)? };
    let mut answers = answers.into_iter();
    let mut ok = true;
    for (line, p) in parsed {
        match p {
            Ok(_) => writeln!(out, "{}", fmt_dist(answers.next().expect("one answer per good pair")))?,
            Err(e) => {
                ok = false;
                writeln!(out, "ERR")?;
                eprintln!("{}:{line}: {e:#}", path.display());
            }
        }
    }
    Ok(ok)
}

fn verify(
    out: &mut impl Write,
    graph: &Path,
    index: &Path,
    samples: Option<usize>,
    all_pairs: bool,
    seed: u64,
) -> Result<bool> {
    let g = load_graph(graph)?;
    let idx = load_index(index)?;
    if let Err(e) = idx.verify_graph(&g) {
        writeln!(out, "fingerprint=mismatch")?;
        writeln!(out, "result=fail")?;
        eprintln!("error: {e}");
        return Ok(false);
    }
    writeln!(out, "fingerprint=ok")?;
    let n = g.vertex_count();
    let mut pairs: Vec<(Vertex, Vertex)> = if all_pairs {
        if n > ALL_PAIRS_LIMIT {
            bail!("--all-pairs needs at most {ALL_PAIRS_LIMIT} vertices, graph has {n}");
        }
        (0..n as Vertex).flat_map(|s| (0..n as Vertex).map(move |t| (s, t))).collect()
    } else {
        let count = samples.expect("clap requires a verify mode");
        generate_workload(&idx, &BenchConfig::random(count, seed)).pairs
    };
    pairs.sort_unstable();
    let mut mismatches = 0usize;
    let mut source = None;
    let mut dist = Vec::new();
    for &(s, t) in &pairs {
        if source != Some(s) {
            dist = dijkstra(&g, s);
            source = Some(s);
        }
        let (expected, got) = (dist[t as usize], idx.query(s, t)?);
        if expected != got {
            mismatches += 1;
            if mismatches <= LISTED_MISMATCHES {
                writeln!(
                    out,
                    "mismatch s={} t={} expected={} got={}",
                    s + 1,
                    t + 1,
                    fmt_dist(expected),
                    fmt_dist(got)
                )?;
            }
        }
    }
    writeln!(out, "checked={}", pairs.len())?;
    writeln!(out, "mismatches={mismatches}")?;
    writeln!(out, "result={}", if mismatches == 0 { "pass" } else { "fail" })?;
    Ok(mismatches == 0)
}

fn write_stats(out: &mut impl Write, prefix: &str, s: &BenchStats) -> Result<()> {
    writeln!(out, "{prefix}queries={}", s.queries)?;
    writeln!(out, "{prefix}unreachable={}", s.unreachable)?;
    writeln!(out, "{prefix}mean_ns={:.1}", s.mean_ns)?;
    writeln!(out, "{prefix}median_ns={:.1}", s.median_ns)?;
    writeln!(out, "{prefix}ahs={:.3}", s.average_hub_size)?;
    Ok(())
}

fn bench(out: &mut impl Write, index: &Path, cfg: &BenchConfig) -> Result<bool> {
    let idx = load_index(index)?;
    let w = generate_workload(&idx, cfg);
    writeln!(out, "seed={}", cfg.seed)?;
    writeln!(out, "attempts={}", w.attempts)?;
    if w.buckets.is_empty() {
        write_stats(out, "", &run_bench(&idx, &w.pairs))?;
        return Ok(true);
    }
    writeln!(out, "l_max={}", w.l_max)?;
    let mut all = Vec::new();
    for (i, b) in w.buckets.iter().enumerate() {
        let p = format!("bucket{}.", i + 1);
        writeln!(out, "{p}lower={:.1}", b.lower)?;
        writeln!(out, "{p}upper={:.1}", b.upper)?;
        write_stats(out, &p, &run_bench(&idx, &b.pairs))?;
        all.extend_from_slice(&b.pairs);
    }
    let under: Vec<String> = w.underfilled.iter().map(|i| (i + 1).to_string()).collect();
    writeln!(out, "underfilled={}", under.join(","))?;
    write_stats(out, "", &run_bench(&idx, &all))?;
    Ok(true)
}

fn stats(out: &mut impl Write, index: &Path) -> Result<bool> {
    let idx = load_index(index)?;
    let h = idx.hierarchy();
    let l = labelling_stats(idx.labels(), h);
    writeln!(out, "vertices={}", idx.vertex_count())?;
    writeln!(out, "core_vertices={}", h.vertex_count())?;
    writeln!(out, "fingerprint={:016x}", idx.fingerprint())?;
    writeln!(out, "beta={}", idx.beta())?;
    writeln!(out, "tail_pruning={}", idx.tail_pruning())?;
    writeln!(out, "contraction={}", idx.contracted())?;
    writeln!(out, "height={}", h.height())?;
    writeln!(out, "height_bound={}", idx.beta().height_bound(h.vertex_count()))?;
    writeln!(out, "max_cut={}", h.max_cut())?;
    writeln!(out, "nodes={}", h.node_count())?;
    writeln!(out, "leaves={}", h.leaf_count())?;
    writeln!(out, "entries={}", l.entry_count)?;
    writeln!(out, "label_bytes={}", l.bytes)?;
    writeln!(out, "naive_upper_bound={}", l.naive_upper_bound)?;
    Ok(true)
}
