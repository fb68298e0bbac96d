//! Query workloads and timing.
//!
//! Distance-bucket workloads split `(0, l_max]` geometrically above `l_min`:
//! bucket `i` (1-based) covers `(l_min·x^(i−1), l_min·x^i]` with
//! `x = (l_max / l_min)^(1/buckets)`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{dijkstra, Distance, Graph, Vertex, INFINITY};
use crate::index::DistanceIndex;
use crate::partition::farthest;

/// Anything that answers point-to-point distances.
pub trait DistanceOracle {
    fn vertex_count(&self) -> usize;
    fn distance(&self, s: Vertex, t: Vertex) -> Distance;
}

impl DistanceOracle for DistanceIndex {
    fn vertex_count(&self) -> usize {
        DistanceIndex::vertex_count(self)
    }

    fn distance(&self, s: Vertex, t: Vertex) -> Distance {
        self.query(s, t).expect("sampled ids are in range")
    }
}

/// Plain Dijkstra per query.
impl DistanceOracle for Graph {
    fn vertex_count(&self) -> usize {
        Graph::vertex_count(self)
    }

    fn distance(&self, s: Vertex, t: Vertex) -> Distance {
        dijkstra(self, s)[t as usize]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WorkloadMode {
    RandomPairs { count: usize },
    DistanceBuckets { buckets: usize, per_bucket: usize, l_min: Distance },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchConfig {
    pub mode: WorkloadMode,
    pub seed: u64,
    /// Sampling stops after `attempts_per_bucket · buckets` draws.
    pub attempts_per_bucket: usize,
}

impl BenchConfig {
    pub fn buckets(buckets: usize, per_bucket: usize, l_min: Distance, seed: u64) -> BenchConfig {
        BenchConfig {
            mode: WorkloadMode::DistanceBuckets {
                buckets,
                per_bucket,
                l_min,
            },
            seed,
            attempts_per_bucket: 200 * per_bucket.max(1),
        }
    }

    pub fn random(count: usize, seed: u64) -> BenchConfig {
        BenchConfig {
            mode: WorkloadMode::RandomPairs { count },
            seed,
            attempts_per_bucket: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bucket {
    /// Exclusive lower bound.
    pub lower: f64,
    /// Inclusive upper bound.
    pub upper: f64,
    pub pairs: Vec<(Vertex, Vertex)>,
}

impl Bucket {
    pub fn contains(&self, d: Distance) -> bool {
        d != INFINITY && d as f64 > self.lower && d as f64 <= self.upper
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Workload {
    /// Pairs of a random-pairs workload; empty in bucket mode.
    pub pairs: Vec<(Vertex, Vertex)>,
    pub buckets: Vec<Bucket>,
    pub l_max: Distance,
    pub attempts: usize,
    /// Bucket indices (0-based) that ended below their target size.
    pub underfilled: Vec<usize>,
}

/// Double-sweep estimate of the largest distance in the component of
/// vertex 0.
pub fn estimate_l_max(oracle: &impl DistanceOracle) -> Distance {
    let n = oracle.vertex_count();
    if n == 0 {
        return 0;
    }
    let sweep = |from: Vertex| -> Vec<Distance> { (0..n as Vertex).map(|t| oracle.distance(from, t)).collect() };
    let a = farthest(&sweep(0));
    let from_a = sweep(a);
    let b = farthest(&from_a);
    let from_b = sweep(b);
    from_a
        .iter()
        .chain(&from_b)
        .copied()
        .filter(|&d| d != INFINITY)
        .max()
        .unwrap_or(0)
}

/// Bucket bounds; the last upper bound is `l_max` itself.
pub fn bucket_bounds(l_min: Distance, l_max: Distance, buckets: usize) -> Vec<(f64, f64)> {
    let (lo, hi) = (l_min as f64, l_max as f64);
    let x = (hi / lo).powf(1.0 / buckets as f64);
    (1..=buckets)
        .map(|i| {
            let lower = lo * x.powi(i as i32 - 1);
            let upper = if i == buckets { hi } else { lo * x.powi(i as i32) };
            (lower, upper)
        })
        .collect()
}

/// Samples a workload. The result depends only on the oracle's distances
/// and the configuration.
pub fn generate_workload(oracle: &impl DistanceOracle, cfg: &BenchConfig) -> Workload {
    let n = oracle.vertex_count();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let draw = |rng: &mut ChaCha8Rng| -> (Vertex, Vertex) {
        (rng.random_range(0..n as Vertex), rng.random_range(0..n as Vertex))
    };
    match cfg.mode {
        WorkloadMode::RandomPairs { count } => {
            let pairs = if n == 0 { Vec::new() } else { (0..count).map(|_| draw(&mut rng)).collect() };
            Workload {
                attempts: pairs.len(),
                pairs,
                buckets: Vec::new(),
                l_max: 0,
                underfilled: Vec::new(),
            }
        }
        WorkloadMode::DistanceBuckets {
            buckets,
            per_bucket,
            l_min,
        } => {
            let l_max = estimate_l_max(oracle);
            let mut out: Vec<Bucket> = bucket_bounds(l_min.max(1), l_max, buckets)
                .into_iter()
                .map(|(lower, upper)| Bucket {
                    lower,
                    upper,
                    pairs: Vec::new(),
                })
                .collect();
            let cap = cfg.attempts_per_bucket.saturating_mul(buckets);
            let mut attempts = 0;
            let mut open = if n == 0 || l_max <= l_min { 0 } else { buckets };
            while open > 0 && attempts < cap {
                attempts += 1;
                let (s, t) = draw(&mut rng);
                let d = oracle.distance(s, t);
                if let Some(b) = out.iter_mut().find(|b| b.contains(d)) {
                    if b.pairs.len() < per_bucket {
                        b.pairs.push((s, t));
                        if b.pairs.len() == per_bucket {
                            open -= 1;
                        }
                    }
                }
            }
            let underfilled = out
                .iter()
                .enumerate()
                .filter(|(_, b)| b.pairs.len() < per_bucket)
                .map(|(i, _)| i)
                .collect();
            Workload {
                pairs: Vec::new(),
                buckets: out,
                l_max,
                attempts,
                underfilled,
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchStats {
    pub queries: usize,
    pub unreachable: usize,
    pub mean_ns: f64,
    pub median_ns: f64,
    /// Mean number of label positions scanned per query.
    pub average_hub_size: f64,
}

/// Times each query and averages the scanned label positions.
pub fn run_bench(idx: &DistanceIndex, pairs: &[(Vertex, Vertex)]) -> BenchStats {
    let mut times = Vec::with_capacity(pairs.len());
    let mut scanned = 0u64;
    let mut unreachable = 0;
    for &(s, t) in pairs {
        let start = Instant::now();
        let outcome = idx.query_with_stats(s, t).expect("pair ids are in range");
        times.push(start.elapsed().as_nanos() as f64);
        scanned += outcome.scanned as u64;
        if outcome.distance == INFINITY {
            unreachable += 1;
        }
    }
    let q = pairs.len();
    let mean = if q == 0 { 0.0 } else { times.iter().sum::<f64>() / q as f64 };
    times.sort_by(f64::total_cmp);
    let median = match q {
        0 => 0.0,
        _ if q % 2 == 1 => times[q / 2],
        _ => (times[q / 2 - 1] + times[q / 2]) / 2.0,
    };
    BenchStats {
        queries: q,
        unreachable,
        mean_ns: mean,
        median_ns: median,
        average_hub_size: if q == 0 { 0.0 } else { scanned as f64 / q as f64 },
    }
}
