//! Balanced rough partitions and balanced vertex cuts.
//!
//! Two far-apart seed vertices `a` and `b` give every vertex the weight
//! `d(a, v) − d(b, v)`. The lowest-weight vertices form one side and the
//! highest-weight vertices the other; the vertices in between are left for a
//! minimum vertex cut to settle.

use log::warn;

use crate::balance::Beta;
use crate::graph::{connected_components, dijkstra, Distance, Graph, Vertex, INFINITY};
use crate::mincut::{min_vertex_cut, MaxFlow};

/// Seeds and weights of a connected graph.
#[derive(Clone, Debug)]
pub struct PartitionWeights {
    pub seed_a: Vertex,
    pub seed_b: Vertex,
    pub from_a: Vec<Distance>,
    pub from_b: Vec<Distance>,
    /// `from_a[v] − from_b[v]`.
    pub weights: Vec<i64>,
}

/// Farthest reachable vertex from a distance array; ties go to the smallest id.
pub fn farthest(dist: &[Distance]) -> Vertex {
    let mut best = 0;
    for (v, &d) in dist.iter().enumerate() {
        if d != INFINITY && d > dist[best] {
            best = v;
        }
    }
    best as Vertex
}

/// Double sweep from vertex 0. The graph must be connected and non-empty.
pub fn partition_weights(g: &Graph) -> PartitionWeights {
    let seed_a = farthest(&dijkstra(g, 0));
    let from_a = dijkstra(g, seed_a);
    let seed_b = farthest(&from_a);
    let from_b = dijkstra(g, seed_b);
    let weights = from_a
        .iter()
        .zip(&from_b)
        .map(|(&a, &b)| a as i64 - b as i64)
        .collect();
    PartitionWeights {
        seed_a,
        seed_b,
        from_a,
        from_b,
        weights,
    }
}

/// Two disjoint sides and the unassigned region between them, ascending ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoughPartition {
    pub side_a: Vec<Vertex>,
    pub region: Vec<Vertex>,
    pub side_b: Vec<Vertex>,
    /// How many times a bottleneck set was moved into the region.
    pub bottlenecks: usize,
}

impl RoughPartition {
    fn lift(self, ids: &[Vertex]) -> RoughPartition {
        let map = |xs: Vec<Vertex>| xs.into_iter().map(|v| ids[v as usize]).collect();
        RoughPartition {
            side_a: map(self.side_a),
            region: map(self.region),
            side_b: map(self.side_b),
            bottlenecks: self.bottlenecks,
        }
    }

    fn sort(&mut self) {
        self.side_a.sort_unstable();
        self.region.sort_unstable();
        self.side_b.sort_unstable();
    }
}

fn complement(n: usize, taken: &[Vertex]) -> Vec<Vertex> {
    let mut mark = vec![false; n];
    for &v in taken {
        mark[v as usize] = true;
    }
    (0..n as Vertex).filter(|&v| !mark[v as usize]).collect()
}

/// Computes a rough partition with both sides of size at least `⌈β·n⌉`
/// whenever the graph allows it.
pub fn balanced_partition(g: &Graph, beta: Beta) -> RoughPartition {
    let n = g.vertex_count();
    if n <= 1 {
        return RoughPartition {
            side_a: (0..n as Vertex).collect(),
            region: Vec::new(),
            side_b: Vec::new(),
            bottlenecks: 0,
        };
    }

    let components = connected_components(g);
    if components.len() > 1 {
        let largest = &components[0];
        let mut part = if beta.within_upper(largest.len(), n) {
            let rest: Vec<Vertex> = components[2..].iter().flatten().copied().collect();
            RoughPartition {
                side_a: largest.clone(),
                region: rest,
                side_b: components[1].clone(),
                bottlenecks: 0,
            }
        } else {
            let inner = balanced_partition(&g.induced(largest), beta).lift(largest);
            let mut region = inner.region;
            region.extend(complement(n, largest));
            RoughPartition { region, ..inner }
        };
        part.sort();
        return part;
    }

    let pw = partition_weights(g);
    let weight = &pw.weights;
    let mut order: Vec<Vertex> = (0..n as Vertex).collect();
    order.sort_by_key(|&v| (weight[v as usize], v));
    let k = beta.side_quota(n);
    let w_a = weight[order[k - 1] as usize];
    let w_b = weight[order[n - k] as usize];

    if w_a == w_b {
        // a single weight level spans the middle; move its vertices closest
        // to the first seed into the region and retry on the rest
        let level: Vec<Vertex> = order.iter().copied().filter(|&v| weight[v as usize] == w_a).collect();
        let nearest = level.iter().map(|&v| pw.from_a[v as usize]).min().unwrap();
        let bottleneck: Vec<Vertex> = level
            .into_iter()
            .filter(|&v| pw.from_a[v as usize] == nearest)
            .collect();
        let rest = complement(n, &bottleneck);
        let inner = balanced_partition(&g.induced(&rest), beta).lift(&rest);
        let mut region = inner.region;
        region.extend(bottleneck);
        let mut part = RoughPartition {
            region,
            bottlenecks: inner.bottlenecks + 1,
            ..inner
        };
        part.sort();
        return part;
    }

    let closed = |keep: &dyn Fn(i64) -> bool, fallback: &[Vertex], label: &str| {
        let side: Vec<Vertex> = order.iter().copied().filter(|&v| keep(weight[v as usize])).collect();
        if beta.within_upper(side.len(), n) {
            side
        } else {
            warn!(
                "closing side {label} gives {} of {n} vertices, above the balance limit; using the {} seed-ordered vertices",
                side.len(),
                fallback.len()
            );
            fallback.to_vec()
        }
    };
    let side_a = closed(&|w| w <= w_a, &order[..k], "A");
    let side_b = closed(&|w| w >= w_b, &order[n - k..], "B");
    let mut taken = side_a.clone();
    taken.extend(&side_b);
    let mut part = RoughPartition {
        region: complement(n, &taken),
        side_a,
        side_b,
        bottlenecks: 0,
    };
    part.sort();
    part
}

/// A vertex cut and the two sides it separates, ascending ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutResult {
    pub side_a: Vec<Vertex>,
    pub cut: Vec<Vertex>,
    pub side_b: Vec<Vertex>,
    /// Rough-partition bottleneck moves made while finding this cut.
    pub bottlenecks: usize,
    /// Flow run on the region; `None` when no flow was needed.
    pub flow: Option<MaxFlow>,
}

/// Components of `g − cut` dealt largest first to the currently smaller
/// side, ties to side A.
pub fn assign_components(g: &Graph, cut: &[Vertex]) -> (Vec<Vertex>, Vec<Vertex>) {
    let n = g.vertex_count();
    let rest = complement(n, cut);
    let components = connected_components(&g.induced(&rest));
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for comp in components {
        let target = if a.len() <= b.len() { &mut a } else { &mut b };
        target.extend(comp.into_iter().map(|v| rest[v as usize]));
    }
    a.sort_unstable();
    b.sort_unstable();
    (a, b)
}

/// Finds a balanced vertex cut: a rough partition followed by a minimum
/// vertex cut through the region between its sides.
pub fn balanced_cut(g: &Graph, beta: Beta) -> CutResult {
    let n = g.vertex_count();
    let rough = balanced_partition(g, beta);
    if rough.side_b.is_empty() {
        return CutResult {
            side_a: rough.side_a,
            cut: rough.region,
            side_b: Vec::new(),
            bottlenecks: rough.bottlenecks,
            flow: None,
        };
    }

    const A: u8 = 0;
    const REGION: u8 = 1;
    const B: u8 = 2;
    let mut class = vec![REGION; n];
    for &v in &rough.side_a {
        class[v as usize] = A;
    }
    for &v in &rough.side_b {
        class[v as usize] = B;
    }
    let touches = |v: Vertex, pred: &dyn Fn(Vertex) -> bool| g.neighbors(v).any(|(w, _)| pred(w));

    // side vertices with an edge straight across join the flow region
    let crossing: Vec<bool> = (0..n as Vertex)
        .map(|v| match class[v as usize] {
            A => touches(v, &|w| class[w as usize] == B),
            B => touches(v, &|w| class[w as usize] == A),
            _ => false,
        })
        .collect();
    let in_flow = |v: Vertex| class[v as usize] == REGION || crossing[v as usize];
    let interior = |v: Vertex, c: u8| class[v as usize] == c && !crossing[v as usize];
    let attach_source = |v: Vertex| {
        (class[v as usize] == A && crossing[v as usize])
            || (class[v as usize] == REGION && touches(v, &|w| interior(w, A)))
    };
    let attach_sink = |v: Vertex| {
        (class[v as usize] == B && crossing[v as usize])
            || (class[v as usize] == REGION && touches(v, &|w| interior(w, B)))
    };

    // a vertex next to both sides lies on a one-vertex path from A to B and
    // belongs to every separator
    let mut forced = Vec::new();
    let mut flow_vertices = Vec::new();
    for v in (0..n as Vertex).filter(|&v| in_flow(v)) {
        if attach_source(v) && attach_sink(v) {
            forced.push(v);
        } else {
            flow_vertices.push(v);
        }
    }
    let region_graph = g.induced(&flow_vertices);
    let mut sources = Vec::new();
    let mut sinks = Vec::new();
    for (i, &v) in flow_vertices.iter().enumerate() {
        if attach_source(v) {
            sources.push(i as Vertex);
        } else if attach_sink(v) {
            sinks.push(i as Vertex);
        }
    }
    let (cuts, flow) = min_vertex_cut(&region_graph, &sources, &sinks)
        .expect("attachment sets are disjoint by construction");

    let mut best: Option<(usize, CutResult)> = None;
    for local in [cuts.source_side, cuts.sink_side] {
        let mut cut: Vec<Vertex> = local.into_iter().map(|v| flow_vertices[v as usize]).collect();
        cut.extend(&forced);
        cut.sort_unstable();
        let (side_a, side_b) = assign_components(g, &cut);
        let score = side_a.len().max(side_b.len());
        if best.as_ref().is_none_or(|(s, _)| score < *s) {
            best = Some((
                score,
                CutResult {
                    side_a,
                    cut,
                    side_b,
                    bottlenecks: rough.bottlenecks,
                    flow: Some(flow),
                },
            ));
        }
    }
    best.unwrap().1
}
