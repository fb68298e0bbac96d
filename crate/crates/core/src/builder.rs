//! Recursive construction of the cut hierarchy and its labels.

use std::time::{Duration, Instant};

use rayon::ThreadPoolBuilder;
use thiserror::Error;

use crate::balance::Beta;
use crate::contraction::{contract_degree_one, Contraction, ContractionMap};
use crate::graph::{Distance, Graph, Vertex};
use crate::hierarchy::{Hierarchy, HierarchyError, NodeId};
use crate::label::{build_labels_with_searches, labelling_stats, rank_cut, LabelError, LabelStore, LevelLabels};
use crate::mincut::MaxFlow;
use crate::partition::balanced_cut;
use crate::shortcut::{add_shortcuts, Shortcut, ShortcutError};

/// Subgraphs at least this large split their two child builds across threads.
const PARALLEL_MIN_VERTICES: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildConfig {
    pub beta: Beta,
    /// Subgraphs of at most this many vertices (and never fewer than 2)
    /// become leaves.
    pub leaf_size: usize,
    pub threads: usize,
    pub tail_pruning: bool,
    pub contraction: bool,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            beta: Beta::DEFAULT,
            leaf_size: 1,
            threads: 1,
            tail_pruning: true,
            contraction: true,
        }
    }
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error(transparent)]
    Shortcut(#[from] ShortcutError),
    #[error("cannot start worker pool: {0}")]
    ThreadPool(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BuildReport {
    pub build_time: Duration,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub core_vertex_count: usize,
    pub core_edge_count: usize,
    pub height: usize,
    pub height_bound: usize,
    pub max_cut: usize,
    pub node_count: usize,
    pub leaf_count: usize,
    pub entry_count: u64,
    pub label_bytes: u64,
    pub shortcut_count: u64,
    pub naive_upper_bound: u64,
    pub cut_cover_lower_bound: u64,
    /// Deepest chain of bottleneck moves made by any one rough partition.
    pub max_bottleneck_depth: usize,
}

/// Everything computed at one hierarchy node, in the node's local ids.
#[derive(Clone, Debug)]
pub struct NodeTrace {
    pub id: NodeId,
    /// Core id of each local vertex, ascending.
    pub vertices: Vec<Vertex>,
    /// The node's shortcut-enhanced subgraph.
    pub graph: Graph,
    /// Cut in rank order.
    pub cut: Vec<Vertex>,
    pub left: Vec<Vertex>,
    pub right: Vec<Vertex>,
    pub left_shortcuts: Vec<Shortcut>,
    pub right_shortcuts: Vec<Shortcut>,
    pub flow: Option<MaxFlow>,
    pub bottlenecks: usize,
}

/// Per-node build details in hierarchy preorder.
#[derive(Clone, Debug, Default)]
pub struct BuildTrace {
    pub nodes: Vec<NodeTrace>,
}

struct Ctx {
    beta: Beta,
    leaf_limit: usize,
    tail_pruning: bool,
    trace: bool,
}

struct BuiltNode {
    id: NodeId,
    /// Core ids of the subtree, ascending; local id `i` is `vertices[i]`.
    vertices: Vec<Vertex>,
    cut: Vec<Vertex>,
    labels: LevelLabels,
    shortcuts: u64,
    cover: u64,
    bottlenecks: usize,
    trace: Option<NodeTrace>,
}

type Subtree = Vec<BuiltNode>;

fn leaf(g: &Graph, vertices: Vec<Vertex>, id: NodeId, ctx: &Ctx) -> Result<Subtree, BuildError> {
    let cut: Vec<Vertex> = (0..g.vertex_count() as Vertex).collect();
    let cover = rank_cut(g, &cut).cover_total();
    let (labels, _) = build_labels_with_searches(g, &cut, ctx.tail_pruning)?;
    let trace = ctx.trace.then(|| NodeTrace {
        id,
        vertices: vertices.clone(),
        graph: g.clone(),
        cut: cut.clone(),
        left: Vec::new(),
        right: Vec::new(),
        left_shortcuts: Vec::new(),
        right_shortcuts: Vec::new(),
        flow: None,
        bottlenecks: 0,
    });
    Ok(vec![BuiltNode {
        id,
        cut: cut.iter().map(|&v| vertices[v as usize]).collect(),
        vertices,
        labels,
        shortcuts: 0,
        cover,
        bottlenecks: 0,
        trace,
    }])
}

fn child_graph(g: &Graph, side: &[Vertex], shortcuts: &[Shortcut]) -> Graph {
    let mut local = vec![Vertex::MAX; g.vertex_count()];
    for (i, &v) in side.iter().enumerate() {
        local[v as usize] = i as Vertex;
    }
    g.induced_with(
        side,
        shortcuts
            .iter()
            .map(|s| (local[s.a as usize], local[s.b as usize], s.weight)),
    )
}

fn build_node(g: Graph, vertices: Vec<Vertex>, id: NodeId, ctx: &Ctx) -> Result<Subtree, BuildError> {
    let n = g.vertex_count();
    if n <= ctx.leaf_limit {
        return leaf(&g, vertices, id, ctx);
    }
    let split = balanced_cut(&g, ctx.beta);
    if split.side_a.is_empty() || split.side_b.is_empty() {
        return leaf(&g, vertices, id, ctx);
    }
    let (left_id, right_id) = (id.child(false)?, id.child(true)?);

    let ranking = rank_cut(&g, &split.cut);
    let (labels, searches) = build_labels_with_searches(&g, &ranking.order, ctx.tail_pruning)?;
    let cut_distances: Vec<&[Distance]> = searches.iter().map(|s| s.dist.as_slice()).collect();
    let left_shortcuts = add_shortcuts(&g, &cut_distances, &ranking.order, &split.side_a)?;
    let right_shortcuts = add_shortcuts(&g, &cut_distances, &ranking.order, &split.side_b)?;
    drop(cut_distances);
    drop(searches);

    let left_graph = child_graph(&g, &split.side_a, &left_shortcuts);
    let right_graph = child_graph(&g, &split.side_b, &right_shortcuts);
    let left_vertices: Vec<Vertex> = split.side_a.iter().map(|&v| vertices[v as usize]).collect();
    let right_vertices: Vec<Vertex> = split.side_b.iter().map(|&v| vertices[v as usize]).collect();

    let node = BuiltNode {
        id,
        cut: ranking.order.iter().map(|&v| vertices[v as usize]).collect(),
        labels,
        shortcuts: (left_shortcuts.len() + right_shortcuts.len()) as u64,
        cover: ranking.cover_total(),
        bottlenecks: split.bottlenecks,
        trace: ctx.trace.then(|| NodeTrace {
            id,
            vertices: vertices.clone(),
            graph: g.clone(),
            cut: ranking.order.clone(),
            left: split.side_a.clone(),
            right: split.side_b.clone(),
            left_shortcuts,
            right_shortcuts,
            flow: split.flow,
            bottlenecks: split.bottlenecks,
        }),
        vertices,
    };
    drop(g);

    let (left, right) = if n >= PARALLEL_MIN_VERTICES {
        rayon::join(
            || build_node(left_graph, left_vertices, left_id, ctx),
            || build_node(right_graph, right_vertices, right_id, ctx),
        )
    } else {
        (
            build_node(left_graph, left_vertices, left_id, ctx),
            build_node(right_graph, right_vertices, right_id, ctx),
        )
    };
    let (left, right) = (left?, right?);
    let mut out = Vec::with_capacity(1 + left.len() + right.len());
    out.push(node);
    out.extend(left);
    out.extend(right);
    Ok(out)
}

/// Output of a build: hierarchy and labels over the contracted core.
pub(crate) struct Built {
    pub contraction: ContractionMap,
    pub hierarchy: Hierarchy,
    pub labels: LabelStore,
    pub report: BuildReport,
    pub trace: Option<BuildTrace>,
}

pub(crate) fn build(g: &Graph, cfg: &BuildConfig, trace: bool) -> Result<Built, BuildError> {
    let start = Instant::now();
    let Contraction { core, map } = if cfg.contraction {
        contract_degree_one(g)
    } else {
        Contraction {
            core: g.clone(),
            map: ContractionMap::identity(g.vertex_count()),
        }
    };
    let ctx = Ctx {
        beta: cfg.beta,
        leaf_limit: cfg.leaf_size.max(2),
        tail_pruning: cfg.tail_pruning,
        trace,
    };
    let pool = ThreadPoolBuilder::new()
        .num_threads(cfg.threads.max(1))
        .build()
        .map_err(|e| BuildError::ThreadPool(e.to_string()))?;
    let core_n = core.vertex_count();
    let core_m = core.edge_count();
    let nodes = pool.install(|| build_node(core, (0..core_n as Vertex).collect(), NodeId::ROOT, &ctx))?;

    let hierarchy = Hierarchy::from_preorder(
        core_n,
        cfg.beta,
        nodes.iter().map(|b| (b.id, b.cut.clone())).collect(),
    )?;
    let level_counts: Vec<usize> = (0..core_n as Vertex)
        .map(|v| hierarchy.vertex_node(v).level() + 1)
        .collect();
    let labels = LabelStore::assemble(&level_counts, || {
        nodes.iter().flat_map(|b| {
            b.vertices
                .iter()
                .enumerate()
                .map(move |(i, &v)| (v, b.id.level(), b.labels.get(i as Vertex)))
        })
    });

    let stats = labelling_stats(&labels, &hierarchy);
    let report = BuildReport {
        build_time: start.elapsed(),
        vertex_count: g.vertex_count(),
        edge_count: g.edge_count(),
        core_vertex_count: core_n,
        core_edge_count: core_m,
        height: hierarchy.height(),
        height_bound: cfg.beta.height_bound(core_n),
        max_cut: hierarchy.max_cut(),
        node_count: hierarchy.node_count(),
        leaf_count: hierarchy.leaf_count(),
        entry_count: stats.entry_count,
        label_bytes: stats.bytes,
        shortcut_count: nodes.iter().map(|b| b.shortcuts).sum(),
        naive_upper_bound: stats.naive_upper_bound,
        cut_cover_lower_bound: nodes.iter().map(|b| b.cover).sum(),
        max_bottleneck_depth: nodes.iter().map(|b| b.bottlenecks).max().unwrap_or(0),
    };
    let trace = trace.then(|| BuildTrace {
        nodes: nodes.into_iter().filter_map(|b| b.trace).collect(),
    });
    Ok(Built {
        contraction: map,
        hierarchy,
        labels,
        report,
        trace,
    })
}
