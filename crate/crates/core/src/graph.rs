//! Undirected weighted graphs in compressed sparse row form, plus the
//! plain Dijkstra search and connected components used throughout the build.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use sha2::{Digest, Sha256};
use thiserror::Error;

/// Vertex identifier. Ids are dense, `0..vertex_count`.
pub type Vertex = u32;
/// Edge weight. Always at least 1.
pub type Weight = u32;
/// Path length accumulator.
pub type Distance = u64;

/// Distance of an unreachable vertex.
pub const INFINITY: Distance = u64::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph with {vertex_count} vertices")]
    VertexOutOfRange { vertex: Vertex, vertex_count: usize },
    #[error("edge ({u}, {v}) has weight 0; weights must be positive")]
    ZeroWeight { u: Vertex, v: Vertex },
    #[error("graph with {0} vertices exceeds the 32-bit vertex id space")]
    TooManyVertices(usize),
}

/// Immutable undirected graph.
///
/// Every undirected edge is stored in both adjacency lists. Self-loops are
/// dropped and parallel edges collapse to the minimum weight, so there is
/// at most one edge per unordered pair. Adjacency lists are sorted by
/// neighbor id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<Vertex>,
    weights: Vec<Weight>,
}

impl Graph {
    /// Builds a graph from an undirected edge list.
    pub fn from_edges<I>(vertex_count: usize, edges: I) -> Result<Graph, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex, Weight)>,
    {
        if vertex_count > Vertex::MAX as usize {
            return Err(GraphError::TooManyVertices(vertex_count));
        }
        let mut arcs = Vec::new();
        for (u, v, w) in edges {
            for x in [u, v] {
                if x as usize >= vertex_count {
                    return Err(GraphError::VertexOutOfRange {
                        vertex: x,
                        vertex_count,
                    });
                }
            }
            if w == 0 {
                return Err(GraphError::ZeroWeight { u, v });
            }
            if u != v {
                arcs.push((u, v, w));
                arcs.push((v, u, w));
            }
        }
        Ok(Self::from_arcs(vertex_count, arcs))
    }

    /// Arcs must already be symmetric and validated.
    fn from_arcs(vertex_count: usize, mut arcs: Vec<(Vertex, Vertex, Weight)>) -> Graph {
        arcs.sort_unstable();
        arcs.dedup_by(|later, earlier| later.0 == earlier.0 && later.1 == earlier.1);
        let mut offsets = vec![0usize; vertex_count + 1];
        for &(u, _, _) in &arcs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..vertex_count {
            offsets[i + 1] += offsets[i];
        }
        let targets = arcs.iter().map(|a| a.1).collect();
        let weights = arcs.iter().map(|a| a.2).collect();
        Graph {
            offsets,
            targets,
            weights,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn degree(&self, v: Vertex) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = (Vertex, Weight)> + '_ {
        let range = self.offsets[v as usize]..self.offsets[v as usize + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    /// Weight of the edge `u`–`v`, if present.
    pub fn edge_weight(&self, u: Vertex, v: Vertex) -> Option<Weight> {
        let range = self.offsets[u as usize]..self.offsets[u as usize + 1];
        let targets = &self.targets[range.clone()];
        targets
            .binary_search(&v)
            .ok()
            .map(|i| self.weights[range.start + i])
    }

    /// Undirected edges as `(u, v, w)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex, Weight)> + '_ {
        (0..self.vertex_count() as Vertex).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| u < v)
                .map(move |(v, w)| (u, v, w))
        })
    }

    /// Subgraph induced by `vertices`. Vertex `vertices[i]` becomes local id `i`.
    pub fn induced(&self, vertices: &[Vertex]) -> Graph {
        self.induced_with(vertices, std::iter::empty())
    }

    /// Induced subgraph plus extra edges given in local ids. Extra edges
    /// that duplicate an induced edge keep the smaller weight.
    pub fn induced_with<I>(&self, vertices: &[Vertex], extra: I) -> Graph
    where
        I: IntoIterator<Item = (Vertex, Vertex, Weight)>,
    {
        let mut local = vec![Vertex::MAX; self.vertex_count()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v as usize] = i as Vertex;
        }
        let mut arcs = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for (w, weight) in self.neighbors(v) {
                let lw = local[w as usize];
                if lw != Vertex::MAX {
                    arcs.push((i as Vertex, lw, weight));
                }
            }
        }
        for (u, v, w) in extra {
            debug_assert!(w > 0 && u != v);
            arcs.push((u, v, w));
            arcs.push((v, u, w));
        }
        Self::from_arcs(vertices.len(), arcs)
    }

    /// Content hash over the vertex count and the sorted edge list.
    pub fn fingerprint(&self) -> u64 {
        let mut hasher = Sha256::new();
        hasher.update((self.vertex_count() as u64).to_le_bytes());
        for (u, v, w) in self.edges() {
            hasher.update(u.to_le_bytes());
            hasher.update(v.to_le_bytes());
            hasher.update(w.to_le_bytes());
        }
        let digest = hasher.finalize();
        let mut bytes = [0u8; 8];
        bytes.copy_from_slice(&digest[..8]);
        u64::from_le_bytes(bytes)
    }
}

/// Single-source shortest path distances. Unreachable vertices get [`INFINITY`].
pub fn dijkstra(g: &Graph, source: Vertex) -> Vec<Distance> {
    assert!((source as usize) < g.vertex_count(), "source out of range");
    let mut dist = vec![INFINITY; g.vertex_count()];
    let mut heap = BinaryHeap::new();
    dist[source as usize] = 0;
    heap.push(Reverse((0, source)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v as usize] {
            continue;
        }
        for (w, weight) in g.neighbors(v) {
            let nd = d + weight as Distance;
            if nd < dist[w as usize] {
                dist[w as usize] = nd;
                heap.push(Reverse((nd, w)));
            }
        }
    }
    dist
}

/// Connected components, largest first; equal sizes are ordered by their
/// smallest vertex. Each component lists its vertices in ascending order.
pub fn connected_components(g: &Graph) -> Vec<Vec<Vertex>> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start as Vertex);
        let mut comp = Vec::new();
        while let Some(v) = queue.pop_front() {
            comp.push(v);
            for (w, _) in g.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    // the scan visits components in order of their smallest vertex, so a
    // stable sort by size keeps the tie order
    components.sort_by_key(|c| std::cmp::Reverse(c.len()));
    components
}
