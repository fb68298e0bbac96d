//! Cut ranking and per-level distance labels.
//!
//! At every hierarchy node each vertex of the node's subgraph stores its
//! distances to the node's cut vertices, in rank order. Searches from
//! lower-ranked cut vertices flag every vertex whose shortest paths can all
//! be routed through an earlier cut vertex; trailing flagged entries are
//! redundant and dropped (tail pruning).

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Distance, Graph, Vertex, INFINITY};
use crate::hierarchy::Hierarchy;

/// Stored value for an unreachable cut vertex.
pub const LABEL_INFINITY: u32 = u32::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LabelError {
    #[error("distance {0} does not fit a 32-bit label entry")]
    DistanceOverflow(Distance),
}

/// Distances from one root plus, for every vertex, whether some shortest
/// path from the root reaches it through a vertex of the prune set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistPrune {
    pub dist: Vec<Distance>,
    pub pruned: Vec<bool>,
}

/// Dijkstra that also propagates the prune flag. Ties on distance are broken
/// in favour of flagged entries, so a vertex is flagged exactly when at
/// least one of its shortest paths from `root` passes through `prune`
/// (the endpoint itself included). The root is never flagged; unreachable
/// vertices are not flagged.
pub fn dist_and_prune(g: &Graph, root: Vertex, prune: &[Vertex]) -> DistPrune {
    let mut in_prune = vec![false; g.vertex_count()];
    for &p in prune {
        in_prune[p as usize] = true;
    }
    dist_and_prune_masked(g, root, &in_prune)
}

fn dist_and_prune_masked(g: &Graph, root: Vertex, in_prune: &[bool]) -> DistPrune {
    let n = g.vertex_count();
    let mut dist = vec![INFINITY; n];
    let mut pruned = vec![false; n];
    let mut settled = vec![false; n];
    // flag order 0 sorts flagged entries first
    let mut heap = BinaryHeap::new();
    dist[root as usize] = 0;
    heap.push(Reverse((0 as Distance, 1u8, root)));
    while let Some(Reverse((d, flag, v))) = heap.pop() {
        if settled[v as usize] {
            continue;
        }
        settled[v as usize] = true;
        let flagged = flag == 0;
        pruned[v as usize] = flagged;
        let pass = if v != root && (flagged || in_prune[v as usize]) { 0 } else { 1 };
        for (w, weight) in g.neighbors(v) {
            if settled[w as usize] {
                continue;
            }
            let nd = d + weight as Distance;
            if nd <= dist[w as usize] {
                dist[w as usize] = nd;
                heap.push(Reverse((nd, pass, w)));
            }
        }
    }
    // a pruned vertex reached first is flagged through itself
    for v in 0..n {
        if in_prune[v] && v as Vertex != root && dist[v] != INFINITY {
            pruned[v] = true;
        }
    }
    DistPrune { dist, pruned }
}

/// Cut vertices in rank order together with their prune counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutRanking {
    pub order: Vec<Vertex>,
    /// `counts[i]` is the number of vertices flagged in the search from
    /// `order[i]` when all other cut vertices form the prune set.
    pub counts: Vec<usize>,
    /// Vertices left unflagged by that same search: the entries for
    /// `order[i]` that no other cut vertex can stand in for.
    pub cover: Vec<usize>,
}

impl CutRanking {
    /// Total cut-cover entries at this node.
    pub fn cover_total(&self) -> u64 {
        self.cover.iter().map(|&c| c as u64).sum()
    }
}

/// Orders cut vertices so that those covering the fewest shortest paths
/// come first (ascending prune count, ties by id).
pub fn rank_cut(g: &Graph, cut: &[Vertex]) -> CutRanking {
    let mut in_cut = vec![false; g.vertex_count()];
    for &c in cut {
        in_cut[c as usize] = true;
    }
    let n = g.vertex_count();
    let counts: Vec<usize> = cut
        .par_iter()
        .map(|&c| {
            let mut mask = in_cut.clone();
            mask[c as usize] = false;
            dist_and_prune_masked(g, c, &mask).pruned.iter().filter(|&&p| p).count()
        })
        .collect();
    let mut ranked: Vec<(usize, Vertex)> = counts.iter().copied().zip(cut.iter().copied()).collect();
    ranked.sort_unstable();
    CutRanking {
        order: ranked.iter().map(|r| r.1).collect(),
        counts: ranked.iter().map(|r| r.0).collect(),
        cover: ranked.iter().map(|r| n - r.0).collect(),
    }
}

/// Labels of every vertex of one node's subgraph at that node's level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelLabels {
    offsets: Vec<usize>,
    dists: Vec<u32>,
}

impl LevelLabels {
    pub fn get(&self, v: Vertex) -> &[u32] {
        &self.dists[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn entry_count(&self) -> usize {
        self.dists.len()
    }
}

fn encode(d: Distance) -> Result<u32, LabelError> {
    if d == INFINITY {
        Ok(LABEL_INFINITY)
    } else if d >= LABEL_INFINITY as Distance {
        Err(LabelError::DistanceOverflow(d))
    } else {
        Ok(d as u32)
    }
}

/// Builds the level labels of all vertices of `g` for the ranked cut.
///
/// The search from the `i`-th cut vertex uses the `i` earlier cut vertices
/// as its prune set. Cut vertex `j` stores `j + 1` entries (ending in 0).
/// Other vertices store every entry up to the last unflagged one when
/// `tail_pruning` is on, and the full cut otherwise.
pub fn build_labels(g: &Graph, ranked: &[Vertex], tail_pruning: bool) -> Result<LevelLabels, LabelError> {
    build_labels_with_searches(g, ranked, tail_pruning).map(|(labels, _)| labels)
}

/// As [`build_labels`], also returning the search from each ranked cut vertex.
pub fn build_labels_with_searches(
    g: &Graph,
    ranked: &[Vertex],
    tail_pruning: bool,
) -> Result<(LevelLabels, Vec<DistPrune>), LabelError> {
    let n = g.vertex_count();
    let searches: Vec<DistPrune> = (0..ranked.len())
        .into_par_iter()
        .map(|i| dist_and_prune(g, ranked[i], &ranked[..i]))
        .collect();
    let mut cut_pos = vec![u32::MAX; n];
    for (j, &c) in ranked.iter().enumerate() {
        cut_pos[c as usize] = j as u32;
    }
    let mut offsets = Vec::with_capacity(n + 1);
    let mut dists = Vec::new();
    offsets.push(0);
    for u in 0..n {
        let len = if cut_pos[u] != u32::MAX {
            cut_pos[u] as usize + 1
        } else if tail_pruning {
            searches
                .iter()
                .rposition(|s| !s.pruned[u])
                .map_or(0, |k| k + 1)
        } else {
            ranked.len()
        };
        for s in &searches[..len] {
            dists.push(encode(s.dist[u])?);
        }
        offsets.push(dists.len());
    }
    Ok((LevelLabels { offsets, dists }, searches))
}

/// Labels of all vertices across all their levels, flattened.
///
/// Vertex `v` owns levels `0..=level(v)`; level `l` of `v` is
/// `dists[bounds[level_index[v] + l]..bounds[level_index[v] + l + 1]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelStore {
    level_index: Vec<usize>,
    bounds: Vec<usize>,
    dists: Vec<u32>,
}

impl LabelStore {
    /// Builds the store from per-vertex level arrays.
    pub fn from_levels(per_vertex: Vec<Vec<Vec<u32>>>) -> LabelStore {
        let mut level_index = Vec::with_capacity(per_vertex.len() + 1);
        let mut bounds = Vec::new();
        let mut dists = Vec::new();
        for levels in per_vertex {
            level_index.push(bounds.len());
            for level in levels {
                bounds.push(dists.len());
                dists.extend(level);
            }
        }
        level_index.push(bounds.len());
        bounds.push(dists.len());
        LabelStore {
            level_index,
            bounds,
            dists,
        }
    }

    /// Builds the store from per-vertex level lengths and the flat entries.
    pub fn from_lengths(lengths: &[Vec<u32>], dists: Vec<u32>) -> Result<LabelStore, String> {
        let mut level_index = Vec::with_capacity(lengths.len() + 1);
        let mut bounds = Vec::new();
        let mut at = 0usize;
        for lens in lengths {
            level_index.push(bounds.len());
            for &l in lens {
                bounds.push(at);
                at += l as usize;
            }
        }
        level_index.push(bounds.len());
        bounds.push(at);
        if at != dists.len() {
            return Err(format!("label lengths sum to {at} but {} entries stored", dists.len()));
        }
        Ok(LabelStore {
            level_index,
            bounds,
            dists,
        })
    }

    /// Assembles the store from arrays given as `(vertex, level, entries)`.
    /// `level_counts[v]` is the number of levels of `v`; every
    /// `(vertex, level)` slot must be produced exactly once.
    pub fn assemble<'a, F, I>(level_counts: &[usize], arrays: F) -> LabelStore
    where
        F: Fn() -> I,
        I: Iterator<Item = (Vertex, usize, &'a [u32])>,
    {
        let mut level_index = Vec::with_capacity(level_counts.len() + 1);
        let mut slots = 0;
        for &c in level_counts {
            level_index.push(slots);
            slots += c;
        }
        level_index.push(slots);
        let mut bounds = vec![0usize; slots + 1];
        for (v, l, a) in arrays() {
            bounds[level_index[v as usize] + l + 1] = a.len();
        }
        for i in 0..slots {
            bounds[i + 1] += bounds[i];
        }
        let mut dists = vec![0u32; bounds[slots]];
        for (v, l, a) in arrays() {
            let at = bounds[level_index[v as usize] + l];
            dists[at..at + a.len()].copy_from_slice(a);
        }
        LabelStore {
            level_index,
            bounds,
            dists,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.level_index.len() - 1
    }

    /// Number of levels stored for `v`.
    pub fn levels(&self, v: Vertex) -> usize {
        self.level_index[v as usize + 1] - self.level_index[v as usize]
    }

    pub fn level(&self, v: Vertex, level: usize) -> &[u32] {
        let b = self.level_index[v as usize] + level;
        &self.dists[self.bounds[b]..self.bounds[b + 1]]
    }

    pub fn entry_count(&self) -> usize {
        self.dists.len()
    }

    pub fn level_array_count(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn dists(&self) -> &[u32] {
        &self.dists
    }

    /// Bytes of label data: 4 per distance entry plus 4 per level length.
    pub fn bytes(&self) -> usize {
        4 * self.entry_count() + 4 * self.level_array_count()
    }
}

/// Size measures of a labelling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LabellingStats {
    pub entry_count: u64,
    pub bytes: u64,
    /// Entries without tail pruning or self-truncation: each vertex stores
    /// the whole cut at every level down to its own node.
    pub naive_upper_bound: u64,
}

pub fn labelling_stats(labels: &LabelStore, hierarchy: &Hierarchy) -> LabellingStats {
    let mut on_path = vec![0u64; hierarchy.node_count()];
    for (i, node) in hierarchy.nodes().iter().enumerate() {
        let above = node.parent.map_or(0, |p| on_path[p]);
        on_path[i] = above + node.cut.len() as u64;
    }
    let naive = hierarchy
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, n)| n.cut.len() as u64 * on_path[i])
        .sum();
    LabellingStats {
        entry_count: labels.entry_count() as u64,
        bytes: labels.bytes() as u64,
        naive_upper_bound: naive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::dijkstra;

    fn unit(n: usize, edges: &[(Vertex, Vertex)]) -> Graph {
        Graph::from_edges(n, edges.iter().map(|&(u, v)| (u, v, 1))).unwrap()
    }

    #[test]
    fn prune_flags_follow_shortest_paths() {
        // square 0-1-2-3-0: from 0, vertex 2 is reached via 1 and via 3
        let g = unit(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let r = dist_and_prune(&g, 0, &[1]);
        assert_eq!(r.dist, dijkstra(&g, 0));
        assert_eq!(r.pruned, vec![false, true, true, false]);
        let r = dist_and_prune(&g, 0, &[]);
        assert!(r.pruned.iter().all(|&p| !p));
    }

    #[test]
    fn unreachable_is_unflagged() {
        let g = unit(3, &[(0, 1)]);
        let r = dist_and_prune(&g, 0, &[1]);
        assert_eq!(r.dist[2], INFINITY);
        assert!(!r.pruned[2]);
        assert!(r.pruned[1]);
    }

    #[test]
    fn root_in_prune_set_is_ignored() {
        let g = unit(2, &[(0, 1)]);
        let r = dist_and_prune(&g, 0, &[0]);
        assert_eq!(r.pruned, vec![false, false]);
    }

    #[test]
    fn self_truncated_cut_labels() {
        let g = unit(3, &[(0, 1), (1, 2)]);
        let l = build_labels(&g, &[1, 0], true).unwrap();
        assert_eq!(l.get(1), &[0]);
        assert_eq!(l.get(0), &[1, 0]);
        // 2 is only reachable through 1, so its entry for 0 is dropped
        assert_eq!(l.get(2), &[1]);
        let full = build_labels(&g, &[1, 0], false).unwrap();
        assert_eq!(full.get(2), &[1, 2]);
    }

    #[test]
    fn store_layout() {
        let s = LabelStore::from_levels(vec![vec![vec![1, 2], vec![]], vec![vec![3]]]);
        assert_eq!(s.levels(0), 2);
        assert_eq!(s.level(0, 0), &[1, 2]);
        assert!(s.level(0, 1).is_empty());
        assert_eq!(s.level(1, 0), &[3]);
        assert_eq!(s.entry_count(), 3);
        let t = LabelStore::from_lengths(&[vec![2, 0], vec![1]], vec![1, 2, 3]).unwrap();
        assert_eq!(s, t);
    }

    #[test]
    fn overflow_is_reported() {
        let g = Graph::from_edges(3, [(0, 1, u32::MAX - 1), (1, 2, 5)]).unwrap();
        assert!(matches!(
            build_labels(&g, &[0], true),
            Err(LabelError::DistanceOverflow(_))
        ));
    }
}
