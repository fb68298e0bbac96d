//! The distance index and its query procedure.

use rayon::prelude::*;
use thiserror::Error;

use crate::balance::Beta;
use crate::builder::{build, BuildConfig, BuildError, BuildReport, BuildTrace};
use crate::contraction::ContractionMap;
use crate::graph::{Distance, Graph, Vertex, INFINITY};
use crate::hierarchy::{lca_level, Hierarchy};
use crate::label::{LabelStore, LABEL_INFINITY};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("vertex {vertex} out of range for index over {vertex_count} vertices")]
    VertexOutOfRange { vertex: Vertex, vertex_count: usize },
    #[error("index was built for a different graph (fingerprint {expected:016x}, graph {actual:016x})")]
    StaleIndex { expected: u64, actual: u64 },
}

/// A query answer with the work done to find it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QueryOutcome {
    pub distance: Distance,
    /// Label positions compared at the common level (0 when the core was
    /// not consulted).
    pub scanned: usize,
    /// Size of the cut at the common level (0 when the core was not consulted).
    pub lca_cut_size: usize,
}

/// Exact shortest-path distance oracle for one graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceIndex {
    pub(crate) hierarchy: Hierarchy,
    pub(crate) labels: LabelStore,
    pub(crate) contraction: ContractionMap,
    pub(crate) fingerprint: u64,
    pub(crate) tail_pruning: bool,
    pub(crate) contracted: bool,
}

impl DistanceIndex {
    pub fn build(g: &Graph, cfg: &BuildConfig) -> Result<(DistanceIndex, BuildReport), BuildError> {
        let built = build(g, cfg, false)?;
        Ok((Self::assemble(g, cfg, built.hierarchy, built.labels, built.contraction), built.report))
    }

    /// Builds and also records every node's subgraph, cut, sides and shortcuts.
    pub fn build_traced(
        g: &Graph,
        cfg: &BuildConfig,
    ) -> Result<(DistanceIndex, BuildReport, BuildTrace), BuildError> {
        let built = build(g, cfg, true)?;
        let index = Self::assemble(g, cfg, built.hierarchy, built.labels, built.contraction);
        Ok((index, built.report, built.trace.unwrap_or_default()))
    }

    fn assemble(
        g: &Graph,
        cfg: &BuildConfig,
        hierarchy: Hierarchy,
        labels: LabelStore,
        contraction: ContractionMap,
    ) -> DistanceIndex {
        DistanceIndex {
            hierarchy,
            labels,
            contraction,
            fingerprint: g.fingerprint(),
            tail_pruning: cfg.tail_pruning,
            contracted: cfg.contraction,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.contraction.original_count()
    }

    pub fn hierarchy(&self) -> &Hierarchy {
        &self.hierarchy
    }

    pub fn labels(&self) -> &LabelStore {
        &self.labels
    }

    pub fn contraction(&self) -> &ContractionMap {
        &self.contraction
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn beta(&self) -> Beta {
        self.hierarchy.beta()
    }

    pub fn tail_pruning(&self) -> bool {
        self.tail_pruning
    }

    pub fn contracted(&self) -> bool {
        self.contracted
    }

    /// Checks that `g` is the graph this index was built from.
    pub fn verify_graph(&self, g: &Graph) -> Result<(), QueryError> {
        let actual = g.fingerprint();
        if actual == self.fingerprint {
            Ok(())
        } else {
            Err(QueryError::StaleIndex {
                expected: self.fingerprint,
                actual,
            })
        }
    }

    fn check(&self, v: Vertex) -> Result<(), QueryError> {
        if (v as usize) < self.vertex_count() {
            Ok(())
        } else {
            Err(QueryError::VertexOutOfRange {
                vertex: v,
                vertex_count: self.vertex_count(),
            })
        }
    }

    pub fn query(&self, s: Vertex, t: Vertex) -> Result<Distance, QueryError> {
        self.query_with_stats(s, t).map(|o| o.distance)
    }

    pub fn query_with_stats(&self, s: Vertex, t: Vertex) -> Result<QueryOutcome, QueryError> {
        self.check(s)?;
        self.check(t)?;
        let direct = |distance| QueryOutcome {
            distance,
            scanned: 0,
            lca_cut_size: 0,
        };
        if s == t {
            return Ok(direct(0));
        }
        let (a, b) = (self.contraction.anchor(s), self.contraction.anchor(t));
        if a.core == b.core {
            let d = self
                .contraction
                .pair_distance(s, t)
                .expect("anchors share a root");
            return Ok(direct(d));
        }
        let (d, scanned, lca_cut_size) = self.core_query(a.core, b.core);
        let distance = if d == INFINITY { INFINITY } else { d + a.offset + b.offset };
        Ok(QueryOutcome {
            distance,
            scanned,
            lca_cut_size,
        })
    }

    /// Distance between two distinct core vertices, positions scanned and
    /// the size of the common cut.
    fn core_query(&self, s: Vertex, t: Vertex) -> (Distance, usize, usize) {
        let (ns, nt) = (self.hierarchy.vertex_node(s), self.hierarchy.vertex_node(t));
        let level = lca_level(ns, nt);
        let ls = self.labels.level(s, level);
        let lt = self.labels.level(t, level);
        let scanned = ls.len().min(lt.len());
        let mut best = INFINITY;
        for (&x, &y) in ls.iter().zip(lt) {
            if x != LABEL_INFINITY && y != LABEL_INFINITY {
                best = best.min(x as Distance + y as Distance);
            }
        }
        let cut = self.hierarchy.node(ns.prefix(level)).map_or(0, |n| n.cut.len());
        (best, scanned, cut)
    }

    /// Answers each pair in order.
    pub fn batch_query(&self, pairs: &[(Vertex, Vertex)]) -> Result<Vec<Distance>, QueryError> {
        pairs.iter().map(|&(s, t)| self.query(s, t)).collect()
    }

    /// As [`DistanceIndex::batch_query`], spread over the current rayon pool.
    pub fn par_batch_query(&self, pairs: &[(Vertex, Vertex)]) -> Result<Vec<Distance>, QueryError> {
        pairs.par_iter().map(|&(s, t)| self.query(s, t)).collect()
    }
}
