//! Degree-one contraction.
//!
//! Vertices of degree one are peeled repeatedly. Peeled vertices form trees
//! hanging off a surviving core vertex (their root); every path from a
//! peeled vertex to anything outside its tree runs through that root.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::{Distance, Graph, Vertex};

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContractionRecord {
    pub vertex: Vertex,
    /// Core vertex the peeled tree hangs from (original id).
    pub root: Vertex,
    /// Next vertex towards the root (original id).
    pub parent: Vertex,
    pub dist_to_parent: Distance,
    pub dist_to_root: Distance,
    /// Number of tree edges to the root; the root itself has depth 0.
    pub depth: u32,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ContractionError {
    #[error("vertices {0} and {1} hang from different roots")]
    DifferentRoots(Vertex, Vertex),
}

/// Where an original vertex attaches to the core.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Anchor {
    /// Core id of the root.
    pub core: Vertex,
    pub offset: Distance,
}

/// Mapping between original vertex ids and the contracted core.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionMap {
    core_to_original: Vec<Vertex>,
    original_to_core: Vec<u32>,
    records: Vec<ContractionRecord>,
    record_of: Vec<u32>,
}

impl ContractionMap {
    /// Map for an uncontracted graph.
    pub fn identity(vertex_count: usize) -> ContractionMap {
        let ids: Vec<Vertex> = (0..vertex_count as Vertex).collect();
        ContractionMap {
            core_to_original: ids.clone(),
            original_to_core: ids,
            records: Vec::new(),
            record_of: vec![NONE; vertex_count],
        }
    }

    /// Rebuilds the map from its stored parts. Records must be sorted by vertex.
    pub fn from_parts(
        original_count: usize,
        core_to_original: Vec<Vertex>,
        records: Vec<ContractionRecord>,
    ) -> Result<ContractionMap, String> {
        let mut original_to_core = vec![NONE; original_count];
        for (c, &v) in core_to_original.iter().enumerate() {
            let slot = original_to_core
                .get_mut(v as usize)
                .ok_or_else(|| format!("core vertex maps to out-of-range id {v}"))?;
            if *slot != NONE {
                return Err(format!("vertex {v} listed twice in the core"));
            }
            *slot = c as u32;
        }
        let mut record_of = vec![NONE; original_count];
        for (i, r) in records.iter().enumerate() {
            let v = r.vertex as usize;
            if v >= original_count || original_to_core[v] != NONE || record_of[v] != NONE {
                return Err(format!("invalid contraction record for vertex {}", r.vertex));
            }
            record_of[v] = i as u32;
        }
        if core_to_original.len() + records.len() != original_count {
            return Err("core and records do not cover every vertex".into());
        }
        for r in &records {
            for x in [r.root, r.parent] {
                if x as usize >= original_count {
                    return Err(format!("record for {} references out-of-range {x}", r.vertex));
                }
            }
            if original_to_core[r.root as usize] == NONE {
                return Err(format!("record for {} has a non-core root", r.vertex));
            }
            let parent_depth = match record_of[r.parent as usize] {
                NONE => 0,
                i => records[i as usize].depth,
            };
            if r.depth != parent_depth + 1 {
                return Err(format!("record for {} has inconsistent depth", r.vertex));
            }
        }
        Ok(ContractionMap {
            core_to_original,
            original_to_core,
            records,
            record_of,
        })
    }

    pub fn original_count(&self) -> usize {
        self.original_to_core.len()
    }

    pub fn core_count(&self) -> usize {
        self.core_to_original.len()
    }

    pub fn records(&self) -> &[ContractionRecord] {
        &self.records
    }

    pub fn core_to_original(&self) -> &[Vertex] {
        &self.core_to_original
    }

    pub fn is_identity(&self) -> bool {
        self.records.is_empty()
    }

    /// Core id of an original vertex, `None` if it was peeled.
    pub fn core_id(&self, v: Vertex) -> Option<Vertex> {
        match self.original_to_core[v as usize] {
            NONE => None,
            c => Some(c),
        }
    }

    pub fn record(&self, v: Vertex) -> Option<&ContractionRecord> {
        match self.record_of[v as usize] {
            NONE => None,
            i => Some(&self.records[i as usize]),
        }
    }

    pub fn anchor(&self, v: Vertex) -> Anchor {
        match self.record(v) {
            None => Anchor {
                core: self.original_to_core[v as usize],
                offset: 0,
            },
            Some(r) => Anchor {
                core: self.original_to_core[r.root as usize],
                offset: r.dist_to_root,
            },
        }
    }

    fn root_of(&self, v: Vertex) -> Vertex {
        self.record(v).map_or(v, |r| r.root)
    }

    fn depth_of(&self, v: Vertex) -> u32 {
        self.record(v).map_or(0, |r| r.depth)
    }

    fn dist_to_root(&self, v: Vertex) -> Distance {
        self.record(v).map_or(0, |r| r.dist_to_root)
    }

    fn parent_of(&self, v: Vertex) -> Vertex {
        self.record(v).map_or(v, |r| r.parent)
    }

    /// Exact distance between two vertices in the same peeled tree (either
    /// may be the root itself), from stored parents and depths only.
    pub fn pair_distance(&self, v: Vertex, w: Vertex) -> Result<Distance, ContractionError> {
        if self.root_of(v) != self.root_of(w) {
            return Err(ContractionError::DifferentRoots(v, w));
        }
        let (mut a, mut b) = (v, w);
        while self.depth_of(a) > self.depth_of(b) {
            a = self.parent_of(a);
        }
        while self.depth_of(b) > self.depth_of(a) {
            b = self.parent_of(b);
        }
        while a != b {
            a = self.parent_of(a);
            b = self.parent_of(b);
        }
        Ok(self.dist_to_root(v) + self.dist_to_root(w) - 2 * self.dist_to_root(a))
    }
}

/// Result of peeling: the core graph in core ids plus the id mapping.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub core: Graph,
    pub map: ContractionMap,
}

/// Repeatedly removes vertices of current degree one.
///
/// The peel never empties a component: when two vertices remain joined by a
/// single edge, removing one leaves the other with degree zero.
pub fn contract_degree_one(g: &Graph) -> Contraction {
    let n = g.vertex_count();
    if n < 2 {
        return Contraction {
            core: g.clone(),
            map: ContractionMap::identity(n),
        };
    }
    let mut degree: Vec<usize> = (0..n as Vertex).map(|v| g.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut parent = vec![NONE; n];
    let mut parent_weight = vec![0 as Distance; n];
    let mut order = Vec::new();
    let mut queue: VecDeque<Vertex> = (0..n as Vertex).filter(|&v| degree[v as usize] == 1).collect();

    while let Some(v) = queue.pop_front() {
        if removed[v as usize] || degree[v as usize] != 1 {
            continue;
        }
        let (p, w) = g
            .neighbors(v)
            .find(|&(u, _)| !removed[u as usize])
            .expect("degree-one vertex has a live neighbor");
        removed[v as usize] = true;
        parent[v as usize] = p;
        parent_weight[v as usize] = w as Distance;
        degree[v as usize] = 0;
        degree[p as usize] -= 1;
        if degree[p as usize] == 1 {
            queue.push_back(p);
        }
        order.push(v);
    }

    // parents are removed after their children, so walk the peel order backwards
    let mut root = vec![NONE; n];
    let mut depth = vec![0u32; n];
    let mut to_root = vec![0 as Distance; n];
    for &v in order.iter().rev() {
        let p = parent[v as usize] as usize;
        if removed[p] {
            root[v as usize] = root[p];
            depth[v as usize] = depth[p] + 1;
            to_root[v as usize] = to_root[p] + parent_weight[v as usize];
        } else {
            root[v as usize] = p as Vertex;
            depth[v as usize] = 1;
            to_root[v as usize] = parent_weight[v as usize];
        }
    }

    let core_vertices: Vec<Vertex> = (0..n as Vertex).filter(|&v| !removed[v as usize]).collect();
    let core = g.induced(&core_vertices);
    let mut original_to_core = vec![NONE; n];
    for (c, &v) in core_vertices.iter().enumerate() {
        original_to_core[v as usize] = c as u32;
    }
    let mut records = Vec::with_capacity(order.len());
    let mut record_of = vec![NONE; n];
    for v in 0..n {
        if removed[v] {
            record_of[v] = records.len() as u32;
            records.push(ContractionRecord {
                vertex: v as Vertex,
                root: root[v],
                parent: parent[v],
                dist_to_parent: parent_weight[v],
                dist_to_root: to_root[v],
                depth: depth[v],
            });
        }
    }
    Contraction {
        core,
        map: ContractionMap {
            core_to_original: core_vertices,
            original_to_core,
            records,
            record_of,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::dijkstra;

    #[test]
    fn star_peels_to_center() {
        let g = Graph::from_edges(4, [(0, 1, 1), (0, 2, 2), (0, 3, 3)]).unwrap();
        let c = contract_degree_one(&g);
        assert_eq!(c.core.vertex_count(), 1);
        assert_eq!(c.map.core_to_original(), &[0]);
        assert_eq!(c.map.records().len(), 3);
        for r in c.map.records() {
            assert_eq!(r.depth, 1);
            assert_eq!(r.root, 0);
            assert_eq!(r.parent, 0);
            assert_eq!(r.dist_to_root, r.vertex as Distance);
        }
    }

    #[test]
    fn cycle_is_untouched() {
        let g = Graph::from_edges(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)]).unwrap();
        let c = contract_degree_one(&g);
        assert!(c.map.records().is_empty());
        assert_eq!(c.core, g);
    }

    #[test]
    fn tree_keeps_one_vertex() {
        let g = Graph::from_edges(2, [(0, 1, 5)]).unwrap();
        let c = contract_degree_one(&g);
        assert_eq!(c.core.vertex_count(), 1);
        assert_eq!(c.map.records().len(), 1);
    }

    #[test]
    fn tiny_inputs_unchanged() {
        let g = Graph::from_edges(1, []).unwrap();
        let c = contract_degree_one(&g);
        assert_eq!(c.core, g);
        assert!(c.map.is_identity());
    }

    #[test]
    fn pair_distance_cases() {
        // root 0 on a triangle {0, 4, 5}; branch 0-1 (3), branch 0-2 (4), 2-3 (2)
        let g = Graph::from_edges(
            6,
            [(0, 4, 1), (4, 5, 1), (5, 0, 1), (0, 1, 3), (0, 2, 4), (2, 3, 2)],
        )
        .unwrap();
        let c = contract_degree_one(&g);
        let m = &c.map;
        assert_eq!(m.core_count(), 3);
        assert_eq!(m.pair_distance(1, 1).unwrap(), 0);
        assert_eq!(m.pair_distance(1, 2).unwrap(), 7);
        assert_eq!(m.pair_distance(3, 2).unwrap(), 2);
        assert_eq!(m.pair_distance(3, 0).unwrap(), 6);
        assert_eq!(m.pair_distance(1, 3).unwrap(), dijkstra(&g, 1)[3]);
        assert_eq!(
            m.pair_distance(1, 4),
            Err(ContractionError::DifferentRoots(1, 4))
        );
    }

    #[test]
    fn from_parts_round_trip() {
        let g = Graph::from_edges(5, [(0, 1, 1), (1, 2, 1), (2, 0, 1), (2, 3, 4), (3, 4, 1)]).unwrap();
        let c = contract_degree_one(&g);
        let rebuilt = ContractionMap::from_parts(
            5,
            c.map.core_to_original().to_vec(),
            c.map.records().to_vec(),
        )
        .unwrap();
        assert_eq!(rebuilt, c.map);
    }
}
