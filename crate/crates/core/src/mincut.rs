//! Minimum vertex cuts by maximum flow on a node-split network.
//!
//! Every region vertex `v` becomes `v_in = 2v` and `v_out = 2v + 1` joined by
//! a unit arc; region edges become uncapacitated arcs `u_out → v_in` and
//! `v_out → u_in`. The source feeds `v_in` of each source attachment and each
//! sink attachment drains from `v_out`. A minimum `S`–`T` cut then consists of
//! inner arcs only and maps to a minimum vertex separator.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::{Graph, Vertex};

const UNSEEN: u32 = u32::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MinCutError {
    #[error("vertex {0} is attached to both source and sink")]
    OverlappingAttachments(Vertex),
    #[error("attachment vertex {0} outside the region")]
    VertexOutOfRange(Vertex),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MaxFlow {
    pub value: usize,
    /// Number of blocking-flow phases run.
    pub phases: usize,
}

/// The two extreme minimum vertex cuts, in region ids, ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexCutPair {
    /// Cut closest to the source attachments.
    pub source_side: Vec<Vertex>,
    /// Cut closest to the sink attachments.
    pub sink_side: Vec<Vertex>,
}

/// Node-split flow network with residual capacities.
#[derive(Clone, Debug)]
pub struct FlowGraph {
    region_size: usize,
    /// Arc `a` and its reverse `a ^ 1` are stored next to each other.
    head: Vec<u32>,
    cap: Vec<u32>,
    first: Vec<usize>,
    adj: Vec<u32>,
    inner_arcs: usize,
}

impl FlowGraph {
    pub fn new(
        region: &Graph,
        source_attach: &[Vertex],
        sink_attach: &[Vertex],
    ) -> Result<FlowGraph, MinCutError> {
        let k = region.vertex_count();
        let mut attached = vec![0u8; k];
        for &v in source_attach {
            *attached
                .get_mut(v as usize)
                .ok_or(MinCutError::VertexOutOfRange(v))? |= 1;
        }
        for &v in sink_attach {
            let slot = attached
                .get_mut(v as usize)
                .ok_or(MinCutError::VertexOutOfRange(v))?;
            if *slot & 1 != 0 {
                return Err(MinCutError::OverlappingAttachments(v));
            }
            *slot |= 2;
        }

        let node_count = 2 * k + 2;
        let source = 2 * k as u32;
        let sink = source + 1;
        // one more than any cut made of inner arcs can carry
        let infinite = k as u32 + 1;
        let mut tails = Vec::new();
        let mut head = Vec::new();
        let mut cap = Vec::new();
        let mut push = |from: u32, to: u32, c: u32| {
            tails.push(from);
            head.push(to);
            cap.push(c);
            tails.push(to);
            head.push(from);
            cap.push(0);
        };
        for v in 0..k as u32 {
            push(2 * v, 2 * v + 1, 1);
        }
        for (u, v, _) in region.edges() {
            push(2 * u + 1, 2 * v, infinite);
            push(2 * v + 1, 2 * u, infinite);
        }
        for v in 0..k as u32 {
            if attached[v as usize] & 1 != 0 {
                push(source, 2 * v, infinite);
            }
        }
        for v in 0..k as u32 {
            if attached[v as usize] & 2 != 0 {
                push(2 * v + 1, sink, infinite);
            }
        }

        let mut first = vec![0usize; node_count + 1];
        for &t in &tails {
            first[t as usize + 1] += 1;
        }
        for i in 0..node_count {
            first[i + 1] += first[i];
        }
        let mut fill = first.clone();
        let mut adj = vec![0u32; tails.len()];
        for (a, &t) in tails.iter().enumerate() {
            adj[fill[t as usize]] = a as u32;
            fill[t as usize] += 1;
        }
        Ok(FlowGraph {
            region_size: k,
            head,
            cap,
            first,
            adj,
            inner_arcs: k,
        })
    }

    pub fn node_count(&self) -> usize {
        2 * self.region_size + 2
    }

    /// Number of forward arcs, each paired with a reverse arc.
    pub fn arc_count(&self) -> usize {
        self.head.len() / 2
    }

    pub fn inner_arc_count(&self) -> usize {
        self.inner_arcs
    }

    fn source(&self) -> u32 {
        2 * self.region_size as u32
    }

    fn sink(&self) -> u32 {
        self.source() + 1
    }

    fn levels(&self) -> Vec<u32> {
        let mut level = vec![UNSEEN; self.node_count()];
        let mut queue = VecDeque::new();
        level[self.source() as usize] = 0;
        queue.push_back(self.source());
        while let Some(x) = queue.pop_front() {
            for &a in &self.adj[self.first[x as usize]..self.first[x as usize + 1]] {
                let y = self.head[a as usize];
                if self.cap[a as usize] > 0 && level[y as usize] == UNSEEN {
                    level[y as usize] = level[x as usize] + 1;
                    queue.push_back(y);
                }
            }
        }
        level
    }

    /// One augmenting path along the level graph, found by an explicit-stack
    /// search with current-arc pointers. Returns the amount pushed.
    fn augment(&mut self, level: &mut [u32], current: &mut [usize]) -> u32 {
        let (source, sink) = (self.source(), self.sink());
        let mut path: Vec<u32> = Vec::new();
        let mut x = source;
        loop {
            if x == sink {
                let f = path.iter().map(|&a| self.cap[a as usize]).min().unwrap_or(0);
                for &a in &path {
                    self.cap[a as usize] -= f;
                    self.cap[a as usize ^ 1] += f;
                }
                return f;
            }
            let end = self.first[x as usize + 1];
            let mut advanced = false;
            while current[x as usize] < end {
                let a = self.adj[current[x as usize]];
                let y = self.head[a as usize];
                if self.cap[a as usize] > 0 && level[y as usize] == level[x as usize] + 1 {
                    path.push(a);
                    x = y;
                    advanced = true;
                    break;
                }
                current[x as usize] += 1;
            }
            if !advanced {
                // dead end: drop the node from the level graph and back up
                level[x as usize] = UNSEEN;
                let Some(a) = path.pop() else { return 0 };
                x = self.head[a as usize ^ 1];
                current[x as usize] += 1;
            }
        }
    }

    /// Runs Dinitz's algorithm to completion.
    pub fn max_flow(&mut self) -> MaxFlow {
        let mut value = 0usize;
        let mut phases = 0usize;
        loop {
            let mut level = self.levels();
            if level[self.sink() as usize] == UNSEEN {
                break;
            }
            phases += 1;
            let mut current: Vec<usize> = self.first[..self.node_count()].to_vec();
            loop {
                let f = self.augment(&mut level, &mut current);
                if f == 0 {
                    break;
                }
                value += f as usize;
            }
        }
        MaxFlow { value, phases }
    }

    fn residual_reach(&self, from: u32, backwards: bool) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut queue = VecDeque::new();
        seen[from as usize] = true;
        queue.push_back(from);
        while let Some(x) = queue.pop_front() {
            for &a in &self.adj[self.first[x as usize]..self.first[x as usize + 1]] {
                let y = self.head[a as usize];
                // backwards: y → x is usable when the reverse of a has capacity
                let usable = if backwards {
                    self.cap[a as usize ^ 1] > 0
                } else {
                    self.cap[a as usize] > 0
                };
                if usable && !seen[y as usize] {
                    seen[y as usize] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// Reads both extreme minimum vertex cuts from the residual network.
    /// Call after [`FlowGraph::max_flow`].
    pub fn extract_cuts(&self) -> VertexCutPair {
        let from_source = self.residual_reach(self.source(), false);
        let to_sink = self.residual_reach(self.sink(), true);
        let k = self.region_size;
        let source_side = (0..k as Vertex)
            .filter(|&v| from_source[2 * v as usize] && !from_source[2 * v as usize + 1])
            .collect();
        let sink_side = (0..k as Vertex)
            .filter(|&v| to_sink[2 * v as usize + 1] && !to_sink[2 * v as usize])
            .collect();
        VertexCutPair {
            source_side,
            sink_side,
        }
    }
}

/// Builds the flow network, runs max flow and extracts both cuts.
pub fn min_vertex_cut(
    region: &Graph,
    source_attach: &[Vertex],
    sink_attach: &[Vertex],
) -> Result<(VertexCutPair, MaxFlow), MinCutError> {
    let mut fg = FlowGraph::new(region, source_attach, sink_attach)?;
    let flow = fg.max_flow();
    let cuts = fg.extract_cuts();
    debug_assert_eq!(cuts.source_side.len(), flow.value);
    debug_assert_eq!(cuts.sink_side.len(), flow.value);
    Ok((cuts, flow))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize, edges: &[(Vertex, Vertex)]) -> Graph {
        Graph::from_edges(n, edges.iter().map(|&(u, v)| (u, v, 1))).unwrap()
    }

    #[test]
    fn path_of_three() {
        let g = unit(3, &[(0, 1), (1, 2)]);
        let fg = FlowGraph::new(&g, &[0], &[2]).unwrap();
        assert_eq!(fg.node_count(), 8);
        assert_eq!(fg.inner_arc_count(), 3);
        let (cuts, flow) = min_vertex_cut(&g, &[0], &[2]).unwrap();
        assert_eq!(flow.value, 1);
        // the endpoints themselves are also minimum separators
        assert_eq!(cuts.source_side, vec![0]);
        assert_eq!(cuts.sink_side, vec![2]);
    }

    #[test]
    fn two_disjoint_paths() {
        // 0 - 1 - 3 and 0 - 2 - 3 with source {0}, sink {3} attached through 1, 2
        let g = unit(6, &[(4, 1), (4, 2), (1, 5), (2, 5), (0, 4), (5, 3)]);
        let (cuts, flow) = min_vertex_cut(&g, &[1, 2], &[0, 3]).unwrap();
        assert_eq!(flow.value, 2);
        assert_eq!(cuts.source_side.len(), 2);
        assert_eq!(cuts.sink_side.len(), 2);
    }

    #[test]
    fn overlapping_attachments_rejected() {
        let g = unit(3, &[(0, 1), (1, 2)]);
        assert_eq!(
            FlowGraph::new(&g, &[0, 1], &[1]).unwrap_err(),
            MinCutError::OverlappingAttachments(1)
        );
    }

    #[test]
    fn disconnected_terminals_need_no_cut() {
        let g = unit(4, &[(0, 1), (2, 3)]);
        let (cuts, flow) = min_vertex_cut(&g, &[0], &[3]).unwrap();
        assert_eq!(flow.value, 0);
        assert!(cuts.source_side.is_empty() && cuts.sink_side.is_empty());
    }

}
