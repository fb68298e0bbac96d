//! Balanced tree hierarchy of vertex cuts.
//!
//! A node is named by the left/right path from the root, packed into a `u64`:
//! the path bits are left-aligned in the high 58 bits and the path length sits
//! in the low 6 bits. The level of the lowest common ancestor of two nodes is
//! then the length of their common bit prefix, found with one XOR and a
//! leading-zero count.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::balance::Beta;
use crate::graph::Vertex;

const LEN_BITS: u32 = 6;
const LEN_MASK: u64 = (1 << LEN_BITS) - 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HierarchyError {
    #[error("hierarchy deeper than {} levels", NodeId::MAX_LEVEL)]
    TooDeep,
    #[error("invalid node id {0:#x}")]
    InvalidNodeId(u64),
    #[error("malformed hierarchy: {0}")]
    Malformed(String),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u64);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);
    pub const MAX_LEVEL: usize = 64 - LEN_BITS as usize;

    /// Validates a packed id: the length is in range and no bit is set past it.
    pub fn from_raw(raw: u64) -> Result<NodeId, HierarchyError> {
        let len = (raw & LEN_MASK) as usize;
        if len > Self::MAX_LEVEL {
            return Err(HierarchyError::InvalidNodeId(raw));
        }
        let id = NodeId(raw);
        if id.path_bits() & !prefix_mask(len) != 0 {
            return Err(HierarchyError::InvalidNodeId(raw));
        }
        Ok(id)
    }

    /// Parses a path such as `"0110"`; the empty string is the root.
    pub fn from_path(path: &str) -> Result<NodeId, HierarchyError> {
        let mut id = NodeId::ROOT;
        for c in path.chars() {
            let right = match c {
                '0' => false,
                '1' => true,
                _ => return Err(HierarchyError::Malformed(format!("bad path `{path}`"))),
            };
            id = id.child(right)?;
        }
        Ok(id)
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn level(self) -> usize {
        (self.0 & LEN_MASK) as usize
    }

    fn path_bits(self) -> u64 {
        self.0 & !LEN_MASK
    }

    /// Direction taken at depth `i` (`true` = right).
    pub fn bit(self, i: usize) -> bool {
        debug_assert!(i < self.level());
        self.0 >> (63 - i) & 1 == 1
    }

    pub fn child(self, right: bool) -> Result<NodeId, HierarchyError> {
        let len = self.level();
        if len >= Self::MAX_LEVEL {
            return Err(HierarchyError::TooDeep);
        }
        let bit = if right { 1u64 << (63 - len) } else { 0 };
        Ok(NodeId(self.path_bits() | bit | (len as u64 + 1)))
    }

    /// Ancestor at `level` (the node itself if `level` is its own level).
    pub fn prefix(self, level: usize) -> NodeId {
        debug_assert!(level <= self.level());
        NodeId(self.path_bits() & prefix_mask(level) | level as u64)
    }

    pub fn parent(self) -> Option<NodeId> {
        match self.level() {
            0 => None,
            l => Some(self.prefix(l - 1)),
        }
    }
}

fn prefix_mask(level: usize) -> u64 {
    if level == 0 {
        0
    } else {
        !0u64 << (64 - level)
    }
}

/// Level of the lowest common ancestor of two nodes.
pub fn lca_level(a: NodeId, b: NodeId) -> usize {
    let common = ((a.0 ^ b.0) & !LEN_MASK).leading_zeros() as usize;
    a.level().min(b.level()).min(common)
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.level() == 0 {
            return f.write_str("root");
        }
        for i in 0..self.level() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NodeId({self})")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HierarchyNode {
    pub id: NodeId,
    /// Cut vertices in rank order (the label order at this level).
    pub cut: Vec<Vertex>,
    pub parent: Option<usize>,
    pub left: Option<usize>,
    pub right: Option<usize>,
    /// Vertices in this node's subtree, cut vertices included.
    pub subtree_size: usize,
}

/// Nodes in preorder, root first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hierarchy {
    nodes: Vec<HierarchyNode>,
    index: HashMap<NodeId, usize>,
    vertex_node: Vec<NodeId>,
    vertex_pos: Vec<u32>,
    beta: Beta,
}

impl Hierarchy {
    /// Assembles a hierarchy from `(id, cut)` pairs in preorder. Every
    /// vertex must appear in exactly one cut.
    pub fn from_preorder(
        vertex_count: usize,
        beta: Beta,
        nodes: Vec<(NodeId, Vec<Vertex>)>,
    ) -> Result<Hierarchy, HierarchyError> {
        let bad = |m: String| Err(HierarchyError::Malformed(m));
        let mut index = HashMap::with_capacity(nodes.len());
        let mut built: Vec<HierarchyNode> = Vec::with_capacity(nodes.len());
        let mut vertex_node = vec![None; vertex_count];
        let mut vertex_pos = vec![0u32; vertex_count];
        for (i, (id, cut)) in nodes.into_iter().enumerate() {
            if index.insert(id, i).is_some() {
                return bad(format!("node {id} listed twice"));
            }
            let parent = match id.parent() {
                None if i == 0 => None,
                None => return bad("root is not the first node".into()),
                Some(p) => match index.get(&p) {
                    Some(&pi) => Some(pi),
                    None => return bad(format!("node {id} precedes its parent")),
                },
            };
            if let Some(pi) = parent {
                let slot = if id.bit(id.level() - 1) {
                    &mut built[pi].right
                } else {
                    &mut built[pi].left
                };
                *slot = Some(i);
            }
            for (pos, &v) in cut.iter().enumerate() {
                match vertex_node.get_mut(v as usize) {
                    None => return bad(format!("cut vertex {v} out of range")),
                    Some(Some(_)) => return bad(format!("vertex {v} in two cuts")),
                    Some(slot) => *slot = Some(id),
                }
                vertex_pos[v as usize] = pos as u32;
            }
            built.push(HierarchyNode {
                id,
                subtree_size: cut.len(),
                cut,
                parent,
                left: None,
                right: None,
            });
        }
        if built.is_empty() && vertex_count > 0 {
            return bad("no nodes".into());
        }
        // preorder: children come after parents
        for i in (0..built.len()).rev() {
            if let Some(p) = built[i].parent {
                built[p].subtree_size += built[i].subtree_size;
            }
        }
        let vertex_node = vertex_node
            .into_iter()
            .enumerate()
            .map(|(v, n)| n.ok_or_else(|| HierarchyError::Malformed(format!("vertex {v} in no cut"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Hierarchy {
            nodes: built,
            index,
            vertex_node,
            vertex_pos,
            beta,
        })
    }

    pub fn nodes(&self) -> &[HierarchyNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_node.len()
    }

    pub fn beta(&self) -> Beta {
        self.beta
    }

    pub fn node(&self, id: NodeId) -> Option<&HierarchyNode> {
        self.index.get(&id).map(|&i| &self.nodes[i])
    }

    /// Node whose cut contains `v`.
    pub fn vertex_node(&self, v: Vertex) -> NodeId {
        self.vertex_node[v as usize]
    }

    /// Rank of `v` within its node's cut.
    pub fn vertex_pos(&self, v: Vertex) -> usize {
        self.vertex_pos[v as usize] as usize
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        self.nodes.iter().map(|n| n.id.level()).max().unwrap_or(0)
    }

    pub fn max_cut(&self) -> usize {
        self.nodes.iter().map(|n| n.cut.len()).max().unwrap_or(0)
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.left.is_none() && n.right.is_none()).count()
    }

    /// Ancestors of the node holding `v`, from the root down to that node.
    pub fn path_to(&self, v: Vertex) -> impl Iterator<Item = &HierarchyNode> + '_ {
        let id = self.vertex_node(v);
        (0..=id.level()).map(move |l| &self.nodes[self.index[&id.prefix(l)]])
    }
}
