//! Distance-preserving shortcuts for the two halves of a cut.
//!
//! When a part `P` is split off, shortest paths between its vertices may run
//! through the cut. Those paths enter and leave `P` at border vertices, so it
//! is enough to add edges between border vertices wherever the path through
//! the cut is strictly shorter than any path inside `P`.

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{dijkstra, Distance, Graph, Vertex, Weight, INFINITY};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Shortcut {
    pub a: Vertex,
    pub b: Vertex,
    pub weight: Weight,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ShortcutError {
    #[error("shortcut {a}-{b} of length {distance} does not fit a 32-bit weight")]
    WeightOverflow { a: Vertex, b: Vertex, distance: Distance },
}

/// Vertices of `part` with a neighbor in `cut`, ascending.
pub fn border_vertices(g: &Graph, cut: &[Vertex], part: &[Vertex]) -> Vec<Vertex> {
    let mut in_cut = vec![false; g.vertex_count()];
    for &c in cut {
        in_cut[c as usize] = true;
    }
    let mut border: Vec<Vertex> = part
        .iter()
        .copied()
        .filter(|&v| g.neighbors(v).any(|(w, _)| in_cut[w as usize]))
        .collect();
    border.sort_unstable();
    border
}

/// Shortcuts that make `G[part]` plus shortcuts distance-preserving with
/// respect to `g`.
///
/// `cut_distances[i]` holds the distances in `g` from the `i`-th cut vertex.
/// Returned shortcuts use ids of `g`, with `a < b`, in ascending order. Only
/// pairs not already split exactly by a third border vertex are emitted.
pub fn add_shortcuts(
    g: &Graph,
    cut_distances: &[&[Distance]],
    cut: &[Vertex],
    part: &[Vertex],
) -> Result<Vec<Shortcut>, ShortcutError> {
    let border = border_vertices(g, cut, part);
    let k = border.len();
    if k < 2 || cut_distances.is_empty() {
        return Ok(Vec::new());
    }
    let mut local = vec![Vertex::MAX; g.vertex_count()];
    for (i, &v) in part.iter().enumerate() {
        local[v as usize] = i as Vertex;
    }
    let sub = g.induced(part);
    let inside: Vec<Vec<Distance>> = border
        .par_iter()
        .map(|&b| {
            let dist = dijkstra(&sub, local[b as usize]);
            border.iter().map(|&x| dist[local[x as usize] as usize]).collect()
        })
        .collect();

    let mut whole = inside.clone();
    for i in 0..k {
        for j in 0..k {
            let (bi, bj) = (border[i] as usize, border[j] as usize);
            for dc in cut_distances {
                let (x, y) = (dc[bi], dc[bj]);
                if x != INFINITY && y != INFINITY && x + y < whole[i][j] {
                    whole[i][j] = x + y;
                }
            }
        }
    }

    let mut out = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let d = whole[i][j];
            if d >= inside[i][j] {
                continue;
            }
            let split = (0..k).any(|m| {
                m != i
                    && m != j
                    && whole[i][m] != INFINITY
                    && whole[m][j] != INFINITY
                    && whole[i][m] + whole[m][j] == d
            });
            if split {
                continue;
            }
            let (a, b) = (border[i], border[j]);
            let weight = Weight::try_from(d).map_err(|_| ShortcutError::WeightOverflow {
                a,
                b,
                distance: d,
            })?;
            out.push(Shortcut { a, b, weight });
        }
    }
    Ok(out)
}
