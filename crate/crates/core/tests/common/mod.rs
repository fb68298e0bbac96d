//! Test graphs and independent reference algorithms.
#![allow(dead_code)]

use std::collections::VecDeque;

use hc2l::{Distance, Graph, Vertex, Weight, INFINITY};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Named {
    pub name: String,
    pub graph: Graph,
}

/// Spanning tree on a random permutation plus extra random edges.
pub fn random_connected(n: usize, extra: usize, max_weight: Weight, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<Vertex> = (0..n as Vertex).collect();
    order.shuffle(&mut rng);
    let mut edges = Vec::new();
    for i in 1..n {
        let parent = order[rng.random_range(0..i)];
        edges.push((order[i], parent, rng.random_range(1..=max_weight)));
    }
    for _ in 0..extra {
        let u = rng.random_range(0..n as Vertex);
        let v = rng.random_range(0..n as Vertex);
        edges.push((u, v, rng.random_range(1..=max_weight)));
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Grid with random weights and some edges dropped, kept connected by a
/// spanning tree of the full grid.
pub fn road_like(side: usize, drop: f64, max_weight: Weight, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = side * side;
    let id = |r: usize, c: usize| (r * side + c) as Vertex;
    let mut all = Vec::new();
    for r in 0..side {
        for c in 0..side {
            if c + 1 < side {
                all.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < side {
                all.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    all.shuffle(&mut rng);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut edges = Vec::new();
    for (u, v) in all {
        let (a, b) = (find(&mut parent, u as usize), find(&mut parent, v as usize));
        let keep = if a != b {
            parent[a] = b;
            true
        } else {
            !rng.random_bool(drop)
        };
        if keep {
            edges.push((u, v, rng.random_range(1..=max_weight)));
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

pub fn unit_grid(side: usize) -> Graph {
    let mut edges = Vec::new();
    for r in 0..side {
        for c in 0..side {
            let v = (r * side + c) as Vertex;
            if c + 1 < side {
                edges.push((v, v + 1, 1));
            }
            if r + 1 < side {
                edges.push((v, v + side as Vertex, 1));
            }
        }
    }
    Graph::from_edges(side * side, edges).unwrap()
}

pub fn random_tree(n: usize, max_weight: Weight, seed: u64) -> Graph {
    random_connected(n, 0, max_weight, seed)
}

/// A cycle-rich core with trees of various depths hanging off it.
pub fn fringed(core: usize, fringe: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = random_connected(core, core / 2, 100, seed ^ 0x5eed);
    let mut edges: Vec<(Vertex, Vertex, Weight)> = base.edges().collect();
    for i in 0..fringe {
        let v = (core + i) as Vertex;
        let attach = rng.random_range(0..v);
        edges.push((v, attach, rng.random_range(1..=100)));
    }
    Graph::from_edges(core + fringe, edges).unwrap()
}

/// The acceptance corpus: 32 random connected graphs, a 16×16 unit grid,
/// a tree and a fringed graph.
pub fn corpus() -> Vec<Named> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..16 {
        let n = rng.random_range(20..=300);
        let extra = n * rng.random_range(1..=5) / 10;
        out.push(Named {
            name: format!("random-{i}-n{n}"),
            graph: random_connected(n, extra, 1000, 100 + i),
        });
    }
    for i in 0..16 {
        let side = rng.random_range(5..=17);
        out.push(Named {
            name: format!("road-{i}-{side}x{side}"),
            graph: road_like(side, 0.3, 1000, 200 + i),
        });
    }
    out.push(Named {
        name: "grid-16x16".into(),
        graph: unit_grid(16),
    });
    out.push(Named {
        name: "tree-200".into(),
        graph: random_tree(200, 1000, 7),
    });
    out.push(Named {
        name: "fringed-120+80".into(),
        graph: fringed(120, 80, 11),
    });
    out
}

/// Bellman-Ford single-source distances.
pub fn bellman_ford(g: &Graph, source: Vertex) -> Vec<Distance> {
    let n = g.vertex_count();
    let mut dist = vec![INFINITY; n];
    dist[source as usize] = 0;
    let edges: Vec<_> = g.edges().collect();
    for _ in 0..n {
        let mut changed = false;
        for &(u, v, w) in &edges {
            for (a, b) in [(u, v), (v, u)] {
                let da = dist[a as usize];
                if da != INFINITY && da + (w as Distance) < dist[b as usize] {
                    dist[b as usize] = da + w as Distance;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

/// Floyd-Warshall all-pairs distances.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<Distance>> {
    let n = g.vertex_count();
    let mut d = vec![vec![INFINITY; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0;
    }
    for (u, v, w) in g.edges() {
        let w = w as Distance;
        d[u as usize][v as usize] = d[u as usize][v as usize].min(w);
        d[v as usize][u as usize] = d[v as usize][u as usize].min(w);
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i][k];
            if dik == INFINITY {
                continue;
            }
            for j in 0..n {
                let dkj = d[k][j];
                if dkj != INFINITY && dik + dkj < d[i][j] {
                    d[i][j] = dik + dkj;
                }
            }
        }
    }
    d
}

/// Whether `blocked` separates every source from every sink.
pub fn separates(g: &Graph, blocked: &[bool], sources: &[Vertex], sinks: &[Vertex]) -> bool {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &s in sources {
        if !blocked[s as usize] && !seen[s as usize] {
            seen[s as usize] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for (w, _) in g.neighbors(v) {
            if !blocked[w as usize] && !seen[w as usize] {
                seen[w as usize] = true;
                queue.push_back(w);
            }
        }
    }
    sinks.iter().all(|&t| !seen[t as usize])
}

/// Smallest vertex set (possibly containing terminals) separating the
/// sources from the sinks, by enumerating subsets in order of size.
pub fn brute_force_vertex_cut(g: &Graph, sources: &[Vertex], sinks: &[Vertex]) -> usize {
    let n = g.vertex_count();
    assert!(n <= 20);
    let mut best = n;
    for mask in 0u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size >= best {
            continue;
        }
        let blocked: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        if separates(g, &blocked, sources, sinks) {
            best = size;
        }
    }
    best
}

/// Maximum number of internally vertex-disjoint source-to-sink paths by
/// plain augmenting paths on a dense node-split matrix.
pub fn disjoint_paths(g: &Graph, sources: &[Vertex], sinks: &[Vertex]) -> usize {
    let n = g.vertex_count();
    let size = 2 * n + 2;
    let (s, t) = (2 * n, 2 * n + 1);
    let big = n as i64 + 1;
    let mut cap = vec![vec![0i64; size]; size];
    for v in 0..n {
        cap[2 * v][2 * v + 1] = 1;
    }
    for (u, v, _) in g.edges() {
        let (u, v) = (u as usize, v as usize);
        cap[2 * u + 1][2 * v] = big;
        cap[2 * v + 1][2 * u] = big;
    }
    for &v in sources {
        cap[s][2 * v as usize] = big;
    }
    for &v in sinks {
        cap[2 * v as usize + 1][t] = big;
    }
    let mut flow = 0;
    loop {
        let mut prev = vec![usize::MAX; size];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for y in 0..size {
                if cap[x][y] > 0 && prev[y] == usize::MAX {
                    prev[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if prev[t] == usize::MAX {
            return flow;
        }
        let mut y = t;
        while y != s {
            let x = prev[y];
            cap[x][y] -= 1;
            cap[y][x] += 1;
            y = x;
        }
        flow += 1;
    }
}

/// The 16-vertex example network used for the ranking and labelling
/// walkthrough. Vertex `k` (1-based in the walkthrough) is id `k − 1`.
pub fn example_network() -> Graph {
    let edges = [
        (1, 7),
        (1, 14),
        (14, 7),
        (7, 9),
        (9, 8),
        (2, 3),
        (3, 9),
        (1, 12),
        (8, 12),
        (7, 5),
        (2, 16),
        (5, 16),
        (16, 15),
        (5, 15),
        (5, 13),
        (13, 10),
        (10, 12),
        (15, 6),
        (6, 10),
        (6, 13),
        (6, 11),
        (11, 4),
        (4, 13),
    ];
    Graph::from_edges(16, edges.iter().map(|&(u, v)| (u - 1, v - 1, 1))).unwrap()
}

pub fn ids(one_based: &[u32]) -> Vec<Vertex> {
    one_based.iter().map(|v| v - 1).collect()
}
