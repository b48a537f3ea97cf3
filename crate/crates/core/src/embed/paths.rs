//! Internally disjoint length-3 paths between two fixed vertices.
//!
//! A path `u x1 y1 x2 y2 x3 v` uses the edges `{u, x1, y1}`, `{y1, x2, y2}`
//! and `{y2, x3, v}`. Candidates for the first edge come from the edges
//! through `u`, for the last from the edges through `v`; the middle edge is
//! the one through `y1` and `y2`, determined by pair completion.

use crate::sts::{LinearThreeGraph, Vertex};
use crate::vset::VertexSet;

/// Greedily collects up to `k` `u`–`v` paths of length 3 whose internal
/// vertices lie in `x ∖ used` and are pairwise disjoint. Each path is
/// returned as its seven vertices in order.
pub fn find_disjoint_paths(
    g: &LinearThreeGraph,
    u: Vertex,
    v: Vertex,
    x: &VertexSet,
    k: usize,
    used: &VertexSet,
) -> Vec<[Vertex; 7]> {
    assert_ne!(u, v, "path ends must differ");
    let mut taken = VertexSet::new(g.n());
    let ok = |w: Vertex, taken: &VertexSet| {
        w != u && w != v && x.contains(w) && !used.contains(w) && !taken.contains(w)
    };
    let ends = |c: Vertex, other: Vertex| -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::new();
        for &id in g.edges_through(c) {
            let e = g.edge(id as usize);
            if e.contains(&other) {
                continue;
            }
            let mut o = e.into_iter().filter(|&w| w != c);
            let (p, q) = (o.next().unwrap(), o.next().unwrap());
            out.push((p, q));
            out.push((q, p));
        }
        out
    };
    // (x1, y1): y1 is the junction with the middle edge
    let first = ends(u, v);
    // (x3, y2) keyed by y2
    let mut last_by_junction: Vec<Option<Vertex>> = vec![None; g.n()];
    for (x3, y2) in ends(v, u) {
        last_by_junction[y2 as usize] = Some(x3);
    }

    let mut paths = Vec::new();
    'search: while paths.len() < k {
        for &(x1, y1) in &first {
            if !ok(x1, &taken) || !ok(y1, &taken) {
                continue;
            }
            for &id in g.edges_through(y1) {
                let e = g.edge(id as usize);
                for (x2, y2) in [(e[0], e[1]), (e[1], e[0]), (e[0], e[2]), (e[2], e[0]), (e[1], e[2]), (e[2], e[1])] {
                    if x2 == y1 || y2 == y1 {
                        continue;
                    }
                    let Some(x3) = last_by_junction[y2 as usize] else { continue };
                    let inner = [x1, y1, x2, y2, x3];
                    if !inner.iter().all(|&w| ok(w, &taken)) {
                        continue;
                    }
                    if (0..5).any(|i| (i + 1..5).any(|j| inner[i] == inner[j])) {
                        continue;
                    }
                    for &w in &inner {
                        taken.insert(w);
                    }
                    paths.push([u, x1, y1, x2, y2, x3, v]);
                    continue 'search;
                }
            }
        }
        break;
    }
    for p in &paths {
        debug_assert!(g.has_edge(p[0], p[1], p[2]) && g.has_edge(p[2], p[3], p[4]) && g.has_edge(p[4], p[5], p[6]));
    }
    paths
}
