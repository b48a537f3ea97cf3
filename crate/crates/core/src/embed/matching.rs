//! Extending a vertex set by a matching into a host set.
//!
//! Given disjoint `A, X ⊆ V(G)`, find edges each meeting `A` in one vertex
//! and `X` in two, pairwise disjoint. `X` is split at random into `X_1, X_2`
//! and the nibble runs on the tripartite auxiliary hypergraph `G[A*, X_1, X_2]`
//! of edges with one vertex in each class. The result is completed greedily
//! in `G[A, X, X]` and improved by single exchanges.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use super::nibble::{nibble_matching_with, NibbleInstance, DEFAULT_GAMMA};
use crate::sts::{LinearThreeGraph, Vertex};
use crate::vset::VertexSet;

/// An edge `{a, x[0], x[1]}` with `a ∈ A` and both `x` in `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchEdge {
    pub a: Vertex,
    pub x: [Vertex; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchingConfig {
    pub eps: f64,
    /// Uncovered vertices of `A` tolerated before reporting a shortfall.
    pub shortfall: usize,
    /// Drop auxiliary vertices whose degree strays from their class mean by
    /// more than this fraction.
    pub prune_band: Option<f64>,
    /// Pad `A` with outside vertices up to this size before the nibble.
    pub pad_to: Option<usize>,
    pub gamma: f64,
}

impl Default for MatchingConfig {
    fn default() -> Self {
        MatchingConfig {
            eps: 0.1,
            shortfall: usize::MAX,
            prune_band: None,
            pad_to: None,
            gamma: DEFAULT_GAMMA,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("vertex {0} lies in both A and X")]
    Overlap(Vertex),
    #[error("{} vertices of A left uncovered", uncovered.len())]
    InsufficientCover {
        matching: Vec<MatchEdge>,
        uncovered: Vec<Vertex>,
    },
}

/// Matches vertices of `a` into `x`; see the module docs.
pub fn extend_by_matching<R: Rng + ?Sized>(
    g: &LinearThreeGraph,
    a: &VertexSet,
    x: &VertexSet,
    cfg: &MatchingConfig,
    rng: &mut R,
) -> Result<Vec<MatchEdge>, MatchingError> {
    if let Some(v) = a.iter().find(|&v| x.contains(v)) {
        return Err(MatchingError::Overlap(v));
    }
    let a_list = a.to_vec();
    if a_list.is_empty() {
        return Ok(Vec::new());
    }
    let x_list = x.to_vec();

    let mut a_star = a_list.clone();
    if let Some(target) = cfg.pad_to {
        let mut outside: Vec<Vertex> = (0..g.n() as Vertex)
            .filter(|&v| !a.contains(v) && !x.contains(v))
            .collect();
        outside.shuffle(rng);
        a_star.extend(outside.into_iter().take(target.saturating_sub(a_list.len())));
    }

    // random split of X
    let mut side = vec![0u8; g.n()];
    for &v in &x_list {
        side[v as usize] = if rng.gen_bool(0.5) { 1 } else { 2 };
    }

    // local ids: A* first, then X
    let mut local = vec![u32::MAX; g.n()];
    let mut global: Vec<Vertex> = Vec::with_capacity(a_star.len() + x_list.len());
    for &v in a_star.iter().chain(&x_list) {
        local[v as usize] = global.len() as u32;
        global.push(v);
    }
    let mut edges: Vec<[u32; 3]> = Vec::new();
    for &av in &a_star {
        for &id in g.edges_through(av) {
            let e = g.edge(id as usize);
            let mut o = e.into_iter().filter(|&v| v != av);
            let (p, q) = (o.next().unwrap(), o.next().unwrap());
            let (sp, sq) = (side[p as usize], side[q as usize]);
            if sp != 0 && sq != 0 && sp != sq {
                edges.push([local[av as usize], local[p as usize], local[q as usize]]);
            }
        }
    }
    if let Some(band) = cfg.prune_band {
        edges = prune(&edges, global.len(), a_star.len(), &side, &global, band);
    }

    let h = NibbleInstance::new(global.len(), edges).with_gamma(cfg.gamma);
    let picked = nibble_matching_with(&h, cfg.eps, rng);

    let mut owner: Vec<Option<Vertex>> = vec![None; g.n()];
    let mut pair_of: Vec<Option<[Vertex; 2]>> = vec![None; g.n()];
    for id in picked {
        let [la, lp, lq] = h.edges()[id];
        let (av, p, q) = (global[la as usize], global[lp as usize], global[lq as usize]);
        if !a.contains(av) {
            continue;
        }
        pair_of[av as usize] = Some([p, q]);
        owner[p as usize] = Some(av);
        owner[q as usize] = Some(av);
    }

    let free = |v: Vertex, owner: &[Option<Vertex>]| x.contains(v) && owner[v as usize].is_none();
    let find_free = |av: Vertex, owner: &[Option<Vertex>], skip: &[Vertex]| {
        g.edges_through(av).iter().find_map(|&id| {
            let mut o = g.edge(id as usize).into_iter().filter(|&v| v != av);
            let (p, q) = (o.next().unwrap(), o.next().unwrap());
            (free(p, owner) && free(q, owner) && !skip.contains(&p) && !skip.contains(&q)).then_some([p, q])
        })
    };

    // greedy completion
    for &av in &a_list {
        if pair_of[av as usize].is_none() {
            if let Some([p, q]) = find_free(av, &owner, &[]) {
                pair_of[av as usize] = Some([p, q]);
                owner[p as usize] = Some(av);
                owner[q as usize] = Some(av);
            }
        }
    }

    // exchanges: displace one matched vertex of A onto another free edge
    for &av in &a_list {
        if pair_of[av as usize].is_some() {
            continue;
        }
        for &id in g.edges_through(av) {
            let mut o = g.edge(id as usize).into_iter().filter(|&v| v != av);
            let (p, q) = (o.next().unwrap(), o.next().unwrap());
            if !x.contains(p) || !x.contains(q) {
                continue;
            }
            let blockers: Vec<Vertex> = [p, q].iter().filter_map(|&v| owner[v as usize]).collect();
            if blockers.len() != 1 {
                continue;
            }
            let b = blockers[0];
            let old = pair_of[b as usize].expect("blocker is matched");
            for v in old {
                owner[v as usize] = None;
            }
            match find_free(b, &owner, &[p, q]) {
                Some(new) => {
                    pair_of[b as usize] = Some(new);
                    for v in new {
                        owner[v as usize] = Some(b);
                    }
                    pair_of[av as usize] = Some([p, q]);
                    owner[p as usize] = Some(av);
                    owner[q as usize] = Some(av);
                    break;
                }
                None => {
                    for v in old {
                        owner[v as usize] = Some(b);
                    }
                }
            }
        }
    }

    let mut matching = Vec::new();
    let mut uncovered = Vec::new();
    let mut seen = VertexSet::new(g.n());
    for &av in &a_list {
        match pair_of[av as usize] {
            Some(pair) => {
                assert!(g.has_edge(av, pair[0], pair[1]));
                assert!(x.contains(pair[0]) && x.contains(pair[1]) && !x.contains(av));
                assert!(seen.insert(pair[0]) && seen.insert(pair[1]), "matching edges are disjoint");
                matching.push(MatchEdge { a: av, x: pair });
            }
            None => uncovered.push(av),
        }
    }
    if uncovered.len() > cfg.shortfall {
        return Err(MatchingError::InsufficientCover { matching, uncovered });
    }
    Ok(matching)
}

/// Removes edges touching vertices whose degree leaves the band around the
/// mean degree of their class (`A*`, `X_1`, `X_2`).
fn prune(
    edges: &[[u32; 3]],
    n_local: usize,
    a_len: usize,
    side: &[u8],
    global: &[Vertex],
    band: f64,
) -> Vec<[u32; 3]> {
    let mut deg = vec![0usize; n_local];
    for e in edges {
        for &v in e {
            deg[v as usize] += 1;
        }
    }
    let class = |v: usize| if v < a_len { 0 } else { side[global[v] as usize] as usize };
    let mut sum = [0usize; 3];
    let mut cnt = [0usize; 3];
    for v in 0..n_local {
        sum[class(v)] += deg[v];
        cnt[class(v)] += 1;
    }
    let keep: Vec<bool> = (0..n_local)
        .map(|v| {
            let c = class(v);
            let mean = sum[c] as f64 / cnt[c].max(1) as f64;
            (deg[v] as f64 - mean).abs() <= band * mean
        })
        .collect();
    edges
        .iter()
        .filter(|e| e.iter().all(|&v| keep[v as usize]))
        .copied()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{sample_subset_with, SingletonPairPartition};
    use crate::sts::hill_climb_random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_a() {
        let g = hill_climb_random(15, 1, 1_000_000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = extend_by_matching(
            g.graph(),
            &VertexSet::new(15),
            &VertexSet::full(15),
            &MatchingConfig::default(),
            &mut rng,
        )
        .unwrap();
        assert!(m.is_empty());
    }

    #[test]
    fn overlap_rejected() {
        let g = hill_climb_random(15, 1, 1_000_000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let a = VertexSet::from_vertices(15, [3]);
        let r = extend_by_matching(g.graph(), &a, &VertexSet::full(15), &MatchingConfig::default(), &mut rng);
        assert_eq!(r, Err(MatchingError::Overlap(3)));
    }

    #[test]
    fn covers_most_of_a() {
        let g = hill_climb_random(99, 7, 20_000_000).unwrap();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = VertexSet::from_vertices(99, 0..10);
            let mut x = sample_subset_with(&SingletonPairPartition::singletons(99), 0.5, &mut rng);
            x.difference_with(&a);
            let cfg = MatchingConfig {
                prune_band: Some(0.5),
                ..MatchingConfig::default()
            };
            let m = extend_by_matching(g.graph(), &a, &x, &cfg, &mut rng).unwrap();
            assert!(m.len() >= 8, "seed {seed}: {}", m.len());
            for e in &m {
                assert!(a.contains(e.a) && x.contains(e.x[0]) && x.contains(e.x[1]));
            }
        }
    }

    #[test]
    fn shortfall_carries_partial_matching() {
        let g = hill_climb_random(27, 2, 5_000_000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = VertexSet::from_vertices(27, 0..9);
        let x = VertexSet::from_vertices(27, 9..13);
        let cfg = MatchingConfig {
            shortfall: 0,
            ..MatchingConfig::default()
        };
        match extend_by_matching(g.graph(), &a, &x, &cfg, &mut rng) {
            Err(MatchingError::InsufficientCover { matching, uncovered }) => {
                assert!(matching.len() <= 2);
                assert_eq!(matching.len() + uncovered.len(), 9);
            }
            other => panic!("expected a shortfall, got {other:?}"),
        }
    }
}
