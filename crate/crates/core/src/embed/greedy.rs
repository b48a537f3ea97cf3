//! Greedy edge-by-edge embedding of small trees.
//!
//! A linear 3-graph with minimum degree `δ` contains every hypertree on fewer
//! than `δ/2` vertices, and the greedy procedure finds it: when attaching an
//! edge at an embedded vertex `a`, each used vertex other than `a` blocks at
//! most one of the edges through `a`.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use super::Embedding;
use crate::hypertree::Hypertree;
use crate::split::BaseStage;
use crate::sts::{LinearThreeGraph, Vertex};
use crate::vset::VertexSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GreedyError {
    #[error("no free host edge for tree edge {edge} (step {step})")]
    Stuck { step: usize, edge: usize },
    #[error("no free host vertex for isolated tree vertex {0}")]
    NoFreeVertex(Vertex),
}

/// One step of an attachment order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Step {
    /// Start a component with this tree edge.
    Root(usize),
    /// Hang this tree edge on an already embedded tree vertex.
    Attach(usize, Vertex),
    /// An isolated tree vertex.
    Lone(Vertex),
}

fn allowed(phi: &Embedding, forbidden: &VertexSet, v: Vertex) -> bool {
    !phi.is_used(v) && !forbidden.contains(v)
}

/// Runs `steps`, picking host edges deterministically (lowest index) or
/// uniformly at random among the candidates.
pub(crate) fn run_steps<R: Rng + ?Sized>(
    g: &LinearThreeGraph,
    t: &Hypertree,
    steps: &[Step],
    phi: &mut Embedding,
    forbidden: &VertexSet,
    mut rng: Option<&mut R>,
) -> Result<(), GreedyError> {
    let mut candidates: Vec<usize> = Vec::new();
    for (i, &step) in steps.iter().enumerate() {
        match step {
            Step::Root(edge) => {
                let ok = |id: usize| g.edge(id).iter().all(|&v| allowed(phi, forbidden, v));
                let chosen = match rng.as_deref_mut() {
                    None => (0..g.num_edges()).find(|&id| ok(id)),
                    Some(rng) => {
                        // rejection sampling first; fall back to a scan
                        let mut pick = None;
                        for _ in 0..64 {
                            let id = rng.gen_range(0..g.num_edges().max(1));
                            if g.num_edges() > 0 && ok(id) {
                                pick = Some(id);
                                break;
                            }
                        }
                        pick.or_else(|| {
                            candidates.clear();
                            candidates.extend((0..g.num_edges()).filter(|&id| ok(id)));
                            candidates.choose(rng).copied()
                        })
                    }
                };
                let id = chosen.ok_or(GreedyError::Stuck { step: i, edge })?;
                let mut img = g.edge(id);
                if let Some(rng) = rng.as_deref_mut() {
                    img.shuffle(rng);
                }
                for (&tv, &gv) in t.edge(edge).iter().zip(&img) {
                    phi.assign(tv, gv);
                }
            }
            Step::Attach(edge, attach) => {
                let a = phi.image(attach);
                candidates.clear();
                for &id in g.edges_through(a) {
                    let e = g.edge(id as usize);
                    if e.iter().all(|&v| v == a || allowed(phi, forbidden, v)) {
                        candidates.push(id as usize);
                        if rng.is_none() {
                            break;
                        }
                    }
                }
                let id = match rng.as_deref_mut() {
                    None => candidates.first().copied(),
                    Some(rng) => candidates.choose(rng).copied(),
                }
                .ok_or(GreedyError::Stuck { step: i, edge })?;
                let mut others: Vec<Vertex> = g.edge(id).into_iter().filter(|&v| v != a).collect();
                if let Some(rng) = rng.as_deref_mut() {
                    others.shuffle(rng);
                }
                super::assign_pendant(phi, t, edge, attach, others[0], others[1]);
            }
            Step::Lone(v) => {
                let free = |x: Vertex| allowed(phi, forbidden, x);
                let chosen = match rng.as_deref_mut() {
                    None => (0..g.n() as Vertex).find(|&x| free(x)),
                    Some(rng) => {
                        let pool: Vec<Vertex> = (0..g.n() as Vertex).filter(|&x| free(x)).collect();
                        pool.choose(rng).copied()
                    }
                };
                phi.assign(v, chosen.ok_or(GreedyError::NoFreeVertex(v))?);
            }
        }
    }
    Ok(())
}

fn tree_steps(t: &Hypertree) -> Vec<Step> {
    if t.num_edges() == 0 {
        return (0..t.n() as Vertex).map(Step::Lone).collect();
    }
    t.attachments()
        .enumerate()
        .map(|(i, (e, v))| if i == 0 { Step::Root(e) } else { Step::Attach(e, v) })
        .collect()
}

/// Attachment steps for a base forest: each component is started at its
/// lowest edge id and grown breadth-first; isolated vertices come last.
pub(crate) fn forest_steps(t: &Hypertree, base: &BaseStage) -> Vec<Step> {
    let g = t.graph();
    let mut in_base = vec![false; t.num_edges()];
    for &e in &base.edges {
        in_base[e] = true;
    }
    let mut done = vec![false; t.num_edges()];
    let mut covered = vec![false; t.n()];
    let mut steps = Vec::new();
    let mut edges = base.edges.clone();
    edges.sort_unstable();
    for &start in &edges {
        if done[start] {
            continue;
        }
        done[start] = true;
        steps.push(Step::Root(start));
        let mut queue = std::collections::VecDeque::new();
        for &v in &g.edge(start) {
            covered[v as usize] = true;
            queue.push_back(v);
        }
        while let Some(v) = queue.pop_front() {
            for &id in g.edges_through(v) {
                let id = id as usize;
                if !in_base[id] || done[id] {
                    continue;
                }
                done[id] = true;
                steps.push(Step::Attach(id, v));
                for &w in &g.edge(id) {
                    if !covered[w as usize] {
                        covered[w as usize] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    for &v in &base.vertices {
        if !covered[v as usize] {
            steps.push(Step::Lone(v));
        }
    }
    steps
}

/// Embeds `t` along its build order, always taking the lowest-index host edge
/// that avoids used and `forbidden` vertices.
pub fn greedy_embed(
    g: &LinearThreeGraph,
    t: &Hypertree,
    forbidden: &VertexSet,
) -> Result<Embedding, GreedyError> {
    let mut phi = Embedding::new(t.n(), g.n());
    run_steps::<rand_chacha::ChaCha8Rng>(g, t, &tree_steps(t), &mut phi, forbidden, None)?;
    Ok(phi)
}

/// As [`greedy_embed`], choosing uniformly among the available host edges.
pub fn greedy_embed_random<R: Rng + ?Sized>(
    g: &LinearThreeGraph,
    t: &Hypertree,
    forbidden: &VertexSet,
    rng: &mut R,
) -> Result<Embedding, GreedyError> {
    let mut phi = Embedding::new(t.n(), g.n());
    run_steps(g, t, &tree_steps(t), &mut phi, forbidden, Some(rng))?;
    Ok(phi)
}

/// Embeds the base forest of a split plan into `g`, avoiding `forbidden`.
/// The returned map is indexed by the labels of the whole tree `t`.
pub fn embed_base_forest<R: Rng + ?Sized>(
    g: &LinearThreeGraph,
    t: &Hypertree,
    base: &BaseStage,
    forbidden: &VertexSet,
    rng: &mut R,
) -> Result<Embedding, GreedyError> {
    let mut phi = Embedding::new(t.n(), g.n());
    run_steps(g, t, &forest_steps(t, base), &mut phi, forbidden, Some(rng))?;
    Ok(phi)
}
