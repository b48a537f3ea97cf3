//! Embedding hypertrees into linear 3-graphs.
//!
//! The building blocks are independent of each other and are used by the
//! staged pipeline in [`pipeline`]:
//!
//! - [`greedy`]: edge-by-edge embedding along an attachment order;
//! - [`stars`]: vertex-disjoint stars of prescribed sizes with augmenting
//!   switches;
//! - [`nibble`]: semi-random near-perfect matchings in 3-graphs;
//! - [`matching`]: extending a vertex set by a matching into a host set;
//! - [`paths`]: internally disjoint length-3 paths between two vertices.

pub mod greedy;
pub mod matching;
pub mod nibble;
pub mod paths;
pub mod pipeline;
pub mod stars;

use std::fmt;

use crate::hypertree::Hypertree;
use crate::sts::{LinearThreeGraph, Triple, Vertex};
use crate::vset::VertexSet;

pub use greedy::{greedy_embed, greedy_embed_random, GreedyError};
pub use matching::{extend_by_matching, MatchEdge, MatchingConfig, MatchingError};
pub use nibble::{nibble_matching, NibbleInstance};
pub use paths::find_disjoint_paths;
pub use pipeline::{
    embed_hypertree, EmbedError, EventReport, PipelineConfig, PipelineOutcome, ReservoirRule,
    StageTelemetry,
};
pub use stars::{embed_stars, AugmentState, EmbeddedStar, StarError, StarRequest};

/// A partial map from tree vertices to host vertices.
///
/// Built through [`Embedding::assign`] it stays injective; [`Embedding::from_map`]
/// accepts arbitrary maps (for checking files), which [`verify_embedding`]
/// then judges.
#[derive(Clone, PartialEq, Eq)]
pub struct Embedding {
    forward: Vec<Option<Vertex>>,
    inverse: Vec<Option<Vertex>>,
    used: VertexSet,
}

impl fmt::Debug for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.pairs()).finish()
    }
}

impl Embedding {
    pub fn new(tree_n: usize, host_n: usize) -> Self {
        Embedding {
            forward: vec![None; tree_n],
            inverse: vec![None; host_n],
            used: VertexSet::new(host_n),
        }
    }

    /// Wraps an arbitrary map; out-of-range images are kept as given and
    /// reported by [`verify_embedding`].
    pub fn from_map(forward: Vec<Option<Vertex>>, host_n: usize) -> Self {
        let mut inverse = vec![None; host_n];
        let mut used = VertexSet::new(host_n);
        for (t, g) in forward.iter().enumerate() {
            if let Some(g) = *g {
                if (g as usize) < host_n {
                    inverse[g as usize] = Some(t as Vertex);
                    used.insert(g);
                }
            }
        }
        Embedding {
            forward,
            inverse,
            used,
        }
    }

    pub fn tree_n(&self) -> usize {
        self.forward.len()
    }

    pub fn host_n(&self) -> usize {
        self.inverse.len()
    }

    /// Maps `t` to `g`. Both must be unassigned.
    pub fn assign(&mut self, t: Vertex, g: Vertex) {
        assert!(self.forward[t as usize].is_none(), "tree vertex {t} already mapped");
        assert!(self.inverse[g as usize].is_none(), "host vertex {g} already used");
        self.forward[t as usize] = Some(g);
        self.inverse[g as usize] = Some(t);
        self.used.insert(g);
    }

    #[inline]
    pub fn get(&self, t: Vertex) -> Option<Vertex> {
        self.forward.get(t as usize).copied().flatten()
    }

    /// Image of a tree vertex that must already be mapped.
    #[inline]
    pub fn image(&self, t: Vertex) -> Vertex {
        self.get(t).expect("tree vertex is mapped")
    }

    pub fn preimage(&self, g: Vertex) -> Option<Vertex> {
        self.inverse.get(g as usize).copied().flatten()
    }

    #[inline]
    pub fn is_used(&self, g: Vertex) -> bool {
        self.used.contains(g)
    }

    pub fn used(&self) -> &VertexSet {
        &self.used
    }

    pub fn len(&self) -> usize {
        self.forward.iter().filter(|m| m.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_complete(&self) -> bool {
        self.forward.iter().all(Option::is_some)
    }

    /// `(tree vertex, host vertex)` pairs in tree-vertex order.
    pub fn pairs(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.forward
            .iter()
            .enumerate()
            .filter_map(|(t, g)| g.map(|g| (t as Vertex, g)))
    }

    pub fn forward(&self) -> &[Option<Vertex>] {
        &self.forward
    }
}

/// Problems found by [`verify_embedding`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmbeddingReport {
    pub size_mismatch: Option<(usize, usize)>,
    pub unmapped: Vec<Vertex>,
    pub out_of_range: Vec<(Vertex, Vertex)>,
    /// `(t1, t2, g)` with `t1 < t2` both sent to `g`.
    pub collisions: Vec<(Vertex, Vertex, Vertex)>,
    /// Tree edges (by id) whose image is not a host edge, with the image.
    pub non_edges: Vec<(usize, Triple)>,
}

impl EmbeddingReport {
    pub fn is_valid(&self) -> bool {
        self.size_mismatch.is_none()
            && self.unmapped.is_empty()
            && self.out_of_range.is_empty()
            && self.collisions.is_empty()
            && self.non_edges.is_empty()
    }
}

impl fmt::Display for EmbeddingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return f.write_str("valid embedding");
        }
        if let Some((got, want)) = self.size_mismatch {
            writeln!(f, "map covers {got} tree vertices, tree has {want}")?;
        }
        for v in &self.unmapped {
            writeln!(f, "tree vertex {v} is unmapped")?;
        }
        for (t, g) in &self.out_of_range {
            writeln!(f, "tree vertex {t} maps to out-of-range host vertex {g}")?;
        }
        for (a, b, g) in &self.collisions {
            writeln!(f, "injectivity violation: tree vertices {a} and {b} both map to {g}")?;
        }
        for (id, [a, b, c]) in &self.non_edges {
            writeln!(f, "tree edge {id} maps to non-edge {{{a}, {b}, {c}}}")?;
        }
        Ok(())
    }
}

/// Checks that `phi` is an injective map of all of `t` into `g` sending
/// every tree edge to a host edge.
pub fn verify_embedding(g: &LinearThreeGraph, t: &Hypertree, phi: &Embedding) -> EmbeddingReport {
    let mut report = EmbeddingReport::default();
    if phi.tree_n() != t.n() {
        report.size_mismatch = Some((phi.tree_n(), t.n()));
    }
    let mut owner: Vec<Option<Vertex>> = vec![None; g.n()];
    for tv in 0..t.n() as Vertex {
        match phi.get(tv) {
            None => report.unmapped.push(tv),
            Some(gv) if gv as usize >= g.n() => report.out_of_range.push((tv, gv)),
            Some(gv) => match owner[gv as usize] {
                Some(prev) => report.collisions.push((prev, tv, gv)),
                None => owner[gv as usize] = Some(tv),
            },
        }
    }
    for (id, e) in t.edges().iter().enumerate() {
        let img: Option<Vec<Vertex>> = e.iter().map(|&v| phi.get(v)).collect();
        let Some(img) = img else { continue };
        if img.iter().any(|&v| v as usize >= g.n()) {
            continue;
        }
        if !g.has_edge(img[0], img[1], img[2]) {
            report.non_edges.push((id, [img[0], img[1], img[2]]));
        }
    }
    report
}

/// Maps the two new vertices of tree edge `edge` (all but `attach`) onto the
/// two host vertices `x, y`.
pub(crate) fn assign_pendant(
    phi: &mut Embedding,
    t: &Hypertree,
    edge: usize,
    attach: Vertex,
    x: Vertex,
    y: Vertex,
) {
    let mut new = t.edge(edge).into_iter().filter(|&v| v != attach);
    let (a, b) = (new.next().expect("edge has 3 vertices"), new.next().expect("edge has 3 vertices"));
    phi.assign(a, x);
    phi.assign(b, y);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypertree::validate_hypertree;
    use crate::sts::fano;

    #[test]
    fn verify_examples() {
        let g = fano();
        let t = validate_hypertree(&[[0, 1, 2], [2, 3, 4]]).unwrap();
        // identity on the sub-hypertree {0,1,2}, {2,3,6} relabeled
        let phi = Embedding::from_map(vec![Some(0), Some(1), Some(2), Some(3), Some(6)], 7);
        assert!(verify_embedding(g.graph(), &t, &phi).is_valid());

        let phi = Embedding::from_map(vec![Some(0), Some(1), Some(2), Some(3), Some(3)], 7);
        let r = verify_embedding(g.graph(), &t, &phi);
        assert_eq!(r.collisions, vec![(3, 4, 3)]);

        let phi = Embedding::from_map(vec![Some(0), Some(1), Some(2), Some(3), Some(4)], 7);
        let r = verify_embedding(g.graph(), &t, &phi);
        assert_eq!(r.non_edges, vec![(1, [2, 3, 4])]);
        assert!(r.to_string().contains("non-edge"));
    }
}
