//! Hypertrees: validation, random generation and structural queries.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::sts::{sorted_triple, validate_linear, LinearThreeGraph, LinearityReport, Triple, Vertex};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HypertreeError {
    #[error("a hypertree needs at least one edge")]
    Empty,
    #[error("edge list is not linear: {0}")]
    NotLinear(LinearityReport),
    #[error("disconnected: {reached} of {total} vertices reachable from edge 0")]
    Disconnected { reached: usize, total: usize },
    #[error("{vertices} vertices but {edges} edges (expected 2|E|+1 vertices)")]
    VertexCount { vertices: usize, edges: usize },
    #[error("edge {edge} closes a cycle; no attachment order exists")]
    NoAttachmentOrder { edge: usize },
}

/// A hypertree on vertices `0..n` with `n = 2|E| + 1`, together with an
/// attachment order: every edge after the first meets the union of the
/// previous edges in exactly one vertex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Hypertree {
    graph: LinearThreeGraph,
    build_order: Vec<u32>,
    /// `attach[i]` is the vertex through which `build_order[i]` joins the
    /// earlier edges; `attach[0]` is the lowest vertex of the first edge.
    attach: Vec<Vertex>,
}

/// Validates `edges` as a hypertree on `0..=max label`.
pub fn validate_hypertree(edges: &[Triple]) -> Result<Hypertree, HypertreeError> {
    let n = edges
        .iter()
        .flat_map(|e| e.iter())
        .map(|&v| v as usize + 1)
        .max()
        .unwrap_or(0);
    validate_hypertree_on(n, edges)
}

/// Validates `edges` as a hypertree whose vertex set is exactly `0..n`.
pub fn validate_hypertree_on(n: usize, edges: &[Triple]) -> Result<Hypertree, HypertreeError> {
    if edges.is_empty() {
        return Err(HypertreeError::Empty);
    }
    let report = validate_linear(edges, n);
    if !report.is_valid() {
        return Err(HypertreeError::NotLinear(report));
    }
    let sorted: Vec<Triple> = edges.iter().map(|e| sorted_triple(e[0], e[1], e[2])).collect();
    let graph = LinearThreeGraph::from_valid(n, sorted);

    // BFS over edges from edge 0, attaching each newly reached edge
    let mut covered = vec![false; n];
    let mut visited = vec![false; graph.num_edges()];
    let mut build_order = Vec::with_capacity(graph.num_edges());
    let mut attach = Vec::with_capacity(graph.num_edges());
    let mut queue = VecDeque::new();
    let first = graph.edge(0);
    visited[0] = true;
    build_order.push(0);
    attach.push(first[0]);
    for &v in &first {
        covered[v as usize] = true;
        queue.push_back(v);
    }
    let mut cycle_edge = None;
    while let Some(v) = queue.pop_front() {
        for &id in graph.edges_through(v) {
            if visited[id as usize] {
                continue;
            }
            visited[id as usize] = true;
            let e = graph.edge(id as usize);
            for &w in &e {
                if w == v {
                    continue;
                }
                if covered[w as usize] {
                    cycle_edge.get_or_insert(id as usize);
                } else {
                    covered[w as usize] = true;
                    queue.push_back(w);
                }
            }
            build_order.push(id);
            attach.push(v);
        }
    }
    let reached = covered.iter().filter(|&&c| c).count();
    if reached < n {
        return Err(HypertreeError::Disconnected { reached, total: n });
    }
    if n != 2 * graph.num_edges() + 1 {
        return Err(HypertreeError::VertexCount {
            vertices: n,
            edges: graph.num_edges(),
        });
    }
    if let Some(edge) = cycle_edge {
        return Err(HypertreeError::NoAttachmentOrder { edge });
    }
    Ok(Hypertree {
        graph,
        build_order,
        attach,
    })
}

impl Hypertree {
    /// The tree consisting of the single vertex `0` and no edges.
    pub fn single_vertex() -> Self {
        Hypertree {
            graph: LinearThreeGraph::from_valid(1, Vec::new()),
            build_order: Vec::new(),
            attach: Vec::new(),
        }
    }

    pub fn graph(&self) -> &LinearThreeGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn num_edges(&self) -> usize {
        self.graph.num_edges()
    }

    pub fn edges(&self) -> &[Triple] {
        self.graph.edges()
    }

    pub fn edge(&self, id: usize) -> Triple {
        self.graph.edge(id)
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.graph.degree(v)
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n() as Vertex).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn build_order(&self) -> &[u32] {
        &self.build_order
    }

    /// `(edge, attachment vertex)` pairs in build order. The first entry's
    /// vertex is the lowest vertex of the first edge.
    pub fn attachments(&self) -> impl Iterator<Item = (usize, Vertex)> + '_ {
        self.build_order
            .iter()
            .zip(&self.attach)
            .map(|(&e, &v)| (e as usize, v))
    }

    /// Restricts the tree to the edge subset `edges` (which must form a
    /// subtree) and relabels its vertices densely. Returns the subtree and
    /// the original label of each new vertex.
    pub fn subtree(&self, edges: &[usize]) -> Result<(Hypertree, Vec<Vertex>), HypertreeError> {
        let mut label = vec![u32::MAX; self.n()];
        let mut original = Vec::new();
        let mut relabeled = Vec::with_capacity(edges.len());
        for &id in edges {
            let mut t = [0; 3];
            for (slot, &v) in t.iter_mut().zip(&self.edge(id)) {
                if label[v as usize] == u32::MAX {
                    label[v as usize] = original.len() as u32;
                    original.push(v);
                }
                *slot = label[v as usize];
            }
            relabeled.push(t);
        }
        let tree = validate_hypertree_on(original.len(), &relabeled)?;
        Ok((tree, original))
    }
}

/// Generator shape for [`random_hypertree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TreeShape {
    /// Each edge attaches at a uniformly random existing vertex.
    UniformAttach,
    /// Mostly attaches to a fresh vertex of the previous edge: long paths.
    PathBiased,
    /// Mostly reattaches at an earlier attachment vertex: high-degree hubs.
    StarBiased,
    /// A spine path with pendant edges hanging off spine vertices.
    Caterpillar,
}

impl TreeShape {
    pub const ALL: [TreeShape; 4] = [
        TreeShape::UniformAttach,
        TreeShape::PathBiased,
        TreeShape::StarBiased,
        TreeShape::Caterpillar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TreeShape::UniformAttach => "uniform-attach",
            TreeShape::PathBiased => "path-biased",
            TreeShape::StarBiased => "star-biased",
            TreeShape::Caterpillar => "caterpillar",
        }
    }
}

impl fmt::Display for TreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TreeShape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "uniform-attach" | "uniform" => Ok(TreeShape::UniformAttach),
            "path-biased" | "path" => Ok(TreeShape::PathBiased),
            "star-biased" | "star" => Ok(TreeShape::StarBiased),
            "caterpillar" => Ok(TreeShape::Caterpillar),
            other => Err(format!("unknown tree shape `{other}`")),
        }
    }
}

const PATH_BIAS: f64 = 0.85;
const STAR_BIAS: f64 = 0.7;

/// Random hypertree with `num_edges` edges. Vertex labels and edge order are
/// shuffled so that no structure leaks through the numbering.
pub fn random_hypertree(num_edges: usize, seed: u64, shape: TreeShape) -> Hypertree {
    assert!(num_edges >= 1, "a hypertree needs at least one edge");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<Triple> = vec![[0, 1, 2]];
    let mut attachments: Vec<Vertex> = Vec::new();
    let spine = num_edges.div_ceil(2);
    for i in 1..num_edges {
        let existing = 2 * i + 1;
        let uniform = |rng: &mut ChaCha8Rng| rng.gen_range(0..existing) as Vertex;
        let at = match shape {
            TreeShape::UniformAttach => uniform(&mut rng),
            TreeShape::PathBiased => {
                if rng.gen_bool(PATH_BIAS) {
                    (2 * i - 1 + rng.gen_range(0..2)) as Vertex
                } else {
                    uniform(&mut rng)
                }
            }
            TreeShape::StarBiased => {
                if !attachments.is_empty() && rng.gen_bool(STAR_BIAS) {
                    *attachments.choose(&mut rng).expect("non-empty")
                } else {
                    uniform(&mut rng)
                }
            }
            TreeShape::Caterpillar => {
                if i < spine {
                    (2 * i) as Vertex
                } else {
                    // spine vertices are 0..=2*spine
                    rng.gen_range(0..=2 * spine) as Vertex
                }
            }
        };
        attachments.push(at);
        edges.push([at, existing as Vertex, existing as Vertex + 1]);
    }

    let n = 2 * num_edges + 1;
    let mut relabel: Vec<Vertex> = (0..n as Vertex).collect();
    relabel.shuffle(&mut rng);
    let mut edges: Vec<Triple> = edges
        .into_iter()
        .map(|[a, b, c]| sorted_triple(relabel[a as usize], relabel[b as usize], relabel[c as usize]))
        .collect();
    edges.shuffle(&mut rng);
    validate_hypertree_on(n, &edges).expect("generator builds hypertrees")
}

/// A leaf edge: it holds at least two vertices of degree one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LeafEdge {
    pub edge: usize,
    /// The remaining vertex, when it has degree at least two. A lone edge
    /// with three degree-one vertices has no parent.
    pub parent: Option<Vertex>,
    pub leaves: [Vertex; 2],
}

/// An edge-subset view of a hypertree. Removing leaf edges or the interiors
/// of paths from a tree leaves a forest; the split works on these views.
#[derive(Clone, Debug)]
pub(crate) struct SubForest<'a> {
    pub graph: &'a LinearThreeGraph,
    pub active: Vec<bool>,
    pub degree: Vec<u32>,
    pub edge_count: usize,
}

impl<'a> SubForest<'a> {
    pub fn full(graph: &'a LinearThreeGraph) -> Self {
        let degree = (0..graph.n() as Vertex).map(|v| graph.degree(v) as u32).collect();
        SubForest {
            graph,
            active: vec![true; graph.num_edges()],
            degree,
            edge_count: graph.num_edges(),
        }
    }

    pub fn remove_edge(&mut self, id: usize) {
        debug_assert!(self.active[id]);
        self.active[id] = false;
        self.edge_count -= 1;
        for &v in &self.graph.edge(id) {
            self.degree[v as usize] -= 1;
        }
    }

    pub fn active_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.active.len()).filter(|&i| self.active[i])
    }

    pub fn active_through(&self, v: Vertex) -> impl Iterator<Item = usize> + '_ {
        self.graph
            .edges_through(v)
            .iter()
            .map(|&id| id as usize)
            .filter(|&id| self.active[id])
    }

    pub fn leaf_edge(&self, id: usize) -> Option<LeafEdge> {
        let e = self.graph.edge(id);
        let ones: Vec<Vertex> = e.iter().copied().filter(|&v| self.degree[v as usize] == 1).collect();
        match ones.len() {
            2 => {
                let parent = e.iter().copied().find(|v| !ones.contains(v));
                Some(LeafEdge {
                    edge: id,
                    parent,
                    leaves: [ones[0], ones[1]],
                })
            }
            3 => Some(LeafEdge {
                edge: id,
                parent: None,
                leaves: [e[1], e[2]],
            }),
            _ => None,
        }
    }

    pub fn leaf_edges(&self) -> Vec<LeafEdge> {
        self.active_edges().filter_map(|id| self.leaf_edge(id)).collect()
    }

    /// One leaf edge per parent (lowest edge id), ascending by parent.
    /// Parentless edges are included last so that a lone edge can be peeled.
    pub fn matching_leaf_set(&self) -> Vec<LeafEdge> {
        let mut best: Vec<LeafEdge> = Vec::new();
        let mut by_parent = std::collections::BTreeMap::new();
        let mut lone = Vec::new();
        for le in self.leaf_edges() {
            match le.parent {
                Some(p) => {
                    by_parent.entry(p).or_insert(le);
                }
                None => lone.push(le),
            }
        }
        best.extend(by_parent.into_values());
        best.extend(lone);
        best
    }

    /// Vertices that still carry an active edge.
    pub fn vertices(&self) -> Vec<Vertex> {
        (0..self.degree.len() as Vertex)
            .filter(|&v| self.degree[v as usize] > 0)
            .collect()
    }

    fn path_degree_ok(&self, p: &PathDescriptor, exempt: &[Vertex]) -> bool {
        if p.edges.iter().any(|&id| id >= self.active.len() || !self.active[id]) {
            return false;
        }
        let len = p.len();
        for (i, &v) in p.vertices.iter().enumerate() {
            if exempt.contains(&v) {
                continue;
            }
            // odd positions are u_i (one path edge), even interior positions
            // are junctions (two path edges)
            let on_path = if i % 2 == 1 || i == 0 || i == 2 * len { 1 } else { 2 };
            if self.degree[v as usize] != on_path {
                return false;
            }
        }
        true
    }

    pub fn is_bare_path(&self, p: &PathDescriptor) -> bool {
        if p.len() < 2 {
            return false;
        }
        let (a, b) = p.endpoints();
        self.path_degree_ok(p, &[a, b])
    }

    pub fn is_semi_bare_path(&self, p: &PathDescriptor) -> bool {
        let ([a, b], [c, d]) = p.end_pairs();
        self.path_degree_ok(p, &[a, b, c, d])
    }
}

/// All leaf edges of `t`. A single-edge tree has one parentless leaf edge.
pub fn leaf_edges(t: &Hypertree) -> Vec<LeafEdge> {
    SubForest::full(t.graph()).leaf_edges()
}

/// A matching formed by leaf edges, together with its leaf set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingLeafSet {
    pub edges: Vec<LeafEdge>,
}

impl MatchingLeafSet {
    /// Number of edges in the matching.
    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn leaf_set(&self) -> Vec<Vertex> {
        self.edges.iter().flat_map(|e| e.leaves).collect()
    }
}

/// A maximum matching of leaf edges (one per parent, ascending parent), or
/// `None` if it has fewer than `min_size` edges.
///
/// Leaf edges with different parents are disjoint, and leaf edges with the
/// same parent pairwise intersect, so one edge per parent is optimal.
pub fn find_matching_leaf_set(t: &Hypertree, min_size: usize) -> Option<MatchingLeafSet> {
    let edges = SubForest::full(t.graph()).matching_leaf_set();
    (edges.len() >= min_size && !edges.is_empty()).then_some(MatchingLeafSet { edges })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("a path of length l needs 2l+1 >= 3 vertices, got {0}")]
    BadLength(usize),
    #[error("path vertices are not distinct")]
    RepeatedVertex,
    #[error("step {0} of the path is not an edge")]
    MissingEdge(usize),
    #[error("consecutive edges {0} and {1} do not meet in exactly one vertex")]
    NotConsecutive(usize, usize),
}

/// A path `v_0, u_1, v_1, …, u_l, v_l` with edges `{v_{i-1}, u_i, v_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathDescriptor {
    edges: Vec<usize>,
    vertices: Vec<Vertex>,
}

impl PathDescriptor {
    pub fn from_vertices(g: &LinearThreeGraph, vertices: Vec<Vertex>) -> Result<Self, PathError> {
        if vertices.len() < 3 || vertices.len().is_multiple_of(2) {
            return Err(PathError::BadLength(vertices.len()));
        }
        let mut sorted = vertices.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(PathError::RepeatedVertex);
        }
        let mut edges = Vec::with_capacity(vertices.len() / 2);
        for i in 0..vertices.len() / 2 {
            let (a, b, c) = (vertices[2 * i], vertices[2 * i + 1], vertices[2 * i + 2]);
            match g.edge_of_pair(a, b) {
                Some(id) if g.has_edge(a, b, c) => edges.push(id),
                _ => return Err(PathError::MissingEdge(i)),
            }
        }
        Ok(PathDescriptor { edges, vertices })
    }

    /// Builds the path through consecutive edges `edges` (length >= 2). The
    /// endpoint in each end edge is its lower free vertex.
    pub fn from_edges(g: &LinearThreeGraph, edges: &[usize]) -> Result<Self, PathError> {
        if edges.len() < 2 {
            return Err(PathError::BadLength(2 * edges.len() + 1));
        }
        let shared = |a: usize, b: usize| -> Result<Vertex, PathError> {
            let (ea, eb) = (g.edge(edges[a]), g.edge(edges[b]));
            let common: Vec<Vertex> = ea.iter().copied().filter(|v| eb.contains(v)).collect();
            match common.as_slice() {
                [v] => Ok(*v),
                _ => Err(PathError::NotConsecutive(a, b)),
            }
        };
        let junctions = (0..edges.len() - 1)
            .map(|i| shared(i, i + 1))
            .collect::<Result<Vec<_>, _>>()?;
        let free = |id: usize, used: &[Vertex]| -> Vec<Vertex> {
            g.edge(id).iter().copied().filter(|v| !used.contains(v)).collect()
        };
        let mut vertices = Vec::with_capacity(2 * edges.len() + 1);
        let first = free(edges[0], &junctions[..1]);
        if first.len() != 2 {
            return Err(PathError::RepeatedVertex);
        }
        vertices.extend([first[0], first[1], junctions[0]]);
        for i in 1..edges.len() - 1 {
            let mid = free(edges[i], &[junctions[i - 1], junctions[i]]);
            if mid.len() != 1 {
                return Err(PathError::RepeatedVertex);
            }
            vertices.extend([mid[0], junctions[i]]);
        }
        let last = free(edges[edges.len() - 1], &junctions[edges.len() - 2..]);
        if last.len() != 2 {
            return Err(PathError::RepeatedVertex);
        }
        vertices.extend([last[1], last[0]]);
        Self::from_vertices(g, vertices)
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn endpoints(&self) -> (Vertex, Vertex) {
        (self.vertices[0], *self.vertices.last().expect("non-empty"))
    }

    /// `({v_0, u_1}, {u_l, v_l})`.
    pub fn end_pairs(&self) -> ([Vertex; 2], [Vertex; 2]) {
        let k = self.vertices.len();
        (
            [self.vertices[0], self.vertices[1]],
            [self.vertices[k - 2], self.vertices[k - 1]],
        )
    }

    pub fn internal_vertices(&self) -> &[Vertex] {
        &self.vertices[1..self.vertices.len() - 1]
    }
}

/// True if no edge outside `p` touches an internal vertex of `p` (length >= 2).
pub fn is_bare_path(t: &Hypertree, p: &PathDescriptor) -> bool {
    SubForest::full(t.graph()).is_bare_path(p)
}

/// True if edges outside `p` touch only vertices of its two end pairs.
pub fn is_semi_bare_path(t: &Hypertree, p: &PathDescriptor) -> bool {
    SubForest::full(t.graph()).is_semi_bare_path(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn path_tree(len: usize) -> Hypertree {
        let edges: Vec<Triple> = (0..len as u32).map(|i| [2 * i, 2 * i + 1, 2 * i + 2]).collect();
        validate_hypertree(&edges).unwrap()
    }

    fn star_tree(size: usize) -> Hypertree {
        let edges: Vec<Triple> = (0..size as u32).map(|i| [0, 2 * i + 1, 2 * i + 2]).collect();
        validate_hypertree(&edges).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert_eq!(validate_hypertree(&[[0, 1, 2]]).unwrap().n(), 3);
        assert_eq!(validate_hypertree(&[[0, 1, 2], [2, 3, 4]]).unwrap().n(), 5);
        assert!(matches!(
            validate_hypertree(&[[0, 1, 2], [3, 4, 5]]),
            Err(HypertreeError::Disconnected { .. })
        ));
        assert!(matches!(
            validate_hypertree(&[[0, 1, 2], [0, 1, 3]]),
            Err(HypertreeError::NotLinear(_))
        ));
        // a 3-cycle of edges is connected and linear but has too few vertices
        assert!(matches!(
            validate_hypertree(&[[0, 1, 2], [2, 3, 4], [4, 5, 0]]),
            Err(HypertreeError::VertexCount { .. })
        ));
        assert_eq!(validate_hypertree(&[]), Err(HypertreeError::Empty));
    }

    #[test]
    fn build_order_is_a_witness() {
        let t = random_hypertree(40, 11, TreeShape::UniformAttach);
        let mut seen = vec![false; t.n()];
        for (step, (id, at)) in t.attachments().enumerate() {
            let e = t.edge(id);
            assert!(e.contains(&at));
            if step > 0 {
                assert_eq!(e.iter().filter(|&&v| seen[v as usize]).count(), 1);
                assert!(seen[at as usize]);
            }
            for v in e {
                seen[v as usize] = true;
            }
        }
    }

    #[test]
    fn generator_examples() {
        assert_eq!(random_hypertree(1, 5, TreeShape::StarBiased).num_edges(), 1);
        assert_eq!(random_hypertree(50, 3, TreeShape::UniformAttach).n(), 101);
        assert!(random_hypertree(20, 9, TreeShape::StarBiased).max_degree() >= 5);
        assert_eq!(
            random_hypertree(30, 1, TreeShape::Caterpillar),
            random_hypertree(30, 1, TreeShape::Caterpillar)
        );
        for s in TreeShape::ALL {
            assert_eq!(s.name().parse::<TreeShape>(), Ok(s));
        }
    }

    #[test]
    fn leaf_edge_examples() {
        let p3 = leaf_edges(&path_tree(3));
        assert_eq!(p3.len(), 2);
        let s4 = leaf_edges(&star_tree(4));
        assert_eq!(s4.len(), 4);
        assert!(s4.iter().all(|l| l.parent == Some(0)));
        let one = leaf_edges(&path_tree(1));
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].parent, None);
    }

    #[test]
    fn matching_leaf_set_examples() {
        assert_eq!(find_matching_leaf_set(&star_tree(4), 1).unwrap().size(), 1);
        let m = find_matching_leaf_set(&path_tree(3), 2).unwrap();
        assert_eq!(m.size(), 2);
        let (a, b) = (m.edges[0].edge, m.edges[1].edge);
        let t = path_tree(3);
        assert!(t.edge(a).iter().all(|v| !t.edge(b).contains(v)));
        assert!(find_matching_leaf_set(&path_tree(2), 2).is_none());
    }

    #[test]
    fn bare_path_examples() {
        let t = path_tree(5);
        let middle = PathDescriptor::from_vertices(t.graph(), (2..=8).collect()).unwrap();
        assert!(is_bare_path(&t, &middle));
        assert!(is_semi_bare_path(&t, &middle));

        // pendant edge at internal vertex 3 of the path 0..=6
        let edges = vec![[0, 1, 2], [2, 3, 4], [4, 5, 6], [3, 7, 8]];
        let t = validate_hypertree(&edges).unwrap();
        let p = PathDescriptor::from_vertices(t.graph(), (0..=6).collect()).unwrap();
        assert!(!is_bare_path(&t, &p));
        assert!(!is_semi_bare_path(&t, &p));

        // pendant edge at end-pair vertex 1 (not an endpoint)
        let edges = vec![[0, 1, 2], [2, 3, 4], [4, 5, 6], [1, 7, 8]];
        let t = validate_hypertree(&edges).unwrap();
        let p = PathDescriptor::from_vertices(t.graph(), (0..=6).collect()).unwrap();
        assert!(!is_bare_path(&t, &p));
        assert!(is_semi_bare_path(&t, &p));
    }

    #[test]
    fn path_from_edges_round_trip() {
        let t = path_tree(4);
        let p = PathDescriptor::from_edges(t.graph(), &[0, 1, 2, 3]).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.internal_vertices().len(), 7);
        assert!(PathDescriptor::from_edges(t.graph(), &[0, 2]).is_err());
    }

    #[test]
    fn subtree_relabels() {
        let t = path_tree(4);
        let (sub, labels) = t.subtree(&[1, 2]).unwrap();
        assert_eq!(sub.n(), 5);
        assert_eq!(labels.len(), 5);
        assert!(t.subtree(&[0, 2]).is_err());
    }

    proptest! {
        #[test]
        fn generated_trees_are_hypertrees(edges in 1usize..60, seed in any::<u64>(), shape in 0usize..4) {
            let t = random_hypertree(edges, seed, TreeShape::ALL[shape]);
            prop_assert_eq!(t.n(), 2 * edges + 1);
            prop_assert!(validate_linear(t.edges(), t.n()).is_valid());
            let leaves: usize = leaf_edges(&t).iter().map(|l| if l.parent.is_some() { 2 } else { 3 }).sum();
            if edges >= 2 {
                prop_assert_eq!(leaves % 2, 0);
            }
        }

        #[test]
        fn matching_is_disjoint(edges in 2usize..60, seed in any::<u64>(), shape in 0usize..4) {
            let t = random_hypertree(edges, seed, TreeShape::ALL[shape]);
            let m = find_matching_leaf_set(&t, 0).unwrap();
            let mut seen = std::collections::HashSet::new();
            for le in &m.edges {
                for v in t.edge(le.edge) {
                    prop_assert!(seen.insert(v));
                }
                prop_assert_eq!(le.leaves.iter().filter(|&&v| t.degree(v) == 1).count(), 2);
            }
        }
    }
}
