//! Hypertree splitting.
//!
//! A hypertree `T` is decomposed into a chain `T_0 ⊆ T_1 ⊆ … ⊆ T_ℓ = T`:
//! a small base forest `T_0`, one stage of large stars hung on `T_0`, a run of
//! matching stages (vertex-disjoint leaf edges each hanging on one vertex of
//! the previous forest) and exactly one stage of vertex-disjoint bare paths of
//! length three joining two vertices of the previous forest.
//!
//! The chain is built in reverse: starting from `T`, repeatedly peel a maximum
//! matching of leaf edges; then cut the middle out of long semi-bare paths,
//! peel the remaining path tails edge by edge, and finally strip every parent
//! carrying at least `D` leaf edges.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::hypertree::{Hypertree, LeafEdge, PathDescriptor, SubForest};
use crate::sts::{LinearThreeGraph, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SplitError {
    #[error("edge {0} is a leaf edge and cannot root the line-graph tree")]
    RootIsLeafEdge(usize),
    #[error("edge {0} is not present")]
    NoSuchEdge(usize),
    #[error("edge list is not a tree on {0} vertices")]
    NotATree(usize),
}

/// A tree in the ordinary graph sense, as adjacency lists on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphTree {
    adj: Vec<Vec<u32>>,
}

impl GraphTree {
    pub fn new(n: usize, edges: &[(u32, u32)]) -> Result<Self, SplitError> {
        if n == 0 || edges.len() != n - 1 {
            return Err(SplitError::NotATree(n));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a == b || a as usize >= n || b as usize >= n {
                return Err(SplitError::NotATree(n));
            }
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        let tree = GraphTree { adj };
        // n - 1 edges and connected means acyclic
        let mut seen = vec![false; n];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for &w in &tree.adj[v as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        if reached != n {
            return Err(SplitError::NotATree(n));
        }
        Ok(tree)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbours(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn leaf_count(&self) -> usize {
        self.adj.iter().filter(|a| a.len() == 1).count()
    }
}

/// Splits every maximal run of degree-2 vertices (excluding `blocked`) into
/// consecutive blocks of `m + 1` vertices; each block is a bare path of
/// length `m` whose two ends also have degree 2.
fn carve_runs(adj: &[Vec<u32>], blocked: Option<usize>, m: usize) -> Vec<Vec<u32>> {
    let interior = |v: usize| adj[v].len() == 2 && Some(v) != blocked;
    let n = adj.len();
    let mut visited = vec![false; n];
    let mut paths = Vec::new();
    for v in 0..n {
        if visited[v] || !interior(v) {
            continue;
        }
        // walk to one end of the run
        let (mut cur, mut prev) = (v, usize::MAX);
        loop {
            let next = adj[cur]
                .iter()
                .map(|&w| w as usize)
                .find(|&w| w != prev && interior(w));
            match next {
                Some(w) if w != v => {
                    prev = cur;
                    cur = w;
                }
                _ => break,
            }
        }
        let mut run = vec![cur as u32];
        visited[cur] = true;
        let mut prev = usize::MAX;
        loop {
            let next = adj[cur]
                .iter()
                .map(|&w| w as usize)
                .find(|&w| w != prev && interior(w) && !visited[w]);
            match next {
                Some(w) => {
                    visited[w] = true;
                    run.push(w as u32);
                    prev = cur;
                    cur = w;
                }
                None => break,
            }
        }
        for block in run.chunks_exact(m + 1) {
            paths.push(block.to_vec());
        }
    }
    paths
}

/// Vertex-disjoint bare paths of length `m` (as vertex sequences of `m + 1`
/// vertices) carved from the degree-2 runs of `tree`.
pub fn extract_bare_paths_2tree(tree: &GraphTree, m: usize) -> Vec<Vec<u32>> {
    assert!(m >= 2, "path length must be at least 2");
    carve_runs(&tree.adj, None, m)
}

/// Vertices left after deleting the internal vertices of every path.
pub fn bare_path_residual(tree: &GraphTree, paths: &[Vec<u32>]) -> usize {
    tree.n() - paths.iter().map(|p| p.len().saturating_sub(2)).sum::<usize>()
}

/// `6·m·ℓ + 2·size/(m+1)` with `ℓ` clamped to at least 2.
pub fn residual_bound(m: usize, leaves: usize, size: usize) -> f64 {
    let l = leaves.max(2) as f64;
    6.0 * m as f64 * l + 2.0 * size as f64 / (m as f64 + 1.0)
}

/// BFS tree of the edge-intersection graph of a hypertree, rooted at an edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineGraphTree {
    pub root: usize,
    /// BFS parent of each edge; `None` for the root and for absent edges.
    pub parent: Vec<Option<u32>>,
    /// The tree on edge ids (absent edges are isolated nodes).
    pub tree: Vec<Vec<u32>>,
}

impl LineGraphTree {
    pub fn degree(&self, edge: usize) -> usize {
        self.tree[edge].len()
    }

    /// Edges whose node is a leaf of the BFS tree.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.tree.len()).filter(|&e| self.tree[e].len() == 1).collect()
    }
}

/// BFS tree of the line graph of `t` rooted at the non-leaf edge `root_edge`.
pub fn line_graph_bfs(t: &Hypertree, root_edge: usize) -> Result<LineGraphTree, SplitError> {
    line_graph_bfs_in(&SubForest::full(t.graph()), root_edge)
}

pub(crate) fn line_graph_bfs_in(f: &SubForest<'_>, root: usize) -> Result<LineGraphTree, SplitError> {
    if root >= f.active.len() || !f.active[root] {
        return Err(SplitError::NoSuchEdge(root));
    }
    if f.leaf_edge(root).is_some() {
        return Err(SplitError::RootIsLeafEdge(root));
    }
    let m = f.active.len();
    let mut parent = vec![None; m];
    let mut tree = vec![Vec::new(); m];
    let mut seen = vec![false; m];
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(e) = queue.pop_front() {
        for &v in &f.graph.edge(e) {
            for id in f.active_through(v) {
                if !seen[id] {
                    seen[id] = true;
                    parent[id] = Some(e as u32);
                    tree[e].push(id as u32);
                    tree[id].push(e as u32);
                    queue.push_back(id);
                }
            }
        }
    }
    Ok(LineGraphTree { root, parent, tree })
}

/// Edge-disjoint semi-bare paths of length `m + 1` in `t`, obtained from
/// bare paths of length `m` in the line-graph BFS tree.
pub fn extract_semi_bare_paths(t: &Hypertree, m: usize) -> Vec<PathDescriptor> {
    extract_semi_bare_in(&SubForest::full(t.graph()), m)
}

pub(crate) fn extract_semi_bare_in(f: &SubForest<'_>, m: usize) -> Vec<PathDescriptor> {
    assert!(m >= 2, "path length must be at least 2");
    let Some(root) = f.active_edges().find(|&e| f.leaf_edge(e).is_none()) else {
        return Vec::new();
    };
    let lg = line_graph_bfs_in(f, root).expect("root is a non-leaf edge");
    let mut out = Vec::new();
    for nodes in carve_runs(&lg.tree, Some(root), m) {
        let ids: Vec<usize> = nodes.iter().map(|&e| e as usize).collect();
        let p = PathDescriptor::from_edges(f.graph, &ids)
            .expect("consecutive degree-2 nodes of the BFS tree form a hyperpath");
        debug_assert!(f.is_semi_bare_path(&p));
        out.push(p);
    }
    out
}

/// Edges left after removing every path interior (all but its end edges).
pub fn semi_bare_residual(edge_count: usize, paths: &[PathDescriptor]) -> usize {
    edge_count - paths.iter().map(|p| p.len().saturating_sub(2)).sum::<usize>()
}

/// When the decreasing chain stops peeling matching leaf sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitStop {
    /// Peel while a matching leaf set reaches the size threshold, then keep
    /// peeling only if the base would otherwise be too large.
    Threshold,
    /// Stop at the first round after which the base is small enough. This
    /// keeps the base as large as allowed and the chain short.
    Adaptive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitParams {
    /// Minimum star size `D`.
    pub degree_threshold: usize,
    pub mu: f64,
    /// Scale `n`: the base gets at most `μn` edges.
    pub n: usize,
    /// Semi-bare path parameter `m`; `None` uses `⌈1000/μ⌉`.
    pub path_length: Option<usize>,
    pub stop: SplitStop,
}

impl SplitParams {
    pub fn new(degree_threshold: usize, mu: f64, n: usize) -> Self {
        SplitParams {
            degree_threshold,
            mu,
            n,
            path_length: None,
            stop: SplitStop::Adaptive,
        }
    }

    pub fn with_path_length(mut self, m: usize) -> Self {
        self.path_length = Some(m);
        self
    }

    pub fn with_stop(mut self, stop: SplitStop) -> Self {
        self.stop = stop;
        self
    }

    pub fn m(&self) -> usize {
        self.path_length
            .unwrap_or_else(|| (1000.0 / self.mu).ceil() as usize)
            .max(2)
    }

    pub fn mu_n(&self) -> f64 {
        self.mu * self.n as f64
    }

    /// Minimum leaf-set size for a peeling round: `μn/(50·m·D)`.
    pub fn peel_threshold(&self) -> f64 {
        self.mu_n() / (50.0 * self.m() as f64 * self.degree_threshold as f64)
    }

    /// Upper bound `10^5·D/μ²` on the chain length.
    pub fn stage_limit(&self) -> f64 {
        1e5 * self.degree_threshold as f64 / (self.mu * self.mu)
    }
}

/// A star hung on a base vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Star {
    pub center: Vertex,
    pub edges: Vec<usize>,
}

/// An edge attached to the previous forest through one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Attached {
    pub edge: usize,
    pub attach: Vertex,
}

/// A bare path `u = v[0], …, v[6] = v` of three edges whose five internal
/// vertices are new.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathPiece {
    pub vertices: [Vertex; 7],
    pub edges: [usize; 3],
}

impl PathPiece {
    pub fn ends(&self) -> (Vertex, Vertex) {
        (self.vertices[0], self.vertices[6])
    }

    pub fn internal(&self) -> &[Vertex] {
        &self.vertices[1..6]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stage {
    Stars(Vec<Star>),
    Matching(Vec<Attached>),
    Paths(Vec<PathPiece>),
}

impl Stage {
    pub fn kind(&self) -> &'static str {
        match self {
            Stage::Stars(_) => "stars",
            Stage::Matching(_) => "matching",
            Stage::Paths(_) => "paths",
        }
    }

    pub fn edge_ids(&self) -> Vec<usize> {
        match self {
            Stage::Stars(s) => s.iter().flat_map(|s| s.edges.iter().copied()).collect(),
            Stage::Matching(m) => m.iter().map(|a| a.edge).collect(),
            Stage::Paths(p) => p.iter().flat_map(|p| p.edges).collect(),
        }
    }
}

/// The base of the chain: a forest, possibly with isolated vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseStage {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<usize>,
}

/// The chain `T_0 ⊆ T_1 ⊆ … ⊆ T_ℓ = T`. `stages[i]` turns `T_i` into
/// `T_{i+1}`; `stages[0]` is always the star stage and exactly one stage is a
/// path stage.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPlan {
    pub degree_threshold: usize,
    pub mu: f64,
    pub n: usize,
    pub path_length: usize,
    pub base: BaseStage,
    pub stages: Vec<Stage>,
}

impl SplitPlan {
    /// `ℓ`.
    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// `s`: the path stage turns `T_s` into `T_{s+1}`.
    pub fn path_stage(&self) -> Option<usize> {
        self.stages.iter().position(|s| matches!(s, Stage::Paths(_)))
    }

    pub fn stars(&self) -> &[Star] {
        match self.stages.first() {
            Some(Stage::Stars(s)) => s,
            _ => &[],
        }
    }

    /// True when the whole tree is the base.
    pub fn is_base_only(&self) -> bool {
        self.stages.iter().all(|s| s.edge_ids().is_empty())
    }
}

struct Remainder {
    base: BaseStage,
    final_stars: Vec<Star>,
    tails: Vec<Vec<Attached>>,
    paths: Vec<PathPiece>,
}

fn leaf_attach(le: &LeafEdge, g: &LinearThreeGraph) -> Attached {
    let attach = le.parent.unwrap_or_else(|| g.edge(le.edge)[0]);
    Attached {
        edge: le.edge,
        attach,
    }
}

/// Leaf edges grouped by parents with at least `d` of them.
fn star_groups(f: &SubForest<'_>, d: usize) -> Vec<Star> {
    let mut groups: BTreeMap<Vertex, Vec<usize>> = BTreeMap::new();
    for le in f.leaf_edges() {
        if let Some(p) = le.parent {
            groups.entry(p).or_default().push(le.edge);
        }
    }
    groups
        .into_iter()
        .filter(|(_, e)| e.len() >= d)
        .map(|(center, edges)| Star { center, edges })
        .collect()
}

/// Everything after the peeling rounds: path cutting, tail peeling and the
/// final star removal, applied to a copy of `f`.
fn remainder(f: &SubForest<'_>, params: &SplitParams, all_vertices: usize) -> Remainder {
    let d = params.degree_threshold;
    let m = params.m();
    let mut cur = f.clone();

    // S: drop every large star, then look for semi-bare paths there
    let mut s = f.clone();
    for star in star_groups(f, d) {
        for &e in &star.edges {
            s.remove_edge(e);
        }
    }
    let cap = params.mu_n().floor().max(0.0) as usize;
    let mut chosen: Vec<PathDescriptor> = Vec::new();
    if m >= 4 && s.edge_count > m {
        for p in extract_semi_bare_in(&s, m) {
            if chosen.len() >= cap {
                break;
            }
            if f.is_semi_bare_path(&p) {
                chosen.push(p);
            }
        }
    }

    // cut the bare middle e_j, e_{j+1}, e_{j+2} of each path, 2 <= j, j+2 <= m
    let j = 2 + (m - 4) / 2;
    let mut paths = Vec::with_capacity(chosen.len());
    for p in &chosen {
        let v = p.vertices();
        let mut vertices = [0; 7];
        vertices.copy_from_slice(&v[2 * (j - 1)..2 * (j - 1) + 7]);
        let edges = [p.edges()[j - 1], p.edges()[j], p.edges()[j + 1]];
        for &e in &edges {
            cur.remove_edge(e);
        }
        paths.push(PathPiece { vertices, edges });
    }

    // peel both tails towards the kept end edges, innermost edge first
    let mut tails = Vec::new();
    let mut step = 0;
    loop {
        let mut stage = Vec::new();
        for p in &chosen {
            let e = p.edges();
            let v = p.vertices();
            // left tail e_2..e_{j-1}, peeled from e_{j-1} down to e_2
            if j >= 3 + step {
                let k = j - 1 - step; // 1-based edge index
                stage.push(Attached {
                    edge: e[k - 1],
                    attach: v[2 * (k - 1)],
                });
            }
            // right tail e_{j+3}..e_m, peeled from e_{j+3} up to e_m
            let k = j + 3 + step;
            if k <= m {
                stage.push(Attached {
                    edge: e[k - 1],
                    attach: v[2 * k],
                });
            }
        }
        if stage.is_empty() {
            break;
        }
        for a in &stage {
            debug_assert!(cur.leaf_edge(a.edge).is_some_and(|l| l.parent == Some(a.attach)));
            cur.remove_edge(a.edge);
        }
        tails.push(stage);
        step += 1;
    }

    let final_stars = star_groups(&cur, d);
    for star in &final_stars {
        for &e in &star.edges {
            cur.remove_edge(e);
        }
    }

    // base vertices: everything present not introduced by a later stage
    let mut introduced = vec![false; all_vertices];
    for star in &final_stars {
        for &e in &star.edges {
            for &v in &f.graph.edge(e) {
                introduced[v as usize] |= v != star.center;
            }
        }
    }
    for a in tails.iter().flatten() {
        for &v in &f.graph.edge(a.edge) {
            introduced[v as usize] |= v != a.attach;
        }
    }
    for p in &paths {
        for &v in p.internal() {
            introduced[v as usize] = true;
        }
    }
    let vertices = f
        .vertices()
        .into_iter()
        .filter(|&v| !introduced[v as usize])
        .collect();
    Remainder {
        base: BaseStage {
            vertices,
            edges: cur.active_edges().collect(),
        },
        final_stars,
        tails,
        paths,
    }
}

fn base_ok(base: &BaseStage, params: &SplitParams) -> bool {
    let mu_n = params.mu_n();
    base.edges.len() as f64 <= mu_n && base.vertices.len() as f64 <= 3.0 * mu_n
}

/// Splits `t` into a stage chain. Always returns a well-formed chain; when
/// `μn` is too small for any base to fit, the base is a single vertex and
/// [`validate_split`] reports the size violation.
pub fn split_hypertree(t: &Hypertree, params: &SplitParams) -> SplitPlan {
    assert!(params.mu > 0.0 && params.mu < 1.0, "mu must lie in (0, 1)");
    assert!(params.degree_threshold >= 2, "degree threshold must be at least 2");
    let graph = t.graph();
    let small = BaseStage {
        vertices: (0..t.n() as Vertex).collect(),
        edges: (0..t.num_edges()).collect(),
    };
    if base_ok(&small, params) {
        return SplitPlan {
            degree_threshold: params.degree_threshold,
            mu: params.mu,
            n: params.n,
            path_length: params.m(),
            base: small,
            stages: vec![Stage::Stars(Vec::new()), Stage::Paths(Vec::new())],
        };
    }
    let mut forest = SubForest::full(graph);
    let mut rounds: Vec<Vec<Attached>> = Vec::new();
    let threshold = params.peel_threshold();
    let mut survivor: Option<Vertex> = None;

    let remainder_now = |forest: &SubForest<'_>, survivor: Option<Vertex>| {
        let mut r = remainder(forest, params, t.n());
        if forest.edge_count == 0 {
            r.base.vertices = vec![survivor.expect("peeling leaves one vertex")];
        }
        r
    };

    let result = loop {
        let leaf_set = forest.matching_leaf_set();
        let can_peel = !leaf_set.is_empty();
        let forced = match params.stop {
            SplitStop::Threshold => can_peel && (2 * leaf_set.len()) as f64 >= threshold,
            SplitStop::Adaptive => false,
        };
        if !forced {
            let r = remainder_now(&forest, survivor);
            if !can_peel || base_ok(&r.base, params) {
                break r;
            }
        }
        let round: Vec<Attached> = leaf_set.iter().map(|le| leaf_attach(le, graph)).collect();
        for a in &round {
            forest.remove_edge(a.edge);
        }
        if forest.edge_count == 0 {
            survivor = Some(round[0].attach);
        }
        rounds.push(round);
    };

    let mut stages = vec![Stage::Stars(result.final_stars)];
    stages.extend(result.tails.into_iter().rev().map(Stage::Matching));
    stages.push(Stage::Paths(result.paths));
    stages.extend(rounds.into_iter().rev().map(Stage::Matching));
    SplitPlan {
        degree_threshold: params.degree_threshold,
        mu: params.mu,
        n: params.n,
        path_length: params.m(),
        base: result.base,
        stages,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SplitViolation {
    EdgeOutOfRange { edge: usize },
    BaseTooLarge { edges: usize, vertices: usize, mu_n: f64 },
    BaseEdgeOutsideBase { edge: usize },
    MissingStarStage,
    StarTooSmall { center: Vertex, size: usize },
    StarCenterNotInBase { center: Vertex },
    InvalidStarEdge { center: Vertex, edge: usize },
    MatchingEdgeInvalid { stage: usize, edge: usize },
    PathStageCount { count: usize },
    TooManyPaths { count: usize, limit: f64 },
    InvalidPath { stage: usize, index: usize },
    TooManyStages { stages: usize, limit: f64 },
    EdgeRepeated { edge: usize },
    NotReconstructed { missing_edges: usize, missing_vertices: usize },
}

impl fmt::Display for SplitViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SplitReport {
    pub violations: Vec<SplitViolation>,
}

impl SplitReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Replays `plan` on `t` and lists every violated chain property.
pub fn validate_split(plan: &SplitPlan, t: &Hypertree, n: usize) -> SplitReport {
    let mut out = Vec::new();
    let g = t.graph();
    let mu_n = plan.mu * n as f64;
    let mut in_tree = vec![false; t.n()];
    let mut edge_used = vec![false; t.num_edges()];
    let mut use_edge = |e: usize, out: &mut Vec<SplitViolation>| -> bool {
        if e >= edge_used.len() {
            out.push(SplitViolation::EdgeOutOfRange { edge: e });
            return false;
        }
        if edge_used[e] {
            out.push(SplitViolation::EdgeRepeated { edge: e });
            return false;
        }
        edge_used[e] = true;
        true
    };

    for &v in &plan.base.vertices {
        if (v as usize) < in_tree.len() {
            in_tree[v as usize] = true;
        }
    }
    let base_vertices = in_tree.clone();
    for &e in &plan.base.edges {
        if use_edge(e, &mut out) && g.edge(e).iter().any(|&v| !in_tree[v as usize]) {
            out.push(SplitViolation::BaseEdgeOutsideBase { edge: e });
        }
    }
    if plan.base.edges.len() as f64 > mu_n || plan.base.vertices.len() as f64 > 3.0 * mu_n {
        out.push(SplitViolation::BaseTooLarge {
            edges: plan.base.edges.len(),
            vertices: plan.base.vertices.len(),
            mu_n,
        });
    }

    if !matches!(plan.stages.first(), Some(Stage::Stars(_))) {
        out.push(SplitViolation::MissingStarStage);
    }
    let path_stages = plan
        .stages
        .iter()
        .filter(|s| matches!(s, Stage::Paths(_)))
        .count();
    if path_stages != 1 || matches!(plan.stages.first(), Some(Stage::Paths(_))) {
        out.push(SplitViolation::PathStageCount { count: path_stages });
    }
    let limit = 1e5 * plan.degree_threshold as f64 / (plan.mu * plan.mu);
    if plan.stages.len() as f64 > limit {
        out.push(SplitViolation::TooManyStages {
            stages: plan.stages.len(),
            limit,
        });
    }

    // an edge added to the current forest through exactly `attach`
    let hangs = |e: usize, attach: Vertex, in_tree: &[bool], fresh: &[bool]| -> bool {
        let edge = g.edge(e);
        edge.contains(&attach)
            && in_tree[attach as usize]
            && edge
                .iter()
                .all(|&v| v == attach || (!in_tree[v as usize] && !fresh[v as usize]))
    };

    for (si, stage) in plan.stages.iter().enumerate() {
        let mut fresh = vec![false; t.n()];
        match stage {
            Stage::Stars(stars) if si == 0 => {
                for star in stars {
                    if (star.center as usize) >= t.n() || !base_vertices[star.center as usize] {
                        out.push(SplitViolation::StarCenterNotInBase { center: star.center });
                        continue;
                    }
                    if star.edges.len() < plan.degree_threshold {
                        out.push(SplitViolation::StarTooSmall {
                            center: star.center,
                            size: star.edges.len(),
                        });
                    }
                    for &e in &star.edges {
                        if !use_edge(e, &mut out) {
                            continue;
                        }
                        if !hangs(e, star.center, &in_tree, &fresh) {
                            out.push(SplitViolation::InvalidStarEdge {
                                center: star.center,
                                edge: e,
                            });
                        }
                        for &v in &g.edge(e) {
                            if v != star.center {
                                fresh[v as usize] = true;
                            }
                        }
                    }
                }
            }
            Stage::Stars(_) => out.push(SplitViolation::MissingStarStage),
            Stage::Matching(edges) => {
                let mut attach_seen = vec![false; t.n()];
                for a in edges {
                    if !use_edge(a.edge, &mut out) {
                        continue;
                    }
                    let ok = (a.attach as usize) < t.n()
                        && !attach_seen[a.attach as usize]
                        && hangs(a.edge, a.attach, &in_tree, &fresh);
                    if !ok {
                        out.push(SplitViolation::MatchingEdgeInvalid {
                            stage: si + 1,
                            edge: a.edge,
                        });
                    }
                    if (a.attach as usize) < t.n() {
                        attach_seen[a.attach as usize] = true;
                    }
                    for &v in &g.edge(a.edge) {
                        if v != a.attach {
                            fresh[v as usize] = true;
                        }
                    }
                }
            }
            Stage::Paths(paths) => {
                if paths.len() as f64 > mu_n {
                    out.push(SplitViolation::TooManyPaths {
                        count: paths.len(),
                        limit: mu_n,
                    });
                }
                for (index, p) in paths.iter().enumerate() {
                    let mut ok = p.vertices.iter().all(|&v| (v as usize) < t.n());
                    if ok {
                        let (u, v) = p.ends();
                        ok = u != v && in_tree[u as usize] && in_tree[v as usize];
                        ok &= p
                            .internal()
                            .iter()
                            .all(|&x| !in_tree[x as usize] && !fresh[x as usize]);
                        let mut sorted = p.vertices;
                        sorted.sort_unstable();
                        ok &= sorted.windows(2).all(|w| w[0] != w[1]);
                        for i in 0..3 {
                            let [a, b, c] = [p.vertices[2 * i], p.vertices[2 * i + 1], p.vertices[2 * i + 2]];
                            ok &= p.edges[i] < t.num_edges() && g.has_edge(a, b, c) && g.edge_of_pair(a, b) == Some(p.edges[i]);
                        }
                    }
                    for &e in &p.edges {
                        use_edge(e, &mut out);
                    }
                    if !ok {
                        out.push(SplitViolation::InvalidPath { stage: si + 1, index });
                    } else {
                        for &x in p.internal() {
                            fresh[x as usize] = true;
                        }
                    }
                }
            }
        }
        for (v, f) in fresh.iter().enumerate() {
            if *f {
                in_tree[v] = true;
            }
        }
    }

    let missing_edges = edge_used.iter().filter(|&&u| !u).count();
    let missing_vertices = in_tree.iter().filter(|&&u| !u).count();
    if missing_edges > 0 || missing_vertices > 0 {
        out.push(SplitViolation::NotReconstructed {
            missing_edges,
            missing_vertices,
        });
    }
    SplitReport { violations: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypertree::{is_semi_bare_path, leaf_edges, random_hypertree, validate_hypertree, TreeShape};
    use crate::sts::Triple;
    use proptest::prelude::*;

    fn path_graph(n: usize) -> GraphTree {
        let edges: Vec<(u32, u32)> = (1..n as u32).map(|i| (i - 1, i)).collect();
        GraphTree::new(n, &edges).unwrap()
    }

    fn path_tree(len: usize) -> Hypertree {
        let edges: Vec<Triple> = (0..len as u32).map(|i| [2 * i, 2 * i + 1, 2 * i + 2]).collect();
        validate_hypertree(&edges).unwrap()
    }

    fn star_tree(size: usize) -> Hypertree {
        let edges: Vec<Triple> = (0..size as u32).map(|i| [0, 2 * i + 1, 2 * i + 2]).collect();
        validate_hypertree(&edges).unwrap()
    }

    fn check_bare(tree: &GraphTree, paths: &[Vec<u32>], m: usize) {
        let mut seen = vec![false; tree.n()];
        for p in paths {
            assert_eq!(p.len(), m + 1);
            for w in p.windows(2) {
                assert!(tree.neighbours(w[0]).contains(&w[1]));
            }
            for &v in &p[1..m] {
                assert_eq!(tree.degree(v), 2);
            }
            for &v in p {
                assert!(!seen[v as usize]);
                seen[v as usize] = true;
            }
        }
    }

    #[test]
    fn bare_paths_in_path_graph() {
        let t = path_graph(50);
        let paths = extract_bare_paths_2tree(&t, 4);
        check_bare(&t, &paths, 4);
        let residual = bare_path_residual(&t, &paths);
        assert!(residual as f64 <= residual_bound(4, 2, 50));
        assert!(residual as f64 <= 68.0);
    }

    #[test]
    fn bare_paths_in_star_graph() {
        let edges: Vec<(u32, u32)> = (1..6).map(|i| (0, i)).collect();
        let t = GraphTree::new(6, &edges).unwrap();
        assert!(extract_bare_paths_2tree(&t, 3).is_empty());
        assert!(GraphTree::new(3, &[(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn line_graph_examples() {
        let t = path_tree(4);
        let lg = line_graph_bfs(&t, 1).unwrap();
        assert_eq!(lg.leaves(), vec![0, 3]);
        assert_eq!(lg.degree(1), 2);
        assert_eq!(line_graph_bfs(&star_tree(3), 0), Err(SplitError::RootIsLeafEdge(0)));

        // caterpillar: spine 0-1-2 with pendants at junctions
        let edges = vec![[0, 1, 2], [2, 3, 4], [4, 5, 6], [2, 7, 8], [4, 9, 10]];
        let t = validate_hypertree(&edges).unwrap();
        let lg = line_graph_bfs(&t, 1).unwrap();
        let mut leaves = lg.leaves();
        leaves.sort();
        let mut expected: Vec<usize> = leaf_edges(&t).iter().map(|l| l.edge).collect();
        expected.sort();
        assert_eq!(leaves, expected);
    }

    #[test]
    fn semi_bare_on_path() {
        let t = path_tree(12);
        let paths = extract_semi_bare_paths(&t, 3);
        assert!(!paths.is_empty());
        for p in &paths {
            assert_eq!(p.len(), 4);
            assert!(is_semi_bare_path(&t, p));
        }
        assert!(semi_bare_residual(12, &paths) as f64 <= residual_bound(3, 2, 12));
        assert!(extract_semi_bare_paths(&star_tree(5), 3).is_empty());
    }

    #[test]
    fn star_split() {
        let t = star_tree(20);
        let plan = split_hypertree(&t, &SplitParams::new(5, 0.05, 40));
        assert!(validate_split(&plan, &t, 40).is_valid());
        assert_eq!(plan.base.edges.len(), 0);
        assert_eq!(plan.base.vertices, vec![0]);
        assert_eq!(plan.stars().len(), 1);
        assert_eq!(plan.stars()[0].edges.len(), 20);
    }

    #[test]
    fn single_edge_split() {
        let t = path_tree(1);
        let plan = split_hypertree(&t, &SplitParams::new(4, 0.5, 2));
        assert!(validate_split(&plan, &t, 2).is_valid());
        assert!(plan.is_base_only());
    }

    #[test]
    fn path_stage_is_used_with_short_paths() {
        let t = path_tree(60);
        let params = SplitParams::new(4, 0.1, 60).with_path_length(6).with_stop(SplitStop::Adaptive);
        let plan = split_hypertree(&t, &params);
        let report = validate_split(&plan, &t, 60);
        assert!(report.is_valid(), "{:?}", report);
        let s = plan.path_stage().unwrap();
        match &plan.stages[s] {
            Stage::Paths(p) => assert!(!p.is_empty()),
            _ => unreachable!(),
        }
    }

    #[test]
    fn validator_catches_corruption() {
        let t = random_hypertree(200, 4, TreeShape::PathBiased);
        let params = SplitParams::new(4, 0.1, 200).with_path_length(5);
        let plan = split_hypertree(&t, &params);
        assert!(validate_split(&plan, &t, 200).is_valid());

        let mut bad = plan.clone();
        bad.stages.pop();
        assert!(!validate_split(&bad, &t, 200).is_valid());

        // a star below the size threshold
        let t = star_tree(6);
        let plan = split_hypertree(&t, &SplitParams::new(6, 0.05, 40));
        let mut bad = plan.clone();
        bad.degree_threshold = 7;
        assert!(validate_split(&bad, &t, 40)
            .violations
            .iter()
            .any(|v| matches!(v, SplitViolation::StarTooSmall { .. })));
    }

    #[test]
    fn short_path_piece_rejected() {
        let t = path_tree(40);
        let params = SplitParams::new(4, 0.2, 40).with_path_length(5).with_stop(SplitStop::Adaptive);
        let mut plan = split_hypertree(&t, &params);
        let s = plan.path_stage().unwrap();
        if let Stage::Paths(p) = &mut plan.stages[s] {
            assert!(!p.is_empty());
            // drop the last edge of the first path: it becomes a length-2 path
            p[0].vertices[5] = p[0].vertices[6];
        }
        assert!(validate_split(&plan, &t, 40)
            .violations
            .iter()
            .any(|v| matches!(v, SplitViolation::InvalidPath { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn split_always_valid(edges in 1usize..300, seed in any::<u64>(), shape in 0usize..4,
                              d in 2usize..10, m in prop::option::of(4usize..12), adaptive in any::<bool>()) {
            let t = random_hypertree(edges, seed, TreeShape::ALL[shape]);
            let n = edges.max(30);
            let mut params = SplitParams::new(d, 0.1, n)
                .with_stop(if adaptive { SplitStop::Adaptive } else { SplitStop::Threshold });
            params.path_length = m;
            let plan = split_hypertree(&t, &params);
            let report = validate_split(&plan, &t, n);
            prop_assert!(report.is_valid(), "{:?}", report);
            prop_assert_eq!(split_hypertree(&t, &params), plan);
        }

        #[test]
        fn semi_bare_extraction_bound(edges in 2usize..400, seed in any::<u64>(), shape in 0usize..4, m in 2usize..10) {
            let t = random_hypertree(edges, seed, TreeShape::ALL[shape]);
            let paths = extract_semi_bare_paths(&t, m);
            let mut used = std::collections::HashSet::new();
            for p in &paths {
                prop_assert_eq!(p.len(), m + 1);
                prop_assert!(is_semi_bare_path(&t, p));
                for &e in p.edges() {
                    prop_assert!(used.insert(e));
                }
            }
            let leaves = leaf_edges(&t).len();
            prop_assert!(semi_bare_residual(edges, &paths) as f64 <= residual_bound(m, leaves, edges));
        }
    }
}
