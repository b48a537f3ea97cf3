//! Linear 3-graphs and Steiner triple systems.
//!
//! Vertices are dense integers `0..n`. Every graph keeps an incidence list per
//! vertex and a pair index mapping each covered pair to the unique edge that
//! contains it, so "complete the pair `{u, v}` to an edge" is a table lookup.

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::vset::VertexSet;

pub type Vertex = u32;

/// An unordered triple, stored in ascending order.
pub type Triple = [Vertex; 3];

pub(crate) const NONE: u32 = u32::MAX;

pub fn sorted_triple(a: Vertex, b: Vertex, c: Vertex) -> Triple {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StsError {
    #[error("edge list is not a linear 3-graph: {0}")]
    NotLinear(LinearityReport),
    #[error("linear 3-graph is not a Steiner triple system: {0}")]
    Incomplete(StsReport),
    #[error("order {0} is not admissible for this construction")]
    InadmissibleOrder(usize),
    #[error("invalid vertex pair ({0}, {1})")]
    InvalidVertex(Vertex, Vertex),
    #[error("hill climbing exhausted {0} steps without completing the system")]
    StepBudgetExhausted(u64),
}

/// Why a single edge is malformed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Malformation {
    RepeatedVertex,
    OutOfRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MalformedEdge {
    pub index: usize,
    pub reason: Malformation,
}

/// Two edges sharing the pair `pair`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairConflict {
    pub first: usize,
    pub second: usize,
    pub pair: (Vertex, Vertex),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearityReport {
    pub malformed: Vec<MalformedEdge>,
    pub conflicts: Vec<PairConflict>,
}

impl LinearityReport {
    pub fn is_valid(&self) -> bool {
        self.malformed.is_empty() && self.conflicts.is_empty()
    }
}

impl fmt::Display for LinearityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} malformed edge(s), {} conflicting pair(s)",
            self.malformed.len(),
            self.conflicts.len()
        )?;
        if let Some(c) = self.conflicts.first() {
            write!(
                f,
                "; first: edges {} and {} share {{{}, {}}}",
                c.first, c.second, c.pair.0, c.pair.1
            )?;
        }
        Ok(())
    }
}

/// Checks that `edges` form a linear 3-graph on `0..n`.
///
/// Two edges that share two or more vertices produce one conflict entry per
/// shared pair.
pub fn validate_linear(edges: &[Triple], n: usize) -> LinearityReport {
    let mut report = LinearityReport::default();
    let mut owner: HashMap<(Vertex, Vertex), usize> = HashMap::with_capacity(edges.len() * 3);
    for (index, e) in edges.iter().enumerate() {
        if e.iter().any(|&v| v as usize >= n) {
            report.malformed.push(MalformedEdge {
                index,
                reason: Malformation::OutOfRange,
            });
            continue;
        }
        let [a, b, c] = sorted_triple(e[0], e[1], e[2]);
        if a == b || b == c {
            report.malformed.push(MalformedEdge {
                index,
                reason: Malformation::RepeatedVertex,
            });
            continue;
        }
        for pair in [(a, b), (a, c), (b, c)] {
            if let Some(&first) = owner.get(&pair) {
                report.conflicts.push(PairConflict {
                    first,
                    second: index,
                    pair,
                });
            } else {
                owner.insert(pair, index);
            }
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum PairIndex {
    /// Triangular table over all pairs; used when the graph is dense.
    Dense(Vec<u32>),
    Sparse(HashMap<(Vertex, Vertex), u32>),
}

#[inline]
fn tri_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u < v && v < n);
    u * (2 * n - u - 1) / 2 + (v - u - 1)
}

/// A linear 3-uniform hypergraph on vertices `0..n`.
#[derive(Clone, PartialEq, Eq)]
pub struct LinearThreeGraph {
    n: usize,
    edges: Vec<Triple>,
    incidence: Vec<Vec<u32>>,
    pairs: PairIndex,
}

impl fmt::Debug for LinearThreeGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearThreeGraph")
            .field("n", &self.n)
            .field("edges", &self.edges)
            .finish()
    }
}

impl LinearThreeGraph {
    /// Builds the graph, sorting each triple. Fails with the full
    /// [`LinearityReport`] if the input is not linear.
    pub fn new(n: usize, edges: Vec<Triple>) -> Result<Self, StsError> {
        let report = validate_linear(&edges, n);
        if !report.is_valid() {
            return Err(StsError::NotLinear(report));
        }
        let edges: Vec<Triple> = edges
            .into_iter()
            .map(|e| sorted_triple(e[0], e[1], e[2]))
            .collect();
        Ok(Self::from_valid(n, edges))
    }

    /// `edges` must already be sorted, in range and linear.
    pub(crate) fn from_valid(n: usize, edges: Vec<Triple>) -> Self {
        let mut incidence = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            for &v in e {
                incidence[v as usize].push(id as u32);
            }
        }
        let total_pairs = n.saturating_sub(1) * n / 2;
        let dense = n <= 512 || 3 * edges.len() * 8 >= total_pairs;
        let pairs = if dense {
            let mut table = vec![NONE; total_pairs];
            for (id, &[a, b, c]) in edges.iter().enumerate() {
                let (a, b, c) = (a as usize, b as usize, c as usize);
                table[tri_index(n, a, b)] = id as u32;
                table[tri_index(n, a, c)] = id as u32;
                table[tri_index(n, b, c)] = id as u32;
            }
            PairIndex::Dense(table)
        } else {
            let mut map = HashMap::with_capacity(edges.len() * 3);
            for (id, &[a, b, c]) in edges.iter().enumerate() {
                map.insert((a, b), id as u32);
                map.insert((a, c), id as u32);
                map.insert((b, c), id as u32);
            }
            PairIndex::Sparse(map)
        };
        LinearThreeGraph {
            n,
            edges,
            incidence,
            pairs,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Triple] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, id: usize) -> Triple {
        self.edges[id]
    }

    /// Ids of the edges containing `v`.
    #[inline]
    pub fn edges_through(&self, v: Vertex) -> &[u32] {
        &self.incidence[v as usize]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.incidence[v as usize].len()
    }

    pub fn min_degree(&self) -> usize {
        self.incidence.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Number of vertices sharing an edge with `v`; always `2 * degree(v)`.
    pub fn neighbour_count(&self, v: Vertex) -> usize {
        let mut seen = VertexSet::new(self.n);
        for &id in self.edges_through(v) {
            for &w in &self.edges[id as usize] {
                if w != v {
                    seen.insert(w);
                }
            }
        }
        seen.len()
    }

    /// The edge containing both `u` and `v`, if any.
    #[inline]
    pub fn edge_of_pair(&self, u: Vertex, v: Vertex) -> Option<usize> {
        if u == v || u as usize >= self.n || v as usize >= self.n {
            return None;
        }
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        let id = match &self.pairs {
            PairIndex::Dense(t) => t[tri_index(self.n, a as usize, b as usize)],
            PairIndex::Sparse(m) => *m.get(&(a, b)).unwrap_or(&NONE),
        };
        (id != NONE).then_some(id as usize)
    }

    /// The vertex completing `{u, v}` to an edge, if the pair is covered.
    #[inline]
    pub fn complete_pair(&self, u: Vertex, v: Vertex) -> Option<Vertex> {
        self.edge_of_pair(u, v).map(|id| {
            let e = self.edges[id];
            e[0] ^ e[1] ^ e[2] ^ u ^ v
        })
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex, c: Vertex) -> bool {
        self.complete_pair(a, b) == Some(c)
    }
}

/// Coverage report for [`validate_sts`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StsReport {
    pub uncovered: Vec<(Vertex, Vertex)>,
    pub edge_count: usize,
    pub expected_edge_count: usize,
}

impl StsReport {
    pub fn is_valid(&self) -> bool {
        self.uncovered.is_empty() && self.edge_count == self.expected_edge_count
    }
}

impl fmt::Display for StsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} uncovered pair(s), {} of {} edges",
            self.uncovered.len(),
            self.edge_count,
            self.expected_edge_count
        )
    }
}

/// Lists every pair of `g` not covered by an edge.
pub fn validate_sts(g: &LinearThreeGraph) -> StsReport {
    let n = g.n();
    let mut uncovered = Vec::new();
    for u in 0..n as Vertex {
        for v in u + 1..n as Vertex {
            if g.edge_of_pair(u, v).is_none() {
                uncovered.push((u, v));
            }
        }
    }
    StsReport {
        uncovered,
        edge_count: g.num_edges(),
        expected_edge_count: n * n.saturating_sub(1) / 6,
    }
}

pub fn is_admissible_order(n: usize) -> bool {
    n % 6 == 1 || n % 6 == 3
}

/// A linear 3-graph in which every pair of vertices lies in exactly one edge.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SteinerTripleSystem {
    graph: LinearThreeGraph,
}

impl SteinerTripleSystem {
    pub fn try_new(graph: LinearThreeGraph) -> Result<Self, StsError> {
        let report = validate_sts(&graph);
        if report.is_valid() {
            Ok(SteinerTripleSystem { graph })
        } else {
            Err(StsError::Incomplete(report))
        }
    }

    pub fn from_edges(n: usize, edges: Vec<Triple>) -> Result<Self, StsError> {
        Self::try_new(LinearThreeGraph::new(n, edges)?)
    }

    pub fn graph(&self) -> &LinearThreeGraph {
        &self.graph
    }

    pub fn into_graph(self) -> LinearThreeGraph {
        self.graph
    }

    /// The unique `w` with `{u, v, w}` an edge.
    pub fn third_vertex(&self, u: Vertex, v: Vertex) -> Result<Vertex, StsError> {
        self.graph
            .complete_pair(u, v)
            .ok_or(StsError::InvalidVertex(u, v))
    }
}

impl Deref for SteinerTripleSystem {
    type Target = LinearThreeGraph;

    fn deref(&self) -> &LinearThreeGraph {
        &self.graph
    }
}

/// Number of edges `{x, y, z}` of `g` admitting an assignment `x ∈ a`,
/// `y ∈ b`, `z ∈ c`. The sets may overlap; each qualifying edge counts once.
pub fn count_edges(g: &LinearThreeGraph, a: &VertexSet, b: &VertexSet, c: &VertexSet) -> usize {
    // every qualifying edge meets the smallest set, so scan only its edges
    let sets = [a, b, c];
    let smallest = sets.iter().min_by_key(|s| s.len()).expect("three sets");
    let mut seen = vec![false; g.num_edges()];
    let mut count = 0;
    for v in smallest.iter() {
        if v as usize >= g.n() {
            continue;
        }
        for &id in g.edges_through(v) {
            let id = id as usize;
            if seen[id] {
                continue;
            }
            seen[id] = true;
            if admits_assignment(g.edge(id), a, b, c) {
                count += 1;
            }
        }
    }
    count
}

pub(crate) fn admits_assignment(e: Triple, a: &VertexSet, b: &VertexSet, c: &VertexSet) -> bool {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    PERMS
        .iter()
        .any(|p| a.contains(e[p[0]]) && b.contains(e[p[1]]) && c.contains(e[p[2]]))
}

/// Bose construction of an STS on `6k + 3` vertices from the idempotent
/// commutative quasigroup `x ∘ y = (x + y) / 2 (mod 2k + 1)`.
///
/// Vertex `(x, i)` with `x ∈ Z_{2k+1}`, `i ∈ Z_3` is numbered `i(2k+1) + x`.
pub fn bose_construct(k: usize) -> SteinerTripleSystem {
    assert!(k >= 1, "Bose construction needs k >= 1");
    let q = 2 * k + 1;
    let half = k + 1; // inverse of 2 modulo q
    let id = |x: usize, i: usize| (i * q + x) as Vertex;
    let mut edges = Vec::with_capacity((6 * k + 3) * (6 * k + 2) / 6);
    for x in 0..q {
        edges.push(sorted_triple(id(x, 0), id(x, 1), id(x, 2)));
    }
    for i in 0..3 {
        for x in 0..q {
            for y in x + 1..q {
                let z = (x + y) * half % q;
                edges.push(sorted_triple(id(x, i), id(y, i), id(z, (i + 1) % 3)));
            }
        }
    }
    SteinerTripleSystem::from_edges(6 * k + 3, edges).expect("Bose construction is an STS")
}

/// Skolem construction of an STS on `6k + 1` vertices from a half-idempotent
/// commutative quasigroup of order `2k`.
///
/// The quasigroup relabels addition mod `2k` so that `x ∘ x = (x + k) ∘ (x + k) = x`.
/// Vertex `(x, i)` is numbered `i·2k + x`; the extra point is `6k`.
pub fn skolem_construct(k: usize) -> SteinerTripleSystem {
    assert!(k >= 1, "Skolem construction needs k >= 1");
    let q = 2 * k;
    let relabel = |s: usize| if s.is_multiple_of(2) { s / 2 } else { s / 2 + k };
    let op = |x: usize, y: usize| relabel((x + y) % q);
    let id = |x: usize, i: usize| (i * q + x) as Vertex;
    let inf = (6 * k) as Vertex;
    let mut edges = Vec::with_capacity((6 * k + 1) * 6 * k / 6);
    for x in 0..k {
        edges.push(sorted_triple(id(x, 0), id(x, 1), id(x, 2)));
    }
    for x in 0..k {
        for i in 0..3 {
            edges.push(sorted_triple(inf, id(x + k, i), id(x, (i + 1) % 3)));
        }
    }
    for i in 0..3 {
        for x in 0..q {
            for y in x + 1..q {
                edges.push(sorted_triple(id(x, i), id(y, i), id(op(x, y), (i + 1) % 3)));
            }
        }
    }
    SteinerTripleSystem::from_edges(6 * k + 1, edges).expect("Skolem construction is an STS")
}

/// Randomized hill climbing on partial triple systems using the classic
/// switch move: pick a live point `x` and two uncovered partners `y, z`; if
/// `{y, z}` is covered by `{y, z, w}`, replace that triple by `{x, y, z}`.
pub fn hill_climb_random(n: usize, seed: u64, max_steps: u64) -> Result<SteinerTripleSystem, StsError> {
    if n < 7 || !is_admissible_order(n) {
        return Err(StsError::InadmissibleOrder(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = n * (n - 1) / 6;
    let full_degree = (n - 1) / 2;
    let mut third = vec![NONE; n * n];
    let mut degree = vec![0usize; n];
    let mut live: Vec<u32> = (0..n as u32).collect();
    let mut live_pos: Vec<usize> = (0..n).collect();
    let mut triples = 0usize;
    let mut partners = Vec::with_capacity(n);

    fn set_live(v: usize, on: bool, live: &mut Vec<u32>, pos: &mut [usize]) {
        let present = pos[v] != usize::MAX;
        if on && !present {
            pos[v] = live.len();
            live.push(v as u32);
        } else if !on && present {
            let i = pos[v];
            let last = *live.last().expect("non-empty");
            live.swap_remove(i);
            if last as usize != v {
                pos[last as usize] = i;
            }
            pos[v] = usize::MAX;
        }
    }

    let link = |a: usize, b: usize, c: usize, third: &mut [u32]| {
        third[a * n + b] = c as u32;
        third[b * n + a] = c as u32;
        third[a * n + c] = b as u32;
        third[c * n + a] = b as u32;
        third[b * n + c] = a as u32;
        third[c * n + b] = a as u32;
    };

    let mut steps = 0u64;
    while triples < target {
        if steps >= max_steps {
            return Err(StsError::StepBudgetExhausted(max_steps));
        }
        steps += 1;
        let x = live[rng.gen_range(0..live.len())] as usize;
        partners.clear();
        partners.extend((0..n).filter(|&t| t != x && third[x * n + t] == NONE));
        debug_assert!(partners.len() >= 2);
        let (&y, &z) = {
            let mut pick = partners.choose_multiple(&mut rng, 2);
            (pick.next().expect("two partners"), pick.next().expect("two partners"))
        };
        let w = third[y * n + z];
        if w == NONE {
            link(x, y, z, &mut third);
            triples += 1;
            for v in [x, y, z] {
                degree[v] += 1;
            }
        } else {
            let w = w as usize;
            for (a, b) in [(y, z), (y, w), (z, w)] {
                third[a * n + b] = NONE;
                third[b * n + a] = NONE;
            }
            link(x, y, z, &mut third);
            degree[x] += 1;
            degree[w] -= 1;
        }
        for v in [x, y, z, w as usize] {
            if v < n {
                set_live(v, degree[v] < full_degree, &mut live, &mut live_pos);
            }
        }
    }

    let mut edges = Vec::with_capacity(target);
    for u in 0..n {
        for v in u + 1..n {
            let w = third[u * n + v] as usize;
            if w > v {
                edges.push([u as Vertex, v as Vertex, w as Vertex]);
            }
        }
    }
    SteinerTripleSystem::from_edges(n, edges)
}

/// Construction method for [`construct`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StsMethod {
    Bose,
    Skolem,
    HillClimb,
}

pub const DEFAULT_HILL_CLIMB_STEPS: u64 = 50_000_000;

/// Builds an STS of order `n` with the requested method.
pub fn construct(n: usize, method: StsMethod, seed: u64) -> Result<SteinerTripleSystem, StsError> {
    match method {
        StsMethod::Bose if n >= 9 && n % 6 == 3 => Ok(bose_construct((n - 3) / 6)),
        StsMethod::Skolem if n >= 7 && n % 6 == 1 => Ok(skolem_construct((n - 1) / 6)),
        StsMethod::HillClimb => hill_climb_random(n, seed, DEFAULT_HILL_CLIMB_STEPS),
        _ => Err(StsError::InadmissibleOrder(n)),
    }
}

/// The Fano plane on `0..7`.
pub fn fano() -> SteinerTripleSystem {
    let lines = vec![
        [0, 1, 2],
        [0, 3, 4],
        [0, 5, 6],
        [1, 3, 5],
        [1, 4, 6],
        [2, 3, 6],
        [2, 4, 5],
    ];
    SteinerTripleSystem::from_edges(7, lines).expect("Fano plane is an STS")
}
