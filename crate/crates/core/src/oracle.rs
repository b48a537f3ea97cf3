//! Exact brute-force references for small instances.
//!
//! Everything here is plain enumeration with assertions and is meant for
//! `n ≤ ~31`.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::embed::nibble::NibbleInstance;
use crate::embed::Embedding;
use crate::hypertree::Hypertree;
use crate::sts::{LinearThreeGraph, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("search budget exceeded after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },
    #[error("search budget must be positive")]
    InvalidBudget,
    #[error("path ends must differ (both are {0})")]
    SameEndpoints(Vertex),
}

/// Limits on a search: visited nodes and wall time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub node_limit: u64,
    pub time_limit: Duration,
}

impl SearchBudget {
    pub fn new(node_limit: u64, time_limit: Duration) -> Result<Self, OracleError> {
        if node_limit == 0 || time_limit.is_zero() {
            return Err(OracleError::InvalidBudget);
        }
        Ok(SearchBudget { node_limit, time_limit })
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            node_limit: 50_000_000,
            time_limit: Duration::from_secs(30),
        }
    }
}

struct Meter {
    budget: SearchBudget,
    start: Instant,
    nodes: u64,
}

impl Meter {
    fn new(budget: SearchBudget) -> Self {
        Meter {
            budget,
            start: Instant::now(),
            nodes: 0,
        }
    }

    fn tick(&mut self) -> Result<(), OracleError> {
        self.nodes += 1;
        let over_time = self.nodes.is_multiple_of(1024) && self.start.elapsed() > self.budget.time_limit;
        if self.nodes > self.budget.node_limit || over_time {
            return Err(OracleError::BudgetExceeded { nodes: self.nodes });
        }
        Ok(())
    }
}

/// Outcome of an exact embedding search.
#[derive(Debug, Clone, PartialEq)]
pub enum SearchResult {
    Found(Embedding),
    /// The search space was exhausted: no embedding exists.
    Infeasible,
}

impl SearchResult {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchResult::Found(_))
    }
}

/// Decides whether `t` embeds into `g` by backtracking over the attachment
/// order of `t`. Each new edge is mapped onto a host edge through the image
/// of its attachment vertex whose two other vertices are unused.
///
/// Vertices that are leaves of `t` and share an edge are interchangeable, so
/// only one of their orderings is tried.
pub fn backtrack_embed(g: &LinearThreeGraph, t: &Hypertree, budget: SearchBudget) -> Result<SearchResult, OracleError> {
    let mut meter = Meter::new(budget);
    let mut phi = Embedding::new(t.n(), g.n());
    if t.num_edges() == 0 {
        if g.n() == 0 {
            return Ok(SearchResult::Infeasible);
        }
        phi.assign(0, 0);
        return Ok(SearchResult::Found(phi));
    }
    if t.n() > g.n() {
        return Ok(SearchResult::Infeasible);
    }
    let steps: Vec<(usize, Vertex)> = t.attachments().collect();
    let leaf = |v: Vertex| t.degree(v) == 1;

    let (first, _) = steps[0];
    let e0 = t.edge(first);
    const ORDERS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for id in 0..g.num_edges() {
        let h = g.edge(id);
        for ord in ORDERS {
            let img = [h[ord[0]], h[ord[1]], h[ord[2]]];
            // interchangeable leaves take increasing images
            let redundant = (0..3).any(|i| (i + 1..3).any(|j| leaf(e0[i]) && leaf(e0[j]) && img[i] > img[j]));
            if redundant {
                continue;
            }
            meter.tick()?;
            for k in 0..3 {
                phi.assign(e0[k], img[k]);
            }
            if extend(g, t, &steps, 1, &mut phi, &mut meter)? {
                return Ok(SearchResult::Found(phi));
            }
            phi = Embedding::new(t.n(), g.n());
        }
    }
    Ok(SearchResult::Infeasible)
}

fn extend(
    g: &LinearThreeGraph,
    t: &Hypertree,
    steps: &[(usize, Vertex)],
    i: usize,
    phi: &mut Embedding,
    meter: &mut Meter,
) -> Result<bool, OracleError> {
    if i == steps.len() {
        return Ok(true);
    }
    let (edge, attach) = steps[i];
    let new: Vec<Vertex> = t.edge(edge).into_iter().filter(|&w| w != attach).collect();
    assert_eq!(new.len(), 2);
    let (x, y) = (new[0], new[1]);
    assert!(phi.get(x).is_none() && phi.get(y).is_none(), "attachment order adds two new vertices");
    let symmetric = t.degree(x) == 1 && t.degree(y) == 1;
    let ga = phi.image(attach);
    for &id in g.edges_through(ga) {
        let h = g.edge(id as usize);
        let mut o = h.into_iter().filter(|&w| w != ga);
        let (p, q) = (o.next().unwrap(), o.next().unwrap());
        if phi.is_used(p) || phi.is_used(q) {
            continue;
        }
        for (px, py) in [(p, q), (q, p)] {
            if symmetric && px > py {
                continue;
            }
            meter.tick()?;
            let saved = phi.clone();
            phi.assign(x, px);
            phi.assign(y, py);
            if extend(g, t, steps, i + 1, phi, meter)? {
                return Ok(true);
            }
            *phi = saved;
        }
    }
    Ok(false)
}

/// Number of `u`–`v` Berge paths of length 3: edges `e1 ∋ u` and `e3 ∋ v`
/// joined by the middle edge through `y1 ∈ e1` and `y2 ∈ e3`, with the three
/// edges spanning seven distinct vertices.
pub fn count_paths_len3(g: &LinearThreeGraph, u: Vertex, v: Vertex) -> Result<u64, OracleError> {
    if u == v {
        return Err(OracleError::SameEndpoints(u));
    }
    let mut count = 0;
    for &i1 in g.edges_through(u) {
        let e1 = g.edge(i1 as usize);
        for &i3 in g.edges_through(v) {
            let e3 = g.edge(i3 as usize);
            if i1 == i3 {
                continue;
            }
            for &y1 in e1.iter().filter(|&&w| w != u) {
                for &y2 in e3.iter().filter(|&&w| w != v) {
                    if y1 == y2 {
                        continue;
                    }
                    let Some(i2) = g.edge_of_pair(y1, y2) else { continue };
                    if i2 == i1 as usize || i2 == i3 as usize {
                        continue;
                    }
                    let e2 = g.edge(i2);
                    let mut all: Vec<Vertex> = e1.iter().chain(&e2).chain(&e3).copied().collect();
                    all.sort_unstable();
                    all.dedup();
                    if all.len() == 7 {
                        assert!(e1.contains(&u) && e3.contains(&v) && e2.contains(&y1) && e2.contains(&y2));
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

/// Maximum matching of `h` by branch and bound; returns edge indices in
/// ascending order.
///
/// Branches on the lowest vertex that still has usable edges: either one of
/// its edges joins the matching or the vertex stays uncovered. A branch is
/// cut when even covering every remaining usable vertex cannot beat the best
/// matching found.
pub fn max_matching_exact(h: &NibbleInstance, budget: SearchBudget) -> Result<Vec<usize>, OracleError> {
    let mut meter = Meter::new(budget);
    let n = h.n();
    let mut inc: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in h.edges().iter().enumerate() {
        for &v in e {
            inc[v as usize].push(i);
        }
    }
    let mut state = Search {
        h,
        inc: &inc,
        covered: vec![false; n],
        skipped: vec![false; n],
        current: Vec::new(),
        best: Vec::new(),
    };
    state.run(&mut meter)?;
    let mut best = state.best;
    best.sort_unstable();
    let mut seen = vec![false; n];
    for &id in &best {
        for &v in &h.edges()[id] {
            assert!(!std::mem::replace(&mut seen[v as usize], true), "matching edges are disjoint");
        }
    }
    Ok(best)
}

struct Search<'a> {
    h: &'a NibbleInstance,
    inc: &'a [Vec<usize>],
    covered: Vec<bool>,
    skipped: Vec<bool>,
    current: Vec<usize>,
    best: Vec<usize>,
}

impl Search<'_> {
    fn usable(&self, id: usize) -> bool {
        self.h.edges()[id]
            .iter()
            .all(|&v| !self.covered[v as usize] && !self.skipped[v as usize])
    }

    fn run(&mut self, meter: &mut Meter) -> Result<(), OracleError> {
        meter.tick()?;
        if self.current.len() > self.best.len() {
            self.best = self.current.clone();
        }
        let open: Vec<usize> = (0..self.h.n())
            .filter(|&v| self.inc[v].iter().any(|&id| self.usable(id)))
            .collect();
        if self.current.len() + open.len() / 3 <= self.best.len() {
            return Ok(());
        }
        let v = open[0];
        let edges: Vec<usize> = self.inc[v].iter().copied().filter(|&id| self.usable(id)).collect();
        for id in edges {
            let e = self.h.edges()[id];
            for &w in &e {
                self.covered[w as usize] = true;
            }
            self.current.push(id);
            self.run(meter)?;
            self.current.pop();
            for &w in &e {
                self.covered[w as usize] = false;
            }
        }
        self.skipped[v] = true;
        self.run(meter)?;
        self.skipped[v] = false;
        Ok(())
    }
}
