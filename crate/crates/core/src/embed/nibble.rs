//! Semi-random nibble for near-perfect matchings in 3-uniform hypergraphs.
//!
//! Each round selects every surviving edge independently with probability
//! `γ / Δ`, where `Δ` is the current maximum degree, keeps the selected edges
//! that meet no other selected edge, and deletes their vertices. When the
//! surviving hypergraph is sparse the matching is completed greedily and
//! improved by one pass of exchanges that trade one matching edge for two.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sts::LinearThreeGraph;

/// Round parameter of the nibble.
pub const DEFAULT_GAMMA: f64 = 0.1;

/// An auxiliary 3-uniform hypergraph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct NibbleInstance {
    n: usize,
    edges: Vec<[u32; 3]>,
    target_degree: f64,
    codegree_cap: usize,
    gamma: f64,
}

/// Degree and codegree profile of an instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conditioning {
    pub min_degree: usize,
    pub max_degree: usize,
    pub max_codegree: usize,
}

impl NibbleInstance {
    /// Edges must have three distinct vertices below `n`.
    pub fn new(n: usize, edges: Vec<[u32; 3]>) -> Self {
        for e in &edges {
            assert!(e.iter().all(|&v| (v as usize) < n), "edge vertex out of range");
            assert!(e[0] != e[1] && e[1] != e[2] && e[0] != e[2], "repeated vertex in edge");
        }
        let active = {
            let mut deg = vec![0usize; n];
            for e in &edges {
                for &v in e {
                    deg[v as usize] += 1;
                }
            }
            deg.iter().filter(|&&d| d > 0).count().max(1)
        };
        let target_degree = 3.0 * edges.len() as f64 / active as f64;
        NibbleInstance {
            n,
            edges,
            target_degree,
            codegree_cap: 1,
            gamma: DEFAULT_GAMMA,
        }
    }

    /// The whole graph as an instance.
    pub fn from_graph(g: &LinearThreeGraph) -> Self {
        NibbleInstance::new(g.n(), g.edges().to_vec())
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        assert!(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0, 1]");
        self.gamma = gamma;
        self
    }

    pub fn with_codegree_cap(mut self, cap: usize) -> Self {
        self.codegree_cap = cap;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[[u32; 3]] {
        &self.edges
    }

    pub fn target_degree(&self) -> f64 {
        self.target_degree
    }

    pub fn codegree_cap(&self) -> usize {
        self.codegree_cap
    }

    pub fn conditioning(&self) -> Conditioning {
        let mut deg = vec![0usize; self.n];
        let mut pairs = std::collections::HashMap::new();
        for e in &self.edges {
            for &v in e {
                deg[v as usize] += 1;
            }
            for (a, b) in [(e[0], e[1]), (e[0], e[2]), (e[1], e[2])] {
                *pairs.entry((a.min(b), a.max(b))).or_insert(0usize) += 1;
            }
        }
        let live: Vec<usize> = deg.into_iter().filter(|&d| d > 0).collect();
        Conditioning {
            min_degree: live.iter().copied().min().unwrap_or(0),
            max_degree: live.iter().copied().max().unwrap_or(0),
            max_codegree: pairs.values().copied().max().unwrap_or(0),
        }
    }

    /// Whether all non-isolated degrees lie in `(1 ± delta)·D̂` and pair
    /// codegrees stay within the cap.
    pub fn is_well_conditioned(&self, delta: f64) -> bool {
        let c = self.conditioning();
        let d = self.target_degree;
        (c.min_degree as f64) >= (1.0 - delta) * d
            && (c.max_degree as f64) <= (1.0 + delta) * d
            && c.max_codegree <= self.codegree_cap
    }
}

fn incidence(h: &NibbleInstance) -> Vec<Vec<u32>> {
    let mut inc = vec![Vec::new(); h.n];
    for (i, e) in h.edges.iter().enumerate() {
        for &v in e {
            inc[v as usize].push(i as u32);
        }
    }
    inc
}

/// Returns indices (into `h.edges()`, ascending) of pairwise-disjoint edges.
///
/// `eps` is the uncovered fraction at which the random rounds give way to
/// the greedy completion.
pub fn nibble_matching(h: &NibbleInstance, eps: f64, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    nibble_matching_with(h, eps, &mut rng)
}

pub fn nibble_matching_with<R: Rng + ?Sized>(h: &NibbleInstance, eps: f64, rng: &mut R) -> Vec<usize> {
    let n = h.n;
    let mut alive = vec![true; n];
    let mut matching: Vec<usize> = Vec::new();
    let mut live: Vec<u32> = (0..h.edges.len() as u32).collect();
    let mut deg = vec![0u32; n];
    let mut picks = vec![0u8; n];
    let mut selected: Vec<u32> = Vec::new();
    let touched = {
        let mut t = vec![false; n];
        for e in &h.edges {
            for &v in e {
                t[v as usize] = true;
            }
        }
        t.iter().filter(|&&b| b).count()
    };
    let stop_uncovered = (eps.clamp(0.0, 1.0) * touched as f64 / 2.0).max(1.0);
    let mut uncovered = touched as f64;

    loop {
        deg.iter_mut().for_each(|d| *d = 0);
        for &id in &live {
            for &v in &h.edges[id as usize] {
                deg[v as usize] += 1;
            }
        }
        let max_deg = deg.iter().copied().max().unwrap_or(0);
        // sparse remainder: hand over to the greedy completion
        if live.is_empty() || max_deg <= 2 || uncovered <= stop_uncovered {
            break;
        }
        let p = h.gamma / max_deg as f64;
        selected.clear();
        for &id in &live {
            if rng.gen_bool(p) {
                selected.push(id);
                for &v in &h.edges[id as usize] {
                    picks[v as usize] = picks[v as usize].saturating_add(1);
                }
            }
        }
        for &id in &selected {
            let e = h.edges[id as usize];
            if e.iter().all(|&v| picks[v as usize] == 1) {
                matching.push(id as usize);
                for &v in &e {
                    alive[v as usize] = false;
                }
                uncovered -= 3.0;
            }
        }
        for &id in &selected {
            for &v in &h.edges[id as usize] {
                picks[v as usize] = 0;
            }
        }
        live.retain(|&id| h.edges[id as usize].iter().all(|&v| alive[v as usize]));
    }

    live.shuffle(rng);
    for &id in &live {
        let e = h.edges[id as usize];
        if e.iter().all(|&v| alive[v as usize]) {
            matching.push(id as usize);
            for &v in &e {
                alive[v as usize] = false;
            }
        }
    }

    exchange_pass(h, &mut matching, &mut alive);
    matching.sort_unstable();
    debug_assert!(is_matching(h, &matching));
    matching
}

/// One pass over the matching: replace an edge `e` by two disjoint edges
/// inside `V(e) ∪ free` whenever possible.
fn exchange_pass(h: &NibbleInstance, matching: &mut Vec<usize>, alive: &mut [bool]) {
    let inc = incidence(h);
    let mut i = 0;
    while i < matching.len() {
        let e = h.edges[matching[i]];
        let inside = |v: u32, alive: &[bool]| alive[v as usize] || e.contains(&v);
        let mut cands: Vec<usize> = Vec::new();
        for &v in &e {
            for &f in &inc[v as usize] {
                let f = f as usize;
                if f != matching[i] && h.edges[f].iter().all(|&w| inside(w, alive)) && !cands.contains(&f) {
                    cands.push(f);
                }
            }
        }
        let mut swap = None;
        'outer: for (a, &f) in cands.iter().enumerate() {
            for &g in &cands[a + 1..] {
                let (ef, eg) = (h.edges[f], h.edges[g]);
                if ef.iter().all(|v| !eg.contains(v)) {
                    swap = Some((f, g));
                    break 'outer;
                }
            }
        }
        match swap {
            Some((f, g)) => {
                for &v in &e {
                    alive[v as usize] = true;
                }
                for &v in h.edges[f].iter().chain(&h.edges[g]) {
                    alive[v as usize] = false;
                }
                matching[i] = f;
                matching.push(g);
                i += 1;
            }
            None => i += 1,
        }
    }
}

pub(crate) fn is_matching(h: &NibbleInstance, matching: &[usize]) -> bool {
    let mut seen = vec![false; h.n];
    for &id in matching {
        for &v in &h.edges[id] {
            if std::mem::replace(&mut seen[v as usize], true) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sts::{bose_construct, fano};

    #[test]
    fn single_edge() {
        let h = NibbleInstance::new(3, vec![[0, 1, 2]]);
        assert_eq!(nibble_matching(&h, 0.1, 0), vec![0]);
    }

    #[test]
    fn empty_instance() {
        let h = NibbleInstance::new(5, vec![]);
        assert!(nibble_matching(&h, 0.1, 0).is_empty());
    }

    #[test]
    fn small_systems() {
        let h = NibbleInstance::from_graph(bose_construct(1).graph());
        for seed in 0..20 {
            let m = nibble_matching(&h, 0.1, seed);
            assert!(m.len() >= 2);
            assert!(is_matching(&h, &m));
        }
        let h = NibbleInstance::from_graph(fano().graph());
        let m = nibble_matching(&h, 0.1, 3);
        assert!(m.len() <= 2 && !m.is_empty());
    }

    #[test]
    fn exchange_grows_matching() {
        // {1,2,3} blocks both {0,1,6} and {2,4,5}
        let h = NibbleInstance::new(7, vec![[1, 2, 3], [0, 1, 6], [2, 4, 5]]);
        let mut alive = vec![true; 7];
        for v in [1, 2, 3] {
            alive[v] = false;
        }
        let mut m = vec![0];
        exchange_pass(&h, &mut m, &mut alive);
        m.sort();
        assert_eq!(m, vec![1, 2]);
    }

    #[test]
    fn conditioning_of_sts() {
        let h = NibbleInstance::from_graph(bose_construct(1).graph());
        let c = h.conditioning();
        assert_eq!((c.min_degree, c.max_degree, c.max_codegree), (4, 4, 1));
        assert!(h.is_well_conditioned(0.0));
    }
}
