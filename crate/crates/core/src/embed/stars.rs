//! Vertex-disjoint stars with prescribed centres and sizes.
//!
//! Stars are first filled greedily. A star `S` centred at `c` that is still
//! short is grown by an augmenting switch: starting from the free vertices
//! `A_1`, alternate `B_i = N(A_i, {c})` (the `c`-links of `A_i`) and
//! `A_{i+1} = N_M(B_i)` (the leaf partners of `B_i`) until some `y_k ∈ B_k`
//! is free. Along the walk `x_1 y_1 x_2 y_2 … x_k y_k` every leaf pair
//! `y_i x_{i+1}` is deleted from its star and every `x_i y_i` is added to
//! `S`, which raises the total star size by exactly one.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::sts::{LinearThreeGraph, Vertex};
use crate::vset::VertexSet;

/// Search depth used when a request does not set one.
pub const DEFAULT_MAX_LEVELS: usize = 101;

/// Shuffled restarts tried when switching stalls.
pub const DEFAULT_RESTARTS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StarError {
    #[error("centre {0} is listed twice")]
    DuplicateCenter(Vertex),
    #[error("star {0} has size zero")]
    ZeroSize(usize),
    #[error("{centers} centres but {sizes} sizes")]
    LengthMismatch { centers: usize, sizes: usize },
    #[error("centre {0} is out of range")]
    CenterOutOfRange(Vertex),
    #[error("no augmenting switch for star {star} at size {size} of {target}")]
    AugmentationExhausted {
        star: usize,
        size: usize,
        target: usize,
    },
}

/// Centres and target sizes for [`embed_stars`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarRequest {
    centers: Vec<Vertex>,
    sizes: Vec<usize>,
    max_levels: usize,
    restarts: usize,
}

impl StarRequest {
    pub fn new(centers: Vec<Vertex>, sizes: Vec<usize>) -> Result<Self, StarError> {
        if centers.len() != sizes.len() {
            return Err(StarError::LengthMismatch {
                centers: centers.len(),
                sizes: sizes.len(),
            });
        }
        let mut seen = std::collections::HashSet::new();
        for &c in &centers {
            if !seen.insert(c) {
                return Err(StarError::DuplicateCenter(c));
            }
        }
        if let Some(i) = sizes.iter().position(|&s| s == 0) {
            return Err(StarError::ZeroSize(i));
        }
        Ok(StarRequest {
            centers,
            sizes,
            max_levels: DEFAULT_MAX_LEVELS,
            restarts: DEFAULT_RESTARTS,
        })
    }

    /// Caps the number of frontier levels explored per switch.
    pub fn with_max_levels(mut self, levels: usize) -> Self {
        self.max_levels = levels.max(1);
        self
    }

    /// Extra attempts from shuffled greedy fillings when switching stalls.
    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn centers(&self) -> &[Vertex] {
        &self.centers
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn max_levels(&self) -> usize {
        self.max_levels
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

/// A star in the host graph: each leaf pair together with the centre is an
/// edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddedStar {
    pub center: Vertex,
    pub leaves: Vec<[Vertex; 2]>,
}

impl EmbeddedStar {
    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn leaf_vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.leaves.iter().flatten().copied()
    }
}

/// Counters from one [`embed_stars_with_stats`] call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StarStats {
    pub greedy_edges: usize,
    pub switches: usize,
    pub longest_switch: usize,
    pub trimmed: usize,
}

/// Working state of the star embedding: the stars, the leaf matching `M`
/// (each leaf knows its pair), the frontier families of the last search and
/// the set `W` of free vertices whose link to the centre is blocked.
#[derive(Debug, Clone)]
pub struct AugmentState<'g> {
    g: &'g LinearThreeGraph,
    centers: Vec<Vertex>,
    targets: Vec<usize>,
    max_levels: usize,
    stars: Vec<Vec<[Vertex; 2]>>,
    /// `(star, index)` of the leaf pair holding a vertex.
    slot: Vec<Option<(u32, u32)>>,
    blocked: VertexSet,
    pub a_levels: Vec<Vec<Vertex>>,
    pub b_levels: Vec<Vec<Vertex>>,
    pub excluded: VertexSet,
    stats: StarStats,
}

impl<'g> AugmentState<'g> {
    pub fn new(g: &'g LinearThreeGraph, req: &StarRequest, forbidden: &VertexSet) -> Result<Self, StarError> {
        let mut blocked = VertexSet::new(g.n());
        for v in forbidden.iter() {
            if (v as usize) < g.n() {
                blocked.insert(v);
            }
        }
        for &c in &req.centers {
            if c as usize >= g.n() {
                return Err(StarError::CenterOutOfRange(c));
            }
            blocked.insert(c);
        }
        Ok(AugmentState {
            g,
            centers: req.centers.clone(),
            targets: req.sizes.clone(),
            max_levels: req.max_levels,
            stars: vec![Vec::new(); req.len()],
            slot: vec![None; g.n()],
            blocked,
            a_levels: Vec::new(),
            b_levels: Vec::new(),
            excluded: VertexSet::new(g.n()),
            stats: StarStats::default(),
        })
    }

    #[inline]
    fn is_free(&self, v: Vertex) -> bool {
        !self.blocked.contains(v) && self.slot[v as usize].is_none()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.stars.iter().map(Vec::len).collect()
    }

    pub fn total(&self) -> usize {
        self.stars.iter().map(Vec::len).sum()
    }

    pub fn stats(&self) -> StarStats {
        self.stats
    }

    fn push_pair(&mut self, star: usize, x: Vertex, y: Vertex) {
        debug_assert!(self.is_free(x) && self.is_free(y));
        let idx = self.stars[star].len() as u32;
        self.stars[star].push([x, y]);
        self.slot[x as usize] = Some((star as u32, idx));
        self.slot[y as usize] = Some((star as u32, idx));
    }

    fn remove_pair_of(&mut self, v: Vertex) {
        let (star, idx) = self.slot[v as usize].expect("vertex is a leaf");
        let (star, idx) = (star as usize, idx as usize);
        let [a, b] = self.stars[star].swap_remove(idx);
        self.slot[a as usize] = None;
        self.slot[b as usize] = None;
        if let Some(&[c, d]) = self.stars[star].get(idx) {
            self.slot[c as usize] = Some((star as u32, idx as u32));
            self.slot[d as usize] = Some((star as u32, idx as u32));
        }
    }

    fn partner(&self, v: Vertex) -> Vertex {
        let (star, idx) = self.slot[v as usize].expect("vertex is a leaf");
        let [a, b] = self.stars[star as usize][idx as usize];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Round-robin greedy filling, lowest edge index first.
    pub fn fill_greedy(&mut self) {
        let orders: Vec<Vec<u32>> = self.centers.iter().map(|&c| self.g.edges_through(c).to_vec()).collect();
        self.fill_greedy_in(&orders);
    }

    /// Round-robin greedy filling with each star scanning its centre's edges
    /// in the given order.
    pub fn fill_greedy_in(&mut self, orders: &[Vec<u32>]) {
        let k = self.centers.len();
        let mut cursor = vec![0usize; k];
        loop {
            let mut progressed = false;
            for s in 0..k {
                if self.stars[s].len() >= self.targets[s] {
                    continue;
                }
                let c = self.centers[s];
                let through = &orders[s];
                while cursor[s] < through.len() {
                    let e = self.g.edge(through[cursor[s]] as usize);
                    cursor[s] += 1;
                    let mut others = e.into_iter().filter(|&v| v != c);
                    let (x, y) = (others.next().unwrap(), others.next().unwrap());
                    if self.is_free(x) && self.is_free(y) {
                        self.push_pair(s, x, y);
                        self.stats.greedy_edges += 1;
                        progressed = true;
                        break;
                    }
                }
            }
            if !progressed {
                break;
            }
        }
    }

    /// Searches for an augmenting switch for `star` and applies it. Returns
    /// the walk length `k`, or `None` if the frontier dies out.
    pub fn augment(&mut self, star: usize) -> Option<usize> {
        let c = self.centers[star];
        let n = self.g.n();
        let mut in_a = VertexSet::new(n);
        let mut in_b = VertexSet::new(n);
        let mut pred = vec![Vertex::MAX; n];
        self.a_levels.clear();
        self.b_levels.clear();
        self.excluded = VertexSet::new(n);

        let first: Vec<Vertex> = (0..n as Vertex).filter(|&v| self.is_free(v)).collect();
        for &v in &first {
            in_a.insert(v);
        }
        self.a_levels.push(first);
        let mut found = None;
        'levels: for level in 0..self.max_levels {
            let mut b = Vec::new();
            for i in 0..self.a_levels[level].len() {
                let x = self.a_levels[level][i];
                let Some(y) = self.g.complete_pair(x, c) else { continue };
                if self.blocked.contains(y) {
                    self.excluded.insert(x);
                    continue;
                }
                assert!(!in_b.contains(y), "B-families must be disjoint");
                in_b.insert(y);
                pred[y as usize] = x;
                b.push(y);
                if self.is_free(y) {
                    found = Some((level + 1, y));
                    self.b_levels.push(b);
                    break 'levels;
                }
            }
            let mut next = Vec::with_capacity(b.len());
            for &y in &b {
                let x = self.partner(y);
                assert!(!in_a.contains(x), "A-families must be disjoint");
                in_a.insert(x);
                next.push(x);
            }
            self.b_levels.push(b);
            if next.is_empty() {
                break;
            }
            self.a_levels.push(next);
        }
        let (k, last) = found?;

        // walk back: y_k, x_k, y_{k-1} = partner(x_k), ...
        let mut xs = vec![0; k];
        let mut ys = vec![0; k];
        ys[k - 1] = last;
        for i in (0..k).rev() {
            xs[i] = pred[ys[i] as usize];
            if i > 0 {
                ys[i - 1] = self.partner(xs[i]);
            }
        }
        debug_assert!(self.is_free(xs[0]));

        let before = self.total();
        let size_before = self.stars[star].len();
        for &y in &ys[..k - 1] {
            self.remove_pair_of(y);
        }
        for i in 0..k {
            assert_eq!(self.g.complete_pair(xs[i], ys[i]), Some(c), "switch pair must lie on the centre");
            self.push_pair(star, xs[i], ys[i]);
        }
        assert_eq!(self.total(), before + 1, "a switch raises the total size by one");
        assert!(self.stars[star].len() < size_before + k + 1);
        assert!(self.stars[star].len() <= self.targets[star] + self.max_levels);
        self.stats.switches += 1;
        self.stats.longest_switch = self.stats.longest_switch.max(k);
        self.release_surplus(star, k);
        Some(k)
    }

    /// Frees the oldest pairs of an overfull star, keeping the `recent` ones
    /// added last where possible.
    fn release_surplus(&mut self, star: usize, recent: usize) {
        let target = self.targets[star];
        let len = self.stars[star].len();
        if len <= target {
            return;
        }
        let surplus = len - target;
        // the recent pairs sit at the end, so dropping from the front spares them
        debug_assert!(recent <= len);
        let mut pairs = std::mem::take(&mut self.stars[star]);
        let dropped: Vec<[Vertex; 2]> = pairs.drain(..surplus).collect();
        for [a, b] in dropped {
            self.slot[a as usize] = None;
            self.slot[b as usize] = None;
            self.stats.trimmed += 1;
        }
        for (i, &[a, b]) in pairs.iter().enumerate() {
            self.slot[a as usize] = Some((star as u32, i as u32));
            self.slot[b as usize] = Some((star as u32, i as u32));
        }
        self.stars[star] = pairs;
    }

    /// Drops surplus leaf pairs so every star has exactly its target size.
    pub fn trim(&mut self) {
        for s in 0..self.stars.len() {
            while self.stars[s].len() > self.targets[s] {
                let [a, b] = self.stars[s].pop().expect("star is non-empty");
                self.slot[a as usize] = None;
                self.slot[b as usize] = None;
                self.stats.trimmed += 1;
            }
        }
    }

    pub fn into_stars(self) -> Vec<EmbeddedStar> {
        self.centers
            .iter()
            .zip(self.stars)
            .map(|(&center, leaves)| EmbeddedStar { center, leaves })
            .collect()
    }
}

/// Embeds vertex-disjoint stars with the requested centres and sizes,
/// avoiding `forbidden` and all centres as leaves.
pub fn embed_stars(
    g: &LinearThreeGraph,
    req: &StarRequest,
    forbidden: &VertexSet,
) -> Result<Vec<EmbeddedStar>, StarError> {
    embed_stars_with_stats(g, req, forbidden).map(|(stars, _)| stars)
}

/// As [`embed_stars`], also returning switch counters.
pub fn embed_stars_with_stats(
    g: &LinearThreeGraph,
    req: &StarRequest,
    forbidden: &VertexSet,
) -> Result<(Vec<EmbeddedStar>, StarStats), StarError> {
    let mut last_err = None;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for restart in 0..=req.restarts {
        let mut state = AugmentState::new(g, req, forbidden)?;
        if restart == 0 {
            state.fill_greedy();
        } else {
            let orders: Vec<Vec<u32>> = req
                .centers
                .iter()
                .map(|&c| {
                    let mut o = g.edges_through(c).to_vec();
                    o.shuffle(&mut rng);
                    o
                })
                .collect();
            state.fill_greedy_in(&orders);
        }
        match complete(&mut state, req) {
            Ok(()) => return Ok(finish(g, req, forbidden, state)),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("at least one start"))
}

/// Runs switches until every star reaches its target.
fn complete(state: &mut AugmentState<'_>, req: &StarRequest) -> Result<(), StarError> {
    // surplus release can undo progress, so bound the number of switches
    let mut budget = 64 * req.sizes.iter().sum::<usize>() + 64;
    loop {
        let Some(s) = (0..req.len()).find(|&s| state.stars[s].len() < req.sizes[s]) else {
            return Ok(());
        };
        budget = budget.saturating_sub(1);
        if budget == 0 || state.augment(s).is_none() {
            return Err(StarError::AugmentationExhausted {
                star: s,
                size: state.stars[s].len(),
                target: req.sizes[s],
            });
        }
    }
}

fn finish(
    g: &LinearThreeGraph,
    req: &StarRequest,
    forbidden: &VertexSet,
    mut state: AugmentState<'_>,
) -> (Vec<EmbeddedStar>, StarStats) {
    state.trim();
    let stats = state.stats();
    let stars = state.into_stars();
    check_stars(g, req, forbidden, &stars);
    (stars, stats)
}

fn check_stars(g: &LinearThreeGraph, req: &StarRequest, forbidden: &VertexSet, stars: &[EmbeddedStar]) {
    let mut seen = VertexSet::new(g.n());
    for &c in &req.centers {
        assert!(seen.insert(c));
    }
    for (star, (&c, &size)) in stars.iter().zip(req.centers.iter().zip(&req.sizes)) {
        assert_eq!(star.center, c);
        assert_eq!(star.leaves.len(), size, "star sizes are exact");
        for &[x, y] in &star.leaves {
            assert!(g.has_edge(c, x, y), "leaf pair forms an edge with the centre");
            assert!(!forbidden.contains(x) && !forbidden.contains(y));
            assert!(seen.insert(x) && seen.insert(y), "stars are vertex-disjoint");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sts::{bose_construct, hill_climb_random};

    #[test]
    fn full_star_in_sts9() {
        let g = bose_construct(1);
        let req = StarRequest::new(vec![0], vec![4]).unwrap();
        let stars = embed_stars(g.graph(), &req, &VertexSet::new(9)).unwrap();
        let mut got: Vec<_> = stars[0].leaves.iter().map(|&[a, b]| [a.min(b), a.max(b)]).collect();
        got.sort();
        let mut want: Vec<_> = g
            .edges_through(0)
            .iter()
            .map(|&e| {
                let v: Vec<_> = g.edge(e as usize).into_iter().filter(|&v| v != 0).collect();
                [v[0], v[1]]
            })
            .collect();
        want.sort();
        assert_eq!(got, want);
    }

    /// Whether centres `a, b` admit disjoint 3-stars, by exhaustive search:
    /// the pairs through one centre are disjoint, so it suffices to try every
    /// triple of pairs at `a` and count the pairs at `b` left untouched.
    fn two_triples_exist(g: &LinearThreeGraph, a: Vertex, b: Vertex) -> bool {
        let pairs = |c: Vertex, o: Vertex| -> Vec<[Vertex; 2]> {
            g.edges_through(c)
                .iter()
                .map(|&e| g.edge(e as usize))
                .filter(|e| !e.contains(&o))
                .map(|e| {
                    let v: Vec<Vertex> = e.into_iter().filter(|&v| v != c).collect();
                    [v[0], v[1]]
                })
                .collect()
        };
        let (pa, pb) = (pairs(a, b), pairs(b, a));
        (0u32..1 << pa.len()).filter(|s| s.count_ones() == 3).any(|s| {
            let used: Vec<Vertex> = (0..pa.len()).filter(|i| s >> i & 1 == 1).flat_map(|i| pa[i]).collect();
            pb.iter().filter(|p| !used.contains(&p[0]) && !used.contains(&p[1])).count() >= 3
        })
    }

    #[test]
    fn two_stars_in_sts15() {
        let g = bose_construct(2);
        let mut feasible = 0;
        for a in 0..15 {
            for b in a + 1..15 {
                let req = StarRequest::new(vec![a, b], vec![3, 3]).unwrap();
                let got = embed_stars(g.graph(), &req, &VertexSet::new(15));
                let exists = two_triples_exist(g.graph(), a, b);
                assert_eq!(got.is_ok(), exists, "centres {a}, {b}");
                if let Ok(stars) = got {
                    assert_eq!(stars.iter().map(EmbeddedStar::len).sum::<usize>(), 6);
                    feasible += 1;
                }
            }
        }
        assert!(feasible > 0);
    }

    #[test]
    fn oversized_request_is_exhausted() {
        let g = bose_construct(1);
        let req = StarRequest::new(vec![0], vec![5]).unwrap();
        assert!(matches!(
            embed_stars(g.graph(), &req, &VertexSet::new(9)),
            Err(StarError::AugmentationExhausted { .. })
        ));
    }

    #[test]
    fn request_validation() {
        assert!(matches!(StarRequest::new(vec![1, 1], vec![1, 1]), Err(StarError::DuplicateCenter(1))));
        assert!(matches!(StarRequest::new(vec![1], vec![0]), Err(StarError::ZeroSize(0))));
    }

    #[test]
    fn switches_fill_crowded_stars() {
        let g = hill_climb_random(63, 5, 50_000_000).unwrap();
        // edges through two centres are unusable since centres never serve as leaves
        let centers: Vec<Vertex> = vec![0, 10, 20, 30, 40, 50];
        let k = centers.len();
        let forbidden = VertexSet::new(63);
        let mut switched = false;
        for total in [20, 24, 26] {
            let sizes: Vec<usize> = (0..k).map(|i| total / k + usize::from(i < total % k)).collect();
            let req = StarRequest::new(centers.clone(), sizes).unwrap();
            let (stars, stats) = embed_stars_with_stats(g.graph(), &req, &forbidden).unwrap();
            assert_eq!(stars.iter().map(EmbeddedStar::len).sum::<usize>(), total);
            switched |= stats.switches > 0;
        }
        assert!(switched);
    }
}
