//! Singleton-pair partitions and random vertex splits.
//!
//! The embedding pipeline hangs stars on a few centers, then splits the rest
//! of the host into a reservoir `R` and parts `X_1, …, X_ℓ`. Each star leaf
//! pair is kept together (both in the same part or both outside all parts),
//! so a star edge survives in whichever part receives its pair.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::embed::EmbeddedStar;
use crate::sts::{LinearThreeGraph, Vertex};
use crate::vset::VertexSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error("stars overlap at vertex {0}")]
    OverlappingStars(Vertex),
    #[error("star at {center} uses non-edge {{{center}, {a}, {b}}}")]
    NotAStarEdge { center: Vertex, a: Vertex, b: Vertex },
    #[error("probabilities sum to {0} > 1")]
    ProbabilityOverflow(f64),
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("sets passed to an edge-density check are not pairwise disjoint")]
    NotDisjoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Atom {
    Single(Vertex),
    /// A star leaf pair; `center` completes it to a star edge.
    Pair { a: Vertex, b: Vertex, center: Vertex },
}

impl Atom {
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        let (a, b) = match *self {
            Atom::Single(v) => (v, None),
            Atom::Pair { a, b, .. } => (a, Some(b)),
        };
        std::iter::once(a).chain(b)
    }

    pub fn len(&self) -> usize {
        match self {
            Atom::Single(_) => 1,
            Atom::Pair { .. } => 2,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A partition of the host vertices into blocks of size one or two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingletonPairPartition {
    n: usize,
    atoms: Vec<Atom>,
}

impl SingletonPairPartition {
    /// All singletons.
    pub fn singletons(n: usize) -> Self {
        SingletonPairPartition {
            n,
            atoms: (0..n as Vertex).map(Atom::Single).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn pair_count(&self) -> usize {
        self.atoms.iter().filter(|a| a.len() == 2).count()
    }
}

/// Makes every star leaf pair an atom and every other vertex a singleton.
pub fn build_partition(
    g: &LinearThreeGraph,
    stars: &[EmbeddedStar],
) -> Result<SingletonPairPartition, PartitionError> {
    let n = g.n();
    let mut taken = VertexSet::new(n);
    let mut atoms = Vec::new();
    let claim = |v: Vertex, taken: &mut VertexSet| {
        if taken.insert(v) {
            Ok(())
        } else {
            Err(PartitionError::OverlappingStars(v))
        }
    };
    for star in stars {
        claim(star.center, &mut taken)?;
    }
    for star in stars {
        for &[a, b] in &star.leaves {
            if !g.has_edge(star.center, a, b) {
                return Err(PartitionError::NotAStarEdge {
                    center: star.center,
                    a,
                    b,
                });
            }
            claim(a, &mut taken)?;
            claim(b, &mut taken)?;
            atoms.push(Atom::Pair {
                a,
                b,
                center: star.center,
            });
        }
    }
    // pairs first, then singletons in vertex order
    atoms.extend(taken.complement().iter().map(Atom::Single));
    for star in stars {
        atoms.push(Atom::Single(star.center));
    }
    Ok(SingletonPairPartition { n, atoms })
}

fn check_probability(p: f64) -> Result<(), PartitionError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(PartitionError::InvalidProbability(p))
    }
}

/// Union of the atoms selected independently with probability `p`.
pub fn sample_subset(u: &SingletonPairPartition, p: f64, seed: u64) -> VertexSet {
    sample_subset_with(u, p, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn sample_subset_with<R: Rng + ?Sized>(u: &SingletonPairPartition, p: f64, rng: &mut R) -> VertexSet {
    let p = p.clamp(0.0, 1.0);
    let mut x = VertexSet::new(u.n);
    for atom in &u.atoms {
        if rng.gen_bool(p) {
            for v in atom.vertices() {
                x.insert(v);
            }
        }
    }
    x
}

/// A reservoir and disjoint parts, with the probabilities that drew them.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexPartition {
    pub reservoir: VertexSet,
    pub parts: Vec<VertexSet>,
    pub probs: Vec<f64>,
    pub p0: f64,
}

impl VertexPartition {
    /// Text dump: a `part <name>` line followed by a line of vertex indices,
    /// for the reservoir `R` and then `X1`, `X2`, ….
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut section = |name: &str, set: &VertexSet| {
            let _ = writeln!(out, "part {name}");
            let line: Vec<String> = set.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        };
        section("R", &self.reservoir);
        for (i, x) in self.parts.iter().enumerate() {
            section(&format!("X{}", i + 1), x);
        }
        out
    }
}

/// Draws `X_1, …, X_ℓ` and then `R`. Atom `U` lands in `X_i` with probability
/// `p_i`, in `R` with probability `p_0`, and nowhere otherwise.
///
/// Sampling each atom's destination in one categorical draw has the same law
/// as selecting atoms for `X_i` with probability `p_i/(1 − p_1 − … − p_{i−1})`
/// among those not yet taken, and then `R` last.
pub fn sequential_partition(
    u: &SingletonPairPartition,
    probs: &[f64],
    p0: f64,
    seed: u64,
) -> Result<VertexPartition, PartitionError> {
    sequential_partition_with(u, probs, p0, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn sequential_partition_with<R: Rng + ?Sized>(
    u: &SingletonPairPartition,
    probs: &[f64],
    p0: f64,
    rng: &mut R,
) -> Result<VertexPartition, PartitionError> {
    for &p in probs.iter().chain([&p0]) {
        check_probability(p)?;
    }
    let total: f64 = probs.iter().sum::<f64>() + p0;
    if total > 1.0 + 1e-9 {
        return Err(PartitionError::ProbabilityOverflow(total));
    }
    let mut cumulative = Vec::with_capacity(probs.len() + 1);
    let mut acc = 0.0;
    for &p in probs.iter().chain([&p0]) {
        acc += p;
        cumulative.push(acc);
    }
    let mut parts = vec![VertexSet::new(u.n); probs.len()];
    let mut reservoir = VertexSet::new(u.n);
    for atom in &u.atoms {
        let r: f64 = rng.gen();
        let Some(slot) = cumulative.iter().position(|&c| r < c) else {
            continue;
        };
        let target = if slot < probs.len() {
            &mut parts[slot]
        } else {
            &mut reservoir
        };
        for v in atom.vertices() {
            target.insert(v);
        }
    }
    Ok(VertexPartition {
        reservoir,
        parts,
        probs: probs.to_vec(),
        p0,
    })
}

/// Outcome of [`check_edge_density`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityCheck {
    pub measured: usize,
    pub expected: f64,
    pub pass: bool,
}

/// Counts `e(A, B, X)` for pairwise disjoint sets and compares it with
/// `p·|A|·|B|` at relative tolerance `tol`.
pub fn check_edge_density(
    g: &LinearThreeGraph,
    a: &VertexSet,
    b: &VertexSet,
    x: &VertexSet,
    p: f64,
    tol: f64,
) -> Result<DensityCheck, PartitionError> {
    if !a.is_disjoint(b) || !a.is_disjoint(x) || !b.is_disjoint(x) {
        return Err(PartitionError::NotDisjoint);
    }
    let mut measured = 0;
    for u in a.iter() {
        for v in b.iter() {
            if g.complete_pair(u, v).is_some_and(|w| x.contains(w)) {
                measured += 1;
            }
        }
    }
    let expected = p * a.len() as f64 * b.len() as f64;
    let pass = (measured as f64 - expected).abs() <= tol * expected;
    Ok(DensityCheck {
        measured,
        expected,
        pass,
    })
}

/// Number of edges through `v` whose other two vertices lie in `x`.
pub fn check_reservoir_degree(g: &LinearThreeGraph, x: &VertexSet, v: Vertex) -> usize {
    g.edges_through(v)
        .iter()
        .filter(|&&id| {
            g.edge(id as usize)
                .iter()
                .all(|&w| w == v || x.contains(w))
        })
        .count()
}
