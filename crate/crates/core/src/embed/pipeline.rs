//! The staged embedding pipeline.
//!
//! 1. Split `T` into a chain `T_0 ⊆ T_1 ⊆ … ⊆ T_ℓ = T`.
//! 2. Embed the base forest `T_0` greedily at random.
//! 3. Hide `φ(V(T_0))` except the star centres and embed large host stars
//!    `S_i` of sizes `n_i = ⌈(d_i/2d)·n(1−ε/8)⌉` at the centre images.
//! 4. Partition the vertices of `G` with whole leaf pairs kept together:
//!    `X_i` with probability `p_i = (1+ε/4)m_i/n + ε/(4ℓ)`, the reservoir `R`
//!    with probability `p_0`, where `m_i = |V(T_i) ∖ V(T_{i−1})|`.
//! 5. Check the events on the sampled partition and resample if they fail.
//! 6. Grow the embedding stage by stage: stars from `X_1`, matching stages
//!    through [`extend_by_matching`] into `X_i` with reservoir repair, and the
//!    path stage through [`find_disjoint_paths`] inside `R`.
//!
//! Every attempt either yields a verified embedding or a recorded failure;
//! after `max_retries` failed resamples the run gives up.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::greedy::{embed_base_forest, GreedyError};
use super::matching::{extend_by_matching, MatchingConfig, MatchingError};
use super::nibble::DEFAULT_GAMMA;
use super::paths::find_disjoint_paths;
use super::stars::{embed_stars, StarError, StarRequest, DEFAULT_MAX_LEVELS};
use super::{assign_pendant, verify_embedding, Embedding};
use crate::hypertree::Hypertree;
use crate::partition::{build_partition, sequential_partition_with, PartitionError, VertexPartition};
use crate::split::{split_hypertree, SplitParams, SplitPlan, SplitStop, Stage};
use crate::sts::{SteinerTripleSystem, Vertex};
use crate::vset::VertexSet;

/// How the reservoir probability `p_0` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReservoirRule {
    /// All probability mass left after the parts: `p_0 = 1 − Σ p_i`.
    Remainder,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Slack: trees may have at most `(1−ε)n` vertices.
    pub eps: f64,
    pub mu: f64,
    /// Minimum star size `D`; `None` uses `max(4, ⌈log₂ n⌉)`.
    pub degree_threshold: Option<usize>,
    /// Semi-bare path parameter for the split.
    pub path_length: Option<usize>,
    pub split_stop: SplitStop,
    pub max_retries: usize,
    pub reservoir: ReservoirRule,
    /// Upper bound on `Σ n_i` as a fraction of half the star-eligible vertices.
    pub star_cap: f64,
    pub star_levels: usize,
    /// `F`: `|φ(V(T_0)) ∩ X_i| ≤ f_factor · p_i μn`.
    pub f_factor: f64,
    /// `E0`: every vertex has at least `e0_degree_factor · μn` edges inside
    /// `R`, and sampled pairs have `e0_path_factor · μn` disjoint length-3
    /// paths inside `R`.
    pub e0_degree_factor: f64,
    pub e0_path_factor: f64,
    pub e0_path_samples: usize,
    /// Reservoir vertices allowed per matching stage: `· p_i μn`.
    pub stage_budget_factor: f64,
    /// Reservoir vertices allowed for the path stage: `· μn`.
    pub path_budget_factor: f64,
    /// Reservoir vertices allowed overall: `· μn`.
    pub total_budget_factor: f64,
    /// Relative size tolerance for parts with `p_i n ≥ 100`.
    pub tol_large: f64,
    /// Relative size tolerance for smaller parts.
    pub tol_small: f64,
    pub gamma: f64,
    pub enforce_f: bool,
    pub enforce_e0: bool,
    pub enforce_e1: bool,
    pub enforce_sizes: bool,
    /// Let later stages use vertices of earlier parts that stayed unused.
    pub recycle_parts: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            eps: 0.25,
            mu: 0.05,
            degree_threshold: None,
            path_length: None,
            split_stop: SplitStop::Adaptive,
            max_retries: 20,
            reservoir: ReservoirRule::Remainder,
            star_cap: 0.9,
            star_levels: DEFAULT_MAX_LEVELS,
            f_factor: 10.0,
            e0_degree_factor: 0.1,
            e0_path_factor: 0.1,
            e0_path_samples: 8,
            stage_budget_factor: 30.0,
            path_budget_factor: 7.0,
            total_budget_factor: 40.0,
            tol_large: 0.25,
            tol_small: 0.5,
            gamma: DEFAULT_GAMMA,
            enforce_f: true,
            enforce_e0: false,
            enforce_e1: true,
            enforce_sizes: false,
            recycle_parts: true,
        }
    }
}

impl PipelineConfig {
    pub fn degree_threshold_for(&self, n: usize) -> usize {
        self.degree_threshold
            .unwrap_or_else(|| ((n.max(2) as f64).log2().ceil() as usize).max(4))
    }

    pub fn split_params(&self, n: usize) -> SplitParams {
        let mut p = SplitParams::new(self.degree_threshold_for(n), self.mu, n).with_stop(self.split_stop);
        if let Some(m) = self.path_length {
            p = p.with_path_length(m);
        }
        p
    }
}

/// Outcomes of the event checks on one sampled partition. Every field comes
/// from an exact count on the sample.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventReport {
    pub f_pass: bool,
    /// Largest `|φ(V(T_0)) ∩ X_i|` relative to its limit.
    pub f_worst_ratio: f64,
    pub e0_pass: bool,
    pub e0_min_degree: usize,
    pub e0_degree_threshold: f64,
    pub e0_min_paths: usize,
    pub e0_path_threshold: f64,
    pub e1_pass: bool,
    /// Smallest `e({v_i}, X_1, X_1) − d_i` over the star centres.
    pub e1_margin: i64,
    /// Matching stages whose shortfall stayed within `μ p_i n`.
    pub em_pass: bool,
    pub em_worst_shortfall: usize,
    pub sizes_pass: bool,
}

impl EventReport {
    pub fn summary(&self) -> String {
        format!(
            "F={} (worst {:.2}) E0={} (deg {} / {:.1}, paths {} / {:.1}) E1={} (margin {}) EM={} (shortfall {}) sizes={}",
            self.f_pass,
            self.f_worst_ratio,
            self.e0_pass,
            self.e0_min_degree,
            self.e0_degree_threshold,
            self.e0_min_paths,
            self.e0_path_threshold,
            self.e1_pass,
            self.e1_margin,
            self.em_pass,
            self.em_worst_shortfall,
            self.sizes_pass
        )
    }
}

/// Why one attempt failed.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AttemptFailure {
    #[error("base forest: {0}")]
    Base(GreedyError),
    #[error("stars: {0}")]
    Stars(StarError),
    #[error("partition: {0}")]
    Partition(PartitionError),
    #[error("event F failed")]
    EventF,
    #[error("event E0 failed")]
    EventE0,
    #[error("event E1 failed")]
    EventE1,
    #[error("part sizes out of tolerance")]
    Sizes,
    #[error("star at tree vertex {center} found only {found} of {needed} edges in X_1")]
    StarShort {
        center: Vertex,
        found: usize,
        needed: usize,
    },
    #[error("stage {stage}: no repair edge for host vertex {vertex}")]
    Repair { stage: usize, vertex: Vertex },
    #[error("stage {stage}: used {used} reservoir vertices, budget {budget}")]
    StageBudget { stage: usize, used: usize, budget: usize },
    #[error("path stage {stage}: found {found} of {needed} paths")]
    PathsShort {
        stage: usize,
        found: usize,
        needed: usize,
    },
    #[error("total reservoir use {used} exceeds {budget}")]
    TotalBudget { used: usize, budget: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttemptReport {
    pub attempt: usize,
    pub events: Option<EventReport>,
    pub failure: AttemptFailure,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbedError {
    #[error("tree has {tree_vertices} vertices, more than (1-eps)n = {limit:.1}")]
    Sizing { tree_vertices: usize, limit: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("gave up after {attempts} attempts")]
    RetryBudgetExhausted {
        attempts: usize,
        history: Vec<AttemptReport>,
    },
}

/// Per-stage record of a successful attempt. Stage 0 is the base forest.
#[derive(Debug, Clone, PartialEq)]
pub struct StageTelemetry {
    pub stage: usize,
    pub kind: &'static str,
    pub new_vertices: usize,
    pub part_size: usize,
    pub matched: usize,
    pub repaired: usize,
    pub reservoir_used: usize,
    pub reservoir_budget: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub embedding: Embedding,
    /// Failed attempts before the successful one.
    pub retries: usize,
    pub plan: SplitPlan,
    pub events: EventReport,
    pub telemetry: Vec<StageTelemetry>,
    pub reservoir_size: usize,
    pub reservoir_used: usize,
    pub reservoir_total_budget: usize,
    pub history: Vec<AttemptReport>,
    pub elapsed: Duration,
}

impl PipelineOutcome {
    /// Telemetry as CSV; wall-clock columns only when `timing` is set so
    /// that untimed output is reproducible.
    pub fn telemetry_csv(&self, timing: bool) -> String {
        let mut out = String::from(
            "stage,kind,new_vertices,part_size,matched,repaired,reservoir_used,reservoir_budget,retries",
        );
        if timing {
            out.push_str(",wall_ms");
        }
        out.push('\n');
        for s in &self.telemetry {
            let _ = write!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                s.stage,
                s.kind,
                s.new_vertices,
                s.part_size,
                s.matched,
                s.repaired,
                s.reservoir_used,
                s.reservoir_budget,
                self.retries
            );
            if timing {
                let _ = write!(out, ",{:.3}", s.elapsed.as_secs_f64() * 1e3);
            }
            out.push('\n');
        }
        out
    }

    /// Checks the recorded reservoir usage against the recorded budgets.
    pub fn budgets_respected(&self) -> bool {
        self.telemetry.iter().all(|s| s.reservoir_used <= s.reservoir_budget)
            && self.reservoir_used <= self.reservoir_total_budget
    }
}

/// Embeds `t` into `g`; see the module docs.
pub fn embed_hypertree(
    g: &SteinerTripleSystem,
    t: &Hypertree,
    cfg: &PipelineConfig,
    seed: u64,
) -> Result<PipelineOutcome, EmbedError> {
    let n = g.n();
    if !(cfg.eps > 0.0 && cfg.eps < 1.0) {
        return Err(EmbedError::Config(format!("eps = {} must lie in (0, 1)", cfg.eps)));
    }
    if !(cfg.mu > 0.0 && cfg.mu < 1.0) {
        return Err(EmbedError::Config(format!("mu = {} must lie in (0, 1)", cfg.mu)));
    }
    let limit = (1.0 - cfg.eps) * n as f64;
    if t.n() as f64 > limit {
        return Err(EmbedError::Sizing {
            tree_vertices: t.n(),
            limit,
        });
    }
    let start = Instant::now();
    let plan = split_hypertree(t, &cfg.split_params(n));
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut history = Vec::new();
    for attempt in 0..=cfg.max_retries {
        let mut rng = ChaCha8Rng::seed_from_u64(master.gen());
        match run_attempt(g, t, &plan, cfg, &mut rng) {
            Ok(mut outcome) => {
                let report = verify_embedding(g.graph(), t, &outcome.embedding);
                assert!(report.is_valid(), "pipeline produced an invalid embedding:\n{report}");
                outcome.retries = attempt;
                outcome.history = history;
                outcome.elapsed = start.elapsed();
                return Ok(outcome);
            }
            Err((events, failure)) => history.push(AttemptReport {
                attempt,
                events,
                failure,
            }),
        }
    }
    Err(EmbedError::RetryBudgetExhausted {
        attempts: cfg.max_retries + 1,
        history,
    })
}

type Failure = (Option<EventReport>, AttemptFailure);

/// New vertices per stage: `m_i`.
fn stage_sizes(plan: &SplitPlan) -> Vec<usize> {
    plan.stages
        .iter()
        .map(|s| match s {
            Stage::Stars(stars) => 2 * stars.iter().map(|s| s.edges.len()).sum::<usize>(),
            Stage::Matching(m) => 2 * m.len(),
            Stage::Paths(p) => 5 * p.len(),
        })
        .collect()
}

fn run_attempt<R: Rng>(
    g: &SteinerTripleSystem,
    t: &Hypertree,
    plan: &SplitPlan,
    cfg: &PipelineConfig,
    rng: &mut R,
) -> Result<PipelineOutcome, Failure> {
    let n = g.n();
    let host = g.graph();
    let mu_n = cfg.mu * n as f64;
    let fail = |f: AttemptFailure| (None, f);

    let clock = Instant::now();
    let mut phi = embed_base_forest(host, t, &plan.base, &VertexSet::new(n), rng)
        .map_err(|e| fail(AttemptFailure::Base(e)))?;
    let base_image = phi.used().clone();
    let mut telemetry = vec![StageTelemetry {
        stage: 0,
        kind: "base",
        new_vertices: plan.base.vertices.len(),
        part_size: 0,
        matched: 0,
        repaired: 0,
        reservoir_used: 0,
        reservoir_budget: 0,
        elapsed: clock.elapsed(),
    }];

    // star demands per centre, merged in case a centre is listed twice
    let mut demand: BTreeMap<Vertex, Vec<usize>> = BTreeMap::new();
    for s in plan.stars() {
        demand.entry(s.center).or_default().extend(s.edges.iter().copied());
    }
    let d_total: usize = demand.values().map(Vec::len).sum();
    let centers: Vec<Vertex> = demand.keys().map(|&c| phi.image(c)).collect();
    let mut forbidden = base_image.clone();
    for &c in &centers {
        forbidden.remove(c);
    }
    let mut host_stars = Vec::new();
    if d_total > 0 {
        let eligible = n - base_image.len();
        let mut sizes: Vec<usize> = demand
            .values()
            .map(|e| {
                let want = (e.len() as f64 / (2.0 * d_total as f64)) * n as f64 * (1.0 - cfg.eps / 8.0);
                (want.ceil() as usize).max(e.len())
            })
            .collect();
        let cap = (cfg.star_cap * eligible as f64 / 2.0).floor() as usize;
        let total: usize = sizes.iter().sum();
        if total > cap {
            for (s, e) in sizes.iter_mut().zip(demand.values()) {
                *s = ((*s * cap) / total).max(e.len());
            }
        }
        let req = StarRequest::new(centers.clone(), sizes)
            .map_err(|e| fail(AttemptFailure::Stars(e)))?
            .with_max_levels(cfg.star_levels);
        host_stars = embed_stars(host, &req, &forbidden).map_err(|e| fail(AttemptFailure::Stars(e)))?;
    }

    let atoms = build_partition(host, &host_stars).map_err(|e| fail(AttemptFailure::Partition(e)))?;
    let sizes = stage_sizes(plan);
    let ell = plan.len().max(1) as f64;
    let probs: Vec<f64> = sizes
        .iter()
        .map(|&m| (1.0 + cfg.eps / 4.0) * m as f64 / n as f64 + cfg.eps / (4.0 * ell))
        .collect();
    let mass: f64 = probs.iter().sum();
    let p0 = match cfg.reservoir {
        ReservoirRule::Remainder => (1.0 - mass).max(0.0),
        ReservoirRule::Fixed(p) => p,
    };
    let partition =
        sequential_partition_with(&atoms, &probs, p0, rng).map_err(|e| fail(AttemptFailure::Partition(e)))?;

    let mut events = check_events(g, cfg, &phi, &base_image, &demand, &partition, rng);
    if cfg.enforce_f && !events.f_pass {
        return Err((Some(events), AttemptFailure::EventF));
    }
    if cfg.enforce_e0 && !events.e0_pass {
        return Err((Some(events), AttemptFailure::EventE0));
    }
    if cfg.enforce_e1 && !events.e1_pass {
        return Err((Some(events), AttemptFailure::EventE1));
    }
    if cfg.enforce_sizes && !events.sizes_pass {
        return Err((Some(events), AttemptFailure::Sizes));
    }

    let reservoir = &partition.reservoir;
    let total_budget = (cfg.total_budget_factor * mu_n).floor() as usize;
    let mut total_used = 0usize;
    let mut em_worst = 0usize;
    let mut em_pass = true;
    let mut leftover = VertexSet::new(n);

    for (idx, stage) in plan.stages.iter().enumerate() {
        let clock = Instant::now();
        let i = idx + 1;
        let part = &partition.parts[idx];
        let p_i = probs[idx];
        // vertices outside the reservoir this stage may draw on
        let mut pool = part.clone();
        if cfg.recycle_parts {
            pool.union_with(&leftover);
        }
        pool.difference_with(phi.used());
        let mut row = StageTelemetry {
            stage: i,
            kind: stage.kind(),
            new_vertices: sizes[idx],
            part_size: part.len(),
            matched: 0,
            repaired: 0,
            reservoir_used: 0,
            reservoir_budget: 0,
            elapsed: Duration::ZERO,
        };
        match stage {
            Stage::Stars(_) => {
                embed_star_stage(host, t, &mut phi, &demand, &host_stars, part)
                    .map_err(|f| (Some(events.clone()), f))?;
                row.matched = d_total;
            }
            Stage::Matching(attached) => {
                let budget = (cfg.stage_budget_factor * p_i * mu_n).floor() as usize;
                row.reservoir_budget = budget;
                if attached.is_empty() {
                    telemetry.push(row);
                    continue;
                }
                let mut a = VertexSet::new(n);
                let mut owner: BTreeMap<Vertex, usize> = BTreeMap::new();
                for (k, at) in attached.iter().enumerate() {
                    let img = phi.image(at.attach);
                    a.insert(img);
                    owner.insert(img, k);
                }
                let mut x = part.clone();
                x.difference_with(phi.used());
                let allowed = (cfg.mu * p_i * n as f64).floor() as usize;
                let mcfg = MatchingConfig {
                    eps: cfg.eps,
                    shortfall: allowed,
                    gamma: cfg.gamma,
                    ..MatchingConfig::default()
                };
                let (matching, uncovered) = match extend_by_matching(host, &a, &x, &mcfg, rng) {
                    Ok(m) => {
                        let mut left = a.clone();
                        for e in &m {
                            left.remove(e.a);
                        }
                        (m, left.to_vec())
                    }
                    Err(MatchingError::InsufficientCover { matching, uncovered }) => {
                        em_pass = false;
                        (matching, uncovered)
                    }
                    Err(MatchingError::Overlap(v)) => unreachable!("A and X overlap at {v}"),
                };
                em_worst = em_worst.max(uncovered.len());
                for e in &matching {
                    let at = attached[owner[&e.a]];
                    assign_pendant(&mut phi, t, at.edge, at.attach, e.x[0], e.x[1]);
                }
                row.matched = matching.len();
                let mut used_r = 0;
                for &av in &uncovered {
                    let [p, q] = repair_edge(host, av, &pool, reservoir, &phi)
                        .ok_or_else(|| (Some(events.clone()), AttemptFailure::Repair { stage: i, vertex: av }))?;
                    used_r += usize::from(reservoir.contains(p)) + usize::from(reservoir.contains(q));
                    let at = attached[owner[&av]];
                    assign_pendant(&mut phi, t, at.edge, at.attach, p, q);
                }
                row.repaired = uncovered.len();
                row.reservoir_used = used_r;
                if used_r > budget {
                    return Err((
                        Some(events.clone()),
                        AttemptFailure::StageBudget {
                            stage: i,
                            used: used_r,
                            budget,
                        },
                    ));
                }
                total_used += used_r;
            }
            Stage::Paths(pieces) => {
                let budget = (cfg.path_budget_factor * mu_n).floor() as usize;
                row.reservoir_budget = budget;
                let mut found = 0;
                let mut used_r = 0;
                let mut with_r = pool.clone();
                with_r.union_with(reservoir);
                for piece in pieces {
                    let (u, v) = piece.ends();
                    let (gu, gv) = (phi.image(u), phi.image(v));
                    let mut paths = find_disjoint_paths(host, gu, gv, &pool, 1, phi.used());
                    if paths.is_empty() {
                        paths = find_disjoint_paths(host, gu, gv, &with_r, 1, phi.used());
                    }
                    let Some(path) = paths.first() else {
                        return Err((
                            Some(events.clone()),
                            AttemptFailure::PathsShort {
                                stage: i,
                                found,
                                needed: pieces.len(),
                            },
                        ));
                    };
                    for (&t, &w) in piece.vertices.iter().zip(path).take(6).skip(1) {
                        phi.assign(t, w);
                    }
                    used_r += path[1..6].iter().filter(|&&w| reservoir.contains(w)).count();
                    found += 1;
                }
                row.matched = found;
                row.reservoir_used = used_r;
                if row.reservoir_used > budget {
                    return Err((
                        Some(events.clone()),
                        AttemptFailure::StageBudget {
                            stage: i,
                            used: row.reservoir_used,
                            budget,
                        },
                    ));
                }
                total_used += row.reservoir_used;
            }
        }
        leftover.union_with(part);
        row.elapsed = clock.elapsed();
        telemetry.push(row);
    }
    if total_used > total_budget {
        return Err((
            Some(events),
            AttemptFailure::TotalBudget {
                used: total_used,
                budget: total_budget,
            },
        ));
    }
    events.em_pass = em_pass;
    events.em_worst_shortfall = em_worst;
    Ok(PipelineOutcome {
        embedding: phi,
        retries: 0,
        plan: plan.clone(),
        events,
        telemetry,
        reservoir_size: reservoir.len(),
        reservoir_used: total_used,
        reservoir_total_budget: total_budget,
        history: Vec::new(),
        elapsed: Duration::ZERO,
    })
}

/// Stage 1: hang each tree star on its centre image using host edges whose
/// other two vertices lie in `X_1`, own host-star pairs first.
fn embed_star_stage(
    host: &crate::sts::LinearThreeGraph,
    t: &Hypertree,
    phi: &mut Embedding,
    demand: &BTreeMap<Vertex, Vec<usize>>,
    host_stars: &[super::EmbeddedStar],
    x1: &VertexSet,
) -> Result<(), AttemptFailure> {
    let free = |phi: &Embedding, v: Vertex| x1.contains(v) && !phi.is_used(v);
    let mut chosen: Vec<Vec<[Vertex; 2]>> = vec![Vec::new(); demand.len()];
    for (j, ((_, edges), star)) in demand.iter().zip(host_stars).enumerate() {
        for &[p, q] in &star.leaves {
            if chosen[j].len() == edges.len() {
                break;
            }
            if free(phi, p) && free(phi, q) {
                chosen[j].push([p, q]);
            }
        }
    }
    let mut taken = VertexSet::new(host.n());
    for pairs in &chosen {
        for &[p, q] in pairs {
            taken.insert(p);
            taken.insert(q);
        }
    }
    for (j, ((&center, edges), star)) in demand.iter().zip(host_stars).enumerate() {
        let c = star.center;
        for &id in host.edges_through(c) {
            if chosen[j].len() == edges.len() {
                break;
            }
            let mut o = host.edge(id as usize).into_iter().filter(|&v| v != c);
            let (p, q) = (o.next().unwrap(), o.next().unwrap());
            if free(phi, p) && free(phi, q) && !taken.contains(p) && !taken.contains(q) {
                taken.insert(p);
                taken.insert(q);
                chosen[j].push([p, q]);
            }
        }
        if chosen[j].len() < edges.len() {
            return Err(AttemptFailure::StarShort {
                center,
                found: chosen[j].len(),
                needed: edges.len(),
            });
        }
    }
    for (j, (&center, edges)) in demand.iter().enumerate() {
        for (&e, &[p, q]) in edges.iter().zip(&chosen[j]) {
            assign_pendant(phi, t, e, center, p, q);
        }
    }
    Ok(())
}

/// A repair edge through `a` with both other vertices unused in `pool ∪ R`,
/// preferring fewer reservoir vertices and then the lowest vertex indices.
fn repair_edge(
    host: &crate::sts::LinearThreeGraph,
    a: Vertex,
    pool: &VertexSet,
    reservoir: &VertexSet,
    phi: &Embedding,
) -> Option<[Vertex; 2]> {
    let mut best: Option<(usize, [Vertex; 2])> = None;
    for &id in host.edges_through(a) {
        let mut o = host.edge(id as usize).into_iter().filter(|&v| v != a);
        let (p, q) = (o.next().unwrap(), o.next().unwrap());
        let ok = |v: Vertex| !phi.is_used(v) && (pool.contains(v) || reservoir.contains(v));
        if !ok(p) || !ok(q) {
            continue;
        }
        let cost = usize::from(reservoir.contains(p)) + usize::from(reservoir.contains(q));
        let key = (cost, [p.min(q), p.max(q)]);
        if best.is_none_or(|b| key < b) {
            best = Some(key);
        }
    }
    best.map(|(_, pair)| pair)
}

#[allow(clippy::too_many_arguments)]
fn check_events<R: Rng>(
    g: &SteinerTripleSystem,
    cfg: &PipelineConfig,
    phi: &Embedding,
    base_image: &VertexSet,
    demand: &BTreeMap<Vertex, Vec<usize>>,
    partition: &VertexPartition,
    rng: &mut R,
) -> EventReport {
    let n = g.n();
    let host = g.graph();
    let mu_n = cfg.mu * n as f64;
    let mut report = EventReport {
        em_pass: true,
        ..EventReport::default()
    };

    let mut worst: f64 = 0.0;
    for (part, &p) in partition.parts.iter().zip(&partition.probs) {
        let count = part.intersection_count(base_image);
        let limit = cfg.f_factor * p * mu_n;
        worst = worst.max(if limit > 0.0 { count as f64 / limit } else { count as f64 });
    }
    report.f_worst_ratio = worst;
    report.f_pass = worst <= 1.0;

    let reservoir = &partition.reservoir;
    report.e0_degree_threshold = cfg.e0_degree_factor * mu_n;
    report.e0_min_degree = (0..n as Vertex)
        .map(|v| crate::partition::check_reservoir_degree(host, reservoir, v))
        .min()
        .unwrap_or(0);
    report.e0_path_threshold = cfg.e0_path_factor * mu_n;
    let want_paths = report.e0_path_threshold.ceil() as usize;
    let mut min_paths = usize::MAX;
    let vertices: Vec<Vertex> = (0..n as Vertex).collect();
    for _ in 0..cfg.e0_path_samples {
        let pair: Vec<Vertex> = vertices.choose_multiple(rng, 2).copied().collect();
        let found = find_disjoint_paths(host, pair[0], pair[1], reservoir, want_paths.max(1), &VertexSet::new(n));
        min_paths = min_paths.min(found.len());
    }
    report.e0_min_paths = if cfg.e0_path_samples == 0 { 0 } else { min_paths };
    report.e0_pass = report.e0_min_degree as f64 >= report.e0_degree_threshold
        && (cfg.e0_path_samples == 0 || report.e0_min_paths as f64 >= report.e0_path_threshold);

    let mut margin = i64::MAX;
    if let Some(x1) = partition.parts.first() {
        for (&center, edges) in demand {
            let c = phi.image(center);
            let count = host
                .edges_through(c)
                .iter()
                .filter(|&&id| {
                    host.edge(id as usize)
                        .iter()
                        .all(|&v| v == c || (x1.contains(v) && !phi.is_used(v)))
                })
                .count();
            margin = margin.min(count as i64 - edges.len() as i64);
        }
    }
    report.e1_margin = if demand.is_empty() { 0 } else { margin };
    report.e1_pass = report.e1_margin >= 0;

    report.sizes_pass = partition.parts.iter().zip(&partition.probs).all(|(part, &p)| {
        let expected = p * n as f64;
        let tol = if expected >= 100.0 { cfg.tol_large } else { cfg.tol_small };
        (part.len() as f64 - expected).abs() <= tol * expected.max(1.0)
    });
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypertree::{random_hypertree, validate_hypertree, TreeShape};
    use crate::sts::{fano, hill_climb_random};

    #[test]
    fn single_edge_anywhere() {
        let t = validate_hypertree(&[[0, 1, 2]]).unwrap();
        let cfg = PipelineConfig {
            eps: 0.5,
            ..PipelineConfig::default()
        };
        let out = embed_hypertree(&fano(), &t, &cfg, 1).unwrap();
        assert!(verify_embedding(fano().graph(), &t, &out.embedding).is_valid());
    }

    #[test]
    fn sizing_refusal() {
        let t = random_hypertree(3, 0, TreeShape::UniformAttach);
        let err = embed_hypertree(&fano(), &t, &PipelineConfig::default(), 0).unwrap_err();
        assert!(matches!(err, EmbedError::Sizing { tree_vertices: 7, .. }));
    }

    #[test]
    fn medium_tree() {
        let g = hill_climb_random(99, 11, 20_000_000).unwrap();
        let t = random_hypertree(35, 5, TreeShape::UniformAttach);
        let out = embed_hypertree(&g, &t, &PipelineConfig::default(), 3).unwrap();
        assert!(out.budgets_respected());
        let csv = out.telemetry_csv(false);
        assert!(csv.starts_with("stage,kind"));
        assert_eq!(csv.lines().count(), out.telemetry.len() + 1);
    }

    #[test]
    fn deterministic_for_a_seed() {
        let g = hill_climb_random(63, 4, 20_000_000).unwrap();
        let t = random_hypertree(20, 9, TreeShape::StarBiased);
        let cfg = PipelineConfig::default();
        let a = embed_hypertree(&g, &t, &cfg, 17);
        let b = embed_hypertree(&g, &t, &cfg, 17);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                assert_eq!(a.embedding, b.embedding);
                assert_eq!(a.telemetry_csv(false), b.telemetry_csv(false));
            }
            (Err(a), Err(b)) => assert_eq!(a, b),
            _ => panic!("runs with one seed disagree"),
        }
    }
}
