//! Acceptance checks. Each test prints one `criterion N ... PASS|FAIL` line
//! to the real stdout (bypassing capture) and then asserts the criterion.

use std::collections::HashSet;
use std::io::Write as _;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use sts_embed::embed::nibble::{nibble_matching, NibbleInstance};
use sts_embed::embed::stars::{embed_stars_with_stats, StarRequest};
use sts_embed::embed::{embed_hypertree, greedy_embed, verify_embedding, PipelineConfig};
use sts_embed::hypertree::{leaf_edges, random_hypertree, Hypertree, TreeShape};
use sts_embed::io;
use sts_embed::oracle::{backtrack_embed, max_matching_exact, SearchBudget, SearchResult};
use sts_embed::partition::{check_edge_density, check_reservoir_degree, sample_subset, SingletonPairPartition};
use sts_embed::split::{
    bare_path_residual, extract_bare_paths_2tree, extract_semi_bare_paths, line_graph_bfs, residual_bound,
    semi_bare_residual, split_hypertree, validate_split, GraphTree, SplitParams,
};
use sts_embed::sts::{bose_construct, fano, hill_climb_random, skolem_construct, validate_sts, LinearThreeGraph};
use sts_embed::{Vertex, VertexSet};

fn report(id: u32, name: &str, pass: bool, detail: &str, elapsed: Duration) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {id} {name}: {verdict} ({detail}; {:.2}s)", elapsed.as_secs_f64());
}

/// Independent pair-coverage and degree scan.
fn is_complete_system(g: &LinearThreeGraph) -> bool {
    let n = g.n();
    let mut cover = vec![0u8; n * n];
    let mut deg = vec![0usize; n];
    for e in g.edges() {
        for i in 0..3 {
            deg[e[i] as usize] += 1;
            for j in 0..3 {
                if i != j {
                    cover[e[i] as usize * n + e[j] as usize] += 1;
                }
            }
        }
    }
    let pairs_ok = (0..n).all(|u| (0..n).all(|v| u == v || cover[u * n + v] == 1));
    pairs_ok && deg.iter().all(|&d| d == (n - 1) / 2) && g.num_edges() == n * (n - 1) / 6
}

#[test]
fn criterion_1_structural_exactness() {
    let clock = Instant::now();
    let mut checked = 0;
    let mut ok = true;
    for k in 1..=20 {
        for g in [bose_construct(k), skolem_construct(k)] {
            ok &= validate_sts(g.graph()).is_valid() && is_complete_system(g.graph());
            checked += 1;
        }
    }
    let elapsed = clock.elapsed();
    let pass = ok && elapsed < Duration::from_secs(5);
    report(1, "structural exactness", pass, &format!("{checked} systems, k <= 20"), elapsed);
    assert!(pass);
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Number of Berge paths from `u` to `v` by exhaustive search.
fn berge_paths(t: &Hypertree, u: Vertex, v: Vertex) -> usize {
    fn go(t: &Hypertree, at: Vertex, v: Vertex, seen_v: &mut Vec<bool>, seen_e: &mut Vec<bool>) -> usize {
        if at == v {
            return 1;
        }
        let mut total = 0;
        for (id, e) in t.edges().iter().enumerate() {
            if seen_e[id] || !e.contains(&at) {
                continue;
            }
            seen_e[id] = true;
            for &w in e {
                if w == at || seen_v[w as usize] {
                    continue;
                }
                seen_v[w as usize] = true;
                total += go(t, w, v, seen_v, seen_e);
                seen_v[w as usize] = false;
            }
            seen_e[id] = false;
        }
        total
    }
    let mut seen_v = vec![false; t.n()];
    seen_v[u as usize] = true;
    go(t, u, v, &mut seen_v, &mut vec![false; t.num_edges()])
}

fn hypertree_axioms(t: &Hypertree) -> bool {
    let e = t.num_edges();
    if t.n() != 2 * e + 1 {
        return false;
    }
    for i in 0..e {
        for j in i + 1..e {
            let (a, b) = (t.edge(i), t.edge(j));
            if a.iter().filter(|v| b.contains(v)).count() > 1 {
                return false;
            }
        }
    }
    let mut parent: Vec<usize> = (0..t.n()).collect();
    for ed in t.edges() {
        for w in &ed[1..] {
            let (x, y) = (find(&mut parent, ed[0] as usize), find(&mut parent, *w as usize));
            parent[x] = y;
        }
    }
    let root = find(&mut parent, 0);
    if (0..t.n()).any(|v| find(&mut parent, v) != root) {
        return false;
    }
    if e <= 8 {
        for u in 0..t.n() as Vertex {
            for v in u + 1..t.n() as Vertex {
                if berge_paths(t, u, v) != 1 {
                    return false;
                }
            }
        }
    }
    true
}

#[test]
fn criterion_2_hypertree_axioms() {
    let clock = Instant::now();
    let trials = 10_000u64;
    let failures: Vec<u64> = (0..trials)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = ChaCha8Rng::seed_from_u64(i);
            let edges = if i % 2 == 0 { rng.gen_range(1..=8) } else { rng.gen_range(1..=120) };
            let t = random_hypertree(edges, i, TreeShape::ALL[(i % 4) as usize]);
            !hypertree_axioms(&t)
        })
        .collect();
    let elapsed = clock.elapsed();
    let pass = failures.is_empty() && elapsed < Duration::from_secs(60);
    report(2, "hypertree axioms", pass, &format!("{} of {trials} trees violate", failures.len()), elapsed);
    assert!(pass, "failing seeds {failures:?}");
}

/// Residuals of semi-bare and bare path carving on one tree.
fn extraction_bounds_hold(t: &Hypertree, m: usize) -> bool {
    let paths = extract_semi_bare_paths(t, m);
    let leaves = leaf_edges(t).len();
    if semi_bare_residual(t.num_edges(), &paths) as f64 > residual_bound(m, leaves, t.num_edges()) {
        return false;
    }
    let leaf_ids: HashSet<usize> = leaf_edges(t).iter().map(|l| l.edge).collect();
    let Some(root) = (0..t.num_edges()).find(|e| !leaf_ids.contains(e)) else {
        return true;
    };
    let lg = line_graph_bfs(t, root).expect("non-leaf root");
    let pairs: Vec<(u32, u32)> = lg
        .parent
        .iter()
        .enumerate()
        .filter_map(|(e, p)| p.map(|p| (e as u32, p)))
        .collect();
    let tree = GraphTree::new(t.num_edges(), &pairs).expect("BFS tree is a tree");
    let bare = extract_bare_paths_2tree(&tree, m);
    bare_path_residual(&tree, &bare) as f64 <= residual_bound(m, tree.leaf_count(), tree.n())
}

#[test]
fn criterion_3_split_validity() {
    let clock = Instant::now();
    let trials = 1000u64;
    let results: Vec<(bool, bool, bool)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(1_000_000 + i);
            let edges = rng.gen_range(1..=5000);
            let t = random_hypertree(edges, i, TreeShape::ALL[(i % 4) as usize]);
            let d = [4, 8, 16][(i % 3) as usize];
            let mu = [0.02, 0.05, 0.1][((i / 3) % 3) as usize];
            let n = ((t.n() as f64) / 0.75).ceil() as usize;
            let mut params = SplitParams::new(d, mu, n);
            if i % 2 == 1 {
                params = params.with_path_length(4 + (i as usize / 2) % 8);
            }
            let plan = split_hypertree(&t, &params);
            let valid = validate_split(&plan, &t, n).is_valid();
            let short = (plan.len() as f64) <= params.stage_limit();
            let bounds = extraction_bounds_hold(&t, 2 + (i as usize) % 10);
            (valid, short, bounds)
        })
        .collect();
    let elapsed = clock.elapsed();
    let valid = results.iter().filter(|r| r.0).count();
    let short = results.iter().filter(|r| r.1).count();
    let bounds = results.iter().filter(|r| r.2).count();
    let pass = valid == results.len() && short == results.len() && bounds == results.len()
        && elapsed < Duration::from_secs(300);
    report(
        3,
        "split validity",
        pass,
        &format!("valid {valid}/{trials}, chain bound {short}/{trials}, residual bounds {bounds}/{trials}"),
        elapsed,
    );
    assert!(pass);
}

#[test]
fn criterion_4_star_embedding() {
    let clock = Instant::now();
    let trials = 500usize;
    let systems: Vec<_> = [15usize, 27, 63]
        .iter()
        .map(|&n| hill_climb_random(n, n as u64, 50_000_000).unwrap())
        .collect();
    let outcomes: Vec<(bool, usize)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let g = &systems[i % 3];
            let n = g.n();
            let mut rng = ChaCha8Rng::seed_from_u64(4_000 + i as u64);
            let k_max = ((0.02 * n as f64).floor() as usize).max(1);
            let k = rng.gen_range(1..=k_max);
            let mut verts: Vec<Vertex> = (0..n as Vertex).collect();
            verts.shuffle(&mut rng);
            // no edge holds two centres
            let mut centers: Vec<Vertex> = Vec::new();
            for &v in &verts {
                if centers.len() == k {
                    break;
                }
                if centers.iter().all(|&c| g.complete_pair(c, v).is_none_or(|w| !centers.contains(&w))) {
                    centers.push(v);
                }
            }
            let budget = (0.35 * n as f64).floor() as usize;
            let mut sizes = vec![1usize; k];
            let mut left = budget.saturating_sub(k);
            for s in sizes.iter_mut() {
                let extra = rng.gen_range(0..=left);
                *s += extra;
                left -= extra;
            }
            let req = StarRequest::new(centers.clone(), sizes.clone()).unwrap();
            match embed_stars_with_stats(g.graph(), &req, &VertexSet::new(n)) {
                Ok((stars, stats)) => {
                    let mut seen = VertexSet::from_vertices(n, centers.iter().copied());
                    let ok = stars.iter().zip(&centers).zip(&sizes).all(|((s, &c), &size)| {
                        s.center == c
                            && s.leaves.len() == size
                            && s.leaves.iter().all(|&[x, y]| g.has_edge(c, x, y) && seen.insert(x) && seen.insert(y))
                    });
                    (ok, stats.switches)
                }
                Err(_) => (false, 0),
            }
        })
        .collect();
    let elapsed = clock.elapsed();
    let ok = outcomes.iter().filter(|o| o.0).count();
    let switches: usize = outcomes.iter().map(|o| o.1).sum();
    let pass = ok as f64 >= 0.99 * trials as f64 && elapsed < Duration::from_secs(120);
    report(4, "star embedding", pass, &format!("{ok}/{trials} exact, {switches} switches"), elapsed);
    assert!(pass);
}

#[test]
fn criterion_5_nibble_quality() {
    let clock = Instant::now();
    let budget = SearchBudget::default();
    let mut detail = Vec::new();
    let mut pass = true;
    for (n, g) in [(99, hill_climb_random(99, 5, 50_000_000).unwrap()), (999, bose_construct(166))] {
        let h = NibbleInstance::from_graph(g.graph());
        let sizes: Vec<usize> = (0..20u64).into_par_iter().map(|s| nibble_matching(&h, 0.1, s).len()).collect();
        let min = *sizes.iter().min().unwrap();
        let target = 0.9 * n as f64 / 3.0;
        pass &= min as f64 >= target;
        detail.push(format!("n={n} min {min} >= {target:.1}"));
    }
    let h9 = NibbleInstance::from_graph(bose_construct(1).graph());
    let max9 = max_matching_exact(&h9, budget).unwrap().len();
    let h7 = NibbleInstance::from_graph(fano().graph());
    let max7 = max_matching_exact(&h7, budget).unwrap().len();
    // any two Fano lines meet, so a matching has one edge
    let fano_lines_meet = fano().edges().iter().enumerate().all(|(i, a)| {
        fano().edges()[i + 1..].iter().all(|b| a.iter().any(|v| b.contains(v)))
    });
    let dominated = (0..20).all(|s| nibble_matching(&h9, 0.1, s).len() <= max9 && nibble_matching(&h7, 0.1, s).len() <= max7);
    pass &= max9 == 3 && max7 == 1 && fano_lines_meet && dominated;
    detail.push(format!("STS(9) max {max9}, Fano max {max7}"));
    let elapsed = clock.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    report(5, "nibble quality", pass, &detail.join(", "), elapsed);
    assert!(pass);
}

#[test]
fn criterion_6_concentration() {
    let clock = Instant::now();
    let mut detail = Vec::new();
    let mut pass = true;
    for (n, g) in [(999usize, bose_construct(166)), (2187, bose_construct(364))] {
        let atoms = SingletonPairPartition::singletons(n);
        for p in [0.2, 0.5] {
            let passes = (0..200u64)
                .into_par_iter()
                .filter(|&s| {
                    let x = sample_subset(&atoms, p, s);
                    let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0xA5A5);
                    let mut rest: Vec<Vertex> = (0..n as Vertex).filter(|&v| !x.contains(v)).collect();
                    rest.shuffle(&mut rng);
                    let size = n / 10;
                    let a = VertexSet::from_vertices(n, rest[..size].iter().copied());
                    let b = VertexSet::from_vertices(n, rest[size..2 * size].iter().copied());
                    check_edge_density(g.graph(), &a, &b, &x, p, 0.25).unwrap().pass
                })
                .count();
            pass &= passes as f64 >= 0.95 * 200.0;
            detail.push(format!("density n={n} p={p}: {passes}/200"));
        }
    }
    for (n, g) in [
        (99usize, hill_climb_random(99, 6, 50_000_000).unwrap()),
        (255, hill_climb_random(255, 6, 50_000_000).unwrap()),
        (999, bose_construct(166)),
    ] {
        let atoms = SingletonPairPartition::singletons(n);
        for p in [0.3, 0.5] {
            let (above, total) = (0..100u64)
                .into_par_iter()
                .map(|s| {
                    let x = sample_subset(&atoms, p, 7_000 + s);
                    let threshold = p * p * n as f64 / 3.0;
                    let above = (0..n as Vertex)
                        .filter(|&v| check_reservoir_degree(g.graph(), &x, v) as f64 > threshold)
                        .count();
                    (above, n)
                })
                .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
            let frac = above as f64 / total as f64;
            pass &= frac >= 0.99;
            detail.push(format!("reservoir n={n} p={p}: {:.4}", frac));
        }
    }
    let elapsed = clock.elapsed();
    pass &= elapsed < Duration::from_secs(120);
    report(6, "concentration surrogates", pass, &detail.join(", "), elapsed);
    assert!(pass);
}

#[test]
fn criterion_7_oracle_agreement() {
    let clock = Instant::now();
    let systems = [fano(), bose_construct(1), skolem_construct(2), bose_construct(2)];
    let budget = SearchBudget::default();
    let path3 = sts_embed::hypertree::validate_hypertree(&[[0, 1, 2], [2, 3, 4], [4, 5, 6]]).unwrap();
    let fano_fact = backtrack_embed(fano().graph(), &path3, budget).unwrap() == SearchResult::Infeasible
        && greedy_embed(fano().graph(), &path3, &VertexSet::new(7)).is_err();
    let rows: Vec<(bool, bool, bool, bool, bool)> = (0..200usize)
        .into_par_iter()
        .map(|i| {
            let g = &systems[i % 4];
            let n = g.n();
            let e_max = (((0.8 * n as f64).floor() as usize) - 1) / 2;
            let mut rng = ChaCha8Rng::seed_from_u64(7_000 + i as u64);
            let t = random_hypertree(rng.gen_range(1..=e_max), i as u64, TreeShape::ALL[i % 4]);
            let oracle = backtrack_embed(g.graph(), &t, budget).expect("oracle finishes at this size");
            let cfg = PipelineConfig {
                eps: 0.2,
                ..PipelineConfig::default()
            };
            let mut engine_ok = true;
            let mut engine_found = false;
            if let Ok(out) = embed_hypertree(g, &t, &cfg, i as u64) {
                engine_found = true;
                engine_ok &= verify_embedding(g.graph(), &t, &out.embedding).is_valid();
            }
            if let Ok(phi) = greedy_embed(g.graph(), &t, &VertexSet::new(n)) {
                engine_found = true;
                engine_ok &= verify_embedding(g.graph(), &t, &phi).is_valid();
            }
            let oracle_ok = match &oracle {
                SearchResult::Found(phi) => verify_embedding(g.graph(), &t, phi).is_valid(),
                SearchResult::Infeasible => true,
            };
            let infeasible = oracle == SearchResult::Infeasible;
            let agrees = !(engine_found && infeasible);
            (agrees, engine_ok, oracle_ok, engine_found, infeasible)
        })
        .collect();
    let elapsed = clock.elapsed();
    let agree = rows.iter().filter(|r| r.0 && r.1 && r.2).count();
    let found = rows.iter().filter(|r| r.3).count();
    let infeasible = rows.iter().filter(|r| r.4).count();
    let pass = agree == rows.len() && fano_fact && elapsed < Duration::from_secs(120);
    report(
        7,
        "oracle agreement",
        pass,
        &format!("{agree}/200 consistent, engine embedded {found}, oracle infeasible {infeasible}, Fano spanning 3-path infeasible: {fano_fact}"),
        elapsed,
    );
    assert!(pass);
}

#[test]
fn criterion_8_pipeline() {
    let shapes = [TreeShape::UniformAttach, TreeShape::PathBiased, TreeShape::StarBiased];
    let cfg = PipelineConfig {
        eps: 0.25,
        max_retries: 20,
        ..PipelineConfig::default()
    };
    let mut all = true;
    let mut cells = Vec::new();
    let total = Instant::now();
    for n in [63usize, 99, 255] {
        let g = hill_climb_random(n, n as u64 + 17, 50_000_000).unwrap();
        let edges = (((0.75 * n as f64).floor() as usize) - 1) / 2;
        for shape in shapes {
            let clock = Instant::now();
            let results: Vec<(bool, bool)> = (0..50u64)
                .into_par_iter()
                .map(|s| {
                    let t = random_hypertree(edges, 80_000 + s, shape);
                    match embed_hypertree(&g, &t, &cfg, s) {
                        Ok(out) => (
                            verify_embedding(g.graph(), &t, &out.embedding).is_valid(),
                            out.budgets_respected(),
                        ),
                        Err(_) => (false, true),
                    }
                })
                .collect();
            let ok = results.iter().filter(|r| r.0).count();
            let budgets = results.iter().all(|r| r.1);
            let cell_pass = ok >= 45 && budgets && clock.elapsed() < Duration::from_secs(600);
            all &= cell_pass;
            cells.push(format!("n={n} {shape}: {ok}/50"));
        }
    }
    report(8, "end-to-end pipeline", all, &cells.join(", "), total.elapsed());
    assert!(all);
}

#[test]
fn criterion_9_determinism() {
    let clock = Instant::now();
    let twice = |f: &dyn Fn() -> String| f() == f();
    let sts = twice(&|| io::write_sts(hill_climb_random(45, 9, 50_000_000).unwrap().graph()));
    let plan = twice(&|| {
        let t = random_hypertree(400, 9, TreeShape::Caterpillar);
        io::write_hypertree(&t) + &io::write_split_plan(&split_hypertree(&t, &SplitParams::new(4, 0.05, 1100)))
    });
    let embed = twice(&|| {
        let g = hill_climb_random(99, 9, 50_000_000).unwrap();
        let t = random_hypertree(36, 9, TreeShape::UniformAttach);
        let out = embed_hypertree(&g, &t, &PipelineConfig::default(), 9).unwrap();
        io::write_embedding(&out.embedding) + &out.telemetry_csv(false)
    });
    let pass = sts && plan && embed;
    report(
        9,
        "determinism",
        pass,
        &format!("system {sts}, tree and plan {plan}, embedding and telemetry {embed}"),
        clock.elapsed(),
    );
    assert!(pass);
}
