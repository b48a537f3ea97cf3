use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sts_embed::embed::nibble::{nibble_matching, NibbleInstance};
use sts_embed::embed::{
    embed_hypertree, extend_by_matching, find_disjoint_paths, verify_embedding, EmbedError, MatchingConfig,
    PipelineConfig,
};
use sts_embed::hypertree::{random_hypertree, TreeShape};
use sts_embed::oracle::{count_paths_len3, max_matching_exact, SearchBudget};
use sts_embed::partition::{sample_subset, SingletonPairPartition};
use sts_embed::sts::{bose_construct, fano, hill_climb_random, skolem_construct};
use sts_embed::VertexSet;

#[test]
fn nibble_never_beats_the_exact_maximum() {
    let budget = SearchBudget::default();
    for g in [fano(), bose_construct(1), skolem_construct(2), bose_construct(2)] {
        let h = NibbleInstance::from_graph(g.graph());
        let best = max_matching_exact(&h, budget).unwrap().len();
        for seed in 0..10 {
            assert!(nibble_matching(&h, 0.1, seed).len() <= best);
        }
    }
}

#[test]
fn path_count_bounds_disjoint_paths() {
    let g = hill_climb_random(27, 1, 50_000_000).unwrap();
    let all = VertexSet::full(27);
    let none = VertexSet::new(27);
    for (u, v) in [(0, 1), (3, 17), (10, 26)] {
        let exact = count_paths_len3(g.graph(), u, v).unwrap();
        let found = find_disjoint_paths(g.graph(), u, v, &all, 27, &none).len() as u64;
        assert!(found <= exact, "{found} > {exact}");
        assert!(found > 0);
    }
}

#[test]
fn sizing_refusal_for_oversized_tree() {
    let g = hill_climb_random(255, 1, 50_000_000).unwrap();
    let t = random_hypertree(130, 1, TreeShape::UniformAttach);
    assert_eq!(t.n(), 261);
    assert!(matches!(
        embed_hypertree(&g, &t, &PipelineConfig::default(), 0),
        Err(EmbedError::Sizing { tree_vertices: 261, .. })
    ));
}

#[test]
fn matching_respects_its_contract() {
    let g = hill_climb_random(99, 8, 50_000_000).unwrap();
    let atoms = SingletonPairPartition::singletons(99);
    for seed in 0..10 {
        let mut x = sample_subset(&atoms, 0.6, seed);
        let a = VertexSet::from_vertices(99, (0..99).filter(|&v| !x.contains(v)).take(8));
        x.difference_with(&a);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = extend_by_matching(g.graph(), &a, &x, &MatchingConfig::default(), &mut rng).unwrap();
        let mut seen = VertexSet::new(99);
        for e in &m {
            assert!(a.contains(e.a) && g.has_edge(e.a, e.x[0], e.x[1]));
            assert!(seen.insert(e.a) && seen.insert(e.x[0]) && seen.insert(e.x[1]));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_success_verifies(seed in any::<u64>(), shape in 0usize..4, frac in 0.2f64..0.75) {
        let g = hill_climb_random(99, seed % 7, 50_000_000).unwrap();
        let edges = (((frac * 99.0) as usize).saturating_sub(1) / 2).max(1);
        let t = random_hypertree(edges, seed, TreeShape::ALL[shape]);
        if let Ok(out) = embed_hypertree(&g, &t, &PipelineConfig::default(), seed) {
            prop_assert!(verify_embedding(g.graph(), &t, &out.embedding).is_valid());
            prop_assert!(out.budgets_respected());
            prop_assert_eq!(out.telemetry.iter().map(|s| s.new_vertices).sum::<usize>(), t.n());
        }
    }
}
