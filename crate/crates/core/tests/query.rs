mod common;

use common::{example_index, id, oracle_apply, Oracle};
use dagger::workload::{gen_er, gen_updates, GenConfig, Model, UpdateConfig};
use dagger::{DaggerIndex, Error, IndexConfig, NodeRef, UpdateOp};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn example_queries() {
    let mut idx = example_index();
    assert!(idx.reachable(id("R"), id("N")).unwrap());
    assert!(idx.reachable(id("R"), id("R")).unwrap());
    assert!(idx.dfs_input(id("R"), id("S")).unwrap());
    assert!(!idx.dfs_input(id("M"), id("R")).unwrap());
    assert!(!idx.reachable(id("M"), id("R")).unwrap());
    let (hit, stats) = idx.reachable_with_stats(id("A"), id("B")).unwrap();
    assert!(hit);
    assert_eq!(
        (stats.visited, stats.pruned),
        (1, 0),
        "same component needs no search"
    );
    assert!(matches!(idx.reachable(0, 99), Err(Error::UnknownNode(99))));
    assert!(matches!(idx.dfs_input(99, 0), Err(Error::UnknownNode(99))));
}

#[test]
fn dag_search_on_the_example() {
    let mut idx = example_index();
    let one = idx.find_scc(id("A")).unwrap();
    let three = idx.find_scc(id("N")).unwrap();
    assert!(idx.dfs_dag(one, three).unwrap());
    assert!(!idx.dfs_dag(three, one).unwrap());
    assert!(idx.dfs_dag(one, one).unwrap());
    let m = NodeRef::input(id("M"));
    assert!(idx.dfs_dag(m, m).unwrap());
    // an absorbed singleton is no longer a DAG node
    assert!(matches!(
        idx.dfs_dag(NodeRef::input(id("A")), one),
        Err(Error::Logic(_))
    ));
}

#[test]
fn agrees_with_input_dfs_on_an_evolving_graph() {
    let n = 1000;
    let edges = gen_er(n, 1500, 4).unwrap();
    let mut idx = DaggerIndex::build(n, &edges, IndexConfig::new(2, 4)).unwrap();
    let cfg = UpdateConfig {
        count: 500,
        seed: 4,
        ..UpdateConfig::default()
    };
    let ops: Vec<UpdateOp> = gen_updates(idx.graph().input(), &cfg)
        .unwrap()
        .into_iter()
        .filter(|op| !matches!(op, UpdateOp::Query(..)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let mut pairs = 0;
    for op in &ops {
        idx.apply(op).unwrap();
        let nodes: Vec<u32> = idx.graph().input().nodes().collect();
        for _ in 0..20 {
            let u = nodes[rng.gen_range(0..nodes.len())];
            let v = nodes[rng.gen_range(0..nodes.len())];
            assert_eq!(
                idx.reachable(u, v).unwrap(),
                idx.dfs_input(u, v).unwrap(),
                "{op:?} {u} {v}"
            );
            pairs += 1;
        }
    }
    assert!(pairs >= 10_000);
}

#[test]
fn dag_search_lifts_input_search() {
    for seed in 0..50 {
        let n = 20 + seed as usize;
        let edges = gen_er(n, n * 3 / 2, seed).unwrap();
        let mut idx = DaggerIndex::build(n, &edges, IndexConfig::new(1, seed)).unwrap();
        let oracle = Oracle::new(n, &edges);
        for u in 0..n as u32 {
            for v in 0..n as u32 {
                let s = idx.find_scc(u).unwrap();
                let t = idx.find_scc(v).unwrap();
                assert_eq!(
                    idx.dfs_dag(s, t).unwrap(),
                    oracle.reaches(u, v),
                    "seed {seed}: {u} {v}"
                );
            }
        }
    }
}

#[test]
fn pruned_children_cannot_reach_the_target() {
    for seed in 0..30 {
        let n = 25;
        let mut idx =
            DaggerIndex::build(n, &gen_er(n, 40, seed).unwrap(), IndexConfig::new(2, seed))
                .unwrap();
        let nodes = idx.graph().dag_nodes();
        for &t in &nodes {
            let lt = idx.label(t).unwrap();
            for &w in &nodes {
                if w != t && !idx.label(w).unwrap().subsumes(&lt).unwrap() {
                    assert!(
                        !idx.dfs_dag(w, t).unwrap(),
                        "seed {seed}: {w} pruned but reaches {t}"
                    );
                }
            }
        }
    }
}

#[test]
fn more_dimensions_never_visit_more() {
    for seed in 0..10 {
        let g = GenConfig {
            model: Model::Ba,
            n: 2000,
            m: 0,
            d: 2,
            reverse_prob: 0.5,
            seed,
        }
        .generate()
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs: Vec<(u32, u32)> = (0..300)
            .map(|_| (rng.gen_range(0..2000), rng.gen_range(0..2000)))
            .collect();
        let mut plain = DaggerIndex::build(2000, &g, IndexConfig::new(0, seed)).unwrap();
        let mut labeled = DaggerIndex::build(2000, &g, IndexConfig::new(2, seed)).unwrap();
        let (a, sa) = plain.reachable_many(&pairs).unwrap();
        let (b, sb) = labeled.reachable_many(&pairs).unwrap();
        assert_eq!(a, b);
        assert!(
            sb.visited <= sa.visited,
            "seed {seed}: {} > {}",
            sb.visited,
            sa.visited
        );
        assert_eq!(sa.pruned, 0);
    }
}

#[test]
fn every_dimension_count_is_exact() {
    let n = 60;
    let edges = gen_er(n, 90, 8).unwrap();
    let oracle = Oracle::new(n, &edges);
    for k in 0..=3 {
        let mut idx = DaggerIndex::build(n, &edges, IndexConfig::new(k, 8)).unwrap();
        for u in 0..n as u32 {
            for v in 0..n as u32 {
                assert_eq!(idx.reachable(u, v).unwrap(), oracle.reaches(u, v), "k {k}");
            }
        }
    }
}

#[test]
fn queries_after_node_churn() {
    let n = 50;
    let edges = gen_er(n, 75, 12).unwrap();
    let mut idx = DaggerIndex::build(n, &edges, IndexConfig::new(2, 12)).unwrap();
    let mut oracle = Oracle::new(n, &edges);
    let ops = gen_updates(
        idx.graph().input(),
        &UpdateConfig {
            count: 300,
            ratios: "0,0,50,50".parse().unwrap(),
            d: 2,
            seed: 12,
        },
    )
    .unwrap();
    for op in &ops {
        idx.apply(op).unwrap();
        oracle_apply(&mut oracle, op);
    }
    for u in oracle.nodes() {
        for v in oracle.nodes() {
            assert_eq!(idx.reachable(u, v).unwrap(), oracle.reaches(u, v));
        }
    }
}
