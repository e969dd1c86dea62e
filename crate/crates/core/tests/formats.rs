use dagger::formats::{
    parse_graph, parse_workload, read_graph, read_workload, write_graph, write_workload,
};
use dagger::workload::{gen_updates, GenConfig, Model, UpdateConfig};
use dagger::{Error, InputGraph};

#[test]
fn generated_graphs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..20 {
        let model = if seed % 2 == 0 { Model::Er } else { Model::Ba };
        let n = 50 + seed as usize * 7;
        let edges = GenConfig {
            model,
            n,
            m: n * 2,
            d: 2,
            reverse_prob: 0.5,
            seed,
        }
        .generate()
        .unwrap();
        let path = dir.path().join(format!("g{seed}.txt"));
        std::fs::write(&path, write_graph(n, &edges)).unwrap();
        let back = read_graph(&path).unwrap();
        assert_eq!(back.n, n);
        assert_eq!(back.edges, edges);
    }
}

#[test]
fn trailing_isolated_nodes_survive() {
    let g = parse_graph(&write_graph(10, &[(0, 1)])).unwrap();
    assert_eq!(g.n, 10);
}

#[test]
fn generated_workloads_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..20 {
        let edges = GenConfig {
            model: Model::Er,
            n: 80,
            m: 120,
            d: 2,
            reverse_prob: 0.5,
            seed,
        }
        .generate()
        .unwrap();
        let g = InputGraph::from_edges(80, &edges).unwrap();
        let ops = gen_updates(
            &g,
            &UpdateConfig {
                count: 200,
                seed,
                ..UpdateConfig::default()
            },
        )
        .unwrap();
        let text = write_workload(&ops);
        let path = dir.path().join(format!("w{seed}.txt"));
        std::fs::write(&path, &text).unwrap();
        assert_eq!(read_workload(&path).unwrap(), ops);
        assert_eq!(write_workload(&parse_workload(&text).unwrap()), text);
    }
}

#[test]
fn missing_file_is_an_io_error() {
    let err = read_graph("/nonexistent/graph.txt").unwrap_err();
    assert!(matches!(err, Error::Io(_)));
    assert!(err.is_input());
}
