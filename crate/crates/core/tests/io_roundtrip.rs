use multinet::compose::{compose_ego, EgoMarkov, EgoOptions};
use multinet::io::{
    parse_egos, parse_layers, read_layers, read_super, write_layers, write_super, LabeledSuper, RunConfig, SuperFormat,
};
use multinet::{ErrorKind, LayerGraph};

const DATASET: &str = "\
# two channels
layer phone undirected
layer email directed
edge phone alice bob 3
edge phone bob carol 1.25
edge email alice carol 0.1
edge email carol alice 2
edge email bob alice 1e-3
";

fn composed() -> LabeledSuper {
    let ds = parse_layers(DATASET).unwrap();
    let egos = parse_egos(r#"{"alice": [[0.75, 0.5], [0.25, 0.5]], "carol": [[0.9, 0.3], [0.1, 0.7]]}"#, &ds).unwrap();
    let s = compose_ego(&ds.layers, &egos, &EgoOptions::default()).unwrap();
    LabeledSuper { super_adj: s, labels: ds.labels, layer_names: ds.layer_names }
}

#[test]
fn layered_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let ds = parse_layers(DATASET).unwrap();
    let path = dir.path().join("net.txt");
    std::fs::write(&path, write_layers(&ds)).unwrap();
    let back = read_layers(&path).unwrap();
    assert_eq!(back.labels, ["alice", "bob", "carol"]);
    assert_eq!(back.layers, ds.layers);
    assert_eq!(back.layers[1].weight(1, 0), 1e-3);
}

#[test]
fn super_files_round_trip_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let s = composed();
    for (name, format) in [("s.mtx", SuperFormat::MatrixMarket), ("s.json", SuperFormat::Json)] {
        let path = dir.path().join(name);
        std::fs::write(&path, write_super(&s, format)).unwrap();
        let back = read_super(&path).unwrap();
        assert_eq!(back.labels, s.labels);
        assert_eq!(back.layer_names, s.layer_names);
        let (a, b) = (back.super_adj.to_graph(), s.super_adj.to_graph());
        let bits = |g: &LayerGraph| g.entries().map(|(u, v, w)| (u, v, w.to_bits())).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b), "{name}");
    }
}

#[test]
fn missing_file_is_an_io_error() {
    let err = multinet::Error::from(read_super("/nonexistent/super.mtx").unwrap_err());
    assert_eq!(err.kind(), ErrorKind::Io);
    assert_eq!(err.kind().exit_code(), 2);
}

#[test]
fn infeasible_input_is_a_validation_error() {
    let ds = parse_layers("layer a undirected\nlayer b undirected\nedge a x y 1\nedge b x y 1\n").unwrap();
    // Vertex 0 switches layers at different rates in the two directions, which no symmetric slice allows.
    let skewed = vec![EgoMarkov::from_rows(0, &[vec![0.5, 0.1], vec![0.5, 0.9]]).unwrap(), EgoMarkov::identity(1, 2)];
    let err = multinet::Error::from(compose_ego(&ds.layers, &skewed, &EgoOptions::default()).unwrap_err());
    assert_eq!(err.kind().exit_code(), 1);
}

#[test]
fn config_file_with_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "seed = 5\n[eigen]\ntol = 1e-9\n").unwrap();
    let mut cfg = RunConfig::load(Some(&path)).unwrap();
    cfg.apply_seed_override(Some("11")).unwrap();
    assert_eq!(cfg.eigen_options().seed, 11);
    assert_eq!(cfg.eigen_options().tol, 1e-9);
}

#[test]
fn social_toy_fixture() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let ds = read_layers(dir.join("social_toy.txt")).unwrap();
    assert_eq!((ds.l(), ds.n()), (3, 4));
    assert_eq!(ds.layer_names, ["phone", "email", "facebook"]);
    let egos = parse_egos(&std::fs::read_to_string(dir.join("social_toy_egos.json")).unwrap(), &ds).unwrap();
    let s = compose_ego(&ds.layers, &egos, &EgoOptions::default()).unwrap();
    // Alice relays a phone message by email with probability 0.3 and keeps calling with 0.6;
    // her phone degree is 3.
    assert_eq!(s.inter_weight(0, 0, 1), 0.3 / 0.6 * 3.0);
    assert!(multinet::verify_ego_consistency(&s, &egos, 1e-12).unwrap().passed);
    assert!(multinet::verify_layer_consistency(&s, &ds.layers, 1e-12).unwrap().passed);
    // Nobody else switches layers.
    assert!((1..4).all(|u| (0..3).all(|i| (0..3).all(|j| s.inter_weight(u, i, j) == 0.0))));
}
