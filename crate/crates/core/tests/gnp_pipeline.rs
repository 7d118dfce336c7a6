use ist_core::gnp::{build_ists_gnp, core_violations, run_gnp, MatchingCase};
use ist_core::graph::VertexOrder;
use ist_core::random::{sample_gnp, stream_rng, GnpParams};
use ist_core::verify::verify_ist_family;

#[test]
fn dense_regime_builds_verified_families() {
    let params = GnpParams::new(400, 0.4, 0.2).unwrap();
    assert!(params.singleton_cores());
    let mut successes = 0;
    for s in 0..5u64 {
        let mut rng = stream_rng(3, 0, s);
        let (layers, result) = run_gnp(&params, None, &mut rng);
        let Ok(build) = result else { continue };
        successes += 1;
        assert_eq!(build.case, MatchingCase::SingletonCores);
        assert_eq!(build.trees.len(), params.k());
        let g = layers.first.union(&layers.second);
        assert!(verify_ist_family(&g, build.root, &build.trees).ok);
        assert!(core_violations(&build, &layers.first).is_empty());
    }
    assert!(successes >= 4, "{successes} of 5");
}

#[test]
fn boundary_regime_with_dense_first_layer() {
    // both layers far denser than their sprinkled rates
    for (n, p, eps, q) in [(500usize, 0.05, 0.3, 0.5), (200, 0.15, 0.45, 0.5)] {
        let params = GnpParams::new(n, p, eps).unwrap();
        assert!(!params.singleton_cores());
        let mut successes = 0;
        for s in 0..5u64 {
            let mut rng = stream_rng(4, 0, s);
            let g1 = sample_gnp(n, q, &mut rng).unwrap();
            let g2 = sample_gnp(n, q, &mut rng).unwrap();
            let Ok(build) = build_ists_gnp(&g1, &g2, &params, 0, &VertexOrder::Natural) else {
                continue;
            };
            successes += 1;
            assert_eq!(build.case, MatchingCase::BoundaryNeighbourhoods);
            assert_eq!(core_violations(&build, &g1), vec![]);
            assert!(verify_ist_family(&g1.union(&g2), 0, &build.trees).ok);
        }
        assert!(successes >= 4, "n = {n}: {successes} of 5");
    }
}

#[test]
fn sparse_first_layer_stalls_core_growth() {
    let params = GnpParams::new(2000, 0.076, 0.3).unwrap();
    let mut rng = stream_rng(5, 0, 0);
    let (_, result) = run_gnp(&params, Some(0), &mut rng);
    assert_eq!(result.unwrap_err().stage(), "phase2");
}
