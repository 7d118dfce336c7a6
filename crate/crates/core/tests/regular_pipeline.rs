use ist_core::graph::{bfs_tree, Graph, RootedTree, Vertex, VertexOrder};
use ist_core::random::{sample_disjoint_matchings, stream_rng, MatchingFamily, TrialRng};
use ist_core::regular::{
    apply_reroute, build_ists_regular_even, decompose_colors, diameter_deletion_check,
    extend_trees, find_bad, op_transform, plan_reroute, reroute_pipeline, run_regular_even,
    run_regular_odd, BadVertexRecord, DiameterConstant, RegularOptions, RegularParams,
};
use ist_core::verify::{verify_ist_family, verify_strong, StructuralReason};
use rand::SeedableRng;

fn chain(root: Vertex, order: &[Vertex], n: usize) -> RootedTree {
    let mut parent = vec![None; n];
    let mut prev = root;
    for &v in order {
        parent[v] = Some(prev);
        prev = v;
    }
    RootedTree::from_parents(root, parent)
}

#[test]
fn twelve_colours_give_three_groups() {
    let mut rng = TrialRng::seed_from_u64(4);
    let fam = sample_disjoint_matchings(100, 12, &mut rng).unwrap();
    let dec = decompose_colors(&fam).unwrap();
    assert_eq!(dec.groups.len(), 3);
    assert!(dec.leftover.is_empty());
    let mut edges: Vec<_> = dec.groups.iter().flat_map(|g| g.edges().to_vec()).collect();
    for mates in &dec.reserves {
        edges.extend((0..100).filter(|&v| v < mates[v]).map(|v| (v, mates[v])));
    }
    let union = Graph::from_edges(100, edges).expect("groups and reserves are edge-disjoint");
    assert_eq!(union.regular_degree(), Some(12));
    let four = sample_disjoint_matchings(20, 4, &mut rng).unwrap();
    let dec = decompose_colors(&four).unwrap();
    assert_eq!((dec.groups.len(), dec.reserves.len()), (1, 1));
}

#[test]
fn disjoint_paths_have_no_bad_vertices() {
    // two root children a=1, b=2; tree 0 hangs 3 under 1, tree 1 under 2
    let t0 = RootedTree::from_parents(0, vec![None, Some(0), Some(0), Some(1)]);
    let t1 = RootedTree::from_parents(0, vec![None, Some(0), Some(0), Some(2)]);
    assert!(find_bad(&[t0, t1], 0).is_empty());
}

#[test]
fn equal_depth_anchor_goes_to_smaller_index() {
    // T_0: 0-1-2-4, T_1: 0-3-2-4; anchor 2 at depth 2 in both
    let t0 = chain(0, &[1, 2, 4, 3], 5);
    let t1 = chain(0, &[3, 2, 4, 1], 5);
    let bads = find_bad(&[t0, t1], 0);
    let at4: Vec<&BadVertexRecord> = bads.iter().filter(|b| b.v == 4).collect();
    assert_eq!(at4.len(), 1);
    assert_eq!((at4[0].anchor, at4[0].ell), (2, 0));
}

#[test]
fn identical_paths_give_multiple_anchors() {
    let t = chain(0, &[1, 2, 3, 4, 5], 6);
    let bads = find_bad(&[t.clone(), t], 0);
    for v in 2..6 {
        assert_eq!(bads.iter().filter(|b| b.v == v).count(), v - 1);
    }
    assert!(bads.iter().all(|b| b.v != 1));
}

#[test]
fn leaf_swap_and_subtree_plans() {
    // tree 0: 0-1-2, 0-3-4-5 ; tree 1 is a copy
    let t = RootedTree::from_parents(0, vec![None, Some(0), Some(1), Some(0), Some(3), Some(4)]);
    let trees = vec![t.clone(), t];
    let leaf = BadVertexRecord {
        v: 2,
        i: 0,
        j: 1,
        anchor: 1,
        ell: 1,
    };
    let plan = plan_reroute(&trees, &[leaf], &VertexOrder::Natural);
    assert_eq!(plan.swaps, vec![(2, 1)]);
    // reserve 1 pairs 2 with 5, whose path avoids 1
    let reserves = vec![vec![1, 0, 3, 2, 5, 4], vec![1, 0, 5, 4, 3, 2]];
    let after = apply_reroute(&trees, &plan, &reserves);
    assert_eq!(after[1].path_to_root(2).vertices, vec![2, 5, 4, 3, 0]);
    let sub = BadVertexRecord {
        v: 3,
        i: 0,
        j: 1,
        anchor: 1,
        ell: 0,
    };
    let plan = plan_reroute(&trees, &[sub], &VertexOrder::Natural);
    assert_eq!(plan.swaps, vec![(3, 0), (4, 0), (5, 0)]);
}

#[test]
fn cyclic_reroute_is_caught_by_the_verifier() {
    let g = Graph::complete(4);
    let t = RootedTree::from_parents(0, vec![None, Some(0), Some(1), Some(2)]);
    let bad = BadVertexRecord {
        v: 2,
        i: 0,
        j: 1,
        anchor: 1,
        ell: 0,
    };
    let plan = plan_reroute(std::slice::from_ref(&t), &[bad], &VertexOrder::Natural);
    // 2 and 3 are reserve partners; both get rerouted, giving a 2-cycle
    let after = apply_reroute(&[t], &plan, &[vec![1, 0, 3, 2]]);
    let report = verify_ist_family(&g, 0, &after);
    assert!(!report.ok);
    assert_eq!(report.structural[0].reason, StructuralReason::NotATree);
}

#[test]
fn even_pipeline_successes_verify_and_respect_bounds() {
    let opts = RegularOptions::default();
    let mut seen_success = false;
    for (n, d) in [(60usize, 8usize), (100, 8), (200, 8), (100, 12)] {
        let params = RegularParams::new(n, d).unwrap();
        for s in 0..15u64 {
            let mut rng = stream_rng(21, n as u64, s);
            let diagnostics = match run_regular_even(n, d, None, &opts, &mut rng) {
                Ok((fam, b)) => {
                    seen_success = true;
                    assert_eq!(b.trees.len(), d / 4);
                    assert!(verify_ist_family(&fam.union_graph(), b.root, &b.trees).ok);
                    Some(b.diagnostics)
                }
                Err((_, e)) => e.diagnostics.map(|d| *d),
            };
            if let Some(diag) = diagnostics {
                for dia in diag.group_diameters.unwrap() {
                    assert!(dia.unwrap() as f64 <= params.beta);
                }
                assert!((diag.unsafe_vertices as f64) <= params.beta.powi(20));
                assert_eq!(diag.leftover_colors, d % 4);
            }
        }
    }
    assert!(seen_success);
}

#[test]
fn pipeline_without_collisions_is_untouched() {
    // one group: a single tree has no pairs, so nothing is rerouted
    let mut rng = TrialRng::seed_from_u64(2);
    let fam = sample_disjoint_matchings(50, 4, &mut rng).unwrap();
    let b = build_ists_regular_even(&fam, 7, &VertexOrder::Natural, &RegularOptions::default())
        .unwrap();
    assert_eq!(b.diagnostics.bad_vertices, 0);
    let dec = decompose_colors(&fam).unwrap();
    assert_eq!(
        b.trees[0],
        bfs_tree(&dec.groups[0], 7, &VertexOrder::Natural).unwrap()
    );
}

#[test]
fn low_pair_fraction_does_not_increase_with_n() {
    let opts = RegularOptions {
        unique_anchor_gate: false,
        group_diameters: false,
        triage: false,
    };
    let mut fractions = Vec::new();
    for n in [500usize, 2000, 8000] {
        let mut rng = stream_rng(31, n as u64, 0);
        let fam = sample_disjoint_matchings(n, 8, &mut rng).unwrap();
        let params = RegularParams::new(n, 8).unwrap();
        let dec = decompose_colors(&fam).unwrap();
        let out = reroute_pipeline(
            &params,
            &dec.groups,
            &dec.reserves,
            0,
            0,
            &VertexOrder::Natural,
            &opts,
        )
        .unwrap();
        fractions.push(out.diagnostics.low_pair_fraction);
    }
    assert!(fractions.windows(2).all(|w| w[1] <= w[0]), "{fractions:?}");
}

#[test]
fn triage_reports_only_unsafe_vertices() {
    let opts = RegularOptions {
        unique_anchor_gate: false,
        group_diameters: false,
        triage: true,
    };
    let mut rng = stream_rng(41, 0, 0);
    let fam = sample_disjoint_matchings(300, 8, &mut rng).unwrap();
    let params = RegularParams::new(300, 8).unwrap();
    let dec = decompose_colors(&fam).unwrap();
    let out = reroute_pipeline(
        &params,
        &dec.groups,
        &dec.reserves,
        0,
        0,
        &VertexOrder::Natural,
        &opts,
    )
    .unwrap();
    for w in out.diagnostics.triage.unwrap() {
        let v = match w {
            ist_core::regular::TriageWitness::TwoReroutes { w, .. } => w,
            ist_core::regular::TriageWitness::RerouteMeetsPath { w, .. } => w,
        };
        assert!(!out.plan.index_sets[v].is_empty());
    }
}

#[test]
fn odd_pipeline_successes_pass_both_checks() {
    let opts = RegularOptions::default();
    let mut successes = 0;
    for (n, d) in [(61usize, 4usize), (61, 8)] {
        for s in 0..30u64 {
            let mut rng = stream_rng(51, n as u64 + d as u64, s);
            let Ok((fam, b)) = run_regular_odd(n, d, None, &opts, &mut rng) else {
                continue;
            };
            successes += 1;
            assert_eq!(b.graph.n(), n);
            assert_eq!(b.graph.regular_degree(), Some(d));
            assert_eq!(b.trees.len(), d / 4);
            assert!(verify_ist_family(&b.graph, b.strong.root, &b.trees).ok);
            assert!(
                verify_strong(
                    &fam.union_graph(),
                    b.strong.root,
                    &b.strong.trees,
                    &b.matching
                )
                .ok
            );
            let new = n - 1;
            let paths: Vec<Vec<Vertex>> = b
                .trees
                .iter()
                .map(|t| t.path_to_root(new).internal().to_vec())
                .collect();
            for (i, p) in paths.iter().enumerate() {
                for q in &paths[i + 1..] {
                    assert!(p.iter().all(|x| !q.contains(x)));
                }
            }
        }
    }
    assert!(successes > 0);
}

#[test]
fn strong_check_with_empty_matching_is_plain_check() {
    let g = Graph::complete(5);
    let trees = vec![
        RootedTree::from_parents(0, vec![None, Some(0), Some(1), Some(1), Some(1)]),
        RootedTree::from_parents(0, vec![None, Some(2), Some(0), Some(2), Some(2)]),
    ];
    assert!(verify_ist_family(&g, 0, &trees).ok);
    assert!(verify_strong(&g, 0, &trees, &[]).ok);
}

#[test]
fn op_round_trip() {
    let mut rng = TrialRng::seed_from_u64(17);
    let fam = sample_disjoint_matchings(40, 4, &mut rng).unwrap();
    let small = fam.union_graph();
    // two far-apart edges
    let (a, b) = small.edges()[0];
    let far = small
        .edges()
        .iter()
        .copied()
        .find(|&(u, v)| ist_core::regular::is_induced_matching(&small, &[(a, b), (u, v)]))
        .unwrap();
    let s = vec![(a, b), far];
    let big = op_transform(&small, &s);
    assert_eq!(big.regular_degree(), Some(4));
    let new = 40;
    let mut nbrs = big.neighbors(new).to_vec();
    nbrs.sort_unstable();
    let kept: Vec<_> = big
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v)| u != new && v != new)
        .collect();
    // re-add a perfect matching on the neighbourhood
    let mut edges = kept;
    edges.push((nbrs[0].min(nbrs[1]), nbrs[0].max(nbrs[1])));
    edges.push((nbrs[2].min(nbrs[3]), nbrs[2].max(nbrs[3])));
    if let Ok(back) = Graph::from_edges(40, edges) {
        assert_eq!(back.regular_degree(), Some(4));
    }
    let trees = vec![RootedTree::from_parents(
        0,
        (0..40).map(|v| (v != 0).then_some(0)).collect(),
    )];
    let ext = extend_trees(&trees, &s);
    assert_eq!(ext[0].parent[40], Some(a.min(b)));
}

#[test]
fn diameter_report_on_tiny_graph() {
    let mut rng = TrialRng::seed_from_u64(1);
    let r = diameter_deletion_check(10, 3, 0.1, 0, 5, DiameterConstant::Four, &mut rng).unwrap();
    assert_eq!(r.diameters.len(), 5);
    assert_eq!(r.s, r.s_four);
    assert!(r.s_four <= r.s_sixteen);
    let _: MatchingFamily = ist_core::random::sample_matching_family(10, 3, &mut rng).unwrap();
}
