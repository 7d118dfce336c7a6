use ist_core::graph::{rooted_path_bound, vertex_connectivity, Graph};
use ist_core::verify::{
    brute_force_max_ists, max_ists, verify_ist_family, OracleError, ORACLE_MAX_N,
};
use ist_validation::corpus::{all_graphs, clique_max_ists, is_connected};

#[test]
fn corpus_counts_match_known_values() {
    let graphs = all_graphs(7);
    let totals: Vec<usize> = graphs.iter().map(Vec::len).collect();
    assert_eq!(totals, vec![1, 2, 4, 11, 34, 156, 1044]);
    let connected: Vec<usize> = graphs
        .iter()
        .map(|l| l.iter().filter(|g| is_connected(g)).count())
        .collect();
    assert_eq!(connected, vec![1, 1, 2, 6, 21, 112, 853]);
}

#[test]
fn oracle_matches_clique_search_up_to_six() {
    for level in all_graphs(6).iter().skip(1) {
        for g in level.iter().filter(|g| is_connected(g)) {
            for root in 0..g.n() {
                let (k, witness) = max_ists(g, root).unwrap();
                assert_eq!(
                    k,
                    clique_max_ists(g, root),
                    "graph {:?} root {root}",
                    g.edges()
                );
                assert_eq!(witness.len(), k);
                assert!(verify_ist_family(g, root, &witness).ok);
            }
        }
    }
}

#[test]
fn known_small_values() {
    assert_eq!(max_ists(&Graph::complete(4), 0).unwrap().0, 3);
    assert_eq!(max_ists(&Graph::cycle(5), 0).unwrap().0, 2);
    assert_eq!(max_ists(&Graph::path(5), 0).unwrap().0, 1);
    assert_eq!(max_ists(&Graph::complete(7), 3).unwrap().0, 6);
    // two triangles sharing vertex 0: rooted at a tip, the cut vertex limits it
    let bowtie = Graph::from_edges(5, [(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)]).unwrap();
    assert_eq!(vertex_connectivity(&bowtie), 1);
    assert_eq!(max_ists(&bowtie, 0).unwrap().0, 2);
    assert_eq!(max_ists(&bowtie, 1).unwrap().0, 1);
    assert_eq!(brute_force_max_ists(&Graph::cycle(5), 0, 3).unwrap(), None);
}

#[test]
fn oracle_respects_connectivity_bounds() {
    for level in all_graphs(7).iter().skip(1) {
        for g in level.iter().filter(|g| is_connected(g)) {
            let (k, _) = max_ists(g, 0).unwrap();
            assert!(vertex_connectivity(g) <= k, "graph {:?}", g.edges());
            assert!(k <= rooted_path_bound(g, 0));
        }
    }
}

#[test]
fn oracle_rejects_large_graphs() {
    let g = Graph::cycle(ORACLE_MAX_N + 1);
    assert_eq!(
        max_ists(&g, 0),
        Err(OracleError::TooLarge {
            n: ORACLE_MAX_N + 1,
            cap: ORACLE_MAX_N
        })
    );
    assert_eq!(max_ists(&Graph::cycle(4), 9), Err(OracleError::BadRoot(9)));
}
