use ist_validation::invariants::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(config())]

    #[test]
    fn bfs_tree_depths_are_distances(case in bfs_cases()) {
        bfs_depths_are_distances(case)?;
    }

    #[test]
    fn core_exploration_never_probes_from_boundary(case in exposure_cases()) {
        core_exploration_discipline(case)?;
    }

    #[test]
    fn safe_vertices_keep_their_paths(case in reroute_cases()) {
        safe_vertices_keep_paths(case)?;
    }

    #[test]
    fn reroute_index_prefers_deeper_then_smaller(case in tie_cases()) {
        reroute_index_rule(case)?;
    }

    #[test]
    fn find_bad_matches_path_scan(case in bad_cases()) {
        find_bad_matches_brute_force(case)?;
    }

    #[test]
    fn matching_families_are_disjoint_and_perfect(case in family_cases()) {
        matching_family_invariants(case)?;
    }

    #[test]
    fn verifier_agrees_with_path_definition(case in verifier_cases()) {
        verifier_agrees_with_paths(case)?;
    }
}
