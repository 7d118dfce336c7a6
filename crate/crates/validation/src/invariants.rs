//! Randomized invariant checks, one function per invariant, each with a
//! matching input strategy.

use std::collections::HashSet;

use ist_core::gnp::{core_sets_bfs, Layer};
use ist_core::graph::{
    bfs_distances, bfs_tree, Graph, RootedTree, Vertex, VertexOrder, UNREACHABLE,
};
use ist_core::random::{sample_gnp, sample_matching_family, GnpParams, TrialRng};
use ist_core::regular::{
    apply_reroute, decompose_colors, find_bad, plan_reroute, reroute_index, BadVertexRecord,
};
use ist_core::verify::verify_ist_family;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub type CaseResult = Result<(), TestCaseError>;

pub fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 1000,
        ..ProptestConfig::default()
    }
}

/// Random spanning arborescence: vertices in random order attach to an
/// earlier vertex.
pub fn random_tree(n: usize, root: Vertex, rng: &mut TrialRng) -> RootedTree {
    let mut rest: Vec<Vertex> = (0..n).filter(|&v| v != root).collect();
    rest.shuffle(rng);
    let mut placed = vec![root];
    let mut parent = vec![None; n];
    for v in rest {
        parent[v] = Some(placed[rng.random_range(0..placed.len())]);
        placed.push(v);
    }
    RootedTree::from_parents(root, parent)
}

fn brute_bad(trees: &[RootedTree], root: Vertex) -> Vec<(Vertex, usize, usize, Vertex)> {
    let n = trees[0].n();
    let mut out = Vec::new();
    for v in (0..n).filter(|&v| v != root) {
        for i in 0..trees.len() {
            for j in i + 1..trees.len() {
                let pi = trees[i].path_to_root(v).vertices;
                let pj = trees[j].path_to_root(v).vertices;
                for &u in &pi {
                    if u != v && u != root && pj.contains(&u) {
                        out.push((v, i, j, u));
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn bfs_cases() -> impl Strategy<Value = (u64, usize, f64, bool)> {
    (any::<u64>(), 2usize..60, 0.03f64..0.6, any::<bool>())
}

pub fn bfs_depths_are_distances((seed, n, p, permuted): (u64, usize, f64, bool)) -> CaseResult {
    let mut rng = TrialRng::seed_from_u64(seed);
    let g = sample_gnp(n, p, &mut rng).unwrap();
    let root = rng.random_range(0..n);
    let order = if permuted {
        let mut perm: Vec<Vertex> = (0..n).collect();
        perm.shuffle(&mut rng);
        VertexOrder::Permutation(perm)
    } else {
        VertexOrder::Natural
    };
    let dist = bfs_distances(&g, root);
    match bfs_tree(&g, root, &order) {
        Err(_) => prop_assert!(dist.contains(&UNREACHABLE)),
        Ok(t) => {
            let depths = t.depths().unwrap();
            for v in 0..n {
                prop_assert_eq!(depths[v] as u32, dist[v]);
                if let Some(par) = t.parent[v] {
                    prop_assert!(g.has_edge(v, par));
                }
            }
        }
    }
    Ok(())
}

pub fn exposure_cases() -> impl Strategy<Value = (u64, usize, f64, f64, f64, usize)> {
    (
        any::<u64>(),
        20usize..90,
        0.01f64..0.12,
        0.005f64..0.1,
        0.05f64..0.7,
        1usize..4,
    )
}

/// Phase-2 exploration only probes first-layer pairs, never from a final
/// boundary vertex, and never touches vertices outside its domain.
pub fn core_exploration_discipline(
    (seed, n, p, eps_gap, q, k): (u64, usize, f64, f64, f64, usize),
) -> CaseResult {
    let eps = (3.0 * p + eps_gap).min(0.49);
    let params = GnpParams::new(n, p, eps).unwrap();
    if params.singleton_cores() {
        return Ok(());
    }
    let mut rng = TrialRng::seed_from_u64(seed);
    let g1 = sample_gnp(n, q, &mut rng).unwrap();
    let neighbors: Vec<Vertex> = (1..=k).collect();
    let Ok(cores) = core_sets_bfs(&g1, 0, &neighbors, &params, &VertexOrder::Natural) else {
        return Ok(());
    };
    let mut used = vec![false; n];
    used[0] = true;
    for &v in &neighbors {
        used[v] = true;
    }
    for c in &cores {
        used[c.seed] = false;
        prop_assert_eq!(c.core.len(), params.core_size());
        let mut seen = HashSet::new();
        for pr in &c.probes {
            prop_assert_eq!(pr.layer, Layer::First);
            prop_assert!(!c.boundary.contains(&pr.from));
            prop_assert!(c.discovered.contains(&pr.from));
            prop_assert!(!used[pr.to]);
            prop_assert_eq!(pr.present, g1.has_edge(pr.from, pr.to));
            prop_assert!(seen.insert((pr.from.min(pr.to), pr.from.max(pr.to))));
        }
        for &b in &c.boundary {
            prop_assert!(c.core.contains(&b) && !c.discovered.contains(&b));
        }
        for &v in &c.core {
            prop_assert!(!used[v]);
            used[v] = true;
        }
    }
    Ok(())
}

pub fn reroute_cases() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 4usize..100, 1usize..3)
}

pub fn safe_vertices_keep_paths((seed, half, groups): (u64, usize, usize)) -> CaseResult {
    let n = 2 * half;
    let d = 4 * groups;
    if d >= n {
        return Ok(());
    }
    let mut rng = TrialRng::seed_from_u64(seed);
    let fam = sample_matching_family(n, d, &mut rng).unwrap();
    let dec = decompose_colors(&fam).unwrap();
    let root = rng.random_range(0..n);
    let Ok(trees) = dec
        .groups
        .iter()
        .map(|g| bfs_tree(g, root, &VertexOrder::Natural))
        .collect::<Result<Vec<_>, _>>()
    else {
        return Ok(());
    };
    let bads = find_bad(&trees, root);
    let plan = plan_reroute(&trees, &bads, &VertexOrder::Natural);
    let after = apply_reroute(&trees, &plan, &dec.reserves);
    for w in (0..n).filter(|&w| plan.index_sets[w].is_empty()) {
        for (before, now) in trees.iter().zip(&after) {
            prop_assert_eq!(Some(before.path_to_root(w)), now.checked_path_to_root(w));
        }
    }
    for &(w, l) in &plan.swaps {
        prop_assert_eq!(after[l].parent[w], Some(dec.reserves[l][w]));
    }
    Ok(())
}

pub fn tie_cases() -> impl Strategy<Value = (usize, usize, usize, usize)> {
    (0usize..8, 0usize..8, 0usize..20, 0usize..20)
}

pub fn reroute_index_rule((i, j, di, dj): (usize, usize, usize, usize)) -> CaseResult {
    if i == j {
        return Ok(());
    }
    let ell = reroute_index(i, j, di, dj);
    let expected = if di > dj {
        i
    } else if dj > di {
        j
    } else {
        i.min(j)
    };
    prop_assert_eq!(ell, expected);
    prop_assert_eq!(reroute_index(j, i, dj, di), ell);
    Ok(())
}

pub fn bad_cases() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 2usize..40, 2usize..4)
}

pub fn find_bad_matches_brute_force((seed, n, k): (u64, usize, usize)) -> CaseResult {
    let mut rng = TrialRng::seed_from_u64(seed);
    let root = rng.random_range(0..n);
    let trees: Vec<RootedTree> = (0..k).map(|_| random_tree(n, root, &mut rng)).collect();
    let bads = find_bad(&trees, root);
    let keys: Vec<_> = bads.iter().map(|b| (b.v, b.i, b.j, b.anchor)).collect();
    prop_assert_eq!(keys, brute_bad(&trees, root));
    let depths: Vec<Vec<usize>> = trees.iter().map(|t| t.depths().unwrap()).collect();
    for BadVertexRecord {
        i, j, anchor, ell, ..
    } in bads
    {
        let (a, b) = (depths[i][anchor], depths[j][anchor]);
        let expected = if a > b {
            i
        } else if b > a {
            j
        } else {
            i.min(j)
        };
        prop_assert_eq!(ell, expected);
    }
    Ok(())
}

pub fn family_cases() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 1usize..40, 1usize..10)
}

pub fn matching_family_invariants((seed, half, d): (u64, usize, usize)) -> CaseResult {
    let n = 2 * half;
    if d >= n {
        return Ok(());
    }
    let mut rng = TrialRng::seed_from_u64(seed);
    let fam = sample_matching_family(n, d, &mut rng).unwrap();
    prop_assert!(fam.check().is_ok());
    prop_assert_eq!(fam.d(), d);
    for c in 0..d {
        let mates = fam.mates(c);
        for v in 0..n {
            prop_assert!(mates[v] != v && mates[mates[v]] == v);
        }
    }
    let union = fam.union_graph();
    prop_assert_eq!(union.regular_degree(), Some(d));
    prop_assert_eq!(union.m(), n * d / 2);
    if d >= 4 {
        let dec = decompose_colors(&fam).unwrap();
        let mut total = dec.leftover.len() * n / 2;
        for (g, mates) in dec.groups.iter().zip(&dec.reserves) {
            prop_assert_eq!(g.regular_degree(), Some(3));
            total += g.m();
            for (v, &mate) in mates.iter().enumerate() {
                prop_assert!(union.has_edge(v, mate) && !g.has_edge(v, mate));
            }
            total += n / 2;
        }
        prop_assert_eq!(total, union.m());
    }
    Ok(())
}

pub fn verifier_cases() -> impl Strategy<Value = (u64, usize, usize, f64)> {
    (any::<u64>(), 2usize..12, 1usize..4, 0.3f64..1.0)
}

pub fn verifier_agrees_with_paths((seed, n, k, p): (u64, usize, usize, f64)) -> CaseResult {
    let mut rng = TrialRng::seed_from_u64(seed);
    let mut g = sample_gnp(n, p, &mut rng).unwrap();
    let root = rng.random_range(0..n);
    let trees: Vec<RootedTree> = (0..k).map(|_| random_tree(n, root, &mut rng)).collect();
    let tree_edges: Vec<_> = trees
        .iter()
        .flat_map(|t| t.edges().collect::<Vec<_>>())
        .collect();
    if rng.random_bool(0.7) {
        g = g.union(&Graph::from_edges_dedup(n, tree_edges).unwrap());
    }
    let edges_ok = trees
        .iter()
        .all(|t| t.edges().all(|(a, b)| g.has_edge(a, b)));
    let mut paths_ok = true;
    for v in (0..n).filter(|&v| v != root) {
        for i in 0..k {
            for j in i + 1..k {
                let pi = trees[i].path_to_root(v).vertices;
                let pj = trees[j].path_to_root(v).vertices;
                let shared = pi.iter().filter(|x| pj.contains(x)).count();
                if shared != 2 || (pi.len() == 2 && pj.len() == 2) {
                    paths_ok = false;
                }
            }
        }
    }
    prop_assert_eq!(verify_ist_family(&g, root, &trees).ok, edges_ok && paths_ok);
    Ok(())
}
