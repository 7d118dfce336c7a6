//! Independent spanning trees in sprinkled G(n,p).
//!
//! The host graph is `G = G1 ∪ G2`. The construction runs in three phases:
//! choose `k` neighbours of the root, grow disjoint core sets around them by
//! a breadth-first exploration of `G1`, then give every other vertex `k`
//! distinct parents, using a bipartite matching where no core boundary is
//! adjacent.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{edge, Edge, Graph, GraphError, RootedTree, Vertex, VertexOrder};
use crate::matching::bipartite_max_matching;
use crate::random::{sample_gnp, GnpParams};

/// Which random layer an exposure read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Layer {
    First,
    Second,
}

/// One exposed vertex pair: `from` was being processed, `to` was tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Probe {
    pub from: Vertex,
    pub to: Vertex,
    pub layer: Layer,
    pub present: bool,
}

/// Result of growing one core set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreSetRecord {
    pub index: usize,
    /// The root neighbour the core grows from.
    pub seed: Vertex,
    /// Core vertices in the order they were reached; `core[0] == seed`.
    pub core: Vec<Vertex>,
    /// Parent of `core[t]` in the partial tree, `None` for the seed.
    pub core_parent: Vec<Option<Vertex>>,
    /// Boundary vertices in queue order.
    pub boundary: Vec<Vertex>,
    /// Discovered (fully processed or current) vertices in order.
    pub discovered: Vec<Vertex>,
    /// Every pair tested during the exploration, in order.
    pub probes: Vec<Probe>,
}

impl CoreSetRecord {
    /// The partial tree on the core as `(child, parent)` pairs.
    pub fn tree_edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.core
            .iter()
            .zip(&self.core_parent)
            .filter_map(|(&v, p)| p.map(|p| (v, p)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchingCase {
    /// Candidates are `G2`-neighbours in the residual set, linked through `G1`
    /// boundary neighbourhoods.
    BoundaryNeighbourhoods,
    /// Singleton cores; candidates are `G`-neighbours in the residual set,
    /// linked through `G`-adjacency to the root neighbours.
    SingletonCores,
}

#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
pub enum GnpFailure {
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("root has degree {degree} < k = {k}")]
    Phase1 { degree: usize, k: usize },
    #[error("core {index}: boundary emptied after {reached} of {target} vertices")]
    Phase2 {
        index: usize,
        reached: usize,
        target: usize,
    },
    #[error("vertex {vertex}: {available} candidates, need {needed}")]
    Phase3Candidates {
        vertex: Vertex,
        available: usize,
        needed: usize,
    },
    #[error("vertex {vertex}: matching covers {matched} of {needed} trees")]
    Phase3Matching {
        vertex: Vertex,
        matched: usize,
        needed: usize,
    },
}

impl GnpFailure {
    pub fn stage(&self) -> &'static str {
        match self {
            GnpFailure::Domain(_) => "domain",
            GnpFailure::Phase1 { .. } => "phase1",
            GnpFailure::Phase2 { .. } => "phase2",
            GnpFailure::Phase3Candidates { .. } | GnpFailure::Phase3Matching { .. } => "phase3",
        }
    }
}

impl From<GraphError> for GnpFailure {
    fn from(e: GraphError) -> Self {
        GnpFailure::Domain(e.to_string())
    }
}

/// A completed construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnpIstBuild {
    pub params: GnpParams,
    pub root: Vertex,
    /// The chosen root neighbours `v_1..v_k`.
    pub neighbors: Vec<Vertex>,
    pub cores: Vec<CoreSetRecord>,
    pub trees: Vec<RootedTree>,
    /// Vertices outside the root and all cores.
    pub residual: Vec<Vertex>,
    pub case: MatchingCase,
    /// Vertices whose parents needed a matching.
    pub matched_vertices: usize,
}

/// Lists `items` by rank under `rank` (identity when `None`).
fn ranked(items: &[Vertex], rank: Option<&[usize]>) -> Vec<Vertex> {
    let mut out = items.to_vec();
    if let Some(rank) = rank {
        out.sort_unstable_by_key(|&v| rank[v]);
    }
    out
}

fn rank_table(order: &VertexOrder, n: usize) -> Result<Option<Vec<usize>>, GnpFailure> {
    if order.is_natural() {
        Ok(None)
    } else {
        Ok(Some(order.ranks(n)?))
    }
}

/// The `k` lowest-ranked neighbours of `root` in `union`.
pub fn choose_root_neighbors(
    union: &Graph,
    root: Vertex,
    k: usize,
    order: &VertexOrder,
) -> Result<Vec<Vertex>, GnpFailure> {
    let rank = rank_table(order, union.n())?;
    let nbrs = ranked(union.neighbors(root), rank.as_deref());
    if nbrs.len() < k {
        return Err(GnpFailure::Phase1 {
            degree: nbrs.len(),
            k,
        });
    }
    Ok(nbrs[..k].to_vec())
}

/// Grows the core sets around `neighbors` by breadth-first exploration of `g1`.
///
/// Core `i` lives in `V_i`: all vertices except the root, the other chosen
/// neighbours and the earlier cores. Vertices of `V_i` are scanned in
/// `order`. The current vertex is always the one last moved into the
/// discovered set; each step tests one pair between it and the unexplored
/// set, and when it has none left the oldest boundary vertex is promoted.
/// Exploration stops once the core reaches `ceil(eps / 3p)` vertices. When
/// `eps < 3p` every core is the single vertex `v_i`, which is both
/// discovered and boundary.
pub fn core_sets_bfs(
    g1: &Graph,
    root: Vertex,
    neighbors: &[Vertex],
    params: &GnpParams,
    order: &VertexOrder,
) -> Result<Vec<CoreSetRecord>, GnpFailure> {
    let n = g1.n();
    if params.singleton_cores() {
        return Ok(neighbors
            .iter()
            .enumerate()
            .map(|(index, &v)| CoreSetRecord {
                index,
                seed: v,
                core: vec![v],
                core_parent: vec![None],
                boundary: vec![v],
                discovered: vec![v],
                probes: Vec::new(),
            })
            .collect());
    }
    let target = params.core_size();
    let sequence = order.sequence(n);
    // blocked: root, chosen neighbours, and vertices of finished cores
    let mut blocked = vec![false; n];
    blocked[root] = true;
    for &v in neighbors {
        blocked[v] = true;
    }
    let mut unexplored = vec![false; n];
    let mut cores = Vec::with_capacity(neighbors.len());
    for (index, &seed) in neighbors.iter().enumerate() {
        blocked[seed] = false;
        let domain: Vec<Vertex> = sequence.iter().copied().filter(|&v| !blocked[v]).collect();
        for &v in &domain {
            unexplored[v] = v != seed;
        }
        let mut record = CoreSetRecord {
            index,
            seed,
            core: vec![seed],
            core_parent: vec![None],
            boundary: Vec::new(),
            discovered: vec![seed],
            probes: Vec::new(),
        };
        // boundary queue is record.boundary[head..]
        let mut head = 0;
        let mut current = seed;
        let mut cursor = 0;
        while record.core.len() < target {
            while cursor < domain.len() && !unexplored[domain[cursor]] {
                cursor += 1;
            }
            if cursor < domain.len() {
                let u = domain[cursor];
                cursor += 1;
                let present = g1.has_edge(current, u);
                record.probes.push(Probe {
                    from: current,
                    to: u,
                    layer: Layer::First,
                    present,
                });
                if present {
                    unexplored[u] = false;
                    record.boundary.push(u);
                    record.core.push(u);
                    record.core_parent.push(Some(current));
                }
            } else {
                if head == record.boundary.len() {
                    for &v in &domain {
                        unexplored[v] = false;
                    }
                    return Err(GnpFailure::Phase2 {
                        index,
                        reached: record.core.len(),
                        target,
                    });
                }
                current = record.boundary[head];
                head += 1;
                record.discovered.push(current);
                cursor = 0;
            }
        }
        record.boundary.drain(..head);
        if target == 1 {
            // nothing was explored from the seed, so it is still a leaf
            record.discovered.clear();
            record.boundary.push(seed);
        }
        for &v in &domain {
            unexplored[v] = false;
        }
        for &v in &record.core {
            blocked[v] = true;
        }
        cores.push(record);
    }
    Ok(cores)
}

/// Completes the trees: every vertex other than the root receives `k`
/// distinct parents, one per tree.
///
/// For tree `i` and vertex `v`: inside core `i` the parent is the partial
/// tree parent (the root for `v_i`); otherwise a lowest-ranked `G`-neighbour
/// in boundary `i` when one exists; otherwise a vertex assigned through a
/// maximum matching between the remaining trees and candidate neighbours of
/// `v` in the residual set.
pub fn attach_phase3(
    g1: &Graph,
    g2: &Graph,
    params: &GnpParams,
    root: Vertex,
    cores: &[CoreSetRecord],
    order: &VertexOrder,
) -> Result<(Vec<RootedTree>, Vec<Vertex>, usize), GnpFailure> {
    let n = g1.n();
    let k = cores.len();
    let union = g1.union(g2);
    let rank = rank_table(order, n)?;
    let rank = rank.as_deref();

    const NONE: usize = usize::MAX;
    let mut core_of = vec![NONE; n];
    let mut core_parent = vec![NONE; n];
    let mut boundary_of = vec![NONE; n];
    for c in cores {
        for (t, &v) in c.core.iter().enumerate() {
            core_of[v] = c.index;
            core_parent[v] = c.core_parent[t].unwrap_or(root);
        }
        for &b in &c.boundary {
            boundary_of[b] = c.index;
        }
    }
    let in_residual = |v: Vertex| v != root && core_of[v] == NONE;
    let residual: Vec<Vertex> = order
        .sequence(n)
        .into_iter()
        .filter(|&v| in_residual(v))
        .collect();

    let case = if params.singleton_cores() {
        MatchingCase::SingletonCores
    } else {
        MatchingCase::BoundaryNeighbourhoods
    };
    // residual vertex -> cores whose G1 boundary neighbourhood contains it
    let mut reaches: Vec<Vec<usize>> = vec![Vec::new(); n];
    if case == MatchingCase::BoundaryNeighbourhoods {
        for c in cores {
            for &b in &c.boundary {
                for &y in g1.neighbors(b) {
                    if in_residual(y) && reaches[y].last() != Some(&c.index) {
                        reaches[y].push(c.index);
                    }
                }
            }
        }
    }

    let mut parents: Vec<Vec<Option<Vertex>>> = vec![vec![None; n]; k];
    let mut matched_vertices = 0;
    let mut chosen = vec![NONE; k];
    let mut left_index = vec![NONE; k];
    let mut edges = Vec::new();
    for v in order.sequence(n) {
        if v == root {
            continue;
        }
        chosen.fill(NONE);
        if core_of[v] != NONE {
            chosen[core_of[v]] = core_parent[v];
        }
        for &x in &ranked(union.neighbors(v), rank) {
            let i = boundary_of[x];
            if i != NONE && i != core_of[v] && chosen[i] == NONE {
                chosen[i] = x;
            }
        }
        let open: Vec<usize> = (0..k).filter(|&i| chosen[i] == NONE).collect();
        if !open.is_empty() {
            matched_vertices += 1;
            for (a, &i) in open.iter().enumerate() {
                left_index[i] = a;
            }
            edges.clear();
            let candidates = match case {
                MatchingCase::BoundaryNeighbourhoods => {
                    let pool: Vec<Vertex> = ranked(g2.neighbors(v), rank)
                        .into_iter()
                        .filter(|&y| in_residual(y))
                        .collect();
                    if pool.len() < k {
                        return Err(GnpFailure::Phase3Candidates {
                            vertex: v,
                            available: pool.len(),
                            needed: k,
                        });
                    }
                    let pool = pool[..k].to_vec();
                    for (b, &y) in pool.iter().enumerate() {
                        for &i in &reaches[y] {
                            if chosen[i] == NONE {
                                edges.push((left_index[i], b));
                            }
                        }
                    }
                    pool
                }
                MatchingCase::SingletonCores => {
                    let pool: Vec<Vertex> = ranked(union.neighbors(v), rank)
                        .into_iter()
                        .filter(|&y| in_residual(y))
                        .collect();
                    if pool.len() < open.len() {
                        return Err(GnpFailure::Phase3Candidates {
                            vertex: v,
                            available: pool.len(),
                            needed: open.len(),
                        });
                    }
                    let pool = pool[..open.len()].to_vec();
                    for (b, &w) in pool.iter().enumerate() {
                        for &x in union.neighbors(w) {
                            let i = core_of[x];
                            if i != NONE && chosen[i] == NONE {
                                edges.push((left_index[i], b));
                            }
                        }
                    }
                    pool
                }
            };
            edges.sort_unstable();
            let m = bipartite_max_matching(open.len(), candidates.len(), &edges);
            let matched = m.iter().flatten().count();
            if matched < open.len() {
                return Err(GnpFailure::Phase3Matching {
                    vertex: v,
                    matched,
                    needed: open.len(),
                });
            }
            for (a, &i) in open.iter().enumerate() {
                chosen[i] = candidates[m[a].expect("full matching")];
            }
        }
        for i in 0..k {
            parents[i][v] = Some(chosen[i]);
        }
    }
    let order_field = (!order.is_natural()).then(|| order.sequence(n));
    let trees = parents
        .into_iter()
        .map(|parent| RootedTree {
            root,
            parent,
            order: order_field.clone(),
        })
        .collect();
    Ok((trees, residual, matched_vertices))
}

/// Runs the three phases on `g1 ∪ g2`.
pub fn build_ists_gnp(
    g1: &Graph,
    g2: &Graph,
    params: &GnpParams,
    root: Vertex,
    order: &VertexOrder,
) -> Result<GnpIstBuild, GnpFailure> {
    if g1.n() != g2.n() || g1.n() != params.n {
        return Err(GnpFailure::Domain(format!(
            "layers have {} and {} vertices, parameters say {}",
            g1.n(),
            g2.n(),
            params.n
        )));
    }
    if root >= params.n {
        return Err(GnpFailure::Domain(format!("root {root} out of range")));
    }
    let k = params.k();
    let union = g1.union(g2);
    let neighbors = choose_root_neighbors(&union, root, k, order)?;
    let cores = core_sets_bfs(g1, root, &neighbors, params, order)?;
    let (trees, residual, matched_vertices) = attach_phase3(g1, g2, params, root, &cores, order)?;
    let case = if params.singleton_cores() {
        MatchingCase::SingletonCores
    } else {
        MatchingCase::BoundaryNeighbourhoods
    };
    Ok(GnpIstBuild {
        params: *params,
        root,
        neighbors,
        cores,
        trees,
        residual,
        case,
        matched_vertices,
    })
}

/// The two sprinkled layers of one trial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GnpLayers {
    pub first: Graph,
    pub second: Graph,
}

/// Samples both layers and runs the construction; `root = None` picks the
/// root uniformly. The layers are returned on failure too.
pub fn run_gnp<R: Rng + ?Sized>(
    params: &GnpParams,
    root: Option<Vertex>,
    rng: &mut R,
) -> (GnpLayers, Result<GnpIstBuild, GnpFailure>) {
    let sampled = sample_gnp(params.n, params.p1, rng)
        .and_then(|g1| Ok((g1, sample_gnp(params.n, params.p2, rng)?)));
    let (first, second) = match sampled {
        Ok(pair) => pair,
        Err(e) => {
            let empty = GnpLayers {
                first: Graph::empty(params.n),
                second: Graph::empty(params.n),
            };
            return (empty, Err(GnpFailure::Domain(e.to_string())));
        }
    };
    let root = root.unwrap_or_else(|| rng.random_range(0..params.n));
    let result = build_ists_gnp(&first, &second, params, root, &VertexOrder::Natural);
    (GnpLayers { first, second }, result)
}

/// A failed check on the core sets of a completed build.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoreViolation {
    Size {
        index: usize,
        size: usize,
        expected: usize,
    },
    BoundaryTooSmall {
        index: usize,
        size: usize,
        floor: usize,
    },
    Overlap {
        vertex: Vertex,
        first: usize,
        second: usize,
    },
    TouchesRootOrNeighbors {
        index: usize,
        vertex: Vertex,
    },
    NotPartitioned {
        index: usize,
    },
    BoundaryNotLeaf {
        index: usize,
        vertex: Vertex,
    },
    TreeEdgeMissing {
        index: usize,
        edge: Edge,
    },
    BoundaryProbe {
        index: usize,
        probe: Probe,
    },
    WrongLayer {
        index: usize,
        probe: Probe,
    },
}

/// Checks every core property on a completed build against `g1`.
///
/// Covered: core size `ceil(eps/3p)`, boundary size at least `ceil(eps/6p)`,
/// pairwise disjoint cores avoiding the root and the other chosen
/// neighbours, boundary/discovered partition (outside the singleton case),
/// boundary vertices are leaves of the partial tree, partial tree edges lie
/// in `g1`, and no exploration probe joined a final boundary vertex to a
/// vertex left unexplored.
pub fn core_violations(build: &GnpIstBuild, g1: &Graph) -> Vec<CoreViolation> {
    let params = &build.params;
    let n = params.n;
    let mut out = Vec::new();
    let expected = if params.singleton_cores() {
        1
    } else {
        params.core_size()
    };
    let floor = params.boundary_floor();
    const NONE: usize = usize::MAX;
    let mut owner = vec![NONE; n];
    let mut is_neighbor = vec![false; n];
    for &v in &build.neighbors {
        is_neighbor[v] = true;
    }
    for c in &build.cores {
        if c.core.len() != expected {
            out.push(CoreViolation::Size {
                index: c.index,
                size: c.core.len(),
                expected,
            });
        }
        if c.boundary.len() < floor {
            out.push(CoreViolation::BoundaryTooSmall {
                index: c.index,
                size: c.boundary.len(),
                floor,
            });
        }
        for &v in &c.core {
            if owner[v] != NONE {
                out.push(CoreViolation::Overlap {
                    vertex: v,
                    first: owner[v],
                    second: c.index,
                });
            }
            owner[v] = c.index;
            if v == build.root || (is_neighbor[v] && v != c.seed) {
                out.push(CoreViolation::TouchesRootOrNeighbors {
                    index: c.index,
                    vertex: v,
                });
            }
        }
        if !params.singleton_cores() {
            let mut union: Vec<Vertex> = c.boundary.iter().chain(&c.discovered).copied().collect();
            union.sort_unstable();
            let before = union.len();
            union.dedup();
            let mut core = c.core.clone();
            core.sort_unstable();
            if union.len() != before || union != core {
                out.push(CoreViolation::NotPartitioned { index: c.index });
            }
        }
        for (child, parent) in c.tree_edges() {
            if c.boundary.contains(&parent) && !c.discovered.contains(&parent) {
                out.push(CoreViolation::BoundaryNotLeaf {
                    index: c.index,
                    vertex: parent,
                });
            }
            if !g1.has_edge(child, parent) {
                out.push(CoreViolation::TreeEdgeMissing {
                    index: c.index,
                    edge: edge(child, parent),
                });
            }
        }
    }
    // unexplored set of core i: V_i minus C_i
    let mut later_blocked = vec![false; n];
    later_blocked[build.root] = true;
    for &v in &build.neighbors {
        later_blocked[v] = true;
    }
    for c in &build.cores {
        let in_boundary = |v: Vertex| c.boundary.contains(&v);
        let unexplored = |v: Vertex| !later_blocked[v] && !c.core.contains(&v) && v != c.seed;
        for &probe in &c.probes {
            if probe.layer != Layer::First {
                out.push(CoreViolation::WrongLayer {
                    index: c.index,
                    probe,
                });
            }
            let (a, b) = (probe.from, probe.to);
            if (in_boundary(a) && unexplored(b)) || (in_boundary(b) && unexplored(a)) {
                out.push(CoreViolation::BoundaryProbe {
                    index: c.index,
                    probe,
                });
            }
        }
        for &v in &c.core {
            later_blocked[v] = true;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub trials: usize,
    pub violations: usize,
    pub max_set_size: usize,
    pub violation_fraction: f64,
}

/// Samples sets `S` of uniform size in `1..=ceil(c/p)` and counts those with
/// `|N(S)| < |S| (n - |S|) p / 2`.
pub fn expansion_diagnostic<R: Rng + ?Sized>(
    graph: &Graph,
    p: f64,
    c: f64,
    trials: usize,
    rng: &mut R,
) -> ExpansionReport {
    let n = graph.n();
    let max_set_size = crate::random::ceil_tol(c / p).clamp(1, n.max(1));
    let mut violations = 0;
    for _ in 0..trials {
        let s = rng.random_range(1..=max_set_size);
        let set: Vec<Vertex> = sample(rng, n, s).into_vec();
        let reach = crate::graph::neighborhood(graph, &set).len() as f64;
        if reach < s as f64 * (n - s) as f64 * p / 2.0 {
            violations += 1;
        }
    }
    ExpansionReport {
        trials,
        violations,
        max_set_size,
        violation_fraction: if trials == 0 {
            0.0
        } else {
            violations as f64 / trials as f64
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::TrialRng;
    use crate::verify::verify_ist_family;
    use rand::SeedableRng;

    fn params(n: usize, p: f64, eps: f64) -> GnpParams {
        GnpParams::new(n, p, eps).unwrap()
    }

    #[test]
    fn complete_graph_succeeds() {
        let g1 = Graph::complete(20);
        let g2 = Graph::empty(20);
        let prm = params(20, 0.5, 0.4);
        let build = build_ists_gnp(&g1, &g2, &prm, 0, &VertexOrder::Natural).unwrap();
        assert_eq!(build.trees.len(), prm.k());
        let report = verify_ist_family(&g1.union(&g2), 0, &build.trees);
        assert!(report.ok, "{report:?}");
    }

    #[test]
    fn low_root_degree_fails_phase1() {
        let g1 = Graph::path(10);
        let prm = params(10, 0.5, 0.2);
        let err =
            build_ists_gnp(&g1, &Graph::empty(10), &prm, 0, &VertexOrder::Natural).unwrap_err();
        assert_eq!(err, GnpFailure::Phase1 { degree: 1, k: 4 });
        assert_eq!(err.stage(), "phase1");
    }

    #[test]
    fn singleton_cores_when_eps_small() {
        let prm = params(30, 0.2, 0.3);
        assert!(prm.singleton_cores());
        let g1 = Graph::complete(30);
        let cores = core_sets_bfs(&g1, 0, &[1, 2, 3], &prm, &VertexOrder::Natural).unwrap();
        for (i, c) in cores.iter().enumerate() {
            assert_eq!(c.core, vec![i + 1]);
            assert_eq!(c.boundary, vec![i + 1]);
            assert!(c.probes.is_empty());
        }
    }

    #[test]
    fn bfs_exploration_trace() {
        // seed 1 in a path 1-2-3-4-5; target size ceil(0.3/0.03) = 10 is
        // unreachable, so the boundary empties
        let prm = params(6, 0.01, 0.3);
        let g1 = Graph::from_edges(6, [(1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        let err = core_sets_bfs(&g1, 0, &[1], &prm, &VertexOrder::Natural).unwrap_err();
        assert_eq!(
            err,
            GnpFailure::Phase2 {
                index: 0,
                reached: 5,
                target: 10
            }
        );
    }

    #[test]
    fn bfs_core_of_requested_size() {
        let prm = params(40, 0.03, 0.3);
        assert_eq!(prm.core_size(), 4);
        let g1 = Graph::complete(40);
        let cores = core_sets_bfs(&g1, 0, &[1, 2], &prm, &VertexOrder::Natural).unwrap();
        // first core: seed 1 discovers 3, 4, 5 (2 is another chosen neighbour)
        assert_eq!(cores[0].core, vec![1, 3, 4, 5]);
        assert_eq!(cores[0].boundary, vec![3, 4, 5]);
        assert_eq!(cores[0].discovered, vec![1]);
        assert_eq!(cores[1].core, vec![2, 6, 7, 8]);
        assert_eq!(cores[1].probes.len(), 3);
    }

    #[test]
    fn unit_core_keeps_seed_in_boundary() {
        let prm = params(40, 0.1, 0.3);
        assert!(!prm.singleton_cores());
        assert_eq!(prm.core_size(), 1);
        let cores = core_sets_bfs(
            &Graph::complete(40),
            0,
            &[1, 2],
            &prm,
            &VertexOrder::Natural,
        )
        .unwrap();
        assert_eq!(cores[1].core, vec![2]);
        assert_eq!(cores[1].boundary, vec![2]);
        assert!(cores[1].discovered.is_empty() && cores[1].probes.is_empty());
    }

    #[test]
    fn forced_matching_toy() {
        // root 0, one tree; vertex 3 has no boundary neighbour in G and a
        // single candidate 2 in the residual set reaching the core {1}
        let prm = params(4, 0.125, 0.375);
        assert_eq!(prm.k(), 1);
        assert!(!prm.singleton_cores());
        let g1 = Graph::from_edges(4, [(0, 1), (1, 2)]).unwrap();
        let g2 = Graph::from_edges(4, [(2, 3)]).unwrap();
        let build = build_ists_gnp(&g1, &g2, &prm, 0, &VertexOrder::Natural).unwrap();
        assert_eq!(build.trees[0].parent, vec![None, Some(0), Some(1), Some(2)]);
        assert_eq!(build.case, MatchingCase::BoundaryNeighbourhoods);
        assert_eq!(build.matched_vertices, 1);
    }

    #[test]
    fn core_checks_clean_on_success() {
        let mut rng = TrialRng::seed_from_u64(11);
        let prm = params(300, 0.04, 0.45);
        let g1 = crate::random::sample_gnp(300, 0.3, &mut rng).unwrap();
        let g2 = crate::random::sample_gnp(300, prm.p2, &mut rng).unwrap();
        if let Ok(build) = build_ists_gnp(&g1, &g2, &prm, 0, &VertexOrder::Natural) {
            assert!(core_violations(&build, &g1).is_empty());
        }
    }

    #[test]
    fn expansion_on_extremes() {
        let mut rng = TrialRng::seed_from_u64(2);
        let r = expansion_diagnostic(&Graph::complete(50), 0.5, 0.5, 200, &mut rng);
        assert_eq!(r.violations, 0);
        let r = expansion_diagnostic(&Graph::empty(50), 0.5, 0.5, 200, &mut rng);
        assert_eq!(r.violations, 200);
    }
}
