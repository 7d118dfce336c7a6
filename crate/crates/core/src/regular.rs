//! Independent spanning trees in random regular graphs given as unions of
//! edge-disjoint perfect matchings.
//!
//! Colours are grouped in fours: three colours form a cubic graph that is
//! explored by BFS from the root, the fourth is a reserve matching used to
//! reroute vertices whose root paths collide. Odd orders are handled by
//! building stronger trees on `n - 1` vertices that avoid a sampled induced
//! matching, then adding one vertex joined to the matching's endpoints.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{bfs_tree, diameter, edge, Edge, Graph, RootedTree, Vertex, VertexOrder};
use crate::random::{sample_matching_family, MatchingFamily, RandomError};
use crate::verify::{verify_ist_family, verify_strong, IstReport, StrongReport};

/// Sizes and the logarithmic thresholds of the analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularParams {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    /// `20 log2(ln n)`.
    pub psi: f64,
    /// `log2 n + psi`.
    pub beta: f64,
}

impl RegularParams {
    pub fn new(n: usize, d: usize) -> Result<Self, RegularFailure> {
        if n < 3 {
            return Err(RegularFailure::Domain(format!("need n >= 3, got {n}")));
        }
        if d < 4 {
            return Err(RegularFailure::DegreeTooSmall { d });
        }
        let nf = n as f64;
        let psi = 20.0 * nf.ln().log2();
        Ok(RegularParams {
            n,
            d,
            k: d / 4,
            psi,
            beta: nf.log2() + psi,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
pub enum RegularFailure {
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("need at least 4 colours, got {d}")]
    DegreeTooSmall { d: usize },
    #[error("sampling failed: {0}")]
    Sampling(String),
    #[error("colour group {group} is disconnected")]
    Disconnected { group: usize },
    #[error("vertex {vertex} is bad in {records} ways")]
    UniqueAnchor { vertex: Vertex, records: usize },
    #[error("rerouted family has {conflicts} conflicts and {structural} broken trees")]
    Verification { conflicts: usize, structural: usize },
    #[error("sampled edges are not an induced matching")]
    InducedMatching,
    #[error("tree {tree} uses matching edge {edge:?}")]
    Avoidance { tree: usize, edge: Edge },
    #[error("paths from {v} in tree {i} and from {w} in tree {j} meet in {shared:?}")]
    PathMeet {
        v: Vertex,
        w: Vertex,
        i: usize,
        j: usize,
        shared: Vec<Vertex>,
    },
}

impl RegularFailure {
    pub fn stage(&self) -> &'static str {
        match self {
            RegularFailure::Domain(_) | RegularFailure::DegreeTooSmall { .. } => "domain",
            RegularFailure::Sampling(_) => "sampling",
            RegularFailure::Disconnected { .. } => "bfs",
            RegularFailure::UniqueAnchor { .. } => "unique-anchor",
            RegularFailure::Verification { .. } => "verify",
            RegularFailure::InducedMatching => "induced-matching",
            RegularFailure::Avoidance { .. } => "avoidance",
            RegularFailure::PathMeet { .. } => "path-meet",
        }
    }
}

/// A failure together with the diagnostics gathered before it, when the
/// pipeline got as far as building the BFS trees.
#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
#[error("{failure}")]
pub struct RegularError {
    pub failure: RegularFailure,
    pub diagnostics: Option<Box<RegularDiagnostics>>,
}

impl From<RegularFailure> for RegularError {
    fn from(failure: RegularFailure) -> Self {
        RegularError {
            failure,
            diagnostics: None,
        }
    }
}

impl RegularError {
    fn with(failure: RegularFailure, diagnostics: &RegularDiagnostics) -> Self {
        RegularError {
            failure,
            diagnostics: Some(Box::new(diagnostics.clone())),
        }
    }
}

impl From<RandomError> for RegularFailure {
    fn from(e: RandomError) -> Self {
        match e {
            RandomError::Domain(m) => RegularFailure::Domain(m),
            other => RegularFailure::Sampling(other.to_string()),
        }
    }
}

/// Cubic exploration graphs and reserve matchings carved from the colours.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorDecomposition {
    pub k: usize,
    /// Group `i` is the union of colours `4i`, `4i + 1`, `4i + 2`.
    pub groups: Vec<Graph>,
    /// Reserve `i` is colour `4i + 3`, as a partner table.
    pub reserves: Vec<Vec<Vertex>>,
    /// Colours `4k..d`, not used.
    pub leftover: Vec<usize>,
}

pub fn decompose_colors(fam: &MatchingFamily) -> Result<ColorDecomposition, RegularFailure> {
    let d = fam.d();
    if d < 4 {
        return Err(RegularFailure::DegreeTooSmall { d });
    }
    let k = d / 4;
    let groups = (0..k).map(|i| fam.union_of(4 * i..4 * i + 3)).collect();
    let reserves = (0..k).map(|i| fam.mates(4 * i + 3)).collect();
    Ok(ColorDecomposition {
        k,
        groups,
        reserves,
        leftover: (4 * k..d).collect(),
    })
}

/// `v` is `(i, j)`-bad with anchor `u`; `ell` is the tree it gets rerouted in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BadVertexRecord {
    pub v: Vertex,
    pub i: usize,
    pub j: usize,
    pub anchor: Vertex,
    pub ell: usize,
}

/// Tree index with the larger root distance of `anchor`; ties go to `min(i, j)`.
pub fn reroute_index(i: usize, j: usize, depth_i: usize, depth_j: usize) -> usize {
    match depth_i.cmp(&depth_j) {
        std::cmp::Ordering::Greater => i,
        std::cmp::Ordering::Less => j,
        std::cmp::Ordering::Equal => i.min(j),
    }
}

/// Every `(v, i, j, u)` with `i < j` such that `u ∉ {v, root}` lies on the
/// root paths of `v` in both `T_i` and `T_j`. Trees must be valid.
pub fn find_bad(trees: &[RootedTree], root: Vertex) -> Vec<BadVertexRecord> {
    let Some(n) = trees.first().map(RootedTree::n) else {
        return Vec::new();
    };
    let depths: Vec<Vec<usize>> = trees
        .iter()
        .map(|t| t.depths().expect("find_bad needs valid trees"))
        .collect();
    let mut out = Vec::new();
    let mut hits: Vec<(Vertex, usize)> = Vec::new();
    for v in (0..n).filter(|&v| v != root) {
        hits.clear();
        for (t, tree) in trees.iter().enumerate() {
            let mut cur = tree.parent[v].expect("valid tree");
            while cur != root {
                hits.push((cur, t));
                cur = tree.parent[cur].expect("valid tree");
            }
        }
        hits.sort_unstable();
        for group in hits.chunk_by(|a, b| a.0 == b.0) {
            for (a, &(u, i)) in group.iter().enumerate() {
                for &(_, j) in &group[a + 1..] {
                    let ell = reroute_index(i, j, depths[i][u], depths[j][u]);
                    out.push(BadVertexRecord {
                        v,
                        i,
                        j,
                        anchor: u,
                        ell,
                    });
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// The rerouting decisions: `index_sets[w]` is the sorted set `I(w)` of trees
/// in which `w` takes its reserve edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReroutePlan {
    pub index_sets: Vec<Vec<usize>>,
    /// `(w, ell)` for every `ell ∈ I(w)`, sorted.
    pub swaps: Vec<(Vertex, usize)>,
}

impl ReroutePlan {
    pub fn unsafe_count(&self) -> usize {
        self.index_sets.iter().filter(|s| !s.is_empty()).count()
    }
}

/// Processes bad vertices in `order` (bad records of one vertex together):
/// for each record, every vertex of the subtree of `v` in `T_ell` gets `ell`
/// added to its index set. Subtrees are taken in the trees as given.
pub fn plan_reroute(
    trees: &[RootedTree],
    bads: &[BadVertexRecord],
    order: &VertexOrder,
) -> ReroutePlan {
    let n = trees.first().map_or(0, RootedTree::n);
    let children: Vec<Vec<Vec<Vertex>>> = trees.iter().map(RootedTree::children).collect();
    let mut by_vertex: Vec<Vec<&BadVertexRecord>> = vec![Vec::new(); n];
    for b in bads {
        by_vertex[b.v].push(b);
    }
    let mut index_sets: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in order.sequence(n) {
        for b in &by_vertex[v] {
            for w in trees[b.ell].subtree(v, &children[b.ell]) {
                if !index_sets[w].contains(&b.ell) {
                    index_sets[w].push(b.ell);
                }
            }
        }
    }
    let mut swaps = Vec::new();
    for (w, set) in index_sets.iter_mut().enumerate() {
        set.sort_unstable();
        swaps.extend(set.iter().map(|&l| (w, l)));
    }
    ReroutePlan { index_sets, swaps }
}

/// Replaces the parent of `w` in `T_ell` by its partner in reserve `ell` for
/// every planned swap. The result may contain parent cycles.
pub fn apply_reroute(
    trees: &[RootedTree],
    plan: &ReroutePlan,
    reserves: &[Vec<Vertex>],
) -> Vec<RootedTree> {
    let mut out = trees.to_vec();
    for &(w, l) in &plan.swaps {
        out[l].parent[w] = Some(reserves[l][w]);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularOptions {
    /// Fail when some bad vertex has more than one `(i, j, anchor)` record.
    pub unique_anchor_gate: bool,
    /// Compute the diameter of every colour group (all-sources BFS).
    pub group_diameters: bool,
    /// Record direct witnesses of the two ways a rerouted vertex can stay bad.
    pub triage: bool,
}

impl Default for RegularOptions {
    fn default() -> Self {
        RegularOptions {
            unique_anchor_gate: true,
            group_diameters: true,
            triage: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularDiagnostics {
    pub bad_records: usize,
    pub bad_vertices: usize,
    /// Largest number of records on a single bad vertex.
    pub max_records_per_vertex: usize,
    pub unsafe_vertices: usize,
    pub swaps: usize,
    /// Heights of the BFS trees before rerouting.
    pub heights: Vec<usize>,
    pub group_diameters: Option<Vec<Option<usize>>>,
    /// Fraction of non-root vertices within `beta / 3` of the root in at
    /// least two BFS trees.
    pub low_pair_fraction: f64,
    pub leftover_colors: usize,
    pub triage: Option<Vec<TriageWitness>>,
}

/// A rerouted vertex whose new paths may collide, judged on the BFS paths.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TriageWitness {
    /// Two reserve partners of `w`, for trees `l1 < l2` in `I(w)`, whose
    /// paths meet outside the root.
    TwoReroutes {
        w: Vertex,
        l1: usize,
        l2: usize,
        shared: Vertex,
    },
    /// The reserve partner of `w` for `l1 ∈ I(w)` has a path meeting the
    /// path of `w` in tree `l2 ≠ l1` outside the root.
    RerouteMeetsPath {
        w: Vertex,
        l1: usize,
        l2: usize,
        shared: Vertex,
    },
}

fn path_set(tree: &RootedTree, v: Vertex, root: Vertex) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = tree
        .path_to_root(v)
        .vertices
        .into_iter()
        .filter(|&x| x != root)
        .collect();
    out.sort_unstable();
    out
}

fn first_common(a: &[Vertex], b: &[Vertex]) -> Option<Vertex> {
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => return Some(a[x]),
        }
    }
    None
}

/// Witnesses over every unsafe vertex, using the paths of `bfs_trees`.
pub fn triage_witnesses(
    bfs_trees: &[RootedTree],
    plan: &ReroutePlan,
    reserves: &[Vec<Vertex>],
    root: Vertex,
) -> Vec<TriageWitness> {
    let mut out = Vec::new();
    for (w, set) in plan.index_sets.iter().enumerate() {
        for (a, &l1) in set.iter().enumerate() {
            let p1 = path_set(&bfs_trees[l1], reserves[l1][w], root);
            for &l2 in &set[a + 1..] {
                let p2 = path_set(&bfs_trees[l2], reserves[l2][w], root);
                if let Some(shared) = first_common(&p1, &p2) {
                    out.push(TriageWitness::TwoReroutes { w, l1, l2, shared });
                }
            }
            for l2 in (0..bfs_trees.len()).filter(|&l| l != l1) {
                let pw = path_set(&bfs_trees[l2], w, root);
                if let Some(shared) = first_common(&p1, &pw) {
                    out.push(TriageWitness::RerouteMeetsPath { w, l1, l2, shared });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularBuild {
    pub params: RegularParams,
    pub root: Vertex,
    pub trees: Vec<RootedTree>,
    pub diagnostics: RegularDiagnostics,
}

/// Result of the pipeline up to (not including) the final verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RerouteOutcome {
    pub bfs_trees: Vec<RootedTree>,
    pub bads: Vec<BadVertexRecord>,
    pub plan: ReroutePlan,
    pub trees: Vec<RootedTree>,
    pub diagnostics: RegularDiagnostics,
}

/// BFS trees in `explore[i]`, bad-vertex detection, the optional unique
/// anchor gate, and one round of rerouting through `reserves`.
pub fn reroute_pipeline(
    params: &RegularParams,
    explore: &[Graph],
    reserves: &[Vec<Vertex>],
    leftover_colors: usize,
    root: Vertex,
    order: &VertexOrder,
    opts: &RegularOptions,
) -> Result<RerouteOutcome, RegularError> {
    let n = params.n;
    let mut bfs_trees = Vec::with_capacity(explore.len());
    for (i, g) in explore.iter().enumerate() {
        bfs_trees
            .push(bfs_tree(g, root, order).map_err(|_| RegularFailure::Disconnected { group: i })?);
    }
    let depths: Vec<Vec<usize>> = bfs_trees
        .iter()
        .map(|t| t.depths().expect("BFS tree"))
        .collect();
    let heights = depths
        .iter()
        .map(|d| d.iter().copied().max().unwrap_or(0))
        .collect();
    let third = params.beta / 3.0;
    let low = (0..n)
        .filter(|&u| u != root && depths.iter().filter(|d| d[u] as f64 <= third).count() >= 2)
        .count();
    let bads = find_bad(&bfs_trees, root);
    let mut per_vertex = vec![0usize; n];
    for b in &bads {
        per_vertex[b.v] += 1;
    }
    let max_records = per_vertex.iter().copied().max().unwrap_or(0);
    let plan = plan_reroute(&bfs_trees, &bads, order);
    let diagnostics = RegularDiagnostics {
        bad_records: bads.len(),
        bad_vertices: per_vertex.iter().filter(|&&c| c > 0).count(),
        max_records_per_vertex: max_records,
        unsafe_vertices: plan.unsafe_count(),
        swaps: plan.swaps.len(),
        heights,
        group_diameters: opts
            .group_diameters
            .then(|| explore.iter().map(diameter).collect()),
        low_pair_fraction: if n > 1 {
            low as f64 / (n - 1) as f64
        } else {
            0.0
        },
        leftover_colors,
        triage: opts
            .triage
            .then(|| triage_witnesses(&bfs_trees, &plan, reserves, root)),
    };
    if opts.unique_anchor_gate && max_records > 1 {
        let vertex = (0..n).find(|&v| per_vertex[v] > 1).expect("max > 1");
        let failure = RegularFailure::UniqueAnchor {
            vertex,
            records: per_vertex[vertex],
        };
        return Err(RegularError::with(failure, &diagnostics));
    }
    let trees = apply_reroute(&bfs_trees, &plan, reserves);
    Ok(RerouteOutcome {
        bfs_trees,
        bads,
        plan,
        trees,
        diagnostics,
    })
}

fn verdict(report: &IstReport) -> Result<(), RegularFailure> {
    if report.ok {
        Ok(())
    } else {
        Err(RegularFailure::Verification {
            conflicts: report.conflicts.len(),
            structural: report.structural.len(),
        })
    }
}

/// The even-order pipeline on a given matching family.
pub fn build_ists_regular_even(
    fam: &MatchingFamily,
    root: Vertex,
    order: &VertexOrder,
    opts: &RegularOptions,
) -> Result<RegularBuild, RegularError> {
    let params = RegularParams::new(fam.n, fam.d())?;
    if root >= fam.n {
        return Err(RegularFailure::Domain(format!("root {root} out of range")).into());
    }
    let dec = decompose_colors(fam)?;
    let out = reroute_pipeline(
        &params,
        &dec.groups,
        &dec.reserves,
        dec.leftover.len(),
        root,
        order,
        opts,
    )?;
    verdict(&verify_ist_family(&fam.union_graph(), root, &out.trees))
        .map_err(|f| RegularError::with(f, &out.diagnostics))?;
    Ok(RegularBuild {
        params,
        root,
        trees: out.trees,
        diagnostics: out.diagnostics,
    })
}

/// Samples a family on `n` (even) vertices and runs the even pipeline;
/// `root = None` picks the root uniformly.
pub fn run_regular_even<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    root: Option<Vertex>,
    opts: &RegularOptions,
    rng: &mut R,
) -> Result<(MatchingFamily, RegularBuild), (Option<MatchingFamily>, RegularError)> {
    if !n.is_multiple_of(2) {
        return Err((
            None,
            RegularFailure::Domain(format!("even pipeline needs even n, got {n}")).into(),
        ));
    }
    if let Err(e) = RegularParams::new(n, d) {
        return Err((None, e.into()));
    }
    let fam =
        sample_matching_family(n, d, rng).map_err(|e| (None, RegularFailure::from(e).into()))?;
    let root = root.unwrap_or_else(|| rng.random_range(0..n));
    match build_ists_regular_even(&fam, root, &VertexOrder::Natural, opts) {
        Ok(b) => Ok((fam, b)),
        Err(e) => Err((Some(fam), e)),
    }
}

/// `half_d` edges of `graph` drawn uniformly with repetition, and whether
/// they form an induced matching on `2 half_d` vertices.
pub fn sample_induced_matching<R: Rng + ?Sized>(
    graph: &Graph,
    half_d: usize,
    rng: &mut R,
) -> (Vec<Edge>, bool) {
    let edges = graph.edges();
    if edges.is_empty() {
        return (Vec::new(), half_d == 0);
    }
    let s: Vec<Edge> = (0..half_d)
        .map(|_| edges[rng.random_range(0..edges.len())])
        .collect();
    let flag = is_induced_matching(graph, &s);
    (s, flag)
}

/// Endpoints pairwise distinct and no graph edge between endpoints of
/// different members.
pub fn is_induced_matching(graph: &Graph, s: &[Edge]) -> bool {
    let mut ends: Vec<Vertex> = s.iter().flat_map(|&(u, v)| [u, v]).collect();
    ends.sort_unstable();
    if ends.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    if s.iter().any(|&(u, v)| !graph.has_edge(u, v)) {
        return false;
    }
    for (a, &(u1, v1)) in s.iter().enumerate() {
        for &(u2, v2) in &s[a + 1..] {
            for x in [u1, v1] {
                for y in [u2, v2] {
                    if graph.has_edge(x, y) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Deletes `s` and joins a new vertex `n - 1` to its endpoints when `s` is an
/// induced matching; otherwise the edgeless graph on `n` vertices.
pub fn op_transform(graph: &Graph, s: &[Edge]) -> Graph {
    let n = graph.n() + 1;
    if !is_induced_matching(graph, s) {
        return Graph::empty(n);
    }
    let removed: Vec<Edge> = s.iter().map(|&(u, v)| edge(u, v)).collect();
    let kept = graph.without_edges(&removed);
    let fresh = n - 1;
    let added: Vec<Edge> = s
        .iter()
        .flat_map(|&(u, v)| [(u, fresh), (v, fresh)])
        .collect();
    kept.extended(1, &added)
        .expect("new vertex edges are fresh")
}

/// Trees on `L` that avoid `s` and whose root paths from the endpoints of
/// `s` meet only at the root across different trees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongBuild {
    pub params: RegularParams,
    pub root: Vertex,
    pub trees: Vec<RootedTree>,
    pub diagnostics: RegularDiagnostics,
    pub report: StrongReport,
}

/// Runs the even pipeline on `L` with the edges of `s` removed from both the
/// exploration graphs and the reserves, then checks the strong conditions.
///
/// A planned swap whose reserve edge lies in `s` surfaces as an avoidance
/// failure.
pub fn build_strong_ists(
    fam: &MatchingFamily,
    s: &[Edge],
    root: Vertex,
    order: &VertexOrder,
    opts: &RegularOptions,
) -> Result<StrongBuild, RegularError> {
    let params = RegularParams::new(fam.n, fam.d())?;
    if root >= fam.n {
        return Err(RegularFailure::Domain(format!("root {root} out of range")).into());
    }
    let dec = decompose_colors(fam)?;
    let removed: Vec<Edge> = s.iter().map(|&(u, v)| edge(u, v)).collect();
    let explore: Vec<Graph> = dec
        .groups
        .iter()
        .map(|g| g.without_edges(&removed))
        .collect();
    let out = reroute_pipeline(
        &params,
        &explore,
        &dec.reserves,
        dec.leftover.len(),
        root,
        order,
        opts,
    )?;
    let report = verify_strong(&fam.union_graph(), root, &out.trees, s);
    let fail = |f| RegularError::with(f, &out.diagnostics);
    verdict(&report.ist).map_err(fail)?;
    if let Some(a) = report.avoidance.first() {
        return Err(fail(RegularFailure::Avoidance {
            tree: a.tree,
            edge: a.edge,
        }));
    }
    if let Some(m) = report.path_meets.first() {
        let shared = m.shared.clone();
        return Err(fail(RegularFailure::PathMeet {
            v: m.v,
            w: m.w,
            i: m.i,
            j: m.j,
            shared,
        }));
    }
    Ok(StrongBuild {
        params,
        root,
        trees: out.trees,
        diagnostics: out.diagnostics,
        report,
    })
}

/// Gives the new vertex `n - 1` a parent in every tree: tree `i` uses the
/// smaller endpoint of the `i`-th edge of `s`.
pub fn extend_trees(trees: &[RootedTree], s: &[Edge]) -> Vec<RootedTree> {
    trees
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut parent = t.parent.clone();
            let (u, v) = s[i];
            parent.push(Some(u.min(v)));
            let order = t.order.as_ref().map(|o| {
                let mut o = o.clone();
                o.push(o.len());
                o
            });
            RootedTree {
                root: t.root,
                parent,
                order,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OddBuild {
    pub matching: Vec<Edge>,
    pub strong: StrongBuild,
    pub graph: Graph,
    pub trees: Vec<RootedTree>,
}

/// Odd-order pipeline on a family over `n - 1` vertices: sample `d/2` edges,
/// require an induced matching, build strong trees, apply the vertex
/// addition, extend and verify on `n` vertices.
pub fn build_ists_regular_odd<R: Rng + ?Sized>(
    fam: &MatchingFamily,
    root: Vertex,
    opts: &RegularOptions,
    rng: &mut R,
) -> Result<OddBuild, RegularError> {
    let d = fam.d();
    if !d.is_multiple_of(2) {
        return Err(RegularFailure::Domain(format!("odd pipeline needs even d, got {d}")).into());
    }
    let small = fam.union_graph();
    let (s, flag) = sample_induced_matching(&small, d / 2, rng);
    if !flag {
        return Err(RegularFailure::InducedMatching.into());
    }
    let strong = build_strong_ists(fam, &s, root, &VertexOrder::Natural, opts)?;
    let graph = op_transform(&small, &s);
    let trees = extend_trees(&strong.trees, &s);
    verdict(&verify_ist_family(&graph, root, &trees))
        .map_err(|f| RegularError::with(f, &strong.diagnostics))?;
    Ok(OddBuild {
        matching: s,
        strong,
        graph,
        trees,
    })
}

/// Samples a family on `n - 1` vertices (`n` odd) and runs the odd pipeline;
/// `root = None` picks the root uniformly among the `n - 1` old vertices.
pub fn run_regular_odd<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    root: Option<Vertex>,
    opts: &RegularOptions,
    rng: &mut R,
) -> Result<(MatchingFamily, OddBuild), (Option<MatchingFamily>, RegularError)> {
    if n.is_multiple_of(2) || !d.is_multiple_of(2) {
        let msg = format!("odd pipeline needs odd n and even d, got n = {n}, d = {d}");
        return Err((None, RegularFailure::Domain(msg).into()));
    }
    if let Err(e) = RegularParams::new(n, d) {
        return Err((None, e.into()));
    }
    let fam = sample_matching_family(n - 1, d, rng)
        .map_err(|e| (None, RegularFailure::from(e).into()))?;
    let root = root.unwrap_or_else(|| rng.random_range(0..n - 1));
    if root >= n - 1 {
        let msg = format!("root {root} must be one of the first n - 1 vertices");
        return Err((Some(fam), RegularFailure::Domain(msg).into()));
    }
    match build_ists_regular_odd(&fam, root, opts, rng) {
        Ok(b) => Ok((fam, b)),
        Err(e) => Err((Some(fam), e)),
    }
}

/// Which constant sets the diameter threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiameterConstant {
    Sixteen,
    Four,
}

/// Least `s` with `(d - 1)^(s - 3) >= (c + eps) d n ln n`.
pub fn diameter_threshold(n: usize, d: usize, eps: f64, constant: DiameterConstant) -> usize {
    let c = match constant {
        DiameterConstant::Sixteen => 16.0,
        DiameterConstant::Four => 4.0,
    };
    let nf = n as f64;
    let target = (c + eps) * d as f64 * nf * nf.ln();
    let base = (d - 1) as f64;
    let mut s = 3usize;
    while base.powi((s - 3) as i32) < target {
        s += 1;
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiameterReport {
    pub n: usize,
    pub d: usize,
    pub eps: f64,
    pub deletions: usize,
    pub trials: usize,
    pub constant: DiameterConstant,
    /// Threshold for the constant in use.
    pub s: usize,
    pub s_sixteen: usize,
    pub s_four: usize,
    /// Logarithm used inside the threshold.
    pub log_base: String,
    /// Per-trial diameter after deletion (`None` when disconnected).
    pub diameters: Vec<Option<usize>>,
    pub within: usize,
    pub fraction_within: f64,
}

/// Samples the union of `d` disjoint perfect matchings on `n` vertices,
/// deletes `deletions` distinct uniform edges, and records the diameter.
pub fn diameter_deletion_check<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    eps: f64,
    deletions: usize,
    trials: usize,
    constant: DiameterConstant,
    rng: &mut R,
) -> Result<DiameterReport, RegularFailure> {
    if n < 4 || !n.is_multiple_of(2) || d < 3 || d >= n {
        return Err(RegularFailure::Domain(format!(
            "need even n >= 4 and 3 <= d < n, got n = {n}, d = {d}"
        )));
    }
    let s_sixteen = diameter_threshold(n, d, eps, DiameterConstant::Sixteen);
    let s_four = diameter_threshold(n, d, eps, DiameterConstant::Four);
    let s = match constant {
        DiameterConstant::Sixteen => s_sixteen,
        DiameterConstant::Four => s_four,
    };
    let mut diameters = Vec::with_capacity(trials);
    for _ in 0..trials {
        let g = sample_matching_family(n, d, rng)?.union_graph();
        let take = deletions.min(g.m());
        let removed: Vec<Edge> = sample(rng, g.m(), take)
            .into_iter()
            .map(|i| g.edges()[i])
            .collect();
        diameters.push(diameter(&g.without_edges(&removed)));
    }
    let within = diameters
        .iter()
        .filter(|d| d.is_some_and(|d| d <= s))
        .count();
    Ok(DiameterReport {
        n,
        d,
        eps,
        deletions,
        trials,
        constant,
        s,
        s_sixteen,
        s_four,
        log_base: "natural".into(),
        diameters,
        within,
        fraction_within: if trials == 0 {
            0.0
        } else {
            within as f64 / trials as f64
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{sample_disjoint_matchings, TrialRng};
    use rand::SeedableRng;

    fn path_tree(root: Vertex, chain: &[Vertex], n: usize) -> RootedTree {
        // chain lists vertices from the root's child downwards
        let mut parent = vec![None; n];
        let mut prev = root;
        for &v in chain {
            parent[v] = Some(prev);
            prev = v;
        }
        RootedTree::from_parents(root, parent)
    }

    #[test]
    fn thresholds() {
        let p = RegularParams::new(1024, 8).unwrap();
        assert_eq!(p.k, 2);
        let expected_psi = 20.0 * (1024f64).ln().log2();
        assert!((p.psi - expected_psi).abs() < 1e-12);
        assert!((p.beta - (10.0 + expected_psi)).abs() < 1e-12);
        assert!(RegularParams::new(2, 8).is_err());
        assert_eq!(
            RegularParams::new(10, 3),
            Err(RegularFailure::DegreeTooSmall { d: 3 })
        );
    }

    #[test]
    fn decomposition_shapes() {
        let mut rng = TrialRng::seed_from_u64(1);
        let fam = sample_disjoint_matchings(20, 7, &mut rng).unwrap();
        let dec = decompose_colors(&fam).unwrap();
        assert_eq!(dec.k, 1);
        assert_eq!(dec.leftover, vec![4, 5, 6]);
        assert_eq!(dec.groups[0].regular_degree(), Some(3));
        let fam3 = sample_disjoint_matchings(20, 3, &mut rng).unwrap();
        assert_eq!(
            decompose_colors(&fam3),
            Err(RegularFailure::DegreeTooSmall { d: 3 })
        );
    }

    #[test]
    fn bad_vertex_tie_rule() {
        // T_0: r-a-b-v, T_1: r-c-b-v with r=0, a=1, b=2, c=3, v=4
        let t0 = path_tree(0, &[1, 2, 4, 3], 5);
        let t1 = path_tree(0, &[3, 2, 4, 1], 5);
        let bads = find_bad(&[t0, t1], 0);
        let at_v: Vec<_> = bads.iter().filter(|b| b.v == 4).collect();
        assert_eq!(at_v.len(), 1);
        assert_eq!(at_v[0].anchor, 2);
        assert_eq!(at_v[0].ell, 0);
        assert_eq!(reroute_index(3, 1, 4, 4), 1);
        assert_eq!(reroute_index(0, 1, 2, 5), 1);
    }

    #[test]
    fn identical_paths_are_bad_everywhere() {
        let t = path_tree(0, &[1, 2, 3, 4], 5);
        let bads = find_bad(&[t.clone(), t], 0);
        let vs: Vec<Vertex> = bads.iter().map(|b| b.v).collect();
        assert_eq!(vs, vec![2, 3, 3, 4, 4, 4]);
    }

    #[test]
    fn plan_uses_subtrees() {
        let t0 = path_tree(0, &[1, 2, 3], 5);
        let mut t0 = t0;
        t0.parent[4] = Some(0);
        let bad = BadVertexRecord {
            v: 2,
            i: 0,
            j: 1,
            anchor: 1,
            ell: 0,
        };
        let t1 = t0.clone();
        let plan = plan_reroute(&[t0.clone(), t1], &[bad], &VertexOrder::Natural);
        assert_eq!(plan.swaps, vec![(2, 0), (3, 0)]);
        assert_eq!(plan.unsafe_count(), 2);
        let empty = plan_reroute(&[t0.clone()], &[], &VertexOrder::Natural);
        assert!(empty.swaps.is_empty());
        assert_eq!(
            apply_reroute(&[t0.clone()], &empty, &[vec![1, 0, 3, 2, 4]]),
            vec![t0]
        );
    }

    #[test]
    fn induced_matching_cases() {
        let mut rng = TrialRng::seed_from_u64(9);
        let tri = Graph::cycle(3);
        for _ in 0..50 {
            assert!(!sample_induced_matching(&tri, 2, &mut rng).1);
            assert!(sample_induced_matching(&tri, 1, &mut rng).1);
        }
        let c8 = Graph::cycle(8);
        assert!(is_induced_matching(&c8, &[(0, 1), (4, 5)]));
        assert!(!is_induced_matching(&c8, &[(0, 1), (2, 3)]));
    }

    #[test]
    fn op_adds_regular_vertex() {
        let c8 = Graph::cycle(8);
        let g = op_transform(&c8, &[(0, 1)]);
        assert_eq!(g.n(), 9);
        assert_eq!(g.regular_degree(), Some(2));
        assert_eq!(g.neighbors(8), &[0, 1]);
        let two = op_transform(&c8, &[(0, 1), (4, 5)]);
        assert_eq!(two.neighbors(8), &[0, 1, 4, 5]);
        assert_eq!(two.degree(0), 2);
        let void = op_transform(&c8, &[(0, 1), (1, 2)]);
        assert_eq!(void, Graph::empty(9));
    }

    #[test]
    fn diameter_thresholds() {
        assert_eq!(
            diameter_threshold(10_000, 3, 0.1, DiameterConstant::Sixteen),
            26
        );
        assert_eq!(
            diameter_threshold(10_000, 3, 0.1, DiameterConstant::Four),
            24
        );
    }
}
