//! Exact certification of independent spanning tree families, the stronger
//! matching-avoiding variant used for odd orders, and a brute-force oracle
//! for small graphs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{edge, rooted_path_bound, Edge, Graph, RootedTree, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StructuralReason {
    NotSpanning,
    NotATree,
    EdgeNotInGraph,
    WrongRoot,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralError {
    pub tree: usize,
    pub reason: StructuralReason,
}

/// Vertex `v` whose paths in trees `i < j` share `u`.
///
/// `u` is an internal vertex of both paths, or the root when both trees
/// use the edge `v`-root (the two paths then coincide).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Conflict {
    pub v: Vertex,
    pub i: usize,
    pub j: usize,
    pub u: Vertex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IstReport {
    pub ok: bool,
    pub conflicts: Vec<Conflict>,
    pub structural: Vec<StructuralError>,
}

/// Checks that `tree` is an arborescence spanning `graph` along graph edges.
pub fn verify_spanning_tree(graph: &Graph, tree: &RootedTree) -> Result<(), StructuralReason> {
    let n = graph.n();
    if tree.n() != n {
        return Err(StructuralReason::NotSpanning);
    }
    if tree.root >= n || tree.parent[tree.root].is_some() {
        return Err(StructuralReason::WrongRoot);
    }
    for (v, p) in tree.parent.iter().enumerate() {
        match *p {
            None if v != tree.root => return Err(StructuralReason::NotSpanning),
            Some(p) if p >= n || !graph.has_edge(v, p) => {
                return Err(StructuralReason::EdgeNotInGraph)
            }
            _ => {}
        }
    }
    if tree.depths().is_none() {
        return Err(StructuralReason::NotATree);
    }
    Ok(())
}

/// Exhaustive independence check of a rooted tree family.
///
/// For every vertex `v` other than the root, the paths to the root in any
/// two trees may share only `v` and the root, and must not both be the
/// single edge `v`-root. Trees that fail the structural check are reported
/// and left out of the pairwise comparison.
pub fn verify_ist_family(graph: &Graph, root: Vertex, trees: &[RootedTree]) -> IstReport {
    let n = graph.n();
    let mut structural = Vec::new();
    let mut valid = Vec::new();
    for (t, tree) in trees.iter().enumerate() {
        let check = if tree.root != root {
            Err(StructuralReason::WrongRoot)
        } else {
            verify_spanning_tree(graph, tree)
        };
        match check {
            Ok(()) => valid.push(t),
            Err(reason) => structural.push(StructuralError { tree: t, reason }),
        }
    }

    let mut conflicts = Vec::new();
    let mut hits: Vec<(Vertex, usize)> = Vec::new();
    for v in (0..n).filter(|&v| v != root) {
        hits.clear();
        for &t in &valid {
            let parent = &trees[t].parent;
            let mut cur = parent[v].expect("validated tree");
            while cur != root {
                hits.push((cur, t));
                cur = parent[cur].expect("validated tree");
            }
            if parent[v] == Some(root) {
                hits.push((root, t));
            }
        }
        hits.sort_unstable();
        for group in hits.chunk_by(|a, b| a.0 == b.0) {
            for (a, &(u, i)) in group.iter().enumerate() {
                for &(_, j) in &group[a + 1..] {
                    conflicts.push(Conflict { v, i, j, u });
                }
            }
        }
    }
    conflicts.sort_unstable();
    IstReport {
        ok: conflicts.is_empty() && structural.is_empty(),
        conflicts,
        structural,
    }
}

/// A tree using an edge of the avoided matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvoidanceViolation {
    pub tree: usize,
    pub edge: Edge,
}

/// Paths `P_i(v)` and `P_j(w)` whose intersection is not the allowed one;
/// `shared` lists the extra common vertices (or the missing root/`v`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathMeetViolation {
    pub v: Vertex,
    pub w: Vertex,
    pub i: usize,
    pub j: usize,
    pub shared: Vec<Vertex>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongReport {
    pub ok: bool,
    pub ist: IstReport,
    pub avoidance: Vec<AvoidanceViolation>,
    pub path_meets: Vec<PathMeetViolation>,
}

/// Checks that `trees` are independent, use no edge of `matching`, and
/// that for every `v, w` covered by `matching` and trees `i != j` the paths
/// `P_i(v)` and `P_j(w)` meet in exactly `{v, root}` when `v == w` and in
/// exactly `{root}` otherwise.
pub fn verify_strong(
    graph: &Graph,
    root: Vertex,
    trees: &[RootedTree],
    matching: &[Edge],
) -> StrongReport {
    let ist = verify_ist_family(graph, root, trees);
    let mut bad_edges: Vec<Edge> = matching.iter().map(|&(u, v)| edge(u, v)).collect();
    bad_edges.sort_unstable();
    bad_edges.dedup();

    let mut avoidance = Vec::new();
    for (t, tree) in trees.iter().enumerate() {
        for (v, p) in tree.edges() {
            let e = edge(v, p);
            if bad_edges.binary_search(&e).is_ok() {
                avoidance.push(AvoidanceViolation { tree: t, edge: e });
            }
        }
    }

    let mut covered: Vec<Vertex> = bad_edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    covered.sort_unstable();
    covered.dedup();

    let broken: Vec<bool> = (0..trees.len())
        .map(|t| ist.structural.iter().any(|s| s.tree == t))
        .collect();
    let mut path_meets = Vec::new();
    let paths: Vec<Vec<Option<Vec<Vertex>>>> = trees
        .iter()
        .enumerate()
        .map(|(t, tree)| {
            covered
                .iter()
                .map(|&v| {
                    if broken[t] {
                        None
                    } else {
                        tree.checked_path_to_root(v).map(|p| {
                            let mut s = p.vertices;
                            s.sort_unstable();
                            s
                        })
                    }
                })
                .collect()
        })
        .collect();
    for i in 0..trees.len() {
        for j in 0..trees.len() {
            if i == j {
                continue;
            }
            for (a, &v) in covered.iter().enumerate() {
                for (b, &w) in covered.iter().enumerate() {
                    // v == w is symmetric in (i, j); report it once
                    if v == w && i > j {
                        continue;
                    }
                    let (Some(pv), Some(pw)) = (&paths[i][a], &paths[j][b]) else {
                        continue;
                    };
                    let common = sorted_intersection(pv, pw);
                    let mut expected = vec![root];
                    if v == w && v != root {
                        expected.push(v);
                        expected.sort_unstable();
                    }
                    if common != expected {
                        path_meets.push(PathMeetViolation {
                            v,
                            w,
                            i,
                            j,
                            shared: common,
                        });
                    }
                }
            }
        }
    }
    StrongReport {
        ok: ist.ok && avoidance.is_empty() && path_meets.is_empty(),
        ist,
        avoidance,
        path_meets,
    }
}

fn sorted_intersection(a: &[Vertex], b: &[Vertex]) -> Vec<Vertex> {
    let (mut x, mut y) = (0, 0);
    let mut out = Vec::new();
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[x]);
                x += 1;
                y += 1;
            }
        }
    }
    out
}

/// Largest order accepted by the brute-force oracle.
pub const ORACLE_MAX_N: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle is limited to {cap} vertices, got {n}")]
    TooLarge { n: usize, cap: usize },
    #[error("root {0} out of range")]
    BadRoot(Vertex),
}

/// Exhaustive search for `k` independent spanning trees rooted at `root`.
///
/// Returns a witness family when one exists. Parent slots are filled one at
/// a time, most constrained first; a parent is admissible only while every
/// known root chain stays disjoint from the same vertex's chains in the other
/// trees and can still be completed, so every complete assignment is a valid
/// family.
pub fn brute_force_max_ists(
    graph: &Graph,
    root: Vertex,
    k: usize,
) -> Result<Option<Vec<RootedTree>>, OracleError> {
    let n = graph.n();
    if n > ORACLE_MAX_N {
        return Err(OracleError::TooLarge {
            n,
            cap: ORACLE_MAX_N,
        });
    }
    if root >= n {
        return Err(OracleError::BadRoot(root));
    }
    if k == 0 {
        return Ok(Some(Vec::new()));
    }
    if n == 1 {
        let tree = RootedTree::from_parents(root, vec![None]);
        return Ok(Some(vec![tree; k]));
    }
    if (0..n).any(|v| v != root && graph.degree(v) < k) || k > rooted_path_bound(graph, root) {
        return Ok(None);
    }
    let mut search = OracleSearch::new(graph, root, k);
    if search.search() {
        Ok(Some(search.witness()))
    } else {
        Ok(None)
    }
}

/// Largest `k` admitting independent trees at `root`, with a witness.
pub fn max_ists(graph: &Graph, root: Vertex) -> Result<(usize, Vec<RootedTree>), OracleError> {
    if graph.n() > ORACLE_MAX_N {
        return Err(OracleError::TooLarge {
            n: graph.n(),
            cap: ORACLE_MAX_N,
        });
    }
    if root >= graph.n() {
        return Err(OracleError::BadRoot(root));
    }
    let upper = if graph.n() == 1 {
        0
    } else {
        rooted_path_bound(graph, root)
    };
    for k in (1..=upper).rev() {
        if let Some(w) = brute_force_max_ists(graph, root, k)? {
            return Ok((k, w));
        }
    }
    Ok((0, Vec::new()))
}

const NIL: u8 = u8::MAX;

struct OracleSearch<'g> {
    graph: &'g Graph,
    root: Vertex,
    k: usize,
    /// Minimum-degree vertex whose parents are assigned first, in increasing
    /// order across trees, so that tree permutations are explored once.
    pivot: Vertex,
    parent: Vec<Vec<u8>>,
}

impl<'g> OracleSearch<'g> {
    fn new(graph: &'g Graph, root: Vertex, k: usize) -> Self {
        let n = graph.n();
        let pivot = (0..n)
            .filter(|&v| v != root)
            .min_by_key(|&v| (graph.degree(v), v))
            .expect("n >= 2");
        OracleSearch {
            graph,
            root,
            k,
            pivot,
            parent: vec![vec![NIL; n]; k],
        }
    }

    /// Vertices strictly above `x` on its known chain in tree `t`,
    /// excluding the root.
    fn above(&self, t: usize, x: Vertex) -> u16 {
        let mut mask = 0u16;
        let mut cur = self.parent[t][x];
        while cur != NIL && cur as usize != self.root {
            mask |= 1 << cur;
            cur = self.parent[t][cur as usize];
        }
        mask
    }

    fn above_all(&self) -> Vec<Vec<u16>> {
        (0..self.k)
            .map(|t| {
                (0..self.graph.n())
                    .map(|x| if x == self.root { 0 } else { self.above(t, x) })
                    .collect()
            })
            .collect()
    }

    /// Topmost vertex on the known chain of `x` in tree `t`: the root, or
    /// the first vertex whose parent is still open.
    fn top(&self, t: usize, x: Vertex) -> Vertex {
        let mut cur = x;
        while cur != self.root {
            match self.parent[t][cur] {
                NIL => break,
                q => cur = q as usize,
            }
        }
        cur
    }

    /// Whether `from` reaches the root through vertices outside `avoid`.
    fn reaches_root(&self, from: Vertex, avoid: u16) -> bool {
        let mut seen = avoid | (1 << from);
        let mut stack = vec![from];
        while let Some(x) = stack.pop() {
            for &y in self.graph.neighbors(x) {
                if y == self.root {
                    return true;
                }
                if seen & (1 << y) == 0 {
                    seen |= 1 << y;
                    stack.push(y);
                }
            }
        }
        false
    }

    /// Admissible parents for the open slot of `u` in tree `t`.
    ///
    /// Every vertex whose chain in `t` runs through `u` inherits the chain of
    /// the new parent, so that chain must avoid those vertices (no cycle)
    /// and their chains in the other trees, and must still be completable to
    /// the root around both. Parents of `u` are distinct across trees.
    fn candidates(&self, u: Vertex, t: usize, above: &[Vec<u16>]) -> Vec<Vertex> {
        let mut blocked = 0u16;
        let mut below = 0u16;
        for x in (0..self.graph.n()).filter(|&x| x != self.root) {
            if x == u || above[t][x] & (1 << u) != 0 {
                below |= 1 << x;
                blocked |= (0..self.k)
                    .filter(|&s| s != t)
                    .fold(0, |acc, s| acc | above[s][x]);
            }
        }
        self.graph
            .neighbors(u)
            .iter()
            .copied()
            .filter(|&p| {
                if (0..self.k).any(|s| s != t && self.parent[s][u] == p as u8) {
                    return false;
                }
                if p == self.root {
                    return true;
                }
                let chain = (1u16 << p) | above[t][p];
                if chain & (below | blocked) != 0 {
                    return false;
                }
                let top = self.top(t, p);
                top == self.root || self.reaches_root(top, blocked | below | (chain & !(1 << top)))
            })
            .collect()
    }

    /// Fills one open slot per level: the pivot's slots first, then the slot
    /// with the fewest admissible parents. `false` when some slot has none.
    fn search(&mut self) -> bool {
        let above = self.above_all();
        let (u, t, options) = match (0..self.k).find(|&t| self.parent[t][self.pivot] == NIL) {
            Some(t) => {
                let floor = if t == 0 {
                    None
                } else {
                    Some(self.parent[t - 1][self.pivot])
                };
                let options: Vec<Vertex> = self
                    .candidates(self.pivot, t, &above)
                    .into_iter()
                    .filter(|&p| floor.is_none_or(|f| p as u8 > f))
                    .collect();
                (self.pivot, t, options)
            }
            None => {
                let mut best: Option<(Vertex, usize, Vec<Vertex>)> = None;
                for u in (0..self.graph.n()).filter(|&u| u != self.root) {
                    for t in (0..self.k).filter(|&t| self.parent[t][u] == NIL) {
                        let options = self.candidates(u, t, &above);
                        if best.as_ref().is_none_or(|b| options.len() < b.2.len()) {
                            let dead = options.is_empty();
                            best = Some((u, t, options));
                            if dead {
                                return false;
                            }
                        }
                    }
                }
                match best {
                    None => return true,
                    Some(b) => b,
                }
            }
        };
        for p in options {
            self.parent[t][u] = p as u8;
            if self.search() {
                return true;
            }
            self.parent[t][u] = NIL;
        }
        false
    }

    fn witness(&self) -> Vec<RootedTree> {
        self.parent
            .iter()
            .map(|par| {
                let parent = par
                    .iter()
                    .enumerate()
                    .map(|(v, &p)| (v != self.root).then_some(p as usize))
                    .collect();
                RootedTree::from_parents(self.root, parent)
            })
            .collect()
    }
}
