//! Undirected simple graphs on dense vertex ids, rooted trees, and the
//! traversal primitives (BFS trees, diameter, neighbourhoods, connectivity)
//! that the constructions and the verifier are built on.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Vertices are dense ids `0..n`.
pub type Vertex = usize;

/// An undirected edge in canonical `(min, max)` form.
pub type Edge = (Vertex, Vertex);

/// Canonical form of the edge `{u, v}`.
#[inline]
pub fn edge(u: Vertex, v: Vertex) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(Vertex, Vertex),
    #[error("vertex {v} out of range for a graph on {n} vertices")]
    VertexOutOfRange { v: Vertex, n: usize },
    #[error("graph is not connected: BFS reached {reached} of {n} vertices")]
    NotConnected { reached: usize, n: usize },
    #[error("vertex ordering is not a permutation of 0..{0}")]
    BadOrder(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Immutable undirected simple graph.
///
/// Adjacency lists are sorted ascending and the edge list holds every edge
/// once in canonical form, sorted lexicographically. Both views always agree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<Vertex>>,
    edges: Vec<Edge>,
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adj: vec![Vec::new(); n],
            edges: Vec::new(),
        }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect::<Vec<_>>();
        Self::from_edges(n, edges).expect("complete graph is simple")
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|v| (v - 1, v))).expect("path is simple")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        Self::from_edges(n, (0..n).map(|v| (v, (v + 1) % n))).expect("cycle is simple")
    }

    /// Builds a graph, rejecting self-loops, duplicates and out-of-range ids.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut list = Vec::new();
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { v: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            list.push(edge(u, v));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Self::from_sorted_unique(n, list))
    }

    /// Like [`Graph::from_edges`] but silently merges repeated edges.
    pub fn from_edges_dedup<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut list = Vec::new();
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { v: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            list.push(edge(u, v));
        }
        list.sort_unstable();
        list.dedup();
        Ok(Self::from_sorted_unique(n, list))
    }

    fn from_sorted_unique(n: usize, edges: Vec<Edge>) -> Self {
        let mut deg = vec![0usize; n];
        for &(u, v) in &edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        let mut adj: Vec<Vec<Vertex>> = deg.iter().map(|&d| Vec::with_capacity(d)).collect();
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { n, adj, edges }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `Some(d)` when every vertex has degree `d`.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first().map_or(0, Vec::len);
        self.adj.iter().all(|a| a.len() == d).then_some(d)
    }

    /// Edges in canonical form, sorted.
    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        if u >= self.n || v >= self.n {
            return false;
        }
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Edge union of two graphs on the same vertex set.
    pub fn union(&self, other: &Graph) -> Graph {
        assert_eq!(self.n, other.n, "union of graphs on different vertex sets");
        let mut list = Vec::with_capacity(self.m() + other.m());
        list.extend_from_slice(&self.edges);
        list.extend_from_slice(&other.edges);
        list.sort_unstable();
        list.dedup();
        Self::from_sorted_unique(self.n, list)
    }

    /// A new graph with the given edges removed; absent edges are ignored.
    pub fn without_edges(&self, removed: &[Edge]) -> Graph {
        let mut drop: Vec<Edge> = removed.iter().map(|&(u, v)| edge(u, v)).collect();
        drop.sort_unstable();
        let kept = self
            .edges
            .iter()
            .copied()
            .filter(|e| drop.binary_search(e).is_err())
            .collect();
        Self::from_sorted_unique(self.n, kept)
    }

    /// A new graph with `extra` isolated vertices appended and `added` edges inserted.
    pub fn extended(&self, extra: usize, added: &[Edge]) -> Result<Graph, GraphError> {
        Graph::from_edges(
            self.n + extra,
            self.edges.iter().copied().chain(added.iter().copied()),
        )
    }

    /// Text form: header `n m`, then `u v` per edge with `u < v`, sorted.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(8 * (self.m() + 1));
        let _ = writeln!(out, "{} {}", self.n, self.m());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Parses the text form. Blank lines and lines starting with `#` are skipped.
    pub fn from_text(text: &str) -> Result<Graph, GraphError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| GraphError::Parse("missing header line".into()))?;
        let (n, m) = parse_pair(header)?;
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            edges.push(parse_pair(line)?);
        }
        if edges.len() != m {
            return Err(GraphError::Parse(format!(
                "header announces {m} edges, found {}",
                edges.len()
            )));
        }
        Graph::from_edges(n, edges)
    }

    pub fn to_adjacency_json(&self) -> AdjacencyJson {
        AdjacencyJson {
            n: self.n,
            adjacency: self.adj.clone(),
        }
    }

    pub fn from_adjacency_json(doc: &AdjacencyJson) -> Result<Graph, GraphError> {
        if doc.adjacency.len() != doc.n {
            return Err(GraphError::Parse(format!(
                "adjacency has {} rows for n = {}",
                doc.adjacency.len(),
                doc.n
            )));
        }
        let mut edges = Vec::new();
        for (u, row) in doc.adjacency.iter().enumerate() {
            for &v in row {
                if v >= doc.n {
                    return Err(GraphError::VertexOutOfRange { v, n: doc.n });
                }
                if u < v {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::from_edges(doc.n, edges)?;
        if g.adj != doc.adjacency {
            return Err(GraphError::Parse(
                "adjacency rows must be sorted and symmetric".into(),
            ));
        }
        Ok(g)
    }
}

fn parse_pair(line: &str) -> Result<(usize, usize), GraphError> {
    let mut it = line.split_whitespace().map(str::parse::<usize>);
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(GraphError::Parse(format!(
            "expected two integers, got {line:?}"
        ))),
    }
}

/// JSON adjacency form of a [`Graph`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjacencyJson {
    pub n: usize,
    pub adjacency: Vec<Vec<Vertex>>,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_adjacency_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = AdjacencyJson::deserialize(d)?;
        Graph::from_adjacency_json(&doc).map_err(serde::de::Error::custom)
    }
}

/// A vertex ordering used to break ties. `Natural` is ascending ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum VertexOrder {
    #[default]
    Natural,
    Permutation(Vec<Vertex>),
}

impl VertexOrder {
    /// Rank of each vertex (position in the ordering).
    pub fn ranks(&self, n: usize) -> Result<Vec<usize>, GraphError> {
        match self {
            VertexOrder::Natural => Ok((0..n).collect()),
            VertexOrder::Permutation(p) => {
                if p.len() != n {
                    return Err(GraphError::BadOrder(n));
                }
                let mut rank = vec![usize::MAX; n];
                for (i, &v) in p.iter().enumerate() {
                    if v >= n || rank[v] != usize::MAX {
                        return Err(GraphError::BadOrder(n));
                    }
                    rank[v] = i;
                }
                Ok(rank)
            }
        }
    }

    /// The vertices listed in this order.
    pub fn sequence(&self, n: usize) -> Vec<Vertex> {
        match self {
            VertexOrder::Natural => (0..n).collect(),
            VertexOrder::Permutation(p) => p.clone(),
        }
    }

    pub fn is_natural(&self) -> bool {
        matches!(self, VertexOrder::Natural)
    }
}

/// A spanning tree given as a parent map towards `root`.
///
/// Trees produced by [`bfs_tree`] are always valid arborescences. Trees
/// assembled from parent arrays (for instance after rerouting) may carry
/// parent cycles until checked by the verifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootedTree {
    pub root: Vertex,
    pub parent: Vec<Option<Vertex>>,
    /// Ordering used during construction; absent means ascending ids.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<Vertex>>,
}

/// The vertex sequence `v, parent(v), ..., root`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootPath {
    pub vertices: Vec<Vertex>,
}

impl RootPath {
    /// Number of edges on the path.
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Vertices strictly between the endpoints.
    pub fn internal(&self) -> &[Vertex] {
        match self.vertices.len() {
            0..=2 => &[],
            l => &self.vertices[1..l - 1],
        }
    }
}

impl RootedTree {
    pub fn from_parents(root: Vertex, parent: Vec<Option<Vertex>>) -> Self {
        RootedTree {
            root,
            parent,
            order: None,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.parent.len()
    }

    #[inline]
    pub fn parent_of(&self, v: Vertex) -> Option<Vertex> {
        self.parent[v]
    }

    /// Path from `v` to the root.
    ///
    /// Panics if the parent chain from `v` does not reach the root within
    /// `n` steps; run [`RootedTree::checked_path_to_root`] on unverified trees.
    pub fn path_to_root(&self, v: Vertex) -> RootPath {
        self.checked_path_to_root(v)
            .unwrap_or_else(|| panic!("parent chain from {v} does not reach the root"))
    }

    pub fn checked_path_to_root(&self, v: Vertex) -> Option<RootPath> {
        let n = self.n();
        let mut vertices = vec![v];
        let mut cur = v;
        while cur != self.root {
            cur = self.parent.get(cur).copied().flatten()?;
            vertices.push(cur);
            if vertices.len() > n {
                return None;
            }
        }
        Some(RootPath { vertices })
    }

    /// Depth of every vertex, or `None` if the parent map is not an
    /// arborescence spanning all vertices towards the root.
    pub fn depths(&self) -> Option<Vec<usize>> {
        const UNSEEN: usize = usize::MAX;
        const ACTIVE: usize = usize::MAX - 1;
        let n = self.n();
        if self.root >= n || self.parent[self.root].is_some() {
            return None;
        }
        let mut depth = vec![UNSEEN; n];
        depth[self.root] = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            let mut cur = start;
            while depth[cur] == UNSEEN {
                depth[cur] = ACTIVE;
                stack.push(cur);
                match self.parent[cur] {
                    Some(p) if p < n => cur = p,
                    _ => return None,
                }
            }
            if depth[cur] == ACTIVE {
                return None;
            }
            let mut d = depth[cur];
            while let Some(x) = stack.pop() {
                d += 1;
                depth[x] = d;
            }
        }
        Some(depth)
    }

    pub fn height(&self) -> Option<usize> {
        self.depths().map(|d| d.into_iter().max().unwrap_or(0))
    }

    /// Children lists; only meaningful for valid trees.
    pub fn children(&self) -> Vec<Vec<Vertex>> {
        let mut ch = vec![Vec::new(); self.n()];
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                ch[p].push(v);
            }
        }
        ch
    }

    /// `v` and all its descendants, in BFS order from `v`.
    pub fn subtree(&self, v: Vertex, children: &[Vec<Vertex>]) -> Vec<Vertex> {
        let mut out = vec![v];
        let mut i = 0;
        while i < out.len() {
            out.extend_from_slice(&children[out[i]]);
            i += 1;
        }
        out
    }

    /// Parent edges `(v, parent(v))`, one per non-root vertex.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (v, p)))
    }
}

/// BFS spanning tree of `graph` rooted at `root`.
///
/// Neighbours are scanned in `order` and the queue is FIFO, so the tree is a
/// deterministic function of `(graph, root, order)`.
pub fn bfs_tree(
    graph: &Graph,
    root: Vertex,
    order: &VertexOrder,
) -> Result<RootedTree, GraphError> {
    let n = graph.n();
    if root >= n {
        return Err(GraphError::VertexOutOfRange { v: root, n });
    }
    let rank = order.ranks(n)?;
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut queue = VecDeque::with_capacity(n);
    queue.push_back(root);
    let mut reached = 1;
    let mut scratch = Vec::new();
    while let Some(u) = queue.pop_front() {
        let nbrs: &[Vertex] = if order.is_natural() {
            graph.neighbors(u)
        } else {
            scratch.clear();
            scratch.extend_from_slice(graph.neighbors(u));
            scratch.sort_unstable_by_key(|&w| rank[w]);
            &scratch
        };
        for &w in nbrs {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(u);
                reached += 1;
                queue.push_back(w);
            }
        }
    }
    if reached != n {
        return Err(GraphError::NotConnected { reached, n });
    }
    Ok(RootedTree {
        root,
        parent,
        order: match order {
            VertexOrder::Natural => None,
            VertexOrder::Permutation(p) => Some(p.clone()),
        },
    })
}

/// Sentinel distance for unreachable vertices.
pub const UNREACHABLE: u32 = u32::MAX;

/// BFS distances from `src`; [`UNREACHABLE`] where no path exists.
pub fn bfs_distances(graph: &Graph, src: Vertex) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; graph.n()];
    let mut queue = Vec::with_capacity(graph.n());
    bfs_into(graph, src, &mut dist, &mut queue);
    dist
}

/// BFS into caller-provided buffers; returns (eccentricity, reached count).
fn bfs_into(graph: &Graph, src: Vertex, dist: &mut [u32], queue: &mut Vec<Vertex>) -> (u32, usize) {
    dist.fill(UNREACHABLE);
    queue.clear();
    dist[src] = 0;
    queue.push(src);
    let mut head = 0;
    let mut ecc = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        let du = dist[u];
        ecc = du;
        for &w in graph.neighbors(u) {
            if dist[w] == UNREACHABLE {
                dist[w] = du + 1;
                queue.push(w);
            }
        }
    }
    (ecc, queue.len())
}

/// Exact diameter by BFS from every source; `None` when disconnected.
///
/// Sources are processed 64 at a time, one bit per source. The empty graph on
/// zero vertices and a single vertex both have diameter 0.
pub fn diameter(graph: &Graph) -> Option<usize> {
    let n = graph.n();
    let mut visited = vec![0u64; n];
    let mut frontier = vec![0u64; n];
    let mut next = vec![0u64; n];
    let mut best = 0;
    for base in (0..n).step_by(64) {
        let width = (n - base).min(64);
        let full = if width == 64 {
            u64::MAX
        } else {
            (1u64 << width) - 1
        };
        visited.fill(0);
        frontier.fill(0);
        for b in 0..width {
            visited[base + b] = 1 << b;
            frontier[base + b] = 1 << b;
        }
        let mut level = 0;
        loop {
            let mut any = false;
            for v in 0..n {
                let mut bits = 0;
                for &u in graph.neighbors(v) {
                    bits |= frontier[u];
                }
                bits &= !visited[v];
                next[v] = bits;
                any |= bits != 0;
            }
            if !any {
                break;
            }
            level += 1;
            for v in 0..n {
                visited[v] |= next[v];
            }
            std::mem::swap(&mut frontier, &mut next);
        }
        if visited.iter().any(|&m| m != full) {
            return None;
        }
        best = best.max(level);
    }
    Some(best)
}

/// External neighbourhood `N(S)`: vertices outside `S` adjacent to some member.
pub fn neighborhood(graph: &Graph, set: &[Vertex]) -> Vec<Vertex> {
    let n = graph.n();
    let mut in_set = vec![false; n];
    for &v in set {
        in_set[v] = true;
    }
    let mut hit = vec![false; n];
    for &v in set {
        for &w in graph.neighbors(v) {
            if !in_set[w] {
                hit[w] = true;
            }
        }
    }
    (0..n).filter(|&v| hit[v]).collect()
}

/// Unit-capacity flow network with every vertex other than the terminals
/// split into an in/out pair of capacity one.
struct SplitNetwork {
    head: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<u8>,
    next: Vec<usize>,
}

impl SplitNetwork {
    const NIL: usize = usize::MAX;

    fn build(graph: &Graph, s: Vertex, t: Vertex) -> Self {
        let n = graph.n();
        let mut net = SplitNetwork {
            head: vec![Self::NIL; 2 * n],
            to: Vec::new(),
            cap: Vec::new(),
            next: Vec::new(),
        };
        // node x_in = 2x, x_out = 2x + 1; terminals use a single node.
        for x in 0..n {
            if x != s && x != t {
                net.add(2 * x, 2 * x + 1, 1);
            }
        }
        let out = |x: Vertex| if x == s || x == t { 2 * x } else { 2 * x + 1 };
        for &(u, v) in graph.edges() {
            net.add(out(u), 2 * v, 1);
            net.add(out(v), 2 * u, 1);
        }
        net
    }

    fn add(&mut self, a: usize, b: usize, c: u8) {
        self.to.push(b);
        self.cap.push(c);
        self.next.push(self.head[a]);
        self.head[a] = self.to.len() - 1;
        self.to.push(a);
        self.cap.push(0);
        self.next.push(self.head[b]);
        self.head[b] = self.to.len() - 1;
    }

    /// Augments along shortest paths until `limit` units flow or none remain.
    fn max_flow(&mut self, src: usize, sink: usize, limit: usize) -> usize {
        let nodes = self.head.len();
        let mut flow = 0;
        let mut via = vec![Self::NIL; nodes];
        let mut queue = Vec::with_capacity(nodes);
        while flow < limit {
            via.fill(Self::NIL);
            queue.clear();
            queue.push(src);
            via[src] = usize::MAX - 1;
            let mut head = 0;
            'bfs: while head < queue.len() {
                let a = queue[head];
                head += 1;
                let mut e = self.head[a];
                while e != Self::NIL {
                    let b = self.to[e];
                    if self.cap[e] > 0 && via[b] == Self::NIL {
                        via[b] = e;
                        if b == sink {
                            break 'bfs;
                        }
                        queue.push(b);
                    }
                    e = self.next[e];
                }
            }
            if via[sink] == Self::NIL {
                break;
            }
            let mut b = sink;
            while b != src {
                let e = via[b];
                self.cap[e] -= 1;
                self.cap[e ^ 1] += 1;
                b = self.to[e ^ 1];
            }
            flow += 1;
        }
        flow
    }
}

/// Maximum number of internally vertex-disjoint `s`-`t` paths, capped at `limit`.
///
/// When `s` and `t` are adjacent the direct edge counts as one path.
pub fn local_connectivity(graph: &Graph, s: Vertex, t: Vertex, limit: usize) -> usize {
    assert_ne!(s, t, "local connectivity needs distinct terminals");
    let mut net = SplitNetwork::build(graph, s, t);
    net.max_flow(2 * s, 2 * t, limit)
}

/// Exact vertex connectivity.
///
/// Complete graphs get `n - 1`. Otherwise the minimum local connectivity
/// over non-adjacent pairs, restricted to pairs with one endpoint among the
/// first `kappa + 1` vertices (a minimum separator misses one of them).
pub fn vertex_connectivity(graph: &Graph) -> usize {
    let n = graph.n();
    if n <= 1 {
        return 0;
    }
    let mut best = n - 1;
    let mut i = 0;
    while i <= best && i < n {
        for j in 0..n {
            if j != i && !graph.has_edge(i, j) {
                let k = local_connectivity(graph, i, j, best);
                best = best.min(k);
            }
        }
        i += 1;
    }
    best
}

/// Menger bound for spanning trees rooted at `root`: no family of
/// independent trees can be larger than the fewest internally disjoint
/// paths any vertex has to the root.
pub fn rooted_path_bound(graph: &Graph, root: Vertex) -> usize {
    let n = graph.n();
    let mut best = usize::MAX;
    for v in 0..n {
        if v != root {
            let cap = best.min(graph.degree(v));
            best = best.min(local_connectivity(graph, v, root, cap));
        }
    }
    if best == usize::MAX {
        0
    } else {
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn floyd_warshall(g: &Graph) -> Option<usize> {
        let n = g.n();
        let inf = usize::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for (v, row) in d.iter_mut().enumerate() {
            row[v] = 0;
        }
        for &(u, v) in g.edges() {
            d[u][v] = 1;
            d[v][u] = 1;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if d[i][k] + d[k][j] < d[i][j] {
                        d[i][j] = d[i][k] + d[k][j];
                    }
                }
            }
        }
        let mut best = 0;
        for row in &d {
            for &x in row {
                if x >= inf {
                    return None;
                }
                best = best.max(x);
            }
        }
        Some(best)
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(Graph::from_edges(3, [(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert_eq!(
            Graph::from_edges(3, [(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(0, 1))
        );
        assert_eq!(
            Graph::from_edges(3, [(0, 3)]),
            Err(GraphError::VertexOutOfRange { v: 3, n: 3 })
        );
    }

    #[test]
    fn bfs_tree_on_path_and_cycle() {
        let t = bfs_tree(&Graph::path(3), 0, &VertexOrder::Natural).unwrap();
        assert_eq!(t.parent, vec![None, Some(0), Some(1)]);

        let t = bfs_tree(&Graph::cycle(4), 0, &VertexOrder::Natural).unwrap();
        assert_eq!(t.parent_of(1), Some(0));
        assert_eq!(t.parent_of(3), Some(0));
        assert_eq!(t.parent_of(2), Some(1));
    }

    #[test]
    fn bfs_tree_respects_order() {
        // with 3 ranked before 1, vertex 2 is discovered from 3
        let order = VertexOrder::Permutation(vec![0, 3, 2, 1]);
        let t = bfs_tree(&Graph::cycle(4), 0, &order).unwrap();
        assert_eq!(t.parent_of(2), Some(3));
        assert_eq!(t.order, Some(vec![0, 3, 2, 1]));
    }

    #[test]
    fn bfs_tree_disconnected() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(
            bfs_tree(&g, 0, &VertexOrder::Natural),
            Err(GraphError::NotConnected { reached: 2, n: 4 })
        );
    }

    #[test]
    fn paths_to_root() {
        let t = bfs_tree(&Graph::path(3), 0, &VertexOrder::Natural).unwrap();
        assert_eq!(t.path_to_root(0).vertices, vec![0]);
        assert_eq!(t.path_to_root(2).vertices, vec![2, 1, 0]);
        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let t = bfs_tree(&star, 0, &VertexOrder::Natural).unwrap();
        for leaf in 1..4 {
            assert_eq!(t.path_to_root(leaf).vertices, vec![leaf, 0]);
        }
    }

    #[test]
    fn cyclic_parent_map_is_detected() {
        let t = RootedTree::from_parents(0, vec![None, Some(2), Some(1)]);
        assert!(t.checked_path_to_root(1).is_none());
        assert!(t.depths().is_none());
    }

    #[test]
    fn diameters() {
        assert_eq!(diameter(&Graph::complete(4)), Some(1));
        assert_eq!(diameter(&Graph::cycle(6)), Some(3));
        let two = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(diameter(&two), None);
        for n in 3..12 {
            assert_eq!(diameter(&Graph::cycle(n)), floyd_warshall(&Graph::cycle(n)));
        }
        // several source batches, including a partial last one
        for n in [63, 64, 65, 150, 200] {
            let g = Graph::cycle(n);
            assert_eq!(diameter(&g), Some(n / 2));
            assert_eq!(diameter(&Graph::path(n)), Some(n - 1));
            let mut edges = g.edges().to_vec();
            edges.retain(|&e| e != (0, n - 1) && e != (n / 2 - 1, n / 2));
            assert_eq!(diameter(&Graph::from_edges(n, edges).unwrap()), None);
        }
        assert_eq!(diameter(&Graph::complete(70)), Some(1));
        let mut rng = crate::random::TrialRng::seed_from_u64(9);
        for _ in 0..20 {
            let g = crate::random::sample_gnp(150, 0.03, &mut rng).unwrap();
            let per_source = (0..150)
                .map(|s| bfs_distances(&g, s).into_iter().max().unwrap())
                .try_fold(0, |acc, e| {
                    (e != UNREACHABLE).then_some(acc.max(e as usize))
                });
            assert_eq!(diameter(&g), per_source);
        }
    }

    #[test]
    fn neighborhoods() {
        let k4 = Graph::complete(4);
        assert!(neighborhood(&k4, &[0, 1, 2, 3]).is_empty());
        assert_eq!(neighborhood(&k4, &[0]), vec![1, 2, 3]);
        assert_eq!(neighborhood(&Graph::cycle(5), &[0, 1]), vec![2, 4]);
    }

    #[test]
    fn connectivities() {
        assert_eq!(vertex_connectivity(&Graph::complete(5)), 4);
        assert_eq!(vertex_connectivity(&Graph::path(3)), 1);
        assert_eq!(vertex_connectivity(&Graph::cycle(6)), 2);
        let split = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(vertex_connectivity(&split), 0);
        // two triangles glued at vertex 0
        let bowtie =
            Graph::from_edges(5, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)]).unwrap();
        assert_eq!(vertex_connectivity(&bowtie), 1);
        assert_eq!(rooted_path_bound(&bowtie, 0), 2);
    }

    #[test]
    fn text_and_json_forms() {
        let g = Graph::from_edges(5, [(3, 1), (0, 4), (2, 1)]).unwrap();
        let text = g.to_text();
        assert_eq!(text, "5 3\n0 4\n1 2\n1 3\n");
        assert_eq!(Graph::from_text(&text).unwrap(), g);
        assert_eq!(Graph::from_text(&format!("# seed=7\n{text}")).unwrap(), g);
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"n":5,"adjacency":[[4],[2,3],[1],[1],[0]]}"#);
        assert_eq!(serde_json::from_str::<Graph>(&json).unwrap(), g);
        assert!(Graph::from_text("3 2\n0 1\n").is_err());
        assert!(serde_json::from_str::<Graph>(r#"{"n":2,"adjacency":[[1],[]]}"#).is_err());
    }
}
