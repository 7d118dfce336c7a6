use std::collections::HashSet;

use ist_core::graph::{Graph, RootedTree, Vertex};
use ist_core::verify::verify_ist_family;

fn pair_bit(a: usize, b: usize) -> u32 {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    1 << (b * (b - 1) / 2 + a)
}

fn code_under(adj: &[Vec<bool>], perm: &[usize]) -> u32 {
    let mut code = 0;
    for b in 1..perm.len() {
        for a in 0..b {
            if adj[perm[a]][perm[b]] {
                code |= pair_bit(a, b);
            }
        }
    }
    code
}

/// Largest edge code over relabelings that keep vertices sorted by
/// (degree, neighbour degrees).
fn canonical(adj: &[Vec<bool>]) -> u32 {
    let n = adj.len();
    let deg: Vec<usize> = adj
        .iter()
        .map(|r| r.iter().filter(|&&x| x).count())
        .collect();
    let inv: Vec<(usize, Vec<usize>)> = (0..n)
        .map(|v| {
            let mut nd: Vec<usize> = (0..n).filter(|&u| adj[v][u]).map(|u| deg[u]).collect();
            nd.sort_unstable();
            (deg[v], nd)
        })
        .collect();
    let mut verts: Vec<usize> = (0..n).collect();
    verts.sort_by(|&a, &b| inv[a].cmp(&inv[b]));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in &verts {
        match classes.last_mut() {
            Some(c) if inv[c[0]] == inv[v] => c.push(v),
            _ => classes.push(vec![v]),
        }
    }
    let mut best = 0;
    let mut perm = Vec::with_capacity(n);
    permute_classes(adj, &classes, 0, &mut vec![false; n], &mut perm, &mut best);
    best
}

fn permute_classes(
    adj: &[Vec<bool>],
    classes: &[Vec<usize>],
    at: usize,
    used: &mut Vec<bool>,
    perm: &mut Vec<usize>,
    best: &mut u32,
) {
    let mut class = 0;
    let mut seen = 0;
    while class < classes.len() && seen + classes[class].len() <= at {
        seen += classes[class].len();
        class += 1;
    }
    if class == classes.len() {
        *best = (*best).max(code_under(adj, perm));
        return;
    }
    for &v in &classes[class] {
        if !used[v] {
            used[v] = true;
            perm.push(v);
            permute_classes(adj, classes, at + 1, used, perm, best);
            perm.pop();
            used[v] = false;
        }
    }
}

fn to_graph(adj: &[Vec<bool>]) -> Graph {
    let n = adj.len();
    let edges = (0..n).flat_map(|b| (0..b).filter(move |&a| adj[a][b]).map(move |a| (a, b)));
    Graph::from_edges(n, edges).unwrap()
}

/// All graphs up to isomorphism on `1..=max_n` vertices, by order.
pub fn all_graphs(max_n: usize) -> Vec<Vec<Graph>> {
    let mut levels: Vec<Vec<Vec<Vec<bool>>>> = vec![vec![vec![vec![false]]]];
    for n in 2..=max_n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for g in &levels[n - 2] {
            for mask in 0u32..(1 << (n - 1)) {
                let mut adj: Vec<Vec<bool>> = g
                    .iter()
                    .map(|r| {
                        let mut r = r.clone();
                        r.push(false);
                        r
                    })
                    .collect();
                adj.push(vec![false; n]);
                for u in (0..n - 1).filter(|u| mask >> u & 1 == 1) {
                    adj[u][n - 1] = true;
                    adj[n - 1][u] = true;
                }
                if seen.insert(canonical(&adj)) {
                    next.push(adj);
                }
            }
        }
        levels.push(next);
    }
    levels
        .iter()
        .map(|l| l.iter().map(|a| to_graph(a)).collect())
        .collect()
}

pub fn is_connected(g: &Graph) -> bool {
    ist_core::graph::bfs_distances(g, 0)
        .iter()
        .all(|&d| d != ist_core::graph::UNREACHABLE)
}

/// Every spanning arborescence of `g` rooted at `root`.
pub fn all_arborescences(g: &Graph, root: Vertex) -> Vec<RootedTree> {
    let n = g.n();
    let mut out = Vec::new();
    let mut parent = vec![None; n];
    fn rec(
        g: &Graph,
        root: Vertex,
        v: usize,
        parent: &mut Vec<Option<Vertex>>,
        out: &mut Vec<RootedTree>,
    ) {
        let n = g.n();
        if v == n {
            let t = RootedTree::from_parents(root, parent.clone());
            if t.depths().is_some() {
                out.push(t);
            }
            return;
        }
        if v == root {
            return rec(g, root, v + 1, parent, out);
        }
        for &u in g.neighbors(v) {
            parent[v] = Some(u);
            rec(g, root, v + 1, parent, out);
        }
        parent[v] = None;
    }
    rec(g, root, 0, &mut parent, &mut out);
    out
}

/// Maximum number of independent trees at `root`, as a maximum clique of
/// the pairwise compatibility graph over all arborescences.
pub fn clique_max_ists(g: &Graph, root: Vertex) -> usize {
    let trees = all_arborescences(g, root);
    if trees.is_empty() {
        return 0;
    }
    let t = trees.len();
    let mut compat = vec![vec![false; t]; t];
    for a in 0..t {
        for b in a + 1..t {
            let ok = verify_ist_family(g, root, &[trees[a].clone(), trees[b].clone()]).ok;
            compat[a][b] = ok;
            compat[b][a] = ok;
        }
    }
    fn grow(compat: &[Vec<bool>], cand: Vec<usize>, size: usize, best: &mut usize) {
        if size + cand.len() <= *best {
            return;
        }
        if cand.is_empty() {
            *best = size;
            return;
        }
        for (idx, &v) in cand.iter().enumerate() {
            if size + cand.len() - idx <= *best {
                return;
            }
            let next: Vec<usize> = cand[idx + 1..]
                .iter()
                .copied()
                .filter(|&u| compat[v][u])
                .collect();
            grow(compat, next, size + 1, best);
        }
    }
    let mut best = 1;
    grow(&compat, (0..t).collect(), 0, &mut best);
    best
}
