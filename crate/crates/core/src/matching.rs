//! Maximum bipartite matching (Hopcroft–Karp).

use std::collections::VecDeque;

/// Maximum-cardinality matching between `0..left` and `0..right`.
///
/// Returns `mate[l] = Some(r)` for matched left vertices. The result is a
/// deterministic function of the inputs, including the order of `edges`.
pub fn bipartite_max_matching(
    left: usize,
    right: usize,
    edges: &[(usize, usize)],
) -> Vec<Option<usize>> {
    let mut adj = vec![Vec::new(); left];
    for &(l, r) in edges {
        assert!(l < left && r < right, "edge ({l}, {r}) out of range");
        adj[l].push(r);
    }
    const NONE: usize = usize::MAX;
    let mut mate_l = vec![NONE; left];
    let mut mate_r = vec![NONE; right];
    let mut dist = vec![0usize; left];
    let mut queue = VecDeque::new();

    loop {
        // layered BFS from free left vertices
        queue.clear();
        for l in 0..left {
            if mate_l[l] == NONE {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = NONE;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let m = mate_r[r];
                if m == NONE {
                    found = true;
                } else if dist[m] == NONE {
                    dist[m] = dist[l] + 1;
                    queue.push_back(m);
                }
            }
        }
        if !found {
            break;
        }
        let mut next = vec![0usize; left];
        for l in 0..left {
            if mate_l[l] == NONE {
                augment(l, &adj, &mut mate_l, &mut mate_r, &mut dist, &mut next);
            }
        }
    }
    mate_l
        .into_iter()
        .map(|r| (r != NONE).then_some(r))
        .collect()
}

fn augment(
    start: usize,
    adj: &[Vec<usize>],
    mate_l: &mut [usize],
    mate_r: &mut [usize],
    dist: &mut [usize],
    next: &mut [usize],
) -> bool {
    const NONE: usize = usize::MAX;
    // iterative DFS along the layered graph
    let mut stack = vec![start];
    while let Some(&l) = stack.last() {
        if next[l] == adj[l].len() {
            dist[l] = NONE;
            stack.pop();
            continue;
        }
        let r = adj[l][next[l]];
        let m = mate_r[r];
        if m == NONE {
            // flip the path recorded on the stack
            let mut r = r;
            while let Some(l) = stack.pop() {
                let prev = mate_l[l];
                mate_l[l] = r;
                mate_r[r] = l;
                r = prev;
            }
            return true;
        }
        if dist[m] != NONE && dist[m] == dist[l] + 1 {
            stack.push(m);
        } else {
            next[l] += 1;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn size(m: &[Option<usize>]) -> usize {
        m.iter().flatten().count()
    }

    fn is_matching(m: &[Option<usize>], edges: &[(usize, usize)]) -> bool {
        let mut used: Vec<usize> = m.iter().flatten().copied().collect();
        used.sort_unstable();
        let distinct = used.windows(2).all(|w| w[0] != w[1]);
        let present = m
            .iter()
            .enumerate()
            .all(|(l, r)| r.is_none_or(|r| edges.contains(&(l, r))));
        distinct && present
    }

    #[test]
    fn complete_bipartite() {
        let edges: Vec<_> = (0..3).flat_map(|l| (0..5).map(move |r| (l, r))).collect();
        let m = bipartite_max_matching(3, 5, &edges);
        assert_eq!(size(&m), 3);
        assert!(is_matching(&m, &edges));
    }

    #[test]
    fn empty_edges() {
        assert_eq!(size(&bipartite_max_matching(4, 4, &[])), 0);
        assert!(bipartite_max_matching(0, 3, &[]).is_empty());
    }

    #[test]
    fn three_by_three() {
        let edges = [(0, 0), (0, 1), (1, 1), (2, 2)];
        let m = bipartite_max_matching(3, 3, &edges);
        assert_eq!(m, vec![Some(0), Some(1), Some(2)]);
    }

    #[test]
    fn needs_augmenting_path() {
        // greedy takes 0-0 first; 1 can only use 0
        let edges = [(0, 0), (0, 1), (1, 0)];
        let m = bipartite_max_matching(2, 2, &edges);
        assert_eq!(size(&m), 2);
        assert!(is_matching(&m, &edges));
    }
}
