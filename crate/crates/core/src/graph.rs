//! Small directed-graph helpers over dense `usize` node indices.

use std::collections::VecDeque;

/// Strongly connected components (Tarjan, iterative). Components come out in
/// reverse topological order; nodes inside a component are sorted.
pub(crate) fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0;

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        // (node, position in its successor list)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(top) = call.last_mut() {
            let v = top.0;
            if top.1 < adj[v].len() {
                let w = adj[v][top.1];
                top.1 += 1;
                if index[w] == UNVISITED {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// A component is cyclic if it has more than one node or a self-loop.
pub(crate) fn is_cyclic(comp: &[usize], adj: &[Vec<usize>]) -> bool {
    comp.len() > 1 || adj[comp[0]].contains(&comp[0])
}

/// Shortest cycle through `start` using only nodes accepted by `allowed`.
/// Returns the node sequence beginning with `start` (the closing edge back to
/// `start` is implicit).
pub(crate) fn shortest_cycle(
    adj: &[Vec<usize>],
    start: usize,
    allowed: impl Fn(usize) -> bool,
) -> Option<Vec<usize>> {
    if adj[start].contains(&start) {
        return Some(vec![start]);
    }
    let mut parent = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::new();
    for &w in &adj[start] {
        if allowed(w) && parent[w] == usize::MAX {
            parent[w] = start;
            queue.push_back(w);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if w == start {
                let mut path = vec![v];
                let mut cur = v;
                while parent[cur] != start {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.push(start);
                path.reverse();
                return Some(path);
            }
            if allowed(w) && parent[w] == usize::MAX {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    None
}

/// Number of nodes on a longest path of an acyclic graph (0 for the empty graph).
pub(crate) fn longest_path_nodes(adj: &[Vec<usize>]) -> usize {
    let comps = tarjan_scc(adj);
    // reverse topological order: successors are finished first
    let mut best = vec![0usize; adj.len()];
    for comp in &comps {
        debug_assert!(!is_cyclic(comp, adj));
        let v = comp[0];
        best[v] = 1 + adj[v].iter().map(|&w| best[w]).max().unwrap_or(0);
    }
    best.into_iter().max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scc_finds_components() {
        let adj = vec![vec![1], vec![2], vec![0, 3], vec![3], vec![]];
        let mut comps = tarjan_scc(&adj);
        comps.sort();
        assert_eq!(comps, vec![vec![0, 1, 2], vec![3], vec![4]]);
        assert!(is_cyclic(&[3], &adj));
        assert!(!is_cyclic(&[4], &adj));
    }

    #[test]
    fn shortest_cycle_prefers_short_loops() {
        let adj = vec![vec![1, 3], vec![2], vec![0], vec![0]];
        assert_eq!(shortest_cycle(&adj, 0, |_| true), Some(vec![0, 3]));
        assert_eq!(shortest_cycle(&adj, 0, |v| v != 3), Some(vec![0, 1, 2]));
        assert_eq!(shortest_cycle(&adj, 0, |v| v == 3), Some(vec![0, 3]));
        assert_eq!(shortest_cycle(&adj, 0, |v| v == 1), None);
    }

    #[test]
    fn longest_path_in_chain() {
        let adj = vec![vec![1], vec![2], vec![], vec![2]];
        assert_eq!(longest_path_nodes(&adj), 3);
        assert_eq!(longest_path_nodes(&[]), 0);
    }

    #[test]
    fn deep_graph_does_not_overflow() {
        let n = 200_000;
        let adj: Vec<Vec<usize>> = (0..n).map(|i| if i + 1 < n { vec![i + 1] } else { vec![0] }).collect();
        let comps = tarjan_scc(&adj);
        assert_eq!(comps.len(), 1);
    }
}
