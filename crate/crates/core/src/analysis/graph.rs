//! Small directed graphs over dense vertex indices.

use std::collections::VecDeque;

use super::AnalysisError;
use crate::count::Count;
use crate::model::{Endpoint, VirusMachine};

/// Default vertex cap for exhaustive simple-cycle search.
pub const DEFAULT_CYCLE_VERTEX_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    adj: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(vertices: usize) -> Self {
        Self {
            adj: vec![Vec::new(); vertices],
        }
    }

    pub fn from_edges(vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::new(vertices);
        for (a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn add_edge(&mut self, from: usize, to: usize) {
        if !self.adj[from].contains(&to) {
            self.adj[from].push(to);
            self.adj[from].sort_unstable();
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Host graph restricted to declared hosts; arcs into `h0` are dropped
    /// since the environment is a sink and sits on no cycle.
    pub fn host_graph<C: Count>(m: &VirusMachine<C>) -> Self {
        let mut g = Self::new(m.hosts.len());
        for c in &m.channels {
            if let (Some(a), Endpoint::Host(t)) = (m.host_index(c.source.as_str()), &c.target) {
                if let Some(b) = m.host_index(t.as_str()) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    pub fn instruction_graph<C: Count>(m: &VirusMachine<C>) -> Self {
        let mut g = Self::new(m.instructions.len());
        for e in &m.instruction_edges {
            if let (Some(a), Some(b)) = (m.instruction_index(e.source.as_str()), m.instruction_index(e.target.as_str())) {
                g.add_edge(a, b);
            }
        }
        g
    }

    /// Vertices reachable from `root`, including it, as a membership mask.
    pub fn reachable_from(&self, root: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Kahn's algorithm; `None` when the graph has a cycle (self-loops included).
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.adj.len();
        let mut indeg = vec![0usize; n];
        for targets in &self.adj {
            for &t in targets {
                indeg[t] += 1;
            }
        }
        let mut ready: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_front() {
            order.push(v);
            for &t in &self.adj[v] {
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    ready.push_back(t);
                }
            }
        }
        (order.len() == n).then_some(order)
    }
}

/// Length, in vertices, of the longest simple cycle (a self-loop counts 1).
///
/// Exhaustive backtracking: each cycle is found from its smallest vertex, so
/// the search is exponential in the worst case. Refuses graphs above `cap`.
pub fn longest_simple_cycle(g: &Digraph, cap: usize) -> Result<usize, AnalysisError> {
    let n = g.vertex_count();
    if n > cap {
        return Err(AnalysisError::VertexCapExceeded { vertices: n, cap });
    }
    let mut best = 0;
    let mut on_path = vec![false; n];
    for start in 0..n {
        on_path[start] = true;
        extend(g, start, start, 1, &mut on_path, &mut best);
        on_path[start] = false;
    }
    Ok(best)
}

fn extend(g: &Digraph, start: usize, v: usize, len: usize, on_path: &mut [bool], best: &mut usize) {
    for &w in g.neighbors(v) {
        if w == start {
            *best = (*best).max(len);
        } else if w > start && !on_path[w] {
            on_path[w] = true;
            extend(g, start, w, len + 1, on_path, best);
            on_path[w] = false;
        }
    }
}

/// Edges on the longest path from `root` in an acyclic graph.
pub fn tree_depth(g: &Digraph, root: usize) -> Result<usize, AnalysisError> {
    let order = g.topological_order().ok_or(AnalysisError::Cyclic)?;
    let mut depth: Vec<Option<usize>> = vec![None; g.vertex_count()];
    depth[root] = Some(0);
    let mut best = 0;
    for v in order {
        let Some(d) = depth[v] else { continue };
        best = best.max(d);
        for &w in g.neighbors(v) {
            depth[w] = Some(depth[w].map_or(d + 1, |x| x.max(d + 1)));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_with_tail() {
        // i1 -> i2 -> i3 -> i1, i3 -> i4
        let g = Digraph::from_edges(4, [(0, 1), (1, 2), (2, 0), (2, 3)]);
        assert_eq!(longest_simple_cycle(&g, 64).unwrap(), 3);
        assert!(g.topological_order().is_none());
    }

    #[test]
    fn self_loop_counts_one() {
        let g = Digraph::from_edges(2, [(0, 0), (0, 1)]);
        assert_eq!(longest_simple_cycle(&g, 64).unwrap(), 1);
    }

    #[test]
    fn trees_have_no_cycles() {
        let g = Digraph::from_edges(5, [(0, 1), (0, 2), (2, 3), (1, 3), (3, 4)]);
        assert_eq!(longest_simple_cycle(&g, 64).unwrap(), 0);
        assert!(g.topological_order().is_some());
    }

    #[test]
    fn longest_not_first_cycle() {
        // short 2-cycle 0<->1 and 4-cycle 0->2->3->4->0
        let g = Digraph::from_edges(5, [(0, 1), (1, 0), (0, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(longest_simple_cycle(&g, 64).unwrap(), 4);
    }

    #[test]
    fn vertex_cap_refuses() {
        let g = Digraph::new(10);
        assert_eq!(
            longest_simple_cycle(&g, 4),
            Err(AnalysisError::VertexCapExceeded { vertices: 10, cap: 4 })
        );
    }

    #[test]
    fn chain_depth() {
        let g = Digraph::from_edges(4, [(0, 1), (1, 2), (2, 3)]);
        assert_eq!(tree_depth(&g, 0).unwrap(), 3);
        assert_eq!(tree_depth(&g, 2).unwrap(), 1);
    }

    #[test]
    fn single_vertex_depth_zero() {
        assert_eq!(tree_depth(&Digraph::new(1), 0).unwrap(), 0);
    }

    #[test]
    fn cyclic_depth_refused() {
        let g = Digraph::from_edges(2, [(0, 1), (1, 0)]);
        assert_eq!(tree_depth(&g, 0), Err(AnalysisError::Cyclic));
    }

    #[test]
    fn depth_uses_longest_branch() {
        let g = Digraph::from_edges(5, [(0, 4), (0, 1), (1, 2), (2, 4)]);
        assert_eq!(tree_depth(&g, 0).unwrap(), 3);
    }
}
