//! Graph inputs as adjacency-matrix words, plus the checkers used to certify
//! the graph constructions.

use std::collections::VecDeque;

use crate::function::InputWord;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    /// Undirected graph on `n` vertices, one position per unordered pair.
    General,
    /// Bipartite graph with `n` left and `n` right vertices.
    Bipartite,
}

/// Index map between edges and 0-based input positions.
///
/// General: edge `(a, b)`, `a < b`, sits at `b(b-1)/2 + a`. Bipartite: left
/// `i`, right `j` sits at `i n + j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphEncoding {
    pub n_vertices: usize,
    pub kind: GraphKind,
}

impl GraphEncoding {
    pub fn general(n_vertices: usize) -> Self {
        GraphEncoding {
            n_vertices,
            kind: GraphKind::General,
        }
    }

    pub fn bipartite(n_vertices: usize) -> Self {
        GraphEncoding {
            n_vertices,
            kind: GraphKind::Bipartite,
        }
    }

    pub fn n_positions(&self) -> usize {
        let n = self.n_vertices;
        match self.kind {
            GraphKind::General => n * n.saturating_sub(1) / 2,
            GraphKind::Bipartite => n * n,
        }
    }

    /// Position of an edge. General edges may be given in either order.
    pub fn position(&self, a: usize, b: usize) -> Result<usize> {
        let n = self.n_vertices;
        if a >= n || b >= n {
            return Err(Error::InvalidParameter(format!(
                "edge ({a}, {b}) outside {n} vertices"
            )));
        }
        match self.kind {
            GraphKind::General => {
                let (a, b) = if a < b { (a, b) } else { (b, a) };
                if a == b {
                    return Err(Error::InvalidParameter(format!("self-loop at {a}")));
                }
                Ok(b * (b - 1) / 2 + a)
            }
            GraphKind::Bipartite => Ok(a * n + b),
        }
    }

    pub fn edge(&self, position: usize) -> Result<(usize, usize)> {
        if position >= self.n_positions() {
            return Err(Error::InvalidParameter(format!(
                "position {} out of range",
                position + 1
            )));
        }
        Ok(match self.kind {
            GraphKind::General => {
                let mut b = 1;
                while (b + 1) * b / 2 <= position {
                    b += 1;
                }
                (position - b * (b - 1) / 2, b)
            }
            GraphKind::Bipartite => (position / self.n_vertices, position % self.n_vertices),
        })
    }

    pub fn word(&self, edges: &[(usize, usize)]) -> Result<InputWord> {
        let mut bits = vec![0u32; self.n_positions()];
        for &(a, b) in edges {
            bits[self.position(a, b)?] = 1;
        }
        Ok(InputWord::new(bits))
    }

    pub fn edges(&self, word: &InputWord) -> Result<Vec<(usize, usize)>> {
        if word.len() != self.n_positions() {
            return Err(Error::WordLength {
                expected: self.n_positions(),
                got: word.len(),
            });
        }
        (0..word.len())
            .filter(|&p| word.symbols()[p] != 0)
            .map(|p| self.edge(p))
            .collect()
    }
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    adj
}

/// Two-colorability by breadth-first search.
pub fn is_bipartite(n: usize, edges: &[(usize, usize)]) -> bool {
    let adj = adjacency(n, edges);
    let mut color = vec![u8::MAX; n];
    for s in 0..n {
        if color[s] != u8::MAX {
            continue;
        }
        color[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if color[w] == u8::MAX {
                    color[w] = 1 - color[v];
                    queue.push_back(w);
                } else if color[w] == color[v] {
                    return false;
                }
            }
        }
    }
    true
}

/// Maximum matching size of a bipartite graph by augmenting paths. Edges
/// are `(left, right)`.
pub fn max_bipartite_matching(n_left: usize, n_right: usize, edges: &[(usize, usize)]) -> usize {
    let mut adj = vec![Vec::new(); n_left];
    for &(l, r) in edges {
        adj[l].push(r);
    }
    let mut match_right = vec![usize::MAX; n_right];
    fn augment(v: usize, adj: &[Vec<usize>], seen: &mut [bool], match_right: &mut [usize]) -> bool {
        for &r in &adj[v] {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            if match_right[r] == usize::MAX || augment(match_right[r], adj, seen, match_right) {
                match_right[r] = v;
                return true;
            }
        }
        false
    }
    let mut size = 0;
    for v in 0..n_left {
        let mut seen = vec![false; n_right];
        if augment(v, &adj, &mut seen, &mut match_right) {
            size += 1;
        }
    }
    size
}

pub fn has_perfect_bipartite_matching(n: usize, edges: &[(usize, usize)]) -> bool {
    max_bipartite_matching(n, n, edges) == n
}

/// Perfect matching in a general graph by exhaustive search: the lowest
/// unmatched vertex is paired with each free neighbor in turn.
pub fn has_perfect_matching(n: usize, edges: &[(usize, usize)]) -> bool {
    if n % 2 == 1 {
        return false;
    }
    let adj = adjacency(n, edges);
    fn search(adj: &[Vec<usize>], matched: &mut [bool]) -> bool {
        let Some(v) = matched.iter().position(|m| !m) else {
            return true;
        };
        matched[v] = true;
        for &w in &adj[v] {
            if !matched[w] {
                matched[w] = true;
                if search(adj, matched) {
                    return true;
                }
                matched[w] = false;
            }
        }
        matched[v] = false;
        false
    }
    search(&adj, &mut vec![false; n])
}

/// A connected component of a graph with maximum degree 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strand {
    /// Vertices in walk order; for a cycle the closing edge joins the last
    /// vertex back to the first.
    pub vertices: Vec<usize>,
    pub is_cycle: bool,
}

/// Decompose a graph of maximum degree 2 into paths and cycles, or `None`
/// when some vertex has degree 3 or more. Isolated vertices are paths of
/// one vertex.
pub fn strands(n: usize, edges: &[(usize, usize)]) -> Option<Vec<Strand>> {
    let adj = adjacency(n, edges);
    if adj.iter().any(|a| a.len() > 2) {
        return None;
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let walk = |start: usize, seen: &mut Vec<bool>| {
        let mut vertices = vec![start];
        seen[start] = true;
        let mut prev = usize::MAX;
        let mut cur = start;
        loop {
            let next = adj[cur].iter().copied().find(|&w| w != prev && !seen[w]);
            match next {
                Some(w) => {
                    seen[w] = true;
                    vertices.push(w);
                    prev = cur;
                    cur = w;
                }
                None => break,
            }
        }
        vertices
    };
    // paths first, walked from their lower end
    for v in 0..n {
        if !seen[v] && adj[v].len() <= 1 {
            out.push(Strand {
                vertices: walk(v, &mut seen),
                is_cycle: false,
            });
        }
    }
    for v in 0..n {
        if !seen[v] {
            out.push(Strand {
                vertices: walk(v, &mut seen),
                is_cycle: true,
            });
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn general_index_map_is_a_bijection() {
        let enc = GraphEncoding::general(7);
        let mut seen = vec![false; enc.n_positions()];
        for b in 0..7 {
            for a in 0..b {
                let p = enc.position(a, b).unwrap();
                assert!(!seen[p]);
                seen[p] = true;
                assert_eq!(enc.edge(p).unwrap(), (a, b));
            }
        }
        assert!(seen.iter().all(|&s| s));
        assert_eq!(enc.position(0, 1).unwrap(), 0);
        assert_eq!(enc.position(2, 3).unwrap(), 5);
    }

    #[test]
    fn bipartite_index_map_is_a_bijection() {
        let enc = GraphEncoding::bipartite(5);
        for p in 0..25 {
            let (i, j) = enc.edge(p).unwrap();
            assert_eq!(enc.position(i, j).unwrap(), p);
        }
    }

    #[test]
    fn checkers_on_cycles() {
        let c5: Vec<_> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        let c6: Vec<_> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        assert!(!is_bipartite(5, &c5));
        assert!(is_bipartite(6, &c6));
        assert!(has_perfect_matching(6, &c6));
        let two_triangles = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)];
        assert!(!has_perfect_matching(6, &two_triangles));
        let s = strands(6, &c6).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s[0].is_cycle);
    }

    #[test]
    fn bipartite_matching_sizes() {
        // a path L0-R0-L1-R1 has a perfect matching; dropping L1-R1 leaves R1 bare
        assert!(has_perfect_bipartite_matching(2, &[(0, 0), (1, 0), (1, 1)]));
        assert!(!has_perfect_bipartite_matching(2, &[(0, 0), (1, 0)]));
        assert_eq!(max_bipartite_matching(3, 3, &[(0, 0), (1, 0), (2, 0)]), 1);
    }

    #[test]
    fn strands_of_paths() {
        let s = strands(5, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].vertices, vec![0, 1, 2]);
        assert_eq!(s[1].vertices, vec![3, 4]);
        assert!(strands(4, &[(0, 1), (0, 2), (0, 3)]).is_none());
    }
}
