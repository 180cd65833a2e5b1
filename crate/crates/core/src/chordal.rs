//! Perfect elimination orderings via Lex-BFS, and hole extraction when the
//! graph is not chordal.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChordalError {
    #[error("ordering is not a permutation of the vertex set")]
    NotAPermutation,
}

/// Perfect elimination ordering: `order[i]` is simplicial among `order[i..]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Peo {
    pub order: Vec<usize>,
}

/// An induced cycle of length at least four, listed in cyclic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hole {
    pub cycle: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PeoOrHole {
    Peo(Peo),
    Hole(Hole),
}

/// A vertex with two non-adjacent later neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeoViolation {
    pub vertex: usize,
    pub a: usize,
    pub b: usize,
}

/// Lex-BFS visit order; ties inside the active block go to the lowest id.
pub fn lex_bfs_order(g: &Graph) -> Vec<usize> {
    struct Block {
        members: BTreeSet<usize>,
        prev: Option<usize>,
        next: Option<usize>,
    }
    let n = g.n();
    if n == 0 {
        return Vec::new();
    }
    let mut blocks = vec![Block {
        members: (0..n).collect(),
        prev: None,
        next: None,
    }];
    let mut head = Some(0usize);
    let mut block_of = vec![0usize; n];
    let mut visited = vec![false; n];
    let mut split_into: Vec<Option<usize>> = vec![None];
    let mut order = Vec::with_capacity(n);

    while order.len() < n {
        while let Some(h) = head {
            if blocks[h].members.is_empty() {
                head = blocks[h].next;
                if let Some(nx) = head {
                    blocks[nx].prev = None;
                }
            } else {
                break;
            }
        }
        let h = head.expect("unvisited vertices remain");
        let v = *blocks[h].members.iter().next().unwrap();
        blocks[h].members.remove(&v);
        visited[v] = true;
        order.push(v);

        let mut touched = Vec::new();
        for &w in g.neighbors(v) {
            if visited[w] {
                continue;
            }
            let b = block_of[w];
            let target = match split_into[b] {
                Some(t) => t,
                None => {
                    let t = blocks.len();
                    let prev = blocks[b].prev;
                    blocks.push(Block {
                        members: BTreeSet::new(),
                        prev,
                        next: Some(b),
                    });
                    split_into.push(None);
                    match prev {
                        Some(p) => blocks[p].next = Some(t),
                        None => head = Some(t),
                    }
                    blocks[b].prev = Some(t);
                    split_into[b] = Some(t);
                    touched.push(b);
                    t
                }
            };
            blocks[b].members.remove(&w);
            blocks[target].members.insert(w);
            block_of[w] = target;
        }
        for b in touched {
            split_into[b] = None;
        }
    }
    order
}

/// Returns a perfect elimination ordering when `g` is chordal, otherwise a hole.
pub fn lex_bfs_peo_or_hole(g: &Graph) -> PeoOrHole {
    let mut order = lex_bfs_order(g);
    order.reverse();
    match verify_peo(g, &order).expect("Lex-BFS yields a permutation") {
        None => PeoOrHole::Peo(Peo { order }),
        Some(violation) => {
            let cycle = hole_through(g, violation)
                .or_else(|| any_hole(g))
                .expect("a PEO violation implies a hole");
            PeoOrHole::Hole(Hole { cycle })
        }
    }
}

/// Checks the ordering. For each vertex the earliest later neighbor must be
/// adjacent to all its other later neighbors; the first failure is reported.
pub fn verify_peo(g: &Graph, order: &[usize]) -> Result<Option<PeoViolation>, ChordalError> {
    let n = g.n();
    if order.len() != n {
        return Err(ChordalError::NotAPermutation);
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return Err(ChordalError::NotAPermutation);
        }
        pos[v] = i;
    }
    for (i, &v) in order.iter().enumerate() {
        let later: Vec<usize> = g.neighbors(v).iter().copied().filter(|&w| pos[w] > i).collect();
        let Some(&parent) = later.iter().min_by_key(|&&w| pos[w]) else {
            continue;
        };
        if let Some(&x) = later.iter().find(|&&x| x != parent && !g.has_edge(parent, x)) {
            return Ok(Some(PeoViolation {
                vertex: v,
                a: parent.min(x),
                b: parent.max(x),
            }));
        }
    }
    Ok(None)
}

/// Closes a shortest `a`-`b` path avoiding the rest of `N[v]` into a hole.
fn hole_through(g: &Graph, PeoViolation { vertex: v, a, b }: PeoViolation) -> Option<Vec<usize>> {
    let n = g.n();
    let mut blocked = vec![false; n];
    blocked[v] = true;
    for &w in g.neighbors(v) {
        blocked[w] = true;
    }
    blocked[a] = false;
    blocked[b] = false;
    let mut parent = vec![usize::MAX; n];
    parent[a] = a;
    let mut queue = std::collections::VecDeque::from([a]);
    while let Some(u) = queue.pop_front() {
        if u == b {
            break;
        }
        for &w in g.neighbors(u) {
            if !blocked[w] && parent[w] == usize::MAX {
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }
    if parent[b] == usize::MAX {
        return None;
    }
    let mut cycle = vec![v];
    let mut cur = b;
    let mut path = vec![b];
    while cur != a {
        cur = parent[cur];
        path.push(cur);
    }
    path.reverse();
    cycle.extend(path);
    Some(cycle)
}

/// Exhaustive fallback: every hole passes through some vertex with two
/// non-adjacent neighbors joined outside its closed neighborhood.
fn any_hole(g: &Graph) -> Option<Vec<usize>> {
    for v in 0..g.n() {
        let nb = g.neighbors(v);
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                if !g.has_edge(a, b) {
                    if let Some(c) = hole_through(g, PeoViolation { vertex: v, a, b }) {
                        return Some(c);
                    }
                }
            }
        }
    }
    None
}

/// True when `cycle` lists an induced cycle of length at least four.
pub fn is_hole(g: &Graph, cycle: &[usize]) -> bool {
    let k = cycle.len();
    if k < 4 || cycle.iter().any(|&v| v >= g.n()) {
        return false;
    }
    let mut sorted = cycle.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    for i in 0..k {
        for j in i + 1..k {
            let consecutive = j == i + 1 || (i == 0 && j == k - 1);
            if g.has_edge(cycle[i], cycle[j]) != consecutive {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn complete_graph_any_order() {
        let k4 = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert!(matches!(lex_bfs_peo_or_hole(&k4), PeoOrHole::Peo(_)));
        assert_eq!(verify_peo(&k4, &[3, 1, 0, 2]).unwrap(), None);
    }

    #[test]
    fn c4_is_its_own_hole() {
        let c4 = graph(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]);
        match lex_bfs_peo_or_hole(&c4) {
            PeoOrHole::Hole(h) => {
                assert!(is_hole(&c4, &h.cycle));
                assert_eq!(h.cycle.len(), 4);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            verify_peo(&c4, &[0, 1, 2, 3]).unwrap(),
            Some(PeoViolation { vertex: 0, a: 1, b: 3 })
        );
    }

    #[test]
    fn chorded_c6_gives_four_hole() {
        let g = graph(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (0, 3)]);
        let PeoOrHole::Hole(h) = lex_bfs_peo_or_hole(&g) else {
            panic!("not chordal")
        };
        let mut set = h.cycle.clone();
        set.sort_unstable();
        assert!(set == vec![0, 1, 2, 3] || set == vec![0, 3, 4, 5], "{set:?}");
    }

    #[test]
    fn p5_ordering() {
        let p5 = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert_eq!(verify_peo(&p5, &[0, 4, 1, 3, 2]).unwrap(), None);
        assert_eq!(verify_peo(&p5, &[0, 1]), Err(ChordalError::NotAPermutation));
        assert_eq!(verify_peo(&p5, &[0, 0, 1, 2, 3]), Err(ChordalError::NotAPermutation));
    }

    #[test]
    fn lex_bfs_prefers_low_ids() {
        let p3 = graph(3, &[(0, 1), (1, 2)]);
        assert_eq!(lex_bfs_order(&p3), vec![0, 1, 2]);
        let star = graph(4, &[(2, 0), (2, 1), (2, 3)]);
        assert_eq!(lex_bfs_order(&star), vec![0, 2, 1, 3]);
    }
}
