//! Simple undirected graphs on dense vertex ids `0..n`.
//!
//! Adjacency is kept as sorted neighbor lists. Small graphs additionally get a
//! lazily built bit matrix so that `has_edge` is a single word probe.

use std::fmt::Write as _;
use std::sync::OnceLock;

use thiserror::Error;

/// A sorted, duplicate-free list of vertex ids.
pub type VertexSet = Vec<usize>;

/// Largest vertex count for which the dense adjacency matrix is materialized.
const DENSE_LIMIT: usize = 4096;

/// Largest pattern accepted by [`Graph::isomorphic_to_pattern`].
pub const PATTERN_CAP: usize = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("vertex {0} out of range")]
    OutOfRange(usize),
    #[error("pattern has {0} vertices, cap is {PATTERN_CAP}")]
    PatternTooLarge(usize),
}

fn parse_err(line: usize, reason: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        reason: reason.into(),
    }
}

/// Input encodings understood by [`parse_graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    EdgeList,
    Graph6,
}

#[derive(Debug, Default)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
    dense: OnceLock<Option<Vec<u64>>>,
}

impl Clone for Graph {
    fn clone(&self) -> Self {
        Graph {
            adj: self.adj.clone(),
            m: self.m,
            dense: OnceLock::new(),
        }
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.adj == other.adj
    }
}

impl Eq for Graph {}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            m: 0,
            dense: OnceLock::new(),
        }
    }

    /// Builds a graph from an edge list. Self-loops, duplicates and
    /// out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= n {
                return Err(GraphError::OutOfRange(u));
            }
            if v >= n {
                return Err(GraphError::OutOfRange(v));
            }
            if u == v {
                return Err(parse_err(i + 1, format!("self-loop at {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (v, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(parse_err(0, format!("duplicate edge {} {}", v.min(w[0]), v.max(w[0]))));
            }
        }
        Ok(Self::from_sorted_adjacency(adj))
    }

    /// Builds a graph from an edge list, silently dropping loops and repeats.
    pub fn from_edges_lossy(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        Self::from_sorted_adjacency(adj)
    }

    fn from_sorted_adjacency(adj: Vec<Vec<usize>>) -> Self {
        let m = adj.iter().map(Vec::len).sum::<usize>() / 2;
        Graph {
            adj,
            m,
            dense: OnceLock::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    fn dense(&self) -> Option<&Vec<u64>> {
        self.dense
            .get_or_init(|| {
                let n = self.n();
                if n > DENSE_LIMIT || n == 0 {
                    return None;
                }
                let words = n.div_ceil(64);
                let mut rows = vec![0u64; n * words];
                for (u, list) in self.adj.iter().enumerate() {
                    for &v in list {
                        rows[u * words + v / 64] |= 1 << (v % 64);
                    }
                }
                Some(rows)
            })
            .as_ref()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if let Some(rows) = self.dense() {
            let words = self.n().div_ceil(64);
            return rows[u * words + v / 64] >> (v % 64) & 1 == 1;
        }
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a].binary_search(&b).is_ok()
    }

    /// All edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    fn check_range(&self, s: &[usize]) -> Result<(), GraphError> {
        match s.iter().find(|&&v| v >= self.n()) {
            Some(&v) => Err(GraphError::OutOfRange(v)),
            None => Ok(()),
        }
    }

    /// Subgraph induced by `s`. New vertex `i` is the `i`-th smallest member of
    /// `s`; the returned vector lists the old ids in that order, so the
    /// old-to-new map is a binary search into it.
    pub fn induced_subgraph(&self, s: &[usize]) -> Result<(Graph, Vec<usize>), GraphError> {
        self.check_range(s)?;
        let mut keep: Vec<usize> = s.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut adj = Vec::with_capacity(keep.len());
        for &u in &keep {
            let mut list = Vec::new();
            if self.degree(u) < keep.len() {
                for &w in self.neighbors(u) {
                    if let Ok(j) = keep.binary_search(&w) {
                        list.push(j);
                    }
                }
            } else {
                for (j, &w) in keep.iter().enumerate() {
                    if self.has_edge(u, w) {
                        list.push(j);
                    }
                }
            }
            adj.push(list);
        }
        Ok((Self::from_sorted_adjacency(adj), keep))
    }

    pub fn is_clique(&self, s: &[usize]) -> Result<bool, GraphError> {
        self.check_range(s)?;
        for (i, &u) in s.iter().enumerate() {
            for &v in &s[i + 1..] {
                if u != v && !self.has_edge(u, v) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Components in order of their smallest vertex; each component sorted.
    pub fn connected_components(&self) -> Vec<VertexSet> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut comp = vec![root];
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for &w in self.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Finds an isomorphism from `g[s]` onto `pattern`. On success the result
    /// maps each pattern vertex `p` to the host vertex `result[p]`.
    pub fn isomorphic_to_pattern(
        &self,
        s: &[usize],
        pattern: &Graph,
    ) -> Result<Option<Vec<usize>>, GraphError> {
        let p = pattern.n();
        if p > PATTERN_CAP {
            return Err(GraphError::PatternTooLarge(p));
        }
        self.check_range(s)?;
        if s.len() != p {
            return Ok(None);
        }
        let host: Vec<u32> = s
            .iter()
            .map(|&u| {
                s.iter()
                    .enumerate()
                    .filter(|&(_, &w)| w != u && self.has_edge(u, w))
                    .fold(0u32, |acc, (j, _)| acc | 1 << j)
            })
            .collect();
        let pat: Vec<u32> = (0..p)
            .map(|u| pattern.neighbors(u).iter().fold(0u32, |acc, &w| acc | 1 << w))
            .collect();
        let edges_host: u32 = host.iter().map(|x| x.count_ones()).sum();
        let edges_pat: u32 = pat.iter().map(|x| x.count_ones()).sum();
        if edges_host != edges_pat {
            return Ok(None);
        }
        let mut dh: Vec<u32> = host.iter().map(|x| x.count_ones()).collect();
        let mut dp: Vec<u32> = pat.iter().map(|x| x.count_ones()).collect();
        dh.sort_unstable();
        dp.sort_unstable();
        if dh != dp {
            return Ok(None);
        }
        let order = search_order(&pat);
        let mut image = vec![usize::MAX; p];
        let mut used = 0u32;
        if iso_extend(&host, &pat, &order, 0, &mut image, &mut used) {
            Ok(Some(image.into_iter().map(|j| s[j]).collect()))
        } else {
            Ok(None)
        }
    }
}

/// Pattern vertices in BFS order from a maximum-degree vertex, so each vertex
/// after the first of its component has an already placed neighbor.
fn search_order(pat: &[u32]) -> Vec<usize> {
    let p = pat.len();
    let mut order = Vec::with_capacity(p);
    let mut placed = 0u32;
    while order.len() < p {
        let start = (0..p)
            .filter(|&u| placed >> u & 1 == 0)
            .max_by_key(|&u| (pat[u].count_ones(), std::cmp::Reverse(u)))
            .unwrap();
        placed |= 1 << start;
        let mut head = order.len();
        order.push(start);
        while head < order.len() {
            let u = order[head];
            head += 1;
            let mut fresh = pat[u] & !placed;
            while fresh != 0 {
                let w = fresh.trailing_zeros() as usize;
                fresh &= fresh - 1;
                placed |= 1 << w;
                order.push(w);
            }
        }
    }
    order
}

fn iso_extend(
    host: &[u32],
    pat: &[u32],
    order: &[usize],
    depth: usize,
    image: &mut [usize],
    used: &mut u32,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let pv = order[depth];
    for h in 0..host.len() {
        if *used >> h & 1 == 1 || host[h].count_ones() != pat[pv].count_ones() {
            continue;
        }
        let consistent = order[..depth].iter().all(|&q| {
            let hq = image[q];
            (pat[pv] >> q & 1 == 1) == (host[h] >> hq & 1 == 1)
        });
        if !consistent {
            continue;
        }
        image[pv] = h;
        *used |= 1 << h;
        if iso_extend(host, pat, order, depth + 1, image, used) {
            return true;
        }
        *used &= !(1 << h);
        image[pv] = usize::MAX;
    }
    false
}

/// Parses a graph in the given format.
pub fn parse_graph(text: &[u8], format: GraphFormat) -> Result<Graph, GraphError> {
    match format {
        GraphFormat::EdgeList => parse_edge_list(text),
        GraphFormat::Graph6 => parse_graph6(text),
    }
}

/// Guesses the format: anything whose first significant line starts with `p`
/// or `c` is an edge list, everything else graph6.
pub fn sniff_format(text: &[u8]) -> GraphFormat {
    let first = text
        .split(|&b| b == b'\n')
        .map(|l| l.trim_ascii())
        .find(|l| !l.is_empty());
    match first {
        Some(l) if l.starts_with(b"p ") || l.starts_with(b"c") || l.starts_with(b"e ") => {
            GraphFormat::EdgeList
        }
        _ => GraphFormat::Graph6,
    }
}

fn parse_usize(tok: Option<&str>, line: usize, what: &str) -> Result<usize, GraphError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, format!("bad {what} `{tok}`")))
}

fn parse_edge_list(text: &[u8]) -> Result<Graph, GraphError> {
    let text = std::str::from_utf8(text).map_err(|_| parse_err(0, "input is not ASCII"))?;
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.is_empty() || body == "c" || body.starts_with("c ") {
            continue;
        }
        let mut toks = body.split_ascii_whitespace();
        match toks.next() {
            Some("p") => {
                if header.is_some() {
                    return Err(parse_err(line, "second header"));
                }
                if toks.next() != Some("graph") {
                    return Err(parse_err(line, "expected `p graph <n> <m>`"));
                }
                let n = parse_usize(toks.next(), line, "vertex count")?;
                let m = parse_usize(toks.next(), line, "edge count")?;
                header = Some((n, m));
            }
            Some("e") => {
                let (n, _) = header.ok_or_else(|| parse_err(line, "edge before header"))?;
                let u = parse_usize(toks.next(), line, "endpoint")?;
                let v = parse_usize(toks.next(), line, "endpoint")?;
                if u >= n || v >= n {
                    return Err(parse_err(line, format!("endpoint out of range 0..{n}")));
                }
                if u == v {
                    return Err(parse_err(line, format!("self-loop at {u}")));
                }
                edges.push((u.min(v), u.max(v), line));
            }
            Some(tok) => return Err(parse_err(line, format!("unknown line type `{tok}`"))),
            None => unreachable!(),
        }
        if toks.next().is_some() {
            return Err(parse_err(line, "trailing tokens"));
        }
    }
    let (n, m) = header.ok_or_else(|| parse_err(0, "missing `p graph` header"))?;
    if edges.len() != m {
        return Err(parse_err(
            0,
            format!("header promises {m} edges, found {}", edges.len()),
        ));
    }
    let mut sorted = edges.clone();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0].0 == w[1].0 && w[0].1 == w[1].1) {
        return Err(parse_err(w[1].2, format!("duplicate edge {} {}", w[1].0, w[1].1)));
    }
    Graph::from_edges(n, &edges.iter().map(|&(u, v, _)| (u, v)).collect::<Vec<_>>())
}

fn parse_graph6(text: &[u8]) -> Result<Graph, GraphError> {
    let mut data = text.trim_ascii();
    if let Some(rest) = data.strip_prefix(b">>graph6<<") {
        data = rest;
    }
    if let Some(pos) = data.iter().position(|&b| b == b'\n') {
        data = &data[..pos];
    }
    if data.iter().any(|&b| !(63..=126).contains(&b)) {
        return Err(parse_err(1, "graph6 byte outside 63..=126"));
    }
    let (n, body) = match data {
        [] => return Err(parse_err(1, "empty graph6 string")),
        [126, 126, rest @ ..] => {
            if rest.len() < 6 {
                return Err(parse_err(1, "truncated graph6 size"));
            }
            let n = rest[..6].iter().fold(0usize, |acc, &b| acc << 6 | (b - 63) as usize);
            (n, &rest[6..])
        }
        [126, rest @ ..] => {
            if rest.len() < 3 {
                return Err(parse_err(1, "truncated graph6 size"));
            }
            let n = rest[..3].iter().fold(0usize, |acc, &b| acc << 6 | (b - 63) as usize);
            (n, &rest[3..])
        }
        [b, rest @ ..] => ((b - 63) as usize, rest),
    };
    let bits_needed = n * n.saturating_sub(1) / 2;
    if body.len() != bits_needed.div_ceil(6) {
        return Err(parse_err(1, "graph6 body has the wrong length"));
    }
    let bit = |k: usize| (body[k / 6] - 63) >> (5 - k % 6) & 1 == 1;
    let mut edges = Vec::new();
    let mut k = 0;
    for v in 1..n {
        for u in 0..v {
            if bit(k) {
                edges.push((u, v));
            }
            k += 1;
        }
    }
    Graph::from_edges(n, &edges)
}

/// Canonical edge-list serialization: header, then edges `u < v` in
/// lexicographic order, LF-terminated.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "p graph {} {}", g.n(), g.m()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "e {u} {v}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> Graph {
        parse_graph(b"p graph 3 3\ne 0 1\ne 1 2\ne 0 2\n", GraphFormat::EdgeList).unwrap()
    }

    fn c4() -> Graph {
        parse_graph(b"p graph 4 4\ne 0 1\ne 1 2\ne 2 3\ne 0 3\n", GraphFormat::EdgeList).unwrap()
    }

    #[test]
    fn parses_small_graphs() {
        let g = k3();
        assert_eq!((g.n(), g.m()), (3, 3));
        assert!(g.has_edge(2, 0));
        let c = c4();
        assert!(!c.has_edge(0, 2));
        assert_eq!(c.neighbors(0), &[1, 3]);
    }

    #[test]
    fn rejects_malformed_input() {
        let err = parse_graph(b"p graph 2 1\ne 0 0\n", GraphFormat::EdgeList).unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }), "{err}");
        let dup = parse_graph(b"p graph 2 2\ne 0 1\ne 1 0\n", GraphFormat::EdgeList);
        assert!(matches!(dup, Err(GraphError::Parse { line: 3, .. })));
        assert!(parse_graph(b"p graph 2 2\ne 0 1\n", GraphFormat::EdgeList).is_err());
        assert!(parse_graph(b"e 0 1\n", GraphFormat::EdgeList).is_err());
        assert!(parse_graph(b"p graph 2 1\ne 0 5\n", GraphFormat::EdgeList).is_err());
        assert!(parse_graph(b"p graph 2 1\nx 0 1\n", GraphFormat::EdgeList).is_err());
    }

    #[test]
    fn comments_are_skipped() {
        let g = parse_graph(b"c hello\np graph 2 1\nc mid\ne 0 1\n", GraphFormat::EdgeList).unwrap();
        assert_eq!(g.m(), 1);
    }

    #[test]
    fn graph6_decodes() {
        let k3 = parse_graph(b"Bw", GraphFormat::Graph6).unwrap();
        assert_eq!(k3, k3_from_edges());
        let c4 = parse_graph(b"Cl", GraphFormat::Graph6).unwrap();
        assert_eq!(c4.m(), 4);
        assert!(c4.edges().all(|(u, v)| c4.degree(u) == 2 && c4.degree(v) == 2));
        assert!(parse_graph(b"C", GraphFormat::Graph6).is_err());
    }

    fn k3_from_edges() -> Graph {
        Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    #[test]
    fn induced_subgraph_of_c4_is_p3() {
        let (p3, map) = c4().induced_subgraph(&[0, 1, 2]).unwrap();
        assert_eq!(map, vec![0, 1, 2]);
        assert_eq!(p3.m(), 2);
        assert!(!p3.has_edge(0, 2));
        assert_eq!(c4().induced_subgraph(&[7]).unwrap_err(), GraphError::OutOfRange(7));
    }

    #[test]
    fn cliques() {
        assert!(k3().is_clique(&[0, 1, 2]).unwrap());
        assert!(!c4().is_clique(&[0, 1, 2]).unwrap());
        assert!(c4().is_clique(&[]).unwrap());
        assert!(c4().is_clique(&[9]).is_err());
    }

    #[test]
    fn components() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(g.connected_components(), vec![vec![0, 1, 2], vec![3, 4, 5]]);
        assert_eq!(c4().connected_components().len(), 1);
        assert_eq!(Graph::empty(3).connected_components().len(), 3);
    }

    #[test]
    fn pattern_matching() {
        let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(c4().isomorphic_to_pattern(&[0, 1, 2, 3], &k4).unwrap(), None);
        let c5 = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let relabeled = Graph::from_edges(5, &[(0, 2), (2, 4), (4, 1), (1, 3), (3, 0)]).unwrap();
        let map = c5.isomorphic_to_pattern(&[0, 1, 2, 3, 4], &relabeled).unwrap().unwrap();
        for (a, b) in relabeled.edges() {
            assert!(c5.has_edge(map[a], map[b]));
        }
        let big = Graph::empty(33);
        assert!(matches!(
            big.isomorphic_to_pattern(&(0..33).collect::<Vec<_>>(), &big),
            Err(GraphError::PatternTooLarge(33))
        ));
    }

    #[test]
    fn round_trip() {
        let g = Graph::from_edges(5, &[(3, 1), (0, 4), (2, 3)]).unwrap();
        let text = write_edge_list(&g);
        assert_eq!(text, "p graph 5 3\ne 0 4\ne 1 3\ne 2 3\n");
        assert_eq!(parse_graph(text.as_bytes(), GraphFormat::EdgeList).unwrap(), g);
    }
}
