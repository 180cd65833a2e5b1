//! The catalog of minimal forbidden induced subgraphs, certificate checking,
//! and a subset-enumeration search used as a test oracle.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, PATTERN_CAP};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ObstructionError {
    #[error("invalid obstruction parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Parse(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ObstructionKind {
    O1,
    O2,
    O3,
    O4,
    /// Two wings joined by a chain of `t` triangles; `s` selects the wing types.
    W { s: u8, t: usize },
    Hole { k: usize },
}

impl ObstructionKind {
    pub fn validate(self) -> Result<(), ObstructionError> {
        match self {
            ObstructionKind::W { s, .. } if !(1..=3).contains(&s) => {
                Err(ObstructionError::InvalidParameters(format!("wing type {s} not in 1..=3")))
            }
            ObstructionKind::Hole { k } if k < 4 => {
                Err(ObstructionError::InvalidParameters(format!("hole length {k} below 4")))
            }
            _ => Ok(()),
        }
    }

    pub fn vertex_count(self) -> usize {
        match self {
            ObstructionKind::O1 | ObstructionKind::O2 => 6,
            ObstructionKind::O3 => 7,
            ObstructionKind::O4 => 9,
            ObstructionKind::W { s, t } => wing_size(s, true) + 2 * t + wing_size(s, false),
            ObstructionKind::Hole { k } => k,
        }
    }
}

impl fmt::Display for ObstructionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ObstructionKind::O1 => f.write_str("O1"),
            ObstructionKind::O2 => f.write_str("O2"),
            ObstructionKind::O3 => f.write_str("O3"),
            ObstructionKind::O4 => f.write_str("O4"),
            ObstructionKind::W { s, t } => write!(f, "W {s} {t}"),
            ObstructionKind::Hole { k } => write!(f, "HOLE {k}"),
        }
    }
}

/// A kind plus host vertices listed in the pattern's canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionCertificate {
    pub kind: ObstructionKind,
    pub vertices: Vec<usize>,
}

const O1_EDGES: &[(usize, usize)] = &[(0, 1), (0, 2), (0, 3), (1, 3), (2, 3), (2, 4), (2, 5), (3, 5), (4, 5)];
const O2_EDGES: &[(usize, usize)] = &[(0, 1), (0, 2), (0, 3), (1, 3), (2, 3), (2, 4), (3, 4), (3, 5), (4, 5)];
const O3_EDGES: &[(usize, usize)] = &[
    (0, 1),
    (0, 3),
    (0, 4),
    (1, 2),
    (1, 3),
    (1, 4),
    (2, 3),
    (2, 4),
    (3, 4),
    (3, 5),
    (4, 5),
    (4, 6),
    (5, 6),
];
const O4_EDGES: &[(usize, usize)] = &[
    (0, 1),
    (0, 4),
    (0, 5),
    (1, 2),
    (1, 5),
    (1, 6),
    (1, 8),
    (2, 3),
    (2, 5),
    (2, 6),
    (2, 8),
    (3, 6),
    (3, 7),
    (4, 5),
    (5, 6),
    (5, 8),
    (6, 8),
    (6, 7),
];

/// Diamond wing a,b,c,d with its attachment at d (index 3).
const DIAMOND: &[(usize, usize)] = &[(0, 1), (0, 3), (1, 2), (1, 3), (2, 3)];
/// Six-vertex wing: K4 on a,b,c,d plus e,f hanging off b,c; attachment at d.
const SIX_WING: &[(usize, usize)] = &[
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 2),
    (1, 3),
    (2, 3),
    (1, 4),
    (2, 4),
    (2, 5),
    (4, 5),
];
/// Second-wing layouts relative to attachment r = index 0, followed by x,y,z[,v,w].
const DIAMOND_TAIL: &[(usize, usize)] = &[(0, 1), (1, 3), (0, 2), (0, 3), (2, 3)];
const SIX_TAIL: &[(usize, usize)] = &[
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 2),
    (1, 3),
    (2, 3),
    (2, 4),
    (2, 5),
    (3, 4),
    (4, 5),
];

fn first_wing(s: u8) -> &'static [(usize, usize)] {
    if s == 1 {
        DIAMOND
    } else {
        SIX_WING
    }
}

fn second_wing(s: u8) -> &'static [(usize, usize)] {
    if s == 3 {
        SIX_TAIL
    } else {
        DIAMOND_TAIL
    }
}

/// Vertices contributed by a wing; the second wing shares its attachment.
fn wing_size(s: u8, first: bool) -> usize {
    match (s, first) {
        (1, true) => 4,
        (_, true) => 6,
        (3, false) => 5,
        (_, false) => 3,
    }
}

const CUT: usize = 3;

/// Edge list of a catalog pattern in canonical vertex order.
pub fn pattern_edges(kind: ObstructionKind) -> Result<Vec<(usize, usize)>, ObstructionError> {
    kind.validate()?;
    Ok(match kind {
        ObstructionKind::O1 => O1_EDGES.to_vec(),
        ObstructionKind::O2 => O2_EDGES.to_vec(),
        ObstructionKind::O3 => O3_EDGES.to_vec(),
        ObstructionKind::O4 => O4_EDGES.to_vec(),
        ObstructionKind::Hole { k } => (0..k).map(|i| (i.min((i + 1) % k), i.max((i + 1) % k))).collect(),
        ObstructionKind::W { s, t } => {
            let head = wing_size(s, true);
            let mut edges = first_wing(s).to_vec();
            let mut prev = CUT;
            for j in 0..t {
                let top = head + 2 * j;
                let next = top + 1;
                edges.extend([(prev, top), (prev, next), (top, next)]);
                prev = next;
            }
            let base = head + 2 * t;
            let place = |p: usize| if p == 0 { prev } else { base + p - 1 };
            edges.extend(second_wing(s).iter().map(|&(a, b)| (place(a), place(b))));
            edges
        }
    })
}

/// Builds the catalog pattern with its canonical vertex order.
pub fn build_obstruction(kind: ObstructionKind) -> Result<Graph, ObstructionError> {
    let edges = pattern_edges(kind)?;
    Ok(Graph::from_edges(kind.vertex_count(), &edges)?)
}

/// True when the listed vertices induce exactly the pattern, read in order.
/// The comparison streams the pattern's edge list against the induced edges,
/// so long triangle chains are checked without building the pattern graph.
pub fn verify_obstruction_certificate(g: &Graph, cert: &ObstructionCertificate) -> bool {
    let Ok(edges) = pattern_edges(cert.kind) else {
        return false;
    };
    let k = cert.kind.vertex_count();
    if cert.vertices.len() != k {
        return false;
    }
    let mut pos = std::collections::HashMap::with_capacity(k);
    for (i, &v) in cert.vertices.iter().enumerate() {
        if v >= g.n() || pos.insert(v, i).is_some() {
            return false;
        }
    }
    let mut induced = 0usize;
    for &v in &cert.vertices {
        induced += g.neighbors(v).iter().filter(|w| pos.contains_key(w)).count();
    }
    if induced != 2 * edges.len() {
        return false;
    }
    edges.iter().all(|&(a, b)| g.has_edge(cert.vertices[a], cert.vertices[b]))
}

/// Biconnected blocks as vertex sets, via iterative Tarjan.
fn blocks(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut out = Vec::new();
    let mut timer = 0;
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        let mut stack = vec![(root, usize::MAX, 0usize)];
        while let Some(&mut (u, parent, ref mut idx)) = stack.last_mut() {
            if *idx < g.degree(u) {
                let w = g.neighbors(u)[*idx];
                *idx += 1;
                if w == parent {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    edge_stack.push((u, w));
                    stack.push((w, u, 0));
                } else if disc[w] < disc[u] {
                    low[u] = low[u].min(disc[w]);
                    edge_stack.push((u, w));
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[u]);
                    if low[u] >= disc[p] {
                        let mut block = Vec::new();
                        while let Some((a, b)) = edge_stack.pop() {
                            block.push(a);
                            block.push(b);
                            if (a, b) == (p, u) {
                                break;
                            }
                        }
                        block.sort_unstable();
                        block.dedup();
                        out.push(block);
                    }
                }
            }
        }
    }
    out
}

/// Maps `wing` onto a block of `h` so that the wing's attachment vertex lands
/// on `cut`. A pendant vertex glued to both attachments pins the map.
fn match_wing(h: &Graph, block: &[usize], cut: usize, wing: &[(usize, usize)], attach: usize) -> Option<Vec<usize>> {
    let size = block.len();
    let wing_n = wing.iter().map(|&(a, b)| a.max(b)).max()? + 1;
    if wing_n != size {
        return None;
    }
    let mut host_edges = Vec::new();
    let idx = |v: usize| block.binary_search(&v).ok();
    for &u in block {
        for &w in h.neighbors(u) {
            if let (Some(a), Some(b)) = (idx(u), idx(w)) {
                if a < b {
                    host_edges.push((a, b));
                }
            }
        }
    }
    host_edges.push((idx(cut)?, size));
    let host = Graph::from_edges(size + 1, &host_edges).ok()?;
    let mut pat_edges = wing.to_vec();
    pat_edges.push((attach, size));
    let pattern = Graph::from_edges(size + 1, &pat_edges).ok()?;
    let all: Vec<usize> = (0..=size).collect();
    let map = host.isomorphic_to_pattern(&all, &pattern).ok()??;
    Some(map[..size].iter().map(|&i| block[i]).collect())
}

/// Recognizes a two-winged triangle chain by its block structure and returns
/// its parameters and canonical vertex order.
pub fn classify_w(h: &Graph) -> Option<(ObstructionKind, Vec<usize>)> {
    let n = h.n();
    if n < 7 || n % 2 == 0 || h.connected_components().len() != 1 {
        return None;
    }
    let bl = blocks(h);
    if bl.len() < 2 {
        return None;
    }
    let mut count = vec![0usize; n];
    for b in &bl {
        for &v in b {
            count[v] += 1;
        }
    }
    if count.iter().any(|&c| c > 2) {
        return None;
    }
    let cuts_of = |b: &Vec<usize>| b.iter().copied().filter(|&v| count[v] == 2).collect::<Vec<_>>();
    let ends: Vec<usize> = (0..bl.len()).filter(|&i| cuts_of(&bl[i]).len() == 1).collect();
    if ends.len() != 2 {
        return None;
    }
    let wing_kind = |b: &Vec<usize>| match b.len() {
        4 => Some(1u8),
        6 => Some(2u8),
        _ => None,
    };
    let (mut e1, mut e2) = (ends[0], ends[1]);
    let (k1, k2) = (wing_kind(&bl[e1])?, wing_kind(&bl[e2])?);
    if k1 == 1 && k2 == 2 {
        std::mem::swap(&mut e1, &mut e2);
    }
    let s = match (k1.max(k2), k1.min(k2)) {
        (1, 1) => 1,
        (2, 1) => 2,
        _ => 3,
    };
    let cut1 = cuts_of(&bl[e1])[0];
    let mut order = match_wing(h, &bl[e1], cut1, first_wing(s), CUT)?;

    // Walk the chain of triangles from the first wing's attachment.
    let mut used = vec![false; bl.len()];
    used[e1] = true;
    let mut prev = cut1;
    let mut t = 0;
    loop {
        let next_block = (0..bl.len()).find(|&i| !used[i] && bl[i].binary_search(&prev).is_ok())?;
        used[next_block] = true;
        if next_block == e2 {
            break;
        }
        let tri = &bl[next_block];
        if tri.len() != 3 {
            return None;
        }
        let others: Vec<usize> = tri.iter().copied().filter(|&v| v != prev).collect();
        let (top, next) = match (count[others[0]], count[others[1]]) {
            (1, 2) => (others[0], others[1]),
            (2, 1) => (others[1], others[0]),
            _ => return None,
        };
        order.extend([top, next]);
        prev = next;
        t += 1;
    }
    if used.iter().any(|&u| !u) {
        return None;
    }
    let tail = match_wing(h, &bl[e2], prev, second_wing(s), 0)?;
    if tail[0] != prev {
        return None;
    }
    order.extend(&tail[1..]);
    let kind = ObstructionKind::W { s, t };
    let cert = ObstructionCertificate { kind, vertices: order };
    verify_obstruction_certificate(h, &cert).then_some((kind, cert.vertices))
}

/// Cyclic order of `h` if it is a single chordless cycle of length ≥ 4.
fn classify_hole(h: &Graph) -> Option<Vec<usize>> {
    let n = h.n();
    if n < 4 || (0..n).any(|v| h.degree(v) != 2) || h.connected_components().len() != 1 {
        return None;
    }
    let mut order = vec![0, h.neighbors(0)[0]];
    while order.len() < n {
        let cur = order[order.len() - 1];
        let back = order[order.len() - 2];
        let nx = h.neighbors(cur).iter().copied().find(|&w| w != back)?;
        order.push(nx);
    }
    Some(order)
}

const SMALL_KINDS: [ObstructionKind; 4] = [
    ObstructionKind::O1,
    ObstructionKind::O2,
    ObstructionKind::O3,
    ObstructionKind::O4,
];

/// Identifies a graph that is itself a catalog pattern, returning the kind and
/// the canonical order of its vertices.
pub fn classify(h: &Graph) -> Option<(ObstructionKind, Vec<usize>)> {
    if let Some(order) = classify_hole(h) {
        return Some((ObstructionKind::Hole { k: h.n() }, order));
    }
    let all: Vec<usize> = (0..h.n()).collect();
    for kind in SMALL_KINDS {
        if kind.vertex_count() != h.n() {
            continue;
        }
        let pattern = build_obstruction(kind).expect("catalog kinds are valid");
        if let Ok(Some(map)) = h.isomorphic_to_pattern(&all, &pattern) {
            return Some((kind, map));
        }
    }
    classify_w(h)
}

/// Kinds with exactly `size` vertices, in search order.
fn kinds_of_size(size: usize) -> Vec<ObstructionKind> {
    let mut kinds: Vec<ObstructionKind> = SMALL_KINDS.iter().copied().filter(|k| k.vertex_count() == size).collect();
    for s in 1..=3u8 {
        let base = wing_size(s, true) + wing_size(s, false);
        if size >= base && (size - base) % 2 == 0 {
            kinds.push(ObstructionKind::W { s, t: (size - base) / 2 });
        }
    }
    kinds
}

/// Tests one vertex subset against holes and then every kind of that size.
fn match_subset(g: &Graph, subset: &[usize], patterns: &[(ObstructionKind, Graph)]) -> Option<ObstructionCertificate> {
    let (h, _) = g.induced_subgraph(subset).ok()?;
    if let Some(order) = classify_hole(&h) {
        return Some(ObstructionCertificate {
            kind: ObstructionKind::Hole { k: subset.len() },
            vertices: order.iter().map(|&i| subset[i]).collect(),
        });
    }
    for (kind, pattern) in patterns {
        if let Ok(Some(map)) = g.isomorphic_to_pattern(subset, pattern) {
            return Some(ObstructionCertificate {
                kind: *kind,
                vertices: map,
            });
        }
    }
    None
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Exhaustive search over vertex subsets, smallest size first and
/// lexicographically within a size; holes are tried before the other kinds.
/// Returns the first certificate found, which makes the result deterministic.
pub fn brute_force_obstruction_search(g: &Graph, max_pattern_size: usize) -> Option<ObstructionCertificate> {
    const CHUNK: usize = 2048;
    let n = g.n();
    for size in 4..=max_pattern_size.min(n).min(PATTERN_CAP) {
        let patterns: Vec<(ObstructionKind, Graph)> = kinds_of_size(size)
            .into_iter()
            .map(|k| (k, build_obstruction(k).expect("catalog kinds are valid")))
            .collect();
        let mut comb: Vec<usize> = (0..size).collect();
        let mut more = true;
        while more {
            let mut chunk = Vec::with_capacity(CHUNK);
            while more && chunk.len() < CHUNK {
                chunk.push(comb.clone());
                more = next_combination(&mut comb, n);
            }
            if let Some(cert) = chunk.par_iter().find_map_first(|s| match_subset(g, s, &patterns)) {
                return Some(cert);
            }
        }
    }
    None
}

/// Catalog kinds with small parameters, for exhaustive property checks.
pub fn small_catalog(max_t: usize, max_hole: usize) -> Vec<ObstructionKind> {
    let mut out = SMALL_KINDS.to_vec();
    for s in 1..=3 {
        for t in 0..=max_t {
            out.push(ObstructionKind::W { s, t });
        }
    }
    for k in 4..=max_hole {
        out.push(ObstructionKind::Hole { k });
    }
    out
}

pub fn write_certificate(cert: &ObstructionCertificate) -> String {
    let verts: Vec<String> = cert.vertices.iter().map(|v| v.to_string()).collect();
    format!("o obstruction {}\nv {}\n", cert.kind, verts.join(" "))
}

fn cerr(line: usize, reason: &str) -> ObstructionError {
    ObstructionError::Parse(GraphError::Parse {
        line,
        reason: reason.to_string(),
    })
}

pub fn parse_certificate(text: &str) -> Result<ObstructionCertificate, ObstructionError> {
    let mut kind = None;
    let mut vertices = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks: Vec<&str> = raw.split_ascii_whitespace().collect();
        match toks.as_slice() {
            [] | ["c", ..] => continue,
            ["o", "obstruction", rest @ ..] => {
                if kind.is_some() {
                    return Err(cerr(line, "repeated header"));
                }
                let num = |s: &str| s.parse::<usize>().map_err(|_| cerr(line, "bad integer"));
                let k = match rest {
                    ["O1"] => ObstructionKind::O1,
                    ["O2"] => ObstructionKind::O2,
                    ["O3"] => ObstructionKind::O3,
                    ["O4"] => ObstructionKind::O4,
                    ["W", s, t] => ObstructionKind::W {
                        s: u8::try_from(num(s)?).map_err(|_| cerr(line, "bad wing type"))?,
                        t: num(t)?,
                    },
                    ["HOLE", k] => ObstructionKind::Hole { k: num(k)? },
                    _ => return Err(cerr(line, "unknown obstruction kind")),
                };
                k.validate()?;
                kind = Some(k);
            }
            ["v", rest @ ..] => {
                if vertices.is_some() {
                    return Err(cerr(line, "repeated vertex line"));
                }
                let vs = rest
                    .iter()
                    .map(|s| s.parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| cerr(line, "bad integer"))?;
                vertices = Some(vs);
            }
            _ => return Err(cerr(line, "unexpected line")),
        }
    }
    Ok(ObstructionCertificate {
        kind: kind.ok_or_else(|| cerr(0, "missing header"))?,
        vertices: vertices.ok_or_else(|| cerr(0, "missing vertex line"))?,
    })
}

/// Whether `kinds` contains two entries where one embeds in the other.
pub fn catalog_is_antichain(kinds: &[ObstructionKind]) -> Result<bool, ObstructionError> {
    let graphs = kinds
        .iter()
        .map(|&k| build_obstruction(k))
        .collect::<Result<Vec<_>, _>>()?;
    let mut seen = HashSet::new();
    for (i, small) in graphs.iter().enumerate() {
        for (j, big) in graphs.iter().enumerate() {
            if i == j || small.n() > big.n() || !seen.insert((i, j)) {
                continue;
            }
            if small.n() == big.n() {
                if small.m() == big.m() && kinds[i] != kinds[j] {
                    let all: Vec<usize> = (0..big.n()).collect();
                    if big.isomorphic_to_pattern(&all, small)?.is_some() {
                        return Ok(false);
                    }
                }
                continue;
            }
            let mut comb: Vec<usize> = (0..small.n()).collect();
            loop {
                if big.isomorphic_to_pattern(&comb, small)?.is_some() {
                    return Ok(false);
                }
                if !next_combination(&mut comb, big.n()) {
                    break;
                }
            }
        }
    }
    Ok(true)
}
