//! Partition forests: clique bags arranged in one tree per component, with
//! complete bipartite boundaries along links and no edges across non-links.

use std::borrow::Cow;
use std::collections::VecDeque;
use std::fmt::{self, Write as _};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexSet};

const NONE: usize = usize::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("bags {0} and {1} are not linked")]
    NotLinked(usize, usize),
    #[error("bags {0} and {1} lie in different trees")]
    DifferentComponents(usize, usize),
    #[error("no bag with id {0}")]
    NoSuchBag(usize),
    #[error(transparent)]
    Parse(#[from] GraphError),
}

#[derive(Debug, Default)]
pub struct PartitionForest {
    bags: Vec<VertexSet>,
    links: Vec<(usize, usize)>,
    bag_of: Vec<usize>,
    bag_adj: Vec<Vec<usize>>,
    boundaries: OnceLock<BoundaryIndex>,
    rooting: OnceLock<Rooting>,
}

/// Boundaries in one flat array. Slot `slot_of[x] + j` holds the boundary
/// of bag `x` towards `bag_adj[x][j]`, stored at `data[start[s]..start[s + 1]]`.
#[derive(Debug)]
struct BoundaryIndex {
    slot_of: Vec<usize>,
    start: Vec<usize>,
    data: Vec<usize>,
}

#[derive(Debug)]
struct Rooting {
    parent: Vec<usize>,
    depth: Vec<usize>,
    root: Vec<usize>,
}

impl Clone for PartitionForest {
    fn clone(&self) -> Self {
        Self::new(self.bag_of.len(), self.bags.clone(), self.links.clone())
    }
}

impl PartialEq for PartitionForest {
    fn eq(&self, other: &Self) -> bool {
        self.bags == other.bags && self.links == other.links && self.bag_of.len() == other.bag_of.len()
    }
}

/// Plain serializable view of a forest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestDoc {
    pub bags: Vec<VertexSet>,
    pub links: Vec<(usize, usize)>,
}

impl PartitionForest {
    /// Assembles a forest over host vertices `0..n`. Nothing is validated
    /// here beyond index ranges needed for bookkeeping; use
    /// [`validate_partition_forest`] for the defining conditions.
    pub fn new(n: usize, bags: Vec<VertexSet>, links: Vec<(usize, usize)>) -> Self {
        let mut bags = bags;
        for bag in bags.iter_mut() {
            bag.sort_unstable();
        }
        let mut bag_of = vec![NONE; n];
        for (id, bag) in bags.iter().enumerate() {
            for &v in bag {
                if v < n {
                    bag_of[v] = id;
                }
            }
        }
        let mut links: Vec<(usize, usize)> = links.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        links.sort_unstable();
        let mut bag_adj = vec![Vec::new(); bags.len()];
        for &(a, b) in &links {
            if a < bags.len() && b < bags.len() && a != b {
                bag_adj[a].push(b);
                bag_adj[b].push(a);
            }
        }
        for list in bag_adj.iter_mut() {
            list.sort_unstable();
        }
        PartitionForest {
            bags,
            links,
            bag_of,
            bag_adj,
            boundaries: OnceLock::new(),
            rooting: OnceLock::new(),
        }
    }

    /// Same forest with bags renumbered by smallest vertex and links sorted.
    pub fn canonical(&self) -> Self {
        let mut ids: Vec<usize> = (0..self.bags.len()).collect();
        ids.sort_by_key(|&b| self.bags[b].first().copied().unwrap_or(NONE));
        let mut rank = vec![0; self.bags.len()];
        for (new, &old) in ids.iter().enumerate() {
            rank[old] = new;
        }
        let bags = ids.iter().map(|&b| self.bags[b].clone()).collect();
        let links = self.links.iter().map(|&(a, b)| (rank[a], rank[b])).collect();
        Self::new(self.bag_of.len(), bags, links)
    }

    pub fn host_n(&self) -> usize {
        self.bag_of.len()
    }

    pub fn bags(&self) -> &[VertexSet] {
        &self.bags
    }

    pub fn bag(&self, id: usize) -> &[usize] {
        &self.bags[id]
    }

    pub fn links(&self) -> &[(usize, usize)] {
        &self.links
    }

    pub fn bag_of(&self, v: usize) -> usize {
        self.bag_of[v]
    }

    pub fn bag_neighbors(&self, id: usize) -> &[usize] {
        &self.bag_adj[id]
    }

    pub fn are_linked(&self, a: usize, b: usize) -> bool {
        a < self.bags.len() && self.bag_adj[a].binary_search(&b).is_ok()
    }

    pub fn to_doc(&self) -> ForestDoc {
        let c = self.canonical();
        ForestDoc {
            bags: c.bags,
            links: c.links,
        }
    }

    /// Position of `y` in the neighbor list of `x`.
    fn slot(&self, x: usize, y: usize) -> Option<usize> {
        self.bag_adj.get(x)?.binary_search(&y).ok()
    }

    /// All boundaries, computed with one pass over the edges of `g` on first
    /// use. The forest must not be queried with different host graphs.
    fn boundary_index(&self, g: &Graph) -> &BoundaryIndex {
        self.boundaries.get_or_init(|| {
            let mut slot_of = Vec::with_capacity(self.bags.len() + 1);
            slot_of.push(0);
            let mut start = Vec::new();
            let mut data = Vec::new();
            // Bag by bag, so each bag's slots are filled contiguously and
            // every adjacency list is read once.
            let mut found: Vec<(usize, usize)> = Vec::new();
            for (x, bag) in self.bags.iter().enumerate() {
                let adj = &self.bag_adj[x];
                found.clear();
                for &u in bag.iter().filter(|&&u| u < g.n()) {
                    for &v in g.neighbors(u) {
                        let y = self.bag_of.get(v).copied().unwrap_or(NONE);
                        if y != x {
                            if let Ok(j) = adj.binary_search(&y) {
                                found.push((j, u));
                            }
                        }
                    }
                }
                found.sort_unstable();
                found.dedup();
                let mut rest = found.as_slice();
                for j in 0..adj.len() {
                    start.push(data.len());
                    let len = rest.iter().take_while(|&&(s, _)| s == j).count();
                    data.extend(rest[..len].iter().map(|&(_, u)| u));
                    rest = &rest[len..];
                }
                slot_of.push(slot_of.last().unwrap() + adj.len());
            }
            start.push(data.len());
            BoundaryIndex { slot_of, start, data }
        })
    }

    /// Vertices of bag `x` with a neighbor in the linked bag `y`.
    pub fn boundary(&self, g: &Graph, x: usize, y: usize) -> Result<&[usize], PartitionError> {
        let j = self.slot(x, y).ok_or(PartitionError::NotLinked(x, y))?;
        let index = self.boundary_index(g);
        let s = index.slot_of[x] + j;
        Ok(&index.data[index.start[s]..index.start[s + 1]])
    }

    fn rooting(&self) -> &Rooting {
        self.rooting.get_or_init(|| {
            let b = self.bags.len();
            let mut parent = vec![NONE; b];
            let mut depth = vec![0; b];
            let mut root = vec![NONE; b];
            for r in 0..b {
                if root[r] != NONE {
                    continue;
                }
                root[r] = r;
                let mut queue = VecDeque::from([r]);
                while let Some(x) = queue.pop_front() {
                    for &y in &self.bag_adj[x] {
                        if root[y] == NONE {
                            root[y] = r;
                            parent[y] = x;
                            depth[y] = depth[x] + 1;
                            queue.push_back(y);
                        }
                    }
                }
            }
            Rooting { parent, depth, root }
        })
    }

    /// The unique bag path from `a` to `b`, both endpoints included.
    pub fn tree_path(&self, a: usize, b: usize) -> Result<Vec<usize>, PartitionError> {
        let nb = self.bags.len();
        if a >= nb {
            return Err(PartitionError::NoSuchBag(a));
        }
        if b >= nb {
            return Err(PartitionError::NoSuchBag(b));
        }
        let r = self.rooting();
        if r.root[a] != r.root[b] {
            return Err(PartitionError::DifferentComponents(a, b));
        }
        let (mut x, mut y) = (a, b);
        let mut front = vec![];
        let mut back = vec![];
        while r.depth[x] > r.depth[y] {
            front.push(x);
            x = r.parent[x];
        }
        while r.depth[y] > r.depth[x] {
            back.push(y);
            y = r.parent[y];
        }
        while x != y {
            front.push(x);
            back.push(y);
            x = r.parent[x];
            y = r.parent[y];
        }
        front.push(x);
        front.extend(back.into_iter().rev());
        Ok(front)
    }

    /// Tree id (the BFS root bag) of every bag.
    pub fn tree_of(&self, bag: usize) -> usize {
        self.rooting().root[bag]
    }
}

/// The first violated defining condition, with a concrete witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ForestViolation {
    VertexOutOfRange { bag: usize, vertex: usize },
    EmptyBag { bag: usize },
    VertexRepeated { vertex: usize },
    VertexUncovered { vertex: usize },
    BadLink { a: usize, b: usize },
    Cycle { a: usize, b: usize },
    NotAClique { bag: usize, u: usize, v: usize },
    NotCompleteBipartite { a: usize, b: usize, u: usize, v: usize },
    EdgeBetweenUnlinked { u: usize, v: usize },
    LinkWithoutEdges { a: usize, b: usize },
}

impl fmt::Display for ForestViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ForestViolation::*;
        match *self {
            VertexOutOfRange { bag, vertex } => write!(f, "bag {bag} holds out-of-range vertex {vertex}"),
            EmptyBag { bag } => write!(f, "bag {bag} is empty"),
            VertexRepeated { vertex } => write!(f, "vertex {vertex} lies in two bags"),
            VertexUncovered { vertex } => write!(f, "vertex {vertex} lies in no bag"),
            BadLink { a, b } => write!(f, "link {a}-{b} is malformed or repeated"),
            Cycle { a, b } => write!(f, "link {a}-{b} closes a cycle"),
            NotAClique { bag, u, v } => write!(f, "bag {bag} is not a clique: {u} {v} non-adjacent"),
            NotCompleteBipartite { a, b, u, v } => {
                write!(f, "link {a}-{b} is not complete bipartite: {u} {v} non-adjacent")
            }
            EdgeBetweenUnlinked { u, v } => write!(f, "edge {u} {v} joins unlinked bags"),
            LinkWithoutEdges { a, b } => write!(f, "link {a}-{b} carries no edge"),
        }
    }
}

/// Checks every defining condition with one pass over the edges; each edge
/// costs a binary search in its bag's neighbor list.
pub fn validate_partition_forest(g: &Graph, f: &PartitionForest) -> Option<ForestViolation> {
    use ForestViolation::*;
    let n = g.n();
    let nb = f.bags.len();
    // The forest's own bag map serves as the owner array when it was built for
    // this graph: a vertex in two bags is owned by only one of them.
    let shared = f.bag_of.len() == n;
    let mut owner: Cow<[usize]> = if shared { Cow::Borrowed(&f.bag_of) } else { Cow::Owned(vec![NONE; n]) };
    for (id, bag) in f.bags.iter().enumerate() {
        if bag.is_empty() {
            return Some(EmptyBag { bag: id });
        }
        if let Some(&v) = bag.iter().find(|&&v| v >= n) {
            return Some(VertexOutOfRange { bag: id, vertex: v });
        }
        if let Some(w) = bag.windows(2).find(|w| w[0] == w[1]) {
            return Some(VertexRepeated { vertex: w[0] });
        }
        if shared {
            if let Some(&v) = bag.iter().find(|&&v| owner[v] != id) {
                return Some(VertexRepeated { vertex: v });
            }
        } else {
            let owned = owner.to_mut();
            for &v in bag {
                if owned[v] != NONE {
                    return Some(VertexRepeated { vertex: v });
                }
                owned[v] = id;
            }
        }
    }
    if let Some(v) = owner.iter().position(|&o| o == NONE) {
        return Some(VertexUncovered { vertex: v });
    }
    // Union-find over bags detects cycles and repeated links.
    let mut uf: Vec<usize> = (0..nb).collect();
    fn find(uf: &mut [usize], mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    for w in f.links.windows(2) {
        if w[0] == w[1] {
            return Some(BadLink { a: w[0].0, b: w[0].1 });
        }
    }
    for &(a, b) in &f.links {
        if a >= nb || b >= nb || a == b {
            return Some(BadLink { a, b });
        }
        let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
        if ra == rb {
            return Some(Cycle { a, b });
        }
        uf[ra] = rb;
    }

    // Edges across a link are counted at the smaller bag's adjacency slot.
    let mut offset = Vec::with_capacity(nb + 1);
    offset.push(0);
    for adj in &f.bag_adj {
        offset.push(offset.last().unwrap() + adj.len());
    }
    let link_slot = |a: usize, b: usize| f.slot(a, b).map(|j| offset[a] + j);
    let mut inner = vec![0usize; nb];
    let mut across = vec![0usize; offset[nb]];
    let mut unlinked = None;
    for (u, v) in g.edges() {
        let (x, y) = (owner[u], owner[v]);
        if x == y {
            inner[x] += 1;
        } else if let Some(i) = link_slot(x.min(y), x.max(y)) {
            across[i] += 1;
        } else if unlinked.is_none() {
            unlinked = Some(EdgeBetweenUnlinked { u: u.min(v), v: u.max(v) });
        }
    }
    for (id, bag) in f.bags.iter().enumerate() {
        let k = bag.len();
        if inner[id] != k * (k - 1) / 2 {
            for (i, &u) in bag.iter().enumerate() {
                if let Some(&v) = bag[i + 1..].iter().find(|&&v| !g.has_edge(u, v)) {
                    return Some(NotAClique { bag: id, u, v });
                }
            }
        }
    }
    for &(a, b) in &f.links {
        let (ba, bb) = (f.boundary(g, a, b).expect("checked link"), f.boundary(g, b, a).expect("checked link"));
        if across[link_slot(a, b).expect("checked link")] != ba.len() * bb.len() {
            for &u in ba {
                if let Some(&v) = bb.iter().find(|&&v| !g.has_edge(u, v)) {
                    return Some(NotCompleteBipartite { a, b, u, v });
                }
            }
        }
    }
    if unlinked.is_some() {
        return unlinked;
    }
    f.links
        .iter()
        .find(|&&(a, b)| across[link_slot(a, b).expect("checked link")] == 0)
        .map(|&(a, b)| LinkWithoutEdges { a, b })
}

/// Canonical text form: bags ordered by smallest vertex, links sorted.
pub fn write_forest(f: &PartitionForest) -> String {
    let c = f.canonical();
    let mut out = String::new();
    writeln!(out, "f partforest {}", c.bags.len()).unwrap();
    for (id, bag) in c.bags.iter().enumerate() {
        write!(out, "b {id}").unwrap();
        for v in bag {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
    }
    for &(a, b) in &c.links {
        writeln!(out, "l {a} {b}").unwrap();
    }
    out
}

fn perr(line: usize, reason: impl Into<String>) -> PartitionError {
    PartitionError::Parse(GraphError::Parse {
        line,
        reason: reason.into(),
    })
}

/// Parses the partition-forest text format for a host graph on `n` vertices.
pub fn parse_forest(text: &str, n: usize) -> Result<PartitionForest, PartitionError> {
    let mut count: Option<usize> = None;
    let mut bags: Vec<Option<VertexSet>> = Vec::new();
    let mut links = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.is_empty() || body == "c" || body.starts_with("c ") {
            continue;
        }
        let mut toks = body.split_ascii_whitespace();
        let tag = toks.next().unwrap();
        let nums: Result<Vec<usize>, _> = match tag {
            "f" => {
                if toks.next() != Some("partforest") {
                    return Err(perr(line, "expected `f partforest <#bags>`"));
                }
                toks.map(str::parse).collect()
            }
            _ => toks.map(str::parse).collect(),
        };
        let nums = nums.map_err(|_| perr(line, "bad integer"))?;
        match tag {
            "f" => {
                if count.is_some() || nums.len() != 1 {
                    return Err(perr(line, "malformed forest header"));
                }
                count = Some(nums[0]);
                bags = vec![None; nums[0]];
            }
            "b" => {
                let c = count.ok_or_else(|| perr(line, "bag before header"))?;
                let (&id, verts) = nums.split_first().ok_or_else(|| perr(line, "missing bag id"))?;
                if id >= c || bags[id].is_some() {
                    return Err(perr(line, format!("bad or repeated bag id {id}")));
                }
                if let Some(&v) = verts.iter().find(|&&v| v >= n) {
                    return Err(perr(line, format!("vertex {v} out of range")));
                }
                bags[id] = Some(verts.to_vec());
            }
            "l" => {
                let c = count.ok_or_else(|| perr(line, "link before header"))?;
                if nums.len() != 2 || nums[0] >= c || nums[1] >= c {
                    return Err(perr(line, "malformed link"));
                }
                links.push((nums[0], nums[1]));
            }
            other => return Err(perr(line, format!("unknown line type `{other}`"))),
        }
    }
    count.ok_or_else(|| perr(0, "missing forest header"))?;
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(id, b)| b.ok_or_else(|| perr(0, format!("bag {id} missing"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PartitionForest::new(n, bags, links))
}
