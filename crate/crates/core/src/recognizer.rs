//! Certifying recognition of well-partitioned chordal graphs.
//!
//! Vertices are inserted along a reverse perfect elimination ordering while a
//! partition forest of the inserted part is maintained. When a new simplicial
//! vertex touches two bags, crossing vertices on either boundary are pushed
//! away along a good boundary-crossing path before the two bags are split
//! around the vertex. When that is impossible the current graph contains an
//! obstruction; it is located by shrinking a vertex set that stays outside the
//! class and then naming the resulting minimal graph.

use std::collections::{BTreeSet, HashMap};

use crate::chordal::{lex_bfs_peo_or_hole, PeoOrHole};
use crate::graph::{Graph, VertexSet};
use crate::obstructions::{
    brute_force_obstruction_search, classify, verify_obstruction_certificate, ObstructionCertificate, ObstructionKind,
};
use crate::partition::{validate_partition_forest, PartitionForest};

/// Outcome of recognition: a partition forest or an induced obstruction.
#[derive(Debug, Clone)]
pub enum Certificate {
    Accepted(PartitionForest),
    Rejected(ObstructionCertificate),
}

impl Certificate {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Certificate::Accepted(_))
    }

    pub fn forest(&self) -> Option<&PartitionForest> {
        match self {
            Certificate::Accepted(f) => Some(f),
            Certificate::Rejected(_) => None,
        }
    }

    pub fn obstruction(&self) -> Option<&ObstructionCertificate> {
        match self {
            Certificate::Accepted(_) => None,
            Certificate::Rejected(c) => Some(c),
        }
    }
}

/// Checks either kind of certificate against `g`.
pub fn verify_certificate(g: &Graph, cert: &Certificate) -> bool {
    match cert {
        Certificate::Accepted(f) => validate_partition_forest(g, f).is_none(),
        Certificate::Rejected(c) => verify_obstruction_certificate(g, c),
    }
}

/// Decides membership without producing an obstruction on rejection.
pub fn is_wpc(g: &Graph) -> bool {
    run(g).is_ok()
}

/// Recognizes `g`, returning a partition forest (bags in canonical order) or
/// an induced obstruction.
pub fn recognize(g: &Graph) -> Certificate {
    match run(g) {
        Ok(forest) => {
            debug_assert!(validate_partition_forest(g, &forest).is_none());
            Certificate::Accepted(forest)
        }
        Err(Rejection::Hole(cycle)) => Certificate::Rejected(ObstructionCertificate {
            kind: ObstructionKind::Hole { k: cycle.len() },
            vertices: cycle,
        }),
        Err(Rejection::Stuck { local, scope }) => Certificate::Rejected(certify(g, local, scope)),
    }
}

enum Rejection {
    Hole(Vec<usize>),
    /// Inserting a vertex failed. `local` is a small vertex set expected to
    /// hold an obstruction; `scope` certainly holds one.
    Stuck { local: VertexSet, scope: VertexSet },
}

fn run(g: &Graph) -> Result<PartitionForest, Rejection> {
    let order = match lex_bfs_peo_or_hole(g) {
        PeoOrHole::Hole(h) => return Err(Rejection::Hole(h.cycle)),
        PeoOrHole::Peo(p) => p.order,
    };
    let mut b = Builder::new(g);
    for &v in order.iter().rev() {
        if let Err(bags) = b.insert(v) {
            let local = b.vertices_of(&bags, v);
            let scope = b.component_of(v);
            return Err(Rejection::Stuck { local, scope });
        }
    }
    Ok(b.finish())
}

const NONE: usize = usize::MAX;

/// A partition forest under construction. Bag ids are stable; dead bags are
/// left empty.
struct Builder<'g> {
    g: &'g Graph,
    bag_of: Vec<usize>,
    bags: Vec<Vec<usize>>,
    adj: Vec<BTreeSet<usize>>,
}

/// Bags involved in a failed insertion.
type Failure = Vec<usize>;

impl<'g> Builder<'g> {
    fn new(g: &'g Graph) -> Self {
        Builder {
            g,
            bag_of: vec![NONE; g.n()],
            bags: Vec::new(),
            adj: Vec::new(),
        }
    }

    fn new_bag(&mut self, members: Vec<usize>) -> usize {
        let id = self.bags.len();
        for &u in &members {
            self.bag_of[u] = id;
        }
        self.bags.push(members);
        self.adj.push(BTreeSet::new());
        id
    }

    fn link(&mut self, a: usize, b: usize) {
        self.adj[a].insert(b);
        self.adj[b].insert(a);
    }

    fn unlink(&mut self, a: usize, b: usize) {
        self.adj[a].remove(&b);
        self.adj[b].remove(&a);
    }

    fn kill(&mut self, x: usize) {
        for y in std::mem::take(&mut self.adj[x]) {
            self.adj[y].remove(&x);
        }
        self.bags[x].clear();
    }

    /// Moves `members` (currently in some bag) into bag `to`.
    fn move_into(&mut self, members: &[usize], to: usize) {
        let from: BTreeSet<usize> = members.iter().map(|&u| self.bag_of[u]).collect();
        for &u in members {
            self.bag_of[u] = to;
        }
        for f in from {
            let bag_of = &self.bag_of;
            self.bags[f].retain(|&u| bag_of[u] == f);
        }
        self.bags[to].extend_from_slice(members);
    }

    /// Vertices of `x` with a neighbor in `y`, ascending.
    fn boundary(&self, x: usize, y: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.bags[x]
            .iter()
            .copied()
            .filter(|&u| self.g.neighbors(u).iter().any(|&w| self.bag_of[w] == y))
            .collect();
        out.sort_unstable();
        out
    }

    /// Whether every vertex of `set` is adjacent to all of bag `x`.
    fn complete_to(&self, set: &[usize], x: usize) -> bool {
        let size = self.bags[x].len();
        set.iter()
            .all(|&u| self.g.neighbors(u).iter().filter(|&&w| self.bag_of[w] == x).count() == size)
    }

    /// Bags holding a vertex that crosses `b` in bag `x`, ascending.
    fn crossing_bags(&self, x: usize, b: &[usize]) -> Vec<usize> {
        let mut hits: HashMap<usize, u8> = HashMap::new();
        for &u in &self.bags[x] {
            let flag = if b.binary_search(&u).is_ok() { 1 } else { 2 };
            for &z in self.g.neighbors(u) {
                let bz = self.bag_of[z];
                if bz != NONE && bz != x {
                    *hits.entry(z).or_default() |= flag;
                }
            }
        }
        let found: BTreeSet<usize> = hits
            .into_iter()
            .filter(|&(_, f)| f == 3)
            .map(|(z, _)| self.bag_of[z])
            .collect();
        found.into_iter().collect()
    }

    fn insert(&mut self, v: usize) -> Result<(), Failure> {
        let touched: BTreeSet<usize> = self
            .g
            .neighbors(v)
            .iter()
            .map(|&u| self.bag_of[u])
            .filter(|&b| b != NONE)
            .collect();
        let touched: Vec<usize> = touched.into_iter().collect();
        match touched.as_slice() {
            [] => {
                self.new_bag(vec![v]);
                Ok(())
            }
            &[c] => {
                let cv = self.new_bag(vec![v]);
                self.link(c, cv);
                Ok(())
            }
            &[a, b] => {
                assert!(self.adj[a].contains(&b), "a clique meets two unlinked bags");
                self.insert_between(v, a, b)
            }
            _ => panic!("a clique meets more than two bags of a partition forest"),
        }
    }

    fn in_nbhd(&self, v: usize, x: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| self.bag_of[u] == x)
            .collect();
        out.sort_unstable();
        out
    }

    fn insert_between(&mut self, v: usize, a: usize, b: usize) -> Result<(), Failure> {
        let (na, nb) = (self.in_nbhd(v, a), self.in_nbhd(v, b));
        if na.len() == self.bags[a].len() {
            return self.absorb_full_side(v, a, b);
        }
        if nb.len() == self.bags[b].len() {
            return self.absorb_full_side(v, b, a);
        }
        let (ba, bb) = (self.boundary(a, b), self.boundary(b, a));
        if ba.len() > na.len() {
            return self.absorb_partial_boundary(v, a, b);
        }
        if bb.len() > nb.len() {
            return self.absorb_partial_boundary(v, b, a);
        }
        self.absorb_exact_boundaries(v, a, b)
    }

    /// The neighborhood of `v` covers all of `c1`.
    fn absorb_full_side(&mut self, v: usize, c1: usize, c2: usize) -> Result<(), Failure> {
        let n2 = self.in_nbhd(v, c2);
        let b21 = self.boundary(c2, c1);
        if n2 == b21 {
            self.bag_of[v] = c1;
            self.bags[c1].push(v);
            return Ok(());
        }
        if b21.len() == self.bags[c2].len() {
            let members = self.bags[c2].clone();
            let others: Vec<usize> = self.adj[c2].iter().copied().filter(|&s| s != c1).collect();
            self.kill(c2);
            self.move_into(&members, c1);
            for s in others {
                self.link(s, c1);
            }
            let cv = self.new_bag(vec![v]);
            self.link(c1, cv);
            return Ok(());
        }
        self.clear_crossings(c1, c2)?;
        self.split_around(v, c1, c2);
        Ok(())
    }

    /// Part of `bd(c1, c2)` lies outside the neighborhood of `v`.
    fn absorb_partial_boundary(&mut self, v: usize, c1: usize, c2: usize) -> Result<(), Failure> {
        self.clear_crossings(c1, c2)?;
        self.clear_crossings(c2, c1)?;
        self.split_around(v, c1, c2);
        Ok(())
    }

    /// The neighborhood of `v` is exactly `bd(a, b) ∪ bd(b, a)` and both bags
    /// hold non-neighbors.
    fn absorb_exact_boundaries(&mut self, v: usize, a: usize, b: usize) -> Result<(), Failure> {
        for (x, y) in [(a, b), (b, a)] {
            let bxy = self.boundary(x, y);
            if self.crossing_bags(x, &bxy).is_empty() {
                self.peel_boundary(v, x, y);
                return Ok(());
            }
        }
        let mut failed = Vec::new();
        for (x, y) in [(a, b), (b, a)] {
            match self.good_path(y, x) {
                Ok(path) => {
                    self.shorten(&path);
                    self.peel_boundary(v, x, y);
                    return Ok(());
                }
                Err(bags) => failed.extend(bags),
            }
        }
        Err(failed)
    }

    /// A maximal good boundary-crossing path that ends in `last, prev`,
    /// returned from `prev` outwards. On failure returns the bags involved.
    fn good_path(&self, prev: usize, last: usize) -> Result<Vec<usize>, Failure> {
        let mut path = vec![prev, last];
        loop {
            let (p, l) = (path[path.len() - 2], path[path.len() - 1]);
            let b = self.boundary(l, p);
            let crossing = self.crossing_bags(l, &b);
            match crossing.as_slice() {
                [] => return Ok(path),
                &[d] => {
                    let bd = self.boundary(d, l);
                    path.push(d);
                    if !self.complete_to(&bd, l) {
                        return Err(path);
                    }
                }
                _ => {
                    path.extend(crossing);
                    return Err(path);
                }
            }
        }
    }

    /// Removes every vertex crossing `bd(last, prev)` by shortening a maximal
    /// good boundary-crossing path.
    fn clear_crossings(&mut self, prev: usize, last: usize) -> Result<(), Failure> {
        let path = self.good_path(prev, last)?;
        self.shorten(&path);
        Ok(())
    }

    /// Walks the path from its far end, moving `bd(C_k, C_{k-1})` into
    /// `C_{k-1}` each time.
    fn shorten(&mut self, path: &[usize]) {
        for j in (2..path.len()).rev() {
            let (ck, ck1) = (path[j], path[j - 1]);
            let moving = self.boundary(ck, ck1);
            let movers: Vec<usize> = self.adj[ck]
                .iter()
                .copied()
                .filter(|&s| s != ck1 && self.boundary(ck, s).iter().all(|u| moving.binary_search(u).is_ok()))
                .collect();
            self.move_into(&moving, ck1);
            for s in movers {
                self.unlink(ck, s);
                self.link(ck1, s);
            }
            if self.bags[ck].is_empty() {
                self.kill(ck);
            }
        }
    }

    /// Splits `c1` and `c2` into their private parts and a shared middle bag
    /// holding both boundaries, then hangs `{v}` off the middle.
    fn split_around(&mut self, v: usize, c1: usize, c2: usize) {
        let b12 = self.boundary(c1, c2);
        let b21 = self.boundary(c2, c1);
        let mut moves = Vec::new();
        for (x, bx) in [(c1, &b12), (c2, &b21)] {
            for &s in &self.adj[x] {
                if s != c1 && s != c2 && self.boundary(x, s).iter().all(|u| bx.binary_search(u).is_ok()) {
                    moves.push((x, s));
                }
            }
        }
        self.unlink(c1, c2);
        let mid = self.new_bag(Vec::new());
        let mut members = b12;
        members.extend(b21);
        self.move_into(&members, mid);
        for (x, s) in moves {
            self.unlink(x, s);
            self.link(mid, s);
        }
        for x in [c1, c2] {
            if self.bags[x].is_empty() {
                self.kill(x);
            } else {
                self.link(x, mid);
            }
        }
        let cv = self.new_bag(vec![v]);
        self.link(mid, cv);
    }

    /// Moves `bd(x, y)` together with `v` into a new bag between `x` and `y`.
    fn peel_boundary(&mut self, v: usize, x: usize, y: usize) {
        let bxy = self.boundary(x, y);
        let moves: Vec<usize> = self.adj[x]
            .iter()
            .copied()
            .filter(|&s| s != y && self.boundary(x, s).iter().all(|u| bxy.binary_search(u).is_ok()))
            .collect();
        self.unlink(x, y);
        let mid = self.new_bag(vec![v]);
        self.move_into(&bxy, mid);
        for s in moves {
            self.unlink(x, s);
            self.link(mid, s);
        }
        self.link(mid, y);
        if self.bags[x].is_empty() {
            self.kill(x);
        } else {
            self.link(x, mid);
        }
    }

    /// `v` plus the members of `bags` and of both bags meeting `N(v)`.
    fn vertices_of(&self, bags: &[usize], v: usize) -> VertexSet {
        let mut out: BTreeSet<usize> = BTreeSet::from([v]);
        for &u in self.g.neighbors(v) {
            if self.bag_of[u] != NONE {
                out.extend(self.bags[self.bag_of[u]].iter().copied());
            }
        }
        for &b in bags {
            out.extend(self.bags[b].iter().copied());
        }
        out.into_iter().collect()
    }

    /// Inserted vertices connected to `v` through inserted vertices.
    fn component_of(&self, v: usize) -> VertexSet {
        let mut seen = BTreeSet::from([v]);
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for &w in self.g.neighbors(u) {
                if self.bag_of[w] != NONE && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.into_iter().collect()
    }

    fn finish(self) -> PartitionForest {
        let mut id = vec![NONE; self.bags.len()];
        let mut bags = Vec::new();
        for (b, members) in self.bags.iter().enumerate() {
            if !members.is_empty() {
                id[b] = bags.len();
                bags.push(members.clone());
            }
        }
        let mut links = Vec::new();
        for (a, nbrs) in self.adj.iter().enumerate() {
            for &b in nbrs {
                if a < b {
                    links.push((id[a], id[b]));
                }
            }
        }
        PartitionForest::new(self.g.n(), bags, links).canonical()
    }
}

fn outside_class(g: &Graph, set: &[usize]) -> bool {
    let (h, _) = g.induced_subgraph(set).expect("vertices come from the graph");
    !is_wpc(&h)
}

/// Shrinks `set` to an inclusion-minimal subset that is still outside the
/// class. Chunks are dropped first, then single vertices.
fn minimize(g: &Graph, mut set: VertexSet) -> VertexSet {
    let mut chunk = set.len() / 2;
    while chunk >= 1 {
        let mut start = 0;
        while start < set.len() {
            let end = (start + chunk).min(set.len());
            let mut trial = set[..start].to_vec();
            trial.extend_from_slice(&set[end..]);
            if !trial.is_empty() && outside_class(g, &trial) {
                set = trial;
            } else {
                start = end;
            }
        }
        chunk /= 2;
    }
    set
}

fn certify(g: &Graph, local: VertexSet, scope: VertexSet) -> ObstructionCertificate {
    let start = if outside_class(g, &local) { local } else { scope };
    let core = minimize(g, start);
    let (h, ids) = g.induced_subgraph(&core).expect("vertices come from the graph");
    let cert = match classify(&h) {
        Some((kind, order)) => ObstructionCertificate {
            kind,
            vertices: order.into_iter().map(|i| ids[i]).collect(),
        },
        None => {
            let found = brute_force_obstruction_search(&h, h.n())
                .expect("a minimal graph outside the class must be an obstruction");
            ObstructionCertificate {
                kind: found.kind,
                vertices: found.vertices.into_iter().map(|i| ids[i]).collect(),
            }
        }
    };
    debug_assert!(verify_obstruction_certificate(g, &cert));
    cert
}
