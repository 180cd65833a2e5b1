//! Kernelization for disjoint paths: polynomial kernels in `k` for the
//! full-domain variants on WPC graphs and for every pair variant on split
//! graphs.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::generators::SplitGraph;
use crate::graph::{Graph, VertexSet};
use crate::partition::{validate_partition_forest, PartitionForest};
use crate::paths::{mark_vertices, normalize, with_forest, DpInstance, MarkedSets, PathsError, Terminals, Variant};

/// Constant `C` in the `C·k³` vertex bound checked for DP/TDP kernels.
pub const DP_KERNEL_CONSTANT: usize = 20;
/// Constant `C′` in the `C′·k²` vertex bound checked for split kernels.
pub const SPLIT_KERNEL_CONSTANT: usize = 10;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("variant {0} has no kernel here; use DP or TDP (or a split graph)")]
    NotAKernelVariant(Variant),
    #[error("the partition forest is not a star with singleton leaves: {0}")]
    NotSplit(String),
    #[error(transparent)]
    Paths(#[from] PathsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Reduced,
    TrivialNo,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Reduced => "Reduced",
            Verdict::TrivialNo => "TrivialNo",
        })
    }
}

/// One applied reduction: its name and the bag ids it touched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub name: String,
    pub bags: Vec<usize>,
}

impl TraceStep {
    fn new(name: &str, bags: Vec<usize>) -> Self {
        TraceStep {
            name: name.to_string(),
            bags,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KernelResult {
    pub instance: DpInstance,
    pub trace: Vec<TraceStep>,
    pub verdict: Verdict,
    /// Original vertex id of each kernel vertex; empty for a trivial
    /// no-instance.
    pub origin: Vec<usize>,
}

/// Trace file text: `r <name> <bags…>` per step, then `verdict <V>`.
pub fn write_trace(result: &KernelResult) -> String {
    let mut out = String::new();
    for step in &result.trace {
        out.push_str("r ");
        out.push_str(&step.name);
        for b in &step.bags {
            out.push_str(&format!(" {b}"));
        }
        out.push('\n');
    }
    out.push_str(&format!("verdict {}\n", result.verdict));
    out
}

/// Records the kernel's trees by their lowest bag ids; the kernel may be
/// disconnected.
fn components_step(inst: &DpInstance) -> TraceStep {
    let forest = inst.forest.as_ref().expect("kernel forests are attached");
    let mut seen = HashSet::new();
    let roots = (0..forest.bags().len()).filter(|&b| seen.insert(forest.tree_of(b))).collect();
    TraceStep::new("components", roots)
}

/// The canonical no-instance: one pair on two isolated vertices.
fn trivial_no(variant: Variant) -> DpInstance {
    let g = Graph::empty(2);
    let forest = PartitionForest::new(2, vec![vec![0], vec![1]], vec![]);
    DpInstance::new(g, variant, Terminals::Pairs(vec![(0, 1)]), None)
        .expect("two distinct vertices form a valid pair")
        .with_forest(forest)
}

/// A mutable WPC instance with pair terminals, local vertex ids and stable
/// bag ids.
struct Work {
    origin: Vec<usize>,
    alive: Vec<bool>,
    adj: Vec<BTreeSet<usize>>,
    bag_of: Vec<usize>,
    bags: Vec<Vec<usize>>,
    links: Vec<BTreeSet<usize>>,
    pairs: Vec<(usize, usize)>,
    variant: Variant,
}

impl Work {
    /// The subinstance induced by `keep` (original ids, sorted). Bags are
    /// restricted to `keep`; links survive when an edge still joins them.
    fn induced(inst: &DpInstance, forest: &PartitionForest, keep: &[usize]) -> Work {
        let g = &inst.graph;
        let n = g.n();
        let mut local = vec![usize::MAX; n];
        for (i, &v) in keep.iter().enumerate() {
            local[v] = i;
        }
        let adj: Vec<BTreeSet<usize>> = keep
            .iter()
            .map(|&v| {
                g.neighbors(v)
                    .iter()
                    .filter(|&&w| local[w] != usize::MAX)
                    .map(|&w| local[w])
                    .collect()
            })
            .collect();
        let mut bag_id = vec![usize::MAX; forest.bags().len()];
        let mut bags: Vec<Vec<usize>> = Vec::new();
        let mut bag_of = vec![usize::MAX; keep.len()];
        for (b, members) in forest.bags().iter().enumerate() {
            let kept: Vec<usize> = members.iter().filter(|&&v| local[v] != usize::MAX).map(|&v| local[v]).collect();
            if !kept.is_empty() {
                bag_id[b] = bags.len();
                for &u in &kept {
                    bag_of[u] = bags.len();
                }
                bags.push(kept);
            }
        }
        let mut links = vec![BTreeSet::new(); bags.len()];
        for (u, nb) in adj.iter().enumerate() {
            for &w in nb {
                let (a, b) = (bag_of[u], bag_of[w]);
                if a != b {
                    links[a].insert(b);
                }
            }
        }
        let _ = bag_id;
        Work {
            origin: keep.to_vec(),
            alive: vec![true; keep.len()],
            adj,
            bag_of,
            bags,
            links,
            pairs: inst.pairs().iter().map(|&(s, t)| (local[s], local[t])).collect(),
            variant: inst.variant,
        }
    }

    fn boundary(&self, x: usize, y: usize) -> Vec<usize> {
        self.bags[x]
            .iter()
            .copied()
            .filter(|&u| self.adj[u].iter().any(|&w| self.bag_of[w] == y))
            .collect()
    }

    fn is_terminal(&self, v: usize) -> bool {
        self.pairs.iter().any(|&(s, t)| s == v || t == v)
    }

    /// Bag paths of pairs whose terminals are not adjacent.
    fn routes(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for &(s, t) in &self.pairs {
            if self.adj[s].contains(&t) {
                continue;
            }
            let (from, to) = (self.bag_of[s], self.bag_of[t]);
            let mut parent: BTreeMap<usize, usize> = BTreeMap::from([(from, from)]);
            let mut queue = VecDeque::from([from]);
            while let Some(x) = queue.pop_front() {
                if x == to {
                    break;
                }
                for &y in &self.links[x] {
                    if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(y) {
                        e.insert(x);
                        queue.push_back(y);
                    }
                }
            }
            if !parent.contains_key(&to) {
                continue;
            }
            let mut path = vec![to];
            while *path.last().expect("non-empty") != from {
                let p = parent[path.last().expect("non-empty")];
                path.push(p);
            }
            path.reverse();
            out.push(path);
        }
        out
    }

    /// Bags holding a common neighbor of an edge that carries two or more
    /// pairs; their vertices may be needed as middles of distinct paths.
    fn protected_bags(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        if !self.variant.totally() {
            return out;
        }
        let mut weight: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for &(s, t) in &self.pairs {
            if self.adj[s].contains(&t) {
                *weight.entry((s.min(t), s.max(t))).or_default() += 1;
            }
        }
        for (&(x, y), &w) in &weight {
            if w >= 2 {
                for &z in self.adj[x].intersection(&self.adj[y]) {
                    out.insert(self.bag_of[z]);
                }
            }
        }
        out
    }

    /// Degree-two rule on a terminal-free bag crossed by `through` routes.
    /// A boundary smaller than `through` makes the instance trivially NO;
    /// otherwise the bag is bypassed by joining its neighbors' boundaries.
    /// Returns `None` when the bag is not eligible.
    fn reduce_bag(&mut self, b: usize, through: usize, protected: &BTreeSet<usize>) -> Option<Verdict> {
        if self.bags[b].is_empty() || self.links[b].len() != 2 || protected.contains(&b) {
            return None;
        }
        if self.bags[b].iter().any(|&v| self.is_terminal(v)) {
            return None;
        }
        let (a, c) = {
            let mut it = self.links[b].iter().copied();
            (it.next().expect("degree two"), it.next().expect("degree two"))
        };
        let (ba, bc) = (self.boundary(b, a), self.boundary(b, c));
        if ba.len() < through || bc.len() < through {
            return Some(Verdict::TrivialNo);
        }
        let (ab, cb) = (self.boundary(a, b), self.boundary(c, b));
        for v in std::mem::take(&mut self.bags[b]) {
            for w in std::mem::take(&mut self.adj[v]) {
                self.adj[w].remove(&v);
            }
            self.alive[v] = false;
        }
        for &u in &ab {
            for &w in &cb {
                self.adj[u].insert(w);
                self.adj[w].insert(u);
            }
        }
        for x in [a, c] {
            self.links[x].remove(&b);
        }
        self.links[b].clear();
        self.links[a].insert(c);
        self.links[c].insert(a);
        Some(Verdict::Reduced)
    }

    /// Bags in breadth-first order from the lowest bag of each tree.
    fn tree_order(&self) -> Vec<usize> {
        let mut seen = vec![false; self.bags.len()];
        let mut order = Vec::new();
        for root in 0..self.bags.len() {
            if seen[root] || self.bags[root].is_empty() {
                continue;
            }
            seen[root] = true;
            let mut queue = VecDeque::from([root]);
            while let Some(x) = queue.pop_front() {
                order.push(x);
                for &y in &self.links[x] {
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
        }
        order
    }

    /// Applies the degree-two reductions until none applies.
    fn sweep(&mut self, trace: &mut Vec<TraceStep>) -> Verdict {
        let mut through = vec![0usize; self.bags.len()];
        for route in self.routes() {
            if route.len() > 2 {
                for &b in &route[1..route.len() - 1] {
                    through[b] += 1;
                }
            }
        }
        let protected = self.protected_bags();
        loop {
            let mut changed = false;
            for b in self.tree_order() {
                match self.reduce_bag(b, through[b], &protected) {
                    None => {}
                    Some(Verdict::TrivialNo) => {
                        trace.push(TraceStep::new("small-boundary", vec![b]));
                        return Verdict::TrivialNo;
                    }
                    Some(Verdict::Reduced) => {
                        trace.push(TraceStep::new("large-boundary", vec![b]));
                        changed = true;
                    }
                }
            }
            if !changed {
                return Verdict::Reduced;
            }
        }
    }

    /// Compacts to a fresh instance; kernel vertices keep the relative order
    /// of their original ids.
    fn finish(&self) -> (DpInstance, Vec<usize>) {
        let live: Vec<usize> = (0..self.alive.len()).filter(|&v| self.alive[v]).collect();
        let mut new_id = vec![usize::MAX; self.alive.len()];
        for (i, &v) in live.iter().enumerate() {
            new_id[v] = i;
        }
        let edges: Vec<(usize, usize)> = live
            .iter()
            .flat_map(|&v| {
                self.adj[v]
                    .iter()
                    .filter(move |&&w| w > v)
                    .map(|&w| (new_id[v], new_id[w]))
                    .collect::<Vec<_>>()
            })
            .collect();
        let g = Graph::from_edges_lossy(live.len(), edges);
        let mut bag_id = vec![usize::MAX; self.bags.len()];
        let mut bags = Vec::new();
        for (b, members) in self.bags.iter().enumerate() {
            if !members.is_empty() {
                bag_id[b] = bags.len();
                bags.push(members.iter().map(|&v| new_id[v]).collect());
            }
        }
        let mut links = Vec::new();
        for (a, nb) in self.links.iter().enumerate() {
            for &b in nb {
                if a < b {
                    links.push((bag_id[a], bag_id[b]));
                }
            }
        }
        let forest = PartitionForest::new(live.len(), bags, links);
        let pairs = self.pairs.iter().map(|&(s, t)| (new_id[s], new_id[t])).collect();
        let inst = DpInstance::new(g, self.variant, Terminals::Pairs(pairs), None)
            .expect("terminals survive every reduction")
            .with_forest(forest);
        (inst, live.iter().map(|&v| self.origin[v]).collect())
    }
}

/// An instance produced by a single reduction, with the original id of each
/// vertex.
#[derive(Debug, Clone)]
pub struct Reduced {
    pub instance: DpInstance,
    pub origin: Vec<usize>,
}

#[derive(Debug, Clone)]
pub enum DegreeTwoOutcome {
    Reduced(Reduced),
    TrivialNo,
    NotApplicable,
}

fn kernel_forest(inst: &DpInstance) -> Result<(DpInstance, PartitionForest), KernelError> {
    if !matches!(inst.variant, Variant::Dp | Variant::Tdp) {
        return Err(KernelError::NotAKernelVariant(inst.variant));
    }
    let inst = with_forest(inst)?.into_owned();
    let forest = inst.forest.clone().expect("forest attached");
    Ok((inst, forest))
}

/// Keeps the marked vertices and all terminals, dropping everything else;
/// bags are intersected with the kept set and the forest is rebuilt.
pub fn trim_to_marked_forest(inst: &DpInstance, marks: &MarkedSets) -> Result<Reduced, KernelError> {
    let (inst, forest) = kernel_forest(inst)?;
    let mut keep: BTreeSet<usize> = marks.marks.iter().flatten().copied().collect();
    for &(s, t) in inst.pairs() {
        keep.insert(s);
        keep.insert(t);
    }
    let keep: Vec<usize> = keep.into_iter().collect();
    let (instance, origin) = Work::induced(&inst, &forest, &keep).finish();
    Ok(Reduced { instance, origin })
}

/// Reductions 3 and 4 on one bag: a terminal-free bag of degree two is
/// either too narrow for the pairs routed through it (a no-instance) or is
/// removed after joining its two neighbors' boundaries completely.
pub fn reduce_degree_two_bag(inst: &DpInstance, bag: usize) -> Result<DegreeTwoOutcome, KernelError> {
    let (inst, forest) = kernel_forest(inst)?;
    let all: Vec<usize> = (0..inst.graph.n()).collect();
    let mut work = Work::induced(&inst, &forest, &all);
    if bag >= work.bags.len() {
        return Ok(DegreeTwoOutcome::NotApplicable);
    }
    let through = work
        .routes()
        .iter()
        .filter(|r| r.len() > 2 && r[1..r.len() - 1].contains(&bag))
        .count();
    let protected = work.protected_bags();
    Ok(match work.reduce_bag(bag, through, &protected) {
        None => DegreeTwoOutcome::NotApplicable,
        Some(Verdict::TrivialNo) => DegreeTwoOutcome::TrivialNo,
        Some(Verdict::Reduced) => {
            let (instance, origin) = work.finish();
            DegreeTwoOutcome::Reduced(Reduced { instance, origin })
        }
    })
}

/// Kernel for DP and TDP: normalize, mark, trim to the marked vertices and
/// terminals, then sweep degree-two bags. Rounds repeat until one removes
/// nothing, so the kernel of a kernel is itself.
pub fn kernelize_dp(inst: &DpInstance) -> Result<KernelResult, KernelError> {
    let (inst, _) = kernel_forest(inst)?;
    let variant = inst.variant;
    let no = |trace| KernelResult {
        instance: trivial_no(variant),
        trace,
        verdict: Verdict::TrivialNo,
        origin: Vec::new(),
    };
    let mut trace = vec![TraceStep::new("normalize", vec![])];
    let mut current = normalize(&inst).inst.into_owned();
    let mut origin: Vec<usize> = (0..current.graph.n()).collect();
    loop {
        let norm = normalize(&current);
        let forest = norm.inst.forest.clone().expect("forest attached");
        let marks = mark_vertices(&norm.inst, &norm.heavy);
        trace.push(TraceStep::new("mark", vec![]));
        if marks.blocked {
            return Ok(no(trace));
        }
        let mut keep: BTreeSet<usize> = marks.marks.iter().flatten().copied().collect();
        for &(s, t) in norm.inst.pairs() {
            keep.insert(s);
            keep.insert(t);
        }
        let keep: Vec<usize> = keep.into_iter().collect();
        let mut work = Work::induced(&norm.inst, &forest, &keep);
        trace.push(TraceStep::new("trim", vec![]));
        if work.sweep(&mut trace) == Verdict::TrivialNo {
            return Ok(no(trace));
        }
        let (next, local) = work.finish();
        debug_assert!(validate_partition_forest(&next.graph, next.forest.as_ref().expect("set")).is_none());
        let unchanged = next.graph.n() == current.graph.n();
        origin = local.iter().map(|&v| origin[v]).collect();
        current = next;
        if unchanged {
            trace.push(components_step(&current));
            return Ok(KernelResult {
                instance: current,
                trace,
                verdict: Verdict::Reduced,
                origin,
            });
        }
    }
}

/// A pair instance on an implicit split graph.
#[derive(Debug, Clone)]
pub struct SplitInstance {
    pub split: SplitGraph,
    pub variant: Variant,
    pub pairs: Vec<(usize, usize)>,
    /// Repaired domains, sorted; `None` means full domains.
    pub domains: Option<Vec<VertexSet>>,
}

impl SplitInstance {
    /// Checks the pairs and repairs the domains: each keeps its own
    /// terminals and loses everyone else's.
    pub fn new(
        split: SplitGraph,
        variant: Variant,
        pairs: Vec<(usize, usize)>,
        domains: Option<Vec<VertexSet>>,
    ) -> Result<Self, KernelError> {
        if variant.uses_sets() {
            return Err(KernelError::NotAKernelVariant(variant));
        }
        let n = split.n();
        for (i, &(s, t)) in pairs.iter().enumerate() {
            if s >= n || t >= n {
                return Err(PathsError::TerminalNotInGraph(s.max(t)).into());
            }
            if s == t {
                return Err(PathsError::DegeneratePair(i).into());
            }
        }
        let domains = match domains {
            Some(d) if !variant.full_domains() => {
                if d.len() != pairs.len() {
                    return Err(PathsError::DomainCountMismatch {
                        expected: pairs.len(),
                        got: d.len(),
                    }
                    .into());
                }
                let terminals: HashSet<usize> = pairs.iter().flat_map(|&(s, t)| [s, t]).collect();
                let mut out = Vec::with_capacity(d.len());
                for (i, dom) in d.into_iter().enumerate() {
                    if dom.iter().any(|&v| v >= n) {
                        return Err(PathsError::DomainOutOfRange(i).into());
                    }
                    let (s, t) = pairs[i];
                    let mut fixed: BTreeSet<usize> = dom.into_iter().filter(|v| !terminals.contains(v)).collect();
                    fixed.insert(s);
                    fixed.insert(t);
                    out.push(fixed.into_iter().collect());
                }
                Some(out)
            }
            _ => None,
        };
        Ok(SplitInstance {
            split,
            variant,
            pairs,
            domains,
        })
    }

    fn in_domain(&self, i: usize, v: usize, terminals: &HashSet<usize>) -> bool {
        match &self.domains {
            Some(d) => d[i].binary_search(&v).is_ok(),
            None => {
                let (s, t) = self.pairs[i];
                v == s || v == t || !terminals.contains(&v)
            }
        }
    }

    /// Sorted neighbors of `v`, materializing the center only on request.
    fn neighbors_upto(&self, v: usize, limit: usize, accept: &dyn Fn(usize) -> bool) -> Vec<usize> {
        if self.split.is_center(v) {
            (0..self.split.center).filter(|&c| c != v && accept(c)).take(limit).collect()
        } else {
            self.split.leaves[v - self.split.center]
                .iter()
                .copied()
                .filter(|&c| accept(c))
                .take(limit)
                .collect()
        }
    }
}

/// Kernel on split graphs for every pair variant. Each index marks at most
/// `2k` center neighbors of each leaf terminal; an edge carrying two or more
/// pairs in a totally-disjoint variant marks `2k` common neighbors, center
/// first. Only marked vertices and terminals remain.
pub fn kernelize_split_compact(inst: &SplitInstance) -> KernelResult {
    let k = inst.pairs.len();
    let cap = 2 * k;
    let sp = &inst.split;
    let terminals: HashSet<usize> = inst.pairs.iter().flat_map(|&(s, t)| [s, t]).collect();
    let mut trace = vec![TraceStep::new("normalize", vec![])];
    let key = |&(s, t): &(usize, usize)| (s.min(t), s.max(t));
    let mut weight: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for p in &inst.pairs {
        if sp.has_edge(p.0, p.1) {
            *weight.entry(key(p)).or_default() += 1;
        }
    }
    let mut keep: BTreeSet<usize> = terminals.iter().copied().collect();
    for (i, &(s, t)) in inst.pairs.iter().enumerate() {
        let own = |v: usize| v == s || v == t;
        let ok = |v: usize| !own(v) && inst.in_domain(i, v, &terminals);
        if sp.has_edge(s, t) {
            if inst.variant.totally() && weight[&key(&(s, t))] >= 2 {
                // Middles: center vertices adjacent to both, then leaves.
                let (a, b) = if sp.is_center(s) { (t, s) } else { (s, t) };
                let centre_common = inst.neighbors_upto(a, usize::MAX, &|c| ok(c) && sp.has_edge(c, b));
                let mut chosen: Vec<usize> = centre_common.into_iter().take(cap).collect();
                if chosen.len() < cap && sp.is_center(a) && sp.is_center(b) {
                    for (j, nb) in sp.leaves.iter().enumerate() {
                        if chosen.len() >= cap {
                            break;
                        }
                        let leaf = sp.center + j;
                        if ok(leaf) && nb.binary_search(&a).is_ok() && nb.binary_search(&b).is_ok() {
                            chosen.push(leaf);
                        }
                    }
                }
                keep.extend(chosen);
            }
            continue;
        }
        for x in [s, t] {
            if !sp.is_center(x) {
                let picked = inst.neighbors_upto(x, cap, &|c| ok(c));
                if picked.is_empty() {
                    trace.push(TraceStep::new("mark", vec![]));
                    return KernelResult {
                        instance: trivial_no(inst.variant),
                        trace,
                        verdict: Verdict::TrivialNo,
                        origin: Vec::new(),
                    };
                }
                keep.extend(picked);
            }
        }
    }
    trace.push(TraceStep::new("mark", vec![]));
    trace.push(TraceStep::new("trim", vec![]));
    let keep: Vec<usize> = keep.into_iter().collect();
    let mut new_id = std::collections::HashMap::with_capacity(keep.len());
    for (i, &v) in keep.iter().enumerate() {
        new_id.insert(v, i);
    }
    let centre: Vec<usize> = keep.iter().copied().filter(|&v| sp.is_center(v)).collect();
    let mut edges = Vec::new();
    for (i, &u) in centre.iter().enumerate() {
        for &w in &centre[i + 1..] {
            edges.push((new_id[&u], new_id[&w]));
        }
    }
    let mut bags: Vec<VertexSet> = Vec::new();
    let mut links = Vec::new();
    if !centre.is_empty() {
        bags.push(centre.iter().map(|v| new_id[v]).collect());
    }
    for &v in keep.iter().filter(|&&v| !sp.is_center(v)) {
        let nb = &sp.leaves[v - sp.center];
        let mut linked = false;
        for &c in nb {
            if let Some(&ci) = new_id.get(&c) {
                edges.push((ci, new_id[&v]));
                linked = true;
            }
        }
        if linked {
            links.push((0, bags.len()));
        }
        bags.push(vec![new_id[&v]]);
    }
    let g = Graph::from_edges_lossy(keep.len(), edges);
    let forest = PartitionForest::new(keep.len(), bags, links);
    let pairs = inst.pairs.iter().map(|&(s, t)| (new_id[&s], new_id[&t])).collect();
    let domains = inst.domains.as_ref().map(|ds| {
        ds.iter()
            .map(|d| d.iter().filter_map(|v| new_id.get(v).copied()).collect())
            .collect()
    });
    let instance = DpInstance::new(g, inst.variant, Terminals::Pairs(pairs), domains)
        .expect("kernel keeps every terminal")
        .with_forest(forest);
    trace.push(components_step(&instance));
    KernelResult {
        instance,
        trace,
        verdict: Verdict::Reduced,
        origin: keep,
    }
}

/// Center and leaf vertices of a star forest with singleton leaves. The
/// center is the largest bag, or the best-linked one among singletons.
fn star_of(forest: &PartitionForest) -> Result<(Vec<usize>, Vec<usize>), String> {
    let bags = forest.bags();
    let Some(centre_bag) =
        (0..bags.len()).max_by_key(|&b| (bags[b].len() > 1, forest.bag_neighbors(b).len(), std::cmp::Reverse(b)))
    else {
        return Ok((Vec::new(), Vec::new()));
    };
    let mut leaves = Vec::new();
    for (b, members) in bags.iter().enumerate() {
        if b == centre_bag {
            continue;
        }
        if members.len() != 1 {
            return Err(format!("bag {b} has {} vertices", members.len()));
        }
        if forest.bag_neighbors(b).iter().any(|&c| c != centre_bag) {
            return Err(format!("bag {b} is not a leaf of the center"));
        }
        leaves.push(members[0]);
    }
    Ok((bags[centre_bag].clone(), leaves))
}

/// Clique/independent-set split from the degree sequence (Hammer and
/// Simeone), confirmed directly.
fn split_partition(g: &Graph) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = g.n();
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let m = (0..n).take_while(|&i| g.degree(by_degree[i]) >= i).count();
    let (centre, leaves) = by_degree.split_at(m);
    let mut in_centre = vec![false; n];
    for &v in centre {
        in_centre[v] = true;
    }
    let clique_ok = centre.iter().all(|&v| g.neighbors(v).iter().filter(|&&w| in_centre[w]).count() == m - 1);
    let independent = leaves.iter().all(|&v| g.neighbors(v).iter().all(|&w| in_centre[w]));
    (clique_ok && independent).then(|| (centre.to_vec(), leaves.to_vec()))
}

/// Kernel for an explicit instance whose partition forest is a star with
/// singleton leaves.
pub fn kernelize_split(inst: &DpInstance) -> Result<KernelResult, KernelError> {
    if inst.variant.uses_sets() {
        return Err(KernelError::NotAKernelVariant(inst.variant));
    }
    let (centre_vertices, mut leaves_orig) = match &inst.forest {
        Some(forest) => {
            if let Some(v) = validate_partition_forest(&inst.graph, forest) {
                return Err(PathsError::InvalidForest(v.to_string()).into());
            }
            match star_of(forest) {
                Ok(parts) => parts,
                Err(why) => split_partition(&inst.graph).ok_or(KernelError::NotSplit(why))?,
            }
        }
        None => split_partition(&inst.graph).ok_or_else(|| KernelError::NotSplit("the graph is not split".into()))?,
    };
    // Relabel: center first, then leaves, both by original id.
    let mut order = centre_vertices;
    order.sort_unstable();
    let centre = order.len();
    leaves_orig.sort_unstable();
    order.extend(&leaves_orig);
    let mut to_new = vec![0usize; order.len()];
    for (i, &v) in order.iter().enumerate() {
        to_new[v] = i;
    }
    let g = &inst.graph;
    let leaves: Vec<VertexSet> = leaves_orig
        .iter()
        .map(|&v| {
            let mut nb: Vec<usize> = g.neighbors(v).iter().map(|&w| to_new[w]).collect();
            nb.sort_unstable();
            nb
        })
        .collect();
    let split = SplitGraph { center: centre, leaves };
    let pairs = inst.pairs().iter().map(|&(s, t)| (to_new[s], to_new[t])).collect();
    let domains = if inst.variant.full_domains() {
        None
    } else {
        Some(
            inst.domains
                .iter()
                .map(|d| {
                    let mut m: Vec<usize> = d.iter().map(|&v| to_new[v]).collect();
                    m.sort_unstable();
                    m
                })
                .collect(),
        )
    };
    let compact = SplitInstance::new(split, inst.variant, pairs, domains)?;
    let mut result = kernelize_split_compact(&compact);
    result.origin = result.origin.iter().map(|&v| order[v]).collect();
    Ok(result)
}
