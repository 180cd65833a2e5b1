//! Brute-force reference implementations. They share no code paths with the
//! recognizer or the solvers and only run on desk-scale inputs.

use std::time::{Duration, Instant};

use crate::graph::{Graph, VertexSet};
use crate::partition::{validate_partition_forest, PartitionForest};
use crate::paths::{Answer, DpInstance, Solution, Terminals};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_n: usize,
    pub max_time: Duration,
}

impl OracleBudget {
    /// Defaults for the recognition oracle.
    pub fn wpc() -> Self {
        OracleBudget {
            max_n: 9,
            max_time: Duration::from_secs(60),
        }
    }

    /// Defaults for the disjoint-paths oracle.
    pub fn paths() -> Self {
        OracleBudget {
            max_n: 14,
            max_time: Duration::from_secs(60),
        }
    }
}

/// Largest `k` the disjoint-paths oracle accepts.
pub const ORACLE_MAX_K: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum WpcVerdict {
    Forest(PartitionForest),
    NotWpc,
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathsVerdict {
    Solution(Solution),
    No,
    BudgetExceeded,
}

impl PathsVerdict {
    pub fn as_answer(&self) -> Option<Answer> {
        match self {
            PathsVerdict::Solution(s) => Some(Answer::Yes(s.clone())),
            PathsVerdict::No => Some(Answer::No),
            PathsVerdict::BudgetExceeded => None,
        }
    }
}

struct Clock {
    start: Instant,
    limit: Duration,
    ticks: u32,
}

impl Clock {
    fn new(limit: Duration) -> Self {
        Clock {
            start: Instant::now(),
            limit,
            ticks: 0,
        }
    }

    fn expired(&mut self) -> bool {
        self.ticks = self.ticks.wrapping_add(1);
        self.ticks % 1024 == 0 && self.start.elapsed() > self.limit
    }
}

/// Every partition of `0..n` into cliques of `g`, as restricted-growth
/// strings, passed to `visit` until it returns true.
fn clique_partitions(
    g: &Graph,
    clock: &mut Clock,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> Result<bool, ()> {
    fn rec(
        g: &Graph,
        pos: usize,
        labels: &mut Vec<usize>,
        blocks: &mut Vec<Vec<usize>>,
        clock: &mut Clock,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> Result<bool, ()> {
        if clock.expired() {
            return Err(());
        }
        if pos == labels.len() {
            return Ok(visit(labels));
        }
        for b in 0..=blocks.len() {
            if b < blocks.len() && !blocks[b].iter().all(|&u| g.has_edge(u, pos)) {
                continue;
            }
            if b == blocks.len() {
                blocks.push(Vec::new());
            }
            blocks[b].push(pos);
            labels[pos] = b;
            let done = rec(g, pos + 1, labels, blocks, clock, visit)?;
            blocks[b].pop();
            if blocks[b].is_empty() {
                blocks.pop();
            }
            if done {
                return Ok(true);
            }
        }
        Ok(false)
    }
    let mut labels = vec![0; g.n()];
    rec(g, 0, &mut labels, &mut Vec::new(), clock, visit)
}

fn bags_from_labels(labels: &[usize]) -> Vec<VertexSet> {
    let count = labels.iter().max().map_or(0, |m| m + 1);
    let mut bags = vec![Vec::new(); count];
    for (v, &b) in labels.iter().enumerate() {
        bags[b].push(v);
    }
    bags
}

/// Decides membership by trying every partition of each component into
/// cliques. Edges between parts already fix the only candidate tree, so each
/// partition is checked once against the forest validator.
pub fn brute_force_is_wpc(g: &Graph, budget: OracleBudget) -> WpcVerdict {
    if g.n() > budget.max_n {
        return WpcVerdict::BudgetExceeded;
    }
    let mut clock = Clock::new(budget.max_time);
    let mut bags: Vec<VertexSet> = Vec::new();
    let mut links: Vec<(usize, usize)> = Vec::new();
    for comp in g.connected_components() {
        let (h, ids) = g.induced_subgraph(&comp).expect("component vertices are in range");
        let mut found: Option<(Vec<VertexSet>, Vec<(usize, usize)>)> = None;
        let outcome = clique_partitions(&h, &mut clock, &mut |labels| {
            let parts = bags_from_labels(labels);
            let mut quotient: Vec<(usize, usize)> = h
                .edges()
                .filter(|&(u, v)| labels[u] != labels[v])
                .map(|(u, v)| (labels[u].min(labels[v]), labels[u].max(labels[v])))
                .collect();
            quotient.sort_unstable();
            quotient.dedup();
            if quotient.len() + 1 != parts.len() {
                return false;
            }
            let f = PartitionForest::new(h.n(), parts.clone(), quotient.clone());
            if validate_partition_forest(&h, &f).is_none() {
                found = Some((parts, quotient));
                true
            } else {
                false
            }
        });
        if outcome.is_err() {
            return WpcVerdict::BudgetExceeded;
        }
        let Some((parts, quotient)) = found else {
            return WpcVerdict::NotWpc;
        };
        let offset = bags.len();
        bags.extend(parts.into_iter().map(|p| p.into_iter().map(|v| ids[v]).collect()));
        links.extend(quotient.into_iter().map(|(a, b)| (a + offset, b + offset)));
    }
    WpcVerdict::Forest(PartitionForest::new(g.n(), bags, links).canonical())
}

/// Decodes a Prüfer sequence over `p` labels into tree edges.
fn prufer_tree(seq: &[usize], p: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; p];
    for &x in seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(p.saturating_sub(1));
    for &x in seq {
        let leaf = (0..p).find(|&y| degree[y] == 1).expect("a leaf always exists");
        edges.push((leaf.min(x), leaf.max(x)));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..p).filter(|&y| degree[y] == 1).collect();
    if rest.len() == 2 {
        edges.push((rest[0], rest[1]));
    }
    edges
}

/// The literal definition: every clique partition of each component together
/// with every labelled tree over its parts. Exponentially slower than
/// [`brute_force_is_wpc`]; meant for cross-checking it on tiny graphs.
pub fn brute_force_is_wpc_prufer(g: &Graph, budget: OracleBudget) -> WpcVerdict {
    if g.n() > budget.max_n {
        return WpcVerdict::BudgetExceeded;
    }
    let mut clock = Clock::new(budget.max_time);
    let mut bags: Vec<VertexSet> = Vec::new();
    let mut links: Vec<(usize, usize)> = Vec::new();
    for comp in g.connected_components() {
        let (h, ids) = g.induced_subgraph(&comp).expect("component vertices are in range");
        let mut found: Option<(Vec<VertexSet>, Vec<(usize, usize)>)> = None;
        let mut expired = false;
        let (start, limit) = (clock.start, clock.limit);
        let outcome = clique_partitions(&h, &mut clock, &mut |labels| {
            let parts = bags_from_labels(labels);
            let p = parts.len();
            let len = p.saturating_sub(2);
            let total = p.pow(len as u32);
            for code in 0..total {
                let mut seq = Vec::with_capacity(len);
                let mut c = code;
                for _ in 0..len {
                    seq.push(c % p);
                    c /= p;
                }
                let tree = prufer_tree(&seq, p);
                let f = PartitionForest::new(h.n(), parts.clone(), tree.clone());
                if validate_partition_forest(&h, &f).is_none() {
                    found = Some((parts, tree));
                    return true;
                }
                if code % 4096 == 4095 && start.elapsed() > limit {
                    expired = true;
                    return true;
                }
            }
            false
        });
        if outcome.is_err() || expired {
            return WpcVerdict::BudgetExceeded;
        }
        let Some((parts, tree)) = found else {
            return WpcVerdict::NotWpc;
        };
        let offset = bags.len();
        bags.extend(parts.into_iter().map(|p| p.into_iter().map(|v| ids[v]).collect()));
        links.extend(tree.into_iter().map(|(a, b)| (a + offset, b + offset)));
    }
    WpcVerdict::Forest(PartitionForest::new(g.n(), bags, links).canonical())
}

/// One candidate route for an index: its vertex sequence and bitmasks of all
/// and of internal vertices.
#[derive(Debug, Clone)]
struct Route {
    vertices: Vec<usize>,
    all: u64,
    inner: u64,
}

/// Paths from `s` to `t` inside the domain mask that are induced in `G - st`,
/// plus the bare edge. Any solution can be shortcut to one made of these
/// without breaking disjointness, domains or distinctness. Routes with the
/// same internal vertex set are interchangeable, so one is kept per set.
fn candidate_paths(g: &Graph, s: usize, t: usize, domain: u64, clock: &mut Clock) -> Result<Vec<Route>, ()> {
    let mut out: Vec<Route> = Vec::new();
    if g.has_edge(s, t) {
        out.push(Route {
            vertices: vec![s, t],
            all: (1 << s) | (1 << t),
            inner: 0,
        });
    }
    let mut seen_inner = std::collections::HashSet::new();
    let mut path = vec![s];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        g: &Graph,
        t: usize,
        domain: u64,
        path: &mut Vec<usize>,
        mask: u64,
        out: &mut Vec<Route>,
        seen: &mut std::collections::HashSet<u64>,
        clock: &mut Clock,
    ) -> Result<(), ()> {
        if clock.expired() {
            return Err(());
        }
        let last = *path.last().expect("path is non-empty");
        let s = path[0];
        // An internal vertex adjacent to t must be the last one.
        let must_end = last != s && g.has_edge(last, t);
        for &w in g.neighbors(last) {
            if must_end && w != t {
                continue;
            }
            if mask & (1 << w) != 0 || domain & (1 << w) == 0 {
                continue;
            }
            if w == t {
                if path.len() >= 2 {
                    let inner = mask & !(1 << s);
                    if seen.insert(inner) {
                        let mut vertices = path.clone();
                        vertices.push(t);
                        out.push(Route {
                            vertices,
                            all: mask | (1 << t),
                            inner,
                        });
                    }
                }
                continue;
            }
            // Inducedness in G - st: the new vertex may touch only `last`
            // among the path vertices.
            let chord = path[..path.len() - 1].iter().any(|&p| g.has_edge(p, w));
            if chord {
                continue;
            }
            path.push(w);
            rec(g, t, domain, path, mask | (1 << w), out, seen, clock)?;
            path.pop();
        }
        Ok(())
    }
    rec(g, t, domain, &mut path, 1 << s, &mut out, &mut seen_inner, clock)?;
    Ok(out)
}

/// Connected vertex sets `C` with `S ⊆ C ⊆ U`, smallest first, as masks.
fn candidate_sets(g: &Graph, set: &[usize], domain: u64, clock: &mut Clock) -> Result<Vec<u64>, ()> {
    let base: u64 = set.iter().fold(0, |m, &v| m | (1 << v));
    let free: Vec<usize> = (0..g.n()).filter(|&v| domain & (1 << v) != 0 && base & (1 << v) == 0).collect();
    let mut out = Vec::new();
    for pick in 0u64..(1u64 << free.len()) {
        if clock.expired() {
            return Err(());
        }
        let mut mask = base;
        for (j, &v) in free.iter().enumerate() {
            if pick & (1 << j) != 0 {
                mask |= 1 << v;
            }
        }
        if connected_mask(g, mask, set[0]) {
            out.push(mask);
        }
    }
    out.sort_by_key(|m| (m.count_ones(), *m));
    Ok(out)
}

fn connected_mask(g: &Graph, mask: u64, start: usize) -> bool {
    let mut seen = 1u64 << start;
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &w in g.neighbors(u) {
            if mask & (1 << w) != 0 && seen & (1 << w) == 0 {
                seen |= 1 << w;
                stack.push(w);
            }
        }
    }
    seen == mask
}

fn domain_mask(inst: &DpInstance, i: usize) -> u64 {
    inst.domains[i].iter().fold(0, |m, &v| m | (1 << v))
}

fn mask_to_vec(mask: u64) -> VertexSet {
    (0..64).filter(|&v| mask & (1 << v) != 0).collect()
}

/// Exhaustive search over tuples of candidate paths (or connected sets for
/// the terminal-set variant), checking the variant's disjointness predicate.
pub fn brute_force_disjoint_paths(inst: &DpInstance, budget: OracleBudget) -> PathsVerdict {
    let g = &inst.graph;
    if g.n() > budget.max_n.min(64) || inst.k() > ORACLE_MAX_K {
        return PathsVerdict::BudgetExceeded;
    }
    let mut clock = Clock::new(budget.max_time);
    let k = inst.k();
    match &inst.terminals {
        Terminals::Pairs(pairs) => {
            let mut options = Vec::with_capacity(k);
            for (i, &(s, t)) in pairs.iter().enumerate() {
                match candidate_paths(g, s, t, domain_mask(inst, i), &mut clock) {
                    Ok(c) => options.push(c),
                    Err(()) => return PathsVerdict::BudgetExceeded,
                }
            }
            let totally = inst.variant.totally();
            let mut chosen: Vec<usize> = Vec::with_capacity(k);
            fn rec(
                i: usize,
                options: &[Vec<Route>],
                pairs: &[(usize, usize)],
                totally: bool,
                chosen: &mut Vec<usize>,
                clock: &mut Clock,
            ) -> Result<bool, ()> {
                if clock.expired() {
                    return Err(());
                }
                if i == options.len() {
                    return Ok(true);
                }
                let key = |j: usize| (pairs[j].0.min(pairs[j].1), pairs[j].0.max(pairs[j].1));
                for (c, r) in options[i].iter().enumerate() {
                    let clash = chosen.iter().enumerate().any(|(j, &cj)| {
                        let o = &options[j][cj];
                        r.inner & o.all != 0
                            || o.inner & r.all != 0
                            || (totally && r.inner == 0 && o.inner == 0 && key(i) == key(j))
                    });
                    if clash {
                        continue;
                    }
                    chosen.push(c);
                    if rec(i + 1, options, pairs, totally, chosen, clock)? {
                        return Ok(true);
                    }
                    chosen.pop();
                }
                Ok(false)
            }
            match rec(0, &options, pairs, totally, &mut chosen, &mut clock) {
                Err(()) => PathsVerdict::BudgetExceeded,
                Ok(false) => PathsVerdict::No,
                Ok(true) => PathsVerdict::Solution(Solution::Paths(
                    chosen
                        .iter()
                        .enumerate()
                        .map(|(i, &c)| options[i][c].vertices.clone())
                        .collect(),
                )),
            }
        }
        Terminals::Sets(sets) => {
            let mut options = Vec::with_capacity(k);
            for (i, set) in sets.iter().enumerate() {
                match candidate_sets(g, set, domain_mask(inst, i), &mut clock) {
                    Ok(c) => options.push(c),
                    Err(()) => return PathsVerdict::BudgetExceeded,
                }
            }
            fn rec(i: usize, options: &[Vec<u64>], used: u64, chosen: &mut Vec<u64>, clock: &mut Clock) -> Result<bool, ()> {
                if clock.expired() {
                    return Err(());
                }
                if i == options.len() {
                    return Ok(true);
                }
                for &m in &options[i] {
                    if m & used != 0 {
                        continue;
                    }
                    chosen.push(m);
                    if rec(i + 1, options, used | m, chosen, clock)? {
                        return Ok(true);
                    }
                    chosen.pop();
                }
                Ok(false)
            }
            let mut chosen = Vec::new();
            match rec(0, &options, 0, &mut chosen, &mut clock) {
                Err(()) => PathsVerdict::BudgetExceeded,
                Ok(false) => PathsVerdict::No,
                Ok(true) => PathsVerdict::Solution(Solution::Sets(chosen.into_iter().map(mask_to_vec).collect())),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::obstructions::{build_obstruction, ObstructionKind};
    use crate::paths::{validate_solution, Variant};

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn small_membership_examples() {
        let k3 = graph(3, &[(0, 1), (0, 2), (1, 2)]);
        match brute_force_is_wpc(&k3, OracleBudget::wpc()) {
            WpcVerdict::Forest(f) => assert_eq!(f.bags().len(), 1),
            other => panic!("{other:?}"),
        }
        let p5 = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert!(matches!(brute_force_is_wpc(&p5, OracleBudget::wpc()), WpcVerdict::Forest(_)));
        let o1 = build_obstruction(ObstructionKind::O1).unwrap();
        assert_eq!(brute_force_is_wpc(&o1, OracleBudget::wpc()), WpcVerdict::NotWpc);
        assert_eq!(brute_force_is_wpc_prufer(&o1, OracleBudget::wpc()), WpcVerdict::NotWpc);
        assert_eq!(brute_force_is_wpc(&Graph::empty(10), OracleBudget::wpc()), WpcVerdict::BudgetExceeded);
    }

    #[test]
    fn prufer_decoding_gives_trees() {
        assert_eq!(prufer_tree(&[], 2), vec![(0, 1)]);
        assert_eq!(prufer_tree(&[3, 3, 3], 5).len(), 4);
        assert!(prufer_tree(&[], 1).is_empty());
    }

    #[test]
    fn star_instance_and_heavy_edge() {
        let star = graph(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (1, 2), (1, 3), (1, 4), (1, 5)]);
        let inst = DpInstance::new(star, Variant::Srdp, Terminals::Pairs(vec![(2, 3), (4, 5)]), None).unwrap();
        match brute_force_disjoint_paths(&inst, OracleBudget::paths()) {
            PathsVerdict::Solution(s) => assert!(validate_solution(&inst, &s).is_ok()),
            other => panic!("{other:?}"),
        }
        let edge = graph(2, &[(0, 1)]);
        let tdp = DpInstance::new(edge.clone(), Variant::Tdp, Terminals::Pairs(vec![(0, 1), (0, 1)]), None).unwrap();
        assert_eq!(brute_force_disjoint_paths(&tdp, OracleBudget::paths()), PathsVerdict::No);
        let dp = DpInstance::new(edge, Variant::Dp, Terminals::Pairs(vec![(0, 1), (1, 0)]), None).unwrap();
        assert!(matches!(brute_force_disjoint_paths(&dp, OracleBudget::paths()), PathsVerdict::Solution(_)));
        let empty = DpInstance::new(Graph::empty(3), Variant::Dp, Terminals::Pairs(vec![]), None).unwrap();
        assert_eq!(
            brute_force_disjoint_paths(&empty, OracleBudget::paths()),
            PathsVerdict::Solution(Solution::Paths(vec![]))
        );
    }

    #[test]
    fn connected_sets() {
        let p4 = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let inst = DpInstance::new(p4.clone(), Variant::Srdcs, Terminals::Sets(vec![vec![0, 2]]), None).unwrap();
        assert_eq!(
            brute_force_disjoint_paths(&inst, OracleBudget::paths()),
            PathsVerdict::Solution(Solution::Sets(vec![vec![0, 1, 2]]))
        );
        let crossed = DpInstance::new(p4, Variant::Srdcs, Terminals::Sets(vec![vec![0, 2], vec![1, 3]]), None).unwrap();
        assert_eq!(brute_force_disjoint_paths(&crossed, OracleBudget::paths()), PathsVerdict::No);
    }
}
