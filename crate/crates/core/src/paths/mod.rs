//! Disjoint paths and disjoint connected subgraphs with per-index domains,
//! solved on well-partitioned chordal graphs through their partition forest.

mod feasibility;
mod marking;
mod solve;

use std::collections::{BTreeSet, HashSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{parse_graph, write_edge_list, Graph, GraphError, GraphFormat, VertexSet};
use crate::obstructions::ObstructionCertificate;
use crate::partition::PartitionForest;

pub use feasibility::{bag_feasible, BagWitness, Demand};
pub use marking::{mark_vertices, MarkedSets};
pub use solve::{extract_paths, normalize_instance, solve, solve_srdcs, solve_srdp, solve_srtdp};
pub(crate) use solve::{normalize, with_forest};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathsError {
    #[error("terminal {0} is not a vertex of the graph")]
    TerminalNotInGraph(usize),
    #[error("pair {0} has equal endpoints")]
    DegeneratePair(usize),
    #[error("terminal set {0} is empty")]
    EmptyTerminalSet(usize),
    #[error("terminal sets {0} and {1} overlap")]
    TerminalSetsOverlap(usize, usize),
    #[error("variant {0} expects {1}")]
    VariantMismatch(Variant, &'static str),
    #[error("expected {expected} domains, got {got}")]
    DomainCountMismatch { expected: usize, got: usize },
    #[error("domain {0} lists a vertex outside the graph")]
    DomainOutOfRange(usize),
    #[error("graph is not well-partitioned chordal")]
    NotWpc(Box<ObstructionCertificate>),
    #[error("supplied partition forest is invalid: {0}")]
    InvalidForest(String),
    #[error("feasibility witnesses are inconsistent for index {0}")]
    WitnessInconsistent(usize),
    #[error(transparent)]
    Parse(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// Internally vertex-disjoint paths, per-index domains.
    Srdp,
    /// Pairwise distinct, internally vertex-disjoint paths, per-index domains.
    Srtdp,
    /// Srdp with every domain equal to the whole vertex set.
    Dp,
    /// Srtdp with every domain equal to the whole vertex set.
    Tdp,
    /// Vertex-disjoint connected subgraphs, one per terminal set.
    Srdcs,
}

impl Variant {
    pub const ALL: [Variant; 5] = [Variant::Srdp, Variant::Srtdp, Variant::Dp, Variant::Tdp, Variant::Srdcs];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Srdp => "SRDP",
            Variant::Srtdp => "SRTDP",
            Variant::Dp => "DP",
            Variant::Tdp => "TDP",
            Variant::Srdcs => "SRDCS",
        }
    }

    pub fn from_name(s: &str) -> Option<Variant> {
        Variant::ALL.into_iter().find(|v| v.name().eq_ignore_ascii_case(s))
    }

    /// Paths must additionally be pairwise distinct.
    pub fn totally(self) -> bool {
        matches!(self, Variant::Srtdp | Variant::Tdp)
    }

    pub fn full_domains(self) -> bool {
        matches!(self, Variant::Dp | Variant::Tdp)
    }

    pub fn uses_sets(self) -> bool {
        self == Variant::Srdcs
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Terminals {
    Pairs(Vec<(usize, usize)>),
    Sets(Vec<VertexSet>),
}

impl Terminals {
    pub fn len(&self) -> usize {
        match self {
            Terminals::Pairs(p) => p.len(),
            Terminals::Sets(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Terminal vertices of index `i`.
    pub fn of(&self, i: usize) -> Vec<usize> {
        match self {
            Terminals::Pairs(p) => vec![p[i].0, p[i].1],
            Terminals::Sets(s) => s[i].clone(),
        }
    }
}

/// A problem instance. Domains are always stored explicitly and in repaired
/// form: each holds its own terminals and none of the other indices'.
#[derive(Debug, Clone, PartialEq)]
pub struct DpInstance {
    pub graph: Graph,
    pub forest: Option<PartitionForest>,
    pub variant: Variant,
    pub terminals: Terminals,
    pub domains: Vec<VertexSet>,
    /// Set when repair changed a caller-supplied domain.
    pub domains_repaired: bool,
}

impl DpInstance {
    /// Checks terminals and domains, then repairs the domains. `None` means
    /// every domain is the whole vertex set.
    pub fn new(
        graph: Graph,
        variant: Variant,
        terminals: Terminals,
        domains: Option<Vec<VertexSet>>,
    ) -> Result<Self, PathsError> {
        let n = graph.n();
        let k = terminals.len();
        match (&terminals, variant.uses_sets()) {
            (Terminals::Pairs(_), true) => return Err(PathsError::VariantMismatch(variant, "terminal sets")),
            (Terminals::Sets(_), false) => return Err(PathsError::VariantMismatch(variant, "terminal pairs")),
            _ => {}
        }
        for i in 0..k {
            let ts = terminals.of(i);
            if let Some(&v) = ts.iter().find(|&&v| v >= n) {
                return Err(PathsError::TerminalNotInGraph(v));
            }
            match &terminals {
                Terminals::Pairs(p) if p[i].0 == p[i].1 => return Err(PathsError::DegeneratePair(i)),
                Terminals::Sets(_) if ts.is_empty() => return Err(PathsError::EmptyTerminalSet(i)),
                _ => {}
            }
        }
        let mut terminals = terminals;
        if let Terminals::Sets(sets) = &mut terminals {
            let mut owner = vec![usize::MAX; n];
            for (i, set) in sets.iter_mut().enumerate() {
                set.sort_unstable();
                set.dedup();
                for &v in set.iter() {
                    if owner[v] != usize::MAX {
                        return Err(PathsError::TerminalSetsOverlap(owner[v], i));
                    }
                    owner[v] = i;
                }
            }
        }
        let raw = match domains {
            Some(d) if !variant.full_domains() => {
                if d.len() != k {
                    return Err(PathsError::DomainCountMismatch {
                        expected: k,
                        got: d.len(),
                    });
                }
                for (i, dom) in d.iter().enumerate() {
                    if dom.iter().any(|&v| v >= n) {
                        return Err(PathsError::DomainOutOfRange(i));
                    }
                }
                d
            }
            _ => vec![(0..n).collect(); k],
        };
        let mut all_terminals = vec![0usize; n];
        for i in 0..k {
            for v in terminals.of(i).into_iter().collect::<BTreeSet<_>>() {
                all_terminals[v] += 1;
            }
        }
        let mut repaired = false;
        let mut domains = Vec::with_capacity(k);
        for (i, dom) in raw.into_iter().enumerate() {
            let own: BTreeSet<usize> = terminals.of(i).into_iter().collect();
            let mut fixed: BTreeSet<usize> = dom
                .iter()
                .copied()
                .filter(|v| own.contains(v) || all_terminals[*v] == 0)
                .collect();
            fixed.extend(own.iter().copied());
            let fixed: VertexSet = fixed.into_iter().collect();
            let mut orig = dom;
            orig.sort_unstable();
            orig.dedup();
            if orig != fixed && !variant.full_domains() {
                repaired = true;
            }
            domains.push(fixed);
        }
        Ok(DpInstance {
            graph,
            forest: None,
            variant,
            terminals,
            domains,
            domains_repaired: repaired,
        })
    }

    pub fn with_forest(mut self, forest: PartitionForest) -> Self {
        self.forest = Some(forest);
        self
    }

    pub fn k(&self) -> usize {
        self.terminals.len()
    }

    /// Total number of terminal vertices.
    pub fn terminal_count(&self) -> usize {
        (0..self.k()).map(|i| self.terminals.of(i).len()).sum()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        match &self.terminals {
            Terminals::Pairs(p) => p,
            Terminals::Sets(_) => &[],
        }
    }

    pub fn sets(&self) -> &[VertexSet] {
        match &self.terminals {
            Terminals::Sets(s) => s,
            Terminals::Pairs(_) => &[],
        }
    }

    pub fn in_domain(&self, i: usize, v: usize) -> bool {
        self.domains[i].binary_search(&v).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Solution {
    Paths(Vec<Vec<usize>>),
    Sets(Vec<VertexSet>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Answer {
    Yes(Solution),
    No,
}

impl Answer {
    pub fn is_yes(&self) -> bool {
        matches!(self, Answer::Yes(_))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolutionError {
    #[error("expected {expected} components, got {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("solution shape does not match the variant")]
    WrongShape,
    #[error("path {0} does not join its terminals")]
    WrongEndpoints(usize),
    #[error("path {0} repeats a vertex or uses a non-edge")]
    NotAPath(usize),
    #[error("component {0} leaves its domain")]
    OutsideDomain(usize),
    #[error("components {0} and {1} share a forbidden vertex")]
    NotDisjoint(usize, usize),
    #[error("paths {0} and {1} coincide")]
    NotDistinct(usize, usize),
    #[error("set {0} misses a terminal or is disconnected")]
    BadSet(usize),
}

/// Paths are compared as vertex sequences up to reversal.
fn same_path(a: &[usize], b: &[usize]) -> bool {
    a == b || (a.len() == b.len() && a.iter().eq(b.iter().rev()))
}

/// Checks a solution against the problem definition alone.
pub fn validate_solution(inst: &DpInstance, sol: &Solution) -> Result<(), SolutionError> {
    let g = &inst.graph;
    let k = inst.k();
    match (sol, &inst.terminals) {
        (Solution::Paths(paths), Terminals::Pairs(pairs)) => {
            if paths.len() != k {
                return Err(SolutionError::WrongCount {
                    expected: k,
                    got: paths.len(),
                });
            }
            for (i, p) in paths.iter().enumerate() {
                let (s, t) = pairs[i];
                if p.len() < 2 || p[0] != s || p[p.len() - 1] != t {
                    return Err(SolutionError::WrongEndpoints(i));
                }
                let distinct: HashSet<usize> = p.iter().copied().collect();
                if distinct.len() != p.len() || p.iter().any(|&v| v >= g.n()) {
                    return Err(SolutionError::NotAPath(i));
                }
                if p.windows(2).any(|w| !g.has_edge(w[0], w[1])) {
                    return Err(SolutionError::NotAPath(i));
                }
                if p.iter().any(|&v| !inst.in_domain(i, v)) {
                    return Err(SolutionError::OutsideDomain(i));
                }
            }
            for i in 0..k {
                let inner: HashSet<usize> = paths[i][1..paths[i].len() - 1].iter().copied().collect();
                for j in 0..k {
                    if i != j && paths[j].iter().any(|v| inner.contains(v)) {
                        return Err(SolutionError::NotDisjoint(i.min(j), i.max(j)));
                    }
                    if i < j && inst.variant.totally() && same_path(&paths[i], &paths[j]) {
                        return Err(SolutionError::NotDistinct(i, j));
                    }
                }
            }
            Ok(())
        }
        (Solution::Sets(sets), Terminals::Sets(terms)) => {
            if sets.len() != k {
                return Err(SolutionError::WrongCount {
                    expected: k,
                    got: sets.len(),
                });
            }
            let mut owner = vec![usize::MAX; g.n()];
            for (i, f) in sets.iter().enumerate() {
                if f.iter().any(|&v| v >= g.n()) {
                    return Err(SolutionError::BadSet(i));
                }
                if f.iter().any(|&v| !inst.in_domain(i, v)) {
                    return Err(SolutionError::OutsideDomain(i));
                }
                let members: HashSet<usize> = f.iter().copied().collect();
                if terms[i].iter().any(|v| !members.contains(v)) {
                    return Err(SolutionError::BadSet(i));
                }
                for &v in &members {
                    if owner[v] != usize::MAX {
                        return Err(SolutionError::NotDisjoint(owner[v], i));
                    }
                    owner[v] = i;
                }
                let mut seen = HashSet::from([terms[i][0]]);
                let mut stack = vec![terms[i][0]];
                while let Some(u) = stack.pop() {
                    for &w in g.neighbors(u) {
                        if members.contains(&w) && seen.insert(w) {
                            stack.push(w);
                        }
                    }
                }
                if seen.len() != members.len() {
                    return Err(SolutionError::BadSet(i));
                }
            }
            Ok(())
        }
        _ => Err(SolutionError::WrongShape),
    }
}

fn perr(line: usize, reason: impl Into<String>) -> PathsError {
    PathsError::Parse(GraphError::Parse {
        line,
        reason: reason.into(),
    })
}

/// Parses an edge-list graph followed by instance lines `k`, `q`, `S`, `d`
/// and `variant`. `default_variant` applies when no `variant` line is given.
pub fn parse_instance(text: &str, default_variant: Option<Variant>) -> Result<DpInstance, PathsError> {
    let mut graph_text = String::new();
    let mut k: Option<usize> = None;
    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    let mut sets: Vec<(usize, VertexSet)> = Vec::new();
    let mut domains: Vec<(usize, VertexSet)> = Vec::new();
    let mut variant: Option<Variant> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks: Vec<&str> = raw.split_ascii_whitespace().collect();
        let nums = |from: usize| -> Result<Vec<usize>, PathsError> {
            toks[from..]
                .iter()
                .map(|t| t.parse::<usize>().map_err(|_| perr(line, format!("bad integer `{t}`"))))
                .collect()
        };
        match toks.first().copied() {
            Some("k") => {
                let v = nums(1)?;
                if v.len() != 1 || k.is_some() {
                    return Err(perr(line, "malformed `k` line"));
                }
                k = Some(v[0]);
            }
            Some("q") => {
                let v = nums(1)?;
                if v.len() != 3 {
                    return Err(perr(line, "expected `q <i> <s> <t>`"));
                }
                pairs.push((v[0], v[1], v[2]));
            }
            Some("S") => {
                let v = nums(1)?;
                let (&i, rest) = v.split_first().ok_or_else(|| perr(line, "missing index"))?;
                sets.push((i, rest.to_vec()));
            }
            Some("d") => {
                let v = nums(1)?;
                let (&i, rest) = v.split_first().ok_or_else(|| perr(line, "missing index"))?;
                domains.push((i, rest.to_vec()));
            }
            Some("variant") => {
                let name = toks.get(1).ok_or_else(|| perr(line, "missing variant name"))?;
                variant = Some(Variant::from_name(name).ok_or_else(|| perr(line, format!("unknown variant `{name}`")))?);
            }
            // Keep line numbers aligned for graph parse errors.
            _ => {
                graph_text.push_str(raw);
            }
        }
        graph_text.push('\n');
    }
    let graph = parse_graph(graph_text.as_bytes(), GraphFormat::EdgeList)?;
    let variant = variant
        .or(default_variant)
        .ok_or_else(|| perr(0, "no variant given"))?;
    let k = k.ok_or_else(|| perr(0, "missing `k` line"))?;
    let slot = |items: &mut Vec<Option<VertexSet>>, i: usize, v: VertexSet, what: &str| -> Result<(), PathsError> {
        if i >= k || items[i].is_some() {
            return Err(perr(0, format!("bad or repeated {what} index {i}")));
        }
        items[i] = Some(v);
        Ok(())
    };
    let terminals = if variant.uses_sets() {
        if !pairs.is_empty() {
            return Err(PathsError::VariantMismatch(variant, "terminal sets"));
        }
        let mut items = vec![None; k];
        for (i, s) in sets {
            slot(&mut items, i, s, "set")?;
        }
        Terminals::Sets(
            items
                .into_iter()
                .enumerate()
                .map(|(i, s)| s.ok_or_else(|| perr(0, format!("set {i} missing"))))
                .collect::<Result<_, _>>()?,
        )
    } else {
        if !sets.is_empty() {
            return Err(PathsError::VariantMismatch(variant, "terminal pairs"));
        }
        let mut items = vec![None; k];
        for (i, s, t) in pairs {
            slot(&mut items, i, vec![s, t], "pair")?;
        }
        Terminals::Pairs(
            items
                .into_iter()
                .enumerate()
                .map(|(i, p)| p.map(|p| (p[0], p[1])).ok_or_else(|| perr(0, format!("pair {i} missing"))))
                .collect::<Result<_, _>>()?,
        )
    };
    let domains = if domains.is_empty() {
        None
    } else {
        let n = graph.n();
        let mut items: Vec<Option<VertexSet>> = vec![None; k];
        for (i, d) in domains {
            slot(&mut items, i, d, "domain")?;
        }
        Some(items.into_iter().map(|d| d.unwrap_or_else(|| (0..n).collect())).collect())
    };
    DpInstance::new(graph, variant, terminals, domains)
}

fn push_list(out: &mut String, head: &str, items: &[usize]) {
    out.push_str(head);
    for v in items {
        write!(out, " {v}").unwrap();
    }
    out.push('\n');
}

/// Canonical instance text. Domains are written only for set-restricted
/// variants, and always in repaired form.
pub fn write_instance(inst: &DpInstance) -> String {
    let mut out = write_edge_list(&inst.graph);
    writeln!(out, "k {}", inst.k()).unwrap();
    match &inst.terminals {
        Terminals::Pairs(p) => {
            for (i, &(s, t)) in p.iter().enumerate() {
                writeln!(out, "q {i} {s} {t}").unwrap();
            }
        }
        Terminals::Sets(sets) => {
            for (i, s) in sets.iter().enumerate() {
                push_list(&mut out, &format!("S {i}"), s);
            }
        }
    }
    if !inst.variant.full_domains() {
        for (i, d) in inst.domains.iter().enumerate() {
            push_list(&mut out, &format!("d {i}"), d);
        }
    }
    writeln!(out, "variant {}", inst.variant).unwrap();
    out
}

pub fn write_answer(answer: &Answer) -> String {
    let mut out = String::new();
    match answer {
        Answer::No => out.push_str("solution NO\n"),
        Answer::Yes(Solution::Paths(paths)) => {
            out.push_str("solution YES\n");
            for (i, p) in paths.iter().enumerate() {
                push_list(&mut out, &format!("path {i}"), p);
            }
        }
        Answer::Yes(Solution::Sets(sets)) => {
            out.push_str("solution YES\n");
            for (i, s) in sets.iter().enumerate() {
                push_list(&mut out, &format!("set {i}"), s);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star() -> Graph {
        Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (1, 2), (1, 3), (1, 4), (1, 5)]).unwrap()
    }

    #[test]
    fn domains_are_repaired() {
        let inst = DpInstance::new(
            star(),
            Variant::Srdp,
            Terminals::Pairs(vec![(2, 3), (4, 5)]),
            Some(vec![vec![0, 1, 4], vec![0]]),
        )
        .unwrap();
        assert_eq!(inst.domains, vec![vec![0, 1, 2, 3], vec![0, 4, 5]]);
        assert!(inst.domains_repaired);
        let full = DpInstance::new(star(), Variant::Dp, Terminals::Pairs(vec![(2, 3)]), None).unwrap();
        assert_eq!(full.domains[0], (0..6).collect::<Vec<_>>());
        assert!(!full.domains_repaired);
    }

    #[test]
    fn rejects_bad_terminals() {
        let g = star();
        assert_eq!(
            DpInstance::new(g.clone(), Variant::Dp, Terminals::Pairs(vec![(2, 2)]), None),
            Err(PathsError::DegeneratePair(0))
        );
        assert_eq!(
            DpInstance::new(g.clone(), Variant::Dp, Terminals::Pairs(vec![(2, 9)]), None),
            Err(PathsError::TerminalNotInGraph(9))
        );
        assert_eq!(
            DpInstance::new(g, Variant::Srdcs, Terminals::Sets(vec![vec![2, 3], vec![3]]), None),
            Err(PathsError::TerminalSetsOverlap(0, 1))
        );
    }

    #[test]
    fn validation_catches_shared_internal_vertex() {
        let inst = DpInstance::new(star(), Variant::Dp, Terminals::Pairs(vec![(2, 3), (4, 5)]), None).unwrap();
        assert_eq!(
            validate_solution(&inst, &Solution::Paths(vec![vec![2, 0, 3], vec![4, 1, 5]])),
            Ok(())
        );
        assert_eq!(
            validate_solution(&inst, &Solution::Paths(vec![vec![2, 0, 3], vec![4, 0, 5]])),
            Err(SolutionError::NotDisjoint(0, 1))
        );
        let edge = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let twice = |v| DpInstance::new(edge.clone(), v, Terminals::Pairs(vec![(0, 1), (0, 1)]), None).unwrap();
        let bare = Solution::Paths(vec![vec![0, 1], vec![0, 1]]);
        assert_eq!(validate_solution(&twice(Variant::Dp), &bare), Ok(()));
        assert_eq!(
            validate_solution(&twice(Variant::Tdp), &bare),
            Err(SolutionError::NotDistinct(0, 1))
        );
    }

    #[test]
    fn instance_text_round_trip() {
        let text = "p graph 3 2\ne 0 1\ne 1 2\nk 1\nq 0 0 2\nd 0 1\nvariant SRDP\n";
        let inst = parse_instance(text, None).unwrap();
        assert_eq!(inst.domains, vec![vec![0, 1, 2]]);
        let again = parse_instance(&write_instance(&inst), None).unwrap();
        assert_eq!(write_instance(&again), write_instance(&inst));
        let sets = "p graph 3 2\ne 0 1\ne 1 2\nk 1\nS 0 0 2\nvariant SRDCS\n";
        assert_eq!(parse_instance(sets, None).unwrap().sets(), &[vec![0, 2]]);
        assert!(parse_instance("p graph 2 1\ne 0 1\nk 1\nq 0 0 1\n", None).is_err());
        assert!(parse_instance("p graph 2 1\ne 0 1\nk 1\nq 0 0 1\n", Some(Variant::Dp)).is_ok());
    }
}
