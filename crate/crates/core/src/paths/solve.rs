//! Solvers: normalize, mark, decide every bag, then splice paths from the
//! per-bag witnesses.

use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap, HashSet};

use crate::graph::Graph;
use crate::partition::validate_partition_forest;
use crate::recognizer::{recognize, Certificate};

use super::feasibility::{demands_at, solve_demands, BagWitness};
use super::marking::{mark_vertices, MarkedSets};
use super::{Answer, DpInstance, PathsError, Solution, Terminals, Variant};

/// A normalized instance plus the bookkeeping to lift solutions back.
pub(crate) struct Normalized<'a> {
    /// Borrowed when nothing was dropped.
    pub inst: Cow<'a, DpInstance>,
    /// Original index of each surviving index.
    pub kept: Vec<usize>,
    /// Survivors whose terminals form an edge carrying two or more indices.
    pub heavy: Vec<bool>,
}

pub(crate) fn normalize(inst: &DpInstance) -> Normalized<'_> {
    let k = inst.k();
    let (kept, heavy): (Vec<usize>, Vec<bool>) = match &inst.terminals {
        Terminals::Sets(_) => ((0..k).collect(), vec![false; k]),
        Terminals::Pairs(pairs) => {
            let g = &inst.graph;
            let key = |&(s, t): &(usize, usize)| (s.min(t), s.max(t));
            let mut weight: HashMap<(usize, usize), usize> = HashMap::new();
            for p in pairs {
                if g.has_edge(p.0, p.1) {
                    *weight.entry(key(p)).or_default() += 1;
                }
            }
            (0..k)
                .filter_map(|i| {
                    let p = &pairs[i];
                    if !g.has_edge(p.0, p.1) {
                        Some((i, false))
                    } else if inst.variant.totally() && weight[&key(p)] >= 2 {
                        Some((i, true))
                    } else {
                        None
                    }
                })
                .unzip()
        }
    };
    if kept.len() == k {
        return Normalized {
            inst: Cow::Borrowed(inst),
            kept,
            heavy,
        };
    }
    let terminals = match &inst.terminals {
        Terminals::Pairs(p) => Terminals::Pairs(kept.iter().map(|&i| p[i]).collect()),
        Terminals::Sets(s) => Terminals::Sets(kept.iter().map(|&i| s[i].clone()).collect()),
    };
    let reduced = DpInstance {
        graph: inst.graph.clone(),
        forest: inst.forest.clone(),
        variant: inst.variant,
        terminals,
        // Removed pairs keep their terminals forbidden to the others.
        domains: kept.iter().map(|&i| inst.domains[i].clone()).collect(),
        domains_repaired: inst.domains_repaired,
    };
    Normalized {
        inst: Cow::Owned(reduced),
        kept,
        heavy,
    }
}

/// Drops pairs whose terminals are adjacent and that can take the bare edge
/// without competing: every such pair for the internally-disjoint variants,
/// and pairs alone on their edge for the totally-disjoint ones.
pub fn normalize_instance(inst: &DpInstance) -> DpInstance {
    normalize(inst).inst.into_owned()
}

/// Attaches a partition forest, computing one when none was supplied.
pub(crate) fn with_forest(inst: &DpInstance) -> Result<Cow<'_, DpInstance>, PathsError> {
    match &inst.forest {
        Some(f) => match validate_partition_forest(&inst.graph, f) {
            None => Ok(Cow::Borrowed(inst)),
            Some(v) => Err(PathsError::InvalidForest(v.to_string())),
        },
        None => match recognize(&inst.graph) {
            Certificate::Accepted(f) => Ok(Cow::Owned(inst.clone().with_forest(f))),
            Certificate::Rejected(c) => Err(PathsError::NotWpc(Box::new(c))),
        },
    }
}

/// Dispatches on the instance variant.
pub fn solve(inst: &DpInstance) -> Result<Answer, PathsError> {
    match inst.variant {
        Variant::Srdp | Variant::Dp => solve_srdp(inst),
        Variant::Srtdp | Variant::Tdp => solve_srtdp(inst),
        Variant::Srdcs => solve_srdcs(inst),
    }
}

/// Feasibility of every bag on some route; `None` on the first failure.
fn decide_all(inst: &DpInstance, marks: &MarkedSets, indices: &[usize]) -> Option<HashMap<usize, BagWitness>> {
    let mut out = HashMap::new();
    for bag in marks.route_bags() {
        let w = solve_demands(&demands_at(inst, marks, bag, indices, &|_| false))?;
        out.insert(bag, w);
    }
    Some(out)
}

/// Lifts a solution of the normalized instance back to the original indices;
/// dropped pairs take their bare edge.
fn lift(orig: &DpInstance, norm: &Normalized<'_>, sol: Solution) -> Solution {
    match sol {
        Solution::Sets(s) => Solution::Sets(s),
        Solution::Paths(found) => {
            let mut paths: Vec<Vec<usize>> = orig.pairs().iter().map(|&(s, t)| vec![s, t]).collect();
            for (j, p) in found.into_iter().enumerate() {
                paths[norm.kept[j]] = p;
            }
            Solution::Paths(paths)
        }
    }
}

pub fn solve_srdp(inst: &DpInstance) -> Result<Answer, PathsError> {
    let inst = with_forest(inst)?;
    let norm = normalize(&inst);
    let marks = mark_vertices(&norm.inst, &norm.heavy);
    if marks.blocked {
        return Ok(Answer::No);
    }
    let all: Vec<usize> = (0..norm.inst.k()).collect();
    let Some(witnesses) = decide_all(&norm.inst, &marks, &all) else {
        return Ok(Answer::No);
    };
    let sol = extract_paths(&norm.inst, &marks, &witnesses)?;
    Ok(Answer::Yes(lift(&inst, &norm, sol)))
}

pub fn solve_srdcs(inst: &DpInstance) -> Result<Answer, PathsError> {
    let inst = with_forest(inst)?;
    let norm = normalize(&inst);
    let marks = mark_vertices(&norm.inst, &norm.heavy);
    if marks.blocked {
        return Ok(Answer::No);
    }
    let all: Vec<usize> = (0..norm.inst.k()).collect();
    let Some(witnesses) = decide_all(&norm.inst, &marks, &all) else {
        return Ok(Answer::No);
    };
    Ok(Answer::Yes(extract_paths(&norm.inst, &marks, &witnesses)?))
}

/// Heavy edges first get an assignment (one index takes the edge, the rest
/// take distinct marked common neighbors); the light indices are then
/// decided with those middles removed from their marks.
pub fn solve_srtdp(inst: &DpInstance) -> Result<Answer, PathsError> {
    let inst = with_forest(inst)?;
    let norm = normalize(&inst);
    let ninst = &norm.inst;
    let forest = ninst.forest.as_ref().expect("forest attached");
    let marks = mark_vertices(ninst, &norm.heavy);
    if marks.blocked {
        return Ok(Answer::No);
    }
    let k = ninst.k();
    let light: Vec<usize> = (0..k).filter(|&i| !norm.heavy[i]).collect();
    let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for i in (0..k).filter(|&i| norm.heavy[i]) {
        let (s, t) = ninst.pairs()[i];
        groups.entry((s.min(t), s.max(t))).or_default().push(i);
    }
    let groups: Vec<Vec<usize>> = groups.into_values().collect();

    let touched: HashSet<usize> = (0..k)
        .filter(|&i| norm.heavy[i])
        .flat_map(|i| marks.marks[i].iter().map(|&z| forest.bag_of(z)))
        .collect();
    let mut witnesses = HashMap::new();
    let mut affected = Vec::new();
    for bag in marks.route_bags() {
        if touched.contains(&bag) {
            affected.push(bag);
            continue;
        }
        match solve_demands(&demands_at(ninst, &marks, bag, &light, &|_| false)) {
            Some(w) => {
                witnesses.insert(bag, w);
            }
            None => return Ok(Answer::No),
        }
    }

    struct Search<'a> {
        inst: &'a DpInstance,
        marks: &'a MarkedSets,
        groups: &'a [Vec<usize>],
        light: &'a [usize],
        affected: &'a [usize],
        middle: HashMap<usize, usize>,
        bare: Vec<usize>,
    }
    impl Search<'_> {
        fn leaf(&self) -> Option<HashMap<usize, BagWitness>> {
            let used: HashSet<usize> = self.middle.values().copied().collect();
            let mut out = HashMap::new();
            for &bag in self.affected {
                let d = demands_at(self.inst, self.marks, bag, self.light, &|v| used.contains(&v));
                out.insert(bag, solve_demands(&d)?);
            }
            Some(out)
        }

        fn place(&mut self, group: usize, rest: &[usize]) -> Option<HashMap<usize, BagWitness>> {
            let Some((&i, tail)) = rest.split_first() else {
                return self.edge(group + 1);
            };
            let candidates = self.marks.marks[i].clone();
            for z in candidates {
                if self.middle.values().any(|&u| u == z) {
                    continue;
                }
                self.middle.insert(i, z);
                if let Some(found) = self.place(group, tail) {
                    return Some(found);
                }
                self.middle.remove(&i);
            }
            None
        }

        fn edge(&mut self, group: usize) -> Option<HashMap<usize, BagWitness>> {
            if group == self.groups.len() {
                return self.leaf();
            }
            let members = &self.groups[group];
            for (pos, &bare) in members.iter().enumerate() {
                let rest: Vec<usize> = members.iter().enumerate().filter(|&(p, _)| p != pos).map(|(_, &i)| i).collect();
                self.bare.push(bare);
                if let Some(found) = self.place(group, &rest) {
                    return Some(found);
                }
                self.bare.pop();
            }
            None
        }
    }
    let mut search = Search {
        inst: ninst,
        marks: &marks,
        groups: &groups,
        light: &light,
        affected: &affected,
        middle: HashMap::new(),
        bare: Vec::new(),
    };
    let Some(found) = search.edge(0) else {
        return Ok(Answer::No);
    };
    witnesses.extend(found);
    let Solution::Paths(mut paths) = extract_paths(ninst, &marks, &witnesses)? else {
        unreachable!("pair instances yield paths")
    };
    for (i, path) in paths.iter_mut().enumerate() {
        if norm.heavy[i] {
            let (s, t) = ninst.pairs()[i];
            *path = match search.middle.get(&i) {
                Some(&z) => vec![s, z, t],
                None => vec![s, t],
            };
        }
    }
    Ok(Answer::Yes(lift(&inst, &norm, Solution::Paths(paths))))
}

/// Shortcuts a walk to an induced path. Chords in a walk spliced along a
/// bag path only join vertices of equal or adjacent bags, which sit at most
/// a few positions apart, so a short look-ahead window suffices.
fn shortcut(g: &Graph, walk: &[usize]) -> Option<Vec<usize>> {
    const WINDOW: usize = 8;
    let mut out = vec![walk[0]];
    let mut pos = 0;
    while pos + 1 < walk.len() {
        let cur = walk[pos];
        let end = (pos + WINDOW).min(walk.len() - 1);
        let next = (pos + 1..=end).rev().find(|&j| g.has_edge(cur, walk[j]))?;
        out.push(walk[next]);
        pos = next;
    }
    Some(out)
}

/// Assembles the solution from per-bag witnesses: for pairs the walk
/// `s, x1, y2, x2, …, t` along the bag path, deduplicated and shortcut to an
/// induced path; for terminal sets the terminals plus every vertex labelled
/// with the index. Heavy indices are left empty for the caller.
pub fn extract_paths(
    inst: &DpInstance,
    marks: &MarkedSets,
    witnesses: &HashMap<usize, BagWitness>,
) -> Result<Solution, PathsError> {
    let g = &inst.graph;
    let forest = inst.forest.as_ref().expect("forest attached");
    let serve = |i: usize, bag: usize, side: usize, own: &[usize]| -> Result<usize, PathsError> {
        let bd = forest.boundary(g, bag, side).map_err(|_| PathsError::WitnessInconsistent(i))?;
        if let Some(&t) = own.iter().find(|t| bd.binary_search(t).is_ok()) {
            return Ok(t);
        }
        witnesses
            .get(&bag)
            .and_then(|w| w.serving.get(&(i, side)))
            .copied()
            .ok_or(PathsError::WitnessInconsistent(i))
    };
    match &inst.terminals {
        Terminals::Pairs(pairs) => {
            let mut paths = Vec::with_capacity(pairs.len());
            for (i, &(s, t)) in pairs.iter().enumerate() {
                if marks.heavy.get(i).copied().unwrap_or(false) {
                    paths.push(Vec::new());
                    continue;
                }
                let route = &marks.routes[i];
                let own = [s, t];
                let mut walk = vec![s];
                for (j, stop) in route.iter().enumerate() {
                    if j > 0 {
                        walk.push(serve(i, stop.bag, route[j - 1].bag, &own)?);
                    }
                    if j + 1 < route.len() {
                        walk.push(serve(i, stop.bag, route[j + 1].bag, &own)?);
                    }
                }
                walk.push(t);
                walk.dedup();
                paths.push(shortcut(g, &walk).ok_or(PathsError::WitnessInconsistent(i))?);
            }
            Ok(Solution::Paths(paths))
        }
        Terminals::Sets(sets) => {
            let mut out: Vec<Vec<usize>> = sets.clone();
            for w in witnesses.values() {
                for (&(i, _), &v) in &w.serving {
                    out[i].push(v);
                }
            }
            for f in out.iter_mut() {
                f.sort_unstable();
                f.dedup();
            }
            Ok(Solution::Sets(out))
        }
    }
}
