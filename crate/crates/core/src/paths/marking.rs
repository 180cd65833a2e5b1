//! Vertex marking: per-index candidate sets small enough for brute force
//! inside a bag, yet rich enough to keep some solution alive.

use std::collections::{BTreeSet, HashMap};

use crate::graph::VertexSet;
use crate::partition::PartitionForest;

use super::{DpInstance, Terminals};

/// A bag visited by an index's route together with its route neighbors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteStop {
    pub bag: usize,
    pub sides: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct MarkedSets {
    /// Marked vertices per index, never containing the index's own terminals.
    pub marks: Vec<VertexSet>,
    /// Heavy indices: terminals joined by an edge shared with another index.
    pub heavy: Vec<bool>,
    /// Bags visited per non-heavy index: a bag path for pairs, the spanning
    /// subtree for terminal sets.
    pub routes: Vec<Vec<RouteStop>>,
    /// Some index has an unroutable stop; the instance is a NO-instance.
    pub blocked: bool,
    /// Bags meeting a light index's marks.
    pub marked_forest: Vec<usize>,
    /// `M_i ∩ B` keyed by `(index, bag)`.
    pub(crate) by_bag: HashMap<(usize, usize), Vec<usize>>,
    /// Route stops per bag as `(index, position in route)`.
    pub(crate) stops_at: HashMap<usize, Vec<(usize, usize)>>,
}

impl MarkedSets {
    pub fn light_count(&self) -> usize {
        self.heavy.iter().filter(|&&h| !h).count()
    }

    /// Degree-one bags of the sub-forest induced by `marked_forest`.
    pub fn marked_forest_leaves(&self, forest: &PartitionForest) -> usize {
        let inside: BTreeSet<usize> = self.marked_forest.iter().copied().collect();
        self.marked_forest
            .iter()
            .filter(|&&b| forest.bag_neighbors(b).iter().filter(|c| inside.contains(c)).count() == 1)
            .count()
    }

    /// Bags where some route stops, ascending.
    pub fn route_bags(&self) -> Vec<usize> {
        let mut bags: Vec<usize> = self.stops_at.keys().copied().collect();
        bags.sort_unstable();
        bags
    }

    pub fn marks_in_bag(&self, index: usize, bag: usize) -> &[usize] {
        self.by_bag.get(&(index, bag)).map_or(&[], |v| v.as_slice())
    }
}

/// Up to `cap` lowest-id vertices of `side` inside the domain of `i` and not
/// among `exclude`.
fn pick(inst: &DpInstance, i: usize, side: &[usize], exclude: &[usize], cap: usize) -> Vec<usize> {
    side.iter()
        .copied()
        .filter(|v| !exclude.contains(v) && inst.in_domain(i, *v))
        .take(cap)
        .collect()
}

/// Route of index `i`: the bag path between the pair's bags, or the minimal
/// subtree spanning every bag that holds a terminal. `None` when the
/// terminals lie in different trees.
fn route(forest: &PartitionForest, terminals: &[usize]) -> Option<Vec<RouteStop>> {
    let first = forest.bag_of(terminals[0]);
    let mut links: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut bags: Vec<usize> = vec![first];
    let mut seen: BTreeSet<usize> = BTreeSet::from([first]);
    for &t in &terminals[1..] {
        let path = forest.tree_path(first, forest.bag_of(t)).ok()?;
        for w in path.windows(2) {
            links.insert((w[0], w[1]));
            links.insert((w[1], w[0]));
        }
        for b in path {
            if seen.insert(b) {
                bags.push(b);
            }
        }
    }
    if terminals.len() == 2 {
        // Keep bag-path order for pairs.
        bags = forest.tree_path(first, forest.bag_of(terminals[1])).ok()?;
    }
    Some(
        bags.into_iter()
            .map(|bag| RouteStop {
                bag,
                sides: links.range((bag, 0)..(bag + 1, 0)).map(|&(_, c)| c).collect(),
            })
            .collect(),
    )
}

/// Marks candidate vertices. Pair indices take up to `2k` vertices from each
/// side of every link on their bag path; heavy indices take up to `2k`
/// common neighbors of their terminal edge; terminal-set indices take up to
/// `s` (total terminal count) vertices per link side of their subtree.
pub fn mark_vertices(inst: &DpInstance, heavy: &[bool]) -> MarkedSets {
    let g = &inst.graph;
    let forest = inst.forest.as_ref().expect("marking needs a partition forest");
    let k = inst.k();
    let cap = match inst.terminals {
        Terminals::Pairs(_) => 2 * k,
        Terminals::Sets(_) => inst.terminal_count(),
    };
    let mut out = MarkedSets {
        marks: vec![Vec::new(); k],
        heavy: heavy.to_vec(),
        routes: vec![Vec::new(); k],
        ..Default::default()
    };
    let mut light_bags = BTreeSet::new();
    for i in 0..k {
        let own = inst.terminals.of(i);
        let mut chosen: BTreeSet<usize> = BTreeSet::new();
        if heavy[i] {
            let (x, y) = (own[0], own[1]);
            let (a, b) = if g.degree(x) <= g.degree(y) { (x, y) } else { (y, x) };
            let home = [forest.bag_of(x), forest.bag_of(y)];
            let mut common: Vec<usize> = g
                .neighbors(a)
                .iter()
                .copied()
                .filter(|&z| z != b && g.has_edge(z, b) && inst.in_domain(i, z))
                .collect();
            common.sort_by_key(|&z| (!home.contains(&forest.bag_of(z)), z));
            chosen.extend(common.into_iter().take(cap));
        } else {
            let Some(stops) = route(forest, &own) else {
                out.blocked = true;
                continue;
            };
            for stop in &stops {
                for &c in &stop.sides {
                    let bd = forest.boundary(g, stop.bag, c).expect("route follows links");
                    let picked = pick(inst, i, bd, &own, cap);
                    let served = own.iter().any(|t| bd.binary_search(t).is_ok());
                    if picked.is_empty() && !served {
                        out.blocked = true;
                    }
                    chosen.extend(picked);
                }
            }
            for (pos, stop) in stops.iter().enumerate() {
                out.stops_at.entry(stop.bag).or_default().push((i, pos));
            }
            out.routes[i] = stops;
        }
        for &v in &chosen {
            let b = forest.bag_of(v);
            out.by_bag.entry((i, b)).or_default().push(v);
            if !heavy[i] {
                light_bags.insert(b);
            }
        }
        out.marks[i] = chosen.into_iter().collect();
    }
    if out.blocked {
        // A NO-instance: drop the marks so the size bounds stay meaningful.
        out.marks.iter_mut().for_each(Vec::clear);
        out.by_bag.clear();
        light_bags.clear();
        out.stops_at.clear();
    }
    out.marked_forest = light_bags.into_iter().collect();
    out
}
