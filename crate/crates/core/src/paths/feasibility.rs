//! Per-bag feasibility: can every index routed through a bag be given its own
//! boundary vertices, with no vertex serving two indices?

use std::collections::HashMap;

use super::marking::MarkedSets;
use super::DpInstance;

/// The open sides of one index in one bag: for each route neighbor whose
/// boundary holds no terminal of the index, the marked candidates there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Demand {
    pub index: usize,
    pub sides: Vec<usize>,
    pub candidates: Vec<Vec<usize>>,
}

/// A labelled selection `X ⊆ B`, recorded as the vertex serving each
/// `(index, route neighbor)` side.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BagWitness {
    pub serving: HashMap<(usize, usize), usize>,
}

impl BagWitness {
    /// The labelling `λ` as (vertex, index) pairs, sorted.
    pub fn labels(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self.serving.iter().map(|(&(i, _), &v)| (v, i)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Demands of `indices` at `bag`, with candidates drawn from the marks minus
/// `banned`.
pub(crate) fn demands_at(
    inst: &DpInstance,
    marks: &MarkedSets,
    bag: usize,
    indices: &[usize],
    banned: &dyn Fn(usize) -> bool,
) -> Vec<Demand> {
    let g = &inst.graph;
    let forest = inst.forest.as_ref().expect("feasibility needs a partition forest");
    let mut out = Vec::new();
    let Some(stops) = marks.stops_at.get(&bag) else {
        return out;
    };
    for &(i, pos) in stops {
        if !indices.contains(&i) {
            continue;
        }
        let stop = &marks.routes[i][pos];
        let own = inst.terminals.of(i);
        let pool = marks.marks_in_bag(i, bag);
        let mut demand = Demand {
            index: i,
            sides: Vec::new(),
            candidates: Vec::new(),
        };
        for &c in &stop.sides {
            let bd = forest.boundary(g, bag, c).expect("route follows links");
            if own.iter().any(|t| bd.binary_search(t).is_ok()) {
                continue;
            }
            demand.sides.push(c);
            demand
                .candidates
                .push(pool.iter().copied().filter(|&v| !banned(v) && bd.binary_search(&v).is_ok()).collect());
        }
        if !demand.sides.is_empty() {
            out.push(demand);
        }
    }
    out
}

/// Set partitions of `0..d` as restricted-growth strings.
fn set_partitions(d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; d];
    fn rec(pos: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max + 1 {
            cur[pos] = b;
            rec(pos + 1, max.max(b), cur, out);
        }
    }
    if d == 0 {
        return vec![vec![]];
    }
    rec(1, 0, &mut cur, &mut out);
    out
}

/// A group of sides of one index served by a single vertex.
#[derive(Clone)]
struct Group {
    index: usize,
    sides: Vec<usize>,
    candidates: Vec<usize>,
}

/// Kuhn's augmenting-path matching of groups to distinct vertices.
fn match_groups(groups: &[Group]) -> Option<Vec<usize>> {
    let mut owner: HashMap<usize, usize> = HashMap::new();
    fn augment(g: usize, groups: &[Group], owner: &mut HashMap<usize, usize>, seen: &mut Vec<usize>) -> bool {
        for &v in &groups[g].candidates {
            if seen.contains(&v) {
                continue;
            }
            seen.push(v);
            let free = match owner.get(&v) {
                None => true,
                Some(&h) => augment(h, groups, owner, seen),
            };
            if free {
                owner.insert(v, g);
                return true;
            }
        }
        false
    }
    for g in 0..groups.len() {
        let mut seen = Vec::new();
        if !augment(g, groups, &mut owner, &mut seen) {
            return None;
        }
    }
    let mut assigned = vec![usize::MAX; groups.len()];
    for (v, g) in owner {
        assigned[g] = v;
    }
    Some(assigned)
}

/// Decides one bag. Each index may serve its sides with one shared vertex
/// or several; every grouping is tried and the groups are then matched to
/// distinct candidates. Indices with fewer candidates are placed first.
pub(crate) fn solve_demands(demands: &[Demand]) -> Option<BagWitness> {
    let mut order: Vec<usize> = (0..demands.len()).collect();
    order.sort_by_key(|&d| demands[d].candidates.iter().map(Vec::len).sum::<usize>());
    let options: Vec<Vec<Vec<Group>>> = order
        .iter()
        .map(|&d| {
            let dem = &demands[d];
            set_partitions(dem.sides.len())
                .into_iter()
                .filter_map(|labels| {
                    let blocks = labels.iter().max().map_or(0, |m| m + 1);
                    let mut groups = Vec::with_capacity(blocks);
                    for b in 0..blocks {
                        let members: Vec<usize> = (0..labels.len()).filter(|&j| labels[j] == b).collect();
                        let mut cand = dem.candidates[members[0]].clone();
                        for &j in &members[1..] {
                            cand.retain(|v| dem.candidates[j].contains(v));
                        }
                        if cand.is_empty() {
                            return None;
                        }
                        groups.push(Group {
                            index: dem.index,
                            sides: members.iter().map(|&j| dem.sides[j]).collect(),
                            candidates: cand,
                        });
                    }
                    Some(groups)
                })
                .collect()
        })
        .collect();

    fn search(level: usize, options: &[Vec<Vec<Group>>], acc: &mut Vec<Group>) -> Option<Vec<usize>> {
        if level == options.len() {
            return match_groups(acc);
        }
        for choice in &options[level] {
            let before = acc.len();
            acc.extend(choice.iter().cloned());
            if match_groups(acc).is_some() {
                if let Some(found) = search(level + 1, options, acc) {
                    return Some(found);
                }
            }
            acc.truncate(before);
        }
        None
    }
    let mut acc = Vec::new();
    let assigned = search(0, &options, &mut acc)?;
    let mut witness = BagWitness::default();
    for (group, v) in acc.iter().zip(assigned) {
        for &side in &group.sides {
            witness.serving.insert((group.index, side), v);
        }
    }
    Some(witness)
}

/// Whether `bag` is feasible for `indices` with respect to the marks.
pub fn bag_feasible(inst: &DpInstance, marks: &MarkedSets, bag: usize, indices: &[usize]) -> Option<BagWitness> {
    solve_demands(&demands_at(inst, marks, bag, indices, &|_| false))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demand(index: usize, candidates: Vec<Vec<usize>>) -> Demand {
        Demand {
            index,
            sides: (100..100 + candidates.len()).collect(),
            candidates,
        }
    }

    #[test]
    fn partitions_are_counted_by_bell_numbers() {
        let bell: Vec<usize> = (0..6).map(|d| set_partitions(d).len()).collect();
        assert_eq!(bell, vec![1, 1, 2, 5, 15, 52]);
    }

    #[test]
    fn two_indices_need_two_vertices() {
        let both = vec![demand(0, vec![vec![0, 1], vec![0, 1]]), demand(1, vec![vec![0, 1], vec![0, 1]])];
        let w = solve_demands(&both).unwrap();
        assert_eq!(w.labels().len(), 2);
        let one = vec![demand(0, vec![vec![0], vec![0]]), demand(1, vec![vec![0], vec![0]])];
        assert!(solve_demands(&one).is_none());
        assert_eq!(solve_demands(&[]), Some(BagWitness::default()));
    }

    #[test]
    fn split_sides_when_sharing_is_impossible() {
        let w = solve_demands(&[demand(0, vec![vec![1], vec![2]])]).unwrap();
        assert_eq!(w.labels(), vec![(1, 0), (2, 0)]);
    }
}
