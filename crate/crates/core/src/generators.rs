//! Seeded instance generators. Every generator draws from ChaCha8 seeded
//! with a 64-bit value, so a seed reproduces an artifact exactly.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, VertexSet};
use crate::obstructions::{build_obstruction, ObstructionError, ObstructionKind};
use crate::partition::PartitionForest;
use crate::paths::{DpInstance, PathsError, Terminals, Variant};

/// Identifier of the random source, recorded in generated file headers.
pub const PRNG_NAME: &str = "chacha8";

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
    #[error("need {needed} distinct vertices, graph has {available}")]
    NotEnoughVertices { needed: usize, available: usize },
    #[error("the planted pattern could not be kept induced")]
    CannotKeepInduced,
    #[error(transparent)]
    Obstruction(#[from] ObstructionError),
    #[error(transparent)]
    Paths(#[from] PathsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeShape {
    Path,
    Star,
    Random,
}

impl TreeShape {
    pub fn from_name(s: &str) -> Option<TreeShape> {
        match s.to_ascii_lowercase().as_str() {
            "path" => Some(TreeShape::Path),
            "star" => Some(TreeShape::Star),
            "random" => Some(TreeShape::Random),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub seed: u64,
    pub bag_count: usize,
    /// Inclusive range of bag sizes.
    pub bag_size: (usize, usize),
    /// Probability that a bag vertex joins the boundary towards a given
    /// neighbor bag. At least one vertex always does.
    pub boundary_density: f64,
    pub tree_shape: TreeShape,
    pub k: usize,
    /// Probability that a vertex belongs to a domain.
    pub domain_density: f64,
    pub variant: Variant,
    /// Largest terminal set for the connected-set variant.
    pub max_set_size: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            seed: 0,
            bag_count: 8,
            bag_size: (1, 3),
            boundary_density: 0.5,
            tree_shape: TreeShape::Random,
            k: 2,
            domain_density: 1.0,
            variant: Variant::Dp,
            max_set_size: 2,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError::InvalidParameters(m.to_string()));
        if self.bag_size.0 == 0 || self.bag_size.0 > self.bag_size.1 {
            return bad("bag sizes must form a non-empty range of positive sizes");
        }
        if !(0.0..=1.0).contains(&self.boundary_density) || !(0.0..=1.0).contains(&self.domain_density) {
            return bad("densities must lie in [0, 1]");
        }
        if self.variant.uses_sets() && self.max_set_size == 0 {
            return bad("terminal sets need a positive size");
        }
        Ok(())
    }
}

/// Parent of each bag after the first.
fn tree_parents(rng: &mut ChaCha8Rng, count: usize, shape: TreeShape) -> Vec<(usize, usize)> {
    (1..count)
        .map(|b| match shape {
            TreeShape::Path => (b - 1, b),
            TreeShape::Star => (0, b),
            TreeShape::Random => (rng.gen_range(0..b), b),
        })
        .collect()
}

/// A random non-empty subset of `members`, each kept with probability `p`.
fn nonempty_subset(rng: &mut ChaCha8Rng, members: &[usize], p: f64) -> Vec<usize> {
    let mut out: Vec<usize> = members.iter().copied().filter(|_| rng.gen_bool(p)).collect();
    if out.is_empty() {
        out.push(*members.choose(rng).expect("bags are non-empty"));
        out.sort_unstable();
    }
    out
}

/// A connected WPC graph built from the definition: random tree over bags,
/// cliques inside bags, complete bipartite joins between random non-empty
/// boundaries of linked bags.
pub fn gen_wpc(params: &GenParams) -> Result<(Graph, PartitionForest), GenError> {
    params.validate()?;
    let mut rng = rng_from_seed(params.seed);
    let mut bags: Vec<VertexSet> = Vec::with_capacity(params.bag_count);
    let mut next = 0;
    for _ in 0..params.bag_count {
        let size = rng.gen_range(params.bag_size.0..=params.bag_size.1);
        bags.push((next..next + size).collect());
        next += size;
    }
    let links = tree_parents(&mut rng, params.bag_count, params.tree_shape);
    let mut edges = Vec::new();
    for bag in &bags {
        for (i, &u) in bag.iter().enumerate() {
            for &v in &bag[i + 1..] {
                edges.push((u, v));
            }
        }
    }
    for &(a, b) in &links {
        let side_a = nonempty_subset(&mut rng, &bags[a], params.boundary_density);
        let side_b = nonempty_subset(&mut rng, &bags[b], params.boundary_density);
        for &u in &side_a {
            for &v in &side_b {
                edges.push((u, v));
            }
        }
    }
    let g = Graph::from_edges_lossy(next, edges);
    Ok((g, PartitionForest::new(next, bags, links)))
}

/// A split graph: a central clique of `center` vertices and `leaves`
/// independent vertices, each adjacent to a random non-empty part of the
/// center chosen with probability `density`.
pub fn gen_split(seed: u64, center: usize, leaves: usize, density: f64) -> Result<(Graph, PartitionForest), GenError> {
    let split = gen_split_compact(seed, center, leaves, density)?;
    Ok(split.to_graph())
}

/// A split graph kept implicit: the center clique is never materialized, so
/// centers of 10⁵ vertices stay cheap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitGraph {
    /// Center vertices are `0..center`.
    pub center: usize,
    /// Leaf `j` is vertex `center + j`; its sorted center neighbors.
    pub leaves: Vec<VertexSet>,
}

impl SplitGraph {
    pub fn n(&self) -> usize {
        self.center + self.leaves.len()
    }

    pub fn is_center(&self, v: usize) -> bool {
        v < self.center
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        match (self.is_center(u), self.is_center(v)) {
            (true, true) => true,
            (false, false) => false,
            (true, false) => self.leaves[v - self.center].binary_search(&u).is_ok(),
            (false, true) => self.leaves[u - self.center].binary_search(&v).is_ok(),
        }
    }

    /// The explicit graph and its star partition forest (center bag first).
    pub fn to_graph(&self) -> (Graph, PartitionForest) {
        let n = self.n();
        let mut edges = Vec::new();
        for u in 0..self.center {
            for v in u + 1..self.center {
                edges.push((u, v));
            }
        }
        for (j, nb) in self.leaves.iter().enumerate() {
            for &c in nb {
                edges.push((c, self.center + j));
            }
        }
        let g = Graph::from_edges_lossy(n, edges);
        let mut bags: Vec<VertexSet> = Vec::new();
        let mut links = Vec::new();
        if self.center > 0 {
            bags.push((0..self.center).collect());
        }
        for (j, nb) in self.leaves.iter().enumerate() {
            if !nb.is_empty() {
                links.push((0, bags.len()));
            }
            bags.push(vec![self.center + j]);
        }
        (g, PartitionForest::new(n, bags, links))
    }
}

pub fn gen_split_compact(seed: u64, center: usize, leaves: usize, density: f64) -> Result<SplitGraph, GenError> {
    if center == 0 || !(0.0..=1.0).contains(&density) {
        return Err(GenError::InvalidParameters(
            "split graphs need a non-empty center and a density in [0, 1]".into(),
        ));
    }
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(leaves);
    for _ in 0..leaves {
        // Sample the degree first so huge centers stay linear in the output.
        let expected = (center as f64 * density).round() as usize;
        let deg = if expected == 0 {
            1
        } else {
            rng.gen_range(1..=expected.max(1)).min(center)
        };
        let mut nb: BTreeSet<usize> = BTreeSet::new();
        if deg * 2 >= center {
            let mut all: Vec<usize> = (0..center).collect();
            all.shuffle(&mut rng);
            nb.extend(all.into_iter().take(deg));
        } else {
            while nb.len() < deg {
                nb.insert(rng.gen_range(0..center));
            }
        }
        out.push(nb.into_iter().collect());
    }
    Ok(SplitGraph { center, leaves: out })
}

/// A random chordal graph as the intersection graph of random subtrees of a
/// random host tree on `tree_size` nodes.
pub fn gen_chordal(seed: u64, n: usize, tree_size: usize, max_subtree: usize) -> Graph {
    let mut rng = rng_from_seed(seed);
    let tree_size = tree_size.max(1);
    let mut tree_adj: Vec<Vec<usize>> = vec![Vec::new(); tree_size];
    for b in 1..tree_size {
        let p = rng.gen_range(0..b);
        tree_adj[p].push(b);
        tree_adj[b].push(p);
    }
    let mut nodes: Vec<BTreeSet<usize>> = Vec::with_capacity(n);
    for _ in 0..n {
        let size = rng.gen_range(1..=max_subtree.max(1));
        let mut sub = BTreeSet::from([rng.gen_range(0..tree_size)]);
        for _ in 1..size {
            let frontier: Vec<usize> = sub
                .iter()
                .flat_map(|&x| tree_adj[x].iter().copied())
                .filter(|y| !sub.contains(y))
                .collect();
            match frontier.choose(&mut rng) {
                Some(&y) => {
                    sub.insert(y);
                }
                None => break,
            }
        }
        nodes.push(sub);
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if !nodes[u].is_disjoint(&nodes[v]) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges_lossy(n, edges)
}

/// A random chordal graph grown by simplicial extension: each new vertex
/// joins a random clique around a random earlier vertex, keeping each
/// candidate with probability `keep`.
pub fn gen_chordal_extension(seed: u64, n: usize, keep: f64) -> Graph {
    let mut rng = rng_from_seed(seed);
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for v in 1..n {
        let u = rng.gen_range(0..v);
        let mut clique = vec![u];
        let mut nbrs: Vec<usize> = adj[u].iter().copied().collect();
        nbrs.shuffle(&mut rng);
        for w in nbrs {
            if rng.gen_bool(keep.clamp(0.0, 1.0)) && clique.iter().all(|c| adj[*c].contains(&w)) {
                clique.push(w);
            }
        }
        for c in clique {
            adj[c].insert(v);
            adj[v].insert(c);
        }
    }
    Graph::from_edges_lossy(
        n,
        adj.iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |&&w| w > u).map(move |&w| (u, w))),
    )
}

/// Uniform random graph with edge probability `p`.
pub fn gen_gnp(seed: u64, n: usize, p: f64) -> Graph {
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p.clamp(0.0, 1.0)) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges_lossy(n, edges)
}

/// A clique of `g` grown greedily from a random vertex in random order.
fn random_clique(rng: &mut ChaCha8Rng, g: &Graph) -> Vec<usize> {
    let start = rng.gen_range(0..g.n());
    let mut nbrs = g.neighbors(start).to_vec();
    nbrs.shuffle(rng);
    let mut clique = vec![start];
    for w in nbrs {
        if rng.gen_bool(0.5) && clique.iter().all(|&c| g.has_edge(c, w)) {
            clique.push(w);
        }
    }
    clique
}

/// Adds a copy of `kind` next to `g` (on vertices `g.n()..`) and joins its
/// first vertex to a random clique of `g`. Only that vertex gains edges, so
/// the copy stays induced. Returns the planted vertices in pattern order.
pub fn plant_obstruction(g: &Graph, kind: ObstructionKind, seed: u64) -> Result<(Graph, Vec<usize>), GenError> {
    let pattern = build_obstruction(kind)?;
    let mut rng = rng_from_seed(seed);
    let base = g.n();
    let n = base + pattern.n();
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    edges.extend(pattern.edges().map(|(u, v)| (u + base, v + base)));
    if base > 0 {
        for c in random_clique(&mut rng, g) {
            edges.push((c, base));
        }
    }
    let out = Graph::from_edges_lossy(n, edges);
    let planted: Vec<usize> = (base..n).collect();
    let (copy, _) = out.induced_subgraph(&planted).expect("planted vertices are in range");
    if copy.edges().ne(pattern.edges()) {
        return Err(GenError::CannotKeepInduced);
    }
    Ok((out, planted))
}

/// A random instance on a validated `(g, f)`. Pairs use `2k` distinct
/// vertices; terminal sets use disjoint sets of 1 to `max_set_size`
/// vertices. Domains keep each vertex with probability `domain_density`
/// and are then repaired.
pub fn gen_dp_instance(g: &Graph, f: &PartitionForest, params: &GenParams) -> Result<DpInstance, GenError> {
    params.validate()?;
    let mut rng = rng_from_seed(params.seed ^ 0x9e37_79b9_7f4a_7c15);
    let k = params.k;
    let mut pool: Vec<usize> = (0..g.n()).collect();
    pool.shuffle(&mut rng);
    let terminals = if params.variant.uses_sets() {
        let sizes: Vec<usize> = (0..k).map(|_| rng.gen_range(1..=params.max_set_size)).collect();
        let needed: usize = sizes.iter().sum();
        if needed > g.n() {
            return Err(GenError::NotEnoughVertices {
                needed,
                available: g.n(),
            });
        }
        let mut rest = pool.into_iter();
        Terminals::Sets(sizes.iter().map(|&s| rest.by_ref().take(s).collect()).collect())
    } else {
        if 2 * k > g.n() {
            return Err(GenError::NotEnoughVertices {
                needed: 2 * k,
                available: g.n(),
            });
        }
        Terminals::Pairs((0..k).map(|i| (pool[2 * i], pool[2 * i + 1])).collect())
    };
    let domains = if params.variant.full_domains() || params.domain_density >= 1.0 {
        None
    } else {
        Some(
            (0..k)
                .map(|_| (0..g.n()).filter(|_| rng.gen_bool(params.domain_density)).collect())
                .collect(),
        )
    };
    Ok(DpInstance::new(g.clone(), params.variant, terminals, domains)?.with_forest(f.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::validate_partition_forest;
    use crate::recognizer::recognize;

    #[test]
    fn generated_forests_validate() {
        for seed in 0..50 {
            for shape in [TreeShape::Path, TreeShape::Star, TreeShape::Random] {
                let params = GenParams {
                    seed,
                    bag_count: 6,
                    bag_size: (1, 4),
                    tree_shape: shape,
                    ..Default::default()
                };
                let (g, f) = gen_wpc(&params).unwrap();
                assert_eq!(validate_partition_forest(&g, &f), None);
            }
        }
    }

    #[test]
    fn one_bag_is_a_clique_and_seeds_repeat() {
        let params = GenParams {
            bag_count: 1,
            bag_size: (4, 4),
            ..Default::default()
        };
        let (g, _) = gen_wpc(&params).unwrap();
        assert_eq!(g.m(), 6);
        let again = gen_wpc(&params).unwrap();
        assert_eq!(again.0, g);
    }

    #[test]
    fn split_graphs_validate() {
        let (g, f) = gen_split(3, 5, 7, 0.4).unwrap();
        assert_eq!(validate_partition_forest(&g, &f), None);
    }

    #[test]
    fn planting_into_empty_graph_gives_the_pattern() {
        let (g, planted) = plant_obstruction(&Graph::empty(0), ObstructionKind::O4, 1).unwrap();
        assert_eq!(g, build_obstruction(ObstructionKind::O4).unwrap());
        assert_eq!(planted, (0..9).collect::<Vec<_>>());
        let k3 = Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let (h, _) = plant_obstruction(&k3, ObstructionKind::Hole { k: 5 }, 2).unwrap();
        assert!(!recognize(&h).is_accepted());
    }

    #[test]
    fn instance_sizes() {
        let p5 = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let f = PartitionForest::new(5, (0..5).map(|v| vec![v]).collect(), (0..4).map(|b| (b, b + 1)).collect());
        let one = GenParams {
            k: 1,
            ..Default::default()
        };
        let inst = gen_dp_instance(&p5, &f, &one).unwrap();
        assert_eq!(inst.k(), 1);
        assert!(inst.domains.iter().all(|d| d.len() == 5));
        let three = GenParams {
            k: 3,
            ..Default::default()
        };
        assert!(matches!(
            gen_dp_instance(&p5, &f, &three),
            Err(GenError::NotEnoughVertices { .. })
        ));
    }
}
