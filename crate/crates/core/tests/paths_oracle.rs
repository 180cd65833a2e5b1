use rand::Rng;
use wpc_core::generators::{gen_dp_instance, gen_wpc, rng_from_seed, GenParams, TreeShape};
use wpc_core::oracle::{brute_force_disjoint_paths, OracleBudget, PathsVerdict};
use wpc_core::paths::{solve, validate_solution, Answer, DpInstance, Terminals, Variant};

const VARIANTS: [Variant; 5] = [Variant::Srdp, Variant::Srtdp, Variant::Dp, Variant::Tdp, Variant::Srdcs];

fn params(seed: u64, variant: Variant) -> GenParams {
    GenParams {
        seed,
        bag_count: 2 + (seed % 6) as usize,
        bag_size: (1, 2 + (seed % 4) as usize),
        boundary_density: [0.3, 0.6, 1.0][(seed % 3) as usize],
        tree_shape: [TreeShape::Random, TreeShape::Path, TreeShape::Star][(seed / 3 % 3) as usize],
        k: 1 + (seed % 3) as usize,
        domain_density: [1.0, 0.8, 0.6][(seed / 9 % 3) as usize],
        variant,
        max_set_size: 1 + (seed % 3) as usize,
    }
}

fn agree(inst: &DpInstance) {
    let oracle = brute_force_disjoint_paths(inst, OracleBudget::paths());
    assert!(!matches!(oracle, PathsVerdict::BudgetExceeded));
    let answer = solve(inst).unwrap();
    assert_eq!(
        answer.is_yes(),
        matches!(oracle, PathsVerdict::Solution(_)),
        "{}",
        wpc_core::paths::write_instance(inst)
    );
    if let Answer::Yes(sol) = &answer {
        validate_solution(inst, sol).unwrap();
    }
}

#[test]
fn solver_matches_oracle_on_generated_instances() {
    for seed in 0..3000u64 {
        for variant in VARIANTS {
            let p = params(seed, variant);
            let Ok((g, f)) = gen_wpc(&p) else { continue };
            if g.n() > 14 {
                continue;
            }
            let Ok(inst) = gen_dp_instance(&g, &f, &p) else { continue };
            agree(&inst.with_forest(f));
        }
    }
}

/// Pairs may share terminals or sit on one edge, which exercises the heavy
/// and shared-terminal cases the generator does not produce.
#[test]
fn solver_matches_oracle_with_shared_edges() {
    for seed in 0..3000u64 {
        for variant in [Variant::Srdp, Variant::Srtdp, Variant::Dp, Variant::Tdp] {
            let p = params(seed, variant);
            let Ok((g, f)) = gen_wpc(&p) else { continue };
            if g.n() > 14 || g.n() < 2 {
                continue;
            }
            let mut rng = rng_from_seed(seed * 77 + variant as u64);
            let edges: Vec<(usize, usize)> = g.edges().collect();
            let mut pairs = Vec::new();
            for _ in 0..p.k {
                if !edges.is_empty() && rng.gen_bool(0.5) {
                    let e = edges[rng.gen_range(0..edges.len().min(3))];
                    pairs.push(if rng.gen_bool(0.5) { e } else { (e.1, e.0) });
                } else {
                    let s = rng.gen_range(0..g.n());
                    let t = (s + rng.gen_range(1..g.n())) % g.n();
                    pairs.push((s, t));
                }
            }
            let domains = (!variant.full_domains())
                .then(|| (0..p.k).map(|_| (0..g.n()).filter(|_| rng.gen_bool(p.domain_density)).collect()).collect());
            let inst = DpInstance::new(g, variant, Terminals::Pairs(pairs), domains).unwrap();
            agree(&inst.with_forest(f));
        }
    }
}
