//! End-to-end properties of the pipeline on randomized instances.

use proptest::prelude::*;

use cannonball::graph::CannonballGraph;
use cannonball::lattice::{self, GridRegion, GridVertex, StackingSequence};
use cannonball::multicolor::{self, bound_value};
use cannonball::verify::{self, OracleOutcome};

/// Random stacking sequence of the given length.
fn stacking_strategy(max_layers: usize) -> impl Strategy<Value = StackingSequence> {
    (1..=max_layers, any::<u64>()).prop_map(|(len, seed)| {
        let mut letters = String::new();
        let mut state = seed | 1;
        let mut prev = 3u64;
        for _ in 0..len {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let mut pick = state % 3;
            if pick == prev {
                pick = (pick + 1 + state % 2) % 3;
            }
            letters.push(['A', 'B', 'C'][pick as usize]);
            prev = pick;
        }
        StackingSequence::parse(&letters).unwrap()
    })
}

fn instance_strategy(
    max_layers: usize,
    side: i32,
    max_demand: u32,
) -> impl Strategy<Value = (StackingSequence, Vec<(GridVertex, u32)>)> {
    stacking_strategy(max_layers).prop_flat_map(move |s| {
        let layers = s.len() as i32;
        let vertex = (0..layers, 0..side, 0..side, 1..=max_demand)
            .prop_map(|(layer, u, v, d)| (GridVertex::new(layer, u, v), d));
        proptest::collection::vec(vertex, 0..20).prop_map(move |mut vs| {
            vs.sort_by_key(|&(v, _)| v);
            vs.dedup_by_key(|&mut (v, _)| v);
            (s.clone(), vs)
        })
    })
}

fn build(s: StackingSequence, demands: &[(GridVertex, u32)]) -> CannonballGraph {
    let side = 6;
    CannonballGraph::build(GridRegion::new(s, (0, side), (0, side)), demands).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// The solver output is proper, demand-complete, and within the color
    /// bound, with every structural invariant holding along the way.
    #[test]
    fn solve_is_verified_and_bounded((s, demands) in instance_strategy(4, 7, 40)) {
        let g = build(s, &demands);
        let (sol, trace) = multicolor::solve_traced(&g).unwrap();
        let report = verify::verify(&g, &sol.assignment);
        prop_assert!(report.ok(), "violations: {:?}", report.violations);
        for v in g.support() {
            prop_assert_eq!(sol.assignment.color_count(v), g.demand(v) as usize);
        }
        prop_assert!(sol.stats.colors_used as u64 <= bound_value(sol.stats.omega.omega()));
        prop_assert_eq!(sol.stats.bound_risk_events, 0);

        // Residual chain: d1 from kappa, monotone shrinking supports.
        for (&v, &d1) in &trace.d1 {
            prop_assert_eq!(d1, g.demand(v) - trace.kappa[&v]);
        }
        prop_assert!(trace.d2.keys().all(|v| trace.d1.contains_key(v)));
        prop_assert!(trace.d3.keys().all(|v| trace.d2.contains_key(v)));
    }

    /// The naive baseline is itself a proper, demand-complete coloring.
    #[test]
    fn naive_is_proper((s, demands) in instance_strategy(3, 7, 20)) {
        let g = build(s, &demands);
        let sol = multicolor::naive_solve(&g).unwrap();
        let report = verify::verify(&g, &sol.assignment);
        prop_assert!(report.ok());
        for v in g.support() {
            prop_assert_eq!(sol.assignment.color_count(v), g.demand(v) as usize);
        }
    }

    /// The clique chain is monotone, kappa respects both of its bounds, and
    /// the incidence-based enumeration agrees with the subset-scan oracle.
    #[test]
    fn clique_and_kappa_bounds((s, demands) in instance_strategy(3, 5, 12)) {
        let g = build(s, &demands);
        let w = g.clique_numbers();
        prop_assert!(w.w1 <= w.w2 && w.w2 <= w.w3 && w.w3 <= w.w4);
        prop_assert_eq!(w, verify::brute_cliques(&g));
        for v in g.support() {
            let k = g.kappa(v).unwrap() as u64;
            prop_assert!(k >= (g.demand(v) as u64).div_ceil(3));
            prop_assert!(k <= w.w3.div_ceil(3));
            prop_assert!(k <= w.w4.div_ceil(3));
        }
    }

    /// No two very heavy vertices are ever adjacent.
    #[test]
    fn very_heavy_vertices_are_scattered((s, demands) in instance_strategy(3, 5, 40)) {
        let g = build(s, &demands);
        use cannonball::graph::VertexClass;
        for v in g.support() {
            if g.classify(v).unwrap() != VertexClass::VeryHeavy {
                continue;
            }
            for u in g.support_neighbors(v).unwrap() {
                prop_assert_ne!(g.classify(u).unwrap(), VertexClass::VeryHeavy,
                    "adjacent very heavy pair {} {}", v, u);
            }
        }
    }

    /// The base coloring is proper on random stackings.
    #[test]
    fn base_coloring_is_proper(s in stacking_strategy(5)) {
        let region = GridRegion::new(s, (0, 4), (0, 4));
        let verts: Vec<GridVertex> = region.vertices().collect();
        for &v in &verts {
            let cv = lattice::base_color(v, region.stacking()).unwrap();
            for u in lattice::neighbors(v, &region).unwrap() {
                let cu = lattice::base_color(u, region.stacking()).unwrap();
                prop_assert_ne!(cv, cu, "tangent pair {} {} shares color {}", v, u, cv);
            }
        }
    }

    /// Adjacency is symmetric, irreflexive, and bounded by 12 neighbors.
    #[test]
    fn adjacency_axioms(s in stacking_strategy(5)) {
        let region = GridRegion::new(s, (0, 4), (0, 4));
        let verts: Vec<GridVertex> = region.vertices().collect();
        for &v in &verts {
            prop_assert!(!lattice::are_adjacent(v, v, region.stacking()).unwrap());
            let nbrs = lattice::neighbors(v, &region).unwrap();
            prop_assert!(nbrs.len() <= 12);
            for &u in &nbrs {
                prop_assert!(lattice::are_adjacent(u, v, region.stacking()).unwrap());
            }
        }
    }
}

#[test]
fn solver_matches_oracle_on_small_cliques() {
    let region = GridRegion::new(StackingSequence::fcc(3), (0, 5), (0, 5));
    let a = GridVertex::new(0, 2, 2);
    let b = GridVertex::new(0, 3, 2);
    let c = GridVertex::new(0, 2, 3);
    let d = GridVertex::new(1, 2, 2);

    let cases: Vec<Vec<(GridVertex, u32)>> = vec![
        vec![(a, 3), (b, 4)],
        vec![(a, 3), (b, 4), (c, 5)],
        vec![(a, 1), (b, 2), (c, 3), (d, 4)],
        vec![(a, 6), (b, 6), (c, 6), (d, 6)],
        vec![(a, 9)],
    ];
    for demands in cases {
        let g = CannonballGraph::build(region.clone(), &demands).unwrap();
        let sol = multicolor::solve(&g).unwrap();
        let omega = g.clique_numbers().omega();
        assert_eq!(
            verify::exact_multichromatic(&g, omega + 5),
            OracleOutcome::Exact(omega),
            "cliques are optimally colorable: {demands:?}"
        );
        assert_eq!(
            sol.stats.colors_used as u64, omega,
            "solver is exact on cliques: {demands:?}"
        );
    }
}

/// The oracle never reports less than the clique bound, and the solver stays
/// within the approximation envelope of the exact value.
#[test]
fn oracle_comparison_on_tiny_instances() {
    let region = GridRegion::new(StackingSequence::fcc(2), (0, 2), (0, 2));
    let vertices: Vec<GridVertex> = region.vertices().collect();
    // Walk demand patterns deterministically.
    let mut checked = 0;
    for pattern in 0..200u64 {
        let mut demands = Vec::new();
        let mut x = pattern.wrapping_mul(0x9e3779b97f4a7c15) | 1;
        for &v in &vertices {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            if x % 10 < 3 {
                demands.push((v, ((x >> 32) % 4) as u32 + 1));
            }
        }
        let g = CannonballGraph::build(region.clone(), &demands).unwrap();
        if g.support_len() > 8 {
            continue;
        }
        let sol = multicolor::solve(&g).unwrap();
        let OracleOutcome::Exact(chi) = verify::exact_multichromatic(&g, 64) else {
            panic!("oracle must terminate on tiny instances");
        };
        let omega = g.clique_numbers().omega();
        assert!(chi >= omega);
        assert!(sol.stats.colors_used as u64 >= chi);
        if chi > 0 {
            // colors / chi <= 11/6 + 10/chi, in integer arithmetic.
            assert!(
                6 * sol.stats.colors_used as u64 <= 11 * chi + 60,
                "ratio violated: {} colors vs chi_m {}",
                sol.stats.colors_used,
                chi
            );
        }
        checked += 1;
    }
    assert!(checked >= 100, "only {checked} tiny instances exercised");
}
