use netweight::bounds::{
    bennett_h, weighted_bennett_tail, weighted_bernstein_sum_tail, BoundInputs, CoveringModel,
};
use netweight::hypergraph::{
    fractional_chromatic_number, independence_number, DependencyGraph, KPartiteHypergraph,
};
use netweight::learner::{
    project_l1, weighted_erm_with, weighted_risk, FitOptions, FitPath, Hypothesis, Solver,
};
use netweight::simulator::Example;
use netweight::weighting::{
    exact_matching_weights, greedy_matching_weights, optimal_weighting,
    optimal_weighting_with_certificate, verify_feasible, FEASIBILITY_TOL,
};
use proptest::prelude::*;

fn hypergraph() -> impl Strategy<Value = KPartiteHypergraph> {
    (2usize..=3, 1usize..=8)
        .prop_flat_map(|(k, m)| {
            prop::collection::vec(1usize..=5, k).prop_flat_map(move |sizes| {
                let edge: Vec<_> = sizes.iter().map(|&n| 0..n).collect();
                (Just(sizes), prop::collection::vec(edge, m))
            })
        })
        .prop_map(|(sizes, edges)| KPartiteHypergraph::new(sizes, edges).unwrap())
}

fn graph(max_m: usize) -> impl Strategy<Value = DependencyGraph> {
    (1usize..=max_m)
        .prop_flat_map(|m| (Just(m), prop::collection::vec((0..m, 0..m), 0..=2 * m)))
        .prop_map(|(m, pairs)| {
            let pairs: Vec<_> = pairs.into_iter().filter(|(a, b)| a != b).collect();
            DependencyGraph::from_edges(m, &pairs).unwrap()
        })
}

fn disjoint_union(a: &DependencyGraph, b: &DependencyGraph) -> DependencyGraph {
    let mut pairs = Vec::new();
    for u in 0..a.m() {
        pairs.extend(a.neighbors(u).iter().map(|&v| (u, v)));
    }
    for u in 0..b.m() {
        pairs.extend(b.neighbors(u).iter().map(|&v| (a.m() + u, a.m() + v)));
    }
    DependencyGraph::from_edges(a.m() + b.m(), &pairs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn alpha_adds_over_disjoint_union(a in graph(8), b in graph(8)) {
        let u = disjoint_union(&a, &b);
        prop_assert_eq!(
            independence_number(&u).unwrap(),
            independence_number(&a).unwrap() + independence_number(&b).unwrap()
        );
    }

    #[test]
    fn chi_is_max_over_disjoint_union(a in graph(7), b in graph(7)) {
        let u = disjoint_union(&a, &b);
        let ca = fractional_chromatic_number(&a).unwrap().value;
        let cb = fractional_chromatic_number(&b).unwrap().value;
        let cu = fractional_chromatic_number(&u).unwrap().value;
        prop_assert!((cu - ca.max(cb)).abs() <= 1e-9, "{} vs {} {}", cu, ca, cb);
    }

    #[test]
    fn dependency_graph_is_symmetric_and_matches_overlap(g in hypergraph()) {
        let gamma = DependencyGraph::build(&g);
        for a in 0..g.m() {
            prop_assert!(!gamma.is_adjacent(a, a));
            for b in 0..g.m() {
                prop_assert_eq!(gamma.is_adjacent(a, b), gamma.is_adjacent(b, a));
                prop_assert_eq!(gamma.is_adjacent(a, b), a != b && g.overlaps(a, b));
            }
        }
    }

    #[test]
    fn dependency_graph_follows_edge_permutation(g in hypergraph(), seed in any::<u64>()) {
        let mut perm: Vec<usize> = (0..g.m()).collect();
        // deterministic shuffle from the seed
        let mut state = seed | 1;
        for i in (1..perm.len()).rev() {
            state ^= state << 13; state ^= state >> 7; state ^= state << 17;
            perm.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let p = g.permuted(&perm).unwrap();
        let (ga, gb) = (DependencyGraph::build(&g), DependencyGraph::build(&p));
        for a in 0..g.m() {
            for b in 0..g.m() {
                prop_assert_eq!(gb.is_adjacent(a, b), ga.is_adjacent(perm[a], perm[b]));
            }
        }
        let (sa, sb) = (optimal_weighting(&g).unwrap().normalizer, optimal_weighting(&p).unwrap().normalizer);
        prop_assert!((sa - sb).abs() <= 1e-9);
    }

    #[test]
    fn structural_chain(g in hypergraph()) {
        let gamma = DependencyGraph::build(&g);
        let m = g.m() as f64;
        let chi = fractional_chromatic_number(&gamma).unwrap().value;
        let alpha = independence_number(&gamma).unwrap() as f64;
        let opt = optimal_weighting_with_certificate(&g).unwrap();
        let s = opt.s_value();
        let min_active = *g.active_vertex_counts().iter().min().unwrap() as f64;
        prop_assert!(m / chi <= alpha + 1e-9);
        prop_assert!(alpha <= s + 1e-9);
        prop_assert!(s <= min_active.min(m) + 1e-9);
        let exact = exact_matching_weights(&g, 24).unwrap().normalizer;
        let greedy = greedy_matching_weights(&g, None).unwrap().normalizer;
        prop_assert!(exact == alpha && greedy <= exact && greedy >= 1.0);
        // strong duality with a feasible fractional vertex cover
        prop_assert!(opt.cover_violation(&g) <= 1e-9);
        prop_assert!(opt.vertex_cover.iter().flatten().all(|&y| y >= -1e-12));
        prop_assert!((opt.cover_total() - s).abs() <= 1e-9);
        prop_assert!(verify_feasible(&g, &opt.weighting.weights).unwrap().is_feasible());
        prop_assert!(opt.weighting.weights.iter().all(|&w| w >= -FEASIBILITY_TOL));
        // s = m exactly when all-ones is feasible
        let ones_feasible = verify_feasible(&g, &vec![1.0; g.m()]).unwrap().is_feasible();
        prop_assert_eq!(ones_feasible, (s - m).abs() <= 1e-9);
    }

    #[test]
    fn optimal_weighting_is_deterministic(g in hypergraph()) {
        let a = optimal_weighting(&g).unwrap();
        let b = optimal_weighting(&g).unwrap();
        let bits = |w: &[f64]| w.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&a.weights), bits(&b.weights));
    }

    #[test]
    fn tails_are_probabilities_and_monotone(
        m in 1.0f64..500.0, frac in 0.01f64..=1.0, eps in 0.001f64..2.0,
        range in 0.1f64..3.0, var_frac in 0.0f64..=1.0, chi in 1.0f64..10.0,
    ) {
        let s = m * frac;
        let sigma2 = var_frac * range * range;
        let at = |m: f64, s: f64, eps: f64| BoundInputs::new(m, s, eps, sigma2, range).with_chi_star(chi);
        let base = at(m, s, eps);
        // (0, 1] in exact arithmetic; in floating point the log is finite
        // and non-positive even when the value itself underflows
        for l in [base.log_bernstein_tail().unwrap(), base.log_chromatic_tail().unwrap(), base.log_weighted_bernstein_tail().unwrap()] {
            prop_assert!(l.is_finite() && l <= 0.0);
            prop_assert!((0.0..=1.0).contains(&l.exp()));
        }
        let wider = at(m, s, eps * 1.5);
        prop_assert!(wider.bernstein_tail().unwrap() <= base.bernstein_tail().unwrap());
        prop_assert!(wider.chromatic_tail().unwrap() <= base.chromatic_tail().unwrap());
        prop_assert!(wider.weighted_bernstein_tail().unwrap() <= base.weighted_bernstein_tail().unwrap());
        let bigger = at(m * 2.0, s * 2.0, eps);
        prop_assert!(bigger.bernstein_tail().unwrap() <= base.bernstein_tail().unwrap());
        prop_assert!(bigger.weighted_bernstein_tail().unwrap() <= base.weighted_bernstein_tail().unwrap());
        prop_assert!(bigger.sample_error_bound_weighted().unwrap() <= base.sample_error_bound_weighted().unwrap());
        // s = m identities hold bit for bit
        let full = at(m, m, eps);
        prop_assert_eq!(full.weighted_bernstein_tail().unwrap(), full.bernstein_tail().unwrap());
        prop_assert_eq!(full.sample_error_bound_weighted().unwrap(), full.sample_error_bound_iid().unwrap());
    }

    #[test]
    fn weighted_beats_eqw_when_s_at_least_m_over_chi(
        m in 1.0f64..200.0, chi in 1.0f64..8.0, extra in 0.0f64..=1.0, eps in 0.01f64..2.0, range in 0.5f64..2.0,
    ) {
        let s = (m / chi + extra * (m - m / chi)).min(m);
        let b = BoundInputs::new(m, s, eps, 0.0, range).with_chi_star(chi);
        prop_assert!(b.log_sample_error_bound_weighted().unwrap() <= b.log_sample_error_bound_eqw().unwrap() + 1e-12);
    }

    #[test]
    fn bennett_below_sum_bernstein(s in 0.1f64..50.0, eps in 0.0f64..20.0, sigma2 in 0.001f64..1.0, range in 0.1f64..3.0) {
        let sigma2 = sigma2.min(range * range);
        let a = range * eps / (s * sigma2);
        prop_assert!(bennett_h(a) >= 3.0 * a * a / (6.0 + 2.0 * a) - 1e-15);
        let bennett = weighted_bennett_tail(s, eps, sigma2, range).unwrap();
        let bernstein = weighted_bernstein_sum_tail(s, eps, sigma2, range);
        prop_assert!(bennett <= bernstein * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn covering_monotone_and_multiplicative(d in 1usize..6, r in 0.1f64..10.0, tau in 0.01f64..5.0) {
        let one = CoveringModel::linear(1, r).unwrap();
        let many = CoveringModel::linear(d, r).unwrap();
        prop_assert!(many.count(tau * 2.0).unwrap() <= many.count(tau).unwrap());
        prop_assert_eq!(many.count(tau).unwrap(), one.count(tau).unwrap().powi(d as i32));
        prop_assert!(many.count(tau).unwrap() >= 1.0);
    }

    #[test]
    fn erm_scaling_invariance_and_stationarity(
        data in prop::collection::vec((prop::collection::vec(0.0f64..1.0, 3), -1.0f64..1.0, 0.0f64..1.0), 2..12),
        c in 0.1f64..10.0, radius in 0.2f64..3.0,
    ) {
        let examples: Vec<Example> = data.iter().map(|(x, y, _)| Example { x: x.clone(), y: *y }).collect();
        let w: Vec<f64> = data.iter().map(|d| d.2 + 0.05).collect();
        let n: f64 = w.iter().sum();
        let opts = FitOptions::default();
        let a = weighted_erm_with(&examples, &w, n, radius, &opts).unwrap();
        let scaled: Vec<f64> = w.iter().map(|x| x * c).collect();
        let b = weighted_erm_with(&examples, &scaled, n * c, radius, &opts).unwrap();
        prop_assert!(a.stationarity <= 1e-8, "stationarity {}", a.stationarity);
        prop_assert!(b.stationarity <= 1e-8);
        for (x, y) in a.hypothesis.coefficients.iter().zip(&b.hypothesis.coefficients) {
            prop_assert!((x - y).abs() <= 1e-8, "{:?} vs {:?}", a.hypothesis, b.hypothesis);
        }
        prop_assert!(a.hypothesis.l1_norm() <= radius + 1e-9);
        // no random feasible probe does better
        let risk = weighted_risk(&a.hypothesis, &examples, &w, n).unwrap();
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..100 {
            let probe: Vec<f64> = (0..3).map(|_| {
                state ^= state << 13; state ^= state >> 7; state ^= state << 17;
                (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 * radius - radius
            }).collect();
            let probe = project_l1(&nalgebra::DVector::from_vec(probe), radius);
            let h = Hypothesis { coefficients: probe.iter().copied().collect(), norm_bound: radius };
            prop_assert!(risk <= weighted_risk(&h, &examples, &w, n).unwrap() + 1e-12);
        }
    }

    #[test]
    fn unit_weights_match_ordinary_least_squares(
        data in prop::collection::vec((prop::collection::vec(0.0f64..1.0, 2), -1.0f64..1.0), 6..15),
    ) {
        let examples: Vec<Example> = data.iter().map(|(x, y)| Example { x: x.clone(), y: *y }).collect();
        let w = vec![1.0; examples.len()];
        let x = nalgebra::DMatrix::from_fn(examples.len(), 2, |i, j| examples[i].x[j]);
        let y = nalgebra::DVector::from_iterator(examples.len(), examples.iter().map(|z| z.y));
        let xtx = x.transpose() * &x;
        prop_assume!(xtx.determinant().abs() > 1e-3);
        let ols = xtx.lu().solve(&(x.transpose() * y)).unwrap();
        let fit = weighted_erm_with(&examples, &w, w.len() as f64, 1e6, &FitOptions::default()).unwrap();
        prop_assert_eq!(fit.path, FitPath::ClosedForm);
        for j in 0..2 {
            prop_assert!((fit.hypothesis.coefficients[j] - ols[j]).abs() <= 1e-8);
        }
        let iterative = weighted_erm_with(
            &examples, &w, w.len() as f64, 1e6,
            &FitOptions { solver: Solver::Iterative, warm_start: false, ..Default::default() },
        ).unwrap();
        prop_assert!(iterative.stationarity <= 1e-8);
    }
}
