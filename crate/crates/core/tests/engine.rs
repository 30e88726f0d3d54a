use hutchinf::engine::{
    self, attractor, convergence_table, gen_iterate_sets, gifs_iterate, hutchinson, invariance_residual, truncated_attractor,
    truncated_system,
};
use hutchinf::interval::{interval_attractor, interval_truncated_attractor, product_factor, IntervalSet};
use hutchinf::maps::Condition;
use hutchinf::metric::{hausdorff, BaseMetric, FiniteSet, Point, TailSeq};
use hutchinf::{systems, Error};

#[test]
fn planar_attractor_is_invariant_and_tightens_with_tol() {
    let sys = systems::planar().unwrap();
    let coarse = attractor(&sys, 0.05).unwrap();
    let fine = attractor(&sys, 0.01).unwrap();
    assert!(coarse.err <= 0.05 && fine.err <= 0.01);
    assert!(fine.cloud.len() > coarse.cloud.len());
    // both approximate the same set
    let h = hausdorff(&coarse.cloud, &fine.cloud, sys.metric).unwrap();
    assert!(h <= coarse.err + fine.err, "{h}");
    assert!(invariance_residual(&sys, &fine).unwrap() <= 2.0 * fine.err);
    // the attractor sits in the unit square
    assert!(fine.cloud.flat().iter().all(|v| (0.0..=1.0).contains(v)));
}

#[test]
fn attractor_is_deterministic() {
    let sys = systems::planar().unwrap();
    assert_eq!(attractor(&sys, 0.02).unwrap(), attractor(&sys, 0.02).unwrap());
}

#[test]
fn convergence_rows_stay_below_bound() {
    let sys = systems::planar().unwrap();
    let rows = convergence_table(&sys, 6, 1e-3, 64).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows[0].step.is_none());
    for w in rows.windows(2) {
        assert!(w[1].bound < w[0].bound);
    }
    assert!(rows.iter().all(|r| r.within), "{rows:?}");
}

#[test]
fn weak_systems_are_refused() {
    for name in ["sup-pair", "sup-single", "sup-interval"] {
        let sys = systems::by_name(name).unwrap();
        assert!(!sys.classify().contains(&Condition::Q));
        assert!(matches!(attractor(&sys, 0.1), Err(Error::NotContractive(_))), "{name}");
        assert!(matches!(convergence_table(&sys, 3, 0.0, 8), Err(Error::NotContractive(_))));
    }
}

#[test]
fn sup_pair_iterates_miss_the_attractor() {
    let sys = systems::sup_pair(64).unwrap();
    let seed = TailSeq::constant(sys.domain.clone().unwrap());
    let it = gen_iterate_sets(&sys, &seed, 5, 0.0, 64).unwrap();
    let a = systems::sup_pair_attractor(64).unwrap();
    // the attractor is invariant under the diagonal operator
    assert_eq!(engine::hutchinson_diagonal(&sys, &a, 0.0, 64).unwrap().set, a);
    for k in &it.sets[1..] {
        assert_eq!(k.len(), 34);
        assert_eq!(hausdorff(k, &a, BaseMetric::Absolute).unwrap(), 1.0 / 6.0 - 1.0 / 8.0);
    }
}

#[test]
fn sup_single_collapses_to_zero() {
    let sys = systems::sup_single(16).unwrap();
    let seed = TailSeq::constant(sys.domain.clone().unwrap());
    let it = gen_iterate_sets(&sys, &seed, 6, 0.0, 16).unwrap();
    // images of the harmonic space under half the supremum stay on the grid
    for s in &it.sets {
        assert!(s.iter().all(|p| p[0] <= 0.5));
    }
}

#[test]
fn hutchinson_of_constant_and_sup_maps() {
    let sys = systems::sup_interval().unwrap();
    let ks = TailSeq::new(vec![FiniteSet::from_values(&[0.0, 1.0]).unwrap()], FiniteSet::from_values(&[0.5]).unwrap());
    // maxima over (x0, anchor): {0.5, 1}; images {0.25, 0.5} and {0.5, 0.75}
    let im = hutchinson(&sys, &ks, 0.0, 4).unwrap();
    assert_eq!(im.flat(), &[0.25, 0.5, 0.75]);
}

/// Truncation distances from 2-D point clouds agree with the exact factor
/// computation within the clouds' error budgets.
#[test]
fn truncation_point_clouds_match_exact_factor() {
    let sys = systems::planar().unwrap();
    let line = product_factor(&sys).unwrap();
    let seed = IntervalSet::interval(0.0, 1.0).unwrap();
    let full_exact = interval_attractor(&line, &seed, 1e-10, 1e-13).unwrap();
    let full = attractor(&sys, 0.01).unwrap();
    for m in 1..=3 {
        let t = truncated_system(&sys, m, Point::origin(2)).unwrap();
        let a_m = truncated_attractor(&t, 0.01, 1e-3).unwrap();
        let exact = full_exact.set.hausdorff(&interval_truncated_attractor(&line, m, 0.0, &seed, 1e-10, 1e-13).unwrap().set);
        let cloud = hausdorff(&full.cloud, &a_m.cloud, sys.metric).unwrap();
        let budget = full.err + a_m.err + 2e-10;
        assert!((cloud - exact).abs() <= budget, "m={m}: cloud {cloud} exact {exact} budget {budget}");
    }
}

#[test]
fn truncated_iterates_approach_truncated_attractor() {
    let sys = systems::planar().unwrap();
    let t = truncated_system(&sys, 2, Point::origin(2)).unwrap();
    let a = truncated_attractor(&t, 0.01, 1e-3).unwrap();
    let seeds = vec![FiniteSet::singleton(&Point::origin(2)); 2];
    let k = gifs_iterate(&t, &seeds, 8, 1e-3).unwrap();
    assert!(hausdorff(&k, &a.cloud, sys.metric).unwrap() <= 0.05);
    assert!(truncated_system(&sys, 0, Point::origin(2)).is_err());
    assert!(truncated_system(&sys, 1, Point::from(0.0)).is_err());
}

#[test]
fn product_factor_detects_grids_only() {
    let planar = systems::planar().unwrap();
    let line = product_factor(&planar).unwrap();
    assert_eq!(line.maps.len(), 2);
    assert_eq!(line.l_sys(), planar.l_sys());
    assert!(product_factor(&systems::sup_pair(8).unwrap()).is_none());
}

#[test]
fn builtins_by_name() {
    for name in ["ex5", "planar", "sup-pair", "sup-single", "sup-interval", "cantor"] {
        assert!(systems::by_name(name).is_ok(), "{name}");
    }
    assert!(matches!(systems::by_name("ex6"), Err(Error::Config(_))));
}
