use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hutchinf::code::{self, Address, CodePoint};
use hutchinf::interval::IntervalSet;
use hutchinf::maps::GifsMap;
use hutchinf::metric::{
    base_dist, epsnet_prune_with_radius, hausdorff, hausdorff_brute, seq_dist, BaseMetric, FiniteSet, MetricParams, Point,
    TailSeq,
};
use hutchinf::seq::{level_dist, NestedSeq};

fn point(dim: usize) -> impl Strategy<Value = Point> {
    prop::collection::vec(-1.0..1.0f64, dim).prop_map(|v| Point::new(v).unwrap())
}

fn tailseq(dim: usize) -> impl Strategy<Value = TailSeq<Point>> {
    (prop::collection::vec(point(dim), 0..6), point(dim)).prop_map(|(p, a)| TailSeq::new(p, a))
}

fn set(dim: usize) -> impl Strategy<Value = FiniteSet> {
    prop::collection::vec(point(dim), 1..40).prop_map(|v| FiniteSet::from_points(&v).unwrap())
}

fn metric_params() -> impl Strategy<Value = MetricParams> {
    prop_oneof![
        (0.05..=1.0f64).prop_map(|q| MetricParams::sup(q).unwrap()),
        (1.0..3.0f64, 0.05..0.95f64).prop_map(|(p, q)| MetricParams::lp(p, q).unwrap()),
    ]
}

fn base_metric() -> impl Strategy<Value = BaseMetric> {
    prop_oneof![Just(BaseMetric::Euclidean), Just(BaseMetric::Maximum)]
}

fn tol(x: f64) -> f64 {
    1e-12 * (1.0 + x.abs())
}

proptest! {
    #[test]
    fn sequence_metric_axioms(x in tailseq(2), y in tailseq(2), z in tailseq(2), mp in metric_params(), m in base_metric()) {
        let dxy = seq_dist(&x, &y, mp, m).unwrap();
        prop_assert!(dxy >= 0.0);
        prop_assert_eq!(dxy, seq_dist(&y, &x, mp, m).unwrap());
        prop_assert_eq!(seq_dist(&x, &x, mp, m).unwrap(), 0.0);
        let dxz = seq_dist(&x, &z, mp, m).unwrap();
        let dyz = seq_dist(&y, &z, mp, m).unwrap();
        prop_assert!(dxz <= dxy + dyz + tol(dxz));
    }

    #[test]
    fn sup_kind_below_lp_kind(x in tailseq(2), y in tailseq(2), p in 1.0..3.0f64, q in 0.05..0.95f64) {
        let m = BaseMetric::Euclidean;
        let s = seq_dist(&x, &y, MetricParams::sup(q).unwrap(), m).unwrap();
        let l = seq_dist(&x, &y, MetricParams::lp(p, q.powf(p)).unwrap(), m).unwrap();
        prop_assert!(s <= l + tol(l));
    }

    #[test]
    fn level_one_embedding_is_isometric(x in tailseq(2), y in tailseq(2), mp in metric_params(), m in base_metric()) {
        let nx = NestedSeq::from_tailseq(&x).unwrap();
        let ny = NestedSeq::from_tailseq(&y).unwrap();
        let d1 = level_dist(&nx, &ny, mp, m).unwrap();
        let d = seq_dist(&x, &y, mp, m).unwrap();
        prop_assert!((d1 - d).abs() <= tol(d));
    }

    #[test]
    fn hausdorff_matches_brute_force(a in set(2), b in set(2), m in base_metric()) {
        let h = hausdorff(&a, &b, m).unwrap();
        prop_assert_eq!(h, hausdorff_brute(&a, &b, m).unwrap());
        prop_assert_eq!(h, hausdorff(&b, &a, m).unwrap());
        prop_assert_eq!(hausdorff(&a, &a, m).unwrap(), 0.0);
    }

    #[test]
    fn hausdorff_triangle(a in set(1), b in set(1), c in set(1)) {
        let m = BaseMetric::Absolute;
        let ac = hausdorff(&a, &c, m).unwrap();
        prop_assert!(ac <= hausdorff(&a, &b, m).unwrap() + hausdorff(&b, &c, m).unwrap() + tol(ac));
    }

    #[test]
    fn epsnet_is_a_subset_within_eps(a in set(2), eps in 0.0..0.6f64, m in base_metric()) {
        let (net, r) = epsnet_prune_with_radius(&a, eps, m);
        prop_assert!(net.len() <= a.len());
        prop_assert!(net.iter().all(|p| a.contains(p)));
        let h = hausdorff(&net, &a, m).unwrap();
        prop_assert!(h <= eps && h <= r + 1e-15);
    }

    #[test]
    fn affine_map_respects_its_certificate(x in tailseq(2), y in tailseq(2), scale in 0.01..0.2f64, ratio in 0.05..0.45f64) {
        let f = GifsMap::affine(scale, ratio, Point::from([0.1, -0.2])).unwrap();
        let mp = MetricParams::sup(0.5).unwrap();
        let l = f.lipschitz(mp).unwrap();
        let m = BaseMetric::Maximum;
        let lhs = base_dist(&f.eval(&x).unwrap(), &f.eval(&y).unwrap(), m).unwrap();
        let rhs = l * seq_dist(&x, &y, mp, m).unwrap();
        prop_assert!(lhs <= rhs + tol(rhs));
    }

    #[test]
    fn interval_hausdorff_matches_sampling(
        a in prop::collection::vec((0.0..4.0f64, 0.0..1.0f64), 1..5),
        b in prop::collection::vec((0.0..4.0f64, 0.0..1.0f64), 1..5),
    ) {
        let mk = |v: &[(f64, f64)]| IntervalSet::new(v.iter().map(|(lo, w)| [*lo, lo + w]).collect()).unwrap();
        let (ia, ib) = (mk(&a), mk(&b));
        let step = 1e-3;
        let sa = ia.sample(step).unwrap();
        let sb = ib.sample(step).unwrap();
        let h = hausdorff(&sa, &sb, BaseMetric::Absolute).unwrap();
        prop_assert!((h - ia.hausdorff(&ib)).abs() <= step);
    }
}

fn random_pair(seed: u64, default: u8) -> (TailSeq<CodePoint>, TailSeq<CodePoint>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = |r: &mut ChaCha8Rng| {
        let prefix = (0..3).map(|_| code::random_code(r, 3, 2, 2, default).unwrap()).collect();
        TailSeq::new(prefix, code::random_code(r, 3, 2, 2, default).unwrap())
    };
    let a = one(&mut rng);
    let b = one(&mut rng);
    (a, b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn shift_scales_distances_by_the_weight(seed in any::<u64>(), default in 1..=3u8, j in 1..=3u8, q in 0.1..0.9f64) {
        let (a, b) = random_pair(seed, default);
        let mp = MetricParams::sup(q).unwrap();
        let d = code::code_seq_dist(&a, &b, mp).unwrap();
        let ds = code::code_dist(&code::shift(j, &a).unwrap(), &code::shift(j, &b).unwrap(), mp).unwrap();
        prop_assert!((ds - q * d).abs() <= tol(d));
    }

    #[test]
    fn lp_shift_ratio(seed in any::<u64>(), default in 1..=3u8, p in 1.0..3.0f64, q in 0.1..0.9f64) {
        let (a, b) = random_pair(seed, default);
        let mp = MetricParams::lp(p, q).unwrap();
        let d = code::code_seq_dist(&a, &b, mp).unwrap();
        let ds = code::code_dist(&code::shift(1, &a).unwrap(), &code::shift(1, &b).unwrap(), mp).unwrap();
        prop_assert!((ds - ((1.0 - q) / 2.0).powf(1.0 / p) * d).abs() <= tol(d));
    }

    #[test]
    fn decompose_then_shift_is_identity(seed in any::<u64>(), default in 1..=4u8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = code::random_code(&mut rng, 4, 4, 3, default).unwrap();
        let (head, args) = code::decompose(&a).unwrap();
        prop_assert_eq!(code::shift(head, &args).unwrap(), a.clone());
        for i in 0..5 {
            prop_assert_eq!(code::slice(&a, i).unwrap(), args.get(i).clone());
        }
    }

    #[test]
    fn address_text_round_trip(seed in any::<u64>(), k in 0..4usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = code::random_code(&mut rng, 4, 4, 3, 2).unwrap().restrict(k).unwrap();
        let text = a.to_string();
        prop_assert_eq!(text.parse::<Address>().unwrap(), a);
    }

    #[test]
    fn code_distance_is_a_metric(seed in any::<u64>(), q in 0.1..1.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = || code::random_code(&mut rng, 3, 3, 2, 1).unwrap();
        let (x, y, z) = (c(), c(), c());
        let mp = MetricParams::sup(q).unwrap();
        let dxy = code::code_dist(&x, &y, mp).unwrap();
        prop_assert_eq!(dxy, code::code_dist(&y, &x, mp).unwrap());
        prop_assert_eq!(code::code_dist(&x, &x, mp).unwrap(), 0.0);
        prop_assert_eq!(dxy == 0.0, x == y);
        let dxz = code::code_dist(&x, &z, mp).unwrap();
        prop_assert!(dxz <= dxy + code::code_dist(&y, &z, mp).unwrap() + tol(dxz));
    }
}
