//! Invariant suites run by `hutchinf verify`. Every check reports the
//! measured value next to the limit it must not exceed.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cantor::{self, CantorParams};
use crate::code::{self, Address, CodePoint, Coding, TileSampling};
use crate::engine::{self, AttractorApprox};
use crate::error::{Error, Result};
use crate::io;
use crate::maps::{gen_fixed_point, GifsMap, GifsSystem};
use crate::metric::{
    base_dist, directed_hausdorff, epsnet_prune_with_radius, hausdorff, hausdorff_brute, hausdorff_seq,
    seq_dist, BaseMetric, FiniteSet, MetricParams, Point, TailSeq,
};
use crate::seq::{diam_level, level_dist, NestedSeq};
use crate::systems;

pub const SUITES: [&str; 6] = ["metrics", "hausdorff", "shifts", "tiles", "conjugacy", "cantor"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when value <= limit.
    pub fn le(name: &str, value: f64, limit: f64) -> Self {
        Check { name: name.into(), value, limit, passed: value <= limit }
    }

    /// A yes/no condition, recorded as value 0 (holds) or 1 (fails) against limit 0.
    pub fn holds(name: &str, ok: bool) -> Self {
        Check { name: name.into(), value: if ok { 0.0 } else { 1.0 }, limit: 0.0, passed: ok }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Report {
    fn new(suite: &str, checks: Vec<Check>) -> Self {
        Report { suite: suite.into(), passed: checks.iter().all(|c| c.passed), checks }
    }
}

/// Runs one suite, or every suite for "all".
pub fn run(suite: &str) -> Result<Vec<Report>> {
    match suite {
        "all" => SUITES.iter().map(|s| run_one(s)).collect(),
        s => Ok(vec![run_one(s)?]),
    }
}

fn run_one(suite: &str) -> Result<Report> {
    let checks = match suite {
        "metrics" => metrics()?,
        "hausdorff" => hausdorff_suite()?,
        "shifts" => shifts()?,
        "tiles" => tiles()?,
        "conjugacy" => conjugacy()?,
        "cantor" => cantor_suite()?,
        other => return Err(Error::Config(format!("unknown suite '{other}'; expected one of {SUITES:?} or all"))),
    };
    Ok(Report::new(suite, checks))
}

pub fn random_point<R: Rng>(rng: &mut R, dim: usize) -> Point {
    Point::new((0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()).expect("finite")
}

pub fn random_tailseq<R: Rng>(rng: &mut R, dim: usize, max_prefix: usize) -> TailSeq<Point> {
    let n = rng.gen_range(0..=max_prefix);
    TailSeq::new((0..n).map(|_| random_point(rng, dim)).collect(), random_point(rng, dim))
}

pub fn random_set<R: Rng>(rng: &mut R, dim: usize, max_len: usize) -> FiniteSet {
    let n = rng.gen_range(1..=max_len);
    let pts: Vec<Point> = (0..n).map(|_| random_point(rng, dim)).collect();
    FiniteSet::from_points(&pts).expect("nonempty")
}

fn rel(x: f64) -> f64 {
    1e-12 * (1.0 + x.abs())
}

fn metrics() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checks = Vec::new();
    let mps = [MetricParams::sup(0.5)?, MetricParams::sup(1.0)?, MetricParams::lp(1.0, 0.5)?, MetricParams::lp(2.5, 0.3)?];
    let (mut asym, mut tri, mut selfd): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..200 {
        let (x, y, z) = (random_tailseq(&mut rng, 2, 6), random_tailseq(&mut rng, 2, 6), random_tailseq(&mut rng, 2, 6));
        for mp in mps {
            for m in [BaseMetric::Euclidean, BaseMetric::Maximum] {
                let dxy = seq_dist(&x, &y, mp, m)?;
                asym = asym.max((dxy - seq_dist(&y, &x, mp, m)?).abs());
                tri = tri.max(seq_dist(&x, &z, mp, m)? - dxy - seq_dist(&y, &z, mp, m)?);
                selfd = selfd.max(seq_dist(&x, &x, mp, m)?);
            }
        }
    }
    checks.push(Check::le("sequence metric symmetry", asym, 0.0));
    checks.push(Check::le("sequence metric triangle excess", tri, 1e-12));
    checks.push(Check::le("sequence metric self-distance", selfd, 0.0));

    // comparisons between the sup-kind and lp-kind families
    let (mut a, mut b, mut c): (f64, f64, f64) = (f64::MIN, f64::MIN, f64::MIN);
    for _ in 0..1000 {
        let (x, y) = (random_tailseq(&mut rng, 2, 8), random_tailseq(&mut rng, 2, 8));
        let m = BaseMetric::Euclidean;
        let p = rng.gen_range(1.0..3.0);
        let q = rng.gen_range(0.05..0.95f64);
        let s = seq_dist(&x, &y, MetricParams::sup(q)?, m)?;
        let lpq = seq_dist(&x, &y, MetricParams::lp(p, q.powf(p))?, m)?;
        a = a.max(s - lpq - rel(lpq));
        let q2 = rng.gen_range(q..=1.0);
        let s2 = seq_dist(&x, &y, MetricParams::sup(q2)?, m)?;
        b = b.max(s - s2 - rel(s2));
        let qp = rng.gen_range(q.powf(1.0 / p)..1.0);
        let lhs = seq_dist(&x, &y, MetricParams::lp(p, q)?, m)?;
        let rhs = (1.0 - q / qp.powf(p)).powf(-1.0 / p) * seq_dist(&x, &y, MetricParams::sup(qp)?, m)?;
        c = c.max(lhs - rhs - rel(rhs));
    }
    checks.push(Check::le("sup-kind below lp-kind with q^p", a, 0.0));
    checks.push(Check::le("sup-kind monotone in q", b, 0.0));
    checks.push(Check::le("lp-kind below scaled sup-kind", c, 0.0));

    let mut lvl: f64 = 0.0;
    for _ in 0..100 {
        let (x, y) = (random_tailseq(&mut rng, 2, 6), random_tailseq(&mut rng, 2, 6));
        for mp in mps {
            let m = BaseMetric::Maximum;
            let d1 = level_dist(&NestedSeq::from_tailseq(&x)?, &NestedSeq::from_tailseq(&y)?, mp, m)?;
            lvl = lvl.max((d1 - seq_dist(&x, &y, mp, m)?).abs());
        }
    }
    checks.push(Check::le("level-1 metric equals sequence metric", lvl, 1e-12));

    let mut dl: f64 = 0.0;
    for _ in 0..20 {
        let d = random_set(&mut rng, 2, 12);
        let base = d.diameter(BaseMetric::Euclidean);
        for k in 0..=4 {
            dl = dl.max((diam_level(&d, k, MetricParams::sup(0.5)?, BaseMetric::Euclidean) - base).abs());
        }
    }
    checks.push(Check::le("sup-kind level diameters equal the base diameter", dl, 0.0));
    Ok(checks)
}

/// sup over k < M of q^k d(x_k, y_k) on explicit length-M vectors.
fn truncated_sup(x: &[Point], y: &[Point], q: f64, m: BaseMetric) -> Result<f64> {
    let mut best: f64 = 0.0;
    for (k, (a, b)) in x.iter().zip(y).enumerate() {
        best = best.max(q.powi(k as i32) * base_dist(a, b, m)?);
    }
    Ok(best)
}

fn truncated_lp(x: &[Point], y: &[Point], p: f64, q: f64, m: BaseMetric) -> Result<f64> {
    let mut s = 0.0;
    for (k, (a, b)) in x.iter().zip(y).enumerate() {
        s += q.powi(k as i32) * base_dist(a, b, m)?.powf(p);
    }
    Ok(s.powf(1.0 / p))
}

/// Every element of the product of a set sequence with a singleton anchor,
/// written out to length `len`.
fn product_elements(ks: &TailSeq<FiniteSet>, len: usize) -> Vec<Vec<Point>> {
    let anchor = ks.anchor.first();
    let mut out = vec![Vec::new()];
    for k in 0..len {
        let choices: Vec<Point> = if k < ks.prefix_len() { ks.prefix[k].points() } else { vec![anchor.clone()] };
        out = out
            .into_iter()
            .flat_map(|v| {
                choices.iter().map(move |c| {
                    let mut w = v.clone();
                    w.push(c.clone());
                    w
                })
            })
            .collect();
    }
    out
}

fn product_hausdorff(xs: &[Vec<Point>], ys: &[Vec<Point>], d: &impl Fn(&[Point], &[Point]) -> Result<f64>) -> Result<f64> {
    let directed = |a: &[Vec<Point>], b: &[Vec<Point>]| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for x in a {
            let mut best = f64::INFINITY;
            for y in b {
                best = best.min(d(x, y)?);
            }
            worst = worst.max(best);
        }
        Ok(worst)
    };
    Ok(directed(xs, ys)?.max(directed(ys, xs)?))
}

fn random_set_seq<R: Rng>(rng: &mut R, dim: usize) -> TailSeq<FiniteSet> {
    let n = rng.gen_range(0..=3);
    let prefix = (0..n).map(|_| random_set(rng, dim, 3)).collect();
    TailSeq::new(prefix, FiniteSet::singleton(&random_point(rng, dim)))
}

fn hausdorff_suite() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut checks = Vec::new();
    let mut gap: f64 = 0.0;
    for i in 0..200 {
        let (dim, m) = match i % 3 {
            0 => (1, BaseMetric::Absolute),
            1 => (2, BaseMetric::Euclidean),
            _ => (2, BaseMetric::Maximum),
        };
        let a = random_set(&mut rng, dim, 60);
        let b = random_set(&mut rng, dim, 60);
        gap = gap.max((hausdorff(&a, &b, m)? - hausdorff_brute(&a, &b, m)?).abs());
    }
    checks.push(Check::le("sweep Hausdorff equals brute force", gap, 0.0));

    let mut net: f64 = f64::MIN;
    for _ in 0..50 {
        let a = random_set(&mut rng, 2, 300);
        let eps = rng.gen_range(0.0..0.5);
        for m in [BaseMetric::Euclidean, BaseMetric::Maximum] {
            let (s, _) = epsnet_prune_with_radius(&a, eps, m);
            net = net.max(hausdorff(&s, &a, m)? - eps);
        }
    }
    checks.push(Check::le("epsilon-net stays within eps", net, 0.0));

    const M: usize = 40;
    let (mut sup_gap, mut lp_excess): (f64, f64) = (0.0, f64::MIN);
    let m = BaseMetric::Euclidean;
    for _ in 0..40 {
        let ks = random_set_seq(&mut rng, 2);
        let ds = random_set_seq(&mut rng, 2);
        let (xs, ys) = (product_elements(&ks, M), product_elements(&ds, M));
        let diam = ks.prefix.iter().chain(&ds.prefix).chain([&ks.anchor, &ds.anchor]).fold(FiniteSet::singleton(&ks.anchor.first()), |acc, s| acc.union(s).expect("same dim")).diameter(m);
        let q = 0.5;
        let brute = product_hausdorff(&xs, &ys, &|x, y| truncated_sup(x, y, q, m))?;
        let exact = hausdorff_seq(&ks, &ds, MetricParams::sup(q)?, m)?;
        sup_gap = sup_gap.max((brute - exact).abs() - q.powi(M as i32) * diam - 1e-9);
        let (p, ql) = (2.0, 0.4);
        let brute = product_hausdorff(&xs, &ys, &|x, y| truncated_lp(x, y, p, ql, m))?;
        let tail = (ql.powi(M as i32) / (1.0 - ql)).powf(1.0 / p) * diam;
        lp_excess = lp_excess.max(brute - hausdorff_seq(&ks, &ds, MetricParams::lp(p, ql)?, m)? - tail);
    }
    checks.push(Check::le("product Hausdorff equals sequence Hausdorff (sup-kind)", sup_gap, 0.0));
    checks.push(Check::le("product Hausdorff below sequence Hausdorff (lp-kind)", lp_excess, 1e-12));

    // interval against a point in two slots: (1+q)^(1/p) versus product value 1
    let h = 1.0 / 128.0;
    let grid = FiniteSet::grid_1d(0.0, 1.0, 129)?;
    let zero = FiniteSet::from_values(&[0.0])?;
    let ks = TailSeq::new(vec![grid.clone()], zero.clone());
    let ds = TailSeq::new(vec![zero.clone(), grid.clone()], zero.clone());
    let (p, q) = (2.0, 0.5);
    let mp = MetricParams::lp(p, q)?;
    let hs = hausdorff_seq(&ks, &ds, mp, BaseMetric::Absolute)?;
    checks.push(Check::le("lp sequence Hausdorff of the interval example", (hs - (1.0 + q).powf(1.0 / p)).abs(), h));
    let xs: Vec<TailSeq<Point>> = grid.iter().map(|t| TailSeq::new(vec![Point::from(t[0])], Point::from(0.0))).collect();
    let ys: Vec<TailSeq<Point>> =
        grid.iter().map(|s| TailSeq::new(vec![Point::from(0.0), Point::from(s[0])], Point::from(0.0))).collect();
    let directed = |a: &[TailSeq<Point>], b: &[TailSeq<Point>]| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for x in a {
            let mut best = f64::INFINITY;
            for y in b {
                best = best.min(seq_dist(x, y, mp, BaseMetric::Absolute)?);
            }
            worst = worst.max(best);
        }
        Ok(worst)
    };
    let prod = directed(&xs, &ys)?.max(directed(&ys, &xs)?);
    checks.push(Check::le("lp product Hausdorff of the interval example", (prod - 1.0).abs(), h));
    Ok(checks)
}

fn random_code_seq<R: Rng>(rng: &mut R, n: u8, default: u8) -> Result<TailSeq<CodePoint>> {
    let len = rng.gen_range(0..=4);
    let one = |rng: &mut R| -> Result<CodePoint> {
        let depth = rng.gen_range(0..=3);
        code::random_code(rng, n, depth, 3, default)
    };
    let prefix = (0..len).map(|_| one(rng)).collect::<Result<_>>()?;
    Ok(TailSeq::new(prefix, one(rng)?))
}

fn shifts() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut checks = Vec::new();
    let cases = [
        (MetricParams::sup(0.5)?, 0.5),
        (MetricParams::sup(0.3)?, 0.3),
        (MetricParams::lp(1.0, 0.5)?, 0.25),
        (MetricParams::lp(2.0, 0.4)?, 0.3f64.sqrt()),
    ];
    for (mp, expected) in cases {
        let mut worst: f64 = 0.0;
        let mut used = 0;
        while used < 200 {
            let s = rng.gen_range(1..=3u8);
            let (a, b) = (random_code_seq(&mut rng, 3, s)?, random_code_seq(&mut rng, 3, s)?);
            let d = code::code_seq_dist(&a, &b, mp)?;
            if d == 0.0 {
                continue;
            }
            let j = rng.gen_range(1..=3u8);
            let ratio = code::code_dist(&code::shift(j, &a)?, &code::shift(j, &b)?, mp)? / d;
            worst = worst.max((ratio - expected).abs());
            used += 1;
        }
        checks.push(Check::le(&format!("shift Lipschitz ratio under {mp:?}"), worst, 1e-12));
    }
    let (mut recon, mut inverse, mut round) = (0usize, 0usize, 0usize);
    for _ in 0..200 {
        let default = rng.gen_range(1..=4);
        let a = code::random_code(&mut rng, 4, 4, 3, default)?;
        let (h, args) = code::decompose(&a)?;
        recon += usize::from(code::shift(h, &args)? != a);
        let s = rng.gen_range(1..=3u8);
        let args = random_code_seq(&mut rng, 3, s)?;
        let t = code::shift(2, &args)?;
        for i in 0..6 {
            inverse += usize::from(code::slice(&t, i)? != *args.get(i));
        }
        let addr = a.restrict(3)?;
        round += usize::from(addr.to_string().parse::<Address>()? != addr);
    }
    checks.push(Check::le("reconstruction failures", recon as f64, 0.0));
    checks.push(Check::le("slice-after-shift failures", inverse as f64, 0.0));
    checks.push(Check::le("address round-trip failures", round as f64, 0.0));
    Ok(checks)
}

fn planar_attractor() -> Result<(GifsSystem, AttractorApprox)> {
    let sys = systems::planar()?;
    let a = engine::attractor(&sys, 0.02)?;
    Ok((sys, a))
}

/// Largest diam(tile)/diam_bound and H(union of tiles, A) minus its bound
/// over the depth-k address family.
pub fn tile_family_checks(c: &Coding, k: usize, branch: usize, opts: &TileSampling) -> Result<(f64, f64)> {
    let fam = code::address_family(c.sys.maps.len() as u8, k, branch)?;
    let mut ratio: f64 = 0.0;
    let mut flat = Vec::new();
    for alpha in &fam {
        let t = c.tile(alpha, opts)?;
        ratio = ratio.max(t.cloud.diameter(c.sys.metric) / t.diam_bound);
        flat.extend_from_slice(t.cloud.flat());
    }
    let union = FiniteSet::from_flat(c.sys.dim(), flat)?;
    let h = hausdorff(&union, &c.a.cloud, c.sys.metric)?;
    let bound = 2.0 * c.a.err + c.lam.powi(k as i32 + 1) * c.diam;
    Ok((ratio, h - bound))
}

fn tiles() -> Result<Vec<Check>> {
    let (sys, a) = planar_attractor()?;
    let c = Coding::new(&sys, &a)?;
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut checks = Vec::new();
    let opts = TileSampling { diagonal: 32, random: 8, ..TileSampling::default() };
    for k in 0..=2 {
        let (ratio, cover) = tile_family_checks(&c, k, 1, &opts)?;
        checks.push(Check::le(&format!("depth-{k} tile diameter over bound"), ratio, 1.0));
        checks.push(Check::le(&format!("depth-{k} tile cover excess"), cover, 0.0));
    }

    let mut nested: f64 = f64::MIN;
    for _ in 0..10 {
        let parent = code::random_code(&mut rng, 4, 2, 2, 1)?.restrict(1)?;
        let child = parent.concat(code::random_tree(&mut rng, 2, 2, &[1u8, 2, 3, 4])?)?;
        let (tp, tc) = (c.tile(&parent, &opts)?, c.tile(&child, &opts)?);
        nested = nested.max(directed_hausdorff(&tc.cloud, &tp.cloud, sys.metric)? - tp.diam_bound);
    }
    checks.push(Check::le("child tiles inside parent tiles", nested, 0.0));

    let code = code::random_code(&mut rng, 4, 3, 2, 2)?;
    let mut decay: f64 = 0.0;
    for k in 0..4 {
        let (e0, e1) = (c.pi(&code, k)?.1, c.pi(&code, k + 1)?.1);
        decay = decay.max(e1 / e0 - c.lam);
    }
    checks.push(Check::le("projection error decays by the tile factor", decay, 1e-12));

    let mut fixed: f64 = f64::MIN;
    for (i, f) in sys.maps.iter().enumerate() {
        let (fp, fp_err) = gen_fixed_point(f, &sys.certs[i], &TailSeq::constant(Point::origin(2)), 1e-12, sys.metric)?;
        let (p, err) = c.pi(&CodePoint::constant(i as u8 + 1), 5)?;
        fixed = fixed.max(base_dist(&p, &fp, sys.metric)? - err - fp_err);
    }
    checks.push(Check::le("constant codes project to generalized fixed points", fixed, 0.0));

    let mut surj: f64 = f64::MIN;
    let depth = 3;
    for i in (0..a.cloud.len()).step_by(a.cloud.len().div_ceil(60)) {
        let target = Point::new(a.cloud.point(i).to_vec())?;
        let (code, d) = c.descend(&target, depth, 2)?;
        let err = c.pi(&code, depth)?.1;
        surj = surj.max(d - err - a.err);
    }
    checks.push(Check::le("every attractor point is near a projected code", surj, 0.0));

    let eps = 0.05;
    let (delta, k) = c.continuity_delta(eps)?;
    let mp = sys.metric_params().expect("certified");
    let (mut cont, mut tried): (f64, usize) = (f64::MIN, 0);
    while tried < 50 {
        let alpha = code::random_code(&mut rng, 4, 3, 2, 1)?;
        let level = rng.gen_range(1..=4usize);
        let path: Vec<usize> = (0..level).map(|_| rng.gen_range(0..12)).collect();
        let beta = alpha.with_symbol(level, &path, rng.gen_range(1..=4))?;
        let d = code::code_dist(&alpha, &beta, mp)?;
        if d == 0.0 || d >= delta {
            continue;
        }
        tried += 1;
        let depth = (k + 2).min(5);
        let ((pa, ea), (pb, eb)) = (c.pi(&alpha, depth)?, c.pi(&beta, depth)?);
        cont = cont.max(base_dist(&pa, &pb, sys.metric)? - eps - ea - eb);
    }
    checks.push(Check::le("close codes project to close points", cont, 0.0));

    let pts = code::stride_sample(&a.cloud, 64);
    let mut disc: f64 = f64::MIN;
    for _ in 0..30 {
        let k = rng.gen_range(1..=2usize);
        let alpha = code::random_code(&mut rng, 4, k + 1, 2, 1)?.restrict(k)?;
        let mut beta_code = alpha.extend(1)?;
        for _ in 0..2 {
            let l = rng.gen_range(1..=k);
            let path: Vec<usize> = (0..l).map(|_| rng.gen_range(0..4)).collect();
            beta_code = beta_code.with_symbol(l, &path, rng.gen_range(1..=4))?;
        }
        let beta = beta_code.restrict(k)?;
        let bound = code::discrepancy_bound(&alpha, &beta, c.diam + 2.0 * a.err, mp)?;
        let slack = 2.0 * c.lam.powi(k as i32 + 1) * a.err;
        for _ in 0..5 {
            let x = code::random_tree(&mut rng, k + 1, 3, &pts)?;
            let gap = base_dist(&code::compose_address(&sys, &alpha, &x)?, &code::compose_address(&sys, &beta, &x)?, sys.metric)?;
            disc = disc.max(gap - bound - slack);
        }
    }
    checks.push(Check::le("address discrepancy within bound", disc, 1e-12));
    Ok(checks)
}

/// The first code of the sup-pair witness: symbol 2 at index n of entry 1.
pub fn witness_code(n: usize) -> Result<CodePoint> {
    CodePoint::constant(1).with_symbol(1, &[n], 2)
}

/// An exact approximation record for a known finite attractor.
pub fn known_attractor(cloud: FiniteSet) -> AttractorApprox {
    AttractorApprox { cloud, err: 0.0, iterations: 0, prune_eps: 0.0, prefix: 64, bound: 0.0, slack: 0.0 }
}

fn conjugacy() -> Result<Vec<Check>> {
    let (sys, a) = planar_attractor()?;
    let c = Coding::new(&sys, &a)?;
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut checks = Vec::new();
    let mut worst: f64 = f64::MIN;
    for case in 0..50 {
        let k = case % 2;
        let alpha = code::random_code(&mut rng, 4, k + 1, 2, 1)?.restrict(k)?;
        let leaves: Vec<CodePoint> = (0..4).map(|_| code::random_code(&mut rng, 4, 3, 2, 1)).collect::<Result<_>>()?;
        let codes = code::random_tree(&mut rng, k + 1, 2, &leaves)?;
        let r = c.conjugacy(&alpha, &codes, 4)?;
        worst = worst.max(r.residual - r.budget);
    }
    checks.push(Check::le("conjugacy residual over budget, random cases", worst, 0.0));

    let mut constant: f64 = f64::MIN;
    for i in 1..=4u8 {
        let codes = NestedSeq::uniform(1, CodePoint::constant(i))?;
        let r = c.conjugacy(&Address::symbol(i), &codes, 4)?;
        constant = constant.max(r.residual - r.budget);
    }
    checks.push(Check::le("conjugacy residual over budget, constant codes", constant, 0.0));

    let single = GifsSystem::new(vec![GifsMap::Constant(Point::from([0.3, 0.7]))], BaseMetric::Maximum)?
        .with_analytic_certs(MetricParams::sup(0.5)?)?;
    let sa = known_attractor(FiniteSet::singleton(&Point::from([0.3, 0.7])));
    let sc = Coding::new(&single, &sa)?;
    let codes = NestedSeq::uniform(2, CodePoint::constant(1))?;
    let r = sc.conjugacy(&CodePoint::constant(1).restrict(1)?, &codes, 3)?;
    checks.push(Check::le("conjugacy residual, constant system", r.residual, 0.0));

    // under the weaker condition the projection jumps: codes converging to the
    // all-ones code keep projecting to 1/2 while the limit projects to 0
    let pair = systems::sup_pair(64)?;
    let pa = known_attractor(systems::sup_pair_attractor(64)?);
    let pc = Coding::new(&pair, &pa)?;
    let depth = 5;
    let (limit, lerr) = pc.pi(&CodePoint::constant(1), depth)?;
    checks.push(Check::le("witness limit projects to 0", limit.coords()[0].abs(), lerr));
    let mut jump: f64 = 0.0;
    let mut dist: f64 = 0.0;
    for n in 1..=16 {
        let w = witness_code(n)?;
        jump = jump.max((pc.pi(&w, depth)?.0.coords()[0] - 0.5).abs());
        dist = code::code_dist(&w, &CodePoint::constant(1), MetricParams::sup(0.5)?)?;
    }
    checks.push(Check::le("witness codes project to 1/2", jump, 0.0));
    checks.push(Check::le("witness codes approach the limit code", dist, 0.5f64.powi(17)));
    Ok(checks)
}

/// A random depth-`depth` code of square indices for the Cantor parameters.
pub fn random_square_code<R: Rng>(rng: &mut R, params: &CantorParams, depth: usize) -> Result<Vec<u128>> {
    (0..=depth).map(|l| Ok(rng.gen_range(0..params.alphabet_size(l)?))).collect()
}

/// Largest ratio d(f(x), f(y)) / d(x, y) over random corner sequences.
pub fn cantor_lipschitz_sample(params: &Arc<CantorParams>, depth: usize, pairs: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let maps = params.maps(depth)?;
    let arity = maps[0].arity();
    let mut worst: f64 = 0.0;
    let mut used = 0;
    while used < pairs {
        let seq = |rng: &mut ChaCha8Rng| -> Result<TailSeq<Point>> {
            let pre = (0..arity).map(|_| params.corner(&random_square_code(rng, params, depth)?)).collect::<Result<_>>()?;
            Ok(TailSeq::new(pre, params.corner(&random_square_code(rng, params, depth)?)?))
        };
        let x = seq(&mut rng)?;
        // y shares most of x, with one slot replaced
        let mut y = x.clone();
        let slot = rng.gen_range(0..=arity);
        let fresh = seq(&mut rng)?;
        if slot < arity {
            y.prefix[slot] = fresh.prefix[slot].clone();
        } else {
            y.anchor = fresh.anchor;
        }
        let d = cantor::input_distance(&x, &y, params.q)?;
        if d == 0.0 {
            continue;
        }
        used += 1;
        let f = &maps[rng.gen_range(0..4)];
        worst = worst.max(base_dist(&f.eval(&x)?, &f.eval(&y)?, BaseMetric::Euclidean)? / d);
    }
    Ok(worst)
}

fn cantor_suite() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let ms = cantor::minimal_growth_sequence(5);
    let params = cantor::derive_params(0.5, 0.5, &ms)?;
    let r = params.residuals()?;
    let worst = r.nesting.iter().fold(r.unit, |a, b| a.max(*b));
    checks.push(Check::le("parameter equality residuals", worst, 1e-12));
    let margin = r.ratio_margin.iter().copied().fold(f64::MIN, f64::max);
    checks.push(Check::holds("gap ratio inequality is strict", margin < 0.0));
    let greedy = cantor::minimal_growth_sequence(4);
    checks.push(Check::holds("greedy sequence satisfies the growth inequality", cantor::check_growth(&greedy, 4)?.iter().all(|b| *b)));
    checks.push(Check::holds("ms = (1,1,1) fails the growth inequality at k = 2", !cantor::check_growth(&[1, 1, 1], 2)?[1]));
    let mut all_ok = true;
    for k in 1..=4 {
        for m in 1..=k {
            all_ok &= cantor::measure_certificate(&greedy, m, k)?.ok;
        }
    }
    checks.push(Check::holds("measure certificate for 1 <= m <= k <= 4", all_ok));

    let p = Arc::new(cantor::derive_params(0.5, 0.5, &[1, 1, 2, 2])?);
    let ratio = cantor_lipschitz_sample(&p, 3, 500, 16)?;
    checks.push(Check::le("sampled map Lipschitz ratio", ratio, p.k));

    let squares: Vec<_> = p.squares(3)?.into_iter().map(|s| s.1).collect();
    let vp = io::Viewport::unit(256);
    let (r1, r2) = (io::rasterize_squares(&squares, &vp)?.to_ppm(), io::rasterize_squares(&squares, &vp)?.to_ppm());
    checks.push(Check::holds("depth-3 render is byte-stable", r1 == r2));
    Ok(checks)
}
