//! Set-valued iteration: the Hutchinson operator on sequences of finite sets,
//! generalized set iterates with certified error, diagonal iterates and
//! finite-order truncations.
//!
//! Every image carries a `slack`: an upper bound on the Hausdorff distance
//! between the computed cloud and the exact image of the given input sets.
//! Pruning contributes the realized covering radius of each net, tail
//! collapsing contributes the coefficient mass times the collapsed set radius.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::cantor::CantorMap;
use crate::error::{Error, Result};
use crate::maps::{iterate_bound, Geometric, GifsMap, GifsSystem};
use crate::metric::{hausdorff, hausdorff_seq, nearest_dist, BaseMetric, FiniteSet, MetricParams, NetBuilder, Point, TailSeq};

pub type SetSeq = TailSeq<FiniteSet>;

/// Largest number of candidate points a single Minkowski step may produce.
pub const PAIR_CAP: usize = 200_000_000;

/// A computed image together with its certified slack.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    pub set: FiniteSet,
    pub slack: f64,
}

fn check_dims(sys: &GifsSystem, ks: &SetSeq) -> Result<()> {
    let d = sys.dim();
    for s in ks.prefix.iter().chain(std::iter::once(&ks.anchor)) {
        if s.dim() != d {
            return Err(Error::DimensionMismatch(d, s.dim()));
        }
    }
    Ok(())
}

/// sum_k c_k K_k for a geometric coefficient family, without offset.
fn affine_core(coeffs: &Geometric, ks: &SetSeq, eps: f64, depth: usize, metric: BaseMetric) -> Result<Image> {
    let dim = ks.anchor.dim();
    let explicit = if ks.anchor.len() == 1 { ks.prefix_len().min(depth) } else { depth.max(1) };
    let mut base = vec![0.0; dim];
    let mut slack = 0.0;
    for k in explicit..ks.prefix_len() {
        let s = &ks.prefix[k];
        let rep = s.central_point(metric);
        let c = coeffs.coeff(k);
        base.iter_mut().zip(rep.coords()).for_each(|(b, v)| *b += c * v);
        slack += c.abs() * s.radius_from(rep.coords(), metric);
    }
    let start = explicit.max(ks.prefix_len());
    let rep = ks.anchor.central_point(metric);
    let t = coeffs.tail_sum(start);
    base.iter_mut().zip(rep.coords()).for_each(|(b, v)| *b += t * v);
    slack += coeffs.abs_tail_sum(start) * ks.anchor.radius_from(rep.coords(), metric);

    let mut acc = FiniteSet::from_flat(dim, base)?;
    for k in (0..explicit).rev() {
        let c = coeffs.coeff(k);
        let mut term = NetBuilder::new(dim, eps, metric);
        for p in ks.get(k).iter() {
            let scaled: Vec<f64> = p.iter().map(|v| c * v).collect();
            term.insert(&scaled);
        }
        let (term, r_term) = term.finish()?;
        if acc.len().saturating_mul(term.len()) > PAIR_CAP {
            return Err(Error::ResourceCap(format!(
                "Minkowski step of {} x {} points; raise the prune radius",
                acc.len(),
                term.len()
            )));
        }
        let mut sum = NetBuilder::new(dim, eps, metric);
        let mut buf = vec![0.0; dim];
        for a in acc.iter() {
            for b in term.iter() {
                for d in 0..dim {
                    buf[d] = a[d] + b[d];
                }
                sum.insert(&buf);
            }
        }
        let (s, r_sum) = sum.finish()?;
        acc = s;
        slack += r_term + r_sum;
    }
    Ok(Image { set: acc, slack })
}

/// Achievable suprema over independent finite sets: the values v of the union
/// with v >= max_i min S_i.
fn sup_image(scale: f64, offset: f64, ks: &SetSeq) -> Result<FiniteSet> {
    let sets: Vec<&FiniteSet> = ks.prefix.iter().chain(std::iter::once(&ks.anchor)).collect();
    let floor = sets.iter().map(|s| s.point(0)[0]).fold(f64::NEG_INFINITY, f64::max);
    let vals: Vec<f64> = sets
        .iter()
        .flat_map(|s| s.iter().map(|p| p[0]))
        .filter(|v| *v >= floor)
        .map(|v| scale * v + offset)
        .collect();
    FiniteSet::from_values(&vals)
}

fn code_image(c: &CantorMap, ks: &SetSeq, eps: f64, metric: BaseMetric) -> Result<Image> {
    let arity = c.arity();
    let decoded: Vec<Vec<Vec<u128>>> = (0..=arity)
        .map(|j| ks.get(j).iter().map(|p| c.params.decode(p, c.depth)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let total = decoded[..arity].iter().try_fold(1usize, |acc, d| acc.checked_mul(d.len()));
    match total {
        Some(t) if t <= PAIR_CAP => {}
        _ => return Err(Error::ResourceCap("product enumeration for code maps too large".into())),
    }
    let anchor_code = decoded[arity][0].clone();
    let mut nb = NetBuilder::new(2, eps, metric);
    let mut idx = vec![0usize; arity];
    loop {
        let prefix: Vec<Vec<u128>> = (0..arity).map(|j| decoded[j][idx[j]].clone()).collect();
        let out = c.params.regroup(c.symbol, &TailSeq::new(prefix, anchor_code.clone()), c.depth)?;
        nb.insert(c.params.corner(&out)?.coords());
        let mut j = 0;
        loop {
            if j == arity {
                let (set, r) = nb.finish()?;
                return Ok(Image { set, slack: r + c.depth_error() });
            }
            idx[j] += 1;
            if idx[j] < decoded[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// F(K_0, K_1, ...) = union of the images f_i(product of K_k), with slack.
/// `depth` is the number of leading sets kept explicit for affine maps.
pub fn hutchinson_with_slack(sys: &GifsSystem, ks: &SetSeq, prune_eps: f64, depth: usize) -> Result<Image> {
    if depth == 0 {
        return Err(Error::InvalidParams("prefix depth must be at least 1".into()));
    }
    check_dims(sys, ks)?;
    let metric = sys.metric;
    // affine maps sharing a coefficient family share the Minkowski sum
    let mut cores: HashMap<(u64, u64), usize> = HashMap::new();
    let mut families: Vec<Geometric> = Vec::new();
    for f in &sys.maps {
        if let GifsMap::AffineSum { coeffs, .. } = f {
            cores.entry((coeffs.scale.to_bits(), coeffs.ratio.to_bits())).or_insert_with(|| {
                families.push(*coeffs);
                families.len() - 1
            });
        }
    }
    let core_images: Vec<Image> = families
        .par_iter()
        .map(|g| affine_core(g, ks, prune_eps, depth, metric))
        .collect::<Result<_>>()?;
    let images: Vec<Image> = sys
        .maps
        .par_iter()
        .map(|f| -> Result<Image> {
            match f {
                GifsMap::AffineSum { coeffs, offset } => {
                    let core = &core_images[cores[&(coeffs.scale.to_bits(), coeffs.ratio.to_bits())]];
                    Ok(Image { set: core.set.affine(1.0, offset.coords()), slack: core.slack })
                }
                GifsMap::SupScale { scale, offset } => Ok(Image { set: sup_image(*scale, *offset, ks)?, slack: 0.0 }),
                GifsMap::Constant(p) => Ok(Image { set: FiniteSet::singleton(p), slack: 0.0 }),
                GifsMap::CodeIndex(c) => code_image(c, ks, prune_eps, metric),
            }
        })
        .collect::<Result<_>>()?;
    let slack = images.iter().map(|i| i.slack).fold(0.0, f64::max);
    let mut nb = NetBuilder::new(sys.dim(), prune_eps, metric);
    for im in &images {
        for p in im.set.iter() {
            if let Some(dom) = &sys.domain {
                if nearest_dist(dom, p, metric) > 1e-12 {
                    continue;
                }
            }
            nb.insert(p);
        }
    }
    if nb.is_empty() {
        return Err(Error::EmptySet);
    }
    let (set, r) = nb.finish()?;
    Ok(Image { set, slack: slack + r })
}

pub fn hutchinson(sys: &GifsSystem, ks: &SetSeq, prune_eps: f64, depth: usize) -> Result<FiniteSet> {
    hutchinson_with_slack(sys, ks, prune_eps, depth).map(|i| i.set)
}

/// F(K, K, K, ...)
pub fn hutchinson_diagonal(sys: &GifsSystem, k: &FiniteSet, prune_eps: f64, depth: usize) -> Result<Image> {
    hutchinson_with_slack(sys, &TailSeq::constant(k.clone()), prune_eps, depth)
}

/// Generalized set iterates K^1..K^k with their per-step slacks.
#[derive(Clone, Debug, PartialEq)]
pub struct Iterates {
    pub sets: Vec<FiniteSet>,
    pub slacks: Vec<f64>,
}

/// K^{j+1} = F(K^j, ..., K^1, K_0, K_1, ...).
pub fn gen_iterate_sets(sys: &GifsSystem, ks: &SetSeq, k: usize, prune_eps: f64, depth: usize) -> Result<Iterates> {
    if k == 0 {
        return Err(Error::InvalidParams("need at least one iterate".into()));
    }
    let mut seq = ks.clone();
    let mut out = Iterates { sets: Vec::with_capacity(k), slacks: Vec::with_capacity(k) };
    for _ in 0..k {
        let im = hutchinson_with_slack(sys, &seq, prune_eps, depth)?;
        seq = seq.prepend(im.set.clone());
        out.sets.push(im.set);
        out.slacks.push(im.slack);
    }
    Ok(out)
}

/// Distance bound for the k-th generalized iterate.
pub fn error_bound(mp: MetricParams, l: f64, k: usize, d0: f64) -> Result<f64> {
    iterate_bound(mp, l, k, d0)
}

/// Y_k = F(F~^k(K_0), F~^k(K_1), ...) with F~(K) = F(K, K, ...).
pub fn diagonal_iterate(sys: &GifsSystem, ks: &SetSeq, k: usize, prune_eps: f64, depth: usize) -> Result<Image> {
    let lam = sys.perturbation_factor().unwrap_or(1.0);
    let advance = |s: &FiniteSet| -> Result<(FiniteSet, f64)> {
        let mut cur = s.clone();
        let mut err = 0.0;
        for _ in 0..k {
            let im = hutchinson_diagonal(sys, &cur, prune_eps, depth)?;
            cur = im.set;
            err = im.slack + lam * err;
        }
        Ok((cur, err))
    };
    let prefix: Vec<(FiniteSet, f64)> = ks.prefix.iter().map(advance).collect::<Result<_>>()?;
    let anchor = advance(&ks.anchor)?;
    let worst = prefix.iter().map(|p| p.1).fold(anchor.1, f64::max);
    let seq = TailSeq::new(prefix.into_iter().map(|p| p.0).collect(), anchor.0);
    let im = hutchinson_with_slack(sys, &seq, prune_eps, depth)?;
    Ok(Image { set: im.set, slack: im.slack + lam * worst })
}

/// A-priori bound on H(Y_k, A) for a strongly contractive system:
/// lam^(k+1) sup_j H(K_j, F~(K_j)) / (1 - lam).
pub fn diagonal_iterate_bound(sys: &GifsSystem, ks: &SetSeq, k: usize, prune_eps: f64, depth: usize) -> Result<f64> {
    let lam = sys
        .perturbation_factor()
        .filter(|l| *l < 1.0)
        .ok_or_else(|| Error::NotContractive("diagonal operator is not a contraction".into()))?;
    let mut worst: f64 = 0.0;
    for s in ks.prefix.iter().chain(std::iter::once(&ks.anchor)) {
        let im = hutchinson_diagonal(sys, s, prune_eps, depth)?;
        worst = worst.max(hausdorff(s, &im.set, sys.metric)? + im.slack);
    }
    Ok(lam.powi(k as i32 + 1) * worst / (1.0 - lam))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttractorApprox {
    pub cloud: FiniteSet,
    /// Certified Hausdorff distance to the true attractor.
    pub err: f64,
    pub iterations: usize,
    pub prune_eps: f64,
    pub prefix: usize,
    /// Analytic part of `err`.
    pub bound: f64,
    /// Propagated pruning and tail slack, the rest of `err`.
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttractorOptions {
    pub prune_eps: Option<f64>,
    pub prefix: usize,
    pub max_iterations: usize,
}

impl Default for AttractorOptions {
    fn default() -> Self {
        AttractorOptions { prune_eps: None, prefix: 64, max_iterations: 40 }
    }
}

fn require_strong(sys: &GifsSystem) -> Result<(MetricParams, f64, f64)> {
    if !sys.is_strongly_contractive() {
        return Err(Error::NotContractive(format!("system satisfies only {:?}", sys.classify())));
    }
    let mp = sys.metric_params().expect("certified");
    let l = sys.l_sys().expect("certified");
    let lam = sys.perturbation_factor().expect("certified");
    Ok((mp, l, lam))
}

/// Starting point of the iteration: the origin, or the first domain point.
pub fn default_seed(sys: &GifsSystem) -> Point {
    match &sys.domain {
        Some(d) => d.first(),
        None => Point::origin(sys.dim()),
    }
}

pub fn attractor(sys: &GifsSystem, tol: f64) -> Result<AttractorApprox> {
    attractor_with(sys, tol, &AttractorOptions::default())
}

/// Generalized iterates from a singleton seed until the certified error
/// (analytic bound plus propagated slack) drops to `tol`.
pub fn attractor_with(sys: &GifsSystem, tol: f64, opts: &AttractorOptions) -> Result<AttractorApprox> {
    let (mp, l, lam) = require_strong(sys)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParams("tolerance must be positive".into()));
    }
    let eps = opts.prune_eps.unwrap_or(tol * (1.0 - lam) / 10.0);
    let seed = TailSeq::constant(FiniteSet::singleton(&default_seed(sys)));
    let mut seq = seed.clone();
    let mut d0 = 0.0;
    let mut worst_slack: f64 = 0.0;
    for j in 1..=opts.max_iterations {
        let im = hutchinson_with_slack(sys, &seq, eps, opts.prefix)?;
        worst_slack = worst_slack.max(im.slack);
        seq = seq.prepend(im.set);
        if j == 1 {
            d0 = hausdorff_seq(&seed, &seq, mp, sys.metric)? + im.slack;
        }
        let bound = error_bound(mp, l, j, d0)?;
        let slack = worst_slack / (1.0 - lam);
        if bound + slack <= tol {
            return Ok(AttractorApprox {
                cloud: seq.prefix[0].clone(),
                err: bound + slack,
                iterations: j,
                prune_eps: eps,
                prefix: opts.prefix,
                bound,
                slack,
            });
        }
    }
    Err(Error::ResourceCap(format!("tolerance {tol} not reached in {} iterations", opts.max_iterations)))
}

/// H(F(A, A, ...), A) for an approximation produced by [`attractor`].
pub fn invariance_residual(sys: &GifsSystem, a: &AttractorApprox) -> Result<f64> {
    let im = hutchinson_diagonal(sys, &a.cloud, a.prune_eps, a.prefix)?;
    hausdorff(&im.set, &a.cloud, sys.metric)
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ConvergenceRow {
    pub k: usize,
    pub size: usize,
    /// H(K^k, K^{k-1}); absent for the first iterate.
    pub step: Option<f64>,
    pub bound: f64,
    pub slack: f64,
    pub within: bool,
}

/// Step distances of the generalized iterates next to the analytic bound.
pub fn convergence_table(sys: &GifsSystem, k: usize, prune_eps: f64, depth: usize) -> Result<Vec<ConvergenceRow>> {
    let (mp, l, _) = require_strong(sys)?;
    let seed = TailSeq::constant(FiniteSet::singleton(&default_seed(sys)));
    let it = gen_iterate_sets(sys, &seed, k, prune_eps, depth)?;
    let d0 = hausdorff_seq(&seed, &seed.prepend(it.sets[0].clone()), mp, sys.metric)? + it.slacks[0];
    let mut rows = Vec::with_capacity(k);
    for j in 0..k {
        let bound = error_bound(mp, l, j + 1, d0)?;
        let step = if j == 0 { None } else { Some(hausdorff(&it.sets[j], &it.sets[j - 1], sys.metric)?) };
        rows.push(ConvergenceRow {
            k: j + 1,
            size: it.sets[j].len(),
            step,
            bound,
            slack: it.slacks[j],
            within: step.is_none_or(|s| s <= bound),
        });
    }
    Ok(rows)
}

/// An order-m system: each map is f(x_0, ..., x_{m-1}, a, a, ...).
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSystem {
    pub base: GifsSystem,
    pub m: usize,
    pub anchor: Point,
}

pub fn truncated_system(sys: &GifsSystem, m: usize, anchor: Point) -> Result<TruncatedSystem> {
    require_strong(sys)?;
    if m == 0 {
        return Err(Error::InvalidParams("truncation order must be at least 1".into()));
    }
    if anchor.dim() != sys.dim() {
        return Err(Error::DimensionMismatch(sys.dim(), anchor.dim()));
    }
    Ok(TruncatedSystem { base: sys.clone(), m, anchor })
}

impl TruncatedSystem {
    /// F_m(K_0, ..., K_{m-1}).
    pub fn apply(&self, args: &[FiniteSet], prune_eps: f64) -> Result<Image> {
        if args.len() != self.m {
            return Err(Error::InvalidParams(format!("expected {} sets, got {}", self.m, args.len())));
        }
        let ks = TailSeq::new(args.to_vec(), FiniteSet::singleton(&self.anchor));
        hutchinson_with_slack(&self.base, &ks, prune_eps, self.m)
    }
}

/// K_{j+m} = F_m(K_j, ..., K_{j+m-1}), run k times; returns the newest set.
pub fn gifs_iterate(t: &TruncatedSystem, seeds: &[FiniteSet], k: usize, prune_eps: f64) -> Result<FiniteSet> {
    if k == 0 {
        return Err(Error::InvalidParams("need at least one step".into()));
    }
    let mut window = seeds.to_vec();
    let mut last = None;
    for _ in 0..k {
        let im = t.apply(&window, prune_eps)?;
        window.remove(0);
        window.push(im.set.clone());
        last = Some(im.set);
    }
    Ok(last.expect("k >= 1"))
}

/// Attractor of the order-m system through its diagonal operator
/// K -> F_m(K, ..., K), a contraction with the base factor.
pub fn truncated_attractor(t: &TruncatedSystem, tol: f64, prune_eps: f64) -> Result<AttractorApprox> {
    let (_, _, lam) = require_strong(&t.base)?;
    let mut cur = FiniteSet::singleton(&t.anchor);
    let mut worst_slack: f64 = 0.0;
    let mut first_step = None;
    for j in 1..=200usize {
        let im = t.apply(&vec![cur.clone(); t.m], prune_eps)?;
        worst_slack = worst_slack.max(im.slack);
        if first_step.is_none() {
            first_step = Some(hausdorff(&cur, &im.set, t.base.metric)? + im.slack);
        }
        cur = im.set;
        let bound = lam.powi(j as i32) / (1.0 - lam) * first_step.unwrap();
        let slack = worst_slack / (1.0 - lam);
        if bound + slack <= tol {
            return Ok(AttractorApprox {
                cloud: cur,
                err: bound + slack,
                iterations: j,
                prune_eps,
                prefix: t.m,
                bound,
                slack,
            });
        }
    }
    Err(Error::ResourceCap(format!("tolerance {tol} not reached")))
}
