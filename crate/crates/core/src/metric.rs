//! Base metrics on R^D, weighted sequence metrics, Hausdorff distance between
//! finite clouds, and greedy epsilon-nets.
//!
//! Sequences are `TailSeq`s: a finite prefix followed by one anchor repeated
//! forever. Every tail contribution is summed in closed form.

use std::cmp::Ordering;
use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// A point of R^D.
#[derive(Clone, Debug, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Point(coords))
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl From<[f64; 1]> for Point {
    fn from(c: [f64; 1]) -> Self {
        Point(c.to_vec())
    }
}

impl From<[f64; 2]> for Point {
    fn from(c: [f64; 2]) -> Self {
        Point(c.to_vec())
    }
}

impl From<f64> for Point {
    fn from(c: f64) -> Self {
        Point(vec![c])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseMetric {
    Euclidean,
    Maximum,
    /// |x - y| on the line; points must be one-dimensional.
    Absolute,
}

impl BaseMetric {
    /// Distance between coordinate slices. Dimensions are assumed equal.
    #[inline]
    pub fn dist(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            BaseMetric::Euclidean => self.key(a, b).sqrt(),
            _ => self.key(a, b),
        }
    }

    /// A monotone image of the distance that avoids square roots:
    /// the squared distance for the euclidean metric, the distance otherwise.
    #[inline]
    pub fn key(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            BaseMetric::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum(),
            BaseMetric::Maximum | BaseMetric::Absolute => {
                a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
            }
        }
    }

    #[inline]
    fn key_to_dist(self, k: f64) -> f64 {
        match self {
            BaseMetric::Euclidean => k.sqrt(),
            _ => k,
        }
    }

    #[inline]
    fn dist_to_key(self, d: f64) -> f64 {
        match self {
            BaseMetric::Euclidean => d * d,
            _ => d,
        }
    }
}

pub fn base_dist(x: &Point, y: &Point, m: BaseMetric) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(x.dim(), y.dim()));
    }
    if m == BaseMetric::Absolute && x.dim() != 1 {
        return Err(Error::DimensionMismatch(x.dim(), 1));
    }
    Ok(m.dist(x.coords(), y.coords()))
}

/// Finite prefix of items followed by a constant anchor.
#[derive(Clone, Debug, PartialEq)]
pub struct TailSeq<T> {
    pub prefix: Vec<T>,
    pub anchor: T,
}

impl<T> TailSeq<T> {
    pub fn new(prefix: Vec<T>, anchor: T) -> Self {
        TailSeq { prefix, anchor }
    }

    pub fn constant(anchor: T) -> Self {
        TailSeq { prefix: Vec::new(), anchor }
    }

    /// The k-th term.
    pub fn get(&self, k: usize) -> &T {
        self.prefix.get(k).unwrap_or(&self.anchor)
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> TailSeq<U> {
        TailSeq { prefix: self.prefix.iter().map(&mut f).collect(), anchor: f(&self.anchor) }
    }

    pub fn try_map<U>(&self, mut f: impl FnMut(&T) -> Result<U>) -> Result<TailSeq<U>> {
        let prefix = self.prefix.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        Ok(TailSeq { prefix, anchor: f(&self.anchor)? })
    }

    /// The sequence with `head` prepended.
    pub fn prepend(&self, head: T) -> Self
    where
        T: Clone,
    {
        let mut prefix = Vec::with_capacity(self.prefix.len() + 1);
        prefix.push(head);
        prefix.extend(self.prefix.iter().cloned());
        TailSeq { prefix, anchor: self.anchor.clone() }
    }
}

/// Parameters of the weighted sequence metrics.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MetricParams {
    /// sup_k q^k d(x_k, y_k), q in (0, 1].
    Sup { q: f64 },
    /// (sum_k q^k d(x_k, y_k)^p)^(1/p), q in (0, 1), p >= 1.
    Lp { p: f64, q: f64 },
}

impl MetricParams {
    pub fn sup(q: f64) -> Result<Self> {
        let mp = MetricParams::Sup { q };
        mp.validate()?;
        Ok(mp)
    }

    pub fn lp(p: f64, q: f64) -> Result<Self> {
        let mp = MetricParams::Lp { p, q };
        mp.validate()?;
        Ok(mp)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            MetricParams::Sup { q } if q > 0.0 && q <= 1.0 => Ok(()),
            MetricParams::Sup { q } => Err(Error::InvalidMetric(format!("sup-kind needs q in (0,1], got {q}"))),
            MetricParams::Lp { p, q } if q > 0.0 && q < 1.0 && p >= 1.0 && p.is_finite() => Ok(()),
            MetricParams::Lp { p, q } => Err(Error::InvalidMetric(format!(
                "lp-kind needs q in (0,1) and p >= 1, got p={p}, q={q}"
            ))),
        }
    }

    pub fn q(&self) -> f64 {
        match *self {
            MetricParams::Sup { q } | MetricParams::Lp { q, .. } => q,
        }
    }

    pub fn is_sup(&self) -> bool {
        matches!(self, MetricParams::Sup { .. })
    }

    /// Aggregates per-coordinate distances `d[k]` for k < d.len() with the
    /// constant distance `tail` at every later coordinate.
    pub fn aggregate(&self, d: &[f64], tail: f64) -> f64 {
        let m = d.len() as i32;
        match *self {
            MetricParams::Sup { q } => {
                let mut best = if q < 1.0 { q.powi(m) * tail } else { tail };
                let mut w = 1.0;
                for &x in d {
                    best = best.max(w * x);
                    w *= q;
                }
                best
            }
            MetricParams::Lp { p, q } => {
                let mut s = 0.0;
                let mut w = 1.0;
                for &x in d {
                    s += w * x.powf(p);
                    w *= q;
                }
                s += tail.powf(p) * q.powi(m) / (1.0 - q);
                s.powf(1.0 / p)
            }
        }
    }
}

/// Distance between two anchored sequences of points.
pub fn seq_dist(x: &TailSeq<Point>, y: &TailSeq<Point>, mp: MetricParams, m: BaseMetric) -> Result<f64> {
    mp.validate()?;
    let n = x.prefix_len().max(y.prefix_len());
    let d = (0..n).map(|k| base_dist(x.get(k), y.get(k), m)).collect::<Result<Vec<_>>>()?;
    let tail = base_dist(&x.anchor, &y.anchor, m)?;
    Ok(mp.aggregate(&d, tail))
}

/// A nonempty finite point cloud, stored flat and sorted lexicographically
/// without duplicates. Points are at least `dedup_tol` apart.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSet {
    dim: usize,
    coords: Vec<f64>,
    dedup_tol: f64,
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

impl FiniteSet {
    /// Builds a set from flat coordinates, sorting and removing exact duplicates.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParams("dimension must be positive".into()));
        }
        if coords.is_empty() {
            return Err(Error::EmptySet);
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidParams(format!("{} coordinates do not split into points of dimension {dim}", coords.len())));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self::canonical(dim, coords, 0.0))
    }

    pub fn from_points(points: &[Point]) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptySet)?;
        let dim = first.dim();
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch(dim, p.dim()));
            }
            coords.extend_from_slice(p.coords());
        }
        Self::from_flat(dim, coords)
    }

    pub fn singleton(p: &Point) -> Self {
        FiniteSet { dim: p.dim(), coords: p.coords().to_vec(), dedup_tol: 0.0 }
    }

    /// Values on the line.
    pub fn from_values(vals: &[f64]) -> Result<Self> {
        Self::from_flat(1, vals.to_vec())
    }

    /// Uniform grid on [lo, hi] with `n` intervals (n + 1 points).
    pub fn grid_1d(lo: f64, hi: f64, n: usize) -> Result<Self> {
        let n = n.max(1);
        let vals: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        Self::from_values(&vals)
    }

    fn canonical(dim: usize, mut coords: Vec<f64>, dedup_tol: f64) -> Self {
        // fold -0.0 into +0.0 so that ordering and equality agree
        coords.iter_mut().for_each(|x| *x += 0.0);
        let n = coords.len() / dim;
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&i, &j| lex_cmp(&coords[i * dim..(i + 1) * dim], &coords[j * dim..(j + 1) * dim]));
        let mut out: Vec<f64> = Vec::with_capacity(coords.len());
        for i in idx {
            let p = &coords[i * dim..(i + 1) * dim];
            let l = out.len();
            if l >= dim && lex_cmp(&out[l - dim..], p) == Ordering::Equal {
                continue;
            }
            out.extend_from_slice(p);
        }
        FiniteSet { dim, coords: out, dedup_tol }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false: sets are nonempty by construction.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dedup_tol(&self) -> f64 {
        self.dedup_tol
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn points(&self) -> Vec<Point> {
        self.iter().map(|c| Point(c.to_vec())).collect()
    }

    pub fn flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn first(&self) -> Point {
        Point(self.point(0).to_vec())
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        let n = self.len();
        let (mut lo, mut hi) = (0usize, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match lex_cmp(self.point(mid), p) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return true,
            }
        }
        false
    }

    /// Image under x -> c * x + b.
    pub fn affine(&self, c: f64, b: &[f64]) -> Self {
        let mut out = Vec::with_capacity(self.coords.len());
        for p in self.iter() {
            out.extend(p.iter().zip(b).map(|(x, o)| c * x + o));
        }
        Self::canonical(self.dim, out, 0.0)
    }

    pub fn union(&self, other: &FiniteSet) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut c = self.coords.clone();
        c.extend_from_slice(&other.coords);
        Ok(Self::canonical(self.dim, c, 0.0))
    }

    /// Largest distance between two points, exact O(n^2).
    pub fn diameter(&self, m: BaseMetric) -> f64 {
        let n = self.len();
        let k = (0..n)
            .into_par_iter()
            .map(|i| {
                let a = self.point(i);
                (i + 1..n).fold(0.0f64, |acc, j| acc.max(m.key(a, self.point(j))))
            })
            .reduce(|| 0.0, f64::max);
        m.key_to_dist(k)
    }

    /// Largest distance from `c` to a point of the set.
    pub fn radius_from(&self, c: &[f64], m: BaseMetric) -> f64 {
        m.key_to_dist(self.iter().fold(0.0, |acc, p| acc.max(m.key(c, p))))
    }

    /// Point nearest to the bounding-box center; a cheap anchor for radius bounds.
    pub fn central_point(&self, m: BaseMetric) -> Point {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.iter() {
            for d in 0..self.dim {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let mid: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let best = self
            .iter()
            .min_by(|a, b| m.key(a, &mid).total_cmp(&m.key(b, &mid)))
            .expect("nonempty");
        Point(best.to_vec())
    }
}

fn check_pair(a: &FiniteSet, b: &FiniteSet, m: BaseMetric) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(a.dim, b.dim));
    }
    if m == BaseMetric::Absolute && a.dim != 1 {
        return Err(Error::DimensionMismatch(a.dim, 1));
    }
    Ok(())
}

/// Hausdorff distance by the plain double sup-inf over all pairs.
pub fn hausdorff_brute(a: &FiniteSet, b: &FiniteSet, m: BaseMetric) -> Result<f64> {
    check_pair(a, b, m)?;
    let directed = |x: &FiniteSet, y: &FiniteSet| {
        x.iter()
            .map(|p| y.iter().map(|q| m.key(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(m.key_to_dist(directed(a, b).max(directed(b, a))))
}

/// Hausdorff distance. Nearest neighbours are found by sweeping outward along
/// the first coordinate (sets are sorted on it), which is valid because the
/// first-coordinate gap never exceeds the distance for any supported metric.
/// Agrees exactly with [`hausdorff_brute`].
pub fn hausdorff(a: &FiniteSet, b: &FiniteSet, m: BaseMetric) -> Result<f64> {
    check_pair(a, b, m)?;
    if a.len() * b.len() <= 4096 {
        return hausdorff_brute(a, b, m);
    }
    let k = directed_key(a, b, m).max(directed_key(b, a, m));
    Ok(m.key_to_dist(k))
}

/// Directed Hausdorff distance sup_{x in a} inf_{y in b} d(x, y).
pub fn directed_hausdorff(a: &FiniteSet, b: &FiniteSet, m: BaseMetric) -> Result<f64> {
    check_pair(a, b, m)?;
    Ok(m.key_to_dist(directed_key(a, b, m)))
}

fn directed_key(a: &FiniteSet, b: &FiniteSet, m: BaseMetric) -> f64 {
    const CHUNK: usize = 256;
    let n = a.len();
    (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut worst = 0.0f64;
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let nn = nearest_key(b, a.point(i), m, worst);
                worst = worst.max(nn);
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// Smallest key from `p` to `set`; stops early once it drops to `floor` or
/// below, since the caller only needs to know it cannot raise a running max.
fn nearest_key(set: &FiniteSet, p: &[f64], m: BaseMetric, floor: f64) -> f64 {
    let n = set.len();
    let x0 = p[0];
    let start = {
        let (mut lo, mut hi) = (0usize, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if set.point(mid)[0] < x0 {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let mut best = f64::INFINITY;
    let (mut up, mut down) = (start, start);
    let (mut up_open, mut down_open) = (up < n, down > 0);
    while up_open || down_open {
        if up_open {
            let q = set.point(up);
            if m.dist_to_key(q[0] - x0) > best {
                up_open = false;
            } else {
                best = best.min(m.key(p, q));
                up += 1;
                up_open = up < n;
            }
        }
        if down_open {
            let q = set.point(down - 1);
            if m.dist_to_key(x0 - q[0]) > best {
                down_open = false;
            } else {
                best = best.min(m.key(p, q));
                down -= 1;
                down_open = down > 0;
            }
        }
        if best <= floor {
            break;
        }
    }
    best
}

/// Distance from `p` to the nearest point of `set`.
pub fn nearest_dist(set: &FiniteSet, p: &[f64], m: BaseMetric) -> f64 {
    m.key_to_dist(nearest_key(set, p, m, 0.0))
}

/// Distance between anchored sequences of sets under the induced sequence metric.
pub fn hausdorff_seq(
    ks: &TailSeq<FiniteSet>,
    ds: &TailSeq<FiniteSet>,
    mp: MetricParams,
    m: BaseMetric,
) -> Result<f64> {
    mp.validate()?;
    let n = ks.prefix_len().max(ds.prefix_len());
    let d = (0..n).map(|k| hausdorff(ks.get(k), ds.get(k), m)).collect::<Result<Vec<_>>>()?;
    let tail = hausdorff(&ks.anchor, &ds.anchor, m)?;
    Ok(mp.aggregate(&d, tail))
}

/// Incremental greedy epsilon-net over a hash grid with cells of side eps.
/// A point is dropped when some kept point lies within eps; the largest
/// such covering distance is recorded, so `radius()` bounds the Hausdorff
/// distance between the kept points and everything inserted.
pub struct NetBuilder {
    dim: usize,
    eps: f64,
    metric: BaseMetric,
    kept: Vec<f64>,
    grid: HashMap<[i64; 4], Vec<u32>>,
    exact: HashMap<Vec<u64>, ()>,
    radius: f64,
}

const GRID_DIM_MAX: usize = 4;

impl NetBuilder {
    pub fn new(dim: usize, eps: f64, metric: BaseMetric) -> Self {
        NetBuilder {
            dim,
            eps: eps.max(0.0),
            metric,
            kept: Vec::new(),
            grid: HashMap::new(),
            exact: HashMap::new(),
            radius: 0.0,
        }
    }

    fn cell(&self, p: &[f64]) -> [i64; 4] {
        let mut c = [0i64; 4];
        for (d, x) in p.iter().enumerate() {
            c[d] = (x / self.eps).floor() as i64;
        }
        c
    }

    pub fn insert(&mut self, p: &[f64]) {
        if self.eps == 0.0 {
            let key: Vec<u64> = p.iter().map(|x| (x + 0.0).to_bits()).collect();
            if self.exact.insert(key, ()).is_none() {
                self.kept.extend_from_slice(p);
            }
            return;
        }
        let eps_key = self.metric.dist_to_key(self.eps);
        if self.dim > GRID_DIM_MAX {
            let mut best = f64::INFINITY;
            for q in self.kept.chunks_exact(self.dim) {
                best = best.min(self.metric.key(p, q));
            }
            if best <= eps_key {
                self.radius = self.radius.max(self.metric.key_to_dist(best));
            } else {
                self.kept.extend_from_slice(p);
            }
            return;
        }
        let c = self.cell(p);
        let mut best = f64::INFINITY;
        let offsets = 3usize.pow(self.dim as u32);
        for o in 0..offsets {
            let mut nc = c;
            let mut r = o;
            for slot in nc.iter_mut().take(self.dim) {
                *slot += (r % 3) as i64 - 1;
                r /= 3;
            }
            if let Some(ids) = self.grid.get(&nc) {
                for &id in ids {
                    let q = &self.kept[id as usize * self.dim..(id as usize + 1) * self.dim];
                    best = best.min(self.metric.key(p, q));
                }
            }
        }
        if best <= eps_key {
            self.radius = self.radius.max(self.metric.key_to_dist(best));
        } else {
            let id = (self.kept.len() / self.dim) as u32;
            self.kept.extend_from_slice(p);
            self.grid.entry(c).or_default().push(id);
        }
    }

    pub fn len(&self) -> usize {
        self.kept.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// The kept points as a canonical set, plus the covering radius.
    pub fn finish(self) -> Result<(FiniteSet, f64)> {
        if self.kept.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut s = FiniteSet::canonical(self.dim, self.kept, 0.0);
        s.dedup_tol = self.eps;
        Ok((s, self.radius))
    }
}

/// Greedy epsilon-net: points are visited in lexicographic order and kept
/// unless an already kept point lies within eps. Returns the net and the
/// realized covering radius (at most eps).
pub fn epsnet_prune_with_radius(a: &FiniteSet, eps: f64, m: BaseMetric) -> (FiniteSet, f64) {
    if eps <= 0.0 {
        return (a.clone(), 0.0);
    }
    if a.dedup_tol >= eps {
        return (a.clone(), 0.0);
    }
    let mut nb = NetBuilder::new(a.dim, eps, m);
    for p in a.iter() {
        nb.insert(p);
    }
    nb.finish().expect("nonempty input gives nonempty net")
}

/// Greedy epsilon-net under the maximum metric of R^D.
pub fn epsnet_prune(a: &FiniteSet, eps: f64) -> FiniteSet {
    epsnet_prune_with_radius(a, eps, BaseMetric::Maximum).0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2(x: f64, y: f64) -> Point {
        Point::from([x, y])
    }

    #[test]
    fn base_distances() {
        assert_eq!(base_dist(&p2(0., 0.), &p2(3., 4.), BaseMetric::Euclidean).unwrap(), 5.0);
        assert_eq!(base_dist(&p2(0., 0.), &p2(3., 4.), BaseMetric::Maximum).unwrap(), 4.0);
        assert_eq!(base_dist(&p2(1., 2.), &p2(1., 2.), BaseMetric::Euclidean).unwrap(), 0.0);
        assert!(base_dist(&p2(0., 0.), &Point::from(1.0), BaseMetric::Euclidean).is_err());
    }

    #[test]
    fn sequence_distances() {
        let z = TailSeq::constant(Point::from(0.0));
        let x = TailSeq::new(vec![Point::from(1.0)], Point::from(0.0));
        let sup = MetricParams::sup(0.5).unwrap();
        assert_eq!(seq_dist(&x, &z, sup, BaseMetric::Absolute).unwrap(), 1.0);
        let ones = TailSeq::constant(Point::from(1.0));
        let lp = MetricParams::lp(1.0, 0.5).unwrap();
        assert!((seq_dist(&ones, &z, lp, BaseMetric::Absolute).unwrap() - 2.0).abs() < 1e-15);
        let late = TailSeq::new(vec![Point::from(0.0)], Point::from(1.0));
        assert_eq!(seq_dist(&late, &z, sup, BaseMetric::Absolute).unwrap(), 0.5);
        assert!(MetricParams::lp(1.0, 1.0).is_err());
        let q1 = MetricParams::sup(1.0).unwrap();
        assert_eq!(seq_dist(&late, &z, q1, BaseMetric::Absolute).unwrap(), 1.0);
    }

    #[test]
    fn hausdorff_small_cases() {
        let a = FiniteSet::from_values(&[0.0]).unwrap();
        let b = FiniteSet::from_values(&[0.0, 1.0]).unwrap();
        assert_eq!(hausdorff(&a, &b, BaseMetric::Absolute).unwrap(), 1.0);
        assert_eq!(hausdorff(&b, &b, BaseMetric::Absolute).unwrap(), 0.0);
        let c = FiniteSet::from_values(&[0.0, 2.0]).unwrap();
        let d = FiniteSet::from_values(&[1.0]).unwrap();
        assert_eq!(hausdorff(&c, &d, BaseMetric::Absolute).unwrap(), 1.0);
    }

    #[test]
    fn prune_example() {
        let a = FiniteSet::from_values(&[0.0, 0.4, 1.0]).unwrap();
        let s = epsnet_prune(&a, 0.5);
        assert_eq!(s.flat(), &[0.0, 1.0]);
        assert!(hausdorff_brute(&s, &a, BaseMetric::Absolute).unwrap() <= 0.5);
        assert_eq!(epsnet_prune(&a, 0.0), a);
    }

    #[test]
    fn sets_are_canonical() {
        let a = FiniteSet::from_values(&[3.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(a.flat(), &[1.0, 2.0, 3.0]);
        assert!(a.contains(&[2.0]));
        assert!(!a.contains(&[2.5]));
        assert!(FiniteSet::from_values(&[]).is_err());
        assert!(FiniteSet::from_values(&[f64::NAN]).is_err());
    }
}
