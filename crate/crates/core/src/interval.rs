//! Set iteration on the line with finite unions of closed intervals.
//!
//! Minkowski sums and Hausdorff distances of interval unions are exact, so
//! one-dimensional systems seeded with intervals can be iterated to near
//! machine precision where point clouds would need millions of points. Gaps
//! narrower than a merge width are closed; the resulting slack (half the
//! widest closed gap) is tracked like pruning slack.
//!
//! [`product_factor`] detects planar (or higher-dimensional) affine systems
//! whose attractor is the D-fold power of a line attractor, so their
//! distances under the maximum metric can be computed here.

use crate::engine::error_bound;
use crate::error::{Error, Result};
use crate::maps::{GifsMap, GifsSystem};
use crate::metric::{BaseMetric, FiniteSet, TailSeq};

/// Sorted, pairwise disjoint closed intervals; never empty.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalSet {
    ivs: Vec<[f64; 2]>,
}

impl IntervalSet {
    pub fn new(mut ivs: Vec<[f64; 2]>) -> Result<Self> {
        if ivs.is_empty() {
            return Err(Error::EmptySet);
        }
        if ivs.iter().any(|[a, b]| !a.is_finite() || !b.is_finite() || a > b) {
            return Err(Error::InvalidParams("intervals need finite ends with lo <= hi".into()));
        }
        ivs.sort_by(|x, y| x[0].total_cmp(&y[0]));
        Ok(IntervalSet { ivs: merge_sorted(ivs, 0.0).0 })
    }

    pub fn point(x: f64) -> Self {
        IntervalSet { ivs: vec![[x, x]] }
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![[lo, hi]])
    }

    pub fn intervals(&self) -> &[[f64; 2]] {
        &self.ivs
    }

    pub fn len(&self) -> usize {
        self.ivs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min(&self) -> f64 {
        self.ivs[0][0]
    }

    pub fn max(&self) -> f64 {
        self.ivs[self.ivs.len() - 1][1]
    }

    pub fn measure(&self) -> f64 {
        self.ivs.iter().map(|[a, b]| b - a).sum()
    }

    pub fn widest_gap(&self) -> f64 {
        self.ivs.windows(2).map(|w| w[1][0] - w[0][1]).fold(0.0, f64::max)
    }

    pub fn contains(&self, x: f64) -> bool {
        let i = self.ivs.partition_point(|iv| iv[1] < x);
        i < self.ivs.len() && self.ivs[i][0] <= x
    }

    pub fn dist_to(&self, x: f64) -> f64 {
        let i = self.ivs.partition_point(|iv| iv[1] < x);
        let right = self.ivs.get(i).map_or(f64::INFINITY, |iv| (iv[0] - x).max(0.0));
        let left = if i > 0 { x - self.ivs[i - 1][1] } else { f64::INFINITY };
        right.min(left)
    }

    /// c * S + b
    pub fn affine(&self, c: f64, b: f64) -> Self {
        let mut ivs: Vec<[f64; 2]> = self.ivs.iter().map(|[x, y]| [c * x + b, c * y + b]).collect();
        if c < 0.0 {
            ivs.reverse();
            ivs.iter_mut().for_each(|iv| iv.swap(0, 1));
        }
        IntervalSet { ivs }
    }

    /// Minkowski sum, closing gaps narrower than `merge`; returns the slack.
    pub fn sum(&self, other: &IntervalSet, merge: f64) -> (Self, f64) {
        let mut out = Vec::with_capacity(self.ivs.len() * other.ivs.len());
        for a in &self.ivs {
            for b in &other.ivs {
                out.push([a[0] + b[0], a[1] + b[1]]);
            }
        }
        out.sort_by(|x, y| x[0].total_cmp(&y[0]));
        let (ivs, gap) = merge_sorted(out, merge);
        (IntervalSet { ivs }, gap / 2.0)
    }

    pub fn union(&self, other: &IntervalSet, merge: f64) -> (Self, f64) {
        let mut out: Vec<[f64; 2]> = self.ivs.iter().chain(&other.ivs).copied().collect();
        out.sort_by(|x, y| x[0].total_cmp(&y[0]));
        let (ivs, gap) = merge_sorted(out, merge);
        (IntervalSet { ivs }, gap / 2.0)
    }

    /// Closes gaps narrower than `merge`; returns the slack.
    pub fn coarsen(&self, merge: f64) -> (Self, f64) {
        let (ivs, gap) = merge_sorted(self.ivs.clone(), merge);
        (IntervalSet { ivs }, gap / 2.0)
    }

    /// Points of the set at spacing at most `step` (ends of every interval included).
    pub fn sample(&self, step: f64) -> Result<FiniteSet> {
        let mut v = Vec::new();
        for [a, b] in &self.ivs {
            let n = ((b - a) / step).ceil().max(1.0) as usize;
            v.extend((0..=n).map(|i| a + (b - a) * i as f64 / n as f64));
        }
        FiniteSet::from_values(&v)
    }

    /// sup over x in self of dist(x, other).
    pub fn directed_hausdorff(&self, other: &IntervalSet) -> f64 {
        let mut worst: f64 = 0.0;
        for &[a, b] in &self.ivs {
            worst = worst.max(other.dist_to(a)).max(other.dist_to(b));
            // interior candidates: midpoints of the gaps of `other` inside [a, b]
            let lo = other.ivs.partition_point(|iv| iv[1] < a);
            for w in other.ivs[lo.saturating_sub(1)..].windows(2) {
                let m = 0.5 * (w[0][1] + w[1][0]);
                if m > b {
                    break;
                }
                if m >= a {
                    worst = worst.max(m - w[0][1]);
                }
            }
        }
        worst
    }

    pub fn hausdorff(&self, other: &IntervalSet) -> f64 {
        self.directed_hausdorff(other).max(other.directed_hausdorff(self))
    }
}

/// Merges sorted intervals that overlap or are separated by less than
/// `merge`; reports the widest gap closed.
fn merge_sorted(ivs: Vec<[f64; 2]>, merge: f64) -> (Vec<[f64; 2]>, f64) {
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(ivs.len());
    let mut closed: f64 = 0.0;
    for iv in ivs {
        match out.last_mut() {
            Some(last) if iv[0] - last[1] <= merge => {
                closed = closed.max(iv[0] - last[1]);
                last[1] = last[1].max(iv[1]);
            }
            _ => out.push(iv),
        }
    }
    (out, closed)
}

fn check_line(sys: &GifsSystem) -> Result<()> {
    if sys.dim() != 1 {
        return Err(Error::Unsupported("interval iteration needs a system on the line".into()));
    }
    if sys.domain.is_some() {
        return Err(Error::Unsupported("interval iteration does not restrict to finite domains".into()));
    }
    Ok(())
}

/// F(K_0, K_1, ...) on interval unions, with the slack of closed gaps and of
/// replacing sets beyond `depth` by their hulls.
pub fn interval_hutchinson(
    sys: &GifsSystem,
    ks: &TailSeq<IntervalSet>,
    merge: f64,
    depth: usize,
) -> Result<(IntervalSet, f64)> {
    check_line(sys)?;
    if depth == 0 {
        return Err(Error::InvalidParams("prefix depth must be at least 1".into()));
    }
    let mut images = Vec::with_capacity(sys.maps.len());
    let mut slack: f64 = 0.0;
    for f in &sys.maps {
        let (im, s) = match f {
            GifsMap::AffineSum { coeffs, offset } => {
                let explicit = if ks.anchor.len() == 1 { ks.prefix_len().min(depth) } else { depth };
                let mut s = 0.0;
                let mut lo = offset.coords()[0];
                let mut hi = lo;
                let mut add_hull = |set: &IntervalSet, c: f64, abs_c: f64, s: &mut f64| {
                    let (a, b) = if c >= 0.0 { (c * set.min(), c * set.max()) } else { (c * set.max(), c * set.min()) };
                    lo += a;
                    hi += b;
                    *s += abs_c * set.widest_gap() / 2.0;
                };
                for k in explicit..ks.prefix_len() {
                    let c = coeffs.coeff(k);
                    add_hull(&ks.prefix[k], c, c.abs(), &mut s);
                }
                let start = explicit.max(ks.prefix_len());
                add_hull(&ks.anchor, coeffs.tail_sum(start), coeffs.abs_tail_sum(start), &mut s);
                let mut acc = IntervalSet { ivs: vec![[lo, hi]] };
                for k in (0..explicit).rev() {
                    let (next, g) = acc.sum(&ks.get(k).affine(coeffs.coeff(k), 0.0), merge);
                    acc = next;
                    s += g;
                }
                (acc, s)
            }
            GifsMap::Constant(p) => (IntervalSet::point(p.coords()[0]), 0.0),
            GifsMap::SupScale { scale, offset } => {
                let sets: Vec<&IntervalSet> = ks.prefix.iter().chain(std::iter::once(&ks.anchor)).collect();
                let floor = sets.iter().map(|s| s.min()).fold(f64::NEG_INFINITY, f64::max);
                let mut parts = Vec::new();
                for s in sets {
                    for &[a, b] in s.intervals() {
                        if b >= floor {
                            parts.push([a.max(floor), b]);
                        }
                    }
                }
                (IntervalSet::new(parts)?.affine(*scale, *offset), 0.0)
            }
            GifsMap::CodeIndex(_) => return Err(Error::Unsupported("code maps act on point clouds".into())),
        };
        slack = slack.max(s);
        images.push(im);
    }
    let mut all = images.pop().expect("nonempty system");
    let mut extra: f64 = 0.0;
    for im in images {
        let (u, g) = all.union(&im, merge);
        all = u;
        extra = extra.max(g);
    }
    Ok((all, slack + extra))
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntervalAttractor {
    pub set: IntervalSet,
    pub err: f64,
    pub iterations: usize,
}

/// Generalized iterates from the seed interval until the certified error is
/// below `tol`.
pub fn interval_attractor(sys: &GifsSystem, seed: &IntervalSet, tol: f64, merge: f64) -> Result<IntervalAttractor> {
    check_line(sys)?;
    if !sys.is_strongly_contractive() {
        return Err(Error::NotContractive(format!("system satisfies only {:?}", sys.classify())));
    }
    let mp = sys.metric_params().expect("certified");
    let l = sys.l_sys().expect("certified");
    let lam = sys.perturbation_factor().expect("certified");
    let seed_seq = TailSeq::constant(seed.clone());
    let mut seq = seed_seq.clone();
    let mut d0 = 0.0;
    let mut worst: f64 = 0.0;
    for j in 1..=200 {
        let (k, s) = interval_hutchinson(sys, &seq, merge, 256)?;
        worst = worst.max(s);
        if j == 1 {
            d0 = seed.hausdorff(&k) + s;
        }
        seq = seq.prepend(k);
        let err = error_bound(mp, l, j, d0)? + worst / (1.0 - lam);
        if err <= tol {
            return Ok(IntervalAttractor { set: seq.prefix[0].clone(), err, iterations: j });
        }
    }
    Err(Error::ResourceCap(format!("tolerance {tol} not reached")))
}

/// Attractor of the order-m truncation with tail anchor `anchor`, by the
/// diagonal iteration K -> F(K, ..., K, anchor, anchor, ...).
pub fn interval_truncated_attractor(
    sys: &GifsSystem,
    m: usize,
    anchor: f64,
    seed: &IntervalSet,
    tol: f64,
    merge: f64,
) -> Result<IntervalAttractor> {
    check_line(sys)?;
    if m == 0 {
        return Err(Error::InvalidParams("truncation order must be at least 1".into()));
    }
    let lam = sys
        .perturbation_factor()
        .filter(|l| *l < 1.0 && sys.is_strongly_contractive())
        .ok_or_else(|| Error::NotContractive("truncation needs a strongly contractive system".into()))?;
    let mut cur = seed.clone();
    let mut first = None;
    let mut worst: f64 = 0.0;
    for j in 1..=500 {
        let ks = TailSeq::new(vec![cur.clone(); m], IntervalSet::point(anchor));
        let (next, s) = interval_hutchinson(sys, &ks, merge, m)?;
        worst = worst.max(s);
        let d1 = *first.get_or_insert(cur.hausdorff(&next) + s);
        cur = next;
        let err = lam.powi(j) / (1.0 - lam) * d1 + worst / (1.0 - lam);
        if err <= tol {
            return Ok(IntervalAttractor { set: cur, err, iterations: j as usize });
        }
    }
    Err(Error::ResourceCap(format!("tolerance {tol} not reached")))
}

/// For an affine system whose maps share one coefficient family and whose
/// offsets form a full grid V^D, returns the line system {v + sum_k c_k x_k : v in V}.
/// Its attractor A_1 gives the attractor A_1^D of the original system, and
/// under the maximum metric Hausdorff distances between such powers equal
/// the distances between the factors.
pub fn product_factor(sys: &GifsSystem) -> Option<GifsSystem> {
    let mut family = None;
    let mut offsets = Vec::new();
    for f in &sys.maps {
        let GifsMap::AffineSum { coeffs, offset } = f else { return None };
        if *family.get_or_insert(*coeffs) != *coeffs {
            return None;
        }
        offsets.push(offset.coords().to_vec());
    }
    let d = sys.dim();
    let mut vals: Vec<f64> = offsets.iter().map(|o| o[0]).collect();
    vals.sort_by(f64::total_cmp);
    vals.dedup();
    if offsets.iter().any(|o| o.iter().any(|v| !vals.contains(v))) {
        return None;
    }
    // every combination must occur exactly once
    let mut seen: Vec<Vec<u64>> = offsets.iter().map(|o| o.iter().map(|v| v.to_bits()).collect()).collect();
    seen.sort();
    seen.dedup();
    if seen.len() != offsets.len() || Some(offsets.len()) != vals.len().checked_pow(d as u32) {
        return None;
    }
    if d > 1 && sys.metric != BaseMetric::Maximum {
        return None;
    }
    let coeffs = family?;
    let maps = vals
        .iter()
        .map(|v| GifsMap::AffineSum { coeffs, offset: crate::metric::Point::from(*v) })
        .collect();
    let line = GifsSystem::new(maps, BaseMetric::Absolute).ok()?;
    let line = match sys.certs.first() {
        // the coefficient family alone fixes the certificate
        Some(c) => line.with_analytic_certs(c.mp).ok()?,
        None => line,
    };
    Some(line)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[[f64; 2]]) -> IntervalSet {
        IntervalSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn normalizes_and_sums() {
        let a = set(&[[2.0, 3.0], [0.0, 1.0], [0.5, 1.5]]);
        assert_eq!(a.intervals(), &[[0.0, 1.5], [2.0, 3.0]]);
        let (s, g) = a.sum(&set(&[[0.0, 0.25]]), 0.0);
        assert_eq!(s.intervals(), &[[0.0, 1.75], [2.0, 3.25]]);
        assert_eq!(g, 0.0);
        let (c, g) = a.coarsen(0.5);
        assert_eq!(c.intervals(), &[[0.0, 3.0]]);
        assert_eq!(g, 0.25);
        assert_eq!(a.affine(-1.0, 0.0).intervals(), &[[-3.0, -2.0], [-1.5, 0.0]]);
    }

    #[test]
    fn hausdorff_matches_dense_sampling() {
        let a = set(&[[0.0, 1.0], [3.0, 4.0]]);
        let b = set(&[[0.0, 0.2], [0.9, 3.5]]);
        // gap (0.2, 0.9) of b inside a: 0.35; a's gap (1, 3) against b: 1
        assert!((a.hausdorff(&b) - 1.0).abs() < 1e-15);
        assert!((a.directed_hausdorff(&b) - 0.5).abs() < 1e-15);
        let fa = a.sample(1e-3).unwrap();
        let fb = b.sample(1e-3).unwrap();
        let h = crate::metric::hausdorff(&fa, &fb, BaseMetric::Absolute).unwrap();
        assert!((h - a.hausdorff(&b)).abs() <= 1e-3);
    }

    #[test]
    fn contains_and_distance() {
        let a = set(&[[0.0, 1.0], [3.0, 4.0]]);
        assert!(a.contains(0.5) && a.contains(3.0) && !a.contains(2.0));
        assert_eq!(a.dist_to(2.5), 0.5);
        assert_eq!(a.dist_to(-1.0), 1.0);
        assert_eq!(a.dist_to(5.0), 1.0);
    }
}
