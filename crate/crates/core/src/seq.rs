//! The hierarchy X_0 = X, X_{k+1} = product of countably many X_k.
//!
//! Elements are eventually-default trees: a level-k node stores finitely many
//! explicit children plus one default child standing for every other index.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::metric::{BaseMetric, FiniteSet, MetricParams, Point, TailSeq};

/// Deepest nesting level a tree may have.
pub const MAX_LEVEL: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub enum NestedSeq<T> {
    Leaf(T),
    Node(Node<T>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node<T> {
    level: usize,
    children: BTreeMap<usize, NestedSeq<T>>,
    default: Arc<NestedSeq<T>>,
}

impl<T: Clone + PartialEq> NestedSeq<T> {
    pub fn leaf(v: T) -> Self {
        NestedSeq::Leaf(v)
    }

    /// A node one level above `default`. Children equal to the default are
    /// dropped so that equal sequences have equal representations.
    pub fn node(children: impl IntoIterator<Item = (usize, NestedSeq<T>)>, default: NestedSeq<T>) -> Result<Self> {
        let level = default.level() + 1;
        if level > MAX_LEVEL {
            return Err(Error::LevelCap(level));
        }
        let mut map = BTreeMap::new();
        for (i, c) in children {
            if c.level() + 1 != level {
                return Err(Error::LevelMismatch(c.level(), level - 1));
            }
            if c != default {
                map.insert(i, c);
            }
        }
        Ok(NestedSeq::Node(Node { level, children: map, default: Arc::new(default) }))
    }

    /// The level-k tree with every leaf equal to `v`.
    pub fn uniform(k: usize, v: T) -> Result<Self> {
        let mut t = NestedSeq::Leaf(v);
        for _ in 0..k {
            t = NestedSeq::node([], t)?;
        }
        Ok(t)
    }

    /// Level-1 tree from an anchored sequence of leaves.
    pub fn from_tailseq(x: &TailSeq<T>) -> Result<Self> {
        NestedSeq::node(
            x.prefix.iter().cloned().enumerate().map(|(i, v)| (i, NestedSeq::Leaf(v))),
            NestedSeq::Leaf(x.anchor.clone()),
        )
    }

    pub fn level(&self) -> usize {
        match self {
            NestedSeq::Leaf(_) => 0,
            NestedSeq::Node(n) => n.level,
        }
    }

    pub fn as_leaf(&self) -> Option<&T> {
        match self {
            NestedSeq::Leaf(v) => Some(v),
            NestedSeq::Node(_) => None,
        }
    }

    /// The i-th coordinate of a level >= 1 tree.
    pub fn child(&self, i: usize) -> Result<&NestedSeq<T>> {
        match self {
            NestedSeq::Leaf(_) => Err(Error::PathTooLong { len: 1, level: 0 }),
            NestedSeq::Node(n) => Ok(n.children.get(&i).unwrap_or(&n.default)),
        }
    }

    pub fn default_child(&self) -> Option<&NestedSeq<T>> {
        match self {
            NestedSeq::Leaf(_) => None,
            NestedSeq::Node(n) => Some(&n.default),
        }
    }

    /// Explicit (non-default) children in index order.
    pub fn explicit(&self) -> impl Iterator<Item = (usize, &NestedSeq<T>)> {
        let it = match self {
            NestedSeq::Leaf(_) => None,
            NestedSeq::Node(n) => Some(n.children.iter().map(|(i, c)| (*i, c))),
        };
        it.into_iter().flatten()
    }

    /// Largest explicit index plus one; 0 when only the default is present.
    pub fn support_len(&self) -> usize {
        self.explicit().last().map_or(0, |(i, _)| i + 1)
    }

    /// Repeated child lookup along `ix`.
    pub fn project(&self, ix: &[usize]) -> Result<&NestedSeq<T>> {
        if ix.len() > self.level() {
            return Err(Error::PathTooLong { len: ix.len(), level: self.level() });
        }
        let mut t = self;
        for &i in ix {
            t = t.child(i)?;
        }
        Ok(t)
    }

    /// Leaf at a full-length index path.
    pub fn leaf_at(&self, ix: &[usize]) -> Result<&T> {
        let t = self.project(ix)?;
        t.as_leaf().ok_or(Error::LevelMismatch(ix.len(), self.level()))
    }

    /// The same tree with the leaf at the full-length path `ix` replaced.
    pub fn with_leaf(&self, ix: &[usize], v: T) -> Result<Self> {
        if ix.len() != self.level() {
            return Err(Error::LevelMismatch(ix.len(), self.level()));
        }
        match self {
            NestedSeq::Leaf(_) => Ok(NestedSeq::Leaf(v)),
            NestedSeq::Node(n) => {
                let i = ix[0];
                let replaced = self.child(i)?.with_leaf(&ix[1..], v)?;
                let ch = n
                    .children
                    .iter()
                    .filter(|(j, _)| **j != i)
                    .map(|(j, c)| (*j, c.clone()))
                    .chain(std::iter::once((i, replaced)));
                NestedSeq::node(ch, (*n.default).clone())
            }
        }
    }

    /// Applies `f` to every leaf, re-canonicalising along the way.
    pub fn map_leaves<U: Clone + PartialEq>(&self, f: &impl Fn(&T) -> U) -> NestedSeq<U> {
        match self {
            NestedSeq::Leaf(v) => NestedSeq::Leaf(f(v)),
            NestedSeq::Node(n) => {
                let d = n.default.map_leaves(f);
                NestedSeq::node(n.children.iter().map(|(i, c)| (*i, c.map_leaves(f))), d)
                    .expect("levels are preserved")
            }
        }
    }

    /// Like [`NestedSeq::map_leaves`] with a fallible map.
    pub fn try_map_leaves<U: Clone + PartialEq>(&self, f: &impl Fn(&T) -> Result<U>) -> Result<NestedSeq<U>> {
        match self {
            NestedSeq::Leaf(v) => Ok(NestedSeq::Leaf(f(v)?)),
            NestedSeq::Node(n) => {
                let d = n.default.try_map_leaves(f)?;
                let ch = n
                    .children
                    .iter()
                    .map(|(i, c)| Ok((*i, c.try_map_leaves(f)?)))
                    .collect::<Result<Vec<_>>>()?;
                NestedSeq::node(ch, d)
            }
        }
    }
}

fn weight_outside(mp: MetricParams, explicit: &[usize]) -> f64 {
    // sum of q^i over indices i not in `explicit` (sorted, distinct)
    let q = mp.q();
    let end = explicit.last().map_or(0, |i| i + 1);
    let mut s = q.powi(end as i32) / (1.0 - q);
    let mut it = explicit.iter().peekable();
    for i in 0..end {
        if it.peek() == Some(&&i) {
            it.next();
        } else {
            s += q.powi(i as i32);
        }
    }
    s
}

fn first_gap(explicit: &[usize]) -> usize {
    explicit.iter().enumerate().find(|(k, i)| *k != **i).map_or(explicit.len(), |(k, _)| k)
}

/// Level-k distance with an arbitrary leaf distance. Explicit children are
/// compared one by one; the remaining indices all carry the distance between
/// the two defaults and are summed in closed form.
pub fn level_dist_by<T: Clone + PartialEq>(
    x: &NestedSeq<T>,
    y: &NestedSeq<T>,
    mp: MetricParams,
    leaf: &impl Fn(&T, &T) -> Result<f64>,
) -> Result<f64> {
    mp.validate()?;
    level_dist_rec(x, y, mp, leaf)
}

fn level_dist_rec<T: Clone + PartialEq>(
    x: &NestedSeq<T>,
    y: &NestedSeq<T>,
    mp: MetricParams,
    leaf: &impl Fn(&T, &T) -> Result<f64>,
) -> Result<f64> {
    match (x, y) {
        (NestedSeq::Leaf(a), NestedSeq::Leaf(b)) => leaf(a, b),
        (NestedSeq::Node(nx), NestedSeq::Node(ny)) => {
            if nx.level != ny.level {
                return Err(Error::LevelMismatch(nx.level, ny.level));
            }
            if x == y {
                return Ok(0.0);
            }
            let mut idx: Vec<usize> = nx.children.keys().chain(ny.children.keys()).copied().collect();
            idx.sort_unstable();
            idx.dedup();
            let delta = level_dist_rec(&nx.default, &ny.default, mp, leaf)?;
            let mut ds = Vec::with_capacity(idx.len());
            for &i in &idx {
                ds.push(level_dist_rec(x.child(i)?, y.child(i)?, mp, leaf)?);
            }
            Ok(match mp {
                MetricParams::Sup { q } => {
                    let mut best = q.powi(first_gap(&idx) as i32) * delta;
                    for (i, d) in idx.iter().zip(&ds) {
                        best = best.max(q.powi(*i as i32) * d);
                    }
                    best
                }
                MetricParams::Lp { p, q } => {
                    let mut s = delta.powf(p) * weight_outside(mp, &idx);
                    for (i, d) in idx.iter().zip(&ds) {
                        s += q.powi(*i as i32) * d.powf(p);
                    }
                    s.powf(1.0 / p)
                }
            })
        }
        _ => Err(Error::LevelMismatch(x.level(), y.level())),
    }
}

/// Level-k distance between nested point sequences.
pub fn level_dist(x: &NestedSeq<Point>, y: &NestedSeq<Point>, mp: MetricParams, m: BaseMetric) -> Result<f64> {
    level_dist_by(x, y, mp, &|a: &Point, b: &Point| crate::metric::base_dist(a, b, m))
}

/// Diameter of the level-k hierarchy built over D, in closed form.
pub fn diam_level(d: &FiniteSet, k: usize, mp: MetricParams, m: BaseMetric) -> f64 {
    let base = d.diameter(m);
    match mp {
        MetricParams::Sup { .. } => base,
        MetricParams::Lp { p, q } => (1.0 - q).powf(-(k as f64) / p) * base,
    }
}

/// Diagonal sequence: level 1 is `x` itself and level k repeats level k-1
/// in every coordinate.
pub fn diagonal_embed(x: &TailSeq<Point>, k: usize) -> Result<NestedSeq<Point>> {
    if k == 0 {
        return Err(Error::InvalidParams("diagonal embedding needs k >= 1".into()));
    }
    let mut t = NestedSeq::from_tailseq(x)?;
    for _ in 1..k {
        t = NestedSeq::node([], t)?;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64) -> Point {
        Point::from(x)
    }

    #[test]
    fn project_explicit_and_default() {
        let inner = NestedSeq::node([(3, NestedSeq::leaf(v(7.0)))], NestedSeq::leaf(v(0.0))).unwrap();
        let x = NestedSeq::node([(2, inner)], NestedSeq::uniform(1, v(0.0)).unwrap()).unwrap();
        assert_eq!(x.leaf_at(&[2, 3]).unwrap(), &v(7.0));
        assert_eq!(x.leaf_at(&[2, 4]).unwrap(), &v(0.0));
        assert_eq!(x.leaf_at(&[9, 3]).unwrap(), &v(0.0));
        assert!(x.project(&[1, 1, 1]).is_err());
        let u = NestedSeq::uniform(3, v(5.0)).unwrap();
        assert_eq!(u.leaf_at(&[4, 0, 11]).unwrap(), &v(5.0));
    }

    #[test]
    fn canonical_form_drops_default_copies() {
        let t = NestedSeq::node([(0, NestedSeq::leaf(v(1.0))), (1, NestedSeq::leaf(v(2.0)))], NestedSeq::leaf(v(1.0)))
            .unwrap();
        assert_eq!(t.explicit().count(), 1);
        assert_eq!(t.support_len(), 2);
    }

    #[test]
    fn level_cap_enforced() {
        assert!(NestedSeq::uniform(MAX_LEVEL, v(0.0)).is_ok());
        assert!(NestedSeq::uniform(MAX_LEVEL + 1, v(0.0)).is_err());
    }

    #[test]
    fn diam_level_closed_form() {
        let d = FiniteSet::from_values(&[0.0, 1.0]).unwrap();
        let lp = MetricParams::lp(1.0, 0.5).unwrap();
        assert_eq!(diam_level(&d, 2, lp, BaseMetric::Absolute), 4.0);
        assert_eq!(diam_level(&d, 0, lp, BaseMetric::Absolute), 1.0);
        let sup = MetricParams::sup(0.5).unwrap();
        assert_eq!(diam_level(&d, 3, sup, BaseMetric::Absolute), 1.0);
    }

    #[test]
    fn uniform_trees_at_leaf_distance() {
        let sup = MetricParams::sup(0.3).unwrap();
        for k in 1..=4 {
            let a = NestedSeq::uniform(k, v(0.0)).unwrap();
            let b = NestedSeq::uniform(k, v(2.0)).unwrap();
            assert_eq!(level_dist(&a, &b, sup, BaseMetric::Absolute).unwrap(), 2.0);
        }
    }

    #[test]
    fn diagonal_levels() {
        let x = TailSeq::new(vec![v(1.0), v(2.0)], v(3.0));
        for k in 1..=4 {
            assert_eq!(diagonal_embed(&x, k).unwrap().level(), k);
        }
        let d = diagonal_embed(&TailSeq::constant(v(4.0)), 3).unwrap();
        assert_eq!(d, NestedSeq::uniform(3, v(4.0)).unwrap());
    }
}
