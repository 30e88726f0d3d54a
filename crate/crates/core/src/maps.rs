//! Maps from anchored point sequences to points, their Lipschitz
//! certificates, the contraction conditions, generalized fixed points and
//! finite-order truncation.

use std::collections::BTreeSet;

use crate::cantor::CantorMap;
use crate::error::{Error, Result};
use crate::metric::{base_dist, seq_dist, BaseMetric, FiniteSet, MetricParams, Point, TailSeq};

/// Coefficients c_k = scale * ratio^k.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometric {
    pub scale: f64,
    pub ratio: f64,
}

impl Geometric {
    pub fn new(scale: f64, ratio: f64) -> Result<Self> {
        if !scale.is_finite() || !(ratio.abs() < 1.0) {
            return Err(Error::InvalidMap(format!(
                "coefficient series c*r^k needs finite c and |r| < 1, got c={scale}, r={ratio}"
            )));
        }
        Ok(Geometric { scale, ratio })
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.scale * self.ratio.powi(k as i32)
    }

    /// sum_{k >= m} c_k
    pub fn tail_sum(&self, m: usize) -> f64 {
        self.coeff(m) / (1.0 - self.ratio)
    }

    /// sum_{k >= m} |c_k|
    pub fn abs_tail_sum(&self, m: usize) -> f64 {
        self.coeff(m).abs() / (1.0 - self.ratio.abs())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GifsMap {
    /// x -> offset + sum_k c_k x_k
    AffineSum { coeffs: Geometric, offset: Point },
    /// x -> scale * sup_k x_k + offset, on the line
    SupScale { scale: f64, offset: f64 },
    Constant(Point),
    CodeIndex(CantorMap),
}

impl GifsMap {
    pub fn affine(scale: f64, ratio: f64, offset: Point) -> Result<Self> {
        Ok(GifsMap::AffineSum { coeffs: Geometric::new(scale, ratio)?, offset })
    }

    pub fn sup_scale(scale: f64, offset: f64) -> Result<Self> {
        if !(scale >= 0.0) || !offset.is_finite() {
            return Err(Error::InvalidMap(format!("sup map needs scale >= 0, got {scale}")));
        }
        Ok(GifsMap::SupScale { scale, offset })
    }

    /// Dimension of the points the map consumes and produces.
    pub fn dim(&self) -> usize {
        match self {
            GifsMap::AffineSum { offset, .. } => offset.dim(),
            GifsMap::SupScale { .. } => 1,
            GifsMap::Constant(p) => p.dim(),
            GifsMap::CodeIndex(_) => 2,
        }
    }

    fn check_dim(&self, x: &TailSeq<Point>) -> Result<()> {
        let d = self.dim();
        for p in x.prefix.iter().chain(std::iter::once(&x.anchor)) {
            if p.dim() != d {
                return Err(Error::DimensionMismatch(d, p.dim()));
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &TailSeq<Point>) -> Result<Point> {
        self.check_dim(x)?;
        match self {
            GifsMap::AffineSum { coeffs, offset } => {
                let mut out = offset.coords().to_vec();
                for (k, p) in x.prefix.iter().enumerate() {
                    let c = coeffs.coeff(k);
                    out.iter_mut().zip(p.coords()).for_each(|(o, v)| *o += c * v);
                }
                let t = coeffs.tail_sum(x.prefix_len());
                out.iter_mut().zip(x.anchor.coords()).for_each(|(o, v)| *o += t * v);
                Point::new(out)
            }
            GifsMap::SupScale { scale, offset } => {
                let m = x.prefix.iter().map(|p| p.coords()[0]).fold(x.anchor.coords()[0], f64::max);
                Point::new(vec![scale * m + offset])
            }
            GifsMap::Constant(p) => Ok(p.clone()),
            GifsMap::CodeIndex(c) => c.eval(x),
        }
    }

    /// f(x, x, x, ...)
    pub fn tilde_eval(&self, x: &Point) -> Result<Point> {
        self.eval(&TailSeq::constant(x.clone()))
    }

    /// Analytic Lipschitz constant with respect to the given sequence metric,
    /// or `None` when the map is not Lipschitz there.
    pub fn lipschitz(&self, mp: MetricParams) -> Option<f64> {
        match (self, mp) {
            (GifsMap::AffineSum { coeffs, .. }, MetricParams::Sup { q }) => {
                // sum |c| (|r|/q)^k
                let rho = coeffs.ratio.abs() / q;
                (rho < 1.0).then(|| coeffs.scale.abs() / (1.0 - rho))
            }
            (GifsMap::AffineSum { coeffs, .. }, MetricParams::Lp { p, q }) => {
                // dual norm of (c_k q^{-k/p}) in l^{p'} (Hoelder)
                let rho = coeffs.ratio.abs() * q.powf(-1.0 / p);
                if p == 1.0 {
                    (rho <= 1.0).then(|| coeffs.scale.abs())
                } else {
                    let pc = p / (p - 1.0);
                    (rho < 1.0).then(|| coeffs.scale.abs() * (1.0 - rho.powf(pc)).powf(-1.0 / pc))
                }
            }
            (GifsMap::SupScale { scale, .. }, MetricParams::Sup { q: 1.0 }) => Some(*scale),
            (GifsMap::SupScale { scale, .. }, _) if *scale == 0.0 => Some(0.0),
            (GifsMap::SupScale { .. }, _) => None,
            (GifsMap::Constant(_), _) => Some(0.0),
            (GifsMap::CodeIndex(c), MetricParams::Sup { q }) if q == c.params.q => Some(c.params.k),
            (GifsMap::CodeIndex(_), _) => None,
        }
    }

    /// Bound on |f(x) - f(x')| when x, x' agree below index M and all their
    /// terms lie in a set of diameter `diam`.
    pub fn tail_error(&self, m: usize, diam: f64) -> f64 {
        match self {
            GifsMap::AffineSum { coeffs, .. } => diam * coeffs.abs_tail_sum(m),
            GifsMap::SupScale { scale, .. } => scale * diam,
            GifsMap::Constant(_) => 0.0,
            GifsMap::CodeIndex(c) => {
                let l = c.params.k;
                l * c.params.q.powi(m as i32) * diam
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    DeclaredAnalytic,
    EmpiricalLowerBound,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LipCert {
    pub mp: MetricParams,
    pub l: f64,
    pub provenance: Provenance,
}

impl LipCert {
    pub fn analytic(f: &GifsMap, mp: MetricParams) -> Option<Self> {
        f.lipschitz(mp).map(|l| LipCert { mp, l, provenance: Provenance::DeclaredAnalytic })
    }
}

/// Declared closure conditions of a map: C1 (closure of the image of a product
/// of compacta is compact), C2 (the image itself is compact).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ClosureFlags {
    pub c1: bool,
    pub c2: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Condition {
    S1,
    S2,
    Q,
    P,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GifsSystem {
    pub maps: Vec<GifsMap>,
    /// Empty, or one certificate per map under a shared metric.
    pub certs: Vec<LipCert>,
    pub flags: Vec<ClosureFlags>,
    pub metric: BaseMetric,
    /// Finite ambient space; when present, images are intersected with it.
    pub domain: Option<FiniteSet>,
}

impl GifsSystem {
    pub fn new(maps: Vec<GifsMap>, metric: BaseMetric) -> Result<Self> {
        let first = maps.first().ok_or_else(|| Error::InvalidMap("system needs at least one map".into()))?;
        let d = first.dim();
        if let Some(bad) = maps.iter().find(|f| f.dim() != d) {
            return Err(Error::DimensionMismatch(d, bad.dim()));
        }
        if metric == BaseMetric::Absolute && d != 1 {
            return Err(Error::DimensionMismatch(d, 1));
        }
        let n = maps.len();
        Ok(GifsSystem { maps, certs: Vec::new(), flags: vec![ClosureFlags::default(); n], metric, domain: None })
    }

    /// Attaches analytic certificates for every map under `mp`.
    pub fn with_analytic_certs(mut self, mp: MetricParams) -> Result<Self> {
        mp.validate()?;
        self.certs = self
            .maps
            .iter()
            .map(|f| {
                LipCert::analytic(f, mp)
                    .ok_or_else(|| Error::NotContractive(format!("no finite Lipschitz constant under {mp:?}")))
            })
            .collect::<Result<_>>()?;
        Ok(self)
    }

    pub fn with_certs(mut self, certs: Vec<LipCert>) -> Result<Self> {
        if !certs.is_empty() {
            if certs.len() != self.maps.len() {
                return Err(Error::InvalidParams("one certificate per map required".into()));
            }
            if certs.iter().any(|c| c.mp != certs[0].mp) {
                return Err(Error::InvalidParams("certificates must share metric parameters".into()));
            }
            certs[0].mp.validate()?;
        }
        self.certs = certs;
        Ok(self)
    }

    pub fn with_flags(mut self, flags: ClosureFlags) -> Self {
        self.flags = vec![flags; self.maps.len()];
        self
    }

    pub fn with_domain(mut self, domain: FiniteSet) -> Result<Self> {
        if domain.dim() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), domain.dim()));
        }
        self.domain = Some(domain);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.maps[0].dim()
    }

    pub fn metric_params(&self) -> Option<MetricParams> {
        self.certs.first().map(|c| c.mp)
    }

    /// Largest certified constant, if certificates are attached.
    pub fn l_sys(&self) -> Option<f64> {
        self.certs.iter().map(|c| c.l).reduce(f64::max)
    }

    /// Factor by which one application of the set operator shrinks a uniform
    /// perturbation of all inputs: L for sup-kind, L (1-q)^(-1/p) for lp-kind.
    pub fn perturbation_factor(&self) -> Option<f64> {
        let l = self.l_sys()?;
        Some(match self.metric_params()? {
            MetricParams::Sup { .. } => l,
            MetricParams::Lp { p, q } => l * (1.0 - q).powf(-1.0 / p),
        })
    }

    pub fn classify(&self) -> BTreeSet<Condition> {
        let mut out = BTreeSet::new();
        let (Some(mp), Some(l)) = (self.metric_params(), self.l_sys()) else {
            return out;
        };
        match mp {
            MetricParams::Sup { q } if q < 1.0 => {
                if l < 1.0 {
                    out.insert(Condition::Q);
                }
            }
            MetricParams::Sup { .. } => {
                if l < 1.0 {
                    if self.flags.iter().all(|f| f.c2) {
                        out.insert(Condition::S2);
                    }
                    if self.flags.iter().all(|f| f.c1 || f.c2) {
                        out.insert(Condition::S1);
                    }
                }
            }
            MetricParams::Lp { p, q } => {
                if l < (1.0 - q).powf(1.0 / p) {
                    out.insert(Condition::P);
                }
            }
        }
        if out.contains(&Condition::Q) || out.contains(&Condition::P) {
            out.insert(Condition::S2);
        }
        if out.contains(&Condition::S2) {
            out.insert(Condition::S1);
        }
        out
    }

    /// True when (Q) or (P) holds.
    pub fn is_strongly_contractive(&self) -> bool {
        let c = self.classify();
        c.contains(&Condition::Q) || c.contains(&Condition::P)
    }
}

/// A-priori distance bound after k generalized iterates.
pub fn iterate_bound(mp: MetricParams, l: f64, k: usize, d0: f64) -> Result<f64> {
    let k = k.max(1);
    match mp {
        MetricParams::Sup { q } => {
            let r = l.max(q);
            if !(r < 1.0) {
                return Err(Error::NotContractive(format!("max(L, q) = {r} is not below 1")));
            }
            Ok(l * r.powi(k as i32 - 1) / (1.0 - r) * d0)
        }
        MetricParams::Lp { p, q } => {
            let s = l.powf(p) + q;
            if !(s < 1.0) {
                return Err(Error::NotContractive(format!("L^p + q = {s} is not below 1")));
            }
            Ok(l * s.powf((k as f64 - 1.0) / p) / (1.0 - s.powf(1.0 / p)) * d0)
        }
    }
}

/// Generalized fixed point x = f(x, x, ...) by generalized iterates from `seed`.
/// Returns the point and the certified distance bound that stopped the loop.
pub fn gen_fixed_point(
    f: &GifsMap,
    cert: &LipCert,
    seed: &TailSeq<Point>,
    tol: f64,
    metric: BaseMetric,
) -> Result<(Point, f64)> {
    const MAX_STEPS: usize = 10_000;
    let mp = cert.mp;
    match mp {
        MetricParams::Sup { q } if q < 1.0 && cert.l < 1.0 => {}
        MetricParams::Lp { p, q } if cert.l < (1.0 - q).powf(1.0 / p) => {}
        _ => return Err(Error::NotContractive(format!("certificate L = {} under {mp:?}", cert.l))),
    }
    let mut seq = seed.clone();
    let first = f.eval(&seq)?;
    let d0 = seq_dist(seed, &seed.prepend(first.clone()), mp, metric)?;
    seq = seq.prepend(first);
    for k in 1..=MAX_STEPS {
        let b = iterate_bound(mp, cert.l, k, d0)?;
        if b <= tol {
            return Ok((seq.prefix[0].clone(), b));
        }
        let next = f.eval(&seq)?;
        seq = seq.prepend(next);
    }
    Err(Error::ResourceCap(format!("no convergence to {tol} within {MAX_STEPS} steps")))
}

/// f(x_0, ..., x_{m-1}, a, a, ...), a map of m arguments.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedMap {
    pub map: GifsMap,
    pub m: usize,
    pub anchor: Point,
}

pub fn truncate(f: &GifsMap, m: usize, anchor: Point) -> Result<TruncatedMap> {
    if m == 0 {
        return Err(Error::InvalidParams("truncation order must be at least 1".into()));
    }
    if anchor.dim() != f.dim() {
        return Err(Error::DimensionMismatch(f.dim(), anchor.dim()));
    }
    Ok(TruncatedMap { map: f.clone(), m, anchor })
}

impl TruncatedMap {
    pub fn eval(&self, args: &[Point]) -> Result<Point> {
        if args.len() != self.m {
            return Err(Error::InvalidParams(format!("expected {} arguments, got {}", self.m, args.len())));
        }
        // trailing anchor copies belong to the tail, so f_m(a, ..., a) is
        // evaluated exactly like f(a, a, ...)
        let keep = args.iter().rposition(|p| *p != self.anchor).map_or(0, |i| i + 1);
        self.map.eval(&TailSeq::new(args[..keep].to_vec(), self.anchor.clone()))
    }

    /// Fixed point of x -> f_m(x, ..., x) by plain iteration; converges for
    /// any map with a sup-kind certificate below 1.
    pub fn diagonal_fixed_point(&self, start: &Point, tol: f64, lip: f64, metric: BaseMetric) -> Result<Point> {
        if !(lip < 1.0) {
            return Err(Error::NotContractive(format!("L = {lip}")));
        }
        let mut x = start.clone();
        for _ in 0..10_000 {
            let y = self.eval(&vec![x.clone(); self.m])?;
            let step = base_dist(&x, &y, metric)?;
            x = y;
            if lip / (1.0 - lip) * step <= tol {
                return Ok(x);
            }
        }
        Err(Error::ResourceCap("diagonal iteration did not settle".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planar(offset: [f64; 2]) -> GifsMap {
        GifsMap::affine(0.1, 0.25, Point::from(offset)).unwrap()
    }

    #[test]
    fn planar_evaluations() {
        let f1 = planar([0.0, 0.0]);
        let f4 = planar([0.5, 0.5]);
        assert_eq!(f1.eval(&TailSeq::constant(Point::from([0.0, 0.0]))).unwrap(), Point::from([0.0, 0.0]));
        let v = f4.eval(&TailSeq::constant(Point::from([1.0, 1.0]))).unwrap();
        assert!((v.coords()[0] - 19.0 / 30.0).abs() < 1e-15);
        let t = f1.tilde_eval(&Point::from([1.0, 1.0])).unwrap();
        assert!((t.coords()[1] - 2.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn sup_map_uses_max_of_prefix_and_anchor() {
        let f = GifsMap::sup_scale(0.5, 0.0).unwrap();
        let x = TailSeq::new(vec![Point::from(1.0), Point::from(1.0 / 3.0)], Point::from(0.0));
        assert_eq!(f.eval(&x).unwrap(), Point::from(0.5));
        assert_eq!(f.tilde_eval(&Point::from(0.8)).unwrap(), Point::from(0.4));
    }

    #[test]
    fn tail_errors() {
        assert!((planar([0.0, 0.0]).tail_error(3, 1.0) - 1.0 / 480.0).abs() < 1e-17);
        assert!((planar([0.0, 0.0]).tail_error(0, 1.0) - 2.0 / 15.0).abs() < 1e-15);
        assert_eq!(GifsMap::Constant(Point::from(1.0)).tail_error(0, 5.0), 0.0);
    }

    #[test]
    fn truncation_identities() {
        let f1 = planar([0.0, 0.0]);
        let t = truncate(&f1, 1, Point::from([0.0, 0.0])).unwrap();
        let y = t.eval(&[Point::from([1.0, 2.0])]).unwrap();
        assert!((y.coords()[0] - 0.1).abs() < 1e-16 && (y.coords()[1] - 0.2).abs() < 1e-16);
        let a = Point::from([0.3, 0.7]);
        let f4 = planar([0.5, 0.5]);
        let t4 = truncate(&f4, 3, a.clone()).unwrap();
        assert_eq!(t4.eval(&[a.clone(), a.clone(), a.clone()]).unwrap(), f4.tilde_eval(&a).unwrap());
        assert!(truncate(&f4, 0, a).is_err());
    }

    #[test]
    fn bound_formula() {
        let mp = MetricParams::sup(0.5).unwrap();
        assert!((iterate_bound(mp, 0.2, 3, 1.0).unwrap() - 0.1).abs() < 1e-16);
        assert!((iterate_bound(mp, 0.2, 1, 1.0).unwrap() - 0.4).abs() < 1e-16);
        let lp = MetricParams::lp(1.0, 0.5).unwrap();
        assert!(iterate_bound(lp, 0.6, 2, 1.0).is_err());
    }
}
