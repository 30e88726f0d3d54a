//! A planar Cantor set that is the attractor of four infinite-order maps but
//! of no finite-order system.
//!
//! Codes are sequences (e_0, e_1, ...) with e_l indexing the level-l alphabet,
//! whose size is 4^(m_0 ... m_{l-1}). An element of level l+1 is an m_l-tuple of
//! level-l elements, encoded in mixed radix with the first coordinate least
//! significant. Children of a square are placed row-major: i = e % S, j = e / S.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::metric::{BaseMetric, FiniteSet, MetricParams, Point, TailSeq};

/// Largest number of squares `squares` will enumerate.
pub const SQUARE_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct CantorParams {
    pub k: f64,
    pub q: f64,
    pub ms: Vec<u32>,
    pub ps: Vec<f64>,
    pub gaps: Vec<f64>,
}

/// Residuals of the defining equalities and the ratio inequality.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Residuals {
    pub unit: f64,
    pub nesting: Vec<f64>,
    /// p_k/a_k - K q^{m_k}/sqrt(2); all must be negative.
    pub ratio_margin: Vec<f64>,
}

fn product(ms: &[u32]) -> BigUint {
    ms.iter().fold(BigUint::one(), |acc, &m| acc * BigUint::from(m))
}

/// 2^(m_0 ... m_k) as a float, failing if it is not representable.
fn side_count(ms: &[u32]) -> Result<f64> {
    let e = product(ms).to_i32().filter(|e| *e < 1000).ok_or_else(|| {
        Error::ResourceCap("square subdivision count overflows floating point".into())
    })?;
    Ok(2f64.powi(e))
}

/// Builds (p_k) and (a_k) for k < ms.len() from the closed forms.
pub fn derive_params(k: f64, q: f64, ms: &[u32]) -> Result<CantorParams> {
    if !(k > 0.0 && k < 1.0 && q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParams(format!("K and q must lie in (0,1), got K={k}, q={q}")));
    }
    if ms.is_empty() || ms.contains(&0) {
        return Err(Error::InvalidParams("ms must be a nonempty sequence of positive integers".into()));
    }
    if ms.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParams("ms must be nondecreasing".into()));
    }
    let r2 = std::f64::consts::SQRT_2;
    let kq = |m: u32| k * q.powi(m as i32);
    let den0 = 2.0 * kq(ms[0]) + 2.0 * r2;
    let mut gaps = vec![2.0 * r2 / den0];
    let mut ps = vec![kq(ms[0]) / den0];
    for l in 0..ms.len() - 1 {
        let s = side_count(&ms[..=l])?;
        let den = s * kq(ms[l + 1]) + 2.0 * r2 * (s - 1.0);
        gaps.push(2.0 * r2 / den * ps[l]);
        ps.push(kq(ms[l + 1]) / den * ps[l]);
    }
    let params = CantorParams { k, q, ms: ms.to_vec(), ps, gaps };
    let r = params.residuals()?;
    let bad = r.unit > 1e-12
        || r.nesting.iter().any(|x| *x > 1e-12)
        || r.ratio_margin.iter().any(|x| *x >= 0.0);
    if bad {
        return Err(Error::InvalidParams(format!("derived parameters violate their constraints: {r:?}")));
    }
    Ok(params)
}

impl CantorParams {
    pub fn residuals(&self) -> Result<Residuals> {
        let unit = (2.0 * self.ps[0] + self.gaps[0] - 1.0).abs();
        let mut nesting = Vec::new();
        for l in 0..self.ps.len() - 1 {
            let s = side_count(&self.ms[..=l])?;
            nesting.push((s * self.ps[l + 1] + (s - 1.0) * self.gaps[l + 1] - self.ps[l]).abs());
        }
        let ratio_margin = (0..self.ps.len())
            .map(|l| self.ps[l] / self.gaps[l] - self.k * self.q.powi(self.ms[l] as i32) / std::f64::consts::SQRT_2)
            .collect();
        Ok(Residuals { unit, nesting, ratio_margin })
    }

    /// Deepest level whose squares are defined.
    pub fn max_level(&self) -> usize {
        self.ps.len() - 1
    }

    /// Size of the level-l alphabet, 4^(m_0 ... m_{l-1}).
    pub fn alphabet_size(&self, l: usize) -> Result<u128> {
        let e = product(&self.ms[..l]);
        let e = e.to_u32().filter(|e| *e < 63).ok_or_else(|| {
            Error::ResourceCap(format!("level-{l} alphabet too large for 128-bit codes"))
        })?;
        Ok(1u128 << (2 * e))
    }

    /// Number of children per row of a level-l square's subdivision (l >= 1),
    /// or 2 at level 0.
    fn row_count(&self, l: usize) -> Result<u128> {
        if l == 0 {
            return Ok(2);
        }
        let e = product(&self.ms[..l]).to_u32().filter(|e| *e < 63).ok_or_else(|| {
            Error::ResourceCap("subdivision too fine".into())
        })?;
        Ok(1u128 << e)
    }

    fn pitch(&self, l: usize) -> f64 {
        self.ps[l] + self.gaps[l]
    }

    /// Lower-left corner of the square addressed by `code` (levels 0..=len-1).
    pub fn corner(&self, code: &[u128]) -> Result<Point> {
        if code.is_empty() || code.len() > self.ps.len() {
            return Err(Error::InvalidParams(format!("address depth {} out of range", code.len())));
        }
        let (mut x, mut y) = (0.0, 0.0);
        for (l, &e) in code.iter().enumerate() {
            if e >= self.alphabet_size(l)? {
                return Err(Error::InvalidParams(format!("symbol {e} out of range at level {l}")));
            }
            let s = self.row_count(l)?;
            let h = self.pitch(l);
            x += (e % s) as f64 * h;
            y += (e / s) as f64 * h;
        }
        Ok(Point::from([x, y]))
    }

    pub fn square(&self, code: &[u128]) -> Result<Square> {
        let c = self.corner(code)?;
        Ok(Square { origin: (c.coords()[0], c.coords()[1]), side: self.ps[code.len() - 1] })
    }

    /// The code of depth `depth` whose corner is `p`. Points that are not
    /// corners are located in the square containing them.
    pub fn decode(&self, p: &[f64], depth: usize) -> Result<Vec<u128>> {
        if depth > self.max_level() {
            return Err(Error::InvalidParams(format!("depth {depth} beyond defined levels")));
        }
        let (mut x, mut y) = (p[0], p[1]);
        let mut out = Vec::with_capacity(depth + 1);
        for l in 0..=depth {
            let s = self.row_count(l)?;
            let h = self.pitch(l);
            let slack = 1e-9 * self.ps[l];
            let i = (((x + slack) / h).floor().max(0.0) as u128).min(s - 1);
            let j = (((y + slack) / h).floor().max(0.0) as u128).min(s - 1);
            x -= i as f64 * h;
            y -= j as f64 * h;
            out.push(j * s + i);
        }
        Ok(out)
    }

    /// Every square at depth k, keyed by its code, in lexicographic code order.
    pub fn squares(&self, depth: usize) -> Result<Vec<(Vec<u128>, Square)>> {
        if depth > self.max_level() {
            return Err(Error::InvalidParams(format!("depth {depth} beyond defined levels")));
        }
        let mut total: u128 = 1;
        for l in 0..=depth {
            total = total.saturating_mul(self.alphabet_size(l)?);
            if total > SQUARE_CAP as u128 {
                return Err(Error::ResourceCap(format!("depth-{depth} family exceeds {SQUARE_CAP} squares")));
            }
        }
        let mut out = Vec::with_capacity(total as usize);
        let mut code = vec![0u128; depth + 1];
        loop {
            out.push((code.clone(), self.square(&code)?));
            let mut l = depth;
            loop {
                code[l] += 1;
                if code[l] < self.alphabet_size(l)? {
                    break;
                }
                code[l] = 0;
                if l == 0 {
                    return Ok(out);
                }
                l -= 1;
            }
        }
    }

    /// Regrouping map i(α_0, α_1, ...) on codes: level 0 of the output is
    /// `symbol - 1` and level l+1 packs the level-l entries of the first m_l
    /// inputs. Output levels beyond `top_level` are dropped.
    pub fn regroup(&self, symbol: u8, codes: &TailSeq<Vec<u128>>, top_level: usize) -> Result<Vec<u128>> {
        if !(1..=4).contains(&symbol) {
            return Err(Error::InvalidParams(format!("symbol {symbol} outside 1..4")));
        }
        let longest = codes.prefix.iter().chain(std::iter::once(&codes.anchor)).map(Vec::len).max().unwrap_or(0);
        let top = longest.min(top_level).min(self.max_level());
        let mut out = vec![u128::from(symbol - 1)];
        for l in 0..top {
            let base = self.alphabet_size(l)?;
            let mut e: u128 = 0;
            let mut w: u128 = 1;
            for j in 0..self.ms[l] as usize {
                let entry = codes.get(j).get(l).copied().unwrap_or(0);
                e += entry * w;
                w = w.saturating_mul(base);
            }
            out.push(e);
        }
        while out.len() > 1 && *out.last().unwrap() == 0 {
            out.pop();
        }
        Ok(out)
    }

    /// The four point maps as system members, acting on corners of depth `depth`.
    pub fn maps(self: &Arc<Self>, depth: usize) -> Result<Vec<CantorMap>> {
        if depth > self.max_level() {
            return Err(Error::InvalidParams(format!("depth {depth} beyond defined levels")));
        }
        Ok((1..=4).map(|s| CantorMap { params: Arc::clone(self), symbol: s, depth }).collect())
    }

    pub fn metric(&self) -> MetricParams {
        MetricParams::Sup { q: self.q }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Square {
    pub origin: (f64, f64),
    pub side: f64,
}

impl Square {
    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        x >= self.origin.0 && x <= self.origin.0 + self.side && y >= self.origin.1 && y <= self.origin.1 + self.side
    }

    pub fn center(&self) -> Point {
        Point::from([self.origin.0 + 0.5 * self.side, self.origin.1 + 0.5 * self.side])
    }
}

/// One of the four maps f_i(x_{α_0}, x_{α_1}, ...) = x_{i(α_0, α_1, ...)},
/// evaluated on square corners of a fixed depth.
#[derive(Clone, Debug, PartialEq)]
pub struct CantorMap {
    pub params: Arc<CantorParams>,
    pub symbol: u8,
    pub depth: usize,
}

impl CantorMap {
    /// Highest input index that influences the output at this depth.
    pub fn arity(&self) -> usize {
        self.params.ms[..self.depth].iter().copied().max().unwrap_or(1) as usize
    }

    pub fn eval(&self, x: &TailSeq<Point>) -> Result<Point> {
        let codes = x.try_map(|p| self.params.decode(p.coords(), self.depth))?;
        let out = self.params.regroup(self.symbol, &codes, self.depth)?;
        self.params.corner(&out)
    }

    /// Uniform error of a depth-limited evaluation: the diameter of a deepest square.
    pub fn depth_error(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.params.ps[self.depth]
    }
}

/// (1 + m_0 + m_0 m_1 + ... + m_0...m_{k-1}) as a big integer.
fn partial_products_sum(ms: &[u32], k: usize) -> BigUint {
    let mut s = BigUint::one();
    let mut p = BigUint::one();
    for &m in &ms[..k] {
        p *= BigUint::from(m);
        s += &p;
    }
    s
}

/// Evaluates (S_k)(k-1) - m_0...m_k < -k for k = 1..=k_max in exact arithmetic.
pub fn check_growth(ms: &[u32], k_max: usize) -> Result<Vec<bool>> {
    if ms.len() <= k_max {
        return Err(Error::InvalidParams(format!("need m_0..m_{k_max}, got {} terms", ms.len())));
    }
    Ok((1..=k_max)
        .map(|k| {
            let lhs = BigInt::from(partial_products_sum(ms, k)) * BigInt::from(k as i64 - 1)
                - BigInt::from(product(&ms[..=k]));
            lhs < BigInt::from(-(k as i64))
        })
        .collect())
}

/// Greedy nondecreasing sequence satisfying the growth inequality for k <= k_max.
pub fn minimal_growth_sequence(k_max: usize) -> Vec<u32> {
    let mut ms = vec![1u32];
    for k in 1..=k_max {
        let mut m = *ms.last().unwrap();
        loop {
            let mut trial = ms.clone();
            trial.push(m);
            if *check_growth(&trial, k).expect("long enough").last().unwrap() {
                ms = trial;
                break;
            }
            m += 1;
        }
    }
    ms
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct MeasureCertificate {
    pub ms: Vec<u32>,
    pub m: usize,
    pub k: usize,
    /// r_k = 4^r_k_exponent images of products of depth-k cylinders.
    pub r_k_exponent: String,
    /// Number of depth-(k+1) cylinders is 4^tile_exponent.
    pub tile_exponent: String,
    pub ok: bool,
}

/// Exact check that r_k / 4^(S_{k+1}) < 4^-k, with r_k = 4^(m S_k).
pub fn measure_certificate(ms: &[u32], m: usize, k: usize) -> Result<MeasureCertificate> {
    if k < m {
        return Err(Error::InvalidParams(format!("certificate needs k >= m, got k={k}, m={m}")));
    }
    if ms.len() <= k {
        return Err(Error::InvalidParams(format!("need m_0..m_{k}, got {} terms", ms.len())));
    }
    let r_exp = partial_products_sum(ms, k) * BigUint::from(m);
    let t_exp = partial_products_sum(ms, k + 1);
    let four = BigInt::from(4);
    let pow4 = |e: &BigUint| -> BigInt { Pow::pow(&four, e) };
    let ratio = BigRational::new(pow4(&r_exp), pow4(&t_exp));
    let bound = BigRational::new(BigInt::one(), pow4(&BigUint::from(k)));
    debug_assert!(!ratio.is_zero());
    Ok(MeasureCertificate {
        ms: ms.to_vec(),
        m,
        k,
        r_k_exponent: r_exp.to_string(),
        tile_exponent: t_exp.to_string(),
        ok: ratio < bound,
    })
}

/// Sup-kind sequence distance between two anchored sequences of points, using
/// the euclidean metric on the plane.
pub fn input_distance(x: &TailSeq<Point>, y: &TailSeq<Point>, q: f64) -> Result<f64> {
    crate::metric::seq_dist(x, y, MetricParams::Sup { q }, BaseMetric::Euclidean)
}

/// Corners of every depth-`depth` square.
pub fn corner_cloud(params: &CantorParams, depth: usize) -> Result<FiniteSet> {
    let sq = params.squares(depth)?;
    let mut flat = Vec::with_capacity(2 * sq.len());
    for (_, s) in &sq {
        flat.extend_from_slice(&[s.origin.0, s.origin.1]);
    }
    FiniteSet::from_flat(2, flat)
}

/// Centers of every depth-`depth` square.
pub fn center_cloud(params: &CantorParams, depth: usize) -> Result<FiniteSet> {
    let sq = params.squares(depth)?;
    let mut flat = Vec::with_capacity(2 * sq.len());
    for (_, s) in &sq {
        let c = s.center();
        flat.extend_from_slice(c.coords());
    }
    FiniteSet::from_flat(2, flat)
}
