//! The hierarchical code space: codes are sequences (α_0, α_1, ...) whose
//! k-th entry is a level-k tree over the symbols 1..=n. Shifts prepend a
//! symbol and transpose their arguments; addresses (finite code prefixes)
//! compose system maps into f_α and address tiles of the attractor.

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::engine::AttractorApprox;
use crate::error::{Error, Result};
use crate::maps::{Condition, GifsSystem};
use crate::metric::{base_dist, FiniteSet, MetricParams, Point, TailSeq};
use crate::seq::{diagonal_embed, level_dist_by, NestedSeq, MAX_LEVEL};

/// A level-k tree of symbols.
pub type CodeTree = NestedSeq<u8>;

fn discrete(a: &u8, b: &u8) -> Result<f64> {
    Ok(if a == b { 0.0 } else { 1.0 })
}

fn uniform(k: usize, s: u8) -> Result<CodeTree> {
    NestedSeq::uniform(k, s)
}

fn check_symbols(t: &CodeTree, n: u8) -> Result<()> {
    match t {
        NestedSeq::Leaf(s) if (1..=n).contains(s) => Ok(()),
        NestedSeq::Leaf(s) => Err(Error::InvalidParams(format!("symbol {s} outside 1..={n}"))),
        NestedSeq::Node(_) => {
            check_symbols(t.default_child().expect("node"), n)?;
            t.explicit().try_for_each(|(_, c)| check_symbols(c, n))
        }
    }
}

/// An element of the code space: explicit entries α_0..α_{e-1}, then the
/// uniform tree of `default` at every later level.
#[derive(Clone, Debug, PartialEq)]
pub struct CodePoint {
    entries: Vec<CodeTree>,
    default: u8,
}

impl CodePoint {
    pub fn new(mut entries: Vec<CodeTree>, default: u8) -> Result<Self> {
        for (k, t) in entries.iter().enumerate() {
            if t.level() != k {
                return Err(Error::LevelMismatch(t.level(), k));
            }
        }
        while let Some(last) = entries.last() {
            if *last == uniform(entries.len() - 1, default)? {
                entries.pop();
            } else {
                break;
            }
        }
        Ok(CodePoint { entries, default })
    }

    /// (s, uniform s, uniform s, ...)
    pub fn constant(s: u8) -> Self {
        CodePoint { entries: Vec::new(), default: s }
    }

    pub fn default_symbol(&self) -> u8 {
        self.default
    }

    /// Number of explicitly stored entries.
    pub fn explicit_depth(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, k: usize) -> Result<Cow<'_, CodeTree>> {
        match self.entries.get(k) {
            Some(t) => Ok(Cow::Borrowed(t)),
            None => Ok(Cow::Owned(uniform(k, self.default)?)),
        }
    }

    /// The address α|_k = (α_0, ..., α_k).
    pub fn restrict(&self, k: usize) -> Result<Address> {
        Address::new((0..=k).map(|j| self.entry(j).map(Cow::into_owned)).collect::<Result<_>>()?)
    }

    /// The same code with the symbol at `path` of entry `level` replaced.
    pub fn with_symbol(&self, level: usize, path: &[usize], s: u8) -> Result<CodePoint> {
        let mut entries = self.entries.clone();
        while entries.len() <= level {
            entries.push(uniform(entries.len(), self.default)?);
        }
        entries[level] = entries[level].with_leaf(path, s)?;
        CodePoint::new(entries, self.default)
    }

    pub fn check_symbols(&self, n: u8) -> Result<()> {
        if !(1..=n).contains(&self.default) {
            return Err(Error::InvalidParams(format!("symbol {} outside 1..={n}", self.default)));
        }
        self.entries.iter().try_for_each(|t| check_symbols(t, n))
    }
}

/// d_{(s,q)} or d_{(p,q)} between codes, exact: explicit levels use the
/// level metrics over the discrete symbol metric, later levels compare the
/// two default symbols in closed form.
pub fn code_dist(a: &CodePoint, b: &CodePoint, mp: MetricParams) -> Result<f64> {
    mp.validate()?;
    let e = a.explicit_depth().max(b.explicit_depth());
    let mut ds = Vec::with_capacity(e);
    for k in 0..e {
        ds.push(level_dist_by(a.entry(k)?.as_ref(), b.entry(k)?.as_ref(), mp, &discrete)?);
    }
    let delta = if a.default == b.default { 0.0 } else { 1.0 };
    Ok(match mp {
        MetricParams::Sup { q } => {
            let mut best = q.powi(e as i32) * delta;
            for (k, d) in ds.iter().enumerate() {
                best = best.max(q.powi(k as i32) * d);
            }
            best
        }
        MetricParams::Lp { p, q } => {
            let w = (1.0 - q) / 2.0;
            // level-k distance between distinct uniform trees is (1-q)^(-k/p),
            // so the tail is sum_{k >= e} 2^-k
            let mut s = delta * 2f64.powi(1 - e as i32);
            for (k, d) in ds.iter().enumerate() {
                s += w.powi(k as i32) * d.powf(p);
            }
            s.powf(1.0 / p)
        }
    })
}

/// The induced metric on anchored sequences of codes.
pub fn code_seq_dist(x: &TailSeq<CodePoint>, y: &TailSeq<CodePoint>, mp: MetricParams) -> Result<f64> {
    let n = x.prefix_len().max(y.prefix_len());
    let ds = (0..n).map(|i| code_dist(x.get(i), y.get(i), mp)).collect::<Result<Vec<_>>>()?;
    Ok(mp.aggregate(&ds, code_dist(&x.anchor, &y.anchor, mp)?))
}

fn all_codes(args: &TailSeq<CodePoint>) -> impl Iterator<Item = &CodePoint> {
    args.prefix.iter().chain(std::iter::once(&args.anchor))
}

/// τ_j(β_0, β_1, ...) = (j, (β_0^(0), β_1^(0), ...), (β_0^(1), β_1^(1), ...), ...).
/// All arguments must share one default symbol, which the result inherits.
pub fn shift(j: u8, args: &TailSeq<CodePoint>) -> Result<CodePoint> {
    let s = args.anchor.default;
    if all_codes(args).any(|c| c.default != s) {
        return Err(Error::InvalidParams("shift arguments must share a default symbol".into()));
    }
    let e = all_codes(args).map(CodePoint::explicit_depth).max().unwrap_or(0);
    let mut entries = Vec::with_capacity(e + 1);
    entries.push(NestedSeq::leaf(j));
    for k in 0..e {
        let children = args
            .prefix
            .iter()
            .enumerate()
            .map(|(i, c)| Ok((i, c.entry(k)?.into_owned())))
            .collect::<Result<Vec<_>>>()?;
        entries.push(NestedSeq::node(children, args.anchor.entry(k)?.into_owned())?);
    }
    CodePoint::new(entries, s)
}

/// α(i) = (α_1^(i), α_2^(i), ...).
pub fn slice(a: &CodePoint, i: usize) -> Result<CodePoint> {
    let entries = a.entries.iter().skip(1).map(|t| t.child(i).cloned()).collect::<Result<_>>()?;
    CodePoint::new(entries, a.default)
}

fn slice_default(a: &CodePoint) -> Result<CodePoint> {
    let entries = a.entries.iter().skip(1).map(|t| t.default_child().expect("level >= 1").clone()).collect();
    CodePoint::new(entries, a.default)
}

/// (α_0, (α(0), α(1), ...)), the arguments that rebuild α under τ_{α_0}.
pub fn decompose(a: &CodePoint) -> Result<(u8, TailSeq<CodePoint>)> {
    let head = *a.entry(0)?.as_leaf().expect("level 0");
    let m = a.entries.iter().skip(1).map(NestedSeq::support_len).max().unwrap_or(0);
    let prefix = (0..m).map(|i| slice(a, i)).collect::<Result<_>>()?;
    Ok((head, TailSeq::new(prefix, slice_default(a)?)))
}

/// A finite code prefix (α_0, ..., α_k) with α_j of level j.
#[derive(Clone, Debug, PartialEq)]
pub struct Address(Vec<CodeTree>);

impl Address {
    pub fn new(entries: Vec<CodeTree>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParams("an address needs at least one entry".into()));
        }
        for (k, t) in entries.iter().enumerate() {
            if t.level() != k {
                return Err(Error::LevelMismatch(t.level(), k));
            }
        }
        Ok(Address(entries))
    }

    pub fn symbol(s: u8) -> Self {
        Address(vec![NestedSeq::leaf(s)])
    }

    pub fn depth(&self) -> usize {
        self.0.len() - 1
    }

    pub fn entries(&self) -> &[CodeTree] {
        &self.0
    }

    pub fn head(&self) -> u8 {
        *self.0[0].as_leaf().expect("level 0")
    }

    /// α(i) = (α_1^(i), ..., α_k^(i)); requires depth >= 1.
    pub fn sub(&self, i: usize) -> Result<Address> {
        Address::new(self.0[1..].iter().map(|t| t.child(i).cloned()).collect::<Result<_>>()?)
    }

    fn sub_default(&self) -> Result<Address> {
        Address::new(self.0[1..].iter().map(|t| t.default_child().expect("level >= 1").clone()).collect())
    }

    /// α⌢β for β of level depth+1.
    pub fn concat(&self, beta: CodeTree) -> Result<Address> {
        let mut v = self.0.clone();
        v.push(beta);
        Address::new(v)
    }

    /// The code (α_0, ..., α_k, uniform s, uniform s, ...).
    pub fn extend(&self, s: u8) -> Result<CodePoint> {
        CodePoint::new(self.0.clone(), s)
    }

    pub fn check_symbols(&self, n: u8) -> Result<()> {
        self.0.iter().try_for_each(|t| check_symbols(t, n))
    }
}

fn write_tree(t: &CodeTree, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        NestedSeq::Leaf(s) => write!(f, "{s}"),
        NestedSeq::Node(_) => {
            write!(f, "[")?;
            for i in 0..t.support_len() {
                write_tree(t.child(i).map_err(|_| fmt::Error)?, f)?;
                write!(f, ",")?;
            }
            write!(f, "*")?;
            write_tree(t.default_child().expect("node"), f)?;
            write!(f, "]")
        }
    }
}

/// `[α_0,α_1,...]`, trees as `[c_0,c_1,...,*default]`, e.g. `[1,[2,*1]]`.
impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, t) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write_tree(t, f)?;
        }
        write!(f, "]")
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at byte {}", self.pos))
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn symbol(&mut self) -> Result<u8> {
        let start = self.pos;
        while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| self.err("expected a symbol"))
    }

    fn tree(&mut self) -> Result<CodeTree> {
        if !self.eat(b'[') {
            return Ok(NestedSeq::leaf(self.symbol()?));
        }
        let mut children = Vec::new();
        loop {
            if self.eat(b'*') {
                let d = self.tree()?;
                self.expect(b']')?;
                return NestedSeq::node(children.into_iter().enumerate(), d);
            }
            children.push(self.tree()?);
            self.expect(b',')?;
        }
    }
}

impl FromStr for Address {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { s: s.as_bytes(), pos: 0 };
        p.expect(b'[')?;
        let mut entries = vec![p.tree()?];
        while p.eat(b',') {
            entries.push(p.tree()?);
        }
        p.expect(b']')?;
        if p.pos != s.len() {
            return Err(p.err("trailing input"));
        }
        Address::new(entries)
    }
}

/// f_α(x_0, x_1, ...) = apply(α_0, (f_α(0)(x_0), f_α(1)(x_1), ...)) for any
/// family of maps given by `apply`. Indices where both the address and the
/// input are at their defaults share one evaluation.
pub fn compose_with<T: Clone + PartialEq>(
    alpha: &Address,
    x: &NestedSeq<T>,
    apply: &impl Fn(u8, &TailSeq<T>) -> Result<T>,
) -> Result<T> {
    if x.level() != alpha.depth() + 1 {
        return Err(Error::LevelMismatch(x.level(), alpha.depth() + 1));
    }
    let head = alpha.head();
    if alpha.depth() == 0 {
        let prefix = (0..x.support_len())
            .map(|i| x.child(i).map(|c| c.as_leaf().expect("level 0").clone()))
            .collect::<Result<_>>()?;
        let anchor = x.default_child().expect("node").as_leaf().expect("level 0").clone();
        return apply(head, &TailSeq::new(prefix, anchor));
    }
    let m = alpha.0[1..].iter().map(NestedSeq::support_len).chain(std::iter::once(x.support_len())).max().unwrap_or(0);
    let anchor = compose_with(&alpha.sub_default()?, x.default_child().expect("node"), apply)?;
    let mut prefix = Vec::with_capacity(m);
    for i in 0..m {
        prefix.push(compose_with(&alpha.sub(i)?, x.child(i)?, apply)?);
    }
    apply(head, &TailSeq::new(prefix, anchor))
}

fn map_apply(sys: &GifsSystem) -> impl Fn(u8, &TailSeq<Point>) -> Result<Point> + '_ {
    move |s, seq| {
        let f = sys
            .maps
            .get((s as usize).wrapping_sub(1))
            .ok_or_else(|| Error::InvalidParams(format!("symbol {s} outside 1..={}", sys.maps.len())))?;
        f.eval(seq)
    }
}

/// f_α evaluated on a nested point sequence of level depth(α)+1.
pub fn compose_address(sys: &GifsSystem, alpha: &Address, x: &NestedSeq<Point>) -> Result<Point> {
    compose_with(alpha, x, &map_apply(sys))
}

/// τ_α on nested code sequences.
pub fn shift_compose(alpha: &Address, codes: &NestedSeq<CodePoint>) -> Result<CodePoint> {
    compose_with(alpha, codes, &|j, seq| shift(j, seq))
}

/// Per-level diameter decay of tiles: L for sup-kind certificates,
/// L (1-q)^(-1/p) for lp-kind ones. Requires L_sys < 1 and (S1).
pub fn tile_factor(sys: &GifsSystem) -> Result<f64> {
    let lam = sys.perturbation_factor();
    match lam {
        Some(l) if l < 1.0 && sys.classify().contains(&Condition::S1) => Ok(l),
        _ => Err(Error::NotContractive("tiles need a certified contraction factor below 1".into())),
    }
}

/// At most `cap` points of the cloud, evenly strided in its sorted order.
pub fn stride_sample(cloud: &FiniteSet, cap: usize) -> Vec<Point> {
    let n = cloud.len();
    let step = n.div_ceil(cap.max(1));
    (0..n).step_by(step.max(1)).map(|i| Point::new(cloud.point(i).to_vec()).expect("finite")).collect()
}

/// A uniformly random level-k tree with leaves from `leaves`, explicit
/// children at indices below `branch` on every node.
pub fn random_tree<T: Clone + PartialEq, R: Rng>(rng: &mut R, k: usize, branch: usize, leaves: &[T]) -> Result<NestedSeq<T>> {
    if k == 0 {
        return Ok(NestedSeq::leaf(leaves[rng.gen_range(0..leaves.len())].clone()));
    }
    let default = random_tree(rng, k - 1, branch, leaves)?;
    let mut children = Vec::new();
    for i in 0..branch {
        if rng.gen_bool(0.75) {
            children.push((i, random_tree(rng, k - 1, branch, leaves)?));
        }
    }
    NestedSeq::node(children, default)
}

/// A random code over 1..=n with `depth` explicit entries and default `default`.
pub fn random_code<R: Rng>(rng: &mut R, n: u8, depth: usize, branch: usize, default: u8) -> Result<CodePoint> {
    let symbols: Vec<u8> = (1..=n).collect();
    let entries = (0..depth).map(|k| random_tree(rng, k, branch, &symbols)).collect::<Result<_>>()?;
    CodePoint::new(entries, default)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tile {
    pub address: Address,
    pub cloud: FiniteSet,
    /// λ^(k+1) (diam + 2 err), with λ from [`tile_factor`].
    pub diam_bound: f64,
    /// Distance the samples may sit from the true tile because the inputs
    /// come from an approximate attractor: λ^(k+1) err.
    pub input_slack: f64,
}

/// Options for sampling A_{k+1} when building tiles.
#[derive(Clone, Debug, PartialEq)]
pub struct TileSampling {
    /// Largest number of attractor points embedded diagonally.
    pub diagonal: usize,
    /// Number of random trees with explicit entries.
    pub random: usize,
    pub branch: usize,
    pub seed: u64,
}

impl Default for TileSampling {
    fn default() -> Self {
        TileSampling { diagonal: 256, random: 32, branch: 3, seed: 7 }
    }
}

/// Every depth-k address whose level-j entries (j >= 1) assign one symbol per
/// first index below `branch` plus a default symbol.
pub fn address_family(n: u8, depth: usize, branch: usize) -> Result<Vec<Address>> {
    let mut out: Vec<Address> = (1..=n).map(Address::symbol).collect();
    for j in 1..=depth {
        let cands = first_index_trees(n, j, branch)?;
        out = out
            .iter()
            .flat_map(|a| cands.iter().map(move |t| a.concat(t.clone())))
            .collect::<Result<_>>()?;
    }
    Ok(out)
}

/// Level-j trees whose leaf at (i_0, ...) depends only on i_0.
fn first_index_trees(n: u8, j: usize, branch: usize) -> Result<Vec<CodeTree>> {
    let total = (n as usize).pow(branch as u32 + 1);
    (0..total)
        .map(|mut c| {
            let mut sym = Vec::with_capacity(branch + 1);
            for _ in 0..=branch {
                sym.push((c % n as usize) as u8 + 1);
                c /= n as usize;
            }
            let children = (0..branch).map(|i| Ok((i, uniform(j - 1, sym[i])?))).collect::<Result<Vec<_>>>()?;
            NestedSeq::node(children, uniform(j - 1, sym[branch])?)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Conjugacy {
    pub lhs: Point,
    pub rhs: Point,
    pub residual: f64,
    /// Sum of the error budgets of both sides.
    pub budget: f64,
}

/// Bound on d(f_α(x), f_β(x)) over x in A_{k+1} from the index sets where
/// α_l and β_l disagree.
pub fn discrepancy_bound(alpha: &Address, beta: &Address, a_diam: f64, mp: MetricParams) -> Result<f64> {
    if alpha.depth() != beta.depth() {
        return Err(Error::LevelMismatch(alpha.depth(), beta.depth()));
    }
    if alpha.head() != beta.head() {
        return Ok(a_diam);
    }
    let pairs = alpha.0.iter().zip(&beta.0).skip(1);
    Ok(match mp {
        MetricParams::Sup { .. } => {
            let mut w: f64 = 0.0;
            for (x, y) in pairs {
                w = w.max(level_dist_by(x, y, mp, &discrete)?);
            }
            a_diam * w
        }
        MetricParams::Lp { p, q } => {
            // sums of q^(i_0 + ... + i_{l-1}) over disagreeing positions
            let counting = MetricParams::lp(1.0, q)?;
            let mut w = 0.0;
            for (x, y) in pairs {
                w += level_dist_by(x, y, counting, &discrete)?;
            }
            a_diam * w.powf(1.0 / p)
        }
    })
}

/// An approximate attractor prepared for code-space work: the tile factor,
/// its diameter and a centre point are computed once.
pub struct Coding<'a> {
    pub sys: &'a GifsSystem,
    pub a: &'a AttractorApprox,
    pub lam: f64,
    pub diam: f64,
    centre: Point,
}

impl<'a> Coding<'a> {
    pub fn new(sys: &'a GifsSystem, a: &'a AttractorApprox) -> Result<Self> {
        let lam = tile_factor(sys)?;
        if a.cloud.dim() != sys.dim() {
            return Err(Error::DimensionMismatch(a.cloud.dim(), sys.dim()));
        }
        Ok(Coding { sys, a, lam, diam: a.cloud.diameter(sys.metric), centre: a.cloud.central_point(sys.metric) })
    }

    fn n(&self) -> u8 {
        self.sys.maps.len() as u8
    }

    /// Samples of A_α = f_α(A_{k+1}) from diagonal and random nested inputs.
    pub fn tile(&self, alpha: &Address, opts: &TileSampling) -> Result<Tile> {
        use rand::SeedableRng;
        alpha.check_symbols(self.n())?;
        let k = alpha.depth();
        if k + 1 > MAX_LEVEL {
            return Err(Error::LevelCap(k + 1));
        }
        let pts = stride_sample(&self.a.cloud, opts.diagonal);
        let mut out = Vec::with_capacity((pts.len() + opts.random) * self.sys.dim());
        for p in &pts {
            let x = diagonal_embed(&TailSeq::constant(p.clone()), k + 1)?;
            out.extend(compose_address(self.sys, alpha, &x)?.into_vec());
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..opts.random {
            let x = random_tree(&mut rng, k + 1, opts.branch, &pts)?;
            out.extend(compose_address(self.sys, alpha, &x)?.into_vec());
        }
        let f = self.lam.powi(k as i32 + 1);
        Ok(Tile {
            address: alpha.clone(),
            cloud: FiniteSet::from_flat(self.sys.dim(), out)?,
            diam_bound: f * (self.diam + 2.0 * self.a.err),
            input_slack: f * self.a.err,
        })
    }

    /// π(α) approximated by f_{α|k} on the diagonal of an attractor point,
    /// with err = λ^(k+1) (diam + 3 err_A): both lie near the tile A_{α|k}.
    pub fn pi(&self, code: &CodePoint, k: usize) -> Result<(Point, f64)> {
        if k + 1 > MAX_LEVEL {
            return Err(Error::LevelCap(k + 1));
        }
        code.check_symbols(self.n())?;
        let x = diagonal_embed(&TailSeq::constant(self.centre.clone()), k + 1)?;
        let p = compose_address(self.sys, &code.restrict(k)?, &x)?;
        Ok((p, self.lam.powi(k as i32 + 1) * (self.diam + 3.0 * self.a.err)))
    }

    /// Compares f_α(π_k(codes)) with π(τ_α(codes)). `codes` is a nested
    /// code sequence of level depth(α)+1; π is evaluated at `pi_depth`.
    pub fn conjugacy(&self, alpha: &Address, codes: &NestedSeq<CodePoint>, pi_depth: usize) -> Result<Conjugacy> {
        let leaf_err = std::cell::Cell::new(0.0f64);
        let points = codes.try_map_leaves(&|c: &CodePoint| {
            let (p, e) = self.pi(c, pi_depth)?;
            leaf_err.set(leaf_err.get().max(e));
            Ok(p)
        })?;
        let lhs = compose_address(self.sys, alpha, &points)?;
        let (rhs, rhs_err) = self.pi(&shift_compose(alpha, codes)?, pi_depth)?;
        let residual = base_dist(&lhs, &rhs, self.sys.metric)?;
        let budget = self.lam.powi(alpha.depth() as i32 + 1) * leaf_err.get() + rhs_err;
        Ok(Conjugacy { lhs, rhs, residual, budget })
    }

    /// δ such that code_dist < δ forces d(π(α), π(β)) < ε: pick the depth k
    /// whose tiles are below ε/3, then scale by the weight of level k.
    pub fn continuity_delta(&self, eps: f64) -> Result<(f64, usize)> {
        let mp = self.sys.metric_params().ok_or_else(|| Error::NotContractive("no certificate".into()))?;
        if self.diam <= 0.0 {
            return Ok((1.0, 0));
        }
        let mut k = 0;
        while self.lam.powi(k as i32 + 1) * self.diam >= eps / 3.0 {
            k += 1;
        }
        let w = match mp {
            MetricParams::Sup { q } => q.powi(k as i32),
            MetricParams::Lp { p, q } => ((1.0 - q) / 2.0).powf(k as f64 / p),
        };
        Ok(((eps / 3.0 * w / self.diam).min(1.0), k))
    }

    /// Greedy search for a code whose π lands near `target`: level by
    /// level, the candidate with the nearest tile representative wins.
    /// Returns the code and the distance from its depth-`depth` π value.
    pub fn descend(&self, target: &Point, depth: usize, branch: usize) -> Result<(CodePoint, f64)> {
        let rep = |addr: &Address| -> Result<f64> {
            let x = diagonal_embed(&TailSeq::constant(self.centre.clone()), addr.depth() + 1)?;
            base_dist(&compose_address(self.sys, addr, &x)?, target, self.sys.metric)
        };
        let pick = |cands: Vec<Address>| -> Result<Address> {
            let mut best: Option<(f64, Address)> = None;
            for c in cands {
                let d = rep(&c)?;
                if best.as_ref().is_none_or(|(b, _)| d < *b) {
                    best = Some((d, c));
                }
            }
            Ok(best.expect("nonempty candidates").1)
        };
        let mut addr = pick((1..=self.n()).map(Address::symbol).collect())?;
        for j in 1..=depth {
            let cands = first_index_trees(self.n(), j, branch)?;
            addr = pick(cands.into_iter().map(|t| addr.concat(t)).collect::<Result<_>>()?)?;
        }
        let code = addr.extend(1)?;
        let (p, _) = self.pi(&code, depth)?;
        Ok((code, base_dist(&p, target, self.sys.metric)?))
    }
}
