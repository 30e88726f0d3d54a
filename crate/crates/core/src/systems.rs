//! Built-in systems used by the CLI, the verification suites and the tests.

use std::sync::Arc;

use crate::cantor::{derive_params, CantorParams};
use crate::error::{Error, Result};
use crate::maps::{ClosureFlags, GifsMap, GifsSystem, LipCert, Provenance};
use crate::metric::{BaseMetric, FiniteSet, MetricParams, Point};

/// Offsets of the four planar maps, in map order.
pub const PLANAR_OFFSETS: [[f64; 2]; 4] = [[0.0, 0.0], [0.0, 0.5], [0.5, 0.0], [0.5, 0.5]];

/// f_i(x) = b_i + sum_k (x_k) / (10 * 4^k), with the four corner offsets b_i.
pub fn planar() -> Result<GifsSystem> {
    let maps = PLANAR_OFFSETS
        .iter()
        .map(|b| GifsMap::affine(0.1, 0.25, Point::from(*b)))
        .collect::<Result<Vec<_>>>()?;
    GifsSystem::new(maps, BaseMetric::Maximum)?.with_analytic_certs(MetricParams::sup(0.5)?)
}

/// {1/j : 1 <= j <= n} together with 0.
pub fn harmonic_space(n: usize) -> Result<FiniteSet> {
    let mut v: Vec<f64> = (1..=n).map(|j| 1.0 / j as f64).collect();
    v.push(0.0);
    FiniteSet::from_values(&v)
}

fn sup_cert(l: f64) -> Result<LipCert> {
    Ok(LipCert { mp: MetricParams::sup(1.0)?, l, provenance: Provenance::DeclaredAnalytic })
}

/// Half the supremum together with the constant 1, on the harmonic space
/// truncated at 1/n. Only an unweighted certificate exists.
pub fn sup_pair(n: usize) -> Result<GifsSystem> {
    let maps = vec![GifsMap::sup_scale(0.5, 0.0)?, GifsMap::Constant(Point::from(1.0))];
    GifsSystem::new(maps, BaseMetric::Absolute)?
        .with_certs(vec![sup_cert(0.5)?, sup_cert(0.0)?])?
        .with_flags(ClosureFlags { c1: true, c2: true })
        .with_domain(harmonic_space(n)?)
}

/// Half the supremum alone on the truncated harmonic space; attractor {0}.
pub fn sup_single(n: usize) -> Result<GifsSystem> {
    GifsSystem::new(vec![GifsMap::sup_scale(0.5, 0.0)?], BaseMetric::Absolute)?
        .with_certs(vec![sup_cert(0.5)?])?
        .with_flags(ClosureFlags { c1: true, c2: true })
        .with_domain(harmonic_space(n)?)
}

/// Half the supremum and half the supremum plus 1/4 on [0, 2]; only the
/// weaker closure condition holds.
pub fn sup_interval() -> Result<GifsSystem> {
    let maps = vec![GifsMap::sup_scale(0.5, 0.0)?, GifsMap::sup_scale(0.5, 0.25)?];
    Ok(GifsSystem::new(maps, BaseMetric::Absolute)?
        .with_certs(vec![sup_cert(0.5)?, sup_cert(0.5)?])?
        .with_flags(ClosureFlags { c1: true, c2: false }))
}

/// The known attractor {0} together with {2^-n : 2^n <= n_max}.
pub fn sup_pair_attractor(n: usize) -> Result<FiniteSet> {
    let mut v = vec![0.0];
    let mut x = 1.0;
    while x >= 1.0 / n as f64 {
        v.push(x);
        x *= 0.5;
    }
    FiniteSet::from_values(&v)
}

/// The four code-regrouping maps at symbolic depth `depth`.
pub fn cantor(k: f64, q: f64, ms: &[u32], depth: usize) -> Result<(GifsSystem, Arc<CantorParams>)> {
    let params = Arc::new(derive_params(k, q, ms)?);
    let maps = params.maps(depth)?.into_iter().map(GifsMap::CodeIndex).collect();
    let sys = GifsSystem::new(maps, BaseMetric::Euclidean)?.with_analytic_certs(params.metric())?;
    Ok((sys, params))
}

/// Name lookup used by the CLI and the config loader.
pub fn by_name(name: &str) -> Result<GifsSystem> {
    match name {
        "ex5" | "planar" => planar(),
        "sup-pair" => sup_pair(64),
        "sup-single" => sup_single(64),
        "sup-interval" => sup_interval(),
        "cantor" => cantor(0.5, 0.5, &[1, 1, 2, 2], 3).map(|c| c.0),
        _ => Err(Error::Config(format!("unknown system '{name}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::Condition;

    #[test]
    fn builtins_classify() {
        let p = planar().unwrap();
        assert_eq!(p.l_sys(), Some(0.2));
        let c: Vec<_> = p.classify().into_iter().collect();
        assert_eq!(c, vec![Condition::S1, Condition::S2, Condition::Q]);
        let s: Vec<_> = sup_pair(64).unwrap().classify().into_iter().collect();
        assert_eq!(s, vec![Condition::S1, Condition::S2]);
        let i: Vec<_> = sup_interval().unwrap().classify().into_iter().collect();
        assert_eq!(i, vec![Condition::S1]);
        assert!(by_name("nope").is_err());
    }

    #[test]
    fn harmonic_sets() {
        assert_eq!(harmonic_space(4).unwrap().len(), 5);
        assert_eq!(sup_pair_attractor(64).unwrap().flat(), &[0.0, 1.0 / 64.0, 1.0 / 32.0, 0.0625, 0.125, 0.25, 0.5, 1.0]);
    }
}
