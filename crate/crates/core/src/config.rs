//! Experiment configuration files (JSON, versioned, unknown keys rejected).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::Viewport;
use crate::maps::{ClosureFlags, GifsMap, GifsSystem, LipCert};
use crate::metric::{BaseMetric, FiniteSet, MetricParams, Point};
use crate::systems;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub system: SystemSpec,
    /// Overrides the certificate metric of the system with analytic bounds.
    #[serde(default)]
    pub metric: Option<MetricParams>,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemSpec {
    /// One of the names accepted by [`systems::by_name`].
    Builtin(String),
    Cantor(CantorSpec),
    Custom(CustomSystem),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CantorSpec {
    #[serde(rename = "K")]
    pub k: f64,
    pub q: f64,
    pub ms: Vec<u32>,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MapSpec {
    /// offset + sum_k scale * ratio^k * x_k
    Affine { scale: f64, ratio: f64, offset: Vec<f64> },
    SupScale { scale: f64, offset: f64 },
    Constant { point: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSystem {
    pub maps: Vec<MapSpec>,
    pub base_metric: BaseMetric,
    /// Explicit certificates; analytic ones are derived from `metric` when absent.
    #[serde(default)]
    pub certs: Option<Vec<LipCert>>,
    #[serde(default)]
    pub flags: Option<Vec<ClosureFlags>>,
    /// Finite ambient space, one point per entry.
    #[serde(default)]
    pub domain: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Number of iterates (render, converge) or symbolic depth.
    pub depth: usize,
    pub prune_eps: f64,
    /// Sequence prefix length M used by the set operators.
    pub prefix: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { depth: 4, prune_eps: 1e-3, prefix: 64, tol: 0.02, seed: 0 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub viewport: Option<Viewport>,
    pub image: Option<PathBuf>,
    pub table: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Config(format!("schema {} is not supported (expected {SCHEMA_VERSION})", self.schema)));
        }
        if let Some(mp) = self.metric {
            mp.validate()?;
        }
        if let Some(vp) = &self.output.viewport {
            vp.validate()?;
        }
        let r = &self.run;
        if r.depth == 0 || r.prefix == 0 {
            return Err(Error::Config("run.depth and run.prefix must be positive".into()));
        }
        if !(r.prune_eps >= 0.0) || !(r.tol > 0.0) {
            return Err(Error::Config("run.prune_eps must be >= 0 and run.tol > 0".into()));
        }
        Ok(())
    }

    pub fn build_system(&self) -> Result<GifsSystem> {
        let sys = self.system.build()?;
        match self.metric {
            Some(mp) => sys.with_analytic_certs(mp),
            None => Ok(sys),
        }
    }
}

impl SystemSpec {
    pub fn build(&self) -> Result<GifsSystem> {
        match self {
            SystemSpec::Builtin(name) => systems::by_name(name),
            SystemSpec::Cantor(c) => systems::cantor(c.k, c.q, &c.ms, c.depth).map(|s| s.0),
            SystemSpec::Custom(c) => c.build(),
        }
    }
}

impl MapSpec {
    pub fn build(&self) -> Result<GifsMap> {
        match self {
            MapSpec::Affine { scale, ratio, offset } => GifsMap::affine(*scale, *ratio, Point::new(offset.clone())?),
            MapSpec::SupScale { scale, offset } => GifsMap::sup_scale(*scale, *offset),
            MapSpec::Constant { point } => Ok(GifsMap::Constant(Point::new(point.clone())?)),
        }
    }
}

impl CustomSystem {
    pub fn build(&self) -> Result<GifsSystem> {
        let maps = self.maps.iter().map(MapSpec::build).collect::<Result<Vec<_>>>()?;
        let mut sys = GifsSystem::new(maps, self.base_metric)?;
        if let Some(certs) = &self.certs {
            sys = sys.with_certs(certs.clone())?;
        }
        if let Some(flags) = &self.flags {
            if flags.len() != sys.maps.len() {
                return Err(Error::Config(format!("{} flags for {} maps", flags.len(), sys.maps.len())));
            }
            sys.flags = flags.clone();
        }
        if let Some(points) = &self.domain {
            let pts = points.iter().map(|p| Point::new(p.clone())).collect::<Result<Vec<_>>>()?;
            sys = sys.with_domain(FiniteSet::from_points(&pts)?)?;
        }
        Ok(sys)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLANAR: &str = r#"{
        "schema": 1,
        "system": {"custom": {
            "maps": [
                {"kind": "affine", "scale": 0.1, "ratio": 0.25, "offset": [0, 0]},
                {"kind": "affine", "scale": 0.1, "ratio": 0.25, "offset": [0, 0.5]},
                {"kind": "affine", "scale": 0.1, "ratio": 0.25, "offset": [0.5, 0]},
                {"kind": "affine", "scale": 0.1, "ratio": 0.25, "offset": [0.5, 0.5]}
            ],
            "base_metric": "maximum"
        }},
        "metric": {"kind": "sup", "q": 0.5},
        "run": {"depth": 3},
        "output": {"viewport": {"min": [0, 0], "max": [1, 1], "width": 64, "height": 64}}
    }"#;

    #[test]
    fn custom_matches_builtin() {
        let cfg = ExperimentConfig::from_json(PLANAR).unwrap();
        assert_eq!(cfg.run.depth, 3);
        assert_eq!(cfg.run.prefix, 64);
        let sys = cfg.build_system().unwrap();
        assert_eq!(sys.l_sys(), systems::planar().unwrap().l_sys());
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let unknown = PLANAR.replace("\"run\"", "\"runn\"");
        assert!(matches!(ExperimentConfig::from_json(&unknown), Err(Error::Config(_))));
        let version = PLANAR.replace("\"schema\": 1", "\"schema\": 2");
        assert!(ExperimentConfig::from_json(&version).is_err());
        let viewport = PLANAR.replace("\"max\": [1, 1]", "\"max\": [0, 1]");
        assert!(ExperimentConfig::from_json(&viewport).is_err());
        let builtin = r#"{"schema": 1, "system": {"builtin": "nope"}}"#;
        assert!(ExperimentConfig::from_json(builtin).unwrap().build_system().is_err());
    }

    #[test]
    fn builtin_and_cantor() {
        let b = ExperimentConfig::from_json(r#"{"schema": 1, "system": {"builtin": "sup-pair"}}"#).unwrap();
        assert_eq!(b.build_system().unwrap().maps.len(), 2);
        let c = r#"{"schema": 1, "system": {"cantor": {"K": 0.5, "q": 0.5, "ms": [1, 1, 2, 2], "depth": 2}}}"#;
        assert_eq!(ExperimentConfig::from_json(c).unwrap().build_system().unwrap().maps.len(), 4);
    }
}
