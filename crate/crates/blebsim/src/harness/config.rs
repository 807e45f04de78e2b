//! Run configuration: a versioned, flat-sectioned key/value file (TOML
//! syntax) validated before any compute, echoed verbatim into every
//! artifact's JSON sidecar.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::energies::ModelParams;
use crate::geometry::Surface;

use super::HarnessError;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceConfig {
    /// `sphere | ellipsoid | torus | circle | ellipse`.
    pub kind: String,
    /// Radius / semi-axes / (major, minor) depending on `kind`.
    pub params: Vec<f64>,
    #[serde(default)]
    pub center: Vec<f64>,
}

impl SurfaceConfig {
    pub fn build(&self) -> Result<Surface, HarnessError> {
        let c3 = |c: &[f64]| -> [f64; 3] {
            [
                c.first().copied().unwrap_or(0.0),
                c.get(1).copied().unwrap_or(0.0),
                c.get(2).copied().unwrap_or(0.0),
            ]
        };
        let c2 = |c: &[f64]| -> [f64; 2] {
            [c.first().copied().unwrap_or(0.0), c.get(1).copied().unwrap_or(0.0)]
        };
        let need = |n: usize| -> Result<(), HarnessError> {
            if self.params.len() != n {
                return Err(HarnessError::Config(format!(
                    "surface kind '{}' needs {n} parameter(s), got {}",
                    self.kind,
                    self.params.len()
                )));
            }
            Ok(())
        };
        let surface = match self.kind.as_str() {
            "sphere" => {
                need(1)?;
                Surface::sphere(c3(&self.center), self.params[0])
            }
            "ellipsoid" => {
                need(3)?;
                Surface::ellipsoid(c3(&self.center), [self.params[0], self.params[1], self.params[2]])
            }
            "torus" => {
                need(2)?;
                Surface::torus(c3(&self.center), self.params[0], self.params[1])
            }
            "circle" => {
                need(1)?;
                Surface::circle(c2(&self.center), self.params[0])
            }
            "ellipse" => {
                need(2)?;
                Surface::ellipse(c2(&self.center), [self.params[0], self.params[1]])
            }
            other => {
                return Err(HarnessError::Config(format!("unknown surface kind '{other}'")))
            }
        };
        if self.params.iter().any(|p| !(p > &0.0)) {
            return Err(HarnessError::Config("surface parameters must be positive".into()));
        }
        Ok(surface)
    }

    /// Parse the CLI shorthand `kind:p1,p2,...[@cx,cy,cz]`.
    pub fn parse_flag(spec: &str) -> Result<Self, HarnessError> {
        let (kind, rest) = spec
            .split_once(':')
            .ok_or_else(|| HarnessError::Config(format!("surface spec '{spec}' needs kind:params")))?;
        let (params_str, center_str) = match rest.split_once('@') {
            Some((p, c)) => (p, Some(c)),
            None => (rest, None),
        };
        let parse_list = |s: &str| -> Result<Vec<f64>, HarnessError> {
            s.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| HarnessError::Config(format!("bad number '{v}' in '{spec}'")))
                })
                .collect()
        };
        Ok(Self {
            kind: kind.to_string(),
            params: parse_list(params_str)?,
            center: center_str.map(parse_list).transpose()?.unwrap_or_default(),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub dim: usize,
    pub cells: usize,
    pub side: f64,
    pub periodic: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { dim: 2, cells: 128, side: 1.0, periodic: false }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct StudyConfig {
    pub eps_seq: Vec<f64>,
    pub eps_over_h: f64,
    pub tolerance: f64,
    /// force-limit kind: `gl | willmore | coupling-membrane | coupling-cortex
    /// | coupling-normal-variation | coupling-species-curvature |
    /// coupling-species-tangential | coupling-all`.
    pub kind: String,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self { eps_seq: vec![0.04, 0.02, 0.01], eps_over_h: 5.0, tolerance: 0.02, kind: "gl".into() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulateConfig {
    pub dt: f64,
    pub steps: usize,
    pub checkpoint_every: usize,
    pub quasi_static_species: bool,
    pub evolve_fluid: bool,
    /// Initial active-linker density on the cortex tube.
    pub c_a_init: f64,
    pub c_i_init: f64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            dt: 1e-6,
            steps: 100,
            checkpoint_every: 0,
            quasi_static_species: true,
            evolve_fluid: true,
            c_a_init: 0.0,
            c_i_init: 0.0,
        }
    }
}

/// Top-level run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    #[serde(default)]
    pub seed: u64,
    pub surface: Option<SurfaceConfig>,
    pub surface2: Option<SurfaceConfig>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub params: ModelParams,
    #[serde(default)]
    pub study: StudyConfig,
    #[serde(default)]
    pub simulate: SimulateConfig,
}

fn default_version() -> u32 {
    CONFIG_VERSION
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            seed: 0,
            surface: None,
            surface2: None,
            grid: GridConfig::default(),
            params: ModelParams::default(),
            study: StudyConfig::default(),
            simulate: SimulateConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| HarnessError::Config(format!("config parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.version != CONFIG_VERSION {
            return Err(HarnessError::Config(format!(
                "config version {} unsupported (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        self.params
            .validate()
            .map_err(|e| HarnessError::Config(format!("invalid params: {e}")))?;
        if !(self.grid.dim == 2 || self.grid.dim == 3) || self.grid.cells == 0 || !(self.grid.side > 0.0)
        {
            return Err(HarnessError::Config("grid must have dim 2|3, cells > 0, side > 0".into()));
        }
        // Resolution rule: the interface must span at least two cells.
        let h = self.grid.side / self.grid.cells as f64;
        if self.params.eps < 2.0 * h {
            return Err(HarnessError::Config(format!(
                "under-resolved interface: eps = {} < 2h = {}",
                self.params.eps,
                2.0 * h
            )));
        }
        let mut eps_sorted = self.study.eps_seq.clone();
        eps_sorted.dedup();
        if eps_sorted.is_empty() || eps_sorted.windows(2).any(|w| w[1] >= w[0]) {
            return Err(HarnessError::Config("study.eps_seq must be strictly decreasing".into()));
        }
        if !(self.study.eps_over_h >= 2.0) {
            return Err(HarnessError::Config("study.eps_over_h must be >= 2 (resolution rule)".into()));
        }
        Ok(())
    }

    /// The resolved config as pretty JSON for artifact sidecars.
    pub fn provenance(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
