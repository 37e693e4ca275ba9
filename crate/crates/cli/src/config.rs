//! Run configuration: TOML file, command-line overrides, validation.
//!
//! Every field has a default, so an empty file is a valid configuration.
//! The effective configuration (after overrides) is serialized back to TOML
//! and embedded in each output artifact.

use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use centered_partition::{EppfSpec, Init, SetPartition};
use serde::{Deserialize, Serialize};

/// Largest `n` accepted by `prior-viz`, which writes one row per partition.
pub const PRIOR_VIZ_CAP: usize = 10;

pub const STANDARD_CENTER: &str = "{1,2,3}{4,5,6}{7,8,9}{10,11,12}";

fn dp1() -> EppfSpec {
    EppfSpec::DirichletProcess { alpha: 1.0 }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed. Every random stream of a command derives from it.
    pub seed: u64,
    pub prior_viz: PriorVizConfig,
    pub calibrate: CalibrateConfig,
    pub simulate: SimulateConfig,
    pub fit: FitSection,
    pub summarize: SummarizeConfig,
}

/// Prior mass of every partition of a small `n` along a `psi` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PriorVizConfig {
    /// Default `{1,2}{3,4,5}`.
    pub center: String,
    /// Grid `psi_min, psi_min + psi_step, ..., psi_max`. Default 0 to 3 by 0.05.
    pub psi_min: f64,
    pub psi_max: f64,
    pub psi_step: f64,
    /// Default uniform and DP(1).
    pub bases: Vec<EppfSpec>,
}

impl Default for PriorVizConfig {
    fn default() -> Self {
        Self {
            center: "{1,2}{3,4,5}".into(),
            psi_min: 0.0,
            psi_max: 3.0,
            psi_step: 0.05,
            bases: vec![EppfSpec::Uniform, dp1()],
        }
    }
}

impl PriorVizConfig {
    pub fn grid(&self) -> Vec<f64> {
        let steps = ((self.psi_max - self.psi_min) / self.psi_step + 1e-9).floor() as usize;
        (0..=steps).map(|j| self.psi_min + j as f64 * self.psi_step).collect()
    }
}

/// `psi` such that `F(delta) >= mass`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiTarget {
    pub delta: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrateConfig {
    /// Default `{1,2,3}{4,5,6}{7,8,9}{10,11,12}`.
    pub center: String,
    /// Local search depth. Default 4.
    pub depth: usize,
    /// Uniform draws for the tail. Default 20000.
    pub samples: usize,
    /// Enumerate `Π_n` instead of estimating. Default false.
    pub exact: bool,
    /// Default 4,000,000.
    pub max_explored: usize,
    /// Default uniform and DP(1).
    pub bases: Vec<EppfSpec>,
    /// `psi` values of the CDF table. Default 0, 5, 10, 15, 20.
    pub psi_grid: Vec<f64>,
    /// Level of the reported distance quantiles. Default 0.9.
    pub quantile: f64,
    /// Default a single target, `F(1) >= 0.9`.
    pub targets: Vec<PsiTarget>,
}

impl Default for CalibrateConfig {
    fn default() -> Self {
        Self {
            center: STANDARD_CENTER.into(),
            depth: 4,
            samples: 20_000,
            exact: false,
            max_explored: centered_partition::calibration::DEFAULT_MAX_EXPLORED,
            bases: vec![EppfSpec::Uniform, dp1()],
            psi_grid: vec![0.0, 5.0, 10.0, 15.0, 20.0],
            quantile: 0.9,
            targets: vec![PsiTarget { delta: 1.0, mass: 0.9 }],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    /// Multiplies every per-defect sample size. Default 1.
    pub scale: f64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self { scale: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitSection {
    /// Data CSV as written by `simulate`. Default `data.csv`.
    pub data: PathBuf,
    /// Default `{1,2,3}{4,5,6}{7,8,9}{10,11,12}`.
    pub center: String,
    /// Default 0. `inf` pins the partition to the center.
    pub psi: f64,
    /// Default DP(1).
    pub base: EppfSpec,
    /// Default 5000.
    pub iterations: usize,
    /// Default 1000.
    pub burn_in: usize,
    /// Default 1.
    pub thin: usize,
    /// Auxiliary coefficient draws per allocation. Default 1.
    pub aux: usize,
    /// Default `center`.
    pub init: Init,
    /// Intercept prior mean and precision. Default 0 and 0.5.
    pub a0: f64,
    pub tau0: f64,
    /// Coefficient prior `N(b 1, q I)`. Default 0 and 2.
    pub b: f64,
    pub q: f64,
}

impl Default for FitSection {
    fn default() -> Self {
        Self {
            data: PathBuf::from("data.csv"),
            center: STANDARD_CENTER.into(),
            psi: 0.0,
            base: dp1(),
            iterations: 5000,
            burn_in: 1000,
            thin: 1,
            aux: 1,
            init: Init::Center,
            a0: 0.0,
            tau0: 0.5,
            b: 0.0,
            q: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SummarizeConfig {
    /// Directory holding the traces written by `fit`. Default `.`.
    pub trace_dir: PathBuf,
}

impl Default for SummarizeConfig {
    fn default() -> Self {
        Self { trace_dir: PathBuf::from(".") }
    }
}

pub fn parse_center(s: &str) -> Result<SetPartition> {
    s.parse::<SetPartition>()
        .map_err(|e| anyhow::anyhow!("invalid partition {s:?}: {e}"))
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).context("invalid configuration")
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text)
    }

    /// Checks the section used by `command` before any computation.
    pub fn validate(&self, command: &str) -> Result<()> {
        match command {
            "prior-viz" => {
                let c = &self.prior_viz;
                let center = parse_center(&c.center)?;
                ensure!(
                    center.n() <= PRIOR_VIZ_CAP,
                    "prior-viz enumerates Π_n and is capped at n = {PRIOR_VIZ_CAP}, got n = {}",
                    center.n()
                );
                ensure!(c.psi_min >= 0.0 && c.psi_min.is_finite(), "psi_min must be finite and >= 0");
                ensure!(c.psi_max >= c.psi_min && c.psi_max.is_finite(), "psi_max must be finite and >= psi_min");
                ensure!(c.psi_step > 0.0, "psi_step must be positive");
                ensure!(!c.bases.is_empty(), "at least one base is required");
                for b in &c.bases {
                    b.validate()?;
                }
            }
            "calibrate" => {
                let c = &self.calibrate;
                parse_center(&c.center)?;
                ensure!(c.exact || c.samples > 0, "samples must be positive");
                ensure!(c.quantile > 0.0 && c.quantile <= 1.0, "quantile must lie in (0, 1]");
                ensure!(!c.bases.is_empty(), "at least one base is required");
                ensure!(c.psi_grid.iter().all(|&p| p >= 0.0), "psi values must be >= 0");
                for b in &c.bases {
                    b.validate()?;
                }
                for t in &c.targets {
                    ensure!(t.delta >= 0.0, "target delta must be >= 0");
                    ensure!(t.mass > 0.0 && t.mass < 1.0, "target mass must lie in (0, 1)");
                }
            }
            "simulate" => {
                ensure!(self.simulate.scale > 0.0 && self.simulate.scale.is_finite(), "scale must be positive");
            }
            "fit" => {
                let f = &self.fit;
                parse_center(&f.center)?;
                ensure!(f.psi >= 0.0, "psi must be >= 0");
                f.base.validate()?;
                ensure!(f.iterations > f.burn_in, "iterations must exceed burn_in");
                ensure!(f.thin > 0, "thin must be positive");
                ensure!(f.aux > 0, "aux must be positive");
                ensure!(f.tau0 > 0.0 && f.q > 0.0, "prior precisions must be positive");
            }
            "summarize" => {}
            other => bail!("unknown command {other}"),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn toml_round_trip() {
        let mut c = RunConfig::default();
        c.fit.psi = f64::INFINITY;
        c.fit.init = Init::Random(3);
        c.calibrate.bases.push(EppfSpec::PitmanYor { alpha: 1.0, sigma: 0.25 });
        let back = RunConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_toml(), c.to_toml());
    }

    #[test]
    fn base_families_spelled_in_toml() {
        let c = RunConfig::from_toml(
            "[fit]\nbase = { family = \"pitman_yor\", alpha = 2.0, sigma = 0.5 }\npsi = inf\n",
        )
        .unwrap();
        assert_eq!(c.fit.base, EppfSpec::PitmanYor { alpha: 2.0, sigma: 0.5 });
        assert!(c.fit.psi.is_infinite());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_toml("[fit]\npsy = 1.0\n").is_err());
    }

    #[test]
    fn validation() {
        let mut c = RunConfig::default();
        for cmd in ["prior-viz", "calibrate", "simulate", "fit", "summarize"] {
            c.validate(cmd).unwrap();
        }
        c.prior_viz.center = "{1,2,3,4,5,6,7,8,9,10,11}".into();
        assert!(c.validate("prior-viz").is_err());
        c.fit.burn_in = c.fit.iterations;
        assert!(c.validate("fit").is_err());
        c.calibrate.targets[0].mass = 1.0;
        assert!(c.validate("calibrate").is_err());
        c.calibrate.center = "{1,2}{2,3}".into();
        assert!(c.validate("calibrate").is_err());
    }

    #[test]
    fn default_grid() {
        let g = PriorVizConfig::default().grid();
        assert_eq!(g.len(), 61);
        assert!((g[60] - 3.0).abs() < 1e-12);
    }
}
