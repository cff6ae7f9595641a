//! Problem description files: a small JSON schema covering the plant, the
//! nonlinearity, analysis knobs, and the sampling oracle.
//!
//! Unknown keys are rejected so that typos fail loudly instead of silently
//! falling back to defaults. The nonlinearity section is one flat struct
//! dispatched on `type`; fields that do not belong to the chosen type are
//! rejected by name.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use srg_core::nonlinearity::{
    nl_region, pwl_incremental_sector, pwl_sector_at_zero, GraphMode, NlRegionSpec, NlSource,
    PiecewiseLinearNl, SectorSpec,
};
use srg_core::stability::{AnalysisMode, AnalyzeOpts, LureProblem};
use srg_core::{CPoint, Region};
use std::path::Path;

pub const SCHEMA_ID: &str = "srg-analyzer/1";

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub schema: String,
    pub plant: PlantConfig,
    pub nonlinearity: NlConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantConfig {
    /// Numerator coefficients, ascending powers of s.
    pub num: Vec<f64>,
    /// Denominator coefficients, ascending powers of s.
    pub den: Vec<f64>,
}

/// One flat section for all three nonlinearity forms, discriminated by
/// `type`: "sector" (k1, k2, incremental), "pwl" (breakpoints, left_slope,
/// right_slope), or "region" (vertices).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NlConfig {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub incremental: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakpoints: Option<Vec<(f64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_slope: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_slope: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<(f64, f64)>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KappaChoice {
    Value(f64),
    Named(String),
}

impl Default for KappaChoice {
    fn default() -> Self {
        KappaChoice::Named("auto".into())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    pub mode: AnalysisMode,
    pub kappa: KappaChoice,
    pub tolerance: f64,
    pub real_only_extension: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            mode: AnalysisMode::Incremental,
            kappa: KappaChoice::default(),
            tolerance: 1e-3,
            real_only_extension: false,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub enabled: bool,
    pub seed: u64,
    pub n_trials: usize,
    /// Simulation step, seconds.
    pub dt: f64,
    /// Probe window length, samples.
    pub horizon: usize,
    /// Gain bound to test against instead of the certified one; lets a
    /// report's claim be checked independently of the analysis.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claimed_gain: Option<f64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            enabled: false,
            seed: 1,
            n_trials: 200,
            dt: 0.01,
            horizon: 4096,
            claimed_gain: None,
        }
    }
}

/// Parsed config plus the raw JSON value, kept for the report's input echo.
#[derive(Debug)]
pub struct LoadedConfig {
    pub cfg: ProblemConfig,
    pub raw: serde_json::Value,
}

pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let raw: serde_json::Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))?;
    let cfg: ProblemConfig = serde_json::from_str(&text)
        .with_context(|| format!("validating config {}", path.display()))?;
    if cfg.schema != SCHEMA_ID {
        bail!(
            "config schema is {:?}, this tool reads {:?}",
            cfg.schema,
            SCHEMA_ID
        );
    }
    validate_config(&cfg)?;
    Ok(LoadedConfig { cfg, raw })
}

fn require<T: Copy>(field: Option<T>, name: &str, kind: &str) -> Result<T> {
    field.ok_or_else(|| anyhow!("nonlinearity type {kind:?} requires field {name:?}"))
}

fn forbid<T>(field: &Option<T>, name: &str, kind: &str) -> Result<()> {
    if field.is_some() {
        bail!("field {name:?} does not apply to nonlinearity type {kind:?}");
    }
    Ok(())
}

fn validate_config(cfg: &ProblemConfig) -> Result<()> {
    let nl = &cfg.nonlinearity;
    match nl.kind.as_str() {
        "sector" => {
            require(nl.k1, "k1", "sector")?;
            require(nl.k2, "k2", "sector")?;
            require(nl.incremental, "incremental", "sector")?;
            forbid(&nl.breakpoints, "breakpoints", "sector")?;
            forbid(&nl.left_slope, "left_slope", "sector")?;
            forbid(&nl.right_slope, "right_slope", "sector")?;
            forbid(&nl.vertices, "vertices", "sector")?;
        }
        "pwl" => {
            require(nl.left_slope, "left_slope", "pwl")?;
            require(nl.right_slope, "right_slope", "pwl")?;
            if nl.breakpoints.is_none() {
                bail!("nonlinearity type \"pwl\" requires field \"breakpoints\"");
            }
            forbid(&nl.k1, "k1", "pwl")?;
            forbid(&nl.k2, "k2", "pwl")?;
            forbid(&nl.incremental, "incremental", "pwl")?;
            forbid(&nl.vertices, "vertices", "pwl")?;
        }
        "region" => {
            if nl.vertices.is_none() {
                bail!("nonlinearity type \"region\" requires field \"vertices\"");
            }
            forbid(&nl.k1, "k1", "region")?;
            forbid(&nl.k2, "k2", "region")?;
            forbid(&nl.incremental, "incremental", "region")?;
            forbid(&nl.breakpoints, "breakpoints", "region")?;
            forbid(&nl.left_slope, "left_slope", "region")?;
            forbid(&nl.right_slope, "right_slope", "region")?;
        }
        other => bail!("unknown nonlinearity type {other:?}; expected \"sector\", \"pwl\", or \"region\""),
    }
    if let KappaChoice::Named(name) = &cfg.analysis.kappa {
        if name != "auto" {
            bail!("analysis.kappa must be a number or the string \"auto\", got {name:?}");
        }
    }
    Ok(())
}

/// Turns a validated config into the analysis problem and options.
pub fn build_problem(cfg: &ProblemConfig) -> Result<(LureProblem, AnalyzeOpts)> {
    let plant = srg_core::lti::TransferFunction::from_coeffs(
        cfg.plant.num.clone(),
        cfg.plant.den.clone(),
    )?;
    let mode = cfg.analysis.mode;
    let graph_mode = match mode {
        AnalysisMode::Incremental => GraphMode::Srg,
        AnalysisMode::NonIncremental => GraphMode::Sg0,
    };
    let nl = &cfg.nonlinearity;
    let (nl_spec, sim_nl) = match nl.kind.as_str() {
        "sector" => {
            let spec = SectorSpec {
                k1: nl.k1.unwrap(),
                k2: nl.k2.unwrap(),
                incremental: nl.incremental.unwrap(),
            };
            let want_incremental = mode == AnalysisMode::Incremental;
            if spec.incremental != want_incremental {
                bail!(
                    "sector incremental={} conflicts with analysis mode {:?}",
                    spec.incremental,
                    mode
                );
            }
            (nl_region(&spec)?, None)
        }
        "pwl" => {
            let pwl = PiecewiseLinearNl::new(
                nl.breakpoints.clone().unwrap(),
                nl.left_slope.unwrap(),
                nl.right_slope.unwrap(),
            )?;
            let sector = match mode {
                AnalysisMode::Incremental => pwl_incremental_sector(&pwl),
                AnalysisMode::NonIncremental => pwl_sector_at_zero(&pwl)?,
            };
            let mut spec = nl_region(&sector)?;
            spec.source = NlSource::PwlDerived;
            (spec, Some(pwl))
        }
        "region" => {
            let verts = nl.vertices.clone().unwrap();
            if verts.len() < 3 {
                bail!("nonlinearity region needs at least 3 vertices, got {}", verts.len());
            }
            let pts: Vec<CPoint> = verts.iter().map(|&(x, y)| CPoint::new(x, y)).collect();
            let scale = pts.iter().map(|p| p.norm()).fold(1.0, f64::max);
            let region = Region::new(vec![pts], false, 1e-9 * scale)?;
            (
                NlRegionSpec {
                    source: NlSource::UserRegion,
                    region,
                    mode: graph_mode,
                    note: "user-supplied region, assumed to contain the graph",
                },
                None,
            )
        }
        _ => unreachable!("validated in load_config"),
    };
    let problem = LureProblem {
        plant,
        nl: nl_spec,
        sim_nl,
        mode,
    };
    let opts = AnalyzeOpts {
        kappa: match cfg.analysis.kappa {
            KappaChoice::Value(v) => Some(v),
            KappaChoice::Named(_) => None,
        },
        tolerance: cfg.analysis.tolerance,
        real_only: cfg.analysis.real_only_extension,
        ..AnalyzeOpts::default()
    };
    Ok((problem, opts))
}
