//! Report documents: one JSON object per command run, deterministic for a
//! fixed config. All floats are rounded to 12 significant digits before
//! serialization so repeated runs are byte-identical.

use serde::Serialize;
use srg_core::lti::NyquistVerdict;
use srg_core::oracle::GainEstimate;
use srg_core::stability::LureVerdict;
use srg_core::Region;

/// Rounds to 12 significant digits through the decimal representation, so
/// the value serializes the same way on every run and platform.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap()
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: String,
    pub tool_version: String,
    pub command: String,
    pub input: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<LureVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nyquist: Option<NyquistVerdict>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub regions: Vec<RegionSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_results: Option<OracleResults>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionSummary {
    pub name: String,
    pub loops: usize,
    pub vertices: usize,
    pub tol: f64,
    pub unbounded: bool,
    /// [re_min, im_min, re_max, im_max]; absent for empty regions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bbox: Option<[f64; 4]>,
    pub max_modulus: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleResults {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical_gain: Option<GainReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within_bound: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// "pass", "fail", or "skipped".
    pub status: String,
    pub details: String,
}

impl CheckResult {
    pub fn new(name: &str, status: &str, details: String) -> Self {
        CheckResult {
            name: name.into(),
            status: status.into(),
            details,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GainReport {
    pub value: f64,
    pub mode: String,
    pub n_trials: usize,
    pub seed: u64,
}

pub fn round_gain(est: &GainEstimate) -> GainReport {
    GainReport {
        value: sig12(est.value),
        mode: match est.mode {
            srg_core::oracle::GainMode::Incremental => "incremental".into(),
            srg_core::oracle::GainMode::NonIncremental => "non-incremental".into(),
        },
        n_trials: est.n_trials,
        seed: est.seed,
    }
}

pub fn round_verdict(mut v: LureVerdict) -> LureVerdict {
    v.separation = sig12(v.separation);
    v.gain_bound = v.gain_bound.map(sig12);
    v.kappa = v.kappa.map(sig12);
    v
}

pub fn summarize_region(name: &str, r: &Region) -> RegionSummary {
    let vertices = r.loops().iter().map(|l| l.len()).sum();
    let bbox = r
        .bounding_box()
        .map(|(lo, hi)| [sig12(lo.re), sig12(lo.im), sig12(hi.re), sig12(hi.im)]);
    let max_modulus = r
        .loops()
        .iter()
        .flatten()
        .map(|p| p.norm())
        .fold(0.0, f64::max);
    RegionSummary {
        name: name.into(),
        loops: r.loops().len(),
        vertices,
        tol: sig12(r.tol()),
        unbounded: r.is_unbounded(),
        bbox,
        max_modulus: sig12(max_modulus),
    }
}

pub fn to_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serialization");
    s.push('\n');
    s
}
