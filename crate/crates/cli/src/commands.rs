//! The four subcommands. Each returns an exit code plus the text that goes
//! to standard output; files named by `--out` are written atomically
//! (temp file in the same directory, then rename).
//!
//! Exit codes: 0 success/certified, 1 input or runtime error, 2 analysis
//! ran but did not certify (or the loop encircles -1), 3 a sampling check
//! falsified a claim. No other codes are emitted.

use crate::config::{build_problem, load_config, LoadedConfig, ProblemConfig, SCHEMA_ID};
use crate::report::{
    round_gain, round_verdict, sig12, summarize_region, to_json, CheckResult, GainReport,
    OracleResults, Report,
};
use crate::svg;
use anyhow::{bail, Context, Result};
use srg_core::lti::{
    extended_srg, nyquist_criterion, nyquist_curve, pole_classification, srg_lti_stable, tf_poles,
    ExtendedOpts, NyquistOpts,
};
use srg_core::oracle::{empirical_gain_on, srg_cloud_on, CloudGrid, GainMode, Operator};
use srg_core::stability::{
    analyze_lure, inverse_graph_outline, separation, AnalysisMode, AnalyzeOpts, LureProblem,
    LureVerdict,
};
use srg_core::Region;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug)]
pub struct CmdOut {
    pub code: i32,
    pub stdout: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PlotKind {
    Nyquist,
    Srg,
    ExtendedSrg,
    Separation,
}

pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp"));
    std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn base_report(command: &str, input: serde_json::Value) -> Report {
    Report {
        schema: SCHEMA_ID.into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        input,
        verdict: None,
        nyquist: None,
        regions: Vec::new(),
        oracle_results: None,
    }
}

fn ext_opts(opts: &AnalyzeOpts) -> ExtendedOpts {
    ExtendedOpts {
        nyquist: NyquistOpts::default(),
        hull_tol: opts.tolerance,
        real_only: opts.real_only,
    }
}

fn grid_of(cfg: &ProblemConfig) -> CloudGrid {
    CloudGrid {
        n: cfg.oracle.horizon,
        dt: cfg.oracle.dt,
    }
}

fn gain_mode(mode: AnalysisMode) -> GainMode {
    match mode {
        AnalysisMode::Incremental => GainMode::Incremental,
        AnalysisMode::NonIncremental => GainMode::NonIncremental,
    }
}

fn plant_is_stable(problem: &LureProblem) -> bool {
    match tf_poles(&problem.plant) {
        Ok(poles) => {
            let (n_p, axis) = pole_classification(&poles);
            n_p == 0 && axis.is_empty()
        }
        Err(_) => false,
    }
}

pub fn cmd_analyze(config: &Path, out: Option<&Path>) -> Result<CmdOut> {
    let LoadedConfig { cfg, raw } = load_config(config)?;
    let (problem, opts) = build_problem(&cfg)?;
    let verdict = analyze_lure(&problem, &opts)?;
    let ext = extended_srg(&problem.plant, &ext_opts(&opts))?;

    let mut report = base_report("analyze", raw);
    report.nyquist = nyquist_criterion(&problem.plant, &NyquistOpts::default()).ok();
    report.regions.push(summarize_region("nyquist-hull", &ext.hull));
    if let Some(enc) = &ext.encircled {
        report.regions.push(summarize_region("encircled", enc));
    }
    report.regions.push(summarize_region("combined", &ext.combined));
    report
        .regions
        .push(summarize_region("nonlinearity", &problem.nl.region));
    if cfg.oracle.enabled {
        report.oracle_results = Some(analyze_oracle(&cfg, &problem, &verdict)?);
    }
    report.verdict = Some(round_verdict(verdict.clone()));

    let json = to_json(&report);
    if let Some(p) = out {
        atomic_write(p, json.as_bytes())?;
    }
    Ok(CmdOut {
        code: if verdict.certified { 0 } else { 2 },
        stdout: json,
    })
}

/// Empirical gain of the loop (or of a stable plant when no simulator
/// exists for the nonlinearity), compared against the certified bound.
fn analyze_oracle(
    cfg: &ProblemConfig,
    problem: &LureProblem,
    verdict: &LureVerdict,
) -> Result<OracleResults> {
    let mode = gain_mode(problem.mode);
    let (target, op) = match (&problem.sim_nl, plant_is_stable(problem)) {
        (Some(nl), _) => (
            "closed-loop",
            Some(Operator::LureLoop {
                plant: problem.plant.clone(),
                nl: nl.clone(),
            }),
        ),
        (None, true) => ("plant", Some(Operator::Lti(problem.plant.clone()))),
        (None, false) => ("none", None),
    };
    let Some(op) = op else {
        return Ok(OracleResults {
            target: None,
            checks: vec![CheckResult::new(
                "empirical-gain",
                "skipped",
                "no simulator: the nonlinearity has no piecewise-linear form and the plant is open-loop unstable".into(),
            )],
            empirical_gain: None,
            bound: verdict.gain_bound.map(sig12),
            within_bound: None,
        });
    };
    let est = empirical_gain_on(&op, mode, cfg.oracle.n_trials, cfg.oracle.seed, grid_of(cfg))?;
    let bound = verdict.gain_bound;
    let within = match (target, bound) {
        ("closed-loop", Some(b)) => Some(est.value <= b * 1.05),
        _ => None,
    };
    Ok(OracleResults {
        target: Some(target.into()),
        checks: Vec::new(),
        empirical_gain: Some(round_gain(&est)),
        bound: bound.map(sig12),
        within_bound: within,
    })
}

pub fn cmd_nyquist(config: &Path, out: Option<&Path>) -> Result<CmdOut> {
    let LoadedConfig { cfg, raw } = load_config(config)?;
    let (problem, _) = build_problem(&cfg)?;
    let nopts = NyquistOpts::default();
    let verdict = nyquist_criterion(&problem.plant, &nopts)?;

    let mut report = base_report("nyquist", raw);
    report.nyquist = Some(verdict.clone());
    let json = to_json(&report);

    if let Some(p) = out {
        let curve = nyquist_curve(&problem.plant, &nopts)?;
        let mut csv = String::from("omega,re,im\n");
        for &(w, z) in &curve.samples {
            let _ = writeln!(csv, "{:.11e},{:.11e},{:.11e}", w, z.re, z.im);
        }
        atomic_write(p, csv.as_bytes())?;
    }
    Ok(CmdOut {
        code: if verdict.n_z == 0 { 0 } else { 2 },
        stdout: json,
    })
}

pub fn cmd_plot(config: &Path, what: PlotKind, out: &Path) -> Result<CmdOut> {
    let LoadedConfig { cfg, .. } = load_config(config)?;
    let (problem, opts) = build_problem(&cfg)?;
    let nopts = NyquistOpts::default();
    let mut scene = svg::Scene::default();
    match what {
        PlotKind::Nyquist => {
            let curve = nyquist_curve(&problem.plant, &nopts)?;
            scene.caption = "frequency response with the -1 point".into();
            scene.add_curve(curve.closed_polyline());
            scene.markers.push(svg::Marker {
                at: (-1.0, 0.0),
                label: "-1".into(),
            });
        }
        PlotKind::Srg => {
            let r = srg_lti_stable(&problem.plant, opts.tolerance)?;
            scene.caption = "graph set of the stable plant".into();
            scene.add_region(&r, svg::PLANT_STYLE);
        }
        PlotKind::ExtendedSrg => {
            let ext = extended_srg(&problem.plant, &ext_opts(&opts))?;
            let curve = nyquist_curve(&problem.plant, &nopts)?;
            scene.caption = "extended graph set over the frequency response".into();
            scene.add_region(&ext.combined, svg::PLANT_STYLE);
            scene.add_curve(curve.closed_polyline());
            scene.markers.push(svg::Marker {
                at: (-1.0, 0.0),
                label: "-1".into(),
            });
        }
        PlotKind::Separation => {
            let ext = extended_srg(&problem.plant, &ext_opts(&opts))?;
            let r = separation(&ext, &problem.nl.region)?;
            scene.caption = "separation of the inverted plant set from the negated nonlinearity set".into();
            scene.add_region(&problem.nl.region.neg(), svg::NL_STYLE);
            for pts in svg::chain_segments(&inverse_graph_outline(&ext)) {
                scene.chains.push(svg::Chain {
                    pts,
                    stroke: "#33567d",
                    width: 2.0,
                });
            }
            scene.annotation = Some(format!("r = {:.4}", r));
        }
    }
    let doc = svg::render(&scene);
    atomic_write(out, doc.as_bytes())?;
    Ok(CmdOut {
        code: 0,
        stdout: format!("wrote {}\n", out.display()),
    })
}

pub fn cmd_validate(config: &Path, out: Option<&Path>) -> Result<CmdOut> {
    let LoadedConfig { cfg, raw } = load_config(config)?;
    if !cfg.oracle.enabled {
        bail!("validation needs oracle.enabled = true in the config");
    }
    let (problem, opts) = build_problem(&cfg)?;
    let grid = grid_of(&cfg);
    let seed = cfg.oracle.seed;
    let n = cfg.oracle.n_trials.max(1);
    let mode = gain_mode(problem.mode);
    let mut checks: Vec<CheckResult> = Vec::new();
    let mut empirical: Option<GainReport> = None;
    let mut bound_used: Option<f64> = None;
    let mut within: Option<bool> = None;

    // 1: sampled plant graph points stay in the stable-plant graph set
    if plant_is_stable(&problem) {
        match srg_lti_stable(&problem.plant, opts.tolerance) {
            Ok(set) => {
                let cloud = srg_cloud_on(
                    &Operator::Lti(problem.plant.clone()),
                    n,
                    seed,
                    srg_core::nonlinearity::GraphMode::Srg,
                    grid,
                )?;
                let band = set.tol() + 1e-6;
                let misses = cloud
                    .iter()
                    .filter(|s| !set.contains(s.upper(), band).is_member())
                    .count();
                let status = if misses == 0 { "pass" } else { "fail" };
                checks.push(CheckResult::new(
                    "plant-graph-containment",
                    status,
                    format!("{misses} of {} samples outside (band {:.2e})", cloud.len(), band),
                ));
            }
            Err(e) => checks.push(CheckResult::new(
                "plant-graph-containment",
                "skipped",
                format!("graph set unavailable: {e}"),
            )),
        }
    } else {
        checks.push(CheckResult::new(
            "plant-graph-containment",
            "skipped",
            "plant is open-loop unstable; validation restricted to the closed loop".into(),
        ));
    }

    // 2: sampled nonlinearity graph points stay in the declared region
    if let Some(nl) = &problem.sim_nl {
        let set = &problem.nl.region;
        let cloud = srg_cloud_on(&Operator::StaticNl(nl.clone()), n, seed, problem.nl.mode, grid)?;
        let scale = set
            .loops()
            .iter()
            .flatten()
            .map(|p| p.norm())
            .fold(1.0, f64::max);
        let band = set.tol() + 1e-6 * scale;
        let misses = cloud
            .iter()
            .filter(|s| !set.contains(s.upper(), band).is_member())
            .count();
        let status = if misses == 0 { "pass" } else { "fail" };
        checks.push(CheckResult::new(
            "nonlinearity-graph-containment",
            status,
            format!("{misses} of {} samples outside (band {:.2e})", cloud.len(), band),
        ));
    } else {
        checks.push(CheckResult::new(
            "nonlinearity-graph-containment",
            "skipped",
            "no piecewise-linear form to simulate; the declared region is taken as given".into(),
        ));
    }

    // 3: empirical gain against the certified (or claimed) bound
    let verdict = analyze_lure(&problem, &opts).ok();
    let certified_bound = verdict.as_ref().and_then(|v| v.gain_bound);
    let bound = cfg.oracle.claimed_gain.or(certified_bound);
    let op = match (&problem.sim_nl, plant_is_stable(&problem)) {
        (Some(nl), _) => Some(Operator::LureLoop {
            plant: problem.plant.clone(),
            nl: nl.clone(),
        }),
        (None, true) => Some(Operator::Lti(problem.plant.clone())),
        (None, false) => None,
    };
    match (op, bound) {
        (Some(op), Some(b)) => {
            let est = empirical_gain_on(&op, mode, n, seed, grid)?;
            let ok = est.value <= b * 1.05;
            checks.push(CheckResult::new(
                "gain-bound",
                if ok { "pass" } else { "fail" },
                format!(
                    "empirical gain {:.6} vs bound {:.6} (margin factor 1.05)",
                    est.value, b
                ),
            ));
            bound_used = Some(sig12(b));
            within = Some(ok);
            empirical = Some(round_gain(&est));
        }
        (Some(op), None) => {
            let est = empirical_gain_on(&op, mode, n, seed, grid)?;
            checks.push(CheckResult::new(
                "gain-bound",
                "skipped",
                format!(
                    "no certificate and no claimed gain; empirical gain {:.6} reported for reference",
                    est.value
                ),
            ));
            empirical = Some(round_gain(&est));
        }
        (None, _) => checks.push(CheckResult::new(
            "gain-bound",
            "skipped",
            "no simulator: the nonlinearity has no piecewise-linear form and the plant is open-loop unstable".into(),
        )),
    }

    let failed = checks.iter().any(|c| c.status == "fail");
    let mut report = base_report("validate", raw);
    report.verdict = verdict.map(round_verdict);
    report.oracle_results = Some(OracleResults {
        target: None,
        checks,
        empirical_gain: empirical,
        bound: bound_used,
        within_bound: within,
    });
    let json = to_json(&report);
    if let Some(p) = out {
        atomic_write(p, json.as_bytes())?;
    }
    Ok(CmdOut {
        code: if failed { 3 } else { 0 },
        stdout: json,
    })
}

/// One region accessor used by plots and tests.
pub fn nl_region_of(cfg: &ProblemConfig) -> Result<Region> {
    let (problem, _) = build_problem(cfg)?;
    Ok(problem.nl.region.clone())
}
