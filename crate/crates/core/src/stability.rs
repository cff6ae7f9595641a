//! Stability certificates for Lur'e interconnections.
//!
//! The certificate is a separation argument: the reciprocal image of the
//! plant's extended graph must keep a positive distance `r` from the
//! reflected nonlinearity region, and `1/r` then bounds the closed-loop
//! L2 gain. In incremental mode the bound is incremental and well-posedness
//! follows; in zero-anchored mode only the gain bound survives.
//!
//! The separation distance is evaluated in the plant plane: instead of
//! tracing the inverted region (whose representation tolerance blows up near
//! the origin when the plant is strictly proper), the boundary of the
//! extended graph is pushed through `z -> 1/z` edge by edge, clipped to
//! `|z| >= delta`, and the distance is corrected by the locally amplified
//! tolerance at the witness point. Material discarded by the clip can only
//! map to `|w| >= 1/delta`, which a separate cap accounts for.

use crate::error::{Result, SrgError};
use crate::lti::{
    extended_srg, nyquist_curve, pole_classification, tf_poles, winding_number, ExtendedOpts,
    ExtendedSrg, NyquistOpts, TransferFunction,
};
use crate::nonlinearity::{GraphMode, NlRegionSpec, PiecewiseLinearNl};
use crate::region::{
    check_properties, cross, disk_region, point_segment_distance, puncture_origin, region_invert,
    star_monotone, Confidence, Region, ShapeHint,
};
use crate::CPoint;
use serde::{Deserialize, Serialize};

/// Radius of the disk removed around the origin before the plant graph is
/// inverted; a strictly proper plant always has the origin on its boundary.
pub const PUNCTURE_DELTA: f64 = 1e-3;

/// Candidate count of the automatic search for the homotopy center.
pub const KAPPA_GRID: usize = 101;

/// Rays sampled by the star-shape test behind [`check_homotopy`].
pub const HOMOTOPY_RAYS: usize = 64;

/// Relative sag tolerance when refining reciprocal boundary images.
const RECIP_SAG: f64 = 1e-6;

/// Which graph of the nonlinearity the analysis reasons about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalysisMode {
    /// Incremental graph: gain bound between any two trajectories, and the
    /// certificate implies well-posedness.
    Incremental,
    /// Graph anchored at the zero signal: gain bound from zero only.
    NonIncremental,
}

/// A feedback loop of an LTI plant and a memoryless nonlinearity.
#[derive(Clone, Debug)]
pub struct LureProblem {
    pub plant: TransferFunction,
    /// Region certified to contain the nonlinearity's graph.
    pub nl: NlRegionSpec,
    /// Concrete nonlinearity for time-domain validation, when available.
    pub sim_nl: Option<PiecewiseLinearNl>,
    pub mode: AnalysisMode,
}

impl LureProblem {
    pub fn validate(&self) -> Result<()> {
        let consistent = match self.mode {
            AnalysisMode::Incremental => self.nl.mode == GraphMode::Srg,
            AnalysisMode::NonIncremental => self.nl.mode == GraphMode::Sg0,
        };
        if !consistent {
            return Err(SrgError::InvalidInput {
                context: "analysis mode and nonlinearity region disagree: incremental analysis \
                          needs the incremental graph region, zero-anchored analysis the \
                          zero-anchored one"
                    .into(),
            });
        }
        Ok(())
    }
}

/// Options for [`analyze_lure`].
#[derive(Clone, Debug)]
pub struct AnalyzeOpts {
    /// Homotopy center; `None` triggers the deterministic grid search.
    pub kappa: Option<f64>,
    /// Sample count of the scaling sweep used when no admissible center
    /// exists.
    pub tau_grid: usize,
    /// Construction tolerance of the plant sets and the certification floor:
    /// separations at or below it are inconclusive.
    pub tolerance: f64,
    /// Keep only the real-axis slice of the encircled set.
    pub real_only: bool,
}

impl Default for AnalyzeOpts {
    fn default() -> Self {
        AnalyzeOpts {
            kappa: None,
            tau_grid: 33,
            tolerance: 1e-3,
            real_only: false,
        }
    }
}

impl AnalyzeOpts {
    fn validate(&self) -> Result<()> {
        if let Some(k) = self.kappa {
            if !k.is_finite() {
                return Err(SrgError::NonFiniteInput {
                    context: "homotopy center".into(),
                });
            }
        }
        if self.tau_grid < 2 {
            return Err(SrgError::InvalidInput {
                context: "scaling sweep needs at least two samples".into(),
            });
        }
        if !self.tolerance.is_finite() || self.tolerance <= 0.0 {
            return Err(SrgError::InvalidInput {
                context: "tolerance must be positive and finite".into(),
            });
        }
        Ok(())
    }
}

/// Outcome of a separation analysis. Never asserts instability: a failed
/// certificate only means this method found no proof.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LureVerdict {
    pub certified: bool,
    /// Lower bound on the distance between the inverted plant graph and the
    /// reflected nonlinearity region.
    pub separation: f64,
    /// `1/separation` when certified.
    pub gain_bound: Option<f64>,
    /// Homotopy center the certificate relies on; `None` when the scaling
    /// sweep was used instead.
    pub kappa: Option<f64>,
    /// Only an incremental certificate implies a well-posed loop.
    pub well_posed: bool,
    pub mode: AnalysisMode,
    pub diagnostics: Vec<String>,
}

/// Sign pattern of the sector, following the classical case split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CircleCase {
    /// `0 < k1 < k2`: avoid the critical disk and encircle it.
    PosPos,
    /// `0 = k1 < k2`: stable plant, response right of a vertical line.
    ZeroLower,
    /// `k1 < 0 < k2`: stable plant, response inside the critical disk.
    Mixed,
}

/// Classical circle-criterion verdict, kept as a cross-check for the graph
/// separation method.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CircleVerdict {
    pub case: CircleCase,
    pub stable: bool,
    /// Signed clearance of the geometric condition, already discounted by the
    /// curve tolerance; near zero means the verdict sits on the boundary.
    pub margin: f64,
    pub details: String,
}

/// Feedback interconnection pulled one gain loop tighter: `G / (1 + kappa G)`.
///
/// Numerator is unchanged; shared numerator/denominator roots are flagged on
/// the result (they can only come in through `G` itself, the transform never
/// creates new ones).
pub fn loop_transform(g: &TransferFunction, kappa: f64) -> Result<TransferFunction> {
    if !kappa.is_finite() {
        return Err(SrgError::NonFiniteInput {
            context: "loop gain".into(),
        });
    }
    let den = g.den.add_scaled(&g.num, kappa)?;
    if den.is_zero() {
        return Err(SrgError::DegenerateDenominator);
    }
    TransferFunction::new(g.num.clone(), den)
}

/// True when scaling the region toward `kappa` keeps it nested inside
/// itself, the hypothesis that lets a scaling homotopy carry the separation
/// argument from the linearized loop to the full sector.
pub fn check_homotopy(nl_region: &Region, kappa: f64) -> Result<bool> {
    if !kappa.is_finite() {
        return Err(SrgError::NonFiniteInput {
            context: "homotopy center".into(),
        });
    }
    if let ShapeHint::Disk { .. } = nl_region.shape() {
        // disks are convex, hence star-shaped about every member
        let c = CPoint::new(kappa, 0.0);
        return if nl_region.contains(c, nl_region.tol().max(1e-12)).is_member() {
            Ok(true)
        } else {
            Err(SrgError::KappaOutsideRegion { kappa })
        };
    }
    star_monotone(nl_region, kappa, HOMOTOPY_RAYS)
}

fn lerp(p: CPoint, q: CPoint, t: f64) -> CPoint {
    p + (q - p) * t
}

/// Sub-intervals of `[0,1]` where the segment `p + t(q-p)` stays outside the
/// open disk `|z| < delta`; at most two.
fn clip_outside_disk(p: CPoint, q: CPoint, delta: f64) -> Vec<(f64, f64)> {
    let d = q - p;
    let a = d.norm_sqr();
    let b = 2.0 * (p.re * d.re + p.im * d.im);
    let c = p.norm_sqr() - delta * delta;
    if a == 0.0 {
        return if c >= 0.0 { vec![(0.0, 1.0)] } else { vec![] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc <= 0.0 {
        // no real chord: the segment is entirely on one side
        return if c >= 0.0 || point_segment_distance(CPoint::new(0.0, 0.0), p, q) >= delta {
            vec![(0.0, 1.0)]
        } else {
            vec![]
        };
    }
    let sq = disc.sqrt();
    let t0 = ((-b - sq) / (2.0 * a)).clamp(0.0, 1.0);
    let t1 = ((-b + sq) / (2.0 * a)).clamp(0.0, 1.0);
    let mut out = Vec::new();
    if t0 > 0.0 {
        out.push((0.0, t0));
    }
    if t1 < 1.0 {
        out.push((t1, 1.0));
    }
    out
}

fn refine_recip(
    p: CPoint,
    q: CPoint,
    t0: f64,
    t1: f64,
    w0: CPoint,
    w1: CPoint,
    depth: u32,
    out: &mut Vec<(CPoint, CPoint)>,
) {
    let tm = 0.5 * (t0 + t1);
    let wm = lerp(p, q, tm).inv();
    let sag = (wm - (w0 + w1) * 0.5).norm();
    if depth >= 40 || sag <= RECIP_SAG * (1.0 + wm.norm()) {
        out.push((w0, wm));
        out.push((wm, w1));
        return;
    }
    refine_recip(p, q, t0, tm, w0, wm, depth + 1, out);
    refine_recip(p, q, tm, t1, wm, w1, depth + 1, out);
}

/// Image of the region boundary under `z -> 1/z`, restricted to
/// `|z| >= delta`, as refined straight segments.
fn reciprocal_segments(a: &Region, delta: f64) -> Vec<(CPoint, CPoint)> {
    let mut out = Vec::new();
    for lp in a.loops() {
        let n = lp.len();
        match n {
            0 => {}
            1 => {
                if lp[0].norm() >= delta {
                    let w = lp[0].inv();
                    out.push((w, w));
                }
            }
            _ => {
                // two-point loops are slits with a single edge; longer loops close
                let edges = if n == 2 { 1 } else { n };
                for i in 0..edges {
                    let (p, q) = (lp[i], lp[(i + 1) % n]);
                    for (t0, t1) in clip_outside_disk(p, q, delta) {
                        if t1 - t0 <= 0.0 {
                            continue;
                        }
                        let w0 = lerp(p, q, t0).inv();
                        let w1 = lerp(p, q, t1).inv();
                        refine_recip(p, q, t0, t1, w0, w1, 0, &mut out);
                    }
                }
            }
        }
    }
    out
}

fn project_clamp(p: CPoint, a: CPoint, b: CPoint) -> CPoint {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return a;
    }
    let t = (((p - a).re * ab.re + (p - a).im * ab.im) / len2).clamp(0.0, 1.0);
    a + ab * t
}

/// Distance between two segments plus the closest point on the first one.
fn seg_pair_min(a0: CPoint, a1: CPoint, b0: CPoint, b1: CPoint) -> (f64, CPoint) {
    let d1 = cross(a1 - a0, b0 - a0);
    let d2 = cross(a1 - a0, b1 - a0);
    let d3 = cross(b1 - b0, a0 - b0);
    let d4 = cross(b1 - b0, a1 - b0);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return (0.0, (a0 + a1) * 0.5);
    }
    let mut best = (point_segment_distance(a0, b0, b1), a0);
    let cand = (point_segment_distance(a1, b0, b1), a1);
    if cand.0 < best.0 {
        best = cand;
    }
    for b in [b0, b1] {
        let q = project_clamp(b, a0, a1);
        let d = (b - q).norm();
        if d < best.0 {
            best = (d, q);
        }
    }
    best
}

/// Minimum distance over all segment pairs and the witness on the `a` side.
fn min_dist_witness(a: &[(CPoint, CPoint)], b: &[(CPoint, CPoint)]) -> (f64, CPoint) {
    let bmeta: Vec<(CPoint, f64)> = b
        .iter()
        .map(|&(p, q)| ((p + q) * 0.5, 0.5 * (q - p).norm()))
        .collect();
    let mut best = f64::INFINITY;
    let mut witness = CPoint::new(0.0, 0.0);
    for &(p, q) in a {
        let amid = (p + q) * 0.5;
        let ahalf = 0.5 * (q - p).norm();
        for (j, &(bp, bq)) in b.iter().enumerate() {
            let (bmid, bhalf) = bmeta[j];
            if (amid - bmid).norm() - ahalf - bhalf >= best {
                continue;
            }
            let (d, w) = seg_pair_min(p, q, bp, bq);
            if d < best {
                best = d;
                witness = w;
                if best == 0.0 {
                    return (best, witness);
                }
            }
        }
    }
    (best, witness)
}

fn loop_segments(r: &Region) -> Vec<(CPoint, CPoint)> {
    let mut out = Vec::new();
    for lp in r.loops() {
        let n = lp.len();
        match n {
            0 => {}
            1 => out.push((lp[0], lp[0])),
            _ => {
                let edges = if n == 2 { 1 } else { n };
                for i in 0..edges {
                    out.push((lp[i], lp[(i + 1) % n]));
                }
            }
        }
    }
    out
}

/// Distance from the reciprocal image of the plant graph to `target`,
/// corrected to a sound lower bound.
fn separation_to(ext: &ExtendedSrg, target: &Region) -> Result<f64> {
    if target.is_unbounded() {
        return Err(SrgError::UnboundedOperand);
    }
    let combined = &ext.combined;
    let delta = PUNCTURE_DELTA;
    let origin = CPoint::new(0.0, 0.0);

    // coarsen huge disk targets; the exact diameter is in the shape hint, so
    // resampling just trades vertex count for a slightly larger tolerance
    let vertex_count: usize = target.loops().iter().map(|lp| lp.len()).sum();
    let coarse;
    let target = if vertex_count > 2048 {
        if let ShapeHint::Disk { alpha, beta } = target.shape() {
            coarse = disk_region(alpha, beta, target.tol().max(1e-6))?;
            &coarse
        } else {
            target
        }
    } else {
        target
    };

    // containment probes: one vertex per loop settles each side, because any
    // partial overlap forces a boundary crossing that the segment distance
    // detects as zero
    for lp in target.loops() {
        let Some(&wb) = lp.first() else { continue };
        if wb.norm() < 1e-300 {
            if combined.is_unbounded() {
                return Ok(0.0);
            }
        } else if combined.contains(wb.inv(), 0.0).is_member() {
            return Ok(0.0);
        }
    }
    for lp in combined.loops() {
        if let Some(&z) = lp.iter().find(|z| z.norm() >= delta) {
            if target.contains(z.inv(), 0.0).is_member() {
                return Ok(0.0);
            }
        }
    }

    let asegs = reciprocal_segments(combined, delta);
    let bsegs = loop_segments(target);
    if bsegs.is_empty() {
        return Err(SrgError::EmptyInput {
            context: "separation target has no boundary".into(),
        });
    }

    let mut sep = if asegs.is_empty() {
        f64::INFINITY
    } else {
        let (raw, wa) = min_dist_witness(&asegs, &bsegs);
        // representation error tol_z on the plant boundary maps to at most
        // tol_z |w|^2 / (1 - tol_z |w|) at the witness
        let tz = combined.tol();
        let ew = tz * wa.norm();
        let amplified = if ew < 0.5 {
            tz * wa.norm_sqr() / (1.0 - ew)
        } else {
            f64::INFINITY
        };
        raw - amplified - 2.0 * RECIP_SAG * (1.0 + wa.norm()) - target.tol()
    };

    if combined.is_unbounded() {
        // far plant material maps into every neighborhood of the origin
        let near = bsegs
            .iter()
            .map(|&(p, q)| point_segment_distance(origin, p, q))
            .fold(f64::INFINITY, f64::min);
        sep = sep.min(near - target.tol());
    }
    if combined.contains(origin, 2.0 * delta).is_member() {
        // the clip discarded material whose image lies beyond 1/delta
        let rad = target
            .vertices()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max);
        sep = sep.min(1.0 / delta - rad - target.tol());
    }
    Ok(sep.max(0.0))
}

/// Lower bound on the distance between the inverted extended plant graph and
/// the reflected nonlinearity region; zero means the sets touch or overlap.
pub fn separation(g_ext: &ExtendedSrg, nl_region: &Region) -> Result<f64> {
    separation_to(g_ext, &nl_region.neg())
}

/// Boundary of the inverted extended graph as plain segments, for display:
/// the reciprocal image of the plant-side boundary, clipped to
/// `|z| >= [PUNCTURE_DELTA]`.
pub fn inverse_graph_outline(g_ext: &ExtendedSrg) -> Vec<(CPoint, CPoint)> {
    reciprocal_segments(&g_ext.combined, PUNCTURE_DELTA)
}

fn confidence_label(c: Confidence) -> &'static str {
    match c {
        Confidence::VerifiedAnalytic => "analytic",
        Confidence::Sampled => "sampled",
    }
}

/// Runs the full separation pipeline and returns a verdict with diagnostics.
///
/// Certification needs the chord property on one side, an admissible homotopy
/// center (or the scaling sweep as a fallback), and a separation above the
/// tolerance floor. A missing certificate never claims instability.
pub fn analyze_lure(p: &LureProblem, opts: &AnalyzeOpts) -> Result<LureVerdict> {
    p.validate()?;
    opts.validate()?;
    let mut diags: Vec<String> = Vec::new();
    diags.push("the verdict assumes the closed loop defines a causal operator".into());

    let ext_opts = ExtendedOpts {
        nyquist: NyquistOpts::default(),
        hull_tol: opts.tolerance,
        real_only: opts.real_only,
    };
    let ext = extended_srg(&p.plant, &ext_opts)?;
    if ext.indented {
        diags.push(
            "imaginary-axis poles were detoured around; the plant sets depend on the detour \
             radius"
                .into(),
        );
    }
    if !p.plant.common_roots.is_empty() {
        diags.push(format!(
            "plant has {} shared numerator/denominator root(s); the unstable pole count keeps \
             them",
            p.plant.common_roots.len()
        ));
    }

    // chord hypothesis: the nonlinearity side first, the inverted plant graph
    // as a fallback
    let nl_props = check_properties(&p.nl.region, 4096)?;
    let mut hypothesis_ok = nl_props.chord;
    if hypothesis_ok {
        diags.push(format!(
            "chord property holds on the nonlinearity region ({})",
            confidence_label(nl_props.confidence)
        ));
    } else {
        let plant_side = (|| -> Result<bool> {
            let inv = match region_invert(&ext.combined) {
                Ok(r) => r,
                Err(SrgError::InversionSingularAtZero { .. }) => {
                    region_invert(&puncture_origin(&ext.combined, PUNCTURE_DELTA)?)?
                }
                Err(e) => return Err(e),
            };
            Ok(check_properties(&inv, 4096)?.chord)
        })();
        match plant_side {
            Ok(true) => {
                hypothesis_ok = true;
                diags.push(
                    "chord property holds on the inverse of the extended plant graph (sampled); \
                     note the check runs on the extended graph, not the plain one"
                        .into(),
                );
            }
            _ => {
                diags.push(
                    "chord property could not be established on either the nonlinearity region \
                     or the inverted plant graph"
                        .into(),
                );
            }
        }
    }

    // homotopy center
    let mut kappa: Option<f64> = None;
    let mut homotopy_ok = false;
    match opts.kappa {
        Some(k) => {
            if check_homotopy(&p.nl.region, k)? {
                kappa = Some(k);
                homotopy_ok = true;
                diags.push(format!("requested homotopy center {k:.6} is admissible"));
            } else {
                diags.push(format!(
                    "requested homotopy center {k:.6} does not make the region scaling-nested; \
                     falling back to the scaling sweep"
                ));
            }
        }
        None => {
            if let Some((lo, hi)) = ext_real_extent(&p.nl.region) {
                let mut inside = 0usize;
                let mut passing: Vec<f64> = Vec::new();
                for i in 0..KAPPA_GRID {
                    let x = if KAPPA_GRID == 1 {
                        lo
                    } else {
                        lo + (hi - lo) * i as f64 / (KAPPA_GRID - 1) as f64
                    };
                    if !p.nl.region.contains(CPoint::new(x, 0.0), 0.0).is_member() {
                        continue;
                    }
                    inside += 1;
                    if matches!(check_homotopy(&p.nl.region, x), Ok(true)) {
                        passing.push(x);
                    }
                }
                if let Some(&first) = passing.first() {
                    kappa = Some(first);
                    homotopy_ok = true;
                    diags.push(format!(
                        "homotopy center search: {} grid points on [{lo:.6}, {hi:.6}], {inside} \
                         inside the region, {} admissible; selected {first:.6} (leftmost; the \
                         separation bound does not depend on the center)",
                        KAPPA_GRID,
                        passing.len()
                    ));
                } else {
                    diags.push(format!(
                        "homotopy center search: {} grid points on [{lo:.6}, {hi:.6}], {inside} \
                         inside the region, none admissible; falling back to the scaling sweep",
                        KAPPA_GRID
                    ));
                }
            } else {
                diags.push(
                    "nonlinearity region does not meet the real axis; falling back to the \
                     scaling sweep"
                        .into(),
                );
            }
        }
    }

    // separation, either once or swept over the scaling parameter
    let sep = if homotopy_ok {
        separation(&ext, &p.nl.region)?
    } else {
        let mut worst = f64::INFINITY;
        let mut worst_tau = 0.0;
        for i in 0..opts.tau_grid {
            let tau = i as f64 / (opts.tau_grid - 1) as f64;
            let target = p.nl.region.affine(-tau, 0.0)?;
            let s = separation_to(&ext, &target)?;
            if s < worst {
                worst = s;
                worst_tau = tau;
            }
        }
        diags.push(format!(
            "scaling sweep over {} samples: minimum separation {worst:.6} at scale \
             {worst_tau:.6}; soundness is up to the sweep sampling",
            opts.tau_grid
        ));
        worst
    };

    let floor = opts.tolerance;
    if sep == 0.0 {
        diags.push("separation is zero: the sets overlap or touch, no certificate".into());
    } else if sep <= floor {
        diags.push("inconclusive: separation below tolerance".into());
    }
    let certified = hypothesis_ok && sep > floor;
    if certified && p.mode == AnalysisMode::NonIncremental {
        diags.push(
            "zero-anchored certificate: the gain bound holds from the zero trajectory, and \
             well-posedness is not implied"
                .into(),
        );
    }
    Ok(LureVerdict {
        certified,
        separation: sep,
        gain_bound: if certified { Some(1.0 / sep) } else { None },
        kappa: if homotopy_ok { kappa } else { None },
        well_posed: certified && p.mode == AnalysisMode::Incremental,
        mode: p.mode,
        diagnostics: diags,
    })
}

fn ext_real_extent(r: &Region) -> Option<(f64, f64)> {
    let (lo, hi) = r.bounding_box()?;
    if lo.im > 0.0 || hi.im < 0.0 {
        return None;
    }
    Some((lo.re, hi.re))
}

/// Classical circle criterion for the sector `[k1, k2]`, dispatched on the
/// sign of `k1`. A cross-check: the graph separation method should never be
/// more conservative than this on the same sector.
pub fn classical_circle(g: &TransferFunction, k1: f64, k2: f64) -> Result<CircleVerdict> {
    if !k1.is_finite() || !k2.is_finite() {
        return Err(SrgError::NonFiniteInput {
            context: "sector bounds".into(),
        });
    }
    if k1 >= k2 {
        return Err(SrgError::InvalidInput {
            context: "circle criterion needs k1 < k2".into(),
        });
    }
    if !g.strictly_proper() {
        return Err(SrgError::InvalidInput {
            context: "circle criterion covers strictly proper plants only".into(),
        });
    }
    if k1 < 0.0 && k2 <= 0.0 {
        return Err(SrgError::InvalidInput {
            context: "sector with k2 <= 0 falls outside the three classical cases".into(),
        });
    }
    let opts = NyquistOpts::default();
    let curve = nyquist_curve(g, &opts)?;
    let poly = curve.closed_polyline();
    let n = poly.len();
    let tol = curve.refinement_tol;
    let poles = tf_poles(g)?;
    let (n_p, _) = pole_classification(&poles);

    if k1 > 0.0 {
        let (lo, hi) = (-1.0 / k1, -1.0 / k2);
        let c = CPoint::new(0.5 * (lo + hi), 0.0);
        let r = 0.5 * (hi - lo);
        let mut dist = f64::INFINITY;
        for i in 0..n {
            dist = dist.min(point_segment_distance(c, poly[i], poly[(i + 1) % n]));
        }
        let margin = dist - r - tol;
        if margin <= 0.0 {
            return Ok(CircleVerdict {
                case: CircleCase::PosPos,
                stable: false,
                margin,
                details: format!(
                    "response comes within {margin:.6} of the critical disk [{lo:.6}, {hi:.6}]"
                ),
            });
        }
        let wind = winding_number(&curve, c)?;
        let need = -(n_p as i64);
        Ok(CircleVerdict {
            case: CircleCase::PosPos,
            stable: wind == need,
            margin,
            details: format!(
                "critical disk [{lo:.6}, {hi:.6}] cleared by {margin:.6}; clockwise \
                 encirclements {wind} (need {need} for {n_p} unstable pole(s))"
            ),
        })
    } else if k1 == 0.0 {
        let line = -1.0 / k2;
        let min_re = poly.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        let margin = min_re - line - tol;
        Ok(CircleVerdict {
            case: CircleCase::ZeroLower,
            stable: n_p == 0 && margin > 0.0,
            margin,
            details: format!(
                "response stays {margin:.6} right of the line Re = {line:.6}; {n_p} unstable \
                 pole(s) (need 0)"
            ),
        })
    } else {
        let (lo, hi) = (-1.0 / k2, -1.0 / k1);
        let c = CPoint::new(0.5 * (lo + hi), 0.0);
        let r = 0.5 * (hi - lo);
        let max_dist = poly
            .iter()
            .map(|z| (z - c).norm())
            .fold(0.0f64, f64::max);
        let margin = r - max_dist - tol;
        Ok(CircleVerdict {
            case: CircleCase::Mixed,
            stable: n_p == 0 && margin > 0.0,
            margin,
            details: format!(
                "response stays {margin:.6} inside the critical disk [{lo:.6}, {hi:.6}]; {n_p} \
                 unstable pole(s) (need 0)"
            ),
        })
    }
}
