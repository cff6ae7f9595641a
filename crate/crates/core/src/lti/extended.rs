//! Frequency-domain graph regions for LTI operators.
//!
//! For a stable transfer function the graph region is the hull of the
//! Nyquist curve under arcs centered on the real axis. The extended variant
//! drops the stability requirement by tracking, in addition to the hull, the
//! set of points the closed Nyquist contour encircles in a way that would
//! change the closed-loop pole count: points `z` where the clockwise winding
//! of the curve plus the open right half-plane pole count stays positive.
//! Separation arguments must then avoid the union of hull and encircled set.

use crate::error::{Result, SrgError};
use crate::lti::{
    nyquist_curve, pole_classification, tf_poles, NyquistCurve, NyquistOpts, TransferFunction,
};
use crate::region::{trace_region, PiecewiseInput, WindingAccel};
use crate::{CPoint, Region};

use super::h_convex_hull;

fn pole_list(poles: &[CPoint]) -> String {
    poles
        .iter()
        .map(|p| format!("{:.6}{:+.6}j", p.re, p.im))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Graph region of a stable transfer function: the hull of its Nyquist
/// curve under arcs centered on the real axis, inflated outward by `tol`.
///
/// Errors with [`SrgError::UnstableTransferFunction`] when any pole lies in
/// the closed right half-plane; the result would be unsound there.
pub fn srg_lti_stable(tf: &TransferFunction, tol: f64) -> Result<Region> {
    let poles = tf_poles(tf)?;
    let (n_p, on_axis) = pole_classification(&poles);
    if n_p > 0 || !on_axis.is_empty() {
        let bad: Vec<CPoint> = poles
            .iter()
            .filter(|p| p.re > -super::POLE_AXIS_TOL * (1.0 + p.norm()))
            .copied()
            .collect();
        return Err(SrgError::UnstableTransferFunction {
            poles: pole_list(&bad),
        });
    }
    let opts = NyquistOpts {
        refinement_tol: (tol / 4.0).max(1e-9),
        ..NyquistOpts::default()
    };
    let curve = nyquist_curve(tf, &opts)?;
    let hull = h_convex_hull(&curve.closed_polyline(), tol)?;
    Ok(hull.widen_tol(1.5 * tol))
}

/// Options for [`extended_srg`].
#[derive(Clone, Debug)]
pub struct ExtendedOpts {
    pub nyquist: NyquistOpts,
    /// Outward inflation of the hull component.
    pub hull_tol: f64,
    /// Keep only the real-axis part of the encircled set. Sound whenever the
    /// feedback loop is closed around a purely real gain set, and much
    /// smaller than the full encircled set.
    pub real_only: bool,
}

impl Default for ExtendedOpts {
    fn default() -> Self {
        ExtendedOpts {
            nyquist: NyquistOpts::default(),
            hull_tol: 1e-3,
            real_only: false,
        }
    }
}

/// Extended graph of a (possibly unstable) transfer function.
#[derive(Clone, Debug)]
pub struct ExtendedSrg {
    /// Hull of the Nyquist curve under arcs centered on the real axis.
    pub hull: Region,
    /// Points whose encirclement count plus the unstable pole count stays
    /// positive; `None` when that set is empty.
    pub encircled: Option<Region>,
    /// Union of `hull` and `encircled`; what separation tests must avoid.
    pub combined: Region,
    /// Open right half-plane poles of the plant.
    pub n_p: usize,
    /// True when `encircled`/`combined` only carry the real-axis slice of
    /// the encircled set, clipped to a finite working window.
    pub real_only: bool,
    /// The sampled Nyquist curve the construction was built from.
    pub curve: NyquistCurve,
    /// Inherited from the curve: imaginary-axis poles were detoured around,
    /// so all derived sets depend on the detour radius.
    pub indented: bool,
}

/// Clockwise winding of the closed Nyquist polyline about `z`, plus `n_p`.
/// Positive means `z` belongs to the encircled set.
fn encirclement_excess(accel: &WindingAccel, n_p: usize, z: CPoint) -> i64 {
    -accel.winding(z) + n_p as i64
}

/// Real-axis crossings of the closed polyline, ascending and deduplicated.
fn axis_crossings(poly: &[CPoint], scale: f64) -> Vec<f64> {
    let mut xs = Vec::new();
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if a.im == 0.0 {
            xs.push(a.re);
        }
        if (a.im > 0.0) != (b.im > 0.0) && a.im != 0.0 && b.im != 0.0 {
            let t = a.im / (a.im - b.im);
            xs.push(a.re + t * (b.re - a.re));
        }
    }
    xs.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for x in xs {
        if out.last().map_or(true, |l| x - l > 1e-9 * scale) {
            out.push(x);
        }
    }
    out
}

/// Extended graph region of `tf`.
///
/// The encircled component is traced from the closed Nyquist contour; the
/// combined region is the union of hull and encircled set. With
/// `opts.real_only` the encircled component is reduced to degenerate
/// real-axis slits, with unbounded tails clipped to ten times the largest
/// curve magnitude.
pub fn extended_srg(tf: &TransferFunction, opts: &ExtendedOpts) -> Result<ExtendedSrg> {
    let poles = tf_poles(tf)?;
    let (n_p, _) = pole_classification(&poles);
    let curve = nyquist_curve(tf, &opts.nyquist)?;
    let poly = curve.closed_polyline();
    let hull = h_convex_hull(&poly, opts.hull_tol)?
        .widen_tol(1.5 * opts.hull_tol + opts.nyquist.refinement_tol);

    let scale = curve.max_modulus().max(1.0);
    let mut segs = Vec::with_capacity(poly.len());
    for i in 0..poly.len() {
        segs.push((poly[i], poly[(i + 1) % poly.len()]));
    }
    let accel = WindingAccel::from_segments(segs, false);

    let (encircled, combined) = if opts.real_only {
        build_real_only(&poly, &accel, n_p, scale, &hull)?
    } else {
        build_full(&poly, &accel, n_p, &hull, &curve)?
    };

    Ok(ExtendedSrg {
        hull,
        encircled,
        combined,
        n_p,
        real_only: opts.real_only,
        indented: curve.indented,
        curve,
    })
}

fn build_full(
    poly: &[CPoint],
    accel: &WindingAccel,
    n_p: usize,
    hull: &Region,
    curve: &NyquistCurve,
) -> Result<(Option<Region>, Region)> {
    let member_n = |z: CPoint| encirclement_excess(accel, n_p, z) > 0;
    let n_tol = curve.refinement_tol.max(1e-9);
    let traced = trace_region(
        vec![PiecewiseInput::Closed(poly.to_vec())],
        &member_n,
        n_tol,
    );
    let encircled = match traced {
        Ok(r) => Some(r),
        Err(SrgError::EmptyInput { .. }) => None,
        Err(e) => return Err(e),
    };
    let combined = match &encircled {
        None => hull.clone(),
        Some(n_region) => {
            let hull_accel = WindingAccel::from_region(hull);
            let n_accel = WindingAccel::from_region(n_region);
            let member = |z: CPoint| hull_accel.is_member(z) || n_accel.is_member(z);
            let mut pieces = Vec::new();
            for lp in hull.loops().iter().chain(n_region.loops()) {
                if lp.len() >= 3 {
                    pieces.push(PiecewiseInput::Closed(lp.clone()));
                } else {
                    pieces.push(PiecewiseInput::Degenerate(lp.clone()));
                }
            }
            trace_region(pieces, &member, hull.tol().max(n_region.tol()))?
        }
    };
    Ok((encircled, combined))
}

fn build_real_only(
    poly: &[CPoint],
    accel: &WindingAccel,
    n_p: usize,
    scale: f64,
    hull: &Region,
) -> Result<(Option<Region>, Region)> {
    let window = 10.0 * scale;
    let xs = axis_crossings(poly, scale);
    // candidate intervals between consecutive crossings plus the two tails
    let mut cuts = vec![-window];
    cuts.extend(xs.iter().copied().filter(|x| x.abs() < window));
    cuts.push(window);
    let mut slits: Vec<Vec<CPoint>> = Vec::new();
    let mut unbounded_tail = false;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= 1e-12 * scale {
            continue;
        }
        let mid = CPoint::new(0.5 * (a + b), 0.0);
        if encirclement_excess(accel, n_p, mid) > 0 {
            slits.push(vec![CPoint::new(a, 0.0), CPoint::new(b, 0.0)]);
            if a == -window || b == window {
                unbounded_tail = true;
            }
        }
    }
    let tol = hull.tol();
    let encircled = if slits.is_empty() {
        None
    } else {
        Some(Region::new(slits.clone(), false, tol)?)
    };
    let mut all_loops = hull.loops().to_vec();
    all_loops.extend(slits);
    let combined = Region::new(all_loops, hull.is_unbounded(), tol)?;
    let _ = unbounded_tail; // tails are clipped to the window by design
    Ok((encircled, combined))
}
