//! Set operations on regions: Möbius inversion, origin puncture, guarded
//! Minkowski sum and set product, scaling.

use super::props::PropertyReport;
use super::trace::{trace_region, PiecewiseInput, WindingAccel};
use super::{cross, disk_region, loop_winding, Region, ShapeHint};
use crate::error::{Result, SrgError};
use crate::CPoint;

/// `{c*z : z in A}` for real `c`.
pub fn region_scale(a: &Region, c: f64) -> Result<Region> {
    a.affine(c, 0.0)
}

/// Pointwise reciprocal `{1/z : z in A}`.
///
/// Real-axis symmetry makes this coincide with the gain-phase inversion
/// `r e^{j phi} -> (1/r) e^{j phi}` on the set level. If the origin is
/// interior to `A` the image is unbounded; if `A` is unbounded the image
/// gains the origin. The origin on the boundary has no well-defined image,
/// so that case is rejected and the caller must perturb
/// (see [`puncture_origin`]) or refuse.
pub fn region_invert(a: &Region) -> Result<Region> {
    let mut scale: f64 = 1.0;
    for v in a.vertices() {
        scale = scale.max(v.norm());
    }
    let guard = a.tol().max(1e-12 * scale);
    if !a.loops().is_empty() {
        let d0 = a.boundary_distance(CPoint::new(0.0, 0.0));
        if d0 <= guard {
            return Err(SrgError::InversionSingularAtZero { tol: guard });
        }
    }
    let d0 = if a.loops().is_empty() {
        f64::INFINITY
    } else {
        a.boundary_distance(CPoint::new(0.0, 0.0))
    };
    let accel = WindingAccel::from_region(a);
    let a_unbounded = a.is_unbounded();
    let member = move |w: CPoint| {
        if w.norm() <= 1e-280 {
            return a_unbounded;
        }
        accel.is_member(w.inv())
    };
    let mut pieces = Vec::new();
    for lp in a.loops() {
        if lp.len() <= 2 {
            pieces.push(PiecewiseInput::Degenerate(
                lp.iter().map(|z| z.inv()).collect(),
            ));
            continue;
        }
        let mut img: Vec<CPoint> = Vec::new();
        for i in 0..lp.len() {
            push_inv_edge(lp[i], lp[(i + 1) % lp.len()], &mut img, 0);
        }
        pieces.push(PiecewiseInput::Closed(img));
    }
    let amp = (1.0 / (d0 * d0)).max(1.0);
    let tol_out = a.tol() * amp + 1e-6 * (1.0 / d0).max(1.0);
    let out = trace_region(pieces, &member, tol_out)?;
    let shape = match a.shape() {
        // a real-diameter disk off the origin inverts to a real-diameter disk
        ShapeHint::Disk { alpha, beta } if alpha * beta > 0.0 => {
            let (p, q) = (1.0 / alpha, 1.0 / beta);
            ShapeHint::Disk {
                alpha: p.min(q),
                beta: p.max(q),
            }
        }
        _ => ShapeHint::General,
    };
    Ok(out.with_shape(shape))
}

/// Emits the reciprocal image of edge `p -> q` as an open chain (start point
/// included, end point left for the next edge), bisecting until the image
/// sags less than a relative 1e-6 below its chord.
fn push_inv_edge(p: CPoint, q: CPoint, out: &mut Vec<CPoint>, depth: u32) {
    let (ip, iq) = (p.inv(), q.inv());
    let m = (p + q) * 0.5;
    let im = m.inv();
    let sag = (im - (ip + iq) * 0.5).norm();
    if depth < 42
        && sag > 1e-6 * im.norm().max(1.0)
        && (q - p).norm() > 1e-13 * p.norm().max(q.norm())
    {
        push_inv_edge(p, m, out, depth + 1);
        push_inv_edge(m, q, out, depth + 1);
    } else {
        out.push(ip);
    }
}

/// Removes the closed disk of radius `delta` about the origin from `A`.
///
/// This is the perturbation companion to [`region_invert`]: when a boundary
/// passes through the origin, inverting the punctured set is well-defined and
/// the discarded material can only map to `|w| >= 1/delta`, which the caller
/// accounts for separately.
pub fn puncture_origin(a: &Region, delta: f64) -> Result<Region> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(SrgError::InvalidInput {
            context: format!("puncture radius must be positive and finite, got {delta}"),
        });
    }
    let origin = CPoint::new(0.0, 0.0);
    if a.boundary_distance(origin) > delta + a.tol() && !a.contains(origin, 0.0).is_member() {
        return Ok(a.clone());
    }
    let accel = WindingAccel::from_region(a);
    let member = move |z: CPoint| z.norm() >= delta && accel.is_member(z);
    let n = 256usize;
    let mut pieces: Vec<PiecewiseInput> = Vec::new();
    for lp in a.loops() {
        match lp.len() {
            1 => {
                if lp[0].norm() >= delta {
                    pieces.push(PiecewiseInput::Degenerate(lp.clone()));
                }
            }
            2 => {
                for part in clip_segment_outside_circle(lp[0], lp[1], delta) {
                    pieces.push(PiecewiseInput::Degenerate(vec![part.0, part.1]));
                }
            }
            _ => pieces.push(PiecewiseInput::Closed(lp.clone())),
        }
    }
    let circle: Vec<CPoint> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            CPoint::new(delta * t.cos(), delta * t.sin())
        })
        .collect();
    pieces.push(PiecewiseInput::Closed(circle));
    let sagitta = delta * (1.0 - (std::f64::consts::PI / n as f64).cos());
    trace_region(pieces, &member, a.tol().max(sagitta))
}

/// Parts of segment `[a, b]` lying outside the circle `|z| = r`.
fn clip_segment_outside_circle(a: CPoint, b: CPoint, r: f64) -> Vec<(CPoint, CPoint)> {
    let d = b - a;
    let aa = d.norm_sqr();
    if aa == 0.0 {
        return if a.norm() >= r { vec![(a, b)] } else { vec![] };
    }
    let bb = 2.0 * (a.re * d.re + a.im * d.im);
    let cc = a.norm_sqr() - r * r;
    let disc = bb * bb - 4.0 * aa * cc;
    if disc <= 0.0 {
        return if a.norm() >= r { vec![(a, b)] } else { vec![] };
    }
    let sq = disc.sqrt();
    let t0 = ((-bb - sq) / (2.0 * aa)).clamp(0.0, 1.0);
    let t1 = ((-bb + sq) / (2.0 * aa)).clamp(0.0, 1.0);
    let mut out = Vec::new();
    if t0 > 1e-9 {
        out.push((a, a + d * t0));
    }
    if t1 < 1.0 - 1e-9 {
        out.push((a + d * t1, b));
    }
    out
}

/// Strictly convex hull (counterclockwise, collinear middles removed) of a
/// point cloud given as complex numbers.
pub(crate) fn convex_hull(pts: &[CPoint]) -> Vec<CPoint> {
    let mut p: Vec<CPoint> = pts.to_vec();
    p.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    p.dedup_by(|a, b| (*a - *b).norm() == 0.0);
    if p.len() <= 2 {
        return p;
    }
    let build = |iter: &mut dyn Iterator<Item = CPoint>| -> Vec<CPoint> {
        let mut chain: Vec<CPoint> = Vec::new();
        for pt in iter {
            while chain.len() >= 2
                && cross(
                    chain[chain.len() - 1] - chain[chain.len() - 2],
                    pt - chain[chain.len() - 2],
                ) <= 0.0
            {
                chain.pop();
            }
            chain.push(pt);
        }
        chain
    };
    let lower = build(&mut p.iter().copied());
    let upper = build(&mut p.iter().rev().copied());
    let mut hull = lower;
    hull.extend(upper.into_iter().skip(1));
    hull.pop();
    if hull.len() < 2 {
        // fully collinear input collapses to its extremes
        return vec![p[0], *p.last().unwrap()];
    }
    hull
}

/// Minkowski sum of two convex counterclockwise polygons (1- and 2-point
/// degenerate "polygons" allowed) by the rotating edge merge.
pub(crate) fn minkowski_convex(p: &[CPoint], q: &[CPoint]) -> Vec<CPoint> {
    if p.is_empty() {
        return q.to_vec();
    }
    if q.is_empty() {
        return p.to_vec();
    }
    if p.len() == 1 {
        return q.iter().map(|z| z + p[0]).collect();
    }
    if q.len() == 1 {
        return p.iter().map(|z| z + q[0]).collect();
    }
    let rotate_to_bottom = |poly: &[CPoint]| -> Vec<CPoint> {
        let mut k = 0;
        for i in 1..poly.len() {
            if poly[i].im < poly[k].im || (poly[i].im == poly[k].im && poly[i].re < poly[k].re) {
                k = i;
            }
        }
        let mut out = Vec::with_capacity(poly.len());
        out.extend_from_slice(&poly[k..]);
        out.extend_from_slice(&poly[..k]);
        out
    };
    let pp = rotate_to_bottom(p);
    let qq = rotate_to_bottom(q);
    let ang = |e: CPoint| -> f64 {
        let a = e.im.atan2(e.re);
        if a < -1e-15 {
            a + 2.0 * std::f64::consts::PI
        } else {
            a.max(0.0)
        }
    };
    let edges = |poly: &[CPoint]| -> Vec<CPoint> {
        (0..poly.len())
            .map(|i| poly[(i + 1) % poly.len()] - poly[i])
            .collect()
    };
    let (ep, eq) = (edges(&pp), edges(&qq));
    let mut out = vec![pp[0] + qq[0]];
    let (mut i, mut j) = (0usize, 0usize);
    while i < ep.len() || j < eq.len() {
        let step = if i >= ep.len() {
            let e = eq[j];
            j += 1;
            e
        } else if j >= eq.len() {
            let e = ep[i];
            i += 1;
            e
        } else {
            let (ai, aj) = (ang(ep[i]), ang(eq[j]));
            if (ai - aj).abs() < 1e-12 {
                let e = ep[i] + eq[j];
                i += 1;
                j += 1;
                e
            } else if ai < aj {
                let e = ep[i];
                i += 1;
                e
            } else {
                let e = eq[j];
                j += 1;
                e
            }
        };
        let last = *out.last().unwrap();
        out.push(last + step);
    }
    out.pop(); // closes back onto the start
    out
}

/// Outer cover of the Minkowski sum `{a + b}`.
///
/// At least one operand must carry the chord property for the sum rule of the
/// SRG calculus to be sound, and both must be bounded. The cover computed is
/// `hull(A) + hull(B)`, the tight limit of disk-cover sums, exact whenever
/// both operands are convex (disks, points, segments). A single real point
/// bypasses the hulls: it translates the other operand, holes and all.
pub fn region_sum(
    a: &Region,
    pa: &PropertyReport,
    b: &Region,
    pb: &PropertyReport,
) -> Result<Region> {
    if a.is_unbounded() || b.is_unbounded() {
        return Err(SrgError::UnboundedOperand);
    }
    if !pa.chord && !pb.chord {
        return Err(SrgError::ChordPropertyRequired);
    }
    // adding a single real point translates the other operand exactly,
    // holes and all, so skip the hull cover
    let singleton = |r: &Region| -> Option<f64> {
        let mut it = r.vertices();
        match (it.next(), it.next()) {
            (Some(v), None) if v.im == 0.0 => Some(v.re),
            _ => None,
        }
    };
    if let Some(c) = singleton(b) {
        return Ok(a.affine(1.0, c)?.widen_tol(a.tol() + b.tol()));
    }
    if let Some(c) = singleton(a) {
        return Ok(b.affine(1.0, c)?.widen_tol(a.tol() + b.tol()));
    }
    if let (ShapeHint::Disk { alpha: a1, beta: b1 }, ShapeHint::Disk { alpha: a2, beta: b2 }) =
        (a.shape(), b.shape())
    {
        return disk_region(a1 + a2, b1 + b2, (a.tol() + b.tol()).max(1e-12));
    }
    let ha = convex_hull(&a.vertices().collect::<Vec<_>>());
    let hb = convex_hull(&b.vertices().collect::<Vec<_>>());
    let sum = minkowski_convex(&ha, &hb);
    Region::new(vec![sum], false, a.tol() + b.tol())
}

enum LogPolar {
    /// Angular extent covers a full turn (or the origin is enclosed):
    /// only the modulus range survives. `lmin = None` marks modulus down to 0.
    Full { lmin: Option<f64>, lmax: f64 },
    /// Convex hull in (ln r, unwrapped theta) coordinates.
    Hull(Vec<CPoint>),
}

fn log_polar_hull(r: &Region) -> LogPolar {
    let origin = CPoint::new(0.0, 0.0);
    let mut lmin = f64::INFINITY;
    let mut lmax = f64::NEG_INFINITY;
    for v in r.vertices() {
        lmin = lmin.min(v.norm().ln());
        lmax = lmax.max(v.norm().ln());
    }
    if r.contains(origin, 0.0) == super::Containment::Inside {
        return LogPolar::Full {
            lmin: None,
            lmax,
        };
    }
    let mut scale: f64 = 1.0;
    for v in r.vertices() {
        scale = scale.max(v.norm());
    }
    let mut pts: Vec<CPoint> = Vec::new();
    for lp in r.loops() {
        if lp.len() >= 3 && loop_winding(lp, origin, scale) != 0 {
            return LogPolar::Full {
                lmin: Some(lmin),
                lmax,
            };
        }
        let mut theta = lp[0].im.atan2(lp[0].re);
        let mut prev = lp[0];
        pts.push(CPoint::new(prev.norm().ln(), theta));
        for &v in lp.iter().skip(1) {
            let dth = (v / prev).arg();
            theta += dth;
            pts.push(CPoint::new(v.norm().ln(), theta));
            prev = v;
        }
    }
    let (mut tmin, mut tmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &pts {
        tmin = tmin.min(p.im);
        tmax = tmax.max(p.im);
    }
    if tmax - tmin >= 2.0 * std::f64::consts::PI {
        return LogPolar::Full {
            lmin: Some(lmin),
            lmax,
        };
    }
    LogPolar::Hull(convex_hull(&pts))
}

fn annulus_region(rmin: f64, rmax: f64, tol: f64) -> Result<Region> {
    let n = 256usize;
    let ring = |radius: f64, ccw: bool| -> Vec<CPoint> {
        (0..n)
            .map(|k| {
                let sgn = if ccw { 1.0 } else { -1.0 };
                let t = sgn * 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                CPoint::new(radius * t.cos(), radius * t.sin())
            })
            .collect()
    };
    if rmin <= 1e-12 * rmax {
        return disk_region(-rmax, rmax, tol);
    }
    Region::new(vec![ring(rmax, true), ring(rmin, false)], false, tol)
}

/// Outer cover of the set product `{a * b}`.
///
/// Requires an arc property on at least one operand (product rule
/// hypothesis), bounded operands, and the origin off both boundaries. The
/// cover is computed in log-polar coordinates, where multiplication is a
/// Minkowski sum of (ln r, theta) hulls; when the angular extent wraps a full
/// turn the cover falls back to the exact modulus annulus.
pub fn region_product(
    a: &Region,
    pa: &PropertyReport,
    b: &Region,
    pb: &PropertyReport,
) -> Result<Region> {
    if a.is_unbounded() || b.is_unbounded() {
        return Err(SrgError::UnboundedOperand);
    }
    if !(pa.arc_left || pa.arc_right || pb.arc_left || pb.arc_right) {
        return Err(SrgError::ArcPropertyRequired);
    }
    let origin = CPoint::new(0.0, 0.0);
    for (name, r) in [("first", a), ("second", b)] {
        if !r.loops().is_empty() && r.boundary_distance(origin) <= r.tol().max(1e-12) {
            return Err(SrgError::InvalidInput {
                context: format!(
                    "{name} product operand has the origin on its boundary; \
                     the log-polar cover is undefined there"
                ),
            });
        }
    }
    let (la, lb) = (log_polar_hull(a), log_polar_hull(b));
    let rel = |r: &Region| {
        if r.loops().is_empty() {
            0.0
        } else {
            r.tol() / r.boundary_distance(origin).max(1e-300)
        }
    };
    let rel_err = rel(a) + rel(b) + 1e-4;
    match (la, lb) {
        (LogPolar::Hull(ha), LogPolar::Hull(hb)) => {
            let sum = minkowski_convex(&ha, &hb);
            let (mut tmin, mut tmax) = (f64::INFINITY, f64::NEG_INFINITY);
            let mut lmax = f64::NEG_INFINITY;
            for p in &sum {
                tmin = tmin.min(p.im);
                tmax = tmax.max(p.im);
                lmax = lmax.max(p.re);
            }
            let rmax_out = lmax.exp();
            if tmax - tmin >= 2.0 * std::f64::consts::PI {
                let lmin_out = sum.iter().map(|p| p.re).fold(f64::INFINITY, f64::min);
                return annulus_region(lmin_out.exp(), rmax_out, rmax_out * rel_err);
            }
            let mut loop_pts: Vec<CPoint> = Vec::new();
            let n = sum.len();
            for i in 0..n {
                let (p, q) = (sum[i], sum[(i + 1) % n]);
                let steps = (((q - p).re.abs().max((q - p).im.abs())) / 0.02).ceil() as usize;
                let steps = steps.max(1);
                for k in 0..steps {
                    let t = k as f64 / steps as f64;
                    let w = p + (q - p) * t;
                    loop_pts.push(CPoint::new(w.im.cos(), w.im.sin()) * w.re.exp());
                }
            }
            if loop_pts.len() < 3 {
                // both operands degenerate to points or radial slits
                let mut region_loops: Vec<Vec<CPoint>> = Vec::new();
                for w in &sum {
                    let z = CPoint::new(w.im.cos(), w.im.sin()) * w.re.exp();
                    region_loops.push(vec![z]);
                    if z.im.abs() > 1e-12 * z.norm() {
                        region_loops.push(vec![z.conj()]);
                    }
                }
                if sum.len() == 2 {
                    // a slit in log-polar maps to a short curve; keep its chord
                    let z0 = CPoint::new(sum[0].im.cos(), sum[0].im.sin()) * sum[0].re.exp();
                    let z1 = CPoint::new(sum[1].im.cos(), sum[1].im.sin()) * sum[1].re.exp();
                    region_loops = vec![vec![z0, z1]];
                    if z0.im.abs() > 1e-12 * z0.norm() || z1.im.abs() > 1e-12 * z1.norm() {
                        region_loops.push(vec![z0.conj(), z1.conj()]);
                    }
                }
                return Region::new(region_loops, false, rmax_out * (rel_err + 2e-4));
            }
            Region::new(vec![loop_pts], false, rmax_out * rel_err)
        }
        (la, lb) => {
            let bounds = |l: &LogPolar, r: &Region| -> (Option<f64>, f64) {
                match l {
                    LogPolar::Full { lmin, lmax } => (*lmin, *lmax),
                    LogPolar::Hull(h) => {
                        let _ = r;
                        let lmin = h.iter().map(|p| p.re).fold(f64::INFINITY, f64::min);
                        let lmax = h.iter().map(|p| p.re).fold(f64::NEG_INFINITY, f64::max);
                        (Some(lmin), lmax)
                    }
                }
            };
            let (lmina, lmaxa) = bounds(&la, a);
            let (lminb, lmaxb) = bounds(&lb, b);
            let lmax = lmaxa + lmaxb;
            let rmax_out = lmax.exp();
            match (lmina, lminb) {
                (Some(x), Some(y)) => {
                    annulus_region((x + y).exp(), rmax_out, rmax_out * rel_err)
                }
                _ => disk_region(-rmax_out, rmax_out, rmax_out * rel_err),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::{real_segment, region_point, Containment};
    use approx::assert_relative_eq;

    fn report(chord: bool, arc: bool) -> PropertyReport {
        PropertyReport {
            chord,
            arc_left: arc,
            arc_right: arc,
            samples_used: 0,
            confidence: crate::region::props::Confidence::VerifiedAnalytic,
        }
    }

    #[test]
    fn invert_disk_maps_to_disk() {
        let d = disk_region(1.0, 2.0, 1e-7).unwrap();
        let inv = region_invert(&d).unwrap();
        assert!(inv.contains(CPoint::new(0.75, 0.0), 1e-3).is_member());
        assert!(inv
            .contains(CPoint::new(0.5, 0.0), 1e-3)
            .is_member());
        assert!(inv.contains(CPoint::new(1.0, 0.0), 1e-3).is_member());
        assert!(!inv.contains(CPoint::new(0.3, 0.0), 1e-3).is_member());
        assert!(!inv.contains(CPoint::new(1.3, 0.0), 1e-3).is_member());
        match inv.shape() {
            ShapeHint::Disk { alpha, beta } => {
                assert_relative_eq!(alpha, 0.5);
                assert_relative_eq!(beta, 1.0);
            }
            _ => panic!("disk hint expected"),
        }
    }

    #[test]
    fn invert_rejects_boundary_through_origin() {
        let d = disk_region(0.0, 1.0, 1e-7).unwrap();
        assert!(matches!(
            region_invert(&d),
            Err(SrgError::InversionSingularAtZero { .. })
        ));
    }

    #[test]
    fn invert_disk_around_origin_is_unbounded() {
        let d = disk_region(-1.0, 1.0, 1e-7).unwrap();
        let inv = region_invert(&d).unwrap();
        assert!(inv.is_unbounded());
        // image is |w| >= 1: origin excluded, far points included
        assert_eq!(inv.contains(CPoint::new(0.2, 0.0), 1e-3), Containment::Outside);
        assert!(inv.contains(CPoint::new(3.0, 1.0), 1e-3).is_member());
    }

    #[test]
    fn involution_recovers_disk() {
        let d = disk_region(1.0, 3.0, 1e-7).unwrap();
        let back = region_invert(&region_invert(&d).unwrap()).unwrap();
        for &(x, y, want) in &[
            (2.0, 0.0, true),
            (1.1, 0.2, true),
            (0.8, 0.0, false),
            (3.3, 0.0, false),
            (2.0, 1.2, false),
        ] {
            assert_eq!(
                back.contains(CPoint::new(x, y), 5e-3).is_member(),
                want,
                "at ({x},{y})"
            );
        }
    }

    #[test]
    fn puncture_removes_origin_neighbourhood() {
        let d = disk_region(-1.0, 1.0, 1e-6).unwrap();
        let p = puncture_origin(&d, 0.1).unwrap();
        assert_eq!(p.contains(CPoint::new(0.0, 0.0), 1e-4), Containment::Outside);
        assert_eq!(p.contains(CPoint::new(0.05, 0.0), 1e-4), Containment::Outside);
        assert!(p.contains(CPoint::new(0.5, 0.0), 1e-4).is_member());
        assert_eq!(p.loops().len(), 2);
        let far = puncture_origin(&disk_region(2.0, 3.0, 1e-6).unwrap(), 0.1).unwrap();
        assert_eq!(far.loops().len(), 1);
    }

    #[test]
    fn sum_of_disks_is_exact() {
        let a = disk_region(1.0, 2.0, 1e-9).unwrap();
        let b = region_point(CPoint::new(3.0, 0.0)).unwrap();
        let pb = check_report_for_point();
        let s = region_sum(&a, &report(true, false), &b, &pb).unwrap();
        match s.shape() {
            ShapeHint::Disk { alpha, beta } => {
                assert_relative_eq!(alpha, 4.0);
                assert_relative_eq!(beta, 5.0);
            }
            _ => panic!("disk hint expected"),
        }
        let c = disk_region(0.0, 1.0, 1e-9).unwrap();
        let s2 = region_sum(&c, &report(true, false), &c, &report(true, false)).unwrap();
        assert!(s2.contains(CPoint::new(2.0, 0.0), 1e-4).is_member());
        assert!(s2.contains(CPoint::new(0.0, 0.0), 1e-4).is_member());
        assert!(!s2.contains(CPoint::new(2.2, 0.0), 1e-4).is_member());
    }

    fn check_report_for_point() -> PropertyReport {
        // single points trivially satisfy no chord requirement of their own
        report(true, true)
    }

    #[test]
    fn sum_requires_chord_property() {
        let a = disk_region(0.0, 1.0, 1e-9).unwrap();
        let err = region_sum(&a, &report(false, false), &a, &report(false, false));
        assert!(matches!(err, Err(SrgError::ChordPropertyRequired)));
    }

    #[test]
    fn sum_of_segments_fills_parallelogram() {
        let a = real_segment(0.0, 1.0).unwrap();
        let b = Region::new(
            vec![vec![CPoint::new(0.0, -1.0), CPoint::new(0.0, 1.0)]],
            false,
            0.0,
        )
        .unwrap();
        let s = region_sum(&a, &report(true, false), &b, &report(true, false)).unwrap();
        assert!(s.contains(CPoint::new(0.5, 0.5), 1e-6).is_member());
        assert!(s.contains(CPoint::new(0.0, -1.0), 1e-6).is_member());
        assert!(!s.contains(CPoint::new(1.5, 0.0), 1e-6).is_member());
    }

    #[test]
    fn product_of_disks_covers_interval() {
        let d = disk_region(1.0, 2.0, 1e-7).unwrap();
        let p = region_product(&d, &report(true, true), &d, &report(true, true)).unwrap();
        for x in [1.0, 1.5, 2.5, 3.5, 4.0] {
            assert!(
                p.contains(CPoint::new(x, 0.0), 1e-2).is_member(),
                "missing {x}"
            );
        }
        assert!(!p.contains(CPoint::new(4.6, 0.0), 1e-2).is_member());
        assert!(!p.contains(CPoint::new(0.7, 0.0), 1e-2).is_member());
        // stays within the modulus annulus [1, 4]
        assert!(!p.contains(CPoint::new(0.0, 4.5), 1e-2).is_member());
    }

    #[test]
    fn product_by_real_point_scales() {
        let d = disk_region(1.0, 2.0, 1e-7).unwrap();
        let two = region_point(CPoint::new(2.0, 0.0)).unwrap();
        let p = region_product(&d, &report(true, true), &two, &report(true, true)).unwrap();
        assert!(p.contains(CPoint::new(2.0, 0.0), 2e-3).is_member());
        assert!(p.contains(CPoint::new(4.0, 0.0), 2e-3).is_member());
        assert!(p.contains(CPoint::new(3.0, 0.4), 2e-2).is_member());
        assert!(!p.contains(CPoint::new(1.5, 0.0), 2e-3).is_member());
    }

    #[test]
    fn product_of_imaginary_points() {
        let j = region_point(CPoint::new(0.0, 1.0)).unwrap();
        let p = region_product(&j, &report(true, true), &j, &report(true, true)).unwrap();
        assert!(p.contains(CPoint::new(-1.0, 0.0), 1e-6).is_member());
    }

    #[test]
    fn product_requires_arc_property() {
        let d = disk_region(1.0, 2.0, 1e-7).unwrap();
        let err = region_product(&d, &report(true, false), &d, &report(true, false));
        assert!(matches!(err, Err(SrgError::ArcPropertyRequired)));
    }

    #[test]
    fn annulus_product_clamps_modulus() {
        let outer: Vec<CPoint> = (0..256)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / 256.0;
                CPoint::new(2.0 * t.cos(), 2.0 * t.sin())
            })
            .collect();
        let inner: Vec<CPoint> = (0..256)
            .map(|k| {
                let t = -2.0 * std::f64::consts::PI * k as f64 / 256.0;
                CPoint::new(t.cos(), t.sin())
            })
            .collect();
        let ann = Region::new(vec![outer, inner], false, 1e-6).unwrap();
        let d = disk_region(1.0, 2.0, 1e-7).unwrap();
        let p = region_product(&ann, &report(false, true), &d, &report(true, true)).unwrap();
        assert!(p.contains(CPoint::new(0.0, 2.0), 1e-2).is_member());
        assert!(p.contains(CPoint::new(-3.0, 0.0), 1e-2).is_member());
        assert!(!p.contains(CPoint::new(0.5, 0.0), 1e-2).is_member());
        assert!(!p.contains(CPoint::new(8.5, 0.0), 1e-2).is_member());
    }
}
