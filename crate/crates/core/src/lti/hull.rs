//! Hull of a point set under the geodesic geometry of the upper half-plane,
//! where admissible boundary arcs are circles centered on the real axis.
//!
//! Working coordinates are `(x, q) = (Re z, |z|^2)`. Every circle centered on
//! the real axis satisfies `|z|^2 = 2 c x + (rho^2 - c^2)`, a straight line in
//! `(x, q)`, and vertical lines stay vertical, so the hull closed under such
//! arcs is exactly the Euclidean convex hull of the `(x, q)` image, clipped
//! to the realizable half `q >= x^2` (equality on the real axis). This also
//! matches the mixture interpretation of the gain/phase cloud of an LTI
//! operator: achievable (Re, modulus-squared) pairs are expectations over
//! frequency, and expectations fill the convex hull.

use crate::error::{Result, SrgError};
use crate::region::{convex_hull, cross, real_segment, trace_region, PiecewiseInput};
use crate::{CPoint, Region};

/// Lift from `(x, q)` back to the closed upper half-plane.
fn lift(p: CPoint) -> CPoint {
    CPoint::new(p.re, (p.im - p.re * p.re).max(0.0).sqrt())
}

fn lift_edge(a: CPoint, b: CPoint, tol: f64, out: &mut Vec<CPoint>, depth: u32) {
    let m = (a + b) * 0.5;
    let sag = (lift(m) - (lift(a) + lift(b)) * 0.5).norm();
    if depth < 30 && sag > 0.25 * tol && (b - a).norm() > 1e-12 * (1.0 + a.norm() + b.norm()) {
        lift_edge(a, m, tol, out, depth + 1);
        lift_edge(m, b, tol, out, depth + 1);
    } else {
        out.push(lift(a));
    }
}

/// Interval of `t` in [0, 1] where edge `a + t (b - a)` stays on or above the
/// parabola `q = x^2`. The gap function is concave in `t`, so the answer is a
/// single interval (possibly empty).
fn above_parabola_interval(a: CPoint, b: CPoint) -> Option<(f64, f64)> {
    let dx = b.re - a.re;
    let c0 = a.im - a.re * a.re;
    let c1 = (b.im - a.im) - 2.0 * a.re * dx;
    let c2 = -dx * dx;
    let scale = c0.abs().max(c1.abs()).max(c2.abs()).max(1e-300);
    if c2.abs() <= 1e-14 * scale {
        if c1.abs() <= 1e-14 * scale {
            return if c0 >= 0.0 { Some((0.0, 1.0)) } else { None };
        }
        let r = -c0 / c1;
        let (lo, hi) = if c1 > 0.0 { (r, f64::INFINITY) } else { (f64::NEG_INFINITY, r) };
        let (lo, hi) = (lo.max(0.0), hi.min(1.0));
        return if hi > lo { Some((lo, hi)) } else { None };
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc <= 0.0 {
        return None; // concave and never touching zero means always below
    }
    let sq = disc.sqrt();
    // c2 < 0: ordered roots bracket the nonnegative stretch
    let r1 = (-c1 + sq) / (2.0 * c2);
    let r2 = (-c1 - sq) / (2.0 * c2);
    let (lo, hi) = (r1.min(r2).max(0.0), r1.max(r2).min(1.0));
    if hi > lo {
        Some((lo, hi))
    } else {
        None
    }
}

/// Smallest set containing `points` that is closed under connecting arcs
/// centered on the real axis, mirrored across the real axis and inflated
/// outward by `tol`.
///
/// Points are folded into the closed upper half-plane first. An all-real
/// input degenerates to the bare real segment between its extremes.
pub fn h_convex_hull(points: &[CPoint], tol: f64) -> Result<Region> {
    if points.is_empty() {
        return Err(SrgError::EmptyInput {
            context: "hull of an empty point set".into(),
        });
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(SrgError::InvalidInput {
            context: format!("hull inflation must be positive, got {tol}"),
        });
    }
    let mut scale: f64 = 1.0;
    for z in points {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(SrgError::NonFiniteInput {
                context: "hull input point".into(),
            });
        }
        scale = scale.max(z.norm());
    }
    let folded: Vec<CPoint> = points.iter().map(|z| CPoint::new(z.re, z.im.abs())).collect();
    if folded.iter().all(|z| z.im <= 1e-12 * scale) {
        let lo = folded.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        let hi = folded.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        return real_segment(lo, hi);
    }
    let xq: Vec<CPoint> = folded
        .iter()
        .map(|z| CPoint::new(z.re, z.norm_sqr()))
        .collect();
    let base = convex_hull(&xq);
    // inflate in (x, q) so that the z-space offset is about tol in every
    // direction: dq = tol * d(q)/d|z| = tol * (2 |z| + tol)
    let mut cloud = Vec::with_capacity(base.len() * 8);
    const DIAG: f64 = std::f64::consts::FRAC_1_SQRT_2;
    for v in &base {
        let dq = tol * (2.0 * v.im.max(0.0).sqrt() + tol);
        for (ox, oq) in [
            (tol, 0.0),
            (-tol, 0.0),
            (0.0, dq),
            (0.0, -dq),
            (tol * DIAG, dq * DIAG),
            (tol * DIAG, -dq * DIAG),
            (-tol * DIAG, dq * DIAG),
            (-tol * DIAG, -dq * DIAG),
        ] {
            cloud.push(CPoint::new(v.re + ox, v.im + oq));
        }
    }
    let hull2 = convex_hull(&cloud);
    debug_assert!(hull2.len() >= 3);

    // boundary chains above the parabola; dipped stretches have no preimage
    // and the mirrored region heals across the real axis there
    let n = hull2.len();
    let mut chains: Vec<(Vec<CPoint>, bool)> = Vec::new(); // (chain, closed)
    let mut cur: Vec<CPoint> = Vec::new();
    let join_snap = 1e-12 * (1.0 + scale * scale);
    for i in 0..n {
        let (a, b) = (hull2[i], hull2[(i + 1) % n]);
        match above_parabola_interval(a, b) {
            None => {
                if !cur.is_empty() {
                    chains.push((std::mem::take(&mut cur), false));
                }
            }
            Some((t0, t1)) => {
                let p0 = a + (b - a) * t0;
                let p1 = a + (b - a) * t1;
                if let Some(last) = cur.last() {
                    if (p0 - last).norm() > join_snap {
                        chains.push((std::mem::take(&mut cur), false));
                    }
                }
                if cur.is_empty() {
                    cur.push(p0);
                }
                cur.push(p1);
                if t1 < 1.0 - 1e-12 {
                    chains.push((std::mem::take(&mut cur), false));
                }
            }
        }
    }
    if !cur.is_empty() {
        // the walk wrapped: merge with the first chain when they connect
        if let Some(first) = chains.first_mut() {
            if (first.0[0] - *cur.last().unwrap()).norm() <= join_snap {
                cur.pop();
                cur.extend(std::mem::take(&mut first.0));
                *first = (cur, false);
            } else {
                chains.push((cur, false));
            }
        } else {
            // never dipped at all: one closed loop around the whole hull
            chains.push((cur, true));
        }
    }

    let mut pieces: Vec<PiecewiseInput> = Vec::new();
    for (chain, closed) in &chains {
        let mut lifted: Vec<CPoint> = Vec::new();
        for w in chain.windows(2) {
            lift_edge(w[0], w[1], tol, &mut lifted, 0);
        }
        lifted.push(lift(*chain.last().unwrap()));
        if !*closed {
            // open chains start and end at parabola crossings; pin those
            // endpoints to the real axis so each meets its mirror exactly
            for end in [0, lifted.len() - 1] {
                let z = lifted[end];
                if z.im.abs() <= 1e-5 * (1.0 + z.re.abs()) {
                    lifted[end] = CPoint::new(z.re, 0.0);
                }
            }
        }
        let mirrored: Vec<CPoint> = lifted.iter().map(|z| z.conj()).collect();
        if *closed {
            pieces.push(PiecewiseInput::Closed(lifted));
            pieces.push(PiecewiseInput::Closed(mirrored));
        } else {
            pieces.push(PiecewiseInput::Chain(lifted));
            pieces.push(PiecewiseInput::Chain(mirrored));
        }
    }

    let member = move |z: CPoint| {
        let p = CPoint::new(z.re, z.norm_sqr());
        for i in 0..hull2.len() {
            let a = hull2[i];
            let b = hull2[(i + 1) % hull2.len()];
            let e = b - a;
            if cross(e, p - a) < -1e-12 * e.norm() * (1.0 + p.norm()) {
                return false;
            }
        }
        true
    };
    trace_region(pieces, &member, 1.25 * tol)
}
