//! Structural property checks guarding the sum/product rules and the
//! scaling-homotopy hypothesis.

use super::{Containment, Region, ShapeHint};
use crate::error::{Result, SrgError};
use crate::CPoint;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Confidence {
    /// Established from the shape annotation, no sampling involved.
    VerifiedAnalytic,
    /// Established by finite sampling; a false negative is impossible but a
    /// false positive is (with vanishing probability as samples grow).
    Sampled,
}

/// Which of the set-calculus hypotheses a region was found to satisfy.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PropertyReport {
    /// For every member z, the vertical segment [z, conj(z)] stays inside.
    pub chord: bool,
    /// For every member z, the arc of the origin-centered circle through z
    /// and conj(z) passing through -|z| stays inside.
    pub arc_left: bool,
    /// Same with the arc through +|z|.
    pub arc_right: bool,
    pub samples_used: usize,
    pub confidence: Confidence,
}

/// Samples boundary points of `A` and tests the chord and arc containments.
///
/// Disks with a real diameter short-circuit to analytic verdicts: convexity
/// and symmetry give the chord property, and along any origin-centered circle
/// the distance to the (real) disk center decreases toward the real axis on
/// the side of the center, which settles the arcs.
pub fn check_properties(a: &Region, n_samples: usize) -> Result<PropertyReport> {
    if n_samples == 0 {
        return Err(SrgError::InvalidInput {
            context: "property check needs at least one sample".into(),
        });
    }
    if let ShapeHint::Disk { alpha, beta } = a.shape() {
        let c = (alpha + beta) / 2.0;
        return Ok(PropertyReport {
            chord: true,
            arc_left: c <= 0.0,
            arc_right: c >= 0.0,
            samples_used: 0,
            confidence: Confidence::VerifiedAnalytic,
        });
    }
    let verts: Vec<CPoint> = a.vertices().collect();
    if verts.is_empty() {
        return Err(SrgError::EmptyInput {
            context: "property check on a region with no boundary".into(),
        });
    }
    let stride = (verts.len() / n_samples).max(1);
    let band = (2.0 * a.tol()).max(1e-9);
    let mut chord = true;
    let mut arc_left = true;
    let mut arc_right = true;
    let mut used = 0usize;
    const PTS_PER_PATH: usize = 17;
    for z in verts.iter().step_by(stride) {
        used += 1;
        if z.im != 0.0 && chord {
            for k in 0..=PTS_PER_PATH {
                let t = k as f64 / PTS_PER_PATH as f64;
                let p = CPoint::new(z.re, z.im * (1.0 - 2.0 * t));
                if a.contains(p, band) == Containment::Outside {
                    chord = false;
                    break;
                }
            }
        }
        let r = z.norm();
        if r > 0.0 {
            let phi = z.im.atan2(z.re).abs();
            if arc_right {
                // sweep from +phi down through 0 to -phi
                for k in 0..=PTS_PER_PATH {
                    let t = phi * (1.0 - 2.0 * k as f64 / PTS_PER_PATH as f64);
                    let p = CPoint::new(r * t.cos(), r * t.sin());
                    if a.contains(p, band) == Containment::Outside {
                        arc_right = false;
                        break;
                    }
                }
            }
            if arc_left {
                // sweep from +phi up through pi to -phi (the far side)
                for k in 0..=PTS_PER_PATH {
                    let t = phi + (2.0 * std::f64::consts::PI - 2.0 * phi) * k as f64
                        / PTS_PER_PATH as f64;
                    let p = CPoint::new(r * t.cos(), r * t.sin());
                    if a.contains(p, band) == Containment::Outside {
                        arc_left = false;
                        break;
                    }
                }
            }
        }
        if !chord && !arc_left && !arc_right {
            break;
        }
    }
    Ok(PropertyReport {
        chord,
        arc_left,
        arc_right,
        samples_used: used,
        confidence: Confidence::Sampled,
    })
}

/// True iff `A - kappa` is star-shaped about the origin along `n_rays`
/// sampled directions, which is equivalent to the scaling monotonicity
/// `tau1 * (A - kappa)` contained in `tau2 * (A - kappa)` for
/// `0 <= tau1 <= tau2 <= 1`.
///
/// `kappa` must itself belong to `A` (on the real axis).
pub fn star_monotone(a: &Region, kappa: f64, n_rays: usize) -> Result<bool> {
    if !kappa.is_finite() {
        return Err(SrgError::NonFiniteInput {
            context: "star center".into(),
        });
    }
    if n_rays == 0 {
        return Err(SrgError::InvalidInput {
            context: "star-shape check needs at least one ray".into(),
        });
    }
    let center = CPoint::new(kappa, 0.0);
    let probe_band = a.tol().max(1e-12);
    if !a.contains(center, probe_band).is_member() {
        return Err(SrgError::KappaOutsideRegion { kappa });
    }
    let mut segs: Vec<(CPoint, CPoint)> = Vec::new();
    let mut scale: f64 = 1.0;
    for lp in a.loops() {
        match lp.len() {
            0 => {}
            1 => segs.push((lp[0], lp[0])),
            _ => {
                for i in 0..lp.len() {
                    segs.push((lp[i], lp[(i + 1) % lp.len()]));
                }
            }
        }
        for v in lp {
            scale = scale.max((v - center).norm());
        }
    }
    for ray in 0..n_rays {
        let th = 2.0 * std::f64::consts::PI * ray as f64 / n_rays as f64;
        let dir = CPoint::new(th.cos(), th.sin());
        let mut ts: Vec<f64> = Vec::new();
        for &(p, q) in &segs {
            if let Some(t) = ray_segment_hit(center, dir, p, q) {
                ts.push(t);
            }
        }
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|x, y| (*x - *y).abs() < 1e-12 * scale);
        // membership along the ray must be a prefix: once outside, never back in
        let mut pattern: Vec<bool> = Vec::with_capacity(ts.len() + 1);
        let mut prev = 0.0f64;
        for &t in &ts {
            let mid = (prev + t) / 2.0;
            pattern.push(a.contains(center + dir * mid, probe_band).is_member());
            prev = t;
        }
        let tail_probe = prev + scale.max(1.0);
        let tail = if a.is_unbounded() {
            a.contains(center + dir * tail_probe, probe_band).is_member()
        } else {
            false
        };
        pattern.push(tail);
        let mut seen_outside = false;
        for &m in &pattern {
            if !m {
                seen_outside = true;
            } else if seen_outside {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Parameter `t > 0` where the ray `c + t*dir` crosses segment `[p, q]`.
fn ray_segment_hit(c: CPoint, dir: CPoint, p: CPoint, q: CPoint) -> Option<f64> {
    let s = q - p;
    let den = super::cross(dir, s);
    if den.abs() < 1e-15 * s.norm().max(1.0) {
        // collinear or parallel: report endpoint projections when they lie on the ray
        let proj = |e: CPoint| -> Option<f64> {
            let d = e - c;
            let t = d.re * dir.re + d.im * dir.im;
            if t > 1e-12 && (d - dir * t).norm() <= 1e-12 * t.max(1.0) {
                Some(t)
            } else {
                None
            }
        };
        return proj(p).into_iter().chain(proj(q)).reduce(f64::min);
    }
    let u = super::cross(p - c, dir) / den;
    let t = super::cross(p - c, s) / den;
    if (0.0..=1.0).contains(&u) && t > 1e-12 {
        Some(t)
    } else {
        None
    }
}
