//! Adaptive sampling of the frequency response along the right half-plane
//! boundary contour, winding numbers around query points, and the resulting
//! closed-loop stability count.

use super::{pole_classification, tf_eval, tf_poles, TransferFunction};
use crate::error::{Result, SrgError};
use crate::region::point_segment_distance;
use crate::CPoint;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct NyquistOpts {
    /// Target gap between adjacent samples (chordal metric, see below).
    pub refinement_tol: f64,
    /// Hard cap on the number of stored samples.
    pub max_samples: usize,
    /// Radius of the right-half-plane detours around imaginary-axis poles.
    pub indent_eps: f64,
}

impl Default for NyquistOpts {
    fn default() -> Self {
        NyquistOpts {
            refinement_tol: 1e-3,
            max_samples: 60_000,
            indent_eps: 1e-6,
        }
    }
}

/// Sampled image of the contour, ordered by a parameter that runs monotonically
/// with the imaginary part of the contour point (detour arcs included).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NyquistCurve {
    /// `(parameter, image)`, parameter from `-R` to `R`.
    pub samples: Vec<(f64, CPoint)>,
    /// Image of the far arc, the high-frequency limit of the response.
    pub closure_point: CPoint,
    pub refinement_tol: f64,
    /// True when imaginary-axis poles forced detours; verdicts relying on
    /// this carry a caveat, since the limiting behaviour is delicate.
    pub indented: bool,
}

impl NyquistCurve {
    /// Closed polygon: samples swept from `-R` to `R`, then the closure point
    /// standing in for the whole far arc.
    pub fn closed_polyline(&self) -> Vec<CPoint> {
        let mut pts: Vec<CPoint> = self.samples.iter().map(|&(_, z)| z).collect();
        pts.push(self.closure_point);
        pts
    }

    pub fn max_modulus(&self) -> f64 {
        self.samples
            .iter()
            .map(|&(_, z)| z.norm())
            .fold(self.closure_point.norm(), f64::max)
    }
}

/// Distance on the Riemann sphere; bounded even across pole blowups.
fn chordal(a: CPoint, b: CPoint) -> f64 {
    (a - b).norm() / ((1.0 + a.norm_sqr()) * (1.0 + b.norm_sqr())).sqrt()
}

/// Contour point for parameter `t >= 0`: `jt`, except inside a detour
/// interval around an imaginary-axis pole at `j w`, where the contour walks
/// the right semicircle `jw + eps e^{j theta}` (parameter `w + eps sin theta`
/// keeps the sweep monotone).
fn contour_point(t: f64, detours: &[f64], eps: f64) -> CPoint {
    for &w in detours {
        if (t - w).abs() <= eps {
            let sin_th = ((t - w) / eps).clamp(-1.0, 1.0);
            let cos_th = (1.0 - sin_th * sin_th).sqrt();
            return CPoint::new(eps * cos_th, w + eps * sin_th);
        }
    }
    CPoint::new(0.0, t)
}

/// Adaptively samples the Nyquist curve of `tf`.
///
/// Sampling starts from a log-spaced grid, bisects any adjacent pair whose
/// images are farther apart than `refinement_tol` in the metric
/// `min(euclidean, chordal)`, and grows the truncation radius until the
/// entire far arc stays within tolerance of the closure point. Low-modulus
/// stretches therefore meet the tolerance euclideanly, while detour blowups
/// only need to resolve on the sphere and stay cheap.
pub fn nyquist_curve(tf: &TransferFunction, opts: &NyquistOpts) -> Result<NyquistCurve> {
    if !(opts.refinement_tol > 0.0 && opts.refinement_tol.is_finite()) {
        return Err(SrgError::InvalidInput {
            context: format!("refinement tolerance must be positive, got {}", opts.refinement_tol),
        });
    }
    let poles = tf_poles(tf)?;
    let (_, on_axis) = pole_classification(&poles);
    let eps = opts.indent_eps;
    let mut detours: Vec<f64> = on_axis.iter().map(|p| p.im).filter(|&w| w >= 0.0).collect();
    detours.sort_by(f64::total_cmp);
    for pair in detours.windows(2) {
        if pair[1] - pair[0] <= 2.0 * eps {
            return Err(SrgError::InvalidInput {
                context: format!(
                    "imaginary-axis poles at {} and {} are closer than two detour radii",
                    pair[0], pair[1]
                ),
            });
        }
    }
    let indented = !on_axis.is_empty();

    let mut scale: f64 = 1.0;
    for r in &poles {
        scale = scale.max(r.norm());
    }
    // zero magnitudes matter for where the response varies as well
    if !tf.num.is_zero() {
        if let Ok(zs) = super::poly_roots(&tf.num) {
            for z in zs {
                scale = scale.max(z.norm());
            }
        }
    }
    let closure = tf.closure_value();

    // grow the truncation radius until the far arc collapses to the closure
    let mut big_r = 100.0 * scale;
    let far_ok = |r: f64| -> bool {
        for &phi in &[
            -1.55, -1.2, -0.7, 0.0, 0.7, 1.2, 1.55,
        ] {
            let s = CPoint::new(r * f64::cos(phi), r * f64::sin(phi));
            match tf_eval(tf, s) {
                Ok(v) => {
                    if chordal(v, closure) > opts.refinement_tol {
                        return false;
                    }
                }
                Err(_) => return false,
            }
        }
        true
    };
    let mut grow = 0;
    while !far_ok(big_r) && grow < 9 {
        big_r *= 10.0;
        grow += 1;
    }

    // seed grid on t in [0, R]: zero, log-spaced interior, detour edges
    let mut ts: Vec<f64> = vec![0.0];
    let lo = (1e-4 * scale).min(big_r / 1e6);
    let n_seed = 96;
    for k in 0..=n_seed {
        let f = k as f64 / n_seed as f64;
        ts.push(lo * (big_r / lo).powf(f));
    }
    for &w in &detours {
        for t in [w - eps, w - 0.3 * eps, w, w + 0.3 * eps, w + eps] {
            if t >= 0.0 && t <= big_r {
                ts.push(t);
            }
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|a, b| (*a - *b) == 0.0);

    let eval_at = |t: f64| -> Result<CPoint> { tf_eval(tf, contour_point(t, &detours, eps)) };
    let mut samples: Vec<(f64, CPoint)> = Vec::with_capacity(ts.len() * 2);
    for &t in &ts {
        samples.push((t, eval_at(t)?));
    }

    // bisect worst gaps until the metric target holds everywhere
    let gap = |a: CPoint, b: CPoint| -> f64 { (a - b).norm().min(chordal(a, b)) };
    let mut i = 0usize;
    while i + 1 < samples.len() {
        let (t0, z0) = samples[i];
        let (t1, z1) = samples[i + 1];
        let wide = gap(z0, z1) > opts.refinement_tol;
        let splittable = (t1 - t0) > 1e-12 * (1.0 + t1.abs());
        if wide && splittable {
            if samples.len() >= opts.max_samples {
                let worst = samples
                    .windows(2)
                    .map(|w| gap(w[0].1, w[1].1))
                    .fold(0.0, f64::max);
                return Err(SrgError::MaxSamplesExceeded {
                    max: opts.max_samples,
                    target: opts.refinement_tol,
                    worst,
                });
            }
            let tm = 0.5 * (t0 + t1);
            let zm = eval_at(tm)?;
            samples.insert(i + 1, (tm, zm));
        } else {
            i += 1;
        }
    }

    // mirror across the real axis for the negative sweep
    let mut full: Vec<(f64, CPoint)> = samples
        .iter()
        .rev()
        .filter(|&&(t, _)| t > 0.0)
        .map(|&(t, z)| (-t, z.conj()))
        .collect();
    full.extend(samples.iter().copied());
    Ok(NyquistCurve {
        samples: full,
        closure_point: closure,
        refinement_tol: opts.refinement_tol,
        indented,
    })
}

/// Net clockwise encirclements of `z` by the closed curve.
///
/// Accumulates the argument increments of `sample - z` around the closed
/// polygon. A residue above a tenth of a turn means the sampling cannot
/// support the answer; a query within `refinement_tol` of the polygon is
/// ill-posed.
pub fn winding_number(curve: &NyquistCurve, z: CPoint) -> Result<i64> {
    let pts = curve.closed_polyline();
    let tol = curve.refinement_tol;
    let n = pts.len();
    for i in 0..n {
        if point_segment_distance(z, pts[i], pts[(i + 1) % n]) <= tol {
            return Err(SrgError::PointOnContour { tol });
        }
    }
    let mut total = 0.0f64;
    let mut prev = pts[n - 1] - z;
    for &p in &pts {
        let cur = p - z;
        total += (cur / prev).arg();
        prev = cur;
    }
    let turns = total / (2.0 * std::f64::consts::PI);
    let nearest = turns.round();
    if (turns - nearest).abs() > 0.1 {
        return Err(SrgError::InsufficientRefinement {
            residue: (turns - nearest).abs() * 2.0 * std::f64::consts::PI,
        });
    }
    Ok(-(nearest as i64))
}

/// Stability count of the unity feedback loop with loop transfer `L`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct NyquistVerdict {
    /// Open-loop poles strictly in the right half-plane.
    pub n_p: usize,
    /// Net clockwise encirclements of -1.
    pub n_n: i64,
    /// Closed-loop right-half-plane poles: `n_n + n_p`.
    pub n_z: i64,
    /// The contour needed detours around imaginary-axis poles.
    pub indented: bool,
}

pub fn nyquist_criterion(ltf: &TransferFunction, opts: &NyquistOpts) -> Result<NyquistVerdict> {
    let poles = tf_poles(ltf)?;
    let (n_p, _) = pole_classification(&poles);
    let curve = nyquist_curve(ltf, opts)?;
    let n_n = winding_number(&curve, CPoint::new(-1.0, 0.0))?;
    Ok(NyquistVerdict {
        n_p,
        n_n,
        n_z: n_n + n_p as i64,
        indented: curve.indented,
    })
}
