//! Polygonal calculus for closed, conjugate-symmetric subsets of the extended
//! complex plane.
//!
//! A [`Region`] stores a set as a list of polygonal boundary loops plus a flag
//! marking whether a neighbourhood of infinity belongs to the set. Loops
//! bounding material are oriented counterclockwise, holes clockwise, so that
//! material always lies to the left of the walk direction. A point belongs to
//! the set iff its total winding number, plus one if the region is unbounded,
//! is positive. Degenerate loops (a single vertex, or a two-point chain) model
//! isolated points and slits; they carry no interior and match only through
//! the boundary band.
//!
//! Every region carries a tolerance `tol`: the stored polygon is guaranteed to
//! lie within `tol` of the mathematical set it stands for, and membership
//! queries widen the boundary band accordingly so that set operations remain
//! outer approximations.

mod ops;
mod props;
mod trace;

pub use ops::{puncture_origin, region_invert, region_product, region_scale, region_sum};
pub(crate) use ops::convex_hull;
pub use props::{check_properties, star_monotone, Confidence, PropertyReport};
pub use trace::{trace_region, PiecewiseInput, WindingAccel};

use crate::error::{Result, SrgError};
use crate::CPoint;
use serde::{Deserialize, Serialize};

/// Default construction tolerance for boundary polygons.
pub const GEOM_TOL: f64 = 1e-6;

/// Structural annotation that enables exact shortcuts in set operations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub enum ShapeHint {
    #[default]
    General,
    /// Closed disk whose diameter is the real interval `[alpha, beta]`.
    Disk { alpha: f64, beta: f64 },
}

/// Result of a membership query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Outside,
    /// Within the query band of the stored boundary.
    Boundary,
}

impl Containment {
    /// Membership in the closed set: anything but a clear exterior verdict.
    pub fn is_member(self) -> bool {
        !matches!(self, Containment::Outside)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Region {
    loops: Vec<Vec<CPoint>>,
    contains_infinity: bool,
    tol: f64,
    #[serde(default)]
    shape: ShapeHint,
}

impl Region {
    /// Builds a region from boundary loops.
    ///
    /// Loops bounding material must run counterclockwise, holes clockwise.
    /// Consecutive duplicate vertices are dropped. A region with no loops is
    /// only meaningful if it is the whole extended plane, so `loops` empty and
    /// `contains_infinity == false` is rejected.
    pub fn new(loops: Vec<Vec<CPoint>>, contains_infinity: bool, tol: f64) -> Result<Self> {
        if !tol.is_finite() || tol < 0.0 {
            return Err(SrgError::InvalidInput {
                context: format!("region tolerance must be finite and nonnegative, got {tol}"),
            });
        }
        let mut cleaned = Vec::with_capacity(loops.len());
        let mut scale: f64 = 1.0;
        for lp in &loops {
            for z in lp {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(SrgError::NonFiniteInput {
                        context: "region boundary vertex".into(),
                    });
                }
                scale = scale.max(z.norm());
            }
        }
        let snap = 1e-14 * scale;
        for lp in loops {
            if lp.is_empty() {
                continue;
            }
            let mut out: Vec<CPoint> = Vec::with_capacity(lp.len());
            for z in lp {
                if out.last().map_or(true, |p| (z - p).norm() > snap) {
                    out.push(z);
                }
            }
            // the closing edge is implicit; drop a duplicated closing vertex
            while out.len() > 1 && (out[0] - *out.last().unwrap()).norm() <= snap {
                out.pop();
            }
            cleaned.push(out);
        }
        if cleaned.is_empty() && !contains_infinity {
            return Err(SrgError::EmptyInput {
                context: "region with no boundary loops and no point at infinity".into(),
            });
        }
        Ok(Region {
            loops: cleaned,
            contains_infinity,
            tol,
            shape: ShapeHint::General,
        })
    }

    pub fn with_shape(mut self, shape: ShapeHint) -> Self {
        self.shape = shape;
        self
    }

    /// Raise the stored tolerance to at least `t`, e.g. to account for
    /// sampling error in the data the region was built from.
    pub fn widen_tol(mut self, t: f64) -> Self {
        self.tol = self.tol.max(t);
        self
    }

    pub fn loops(&self) -> &[Vec<CPoint>] {
        &self.loops
    }

    pub fn is_unbounded(&self) -> bool {
        self.contains_infinity
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn shape(&self) -> ShapeHint {
        self.shape
    }

    pub fn vertices(&self) -> impl Iterator<Item = CPoint> + '_ {
        self.loops.iter().flatten().copied()
    }

    /// Largest modulus over the stored boundary, padded by `tol`.
    /// `None` for unbounded regions. Exact for disk-hinted regions.
    pub fn radius(&self) -> Option<f64> {
        if self.contains_infinity {
            return None;
        }
        if let ShapeHint::Disk { alpha, beta } = self.shape {
            return Some(alpha.abs().max(beta.abs()));
        }
        let mut r: f64 = 0.0;
        for v in self.vertices() {
            r = r.max(v.norm());
        }
        Some(r + self.tol)
    }

    pub fn bounding_box(&self) -> Option<(CPoint, CPoint)> {
        let mut it = self.vertices();
        let first = it.next()?;
        let (mut lo_re, mut hi_re, mut lo_im, mut hi_im) = (first.re, first.re, first.im, first.im);
        for v in it {
            lo_re = lo_re.min(v.re);
            hi_re = hi_re.max(v.re);
            lo_im = lo_im.min(v.im);
            hi_im = hi_im.max(v.im);
        }
        Some((CPoint::new(lo_re, lo_im), CPoint::new(hi_re, hi_im)))
    }

    /// Membership query with an explicit boundary band.
    ///
    /// The effective band is `max(self.tol, band)`: the stored polygon only
    /// locates the true boundary to within `tol`, so a tighter query would
    /// claim precision the representation does not have.
    pub fn contains(&self, z: CPoint, band: f64) -> Containment {
        let band = band.max(self.tol);
        let mut scale: f64 = z.norm().max(1.0);
        for lp in &self.loops {
            for v in lp {
                scale = scale.max(v.norm());
            }
        }
        if self.boundary_distance(z) <= band {
            return Containment::Boundary;
        }
        let mut total = 0i64;
        for lp in &self.loops {
            if lp.len() < 3 {
                continue;
            }
            total += loop_winding(lp, z, scale);
        }
        if total + i64::from(self.contains_infinity) > 0 {
            Containment::Inside
        } else {
            Containment::Outside
        }
    }

    /// Euclidean distance from `z` to the stored boundary polyline.
    pub fn boundary_distance(&self, z: CPoint) -> f64 {
        let mut best = f64::INFINITY;
        for lp in &self.loops {
            match lp.len() {
                0 => {}
                1 => best = best.min((z - lp[0]).norm()),
                _ => {
                    for i in 0..lp.len() {
                        let a = lp[i];
                        let b = lp[(i + 1) % lp.len()];
                        best = best.min(point_segment_distance(z, a, b));
                        if best == 0.0 {
                            return 0.0;
                        }
                    }
                }
            }
        }
        best
    }

    /// Affine image `a*z + b` with real coefficients (so conjugate symmetry
    /// is preserved). `a = 0` collapses to the single point `b`.
    pub fn affine(&self, a: f64, b: f64) -> Result<Region> {
        if !a.is_finite() || !b.is_finite() {
            return Err(SrgError::NonFiniteInput {
                context: "affine map coefficients".into(),
            });
        }
        if a == 0.0 {
            if self.contains_infinity {
                return Err(SrgError::UnboundedOperand);
            }
            return region_point(CPoint::new(b, 0.0));
        }
        let loops = self
            .loops
            .iter()
            .map(|lp| lp.iter().map(|z| z * a + b).collect())
            .collect();
        let shape = match self.shape {
            ShapeHint::Disk { alpha, beta } => {
                let (p, q) = (a * alpha + b, a * beta + b);
                ShapeHint::Disk {
                    alpha: p.min(q),
                    beta: p.max(q),
                }
            }
            ShapeHint::General => ShapeHint::General,
        };
        // a negative real factor rotates by pi, which keeps orientation
        Ok(Region {
            loops,
            contains_infinity: self.contains_infinity,
            tol: self.tol * a.abs(),
            shape,
        })
    }

    pub fn neg(&self) -> Region {
        self.affine(-1.0, 0.0).expect("finite coefficients")
    }
}

/// Winding number of the closed polygon `lp` around `z`, counterclockwise
/// positive. Vertex-level ties are broken by a deterministic vertical jitter.
pub(crate) fn loop_winding(lp: &[CPoint], z: CPoint, scale: f64) -> i64 {
    let eps = 1e-13 * scale.max(1.0);
    let mut py = z.im;
    if lp.iter().any(|v| (v.im - py).abs() < eps) {
        py += 3.0 * eps;
    }
    let px = z.re;
    let mut w = 0i64;
    for i in 0..lp.len() {
        let a = lp[i];
        let b = lp[(i + 1) % lp.len()];
        if a.im <= py && py < b.im {
            if cross(b - a, CPoint::new(px - a.re, py - a.im)) > 0.0 {
                w += 1;
            }
        } else if b.im <= py && py < a.im {
            if cross(b - a, CPoint::new(px - a.re, py - a.im)) < 0.0 {
                w -= 1;
            }
        }
    }
    w
}

#[inline]
pub(crate) fn cross(a: CPoint, b: CPoint) -> f64 {
    a.re * b.im - a.im * b.re
}

pub(crate) fn point_segment_distance(p: CPoint, a: CPoint, b: CPoint) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / len2;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

pub(crate) fn segment_segment_distance(a0: CPoint, a1: CPoint, b0: CPoint, b1: CPoint) -> f64 {
    // proper crossing means distance zero
    let d1 = cross(a1 - a0, b0 - a0);
    let d2 = cross(a1 - a0, b1 - a0);
    let d3 = cross(b1 - b0, a0 - b0);
    let d4 = cross(b1 - b0, a1 - b0);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return 0.0;
    }
    point_segment_distance(a0, b0, b1)
        .min(point_segment_distance(a1, b0, b1))
        .min(point_segment_distance(b0, a0, a1))
        .min(point_segment_distance(b1, a0, a1))
}

/// Closed disk with real diameter `[alpha, beta]`, sampled finely enough that
/// the inscribed polygon sits within `tol` of the true circle, then annotated
/// with the exact disk hint.
pub fn disk_region(alpha: f64, beta: f64, tol: f64) -> Result<Region> {
    if !alpha.is_finite() || !beta.is_finite() {
        return Err(SrgError::NonFiniteInput {
            context: "disk diameter endpoints".into(),
        });
    }
    let (alpha, beta) = (alpha.min(beta), alpha.max(beta));
    let r = (beta - alpha) / 2.0;
    if r == 0.0 {
        return Ok(region_point(CPoint::new(alpha, 0.0))?
            .with_shape(ShapeHint::Disk { alpha, beta }));
    }
    let c = (alpha + beta) / 2.0;
    // sagitta of an inscribed n-gon chord: r * (1 - cos(pi/n)) <= tol
    let tol = tol.max(1e-12 * r);
    let mut n = 64usize;
    while r * (1.0 - (std::f64::consts::PI / n as f64).cos()) > tol && n < 16384 {
        n *= 2;
    }
    let mut pts = Vec::with_capacity(n);
    for k in 0..n {
        let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        pts.push(CPoint::new(c + r * th.cos(), r * th.sin()));
    }
    Ok(Region::new(vec![pts], false, tol)?.with_shape(ShapeHint::Disk { alpha, beta }))
}

/// Single point, stored as a degenerate loop. A non-real point brings its
/// conjugate along so the region stays symmetric about the real axis.
pub fn region_point(z: CPoint) -> Result<Region> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(SrgError::NonFiniteInput {
            context: "point region".into(),
        });
    }
    let mut loops = vec![vec![z]];
    if z.im != 0.0 {
        loops.push(vec![z.conj()]);
    }
    let r = Region::new(loops, false, 0.0)?;
    Ok(if z.im == 0.0 {
        // a real point is a degenerate real-diameter disk
        r.with_shape(ShapeHint::Disk {
            alpha: z.re,
            beta: z.re,
        })
    } else {
        r
    })
}

/// Closed real interval `[a, b]`, stored as a two-point slit.
pub fn real_segment(a: f64, b: f64) -> Result<Region> {
    if !a.is_finite() || !b.is_finite() {
        return Err(SrgError::NonFiniteInput {
            context: "real segment endpoints".into(),
        });
    }
    let (a, b) = (a.min(b), a.max(b));
    if a == b {
        return region_point(CPoint::new(a, 0.0));
    }
    Region::new(
        vec![vec![CPoint::new(a, 0.0), CPoint::new(b, 0.0)]],
        false,
        0.0,
    )
}

/// Vertical segment between `z` and its conjugate (used for purely imaginary
/// graph slices).
pub fn conjugate_segment(z: CPoint) -> Result<Region> {
    if z.im == 0.0 {
        return region_point(z);
    }
    Region::new(vec![vec![z, z.conj()]], false, 0.0)
}

/// Smallest separation between the point sets of two regions, with each
/// region's representation error subtracted so the result never overstates
/// the true gap. Returns `0.0` on any overlap.
pub fn region_distance(a: &Region, b: &Region) -> f64 {
    let raw = region_distance_raw(a, b);
    (raw - a.tol - b.tol).max(0.0)
}

pub(crate) fn region_distance_raw(a: &Region, b: &Region) -> f64 {
    if a.contains_infinity && b.contains_infinity {
        return 0.0;
    }
    for v in a.vertices() {
        if b.contains(v, 0.0).is_member() {
            return 0.0;
        }
    }
    for v in b.vertices() {
        if a.contains(v, 0.0).is_member() {
            return 0.0;
        }
    }
    if a.loops.is_empty() || b.loops.is_empty() {
        // one operand is a pure neighbourhood of infinity with no boundary,
        // the other is bounded: they are disjoint at any finite distance only
        // if the bounded one is empty, which construction forbids
        return 0.0;
    }
    // coarse pass over vertices gives an upper bound that prunes segment pairs
    let mut best = f64::INFINITY;
    let bv: Vec<CPoint> = b.vertices().collect();
    for va in a.vertices() {
        for &vb in &bv {
            best = best.min((va - vb).norm());
        }
    }
    let seg_of = |r: &Region| {
        let mut segs: Vec<(CPoint, CPoint)> = Vec::new();
        for lp in &r.loops {
            match lp.len() {
                0 => {}
                1 => segs.push((lp[0], lp[0])),
                _ => {
                    for i in 0..lp.len() {
                        segs.push((lp[i], lp[(i + 1) % lp.len()]));
                    }
                }
            }
        }
        segs
    };
    let sa = seg_of(a);
    let sb = seg_of(b);
    for &(p0, p1) in &sa {
        let (lox, hix) = (p0.re.min(p1.re), p0.re.max(p1.re));
        let (loy, hiy) = (p0.im.min(p1.im), p0.im.max(p1.im));
        for &(q0, q1) in &sb {
            // bbox gap already exceeding the best bound cannot improve it
            let gx = (q0.re.min(q1.re) - hix).max(lox - q0.re.max(q1.re)).max(0.0);
            let gy = (q0.im.min(q1.im) - hiy).max(loy - q0.im.max(q1.im)).max(0.0);
            if gx * gx + gy * gy >= best * best {
                continue;
            }
            best = best.min(segment_segment_distance(p0, p1, q0, q1));
            if best == 0.0 {
                return 0.0;
            }
        }
    }
    best
}
