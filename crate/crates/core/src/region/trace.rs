//! Boundary tracing: turns a soup of boundary polylines plus a pointwise
//! membership predicate into a clean [`Region`].
//!
//! The caller supplies every curve that could carry a piece of the target
//! set's boundary (the predicate's discontinuity locus must be covered by the
//! input pieces). The kernel splits the pieces at all mutual intersections,
//! classifies each elementary segment by probing the predicate on both sides,
//! keeps exactly the segments where the two sides disagree, orients them with
//! material on the left, and stitches them into closed loops. Outer loops come
//! out counterclockwise and holes clockwise without any global analysis, and
//! whether the set reaches infinity is decided by a single far probe.

use super::{cross, point_segment_distance, Region};
use crate::error::{Result, SrgError};
use crate::CPoint;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// One boundary piece handed to [`trace_region`].
#[derive(Clone, Debug)]
pub enum PiecewiseInput {
    /// Open polyline; its endpoints are expected to meet other pieces.
    Chain(Vec<CPoint>),
    /// Closed polyline; an edge from the last back to the first is implied.
    Closed(Vec<CPoint>),
    /// Zero-area feature (isolated point or slit) copied to the output
    /// unchanged, bypassing side classification.
    Degenerate(Vec<CPoint>),
}

/// Row-bucketed winding accelerator for a fixed set of polygon edges.
///
/// Queries cost the size of one row instead of the whole edge set. Vertex
/// ties on the horizontal ray are dodged by a deterministic vertical jitter.
pub struct WindingAccel {
    y0: f64,
    dy: f64,
    rows: Vec<Vec<(CPoint, CPoint)>>,
    ys: Vec<f64>,
    eps: f64,
    contains_infinity: bool,
}

impl WindingAccel {
    pub fn from_region(r: &Region) -> Self {
        let mut segs = Vec::new();
        for lp in r.loops() {
            if lp.len() < 3 {
                continue;
            }
            for i in 0..lp.len() {
                segs.push((lp[i], lp[(i + 1) % lp.len()]));
            }
        }
        Self::from_segments(segs, r.is_unbounded())
    }

    pub fn from_segments(segs: Vec<(CPoint, CPoint)>, contains_infinity: bool) -> Self {
        let mut scale: f64 = 1.0;
        let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(a, b) in &segs {
            scale = scale.max(a.norm()).max(b.norm());
            ymin = ymin.min(a.im).min(b.im);
            ymax = ymax.max(a.im).max(b.im);
        }
        if segs.is_empty() {
            return WindingAccel {
                y0: 0.0,
                dy: 1.0,
                rows: vec![],
                ys: vec![],
                eps: 1e-13,
                contains_infinity,
            };
        }
        let nrows = (segs.len() / 8).clamp(1, 1024);
        let span = (ymax - ymin).max(1e-300);
        let dy = span / nrows as f64;
        let mut rows = vec![Vec::new(); nrows];
        for &(a, b) in &segs {
            let lo = ((a.im.min(b.im) - ymin) / dy).floor().max(0.0) as usize;
            let hi = (((a.im.max(b.im) - ymin) / dy).floor() as usize).min(nrows - 1);
            for row in rows.iter_mut().take(hi + 1).skip(lo) {
                row.push((a, b));
            }
        }
        let mut ys: Vec<f64> = segs.iter().flat_map(|&(a, b)| [a.im, b.im]).collect();
        ys.sort_by(f64::total_cmp);
        ys.dedup();
        WindingAccel {
            y0: ymin,
            dy,
            rows,
            ys,
            eps: 1e-13 * scale,
            contains_infinity,
        }
    }

    /// Counterclockwise winding number of the edge set around `z`.
    pub fn winding(&self, z: CPoint) -> i64 {
        if self.rows.is_empty() {
            return 0;
        }
        let mut py = z.im;
        // step off any vertex height so the half-open crossing rule is unambiguous
        for _ in 0..16 {
            let idx = self.ys.partition_point(|&y| y < py);
            let near = |i: usize| {
                self.ys
                    .get(i)
                    .map_or(false, |&y| (y - py).abs() < self.eps)
            };
            if near(idx) || (idx > 0 && near(idx - 1)) {
                py += 3.0 * self.eps.max(1e-300);
            } else {
                break;
            }
        }
        let row = ((py - self.y0) / self.dy).floor();
        if row < 0.0 || row >= self.rows.len() as f64 {
            return 0;
        }
        let mut w = 0i64;
        for &(a, b) in &self.rows[row as usize] {
            if a.im <= py && py < b.im {
                if cross(b - a, CPoint::new(z.re - a.re, py - a.im)) > 0.0 {
                    w += 1;
                }
            } else if b.im <= py && py < a.im
                && cross(b - a, CPoint::new(z.re - a.re, py - a.im)) < 0.0
            {
                w -= 1;
            }
        }
        w
    }

    /// Strict interior test under the winding-plus-infinity membership rule.
    /// Points on the boundary fall on an arbitrary but deterministic side.
    pub fn is_member(&self, z: CPoint) -> bool {
        self.winding(z) + i64::from(self.contains_infinity) > 0
    }
}

struct SegGrid {
    x0: f64,
    y0: f64,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl SegGrid {
    fn build(segs: &[(CPoint, CPoint)], diag: f64) -> SegGrid {
        let (mut x0, mut y0, mut x1, mut y1) =
            (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &(a, b) in segs {
            x0 = x0.min(a.re).min(b.re);
            y0 = y0.min(a.im).min(b.im);
            x1 = x1.max(a.re).max(b.re);
            y1 = y1.max(a.im).max(b.im);
        }
        let n = segs.len().max(1);
        let cell = (diag / (n as f64).sqrt()).max(diag * 1e-6).max(1e-300);
        let nx = (((x1 - x0) / cell).ceil() as usize + 1).min(2048);
        let ny = (((y1 - y0) / cell).ceil() as usize + 1).min(2048);
        let cellx = ((x1 - x0) / nx as f64).max(cell);
        let mut g = SegGrid {
            x0,
            y0,
            cell: cellx.max((y1 - y0) / ny as f64).max(cell),
            nx,
            ny,
            buckets: vec![Vec::new(); nx * ny],
        };
        for (i, &(a, b)) in segs.iter().enumerate() {
            for c in g.cells_of_bbox(a, b, 0.0) {
                g.buckets[c].push(i as u32);
            }
        }
        g
    }

    fn cells_of_bbox(&self, a: CPoint, b: CPoint, pad: f64) -> Vec<usize> {
        let cx0 = (((a.re.min(b.re) - pad - self.x0) / self.cell).floor().max(0.0)) as usize;
        let cy0 = (((a.im.min(b.im) - pad - self.y0) / self.cell).floor().max(0.0)) as usize;
        let cx1 = ((((a.re.max(b.re) + pad - self.x0) / self.cell).floor()) as usize).min(self.nx - 1);
        let cy1 = ((((a.im.max(b.im) + pad - self.y0) / self.cell).floor()) as usize).min(self.ny - 1);
        let mut out = Vec::with_capacity((cx1 + 1 - cx0.min(cx1)) * (cy1 + 1 - cy0.min(cy1)));
        for cy in cy0..=cy1 {
            for cx in cx0..=cx1 {
                out.push(cy * self.nx + cx);
            }
        }
        out
    }

    fn candidates_near(&self, p: CPoint, r: f64) -> Vec<u32> {
        let mut ids = Vec::new();
        for c in self.cells_of_bbox(p, p, r) {
            ids.extend_from_slice(&self.buckets[c]);
        }
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

/// Proper-crossing parameters of segments `a0a1` and `b0b1`, if any.
fn seg_intersection(a0: CPoint, a1: CPoint, b0: CPoint, b1: CPoint) -> Option<(f64, f64)> {
    let r = a1 - a0;
    let s = b1 - b0;
    let den = cross(r, s);
    if den.abs() <= 1e-14 * r.norm() * s.norm() {
        return None;
    }
    let t = cross(b0 - a0, s) / den;
    let u = cross(b0 - a0, r) / den;
    if (-1e-12..=1.0 + 1e-12).contains(&t) && (-1e-12..=1.0 + 1e-12).contains(&u) {
        Some((t.clamp(0.0, 1.0), u.clamp(0.0, 1.0)))
    } else {
        None
    }
}

/// Assembles the region bounded by `pieces` whose pointwise definition is
/// `member`. See module docs for the contract; `tol` is the accuracy credit
/// carried by the result.
pub fn trace_region(
    pieces: Vec<PiecewiseInput>,
    member: &(dyn Fn(CPoint) -> bool + Sync),
    tol: f64,
) -> Result<Region> {
    let mut raw_segs: Vec<(CPoint, CPoint)> = Vec::new();
    let mut degenerate: Vec<Vec<CPoint>> = Vec::new();
    let mut scale: f64 = 1.0;
    for piece in &pieces {
        let pts = match piece {
            PiecewiseInput::Chain(p) | PiecewiseInput::Closed(p) | PiecewiseInput::Degenerate(p) => p,
        };
        for z in pts {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(SrgError::NonFiniteInput {
                    context: "boundary piece vertex".into(),
                });
            }
            scale = scale.max(z.norm());
        }
    }
    let snap = 1e-9 * scale;
    for piece in pieces {
        match piece {
            PiecewiseInput::Chain(p) => {
                for w in p.windows(2) {
                    if (w[1] - w[0]).norm() > 2.0 * snap {
                        raw_segs.push((w[0], w[1]));
                    }
                }
            }
            PiecewiseInput::Closed(p) => {
                let n = p.len();
                for i in 0..n {
                    let (a, b) = (p[i], p[(i + 1) % n]);
                    if (b - a).norm() > 2.0 * snap {
                        raw_segs.push((a, b));
                    }
                }
            }
            PiecewiseInput::Degenerate(p) => degenerate.push(p),
        }
    }
    let far = {
        let mut hi = CPoint::new(1.0, 1.0);
        let mut lo = CPoint::new(-1.0, -1.0);
        for &(a, b) in &raw_segs {
            hi = CPoint::new(hi.re.max(a.re).max(b.re), hi.im.max(a.im).max(b.im));
            lo = CPoint::new(lo.re.min(a.re).min(b.re), lo.im.min(a.im).min(b.im));
        }
        let diag = (hi - lo).norm().max(1.0);
        hi + CPoint::new(2.234, 1.618) * diag
    };
    let contains_infinity = member(far);
    if raw_segs.is_empty() {
        return Region::new(degenerate, contains_infinity, tol);
    }
    let diag = {
        let mut lo = raw_segs[0].0;
        let mut hi = raw_segs[0].0;
        for &(a, b) in &raw_segs {
            lo = CPoint::new(lo.re.min(a.re).min(b.re), lo.im.min(a.im).min(b.im));
            hi = CPoint::new(hi.re.max(a.re).max(b.re), hi.im.max(a.im).max(b.im));
        }
        (hi - lo).norm().max(snap)
    };

    // split every piece at crossings and near-touches with every other piece
    let grid = SegGrid::build(&raw_segs, diag);
    let splits: Vec<Vec<f64>> = raw_segs
        .par_iter()
        .enumerate()
        .map(|(i, &(a, b))| {
            let len = (b - a).norm();
            let eps_t = (4.0 * snap / len).min(0.49);
            let mut ts: Vec<f64> = Vec::new();
            let mut cand = Vec::new();
            for c in grid.cells_of_bbox(a, b, 4.0 * snap) {
                cand.extend_from_slice(&grid.buckets[c]);
            }
            cand.sort_unstable();
            cand.dedup();
            for j in cand {
                let j = j as usize;
                if j == i {
                    continue;
                }
                let (c0, c1) = raw_segs[j];
                if let Some((t, _u)) = seg_intersection(a, b, c0, c1) {
                    if t > eps_t && t < 1.0 - eps_t {
                        ts.push(t);
                    }
                }
                for e in [c0, c1] {
                    if point_segment_distance(e, a, b) <= 4.0 * snap {
                        let ab = b - a;
                        let t = ((e - a).re * ab.re + (e - a).im * ab.im) / ab.norm_sqr();
                        if t > eps_t && t < 1.0 - eps_t {
                            ts.push(t);
                        }
                    }
                }
            }
            ts.sort_by(f64::total_cmp);
            ts.dedup_by(|x, y| (*x - *y).abs() < eps_t);
            ts
        })
        .collect();

    let mut elems: Vec<(CPoint, CPoint)> = Vec::new();
    for (i, &(a, b)) in raw_segs.iter().enumerate() {
        let mut prev = a;
        for &t in &splits[i] {
            let p = a + (b - a) * t;
            if (p - prev).norm() > 2.0 * snap {
                elems.push((prev, p));
            }
            prev = p;
        }
        if (b - prev).norm() > 2.0 * snap {
            elems.push((prev, b));
        }
    }

    // coincident duplicates collapse to a single representative
    let q = |p: CPoint| ((p.re / snap).round() as i64, (p.im / snap).round() as i64);
    let mut seen: BTreeMap<((i64, i64), (i64, i64)), ()> = BTreeMap::new();
    elems.retain(|&(a, b)| {
        let (qa, qb) = (q(a), q(b));
        let key = if qa <= qb { (qa, qb) } else { (qb, qa) };
        seen.insert(key, ()).is_none()
    });

    // classify each elementary segment by probing both sides of its midpoint
    let egrid = SegGrid::build(&elems, diag);
    let cap = 0.02 * diag;
    let kept: Vec<(CPoint, CPoint)> = elems
        .par_iter()
        .enumerate()
        .filter_map(|(i, &(a, b))| {
            let m = (a + b) * 0.5;
            let len = (b - a).norm();
            let mut clearance = cap;
            for j in egrid.candidates_near(m, cap.min(len * 4.0)) {
                if j as usize == i {
                    continue;
                }
                let (c0, c1) = elems[j as usize];
                clearance = clearance.min(point_segment_distance(m, c0, c1));
            }
            if clearance < 6.0 * snap {
                return None; // sliver squeezed between other boundaries
            }
            let dir = (b - a) / len;
            let left = CPoint::new(-dir.im, dir.re);
            let eps = clearance / 3.0;
            let inside_left = member(m + left * eps);
            let inside_right = member(m - left * eps);
            match (inside_left, inside_right) {
                (true, false) => Some((a, b)),
                (false, true) => Some((b, a)),
                _ => None,
            }
        })
        .collect();

    if kept.is_empty() {
        if degenerate.is_empty() && !contains_infinity {
            return Err(SrgError::EmptyInput {
                context: "tracing produced an empty region".into(),
            });
        }
        return Region::new(degenerate, contains_infinity, tol);
    }

    // glue endpoints into nodes: 3x3 neighbourhood search over snapped keys
    let mut reps: BTreeMap<(i64, i64), Vec<u32>> = BTreeMap::new();
    let mut node_pos: Vec<CPoint> = Vec::new();
    let mut node_of = |p: CPoint, node_pos: &mut Vec<CPoint>| -> u32 {
        let (qx, qy) = q(p);
        let mut best: Option<(f64, u32)> = None;
        // glue radius 2.5*snap spans up to 3 cells of size snap
        for dx in -3..=3 {
            for dy in -3..=3 {
                if let Some(ids) = reps.get(&(qx + dx, qy + dy)) {
                    for &id in ids {
                        let d = (node_pos[id as usize] - p).norm();
                        if d <= 2.5 * snap && best.map_or(true, |(bd, bi)| d < bd || (d == bd && id < bi)) {
                            best = Some((d, id));
                        }
                    }
                }
            }
        }
        if let Some((_, id)) = best {
            return id;
        }
        let id = node_pos.len() as u32;
        node_pos.push(p);
        reps.entry((qx, qy)).or_default().push(id);
        id
    };
    struct Edge {
        from: u32,
        to: u32,
        used: bool,
    }
    let mut edges: Vec<Edge> = Vec::with_capacity(kept.len());
    for &(a, b) in &kept {
        let fa = node_of(a, &mut node_pos);
        let fb = node_of(b, &mut node_pos);
        if fa != fb {
            edges.push(Edge {
                from: fa,
                to: fb,
                used: false,
            });
        }
    }
    let mut out_edges: Vec<Vec<u32>> = vec![Vec::new(); node_pos.len()];
    for (i, e) in edges.iter().enumerate() {
        out_edges[e.from as usize].push(i as u32);
    }
    // stitch: walk material-left faces, always taking the first edge clockwise
    // from the reversed incoming direction (stays adjacent to the same face)
    let mut loops: Vec<Vec<CPoint>> = Vec::new();
    let mut dropped_len = 0.0f64;
    for start in 0..edges.len() {
        if edges[start].used {
            continue;
        }
        let mut walk: Vec<u32> = vec![start as u32];
        edges[start].used = true;
        let start_node = edges[start].from;
        let mut cur = edges[start].to;
        let mut dir_in = node_pos[edges[start].to as usize] - node_pos[edges[start].from as usize];
        let mut closed = false;
        for _ in 0..edges.len() + 1 {
            if cur == start_node {
                closed = true;
                break;
            }
            let rev = -dir_in / dir_in.norm().max(1e-300);
            let mut best: Option<(f64, u32)> = None;
            for &eid in &out_edges[cur as usize] {
                let e = &edges[eid as usize];
                if e.used {
                    continue;
                }
                let u = node_pos[e.to as usize] - node_pos[e.from as usize];
                let phi = f64::atan2(cross(rev, u), rev.re * u.re + rev.im * u.im);
                let phi = if phi <= 1e-12 {
                    phi + 2.0 * std::f64::consts::PI
                } else {
                    phi
                };
                if best.map_or(true, |(bp, bi)| phi > bp || (phi == bp && eid < bi)) {
                    best = Some((phi, eid));
                }
            }
            let Some((_, eid)) = best else { break };
            edges[eid as usize].used = true;
            walk.push(eid);
            dir_in = node_pos[edges[eid as usize].to as usize]
                - node_pos[edges[eid as usize].from as usize];
            cur = edges[eid as usize].to;
        }
        if !closed && (node_pos[cur as usize] - node_pos[start_node as usize]).norm() <= 10.0 * snap {
            closed = true;
        }
        if closed && walk.len() >= 3 {
            let pts: Vec<CPoint> = walk
                .iter()
                .map(|&eid| node_pos[edges[eid as usize].from as usize])
                .collect();
            loops.push(pts);
        } else {
            for eid in walk {
                let e = &edges[eid as usize];
                dropped_len += (node_pos[e.to as usize] - node_pos[e.from as usize]).norm();
            }
        }
    }
    if dropped_len > 1e-3 * scale {
        return Err(SrgError::InvalidInput {
            context: format!(
                "boundary stitching left open chains of total length {dropped_len:.3e}; \
                 input pieces do not close up"
            ),
        });
    }
    loops.extend(degenerate);
    if loops.is_empty() && !contains_infinity {
        return Err(SrgError::EmptyInput {
            context: "tracing produced an empty region".into(),
        });
    }
    Region::new(loops, contains_infinity, tol)
}
