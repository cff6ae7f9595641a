//! Hand-rolled SVG figures. Fixed styling, 1:1 aspect ratio, symmetric axes
//! auto-ranged to 1.2 times the data extent so circles stay circles.
//!
//! Element discipline: every region loop becomes exactly one `<path>`;
//! curves and outlines are `<polyline>`; axes and markers are `<line>`.
//! Tests count on that split.

use srg_core::{CPoint, Region};
use std::fmt::Write;

const SIZE: f64 = 800.0;
const PAD: f64 = 40.0;

#[derive(Clone, Copy)]
pub struct LoopStyle {
    pub fill: &'static str,
    pub stroke: &'static str,
}

/// Shaded plant-side sets.
pub const PLANT_STYLE: LoopStyle = LoopStyle {
    fill: "#9db8d2",
    stroke: "#33567d",
};

/// Shaded nonlinearity-side sets.
pub const NL_STYLE: LoopStyle = LoopStyle {
    fill: "#d2a49d",
    stroke: "#7d4033",
};

pub struct LoopPath {
    pub pts: Vec<(f64, f64)>,
    pub style: LoopStyle,
}

pub struct Chain {
    pub pts: Vec<(f64, f64)>,
    pub stroke: &'static str,
    pub width: f64,
}

pub struct Marker {
    pub at: (f64, f64),
    pub label: String,
}

#[derive(Default)]
pub struct Scene {
    pub caption: String,
    pub loops: Vec<LoopPath>,
    pub chains: Vec<Chain>,
    pub markers: Vec<Marker>,
    pub annotation: Option<String>,
}

impl Scene {
    pub fn add_region(&mut self, r: &Region, style: LoopStyle) {
        for lp in r.loops() {
            self.loops.push(LoopPath {
                pts: lp.iter().map(|p| (p.re, p.im)).collect(),
                style,
            });
        }
    }

    pub fn add_curve(&mut self, pts: impl IntoIterator<Item = CPoint>) {
        self.chains.push(Chain {
            pts: pts.into_iter().map(|p| (p.re, p.im)).collect(),
            stroke: "#101010",
            width: 3.0,
        });
    }
}

/// Joins consecutive segments that share endpoints into polyline chains.
pub fn chain_segments(segs: &[(CPoint, CPoint)]) -> Vec<Vec<(f64, f64)>> {
    let mut chains: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut cur: Vec<(f64, f64)> = Vec::new();
    for &(a, b) in segs {
        let pa = (a.re, a.im);
        let pb = (b.re, b.im);
        if let Some(&(lx, ly)) = cur.last() {
            let gap = (lx - pa.0).abs() + (ly - pa.1).abs();
            let scale = 1.0 + lx.abs() + ly.abs();
            if gap > 1e-9 * scale {
                chains.push(std::mem::take(&mut cur));
            }
        }
        if cur.is_empty() {
            cur.push(pa);
        }
        cur.push(pb);
    }
    if !cur.is_empty() {
        chains.push(cur);
    }
    chains
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

pub fn render(scene: &Scene) -> String {
    let mut extent = 0.0f64;
    let mut see = |x: f64, y: f64| {
        if x.is_finite() && y.is_finite() {
            extent = extent.max(x.abs()).max(y.abs());
        }
    };
    for lp in &scene.loops {
        for &(x, y) in &lp.pts {
            see(x, y);
        }
    }
    for c in &scene.chains {
        for &(x, y) in &c.pts {
            see(x, y);
        }
    }
    for m in &scene.markers {
        see(m.at.0, m.at.1);
    }
    let half = 1.2 * extent.max(0.5);
    let scale = (SIZE - 2.0 * PAD) / (2.0 * half);
    let to_px = |x: f64, y: f64| (SIZE / 2.0 + x * scale, SIZE / 2.0 - y * scale);

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    let _ = writeln!(s, "<rect x=\"0\" y=\"0\" width=\"{SIZE}\" height=\"{SIZE}\" fill=\"#ffffff\"/>");

    let lo = PAD;
    let hi = SIZE - PAD;
    let mid = SIZE / 2.0;
    let _ = writeln!(
        s,
        "<line x1=\"{lo}\" y1=\"{mid}\" x2=\"{hi}\" y2=\"{mid}\" stroke=\"#999999\" stroke-width=\"1\"/>"
    );
    let _ = writeln!(
        s,
        "<line x1=\"{mid}\" y1=\"{lo}\" x2=\"{mid}\" y2=\"{hi}\" stroke=\"#999999\" stroke-width=\"1\"/>"
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-size=\"14\" fill=\"#555555\">Re</text>",
        px(hi - 22.0),
        px(mid - 8.0)
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-size=\"14\" fill=\"#555555\">Im</text>",
        px(mid + 8.0),
        px(lo + 14.0)
    );
    // unit tick on the real axis when it fits
    if half > 1.0 {
        let (tx, ty) = to_px(1.0, 0.0);
        let _ = writeln!(
            s,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#999999\" stroke-width=\"1\"/>",
            px(tx),
            px(ty - 5.0),
            px(tx),
            px(ty + 5.0)
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"#555555\">1</text>",
            px(tx - 3.0),
            px(ty + 20.0)
        );
    }

    for lp in &scene.loops {
        let d = loop_path_data(&lp.pts, to_px);
        let _ = writeln!(
            s,
            "<path d=\"{d}\" fill=\"{}\" fill-opacity=\"0.45\" stroke=\"{}\" stroke-width=\"1.5\" fill-rule=\"evenodd\"/>",
            lp.style.fill, lp.style.stroke
        );
    }

    for c in &scene.chains {
        let mut pts = String::new();
        for &(x, y) in &c.pts {
            let (sx, sy) = to_px(x, y);
            if sx.abs() < 1e6 && sy.abs() < 1e6 {
                let _ = write!(pts, "{},{} ", px(sx), px(sy));
            }
        }
        let _ = writeln!(
            s,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"/>",
            pts.trim_end(),
            c.stroke,
            c.width
        );
    }

    for m in &scene.markers {
        let (cx, cy) = to_px(m.at.0, m.at.1);
        let r = 6.0;
        let _ = writeln!(
            s,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#b00020\" stroke-width=\"2\"/>",
            px(cx - r),
            px(cy - r),
            px(cx + r),
            px(cy + r)
        );
        let _ = writeln!(
            s,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#b00020\" stroke-width=\"2\"/>",
            px(cx - r),
            px(cy + r),
            px(cx + r),
            px(cy - r)
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"13\" fill=\"#b00020\">{}</text>",
            px(cx + 8.0),
            px(cy - 8.0),
            esc(&m.label)
        );
    }

    if !scene.caption.is_empty() {
        let _ = writeln!(
            s,
            "<text x=\"{PAD}\" y=\"26\" font-size=\"16\" fill=\"#222222\">{}</text>",
            esc(&scene.caption)
        );
    }
    if let Some(a) = &scene.annotation {
        let _ = writeln!(
            s,
            "<text x=\"{PAD}\" y=\"{}\" font-size=\"16\" font-family=\"monospace\" fill=\"#222222\">{}</text>",
            px(SIZE - 14.0),
            esc(a)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Path data for one region loop. Single points become a small disk (two
/// arcs), two-point slits an open stroke, everything else a closed polygon.
fn loop_path_data(pts: &[(f64, f64)], to_px: impl Fn(f64, f64) -> (f64, f64)) -> String {
    match pts.len() {
        0 => String::new(),
        1 => {
            let (x, y) = to_px(pts[0].0, pts[0].1);
            let r = 3.0;
            format!(
                "M {} {} a {r} {r} 0 1 0 {} 0 a {r} {r} 0 1 0 {} 0",
                px(x - r),
                px(y),
                px(2.0 * r),
                px(-2.0 * r)
            )
        }
        2 => {
            let (x0, y0) = to_px(pts[0].0, pts[0].1);
            let (x1, y1) = to_px(pts[1].0, pts[1].1);
            format!("M {} {} L {} {}", px(x0), px(y0), px(x1), px(y1))
        }
        _ => {
            let mut d = String::new();
            for (i, &(x, y)) in pts.iter().enumerate() {
                let (sx, sy) = to_px(x, y);
                let _ = write!(d, "{}{} {} ", if i == 0 { "M " } else { "L " }, px(sx), px(sy));
            }
            d.push('Z');
            d
        }
    }
}

/// Minimal well-formedness check used by tests: tags balance, quotes close,
/// no stray angle brackets.
pub fn xml_well_formed(doc: &str) -> bool {
    let b = doc.as_bytes();
    let mut i = 0;
    let mut stack: Vec<&str> = Vec::new();
    let mut seen_root = false;
    while i < b.len() {
        if b[i] != b'<' {
            if b[i] == b'>' {
                return false;
            }
            i += 1;
            continue;
        }
        let mut j = i + 1;
        let mut quote: Option<u8> = None;
        while j < b.len() {
            match b[j] {
                b'"' | b'\'' => match quote {
                    None => quote = Some(b[j]),
                    Some(q) if q == b[j] => quote = None,
                    _ => {}
                },
                b'>' if quote.is_none() => break,
                b'<' if quote.is_none() => return false,
                _ => {}
            }
            j += 1;
        }
        if j >= b.len() {
            return false;
        }
        let tag = doc[i + 1..j].trim();
        if tag.starts_with('?') || tag.starts_with('!') {
            // declaration or comment, no balance bookkeeping
        } else if let Some(name) = tag.strip_prefix('/') {
            match stack.pop() {
                Some(open) if open == name.trim() => {}
                _ => return false,
            }
        } else if tag.ends_with('/') {
            if seen_root && stack.is_empty() {
                return false;
            }
            seen_root = true;
        } else {
            let name = tag.split_whitespace().next().unwrap_or("");
            if name.is_empty() || (seen_root && stack.is_empty()) {
                return false;
            }
            seen_root = true;
            stack.push(name);
        }
        i = j + 1;
    }
    seen_root && stack.is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_balanced_markup() {
        let mut scene = Scene {
            caption: "demo".into(),
            annotation: Some("r = 0.25".into()),
            ..Scene::default()
        };
        scene.loops.push(LoopPath {
            pts: vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)],
            style: PLANT_STYLE,
        });
        scene.loops.push(LoopPath {
            pts: vec![(0.3, 0.3)],
            style: NL_STYLE,
        });
        scene.chains.push(Chain {
            pts: vec![(-1.0, 0.0), (0.0, 1.0)],
            stroke: "#101010",
            width: 3.0,
        });
        scene.markers.push(Marker {
            at: (-1.0, 0.0),
            label: "-1".into(),
        });
        let doc = render(&scene);
        assert!(xml_well_formed(&doc));
        assert_eq!(doc.matches("<path").count(), 2);
        assert_eq!(doc.matches("<polyline").count(), 1);
        assert!(doc.contains("r = 0.25"));
    }

    #[test]
    fn chains_split_on_gaps() {
        let j = CPoint::new(0.0, 1.0);
        let one = CPoint::new(1.0, 0.0);
        let segs = vec![
            (CPoint::new(0.0, 0.0), one),
            (one, one + j),
            (CPoint::new(5.0, 5.0), CPoint::new(6.0, 5.0)),
        ];
        let chains = chain_segments(&segs);
        assert_eq!(chains.len(), 2);
        assert_eq!(chains[0].len(), 3);
        assert_eq!(chains[1].len(), 2);
    }

    #[test]
    fn checker_rejects_unbalanced_tags() {
        assert!(xml_well_formed("<svg><g><path d=\"M 0 0\"/></g></svg>"));
        assert!(!xml_well_formed("<svg><g></svg>"));
        assert!(!xml_well_formed("<svg>"));
        assert!(!xml_well_formed("a > b"));
        assert!(!xml_well_formed("<svg attr=\"unclosed></svg>"));
    }
}
