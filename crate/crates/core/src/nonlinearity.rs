//! Static nonlinearities: continuous piecewise-linear descriptions, sector
//! extraction, and the disk regions their graphs are contained in.
//!
//! Two sector readings coexist. The incremental sector bounds difference
//! quotients (slopes) and yields a region valid for the incremental graph;
//! the sector at zero bounds chords `phi(x)/x` through the origin and only
//! supports the non-incremental graph anchored at the zero signal.

use crate::error::{Result, SrgError};
use crate::region::disk_region;
use crate::Region;
use serde::{Deserialize, Serialize};

/// Continuous piecewise-linear function: interpolates `breakpoints` and
/// extrapolates with `left_slope`/`right_slope` beyond them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinearNl {
    /// Ordered `(x, phi(x))` pairs, `x` strictly increasing.
    pub breakpoints: Vec<(f64, f64)>,
    pub left_slope: f64,
    pub right_slope: f64,
}

impl PiecewiseLinearNl {
    pub fn new(breakpoints: Vec<(f64, f64)>, left_slope: f64, right_slope: f64) -> Result<Self> {
        let nl = PiecewiseLinearNl {
            breakpoints,
            left_slope,
            right_slope,
        };
        nl.validate()?;
        Ok(nl)
    }

    /// Re-check the invariants, e.g. after deserializing.
    pub fn validate(&self) -> Result<()> {
        if self.breakpoints.is_empty() {
            return Err(SrgError::EmptyInput {
                context: "piecewise-linear description needs at least one breakpoint".into(),
            });
        }
        for &(x, y) in &self.breakpoints {
            if !x.is_finite() || !y.is_finite() {
                return Err(SrgError::NonFiniteInput {
                    context: "piecewise-linear breakpoint".into(),
                });
            }
        }
        if !self.left_slope.is_finite() || !self.right_slope.is_finite() {
            return Err(SrgError::NonFiniteInput {
                context: "piecewise-linear tail slope".into(),
            });
        }
        for w in self.breakpoints.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(SrgError::InvalidInput {
                    context: format!(
                        "breakpoint abscissae must be strictly increasing, got {} then {}",
                        w[0].0, w[1].0
                    ),
                });
            }
        }
        Ok(())
    }
}

/// Evaluate `nl` at `x`: linear interpolation between breakpoints, tail
/// extrapolation outside them.
pub fn nl_eval(nl: &PiecewiseLinearNl, x: f64) -> f64 {
    let bp = &nl.breakpoints;
    let (x0, y0) = bp[0];
    if x <= x0 {
        return y0 + nl.left_slope * (x - x0);
    }
    let (xn, yn) = *bp.last().unwrap();
    if x >= xn {
        return yn + nl.right_slope * (x - xn);
    }
    let i = bp.partition_point(|&(bx, _)| bx <= x);
    let (xa, ya) = bp[i - 1];
    let (xb, yb) = bp[i];
    ya + (yb - ya) * (x - xa) / (xb - xa)
}

/// Sector bounds `[k1, k2]`, either on difference quotients (`incremental`)
/// or on chords through the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorSpec {
    pub k1: f64,
    pub k2: f64,
    pub incremental: bool,
}

impl SectorSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.k1.is_finite() || !self.k2.is_finite() {
            return Err(SrgError::NonFiniteInput {
                context: "sector bounds".into(),
            });
        }
        if self.k1 > self.k2 {
            return Err(SrgError::InvalidInput {
                context: format!("sector requires k1 <= k2, got [{}, {}]", self.k1, self.k2),
            });
        }
        Ok(())
    }
}

/// Incremental sector of a piecewise-linear function: exactly its slope
/// range, tails included.
pub fn pwl_incremental_sector(nl: &PiecewiseLinearNl) -> SectorSpec {
    let mut k1 = nl.left_slope.min(nl.right_slope);
    let mut k2 = nl.left_slope.max(nl.right_slope);
    for w in nl.breakpoints.windows(2) {
        let m = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        k1 = k1.min(m);
        k2 = k2.max(m);
    }
    SectorSpec {
        k1,
        k2,
        incremental: true,
    }
}

/// Chord sector of a piecewise-linear function with `phi(0) = 0`: infimum
/// and supremum of `phi(x)/x`. Chords are monotone along each linear
/// segment, so breakpoints and the two tail limits carry the extremes; the
/// segment crossing zero contributes its own slope.
pub fn pwl_sector_at_zero(nl: &PiecewiseLinearNl) -> Result<SectorSpec> {
    let at_zero = nl_eval(nl, 0.0);
    let span = nl
        .breakpoints
        .iter()
        .fold(1.0f64, |m, &(x, y)| m.max(x.abs()).max(y.abs()));
    if at_zero.abs() > 1e-12 * span {
        return Err(SrgError::SectorAtZeroRequiresOrigin { value: at_zero });
    }
    let mut k1 = nl.left_slope.min(nl.right_slope);
    let mut k2 = nl.left_slope.max(nl.right_slope);
    let mut push = |m: f64| {
        k1 = k1.min(m);
        k2 = k2.max(m);
    };
    for &(x, y) in &nl.breakpoints {
        if x != 0.0 {
            push(y / x);
        }
    }
    // segment (or tail) straddling zero: its chord is its slope
    let bp = &nl.breakpoints;
    if bp[0].0 > 0.0 {
        push(nl.left_slope);
    } else if bp.last().unwrap().0 < 0.0 {
        push(nl.right_slope);
    } else {
        for w in bp.windows(2) {
            if w[0].0 < 0.0 && w[1].0 > 0.0 {
                push((w[1].1 - w[0].1) / (w[1].0 - w[0].0));
            }
        }
    }
    Ok(SectorSpec {
        k1,
        k2,
        incremental: false,
    })
}

/// Where an [`NlRegionSpec`] came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NlSource {
    Sector,
    PwlDerived,
    UserRegion,
}

/// Which graph the region bounds: the incremental one, or the one anchored
/// at the zero signal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphMode {
    Srg,
    Sg0,
}

/// A region certified to contain the nonlinearity's graph, with a note
/// saying how that claim was established.
#[derive(Clone, Debug)]
pub struct NlRegionSpec {
    pub source: NlSource,
    pub region: Region,
    pub mode: GraphMode,
    /// The disk cover is attained exactly when the slope switches
    /// discontinuously between the two sector extremes; otherwise it may be
    /// conservative.
    pub note: &'static str,
}

/// Disk region for a sector: the closed disk with diameter `[k1, k2]` on
/// the real axis, covering the incremental graph for incremental sectors
/// and the zero-anchored graph otherwise.
pub fn nl_region(spec: &SectorSpec) -> Result<NlRegionSpec> {
    spec.validate()?;
    let scale = spec.k1.abs().max(spec.k2.abs()).max(1.0);
    let region = disk_region(spec.k1, spec.k2, 1e-9 * scale)?;
    Ok(NlRegionSpec {
        source: NlSource::Sector,
        region,
        mode: if spec.incremental {
            GraphMode::Srg
        } else {
            GraphMode::Sg0
        },
        note: "disk attained exactly when the slope switches discontinuously between the sector extremes",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::ShapeHint;
    use crate::CPoint;

    fn soft_deadzone() -> PiecewiseLinearNl {
        // slope 2 outside the unit interval, identity inside
        PiecewiseLinearNl::new(vec![(-1.0, -1.0), (1.0, 1.0)], 2.0, 2.0).unwrap()
    }

    fn saturation() -> PiecewiseLinearNl {
        PiecewiseLinearNl::new(vec![(-1.0, -1.0), (1.0, 1.0)], 0.0, 0.0).unwrap()
    }

    #[test]
    fn eval_interpolates_and_extrapolates() {
        let nl = soft_deadzone();
        assert_eq!(nl_eval(&nl, 0.5), 0.5);
        assert_eq!(nl_eval(&nl, 2.0), 3.0);
        assert_eq!(nl_eval(&nl, -2.0), -3.0);
        assert_eq!(nl_eval(&nl, 1.0), 1.0);
        let sat = saturation();
        assert_eq!(nl_eval(&sat, 7.0), 1.0);
        assert_eq!(nl_eval(&sat, -7.0), -1.0);
    }

    #[test]
    fn rejects_unordered_breakpoints() {
        let err = PiecewiseLinearNl::new(vec![(1.0, 1.0), (0.0, 0.0)], 1.0, 1.0).unwrap_err();
        assert!(matches!(err, SrgError::InvalidInput { .. }));
    }

    #[test]
    fn incremental_sector_is_the_slope_range() {
        let s = pwl_incremental_sector(&soft_deadzone());
        assert_eq!((s.k1, s.k2), (1.0, 2.0));
        assert!(s.incremental);
        let id = PiecewiseLinearNl::new(vec![(0.0, 0.0)], 1.0, 1.0).unwrap();
        let s = pwl_incremental_sector(&id);
        assert_eq!((s.k1, s.k2), (1.0, 1.0));
        let s = pwl_incremental_sector(&saturation());
        assert_eq!((s.k1, s.k2), (0.0, 1.0));
    }

    #[test]
    fn chord_sector_from_breakpoints_and_tails() {
        let s = pwl_sector_at_zero(&soft_deadzone()).unwrap();
        assert_eq!((s.k1, s.k2), (1.0, 2.0));
        assert!(!s.incremental);
        let s = pwl_sector_at_zero(&saturation()).unwrap();
        assert_eq!((s.k1, s.k2), (0.0, 1.0));
        let id = PiecewiseLinearNl::new(vec![(0.0, 0.0)], 1.0, 1.0).unwrap();
        let s = pwl_sector_at_zero(&id).unwrap();
        assert_eq!((s.k1, s.k2), (1.0, 1.0));
    }

    #[test]
    fn chord_sector_matches_dense_sampling() {
        for nl in [soft_deadzone(), saturation()] {
            let s = pwl_sector_at_zero(&nl).unwrap();
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for k in 1..=4000 {
                let x = 1e3 * k as f64 / 4000.0;
                for x in [x, -x] {
                    let c = nl_eval(&nl, x) / x;
                    assert!(
                        c >= s.k1 - 1e-9 && c <= s.k2 + 1e-9,
                        "chord {c} escapes [{}, {}]",
                        s.k1,
                        s.k2
                    );
                    lo = lo.min(c);
                    hi = hi.max(c);
                }
            }
            assert!(lo <= s.k1 + 0.05, "sampled infimum {lo} far from {}", s.k1);
            assert!(hi >= s.k2 - 0.05, "sampled supremum {hi} far from {}", s.k2);
        }
    }

    #[test]
    fn sector_at_zero_rejects_offset_functions() {
        let nl = PiecewiseLinearNl::new(vec![(-1.0, 0.0), (1.0, 1.0)], 1.0, 1.0).unwrap();
        match pwl_sector_at_zero(&nl) {
            Err(SrgError::SectorAtZeroRequiresOrigin { value }) => {
                assert!((value - 0.5).abs() < 1e-12);
            }
            other => panic!("expected origin error, got {other:?}"),
        }
    }

    #[test]
    fn sector_region_is_the_diameter_disk() {
        let spec = SectorSpec {
            k1: 1.0,
            k2: 2.0,
            incremental: true,
        };
        let r = nl_region(&spec).unwrap();
        assert_eq!(r.mode, GraphMode::Srg);
        match r.region.shape() {
            ShapeHint::Disk { alpha, beta } => {
                assert_eq!((alpha, beta), (1.0, 2.0));
            }
            other => panic!("expected disk hint, got {other:?}"),
        }
        assert_eq!(r.region.radius(), Some(2.0));
        assert!(r.region.contains(CPoint::new(1.5, 0.5), 1e-9).is_member());
        assert!(!r.region.contains(CPoint::new(1.5, 0.6), 1e-9).is_member());

        let pt = SectorSpec {
            k1: 0.7,
            k2: 0.7,
            incremental: true,
        };
        let r = nl_region(&pt).unwrap();
        assert!(r.region.contains(CPoint::new(0.7, 0.0), 1e-9).is_member());
        assert!(!r.region.contains(CPoint::new(0.72, 0.0), 1e-9).is_member());

        let sg = SectorSpec {
            k1: -1.0,
            k2: 1.0,
            incremental: false,
        };
        let r = nl_region(&sg).unwrap();
        assert_eq!(r.mode, GraphMode::Sg0);
        assert!(r.region.contains(CPoint::new(0.0, 0.9), 1e-9).is_member());
    }

    #[test]
    fn chord_sector_nested_in_slope_sector() {
        // for any phi(0) = 0 piecewise-linear function the chord range is
        // inside the slope range: phi(x)/x averages slopes between 0 and x
        use proptest::prelude::*;
        let mut runner = proptest::test_runner::TestRunner::default();
        let strat = (
            proptest::collection::vec(-3.0f64..3.0, 1..6),
            proptest::collection::vec(0.05f64..2.0, 1..6),
            -3.0f64..3.0,
            -3.0f64..3.0,
        );
        runner
            .run(&strat, |(slopes, gaps, left, right)| {
                let n = slopes.len().min(gaps.len());
                // breakpoints on both sides of zero, phi built by walking
                // slopes outward from the origin
                let mut bp = vec![(0.0, 0.0)];
                let (mut x, mut y) = (0.0, 0.0);
                for i in 0..n {
                    x += gaps[i];
                    y += gaps[i] * slopes[i];
                    bp.push((x, y));
                }
                let (mut x, mut y) = (0.0, 0.0);
                for i in 0..n {
                    x -= gaps[i];
                    y -= gaps[i] * slopes[(i + 1) % n];
                    bp.insert(0, (x, y));
                }
                let nl = PiecewiseLinearNl::new(bp, left, right).unwrap();
                let inc = pwl_incremental_sector(&nl);
                let chord = pwl_sector_at_zero(&nl).unwrap();
                prop_assert!(chord.k1 >= inc.k1 - 1e-9);
                prop_assert!(chord.k2 <= inc.k2 + 1e-9);
                Ok(())
            })
            .unwrap();
    }
}
