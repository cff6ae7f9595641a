//! Gain/angle point clouds and empirical gain estimates.
//!
//! The probing schedule interleaves four input kinds over an amplitude
//! sweep: independent band-limited noise pairs, nearby pairs (a small
//! perturbation on a shared base, which localizes slope behavior of
//! nonlinearities), single windowed sinusoids (which pin LTI samples to
//! the frequency response), and two-tone mixtures (which reach hull
//! points between pure frequencies). Amplitudes matter only for nonlinear
//! operators but cost nothing for linear ones.

use super::response::lti_response_padded;
use super::{apply_operator, trial_seed, GainEstimate, GainMode, Operator, SignalBuffer, SrgSample};
use crate::error::{Result, SrgError};
use crate::lti::tf_eval;
use crate::nonlinearity::GraphMode;
use crate::CPoint;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const NOISE_BW: f64 = 4.0;
const AMPS: [f64; 5] = [0.1, 1.0, 3.0, 10.0, 30.0];

/// Sample count and spacing of every generated probe input.
#[derive(Clone, Copy, Debug)]
pub struct CloudGrid {
    pub n: usize,
    pub dt: f64,
}

impl Default for CloudGrid {
    fn default() -> Self {
        CloudGrid { n: 4096, dt: 0.01 }
    }
}

impl CloudGrid {
    fn validate(&self) -> Result<()> {
        if self.n < 16 {
            return Err(SrgError::InvalidInput {
                context: "probe grid needs at least 16 samples".into(),
            });
        }
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(SrgError::InvalidInput {
                context: "probe grid spacing must be positive and finite".into(),
            });
        }
        Ok(())
    }
}

fn sinusoid(amp: f64, w: f64, phase: f64, g: CloudGrid) -> SignalBuffer {
    let samples = (0..g.n)
        .map(|k| amp * (w * k as f64 * g.dt + phase).sin())
        .collect();
    SignalBuffer {
        dt: g.dt,
        samples,
    }
}

fn zeros(g: CloudGrid) -> SignalBuffer {
    SignalBuffer {
        dt: g.dt,
        samples: vec![0.0; g.n],
    }
}

/// Sinusoid frequencies to probe: a log grid across the resolvable band,
/// with the peak-response frequency of an LTI operator prepended.
fn freq_pool(op: &Operator, g: CloudGrid) -> Vec<f64> {
    let lo = 2.0 * std::f64::consts::PI / (g.n as f64 * g.dt);
    let hi = 0.5 * std::f64::consts::PI / g.dt;
    let mut pool: Vec<f64> = (0..24)
        .map(|k| lo * (hi / lo).powf(k as f64 / 23.0))
        .collect();
    if let Operator::Lti(tf) = op {
        let mut best = (0.0, f64::NEG_INFINITY);
        for k in 0..400 {
            let w = 1e-3 * (1e6f64).powf(k as f64 / 399.0);
            if let Ok(g) = tf_eval(tf, CPoint::new(0.0, w)) {
                if g.norm() > best.1 {
                    best = (w, g.norm());
                }
            }
        }
        pool.insert(0, best.0.clamp(lo, hi));
    }
    pool
}

fn measure(op: &Operator, u1: &SignalBuffer, u2: &SignalBuffer) -> Result<Option<SrgSample>> {
    let (du, dy) = match op {
        Operator::Lti(tf) => {
            let (p1, y1) = lti_response_padded(tf, u1)?;
            let (p2, y2) = lti_response_padded(tf, u2)?;
            (p1.sub(&p2)?, y1.sub(&y2)?)
        }
        _ => {
            let y1 = match apply_operator(op, u1)? {
                Some(y) => y,
                None => return Ok(None),
            };
            let y2 = match apply_operator(op, u2)? {
                Some(y) => y,
                None => return Ok(None),
            };
            (u1.sub(u2)?, y1.sub(&y2)?)
        }
    };
    let ndu = du.norm();
    if ndu <= 1e-12 * (u1.norm() + u2.norm()).max(1e-300) {
        return Ok(None);
    }
    let ndy = dy.norm();
    if ndy == 0.0 {
        return Ok(Some(SrgSample {
            gain: 0.0,
            angle: 0.0,
        }));
    }
    Ok(Some(SrgSample {
        gain: ndy / ndu,
        angle: super::signal_angle(&du, &dy)?,
    }))
}

fn trial(
    op: &Operator,
    pool: &[f64],
    seed: u64,
    i: usize,
    mode: GraphMode,
    g: CloudGrid,
) -> Result<Option<SrgSample>> {
    let tseed = trial_seed(seed, i as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(tseed, 2));
    let amp = AMPS[(i / 4) % AMPS.len()];
    let noise = |slot: u64| super::random_signal(trial_seed(tseed, slot), g.n, g.dt, NOISE_BW);
    let tau = 2.0 * std::f64::consts::PI;
    let (u1, u2) = match i % 4 {
        0 => (scale(&noise(0)?, amp), scale(&noise(1)?, amp)),
        1 => {
            let base = scale(&noise(0)?, amp);
            let bumped = base.sub(&scale(&noise(1)?, -0.01 * amp))?;
            (base, bumped)
        }
        2 => {
            let w = pool[rng.gen_range(0..pool.len())];
            (
                sinusoid(amp, w, rng.gen_range(0.0..tau), g),
                sinusoid(0.6 * amp, w, rng.gen_range(0.0..tau), g),
            )
        }
        _ => {
            let wa = pool[rng.gen_range(0..pool.len())];
            let wb = pool[rng.gen_range(0..pool.len())];
            let mut a = sinusoid(amp, wa, rng.gen_range(0.0..tau), g);
            let b = sinusoid(0.8 * amp, wb, rng.gen_range(0.0..tau), g);
            for (x, y) in a.samples.iter_mut().zip(&b.samples) {
                *x += y;
            }
            (a, scale(&noise(1)?, 0.5 * amp))
        }
    };
    let u2 = match mode {
        GraphMode::Srg => u2,
        GraphMode::Sg0 => zeros(g),
    };
    measure(op, &u1, &u2)
}

fn scale(u: &SignalBuffer, k: f64) -> SignalBuffer {
    SignalBuffer {
        dt: u.dt,
        samples: u.samples.iter().map(|s| k * s).collect(),
    }
}

/// Samples `n_pairs` gain/angle points of the operator. Mode `Sg0` pins
/// the second input of every pair to zero. Trials with a degenerate input
/// difference or a diverged closed loop are dropped. Deterministic in
/// `seed`: each trial derives its own generator from the trial index, so
/// results do not depend on scheduling.
pub fn srg_cloud(
    op: &Operator,
    n_pairs: usize,
    seed: u64,
    mode: GraphMode,
) -> Result<Vec<SrgSample>> {
    srg_cloud_on(op, n_pairs, seed, mode, CloudGrid::default())
}

/// [`srg_cloud`] on a caller-chosen probe grid.
pub fn srg_cloud_on(
    op: &Operator,
    n_pairs: usize,
    seed: u64,
    mode: GraphMode,
    g: CloudGrid,
) -> Result<Vec<SrgSample>> {
    g.validate()?;
    let pool = freq_pool(op, g);
    let results: Result<Vec<Option<SrgSample>>> = (0..n_pairs)
        .into_par_iter()
        .map(|i| trial(op, &pool, seed, i, mode, g))
        .collect();
    Ok(results?.into_iter().flatten().collect())
}

/// Largest sampled gain, a lower bound on the operator's true gain.
pub fn empirical_gain(
    op: &Operator,
    mode: GainMode,
    n_trials: usize,
    seed: u64,
) -> Result<GainEstimate> {
    empirical_gain_on(op, mode, n_trials, seed, CloudGrid::default())
}

/// [`empirical_gain`] on a caller-chosen probe grid.
pub fn empirical_gain_on(
    op: &Operator,
    mode: GainMode,
    n_trials: usize,
    seed: u64,
    g: CloudGrid,
) -> Result<GainEstimate> {
    let graph_mode = match mode {
        GainMode::Incremental => GraphMode::Srg,
        GainMode::NonIncremental => GraphMode::Sg0,
    };
    let cloud = srg_cloud_on(op, n_trials, seed, graph_mode, g)?;
    let value = cloud.iter().map(|s| s.gain).fold(0.0, f64::max);
    Ok(GainEstimate {
        value,
        mode,
        n_trials,
        seed,
    })
}
