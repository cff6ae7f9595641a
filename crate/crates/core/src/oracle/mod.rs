//! Time-domain sampling oracle: discrete L2 signals, LTI and Lur'e loop
//! simulation, gain/angle point clouds, and empirical gain estimates.
//!
//! Everything here is brute force on purpose. The frequency-domain modules
//! produce certified set covers; this module draws concrete input pairs,
//! runs the operators, and measures where the gain/angle samples actually
//! land. A sample escaping its claimed region falsifies the calculus; no
//! number of samples proves it, so estimates are reported as lower bounds.
//!
//! Norms and angles use the discrete inner product `dt * sum(f*g)`, the
//! rectangle-rule stand-in for the continuous one. Tolerances in the tests
//! are stated relative to this discretization.

mod cloud;
mod lure;
mod response;

pub use cloud::{empirical_gain, empirical_gain_on, srg_cloud, srg_cloud_on, CloudGrid};
pub use lure::{lure_simulate, LureSim};
pub use response::{lti_response, random_signal, signal_angle};

use crate::error::{Result, SrgError};
use crate::lti::TransferFunction;
use crate::nonlinearity::PiecewiseLinearNl;
use crate::CPoint;
use serde::{Deserialize, Serialize};

/// Uniformly sampled real signal, a compactly supported element of L2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalBuffer {
    /// Sample spacing in seconds, > 0.
    pub dt: f64,
    pub samples: Vec<f64>,
}

impl SignalBuffer {
    pub fn new(dt: f64, samples: Vec<f64>) -> Result<Self> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(SrgError::InvalidInput {
                context: format!("signal sample spacing must be positive, got {dt}"),
            });
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(SrgError::NonFiniteInput {
                context: "signal sample".into(),
            });
        }
        Ok(SignalBuffer { dt, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Discrete L2 norm `sqrt(dt * sum(s^2))`.
    pub fn norm(&self) -> f64 {
        (self.dt * self.samples.iter().map(|s| s * s).sum::<f64>()).sqrt()
    }

    /// Discrete inner product `dt * sum(self * other)`.
    pub fn dot(&self, other: &SignalBuffer) -> Result<f64> {
        self.check_aligned(other)?;
        Ok(self.dt
            * self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a * b)
                .sum::<f64>())
    }

    pub fn sub(&self, other: &SignalBuffer) -> Result<SignalBuffer> {
        self.check_aligned(other)?;
        Ok(SignalBuffer {
            dt: self.dt,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    fn check_aligned(&self, other: &SignalBuffer) -> Result<()> {
        if self.dt != other.dt || self.len() != other.len() {
            return Err(SrgError::InvalidInput {
                context: format!(
                    "signals must share dt and length, got dt {} vs {} and length {} vs {}",
                    self.dt,
                    other.dt,
                    self.len(),
                    other.len()
                ),
            });
        }
        Ok(())
    }
}

/// One measured gain/angle pair; stands for the conjugate pair
/// `gain * exp(+-j*angle)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SrgSample {
    /// `|R u1 - R u2| / |u1 - u2|`, >= 0.
    pub gain: f64,
    /// Angle between input and output difference, in `[0, pi]`.
    pub angle: f64,
}

impl SrgSample {
    /// Upper-half-plane representative `gain * exp(j*angle)`.
    pub fn upper(self) -> CPoint {
        CPoint::from_polar(self.gain, self.angle)
    }
}

/// Which supremum an estimate targets: over input pairs, or over single
/// inputs against zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GainMode {
    Incremental,
    NonIncremental,
}

/// Sampled lower bound on an operator gain. The true gain is a supremum,
/// so sampling only ever underestimates it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GainEstimate {
    pub value: f64,
    pub mode: GainMode,
    pub n_trials: usize,
    pub seed: u64,
}

/// Operators the oracle can simulate.
#[derive(Clone, Debug)]
pub enum Operator {
    /// Stable transfer function, applied in the frequency domain.
    Lti(TransferFunction),
    /// Static nonlinearity, applied sample by sample.
    StaticNl(PiecewiseLinearNl),
    /// Lur'e closed loop from reference to plant output; the plant may be
    /// unstable as long as the loop converges.
    LureLoop {
        plant: TransferFunction,
        nl: PiecewiseLinearNl,
    },
}

/// Runs the operator on one input. `Ok(None)` means a closed-loop
/// simulation diverged; static and open-loop LTI operators never do.
pub fn apply_operator(op: &Operator, u: &SignalBuffer) -> Result<Option<SignalBuffer>> {
    match op {
        Operator::Lti(tf) => lti_response(tf, u).map(Some),
        Operator::StaticNl(nl) => {
            let samples = u
                .samples
                .iter()
                .map(|&x| crate::nonlinearity::nl_eval(nl, x))
                .collect();
            Ok(Some(SignalBuffer {
                dt: u.dt,
                samples,
            }))
        }
        Operator::LureLoop { plant, nl } => {
            let sim = lure_simulate(plant, nl, u)?;
            Ok(if sim.diverged { None } else { Some(sim.y) })
        }
    }
}

fn fmt_sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// CSV rendering of a cloud, columns `gain,angle`, 12 significant digits.
pub fn cloud_csv(samples: &[SrgSample]) -> String {
    let mut out = String::from("gain,angle\n");
    for s in samples {
        out.push_str(&fmt_sig12(s.gain));
        out.push(',');
        out.push_str(&fmt_sig12(s.angle));
        out.push('\n');
    }
    out
}

/// CSV rendering of a gain estimate, single data row.
pub fn gain_csv(est: &GainEstimate) -> String {
    format!(
        "value,mode,n_trials,seed\n{},{},{},{}\n",
        fmt_sig12(est.value),
        match est.mode {
            GainMode::Incremental => "incremental",
            GainMode::NonIncremental => "non-incremental",
        },
        est.n_trials,
        est.seed
    )
}

/// Counter-derived per-trial seed: trial `i` sees the same stream no matter
/// how many trials run or in what order (splitmix64 finalizer).
pub(crate) fn trial_seed(seed: u64, i: u64) -> u64 {
    let mut z = seed ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
