//! Closed-loop time-domain simulation of the Lur'e interconnection
//! `y = G(r - phi(y))`.

use super::SignalBuffer;
use crate::error::{Result, SrgError};
use crate::lti::TransferFunction;
use crate::nonlinearity::{nl_eval, PiecewiseLinearNl};
use nalgebra::{DMatrix, DVector};

/// Outputs of one closed-loop run. `e = r - phi(y)` is the plant input,
/// `y` the plant output. A diverged run carries the samples up to the blow
/// up and sets the flag; divergence is evidence, not an error.
#[derive(Clone, Debug)]
pub struct LureSim {
    pub e: SignalBuffer,
    pub y: SignalBuffer,
    pub diverged: bool,
    /// How the plant was discretized.
    pub discretization: &'static str,
}

/// `|y|` beyond this counts as divergence.
pub const OVERFLOW_GUARD: f64 = 1e12;

/// Simulates the feedback loop `y = G(r - phi(y))` sample by sample.
///
/// The plant must be strictly proper: with zero feedthrough, `y[k]`
/// depends on the state alone and the update stays explicit. The state
/// space form is discretized by a zero-order hold (exact matrix
/// exponential), so the only approximation is holding `r - phi(y)`
/// constant across each step.
pub fn lure_simulate(
    g: &TransferFunction,
    nl: &PiecewiseLinearNl,
    r: &SignalBuffer,
) -> Result<LureSim> {
    if !g.strictly_proper() {
        return Err(SrgError::InvalidInput {
            context: "closed-loop simulation needs a strictly proper plant; \
                      zero feedthrough keeps the feedback update explicit"
                .into(),
        });
    }
    nl.validate()?;
    if r.is_empty() {
        return Err(SrgError::EmptyInput {
            context: "reference signal".into(),
        });
    }
    let dt = r.dt;
    let m = g.den.degree();
    let lead = g.den.coeffs()[m];

    // controllable canonical form of num/den with monic denominator
    let a_row: Vec<f64> = g.den.coeffs()[..m].iter().map(|c| -c / lead).collect();
    let mut c_row = vec![0.0; m];
    for (i, c) in g.num.coeffs().iter().enumerate() {
        c_row[i] = c / lead;
    }

    // zero-order hold: exp([[A, B], [0, 0]] dt) packs Ad and Bd together
    let (ad, bd) = if m > 0 {
        let mut blk = DMatrix::<f64>::zeros(m + 1, m + 1);
        for i in 0..m - 1 {
            blk[(i, i + 1)] = dt;
        }
        for (j, &a) in a_row.iter().enumerate() {
            blk[(m - 1, j)] = a * dt;
        }
        blk[(m - 1, m)] = dt;
        let e = blk.exp();
        (
            e.view((0, 0), (m, m)).into_owned(),
            DVector::from_iterator(m, (0..m).map(|i| e[(i, m)])),
        )
    } else {
        (DMatrix::zeros(0, 0), DVector::zeros(0))
    };

    let c = DVector::from_vec(c_row);
    let mut x = DVector::<f64>::zeros(m);
    let n = r.len();
    let mut e_out = Vec::with_capacity(n);
    let mut y_out = Vec::with_capacity(n);
    let mut diverged = false;
    for k in 0..n {
        let y = c.dot(&x);
        if !y.is_finite() || y.abs() > OVERFLOW_GUARD {
            diverged = true;
            break;
        }
        let u = r.samples[k] - nl_eval(nl, y);
        y_out.push(y);
        e_out.push(u);
        if m > 0 {
            x = &ad * x + &bd * u;
        }
    }
    Ok(LureSim {
        e: SignalBuffer::new(dt, e_out)?,
        y: SignalBuffer::new(dt, y_out)?,
        diverged,
        discretization: "zero-order hold, exact matrix exponential",
    })
}
