//! Rational transfer functions and their frequency-domain analysis: pole
//! computation, adaptive Nyquist sampling, winding numbers, the Nyquist
//! stability count, and the graph constructions built on top of them.

mod extended;
mod hull;
mod nyquist;

pub use extended::{extended_srg, srg_lti_stable, ExtendedOpts, ExtendedSrg};
pub use hull::h_convex_hull;
pub use nyquist::{
    nyquist_criterion, nyquist_curve, winding_number, NyquistCurve, NyquistOpts, NyquistVerdict,
};

use crate::error::{Result, SrgError};
use crate::CPoint;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Poles with a real part above this are counted as unstable; real parts
/// within it of zero are treated as on the imaginary axis and flagged.
pub const POLE_AXIS_TOL: f64 = 1e-9;

/// Real polynomial, coefficients ascending by degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Trims trailing zero coefficients; the zero polynomial is kept as `[0]`.
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(SrgError::NonFiniteInput {
                context: "polynomial coefficients".into(),
            });
        }
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Ok(Polynomial { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, s: CPoint) -> CPoint {
        let mut acc = CPoint::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * s + c;
        }
        acc
    }

    /// Sum of |c_i| |s|^i, the natural scale for relative residuals at `s`.
    pub fn eval_magnitude(&self, s: CPoint) -> f64 {
        let r = s.norm();
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * r + c.abs();
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial { coeffs: vec![0.0] };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        Polynomial { coeffs }
    }

    /// `self + k * other`, used to form closed-loop denominators.
    pub fn add_scaled(&self, other: &Polynomial, k: f64) -> Result<Polynomial> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0.0; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, &c) in other.coeffs.iter().enumerate() {
            out[i] += k * c;
        }
        Polynomial::new(out)
    }

    pub fn scale(&self, k: f64) -> Result<Polynomial> {
        Polynomial::new(self.coeffs.iter().map(|&c| c * k).collect())
    }
}

/// Roots of a real polynomial via the companion matrix, polished by two
/// Newton steps and validated by a relative residual bound.
pub fn poly_roots(p: &Polynomial) -> Result<Vec<CPoint>> {
    if p.is_zero() {
        return Err(SrgError::DegenerateDenominator);
    }
    let n = p.degree();
    if n == 0 {
        return Ok(vec![]);
    }
    let a = &p.coeffs;
    let lead = p.leading();
    let mut roots: Vec<CPoint> = if n == 1 {
        vec![CPoint::new(-a[0] / a[1], 0.0)]
    } else if n == 2 {
        let c = a[0] / a[2];
        let b = a[1] / a[2];
        let disc = CPoint::new(b * b - 4.0 * c, 0.0).sqrt();
        vec![
            (CPoint::new(-b, 0.0) + disc) / 2.0,
            (CPoint::new(-b, 0.0) - disc) / 2.0,
        ]
    } else {
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            m[(i, n - 1)] = -a[i] / lead;
        }
        m.complex_eigenvalues().iter().copied().collect()
    };
    let dp = p.derivative();
    for r in roots.iter_mut() {
        for _ in 0..2 {
            let d = dp.eval(*r);
            if d.norm() > 1e-300 {
                let step = p.eval(*r) / d;
                if step.norm() < 1.0 + r.norm() {
                    *r -= step;
                }
            }
        }
        // real-axis snap keeps conjugate symmetry exact for real polynomials
        if r.im.abs() <= 1e-9 * (1.0 + r.norm()) {
            r.im = 0.0;
        }
    }
    for r in &roots {
        let residual = p.eval(*r).norm();
        let scale = p.eval_magnitude(*r).max(lead.abs());
        if residual > 1e-6 * scale {
            return Err(SrgError::InvalidInput {
                context: format!(
                    "root finding failed: residual {residual:.3e} at candidate {r} exceeds tolerance"
                ),
            });
        }
    }
    roots.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(roots)
}

/// Proper rational transfer function `num(s)/den(s)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransferFunction {
    pub num: Polynomial,
    pub den: Polynomial,
    /// Roots shared by numerator and denominator within tolerance; kept as a
    /// diagnostic rather than cancelled, since cancellation changes n_p.
    pub common_roots: Vec<CPoint>,
}

impl TransferFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(SrgError::DegenerateDenominator);
        }
        if num.degree() > den.degree() && !num.is_zero() {
            return Err(SrgError::ImproperTransferFunction {
                num_deg: num.degree(),
                den_deg: den.degree(),
            });
        }
        let common_roots = if num.is_zero() {
            vec![]
        } else {
            let rn = poly_roots(&num)?;
            let rd = poly_roots(&den)?;
            let mut shared = Vec::new();
            for r in &rn {
                if rd
                    .iter()
                    .any(|q| (q - r).norm() <= 1e-6 * (1.0 + r.norm()))
                {
                    shared.push(*r);
                }
            }
            shared
        };
        Ok(TransferFunction {
            num,
            den,
            common_roots,
        })
    }

    pub fn from_coeffs(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        TransferFunction::new(Polynomial::new(num)?, Polynomial::new(den)?)
    }

    pub fn strictly_proper(&self) -> bool {
        self.num.is_zero() || self.num.degree() < self.den.degree()
    }

    /// High-frequency limit: 0 for strictly proper, ratio of leading
    /// coefficients for biproper.
    pub fn closure_value(&self) -> CPoint {
        if self.strictly_proper() {
            CPoint::new(0.0, 0.0)
        } else {
            CPoint::new(self.num.leading() / self.den.leading(), 0.0)
        }
    }
}

/// Denominator roots (the poles, assuming no exact cancellation).
pub fn tf_poles(tf: &TransferFunction) -> Result<Vec<CPoint>> {
    poly_roots(&tf.den)
}

/// Number of poles strictly in the open right half-plane, and the poles
/// sitting on the imaginary axis within [`POLE_AXIS_TOL`].
pub fn pole_classification(poles: &[CPoint]) -> (usize, Vec<CPoint>) {
    let unstable = poles.iter().filter(|p| p.re > POLE_AXIS_TOL).count();
    let on_axis: Vec<CPoint> = poles
        .iter()
        .filter(|p| p.re.abs() <= POLE_AXIS_TOL)
        .copied()
        .collect();
    (unstable, on_axis)
}

/// `num(s)/den(s)`, rejecting evaluation at (or numerically at) a pole.
pub fn tf_eval(tf: &TransferFunction, s: CPoint) -> Result<CPoint> {
    let d = tf.den.eval(s);
    let scale = tf.den.eval_magnitude(s).max(f64::MIN_POSITIVE);
    if d.norm() <= 1e-12 * scale {
        return Err(SrgError::EvaluationAtPole {
            point: format!("{s}"),
        });
    }
    Ok(tf.num.eval(s) / d)
}
