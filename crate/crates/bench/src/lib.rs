//! Shared fixtures for the benchmarks: the second-order unstable plant and
//! the unit deadzone-like nonlinearity exercised throughout the test suite.

use srg_core::lti::TransferFunction;
use srg_core::nonlinearity::PiecewiseLinearNl;

pub fn crescent_plant() -> TransferFunction {
    TransferFunction::from_coeffs(vec![3.0], vec![-2.0, 0.8, 0.1]).unwrap()
}

pub fn soft_deadzone() -> PiecewiseLinearNl {
    PiecewiseLinearNl::new(vec![(-1.0, -1.0), (1.0, 1.0)], 2.0, 2.0).unwrap()
}
