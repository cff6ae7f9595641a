//! Scaled relative graph (SRG) calculus for certifying stability and L2-gain
//! bounds of Lur'e feedback interconnections.
//!
//! The crate has three layers:
//!
//! * [`region`]: a polygonal calculus for closed, conjugate-symmetric subsets
//!   of the extended complex plane, with set operations (inversion, Minkowski
//!   sum, product, scaling) that produce certified outer approximations.
//! * [`lti`] and [`nonlinearity`]: constructions of SRGs for stable LTI
//!   transfer functions (via the Nyquist curve and an h-convex hull) and for
//!   static slope- or sector-restricted nonlinearities.
//! * [`stability`]: the separation argument combining both graphs into a
//!   stability certificate and an incremental L2-gain bound, plus the
//!   classical circle criterion for cross-checks.
//!
//! A time-domain sampling [`oracle`] draws input pairs, simulates the
//! operators, and checks that observed gain/angle pairs indeed land in the
//! claimed regions, falsifying unsound set arithmetic instead of proving it.

pub mod error;
pub mod lti;
pub mod nonlinearity;
pub mod oracle;
pub mod region;
pub mod stability;

pub use error::{Result, SrgError};
pub use region::{Containment, Region, ShapeHint};

/// Complex scalar used throughout.
pub type CPoint = num_complex::Complex64;
