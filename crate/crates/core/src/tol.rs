//! Centralized numerical tolerances.
//!
//! Every threshold used by the library is defined here with its default, so
//! that property suites have a single knob to turn. Two broad bands:
//! `kernel` for identities that are exact up to rounding (quaternion algebra,
//! single rotations), and `symplectic` for derived quantities that accumulate
//! a few orders of magnitude of rounding (brackets, flow drift).

use serde::{Deserialize, Serialize};

/// Tolerance configuration shared by all modules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Exact kernel identities: rotations preserve norms, quaternion algebra,
    /// closed-form eigenvalues. Default `1e-12`.
    pub kernel: f64,
    /// Derived symplectic quantities: Poisson brackets of commuting pairs,
    /// momentum drift under composed flows. Default `1e-9`.
    pub symplectic: f64,
    /// Polygon closing defect and tangency checks, relative to the perimeter
    /// scale. Default `1e-10`.
    pub closing: f64,
    /// Band around 1 inside which an almost-unit edge is renormalized instead
    /// of rejected. Default `1e-9`.
    pub unit_edge: f64,
    /// Componentwise cross-product bound below which two unit vectors count
    /// as collinear (degenerate-polygon detection). Default `1e-10`.
    pub collinear: f64,
    /// Relative band for triangle-inequality equality detection on fiber
    /// data. Default `1e-10`.
    pub equality: f64,
    /// Length below which a diagonal counts as vanishing, relative to the
    /// perimeter scale. Default `1e-10`.
    pub len_zero: f64,
    /// Relative singular-value cutoff for numerical rank. Default `1e-8`.
    pub rank: f64,
    /// Action-angle contract accuracy (flow advances angles at unit rate).
    /// Default `1e-8`.
    pub angle: f64,
    /// Maximum normalized symplectic pairing tolerated on a fiber certified
    /// isotropic. Default `1e-8`.
    pub isotropy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            kernel: 1e-12,
            symplectic: 1e-9,
            closing: 1e-10,
            unit_edge: 1e-9,
            collinear: 1e-10,
            equality: 1e-10,
            len_zero: 1e-10,
            rank: 1e-8,
            angle: 1e-8,
            isotropy: 1e-8,
        }
    }
}

impl Tolerances {
    /// Default tolerances as a `const`-friendly accessor.
    pub fn standard() -> Self {
        Self::default()
    }
}
