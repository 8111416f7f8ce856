//! Scalar numerical kernel shared by every solver and oracle.

mod normal;
mod quadrature;
mod roots;

pub use normal::{std_normal_cdf, std_normal_pdf, std_normal_quantile, INV_SQRT_2PI, SQRT_2PI};
pub use quadrature::{gauss_hermite, QuadratureRule, MAX_HERMITE_ORDER, MIN_HERMITE_ORDER};
pub use roots::{bisect, enumerate_roots, Bracket, RootScan};

/// Every tolerance the solvers use, in one place.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Residual magnitude accepted as a root.
    pub f_tol: f64,
    /// Final bracket width after refinement.
    pub x_tol: f64,
    /// Residual magnitude at a grid point without sign change that is flagged as near-tangency.
    pub tangency: f64,
    /// Points in the default root scan.
    pub grid_n: usize,
    /// Open clip applied to the unit interval when scanning in θ.
    pub boundary_clip: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { f_tol: 1e-12, x_tol: 1e-12, tangency: 1e-9, grid_n: 4096, boundary_clip: 1e-12 }
    }
}

impl Tolerances {
    /// The clipped open unit interval `(clip, 1 - clip)`.
    pub fn unit_domain(&self) -> (f64, f64) {
        (self.boundary_clip, 1.0 - self.boundary_clip)
    }
}
