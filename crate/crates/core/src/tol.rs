//! Numerical tolerances and search parameters shared across the pipeline.

#[derive(Debug, Clone)]
pub struct Tolerances {
    /// Group closure: matrix orthogonality and matrix/permutation agreement.
    pub tol_group: f64,
    /// A field value with norm at or below this counts as vanishing.
    pub tol_field: f64,
    /// Newton convergence threshold on the residual norm.
    pub tol_newton: f64,
    /// Two zeros closer than this are the same zero.
    pub tol_dedup: f64,
    /// A Jacobian determinant with magnitude at or below this is degenerate.
    pub tol_degenerate: f64,
    /// Allowed equivariance residual at sample points.
    pub tol_equivariance: f64,
    /// Newton seeds per unit length along each axis.
    pub grid_density: usize,
    /// Cap on the closed group order.
    pub max_order: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_group: 1e-9,
            tol_field: 1e-9,
            tol_newton: 1e-12,
            tol_dedup: 1e-6,
            tol_degenerate: 1e-9,
            tol_equivariance: 1e-8,
            grid_density: 8,
            max_order: crate::group::DEFAULT_MAX_ORDER,
        }
    }
}
