//! Branch tracing (placeholder while the solver layers land).

/// One traced point of the (λ, c) solution branch.
#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub lambda: f64,
    pub c: f64,
    pub mass: f64,
    pub r_lambda: f64,
    pub defect: f64,
    pub pohozaev_residual: f64,
    pub energy: f64,
}

/// A traced branch ordered by increasing c.
#[derive(Debug, Clone, Default)]
pub struct Branch {
    pub points: Vec<BranchPoint>,
}
