//! Numerical tolerances shared by every module.

/// Algebraic identities that hold exactly in real arithmetic.
pub const EPS_ALG: f64 = 1e-12;

/// Agreement between a simulated quantity and its closed form; also the
/// success threshold on `distance_up_to_phase` for branch operators.
pub const EPS_SIM: f64 = 1e-10;

/// Outputs of root finders and finite-difference checks.
pub const EPS_NUM: f64 = 1e-6;

/// Branch probabilities below this are treated as absent outcomes.
pub const ABSENT_PROBABILITY: f64 = 1e-14;

/// Lowest eigenvalue still accepted as non-negative for density matrices
/// and for the PPT separability test.
pub const EIGEN_FLOOR: f64 = -1e-10;

/// Convergence threshold for Jacobi rotations (off-diagonal Frobenius norm).
pub const JACOBI_TOL: f64 = 1e-13;

/// Bisection width at which root brackets are considered converged.
pub const BISECTION_TOL: f64 = 1e-12;
