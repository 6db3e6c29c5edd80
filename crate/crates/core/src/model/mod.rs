//! Model parameters, mean-field branches and quadratic generators.

pub mod branch;
pub mod params;
pub mod quadratic;

pub use branch::{mean_field_flow, printed_shift_residuals, shift_residual, solve_shift_equations, BranchKind, MeanFieldBranch};
pub use params::ModelParams;
pub use quadratic::{
    build_liouvillian, build_normal_liouvillian, build_superradiant_liouvillian, classical_energy, filter_physical_branches,
    quadratic_coefficients, QuadraticLiouvillian,
};
