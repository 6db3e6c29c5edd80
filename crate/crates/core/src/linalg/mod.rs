//! Dense complex linear algebra and time integration.

pub mod eig;
pub mod matrix;
pub mod ode;
pub mod poly;
pub mod schur;
pub mod sylvester;

pub use eig::{eig_complex, eigenvalues, Eigen};
pub use matrix::ComplexMatrix;
pub use ode::{integrate_ode, OdeOptions, OdeStatus, Trajectory};
pub use poly::{poly_roots, PolyCoeffs};
pub use sylvester::solve_sylvester;
