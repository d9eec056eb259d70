//! Dense complex linear algebra: Hermitian spectral calculus, Kronecker products,
//! row-major vectorization and partial traces.

mod eig;
mod matrix;
mod ops;

pub use eig::{
    apply_function, hermitian_eig, matrix_exp, matrix_log, matrix_power, min_eigenvalue,
    psd_check, Domain, SpectralDecomposition, DEFAULT_FLOOR, JACOBI_MAX_SWEEPS, JACOBI_TOL,
};
pub use matrix::{ComplexMatrix, HermitianMatrix, C64, HERMITIAN_TOL};
pub use ops::{inner, inverse, kron, partial_trace, solve, unvec, vec, VEC_ROW_MAJOR};

pub(crate) use matrix::{ONE, ZERO};
