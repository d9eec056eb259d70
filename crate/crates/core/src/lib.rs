//! # qconvex
//!
//! Numerical matrix analysis around the joint convexity of quantum relative entropy.
//!
//! The crate evaluates the objects involved (operator convex functions, the map
//! `(X, A) ↦ X* A⁻¹ X`, the perspective `(A, B) ↦ (I ⊗ B̄) g(A ⊗ B̄⁻¹)`, quasi-entropies,
//! Weyl-Heisenberg twirls) and checks the inequalities they satisfy with seeded randomized
//! suites. Each suite returns a [`ConvexityReport`] carrying its worst deficit, the sample that
//! produced it and the configuration needed to reproduce it.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`linalg`] | dense complex matrices, Jacobi eigensolver, `f(A)`, `kron`, `vec`, partial trace |
//! | [`sampling`] | seeded Ginibre, density, positive definite and Haar-unitary samplers |
//! | [`functions`] | the scalar catalog `g_p`, `h_q`, `x log x`, `−log x`, transforms, `k(x)` |
//! | [`entropy`] | von Neumann / Umegaki entropies, trace functionals, perspective, quasi-entropy |
//! | [`verify`] | deficit computations, twirling, monotonicity, SSA, operator form of strong subadditivity |
//! | [`suites`] | the named suite registry and [`run_suite`] |
//! | [`report`] | the JSON report document |
//!
//! All logarithms are natural; entropies are in nats.

#![forbid(unsafe_code)]

pub mod entropy;
pub mod error;
pub mod functions;
pub mod linalg;
pub mod report;
pub mod sampling;
pub mod suites;
pub mod verify;


pub use entropy::{DensityMatrix, ModularRep, MultipartiteState};
pub use error::{Error, Result};
pub use functions::OperatorConvexFunction;
pub use linalg::{ComplexMatrix, HermitianMatrix, SpectralDecomposition, C64};
pub use report::{read_report, write_report, ReportDocument, RunManifest};

pub use sampling::{derive_rng, Rng, SampleConfig};
pub use suites::{registry, run_suite, SuiteInfo};
pub use verify::{ConvexityReport, WeylPair};


