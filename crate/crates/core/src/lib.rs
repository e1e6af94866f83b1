//! Scattering resonances of one-dimensional Schrödinger operators
//! `-d²/dx² + V` with exponentially decaying `V`.
//!
//! Two independent routes are provided: the complex absorbing potential
//! (eigenvalues of `-Δ - iεx² + V` as ε → 0+) in [`cap_sweep`], and zeros of
//! the Birman–Schwinger determinant `det(I + vR₀(λ)w)` in
//! [`birman_schwinger`]. [`davies`] and [`deformation`] cover the
//! pseudospectral and symbol-level facts behind the CAP limit.

pub mod assembly;
pub mod birman_schwinger;
pub mod cap_sweep;
pub mod davies;
pub mod deformation;
pub mod eig;
pub mod error;
pub mod linalg;
pub mod potentials;
pub mod special;

pub use num_complex::Complex64 as C64;

pub use assembly::{build_grid, cap_matrix, davies_matrix, laplacian_matrix, Grid1D, GridSpec};
pub use cap_sweep::{
    converged_estimates, match_tracks, run_sweep, Method, ResonanceEstimate, SweepConfig,
    SweepResult, Track,
};
pub use eig::{eigenvalues, filter_sector, smallest_singular_value, sqrt_sector, RectangleOmega, SpectrumResult};
pub use error::{Error, Result};
pub use linalg::{CMatrix, Lu};
pub use potentials::{factorize, verify_envelope, Envelope, Factorization, Potential, PotentialKind, PotentialSpec};

/// Alias matching the vocabulary used throughout the docs.
pub type DenseComplexMatrix = CMatrix;
