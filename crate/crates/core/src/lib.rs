//! Numerical laboratory for the Dirichlet fast diffusion equation
//!
//!   ∂ₜuᵖ = Δu + bu   on Ω,   u = 0 on ∂Ω,   p > 1,   b < λ₁(Ω),
//!
//! on 1D intervals and 2D rectangles. Solutions vanish identically at a finite
//! extinction time T*; near T* they behave like d(x)·(T*−t)^{1/(p−1)} where d
//! is the distance to the boundary. The crate simulates the flow to
//! extinction, computes the rescaled dynamics
//!
//!   ∂ₜvᵖ = Δv + bv + vᵖ,
//!
//! whose stationary point is the positive profile S solving −ΔS − bS = Sᵖ,
//! and quantitatively verifies the structural estimates along trajectories:
//! two-sided Harnack bounds v ≍ d, energy dissipation, boundedness of the
//! curvature moments M_q, the Bénilan–Crandall time-smoothing bound, and
//! exponential convergence of v/S to 1. A separate module evaluates the
//! supporting functional inequalities (weighted Sobolev, Campanato-type
//! seminorms, an ODE comparison bound) on discrete samples.
//!
//! Layout:
//! - [`domain`]: grids, boundary distance, quadrature, discrete operators
//! - [`steady`]: steady profiles, eigenpairs, separable solutions, initial data
//! - [`evolve`]: implicit time stepping, extinction estimation, frame changes
//! - [`diagnostics`]: estimate verification along trajectories
//! - [`funcineq`]: functional-inequality and seminorm evaluations
//! - [`cli`]: batch driver with JSON configs and reproducible artifacts

pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod domain;
pub mod error;
pub mod evolve;
pub mod fit;
pub mod funcineq;
pub mod io;
mod linalg;
pub mod steady;
pub mod tolerances;

/// Concrete scalar used by the solvers. The `domain` layer is generic over
/// [`domain::Scalar`]; everything above it works in f64.
pub type Real = f64;

pub type Grid = domain::Grid<Real>;
pub type GridFunction = domain::GridFunction<Real>;
pub type DistanceField = domain::DistanceField<Real>;

pub use error::FdeError;

pub type Result<T> = std::result::Result<T, FdeError>;
