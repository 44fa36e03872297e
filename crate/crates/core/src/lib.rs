//! Solver and maximum-principle checks for the time-space fractional diffusion
//! equation
//!
//! ```text
//! ∂_t^α (u - u₀) + (-Δ)^β u = f   in Ω × (0, T],
//!                        u = 0   outside Ω,
//!                   u(·,0) = u₀,
//! ```
//!
//! with `α, β ∈ (0,1)` on an interval `Ω = (a, b)`.

pub mod error;
pub mod exprparse;
pub mod fraclap;
pub mod kernels;
pub mod principles;
pub mod random;
pub mod solver;
pub mod timefrac;

pub use error::{Error, Result};
