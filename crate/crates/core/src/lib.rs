//! Spatially discrete reaction-diffusion with a hysteretic relay source.
//!
//! The lattice problem is
//!
//! ```text
//! u̇_n = Δu_n + H(u_n),   u_n(0) = -c n²,   n ∈ ℤ,
//! ```
//!
//! where `H` is a relay with threshold 0 that outputs `h₁` until its input
//! first reaches 0 and `-h₂` forever after. The crate provides
//!
//! * [`specfun`]: the functions `h`, `f`, `g` and the integrands `F`, `G`, `H`;
//! * [`green`]: the discrete Green function `Γ_n(t)` and its derivatives;
//! * [`relay`]: the relay operator and model parameters;
//! * [`solver`]: the exact event-driven solver and a lattice ODE time-stepper;
//! * [`patterns`]: switching-node sets, counting functions and constructions;
//! * [`analysis`]: the propagation constant `a*` and fits of simulator output.

pub mod analysis;
pub mod bessel;
pub mod error;
pub mod green;
pub mod patterns;
pub mod quadrature;
pub mod relay;
pub mod roots;
pub mod solver;
pub mod specfun;

pub use error::{Error, Result};
pub use green::GreenEvaluator;
pub use relay::{ModelParams, RelayState};
