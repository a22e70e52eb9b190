//! Explicit error bounds for statistics of the form `g(W)` approximating
//! `g(Z)`, where `W` is a vector of standardized sums of independent random
//! variables and `Z` is standard multivariate normal.
//!
//! The crate has three layers:
//!
//! * closed-form bound evaluators ([`bounds`]) that turn moment data for the
//!   summand law, smoothness data for `g`, and derivative sup-norms of the
//!   test function `h` into numeric error bounds with a per-term breakdown;
//! * a numerical solver ([`solver`]) for the multivariate normal Stein
//!   equation with test function `h(g(·))`, used to verify the bound
//!   machinery against the actual solution;
//! * a seeded, parallel-reproducible Monte Carlo harness ([`montecarlo`])
//!   that estimates the distributional distance directly and fits empirical
//!   convergence rates against the predicted exponents.
//!
//! Supporting modules provide exact combinatorics ([`combinatorics`]),
//! standardized summand laws with exact moments ([`distributions`]), moments
//! of the normalized sum ([`sum_moments`]), the registry of target functions
//! `g` ([`gfunctions`]), and test functions `h` ([`testfn`]).

pub mod bounds;
pub mod combinatorics;
pub mod distributions;
pub mod error;
pub mod gfunctions;
pub mod montecarlo;
pub mod quad;
pub mod solver;
pub mod special;
pub mod sum_moments;
pub mod testfn;

pub use error::{Result, SteinError};
