//! Exponent regions and finite-blocklength simulation for two-hop
//! hypothesis testing against independence under expected-rate constraints.
//!
//! A transmitter observing `X^n` talks to a relay observing `Y^n`, which
//! talks to a receiver observing `Z^n`; the three sequences form a Markov
//! chain `X -> Y -> Z`. Both the relay and the receiver guess a binary
//! hypothesis, and the quantities of interest are the exponential decay
//! rates of their type-II error probabilities under per-link expected-rate
//! budgets and per-center type-I error caps.
//!
//! The crate is organized in four layers:
//!
//! - [`prob`]: finite-alphabet pmfs, channels, and the Markov source
//!   constructions everything else runs on. All information measures are in
//!   bits.
//! - [`ib`]: the constrained mutual-information maximization
//!   `max I(aux; target) s.t. I(aux; input) <= R` (an information-bottleneck
//!   problem), solved by Lagrangian alternating maximization, plus closed-form
//!   and brute-force oracles and tabulated rate-exponent curves.
//! - [`region`]: assembles achievable `(theta1, theta2)` exponent frontiers
//!   from the two per-hop curves, together with the equal-epsilon and
//!   maximum-rate corner points and the two extremal exponents.
//! - [`sim`]: a Monte Carlo implementation of the variable-length coding
//!   scheme (set partition, 2-bit flags, random quantization codebooks,
//!   joint-typicality decisions) measuring empirical rates and errors.

pub mod ib;
pub mod prob;
pub mod region;
pub mod sim;

mod error;

pub use error::{Error, Result};
