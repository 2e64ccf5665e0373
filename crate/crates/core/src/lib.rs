//! Confidence-driven asset price model with delayed information.
//!
//! The price `S` follows a geometric diffusion whose drift and variance rate
//! are driven by a delayed confidence index `P_{t-τ}`, itself a geometric
//! Brownian motion started from a deterministic history `φ` on `[-L, 0]`.
//! This crate provides:
//!
//! * [`model`]: parameter containers, validation, rate curves and contracts.
//! * [`moments`]: closed-form moments of the integrated information process
//!   `X_t = ∫_0^t P_{u-τ} du` and of `log S_t`.
//! * [`approx`]: the moment-matched log-normal law for `X` used as mixing
//!   density by the pricers.
//! * [`pricing`]: mixture Black–Scholes pricing of vanilla, cash-or-nothing
//!   and generic European payoffs under the minimal martingale measure.
//! * [`simulation`]: exact-in-distribution path generation and kernel
//!   density estimates.
//! * [`mc`]: Monte Carlo pricing and change-of-measure diagnostics.
//!
//! The crate is `no_std` (with `alloc`) when built without default features.
//! The `parallel` feature (default) spreads path generation over rayon.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod approx;
pub mod error;
pub mod mc;
pub mod model;
pub mod moments;
pub mod normal;
pub mod pricing;
pub mod quadrature;
pub mod rng;
pub mod simulation;
pub mod stats;

pub use error::{Error, Result};
pub use model::{
    ConfidenceParams, ContractKind, InitialConfidence, ModelParams, OptionSpec, RatesCurve,
    ValidationError,
};
