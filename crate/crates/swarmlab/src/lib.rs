//! Deterministic discrete-time simulation and spectral analysis of
//! decentralized multi-robot heading consensus and sweep coverage.
//!
//! The crate is organized around the controllers (nearest-neighbour
//! averaging, similarity-weighted averaging, quantized biased updates, and
//! boundary sweep control), the communication graph they induce, and the
//! stochastic-matrix machinery (ergodicity coefficients, SLEM) that decides
//! whether a weight sequence can reach consensus at all.

pub mod analysis;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod kernels;
pub mod presets;
pub mod rng;
pub mod scenario;
pub mod sim;
pub mod svg;
pub mod trace;
pub mod sweep;

pub use error::{Error, Result};
