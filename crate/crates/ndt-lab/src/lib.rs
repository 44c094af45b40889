//! Exact-arithmetic calculator and Monte-Carlo verification harness for
//! the delivery-time/cache-memory tradeoff of a cache-aided
//! broadcast-relay wireless network (one base station, `M` cache-equipped
//! full-duplex relays, `K` users).
//!
//! The crate computes the normalized delivery time (NDT) lower-bound
//! family, the achievable one-shot and subspace-alignment schemes, region
//! classification, DoF curves and multiplicative optimality gaps — all in
//! exact rational arithmetic — and certifies the schemes' decodability
//! numerically over random channels with seeded linear-algebra checks.
//!
//! Entry points by capability:
//!
//! * [`bounds`] — lower bounds, corner values, the closed-form optimal
//!   tradeoff for `K + M <= 4`, convex envelopes, achievable DoF.
//! * [`oneshot`] — region classification, one-shot NDT formulas,
//!   subpacketization, cache placement, the two-phase delivery schedule
//!   and its nullspace beamformers.
//! * [`ia`] — the explicit subspace-alignment precoders for
//!   `(K, M) = (3, 1)` at `mu = 4/5` and `(K, M) = (2, 2)` at
//!   `mu = 4/9`, plus one-shot corner traces.
//! * [`verify`] — effective-matrix assembly, zero-forcing / alignment /
//!   rank checks, round-trip symbol recovery, NDT measurement.
//! * [`gap`] — closed-form multiplicative gap bounds and empirical
//!   gap sweeps.
//! * [`cli`] — the `ndt` binary's command implementations.
//!
//! Each capability also has a runnable example under `examples/`.

pub mod bounds;
pub mod channel;
pub mod cli;
pub mod combin;
pub mod config;
pub mod gap;
pub mod ia;
pub mod linalg;
pub mod oneshot;
pub mod rational;
pub mod verify;

pub use config::{NetworkConfig, discrete_cache_grid, validate_config};
pub use rational::Rational;
