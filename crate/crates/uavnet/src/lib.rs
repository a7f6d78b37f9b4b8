//! Dual-path evaluator for downlink CoMP-NOMA cellular networks serving
//! aerial users (AUs) alongside terrestrial users (TUs).
//!
//! Base stations form a planar Poisson point process. Each air-to-ground link
//! is independently line-of-sight or non-line-of-sight with an
//! elevation-dependent probability, so the AU sees two inhomogeneous point
//! processes with distinct path-loss laws and Nakagami-m fading orders. An AU
//! whose strongest average received signal strength does not exceed the
//! second strongest by the cooperation threshold is served coherently by both
//! of those base stations (joint transmission), and every serving BS
//! superimposes a TU signal on the AU signal in the power domain (NOMA).
//!
//! Two independent evaluation paths are provided and cross-validated:
//!
//! * [`mcharness`] — an exact Monte Carlo simulator of the sampled network
//!   ([`pointfield`], [`assoc`], [`sirlab`]),
//! * [`analytic`] — numerical evaluation of the closed-form association
//!   probabilities, coverage probabilities, and ergodic rates.
//!
//! [`netmodel`] holds the shared configuration and channel primitives and
//! [`quad`] the adaptive quadrature both paths rely on.

pub mod analytic;
pub mod assoc;
pub mod error;
pub mod mcharness;
pub mod netmodel;
pub mod pointfield;
pub mod quad;
pub mod sirlab;

pub use error::ModelError;
pub use netmodel::{LinkType, NetworkConfig};
pub use sirlab::Scheme;
