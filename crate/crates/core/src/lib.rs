//! Converse bounds for integrated sensing and communication (ISAC).
//!
//! This crate computes outer bounds on the jointly achievable
//! (sensing-distortion, communication-rate) region of a system that uses one
//! waveform both as a data carrier and as a sensing probe. The distortion
//! side comes from inverting a rate-distortion function at the mutual
//! information of the sensing channel; the rate side is the ergodic log-det
//! capacity under receiver channel knowledge. Two worked systems are
//! provided end to end: estimation of an iid Nakagami fading matrix under
//! squared error, and binary occupancy detection under Hamming error.
//!
//! Every closed form ships with an independent numerical cross-check (brute
//! force, quadrature, or Blahut–Arimoto); see the [`verify`] module and the
//! guide in `book/`.

pub mod channels;
pub mod error;
pub mod mathfn;
pub mod matrix;
pub mod montecarlo;
pub mod nakagami;
pub mod nats;
pub mod occupancy;
pub mod optimizer;
pub mod presets;
pub mod rd;
pub mod verify;

pub use error::{Error, Result};
pub use nats::Nats;

// The book chapters double as doc-tests so their snippets stay compilable.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/rate-distortion.md")]
    mod rate_distortion {}
    #[doc = include_str!("../../../book/src/gaussian-measures.md")]
    mod gaussian_measures {}
    #[doc = include_str!("../../../book/src/nakagami.md")]
    mod nakagami {}
    #[doc = include_str!("../../../book/src/occupancy.md")]
    mod occupancy {}
    #[doc = include_str!("../../../book/src/covariance-shaping.md")]
    mod covariance_shaping {}
    #[doc = include_str!("../../../book/src/monte-carlo.md")]
    mod monte_carlo {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
