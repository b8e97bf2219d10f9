//! Iterated quantum games played by Bayesian rational agents.
//!
//! Two games are modelled:
//!
//! - the CHSH nonlocal game ([`chsh`]), where agents hold grid priors over
//!   their partner's measurement choice for each bit value and over the
//!   entanglement of the shared state;
//! - the Eisert quantum prisoners' dilemma ([`epd`]), reduced to the two
//!   actions Q and D and played by 1-fold rational agents who reason about
//!   their opponent's beliefs.
//!
//! [`qcore`] holds the two-qubit kernel both games build on, [`rng`] the
//! counter-based random streams that make every run reproducible, and
//! [`runner`] the scenario orchestration and record persistence.

pub mod chsh;
pub mod epd;
pub mod error;
pub mod oracle;
pub mod qcore;
pub mod rng;
pub mod runner;

pub use error::{Error, Result};
