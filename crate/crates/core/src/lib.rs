//! Principally polarized abelian varieties from (lattice, metric, symplectic
//! form) triples.
//!
//! The numerical core ([`forms`], [`siegel`]) builds the unique complex
//! structure tamed by a symplectic form and compatible with a metric, and
//! moves between that description and Siegel period matrices. [`lattice`]
//! adds the integral layer, [`theta`] evaluates theta functions with
//! characteristics, [`genus`] does exact characteristic-class algebra and
//! [`hodge`] handles abstract polarized Hodge structures.

pub mod error;
pub mod exact;
pub mod fixtures;
pub mod forms;
pub mod genus;
pub mod hodge;
pub mod lattice;
pub mod linalg;
pub mod siegel;
pub mod theta;

pub use error::{Error, Result};
