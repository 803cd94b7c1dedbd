//! Holographic (HolE) and complex (ComplEx) knowledge graph embeddings.
//!
//! The two scoring functions are proportional: converting a HolE model with
//! [`models::hole_to_complex`] yields a ComplEx model with
//! `φ_hole = (2/K)·φ_complex` on every triple. Around that identity the crate
//! provides the transforms it rests on ([`spectral`]), both models with
//! analytic gradients ([`models`]), margin and log-likelihood training with
//! AdaGrad ([`training`]), ranking and average-precision metrics
//! ([`evaluation`]), triple stores and generators ([`datasets`]) and the
//! experiment drivers behind the `holex` binary ([`experiments`]).

pub mod checkpoint;
pub mod datasets;
pub mod error;
pub mod evaluation;
pub mod experiments;
pub mod models;
pub mod spectral;
pub mod training;

pub use error::{Error, Result};
pub use models::{ComplExModel, HolEModel, Model, ModelKind};
