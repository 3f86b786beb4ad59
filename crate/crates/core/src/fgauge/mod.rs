//! Graded modules over W(k)[u,t]/(tu − p) with a Frobenius gluing, built from filtered
//! lattices and pushed through the supersingular construction.
//!
//! Two layers: `LatticeGauge` keeps exact lattices in W(k)^r at high working
//! precision (Rees modules, tensor, twist, dual), and `Gauge` stores finite
//! W_m-modules per weight with explicit u, t and gluing matrices.

mod gauge;
mod lattice;
mod pipeline;
mod witt;

pub use gauge::{global_sections, Gauge, GaugeMap, TorsionGen};
pub use lattice::{Frob, LatticeGauge, LatticeQuotient};
pub use pipeline::{supersingular_pipeline, EndChainRow, Pipeline};
pub use witt::{max_precision, Elt, Snf, WMat, WittRing};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GaugeError {
    #[error("invalid Witt ring: {0}")]
    Witt(String),
    #[error("filtration invalid at weight {weight}: {detail}")]
    Validation { weight: i64, detail: String },
    #[error("structural error: {0}")]
    Structural(String),
    #[error("pipeline failure at weight {weight}: {detail}")]
    Pipeline { weight: i64, detail: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
}
