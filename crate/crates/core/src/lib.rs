//! Design and verification toolkit for SQUID-based neurons with active
//! dendritic trees.
//!
//! The crate is organised by concern:
//!
//! - [`squid`] integrates the phase dynamics of a two-junction SQUID and
//!   extracts its flux-to-fluxon-rate response.
//! - [`fanin`] evaluates the closed-form activity fractions of point neurons
//!   and homogeneous dendritic trees.
//! - [`inductance`] sizes SQUIDs and solves the inductance constraints that
//!   cap the applied flux at half a flux quantum.
//! - [`tree`] builds dendritic trees, propagates activity through them and
//!   brute-force checks the minimum number of active synapses.
//!
//! All numerical code is generic over a [`Scalar`] (`f32` or `f64`). The
//! aliases below fix the scalar to `f64`, which is what the constraint checks
//! at `1e-12` relative tolerance need.

// `!(a < b)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod fanin;
pub mod inductance;
pub mod scalar;
pub mod squid;
pub mod tree;

pub use constants::PhysicalConstants;
pub use error::{Error, Result};
pub use scalar::Scalar;

/// Software version, recorded in every emitted table.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type SquidParamsF64 = squid::SquidParams<f64>;
pub type SquidParamsF32 = squid::SquidParams<f32>;
pub type SimConfigF64 = squid::SimConfig<f64>;
pub type ResponseCurveF64 = squid::ResponseCurve<f64>;

pub type BiasPointF64 = fanin::BiasPoint<f64>;
pub type BiasPointF32 = fanin::BiasPoint<f32>;
pub type ActivityResultF64 = fanin::ActivityResult<f64>;
pub type TreeGeometryF64 = fanin::TreeGeometry<f64>;

pub type CollectionLoopDesignF64 = inductance::CollectionLoopDesign<f64>;
pub type CollectionLoopDesignF32 = inductance::CollectionLoopDesign<f32>;
pub type NoCollectionDesignF64 = inductance::NoCollectionDesign<f64>;
pub type DrLoopSpecF64 = inductance::DrLoopSpec<f64>;
pub type DesignConfigF64 = inductance::DesignConfig<f64>;

pub type DendriticTreeF64 = tree::DendriticTree<f64>;
pub type PropagationResultF64 = tree::PropagationResult<f64>;
pub type SynapseStateF64 = tree::SynapseState<f64>;
