//! Image enhancement and single-image dehazing, linked by an inversion duality.
//!
//! The crate provides three families of operations on unit-range floating
//! point rasters ([`ImageF`]):
//!
//! * **Retinex-style enhancers** ([`retinex`]): path-based lightness with
//!   reset, random spray Retinex and its light variant, a kernel-based
//!   reformulation, single- and multi-scale center/surround Retinex, and
//!   homomorphic filtering.
//! * **Dehazing** ([`dehaze`]): dark-channel transmission estimation,
//!   atmospheric light recovery, guided-filter refinement, and the scattering
//!   model forward/inverse maps.
//! * **Duality operators** ([`duality`]): `dehret` turns any enhancer into a
//!   dehazer and `retdeh` turns any dehazer into an enhancer by conjugating
//!   with image inversion.
//!
//! Supporting modules cover deterministic synthetic fog generation
//! ([`synth`]), full-reference and no-reference quality metrics
//! ([`metrics`]), shared separable filters ([`filter`]), and 8/16-bit
//! PNG/PNM I/O ([`io`]).
//!
//! # Determinism
//!
//! Every randomized operation is driven by counter-based streams keyed on
//! `(seed, pixel index, spray/path index)`, so results are byte-identical
//! across runs, platforms, and any parallel evaluation order. All operations
//! are pure functions of `&ImageF` plus a config value; nothing holds
//! interior mutability, so values can be shared freely across threads.

pub mod dehaze;
pub mod duality;
pub mod error;
pub mod filter;
pub mod io;
pub mod metrics;
pub mod raster;
pub mod retinex;
pub mod synth;

mod rng;

pub use error::{Error, Result};
pub use raster::{EpsilonPolicy, ImageF};
