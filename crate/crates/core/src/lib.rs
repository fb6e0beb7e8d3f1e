//! Simulation and reconstruction core for in-situ wavefront correction of a
//! focused beam.
//!
//! The crate models a phase-only SLM bench (blazed prism, super-pixel basis
//! encodings, phase perturbations, Fraunhofer focusing and a noisy camera),
//! measures the perturbed field element by element with three-step
//! phase-shifting interferometry in a canonical or Hadamard basis, and
//! reconstructs it either from the complete set of measurements or by
//! compressive sensing with an ℓ1 basis-pursuit solver.
//!
//! Everything here is `no_std` (with `alloc`); file formats and the command
//! line live in the companion `insitu` crate.
#![no_std]
#![warn(missing_debug_implementations, rust_2018_idioms)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod basis;
mod error;
pub mod experiment;
mod fft;
mod grid;
pub mod interferometry;
pub mod optics;
pub mod seed;
mod serde_util;
pub mod solver;

pub use error::{Error, Result};
pub use grid::Grid2D;
pub use num_complex::Complex64;
