//! Simulated bench: a phase-only SLM carrying a blazed prism, basis-element
//! encodings, a perturbing phase screen, Fraunhofer focusing onto a camera and
//! a noisy, quantising detector.

mod bench;
mod camera;
mod detector;
mod perturbation;
mod slm;

pub use bench::{BenchConfig, BenchState, CellResponses};
pub use camera::{propagate, Camera};
pub use detector::{detect, detect_intensity, DetectorModel, Exposure};
pub use perturbation::Perturbation;
pub use slm::{quantize_phase, wrap_phase, PrismPhase, SlmPlane, TWO_PI};
