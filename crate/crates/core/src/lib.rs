//! Roughness classification of synthetic surfaces and surface profiles.
//!
//! The library covers the full study pipeline:
//!
//! * [`surface_synth`] — self-affine surface generation controlled by a Hurst
//!   parameter, dataset labeling, and profile extraction.
//! * [`persistence`] — 0D/1D sublevel-set persistence diagrams for profiles
//!   and areal images (filtered cubical complex, boundary-matrix reduction),
//!   plus an exact bottleneck distance.
//! * [`tda_features`] — persistence-diagram vectorizations: Carlsson
//!   coordinates, persistence images, and template functions on Chebyshev
//!   meshes.
//! * [`profile_baselines`] / [`areal_baselines`] — classical counterparts:
//!   Gaussian mean-line filtering with iterative cutoff selection, FFT
//!   denoising, FFT/PSD peak features, areal power spectral density, and
//!   angular-spectrum features.
//! * [`roughness_params`] — profile (Ra…RSm) and areal (Sa…Sdr) roughness
//!   parameters used as classical feature vectors.
//! * [`classify`] — feature matrices, PCA, from-scratch logistic regression
//!   and random forest, and deterministic k-fold cross-validation.
//! * [`pipeline`] — batch orchestration (generate → featurize → classify →
//!   report) behind the `toposurf` CLI.
//!
//! All randomness flows from explicit seeds; every stage is deterministic
//! regardless of worker count.

pub mod areal_baselines;
pub mod classify;
pub mod error;
pub mod grid;
pub mod io;
pub mod persistence;
pub mod pipeline;
pub mod profile_baselines;
pub mod roughness_params;
pub mod surface_synth;
pub mod tda_features;

mod fft_util;
mod util;

pub use error::{Error, Result};
pub use grid::Grid;
pub use surface_synth::{GeneratorConfig, Profile, RoughnessLabel, SurfaceGrid};
