//! Synthetic self-affine surface generation and profile extraction.
//!
//! Surfaces are produced by Fourier-filtering spectral synthesis: a white
//! Gaussian noise field is transformed, its spectrum shaped by
//! `|q|^(-1 - H)` so the power spectral density follows `|q|^(-2 - 2H)`,
//! and the result is inverse-transformed and normalized to zero mean and
//! unit standard deviation. The Hurst parameter `H` in [0, 1] controls
//! roughness: `H = 0` is the roughest surface, `H = 1` the smoothest.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fft_util::fft_2d;
use crate::grid::Grid;
use crate::util::derive_seed;

/// Roughness class of a specimen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RoughnessLabel {
    Rough,
    SomewhatRough,
    Smooth,
}

impl RoughnessLabel {
    pub const ALL: [RoughnessLabel; 3] = [
        RoughnessLabel::Rough,
        RoughnessLabel::SomewhatRough,
        RoughnessLabel::Smooth,
    ];

    /// Stable class index (also the tie-break order in classifier voting).
    pub fn index(self) -> usize {
        match self {
            RoughnessLabel::Rough => 0,
            RoughnessLabel::SomewhatRough => 1,
            RoughnessLabel::Smooth => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<RoughnessLabel> {
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for RoughnessLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RoughnessLabel::Rough => "rough",
            RoughnessLabel::SomewhatRough => "somewhat_rough",
            RoughnessLabel::Smooth => "smooth",
        };
        f.write_str(s)
    }
}

impl FromStr for RoughnessLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rough" => Ok(RoughnessLabel::Rough),
            "somewhat_rough" => Ok(RoughnessLabel::SomewhatRough),
            "smooth" => Ok(RoughnessLabel::Smooth),
            other => Err(Error::data(format!("unknown roughness label {other:?}"))),
        }
    }
}

/// An areal specimen: a square height map plus its dataset metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGrid {
    pub grid: Grid,
    /// Hurst parameter used to generate the surface, in [0, 1].
    pub hurst: f64,
    /// Position of the surface in the generated dataset.
    pub index: usize,
    pub label: RoughnessLabel,
    /// Sample interval, identical along both axes.
    pub spacing: f64,
}

impl SurfaceGrid {
    pub fn new(
        grid: Grid,
        hurst: f64,
        index: usize,
        label: RoughnessLabel,
        spacing: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&hurst) {
            return Err(Error::parameter(format!("hurst {hurst} outside [0, 1]")));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::parameter("spacing must be positive"));
        }
        Ok(SurfaceGrid {
            grid,
            hurst,
            index,
            label,
            spacing,
        })
    }

    pub fn rows(&self) -> usize {
        self.grid.rows()
    }

    pub fn cols(&self) -> usize {
        self.grid.cols()
    }

    /// Same metadata, different heights.
    pub fn with_grid(&self, grid: Grid) -> SurfaceGrid {
        SurfaceGrid {
            grid,
            hurst: self.hurst,
            index: self.index,
            label: self.label,
            spacing: self.spacing,
        }
    }
}

/// A profile specimen: one row or column slice of a surface.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub heights: Vec<f64>,
    pub spacing: f64,
    pub label: RoughnessLabel,
    /// Index of the surface this profile was sliced from.
    pub parent_index: usize,
}

impl Profile {
    pub fn new(
        heights: Vec<f64>,
        spacing: f64,
        label: RoughnessLabel,
        parent_index: usize,
    ) -> Result<Self> {
        if heights.len() < 2 {
            return Err(Error::parameter("profile needs at least 2 samples"));
        }
        if !heights.iter().all(|v| v.is_finite()) {
            return Err(Error::data("profile contains non-finite heights"));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::parameter("spacing must be positive"));
        }
        Ok(Profile {
            heights,
            spacing,
            label,
            parent_index,
        })
    }

    pub fn len(&self) -> usize {
        self.heights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heights.is_empty()
    }

    /// Measurement length `(n - 1) * spacing`.
    pub fn length(&self) -> f64 {
        (self.len() - 1) as f64 * self.spacing
    }

    pub fn with_heights(&self, heights: Vec<f64>) -> Profile {
        Profile {
            heights,
            spacing: self.spacing,
            label: self.label,
            parent_index: self.parent_index,
        }
    }
}

/// Dataset generation settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    /// Number of surfaces; Hurst values are equally spaced on [0, 1].
    pub count: usize,
    /// Grid side length.
    pub size: usize,
    pub seed: u64,
    /// Profiles sliced per direction (rows and columns each).
    pub profiles_per_direction: usize,
    /// Sample interval attached to generated surfaces and profiles.
    pub spacing: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            count: 201,
            size: 128,
            seed: 42,
            profiles_per_direction: 3,
            spacing: 1.0,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.count < 3 || !self.count.is_multiple_of(3) {
            return Err(Error::parameter(format!(
                "count {} must be >= 3 and divisible into three equal label bands",
                self.count
            )));
        }
        if self.size < 8 {
            return Err(Error::parameter("size must be at least 8"));
        }
        if self.profiles_per_direction < 1 || self.profiles_per_direction >= self.size {
            return Err(Error::parameter("profiles_per_direction out of range"));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(Error::parameter("spacing must be positive"));
        }
        Ok(())
    }
}

/// Label of dataset position `index` out of `count`: the first third is
/// rough, the last third smooth, the middle band somewhat rough.
pub fn label_for_index(index: usize, count: usize) -> Result<RoughnessLabel> {
    if count == 0 || !count.is_multiple_of(3) {
        return Err(Error::parameter(format!(
            "count {count} not divisible by 3"
        )));
    }
    if index >= count {
        return Err(Error::parameter(format!("index {index} >= count {count}")));
    }
    let band = count / 3;
    Ok(if index < band {
        RoughnessLabel::Rough
    } else if index >= 2 * band {
        RoughnessLabel::Smooth
    } else {
        RoughnessLabel::SomewhatRough
    })
}

/// Generate one self-affine surface by spectral synthesis.
///
/// Deterministic for a fixed `(hurst, size, seed)`. The returned heights
/// have zero mean and unit standard deviation; the radially averaged power
/// spectrum follows `|q|^(-2 - 2 hurst)` over the mid frequencies.
pub fn generate_surface(hurst: f64, size: usize, seed: u64) -> Result<Grid> {
    if !(0.0..=1.0).contains(&hurst) {
        return Err(Error::parameter(format!("hurst {hurst} outside [0, 1]")));
    }
    if size < 8 {
        return Err(Error::parameter("size must be at least 8"));
    }

    // White Gaussian noise; its DFT has Hermitian symmetry by construction,
    // so filtering it with a real radial gain keeps the field real.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut buf: Vec<Complex64> = (0..size * size)
        .map(|_| Complex64::new(normal.sample(&mut rng), 0.0))
        .collect();

    fft_2d(size, size, &mut buf, false);

    // Shape |q|^(-1 - H) in amplitude => PSD ~ |q|^(-2 - 2H). The DC bin is
    // zeroed; the mean is re-centered after the inverse transform anyway.
    let exponent = -(1.0 + hurst);
    for i in 0..size {
        let qi = signed_freq(i, size);
        for j in 0..size {
            let qj = signed_freq(j, size);
            let idx = i * size + j;
            if qi == 0 && qj == 0 {
                buf[idx] = Complex64::new(0.0, 0.0);
            } else {
                let q = ((qi * qi + qj * qj) as f64).sqrt();
                buf[idx] *= q.powf(exponent);
            }
        }
    }

    fft_2d(size, size, &mut buf, true);

    let n = (size * size) as f64;
    let mut heights: Vec<f64> = buf.iter().map(|c| c.re / n).collect();

    // Normalize to zero mean, unit standard deviation.
    let mean = heights.iter().sum::<f64>() / n;
    for h in &mut heights {
        *h -= mean;
    }
    let var = heights.iter().map(|h| h * h).sum::<f64>() / n;
    let std = var.sqrt();
    if std > 0.0 {
        for h in &mut heights {
            *h /= std;
        }
    }

    Grid::new(size, size, heights)
}

fn signed_freq(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Generate the labeled dataset: `count` surfaces with Hurst values equally
/// spaced on [0, 1], labeled in three equal bands, with per-surface seeds
/// derived from the master seed so the result is identical at any worker
/// count.
pub fn generate_dataset(config: &GeneratorConfig) -> Result<Vec<SurfaceGrid>> {
    config.validate()?;
    let count = config.count;
    (0..count)
        .into_par_iter()
        .map(|i| {
            let hurst = i as f64 / (count - 1) as f64;
            let seed = derive_seed(config.seed, i as u64);
            let grid = generate_surface(hurst, config.size, seed)?;
            SurfaceGrid::new(grid, hurst, i, label_for_index(i, count)?, config.spacing)
        })
        .collect()
}

/// Slice `2 * per_direction` profiles out of a surface: `per_direction` rows
/// then `per_direction` columns, taken at indices `k * n / (per_direction + 1)`
/// for `k = 1..=per_direction`.
pub fn extract_profiles(surface: &SurfaceGrid, per_direction: usize) -> Result<Vec<Profile>> {
    let n = surface.rows();
    if per_direction < 1 || per_direction >= n {
        return Err(Error::parameter(format!(
            "per_direction {per_direction} out of range for size {n}"
        )));
    }
    let indices: Vec<usize> = (1..=per_direction)
        .map(|k| k * n / (per_direction + 1))
        .collect();

    let mut profiles = Vec::with_capacity(2 * per_direction);
    for &r in &indices {
        profiles.push(Profile::new(
            surface.grid.row(r).to_vec(),
            surface.spacing,
            surface.label,
            surface.index,
        )?);
    }
    for &c in &indices {
        profiles.push(Profile::new(
            surface.grid.column(c),
            surface.spacing,
            surface.label,
            surface.index,
        )?);
    }
    Ok(profiles)
}

/// Mean absolute forward difference along both axes; a simple roughness
/// proxy that decreases as the surface gets smoother.
pub fn mean_abs_gradient(grid: &Grid) -> f64 {
    let (rows, cols) = (grid.rows(), grid.cols());
    let mut sum = 0.0;
    let mut count = 0usize;
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                sum += (grid.get(r, c + 1) - grid.get(r, c)).abs();
                count += 1;
            }
            if r + 1 < rows {
                sum += (grid.get(r + 1, c) - grid.get(r, c)).abs();
                count += 1;
            }
        }
    }
    sum / count as f64
}
