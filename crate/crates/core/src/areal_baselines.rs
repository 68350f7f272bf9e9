//! Classical 2-D feature extraction: Gaussian smoothing, areal power
//! spectral density, polar resampling, and angular-spectrum features.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft_util::fft_2d;
use crate::grid::Grid;
use crate::profile_baselines::{detect_peaks, PeakConfig};
use crate::surface_synth::SurfaceGrid;
use crate::tda_features::FeatureVector;
use crate::util::reflect_index;

/// 2-D Gaussian smoothing settings: an odd kernel size `K` with standard
/// deviation `K / 6`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian2DConfig {
    pub kernel_size: usize,
}

impl Default for Gaussian2DConfig {
    fn default() -> Self {
        Gaussian2DConfig { kernel_size: 21 }
    }
}

impl Gaussian2DConfig {
    pub fn sigma(&self) -> f64 {
        self.kernel_size as f64 / 6.0
    }

    pub fn validate(&self, rows: usize, cols: usize) -> Result<()> {
        if self.kernel_size.is_multiple_of(2) || self.kernel_size < 3 {
            return Err(Error::parameter(format!(
                "kernel size {} must be odd and >= 3",
                self.kernel_size
            )));
        }
        if self.kernel_size >= rows.min(cols) {
            return Err(Error::parameter(format!(
                "kernel size {} too large for {rows}x{cols} grid",
                self.kernel_size
            )));
        }
        Ok(())
    }
}

/// Convolve a surface with the sampled 2-D Gaussian kernel (unit-sum
/// renormalized, mirror padding). The kernel is separable, so the filter
/// runs as two 1-D passes.
pub fn gaussian_filter_2d(surface: &SurfaceGrid, config: &Gaussian2DConfig) -> Result<SurfaceGrid> {
    let grid = &surface.grid;
    config.validate(grid.rows(), grid.cols())?;

    let half = (config.kernel_size - 1) / 2;
    let sigma = config.sigma();
    let mut kernel: Vec<f64> = (-(half as isize)..=half as isize)
        .map(|j| (-(j * j) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = kernel.iter().sum();
    for k in &mut kernel {
        *k /= sum;
    }

    let pass = |input: &Grid| -> Grid {
        // Convolve along rows.
        let (rows, cols) = (input.rows(), input.cols());
        let mut out = Grid::constant(rows, cols, 0.0).expect("shape");
        for r in 0..rows {
            let row = input.row(r);
            for c in 0..cols {
                let mut acc = 0.0;
                for (j, &k) in kernel.iter().enumerate() {
                    let idx = c as isize + j as isize - half as isize;
                    acc += k * row[reflect_index(idx, cols)];
                }
                out.set(r, c, acc);
            }
        }
        out
    };

    let horizontal = pass(grid);
    let filtered = pass(&horizontal.transpose()).transpose();
    Ok(surface.with_grid(filtered))
}

/// Roughness surface: original minus Gaussian-filtered, metadata preserved.
pub fn roughness_surface(surface: &SurfaceGrid, config: &Gaussian2DConfig) -> Result<SurfaceGrid> {
    let filtered = gaussian_filter_2d(surface, config)?;
    let grid = surface.grid.zip_map(&filtered.grid, |a, b| a - b)?;
    Ok(surface.with_grid(grid))
}

/// Areal power spectral density, zero-frequency centered.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2D {
    /// Centered APSD values; the DC bin sits at (rows/2, cols/2).
    pub values: Grid,
    /// Frequency bin widths along (x, y) = (1/(N Tx), 1/(M Ty)).
    pub freq_spacing: (f64, f64),
}

impl Spectrum2D {
    pub fn dc_position(&self) -> (usize, usize) {
        (self.values.rows() / 2, self.values.cols() / 2)
    }

    /// Nyquist frequency of the shorter axis, the outer radius for polar
    /// resampling.
    pub fn nyquist(&self) -> f64 {
        let fx = self.freq_spacing.0 * (self.values.cols() / 2) as f64;
        let fy = self.freq_spacing.1 * (self.values.rows() / 2) as f64;
        fx.min(fy)
    }
}

/// APSD of a surface: the squared magnitude of the 2-D DFT scaled by
/// `1 / (M N Tx Ty)`, then centered.
pub fn apsd(surface: &SurfaceGrid) -> Spectrum2D {
    let grid = &surface.grid;
    let (rows, cols) = (grid.rows(), grid.cols());
    let mut buf: Vec<Complex64> = grid
        .data()
        .iter()
        .map(|&h| Complex64::new(h, 0.0))
        .collect();
    fft_2d(rows, cols, &mut buf, false);

    let t = surface.spacing;
    let scale = 1.0 / (rows as f64 * cols as f64 * t * t);
    let mut centered = Grid::constant(rows, cols, 0.0).expect("shape");
    for r in 0..rows {
        for c in 0..cols {
            // fftshift: move the DC bin to (rows/2, cols/2).
            let sr = (r + rows / 2) % rows;
            let sc = (c + cols / 2) % cols;
            centered.set(sr, sc, buf[r * cols + c].norm_sqr() * scale);
        }
    }
    Spectrum2D {
        values: centered,
        freq_spacing: (1.0 / (cols as f64 * t), 1.0 / (rows as f64 * t)),
    }
}

/// Resample the centered APSD onto a polar grid and return its marginals.
///
/// Radii run from 0 to the Nyquist frequency, angles over [0, 180) degrees
/// (the APSD of a real surface is centrosymmetric). The radial spectrum is
/// the sum over angles, the angular spectrum the sum over radii; both are
/// marginals of the same bilinear resampling.
pub fn polar_spectra(
    spec: &Spectrum2D,
    n_radii: usize,
    n_angles: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if n_radii < 4 || n_angles < 4 {
        return Err(Error::parameter("polar grid needs at least 4x4 samples"));
    }
    let (center_r, center_c) = spec.dc_position();
    let nyquist = spec.nyquist();
    if nyquist <= 0.0 {
        return Err(Error::parameter("degenerate spectrum"));
    }

    let mut radial = vec![0.0; n_radii];
    let mut angular = vec![0.0; n_angles];
    for (j, ang) in angular.iter_mut().enumerate() {
        let theta = std::f64::consts::PI * j as f64 / n_angles as f64;
        let (sin_t, cos_t) = theta.sin_cos();
        for (i, rad) in radial.iter_mut().enumerate() {
            let r = nyquist * i as f64 / (n_radii - 1) as f64;
            let fx = r * cos_t;
            let fy = r * sin_t;
            let col = center_c as f64 + fx / spec.freq_spacing.0;
            let row = center_r as f64 + fy / spec.freq_spacing.1;
            let v = bilinear(&spec.values, row, col);
            *rad += v;
            *ang += v;
        }
    }
    Ok((radial, angular))
}

/// Bilinear interpolation with zero outside the grid.
fn bilinear(grid: &Grid, row: f64, col: f64) -> f64 {
    let r0 = row.floor();
    let c0 = col.floor();
    let dr = row - r0;
    let dc = col - c0;
    let mut acc = 0.0;
    for (ri, wr) in [(r0 as isize, 1.0 - dr), (r0 as isize + 1, dr)] {
        for (ci, wc) in [(c0 as isize, 1.0 - dc), (c0 as isize + 1, dc)] {
            let w = wr * wc;
            if w == 0.0 {
                continue;
            }
            if ri >= 0 && ci >= 0 && (ri as usize) < grid.rows() && (ci as usize) < grid.cols() {
                acc += w * grid.get(ri as usize, ci as usize);
            }
        }
    }
    acc
}

/// Peak densities and dominant directions of the angular spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularFeatures {
    /// Densities of the five strongest angular peaks, descending,
    /// zero-padded.
    pub top5_densities: [f64; 5],
    /// Angle (degrees) of the angular-spectrum maximum.
    pub zeta_c: f64,
    /// Radial frequency of the radial-spectrum maximum.
    pub zeta_d: f64,
}

impl AngularFeatures {
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.top5_densities.to_vec();
        v.push(self.zeta_c);
        v.push(self.zeta_d);
        v
    }
}

/// Default polar resolution: half the grid side for radii, one-degree
/// angular bins.
pub fn default_polar_resolution(surface: &SurfaceGrid) -> (usize, usize) {
    ((surface.rows().min(surface.cols()) / 2).max(4), 180)
}

/// Angular-spectrum feature vector of a surface, length 7.
///
/// With `prefilter` the surface is first reduced to its Gaussian roughness
/// component; without it the FFT is applied to the surface directly.
pub fn angular_feature_vector(
    surface: &SurfaceGrid,
    prefilter: bool,
    g2d: &Gaussian2DConfig,
    peaks: &PeakConfig,
) -> Result<FeatureVector> {
    peaks.validate()?;
    let mut spec = if prefilter {
        apsd(&roughness_surface(surface, g2d)?)
    } else {
        apsd(surface)
    };
    // The DC bin is the trivial maximum (it leaks into neighboring polar
    // samples through interpolation); direction analysis runs without it.
    let (dr, dc_col) = spec.dc_position();
    let dc_value = spec.values.get(dr, dc_col);
    spec.values.set(dr, dc_col, 0.0);

    let (n_radii, n_angles) = default_polar_resolution(surface);
    let (radial, angular) = polar_spectra(&spec, n_radii, n_angles)?;

    // A constant surface has no off-DC energy beyond FFT roundoff; call the
    // angular spectrum flat rather than report noise peaks.
    let a_max = angular.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let flat = a_max == 0.0 || a_max <= 1e-12 * dc_value;

    let detected = if flat {
        Vec::new()
    } else {
        detect_peaks(&angular, peaks.mpd_psd, peaks.mph(&angular))
    };
    let mut top5 = [0.0; 5];
    for (slot, &(_, density)) in top5.iter_mut().zip(detected.iter()) {
        *slot = density;
    }

    let argmax = |v: &[f64]| {
        v.iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .unwrap_or(0)
    };
    let zeta_c = if flat {
        0.0
    } else {
        180.0 * argmax(&angular) as f64 / n_angles as f64
    };
    let zeta_d = spec.nyquist() * argmax(&radial) as f64 / (n_radii - 1) as f64;

    let features = AngularFeatures {
        top5_densities: top5,
        zeta_c,
        zeta_d,
    };
    Ok(FeatureVector {
        values: features.to_vec(),
        provenance: format!(
            "fft2d-angular:{}",
            if prefilter { "prefiltered" } else { "direct" }
        ),
    })
}
