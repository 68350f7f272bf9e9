//! Classical 1-D feature extraction: Gaussian mean-line filtering with
//! iterative cutoff selection, FFT denoising, and FFT/PSD peak features.
//!
//! Units follow the metrology convention: profile spacing is read in
//! millimeters and heights in micrometers wherever the cutoff band table is
//! involved. The synthetic data carries arbitrary units, so configs choose a
//! spacing that makes the cutoffs meaningful.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft_util::{fft_1d, ifft_1d};
use crate::surface_synth::Profile;
use crate::tda_features::FeatureVector;
use crate::util::{percentile, reflect_index};

/// `alpha = sqrt(ln 2 / pi)`, the Gaussian profile-filter constant.
pub const GAUSSIAN_ALPHA: f64 = 0.469_718_639_349_826_16;

/// Cutoff bands for nonperiodic profiles: raw Ra in micrometers mapped to
/// the cutoff wavelength in millimeters.
const CUTOFF_BANDS: [(f64, f64); 5] = [
    (0.02, 0.08),
    (0.1, 0.25),
    (2.0, 0.8),
    (10.0, 2.5),
    (f64::INFINITY, 8.0),
];

/// Cutoff for a given raw Ra (micrometers), from the band table.
pub fn cutoff_for_ra(ra: f64) -> f64 {
    for &(limit, cutoff) in &CUTOFF_BANDS {
        if ra <= limit {
            return cutoff;
        }
    }
    unreachable!("bands end with an infinite limit")
}

/// Arithmetic mean deviation of a height sequence about its mean.
fn ra_about_mean(heights: &[f64]) -> f64 {
    let mean = heights.iter().sum::<f64>() / heights.len() as f64;
    heights.iter().map(|z| (z - mean).abs()).sum::<f64>() / heights.len() as f64
}

/// Gaussian profile-filter kernel value at offset `x` for cutoff `cutoff`.
pub fn gaussian_kernel_value(x: f64, cutoff: f64) -> f64 {
    let al = GAUSSIAN_ALPHA * cutoff;
    (-(std::f64::consts::PI) * (x / al) * (x / al)).exp() / al
}

/// Mean line of a profile: convolution with the Gaussian kernel sampled at
/// the profile spacing over +/- cutoff, renormalized to unit sum, with
/// mirror boundary padding.
pub fn gaussian_mean_line(profile: &Profile, cutoff: f64) -> Result<Profile> {
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(Error::parameter("cutoff must be positive"));
    }
    let half = (cutoff / profile.spacing).floor() as usize;
    let mut kernel: Vec<f64> = (-(half as isize)..=half as isize)
        .map(|j| gaussian_kernel_value(j as f64 * profile.spacing, cutoff))
        .collect();
    let sum: f64 = kernel.iter().sum();
    for k in &mut kernel {
        *k /= sum;
    }

    let n = profile.len();
    let heights = &profile.heights;
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, &k) in kernel.iter().enumerate() {
            let idx = i as isize + j as isize - half as isize;
            acc += k * heights[reflect_index(idx, n)];
        }
        *o = acc;
    }
    Ok(profile.with_heights(out))
}

/// Pick the cutoff wavelength by the iterative band procedure.
///
/// Starting from the band of the raw Ra, the profile is filtered and the Ra
/// of the roughness profile re-banded until a fixpoint; a candidate larger
/// than the measurement length falls back to the first chosen cutoff, and a
/// revisited band keeps the current cutoff.
pub fn select_cutoff(profile: &Profile) -> Result<f64> {
    let length = profile.length();
    let first = cutoff_for_ra(ra_about_mean(&profile.heights));
    let mut current = first;
    let mut seen = vec![first];
    loop {
        if current > length {
            return Ok(first);
        }
        let mean_line = gaussian_mean_line(profile, current)?;
        let roughness: Vec<f64> = profile
            .heights
            .iter()
            .zip(&mean_line.heights)
            .map(|(z, m)| z - m)
            .collect();
        let next = cutoff_for_ra(ra_about_mean(&roughness));
        if next == current {
            return Ok(current);
        }
        if next > length {
            return Ok(first);
        }
        if seen.contains(&next) {
            return Ok(current);
        }
        seen.push(next);
        current = next;
    }
}

/// A profile minus its mean line, with the cutoff that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct RoughnessProfile {
    pub heights: Vec<f64>,
    pub spacing: f64,
    pub cutoff_used: f64,
}

/// Roughness profile via Gaussian filtering with automatic cutoff selection.
pub fn roughness_profile_gaussian(profile: &Profile) -> Result<RoughnessProfile> {
    let cutoff = select_cutoff(profile)?;
    let mean_line = gaussian_mean_line(profile, cutoff)?;
    let heights = profile
        .heights
        .iter()
        .zip(&mean_line.heights)
        .map(|(z, m)| z - m)
        .collect();
    Ok(RoughnessProfile {
        heights,
        spacing: profile.spacing,
        cutoff_used: cutoff,
    })
}

/// Mean line by FFT thresholding: magnitudes are normalized by the spectrum
/// maximum and every coefficient below `threshold` is zeroed (conjugate
/// pairs decided together so symmetry is preserved exactly), then the
/// spectrum is inverted.
pub fn fft_denoise_mean_line(profile: &Profile, threshold: f64) -> Result<Profile> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::parameter(format!(
            "threshold {threshold} outside [0, 1]"
        )));
    }
    let n = profile.len();
    let mut buf: Vec<Complex64> = profile
        .heights
        .iter()
        .map(|&h| Complex64::new(h, 0.0))
        .collect();
    fft_1d(&mut buf);

    let max_mag = buf.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max_mag > 0.0 {
        // Judge conjugate pairs (k, n - k) by their joint maximum so the
        // zeroed set is exactly symmetric.
        for k in 0..=n / 2 {
            let mirror = (n - k) % n;
            let mag = buf[k].norm().max(buf[mirror].norm()) / max_mag;
            if mag < threshold {
                buf[k] = Complex64::new(0.0, 0.0);
                buf[mirror] = Complex64::new(0.0, 0.0);
            }
        }
    }

    ifft_1d(&mut buf);
    let scale = 1.0 / n as f64;
    let imag_residue = buf.iter().map(|c| (c.im * scale).abs()).fold(0.0, f64::max);
    let height_scale = max_mag.max(1.0);
    if imag_residue > 1e-9 * height_scale {
        return Err(Error::data(format!(
            "inverse FFT imaginary residue {imag_residue} exceeds tolerance"
        )));
    }
    Ok(profile.with_heights(buf.iter().map(|c| c.re * scale).collect()))
}

/// Roughness profile via FFT denoising at a fixed threshold.
pub fn roughness_profile_fft(profile: &Profile, threshold: f64) -> Result<RoughnessProfile> {
    let mean_line = fft_denoise_mean_line(profile, threshold)?;
    let heights = profile
        .heights
        .iter()
        .zip(&mean_line.heights)
        .map(|(z, m)| z - m)
        .collect();
    Ok(RoughnessProfile {
        heights,
        spacing: profile.spacing,
        cutoff_used: threshold,
    })
}

/// Peak-selection settings for spectral feature vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakConfig {
    /// Minimum peak distance (in bins) on the FFT magnitude spectrum.
    pub mpd_fft: usize,
    /// Minimum peak distance (in bins) on the PSD.
    pub mpd_psd: usize,
    /// Interpolation factor in the minimum-peak-height formula.
    pub alpha: f64,
    /// Percentile of the amplitudes taken as the formula's low anchor.
    pub pct_low: f64,
    /// Percentile taken as the high anchor.
    pub pct_high: f64,
    /// Peaks retained per spectrum.
    pub n_peaks: usize,
}

impl Default for PeakConfig {
    fn default() -> Self {
        PeakConfig {
            mpd_fft: 10,
            mpd_psd: 7,
            alpha: 0.5,
            pct_low: 40.0,
            pct_high: 50.0,
            n_peaks: 5,
        }
    }
}

impl PeakConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mpd_fft < 1 || self.mpd_psd < 1 {
            return Err(Error::parameter("minimum peak distance must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::parameter("alpha must be in [0, 1]"));
        }
        if self.pct_low > self.pct_high {
            return Err(Error::parameter("pct_low must not exceed pct_high"));
        }
        if self.n_peaks == 0 {
            return Err(Error::parameter("n_peaks must be >= 1"));
        }
        Ok(())
    }

    /// Minimum peak height for a spectrum: low anchor plus `alpha` times the
    /// anchor spread, both anchors being percentiles of the amplitudes.
    pub fn mph(&self, spectrum: &[f64]) -> f64 {
        let y_min = percentile(spectrum, self.pct_low);
        let y_max = percentile(spectrum, self.pct_high);
        y_min + self.alpha * (y_max - y_min)
    }
}

/// Local maxima of `spectrum` at least `mph` high, greedily retained in
/// descending amplitude order under a pairwise index distance of `mpd`.
/// Returned sorted by descending amplitude (ties by ascending index).
pub fn detect_peaks(spectrum: &[f64], mpd: usize, mph: f64) -> Vec<(usize, f64)> {
    let mpd = mpd.max(1);
    let mut candidates: Vec<(usize, f64)> = Vec::new();
    for i in 1..spectrum.len().saturating_sub(1) {
        if spectrum[i] > spectrum[i - 1] && spectrum[i] > spectrum[i + 1] && spectrum[i] >= mph {
            candidates.push((i, spectrum[i]));
        }
    }
    candidates.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));

    let mut kept: Vec<(usize, f64)> = Vec::new();
    for (i, v) in candidates {
        if kept.iter().all(|&(j, _)| i.abs_diff(j) >= mpd) {
            kept.push((i, v));
        }
    }
    kept
}

/// One-sided FFT magnitude spectrum (bins 0..=n/2).
pub fn magnitude_spectrum(heights: &[f64]) -> Vec<f64> {
    let n = heights.len();
    let mut buf: Vec<Complex64> = heights.iter().map(|&h| Complex64::new(h, 0.0)).collect();
    fft_1d(&mut buf);
    (0..=n / 2).map(|k| buf[k].norm()).collect()
}

/// One-sided unwindowed periodogram with interior bins doubled.
pub fn power_spectral_density(heights: &[f64], spacing: f64) -> Vec<f64> {
    let n = heights.len();
    let mut buf: Vec<Complex64> = heights.iter().map(|&h| Complex64::new(h, 0.0)).collect();
    fft_1d(&mut buf);
    let scale = spacing / n as f64;
    (0..=n / 2)
        .map(|k| {
            let p = buf[k].norm_sqr() * scale;
            if k == 0 || (n.is_multiple_of(2) && k == n / 2) {
                p
            } else {
                2.0 * p
            }
        })
        .collect()
}

/// Peak-coordinate features: the top `n_peaks` (frequency, amplitude) pairs
/// of the FFT magnitude spectrum followed by those of the PSD, zero-padded
/// when fewer peaks exist. Length is `4 * n_peaks`.
pub fn peak_feature_vector(profile: &Profile, config: &PeakConfig) -> Result<FeatureVector> {
    config.validate()?;
    let freq_step = 1.0 / (profile.len() as f64 * profile.spacing);

    let mut values = Vec::with_capacity(4 * config.n_peaks);
    let spectra = [
        (magnitude_spectrum(&profile.heights), config.mpd_fft),
        (
            power_spectral_density(&profile.heights, profile.spacing),
            config.mpd_psd,
        ),
    ];
    for (spectrum, mpd) in &spectra {
        let peaks = detect_peaks(spectrum, *mpd, config.mph(spectrum));
        for k in 0..config.n_peaks {
            match peaks.get(k) {
                Some(&(idx, amp)) => {
                    values.push(idx as f64 * freq_step);
                    values.push(amp);
                }
                None => {
                    values.push(0.0);
                    values.push(0.0);
                }
            }
        }
    }
    Ok(FeatureVector {
        values,
        provenance: format!(
            "fft-peaks:mpd{}x{}:n{}",
            config.mpd_fft, config.mpd_psd, config.n_peaks
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface_synth::RoughnessLabel;

    fn profile(heights: Vec<f64>, spacing: f64) -> Profile {
        Profile::new(heights, spacing, RoughnessLabel::Rough, 0).unwrap()
    }

    fn sine(n: usize, spacing: f64, wavelength: f64, amp: f64) -> Vec<f64> {
        (0..n)
            .map(|i| amp * (std::f64::consts::TAU * i as f64 * spacing / wavelength).sin())
            .collect()
    }

    #[test]
    fn kernel_value_at_zero() {
        let cutoff = 0.8;
        let expected = 1.0 / (GAUSSIAN_ALPHA * cutoff);
        assert!((gaussian_kernel_value(0.0, cutoff) - expected).abs() < 1e-12);
    }

    #[test]
    fn mean_line_of_constant_is_constant() {
        let p = profile(vec![3.25; 64], 0.01);
        let m = gaussian_mean_line(&p, 0.25).unwrap();
        for &v in &m.heights {
            assert!((v - 3.25).abs() < 1e-9);
        }
    }

    #[test]
    fn mean_line_rejects_bad_cutoff() {
        let p = profile(vec![0.0; 16], 1.0);
        assert!(gaussian_mean_line(&p, 0.0).is_err());
        assert!(gaussian_mean_line(&p, -1.0).is_err());
    }

    #[test]
    fn long_wavelength_sine_passes_through() {
        // Wavelength 10x the cutoff: transmission ~ exp(-ln2/100) ~ 0.993.
        let cutoff = 0.8;
        let spacing = 0.01;
        let heights = sine(4000, spacing, 10.0 * cutoff, 1.0);
        let p = profile(heights.clone(), spacing);
        let m = gaussian_mean_line(&p, cutoff).unwrap();
        // Compare amplitudes away from the boundary.
        let amp_in = heights[1000..3000].iter().cloned().fold(0.0, f64::max);
        let amp_out = m.heights[1000..3000].iter().cloned().fold(0.0, f64::max);
        assert!(amp_out >= 0.9 * amp_in, "transmission {}", amp_out / amp_in);
    }

    #[test]
    fn long_wavelength_sine_leaves_little_roughness() {
        let cutoff = 0.8;
        let spacing = 0.01;
        let heights = sine(4000, spacing, 10.0 * cutoff, 1.0);
        let p = profile(heights.clone(), spacing);
        let m = gaussian_mean_line(&p, cutoff).unwrap();
        let rough: Vec<f64> = heights
            .iter()
            .zip(&m.heights)
            .map(|(z, ml)| z - ml)
            .collect();
        let ra_in = ra_about_mean(&heights[1000..3000]);
        let ra_rough = ra_about_mean(&rough[1000..3000]);
        assert!(ra_rough <= 0.1 * ra_in, "ratio {}", ra_rough / ra_in);
    }

    #[test]
    fn cutoff_band_table() {
        assert_eq!(cutoff_for_ra(0.01), 0.08);
        assert_eq!(cutoff_for_ra(0.02), 0.08);
        assert_eq!(cutoff_for_ra(0.05), 0.25);
        assert_eq!(cutoff_for_ra(1.0), 0.8);
        assert_eq!(cutoff_for_ra(5.0), 2.5);
        assert_eq!(cutoff_for_ra(50.0), 8.0);
    }

    #[test]
    fn select_cutoff_falls_back_when_exceeding_length() {
        // Ra ~ 5 um -> 2.5 mm cutoff candidate; measurement length is only
        // 2 mm, so the first chosen value is returned.
        let heights: Vec<f64> = (0..101).map(|i| if i % 2 == 0 { 5.0 } else { -5.0 }).collect();
        let p = profile(heights, 0.02);
        assert!((p.length() - 2.0).abs() < 1e-12);
        let ra = ra_about_mean(&p.heights);
        let first = cutoff_for_ra(ra);
        assert!(first > p.length());
        assert_eq!(select_cutoff(&p).unwrap(), first);
    }

    #[test]
    fn roughness_gaussian_constant_is_zero() {
        let p = profile(vec![1.5; 256], 0.01);
        let r = roughness_profile_gaussian(&p).unwrap();
        assert!(r.heights.iter().all(|&v| v.abs() < 1e-9));
    }

    #[test]
    fn white_noise_keeps_most_variance_in_roughness() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let heights: Vec<f64> = (0..512).map(|_| rng.random_range(-1.0..1.0)).collect();
        let p = profile(heights.clone(), 0.01);
        let r = roughness_profile_gaussian(&p).unwrap();
        let var = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64
        };
        assert!(var(&r.heights) >= 0.5 * var(&heights));
    }

    #[test]
    fn mean_line_plus_roughness_reconstructs() {
        let heights = sine(128, 0.01, 0.3, 2.0);
        let p = profile(heights.clone(), 0.01);
        let r = roughness_profile_gaussian(&p).unwrap();
        let m = gaussian_mean_line(&p, r.cutoff_used).unwrap();
        for ((z, ml), rh) in heights.iter().zip(&m.heights).zip(&r.heights) {
            assert!((ml + rh - z).abs() < 1e-12);
        }
    }

    #[test]
    fn fft_threshold_zero_is_identity() {
        let heights = sine(100, 1.0, 17.0, 1.3);
        let p = profile(heights.clone(), 1.0);
        let m = fft_denoise_mean_line(&p, 0.0).unwrap();
        let scale = heights.iter().map(|h| h.abs()).fold(1.0, f64::max);
        for (a, b) in m.heights.iter().zip(&heights) {
            assert!((a - b).abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn fft_threshold_one_keeps_only_max_bin() {
        // Two tones with distinct amplitudes: only the strong one survives.
        let n = 128;
        let heights: Vec<f64> = (0..n)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / n as f64;
                3.0 * (4.0 * t).sin() + 1.0 * (11.0 * t).sin()
            })
            .collect();
        let p = profile(heights, 1.0);
        let m = fft_denoise_mean_line(&p, 1.0).unwrap();
        let spec = magnitude_spectrum(&m.heights);
        let max = spec.iter().cloned().fold(0.0, f64::max);
        for (k, &v) in spec.iter().enumerate() {
            if k == 4 {
                assert!(v > 0.9 * max);
            } else {
                assert!(v < 1e-6 * max, "bin {k} survived with {v}");
            }
        }
    }

    #[test]
    fn fft_denoise_recovers_clean_sine() {
        use rand::{Rng, SeedableRng};
        let n = 256;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let clean: Vec<f64> = (0..n)
            .map(|i| (std::f64::consts::TAU * 5.0 * i as f64 / n as f64).sin())
            .collect();
        let noisy: Vec<f64> = clean
            .iter()
            .map(|&c| c + 0.01 * rng.random_range(-1.0..1.0))
            .collect();
        let p = profile(noisy, 1.0);
        let m = fft_denoise_mean_line(&p, 0.4).unwrap();
        let dot: f64 = m.heights.iter().zip(&clean).map(|(a, b)| a * b).sum();
        let na: f64 = m.heights.iter().map(|a| a * a).sum::<f64>().sqrt();
        let nb: f64 = clean.iter().map(|b| b * b).sum::<f64>().sqrt();
        assert!(dot / (na * nb) >= 0.999);
    }

    #[test]
    fn fft_denoise_idempotent_at_04() {
        let heights = sine(128, 1.0, 16.0, 1.0)
            .iter()
            .zip(sine(128, 1.0, 5.0, 0.2))
            .map(|(a, b)| a + b)
            .collect();
        let p = profile(heights, 1.0);
        let once = fft_denoise_mean_line(&p, 0.4).unwrap();
        let twice = fft_denoise_mean_line(&once, 0.4).unwrap();
        for (a, b) in twice.heights.iter().zip(&once.heights) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn detect_peaks_hand_case() {
        let spectrum = [0.0, 1.0, 0.0, 5.0, 0.0, 2.0, 0.0];
        let peaks = detect_peaks(&spectrum, 2, 1.5);
        assert_eq!(peaks, vec![(3, 5.0), (5, 2.0)]);
    }

    #[test]
    fn detect_peaks_empty_when_mph_too_high() {
        let spectrum = [0.0, 1.0, 0.0, 5.0, 0.0];
        assert!(detect_peaks(&spectrum, 1, 6.0).is_empty());
    }

    #[test]
    fn detect_peaks_enforces_distance() {
        let spectrum = [0.0, 3.0, 0.0, 4.0, 0.0, 3.5, 0.0];
        let peaks = detect_peaks(&spectrum, 3, 0.5);
        assert_eq!(peaks[0], (3, 4.0));
        assert!(peaks.iter().all(|&(i, _)| i == 3 || i.abs_diff(3) >= 3));
    }

    #[test]
    fn mph_formula() {
        let config = PeakConfig::default();
        // Eleven values whose 40th percentile lands exactly on 2.0 and
        // whose 50th lands exactly on 4.0: mph = 2 + 0.5 * (4 - 2) = 3.
        let spectrum = [0.0, 1.0, 1.5, 1.8, 2.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0];
        let got = config.mph(&spectrum);
        assert!((got - 3.0).abs() < 1e-12, "mph = {got}");
    }

    #[test]
    fn peak_vector_length_and_padding() {
        let config = PeakConfig::default();
        let p = profile(vec![0.0; 64], 1.0);
        let v = peak_feature_vector(&p, &config).unwrap();
        assert_eq!(v.values.len(), 20);
        assert!(v.values.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn peak_vector_finds_sine_frequency() {
        let n = 128;
        let k = 9;
        let heights: Vec<f64> = (0..n)
            .map(|i| (std::f64::consts::TAU * k as f64 * i as f64 / n as f64).sin())
            .collect();
        let p = profile(heights, 1.0);
        let v = peak_feature_vector(&p, &PeakConfig::default()).unwrap();
        let freq_step = 1.0 / (n as f64);
        assert!((v.values[0] - k as f64 * freq_step).abs() <= freq_step + 1e-12);
    }
}
