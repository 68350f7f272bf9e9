//! Property-based checks for the classical baseline operations.

use proptest::prelude::*;
use toposurf::profile_baselines::{
    cutoff_for_ra, detect_peaks, fft_denoise_mean_line, gaussian_mean_line, peak_feature_vector,
    roughness_profile_fft, roughness_profile_gaussian, select_cutoff, PeakConfig,
};
use toposurf::surface_synth::RoughnessLabel;
use toposurf::Profile;

fn profile(heights: Vec<f64>, spacing: f64) -> Profile {
    Profile::new(heights, spacing, RoughnessLabel::Rough, 0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn detected_peaks_respect_mpd_and_mph(
        spectrum in proptest::collection::vec(0.0f64..10.0, 8..64),
        mpd in 1usize..8,
        mph in 0.0f64..8.0,
    ) {
        let peaks = detect_peaks(&spectrum, mpd, mph);
        for &(i, amp) in &peaks {
            prop_assert!(amp >= mph);
            prop_assert!(i > 0 && i + 1 < spectrum.len());
            prop_assert!(spectrum[i] > spectrum[i - 1] && spectrum[i] > spectrum[i + 1]);
        }
        for (a, &(i, _)) in peaks.iter().enumerate() {
            for &(j, _) in &peaks[a + 1..] {
                prop_assert!(i.abs_diff(j) >= mpd);
            }
        }
        // Descending amplitude order.
        prop_assert!(peaks.windows(2).all(|w| w[0].1 >= w[1].1));
    }

    #[test]
    fn gaussian_mean_line_plus_roughness_reconstructs(
        heights in proptest::collection::vec(-5.0f64..5.0, 16..80),
    ) {
        let p = profile(heights.clone(), 0.01);
        let r = roughness_profile_gaussian(&p).unwrap();
        let m = gaussian_mean_line(&p, r.cutoff_used).unwrap();
        for ((z, ml), rh) in heights.iter().zip(&m.heights).zip(&r.heights) {
            prop_assert!((ml + rh - z).abs() <= 1e-12 * z.abs().max(1.0));
        }
    }

    #[test]
    fn fft_mean_line_plus_roughness_reconstructs(
        heights in proptest::collection::vec(-5.0f64..5.0, 16..80),
    ) {
        let p = profile(heights.clone(), 1.0);
        let r = roughness_profile_fft(&p, 0.4).unwrap();
        let m = fft_denoise_mean_line(&p, 0.4).unwrap();
        for ((z, ml), rh) in heights.iter().zip(&m.heights).zip(&r.heights) {
            prop_assert!((ml + rh - z).abs() <= 1e-12 * z.abs().max(1.0));
        }
    }

    #[test]
    fn fft_denoise_idempotent_at_fixed_thresholds(
        heights in proptest::collection::vec(-3.0f64..3.0, 16..64),
    ) {
        for threshold in [0.0, 0.4] {
            let p = profile(heights.clone(), 1.0);
            let once = fft_denoise_mean_line(&p, threshold).unwrap();
            let twice = fft_denoise_mean_line(&once, threshold).unwrap();
            let scale = heights.iter().map(|h| h.abs()).fold(1.0, f64::max);
            for (a, b) in twice.heights.iter().zip(&once.heights) {
                prop_assert!((a - b).abs() <= 1e-9 * scale);
            }
        }
    }

    #[test]
    fn selected_cutoff_is_from_the_band_table(
        heights in proptest::collection::vec(-20.0f64..20.0, 16..128),
        spacing in prop_oneof![Just(0.001f64), Just(0.01), Just(0.1)],
    ) {
        let p = profile(heights, spacing);
        let cutoff = select_cutoff(&p).unwrap();
        prop_assert!([0.08, 0.25, 0.8, 2.5, 8.0].contains(&cutoff));
    }

    #[test]
    fn peak_vector_length_depends_only_on_config(
        heights in proptest::collection::vec(-3.0f64..3.0, 16..64),
        n_peaks in 1usize..8,
    ) {
        let config = PeakConfig { n_peaks, ..PeakConfig::default() };
        let v = peak_feature_vector(&profile(heights, 1.0), &config).unwrap();
        prop_assert_eq!(v.values.len(), 4 * n_peaks);
    }
}

#[test]
fn band_table_is_monotone() {
    let ras = [0.005, 0.02, 0.05, 0.1, 1.0, 2.0, 5.0, 10.0, 100.0];
    let cutoffs: Vec<f64> = ras.iter().map(|&ra| cutoff_for_ra(ra)).collect();
    assert!(cutoffs.windows(2).all(|w| w[0] <= w[1]));
}
