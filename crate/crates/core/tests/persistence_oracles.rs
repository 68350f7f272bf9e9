//! Oracle equivalence, Euler consistency, and stability checks for the
//! persistence module, including property-based runs.

mod common;

use common::{naive_image_pd, random_distinct_grid, random_grid, rng, sorted, sweep_profile_pd};
use proptest::prelude::*;
use rand::Rng;
use toposurf::persistence::{
    bottleneck_distance, sublevel_pd_image, sublevel_pd_image_cfg, sublevel_pd_profile,
    FiltrationConfig,
};
use toposurf::surface_synth::RoughnessLabel;
use toposurf::{Grid, Profile};

fn profile(heights: Vec<f64>) -> Profile {
    Profile::new(heights, 1.0, RoughnessLabel::Rough, 0).unwrap()
}

#[test]
fn image_matches_naive_reduction_on_random_grids() {
    let mut rng = rng(2024);
    for case in 0..200 {
        let grid = random_grid(6, 6, 10, &mut rng);
        let pds = sublevel_pd_image(&grid, 1).unwrap();
        let (h0, h1) = naive_image_pd(&grid);
        assert_eq!(sorted(pds[0].pairs().to_vec()), h0, "H0 mismatch, case {case}");
        assert_eq!(sorted(pds[1].pairs().to_vec()), h1, "H1 mismatch, case {case}");
    }
}

#[test]
fn image_matches_naive_on_rectangular_grids() {
    let mut rng = rng(77);
    for _ in 0..50 {
        let grid = random_grid(4, 9, 6, &mut rng);
        let pds = sublevel_pd_image(&grid, 1).unwrap();
        let (h0, h1) = naive_image_pd(&grid);
        assert_eq!(sorted(pds[0].pairs().to_vec()), h0);
        assert_eq!(sorted(pds[1].pairs().to_vec()), h1);
    }
}

#[test]
fn profile_matches_level_sweep_on_random_profiles() {
    let mut rng = rng(55);
    for case in 0..200 {
        let heights: Vec<f64> = (0..64).map(|_| rng.random_range(0..12) as f64).collect();
        let pd = sublevel_pd_profile(&profile(heights.clone())).unwrap();
        let expected = sweep_profile_pd(&heights);
        assert_eq!(sorted(pd.pairs().to_vec()), expected, "case {case}");
    }
}

#[test]
fn euler_characteristic_consistency() {
    // Beta_0 - beta_1 of the sublevel complex must equal V - E + F at every
    // level. Distinct values keep the essential pair identifiable.
    let mut rng = rng(31);
    for _ in 0..40 {
        let grid = random_distinct_grid(5, 5, &mut rng);
        let keep_all = FiltrationConfig {
            keep_zero_persistence: true,
        };
        let pds = sublevel_pd_image_cfg(&grid, 1, keep_all).unwrap();
        let global_max = grid.max();

        let mut levels: Vec<f64> = grid.data().to_vec();
        levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for &level in &levels {
            let alive0 = pds[0]
                .pairs()
                .iter()
                .filter(|&&(b, d)| b <= level && level < d)
                .count()
                + usize::from(level >= global_max);
            let alive1 = pds[1]
                .pairs()
                .iter()
                .filter(|&&(b, d)| b <= level && level < d)
                .count();

            let (rows, cols) = (grid.rows(), grid.cols());
            let mut v = 0i64;
            let mut e = 0i64;
            let mut f = 0i64;
            for r in 0..rows {
                for c in 0..cols {
                    if grid.get(r, c) <= level {
                        v += 1;
                    }
                    if c + 1 < cols && grid.get(r, c).max(grid.get(r, c + 1)) <= level {
                        e += 1;
                    }
                    if r + 1 < rows && grid.get(r, c).max(grid.get(r + 1, c)) <= level {
                        e += 1;
                    }
                    if r + 1 < rows && c + 1 < cols {
                        let m = grid
                            .get(r, c)
                            .max(grid.get(r, c + 1))
                            .max(grid.get(r + 1, c))
                            .max(grid.get(r + 1, c + 1));
                        if m <= level {
                            f += 1;
                        }
                    }
                }
            }
            assert_eq!(
                alive0 as i64 - alive1 as i64,
                v - e + f,
                "Euler mismatch at level {level}"
            );
        }
    }
}

#[test]
fn image_stability_under_perturbation() {
    let mut rng = rng(404);
    for case in 0..50 {
        let n = 10;
        let base: Vec<f64> = (0..n * n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let eps = rng.random_range(0.01..0.5);
        let perturbed: Vec<f64> = base
            .iter()
            .map(|v| v + rng.random_range(-eps..eps))
            .collect();
        let ga = Grid::new(n, n, base).unwrap();
        let gb = Grid::new(n, n, perturbed).unwrap();
        let pa = sublevel_pd_image(&ga, 1).unwrap();
        let pb = sublevel_pd_image(&gb, 1).unwrap();
        for d in 0..2 {
            let dist = bottleneck_distance(&pa[d], &pb[d]).unwrap();
            assert!(
                dist <= eps + 1e-12,
                "H{d} bottleneck {dist} > eps {eps}, case {case}"
            );
        }
    }
}

#[test]
fn profile_stability_under_perturbation() {
    let mut rng = rng(808);
    for case in 0..50 {
        let base: Vec<f64> = (0..48).map(|_| rng.random_range(-2.0..2.0)).collect();
        let eps = rng.random_range(0.01..0.5);
        let perturbed: Vec<f64> = base
            .iter()
            .map(|v| v + rng.random_range(-eps..eps))
            .collect();
        let pa = sublevel_pd_profile(&profile(base)).unwrap();
        let pb = sublevel_pd_profile(&profile(perturbed)).unwrap();
        let dist = bottleneck_distance(&pa, &pb).unwrap();
        assert!(dist <= eps + 1e-12, "bottleneck {dist} > eps {eps}, case {case}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prop_image_oracle_equivalence(values in proptest::collection::vec(0u32..8, 25)) {
        let data: Vec<f64> = values.iter().map(|&v| v as f64).collect();
        let grid = Grid::new(5, 5, data).unwrap();
        let pds = sublevel_pd_image(&grid, 1).unwrap();
        let (h0, h1) = naive_image_pd(&grid);
        prop_assert_eq!(sorted(pds[0].pairs().to_vec()), h0);
        prop_assert_eq!(sorted(pds[1].pairs().to_vec()), h1);
    }

    #[test]
    fn prop_profile_oracle_equivalence(values in proptest::collection::vec(0u32..10, 2..40)) {
        let heights: Vec<f64> = values.iter().map(|&v| v as f64).collect();
        let pd = sublevel_pd_profile(&profile(heights.clone())).unwrap();
        prop_assert_eq!(sorted(pd.pairs().to_vec()), sweep_profile_pd(&heights));
    }

    #[test]
    fn prop_deaths_dominate_births(values in proptest::collection::vec(-100.0f64..100.0, 16)) {
        let grid = Grid::new(4, 4, values).unwrap();
        for pd in sublevel_pd_image(&grid, 1).unwrap() {
            for &(b, d) in pd.pairs() {
                prop_assert!(d >= b);
                prop_assert!(d <= pd.global_max());
            }
        }
    }

    #[test]
    fn prop_translation_equivariance(
        values in proptest::collection::vec(-10.0f64..10.0, 9),
        shift in -50.0f64..50.0,
    ) {
        let grid = Grid::new(3, 3, values.clone()).unwrap();
        let shifted = Grid::new(3, 3, values.iter().map(|v| v + shift).collect()).unwrap();
        let a = sublevel_pd_image(&grid, 1).unwrap();
        let b = sublevel_pd_image(&shifted, 1).unwrap();
        for (pa, pb) in a.iter().zip(&b) {
            prop_assert_eq!(pa.len(), pb.len());
            for (&(b1, d1), &(b2, d2)) in pa.pairs().iter().zip(pb.pairs()) {
                prop_assert_eq!(b1 + shift, b2);
                prop_assert_eq!(d1 + shift, d2);
            }
        }
    }
}
