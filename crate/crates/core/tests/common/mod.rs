//! Shared oracle implementations for integration tests.
//!
//! These deliberately re-derive persistence from first principles along
//! different code paths than the library: a full left-to-right matrix
//! reduction without clearing for images, and a level-by-level union-find
//! sweep for profiles.

// Each integration test binary compiles this module separately and uses a
// different subset of it.
#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use toposurf::Grid;

/// Diagram pairs sorted for multiset comparison.
pub fn sorted(mut pairs: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pairs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pairs
}

/// Naive cubical persistence of a grid: explicit cell complex, standard
/// left-to-right column reduction over all dimensions, no clearing.
/// Returns (H0, H1) with the essential component finitized at the global
/// max and zero-persistence pairs dropped (essential kept).
pub fn naive_image_pd(grid: &Grid) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let (rows, cols) = (grid.rows(), grid.cols());

    // Cell table: (value, dim, tiebreak id, boundary as cell indices).
    let mut value = Vec::new();
    let mut dim = Vec::new();
    let mut boundary: Vec<Vec<usize>> = Vec::new();

    let vid = |r: usize, c: usize| r * cols + c;
    for r in 0..rows {
        for c in 0..cols {
            value.push(grid.get(r, c));
            dim.push(0usize);
            boundary.push(vec![]);
        }
    }
    let mut h_edge = vec![vec![0usize; cols.saturating_sub(1)]; rows];
    for r in 0..rows {
        for c in 0..cols - 1 {
            h_edge[r][c] = value.len();
            value.push(grid.get(r, c).max(grid.get(r, c + 1)));
            dim.push(1);
            boundary.push(vec![vid(r, c), vid(r, c + 1)]);
        }
    }
    let mut v_edge = vec![vec![0usize; cols]; rows.saturating_sub(1)];
    for r in 0..rows - 1 {
        for c in 0..cols {
            v_edge[r][c] = value.len();
            value.push(grid.get(r, c).max(grid.get(r + 1, c)));
            dim.push(1);
            boundary.push(vec![vid(r, c), vid(r + 1, c)]);
        }
    }
    for r in 0..rows - 1 {
        for c in 0..cols - 1 {
            let v = grid
                .get(r, c)
                .max(grid.get(r, c + 1))
                .max(grid.get(r + 1, c))
                .max(grid.get(r + 1, c + 1));
            value.push(v);
            dim.push(2);
            boundary.push(vec![h_edge[r][c], h_edge[r + 1][c], v_edge[r][c], v_edge[r][c + 1]]);
        }
    }

    let n = value.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        value[a]
            .partial_cmp(&value[b])
            .unwrap()
            .then(dim[a].cmp(&dim[b]))
            .then(a.cmp(&b))
    });
    let mut pos = vec![0usize; n];
    for (p, &cell) in order.iter().enumerate() {
        pos[cell] = p;
    }

    // Columns in filtration order, entries as positions.
    let mut columns: Vec<Vec<usize>> = order
        .iter()
        .map(|&cell| {
            let mut col: Vec<usize> = boundary[cell].iter().map(|&f| pos[f]).collect();
            col.sort_unstable();
            col
        })
        .collect();

    let mut pivot: Vec<Option<usize>> = vec![None; n];
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..n {
        loop {
            let Some(&low) = columns[j].last() else { break };
            match pivot[low] {
                Some(other) => {
                    let merged = sym_diff(&columns[j], &columns[other]);
                    columns[j] = merged;
                }
                None => {
                    pivot[low] = Some(j);
                    pairs.push((low, j));
                    break;
                }
            }
        }
    }

    let global_max = grid.max();
    let global_min = grid.min();
    let mut h0 = Vec::new();
    let mut h1 = Vec::new();
    for (birth_pos, death_pos) in pairs {
        let birth_cell = order[birth_pos];
        let death_cell = order[death_pos];
        let (b, d) = (value[birth_cell], value[death_cell]);
        if b == d {
            continue;
        }
        match dim[birth_cell] {
            0 => h0.push((b, d)),
            1 => h1.push((b, d)),
            _ => panic!("no dimension-2 births on a 2-complex with no 3-cells"),
        }
    }
    h0.push((global_min, global_max));
    (sorted(h0), sorted(h1))
}

fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Brute-force 0D persistence of a profile: sweep the sorted unique values,
/// at each level activate vertices and union across every edge whose max
/// endpoint is below the level. Zero-persistence pairs dropped, essential
/// finitized at the global max.
pub fn sweep_profile_pd(heights: &[f64]) -> Vec<(f64, f64)> {
    let n = heights.len();
    let mut levels: Vec<f64> = heights.to_vec();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    levels.dedup();

    let mut parent: Vec<usize> = (0..n).collect();
    let birth: Vec<f64> = heights.to_vec();
    let mut active = vec![false; n];
    let mut pairs = Vec::new();

    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    for &level in &levels {
        for (v, &h) in heights.iter().enumerate() {
            if h == level {
                active[v] = true;
            }
        }
        for e in 0..n - 1 {
            if !(active[e] && active[e + 1]) {
                continue;
            }
            if heights[e].max(heights[e + 1]) > level {
                continue;
            }
            let ra = find(&mut parent, e);
            let rb = find(&mut parent, e + 1);
            if ra == rb {
                continue;
            }
            let (elder, younger) = if birth[ra] <= birth[rb] { (ra, rb) } else { (rb, ra) };
            if birth[younger] != level {
                pairs.push((birth[younger], level));
            }
            parent[younger] = elder;
        }
    }

    let global_min = heights.iter().cloned().fold(f64::INFINITY, f64::min);
    let global_max = heights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    pairs.push((global_min, global_max));
    sorted(pairs)
}

/// Random integer-valued grid (values shuffled so ties exist).
pub fn random_grid(rows: usize, cols: usize, max_value: u32, rng: &mut ChaCha8Rng) -> Grid {
    let data: Vec<f64> = (0..rows * cols)
        .map(|_| rng.random_range(0..max_value) as f64)
        .collect();
    Grid::new(rows, cols, data).unwrap()
}

/// Random grid with all-distinct values (a shuffled permutation).
pub fn random_distinct_grid(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Grid {
    use rand::seq::SliceRandom;
    let mut values: Vec<f64> = (0..rows * cols).map(|v| v as f64).collect();
    values.shuffle(rng);
    Grid::new(rows, cols, values).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Radially averaged power spectral density of a square grid, in integer
/// frequency bins, plus the least-squares slope of log PSD against log |q|
/// over radii `[r_lo, r_hi]`.
pub fn radial_psd_log_slope(psds: &[Vec<f64>], size: usize, r_lo: usize, r_hi: usize) -> f64 {
    // Average the radial profiles over the provided per-seed PSDs first.
    let n_bins = size / 2;
    let mut sums = vec![0.0; n_bins];
    let mut counts = vec![0usize; n_bins];
    for psd in psds {
        for i in 0..size {
            let qi = signed_freq(i, size);
            for j in 0..size {
                let qj = signed_freq(j, size);
                let r = ((qi * qi + qj * qj) as f64).sqrt();
                let bin = r.round() as usize;
                if bin >= 1 && bin < n_bins {
                    sums[bin] += psd[i * size + j];
                    counts[bin] += 1;
                }
            }
        }
    }

    let points: Vec<(f64, f64)> = (r_lo..=r_hi)
        .filter(|&r| counts[r] > 0 && sums[r] > 0.0)
        .map(|r| ((r as f64).ln(), (sums[r] / counts[r] as f64).ln()))
        .collect();
    least_squares_slope(&points)
}

fn signed_freq(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Unnormalized |DFT|^2 of a grid, computed directly with rustfft (not via
/// the library's spectral code), row-major.
pub fn raw_psd(grid: &Grid) -> Vec<f64> {
    use rustfft::num_complex::Complex64;
    use rustfft::FftPlanner;
    let (rows, cols) = (grid.rows(), grid.cols());
    let mut buf: Vec<Complex64> = grid
        .data()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft_forward(cols);
    for row in buf.chunks_exact_mut(cols) {
        row_fft.process(row);
    }
    // Transpose, transform, transpose back.
    let mut t = vec![Complex64::default(); buf.len()];
    for r in 0..rows {
        for c in 0..cols {
            t[c * rows + r] = buf[r * cols + c];
        }
    }
    let col_fft = planner.plan_fft_forward(rows);
    for col in t.chunks_exact_mut(rows) {
        col_fft.process(col);
    }
    let mut out = vec![0.0; buf.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[r * cols + c] = t[c * rows + r].norm_sqr();
        }
    }
    out
}
