//! Profile and areal roughness parameters used as classical feature vectors.
//!
//! Heights are mean-centered before any moment is taken, so every parameter
//! is invariant to a constant offset. Degenerate higher moments (zero RMS)
//! are reported as 0 to keep feature matrices rectangular.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::profile_baselines::RoughnessProfile;
use crate::surface_synth::SurfaceGrid;

/// Height, spatial, and hybrid parameters of a roughness profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileParams {
    pub ra: f64,
    pub rq: f64,
    pub rsk: f64,
    pub rku: f64,
    pub rp: f64,
    pub rv: f64,
    pub rz: f64,
    pub rdq: f64,
    pub rsm: f64,
}

impl ProfileParams {
    pub const NAMES: [&'static str; 9] =
        ["Ra", "Rq", "Rsk", "Rku", "Rp", "Rv", "Rz", "Rdq", "RSm"];

    pub fn to_vec(self) -> Vec<f64> {
        vec![
            self.ra, self.rq, self.rsk, self.rku, self.rp, self.rv, self.rz, self.rdq, self.rsm,
        ]
    }
}

/// Height and hybrid parameters of a roughness surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArealParams {
    pub sa: f64,
    pub sq: f64,
    pub ssk: f64,
    pub sku: f64,
    pub sp: f64,
    pub sv: f64,
    pub sz: f64,
    pub sdq: f64,
    pub sdr: f64,
}

impl ArealParams {
    pub const NAMES: [&'static str; 9] =
        ["Sa", "Sq", "Ssk", "Sku", "Sp", "Sv", "Sz", "Sdq", "Sdr"];

    pub fn to_vec(self) -> Vec<f64> {
        vec![
            self.sa, self.sq, self.ssk, self.sku, self.sp, self.sv, self.sz, self.sdq, self.sdr,
        ]
    }
}

/// Gradient along a sample axis: central differences inside, one-sided at
/// the ends.
fn gradient(values: &[f64], spacing: f64) -> Vec<f64> {
    let n = values.len();
    debug_assert!(n >= 2);
    let mut g = Vec::with_capacity(n);
    g.push((values[1] - values[0]) / spacing);
    for i in 1..n - 1 {
        g.push((values[i + 1] - values[i - 1]) / (2.0 * spacing));
    }
    g.push((values[n - 1] - values[n - 2]) / spacing);
    g
}

/// Compute the nine profile parameters of a roughness profile.
pub fn profile_parameters(r: &RoughnessProfile) -> Result<ProfileParams> {
    let n = r.heights.len();
    if n < 2 {
        return Err(Error::parameter("profile parameters need >= 2 samples"));
    }
    if !r.heights.iter().all(|v| v.is_finite()) {
        return Err(Error::data("non-finite roughness heights"));
    }

    let mean = r.heights.iter().sum::<f64>() / n as f64;
    let z: Vec<f64> = r.heights.iter().map(|v| v - mean).collect();

    let ra = z.iter().map(|v| v.abs()).sum::<f64>() / n as f64;
    let m2 = z.iter().map(|v| v * v).sum::<f64>() / n as f64;
    let rq = m2.sqrt();
    let (rsk, rku) = if rq > 0.0 {
        let m3 = z.iter().map(|v| v.powi(3)).sum::<f64>() / n as f64;
        let m4 = z.iter().map(|v| v.powi(4)).sum::<f64>() / n as f64;
        (m3 / rq.powi(3), m4 / rq.powi(4))
    } else {
        (0.0, 0.0)
    };
    let rp = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let rv = -z.iter().cloned().fold(f64::INFINITY, f64::min);
    let rdq = {
        let g = gradient(&z, r.spacing);
        (g.iter().map(|v| v * v).sum::<f64>() / g.len() as f64).sqrt()
    };
    let rsm = mean_zero_crossing_spacing(&z, r.spacing);

    Ok(ProfileParams {
        ra,
        rq,
        rsk,
        rku,
        rp,
        rv,
        rz: rp + rv,
        rdq,
        rsm,
    })
}

/// Mean spacing between successive upward zero crossings (linear
/// interpolation); profiles with fewer than two crossings report the
/// measurement length.
fn mean_zero_crossing_spacing(z: &[f64], spacing: f64) -> f64 {
    let length = (z.len() - 1) as f64 * spacing;
    let mut crossings = Vec::new();
    for i in 0..z.len() - 1 {
        if z[i] < 0.0 && z[i + 1] >= 0.0 {
            let frac = z[i] / (z[i] - z[i + 1]);
            crossings.push((i as f64 + frac) * spacing);
        }
    }
    if crossings.len() < 2 {
        return length;
    }
    let total: f64 = crossings.last().unwrap() - crossings.first().unwrap();
    total / (crossings.len() - 1) as f64
}

/// Compute the nine areal parameters of a roughness surface.
pub fn areal_parameters(r: &SurfaceGrid) -> Result<ArealParams> {
    let grid = &r.grid;
    let (rows, cols) = (grid.rows(), grid.cols());
    if rows < 2 || cols < 2 {
        return Err(Error::parameter("areal parameters need a >= 2x2 grid"));
    }

    let mean = grid.mean();
    let z = grid.map(|v| v - mean);
    let n = (rows * cols) as f64;

    let sa = z.data().iter().map(|v| v.abs()).sum::<f64>() / n;
    let m2 = z.data().iter().map(|v| v * v).sum::<f64>() / n;
    let sq = m2.sqrt();
    let (ssk, sku) = if sq > 0.0 {
        let m3 = z.data().iter().map(|v| v.powi(3)).sum::<f64>() / n;
        let m4 = z.data().iter().map(|v| v.powi(4)).sum::<f64>() / n;
        (m3 / sq.powi(3), m4 / sq.powi(4))
    } else {
        (0.0, 0.0)
    };
    let sp = z.max();
    let sv = -z.min();

    // Gradient magnitude field: rows give d/dx (along columns), columns d/dy.
    let mut sum_sq = 0.0;
    let mut sum_sdr = 0.0;
    let mut gx = Grid::constant(rows, cols, 0.0).expect("shape");
    for r_idx in 0..rows {
        let g = gradient(z.row(r_idx), r.spacing);
        for (c, v) in g.into_iter().enumerate() {
            gx.set(r_idx, c, v);
        }
    }
    for c in 0..cols {
        let col: Vec<f64> = z.column(c);
        let gy = gradient(&col, r.spacing);
        for (r_idx, vy) in gy.into_iter().enumerate() {
            let vx = gx.get(r_idx, c);
            let sq_mag = vx * vx + vy * vy;
            sum_sq += sq_mag;
            sum_sdr += (1.0 + sq_mag).sqrt() - 1.0;
        }
    }
    let sdq = (sum_sq / n).sqrt();
    let sdr = sum_sdr / n * 100.0;

    Ok(ArealParams {
        sa,
        sq,
        ssk,
        sku,
        sp,
        sv,
        sz: sp + sv,
        sdq,
        sdr,
    })
}
