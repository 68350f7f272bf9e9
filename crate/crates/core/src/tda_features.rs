//! Vectorizations of persistence diagrams: Carlsson coordinates,
//! persistence images, and template functions.
//!
//! Persistence images and template functions need dataset-wide calibration
//! (value ranges, meshes) so every specimen maps to a comparable vector;
//! the `*Config::from_diagrams` constructors perform that calibration pass.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::persistence::PersistenceDiagram;
use crate::util::fnv1a64;

/// The five polynomial summary statistics of a diagram.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CarlssonCoordinates {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub f4: f64,
    pub f5: f64,
}

impl CarlssonCoordinates {
    pub fn to_vec(self) -> Vec<f64> {
        vec![self.f1, self.f2, self.f3, self.f4, self.f5]
    }
}

/// Carlsson coordinates with `d_max` taken from the diagram itself
/// (its maximum death). An empty diagram maps to all zeros.
pub fn carlsson_coordinates(pd: &PersistenceDiagram) -> CarlssonCoordinates {
    if pd.is_empty() {
        return CarlssonCoordinates::default();
    }
    carlsson_coordinates_with_dmax(pd, pd.max_death())
}

/// Carlsson coordinates with an explicit `d_max`, so sums over disjoint
/// diagram unions stay additive when the union's maximum is supplied.
pub fn carlsson_coordinates_with_dmax(pd: &PersistenceDiagram, d_max: f64) -> CarlssonCoordinates {
    let mut cc = CarlssonCoordinates::default();
    for &(b, d) in pd.pairs() {
        let p = d - b;
        cc.f1 += b * p;
        cc.f2 += (d_max - d) * p;
        cc.f3 += b * b * p.powi(4);
        cc.f4 += (d_max - d) * (d_max - d) * p.powi(4);
        cc.f5 = cc.f5.max(p);
    }
    cc
}

/// A featurization output: the vector plus a provenance tag
/// (featurization name and config digest) for CSV column naming.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub provenance: String,
}

/// Persistence-image settings.
///
/// The image lives on the (birth, lifetime) plane: `grid_cols` cells along
/// the birth axis over `birth_range`, `grid_rows` cells along the lifetime
/// axis over `lifetime_range`. Each diagram point carries a Gaussian of
/// standard deviation `sigma`, weighted by a ramp that is 0 at lifetime 0
/// and saturates to 1 at `weight_p_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersistenceImageConfig {
    pub grid_cols: usize,
    pub grid_rows: usize,
    pub sigma: f64,
    pub birth_range: (f64, f64),
    pub lifetime_range: (f64, f64),
    /// Lifetime at which the weight ramp saturates to 1.
    pub weight_p_max: f64,
}

impl PersistenceImageConfig {
    pub const DEFAULT_GRID_COLS: usize = 20;
    pub const DEFAULT_GRID_ROWS: usize = 16;

    /// Calibrate from a dataset of diagrams: sigma is 10% of the observed
    /// lifetime span, the ranges are the observed (birth, lifetime) bounds
    /// padded by 3 sigma, and the weight saturates at the largest observed
    /// lifetime.
    pub fn from_diagrams<'a>(
        diagrams: impl IntoIterator<Item = &'a PersistenceDiagram>,
        grid_cols: usize,
        grid_rows: usize,
    ) -> Result<Self> {
        let mut b_min = f64::INFINITY;
        let mut b_max = f64::NEG_INFINITY;
        let mut p_min = f64::INFINITY;
        let mut p_max = f64::NEG_INFINITY;
        for pd in diagrams {
            for &(b, d) in pd.pairs() {
                b_min = b_min.min(b);
                b_max = b_max.max(b);
                p_min = p_min.min(d - b);
                p_max = p_max.max(d - b);
            }
        }
        if !b_min.is_finite() {
            return Err(Error::config(
                "cannot calibrate a persistence image from empty diagrams",
            ));
        }
        // A degenerate span (single point or all-equal lifetimes) still
        // needs a usable window.
        let span = if p_max > p_min { p_max - p_min } else { 1.0 };
        let sigma = 0.1 * span;
        let pad = 3.0 * sigma;
        Self::new(
            grid_cols,
            grid_rows,
            sigma,
            (b_min - pad, b_max + pad),
            (p_min - pad, p_max + pad),
            p_max,
        )
    }

    pub fn new(
        grid_cols: usize,
        grid_rows: usize,
        sigma: f64,
        birth_range: (f64, f64),
        lifetime_range: (f64, f64),
        weight_p_max: f64,
    ) -> Result<Self> {
        if grid_cols == 0 || grid_rows == 0 {
            return Err(Error::config("persistence image grid must be non-empty"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::config("sigma must be positive"));
        }
        if birth_range.1 <= birth_range.0 || lifetime_range.1 <= lifetime_range.0 {
            return Err(Error::config("degenerate persistence image range"));
        }
        Ok(PersistenceImageConfig {
            grid_cols,
            grid_rows,
            sigma,
            birth_range,
            lifetime_range,
            weight_p_max,
        })
    }

    pub fn len(&self) -> usize {
        self.grid_cols * self.grid_rows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn digest(&self) -> u64 {
        fnv1a64(serde_json::to_string(self).expect("serializable config").as_bytes())
    }
}

/// Ramp weight: 0 at or below lifetime 0, linear up to `p_max`, then 1.
fn ramp_weight(p: f64, p_max: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else if p >= p_max {
        1.0
    } else {
        p / p_max
    }
}

/// Midpoint-quadrature subsamples per pixel edge.
const PI_SUBSAMPLES: usize = 4;

/// Rasterize a diagram into a persistence image, flattened row-major from
/// the low-lifetime row upward.
pub fn persistence_image(pd: &PersistenceDiagram, config: &PersistenceImageConfig) -> FeatureVector {
    let points: Vec<(f64, f64, f64)> = pd
        .pairs()
        .iter()
        .map(|&(b, d)| (b, d - b, ramp_weight(d - b, config.weight_p_max)))
        .filter(|&(_, _, w)| w > 0.0)
        .collect();

    let (b_lo, b_hi) = config.birth_range;
    let (p_lo, p_hi) = config.lifetime_range;
    let cell_w = (b_hi - b_lo) / config.grid_cols as f64;
    let cell_h = (p_hi - p_lo) / config.grid_rows as f64;
    let sub = PI_SUBSAMPLES;
    let sub_w = cell_w / sub as f64;
    let sub_h = cell_h / sub as f64;
    let two_sigma_sq = 2.0 * config.sigma * config.sigma;
    let norm = 1.0 / (std::f64::consts::TAU * config.sigma * config.sigma);

    let mut values = vec![0.0; config.len()];
    if points.is_empty() {
        return FeatureVector {
            values,
            provenance: format!("pi:{:016x}", config.digest()),
        };
    }

    for row in 0..config.grid_rows {
        for col in 0..config.grid_cols {
            let x0 = b_lo + col as f64 * cell_w;
            let y0 = p_lo + row as f64 * cell_h;
            let mut acc = 0.0;
            for sy in 0..sub {
                let y = y0 + (sy as f64 + 0.5) * sub_h;
                for sx in 0..sub {
                    let x = x0 + (sx as f64 + 0.5) * sub_w;
                    let mut s = 0.0;
                    for &(pb, pp, w) in &points {
                        let dx = x - pb;
                        let dy = y - pp;
                        s += w * (-(dx * dx + dy * dy) / two_sigma_sq).exp();
                    }
                    acc += s;
                }
            }
            values[row * config.grid_cols + col] = acc * norm * sub_w * sub_h;
        }
    }

    FeatureVector {
        values,
        provenance: format!("pi:{:016x}", config.digest()),
    }
}

/// Template-function settings: Lagrange cardinal polynomials on Chebyshev
/// meshes over the padded bounding box of the dataset's diagrams, birth
/// axis on mesh A and lifetime axis on mesh B.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemplateConfig {
    /// Chebyshev nodes along the birth axis, ascending.
    pub mesh_a: Vec<f64>,
    /// Chebyshev nodes along the lifetime axis, ascending.
    pub mesh_b: Vec<f64>,
    /// Support box of the templates; points outside contribute nothing.
    pub birth_range: (f64, f64),
    pub lifetime_range: (f64, f64),
}

impl TemplateConfig {
    pub const DEFAULT_MESH_SIZE: usize = 10;
    pub const DEFAULT_PADDING_FRACTION: f64 = 0.05;

    /// Calibrate from a dataset of diagrams: bounding box of all (birth,
    /// lifetime) points, padded by 5% of each axis span.
    pub fn from_diagrams<'a>(
        diagrams: impl IntoIterator<Item = &'a PersistenceDiagram>,
        mesh_a_size: usize,
        mesh_b_size: usize,
    ) -> Result<Self> {
        let mut b_min = f64::INFINITY;
        let mut b_max = f64::NEG_INFINITY;
        let mut p_min = f64::INFINITY;
        let mut p_max = f64::NEG_INFINITY;
        for pd in diagrams {
            for &(b, d) in pd.pairs() {
                b_min = b_min.min(b);
                b_max = b_max.max(b);
                p_min = p_min.min(d - b);
                p_max = p_max.max(d - b);
            }
        }
        if !b_min.is_finite() {
            return Err(Error::config(
                "cannot calibrate template functions from empty diagrams",
            ));
        }
        let pad = |lo: f64, hi: f64| {
            let span = if hi > lo { hi - lo } else { 1.0 };
            let p = Self::DEFAULT_PADDING_FRACTION * span;
            (lo - p, hi + p)
        };
        Self::new(mesh_a_size, mesh_b_size, pad(b_min, b_max), pad(p_min, p_max))
    }

    pub fn new(
        mesh_a_size: usize,
        mesh_b_size: usize,
        birth_range: (f64, f64),
        lifetime_range: (f64, f64),
    ) -> Result<Self> {
        if mesh_a_size < 2 || mesh_b_size < 2 {
            return Err(Error::config("template meshes need at least 2 nodes"));
        }
        if birth_range.1 <= birth_range.0 || lifetime_range.1 <= lifetime_range.0 {
            return Err(Error::config("degenerate template bounding box"));
        }
        Ok(TemplateConfig {
            mesh_a: chebyshev_nodes(mesh_a_size, birth_range.0, birth_range.1),
            mesh_b: chebyshev_nodes(mesh_b_size, lifetime_range.0, lifetime_range.1),
            birth_range,
            lifetime_range,
        })
    }

    pub fn len(&self) -> usize {
        self.mesh_a.len() * self.mesh_b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn digest(&self) -> u64 {
        fnv1a64(serde_json::to_string(self).expect("serializable config").as_bytes())
    }
}

/// Chebyshev points of the second kind (endpoints included), mapped to
/// [lo, hi] and returned ascending.
fn chebyshev_nodes(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    debug_assert!(n >= 2);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    (0..n)
        .map(|k| {
            let theta = std::f64::consts::PI * k as f64 / (n - 1) as f64;
            // cos runs 1 -> -1; flip so nodes ascend.
            mid - half * theta.cos()
        })
        .collect()
}

/// Lagrange cardinal polynomial `l_i` of `nodes` evaluated at `x`.
fn lagrange_cardinal(nodes: &[f64], i: usize, x: f64) -> f64 {
    let mut v = 1.0;
    for (k, &node) in nodes.iter().enumerate() {
        if k != i {
            v *= (x - node) / (nodes[i] - node);
        }
    }
    v
}

/// Template-function features: entry (i, j) sums `|l_i(b) * l_j(p)|` over
/// diagram points inside the support box, flattened row-major over
/// (mesh A index, mesh B index).
pub fn template_features(pd: &PersistenceDiagram, config: &TemplateConfig) -> FeatureVector {
    let na = config.mesh_a.len();
    let nb = config.mesh_b.len();
    let mut values = vec![0.0; na * nb];
    let (b_lo, b_hi) = config.birth_range;
    let (p_lo, p_hi) = config.lifetime_range;

    for &(b, d) in pd.pairs() {
        let p = d - b;
        if !(b_lo..=b_hi).contains(&b) || !(p_lo..=p_hi).contains(&p) {
            continue;
        }
        let la: Vec<f64> = (0..na).map(|i| lagrange_cardinal(&config.mesh_a, i, b)).collect();
        let lb: Vec<f64> = (0..nb).map(|j| lagrange_cardinal(&config.mesh_b, j, p)).collect();
        for i in 0..na {
            for j in 0..nb {
                values[i * nb + j] += (la[i] * lb[j]).abs();
            }
        }
    }

    FeatureVector {
        values,
        provenance: format!("tf:{:016x}", config.digest()),
    }
}
