//! Sublevel-set persistent homology for profiles and areal images.
//!
//! Profiles are filtered as 1-D lower-star complexes (vertices at sample
//! values, edges at the max of their endpoints) and reduced with a
//! union-find sweep following the elder rule. Images are filtered as
//! vertex-based (V-construction, 4-connected) cubical complexes and reduced
//! by sparse boundary-matrix reduction over the two-element field with the
//! clearing optimization; see [`cubical`].
//!
//! The essential connected component is finitized at the global maximum of
//! the input so downstream featurizations always see finite pairs.

mod bottleneck;
mod cubical;

pub use bottleneck::bottleneck_distance;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::surface_synth::Profile;

/// A persistence diagram for a single homology dimension.
///
/// Pairs are stored sorted by (birth, death) so that any featurization of a
/// diagram is independent of the construction order of its pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    dim: usize,
    pairs: Vec<(f64, f64)>,
    global_max: f64,
}

impl PersistenceDiagram {
    /// Validates that every death is at least its birth and every value is
    /// finite, then stores the pairs in canonical sorted order.
    pub fn new(dim: usize, mut pairs: Vec<(f64, f64)>, global_max: f64) -> Result<Self> {
        if dim > 1 {
            return Err(Error::parameter("only dimensions 0 and 1 are supported"));
        }
        if !global_max.is_finite() {
            return Err(Error::data("non-finite global max"));
        }
        for &(b, d) in &pairs {
            if !(b.is_finite() && d.is_finite()) {
                return Err(Error::data("non-finite diagram pair"));
            }
            if d < b {
                return Err(Error::data(format!("death {d} before birth {b}")));
            }
        }
        pairs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(PersistenceDiagram {
            dim,
            pairs,
            global_max,
        })
    }

    pub fn empty(dim: usize, global_max: f64) -> Self {
        PersistenceDiagram {
            dim,
            pairs: Vec::new(),
            global_max,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    /// Maximum filtration value of the underlying input; also the death
    /// assigned to the finitized essential class.
    pub fn global_max(&self) -> f64 {
        self.global_max
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Max death over the diagram (`d_max` in featurizations); 0 if empty.
    pub fn max_death(&self) -> f64 {
        self.pairs
            .iter()
            .map(|&(_, d)| d)
            .fold(f64::NEG_INFINITY, f64::max)
            .max(if self.pairs.is_empty() {
                0.0
            } else {
                f64::NEG_INFINITY
            })
    }
}

/// Filtration options shared by the profile and image paths.
///
/// The cubical scheme is fixed to the vertex-based V-construction with
/// 4-connectivity; the only knob is whether zero-persistence pairs are kept
/// (the essential class is always kept).
#[derive(Debug, Clone, Copy, Default)]
pub struct FiltrationConfig {
    pub keep_zero_persistence: bool,
}

/// 0D sublevel-set persistence diagram of a profile.
pub fn sublevel_pd_profile(profile: &Profile) -> Result<PersistenceDiagram> {
    sublevel_pd_profile_cfg(profile, FiltrationConfig::default())
}

/// As [`sublevel_pd_profile`], with explicit filtration options.
pub fn sublevel_pd_profile_cfg(
    profile: &Profile,
    config: FiltrationConfig,
) -> Result<PersistenceDiagram> {
    let values = &profile.heights;
    if values.len() < 2 {
        return Err(Error::parameter("profile persistence needs >= 2 samples"));
    }
    if !values.iter().all(|v| v.is_finite()) {
        return Err(Error::data("non-finite profile heights"));
    }

    let n = values.len();
    let global_max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    // Process vertices in increasing (value, index) order. When a vertex
    // joins two existing components, the younger one (larger birth, ties by
    // later root) dies at the current value: the elder rule.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .unwrap()
            .then(a.cmp(&b))
    });

    let mut parent: Vec<usize> = (0..n).collect();
    let mut active = vec![false; n];
    let mut pairs = Vec::new();

    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    for &v in &order {
        active[v] = true;
        for nb in [v.wrapping_sub(1), v + 1] {
            if nb >= n || !active[nb] {
                continue;
            }
            let root_v = find(&mut parent, v);
            let root_nb = find(&mut parent, nb);
            if root_v == root_nb {
                continue;
            }
            // Roots carry their component's birth: root value is minimal in
            // the component because merges keep the older (smaller) root.
            let (elder, younger) =
                if (values[root_nb], root_nb) < (values[root_v], root_v) {
                    (root_nb, root_v)
                } else {
                    (root_v, root_nb)
                };
            pairs.push((values[younger], values[v]));
            parent[younger] = elder;
        }
    }

    if !config.keep_zero_persistence {
        pairs.retain(|&(b, d)| b != d);
    }
    // The surviving eldest component is finitized at the global maximum and
    // always reported, even at zero persistence.
    let global_min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    pairs.push((global_min, global_max));

    PersistenceDiagram::new(0, pairs, global_max)
}

/// Sublevel-set persistence of an image, H0 and optionally H1.
///
/// Returns one diagram per dimension, `[H0]` for `max_dim = 0` and
/// `[H0, H1]` for `max_dim = 1`.
pub fn sublevel_pd_image(grid: &Grid, max_dim: usize) -> Result<Vec<PersistenceDiagram>> {
    sublevel_pd_image_cfg(grid, max_dim, FiltrationConfig::default())
}

/// As [`sublevel_pd_image`], with explicit filtration options.
pub fn sublevel_pd_image_cfg(
    grid: &Grid,
    max_dim: usize,
    config: FiltrationConfig,
) -> Result<Vec<PersistenceDiagram>> {
    if max_dim > 1 {
        return Err(Error::parameter("max_dim must be 0 or 1"));
    }
    if grid.rows() < 2 || grid.cols() < 2 {
        return Err(Error::parameter("image persistence needs a >= 2x2 grid"));
    }
    cubical::reduce_grid(grid, max_dim, config)
}
