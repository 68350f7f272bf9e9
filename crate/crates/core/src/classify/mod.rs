//! Feature matrices, PCA, from-scratch classifiers, and deterministic
//! k-fold cross-validation.

mod forest;
mod logreg;

pub use forest::DecisionTree;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface_synth::RoughnessLabel;
use crate::util::percentile;

/// A labeled feature matrix: one specimen per row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<RoughnessLabel>,
    pub column_names: Vec<String>,
    pub featurization_id: String,
}

impl FeatureMatrix {
    pub fn new(
        rows: Vec<Vec<f64>>,
        labels: Vec<RoughnessLabel>,
        column_names: Vec<String>,
        featurization_id: impl Into<String>,
    ) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::data("row/label count mismatch"));
        }
        let width = column_names.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::data(format!(
                    "row {i} has {} values, expected {width}",
                    row.len()
                )));
            }
            if !row.iter().all(|v| v.is_finite()) {
                return Err(Error::data(format!("row {i} contains non-finite values")));
            }
        }
        Ok(FeatureMatrix {
            rows,
            labels,
            column_names,
            featurization_id: featurization_id.into(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.column_names.len()
    }

    fn select(&self, indices: &[usize]) -> (Vec<Vec<f64>>, Vec<RoughnessLabel>) {
        let rows = indices.iter().map(|&i| self.rows[i].clone()).collect();
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        (rows, labels)
    }
}

/// Classifier selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Logreg,
    Rforest,
}

impl std::fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassifierKind::Logreg => f.write_str("logreg"),
            ClassifierKind::Rforest => f.write_str("rforest"),
        }
    }
}

/// Classifier hyperparameters; the library's pinned defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub kind: ClassifierKind,
    pub seed: u64,
    /// L2 penalty for logistic regression.
    pub logreg_l2: f64,
    /// Iteration budget for the full-batch gradient descent.
    pub logreg_max_iters: usize,
    /// Trees in the forest.
    pub rforest_trees: usize,
    /// Minimum samples per leaf.
    pub rforest_min_leaf: usize,
    /// Bootstrap resampling of the training set per tree.
    pub rforest_bootstrap: bool,
}

impl ClassifierConfig {
    pub fn logreg(seed: u64) -> Self {
        ClassifierConfig {
            kind: ClassifierKind::Logreg,
            seed,
            ..Self::defaults()
        }
    }

    pub fn rforest(seed: u64) -> Self {
        ClassifierConfig {
            kind: ClassifierKind::Rforest,
            seed,
            ..Self::defaults()
        }
    }

    fn defaults() -> Self {
        ClassifierConfig {
            kind: ClassifierKind::Logreg,
            seed: 0,
            logreg_l2: 1e-4,
            logreg_max_iters: 500,
            rforest_trees: 100,
            rforest_min_leaf: 1,
            rforest_bootstrap: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.logreg_l2 < 0.0 || self.logreg_max_iters == 0 {
            return Err(Error::parameter("invalid logistic-regression settings"));
        }
        if self.rforest_trees == 0 || self.rforest_min_leaf == 0 {
            return Err(Error::parameter("invalid random-forest settings"));
        }
        Ok(())
    }
}

/// Cross-validation report for one featurization x classifier pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub featurization_id: String,
    pub classifier_id: String,
    pub folds: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    #[serde(rename = "box")]
    pub box_stats: BoxStats,
}

/// Five-number summary used for box plots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl BoxStats {
    fn from_values(values: &[f64]) -> BoxStats {
        BoxStats {
            min: values.iter().cloned().fold(f64::INFINITY, f64::min),
            q1: percentile(values, 25.0),
            median: percentile(values, 50.0),
            q3: percentile(values, 75.0),
            max: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Deterministic k-fold split: indices are shuffled by `seed` and cut into
/// `k` contiguous test folds whose sizes differ by at most one.
pub fn kfold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if k == 0 || k > n {
        return Err(Error::parameter(format!("cannot split {n} samples into {k} folds")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        let test: Vec<usize> = order[start..start + size].to_vec();
        let train: Vec<usize> = order[..start]
            .iter()
            .chain(&order[start + size..])
            .copied()
            .collect();
        folds.push((train, test));
        start += size;
    }
    Ok(folds)
}

/// A fitted PCA basis: column means plus the top-k principal directions.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub means: Vec<f64>,
    /// `k` rows of length `d`, descending eigenvalue order.
    pub components: Vec<Vec<f64>>,
}

impl PcaModel {
    pub fn transform(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter()
            .map(|row| {
                self.components
                    .iter()
                    .map(|comp| {
                        comp.iter()
                            .zip(row.iter().zip(&self.means))
                            .map(|(c, (x, m))| c * (x - m))
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }
}

/// Fit PCA on `rows` and project onto the top `k` components.
///
/// Components are eigenvectors of the sample covariance in descending
/// eigenvalue order, each with its largest-magnitude entry made positive so
/// the basis is sign-deterministic.
pub fn pca_reduce(rows: &[Vec<f64>], k: usize) -> Result<(Vec<Vec<f64>>, PcaModel)> {
    let model = pca_fit(rows, k)?;
    let projected = model.transform(rows);
    Ok((projected, model))
}

/// Fit the PCA basis only.
pub fn pca_fit(rows: &[Vec<f64>], k: usize) -> Result<PcaModel> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::data("PCA needs at least one row"));
    }
    let d = rows[0].len();
    if k > d {
        return Err(Error::parameter(format!("k = {k} exceeds dimension {d}")));
    }

    let mut means = vec![0.0; d];
    for row in rows {
        for (m, v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= n as f64;
    }

    let denom = if n > 1 { (n - 1) as f64 } else { 1.0 };
    let mut cov = nalgebra::DMatrix::<f64>::zeros(d, d);
    for row in rows {
        let centered: Vec<f64> = row.iter().zip(&means).map(|(v, m)| v - m).collect();
        for i in 0..d {
            for j in i..d {
                cov[(i, j)] += centered[i] * centered[j] / denom;
            }
        }
    }
    for i in 0..d {
        for j in 0..i {
            cov[(i, j)] = cov[(j, i)];
        }
    }

    let eigen = nalgebra::SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[b]
            .partial_cmp(&eigen.eigenvalues[a])
            .unwrap()
            .then(a.cmp(&b))
    });

    let components = order[..k]
        .iter()
        .map(|&idx| {
            let col = eigen.eigenvectors.column(idx);
            let mut comp: Vec<f64> = col.iter().copied().collect();
            // Sign convention: largest-magnitude entry positive.
            let lead = comp
                .iter()
                .cloned()
                .max_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())
                .unwrap_or(1.0);
            if lead < 0.0 {
                for v in &mut comp {
                    *v = -*v;
                }
            }
            comp
        })
        .collect();

    Ok(PcaModel { means, components })
}

/// Train on `(train_rows, train_labels)` and predict labels for `test_rows`.
///
/// Logistic regression standardizes features with train-fold statistics
/// internally; the forest consumes raw features. Deterministic given the
/// config seed.
pub fn fit_predict(
    train_rows: &[Vec<f64>],
    train_labels: &[RoughnessLabel],
    test_rows: &[Vec<f64>],
    config: &ClassifierConfig,
) -> Result<Vec<RoughnessLabel>> {
    config.validate()?;
    if train_rows.is_empty() || train_rows.len() != train_labels.len() {
        return Err(Error::data("empty or inconsistent training data"));
    }
    match config.kind {
        ClassifierKind::Logreg => logreg::fit_predict(train_rows, train_labels, test_rows, config),
        ClassifierKind::Rforest => forest::fit_predict(train_rows, train_labels, test_rows, config),
    }
}

/// K-fold cross-validation; PCA (if requested) is fit on each training fold
/// only and applied to its test fold.
pub fn cross_validate(
    fm: &FeatureMatrix,
    config: &ClassifierConfig,
    k: usize,
    seed: u64,
    pca_k: Option<usize>,
) -> Result<CvReport> {
    let folds = kfold_indices(fm.n_rows(), k, seed)?;
    let mut accuracies = Vec::with_capacity(k);
    for (train_idx, test_idx) in &folds {
        let (train_rows, train_labels) = fm.select(train_idx);
        let (test_rows, test_labels) = fm.select(test_idx);

        let (train_rows, test_rows) = match pca_k {
            Some(k) => {
                let (projected, model) = pca_reduce(&train_rows, k)?;
                (projected, model.transform(&test_rows))
            }
            None => (train_rows, test_rows),
        };

        let predictions = fit_predict(&train_rows, &train_labels, &test_rows, config)?;
        let correct = predictions
            .iter()
            .zip(&test_labels)
            .filter(|(p, t)| p == t)
            .count();
        accuracies.push(correct as f64 / test_labels.len() as f64);
    }

    let mean = accuracies.iter().sum::<f64>() / accuracies.len() as f64;
    let std = if accuracies.len() > 1 {
        (accuracies.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>()
            / (accuracies.len() - 1) as f64)
            .sqrt()
    } else {
        0.0
    };
    let classifier_id = match pca_k {
        Some(k) => format!("{}_pca{k}", config.kind),
        None => config.kind.to_string(),
    };
    Ok(CvReport {
        featurization_id: fm.featurization_id.clone(),
        classifier_id,
        box_stats: BoxStats::from_values(&accuracies),
        mean,
        std,
        folds: accuracies,
    })
}
