//! Random forest of CART trees with Gini splits.
//!
//! Each tree trains on a bootstrap resample (optional) and examines
//! `ceil(sqrt(D))` candidate features per split, sampled by a per-tree RNG
//! derived from (seed, tree index) so the forest is identical at any worker
//! count. Votes break ties toward the lowest label index.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::ClassifierConfig;
use crate::error::Result;
use crate::surface_synth::RoughnessLabel;
use crate::util::derive_seed;

const N_CLASSES: usize = 3;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        label: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// A single CART classification tree.
#[derive(Debug, Clone)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

impl DecisionTree {
    /// Grow a tree on the given samples. `mtry` candidate features are
    /// drawn per split; `min_leaf` bounds the smallest child.
    pub fn fit(
        rows: &[Vec<f64>],
        labels: &[usize],
        indices: Vec<usize>,
        mtry: usize,
        min_leaf: usize,
        rng: &mut ChaCha8Rng,
    ) -> DecisionTree {
        let mut tree = DecisionTree { nodes: Vec::new() };
        tree.grow(rows, labels, indices, mtry, min_leaf, rng);
        tree
    }

    fn grow(
        &mut self,
        rows: &[Vec<f64>],
        labels: &[usize],
        indices: Vec<usize>,
        mtry: usize,
        min_leaf: usize,
        rng: &mut ChaCha8Rng,
    ) -> usize {
        let counts = class_counts(labels, &indices);
        let node_id = self.nodes.len();

        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || indices.len() < 2 * min_leaf {
            self.nodes.push(Node::Leaf {
                label: majority(&counts),
            });
            return node_id;
        }

        match best_split(rows, &indices, labels, mtry, min_leaf, rng) {
            None => {
                self.nodes.push(Node::Leaf {
                    label: majority(&counts),
                });
                node_id
            }
            Some((feature, threshold)) => {
                let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
                    .into_iter()
                    .partition(|&i| rows[i][feature] <= threshold);
                // Placeholder; children are appended after it.
                self.nodes.push(Node::Leaf { label: 0 });
                let left = self.grow(rows, labels, left_idx, mtry, min_leaf, rng);
                let right = self.grow(rows, labels, right_idx, mtry, min_leaf, rng);
                self.nodes[node_id] = Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                };
                node_id
            }
        }
    }

    pub fn predict_one(&self, row: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { label } => return *label,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }
}

fn class_counts(labels: &[usize], indices: &[usize]) -> [usize; N_CLASSES] {
    let mut counts = [0; N_CLASSES];
    for &i in indices {
        counts[labels[i]] += 1;
    }
    counts
}

/// Majority class, lowest index on ties.
fn majority(counts: &[usize; N_CLASSES]) -> usize {
    let mut best = 0;
    for c in 1..N_CLASSES {
        if counts[c] > counts[best] {
            best = c;
        }
    }
    best
}

fn gini(counts: &[usize; N_CLASSES], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let mut g = 1.0;
    for &c in counts {
        let p = c as f64 / total as f64;
        g -= p * p;
    }
    g
}

/// Best (feature, threshold) among `mtry` sampled features, minimizing the
/// weighted Gini impurity of the children. Thresholds are midpoints between
/// consecutive distinct values.
fn best_split(
    rows: &[Vec<f64>],
    indices: &[usize],
    labels: &[usize],
    mtry: usize,
    min_leaf: usize,
    rng: &mut ChaCha8Rng,
) -> Option<(usize, f64)> {
    let d = rows[0].len();
    let mtry = mtry.min(d).max(1);

    // Partial Fisher-Yates: the first `mtry` entries are the sample.
    let mut features: Vec<usize> = (0..d).collect();
    for i in 0..mtry {
        let j = rng.random_range(i..d);
        features.swap(i, j);
    }

    let total = indices.len();
    let mut best: Option<(f64, usize, f64)> = None;

    for &feature in &features[..mtry] {
        let mut order: Vec<usize> = indices.to_vec();
        order.sort_by(|&a, &b| rows[a][feature].partial_cmp(&rows[b][feature]).unwrap());

        let mut left = [0usize; N_CLASSES];
        let mut right = class_counts(labels, indices);
        for cut in 1..total {
            let moved = order[cut - 1];
            left[labels[moved]] += 1;
            right[labels[moved]] -= 1;

            let lo = rows[order[cut - 1]][feature];
            let hi = rows[order[cut]][feature];
            if lo == hi || cut < min_leaf || total - cut < min_leaf {
                continue;
            }
            let score = (cut as f64 * gini(&left, cut)
                + (total - cut) as f64 * gini(&right, total - cut))
                / total as f64;
            let threshold = lo + (hi - lo) / 2.0;
            let candidate = (score, feature, threshold);
            best = match best {
                None => Some(candidate),
                Some(cur) if candidate.0 < cur.0 => Some(candidate),
                Some(cur) => Some(cur),
            };
        }
    }

    best.map(|(_, feature, threshold)| (feature, threshold))
}

pub(super) fn fit_predict(
    train_rows: &[Vec<f64>],
    train_labels: &[RoughnessLabel],
    test_rows: &[Vec<f64>],
    config: &ClassifierConfig,
) -> Result<Vec<RoughnessLabel>> {
    let labels: Vec<usize> = train_labels.iter().map(|l| l.index()).collect();
    let n = train_rows.len();
    let d = train_rows[0].len();
    let mtry = (d as f64).sqrt().ceil() as usize;

    let trees: Vec<DecisionTree> = (0..config.rforest_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, t as u64));
            let indices: Vec<usize> = if config.rforest_bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            DecisionTree::fit(
                train_rows,
                &labels,
                indices,
                mtry,
                config.rforest_min_leaf,
                &mut rng,
            )
        })
        .collect();

    Ok(test_rows
        .iter()
        .map(|row| {
            let mut votes = [0usize; N_CLASSES];
            for tree in &trees {
                votes[tree.predict_one(row)] += 1;
            }
            RoughnessLabel::from_index(majority(&votes)).expect("class index in range")
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_unbootstrapped_tree_equals_plain_cart() {
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|i| vec![i as f64, (i % 7) as f64])
            .collect();
        let labels_rl: Vec<RoughnessLabel> = (0..30)
            .map(|i| {
                if i < 10 {
                    RoughnessLabel::Rough
                } else if i < 20 {
                    RoughnessLabel::SomewhatRough
                } else {
                    RoughnessLabel::Smooth
                }
            })
            .collect();
        let labels: Vec<usize> = labels_rl.iter().map(|l| l.index()).collect();

        let config = ClassifierConfig {
            rforest_trees: 1,
            rforest_bootstrap: false,
            ..ClassifierConfig::rforest(5)
        };
        let forest_pred = fit_predict(&rows, &labels_rl, &rows, &config).unwrap();

        let d = rows[0].len();
        let mtry = (d as f64).sqrt().ceil() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(5, 0));
        let tree = DecisionTree::fit(&rows, &labels, (0..30).collect(), mtry, 1, &mut rng);
        let tree_pred: Vec<RoughnessLabel> = rows
            .iter()
            .map(|r| RoughnessLabel::from_index(tree.predict_one(r)).unwrap())
            .collect();
        assert_eq!(forest_pred, tree_pred);
    }

    #[test]
    fn deep_tree_fits_training_data() {
        let rows: Vec<Vec<f64>> = (0..24).map(|i| vec![(i * 37 % 24) as f64]).collect();
        let labels: Vec<usize> = (0..24).map(|i| i % 3).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let tree = DecisionTree::fit(&rows, &labels, (0..24).collect(), 1, 1, &mut rng);
        for (row, &label) in rows.iter().zip(&labels) {
            assert_eq!(tree.predict_one(row), label);
        }
    }

    #[test]
    fn gini_of_pure_node_is_zero() {
        assert_eq!(gini(&[5, 0, 0], 5), 0.0);
        assert!((gini(&[1, 1, 1], 3) - 2.0 / 3.0).abs() < 1e-12);
    }
}
