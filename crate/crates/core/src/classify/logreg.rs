//! Multinomial logistic regression trained by full-batch gradient descent.
//!
//! Features are standardized with training statistics; the weights carry an
//! L2 penalty (bias excluded). The step size adapts by backtracking: grow
//! on improvement, halve and retry on regression. Training stops at the
//! gradient-norm tolerance or the iteration budget.

use super::ClassifierConfig;
use crate::error::Result;
use crate::surface_synth::RoughnessLabel;

const GRAD_TOL: f64 = 1e-6;

pub(super) fn fit_predict(
    train_rows: &[Vec<f64>],
    train_labels: &[RoughnessLabel],
    test_rows: &[Vec<f64>],
    config: &ClassifierConfig,
) -> Result<Vec<RoughnessLabel>> {
    let n = train_rows.len();
    let d = train_rows[0].len();

    // Classes present in the training fold, in label order.
    let mut classes: Vec<RoughnessLabel> = Vec::new();
    for l in RoughnessLabel::ALL {
        if train_labels.contains(&l) {
            classes.push(l);
        }
    }
    if classes.len() == 1 {
        return Ok(vec![classes[0]; test_rows.len()]);
    }
    let k = classes.len();
    let class_of = |l: RoughnessLabel| classes.iter().position(|&c| c == l).unwrap();

    // Standardize with train statistics.
    let mut means = vec![0.0; d];
    for row in train_rows {
        for (m, v) in means.iter_mut().zip(row) {
            *m += v / n as f64;
        }
    }
    let mut stds = vec![0.0; d];
    for row in train_rows {
        for (s, (v, m)) in stds.iter_mut().zip(row.iter().zip(&means)) {
            *s += (v - m) * (v - m) / n as f64;
        }
    }
    for s in &mut stds {
        *s = s.sqrt();
        if *s == 0.0 {
            *s = 1.0;
        }
    }
    let standardize = |rows: &[Vec<f64>]| -> Vec<Vec<f64>> {
        rows.iter()
            .map(|row| {
                row.iter()
                    .zip(means.iter().zip(&stds))
                    .map(|(v, (m, s))| (v - m) / s)
                    .collect()
            })
            .collect()
    };
    let x = standardize(train_rows);
    let y: Vec<usize> = train_labels.iter().map(|&l| class_of(l)).collect();

    // Weights: k x (d + 1), last column is the unpenalized bias.
    let mut w = vec![vec![0.0; d + 1]; k];
    let mut lr = 0.5;
    let mut loss = loss_and_grad(&x, &y, &w, config.logreg_l2).0;

    for _ in 0..config.logreg_max_iters {
        let (_, grad) = loss_and_grad(&x, &y, &w, config.logreg_l2);
        let gnorm: f64 = grad
            .iter()
            .flat_map(|g| g.iter().map(|v| v * v))
            .sum::<f64>()
            .sqrt();
        if gnorm <= GRAD_TOL {
            break;
        }
        // Backtracking step: accept the first step size that improves the
        // loss, halving up to a fixed number of times.
        let mut accepted = false;
        for _ in 0..30 {
            let candidate: Vec<Vec<f64>> = w
                .iter()
                .zip(&grad)
                .map(|(wr, gr)| wr.iter().zip(gr).map(|(a, g)| a - lr * g).collect())
                .collect();
            let cand_loss = loss_and_grad(&x, &y, &candidate, config.logreg_l2).0;
            if cand_loss <= loss {
                w = candidate;
                loss = cand_loss;
                lr *= 1.1;
                accepted = true;
                break;
            }
            lr *= 0.5;
        }
        if !accepted {
            break;
        }
    }

    let xt = standardize(test_rows);
    Ok(xt
        .iter()
        .map(|row| {
            let scores: Vec<f64> = w.iter().map(|wr| dot_with_bias(wr, row)).collect();
            let best = scores
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(&a.0)))
                .unwrap()
                .0;
            classes[best]
        })
        .collect())
}

fn dot_with_bias(w: &[f64], x: &[f64]) -> f64 {
    let d = x.len();
    w[..d].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + w[d]
}

/// Mean cross-entropy with L2 penalty, and its gradient.
fn loss_and_grad(
    x: &[Vec<f64>],
    y: &[usize],
    w: &[Vec<f64>],
    l2: f64,
) -> (f64, Vec<Vec<f64>>) {
    let n = x.len();
    let d = x[0].len();
    let k = w.len();
    let mut loss = 0.0;
    let mut grad = vec![vec![0.0; d + 1]; k];

    for (row, &label) in x.iter().zip(y) {
        let scores: Vec<f64> = w.iter().map(|wr| dot_with_bias(wr, row)).collect();
        let max_s = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = scores.iter().map(|s| (s - max_s).exp()).collect();
        let sum: f64 = exps.iter().sum();
        loss -= (exps[label] / sum).ln() / n as f64;
        for (c, (g, e)) in grad.iter_mut().zip(&exps).enumerate() {
            let p = e / sum - if c == label { 1.0 } else { 0.0 };
            for (gv, xv) in g[..d].iter_mut().zip(row) {
                *gv += p * xv / n as f64;
            }
            g[d] += p / n as f64;
        }
    }

    for (wr, gr) in w.iter().zip(grad.iter_mut()) {
        for (wv, gv) in wr[..d].iter().zip(gr[..d].iter_mut()) {
            loss += 0.5 * l2 * wv * wv;
            *gv += l2 * wv;
        }
    }
    (loss, grad)
}
