//! Seeded Monte Carlo estimation of partial-sum norms and sub-Gaussian
//! diagnostics. Replicates draw from counter-derived streams and are reduced
//! in a fixed order, so results are bit-identical for any worker count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::{derive_seed, FieldModel};
use crate::lattice::Rectangle;

/// Deterministic pairwise (divide and conquer) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// A Monte Carlo point estimate with a batch-means standard error.
#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub replicates: u32,
    pub seed: u64,
}

const BATCHES: usize = 8;

/// Centered sums `S_R` for replicates `0..n`, one derived stream each.
pub fn replicate_sums(
    model: &FieldModel,
    rect: &Rectangle,
    replicates: u32,
    seed: u64,
) -> Result<Vec<f64>> {
    if rect.dim() != model.dim() {
        return Err(Error::DimensionMismatch(rect.dim(), model.dim()));
    }
    (0..replicates as u64)
        .into_par_iter()
        .map(|j| Ok(model.sample(rect, derive_seed(seed, j))?.sum()))
        .collect()
}

fn batch_mean_se(values: &[f64]) -> f64 {
    // standard error of the overall mean from 8 batch means
    let batch = values.len() / BATCHES;
    let means: Vec<f64> = (0..BATCHES)
        .map(|b| pairwise_sum(&values[b * batch..(b + 1) * batch]) / batch as f64)
        .collect();
    let grand = pairwise_sum(&means) / BATCHES as f64;
    let var = means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>() / (BATCHES as f64 - 1.0);
    (var / BATCHES as f64).sqrt()
}

/// `((1/n) sum |S_R^(j)|^p)^(1/p)` with a delta-method standard error from
/// 8 batch means on the p-th power scale.
pub fn estimate_lp_norm(
    model: &FieldModel,
    rect: &Rectangle,
    p: f64,
    replicates: u32,
    seed: u64,
) -> Result<McEstimate> {
    if !(2.0..=64.0).contains(&p) {
        return Err(Error::InvalidConfig(format!("p = {p} outside [2, 64]")));
    }
    if replicates < 16 || !(replicates as usize).is_multiple_of(BATCHES) {
        return Err(Error::InvalidConfig(format!(
            "replicates must be >= 16 and a multiple of {BATCHES}, got {replicates}"
        )));
    }
    let sums = replicate_sums(model, rect, replicates, seed)?;
    let powers: Vec<f64> = sums.iter().map(|s| s.abs().powf(p)).collect();
    let mean_power = pairwise_sum(&powers) / replicates as f64;
    let estimate = mean_power.powf(1.0 / p);
    let se_power = batch_mean_se(&powers);
    // d/dx x^(1/p) evaluated at the mean power
    let std_error = if mean_power > 0.0 {
        se_power * mean_power.powf(1.0 / p - 1.0) / p
    } else {
        0.0
    };
    Ok(McEstimate {
        estimate,
        std_error,
        replicates,
        seed,
    })
}

/// One grid point of the sub-Gaussian check.
#[derive(Clone, Copy, Debug)]
pub struct SgPoint {
    pub lambda: f64,
    /// `log E^[exp(lambda S)] - lambda^2 c^2 / 2`; a valid constant keeps
    /// this within Monte Carlo noise of zero or below.
    pub excess: f64,
    /// Batch-means standard error of the log moment generating function.
    pub std_error: f64,
}

/// Empirical moment-generating-function check of a sub-Gaussian constant.
pub fn subgaussian_excess(
    model: &FieldModel,
    rect: &Rectangle,
    c: f64,
    lambdas: &[f64],
    replicates: u32,
    seed: u64,
) -> Result<Vec<SgPoint>> {
    if replicates < 16 || !(replicates as usize).is_multiple_of(BATCHES) {
        return Err(Error::InvalidConfig(format!(
            "replicates must be >= 16 and a multiple of {BATCHES}, got {replicates}"
        )));
    }
    let sums = replicate_sums(model, rect, replicates, seed)?;
    let mut out = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let exps: Vec<f64> = sums.iter().map(|s| (lambda * s).exp()).collect();
        let mean = pairwise_sum(&exps) / replicates as f64;
        let excess = mean.ln() - lambda * lambda * c * c / 2.0;
        let std_error = batch_mean_se(&exps) / mean;
        out.push(SgPoint {
            lambda,
            excess,
            std_error,
        });
    }
    Ok(out)
}

/// Ordinary least squares fit of `y = slope * x + intercept`.
#[derive(Clone, Debug)]
pub struct Regression {
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<Regression> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidConfig(
            "regression needs at least two matched points".into(),
        ));
    }
    let n = xs.len() as f64;
    let xbar = pairwise_sum(xs) / n;
    let ybar = pairwise_sum(ys) / n;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidConfig("degenerate abscissae".into()));
    }
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let residuals = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| y - (slope * x + intercept))
        .collect();
    Ok(Regression {
        slope,
        intercept,
        residuals,
    })
}

/// Log-log regression of estimated norms of the normalized sum against
/// `N = |R|` over a family of boxes indexed by the side length.
pub fn rate_regression<F>(
    family: F,
    p: f64,
    sides: &[u64],
    replicates: u32,
    seed: u64,
) -> Result<(Regression, Vec<(u64, McEstimate)>)>
where
    F: Fn(u64) -> Result<(FieldModel, Rectangle)>,
{
    if sides.len() < 4 {
        return Err(Error::InvalidConfig(
            "rate regression needs at least 4 box sizes".into(),
        ));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut estimates = Vec::new();
    for &n in sides {
        let (model, rect) = family(n)?;
        let est = estimate_lp_norm(&model, &rect, p, replicates, seed)?;
        let big_n = rect.cardinality() as f64;
        xs.push(big_n.ln());
        ys.push((est.estimate / big_n).ln());
        estimates.push((n, est));
    }
    Ok((linear_fit(&xs, &ys)?, estimates))
}
