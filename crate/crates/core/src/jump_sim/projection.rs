use num_complex::Complex64;
use serde::Serialize;

use super::paths::{reduce, PathRecord};
use crate::error::{Error, Result};
use crate::spectral::{GridField, GridSpec};

/// Recursive pairwise sum; the result depends only on the order of `v`.
pub fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Sample mean and standard error of the mean.
pub fn mean_and_stderr(v: &[Complex64]) -> (Complex64, f64) {
    let n = v.len() as f64;
    let mean = pairwise_sum(v) / n;
    if v.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let dev: Vec<Complex64> = v.iter().map(|z| Complex64::new((z - mean).norm_sqr(), 0.0)).collect();
    (mean, (pairwise_sum(&dev).re / (n - 1.0) / n).sqrt())
}

/// Binned conditional means of terminal values given `X_T`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionEstimate {
    #[serde(skip)]
    pub spec: GridSpec,
    pub mean: Vec<Complex64>,
    pub counts: Vec<usize>,
    pub std_err: Vec<f64>,
    pub usable: Vec<bool>,
    pub min_per_bin: usize,
}

/// Flat index of the grid point nearest to `x` on the periodic box.
pub fn nearest_cell(spec: &GridSpec, x: &[f64]) -> usize {
    let idx: Vec<usize> = x
        .iter()
        .enumerate()
        .map(|(a, &v)| {
            let count = spec.shape()[a];
            let u = reduce(v, spec.box_len()[a]) / spec.spacing(a);
            (u.round() as usize) % count
        })
        .collect();
    spec.ravel(&idx)
}

pub fn project_conditional(
    paths: &[PathRecord],
    values: &[Complex64],
    spec: &GridSpec,
    min_per_bin: usize,
) -> Result<ProjectionEstimate> {
    if paths.len() != values.len() {
        return Err(Error::ShapeMismatch(format!("{} paths but {} values", paths.len(), values.len())));
    }
    if paths.iter().any(|p| p.x_t.len() != spec.dim()) {
        return Err(Error::ShapeMismatch("path dimension does not match the grid".into()));
    }
    let mut bins: Vec<Vec<Complex64>> = vec![Vec::new(); spec.len()];
    for (p, v) in paths.iter().zip(values) {
        bins[nearest_cell(spec, &p.x_t)].push(*v);
    }
    let min = min_per_bin.max(1);
    let mut est = ProjectionEstimate {
        spec: spec.clone(),
        mean: Vec::with_capacity(spec.len()),
        counts: Vec::with_capacity(spec.len()),
        std_err: Vec::with_capacity(spec.len()),
        usable: Vec::with_capacity(spec.len()),
        min_per_bin: min,
    };
    for b in &bins {
        let ok = b.len() >= min;
        let (m, se) = if b.is_empty() { (Complex64::new(0.0, 0.0), f64::INFINITY) } else { mean_and_stderr(b) };
        est.mean.push(if ok { m } else { Complex64::new(0.0, 0.0) });
        est.counts.push(b.len());
        est.std_err.push(se);
        est.usable.push(ok);
    }
    if !est.usable.iter().any(|&u| u) {
        return Err(Error::InvalidArgument(format!("no grid cell received {min} paths")));
    }
    Ok(est)
}

impl ProjectionEstimate {
    /// Conditional means as a field; unusable cells are zero.
    pub fn field(&self) -> GridField {
        GridField::new(self.spec.clone(), self.mean.clone()).expect("finite means")
    }

    pub fn usable_fraction(&self) -> f64 {
        self.usable.iter().filter(|&&u| u).count() as f64 / self.usable.len() as f64
    }
}

/// `E[v · e^{-iξ·X_T}]` with its standard error. With `X_T` uniform this is the Fourier
/// coefficient at `ξ` of the conditional expectation, without binning bias.
pub fn single_frequency_coefficient(paths: &[PathRecord], values: &[Complex64], xi: &[f64]) -> Result<(Complex64, f64)> {
    if paths.len() != values.len() || paths.is_empty() {
        return Err(Error::ShapeMismatch(format!("{} paths but {} values", paths.len(), values.len())));
    }
    let terms: Vec<Complex64> = paths
        .iter()
        .zip(values)
        .map(|(p, v)| {
            let phase: f64 = p.x_t.iter().zip(xi).map(|(x, k)| x * k).sum();
            v * Complex64::from_polar(1.0, -phase)
        })
        .collect();
    Ok(mean_and_stderr(&terms))
}
