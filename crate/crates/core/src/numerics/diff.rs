//! Mixed partial derivatives by tensor central differences with one Richardson step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A mixed partial `∂^β`, stored as the multi-index β (0-based coordinates).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiIndexSpec {
    beta: Vec<usize>,
}

impl MultiIndexSpec {
    /// From 1-based coordinate indices `i_1..i_k`, e.g. `[2, 1]` is `∂_2∂_1`.
    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidArgument("multi-index needs at least one index".into()));
        }
        let mut beta = vec![0; n];
        for &i in indices {
            if i == 0 || i > n {
                return Err(Error::InvalidArgument(format!("index {i} outside 1..={n}")));
            }
            beta[i - 1] += 1;
        }
        Ok(MultiIndexSpec { beta })
    }

    /// From a multi-index β; `β = 0` is allowed and means the function value itself.
    pub fn from_beta(beta: &[usize]) -> Self {
        MultiIndexSpec { beta: beta.to_vec() }
    }

    pub fn beta(&self) -> &[usize] {
        &self.beta
    }

    pub fn dim(&self) -> usize {
        self.beta.len()
    }

    pub fn order(&self) -> usize {
        self.beta.iter().sum()
    }

    /// 1-based indices in ascending order, each repeated β_i times.
    pub fn indices(&self) -> Vec<usize> {
        self.beta
            .iter()
            .enumerate()
            .flat_map(|(i, &b)| std::iter::repeat(i + 1).take(b))
            .collect()
    }

    pub fn has_repeats(&self) -> bool {
        self.beta.iter().any(|&b| b > 1)
    }

    /// All β with `1 <= |β| <= max_order` in dimension `n`, graded then lexicographic.
    pub fn all_up_to(n: usize, max_order: usize) -> Vec<Self> {
        let mut out = Vec::new();
        for order in 1..=max_order {
            let mut beta = vec![0; n];
            compositions(order, 0, &mut beta, &mut out);
        }
        out
    }
}

fn compositions(left: usize, pos: usize, beta: &mut Vec<usize>, out: &mut Vec<MultiIndexSpec>) {
    if pos + 1 == beta.len() {
        beta[pos] = left;
        out.push(MultiIndexSpec { beta: beta.clone() });
        beta[pos] = 0;
        return;
    }
    for take in (0..=left).rev() {
        beta[pos] = take;
        compositions(left - take, pos + 1, beta, out);
    }
    beta[pos] = 0;
}

// Second-order-accurate central stencils: (offsets in units of h, coefficients),
// all divided by h^order.
const STENCIL_1: [(f64, f64); 2] = [(-1.0, -0.5), (1.0, 0.5)];
const STENCIL_2: [(f64, f64); 3] = [(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)];
const STENCIL_3: [(f64, f64); 4] = [(-2.0, -0.5), (-1.0, 1.0), (1.0, -1.0), (2.0, 0.5)];
const STENCIL_4: [(f64, f64); 5] = [(-2.0, 1.0), (-1.0, -4.0), (0.0, 6.0), (1.0, -4.0), (2.0, 1.0)];

fn stencil(order: usize) -> &'static [(f64, f64)] {
    match order {
        0 => &[(0.0, 1.0)],
        1 => &STENCIL_1,
        2 => &STENCIL_2,
        3 => &STENCIL_3,
        4 => &STENCIL_4,
        _ => unreachable!("order checked by caller"),
    }
}

/// Relative step per derivative order (index = total order - 1), applied to the
/// local length scale. Larger orders need larger steps to keep rounding in check.
const STEP_FACTORS: [f64; 4] = [1e-4, 1e-3, 4e-3, 1e-2];

/// Default per-axis steps for `∂^β` at `ξ`: `c_{|β|}·|ξ|` on every axis.
pub fn default_steps(xi: &[f64], beta: &MultiIndexSpec) -> Vec<f64> {
    let scale = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    let c = STEP_FACTORS[beta.order().clamp(1, 4) - 1];
    vec![c * scale; xi.len()]
}

/// Steps for symbols that are singular where one coordinate vanishes (such as
/// `ξ_1^r/|ξ|^r` with non-even r): on the axes listed in `singular_axes` the local
/// scale is `min(|ξ|, |ξ_i|)`.
pub fn axis_aware_steps(xi: &[f64], beta: &MultiIndexSpec, singular_axes: &[usize]) -> Vec<f64> {
    let mut steps = default_steps(xi, beta);
    let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    let c = STEP_FACTORS[beta.order().clamp(1, 4) - 1];
    for &i in singular_axes {
        if xi[i] != 0.0 {
            steps[i] = c * norm.min(xi[i].abs());
        }
    }
    steps
}

/// `∂^β f(ξ)` with a single step `h` on every axis.
pub fn finite_difference_partial<F>(f: F, xi: &[f64], beta: &MultiIndexSpec, h: f64) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let steps = vec![h; xi.len()];
    finite_difference_partial_steps(f, xi, beta, &steps)
}

/// `∂^β f(ξ)` with per-axis steps: tensor central differences at steps `h` and `h/2`,
/// combined as `(4 D(h/2) - D(h)) / 3`.
pub fn finite_difference_partial_steps<F>(
    mut f: F,
    xi: &[f64],
    beta: &MultiIndexSpec,
    steps: &[f64],
) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let n = xi.len();
    if beta.dim() != n || steps.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "point has {n} coordinates, multi-index {}, steps {}",
            beta.dim(),
            steps.len()
        )));
    }
    if beta.beta().iter().any(|&b| b > 4) || beta.order() > 4 {
        return Err(Error::InvalidArgument(format!("derivative order {} exceeds 4", beta.order())));
    }
    for (i, &h) in steps.iter().enumerate() {
        if beta.beta()[i] > 0 && !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("step on axis {} must be positive", i + 1)));
        }
    }
    let coarse = tensor_difference(&mut f, xi, beta.beta(), steps, 1.0)?;
    let fine = tensor_difference(&mut f, xi, beta.beta(), steps, 0.5)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

fn tensor_difference<F>(f: &mut F, xi: &[f64], beta: &[usize], steps: &[f64], scale: f64) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let axes: Vec<usize> = (0..xi.len()).filter(|&i| beta[i] > 0).collect();
    let stencils: Vec<&[(f64, f64)]> = axes.iter().map(|&i| stencil(beta[i])).collect();
    let mut denom = 1.0;
    for &i in &axes {
        denom *= (scale * steps[i]).powi(beta[i] as i32);
    }
    let mut counter = vec![0usize; axes.len()];
    let mut point = xi.to_vec();
    let mut acc = 0.0;
    loop {
        let mut coef = 1.0;
        for (a, &i) in axes.iter().enumerate() {
            let (off, c) = stencils[a][counter[a]];
            point[i] = xi[i] + off * scale * steps[i];
            coef *= c;
        }
        let v = f(&point);
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("finite difference sample at {point:?}")));
        }
        acc += coef * v;
        // Odometer over the stencil product.
        let mut a = 0;
        loop {
            if a == axes.len() {
                return Ok(acc / denom);
            }
            counter[a] += 1;
            if counter[a] < stencils[a].len() {
                break;
            }
            counter[a] = 0;
            a += 1;
        }
    }
}
