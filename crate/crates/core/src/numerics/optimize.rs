//! Grid search plus pattern refinement on the positive orthant of S^{n-1}.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Result of [`maximize_on_sphere_orthant`].
#[derive(Debug, Clone)]
pub struct OrthantMax {
    pub point: Vec<f64>,
    pub value: f64,
    /// Final refinement step in angle space; the true maximizer of a Lipschitz
    /// function lies within this distance of a probed point.
    pub cell_diameter: f64,
    pub evaluations: usize,
}

const REFINE_TOL: f64 = 1e-6;
const CANDIDATES: usize = 4;

/// Hyperspherical angles in [0, π/2]^{n-1} to a point of the closed positive orthant.
pub fn orthant_point(angles: &[f64]) -> Vec<f64> {
    let n = angles.len() + 1;
    let mut x = vec![0.0; n];
    let mut s = 1.0;
    for (i, a) in angles.iter().enumerate() {
        let (sa, ca) = a.sin_cos();
        x[i] = s * ca;
        s *= sa;
    }
    x[n - 1] = s;
    x
}

/// Maximizes `f` over `{θ ∈ S^{n-1} : θ_i ≥ 0}`.
///
/// A `(level+1)^{n-1}` grid in hyperspherical angles is searched first (ties go to the
/// first grid point in lexicographic order). The best few grid points are then polished
/// by a compass search whose step halves until it drops below 1e-6. The returned value
/// is `f` at an actual probe point, hence a lower bound for the maximum.
pub fn maximize_on_sphere_orthant<F>(mut f: F, n: usize, level: u32) -> Result<OrthantMax>
where
    F: FnMut(&[f64]) -> f64,
{
    if !(2..=4).contains(&n) {
        return Err(Error::UnsupportedDimension(n, "2, 3, 4"));
    }
    if level == 0 {
        return Err(Error::InvalidArgument("maximizer level must be positive".into()));
    }
    let dims = n - 1;
    let per_axis = level as usize + 1;
    let step0 = FRAC_PI_2 / level as f64;
    let mut evaluations = 0usize;
    let mut eval = |angles: &[f64], evals: &mut usize| -> Result<f64> {
        *evals += 1;
        let x = orthant_point(angles);
        let v = f(&x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!("objective at {x:?}")))
        }
    };

    // Coarse grid; keep the best CANDIDATES in order of discovery on ties.
    let total = per_axis.pow(dims as u32);
    let mut best: Vec<(f64, Vec<f64>)> = Vec::with_capacity(CANDIDATES + 1);
    let mut angles = vec![0.0; dims];
    for idx in 0..total {
        let mut rem = idx;
        for d in (0..dims).rev() {
            angles[d] = step0 * (rem % per_axis) as f64;
            rem /= per_axis;
        }
        let v = eval(&angles, &mut evaluations)?;
        let pos = best.iter().position(|(bv, _)| v > *bv).unwrap_or(best.len());
        if pos < CANDIDATES {
            best.insert(pos, (v, angles.clone()));
            best.truncate(CANDIDATES);
        }
    }

    let mut winner: Option<(f64, Vec<f64>, f64)> = None;
    for (v0, a0) in best {
        let (v, a, step) = compass_search(&mut eval, &mut evaluations, v0, a0, step0)?;
        let better = match &winner {
            None => true,
            Some((wv, _, _)) => v > *wv,
        };
        if better {
            winner = Some((v, a, step));
        }
    }
    let (value, a, step) = winner.expect("grid has at least one point");
    Ok(OrthantMax {
        point: orthant_point(&a),
        value,
        cell_diameter: step * (dims as f64).sqrt(),
        evaluations,
    })
}

fn compass_search<E>(
    eval: &mut E,
    evaluations: &mut usize,
    mut value: f64,
    mut angles: Vec<f64>,
    mut step: f64,
) -> Result<(f64, Vec<f64>, f64)>
where
    E: FnMut(&[f64], &mut usize) -> Result<f64>,
{
    let dims = angles.len();
    let mut trial = angles.clone();
    while step * (dims as f64).sqrt() >= REFINE_TOL {
        let mut improved = false;
        for d in 0..dims {
            for dir in [1.0, -1.0] {
                trial.copy_from_slice(&angles);
                trial[d] = (angles[d] + dir * step).clamp(0.0, FRAC_PI_2);
                if trial[d] == angles[d] {
                    continue;
                }
                let v = eval(&trial, evaluations)?;
                if v > value {
                    value = v;
                    angles.copy_from_slice(&trial);
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok((value, angles, step))
}
