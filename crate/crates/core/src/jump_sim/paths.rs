use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp;
use serde::{Deserialize, Serialize};

use super::model::JumpModel;
use super::projection::mean_and_stderr;
use crate::error::{Error, Result};
use crate::spectral::GridSpec;

/// One simulated trajectory on the periodic box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub times: Vec<f64>,
    pub atoms: Vec<usize>,
    pub x0: Vec<f64>,
    /// `x0 + Σ z` without reduction.
    pub x_t_unwrapped: Vec<f64>,
    /// Terminal position reduced into the box.
    pub x_t: Vec<f64>,
}

impl PathRecord {
    pub fn jumps(&self) -> usize {
        self.times.len()
    }

    /// `x_T - x_0` before reduction.
    pub fn displacement(&self) -> Vec<f64> {
        self.x_t_unwrapped.iter().zip(&self.x0).map(|(a, b)| a - b).collect()
    }
}

pub(crate) fn reduce(x: f64, len: f64) -> f64 {
    let y = x.rem_euclid(len);
    if y >= len {
        0.0
    } else {
        y
    }
}

/// Path `i` uses stream `i` of a ChaCha8 generator keyed by `seed`, so results do not
/// depend on how paths are scheduled.
pub fn simulate_path(model: &JumpModel, spec: &GridSpec, t_final: f64, seed: u64, index: u64) -> PathRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let x0: Vec<f64> = spec.box_len().iter().map(|&l| rng.gen_range(0.0..l)).collect();
    let lambda = model.total_rate();
    let waits = Exp::new(lambda).expect("positive total rate");
    let choose = WeightedIndex::new(model.atoms.iter().map(|a| a.rate)).expect("positive rates");
    let mut times = Vec::new();
    let mut atoms = Vec::new();
    let mut x = x0.clone();
    let mut t = 0.0;
    loop {
        t += waits.sample(&mut rng);
        if t > t_final {
            break;
        }
        let j = choose.sample(&mut rng);
        for (xi, zi) in x.iter_mut().zip(&model.atoms[j].z) {
            *xi += zi;
        }
        times.push(t);
        atoms.push(j);
    }
    let x_t = x.iter().zip(spec.box_len()).map(|(&v, &l)| reduce(v, l)).collect();
    PathRecord { times, atoms, x0, x_t_unwrapped: x, x_t }
}

pub fn simulate_paths(model: &JumpModel, spec: &GridSpec, t_final: f64, count: usize, seed: u64) -> Result<Vec<PathRecord>> {
    model.validate()?;
    if spec.dim() != model.n {
        return Err(Error::ShapeMismatch(format!("grid dimension {} vs model dimension {}", spec.dim(), model.n)));
    }
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {t_final}")));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("need at least one path".into()));
    }
    Ok((0..count as u64).map(|i| simulate_path(model, spec, t_final, seed, i)).collect())
}

/// `(1/count) Σ e^{iξ·(x_T − x_0)}` with its standard error.
pub fn empirical_char_function(paths: &[PathRecord], xi: &[f64]) -> (Complex64, f64) {
    let terms: Vec<Complex64> = paths
        .iter()
        .map(|p| {
            let phase: f64 = p.displacement().iter().zip(xi).map(|(d, k)| d * k).sum();
            Complex64::from_polar(1.0, phase)
        })
        .collect();
    mean_and_stderr(&terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn model() -> (JumpModel, GridSpec) {
        let spec = GridSpec::cube(2, 16, 2.0 * PI).unwrap();
        let h = spec.spacing(0);
        let m = JumpModel::from_pairs(2, &[(vec![2.0 * h, 0.0], 1.0), (vec![h, h], 0.5)]).unwrap();
        (m, spec)
    }

    #[test]
    fn deterministic_and_consistent() {
        let (m, spec) = model();
        let a = simulate_paths(&m, &spec, 2.0, 50, 7).unwrap();
        assert_eq!(a, simulate_paths(&m, &spec, 2.0, 50, 7).unwrap());
        assert_ne!(a, simulate_paths(&m, &spec, 2.0, 50, 8).unwrap());
        for p in &a {
            assert!(p.times.windows(2).all(|w| w[0] < w[1]));
            assert!(p.times.iter().all(|&t| t > 0.0 && t <= 2.0));
            for d in 0..2 {
                let sum: f64 = p.atoms.iter().map(|&j| m.atoms[j].z[d]).sum();
                assert!((p.x_t_unwrapped[d] - p.x0[d] - sum).abs() < 1e-12);
                assert!(p.x_t[d] >= 0.0 && p.x_t[d] < 2.0 * PI);
            }
        }
    }

    #[test]
    fn vanishing_rates_give_no_jumps() {
        let (m, spec) = model();
        let m = m.scaled_rates(1e-12).unwrap();
        let paths = simulate_paths(&m, &spec, 3.0, 1000, 1).unwrap();
        let total: usize = paths.iter().map(|p| p.jumps()).sum();
        assert!(total as f64 <= 1e-6 * 3.0 * 1000.0);
    }

    #[test]
    fn jump_counts_and_char_function() {
        let (m, spec) = model();
        let t = 1.5;
        let paths = simulate_paths(&m, &spec, t, 10_000, 42).unwrap();
        let (mean, se) = mean_and_stderr(&paths.iter().map(|p| Complex64::new(p.jumps() as f64, 0.0)).collect::<Vec<_>>());
        assert!((mean.re - m.total_rate() * t).abs() <= 4.0 * se, "{mean} ± {se}");
        for xi in [[1.0, 0.0], [0.0, 2.0], [1.0, -1.0], [3.0, 1.0]] {
            let (ecf, se) = empirical_char_function(&paths, &xi);
            let exact = (t * m.exponent(&xi).unwrap()).exp();
            assert!((ecf.re - exact).abs() <= 4.0 * se && ecf.im.abs() <= 4.0 * se, "{ecf} vs {exact}");
        }
    }
}
