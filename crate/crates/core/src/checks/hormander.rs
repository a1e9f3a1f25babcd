use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::cases::rising_even;
use super::report::CheckReport;
use super::symbol::CheckSymbol;
use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, sphere_quadrature, MultiIndexSpec};

/// `⌊n/2⌋ + 1`.
pub fn critical_order(n: usize) -> usize {
    n / 2 + 1
}

/// Resolution of the shell integrals.
#[derive(Debug, Clone, Copy)]
pub struct ShellOptions {
    pub radial_nodes: usize,
    /// Fixed sphere rule level (`2^level` nodes for n = 2).
    pub sphere_level: u32,
}

impl ShellOptions {
    pub fn for_dim(n: usize) -> Self {
        let sphere_level = if n == 2 { 7 } else { 16 };
        ShellOptions { radial_nodes: 16, sphere_level }
    }
}

/// `R^{-n+2|β|} ∫_{R<|ξ|<2R} |∂^β m|² dξ` in polar coordinates.
pub fn shell_value(m: &CheckSymbol, beta: &MultiIndexSpec, radius: f64, opts: ShellOptions) -> Result<f64> {
    let n = m.dim();
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument(format!("shell radius must be positive, got {radius}")));
    }
    let rule = sphere_quadrature(n, opts.sphere_level)?;
    let (x, w) = gauss_legendre(opts.radial_nodes);
    let mut acc = 0.0;
    let mut point = vec![0.0; n];
    for (xr, wr) in x.iter().zip(&w) {
        let rho = radius * (1.5 + 0.5 * xr);
        let jac = 0.5 * radius * wr * rho.powi(n as i32 - 1);
        for (theta, ws) in rule.nodes().zip(rule.weights()) {
            for (p, t) in point.iter_mut().zip(theta) {
                *p = rho * t;
            }
            let d = m.partial(&point, beta)?;
            acc += jac * ws * d * d;
        }
    }
    Ok(radius.powi(2 * beta.order() as i32 - n as i32) * acc)
}

/// Measured `K = max_R sqrt(shell_value)`; for homogeneous symbols the shell values must
/// agree across `R` to `1e-6` relative.
pub fn hormander_shell_check(
    m: &CheckSymbol,
    beta: &MultiIndexSpec,
    radii: &[f64],
    opts: ShellOptions,
) -> Result<CheckReport> {
    let n = m.dim();
    if beta.dim() != n {
        return Err(Error::ShapeMismatch(format!("multi-index of dimension {} for n={n}", beta.dim())));
    }
    if beta.order() > critical_order(n) {
        return Err(Error::InvalidArgument(format!(
            "|beta|={} exceeds the critical order {}",
            beta.order(),
            critical_order(n)
        )));
    }
    if radii.is_empty() {
        return Err(Error::InvalidArgument("no shell radii".into()));
    }
    let values = radii.iter().map(|&r| shell_value(m, beta, r, opts)).collect::<Result<Vec<_>>>()?;
    let top = values.iter().cloned().fold(0.0, f64::max);
    let low = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = if top > 0.0 { (top - low) / top } else { 0.0 };
    let mut rep = CheckReport::new("hormander-shell", top.sqrt(), None, 1e-6)
        .param("symbol", m.name())
        .param("n", n)
        .param("beta", beta.beta().to_vec())
        .param("radii", radii.to_vec())
        .meta("shell_values", values)
        .meta("relative_spread", spread)
        .meta("radial_nodes", opts.radial_nodes)
        .meta("sphere_level", opts.sphere_level);
    if m.is_homogeneous() {
        rep = rep.require("homogeneous_invariance", spread <= 1e-6);
    }
    Ok(rep)
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_power_exponent(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidArgument("power fit needs at least two matching samples".into()));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0)) {
        return Err(Error::Domain("power fit needs positive samples".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(sxy / sxx)
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// `r(r-1)…(r-i+1)`.
fn falling(r: f64, i: usize) -> f64 {
    (0..i).map(|j| r - j as f64).product()
}

/// `|∂_γ |ξ·θ|^r|` for any index list `γ` (0-based).
pub fn g_derivative(xi: &[f64], theta: &[f64], r: f64, gamma: &[usize]) -> f64 {
    let dot: f64 = xi.iter().zip(theta).map(|(a, b)| a * b).sum();
    let i = gamma.len();
    let prod: f64 = gamma.iter().map(|&g| theta[g]).product();
    (falling(r, i) * dot.abs().powf(r - i as f64) * prod).abs()
}

/// `|∂_δ |ξ|^{-r}|` for distinct indices `δ` (0-based).
pub fn h_derivative(xi: &[f64], r: f64, delta: &[usize]) -> f64 {
    let q: f64 = xi.iter().map(|v| v * v).sum();
    let j = delta.len();
    let prod: f64 = delta.iter().map(|&d| xi[d]).product();
    (rising_even(r, j) * q.powf(-0.5 * r - j as f64) * prod).abs()
}

/// `C_n` for the `h` inequality: the largest `|∂_δ h|/r^j` on the unit sphere over
/// `j <= n₀` and a geometric sweep of `r ∈ [n₀, 10⁴]`. Depends on `n` only.
pub fn hbound_constant(n: usize) -> f64 {
    let n0 = critical_order(n);
    let mut best: f64 = 1.0;
    for s in 0..=64 {
        let r = n0 as f64 * (1e4 / n0 as f64).powf(s as f64 / 64.0);
        for j in 1..=n0.min(n) {
            // max of |ξ_{δ1}…ξ_{δj}| on the unit sphere is j^{-j/2}
            let v = rising_even(r, j) / r.powi(j as i32) * (j as f64).powf(-0.5 * j as f64);
            best = best.max(v);
        }
    }
    best
}

/// Samples `|∂^γ g_θ| <= r^i |ξ·θ|^{r-n₀}` and `|∂^δ h| <= C_n r^j` on the unit sphere
/// for `|γ| + |δ| <= n₀`.
pub fn gbound_hbound_check(n: usize, r: f64, theta: &[f64], samples: usize, seed: u64) -> Result<CheckReport> {
    let n0 = critical_order(n);
    if theta.len() != n {
        return Err(Error::ShapeMismatch(format!("direction of dimension {} for n={n}", theta.len())));
    }
    let tn = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (tn - 1.0).abs() > 1e-12 {
        return Err(Error::Domain("theta must be a unit vector".into()));
    }
    if !(r >= n0 as f64) || !r.is_finite() {
        return Err(Error::Domain(format!("needs r >= n0 = {n0}, got {r}")));
    }
    let c_h = hbound_constant(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut g_worst, mut h_worst) = (0.0f64, 0.0f64);
    let mut skipped = 0usize;
    for _ in 0..samples {
        let xi = random_unit(n, &mut rng);
        let i = rng.gen_range(0..=n0);
        let j = rng.gen_range(0..=(n0 - i).min(n));
        let gamma: Vec<usize> = (0..i).map(|_| rng.gen_range(0..n)).collect();
        let mut pool: Vec<usize> = (0..n).collect();
        let delta: Vec<usize> = (0..j).map(|_| pool.swap_remove(rng.gen_range(0..pool.len()))).collect();
        let dot: f64 = xi.iter().zip(theta).map(|(a, b)| a * b).sum::<f64>().abs();
        if dot < 1e-8 {
            skipped += 1;
        } else {
            let g = g_derivative(&xi, theta, r, &gamma);
            g_worst = g_worst.max(g / (r.powi(i as i32) * dot.powf(r - n0 as f64)));
        }
        h_worst = h_worst.max(h_derivative(&xi, r, &delta) / r.powi(j as i32));
    }
    let measured = g_worst.max(h_worst / c_h);
    Ok(CheckReport::new("gbound-hbound", measured, Some(1.0), 1e-12)
        .param("n", n)
        .param("r", r)
        .param("theta", theta.to_vec())
        .param("samples", samples)
        .param("seed", seed)
        .meta("gbound_worst_ratio", g_worst)
        .meta("hbound_worst_ratio", h_worst)
        .meta("hbound_constant", c_h)
        .meta("skipped_orthogonal", skipped))
}

/// `max |ξ|^{|β|} |∂^β m(ξ)|` over random `ξ` with `|ξ| ∈ [1e-2, 1e2]` and `1 <= |β| <= β_max`.
pub fn mikhlin_pointwise_check(m: &CheckSymbol, beta_max: usize, samples: usize, seed: u64) -> Result<CheckReport> {
    let n = m.dim();
    if beta_max == 0 || beta_max > n + 1 {
        return Err(Error::InvalidArgument(format!("beta_max must be in 1..={}, got {beta_max}", n + 1)));
    }
    if beta_max > 4 {
        return Err(Error::InvalidArgument("finite differences support orders up to 4".into()));
    }
    let betas = MultiIndexSpec::all_up_to(n, beta_max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut worst_at = Vec::new();
    let mut worst_beta = Vec::new();
    for _ in 0..samples {
        let dir = random_unit(n, &mut rng);
        let radius = 10f64.powf(rng.gen_range(-2.0..=2.0));
        let xi: Vec<f64> = dir.iter().map(|v| v * radius).collect();
        for b in &betas {
            let v = radius.powi(b.order() as i32) * m.partial(&xi, b)?;
            if v > worst {
                worst = v;
                worst_at = xi.clone();
                worst_beta = b.beta().to_vec();
            }
        }
    }
    Ok(CheckReport::new("mikhlin-pointwise", worst, None, 0.0)
        .param("symbol", m.name())
        .param("n", n)
        .param("beta_max", beta_max)
        .param("samples", samples)
        .param("seed", seed)
        .meta("argmax_xi", worst_at)
        .meta("argmax_beta", worst_beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::finite_difference_partial;
    use crate::symbols::{AngularModulator, SymbolDescriptor};
    use num_complex::Complex64;

    #[test]
    fn closed_form_g_h_match_differences() {
        let theta = [0.6, 0.8];
        let xi = [0.9, 0.3];
        let r = 5.0;
        for gamma in [vec![0], vec![1, 1], vec![0, 1]] {
            let b = MultiIndexSpec::from_indices(2, &gamma.iter().map(|g| g + 1).collect::<Vec<_>>()).unwrap();
            let fd = finite_difference_partial(|x| (x[0] * theta[0] + x[1] * theta[1]).abs().powf(r), &xi, &b, 1e-3).unwrap();
            assert!((fd.abs() - g_derivative(&xi, &theta, r, &gamma)).abs() < 1e-6);
        }
        for delta in [vec![0], vec![1], vec![0, 1]] {
            let b = MultiIndexSpec::from_indices(2, &delta.iter().map(|g| g + 1).collect::<Vec<_>>()).unwrap();
            let fd = finite_difference_partial(|x| (x[0] * x[0] + x[1] * x[1]).powf(-0.5 * r), &xi, &b, 1e-3).unwrap();
            assert!((fd.abs() - h_derivative(&xi, r, &delta)).abs() < 1e-6 * fd.abs().max(1.0));
        }
    }

    #[test]
    fn gh_check_passes() {
        let rep = gbound_hbound_check(2, 5.0, &[0.6, 0.8], 1000, 7).unwrap();
        assert!(rep.pass, "{}", rep.to_json());
        assert!(gbound_hbound_check(2, 1.0, &[1.0, 0.0], 10, 7).is_err());
    }

    #[test]
    fn shells_of_trivial_symbols_vanish() {
        let b = MultiIndexSpec::from_beta(&[1, 0]);
        let one = CheckSymbol::from_descriptor(&SymbolDescriptor::constant(2, Complex64::new(1.0, 0.0)).unwrap(), 4).unwrap();
        assert_eq!(hormander_shell_check(&one, &b, &[1.0], ShellOptions::for_dim(2)).unwrap().measured, 0.0);
        let flat = CheckSymbol::from_descriptor(&SymbolDescriptor::stable(2, 3.0, AngularModulator::one()).unwrap(), 8).unwrap();
        let rep = hormander_shell_check(&flat, &b, &[1.0], ShellOptions { radial_nodes: 4, sphere_level: 5 }).unwrap();
        assert!(rep.measured < 1e-8, "{}", rep.measured);
    }

    #[test]
    fn shell_invariance_for_second_harmonic() {
        let m = CheckSymbol::from_descriptor(
            &SymbolDescriptor::stable(2, 3.0, AngularModulator::beurling_harmonic()).unwrap(),
            12,
        )
        .unwrap();
        let rep = hormander_shell_check(&m, &MultiIndexSpec::from_beta(&[1, 0]), &[0.5, 1.0, 4.0], ShellOptions::for_dim(2))
            .unwrap();
        assert!(rep.pass, "{}", rep.to_json());
        // m = (3/5) ξ̄/ξ and |∂_1(ξ̄/ξ)| = 2|sin φ|/ρ, so K² = (3/5)²·4π·ln 2
        let want = (0.6f64 * 0.6 * 4.0 * std::f64::consts::PI * std::f64::consts::LN_2).sqrt();
        assert!((rep.measured - want).abs() < 1e-6 * want, "{} vs {want}", rep.measured);
    }

    #[test]
    fn mikhlin_scale_invariance() {
        let m = CheckSymbol::DirectionalPower { n: 2, r: 3.0 };
        let b = MultiIndexSpec::from_beta(&[1, 1]);
        let xi = [0.7, 0.4];
        let big = [7.0, 4.0];
        let a = (xi[0] * xi[0] + xi[1] * xi[1]) * m.partial(&xi, &b).unwrap();
        let c = (big[0] * big[0] + big[1] * big[1]) * m.partial(&big, &b).unwrap();
        assert!((a - c).abs() < 1e-6 * a);
        let rep = mikhlin_pointwise_check(&m, 3, 50, 1).unwrap();
        assert!(rep.pass && rep.measured > 0.0);
        assert!(mikhlin_pointwise_check(&m, 4, 5, 1).is_err());
    }

    #[test]
    fn power_fit() {
        let xs = [3.0, 6.0, 12.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 2.0 * x.powf(1.5)).collect();
        assert!((fit_power_exponent(&xs, &ys).unwrap() - 1.5).abs() < 1e-12);
    }
}
