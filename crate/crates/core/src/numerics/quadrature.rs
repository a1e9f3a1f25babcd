//! Quadrature on the unit sphere S^{n-1}.
//!
//! Two families live here:
//!
//! * [`QuadratureRule`]: fixed product rules (trapezoid on the circle, Gauss–Legendre
//!   products for n = 3, 4). These are the rules on which tabulated modulators live.
//! * [`AlignedRule`]: a rule rebuilt around a given axis. Kernels of the form
//!   `K(ξ·θ)` are only finitely smooth across the great sphere `ξ·θ = 0`; the aligned
//!   rule parametrizes the sphere by `t = ξ̂·θ`, splits at `t = 0` and integrates `t`
//!   with a tanh-sinh rule, so those kinks sit at the endpoints of the parameter range.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Surface area ω_{n-1} of S^{n-1}: 2π for the circle, 4π for S², 2π² for S³.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        // General formula, not needed at desk scale.
        _ => {
            let half = n as f64 / 2.0;
            2.0 * PI.powf(half) / super::gamma::log_gamma(half).map(f64::exp).unwrap_or(f64::NAN)
        }
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1], ascending nodes.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..(m + 1) / 2 {
        // Tricomi initial guess, then Newton on P_m.
        let mut x = ((i as f64 + 0.75) / (mf + 0.5) * PI).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(m, x);
            deriv = dp;
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(m, x);
        deriv = if dp != 0.0 { dp } else { deriv };
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Nodes (unit vectors) and positive weights on S^{n-1}.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    dim: usize,
    level: u32,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    est_error: f64,
}

impl QuadratureRule {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, j: usize) -> &[f64] {
        &self.nodes[j * self.dim..(j + 1) * self.dim]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.nodes.chunks_exact(self.dim)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Estimated relative error on smooth integrands (doubling self-test).
    pub fn est_error(&self) -> f64 {
        self.est_error
    }

    /// Σ_j w_j f(θ_j).
    pub fn integrate(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        self.nodes().zip(&self.weights).map(|(x, w)| w * f(x)).sum()
    }
}

/// Builds the fixed rule for S^{n-1}, n ∈ {2, 3, 4}.
///
/// * n = 2: `2^level` equispaced nodes, weights `2π/M`.
/// * n = 3: `level` Gauss–Legendre nodes in cos(polar) times `2·level` equispaced azimuths.
/// * n = 4: hyperspherical angles (a, b, c) with Gauss–Legendre in `a ∈ [0, π]` (weight
///   sin²a folded in), Gauss–Legendre in `cos b`, and `2·level` equispaced `c`.
///
/// `est_error` is the relative change of `∫|θ_1|^{5/2} dσ` when the rule is refined once.
pub fn sphere_quadrature(n: usize, level: u32) -> Result<QuadratureRule> {
    let mut rule = build_fixed(n, level)?;
    let refined = build_fixed(n, refine_level(n, level))?;
    let probe = |x: &[f64]| x[0].abs().powf(2.5);
    let coarse = rule.integrate(probe);
    let fine = refined.integrate(probe);
    rule.est_error = ((coarse - fine) / fine).abs().max(4.0 * f64::EPSILON);
    Ok(rule)
}

fn refine_level(n: usize, level: u32) -> u32 {
    if n == 2 {
        level + 1
    } else {
        2 * level
    }
}

fn build_fixed(n: usize, level: u32) -> Result<QuadratureRule> {
    if level < 4 {
        return Err(Error::InvalidArgument(format!("quadrature level must be >= 4, got {level}")));
    }
    let (nodes, weights) = match n {
        2 => {
            if level > 26 {
                return Err(Error::InvalidArgument(format!(
                    "circle level {level} exceeds 2^26 nodes"
                )));
            }
            let m = 1usize << level;
            let h = 2.0 * PI / m as f64;
            let mut nodes = Vec::with_capacity(2 * m);
            for j in 0..m {
                let (s, c) = (h * j as f64).sin_cos();
                nodes.extend_from_slice(&[c, s]);
            }
            (nodes, vec![h; m])
        }
        3 => {
            let l = level as usize;
            let (t, w) = gauss_legendre(l);
            let naz = 2 * l;
            let h = 2.0 * PI / naz as f64;
            let mut nodes = Vec::with_capacity(3 * l * naz);
            let mut weights = Vec::with_capacity(l * naz);
            for (ti, wi) in t.iter().zip(&w) {
                let s = ((1.0 - ti) * (1.0 + ti)).sqrt();
                for k in 0..naz {
                    let (sp, cp) = (h * k as f64).sin_cos();
                    nodes.extend_from_slice(&[s * cp, s * sp, *ti]);
                    weights.push(wi * h);
                }
            }
            (nodes, weights)
        }
        4 => {
            let l = level as usize;
            let (xa, wa) = gauss_legendre(l);
            let (tb, wb) = gauss_legendre(l);
            let nc = 2 * l;
            let hc = 2.0 * PI / nc as f64;
            let mut nodes = Vec::with_capacity(4 * l * l * nc);
            let mut weights = Vec::with_capacity(l * l * nc);
            for (x, w1) in xa.iter().zip(&wa) {
                let a = 0.5 * PI * (x + 1.0);
                let (sa, ca) = a.sin_cos();
                let wa_full = w1 * 0.5 * PI * sa * sa;
                for (cb, w2) in tb.iter().zip(&wb) {
                    let sb = ((1.0 - cb) * (1.0 + cb)).sqrt();
                    for k in 0..nc {
                        let (sc, cc) = (hc * k as f64).sin_cos();
                        nodes.extend_from_slice(&[ca, sa * cb, sa * sb * cc, sa * sb * sc]);
                        weights.push(wa_full * w2 * hc);
                    }
                }
            }
            (nodes, weights)
        }
        _ => return Err(Error::UnsupportedDimension(n, "2, 3, 4")),
    };
    Ok(QuadratureRule { dim: n, level, nodes, weights, est_error: 0.0 })
}

/// Visitor over the nodes of a sphere rule adapted to an axis.
///
/// The callback receives `(node index, θ, weight, axis·θ)`; fixed rules ignore the axis
/// apart from computing the dot product.
pub trait KernelRule {
    fn dim(&self) -> usize;

    fn est_error(&self) -> f64;

    /// `(n, level)` when the node set is a fixed [`QuadratureRule`]; tabulated modulators
    /// can only be evaluated on the rule they were tabulated on.
    fn fixed_key(&self) -> Option<(usize, u32)>;

    fn for_each_node(&self, axis: &[f64], visit: &mut dyn FnMut(usize, &[f64], f64, f64));
}

impl KernelRule for QuadratureRule {
    fn dim(&self) -> usize {
        self.dim
    }

    fn est_error(&self) -> f64 {
        self.est_error
    }

    fn fixed_key(&self) -> Option<(usize, u32)> {
        Some((self.dim, self.level))
    }

    fn for_each_node(&self, axis: &[f64], visit: &mut dyn FnMut(usize, &[f64], f64, f64)) {
        for (j, (x, w)) in self.nodes().zip(&self.weights).enumerate() {
            let t: f64 = x.iter().zip(axis).map(|(a, b)| a * b).sum();
            visit(j, x, *w, t);
        }
    }
}

/// A tanh-sinh rule on [0, 1]: nodes `t`, complements `1 - t`, and weights.
#[derive(Debug, Clone)]
struct TanhSinh {
    t: Vec<f64>,
    comp: Vec<f64>,
    w: Vec<f64>,
}

impl TanhSinh {
    /// `count` nodes over τ ∈ [-τ_max, τ_max] with t = 1/(1+e^{-π sinh τ}).
    fn new(count: usize, tau_max: f64) -> Self {
        let h = 2.0 * tau_max / (count as f64 - 1.0);
        let mut t = Vec::with_capacity(count);
        let mut comp = Vec::with_capacity(count);
        let mut w = Vec::with_capacity(count);
        for k in 0..count {
            let tau = -tau_max + h * k as f64;
            let u = PI * tau.sinh();
            let tk = 1.0 / (1.0 + (-u).exp());
            let ck = 1.0 / (1.0 + u.exp());
            let jac = PI * tau.cosh() * tk * ck;
            t.push(tk);
            comp.push(ck);
            w.push(h * jac);
        }
        TanhSinh { t, comp, w }
    }
}

/// Sphere rule rebuilt around each requested axis.
///
/// Points are `θ = σ t ξ̂ + sqrt(1-t²) ω` with `σ = ±1`, `t ∈ (0,1)` from a tanh-sinh
/// rule and `ω` from a rule on the equatorial sphere S^{n-2} ⊂ ξ̂^⊥. The surface measure
/// factorizes as `(1-t²)^{(n-3)/2} dt dσ_{n-2}(ω)`. Kernels `K(ξ·θ)` then see their
/// non-smooth set only at the endpoint `t = 0`, which tanh-sinh integrates with
/// exponential convergence.
#[derive(Debug, Clone)]
pub struct AlignedRule {
    dim: usize,
    level: u32,
    radial: TanhSinh,
    /// Points of S^{n-2} in equatorial coordinates (length n-1 each) and weights.
    equator: Vec<f64>,
    equator_w: Vec<f64>,
    est_error: f64,
}

impl AlignedRule {
    /// Node budget per `level`: n = 2 uses `8·level` radial nodes per hemisphere (level 12
    /// gives 192 nodes); n = 3 uses `level` radial nodes and `2·level` azimuths; n = 4 uses
    /// `level` radial nodes and the fixed S² rule at level `level/2`.
    pub fn new(n: usize, level: u32) -> Result<Self> {
        let mut rule = Self::build(n, level)?;
        let refined = Self::build(n, 2 * level)?;
        // Doubling test on a kink integrand with a smooth, non-symmetric factor.
        let axis = skew_axis(n);
        let probe = |x: &[f64], t: f64| t.abs().sqrt() * (0.7 * x[n - 1] + 0.3 * x[0]).exp();
        let coarse = rule.integrate_around(&axis, probe);
        let fine = refined.integrate_around(&axis, probe);
        rule.est_error = ((coarse - fine) / fine).abs().max(4.0 * f64::EPSILON);
        Ok(rule)
    }

    fn build(n: usize, level: u32) -> Result<Self> {
        if level < 4 {
            return Err(Error::InvalidArgument(format!("quadrature level must be >= 4, got {level}")));
        }
        let l = level as usize;
        let (radial, equator, equator_w) = match n {
            2 => (TanhSinh::new(8 * l, 4.0), vec![1.0, -1.0], vec![1.0, 1.0]),
            3 => {
                let naz = 2 * l;
                let h = 2.0 * PI / naz as f64;
                let mut pts = Vec::with_capacity(2 * naz);
                for k in 0..naz {
                    let (s, c) = (h * k as f64).sin_cos();
                    pts.extend_from_slice(&[c, s]);
                }
                (TanhSinh::new(l, 3.0), pts, vec![h; naz])
            }
            4 => {
                let s2 = build_fixed(3, (level / 2).max(4))?;
                (TanhSinh::new(l, 3.0), s2.nodes, s2.weights)
            }
            _ => return Err(Error::UnsupportedDimension(n, "2, 3, 4")),
        };
        let mut radial = radial;
        // Fold the (1-t²)^{(n-3)/2} factor into the radial weights.
        let exponent = (n as f64 - 3.0) / 2.0;
        for k in 0..radial.t.len() {
            let one_minus_sq = radial.comp[k] * (1.0 + radial.t[k]);
            radial.w[k] *= one_minus_sq.powf(exponent);
        }
        Ok(AlignedRule { dim: n, level, radial, equator, equator_w, est_error: 0.0 })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        2 * self.radial.t.len() * self.equator_w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Σ w f(θ, ξ̂·θ) over the rule adapted to `axis`.
    pub fn integrate_around(&self, axis: &[f64], mut f: impl FnMut(&[f64], f64) -> f64) -> f64 {
        let mut acc = 0.0;
        self.for_each_node(axis, &mut |_, x, w, t| acc += w * f(x, t));
        acc
    }
}

fn skew_axis(n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|i| 0.3 + 0.41 * i as f64).collect();
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    raw.into_iter().map(|v| v / norm).collect()
}

/// Orthonormal frame whose first column is `axis` (Householder reflection).
pub(crate) fn frame_for_axis(axis: &[f64]) -> Vec<Vec<f64>> {
    let n = axis.len();
    let sign = if axis[0] >= 0.0 { 1.0 } else { -1.0 };
    // v = axis + sign e1; H = I - 2 v v^T / (v^T v) maps e1 to -sign·axis.
    let mut v = axis.to_vec();
    v[0] += sign;
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let mut cols = Vec::with_capacity(n);
    for k in 0..n {
        let mut col: Vec<f64> = (0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect();
        let coef = 2.0 * v[k] / vv;
        for i in 0..n {
            col[i] -= coef * v[i];
        }
        cols.push(col);
    }
    // First column is -sign·axis; flip to get axis exactly.
    cols[0] = axis.to_vec();
    cols
}

impl KernelRule for AlignedRule {
    fn dim(&self) -> usize {
        self.dim
    }

    fn est_error(&self) -> f64 {
        self.est_error
    }

    fn fixed_key(&self) -> Option<(usize, u32)> {
        None
    }

    fn for_each_node(&self, axis: &[f64], visit: &mut dyn FnMut(usize, &[f64], f64, f64)) {
        let n = self.dim;
        let frame = frame_for_axis(axis);
        let eq_dim = n - 1;
        // Embed the equatorial rule once per axis.
        let mut embedded = vec![0.0; self.equator_w.len() * n];
        for (q, omega) in self.equator.chunks_exact(eq_dim).enumerate() {
            let dst = &mut embedded[q * n..(q + 1) * n];
            for (c, col) in omega.iter().zip(&frame[1..]) {
                for i in 0..n {
                    dst[i] += c * col[i];
                }
            }
        }
        let mut theta = vec![0.0; n];
        let mut j = 0;
        for sigma in [1.0, -1.0] {
            for k in 0..self.radial.t.len() {
                let t = self.radial.t[k];
                let s = (self.radial.comp[k] * (1.0 + t)).sqrt();
                let wt = self.radial.w[k];
                for (q, wq) in self.equator_w.iter().enumerate() {
                    let e = &embedded[q * n..(q + 1) * n];
                    for i in 0..n {
                        theta[i] = sigma * t * axis[i] + s * e[i];
                    }
                    visit(j, &theta, wt * wq, sigma * t);
                    j += 1;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        for deg in 0..14 {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((got - want).abs() < 1e-14, "deg {deg}: {got} vs {want}");
        }
    }

    #[test]
    fn circle_total_measure() {
        let rule = sphere_quadrature(2, 8).unwrap();
        let total: f64 = rule.weights().iter().sum();
        assert!((total - 2.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn s2_first_and_second_moments() {
        let rule = sphere_quadrature(3, 32).unwrap();
        for i in 0..3 {
            let m1 = rule.integrate(|x| x[i]);
            assert!(m1.abs() < 1e-12, "coordinate {i}: {m1}");
        }
        let m2 = rule.integrate(|x| x[0] * x[0]);
        assert!((m2 - 4.0 * PI / 3.0).abs() < 1e-8);
    }

    #[test]
    fn nodes_are_unit_and_weights_positive() {
        for (n, level) in [(2, 6), (3, 8), (4, 6)] {
            let rule = sphere_quadrature(n, level).unwrap();
            for x in rule.nodes() {
                let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((norm - 1.0).abs() < 1e-12);
            }
            assert!(rule.weights().iter().all(|w| *w > 0.0));
            let total: f64 = rule.weights().iter().sum();
            assert!((total - sphere_area(n)).abs() <= 10.0 * rule.est_error() * sphere_area(n));
        }
    }

    #[test]
    fn s3_moments() {
        let rule = sphere_quadrature(4, 16).unwrap();
        let total: f64 = rule.weights().iter().sum();
        assert!((total - 2.0 * PI * PI).abs() < 1e-12);
        // Each coordinate carries a quarter of ∫|θ|² dσ.
        for i in 0..4 {
            let m2 = rule.integrate(|x| x[i] * x[i]);
            assert!((m2 - PI * PI / 2.0).abs() < 1e-11, "coordinate {i}: {m2}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(sphere_quadrature(5, 8).is_err());
        assert!(sphere_quadrature(2, 3).is_err());
        assert!(AlignedRule::new(1, 8).is_err());
    }

    #[test]
    fn doubling_consistency_on_smooth_integrand() {
        let f = |x: &[f64]| (x[0] + 0.5 * x[1]).exp();
        for (n, level) in [(2, 6), (3, 8), (4, 6)] {
            let coarse = sphere_quadrature(n, level).unwrap();
            let fine = sphere_quadrature(n, level + 1).unwrap();
            let a = coarse.integrate(f);
            let b = fine.integrate(f);
            assert!(((a - b) / b).abs() <= coarse.est_error(), "n={n}: {a} vs {b}");
        }
    }

    #[test]
    fn frame_is_orthonormal_with_axis_first() {
        for axis in [vec![1.0, 0.0, 0.0], vec![-0.6, 0.0, 0.8], vec![0.5, -0.5, 0.5, 0.5]] {
            let frame = frame_for_axis(&axis);
            assert_eq!(frame[0], axis);
            for a in 0..axis.len() {
                for b in 0..axis.len() {
                    let dot: f64 = frame[a].iter().zip(&frame[b]).map(|(x, y)| x * y).sum();
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((dot - want).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn aligned_rule_nodes_and_measure() {
        for (n, level) in [(2usize, 12u32), (3, 32), (4, 32)] {
            let rule = AlignedRule::new(n, level).unwrap();
            let axis = skew_axis(n);
            let mut total = 0.0;
            rule.for_each_node(&axis, &mut |_, x, w, t| {
                let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((norm - 1.0).abs() < 1e-12);
                let dot: f64 = x.iter().zip(&axis).map(|(a, b)| a * b).sum();
                assert!((dot - t).abs() < 1e-12);
                assert!(w > 0.0);
                total += w;
            });
            assert!(((total - sphere_area(n)) / sphere_area(n)).abs() < 1e-9, "n={n}: {total}");
        }
    }
}
