use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::report::CheckReport;
use super::symbol::CheckSymbol;
use crate::error::{Error, Result};
use crate::numerics::{maximize_on_sphere_orthant, MultiIndexSpec};

/// Radii probed by [`mixed_factor_check`]; the factor is not homogeneous.
pub const PROBE_RADII: [f64; 3] = [1e-2, 1.0, 1e2];

/// Parameters of `n(ξ) = (1 + a|ξ_1|^t)/(b + c|ξ|^t)`, and the exponent `r` of the
/// directional factor it is multiplied with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedFactorParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub t: f64,
    pub r: f64,
}

/// All nonempty subsets of `1..=n` as multi-indices with distinct entries.
pub fn distinct_index_sets(n: usize) -> Vec<MultiIndexSpec> {
    (1u32..(1 << n))
        .map(|mask| {
            let beta: Vec<usize> = (0..n).map(|i| ((mask >> i) & 1) as usize).collect();
            MultiIndexSpec::from_beta(&beta)
        })
        .collect()
}

/// `sup ξ_I |∂_I m(ξ)|` over the orthant part of the sphere of radius `rho`; coordinates
/// are kept at least `1e-8·rho` away from the axes.
pub fn weighted_sup_on_sphere(m: &CheckSymbol, indices: &MultiIndexSpec, rho: f64, level: u32) -> Result<f64> {
    let n = m.dim();
    let floor = 1e-8 * rho;
    let mut failure = None;
    let best = maximize_on_sphere_orthant(
        |u| {
            let xi: Vec<f64> = u.iter().map(|v| (v * rho).max(floor)).collect();
            let weight: f64 = indices.indices().iter().map(|&i| xi[i - 1]).product();
            match m.partial(&xi, indices) {
                Ok(d) => weight * d,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        n,
        level,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(best?.value)
}

/// Weighted derivative bounds for `n(ξ)` and for the product with `|ξ_1|^r/|ξ|^r`, at
/// each radius in [`PROBE_RADII`], plus a sampled bound on `|n|`.
pub fn mixed_factor_check(
    params: MixedFactorParams,
    n: usize,
    level: u32,
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    let MixedFactorParams { a, b, c, t, r } = params;
    if !(a >= 0.0 && b > 0.0 && c >= 0.0 && t > 0.0 && r > 0.0) || [a, b, c, t, r].iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("invalid mixed factor parameters {params:?}")));
    }
    if !(2..=4).contains(&n) {
        return Err(Error::UnsupportedDimension(n, "2, 3, 4"));
    }
    let factor = CheckSymbol::MixedFactor { n, a, b, c, t };
    let product = CheckSymbol::product(CheckSymbol::DirectionalPower { n, r }, factor.clone())?;
    let sets = distinct_index_sets(n);
    let mut factor_sup = 0.0f64;
    let mut product_sup = 0.0f64;
    let mut per_radius = Vec::new();
    for rho in PROBE_RADII {
        let mut here = 0.0f64;
        for set in &sets {
            let f = weighted_sup_on_sphere(&factor, set, rho, level)?;
            let p = weighted_sup_on_sphere(&product, set, rho, level)?;
            factor_sup = factor_sup.max(f);
            product_sup = product_sup.max(p);
            here = here.max(f.max(p));
        }
        per_radius.push(here);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sup_value = 0.0f64;
    for _ in 0..samples {
        let radius = 10f64.powf(rng.gen_range(-3.0..=3.0));
        let dir: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
        let xi: Vec<f64> = dir.iter().map(|v| v / norm * radius).collect();
        sup_value = sup_value.max(factor.eval(&xi)?.norm());
    }
    let measured = factor_sup.max(product_sup);
    Ok(CheckReport::new("mixed-factor", measured, None, 0.0)
        .param("a", a)
        .param("b", b)
        .param("c", c)
        .param("t", t)
        .param("r", r)
        .param("n", n)
        .param("samples", samples)
        .param("seed", seed)
        .meta("radii", PROBE_RADII.to_vec())
        .meta("sup_by_radius", per_radius)
        .meta("factor_weighted_sup", factor_sup)
        .meta("product_weighted_sup", product_sup)
        .meta("sampled_sup_modulus", sup_value)
        .meta("level", level)
        .require("bounded_modulus", sup_value.is_finite()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_factor_has_zero_derivatives() {
        let m = CheckSymbol::MixedFactor { n: 2, a: 0.0, b: 2.0, c: 0.0, t: 1.5 };
        for set in distinct_index_sets(2) {
            assert_eq!(weighted_sup_on_sphere(&m, &set, 1.0, 8).unwrap(), 0.0);
        }
        assert_eq!(distinct_index_sets(3).len(), 7);
    }

    #[test]
    fn check_reports_finite_constants() {
        let p = MixedFactorParams { a: 1.0, b: 1.0, c: 1.0, t: 2.0, r: 1.0 };
        let rep = mixed_factor_check(p, 2, 12, 1000, 3).unwrap();
        assert!(rep.pass, "{}", rep.to_json());
        assert!(rep.meta["sampled_sup_modulus"].as_f64().unwrap() <= 1.0 + 1e-12);
        let p = MixedFactorParams { a: 0.5, b: 2.0, c: 3.0, t: 1.3, r: 0.7 };
        let rep = mixed_factor_check(p, 3, 8, 100, 3).unwrap();
        assert!(rep.pass && rep.measured > 0.0, "{}", rep.to_json());
    }
}
