use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{GridField, GridSpec};
use crate::symbols::{clamp_unit, AngularModulator};

/// Relative tolerance when matching an atom with its reflection.
const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub z: Vec<f64>,
    pub rate: f64,
}

/// Finite symmetric Lévy measure `ν = Σ λ_j δ_{z_j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpModel {
    pub n: usize,
    pub atoms: Vec<Atom>,
}

impl JumpModel {
    pub fn new(n: usize, atoms: Vec<Atom>) -> Result<Self> {
        let model = JumpModel { n, atoms };
        model.validate()?;
        Ok(model)
    }

    /// Builds the model from one representative per pair; `-z` is added with the same rate.
    pub fn from_pairs(n: usize, pairs: &[(Vec<f64>, f64)]) -> Result<Self> {
        let mut atoms = Vec::with_capacity(2 * pairs.len());
        for (z, rate) in pairs {
            atoms.push(Atom { z: z.clone(), rate: *rate });
            atoms.push(Atom { z: z.iter().map(|v| -v).collect(), rate: *rate });
        }
        Self::new(n, atoms)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: JumpModel = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.n) {
            return Err(Error::UnsupportedDimension(self.n, "1, 2"));
        }
        if self.atoms.is_empty() {
            return Err(Error::InvalidArgument("jump model needs at least one atom".into()));
        }
        for (j, a) in self.atoms.iter().enumerate() {
            if a.z.len() != self.n {
                return Err(Error::ShapeMismatch(format!("atom {j} has dimension {}", a.z.len())));
            }
            if !(a.rate > 0.0 && a.rate.is_finite()) || a.z.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!("atom {j} has a non-positive or non-finite rate or position")));
            }
            if a.z.iter().all(|&v| v == 0.0) {
                return Err(Error::InvalidArgument(format!("atom {j} sits at the origin")));
            }
            let scale = a.z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let mirrored = self.atoms.iter().any(|b| {
                b.z.iter().zip(&a.z).all(|(x, y)| (x + y).abs() <= SYMMETRY_TOL * scale)
                    && (b.rate - a.rate).abs() <= SYMMETRY_TOL * a.rate
            });
            if !mirrored {
                return Err(Error::InvalidArgument(format!("atom {j} at {:?} has no mirror image with equal rate", a.z)));
            }
        }
        Ok(())
    }

    pub fn total_rate(&self) -> f64 {
        self.atoms.iter().map(|a| a.rate).sum()
    }

    /// Same atoms with every rate multiplied by `k`.
    pub fn scaled_rates(&self, k: f64) -> Result<Self> {
        let atoms = self.atoms.iter().map(|a| Atom { z: a.z.clone(), rate: a.rate * k }).collect();
        Self::new(self.n, atoms)
    }

    fn check_point(&self, xi: &[f64]) -> Result<()> {
        if xi.len() != self.n {
            return Err(Error::ShapeMismatch(format!("frequency of dimension {} for n={}", xi.len(), self.n)));
        }
        Ok(())
    }

    /// `ρ(ξ) = Σ λ_j (cos(ξ·z_j) − 1)`.
    pub fn exponent(&self, xi: &[f64]) -> Result<f64> {
        self.check_point(xi)?;
        Ok(self.atoms.iter().map(|a| a.rate * (dot(xi, &a.z).cos() - 1.0)).sum())
    }

    /// `φ(z_j/|z_j|)` for every atom, clamped onto the unit disc.
    pub fn atom_weights(&self, phi: &AngularModulator) -> Result<Vec<Complex64>> {
        let ok = match phi {
            AngularModulator::Constant(_) | AngularModulator::Custom(_) => true,
            AngularModulator::SecondHarmonic { .. } => self.n == 2,
            AngularModulator::Monomial { powers, .. } => powers.len() == self.n,
            AngularModulator::Tabulated { n, .. } => *n == self.n,
        };
        if !ok {
            return Err(Error::InvalidArgument(format!("modulator {phi:?} cannot be evaluated in dimension {}", self.n)));
        }
        self.atoms
            .iter()
            .map(|a| {
                let norm = a.z.iter().map(|v| v * v).sum::<f64>().sqrt();
                let theta: Vec<f64> = a.z.iter().map(|v| v / norm).collect();
                let w = phi.eval_direction(&theta);
                if !w.re.is_finite() || !w.im.is_finite() {
                    return Err(Error::NonFinite(format!("modulator at atom {:?}", a.z)));
                }
                if w.norm() > 1.0 + 1e-12 {
                    return Err(Error::ModulatorBound(w.norm()));
                }
                Ok(clamp_unit(w))
            })
            .collect()
    }

    /// `Σ λ_j (cos(ξ·z_j) − 1) φ_j`.
    pub fn modulated_exponent(&self, xi: &[f64], weights: &[Complex64]) -> Result<Complex64> {
        self.check_point(xi)?;
        Ok(self.atoms.iter().zip(weights).map(|(a, w)| a.rate * (dot(xi, &a.z).cos() - 1.0) * w).sum())
    }

    /// Limiting multiplier `m_ν(ξ)`; zero where `ρ(ξ) = 0`.
    pub fn limiting_symbol(&self, xi: &[f64], phi: &AngularModulator) -> Result<Complex64> {
        let weights = self.atom_weights(phi)?;
        let rho = self.exponent(xi)?;
        if rho == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(self.modulated_exponent(xi, &weights)? / rho)
    }

    /// Multiplier of the projected transform at horizon `t_final` with a uniform start:
    /// `m_ν(ξ)(1 − e^{2Tρ(ξ)})`.
    pub fn finite_horizon_symbol(&self, xi: &[f64], phi: &AngularModulator, t_final: f64) -> Result<Complex64> {
        let rho = self.exponent(xi)?;
        Ok(self.limiting_symbol(xi, phi)? * (1.0 - (2.0 * t_final * rho).exp()))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `P_t f`: Fourier coefficients multiplied by `e^{tρ(ξ)}`.
pub fn semigroup_field(f: &GridField, t: f64, model: &JumpModel) -> Result<GridField> {
    let spec: &GridSpec = f.spec();
    if spec.dim() != model.n {
        return Err(Error::ShapeMismatch(format!("grid dimension {} vs model dimension {}", spec.dim(), model.n)));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    let mut coeffs = f.forward();
    for (flat, c) in coeffs.iter_mut().enumerate() {
        *c *= (t * model.exponent(&spec.frequency(flat))?).exp();
    }
    GridField::from_coefficients(spec.clone(), coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric_and_origin_atoms() {
        assert!(JumpModel::new(1, vec![Atom { z: vec![1.0], rate: 1.0 }]).is_err());
        assert!(JumpModel::from_pairs(2, &[(vec![0.0, 0.0], 1.0)]).is_err());
        assert!(JumpModel::from_pairs(3, &[(vec![1.0, 0.0, 0.0], 1.0)]).is_err());
        let m = JumpModel::from_pairs(2, &[(vec![1.0, 0.5], 2.0)]).unwrap();
        assert_eq!(m.total_rate(), 4.0);
        assert_eq!(JumpModel::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn pair_exponent_matches_cosine() {
        let (z, lam) = (vec![0.3, -0.7], 1.7);
        let m = JumpModel::from_pairs(2, &[(z.clone(), lam)]).unwrap();
        let spec = GridSpec::cube(2, 16, 2.0 * std::f64::consts::PI).unwrap();
        for flat in (0..spec.len()).step_by(2).take(100) {
            let xi = spec.frequency(flat);
            let direct = 2.0 * lam * ((xi[0] * z[0] + xi[1] * z[1]).cos() - 1.0);
            assert!((m.exponent(&xi).unwrap() - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn semigroup_identities() {
        let spec = GridSpec::cube(2, 16, 2.0 * std::f64::consts::PI).unwrap();
        let f = GridField::from_fn(spec, |x| Complex64::new((x[0] + 2.0 * x[1]).sin(), x[0].cos()));
        let m = JumpModel::from_pairs(2, &[(vec![0.4, 0.0], 1.0), (vec![0.2, 0.2], 0.5)]).unwrap();
        assert_eq!(semigroup_field(&f, 0.0, &m).unwrap(), f);
        let a = semigroup_field(&f, 0.6, &m.scaled_rates(2.0).unwrap()).unwrap();
        let b = semigroup_field(&f, 1.2, &m).unwrap();
        for (x, y) in a.data().iter().zip(b.data()) {
            assert!((x - y).norm() < 1e-13);
        }
        let d = JumpModel::from_pairs(1, &[(vec![0.5], 1.0)]).unwrap();
        assert!(semigroup_field(&f, 1.0, &d).is_err());
    }

    #[test]
    fn limiting_symbol_is_bounded() {
        let m = JumpModel::from_pairs(2, &[(vec![1.0, 0.0], 1.0), (vec![0.5, 0.5], 0.5)]).unwrap();
        let phi = AngularModulator::beurling_harmonic();
        for xi in [[1.0, 1.0], [2.0, -1.0], [0.0, 3.0]] {
            assert!(m.limiting_symbol(&xi, &phi).unwrap().norm() <= 1.0 + 1e-12);
        }
        let one = m.limiting_symbol(&[1.0, 2.0], &AngularModulator::one()).unwrap();
        assert!((one - 1.0).norm() < 1e-14);
        let line = JumpModel::from_pairs(1, &[(vec![1.0], 1.0)]).unwrap();
        assert!(line.atom_weights(&phi).is_err());
    }
}
