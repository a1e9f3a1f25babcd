use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::modulator::AngularModulator;
use super::profile::{ProfileSpec, RadialProfile};
use crate::error::{Error, Result};

/// Multiplier families.
#[derive(Debug, Clone)]
pub enum Family {
    /// Kernel `|ξ·θ|^r`.
    Stable { r: f64 },
    /// Kernel `C_r|ξ·θ|^r + C_s|ξ·θ|^s`.
    Mixed { r: f64, s: f64, c_r: f64, c_s: f64 },
    /// Kernel `L(ξ·θ)`.
    GeneralL { profile: RadialProfile },
    /// Kernel `L(ξ·θ)` plus Gaussian parts `ξ^T A ξ` (complex symmetric, row-major) and
    /// `ξ^T B ξ` (real PSD).
    LevyGauss { profile: RadialProfile, a: Vec<Complex64>, b: Vec<f64> },
    Beurling,
    RieszPower { k: u32 },
    Constant { c: Complex64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Stable { .. } => "stable",
            Family::Mixed { .. } => "mixed",
            Family::GeneralL { .. } => "general-l",
            Family::LevyGauss { .. } => "levy-gauss",
            Family::Beurling => "beurling",
            Family::RieszPower { .. } => "riesz-power",
            Family::Constant { .. } => "constant",
        }
    }

    /// Families evaluated as a ratio of sphere integrals.
    pub fn uses_quadrature(&self) -> bool {
        matches!(
            self,
            Family::Stable { .. } | Family::Mixed { .. } | Family::GeneralL { .. } | Family::LevyGauss { .. }
        )
    }

    /// `m(tξ) = m(ξ)` for `t > 0`.
    pub fn is_homogeneous(&self) -> bool {
        match self {
            Family::Stable { .. } | Family::Beurling | Family::RieszPower { .. } | Family::Constant { .. } => true,
            Family::Mixed { r, s, .. } => r == s,
            Family::GeneralL { profile } => profile.power_params().is_some(),
            Family::LevyGauss { .. } => false,
        }
    }
}

/// A multiplier: family, dimension, angular modulator and the value assigned at ξ = 0.
#[derive(Debug, Clone)]
pub struct SymbolDescriptor {
    pub n: usize,
    pub family: Family,
    pub phi: AngularModulator,
    pub dc: Complex64,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl SymbolDescriptor {
    fn build(n: usize, family: Family, phi: AngularModulator) -> Result<Self> {
        let dc = match &family {
            Family::Constant { c } => *c,
            _ => zero(),
        };
        let d = SymbolDescriptor { n, family, phi, dc };
        d.validate()?;
        Ok(d)
    }

    pub fn stable(n: usize, r: f64, phi: AngularModulator) -> Result<Self> {
        Self::build(n, Family::Stable { r }, phi)
    }

    pub fn mixed(n: usize, r: f64, s: f64, c_r: f64, c_s: f64, phi: AngularModulator) -> Result<Self> {
        Self::build(n, Family::Mixed { r, s, c_r, c_s }, phi)
    }

    pub fn general_l(n: usize, profile: RadialProfile, phi: AngularModulator) -> Result<Self> {
        Self::build(n, Family::GeneralL { profile }, phi)
    }

    pub fn levy_gauss(
        n: usize,
        profile: RadialProfile,
        phi: AngularModulator,
        a: Vec<Complex64>,
        b: Vec<f64>,
    ) -> Result<Self> {
        Self::build(n, Family::LevyGauss { profile, a, b }, phi)
    }

    pub fn beurling() -> Self {
        Self::build(2, Family::Beurling, AngularModulator::one()).expect("valid")
    }

    pub fn riesz_power(n: usize, k: u32) -> Result<Self> {
        Self::build(n, Family::RieszPower { k }, AngularModulator::one())
    }

    pub fn constant(n: usize, c: Complex64) -> Result<Self> {
        Self::build(n, Family::Constant { c }, AngularModulator::one())
    }

    pub fn with_dc(mut self, dc: Complex64) -> Self {
        self.dc = dc;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if !(2..=4).contains(&n) {
            return Err(Error::UnsupportedDimension(n, "2, 3, 4"));
        }
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Descriptor(format!("{name} must be positive, got {v}")))
            }
        };
        match &self.family {
            Family::Stable { r } => positive("r", *r)?,
            Family::Mixed { r, s, c_r, c_s } => {
                positive("r", *r)?;
                positive("C_r", *c_r)?;
                if !(s > r) || !s.is_finite() {
                    return Err(Error::Descriptor(format!("mixed symbol needs r < s, got r={r}, s={s}")));
                }
                if !(*c_s >= 0.0) || !c_s.is_finite() {
                    return Err(Error::Descriptor(format!("C_s must be >= 0, got {c_s}")));
                }
            }
            Family::GeneralL { .. } => {}
            Family::LevyGauss { a, b, .. } => {
                if a.len() != n * n || b.len() != n * n {
                    return Err(Error::Descriptor(format!("Gaussian matrices must be {n}x{n}")));
                }
                for i in 0..n {
                    for j in 0..n {
                        if (a[i * n + j] - a[j * n + i]).norm() > 1e-12 || (b[i * n + j] - b[j * n + i]).abs() > 1e-12 {
                            return Err(Error::Descriptor("Gaussian matrices must be symmetric".into()));
                        }
                    }
                }
                if !is_psd(b, n) {
                    return Err(Error::Descriptor("B must be positive semidefinite".into()));
                }
            }
            Family::Beurling => {
                if n != 2 {
                    return Err(Error::UnsupportedDimension(n, "2 (Beurling)"));
                }
            }
            Family::RieszPower { k } => {
                if *k == 0 {
                    return Err(Error::Descriptor("Riesz power needs k >= 1".into()));
                }
            }
            Family::Constant { .. } => {}
        }
        if self.family.uses_quadrature() {
            self.phi.validate(n)?;
        }
        if !self.dc.re.is_finite() || !self.dc.im.is_finite() {
            return Err(Error::Descriptor("dc value must be finite".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&DescriptorDoc::try_from(self)?)?)
    }

    pub fn to_json_value(&self) -> Result<serde_json::Value> {
        Ok(serde_json::to_value(DescriptorDoc::try_from(self)?)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DescriptorDoc = serde_json::from_str(text).map_err(|e| Error::Descriptor(e.to_string()))?;
        doc.try_into()
    }

    /// Reads a descriptor from a file path, or parses the argument itself when it
    /// starts with `{`.
    pub fn from_path_or_inline(arg: &str) -> Result<Self> {
        if arg.trim_start().starts_with('{') {
            Self::from_json(arg)
        } else {
            let text = std::fs::read_to_string(Path::new(arg))
                .map_err(|e| Error::Descriptor(format!("cannot read descriptor {arg}: {e}")))?;
            Self::from_json(&text)
        }
    }
}

/// Sylvester-free PSD test: LDL^T with a small pivot tolerance.
fn is_psd(b: &[f64], n: usize) -> bool {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let tol = 1e-12 * scale;
    let mut m = b.to_vec();
    for k in 0..n {
        let pivot = m[k * n + k];
        if pivot < -tol {
            return false;
        }
        if pivot.abs() <= tol {
            // Zero pivot: the rest of the row must vanish too.
            if (k + 1..n).any(|j| m[k * n + j].abs() > tol.sqrt() * scale.sqrt()) {
                return false;
            }
            continue;
        }
        for i in k + 1..n {
            let f = m[i * n + k] / pivot;
            for j in k..n {
                m[i * n + j] -= f * m[k * n + j];
            }
        }
    }
    true
}

type Pair = [f64; 2];

fn c2p(z: Complex64) -> Pair {
    [z.re, z.im]
}

fn p2c(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// Serialized form of an [`AngularModulator`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PhiDoc {
    Constant { c: Pair },
    SecondHarmonic { sign: i8 },
    Monomial { coef: Pair, powers: Vec<u32> },
    Tabulated { level: u32, values: Vec<Pair> },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DescriptorDoc {
    family: String,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c_r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c: Option<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    profile: Option<ProfileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<Vec<Vec<Pair>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi: Option<PhiDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dc: Option<Pair>,
}

impl TryFrom<&AngularModulator> for PhiDoc {
    type Error = Error;

    fn try_from(m: &AngularModulator) -> Result<Self> {
        Ok(match m {
            AngularModulator::Constant(c) => PhiDoc::Constant { c: c2p(*c) },
            AngularModulator::SecondHarmonic { sign } => PhiDoc::SecondHarmonic { sign: *sign },
            AngularModulator::Monomial { coef, powers } => {
                PhiDoc::Monomial { coef: c2p(*coef), powers: powers.clone() }
            }
            AngularModulator::Tabulated { level, values, .. } => {
                PhiDoc::Tabulated { level: *level, values: values.iter().map(|v| c2p(*v)).collect() }
            }
            AngularModulator::Custom(_) => {
                return Err(Error::Descriptor("closure modulators cannot be serialized".into()))
            }
        })
    }
}

impl PhiDoc {
    pub fn into_modulator(self, n: usize) -> AngularModulator {
        match self {
            PhiDoc::Constant { c } => AngularModulator::Constant(p2c(c)),
            PhiDoc::SecondHarmonic { sign } => AngularModulator::SecondHarmonic { sign },
            PhiDoc::Monomial { coef, powers } => AngularModulator::Monomial { coef: p2c(coef), powers },
            PhiDoc::Tabulated { level, values } => AngularModulator::Tabulated {
                n,
                level,
                values: values.into_iter().map(p2c).collect(),
            },
        }
    }
}

impl TryFrom<&SymbolDescriptor> for DescriptorDoc {
    type Error = Error;

    fn try_from(d: &SymbolDescriptor) -> Result<Self> {
        let mut doc = DescriptorDoc {
            family: d.family.name().to_string(),
            n: d.n,
            r: None,
            s: None,
            c_r: None,
            c_s: None,
            k: None,
            c: None,
            profile: None,
            a: None,
            b: None,
            phi: None,
            dc: Some(c2p(d.dc)),
        };
        let profile_spec = |p: &RadialProfile| {
            p.spec()
                .cloned()
                .ok_or_else(|| Error::Descriptor("closure densities cannot be serialized".into()))
        };
        match &d.family {
            Family::Stable { r } => doc.r = Some(*r),
            Family::Mixed { r, s, c_r, c_s } => {
                doc.r = Some(*r);
                doc.s = Some(*s);
                doc.c_r = Some(*c_r);
                doc.c_s = Some(*c_s);
            }
            Family::GeneralL { profile } => doc.profile = Some(profile_spec(profile)?),
            Family::LevyGauss { profile, a, b } => {
                doc.profile = Some(profile_spec(profile)?);
                doc.a = Some(a.chunks(d.n).map(|row| row.iter().map(|z| c2p(*z)).collect()).collect());
                doc.b = Some(b.chunks(d.n).map(|row| row.to_vec()).collect());
            }
            Family::Beurling => {}
            Family::RieszPower { k } => doc.k = Some(*k),
            Family::Constant { c } => doc.c = Some(c2p(*c)),
        }
        if d.family.uses_quadrature() {
            doc.phi = Some(PhiDoc::try_from(&d.phi)?);
        }
        Ok(doc)
    }
}

impl TryFrom<DescriptorDoc> for SymbolDescriptor {
    type Error = Error;

    fn try_from(doc: DescriptorDoc) -> Result<Self> {
        let n = doc.n;
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::Descriptor(format!("family {} requires field \"{name}\"", doc.family)))
        };
        let phi = match doc.phi {
            Some(p) => p.into_modulator(n),
            None => AngularModulator::one(),
        };
        let profile = || -> Result<RadialProfile> {
            doc.profile
                .as_ref()
                .ok_or_else(|| Error::Descriptor(format!("family {} requires field \"profile\"", doc.family)))?
                .build()
        };
        let square = |rows: usize, len: &[usize]| rows == n && len.iter().all(|&l| l == n);
        let family = match doc.family.as_str() {
            "stable" => Family::Stable { r: need(doc.r, "r")? },
            "mixed" => Family::Mixed {
                r: need(doc.r, "r")?,
                s: need(doc.s, "s")?,
                c_r: need(doc.c_r, "c_r")?,
                c_s: need(doc.c_s, "c_s")?,
            },
            "general-l" => Family::GeneralL { profile: profile()? },
            "levy-gauss" => {
                let a = doc.a.as_ref().ok_or_else(|| Error::Descriptor("levy-gauss requires \"a\"".into()))?;
                let b = doc.b.as_ref().ok_or_else(|| Error::Descriptor("levy-gauss requires \"b\"".into()))?;
                let a_lens: Vec<usize> = a.iter().map(|r| r.len()).collect();
                let b_lens: Vec<usize> = b.iter().map(|r| r.len()).collect();
                if !square(a.len(), &a_lens) || !square(b.len(), &b_lens) {
                    return Err(Error::Descriptor(format!("Gaussian matrices must be {n}x{n}")));
                }
                Family::LevyGauss {
                    profile: profile()?,
                    a: a.iter().flatten().map(|p| p2c(*p)).collect(),
                    b: b.iter().flatten().copied().collect(),
                }
            }
            "beurling" => Family::Beurling,
            "riesz-power" => Family::RieszPower {
                k: doc.k.ok_or_else(|| Error::Descriptor("riesz-power requires \"k\"".into()))?,
            },
            "constant" => Family::Constant {
                c: p2c(doc.c.ok_or_else(|| Error::Descriptor("constant requires \"c\"".into()))?),
            },
            other => return Err(Error::Descriptor(format!("unknown family \"{other}\""))),
        };
        let mut d = SymbolDescriptor::build(n, family, phi)?;
        if let Some(dc) = doc.dc {
            d.dc = p2c(dc);
        }
        d.validate()?;
        Ok(d)
    }
}
