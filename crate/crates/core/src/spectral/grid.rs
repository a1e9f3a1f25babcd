use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic box `Π [0, L_i)` sampled on `shape`, row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    shape: Vec<usize>,
    box_len: Vec<f64>,
}

impl GridSpec {
    pub fn new(shape: &[usize], box_len: &[f64]) -> Result<Self> {
        let n = shape.len();
        if !(1..=3).contains(&n) {
            return Err(Error::UnsupportedDimension(n, "1, 2, 3 (grid fields)"));
        }
        if box_len.len() != n {
            return Err(Error::ShapeMismatch(format!("{n} axes but {} box lengths", box_len.len())));
        }
        for &s in shape {
            if s < 8 || s % 2 != 0 {
                return Err(Error::InvalidArgument(format!("axis counts must be even and >= 8, got {s}")));
            }
        }
        for &l in box_len {
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::InvalidArgument(format!("box lengths must be positive, got {l}")));
            }
        }
        Ok(GridSpec { shape: shape.to_vec(), box_len: box_len.to_vec() })
    }

    /// Same count and length on every axis.
    pub fn cube(n: usize, count: usize, len: f64) -> Result<Self> {
        Self::new(&vec![count; n], &vec![len; n])
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn box_len(&self) -> &[f64] {
        &self.box_len
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.shape.iter().zip(&self.box_len).map(|(&s, &l)| l / s as f64).product()
    }

    pub fn box_volume(&self) -> f64 {
        self.box_len.iter().product()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.box_len[axis] / self.shape[axis] as f64
    }

    /// Multi-index of a flat position.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = flat % self.shape[a];
            flat /= self.shape[a];
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.shape).fold(0, |acc, (&i, &s)| acc * s + i)
    }

    /// Signed (wrapped) integer frequency of index `i` on an axis of `count` samples.
    pub fn wrapped(i: usize, count: usize) -> i64 {
        if i < count / 2 {
            i as i64
        } else {
            i as i64 - count as i64
        }
    }

    /// `ξ = 2π k̃ / L` at a flat position.
    pub fn frequency(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| 2.0 * PI * Self::wrapped(i, self.shape[a]) as f64 / self.box_len[a])
            .collect()
    }

    /// Sample position `x_i = i·L/N` at a flat position.
    pub fn position(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat).iter().enumerate().map(|(a, &i)| i as f64 * self.spacing(a)).collect()
    }

    /// All lattice frequencies in storage order.
    pub fn frequencies(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(move |f| self.frequency(f))
    }
}

/// Complex samples on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    spec: GridSpec,
    data: Vec<Complex64>,
}

impl GridField {
    pub fn new(spec: GridSpec, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != spec.len() {
            return Err(Error::ShapeMismatch(format!(
                "grid has {} points, got {} samples",
                spec.len(),
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("grid field samples".into()));
        }
        Ok(GridField { spec, data })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        let data = vec![Complex64::new(0.0, 0.0); spec.len()];
        GridField { spec, data }
    }

    /// Samples `f` at the grid positions.
    pub fn from_fn<F>(spec: GridSpec, mut f: F) -> Self
    where
        F: FnMut(&[f64]) -> Complex64,
    {
        let data = (0..spec.len()).map(|i| f(&spec.position(i))).collect();
        GridField { spec, data }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn mean(&self) -> Complex64 {
        self.data.iter().sum::<Complex64>() / self.data.len() as f64
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &GridField, b: Complex64) -> Result<GridField> {
        if self.spec != other.spec {
            return Err(Error::ShapeMismatch("fields live on different grids".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect();
        Ok(GridField { spec: self.spec.clone(), data })
    }

    pub fn scaled(&self, a: Complex64) -> GridField {
        GridField { spec: self.spec.clone(), data: self.data.iter().map(|x| a * x).collect() }
    }

    /// Discrete Fourier coefficients `F_k = Σ_x f(x) e^{-2πi k·x/N}` (unnormalized).
    pub fn forward(&self) -> Vec<Complex64> {
        let mut buf = self.data.clone();
        fft_nd(&mut buf, self.spec.shape(), false);
        buf
    }

    /// Inverse of [`forward`](Self::forward), including the `1/N` factor.
    pub fn from_coefficients(spec: GridSpec, mut coeffs: Vec<Complex64>) -> Result<GridField> {
        if coeffs.len() != spec.len() {
            return Err(Error::ShapeMismatch("coefficient count does not match grid".into()));
        }
        fft_nd(&mut coeffs, spec.shape(), true);
        let scale = 1.0 / spec.len() as f64;
        for z in &mut coeffs {
            *z *= scale;
        }
        GridField::new(spec, coeffs)
    }

    pub fn write_gf01<W: Write>(&self, mut w: W) -> Result<()> {
        let join = |v: Vec<String>| v.join(",");
        let header = format!(
            "GF01 n={} shape={} box={}\n",
            self.spec.dim(),
            join(self.spec.shape.iter().map(|s| s.to_string()).collect()),
            join(self.spec.box_len.iter().map(|l| format!("{l}")).collect()),
        );
        w.write_all(header.as_bytes())?;
        let mut bytes = Vec::with_capacity(16 * self.data.len());
        for z in &self.data {
            bytes.extend_from_slice(&z.re.to_le_bytes());
            bytes.extend_from_slice(&z.im.to_le_bytes());
        }
        w.write_all(&bytes)?;
        Ok(())
    }

    pub fn read_gf01<R: Read>(mut r: R) -> Result<GridField> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        Self::parse_gf01(&bytes)
    }

    pub fn parse_gf01(bytes: &[u8]) -> Result<GridField> {
        let bad = |offset: usize, message: String| Error::Gf01 { offset, message };
        let nl = bytes
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| bad(bytes.len(), "header line is not terminated".into()))?;
        let header =
            std::str::from_utf8(&bytes[..nl]).map_err(|e| bad(e.valid_up_to(), "header is not ASCII".into()))?;
        if !header.starts_with("GF01") {
            return Err(bad(0, "missing GF01 magic".into()));
        }
        let mut n = None;
        let mut shape = None;
        let mut box_len = None;
        let mut offset = 4;
        for token in header[4..].split(' ') {
            let start = offset;
            offset += token.len() + 1;
            if token.is_empty() {
                continue;
            }
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| bad(start, format!("expected key=value, found \"{token}\"")))?;
            let vstart = start + key.len() + 1;
            match key {
                "n" => n = Some(value.parse::<usize>().map_err(|e| bad(vstart, format!("n: {e}")))?),
                "shape" => {
                    let parsed: std::result::Result<Vec<usize>, _> = value.split(',').map(str::parse).collect();
                    shape = Some(parsed.map_err(|e| bad(vstart, format!("shape: {e}")))?);
                }
                "box" => {
                    let parsed: std::result::Result<Vec<f64>, _> = value.split(',').map(str::parse).collect();
                    box_len = Some(parsed.map_err(|e| bad(vstart, format!("box: {e}")))?);
                }
                other => return Err(bad(start, format!("unknown header key \"{other}\""))),
            }
        }
        let n = n.ok_or_else(|| bad(nl, "header lacks n=".into()))?;
        let shape = shape.ok_or_else(|| bad(nl, "header lacks shape=".into()))?;
        let box_len = box_len.ok_or_else(|| bad(nl, "header lacks box=".into()))?;
        if shape.len() != n || box_len.len() != n {
            return Err(bad(nl, format!("n={n} but shape has {} and box {} entries", shape.len(), box_len.len())));
        }
        let spec = GridSpec::new(&shape, &box_len).map_err(|e| bad(nl, e.to_string()))?;
        let body = &bytes[nl + 1..];
        let expected = 16 * spec.len();
        if body.len() != expected {
            let at = nl + 1 + body.len().min(expected);
            return Err(bad(at, format!("expected {expected} data bytes, found {}", body.len())));
        }
        let mut data = Vec::with_capacity(spec.len());
        for (i, chunk) in body.chunks_exact(16).enumerate() {
            let re = f64::from_le_bytes(chunk[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(chunk[8..].try_into().expect("8 bytes"));
            if !re.is_finite() || !im.is_finite() {
                return Err(bad(nl + 1 + 16 * i, "non-finite sample".into()));
            }
            data.push(Complex64::new(re, im));
        }
        GridField::new(spec, data)
    }
}

/// In-place multi-dimensional FFT along every axis (unnormalized both ways).
pub(crate) fn fft_nd(data: &mut [Complex64], shape: &[usize], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let total: usize = shape.iter().product();
    let mut stride = 1;
    for a in (0..shape.len()).rev() {
        let len = shape[a];
        let fft = if inverse { planner.plan_fft_inverse(len) } else { planner.plan_fft_forward(len) };
        let mut line = vec![Complex64::new(0.0, 0.0); len];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let block = stride * len;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    data[base + k * stride] = *v;
                }
            }
        }
        stride *= len;
    }
}
