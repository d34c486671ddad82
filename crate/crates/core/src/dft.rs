//! Unitary discrete Fourier transforms, FUP norms and sharpness witnesses.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cantor::{iterate, power_index, Alphabet1D, Alphabet2D, GridSet, Point};
use crate::error::{FupError, Result};
use crate::linalg::{self, CMatrix};
use crate::lines::{self, Direction};
use crate::{par, ResourceCaps};

/// Relative threshold (against `‖f‖_∞`) below which values count as zero.
pub const SUPPORT_TOL: f64 = 1e-9;

/// `e^{2πi j / n}` with the exponent reduced exactly first.
pub fn unit_root(n: usize, j: i64) -> Complex64 {
    let r = j.rem_euclid(n as i64) as f64;
    let (s, c) = (TAU * r / n as f64).sin_cos();
    Complex64::new(c, s)
}

/// Table of `e^{2πi j / n}` for `j` in `0..n`.
pub fn root_table(n: usize) -> Vec<Complex64> {
    (0..n as i64).map(|j| unit_root(n, j)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn as_u8(self) -> u8 {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFunctionRepr {
    #[serde(rename = "N")]
    n: usize,
    dim: u8,
    values: Vec<[f64; 2]>,
}

/// A complex function on `ℤ_N` or `ℤ_N²`, row-major (x then y).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridFunctionRepr", into = "GridFunctionRepr")]
pub struct GridFunction {
    n: usize,
    dim: Dim,
    values: Vec<Complex64>,
}

impl TryFrom<GridFunctionRepr> for GridFunction {
    type Error = FupError;
    fn try_from(r: GridFunctionRepr) -> Result<Self> {
        let dim = match r.dim {
            1 => Dim::One,
            2 => Dim::Two,
            d => return Err(FupError::OutOfRange { what: "dimension", detail: format!("{d} (expected 1 or 2)") }),
        };
        GridFunction::new(r.n, dim, r.values.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

impl From<GridFunction> for GridFunctionRepr {
    fn from(f: GridFunction) -> Self {
        GridFunctionRepr { n: f.n, dim: f.dim.as_u8(), values: f.values.iter().map(|c| [c.re, c.im]).collect() }
    }
}

impl GridFunction {
    pub fn new(n: usize, dim: Dim, values: Vec<Complex64>) -> Result<Self> {
        let expected = match dim {
            Dim::One => n,
            Dim::Two => n * n,
        };
        if n == 0 || values.len() != expected {
            return Err(FupError::DimensionMismatch(format!(
                "N = {n}, dim = {} needs {expected} values, got {}",
                dim.as_u8(),
                values.len()
            )));
        }
        Ok(Self { n, dim, values })
    }

    pub fn zeros(n: usize, dim: Dim) -> Self {
        let len = if dim == Dim::One { n } else { n * n };
        Self { n, dim, values: vec![Complex64::new(0.0, 0.0); len] }
    }

    pub fn from_fn_2d(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        Self { n, dim: Dim::Two, values: (0..n * n).map(|i| f(i / n, i % n)).collect() }
    }

    pub fn from_fn_1d(n: usize, f: impl Fn(usize) -> Complex64) -> Self {
        Self { n, dim: Dim::One, values: (0..n).map(f).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn at(&self, p: Point) -> Complex64 {
        match self.dim {
            Dim::One => self.values[p.0],
            Dim::Two => self.values[p.0 * self.n + p.1],
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.sup_norm() == 0.0
    }

    /// Indices with `|f| > SUPPORT_TOL · ‖f‖_∞`.
    pub fn support_indices(&self) -> Vec<usize> {
        let tol = SUPPORT_TOL * self.sup_norm();
        if self.sup_norm() == 0.0 {
            return Vec::new();
        }
        (0..self.values.len()).filter(|&i| self.values[i].norm() > tol).collect()
    }

    /// The support as a grid set (1D points are stored as `(x, 0)`).
    pub fn support(&self) -> GridSet {
        let n = self.n;
        let pts = self.support_indices().into_iter().map(|i| match self.dim {
            Dim::One => (i, 0),
            Dim::Two => (i / n, i % n),
        });
        GridSet::new(n, pts).expect("support indices are in range")
    }

    /// Pointwise product.
    pub fn mul(&self, other: &GridFunction) -> Result<GridFunction> {
        if self.n != other.n || self.dim != other.dim {
            return Err(FupError::DimensionMismatch("pointwise product of unlike functions".into()));
        }
        Ok(Self {
            n: self.n,
            dim: self.dim,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        })
    }

    pub fn scale(&self, c: Complex64) -> GridFunction {
        Self { n: self.n, dim: self.dim, values: self.values.iter().map(|v| v * c).collect() }
    }
}

fn transform_lines(data: &mut [Complex64], n: usize, sign: f64, roots: &[Complex64]) {
    let scale = 1.0 / (n as f64).sqrt();
    par::for_each_chunk_mut(data, n, |_, line| {
        let input = line.to_vec();
        for (xi, out) in line.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, v) in input.iter().enumerate() {
                let w = roots[(xi * x) % n];
                acc += v * if sign < 0.0 { w.conj() } else { w };
            }
            *out = acc * scale;
        }
    });
}

fn transpose_square(data: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for x in 0..n {
        for y in 0..n {
            out[y * n + x] = data[x * n + y];
        }
    }
    out
}

fn transform(f: &GridFunction, sign: f64) -> GridFunction {
    let n = f.n;
    let roots = root_table(n);
    let mut data = f.values.clone();
    match f.dim {
        Dim::One => transform_lines(&mut data, n, sign, &roots),
        Dim::Two => {
            transform_lines(&mut data, n, sign, &roots);
            let mut t = transpose_square(&data, n);
            transform_lines(&mut t, n, sign, &roots);
            data = transpose_square(&t, n);
        }
    }
    GridFunction { n, dim: f.dim, values: data }
}

/// Unitary forward transform.
pub fn dft(f: &GridFunction) -> GridFunction {
    transform(f, -1.0)
}

/// Unitary inverse transform.
pub fn idft(f: &GridFunction) -> GridFunction {
    transform(f, 1.0)
}

/// Rows `rows`, columns `cols` of the unitary DFT matrix on `ℤ_N^dim`.
/// One-dimensional points are passed as `(x, 0)`. `inverse` selects the
/// conjugate kernel.
pub fn fourier_submatrix(n: usize, dim: Dim, rows: &[Point], cols: &[Point], inverse: bool) -> CMatrix {
    let roots = root_table(n);
    let scale = match dim {
        Dim::One => 1.0 / (n as f64).sqrt(),
        Dim::Two => 1.0 / n as f64,
    };
    let entries = par::map_range(rows.len(), |r| {
        let (a, b) = rows[r];
        cols.iter()
            .map(|&(x, y)| {
                let w = roots[(a * x + b * y) % n];
                (if inverse { w } else { w.conj() }) * scale
            })
            .collect::<Vec<_>>()
    });
    CMatrix::from_fn(rows.len(), cols.len(), |r, c| entries[r][c])
}

/// `‖1_Y ℱ 1_X‖_{2→2}` on `ℤ_N²`.
pub fn fup_norm(x: &GridSet, y: &GridSet) -> Result<f64> {
    norm_impl(x, y, false)
}

/// The same norm with the inverse transform; equals `fup_norm(y, x)`.
pub fn fup_norm_inverse(x: &GridSet, y: &GridSet) -> Result<f64> {
    norm_impl(x, y, true)
}

fn norm_impl(x: &GridSet, y: &GridSet, inverse: bool) -> Result<f64> {
    if x.n() != y.n() {
        return Err(FupError::DimensionMismatch(format!("N = {} vs N = {}", x.n(), y.n())));
    }
    if x.is_empty() || y.is_empty() {
        return Ok(0.0);
    }
    let m = fourier_submatrix(x.n(), Dim::Two, y.points(), x.points(), inverse);
    Ok(linalg::spectral_norm(&m))
}

/// `‖1_Y ℱ_N 1_X‖_{2→2}` on `ℤ_N`.
pub fn fup_norm_1d(n: usize, x: &[usize], y: &[usize]) -> f64 {
    if x.is_empty() || y.is_empty() {
        return 0.0;
    }
    let xs: Vec<Point> = x.iter().map(|&v| (v % n, 0)).collect();
    let ys: Vec<Point> = y.iter().map(|&v| (v % n, 0)).collect();
    linalg::spectral_norm(&fourier_submatrix(n, Dim::One, &ys, &xs, false))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEntry {
    pub k: u32,
    pub norm: f64,
    pub beta_k: f64,
}

/// Norms `‖1_{𝒴_k} ℱ 1_{𝒳_k}‖` with the per-scale exponents
/// `β_k = -log_M(norm) / k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormSeries {
    #[serde(rename = "M")]
    pub m: usize,
    pub entries: Vec<NormEntry>,
}

impl NormSeries {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,norm,beta_k\n");
        for e in &self.entries {
            s.push_str(&format!("{},{},{}\n", e.k, e.norm, e.beta_k));
        }
        s
    }
}

pub fn beta_from_norm(norm: f64, m: usize, k: u32) -> f64 {
    -norm.ln() / (k as f64 * (m as f64).ln())
}

/// Norm series for `k = 1..=k_max` with `A` in space and `B` in frequency.
pub fn beta_series(a: &Alphabet2D, b: &Alphabet2D, k_max: u32, caps: &ResourceCaps) -> Result<NormSeries> {
    if a.m() != b.m() {
        return Err(FupError::DimensionMismatch(format!("bases {} and {}", a.m(), b.m())));
    }
    if k_max == 0 {
        return Err(FupError::OutOfRange { what: "k_max", detail: "must be at least 1".into() });
    }
    let m = a.m();
    let grid = m.checked_pow(2 * k_max).unwrap_or(usize::MAX);
    caps.check_grid(grid)?;
    let mut entries = Vec::new();
    for k in 1..=k_max {
        let x = iterate(a, k)?;
        let y = iterate(b, k)?;
        let norm = fup_norm(x.points(), y.points())?;
        entries.push(NormEntry { k, norm, beta_k: beta_from_norm(norm, m, k) });
    }
    Ok(NormSeries { m, entries })
}

/// One-dimensional analogue of [`beta_series`].
pub fn beta_series_1d(a: &Alphabet1D, b: &Alphabet1D, k_max: u32, caps: &ResourceCaps) -> Result<NormSeries> {
    if a.m() != b.m() {
        return Err(FupError::DimensionMismatch(format!("bases {} and {}", a.m(), b.m())));
    }
    let m = a.m();
    caps.check_grid(m.checked_pow(k_max).unwrap_or(usize::MAX))?;
    let entries = (1..=k_max)
        .map(|k| {
            let n = m.pow(k);
            let norm = fup_norm_1d(n, &a.iterate(k), &b.iterate(k));
            NormEntry { k, norm, beta_k: beta_from_norm(norm, m, k) }
        })
        .collect();
    Ok(NormSeries { m, entries })
}

/// `dim {f : supp f ⊆ S, f̂ = 0 off T}`.
pub fn feasible_support_dim(s: &GridSet, t: &GridSet) -> Result<usize> {
    if s.n() != t.n() {
        return Err(FupError::DimensionMismatch(format!("N = {} vs N = {}", s.n(), t.n())));
    }
    if s.is_empty() {
        return Ok(0);
    }
    let tc = t.complement();
    if tc.is_empty() {
        return Ok(s.len());
    }
    let m = fourier_submatrix(s.n(), Dim::Two, tc.points(), s.points(), false);
    Ok(s.len() - linalg::numerical_rank(&m))
}

/// One-dimensional analogue of [`feasible_support_dim`].
pub fn feasible_support_dim_1d(n: usize, s: &[usize], t: &[usize]) -> usize {
    if s.is_empty() {
        return 0;
    }
    let mut in_t = vec![false; n];
    for &v in t {
        in_t[v % n] = true;
    }
    let tc: Vec<Point> = (0..n).filter(|&v| !in_t[v]).map(|v| (v, 0)).collect();
    if tc.is_empty() {
        return s.len();
    }
    let cols: Vec<Point> = s.iter().map(|&v| (v % n, 0)).collect();
    s.len() - linalg::numerical_rank(&fourier_submatrix(n, Dim::One, &tc, &cols, false))
}

/// A unit-norm `f` with `supp f ⊆ 𝒳_k(A)` and `supp f̂ ⊆ 𝒳_k(B)`, built from
/// a line of direction `v` in the limit set of `A` and one of direction `v⊥`
/// in that of `B`.
pub fn sharpness_witness(a: &Alphabet2D, b: &Alphabet2D, k: u32, v: (i64, i64)) -> Result<GridFunction> {
    if a.m() != b.m() {
        return Err(FupError::DimensionMismatch(format!("bases {} and {}", a.m(), b.m())));
    }
    let v = Direction::new(v.0, v.1)?;
    let vp = v.perp();
    let xs = iterate(a, k)?;
    let ys = iterate(b, k)?;
    let n = xs.n();

    let p = lines::line_in_cantor(a, v).map(|w| w.offset).unwrap_or_default();
    let q = lines::line_in_cantor(b, vp).map(|w| w.offset).unwrap_or_default();
    let pk = lines::discrete_line_offset(a, v, &p, k).map_err(|bad| FupError::ConstructionFailed {
        point: bad,
        reason: format!("line of direction ({}, {}) leaves the spatial iterate", v.a(), v.b()),
    })?;
    let qk = lines::discrete_line_offset(b, vp, &q, k).map_err(|bad| FupError::ConstructionFailed {
        point: bad,
        reason: format!("line of direction ({}, {}) leaves the frequency iterate", vp.a(), vp.b()),
    })?;

    let line = lines::discrete_line(v, pk, n);
    let amp = 1.0 / (n as f64).sqrt();
    let mut f = GridFunction::zeros(n, Dim::Two);
    for &(x, y) in line.points() {
        let phase = unit_root(n, (qk.0 * x + qk.1 * y) as i64);
        f.values[x * n + y] = phase * amp;
    }

    for p in f.support().iter() {
        if !xs.points().contains(p) {
            return Err(FupError::ConstructionFailed { point: p, reason: "support outside spatial iterate".into() });
        }
    }
    let fh = dft(&f);
    for p in fh.support().iter() {
        if !ys.points().contains(p) {
            return Err(FupError::ConstructionFailed {
                point: p,
                reason: "transform outside frequency iterate".into(),
            });
        }
    }
    Ok(f)
}

/// Checks `n` is `M^k` for the base of `a`.
pub fn check_modulus(m: usize, n: usize) -> Result<u32> {
    power_index(m, n).ok_or(FupError::InvalidModulus { n, m })
}
