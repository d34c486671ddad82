//! Quantum open baker's maps in one and two dimensions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cantor::{Alphabet1D, Alphabet2D};
use crate::dft::{beta_series, beta_series_1d, idft, root_table, Dim, GridFunction};
use crate::error::{FupError, Result};
use crate::linalg::{self, CMatrix};
use crate::lines::orthogonal_pair_condition;
use crate::{par, ResourceCaps};

/// Where a cutoff is sampled on `ℤ_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    /// `χ(j/n)`.
    #[default]
    Grid,
    /// `χ((j + 1/2)/n)`.
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffKind {
    /// `exp(1 − 1/(1 − (2x−1)²))` on `(0, 1)`.
    SmoothBump,
    /// Equal to 1 on `[lo, hi]`, with smooth transitions to 0 at the ends.
    PlateauBump {
        flat: [f64; 2],
    },
    /// Constant 1; not compactly supported inside `(0, 1)`.
    Indicator,
    Zero,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CutoffRepr {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    flat: Option<[f64; 2]>,
    #[serde(default)]
    sampling: Sampling,
}

/// The cutoff `χ` together with how it is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CutoffRepr", into = "CutoffRepr")]
pub struct CutoffProfile {
    pub kind: CutoffKind,
    pub sampling: Sampling,
}

impl TryFrom<CutoffRepr> for CutoffProfile {
    type Error = FupError;
    fn try_from(r: CutoffRepr) -> Result<Self> {
        let kind = match (r.kind.as_str(), r.flat) {
            ("smooth-bump", None) => CutoffKind::SmoothBump,
            ("plateau-bump", Some(flat)) => {
                if !(0.0 < flat[0] && flat[0] <= flat[1] && flat[1] < 1.0) {
                    return Err(FupError::OutOfRange {
                        what: "plateau",
                        detail: format!("{flat:?} must satisfy 0 < lo ≤ hi < 1"),
                    });
                }
                CutoffKind::PlateauBump { flat }
            }
            ("plateau-bump", None) => {
                return Err(FupError::OutOfRange { what: "plateau", detail: "missing \"flat\"".into() })
            }
            ("indicator", None) => CutoffKind::Indicator,
            ("zero", None) => CutoffKind::Zero,
            (k, _) => {
                return Err(FupError::OutOfRange { what: "cutoff", detail: format!("unknown or malformed kind {k:?}") })
            }
        };
        Ok(Self { kind, sampling: r.sampling })
    }
}

impl From<CutoffProfile> for CutoffRepr {
    fn from(c: CutoffProfile) -> Self {
        let (kind, flat) = match c.kind {
            CutoffKind::SmoothBump => ("smooth-bump", None),
            CutoffKind::PlateauBump { flat } => ("plateau-bump", Some(flat)),
            CutoffKind::Indicator => ("indicator", None),
            CutoffKind::Zero => ("zero", None),
        };
        CutoffRepr { kind: kind.into(), flat, sampling: c.sampling }
    }
}

/// `exp(1 − 1/(1 − (2x−1)²))` on `(0, 1)`, zero elsewhere.
pub fn smooth_bump(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let u = 2.0 * x - 1.0;
    (1.0 - 1.0 / (1.0 - u * u)).exp()
}

/// Smooth step from 0 (at `t ≤ 0`) to 1 (at `t ≥ 1`).
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

impl CutoffProfile {
    pub fn new(kind: CutoffKind) -> Self {
        Self { kind, sampling: Sampling::Grid }
    }

    pub fn smooth_bump() -> Self {
        Self::new(CutoffKind::SmoothBump)
    }

    pub fn with_sampling(mut self, sampling: Sampling) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn value(&self, x: f64) -> f64 {
        match self.kind {
            CutoffKind::SmoothBump => smooth_bump(x),
            CutoffKind::PlateauBump { flat: [lo, hi] } => {
                if x <= 0.0 || x >= 1.0 {
                    0.0
                } else if x < lo {
                    smooth_step(x / lo)
                } else if x > hi {
                    smooth_step((1.0 - x) / (1.0 - hi))
                } else {
                    1.0
                }
            }
            CutoffKind::Indicator => 1.0,
            CutoffKind::Zero => 0.0,
        }
    }

    /// `χ_n` on `ℤ_n`.
    pub fn samples(&self, n: usize) -> Vec<f64> {
        let shift = match self.sampling {
            Sampling::Grid => 0.0,
            Sampling::Midpoint => 0.5,
        };
        (0..n).map(|j| self.value((j as f64 + shift) / n as f64)).collect()
    }

    /// Whether the profile is smooth and compactly supported in `(0, 1)`.
    pub fn is_smooth(&self) -> bool {
        !matches!(self.kind, CutoffKind::Indicator)
    }
}

/// A one- or two-dimensional alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BakerAlphabet {
    One(Alphabet1D),
    Two(Alphabet2D),
}

impl BakerAlphabet {
    pub fn m(&self) -> usize {
        match self {
            BakerAlphabet::One(a) => a.m(),
            BakerAlphabet::Two(a) => a.m(),
        }
    }

    pub fn dim(&self) -> Dim {
        match self {
            BakerAlphabet::One(_) => Dim::One,
            BakerAlphabet::Two(_) => Dim::Two,
        }
    }

    /// Letters as coordinate pairs (`(a, 0)` in one dimension).
    pub fn letters(&self) -> Vec<(usize, usize)> {
        match self {
            BakerAlphabet::One(a) => a.digits().iter().map(|&d| (d, 0)).collect(),
            BakerAlphabet::Two(a) => a.cells().to_vec(),
        }
    }
}

/// The dense operator `B_N` on `ℓ²(ℤ_N^d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BakerOperator {
    pub alphabet: BakerAlphabet,
    pub k: u32,
    pub n: usize,
    pub cutoff: CutoffProfile,
    pub matrix: CMatrix,
}

fn side_len(n: usize, dim: Dim) -> usize {
    match dim {
        Dim::One => n,
        Dim::Two => n * n,
    }
}

/// The block `χ_n ℱ_n χ_n` on `ℓ²(ℤ_n^d)`.
fn cutoff_block(n: usize, dim: Dim, cutoff: &CutoffProfile) -> CMatrix {
    let chi = cutoff.samples(n);
    let roots = root_table(n);
    match dim {
        Dim::One => {
            let s = 1.0 / (n as f64).sqrt();
            CMatrix::from_fn(n, n, |j, m| roots[(j * m) % n].conj() * (s * chi[j] * chi[m]))
        }
        Dim::Two => {
            let s = 1.0 / n as f64;
            CMatrix::from_fn(n * n, n * n, |j, m| {
                let (j1, j2, m1, m2) = (j / n, j % n, m / n, m % n);
                roots[(j1 * m1 + j2 * m2) % n].conj() * (s * chi[j1] * chi[j2] * chi[m1] * chi[m2])
            })
        }
    }
}

/// Columns of `B_N^a` for the letter `a`, as (global column, column vector).
fn letter_columns(
    n: usize,
    n_small: usize,
    dim: Dim,
    letter: (usize, usize),
    block: &CMatrix,
) -> Vec<(usize, Vec<Complex64>)> {
    let side_small = side_len(n_small, dim);
    let global = |j: usize| match dim {
        Dim::One => j + letter.0 * n_small,
        Dim::Two => {
            let (j1, j2) = (j / n_small, j % n_small);
            (j1 + letter.0 * n_small) * n + (j2 + letter.1 * n_small)
        }
    };
    let cols = par::map_range(side_small, |m| {
        if (0..side_small).all(|j| block[(j, m)] == Complex64::new(0.0, 0.0)) {
            return (global(m), None);
        }
        let mut v = GridFunction::zeros(n, dim);
        for j in 0..side_small {
            v.values_mut()[global(j)] = block[(j, m)];
        }
        (global(m), Some(idft(&v).values().to_vec()))
    });
    cols.into_iter().filter_map(|(c, v)| v.map(|v| (c, v))).collect()
}

fn check_size(alphabet: &BakerAlphabet, k: u32, caps: &ResourceCaps) -> Result<(usize, usize)> {
    if k == 0 {
        return Err(FupError::OutOfRange { what: "k", detail: "must be at least 1".into() });
    }
    let m = alphabet.m();
    let n = m.checked_pow(k).ok_or(FupError::ResourceCap {
        what: "dense matrix side",
        requested: usize::MAX,
        cap: caps.dense_side,
    })?;
    let side = n.checked_pow(alphabet.dim().as_u8() as u32).unwrap_or(usize::MAX);
    caps.check_dense(side)?;
    Ok((n, side))
}

/// `B_N^a = ℱ_N^* Π_a^* χ ℱ_{N/M} χ Π_a` for one letter.
pub fn baker_letter_matrix(
    alphabet: &BakerAlphabet,
    letter: (usize, usize),
    k: u32,
    cutoff: &CutoffProfile,
    caps: &ResourceCaps,
) -> Result<CMatrix> {
    let (n, side) = check_size(alphabet, k, caps)?;
    let dim = alphabet.dim();
    let n_small = n / alphabet.m();
    let block = cutoff_block(n_small, dim, cutoff);
    let mut mat = CMatrix::zeros(side, side);
    for (c, v) in letter_columns(n, n_small, dim, letter, &block) {
        mat.column_mut(c).copy_from_slice(&v);
    }
    Ok(mat)
}

/// `B_N = Σ_a B_N^a` with `N = M^k`.
pub fn build_baker(
    alphabet: &BakerAlphabet,
    k: u32,
    cutoff: &CutoffProfile,
    caps: &ResourceCaps,
) -> Result<BakerOperator> {
    let (n, side) = check_size(alphabet, k, caps)?;
    let dim = alphabet.dim();
    let n_small = n / alphabet.m();
    let block = cutoff_block(n_small, dim, cutoff);
    let mut mat = CMatrix::zeros(side, side);
    // Letters occupy disjoint column blocks.
    for letter in alphabet.letters() {
        for (c, v) in letter_columns(n, n_small, dim, letter, &block) {
            mat.column_mut(c).copy_from_slice(&v);
        }
    }
    Ok(BakerOperator { alphabet: alphabet.clone(), k, n, cutoff: *cutoff, matrix: mat })
}

impl BakerOperator {
    pub fn dim(&self) -> Dim {
        self.alphabet.dim()
    }

    pub fn operator_norm(&self) -> f64 {
        linalg::spectral_norm(&self.matrix)
    }

    /// Eigenvalues by decreasing magnitude.
    pub fn spectrum(&self) -> Vec<Complex64> {
        linalg::eigenvalues(&self.matrix)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.spectrum().first().map(|l| l.norm()).unwrap_or(0.0)
    }
}

/// All eigenvalues of `B_N`, largest magnitude first.
pub fn spectrum(b: &BakerOperator) -> Vec<Complex64> {
    b.spectrum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    pub k: u32,
    #[serde(rename = "N")]
    pub n: usize,
    pub radius: f64,
    pub norm: f64,
    /// `M^{-β_ref}`.
    pub reference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapTable {
    pub beta_ref: f64,
    /// Scale at which `β_ref` was measured.
    pub k_ref: u32,
    pub rows: Vec<GapRow>,
    pub warning: Option<String>,
}

/// Largest `k` with the FUP norm computable densely within the caps.
fn reference_scale(m: usize, letters: usize, dim: Dim, caps: &ResourceCaps) -> u32 {
    let mut k = 1;
    loop {
        let next = k + 1;
        let grid = m.checked_pow(next * dim.as_u8() as u32).unwrap_or(usize::MAX);
        let sub = letters.checked_pow(next).unwrap_or(usize::MAX);
        if grid > caps.grid_points || sub > 1024 || next > 8 {
            return k;
        }
        k = next;
    }
}

/// Spectral radii of `B_N` across `k_range` against the FUP reference
/// `M^{-β}` measured on the alphabet itself.
pub fn spectral_gap_experiment(
    alphabet: &BakerAlphabet,
    k_range: std::ops::RangeInclusive<u32>,
    cutoff: &CutoffProfile,
    caps: &ResourceCaps,
) -> Result<GapTable> {
    let m = alphabet.m();
    let (beta_ref, k_ref, warning) = match alphabet {
        BakerAlphabet::One(a) => {
            let k_ref = reference_scale(m, a.len(), Dim::One, caps);
            let s = beta_series_1d(a, a, k_ref, caps)?;
            (s.entries.last().expect("k_ref ≥ 1").beta_k, k_ref, None)
        }
        BakerAlphabet::Two(a) => {
            let k_ref = reference_scale(m, a.len(), Dim::Two, caps);
            let s = beta_series(a, a, k_ref, caps)?;
            let warning = match orthogonal_pair_condition(a, a)? {
                crate::lines::PairVerdict::Obstructed { v, .. } => Some(format!(
                    "the limit set contains orthogonal lines (direction {v}); no uncertainty-driven gap is expected"
                )),
                crate::lines::PairVerdict::FupHolds => None,
            };
            (s.entries.last().expect("k_ref ≥ 1").beta_k, k_ref, warning)
        }
    };
    let reference = (m as f64).powf(-beta_ref);
    let mut rows = Vec::new();
    for k in k_range {
        let b = build_baker(alphabet, k, cutoff, caps)?;
        rows.push(GapRow { k, n: b.n, radius: b.spectral_radius(), norm: b.operator_norm(), reference });
    }
    Ok(GapTable { beta_ref, k_ref, rows, warning })
}

/// A product of smooth bumps on intervals `[lo, hi] ⊂ [0, 1]`, one per
/// coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpRegion {
    pub intervals: Vec<[f64; 2]>,
}

impl BumpRegion {
    pub fn new(intervals: Vec<[f64; 2]>) -> Result<Self> {
        for iv in &intervals {
            if !(0.0 <= iv[0] && iv[0] < iv[1] && iv[1] <= 1.0) {
                return Err(FupError::OutOfRange {
                    what: "bump interval",
                    detail: format!("{iv:?} must satisfy 0 ≤ lo < hi ≤ 1"),
                });
            }
        }
        Ok(Self { intervals })
    }

    pub fn value(&self, point: &[f64]) -> f64 {
        self.intervals.iter().zip(point).map(|(&[lo, hi], &x)| smooth_bump((x - lo) / (hi - lo))).product()
    }

    /// `φ(j/N)` on the grid, row-major.
    pub fn samples(&self, n: usize, dim: Dim) -> Vec<f64> {
        match dim {
            Dim::One => (0..n).map(|j| self.value(&[j as f64 / n as f64])).collect(),
            Dim::Two => {
                (0..n * n).map(|i| self.value(&[(i / n) as f64 / n as f64, (i % n) as f64 / n as f64])).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropagationReport {
    pub norm: f64,
    /// `d(Φ(supp ψ ∩ Φ⁻¹(supp χ)), supp φ)`; `None` when the set is empty.
    pub separation: Option<f64>,
    pub hypothesis_met: bool,
}

fn circle_gap(a: [f64; 2], b: [f64; 2]) -> f64 {
    [-1.0, 0.0, 1.0].iter().map(|t| (a[0].max(b[0] + t) - a[1].min(b[1] + t)).max(0.0)).fold(f64::INFINITY, f64::min)
}

/// Separation of `Φ(supp ψ ∩ Φ⁻¹(supp χ))` from `supp φ` in the ℓ∞ torus
/// metric, with `Φ = M·x − a` on the cell of letter `a`.
pub fn propagation_separation(
    phi: &BumpRegion,
    psi: &BumpRegion,
    alphabet: &BakerAlphabet,
    cutoff: &CutoffProfile,
) -> Option<f64> {
    if matches!(cutoff.kind, CutoffKind::Zero) {
        return None;
    }
    let m = alphabet.m() as f64;
    let dims = phi.intervals.len();
    let mut best: Option<f64> = None;
    for letter in alphabet.letters() {
        let coords = [letter.0, letter.1];
        let mut image = Vec::with_capacity(dims);
        for (d, iv) in psi.intervals.iter().enumerate() {
            let a = coords[d] as f64;
            let lo = iv[0].max(a / m);
            let hi = iv[1].min((a + 1.0) / m);
            if lo > hi {
                image.clear();
                break;
            }
            image.push([m * lo - a, m * hi - a]);
        }
        if image.len() != dims {
            continue;
        }
        let dist = image.iter().zip(&phi.intervals).map(|(&i, &p)| circle_gap(i, p)).fold(0.0, f64::max);
        best = Some(best.map_or(dist, |b: f64| b.min(dist)));
    }
    best
}

/// `‖φ_N B_N ψ_N‖` with the separation hypothesis evaluated.
pub fn propagation_check(phi: &BumpRegion, psi: &BumpRegion, b: &BakerOperator) -> Result<PropagationReport> {
    let dim = b.dim();
    let d = dim.as_u8() as usize;
    if phi.intervals.len() != d || psi.intervals.len() != d {
        return Err(FupError::DimensionMismatch(format!("regions need {d} interval(s)")));
    }
    let fp = phi.samples(b.n, dim);
    let fs = psi.samples(b.n, dim);
    let side = fp.len();
    let prod = CMatrix::from_fn(side, side, |i, j| b.matrix[(i, j)] * (fp[i] * fs[j]));
    let separation = propagation_separation(phi, psi, &b.alphabet, &b.cutoff);
    Ok(PropagationReport {
        norm: linalg::spectral_norm(&prod),
        separation,
        hypothesis_met: separation.is_none_or(|s| s > 0.0),
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
