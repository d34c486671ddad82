//! Bivariate trigonometric polynomials evaluated on grid roots of unity.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cantor::{upper_right_neighborhood, GridSet, Point};
use crate::cyclotomic::{ExactGridEval, IntTerm};
use crate::dft::{dft, root_table, unit_root, Dim, GridFunction};
use crate::error::{FupError, Result};
use crate::linalg::{self, CMatrix};
use crate::lines::{self, canonicalize_line, gcd, Line};
use crate::par;

/// Vanishing threshold relative to the coefficient 1-norm.
pub const ZERO_TOL: f64 = 1e-9;

/// Values below this (relative) are re-checked exactly when the
/// coefficients allow it.
const EXACT_WINDOW: f64 = 1e-6;

const PRUNE_TOL: f64 = 1e-13;
const RATIONAL_TOL: f64 = 1e-12;
const MAX_DENOMINATOR: i64 = 10_000;

/// `Σ a_{kl} z^k w^l` with nonnegative exponents.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BivarPoly {
    coeffs: BTreeMap<(u32, u32), Complex64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRepr {
    k: u32,
    l: u32,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyRepr {
    terms: Vec<TermRepr>,
}

impl Serialize for BivarPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr { terms: self.coeffs.iter().map(|(&(k, l), c)| TermRepr { k, l, re: c.re, im: c.im }).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BivarPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PolyRepr::deserialize(d)?;
        Ok(BivarPoly::new(r.terms.into_iter().map(|t| ((t.k, t.l), Complex64::new(t.re, t.im)))))
    }
}

/// The lattice generated by exponent differences, in echelon form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Lattice {
    /// First generator `(p, q)`; absent when every difference has `k = 0`.
    pub first: Option<(i64, i64)>,
    /// The lattice meets the `l`-axis in `rℤ`.
    pub r: i64,
}

impl Lattice {
    fn from_vectors(vs: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut first: Option<(i64, i64)> = None;
        let mut r = 0i64;
        for d in vs {
            match first {
                None if d.0 != 0 => first = Some(d),
                None => r = gcd(r, d.1),
                Some(_) if d.0 == 0 => r = gcd(r, d.1),
                Some(b) => {
                    let (g, s, t) = lines::ext_gcd(b.0, d.0);
                    let combined = (g, s * b.1 + t * d.1);
                    let eliminated = (d.0 / g) * b.1 - (b.0 / g) * d.1;
                    r = gcd(r, eliminated);
                    first = Some(combined);
                }
            }
        }
        let first = first.map(|(p, q)| {
            let (p, q) = if p < 0 { (-p, -q) } else { (p, q) };
            (p, if r != 0 { q.rem_euclid(r) } else { q })
        });
        Self { first, r }
    }

    pub fn rank(&self) -> usize {
        self.first.is_some() as usize + (self.r != 0) as usize
    }

    /// Whether the lattice is all of `ℤ²`.
    pub fn is_full(&self) -> bool {
        matches!(self.first, Some((1, _))) && self.r == 1
    }

    /// A generator when the rank is one.
    pub fn generator(&self) -> Option<(i64, i64)> {
        match (self.first, self.r) {
            (Some(v), 0) => Some(v),
            (None, r) if r != 0 => Some((0, r)),
            _ => None,
        }
    }
}

impl BivarPoly {
    /// Sums duplicate exponents and drops exact zeros.
    pub fn new(terms: impl IntoIterator<Item = ((u32, u32), Complex64)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (e, c) in terms {
            *coeffs.entry(e).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c: &mut Complex64| *c != Complex64::new(0.0, 0.0));
        Self { coeffs }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new([((0, 0), c)])
    }

    pub fn monomial(k: u32, l: u32, c: Complex64) -> Self {
        Self::new([((k, l), c)])
    }

    /// From a dense coefficient vector over `[0, d]²` in `k`-major order,
    /// dropping entries negligible against the largest one.
    pub fn from_dense(d: u32, coeffs: &[Complex64]) -> Self {
        let side = d as usize + 1;
        assert_eq!(coeffs.len(), side * side);
        let top = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        Self::new(
            coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| c.norm() > PRUNE_TOL * top)
                .map(|(i, &c)| (((i / side) as u32, (i % side) as u32), c)),
        )
    }

    pub fn coeffs(&self) -> &BTreeMap<(u32, u32), Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, k: u32, l: u32) -> Complex64 {
        self.coeffs.get(&(k, l)).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// `max max(k, l)` over nonzero terms.
    pub fn degree(&self) -> u32 {
        self.coeffs.keys().map(|&(k, l)| k.max(l)).max().unwrap_or(0)
    }

    /// `max (k + l)` over nonzero terms.
    pub fn total_degree(&self) -> u32 {
        self.coeffs.keys().map(|&(k, l)| k + l).max().unwrap_or(0)
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn support_lattice(&self) -> Lattice {
        let mut it = self.coeffs.keys();
        let Some(&(k0, l0)) = it.next() else {
            return Lattice { first: None, r: 0 };
        };
        Lattice::from_vectors(it.map(|&(k, l)| (k as i64 - k0 as i64, l as i64 - l0 as i64)))
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        self.coeffs.iter().map(|(&(k, l), c)| c * z.powu(k) * w.powu(l)).sum()
    }

    /// `F(e^{2πix/N}, e^{2πiy/N})` using a table of `N`-th roots.
    pub fn eval_grid(&self, roots: &[Complex64], x: usize, y: usize) -> Complex64 {
        let n = roots.len();
        self.coeffs.iter().map(|(&(k, l), c)| c * roots[((k as usize % n) * x + (l as usize % n) * y) % n]).sum()
    }

    /// `F` with each term `c z^k w^l` replaced by `f(k, l, c)`.
    pub fn map_terms(&self, f: impl Fn(u32, u32, Complex64) -> ((u32, u32), Complex64)) -> Self {
        Self::new(self.coeffs.iter().map(|(&(k, l), &c)| f(k, l, c)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map_terms(|k, l, c| ((k, l), c * s))
    }

    pub fn mul(&self, other: &BivarPoly) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .flat_map(|(&(k, l), &c)| other.coeffs.iter().map(move |(&(p, q), &d)| ((k + p, l + q), c * d))),
        )
    }

    /// Integer coefficients after clearing small denominators, if the
    /// coefficients are Gaussian rationals.
    pub fn integer_terms(&self) -> Option<Vec<IntTerm>> {
        let mut parts = Vec::with_capacity(2 * self.coeffs.len());
        for c in self.coeffs.values() {
            parts.push(rational_approx(c.re)?);
            parts.push(rational_approx(c.im)?);
        }
        let lcm = parts.iter().try_fold(1i64, |acc, &(_, d)| {
            let g = gcd(acc, d);
            (acc / g).checked_mul(d)
        })?;
        let mut out = Vec::with_capacity(self.coeffs.len());
        for (i, &e) in self.coeffs.keys().enumerate() {
            let (rn, rd) = parts[2 * i];
            let (inum, id) = parts[2 * i + 1];
            out.push((e, (rn.checked_mul(lcm / rd)?, inum.checked_mul(lcm / id)?)));
        }
        Some(out)
    }
}

/// Continued-fraction approximation `p/q` of `x` with `q ≤ MAX_DENOMINATOR`,
/// accepted when within `RATIONAL_TOL` (relative to `max(1, |x|)`).
pub fn rational_approx(x: f64) -> Option<(i64, i64)> {
    if !x.is_finite() || x.abs() > 1e12 {
        return None;
    }
    let tol = RATIONAL_TOL * x.abs().max(1.0);
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as i64;
        let (h2, k2) = (ai.checked_mul(h1)?.checked_add(h0)?, ai.checked_mul(k1)?.checked_add(k0)?);
        if k2 > MAX_DENOMINATOR {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some((h1, k1));
        }
        let frac = r - a;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

/// The polynomial `P_ℓ` cutting out `ℓ`: `z^a w^b − ζ` or `z^a − ζ w^{|b|}`
/// with `ζ = e^{2πic/N}`.
pub fn line_polynomial(l: &Line) -> BivarPoly {
    let n = l.n();
    let (mut a, mut b, mut c) = (l.a(), l.b(), l.c() as i64);
    if a < 0 {
        (a, b, c) = (-a, -b, -c);
    }
    let zeta = unit_root(n, c);
    let one = Complex64::new(1.0, 0.0);
    if b >= 0 {
        BivarPoly::new([((a as u32, b as u32), one), ((0, 0), -zeta)])
    } else {
        BivarPoly::new([((a as u32, 0), one), ((0, (-b) as u32), -zeta)])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroSetReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub zeros: GridSet,
    pub count: usize,
}

/// Classifies grid values as zero, consulting exact arithmetic near zero
/// when the coefficients are Gaussian rationals.
struct ZeroTest {
    roots: Vec<Complex64>,
    l1: f64,
    exact: Option<(Vec<IntTerm>, ExactGridEval)>,
}

impl ZeroTest {
    fn new(f: &BivarPoly, n: usize) -> Self {
        Self { roots: root_table(n), l1: f.l1_norm(), exact: f.integer_terms().map(|t| (t, ExactGridEval::new(n))) }
    }

    fn vanishes(&self, f: &BivarPoly, p: Point) -> bool {
        let mag = f.eval_grid(&self.roots, p.0, p.1).norm();
        if let Some((terms, ev)) = &self.exact {
            if mag <= EXACT_WINDOW * self.l1 {
                if let Some(z) = ev.vanishes(terms, p.0, p.1) {
                    return z;
                }
            }
        }
        mag <= ZERO_TOL * self.l1
    }
}

/// `Z_N(F)`.
pub fn eval_zero_set(f: &BivarPoly, n: usize) -> Result<ZeroSetReport> {
    if n == 0 {
        return Err(FupError::OutOfRange { what: "modulus", detail: "N must be positive".into() });
    }
    let test = ZeroTest::new(f, n);
    let rows = par::map_range(n, |x| {
        (0..n).filter(|&y| f.is_zero() || test.vanishes(f, (x, y))).map(|y| (x, y)).collect::<Vec<_>>()
    });
    let zeros = GridSet::new(n, rows.into_iter().flatten())?;
    Ok(ZeroSetReport { n, count: zeros.len(), zeros })
}

/// Which points of `s` are zeros of `f`.
pub fn zeros_among(f: &BivarPoly, s: &GridSet) -> GridSet {
    let test = ZeroTest::new(f, s.n());
    let keep = par::map_slice(s.points(), |&p| f.is_zero() || test.vanishes(f, p));
    GridSet::new(s.n(), s.iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| p)).expect("subset of a valid set")
}

/// Rows `points`, columns monomials `z^k w^l`, `0 ≤ k, l ≤ d`, `k`-major.
pub fn monomial_matrix(points: &[Point], d: u32, n: usize) -> CMatrix {
    let roots = root_table(n);
    let side = d as usize + 1;
    CMatrix::from_fn(points.len(), side * side, |r, c| {
        let (x, y) = points[r];
        let (k, l) = (c / side, c % side);
        roots[(k * x + l * y) % n]
    })
}

/// Fixes the phase so the largest coefficient is real and positive.
fn normalize_phase(v: &mut [Complex64]) {
    let (mut best, mut idx) = (0.0, 0);
    for (i, c) in v.iter().enumerate() {
        if c.norm() > best * (1.0 + 1e-12) {
            best = c.norm();
            idx = i;
        }
    }
    if best > 0.0 {
        let phase = v[idx].conj() / best;
        v.iter_mut().for_each(|c| *c *= phase);
    }
}

/// The kernel vector whose last nonzero coordinate comes first in monomial
/// order, so that e.g. a column yields `z - ζ` rather than a multiple of it.
fn earliest_kernel_vector(ker: &CMatrix) -> Vec<Complex64> {
    let side = ker.nrows();
    for j in 0..side {
        let tail = ker.rows(j + 1, side - j - 1).into_owned();
        let combo = linalg::null_space(&tail, Some(1.0));
        if combo.ncols() > 0 {
            return (ker * combo.column(0)).iter().copied().collect();
        }
    }
    unreachable!("the empty tail constrains nothing")
}

/// A unit-norm polynomial of least degree `D` (exponents in `[0, D]²`)
/// vanishing on `s`.
pub fn min_vanishing_poly(s: &GridSet) -> Result<BivarPoly> {
    if s.is_empty() {
        return Err(FupError::OutOfRange { what: "point set", detail: "must be nonempty".into() });
    }
    for d in 1u32.. {
        let e = monomial_matrix(s.points(), d, s.n());
        let ker = linalg::null_space(&e, None);
        if ker.ncols() > 0 {
            let mut v = earliest_kernel_vector(&ker);
            let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            v.iter_mut().for_each(|c| *c /= norm);
            normalize_phase(&mut v);
            return Ok(BivarPoly::from_dense(d, &v));
        }
    }
    unreachable!("the kernel is nontrivial once (D+1)² exceeds |S|")
}

/// Result of trying to read a line off a polynomial.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LineCut {
    Line {
        line: Line,
    },
    NotALine,
    /// `F` has the shape `u − ζ` but `ζ` is not an `N`-th root of unity.
    NoGridLine {
        note: String,
    },
}

impl LineCut {
    pub fn line(&self) -> Option<&Line> {
        match self {
            LineCut::Line { line } => Some(line),
            _ => None,
        }
    }
}

/// Recognises `F = c(z^a w^b − ζ)` or `c(z^a − ζ w^b)` with `(a, b)`
/// primitive.
pub fn cuts_out_line(f: &BivarPoly, n: usize) -> Result<LineCut> {
    if f.is_zero() {
        return Err(FupError::OutOfRange { what: "polynomial", detail: "must be nonzero".into() });
    }
    if f.num_terms() != 2 {
        return Ok(LineCut::NotALine);
    }
    let mut it = f.coeffs().iter();
    let (&(k0, l0), &c0) = it.next().expect("two terms");
    let (&(k1, l1), &c1) = it.next().expect("two terms");
    let (a, b) = (k1 as i64 - k0 as i64, l1 as i64 - l0 as i64);
    if gcd(a, b) != 1 {
        return Ok(LineCut::NotALine);
    }
    // F = c1 z^{k0} w^{l0} (z^a w^b − ζ) after factoring out the monomial.
    let zeta = -c0 / c1;
    let tol = 1e-9;
    if (zeta.norm() - 1.0).abs() > tol {
        return Ok(LineCut::NoGridLine { note: format!("|ζ| = {} is not 1", zeta.norm()) });
    }
    let turns = zeta.arg() / std::f64::consts::TAU * n as f64;
    let c = turns.round();
    if (turns - c).abs() > tol * n as f64 {
        return Ok(LineCut::NoGridLine {
            note: format!("ζ = e^(2πi·{:.6}) is not a {n}-th root of unity; no grid line for this N", turns / n as f64),
        });
    }
    // Monomial factors vanish nowhere on the grid.
    Ok(LineCut::Line { line: canonicalize_line(a, b, c as i64, n)? })
}

/// `F*` and `ℓ` with `S ∖ Z_N(F*)` nonempty and inside `ℓ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Separation {
    pub poly: BivarPoly,
    pub line: Line,
    /// `R = ⌊200 |S|^{1/2}⌋`.
    pub radius: usize,
}

pub fn lemma_radius(support: usize) -> usize {
    (200.0 * (support as f64).sqrt()).floor() as usize
}

/// Candidate lines meeting `s`, ordered by size then by how much of `s`
/// they contain.
fn candidate_lines(s: &GridSet, r: usize) -> Vec<(Line, GridSet, GridSet)> {
    let n = s.n();
    let mut lines: Vec<Line> = lines::direction_classes(n)
        .into_iter()
        .flat_map(|(a, b)| {
            s.iter()
                .map(move |(x, y)| canonicalize_line(a, b, a * x as i64 + b * y as i64, n).expect("irreducible class"))
        })
        .filter(|l| l.size() as usize <= r)
        .collect();
    lines.sort();
    lines.dedup();
    let mut out: Vec<(Line, GridSet, GridSet)> = lines
        .into_iter()
        .map(|l| {
            let on = GridSet::new(n, s.iter().filter(|&p| l.contains(p))).expect("subset");
            let off = s.difference(&on);
            (l, on, off)
        })
        .collect();
    out.sort_by_key(|(l, on, _)| (l.size(), std::cmp::Reverse(on.len()), *l));
    out
}

fn separator_for(d: u32, n: usize, rank_s: usize, line: &Line, on: &GridSet, off: &GridSet) -> Option<BivarPoly> {
    let side = (d as usize + 1).pow(2);
    let e_off = monomial_matrix(off.points(), d, n);
    if linalg::numerical_rank(&e_off) >= rank_s {
        return None;
    }
    let basis = if off.is_empty() { CMatrix::identity(side, side) } else { linalg::null_space(&e_off, None) };
    if basis.ncols() == 0 {
        return None;
    }
    let e_on = monomial_matrix(on.points(), d, n);
    let w = &e_on * &basis;
    let svd = w.svd(false, true);
    let v_t = svd.v_t?;
    let top =
        (0..svd.singular_values.len()).max_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]))?;
    let dir = CMatrix::from_fn(basis.ncols(), 1, |r, _| v_t[(top, r)].conj());
    let mut coeffs: Vec<Complex64> = (&basis * dir).iter().copied().collect();
    let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    coeffs.iter_mut().for_each(|c| *c /= norm);
    normalize_phase(&mut coeffs);
    let poly = BivarPoly::from_dense(d, &coeffs);
    let survivors = on.difference(&zeros_among(&poly, on));
    let off_ok = zeros_among(&poly, off).len() == off.len();
    (off_ok && !survivors.is_empty() && survivors.iter().all(|p| line.contains(p))).then_some(poly)
}

/// Finds a separating polynomial of least degree, trying candidate lines in
/// order at each degree.
pub fn separating_poly(s: &GridSet) -> Result<Separation> {
    if s.is_empty() {
        return Err(FupError::OutOfRange { what: "point set", detail: "must be nonempty".into() });
    }
    let n = s.n();
    let r = lemma_radius(s.len());
    let d_max = (n - 1).min(r.saturating_sub(2)) as u32;
    let candidates = candidate_lines(s, r);
    for d in 0..=d_max {
        let rank_s = linalg::numerical_rank(&monomial_matrix(s.points(), d, n));
        let hit = par::find_first(candidates.len(), |i| {
            let (line, on, off) = &candidates[i];
            separator_for(d, n, rank_s, line, on, off)
        });
        if let Some((i, poly)) = hit {
            return Ok(Separation { poly, line: candidates[i].0, radius: r });
        }
    }
    Err(FupError::TheoremViolation(format!(
        "no separating polynomial of degree ≤ {d_max} found for a set of {} points in Z_{n}^2",
        s.len()
    )))
}

/// `h = (1/N) F(e^{2πix/N}, e^{2πiy/N})`, whose transform is the
/// coefficient array of `F`.
pub fn multiplier_from_poly(f: &BivarPoly, n: usize) -> Result<GridFunction> {
    if let Some(&(k, l)) = f.coeffs().keys().find(|&&(k, l)| k as usize >= n || l as usize >= n) {
        return Err(FupError::OutOfRange { what: "exponent", detail: format!("({k}, {l}) not in [0, {n})^2") });
    }
    let roots = root_table(n);
    let scale = 1.0 / n as f64;
    let vals = par::map_range(n * n, |i| f.eval_grid(&roots, i / n, i % n) * scale);
    GridFunction::new(n, Dim::Two, vals)
}

/// Outcome of localising a function to a line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Localization {
    pub line: Line,
    pub g: GridFunction,
    pub multiplier: BivarPoly,
    pub radius: usize,
}

/// Multiplies `f` by a separating multiplier so the result lives on one
/// line while its transform stays near that of `f`. The three support
/// conditions are checked before returning.
pub fn localize_to_line(f: &GridFunction) -> Result<Localization> {
    if f.dim() != Dim::Two {
        return Err(FupError::DimensionMismatch("localisation needs a 2D function".into()));
    }
    if f.is_zero() {
        return Err(FupError::OutOfRange { what: "function", detail: "must be nonzero".into() });
    }
    let n = f.n();
    let supp = f.support();
    let sep = separating_poly(&supp)?;
    let h = multiplier_from_poly(&sep.poly, n)?;
    let g = h.mul(f)?;
    let violation = |what: String| FupError::TheoremViolation(format!("localisation: {what}"));
    if g.is_zero() {
        return Err(violation("g vanishes".into()));
    }
    // Support of g, measured against f so that rounding residue on cancelled
    // points does not count.
    let tol = crate::dft::SUPPORT_TOL * g.sup_norm();
    for (i, v) in g.values().iter().enumerate() {
        let p = (i / n, i % n);
        if v.norm() > tol && !(supp.contains(p) && sep.line.contains(p)) {
            return Err(violation(format!("g is supported at {p:?} outside supp f ∩ ℓ")));
        }
    }
    let nb = upper_right_neighborhood(&dft(f).support(), sep.radius.min(n))?;
    if let Some(p) = dft(&g).support().iter().find(|&p| !nb.contains(p)) {
        return Err(violation(format!("ĝ is supported at {p:?} outside N_R(supp f̂)")));
    }
    if sep.line.size() as usize > sep.radius {
        return Err(violation(format!("line size {} exceeds R = {}", sep.line.size(), sep.radius)));
    }
    Ok(Localization { line: sep.line, g, multiplier: sep.poly, radius: sep.radius })
}

/// `h = N^{-1/2} ∏_{x ∈ S, x ≠ keep} (z − e^{2πix/N})` on `ℤ_N`.
pub fn one_dim_annihilator(n: usize, s: &[usize], keep: usize) -> Result<GridFunction> {
    if !s.contains(&keep) {
        return Err(FupError::OutOfRange { what: "kept point", detail: format!("{keep} is not in S") });
    }
    let mut roots_used: Vec<usize> = s.iter().map(|&x| x % n).filter(|&x| x != keep % n).collect();
    roots_used.sort_unstable();
    roots_used.dedup();
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for &x in &roots_used {
        let r = unit_root(n, x as i64);
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (j, &c) in coeffs.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= c * r;
        }
        coeffs = next;
    }
    let roots = root_table(n);
    let scale = 1.0 / (n as f64).sqrt();
    Ok(GridFunction::from_fn_1d(n, |x| {
        coeffs.iter().enumerate().map(|(j, c)| c * roots[(j * x) % n]).sum::<Complex64>() * scale
    }))
}

/// The sign and squaring transforms covering the cyclotomic zeros of a
/// rational polynomial whose exponent lattice is `ℤ²`.
pub fn seven_polynomials(f: &BivarPoly) -> Result<[BivarPoly; 7]> {
    if f.is_zero() {
        return Err(FupError::OutOfRange { what: "polynomial", detail: "must be nonzero".into() });
    }
    let lead = *f.coeffs().values().next().expect("nonzero");
    let g = f.scale(lead.inv());
    for c in g.coeffs().values() {
        if c.im.abs() > RATIONAL_TOL * c.norm().max(1.0) || rational_approx(c.re).is_none() {
            return Err(FupError::Unsupported(format!(
                "coefficient {c} is not rational (after normalisation); only rational coefficients are handled"
            )));
        }
    }
    let lattice = f.support_lattice();
    if !lattice.is_full() {
        return Err(FupError::UnsupportedLattice(format!(
            "exponent differences generate a rank-{} sublattice, not Z^2",
            lattice.rank()
        )));
    }
    let sign = |neg: bool, e: u32| if neg && e % 2 == 1 { -1.0 } else { 1.0 };
    let flip = |nz: bool, nw: bool| g.map_terms(move |k, l, c| ((k, l), c * sign(nz, k) * sign(nw, l)));
    let square = |nz: bool, nw: bool| g.map_terms(move |k, l, c| ((2 * k, 2 * l), c * sign(nz, k) * sign(nw, l)));
    Ok([
        flip(true, false),
        flip(false, true),
        flip(true, true),
        square(false, false),
        square(true, false),
        square(false, true),
        square(true, true),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BezoutVerdict {
    Conclusive,
    /// One zero set contains the other, suggesting a common component.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BezoutReport {
    #[serde(rename = "N")]
    pub n: usize,
    /// Grid intersections only; a lower bound for intersections in `ℂ²`.
    pub count: usize,
    /// Product of total degrees.
    pub bound: usize,
    pub ok: bool,
    pub verdict: BezoutVerdict,
}

pub fn bezout_intersection(f: &BivarPoly, g: &BivarPoly, n: usize) -> Result<BezoutReport> {
    if f.is_zero() || g.is_zero() {
        return Err(FupError::OutOfRange { what: "polynomial", detail: "must be nonzero".into() });
    }
    let zf = eval_zero_set(f, n)?.zeros;
    let zg = eval_zero_set(g, n)?.zeros;
    let count = zf.intersection(&zg).len();
    let bound = f.total_degree() as usize * g.total_degree() as usize;
    let nested = (!zf.is_empty() && zf.is_subset(&zg)) || (!zg.is_empty() && zg.is_subset(&zf));
    Ok(BezoutReport {
        n,
        count,
        bound,
        ok: count <= bound,
        verdict: if nested { BezoutVerdict::Inconclusive } else { BezoutVerdict::Conclusive },
    })
}
