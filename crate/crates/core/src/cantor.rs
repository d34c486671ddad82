//! Alphabets, Cantor iterates and grid neighbourhoods.

use serde::{Deserialize, Serialize};

use crate::error::{FupError, Result};

/// A point of the grid `ℤ_N × ℤ_N`.
pub type Point = (usize, usize);

/// Returns `k` with `m^k = n`, if any.
pub fn power_index(m: usize, n: usize) -> Option<u32> {
    if m < 2 || n == 0 {
        return None;
    }
    let (mut p, mut k) = (1usize, 0u32);
    while p < n {
        p = p.checked_mul(m)?;
        k += 1;
    }
    (p == n).then_some(k)
}

/// `m^k`, or a resource error if it overflows.
pub fn checked_pow(m: usize, k: u32) -> Result<usize> {
    m.checked_pow(k).ok_or(FupError::ResourceCap { what: "grid modulus", requested: usize::MAX, cap: usize::MAX })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlphabetRepr {
    #[serde(rename = "M")]
    m: usize,
    cells: Vec<[i64; 2]>,
}

/// A proper nonempty subset of `ℤ_M²`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AlphabetRepr", into = "AlphabetRepr")]
pub struct Alphabet2D {
    m: usize,
    cells: Vec<Point>,
    table: Vec<bool>,
}

impl TryFrom<AlphabetRepr> for Alphabet2D {
    type Error = FupError;
    fn try_from(r: AlphabetRepr) -> Result<Self> {
        Alphabet2D::new(r.m, r.cells.into_iter().map(|[a, b]| (a, b)))
    }
}

impl From<Alphabet2D> for AlphabetRepr {
    fn from(a: Alphabet2D) -> Self {
        AlphabetRepr { m: a.m, cells: a.cells.iter().map(|&(x, y)| [x as i64, y as i64]).collect() }
    }
}

impl Alphabet2D {
    /// Builds an alphabet, reducing coordinates mod `m` and deduplicating.
    pub fn new(m: usize, cells: impl IntoIterator<Item = (i64, i64)>) -> Result<Self> {
        if m < 2 {
            return Err(FupError::InvalidAlphabet(format!("base must be at least 2, got {m}")));
        }
        let mi = m as i64;
        let mut cells: Vec<Point> =
            cells.into_iter().map(|(a, b)| (a.rem_euclid(mi) as usize, b.rem_euclid(mi) as usize)).collect();
        cells.sort_unstable();
        cells.dedup();
        if cells.is_empty() {
            return Err(FupError::InvalidAlphabet("alphabet is empty".into()));
        }
        if cells.len() >= m * m {
            return Err(FupError::InvalidAlphabet(format!("alphabet must be a proper subset of Z_{m}^2")));
        }
        let mut table = vec![false; m * m];
        for &(a, b) in &cells {
            table[a * m + b] = true;
        }
        Ok(Self { m, cells, table })
    }

    /// `{(t, t)}`.
    pub fn diagonal(m: usize) -> Result<Self> {
        Self::new(m, (0..m as i64).map(|t| (t, t)))
    }

    /// `{(t, M-1-t)}`.
    pub fn antidiagonal(m: usize) -> Result<Self> {
        Self::new(m, (0..m as i64).map(|t| (t, m as i64 - 1 - t)))
    }

    /// The full column `{(x0, t)}`.
    pub fn column(m: usize, x0: usize) -> Result<Self> {
        Self::new(m, (0..m as i64).map(|t| (x0 as i64, t)))
    }

    /// The full row `{(t, y0)}`.
    pub fn row(m: usize, y0: usize) -> Result<Self> {
        Self::new(m, (0..m as i64).map(|t| (t, y0 as i64)))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Cells in sorted order.
    pub fn cells(&self) -> &[Point] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        a < self.m && b < self.m && self.table[a * self.m + b]
    }

    /// Exact dimension data `(|A|, M)`; `delta = log|A| / log M`.
    pub fn dimension_ratio(&self) -> (usize, usize) {
        (self.cells.len(), self.m)
    }

    pub fn delta(&self) -> f64 {
        (self.cells.len() as f64).ln() / (self.m as f64).ln()
    }

    /// The alphabet with coordinates swapped.
    pub fn transpose(&self) -> Self {
        Self::new(self.m, self.cells.iter().map(|&(a, b)| (b as i64, a as i64))).expect("transpose preserves validity")
    }

    /// Columns `c` with `(c, t)` in the alphabet for every `t`.
    pub fn full_columns(&self) -> Vec<usize> {
        (0..self.m).filter(|&c| (0..self.m).all(|t| self.contains(c, t))).collect()
    }

    /// Rows `r` with `(t, r)` in the alphabet for every `t`.
    pub fn full_rows(&self) -> Vec<usize> {
        (0..self.m).filter(|&r| (0..self.m).all(|t| self.contains(t, r))).collect()
    }

    /// Digit test: every base-`M` digit pair of `p` among the lowest `k`
    /// positions lies in the alphabet.
    pub fn digits_admissible(&self, k: u32, p: Point) -> bool {
        let (mut x, mut y) = p;
        for _ in 0..k {
            if !self.contains(x % self.m, y % self.m) {
                return false;
            }
            x /= self.m;
            y /= self.m;
        }
        x == 0 && y == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Alphabet1DRepr {
    #[serde(rename = "M")]
    m: usize,
    digits: Vec<i64>,
}

/// A proper nonempty subset of `ℤ_M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Alphabet1DRepr", into = "Alphabet1DRepr")]
pub struct Alphabet1D {
    m: usize,
    digits: Vec<usize>,
}

impl TryFrom<Alphabet1DRepr> for Alphabet1D {
    type Error = FupError;
    fn try_from(r: Alphabet1DRepr) -> Result<Self> {
        Alphabet1D::new(r.m, r.digits)
    }
}

impl From<Alphabet1D> for Alphabet1DRepr {
    fn from(a: Alphabet1D) -> Self {
        Alphabet1DRepr { m: a.m, digits: a.digits.iter().map(|&d| d as i64).collect() }
    }
}

impl Alphabet1D {
    pub fn new(m: usize, digits: impl IntoIterator<Item = i64>) -> Result<Self> {
        if m < 2 {
            return Err(FupError::InvalidAlphabet(format!("base must be at least 2, got {m}")));
        }
        let mut digits: Vec<usize> = digits.into_iter().map(|d| d.rem_euclid(m as i64) as usize).collect();
        digits.sort_unstable();
        digits.dedup();
        if digits.is_empty() || digits.len() >= m {
            return Err(FupError::InvalidAlphabet(format!("alphabet must be a proper nonempty subset of Z_{m}")));
        }
        Ok(Self { m, digits })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn contains(&self, d: usize) -> bool {
        self.digits.binary_search(&d).is_ok()
    }

    pub fn delta(&self) -> f64 {
        (self.digits.len() as f64).ln() / (self.m as f64).ln()
    }

    /// The `k`-th iterate `{a_0 + a_1 M + … + a_{k-1} M^{k-1}}`, sorted.
    pub fn iterate(&self, k: u32) -> Vec<usize> {
        let mut pts = vec![0usize];
        let mut scale = 1usize;
        for _ in 0..k {
            pts = pts.iter().flat_map(|&p| self.digits.iter().map(move |&d| p + d * scale)).collect();
            scale *= self.m;
        }
        pts.sort_unstable();
        pts
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSetRepr {
    #[serde(rename = "N")]
    n: usize,
    points: Vec<[usize; 2]>,
}

/// A subset of `ℤ_N²`, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GridSetRepr", into = "GridSetRepr")]
pub struct GridSet {
    n: usize,
    points: Vec<Point>,
}

impl TryFrom<GridSetRepr> for GridSet {
    type Error = FupError;
    fn try_from(r: GridSetRepr) -> Result<Self> {
        GridSet::new(r.n, r.points.into_iter().map(|[x, y]| (x, y)))
    }
}

impl From<GridSet> for GridSetRepr {
    fn from(s: GridSet) -> Self {
        GridSetRepr { n: s.n, points: s.points.iter().map(|&(x, y)| [x, y]).collect() }
    }
}

impl GridSet {
    pub fn new(n: usize, points: impl IntoIterator<Item = Point>) -> Result<Self> {
        if n == 0 {
            return Err(FupError::OutOfRange { what: "modulus", detail: "N must be positive".into() });
        }
        let mut points: Vec<Point> = points.into_iter().collect();
        if let Some(&(x, y)) = points.iter().find(|&&(x, y)| x >= n || y >= n) {
            return Err(FupError::OutOfRange { what: "grid point", detail: format!("({x}, {y}) not in [0, {n})^2") });
        }
        points.sort_unstable();
        points.dedup();
        Ok(Self { n, points })
    }

    /// Builds a set reducing coordinates mod `n`.
    pub fn from_residues(n: usize, points: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let ni = n as i64;
        let pts = points.into_iter().map(|(x, y)| (x.rem_euclid(ni) as usize, y.rem_euclid(ni) as usize));
        Self::new(n, pts).expect("reduced coordinates are in range")
    }

    pub fn empty(n: usize) -> Self {
        Self { n, points: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        Self { n, points: (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).collect() }
    }

    /// Points whose flag in the row-major mask is set.
    pub fn from_mask(n: usize, mask: &[bool]) -> Self {
        assert_eq!(mask.len(), n * n);
        Self { n, points: mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| (i / n, i % n)).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.points.binary_search(&p).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = Point> + '_ {
        self.points.iter().copied()
    }

    /// Row-major membership mask of length `N²`.
    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.n * self.n];
        for &(x, y) in &self.points {
            m[x * self.n + y] = true;
        }
        m
    }

    pub fn complement(&self) -> Self {
        let m = self.mask();
        Self::from_mask(self.n, &m.iter().map(|b| !b).collect::<Vec<_>>())
    }

    pub fn is_subset(&self, other: &GridSet) -> bool {
        self.n == other.n && self.points.iter().all(|&p| other.contains(p))
    }

    pub fn intersection(&self, other: &GridSet) -> Self {
        Self { n: self.n, points: self.points.iter().copied().filter(|&p| other.contains(p)).collect() }
    }

    pub fn difference(&self, other: &GridSet) -> Self {
        Self { n: self.n, points: self.points.iter().copied().filter(|&p| !other.contains(p)).collect() }
    }

    pub fn translate(&self, dx: usize, dy: usize) -> Self {
        let n = self.n;
        Self::new(n, self.points.iter().map(|&(x, y)| ((x + dx) % n, (y + dy) % n)))
            .expect("translation stays in range")
    }
}

/// The `k`-th Cantor iterate `𝒳_k ⊂ ℤ_N²`, `N = M^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CantorIterate2D {
    k: u32,
    n: usize,
    points: GridSet,
}

impl CantorIterate2D {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &GridSet {
        &self.points
    }

    pub fn into_points(self) -> GridSet {
        self.points
    }
}

/// Points of `ℤ_{M^k}²` all of whose digit pairs lie in `a`.
pub fn iterate(a: &Alphabet2D, k: u32) -> Result<CantorIterate2D> {
    let n = checked_pow(a.m(), k)?;
    let mut pts: Vec<Point> = vec![(0, 0)];
    let mut scale = 1usize;
    for _ in 0..k {
        pts = pts
            .iter()
            .flat_map(|&(x, y)| a.cells().iter().map(move |&(p, q)| (x + p * scale, y + q * scale)))
            .collect();
        scale *= a.m();
    }
    Ok(CantorIterate2D { k, n, points: GridSet::new(n, pts)? })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Tail {
    Free,
    Zero,
    Max,
}

/// Whether the closed cell `[x/N, (x+1)/N] × [y/N, (y+1)/N]` meets the
/// limiting Cantor set of `a` on the torus.
///
/// A point of the limit set lies in the closed cell `(x, y)` iff its
/// address truncated at depth `k` is one of the up to nine cells touching
/// `(x, y)`; touching across an edge forces the remaining digits to be all
/// zero or all `M-1` in that coordinate.
pub fn cell_meets_drawing(a: &Alphabet2D, n: usize, p: Point) -> Result<bool> {
    let k = power_index(a.m(), n).ok_or(FupError::InvalidModulus { n, m: a.m() })?;
    if n == 1 {
        return Ok(true);
    }
    let m = a.m();
    let (x, y) = (p.0 % n, p.1 % n);
    let tail_ok = |t: Tail, d: usize| match t {
        Tail::Free => true,
        Tail::Zero => d == 0,
        Tail::Max => d == m - 1,
    };
    let shift = |base: usize, s: i64| ((base as i64 + s).rem_euclid(n as i64)) as usize;
    let tail_of = |s: i64| match s {
        0 => Tail::Free,
        -1 => Tail::Max,
        _ => Tail::Zero,
    };
    for sx in -1i64..=1 {
        for sy in -1i64..=1 {
            let (u, v) = (shift(x, sx), shift(y, sy));
            if !a.digits_admissible(k, (u, v)) {
                continue;
            }
            let (tx, ty) = (tail_of(sx), tail_of(sy));
            if a.cells().iter().any(|&(c, d)| tail_ok(tx, c) && tail_ok(ty, d)) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// The discretisation `X_N`: all cells whose closure meets the limit set.
pub fn drawing_cells(a: &Alphabet2D, n: usize) -> Result<GridSet> {
    power_index(a.m(), n).ok_or(FupError::InvalidModulus { n, m: a.m() })?;
    let mut pts = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if cell_meets_drawing(a, n, (x, y))? {
                pts.push((x, y));
            }
        }
    }
    GridSet::new(n, pts)
}

/// `S + [0,R)²` modulo `N`.
pub fn upper_right_neighborhood(s: &GridSet, r: usize) -> Result<GridSet> {
    let n = s.n();
    if r == 0 || r > n {
        return Err(FupError::OutOfRange { what: "neighbourhood radius", detail: format!("R = {r} not in [1, {n}]") });
    }
    let mut mask = vec![false; n * n];
    for &(x, y) in s.points() {
        for i in 0..r {
            let row = ((x + i) % n) * n;
            for j in 0..r {
                mask[row + (y + j) % n] = true;
            }
        }
    }
    Ok(GridSet::from_mask(n, &mask))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_validation() {
        assert!(Alphabet2D::new(1, [(0, 0)]).is_err());
        assert!(Alphabet2D::new(2, std::iter::empty()).is_err());
        assert!(Alphabet2D::new(2, [(0, 0), (0, 1), (1, 0), (1, 1)]).is_err());
        let a = Alphabet2D::new(3, [(4, -1), (1, 2), (1, 2)]).unwrap();
        assert_eq!(a.cells(), &[(1, 2)]);
    }

    #[test]
    fn alphabet_json_round_trip() {
        let a: Alphabet2D = serde_json::from_str(r#"{"M":3,"cells":[[0,0],[1,2],[2,1]]}"#).unwrap();
        assert_eq!(a.len(), 3);
        let back: Alphabet2D = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(a, back);
        assert!(serde_json::from_str::<Alphabet2D>(r#"{"M":3,"cells":[],"x":1}"#).is_err());
    }

    #[test]
    fn iterate_basics() {
        let single = Alphabet2D::new(3, [(0, 0)]).unwrap();
        let it = iterate(&single, 2).unwrap();
        assert_eq!(it.n(), 9);
        assert_eq!(it.points().points(), &[(0, 0)]);
        let diag = Alphabet2D::diagonal(3).unwrap();
        assert_eq!(iterate(&diag, 1).unwrap().points().points(), &[(0, 0), (1, 1), (2, 2)]);
        let zero = iterate(&diag, 0).unwrap();
        assert_eq!((zero.n(), zero.points().points()), (1, &[(0, 0)][..]));
    }

    #[test]
    fn power_index_cases() {
        assert_eq!(power_index(3, 1), Some(0));
        assert_eq!(power_index(3, 27), Some(3));
        assert_eq!(power_index(3, 12), None);
        assert_eq!(power_index(2, 0), None);
    }

    #[test]
    fn one_dimensional_iterate() {
        let a = Alphabet1D::new(3, [0, 2]).unwrap();
        assert_eq!(a.iterate(2), vec![0, 2, 6, 8]);
        assert!(Alphabet1D::new(2, [0, 1]).is_err());
    }

    #[test]
    fn neighbourhood_of_a_point() {
        let s = GridSet::new(5, [(0, 0)]).unwrap();
        let nb = upper_right_neighborhood(&s, 2).unwrap();
        assert_eq!(nb.points(), &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert!(upper_right_neighborhood(&s, 0).is_err());
        assert!(upper_right_neighborhood(&s, 6).is_err());
        let full = GridSet::full(4);
        assert_eq!(upper_right_neighborhood(&full, 3).unwrap(), full);
    }

    #[test]
    fn singleton_drawing() {
        let a = Alphabet2D::new(3, [(0, 0)]).unwrap();
        assert!(!cell_meets_drawing(&a, 3, (1, 1)).unwrap());
        assert!(cell_meets_drawing(&a, 3, (0, 0)).unwrap());
        // The corner at the origin is shared with the wrapped-around cells.
        assert!(cell_meets_drawing(&a, 3, (2, 2)).unwrap());
        assert!(cell_meets_drawing(&a, 4, (0, 0)).is_err());
    }
}
