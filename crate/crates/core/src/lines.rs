//! Lines in `ℤ_N²` and on the torus, and the decision of which line
//! directions fit inside a Cantor set.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cantor::{iterate, Alphabet2D, GridSet, Point};
use crate::error::{FupError, Result};
use crate::par;

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(g, s, t)` with `s·a + t·b = g = gcd(a, b) ≥ 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Inverse of `a` modulo `n`, if it exists.
pub fn mod_inverse(a: i64, n: i64) -> Option<i64> {
    let (g, s, _) = ext_gcd(a.rem_euclid(n), n);
    (g == 1).then(|| s.rem_euclid(n))
}

/// A primitive integer vector, sign-normalised so that `b > 0`, or `b = 0`
/// and `a = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[i64; 2]", into = "[i64; 2]")]
pub struct Direction {
    a: i64,
    b: i64,
}

impl TryFrom<[i64; 2]> for Direction {
    type Error = FupError;
    fn try_from(v: [i64; 2]) -> Result<Self> {
        Direction::new(v[0], v[1])
    }
}

impl From<Direction> for [i64; 2] {
    fn from(d: Direction) -> Self {
        [d.a, d.b]
    }
}

impl Direction {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        if gcd(a, b) != 1 {
            return Err(FupError::OutOfRange {
                what: "direction",
                detail: format!("({a}, {b}) is not a primitive integer vector"),
            });
        }
        Ok(if b < 0 || (b == 0 && a < 0) { Self { a: -a, b: -b } } else { Self { a, b } })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    /// `max(|a|, |b|)`.
    pub fn size(&self) -> i64 {
        self.a.abs().max(self.b.abs())
    }

    /// The normalised direction of `(-b, a)`.
    pub fn perp(&self) -> Self {
        Self::new(-self.b, self.a).expect("perpendicular of a primitive vector is primitive")
    }

    pub fn is_vertical(&self) -> bool {
        self.a == 0
    }

    pub fn is_horizontal(&self) -> bool {
        self.b == 0
    }

    /// All primitive directions with `size ≤ max`, ordered by size then
    /// lexicographically.
    pub fn enumerate(max: i64) -> Vec<Direction> {
        let mut out = Vec::new();
        for a in -max..=max {
            for b in 0..=max {
                if gcd(a, b) == 1 && (b > 0 || a == 1) {
                    out.push(Direction { a, b });
                }
            }
        }
        out.sort_by_key(|d| (d.size(), d.a, d.b));
        out
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// The line `ax + by = c` in `ℤ_N²` with a canonical coprime integer pair
/// `(a, b)` of minimal size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Line {
    #[serde(rename = "N")]
    n: usize,
    a: i64,
    b: i64,
    c: usize,
}

impl Line {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn c(&self) -> usize {
        self.c
    }

    /// `‖ℓ‖ = max(|a|, |b|)`.
    pub fn size(&self) -> i64 {
        self.a.abs().max(self.b.abs())
    }

    pub fn contains(&self, p: Point) -> bool {
        let n = self.n as i64;
        (self.a * p.0 as i64 + self.b * p.1 as i64 - self.c as i64).rem_euclid(n) == 0
    }

    /// The generator `(-b, a)` of the line's direction.
    pub fn generator(&self) -> (i64, i64) {
        (-self.b, self.a)
    }

    /// A point on the line.
    pub fn base_point(&self) -> Point {
        let n = self.n as i64;
        let (_, s, t) = ext_gcd(self.a, self.b);
        let c = self.c as i64;
        (((c * s).rem_euclid(n)) as usize, ((c * t).rem_euclid(n)) as usize)
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x + {}y = {} (mod {})", self.a, self.b, self.c, self.n)
    }
}

fn symmetric_lifts(r: i64, n: i64) -> Vec<i64> {
    let r = r.rem_euclid(n);
    if 2 * r == n {
        vec![r, -r]
    } else if 2 * r > n {
        vec![r - n]
    } else {
        vec![r]
    }
}

/// Canonical representative of `{ax + by = c}` in `ℤ_N²`.
pub fn canonicalize_line(a: i64, b: i64, c: i64, n: usize) -> Result<Line> {
    if n == 0 {
        return Err(FupError::OutOfRange { what: "modulus", detail: "N must be positive".into() });
    }
    if n == 1 {
        return Ok(Line { n, a: 0, b: 1, c: 0 });
    }
    let ni = n as i64;
    let (ar, br, cr) = (a.rem_euclid(ni), b.rem_euclid(ni), c.rem_euclid(ni));
    if gcd(gcd(ar, br), ni) != 1 {
        return Err(FupError::NotIrreducible { a, b, n });
    }
    let mut best: Option<((i64, i64, i64), Line)> = None;
    for t in 1..ni {
        if gcd(t, ni) != 1 {
            continue;
        }
        let (at, bt, ct) = ((ar * t) % ni, (br * t) % ni, (cr * t) % ni);
        for &la in &symmetric_lifts(at, ni) {
            for &lb in &symmetric_lifts(bt, ni) {
                let g = gcd(la, lb);
                if g == 0 {
                    continue;
                }
                let ginv = mod_inverse(g, ni).expect("common factor is a unit");
                let (mut na, mut nb, mut nc) = (la / g, lb / g, (ct * ginv).rem_euclid(ni));
                if nb < 0 || (nb == 0 && na < 0) {
                    na = -na;
                    nb = -nb;
                    nc = (-nc).rem_euclid(ni);
                }
                let key = (na.abs().max(nb.abs()), na, nb);
                if best.as_ref().is_none_or(|(k, _)| key < *k) {
                    best = Some((key, Line { n, a: na, b: nb, c: nc as usize }));
                }
            }
        }
    }
    Ok(best.expect("the identity unit always yields a candidate").1)
}

/// The `N` points `p₀ + t(-b, a)`.
pub fn line_points(l: &Line) -> GridSet {
    let n = l.n as i64;
    let (x0, y0) = l.base_point();
    GridSet::from_residues(l.n, (0..n).map(|t| (x0 as i64 - t * l.b, y0 as i64 + t * l.a)))
}

/// All distinct irreducible lines through `p`, canonical, one per direction
/// class modulo `N`.
pub fn lines_through(p: Point, n: usize) -> Vec<Line> {
    let mut out: Vec<Line> = direction_classes(n)
        .into_iter()
        .map(|(a, b)| {
            let c = a * p.0 as i64 + b * p.1 as i64;
            canonicalize_line(a, b, c, n).expect("class representatives are irreducible")
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Canonical `(a, b)` for every class of irreducible lines in `ℤ_N²`.
pub fn direction_classes(n: usize) -> Vec<(i64, i64)> {
    let ni = n as i64;
    let mut dirs: Vec<(i64, i64)> = (0..ni)
        .flat_map(|a| (0..ni).map(move |b| (a, b)))
        .filter(|&(a, b)| gcd(gcd(a, b), ni) == 1)
        .map(|(a, b)| {
            let l = canonicalize_line(a, b, 0, n).expect("filtered to irreducible");
            (l.a, l.b)
        })
        .collect();
    dirs.sort();
    dirs.dedup();
    dirs
}

/// The discrete line `ℤv + p` in `ℤ_N²`.
pub fn discrete_line(v: Direction, p: Point, n: usize) -> GridSet {
    GridSet::from_residues(n, (0..n as i64).map(|t| (p.0 as i64 + t * v.a, p.1 as i64 + t * v.b)))
}

/// An eventually periodic base-`M` expansion `0.d₁d₂…` of a number in
/// `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MExpansion {
    base: usize,
    prefix: Vec<usize>,
    period: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailKind {
    /// All remaining digits are zero.
    Zero,
    /// All remaining digits are `M-1`.
    Max,
    Interior,
}

impl MExpansion {
    pub fn zero(base: usize) -> Self {
        Self { base, prefix: Vec::new(), period: vec![0] }
    }

    /// `0.(d)`, the constant digit sequence.
    pub fn constant(base: usize, d: usize) -> Self {
        Self { base, prefix: Vec::new(), period: vec![d] }
    }

    /// Expansion of `(r + t) / den` where `0 ≤ r < den` and `t = 0.(input)`
    /// is a purely periodic digit stream that is not all `M-1`.
    fn divide_stream(base: usize, den: usize, r: usize, input: &[usize]) -> Self {
        let len = input.len();
        let mut seen = std::collections::HashMap::new();
        let mut digits = Vec::new();
        let (mut rem, mut pos) = (r, 0usize);
        loop {
            if let Some(&start) = seen.get(&(rem, pos)) {
                let period = digits.split_off(start);
                return Self { base, prefix: digits, period };
            }
            seen.insert((rem, pos), digits.len());
            let num = rem * base + input[pos];
            digits.push(num / den);
            rem = num % den;
            pos = (pos + 1) % len;
        }
    }

    /// Expansion of the rational `num / den` in `[0, 1)`.
    pub fn rational(base: usize, num: usize, den: usize) -> Self {
        Self::divide_stream(base, den, num % den, &[0])
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    pub fn period(&self) -> &[usize] {
        &self.period
    }

    /// The `j`-th digit after the point, 1-based.
    pub fn digit(&self, j: usize) -> usize {
        if j <= self.prefix.len() {
            self.prefix[j - 1]
        } else {
            self.period[(j - 1 - self.prefix.len()) % self.period.len()]
        }
    }

    /// The integer formed by the first `k` digits, i.e. `⌊M^k x⌋` unless the
    /// tail is all `M-1`.
    pub fn leading(&self, k: u32) -> usize {
        (1..=k as usize).fold(0, |acc, j| acc * self.base + self.digit(j))
    }

    /// What the digits after position `k` look like.
    pub fn tail_kind(&self, k: u32) -> TailKind {
        let k = k as usize;
        let tail_prefix = self.prefix.iter().skip(k);
        let all = |d: usize| tail_prefix.clone().all(|&x| x == d) && self.period.iter().all(|&x| x == d);
        if all(0) {
            TailKind::Zero
        } else if all(self.base - 1) {
            TailKind::Max
        } else {
            TailKind::Interior
        }
    }

    pub fn to_f64(&self) -> f64 {
        let m = self.base as f64;
        let mut v = 0.0;
        let mut scale = 1.0 / m;
        for &d in &self.prefix {
            v += d as f64 * scale;
            scale /= m;
        }
        let mut pv = 0.0;
        let mut ps = 1.0 / m;
        for &d in &self.period {
            pv += d as f64 * ps;
            ps /= m;
        }
        v + scale * m * pv / (1.0 - 1.0 / m.powi(self.period.len() as i32))
    }
}

impl fmt::Display for MExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.base > 10 { ":" } else { "" };
        let join = |ds: &[usize]| ds.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(sep);
        write!(f, "0.{}({})_{}", join(&self.prefix), join(&self.period), self.base)
    }
}

/// A point of the torus with base-`M` coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TorusPoint {
    pub x: MExpansion,
    pub y: MExpansion,
}

impl TorusPoint {
    pub fn origin(base: usize) -> Self {
        Self { x: MExpansion::zero(base), y: MExpansion::zero(base) }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

impl Default for TorusPoint {
    fn default() -> Self {
        Self::origin(2)
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Serialize for TorusPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("TorusPoint", 3)?;
        st.serialize_field("x", &self.x.to_string())?;
        st.serialize_field("y", &self.y.to_string())?;
        st.serialize_field("approx", &[self.x.to_f64(), self.y.to_f64()])?;
        st.end()
    }
}

/// Offsets `s` for which the line `ℝv + (s, 0)` lies in the closed drawing
/// of the alphabet, on the grid `s ∈ (1/(M b))ℤ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntervalSet {
    pub v: Direction,
    /// Grid denominator `M·b`.
    #[serde(rename = "Mb")]
    pub mb: usize,
    /// Cells `c` whose closed interval `[c, c+1]/(Mb)` lies in the set.
    pub cells: Vec<usize>,
    /// Grid offsets `c/(Mb)` in the set, including isolated ones.
    pub points: Vec<usize>,
}

impl IntervalSet {
    pub fn has_cell(&self, c: usize) -> bool {
        self.cells.binary_search(&c).is_ok()
    }

    pub fn has_point(&self, c: usize) -> bool {
        self.points.binary_search(&c).is_ok()
    }
}

/// Whether the line `ℝv + (σ/(2Mb), 0)` lies in the closed drawing of `a`.
///
/// Between consecutive crossings with the `1/M` grid the line stays inside
/// one cell (or on one grid line), so it suffices to test the midpoints of
/// a fine enough rational partition of one period.
fn offset_in_drawing(a: &Alphabet2D, v: Direction, sigma: usize) -> bool {
    let m = a.m() as i64;
    let (va, vb) = (v.a, v.b);
    let d = 2 * m * va.abs().max(1) * vb;
    let q = 2 * d;
    let cells_at = |num: i64| -> [Option<usize>; 2] {
        let fl = num.div_euclid(q);
        let main = Some(fl.rem_euclid(m) as usize);
        if num.rem_euclid(q) == 0 {
            [main, Some((fl - 1).rem_euclid(m) as usize)]
        } else {
            [main, None]
        }
    };
    let sx = sigma as i64 * (d / vb);
    (0..d).all(|j| {
        let odd = 2 * j + 1;
        let xs = cells_at(sx + m * va * odd);
        let ys = cells_at(m * vb * odd);
        xs.iter().flatten().any(|&cx| ys.iter().flatten().any(|&cy| a.contains(cx, cy)))
    })
}

/// The admissible offsets for direction `v`, which must have `b ≠ 0`.
pub fn interval_set(a: &Alphabet2D, v: Direction) -> Result<IntervalSet> {
    if v.b == 0 {
        return Err(FupError::HorizontalDirection { a: v.a, b: v.b });
    }
    let mb = a.m() * v.b as usize;
    let cells = (0..mb).filter(|&c| offset_in_drawing(a, v, 2 * c + 1)).collect();
    let points = (0..mb).filter(|&c| offset_in_drawing(a, v, 2 * c)).collect();
    Ok(IntervalSet { v, mb, cells, points })
}

/// How a line inside the limit set was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    /// A full column or row of the alphabet.
    Axis,
    /// A cycle of admissible offset intervals under `s ↦ Ms`.
    CellCycle,
    /// A periodic orbit of admissible grid offsets.
    PointCycle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineWitness {
    pub v: Direction,
    pub offset: TorusPoint,
    pub kind: WitnessKind,
}

/// Finds `p` with `ℝv + p` inside the limit set of `a`, if one exists.
pub fn line_in_cantor(a: &Alphabet2D, v: Direction) -> Option<LineWitness> {
    let m = a.m();
    if v.size() > m as i64 {
        return None;
    }
    if v.is_vertical() {
        let c = *a.full_columns().first()?;
        return Some(LineWitness {
            v,
            offset: TorusPoint { x: MExpansion::constant(m, c), y: MExpansion::zero(m) },
            kind: WitnessKind::Axis,
        });
    }
    if v.is_horizontal() {
        let r = *a.full_rows().first()?;
        return Some(LineWitness {
            v,
            offset: TorusPoint { x: MExpansion::zero(m), y: MExpansion::constant(m, r) },
            kind: WitnessKind::Axis,
        });
    }
    let set = interval_set(a, v).expect("b is nonzero here");
    if let Some(cycle) = cell_cycle(&set, m) {
        let mb = set.mb;
        let digits: Vec<usize> =
            (0..cycle.len()).map(|j| (cycle[(j + 1) % cycle.len()] + mb * m - m * cycle[j] % mb) % mb).collect();
        let x = if digits.iter().all(|&d| d == m - 1) {
            MExpansion::rational(m, (cycle[0] + 1) % mb, mb)
        } else {
            MExpansion::divide_stream(m, mb, cycle[0], &digits)
        };
        return Some(LineWitness { v, offset: TorusPoint { x, y: MExpansion::zero(m) }, kind: WitnessKind::CellCycle });
    }
    let c = point_cycle(&set, m)?;
    Some(LineWitness {
        v,
        offset: TorusPoint { x: MExpansion::rational(m, c, set.mb), y: MExpansion::zero(m) },
        kind: WitnessKind::PointCycle,
    })
}

/// A directed cycle among marked cells under `c ↦ Mc + i (mod Mb)`.
fn cell_cycle(set: &IntervalSet, m: usize) -> Option<Vec<usize>> {
    let mb = set.mb;
    let marked: Vec<bool> = (0..mb).map(|c| set.has_cell(c)).collect();
    let succ = |c: usize| (0..m).map(move |i| (c * m + i) % mb);
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; mb];
    for start in 0..mb {
        if !marked[start] || state[start] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        state[start] = 1;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if *next == m {
                state[node] = 2;
                stack.pop();
                continue;
            }
            let child = succ(node).nth(*next).expect("in range");
            *next += 1;
            if !marked[child] {
                continue;
            }
            match state[child] {
                0 => {
                    state[child] = 1;
                    stack.push((child, 0));
                }
                1 => {
                    let pos = stack.iter().position(|&(n, _)| n == child).expect("on stack");
                    return Some(stack[pos..].iter().map(|&(n, _)| n).collect());
                }
                _ => {}
            }
        }
    }
    None
}

/// A marked grid offset whose whole forward orbit stays marked.
fn point_cycle(set: &IntervalSet, m: usize) -> Option<usize> {
    let mb = set.mb;
    set.points.iter().copied().find(|&c| {
        let mut seen = vec![false; mb];
        let mut cur = c;
        loop {
            if !set.has_point(cur) {
                return false;
            }
            if seen[cur] {
                return true;
            }
            seen[cur] = true;
            cur = cur * m % mb;
        }
    })
}

fn rounding_candidates(e: &MExpansion, k: u32, component: i64, n: usize) -> Vec<usize> {
    let fl = e.leading(k) as i64;
    let ni = n as i64;
    let (primary, others): (i64, Vec<i64>) = match (e.tail_kind(k), component.signum()) {
        (TailKind::Interior, _) => (fl, vec![]),
        (TailKind::Zero, -1) => (fl - 1, vec![fl]),
        (TailKind::Zero, _) => (fl, vec![fl - 1]),
        (TailKind::Max, -1) => (fl, vec![fl + 1]),
        (TailKind::Max, _) => (fl + 1, vec![fl]),
    };
    std::iter::once(primary).chain(others).map(|v| v.rem_euclid(ni) as usize).collect()
}

/// A base point `p⁽ᵏ⁾` with `ℤv + p⁽ᵏ⁾` inside the `k`-th iterate, derived
/// from a torus offset `p` by rounding `M^k p`. On failure returns the first
/// point of the primary rounding that leaves the iterate.
pub fn discrete_line_offset(a: &Alphabet2D, v: Direction, p: &TorusPoint, k: u32) -> std::result::Result<Point, Point> {
    let m = a.m();
    let n = m.pow(k);
    let xs = rounding_candidates(&p.x, k, v.a, n);
    let ys = rounding_candidates(&p.y, k, v.b, n);
    let first_bad = |base: Point| discrete_line(v, base, n).iter().find(|&q| !a.digits_admissible(k, q));
    let mut primary_bad = None;
    for &x in &xs {
        for &y in &ys {
            match first_bad((x, y)) {
                None => return Ok((x, y)),
                Some(q) => {
                    primary_bad.get_or_insert(q);
                }
            }
        }
    }
    Err(primary_bad.expect("at least one candidate"))
}

/// Outcome of the orthogonal-line test.
#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum PairVerdict {
    Obstructed { v: Direction, p: LineWitness, q: LineWitness },
    FupHolds,
}

impl PairVerdict {
    pub fn is_obstructed(&self) -> bool {
        matches!(self, PairVerdict::Obstructed { .. })
    }
}

impl Serialize for PairVerdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match self {
            PairVerdict::FupHolds => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("obstructed", &false)?;
                m.end()
            }
            PairVerdict::Obstructed { v, p, q } => {
                let mut m = s.serialize_map(Some(5))?;
                m.serialize_entry("obstructed", &true)?;
                m.serialize_entry("v", v)?;
                m.serialize_entry("v_perp", &v.perp())?;
                m.serialize_entry("p", &p.offset)?;
                m.serialize_entry("q", &q.offset)?;
                m.end()
            }
        }
    }
}

/// Looks for `v` with a line of direction `v` in the limit set of `a` and
/// one of direction `v⊥` in that of `b`.
pub fn orthogonal_pair_condition(a: &Alphabet2D, b: &Alphabet2D) -> Result<PairVerdict> {
    if a.m() != b.m() {
        return Err(FupError::DimensionMismatch(format!("bases {} and {}", a.m(), b.m())));
    }
    let dirs = Direction::enumerate(a.m() as i64);
    let hit = par::find_first(dirs.len(), |i| {
        let v = dirs[i];
        let p = line_in_cantor(a, v)?;
        let q = line_in_cantor(b, v.perp())?;
        Some((p, q))
    });
    Ok(match hit {
        Some((i, (p, q))) => PairVerdict::Obstructed { v: dirs[i], p, q },
        None => PairVerdict::FupHolds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RangeRule {
    InnerProduct,
    OrthogonalLines,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RangeVerdict {
    /// Whether the uncertainty bound holds with a positive exponent.
    pub holds: bool,
    pub rule: RangeRule,
}

/// Whether some differences `j - j'` in `a` and `k - k'` in `b` have
/// nonzero inner product.
pub fn has_nonorthogonal_differences(a: &Alphabet2D, b: &Alphabet2D) -> bool {
    let diffs = |s: &[Point]| -> Vec<(i64, i64)> {
        s.iter().flat_map(|&p| s.iter().map(move |&q| (p.0 as i64 - q.0 as i64, p.1 as i64 - q.1 as i64))).collect()
    };
    let (da, db) = (diffs(a.cells()), diffs(b.cells()));
    da.iter().any(|x| db.iter().any(|y| x.0 * y.0 + x.1 * y.1 != 0))
}

/// Chooses the criterion by comparing `|A|·|B|` with `M²`, i.e.
/// `δ_A + δ_B` with 2, in exact integers.
pub fn full_range_condition(a: &Alphabet2D, b: &Alphabet2D) -> Result<RangeVerdict> {
    if a.m() != b.m() {
        return Err(FupError::DimensionMismatch(format!("bases {} and {}", a.m(), b.m())));
    }
    let prod = a.len() * b.len();
    let m2 = a.m() * a.m();
    if prod <= m2 {
        Ok(RangeVerdict { holds: has_nonorthogonal_differences(a, b), rule: RangeRule::InnerProduct })
    } else {
        Ok(RangeVerdict { holds: !orthogonal_pair_condition(a, b)?.is_obstructed(), rule: RangeRule::OrthogonalLines })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginReport {
    pub v: Direction,
    pub margin: f64,
    pub resolution: usize,
}

fn circle_interval_distance(x: f64, lo: f64, hi: f64) -> f64 {
    let x = x.rem_euclid(1.0);
    if x >= lo && x <= hi {
        return 0.0;
    }
    let d = |p: f64, q: f64| {
        let t = (p - q).rem_euclid(1.0);
        t.min(1.0 - t)
    };
    d(x, lo).min(d(x, hi))
}

fn distance_to_drawing(a: &Alphabet2D, x: f64, y: f64) -> f64 {
    let m = a.m() as f64;
    a.cells()
        .iter()
        .map(|&(i, j)| {
            let dx = circle_interval_distance(x, i as f64 / m, (i + 1) as f64 / m);
            let dy = circle_interval_distance(y, j as f64 / m, (j + 1) as f64 / m);
            dx.max(dy)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Sampled `inf_p sup_{x ∈ ℝv+p} d(x, drawing)` in the ℓ∞ torus metric.
pub fn line_margin(a: &Alphabet2D, v: Direction, resolution: usize) -> Result<MarginReport> {
    if resolution < 8 {
        return Err(FupError::OutOfRange { what: "resolution", detail: format!("{resolution} < 8") });
    }
    let steps = resolution * v.size().max(1) as usize;
    let sups = par::map_range(resolution, |i| {
        let s = i as f64 / resolution as f64;
        (0..steps)
            .map(|j| {
                let t = j as f64 / steps as f64;
                let (x, y) = if v.b == 0 { (t, s) } else { (s + t * v.a as f64, t * v.b as f64) };
                distance_to_drawing(a, x, y)
            })
            .fold(0.0, f64::max)
    });
    let margin = sups.into_iter().fold(f64::INFINITY, f64::min).clamp(0.0, 0.5);
    Ok(MarginReport { v, margin, resolution })
}

/// Checks the discrete consequence of a line witness: the rounded line lies in
/// every iterate up to depth `k_max`.
pub fn witness_discretizes(a: &Alphabet2D, w: &LineWitness, k_max: u32) -> bool {
    (1..=k_max).all(|k| match discrete_line_offset(a, w.v, &w.offset, k) {
        Ok(base) => {
            let it = iterate(a, k).expect("small k");
            discrete_line(w.v, base, it.n()).is_subset(it.points())
        }
        Err(_) => false,
    })
}
