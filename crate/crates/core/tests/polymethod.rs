mod common;

use std::f64::consts::PI;

use fup_core::cantor::{upper_right_neighborhood, GridSet};
use fup_core::dft::{dft, unit_root, Dim, GridFunction};
use fup_core::lines::{canonicalize_line, gcd, line_points, lines_through};
use fup_core::polymethod::{
    bezout_intersection, cuts_out_line, eval_zero_set, lemma_radius, line_polynomial, localize_to_line,
    min_vanishing_poly, multiplier_from_poly, one_dim_annihilator, separating_poly, seven_polynomials, zeros_among,
    BezoutVerdict, BivarPoly, LineCut,
};
use fup_core::FupError;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use common::{random_complex, random_set, rng};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn poly(terms: &[((u32, u32), f64)]) -> BivarPoly {
    BivarPoly::new(terms.iter().map(|&(e, v)| (e, c(v))))
}

/// `|F|` at a grid point, evaluated with fresh trigonometric calls.
fn direct_abs(f: &BivarPoly, n: usize, (x, y): (usize, usize)) -> f64 {
    f.coeffs()
        .iter()
        .map(|(&(k, l), &a)| {
            a * Complex64::from_polar(1.0, 2.0 * PI * ((k as usize * x + l as usize * y) % n) as f64 / n as f64)
        })
        .sum::<Complex64>()
        .norm()
}

fn vanishes(f: &BivarPoly, n: usize, p: (usize, usize)) -> bool {
    direct_abs(f, n, p) <= 1e-8 * f.l1_norm()
}

#[test]
fn zero_set_examples() {
    let f = poly(&[((1, 1), 1.0), ((0, 0), -1.0)]);
    let z = eval_zero_set(&f, 5).unwrap();
    assert_eq!(z.count, 5);
    assert_eq!(z.zeros, line_points(&canonicalize_line(1, 1, 0, 5).unwrap()));
    let f = poly(&[((1, 0), 1.0), ((0, 0), -1.0)]);
    assert_eq!(eval_zero_set(&f, 6).unwrap().zeros, GridSet::new(6, (0..6).map(|y| (0, y))).unwrap());
    let ex = poly(&[((2, 0), 1.0), ((1, 1), 4.0), ((0, 1), 1.0), ((0, 0), -1.0)]);
    for n in 2..=64 {
        assert!(eval_zero_set(&ex, n).unwrap().count <= 44);
    }
    assert!(eval_zero_set(&ex, 0).is_err());
}

#[test]
fn polynomial_json() {
    let f = BivarPoly::new([((2, 0), c(1.0)), ((0, 1), Complex64::new(0.0, -2.5))]);
    let json = serde_json::to_string(&f).unwrap();
    assert_eq!(json, r#"{"terms":[{"k":0,"l":1,"re":0.0,"im":-2.5},{"k":2,"l":0,"re":1.0,"im":0.0}]}"#);
    assert_eq!(serde_json::from_str::<BivarPoly>(&json).unwrap(), f);
}

#[test]
fn min_vanishing_examples() {
    let s = GridSet::new(7, [(3, 5)]).unwrap();
    let f = min_vanishing_poly(&s).unwrap();
    assert_eq!(f.degree(), 1);
    assert!(vanishes(&f, 7, (3, 5)));

    let s = GridSet::new(4, [(0, 0), (1, 0), (0, 1)]).unwrap();
    let f = min_vanishing_poly(&s).unwrap();
    assert_eq!(f.degree(), 1);
    for &p in s.points() {
        assert!(direct_abs(&f, 4, p) <= 1e-10);
    }
    assert!((f.l2_norm() - 1.0).abs() < 1e-12);

    let s = GridSet::new(6, (0..6).map(|y| (0, y))).unwrap();
    let f = min_vanishing_poly(&s).unwrap();
    assert_eq!(f.degree(), 1);
    assert!(f.coeff(0, 1).norm() < 1e-10 && f.coeff(1, 1).norm() < 1e-10);
    assert!((f.coeff(1, 0) + f.coeff(0, 0)).norm() < 1e-10);
}

#[test]
fn cut_out_examples() {
    let f = BivarPoly::new([((1, 1), c(1.0)), ((0, 0), -unit_root(5, 1))]);
    let l = *cuts_out_line(&f, 5).unwrap().line().unwrap();
    assert_eq!(line_points(&l), line_points(&canonicalize_line(1, 1, 1, 5).unwrap()));

    let ex = poly(&[((2, 0), 1.0), ((1, 1), 4.0), ((0, 1), 1.0), ((0, 0), -1.0)]);
    assert_eq!(cuts_out_line(&ex, 7).unwrap(), LineCut::NotALine);

    let f = BivarPoly::new([((2, 0), c(1.0)), ((0, 3), -unit_root(7, 2))]);
    let l = *cuts_out_line(&f, 7).unwrap().line().unwrap();
    assert_eq!(line_points(&l), line_points(&canonicalize_line(2, -3, 2, 7).unwrap()));
    assert_eq!(line_points(&l), eval_zero_set(&f, 7).unwrap().zeros);

    let f = BivarPoly::new([((1, 0), c(1.0)), ((0, 0), -unit_root(10, 1))]);
    assert!(matches!(cuts_out_line(&f, 5).unwrap(), LineCut::NoGridLine { .. }));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn line_polynomial_cuts_out_line(n in 2usize..=16, a in -8i64..=8, b in -8i64..=8, cc in 0i64..16) {
        prop_assume!(gcd(a, b) == 1);
        let l = canonicalize_line(a, b, cc, n).unwrap();
        prop_assume!(2 * l.size() <= n as i64);
        let p = line_polynomial(&l);
        prop_assert!(p.degree() as i64 <= 2 * l.size());
        prop_assert_eq!(eval_zero_set(&p, n).unwrap().zeros, line_points(&l));
    }

    #[test]
    fn min_vanishing_degree_bound(n in 3usize..=9, pts in proptest::collection::vec((0usize..9, 0usize..9), 1..20)) {
        let s = GridSet::new(n, pts.into_iter().map(|(x, y)| (x % n, y % n))).unwrap();
        let f = min_vanishing_poly(&s).unwrap();
        prop_assert!(f.degree() as usize <= (s.len() as f64).sqrt().floor() as usize);
        for &p in s.points() {
            prop_assert!(direct_abs(&f, n, p) <= 1e-8);
        }
    }
}

fn check_separation(s: &GridSet) {
    let sep = separating_poly(s).unwrap();
    let n = s.n();
    let r = lemma_radius(s.len());
    assert_eq!(sep.radius, r);
    let survivors: Vec<_> = s.iter().filter(|&p| !vanishes(&sep.poly, n, p)).collect();
    assert!(!survivors.is_empty(), "S ∖ Z(F*) empty for {s:?}");
    assert!(survivors.iter().all(|&p| sep.line.contains(p)));
    assert!((sep.line.size() as usize) <= r);
    assert!((sep.poly.degree() as usize) < r);
    assert!(sep.poly.coeffs().keys().all(|&(k, l)| (k as usize) < r && (l as usize) < r));
}

#[test]
fn separating_examples() {
    let s = GridSet::new(7, [(2, 5)]).unwrap();
    let sep = separating_poly(&s).unwrap();
    assert_eq!(sep.poly.degree(), 0);
    assert!(sep.line.contains((2, 5)) && sep.line.size() == 1);

    let s = GridSet::new(9, [(2, 0), (2, 4), (2, 7)]).unwrap();
    let sep = separating_poly(&s).unwrap();
    assert_eq!(sep.poly.degree(), 0);
    assert_eq!(line_points(&sep.line), GridSet::new(9, (0..9).map(|y| (2, y))).unwrap());

    let s = GridSet::new(5, (0..5).map(|y| (0, y)).chain([(1, 1), (2, 3)])).unwrap();
    let sep = separating_poly(&s).unwrap();
    assert_eq!(line_points(&sep.line), GridSet::new(5, (0..5).map(|y| (0, y))).unwrap());
    assert!(sep.poly.degree() <= 2);
    check_separation(&s);
    assert!(separating_poly(&GridSet::empty(4)).is_err());
}

#[test]
fn separating_battery() {
    let mut r = rng(0x5e9);
    for n in 4..=16usize {
        for _ in 0..200 {
            let size = r.random_range(1..=10usize);
            check_separation(&random_set(&mut r, n, size));
        }
    }
}

#[test]
fn multiplier_examples() {
    let h = multiplier_from_poly(&poly(&[((0, 0), 1.0)]), 6).unwrap();
    assert!(h.values().iter().all(|v| (v - c(1.0 / 6.0)).norm() < 1e-15));
    let hh = dft(&multiplier_from_poly(&poly(&[((1, 0), 1.0)]), 6).unwrap());
    for (i, v) in hh.values().iter().enumerate() {
        let expect = if i == 6 { 1.0 } else { 0.0 };
        assert!((v - c(expect)).norm() < 1e-12);
    }
    let mut r = rng(8);
    let f = BivarPoly::new((0..4u32).flat_map(|k| (0..4u32).map(move |l| (k, l))).map(|e| (e, random_complex(&mut r))));
    let fh = dft(&multiplier_from_poly(&f, 8).unwrap());
    for k in 0..8 {
        for l in 0..8 {
            assert!((fh.at((k, l)) - f.coeff(k as u32, l as u32)).norm() < 1e-12);
        }
    }
    assert!(multiplier_from_poly(&poly(&[((8, 0), 1.0)]), 8).is_err());
}

#[test]
fn localize_examples() {
    let mut f = GridFunction::zeros(8, Dim::Two);
    f.values_mut()[3 * 8 + 4] = Complex64::new(0.3, -1.0);
    let loc = localize_to_line(&f).unwrap();
    assert!(loc.line.contains((3, 4)));
    let ratio = loc.g.at((3, 4)) / f.at((3, 4));
    for (a, b) in loc.g.values().iter().zip(f.values()) {
        assert!((a - ratio * b).norm() < 1e-12);
    }

    let line = canonicalize_line(1, 1, 0, 5).unwrap();
    let f = GridFunction::from_fn_2d(5, |x, y| c(if (x + y) % 5 == 0 { 1.0 } else { 0.0 }));
    let loc = localize_to_line(&f).unwrap();
    assert_eq!(loc.line, line);
    let ratio = loc.g.at((0, 0));
    for (a, b) in loc.g.values().iter().zip(f.values()) {
        assert!((a - ratio * b).norm() < 1e-12);
    }
    let gh = dft(&loc.g).support();
    assert!(gh.is_subset(&line_points(&canonicalize_line(1, -1, 0, 5).unwrap())));

    let mut r = rng(16);
    let s = random_set(&mut r, 16, 6);
    let mut f = GridFunction::zeros(16, Dim::Two);
    for &(x, y) in s.points() {
        f.values_mut()[x * 16 + y] = random_complex(&mut r);
    }
    let loc = localize_to_line(&f).unwrap();
    assert!(loc.g.support().is_subset(&s.intersection(&line_points(&loc.line))));
    let nb = upper_right_neighborhood(&dft(&f).support(), loc.radius.min(16)).unwrap();
    assert!(dft(&loc.g).support().is_subset(&nb));
    assert!(localize_to_line(&GridFunction::zeros(4, Dim::Two)).is_err());
}

#[test]
fn annihilator_examples() {
    let h = one_dim_annihilator(5, &[2], 2).unwrap();
    assert!(h.values().iter().all(|v| (v - c(1.0 / 5f64.sqrt())).norm() < 1e-15));
    let h = one_dim_annihilator(4, &[0, 1], 1).unwrap();
    assert!(h.at((0, 0)).norm() < 1e-15 && h.at((1, 0)).norm() > 0.1);
    assert!(one_dim_annihilator(4, &[0, 1], 2).is_err());
}

/// The annihilator argument for interval uncertainty, replayed numerically:
/// `w = h f` is a nonzero multiple of a delta, so `ŵ` vanishes nowhere, while
/// `ŵ(ξ) = N^{-1/2} Σ_j ĥ(j) f̂(ξ - j)` only sees `|S|` consecutive values of `f̂`.
#[test]
fn annihilator_forbids_vanishing_intervals() {
    let mut r = rng(2);
    for n in 2..=12usize {
        for _ in 0..20 {
            let size = r.random_range(1..=n - 1);
            let s: Vec<usize> = rand::seq::index::sample(&mut r, n, size).into_iter().collect();
            let keep = s[0];
            let f =
                GridFunction::from_fn_1d(
                    n,
                    |x| if s.contains(&x) { random_complex(&mut rng(x as u64)) } else { c(0.0) },
                );
            let h = one_dim_annihilator(n, &s, keep).unwrap();
            for &x in &s {
                assert_eq!(h.at((x, 0)).norm() < 1e-9, x != keep);
            }
            let hh = dft(&h);
            for j in size..n {
                assert!(hh.at((j, 0)).norm() < 1e-9);
            }
            let w = h.mul(&f).unwrap();
            let wh = dft(&w);
            let fh = dft(&f);
            for xi in 0..n {
                let conv: Complex64 = (0..size).map(|j| hh.at((j, 0)) * fh.at(((xi + n - j) % n, 0))).sum();
                assert!((wh.at((xi, 0)) - conv / (n as f64).sqrt()).norm() < 1e-10);
                assert!(wh.at((xi, 0)).norm() > 1e-9);
            }
            // Hence f̂ cannot vanish on any interval of length |S|.
            for start in 0..n {
                assert!((0..size).any(|j| fh.at(((start + j) % n, 0)).norm() > 1e-9));
            }
        }
    }
}

#[test]
fn seven_polynomial_examples() {
    let f = poly(&[((0, 0), 1.0), ((1, 0), 1.0), ((0, 1), 1.0)]);
    let sevens = seven_polynomials(&f).unwrap();
    assert_eq!(sevens[0], poly(&[((0, 0), 1.0), ((1, 0), -1.0), ((0, 1), 1.0)]));
    let degrees: Vec<u32> = sevens.iter().map(|g| g.degree()).collect();
    assert_eq!(degrees, [1, 1, 1, 2, 2, 2, 2]);
    let mut seen = 0;
    for n in 1..=36 {
        let z = eval_zero_set(&f, n).unwrap().zeros;
        seen += z.len();
        for p in z.iter() {
            let one = GridSet::new(n, [p]).unwrap();
            assert!(sevens.iter().any(|g| !zeros_among(g, &one).is_empty()), "N={n} {p:?}");
        }
    }
    assert!(seen > 0);
    let zw = poly(&[((1, 1), 1.0), ((0, 0), -1.0)]);
    assert!(matches!(seven_polynomials(&zw), Err(FupError::UnsupportedLattice(_))));
    let ziw = BivarPoly::new([((1, 0), c(1.0)), ((0, 1), Complex64::new(0.0, 1.0))]);
    assert!(matches!(seven_polynomials(&ziw), Err(FupError::Unsupported(_))));
}

/// Whether some irreducible line lies entirely in `z`.
fn contains_line(z: &GridSet) -> bool {
    z.iter().any(|p| lines_through(p, z.n()).iter().any(|l| line_points(l).is_subset(z)))
}

#[test]
fn cyclotomic_bound_battery() {
    let mut r = rng(0xc1c);
    let mut tested = 0;
    while tested < 8 {
        let d = r.random_range(1..=2u32);
        let terms: Vec<((u32, u32), f64)> = (0..r.random_range(3..=4))
            .map(|_| ((r.random_range(0..=d), r.random_range(0..=d)), [1.0, -1.0, 2.0, -2.0][r.random_range(0..4)]))
            .collect();
        let f = poly(&terms);
        if f.is_zero() || !f.support_lattice().is_full() || f.degree() != d {
            continue;
        }
        tested += 1;
        let bound = 22 * (2 * d as usize).pow(2);
        for n in 1..=128 {
            let z = eval_zero_set(&f, n).unwrap().zeros;
            if z.len() > bound {
                assert!(contains_line(&z), "{f:?} has {} zeros at N={n} and no line", z.len());
            }
        }
    }
}

#[test]
fn bezout_examples() {
    let f = poly(&[((1, 0), 1.0), ((0, 0), -1.0)]);
    let g = poly(&[((0, 1), 1.0), ((0, 0), -1.0)]);
    let rep = bezout_intersection(&f, &g, 12).unwrap();
    assert_eq!((rep.count, rep.bound, rep.ok), (1, 1, true));
    assert_eq!(rep.verdict, BezoutVerdict::Conclusive);

    let f = poly(&[((1, 1), 1.0), ((0, 0), -1.0)]);
    let g = BivarPoly::new([((1, 0), c(1.0)), ((0, 1), -unit_root(8, 1))]);
    let rep = bezout_intersection(&f, &g, 8).unwrap();
    assert!(rep.count <= 4 && rep.ok);

    let ex = poly(&[((2, 0), 1.0), ((1, 1), 4.0), ((0, 1), 1.0), ((0, 0), -1.0)]);
    let f1 = seven_polynomials(&ex).unwrap()[0].clone();
    let rep = bezout_intersection(&ex, &f1, 32).unwrap();
    assert!(rep.ok && rep.bound == 4);

    let rep = bezout_intersection(&f, &f.mul(&g), 8).unwrap();
    assert_eq!(rep.verdict, BezoutVerdict::Inconclusive);
}
