use std::collections::BTreeMap;

use fup_cli::{parse_poly, render};
use fup_core::polymethod::BivarPoly;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn coeffs(src: &str) -> BTreeMap<(u32, u32), Complex64> {
    parse_poly(src).unwrap().parsed.coeffs().clone()
}

#[test]
fn example_polynomial() {
    let want: BTreeMap<_, _> =
        [((2, 0), c(1.0, 0.0)), ((1, 1), c(4.0, 0.0)), ((0, 1), c(1.0, 0.0)), ((0, 0), c(-1.0, 0.0))].into();
    assert_eq!(coeffs("z^2+4*z*w+w-1"), want);
    assert_eq!(coeffs("z^2 + 4zw + w - 1"), want);
    assert_eq!(coeffs(" - 1 + w + 4 w z + z ^ 2 "), want);
}

#[test]
fn zero_is_degenerate() {
    let e = parse_poly("0").unwrap();
    assert!(e.parsed.is_zero());
    assert!(e.is_degenerate());
    assert_eq!(e.canonical(), "0");
    assert!(parse_poly("z - z").unwrap().is_degenerate());
    assert!(!parse_poly("z").unwrap().is_degenerate());
}

#[test]
fn syntax_errors_carry_columns() {
    let e = parse_poly("(illegal").unwrap_err();
    assert_eq!(e.column, 1);
    let e = parse_poly("z^-1").unwrap_err();
    assert_eq!(e.column, 3);
    assert!(e.message.contains("negative"));
    assert_eq!(parse_poly("").unwrap_err().column, 1);
    assert_eq!(parse_poly("   ").unwrap_err().column, 1);
    assert_eq!(parse_poly("z +").unwrap_err().column, 4);
    assert_eq!(parse_poly("z*").unwrap_err().column, 3);
    assert_eq!(parse_poly("z^").unwrap_err().column, 3);
    assert_eq!(parse_poly("1.2.3").unwrap_err().column, 1);
    assert_eq!(parse_poly("2 x").unwrap_err().column, 3);
    assert_eq!(parse_poly("z^99999999999").unwrap_err().column, 3);
    assert!(parse_poly("z^4294967295 * z").is_err());
}

#[test]
fn imaginary_unit_and_juxtaposition() {
    assert_eq!(coeffs("2.5i w"), [((0, 1), c(0.0, 2.5))].into());
    assert_eq!(coeffs("i^2"), [((0, 0), c(-1.0, 0.0))].into());
    assert_eq!(coeffs("i^4 z^0"), [((0, 0), c(1.0, 0.0))].into());
    assert_eq!(coeffs("zzw"), [((2, 1), c(1.0, 0.0))].into());
    assert_eq!(coeffs("2 3"), [((0, 0), c(23.0, 0.0))].into());
    assert_eq!(coeffs(".5z + 0.5z"), [((1, 0), c(1.0, 0.0))].into());
}

#[test]
fn canonical_rendering() {
    assert_eq!(render(&parse_poly("w - 1 + 4zw + z^2").unwrap().parsed), "z^2 + 4*z*w + w - 1");
    assert_eq!(render(&parse_poly("-i z + 0.25").unwrap().parsed), "-i*z + 0.25");
    let p = BivarPoly::new([((1, 2), c(-3.0, 0.5)), ((0, 0), c(0.0, -1.0))]);
    assert_eq!(render(&p), "-3*z*w^2 + 0.5*i*z*w^2 - i");
}

fn coefficient() -> impl Strategy<Value = f64> {
    prop_oneof![
        Just(0.0),
        Just(1.0),
        Just(-1.0),
        -1e6..1e6f64,
        (-40i32..40).prop_map(|e| 10f64.powi(e)),
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
    ]
}

proptest! {
    #[test]
    fn render_round_trips(terms in prop::collection::vec(((0u32..6, 0u32..6), coefficient(), coefficient()), 0..8)) {
        let p = BivarPoly::new(terms.into_iter().map(|(e, re, im)| (e, c(re, im))));
        let text = render(&p);
        let back = parse_poly(&text).unwrap().parsed;
        prop_assert_eq!(back.coeffs(), p.coeffs(), "{}", text);
    }

    #[test]
    fn whitespace_is_ignored(src in "[zwi0-9+*^ -]{1,20}") {
        let squeezed: String = src.chars().filter(|c| *c != ' ').collect();
        match (parse_poly(&src), parse_poly(&squeezed)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.parsed, b.parsed),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a.map(|e| e.parsed), b.map(|e| e.parsed)),
        }
    }
}
