//! Exact vanishing tests for Gaussian-integer polynomials at roots of unity.
//!
//! `Σ c_e ζ^e = 0` for a primitive `L`-th root `ζ` iff the cyclotomic
//! polynomial `Φ_L` divides `Σ c_e t^e`, which is decided in integer
//! arithmetic.

fn mul_binomial(p: &[i64], d: usize) -> Vec<i64> {
    // p · (t^d − 1)
    let mut out = vec![0i64; p.len() + d];
    for (i, &c) in p.iter().enumerate() {
        out[i + d] += c;
        out[i] -= c;
    }
    out
}

fn div_binomial(p: &[i64], d: usize) -> Vec<i64> {
    // p / (t^d − 1), exact
    let deg = p.len() - 1;
    let mut rem = p.to_vec();
    let mut q = vec![0i64; deg + 1 - d];
    for i in (d..=deg).rev() {
        let c = rem[i];
        q[i - d] = c;
        rem[i] -= c;
        rem[i - d] += c;
    }
    debug_assert!(rem.iter().all(|&c| c == 0), "division was not exact");
    q
}

fn mobius(mut n: usize) -> i32 {
    let mut mu = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// Coefficients of `Φ_n`, lowest degree first.
pub fn cyclotomic_poly(n: usize) -> Vec<i64> {
    assert!(n >= 1);
    let divisors: Vec<usize> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    let mut p = vec![1i64];
    for &d in &divisors {
        if mobius(n / d) == 1 {
            p = mul_binomial(&p, d);
        }
    }
    for &d in &divisors {
        if mobius(n / d) == -1 {
            p = div_binomial(&p, d);
        }
    }
    p
}

/// Exact evaluation of integer-coefficient bivariate polynomials on the
/// grid `(e^{2πix/N}, e^{2πiy/N})`.
#[derive(Debug, Clone)]
pub struct ExactGridEval {
    n: usize,
    l: usize,
    phi: Vec<i64>,
}

/// A term `c · z^k w^l` with Gaussian-integer `c = re + i·im`.
pub type IntTerm = ((u32, u32), (i64, i64));

impl ExactGridEval {
    pub fn new(n: usize) -> Self {
        // Work with primitive L-th roots, L = lcm(N, 4), so that i is a power.
        let l = if n.is_multiple_of(4) {
            n
        } else if n.is_multiple_of(2) {
            2 * n
        } else {
            4 * n
        };
        Self { n, l, phi: cyclotomic_poly(l) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Whether `Σ c · ω^{kx + ly}` is exactly zero. `None` if intermediate
    /// integers overflow.
    pub fn vanishes(&self, terms: &[IntTerm], x: usize, y: usize) -> Option<bool> {
        let (n, l) = (self.n, self.l);
        let step = l / n;
        let quarter = l / 4;
        let mut p = vec![0i128; l];
        for &((k, lw), (re, im)) in terms {
            let e = ((k as usize % n) * x + (lw as usize % n) * y) % n * step;
            p[e] += re as i128;
            p[(e + quarter) % l] += im as i128;
        }
        let deg = self.phi.len() - 1;
        for i in (deg..l).rev() {
            let c = p[i];
            if c == 0 {
                continue;
            }
            for (j, &f) in self.phi.iter().enumerate() {
                let idx = i - deg + j;
                p[idx] = p[idx].checked_sub(c.checked_mul(f as i128)?)?;
            }
        }
        Some(p[..deg].iter().all(|&c| c == 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(2), vec![1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        let p105 = cyclotomic_poly(105);
        assert_eq!(p105.len() - 1, 48);
        assert!(p105.contains(&-2));
    }

    #[test]
    fn exact_zero_of_zw_minus_one() {
        let ev = ExactGridEval::new(5);
        let f = [((1, 1), (1, 0)), ((0, 0), (-1, 0))];
        assert_eq!(ev.vanishes(&f, 2, 3), Some(true));
        assert_eq!(ev.vanishes(&f, 2, 2), Some(false));
    }

    #[test]
    fn imaginary_unit_handled() {
        // z - i vanishes at x = N/4.
        let ev = ExactGridEval::new(8);
        let f = [((1, 0), (1, 0)), ((0, 0), (0, -1))];
        assert_eq!(ev.vanishes(&f, 2, 0), Some(true));
        assert_eq!(ev.vanishes(&f, 6, 0), Some(false));
        // 1 + i is never zero, even though i is not a power of ω when 4 ∤ N.
        let ev = ExactGridEval::new(3);
        assert_eq!(ev.vanishes(&[((0, 0), (1, 1))], 0, 0), Some(false));
    }
}
