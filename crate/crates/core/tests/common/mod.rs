#![allow(dead_code)]

use fup_core::cantor::{Alphabet2D, GridSet, Point};
use num_complex::Complex64;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random proper alphabet of the given size.
pub fn random_alphabet(rng: &mut ChaCha8Rng, m: usize, size: usize) -> Alphabet2D {
    let size = size.clamp(1, m * m - 1);
    let cells = index::sample(rng, m * m, size).into_iter().map(|i| ((i / m) as i64, (i % m) as i64));
    Alphabet2D::new(m, cells).unwrap()
}

pub fn random_set(rng: &mut ChaCha8Rng, n: usize, size: usize) -> GridSet {
    let pts: Vec<Point> = index::sample(rng, n * n, size.min(n * n)).into_iter().map(|i| (i / n, i % n)).collect();
    GridSet::new(n, pts).unwrap()
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if c.norm() > 0.1 {
            return c;
        }
    }
}

/// `S + [0,R)²` by testing every grid point against every element of `S`.
pub fn brute_neighborhood(s: &GridSet, r: usize) -> GridSet {
    let n = s.n();
    let mut out = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let hit = s.points().iter().any(|&(a, b)| (x + n - a) % n < r && (y + n - b) % n < r);
            if hit {
                out.push((x, y));
            }
        }
    }
    GridSet::new(n, out).unwrap()
}
