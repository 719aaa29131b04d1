#![allow(dead_code)]

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type C = Complex<f64>;

pub fn c(re: f64, im: f64) -> C {
    Complex::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform points of the rectangle `[re.0, re.1] x [im.0, im.1]`.
pub fn points(seed: u64, n: usize, re: (f64, f64), im: (f64, f64)) -> Vec<C> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| c(r.gen_range(re.0..re.1), r.gen_range(im.0..im.1)))
        .collect()
}

pub fn rel_err(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}
