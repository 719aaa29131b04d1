use std::collections::BTreeMap;

use crate::error::{PolylogError, Result};
use crate::scalar::{from_usize, lit, CompensatedSum, Real};

const DIRECT_TERMS: usize = 100;

/// `B_2, B_4, ..., B_20`.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

pub const MAX_TAIL_TERMS: usize = BERNOULLI_EVEN.len();

/// Precomputed `zeta(k)` values. Built once, read-only afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaTable<T> {
    pub values: BTreeMap<usize, T>,
    pub tail_terms: usize,
}

impl<T: Real> ZetaTable<T> {
    pub fn new(k_max: usize, tail_terms: usize) -> Result<Self> {
        let values = (2..=k_max)
            .map(|k| zeta_value(k, tail_terms).map(|v| (k, v)))
            .collect::<Result<_>>()?;
        Ok(Self { values, tail_terms })
    }

    pub fn get(&self, k: usize) -> Option<T> {
        self.values.get(&k).copied()
    }
}

impl<T: Real> Default for ZetaTable<T> {
    fn default() -> Self {
        Self::new(12, 6).expect("default zeta table")
    }
}

/// `zeta(k)`, served from `table` when present and computed otherwise.
pub fn zeta<T: Real>(k: usize, table: &ZetaTable<T>) -> Result<T> {
    match table.get(k) {
        Some(v) => Ok(v),
        None => zeta_value(k, table.tail_terms),
    }
}

/// Direct sum of the first 99 terms plus the Euler-Maclaurin tail from
/// `n = 100` with `tail_terms` Bernoulli corrections.
pub fn zeta_value<T: Real>(k: usize, tail_terms: usize) -> Result<T> {
    if k < 2 {
        return Err(PolylogError::Argument(format!(
            "zeta(k) needs k >= 2, got {k}"
        )));
    }
    if tail_terms > MAX_TAIL_TERMS {
        return Err(PolylogError::Argument(format!(
            "at most {MAX_TAIL_TERMS} Bernoulli tail terms are tabulated"
        )));
    }
    let kk = k as i32;
    let n_big = from_usize::<T>(DIRECT_TERMS);
    let kt = from_usize::<T>(k);

    let mut acc = CompensatedSum::new();
    // tail corrections first, smallest magnitude
    let mut rising = kt; // k (k+1) ... (k + 2j - 2)
    let mut fact = lit::<T>(2.0); // (2j)!
    let mut corrections = Vec::with_capacity(tail_terms);
    for (j, &b) in BERNOULLI_EVEN.iter().enumerate().take(tail_terms) {
        let j = j + 1;
        if j > 1 {
            let a = from_usize::<T>(2 * j - 3);
            rising = rising * (kt + a) * (kt + a + T::one());
            fact = fact * from_usize::<T>(2 * j - 1) * from_usize::<T>(2 * j);
        }
        corrections.push(lit::<T>(b) / fact * rising * n_big.powi(-kk - 2 * j as i32 + 1));
    }
    for c in corrections.into_iter().rev() {
        acc.add(num_complex::Complex::new(c, T::zero()));
    }
    acc.add(num_complex::Complex::new(n_big.powi(-kk) / lit(2.0), T::zero()));
    acc.add(num_complex::Complex::new(
        n_big.powi(1 - kk) / (kt - T::one()),
        T::zero(),
    ));
    for n in (1..DIRECT_TERMS).rev() {
        acc.add(num_complex::Complex::new(from_usize::<T>(n).powi(-kk), T::zero()));
    }
    Ok(acc.value().re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_orders() {
        assert!(zeta_value::<f64>(1, 6).is_err());
        assert!(zeta_value::<f64>(3, 11).is_err());
    }

    #[test]
    fn table_is_strictly_decreasing_towards_one() {
        let t = ZetaTable::<f64>::new(40, 6).unwrap();
        let vals: Vec<f64> = t.values.values().copied().collect();
        assert!(vals.windows(2).all(|w| w[0] > w[1]));
        assert!(vals.iter().all(|&v| v > 1.0 && v <= vals[0]));
    }

    #[test]
    fn large_order_is_dominated_by_first_terms() {
        let v = zeta_value::<f64>(50, 6).unwrap();
        let expect = 1.0 + 2f64.powi(-50) + 3f64.powi(-50);
        assert!((v - expect).abs() <= f64::EPSILON);
    }

    #[test]
    fn lookup_falls_back_to_direct_evaluation() {
        let t = ZetaTable::<f64>::new(4, 6).unwrap();
        assert_eq!(zeta(3, &t).unwrap(), t.get(3).unwrap());
        assert_eq!(zeta(9, &t).unwrap(), zeta_value::<f64>(9, 6).unwrap());
    }
}
