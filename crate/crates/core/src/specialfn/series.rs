use num_complex::Complex;

use crate::error::{PolylogError, Result};
use crate::scalar::{from_usize, lit, real, CompensatedSum, Real};

/// Truncation controls for the power series `sum z^n / n^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig<T> {
    /// Absolute bound on the neglected tail.
    pub tol: T,
    pub max_terms: usize,
    /// `|z|` at or below which `li` sums the series instead of integrating.
    pub radius_switch: T,
}

impl<T: Real> Default for SeriesConfig<T> {
    fn default() -> Self {
        Self {
            tol: lit(1e-17),
            max_terms: 100_000,
            radius_switch: lit(0.5),
        }
    }
}

impl<T: Real> SeriesConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > T::zero()) || self.max_terms < 10 {
            return Err(PolylogError::Precondition(
                "series config needs tol > 0 and max_terms >= 10".into(),
            ));
        }
        if !(self.radius_switch > T::zero() && self.radius_switch < T::one()) {
            return Err(PolylogError::Precondition(
                "radius_switch must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// Largest `|z|` the series accepts.
pub fn series_radius_cutoff<T: Real>() -> T {
    T::one() - lit(1e-6)
}

/// Partial sum of `sum_{n>=1} z^n / n^k` with compensated accumulation,
/// stopped once the geometric bound on the remaining tail is below `cfg.tol`.
pub fn li_series<T: Real>(k: usize, z: Complex<T>, cfg: &SeriesConfig<T>) -> Result<Complex<T>> {
    Ok(li_series_with_error(k, z, cfg)?.0)
}

/// As [`li_series`], also returning the tail bound at truncation.
pub fn li_series_with_error<T: Real>(
    k: usize,
    z: Complex<T>,
    cfg: &SeriesConfig<T>,
) -> Result<(Complex<T>, T)> {
    if k == 0 {
        return Err(PolylogError::Argument("polylog order k must be >= 1".into()));
    }
    crate::domain::check_finite(z)?;
    let r = z.norm();
    if r >= series_radius_cutoff() {
        return Err(PolylogError::Precondition(format!(
            "|z| = {r} too close to the unit circle for the power series"
        )));
    }
    if r == T::zero() {
        return Ok((real(T::zero()), T::zero()));
    }
    let kk = k as i32;
    let mut acc = CompensatedSum::new();
    let mut zn = z;
    let mut rn = r;
    let one_minus_r = T::one() - r;
    for n in 1..=cfg.max_terms {
        let nk = from_usize::<T>(n).powi(kk);
        acc.add(zn / nk);
        let next = from_usize::<T>(n + 1).powi(kk);
        let tail = rn * r / next / one_minus_r;
        if tail <= cfg.tol {
            return Ok((acc.value(), tail));
        }
        zn = zn * z;
        rn = rn * r;
    }
    Err(PolylogError::Budget(format!(
        "series for Li_{k} did not reach tolerance within {} terms",
        cfg.max_terms
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_is_empty_sum() {
        let cfg = SeriesConfig::<f64>::default();
        for k in 1..6 {
            assert_eq!(li_series(k, Complex::new(0.0, 0.0), &cfg).unwrap(), real(0.0));
        }
    }

    #[test]
    fn order_one_is_minus_log() {
        let cfg = SeriesConfig::<f64>::default();
        let v = li_series(1, Complex::new(0.5, 0.0), &cfg).unwrap();
        assert!((v.re - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn rejects_points_near_the_circle() {
        let cfg = SeriesConfig::<f64>::default();
        assert!(matches!(
            li_series(2, Complex::new(1.0 - 1e-7, 0.0), &cfg),
            Err(PolylogError::Precondition(_))
        ));
        assert!(matches!(
            li_series(0, Complex::new(0.1, 0.0), &cfg),
            Err(PolylogError::Argument(_))
        ));
    }

    #[test]
    fn budget_is_enforced() {
        let cfg = SeriesConfig {
            max_terms: 10,
            ..SeriesConfig::<f64>::default()
        };
        assert!(matches!(
            li_series(2, Complex::new(0.9, 0.0), &cfg),
            Err(PolylogError::Budget(_))
        ));
    }
}
