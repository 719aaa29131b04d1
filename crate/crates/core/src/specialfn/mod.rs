//! Independent evaluation of `Li_1`, `Li_k`, `Li_{2,1,...,1}` and `zeta(k)` on
//! their principal branches. These routines are the reference every
//! reconstruction is checked against, so none of them relies on the
//! inversion relation.

mod mpl;
mod path;
mod series;
mod zeta;

use num_complex::Complex;

use crate::domain::{require_domain, DomainId};
use crate::error::{PolylogError, Result};
use crate::scalar::{lit, real, Real};

pub use mpl::{li21n, li21n_with_tol, LI21N_TOL};
pub use path::{default_path, li_all_along_polyline, li_along_path, PathSpec, PANEL_ORDER};
pub use series::{li_series, li_series_with_error, series_radius_cutoff, SeriesConfig};
pub use zeta::{zeta, zeta_value, ZetaTable, MAX_TAIL_TERMS};

pub(crate) use path::li1_unchecked;

/// Absolute target of the path integration in [`li`].
pub const LI_PATH_TOL: f64 = 1e-14;

/// `Li_1(z) = -log(1 - z)`, holomorphic on `D`.
pub fn li1<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    require_domain(z, DomainId::CutPlaneD)?;
    Ok(li1_unchecked(z))
}

/// `Li_k(z)` on `D` with the default configuration.
pub fn li<T: Real>(k: usize, z: Complex<T>) -> Result<Complex<T>> {
    li_with(k, z, &SeriesConfig::default())
}

/// `Li_k(z)` on `D`: the power series inside `|z| <= cfg.radius_switch`,
/// otherwise iterated path integration of `d/dt Li_j = Li_{j-1} / t` from a
/// seed on the series disk.
pub fn li_with<T: Real>(k: usize, z: Complex<T>, cfg: &SeriesConfig<T>) -> Result<Complex<T>> {
    Ok(li_all_with(k, z, cfg)?.pop().expect("k >= 1"))
}

/// `[Li_1(z), ..., Li_k(z)]`, sharing one path integration.
pub fn li_all_with<T: Real>(
    k: usize,
    z: Complex<T>,
    cfg: &SeriesConfig<T>,
) -> Result<Vec<Complex<T>>> {
    if k == 0 {
        return Err(PolylogError::Argument("polylog order k must be >= 1".into()));
    }
    cfg.validate()?;
    require_domain(z, DomainId::CutPlaneD)?;
    if z.norm() <= cfg.radius_switch {
        let mut out = vec![li1_unchecked(z)];
        for j in 2..=k {
            out.push(li_series(j, z, cfg)?);
        }
        return Ok(out);
    }
    let path = default_path(z, cfg.radius_switch)?;
    li_along_path(k, &path, cfg, lit(LI_PATH_TOL))
}

/// `[Li_1(z), ..., Li_k(z)]` with the default configuration.
pub fn li_all<T: Real>(k: usize, z: Complex<T>) -> Result<Vec<Complex<T>>> {
    li_all_with(k, z, &SeriesConfig::default())
}

/// Closed-form derivative: `1 / (1 - z)` for `k = 1`, `Li_{k-1}(z) / z`
/// otherwise, with the removable value 1 at `z = 0`.
pub fn li_derivative<T: Real>(k: usize, z: Complex<T>) -> Result<Complex<T>> {
    if k == 0 {
        return Err(PolylogError::Argument("polylog order k must be >= 1".into()));
    }
    require_domain(z, DomainId::CutPlaneD)?;
    if k == 1 {
        return Ok(real::<T>(T::one()) / (real::<T>(T::one()) - z));
    }
    if z.norm() == T::zero() {
        return Ok(real(T::one()));
    }
    Ok(li(k - 1, z)? / z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn li1_examples() {
        assert_eq!(li1(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!((li1(c(0.5, 0.0)).unwrap().re - std::f64::consts::LN_2).abs() < 1e-16);
        assert!((li1(c(-1.0, 0.0)).unwrap().re + std::f64::consts::LN_2).abs() < 1e-16);
        assert!(matches!(li1(c(1.0, 0.0)), Err(PolylogError::Domain(_))));
        assert!(matches!(li1(c(3.0, 0.0)), Err(PolylogError::Domain(_))));
    }

    #[test]
    fn li_normalisation_and_errors() {
        assert_eq!(li(3, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!(li(0, c(0.1, 0.0)).is_err());
        assert!(matches!(li(2, c(2.0, 0.0)), Err(PolylogError::Domain(_))));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(li_derivative(1, c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(li_derivative(2, c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        let d = li_derivative(2, c(1e-9, 0.0)).unwrap();
        assert!((d.re - 1.0).abs() < 1e-9);
        let d = li_derivative(3, c(0.5, 0.0)).unwrap();
        assert!((d.re - 1.164_481_052_930_025).abs() < 1e-14);
    }

    #[test]
    fn li_all_is_consistent_with_li() {
        let z = c(0.7, 1.3);
        let all = li_all(4, z).unwrap();
        for (j, v) in all.iter().enumerate() {
            let single = li(j + 1, z).unwrap();
            assert!((single - v).norm() < 1e-15);
        }
    }
}
