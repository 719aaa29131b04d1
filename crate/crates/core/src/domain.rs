//! Principal-branch elementary functions and membership in the cut planes
//! and half planes the reconstruction works on.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{PolylogError, Result};
use crate::scalar::{cplx, from_usize, Real};

/// Open subsets of the complex plane used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainId {
    /// `C \ [1, inf)`, where `Li_k` is single valued.
    CutPlaneD,
    /// `C \ (-inf, 0]`, where the principal logarithm is holomorphic.
    CutPlaneDPrime,
    /// `Re z < 1`.
    HalfPlanePlus,
    /// `Re z > 0`.
    HalfPlaneMinus,
    /// `0 < Re z < 1`, the overlap of the two half planes.
    Strip,
}

impl DomainId {
    pub fn contains<T: Real>(self, z: Complex<T>) -> bool {
        in_domain(z, self)
    }

    pub fn name(self) -> &'static str {
        match self {
            DomainId::CutPlaneD => "D",
            DomainId::CutPlaneDPrime => "D'",
            DomainId::HalfPlanePlus => "D(+)",
            DomainId::HalfPlaneMinus => "D(-)",
            DomainId::Strip => "the strip 0 < Re z < 1",
        }
    }
}

/// Open-set membership. Points on cuts or boundary lines are excluded, as are
/// non-finite points.
pub fn in_domain<T: Real>(z: Complex<T>, d: DomainId) -> bool {
    if !is_finite(z) {
        return false;
    }
    let one = T::one();
    match d {
        DomainId::CutPlaneD => !(z.im == T::zero() && z.re >= one),
        DomainId::CutPlaneDPrime => !(z.im == T::zero() && z.re <= T::zero()),
        DomainId::HalfPlanePlus => z.re < one,
        DomainId::HalfPlaneMinus => z.re > T::zero(),
        DomainId::Strip => z.re > T::zero() && z.re < one,
    }
}

#[inline]
pub fn is_finite<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub(crate) fn check_finite<T: Real>(z: Complex<T>) -> Result<()> {
    if is_finite(z) {
        Ok(())
    } else {
        Err(PolylogError::Precondition(format!(
            "non-finite point {}{:+}i",
            z.re, z.im
        )))
    }
}

/// Returns a domain error naming `d` unless `z` lies in it.
pub fn require_domain<T: Real>(z: Complex<T>, d: DomainId) -> Result<()> {
    check_finite(z)?;
    if in_domain(z, d) {
        return Ok(());
    }
    let msg = match d {
        DomainId::CutPlaneD => "on cut of D",
        DomainId::CutPlaneDPrime => "on cut of D'",
        DomainId::HalfPlanePlus => "outside D(+)",
        DomainId::HalfPlaneMinus => "outside D(-)",
        DomainId::Strip => "outside the strip 0 < Re z < 1",
    };
    Err(PolylogError::Domain(format!(
        "z = {}{:+}i {msg}",
        z.re, z.im
    )))
}

/// Argument in `(-pi, pi]`; a signed zero imaginary part on the negative axis
/// maps to `+pi`.
#[inline]
pub(crate) fn principal_arg<T: Real>(z: Complex<T>) -> T {
    if z.im == T::zero() {
        if z.re < T::zero() {
            T::PI()
        } else {
            T::zero()
        }
    } else {
        z.im.atan2(z.re)
    }
}

/// `log|z| + i arg z` with `arg` in `(-pi, pi]`.
pub fn principal_log<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    check_finite(z)?;
    if z.re == T::zero() && z.im == T::zero() {
        return Err(PolylogError::Domain("log of zero".into()));
    }
    Ok(log_unchecked(z))
}

#[inline]
pub(crate) fn log_unchecked<T: Real>(z: Complex<T>) -> Complex<T> {
    cplx(z.re.hypot(z.im).ln(), principal_arg(z))
}

/// Principal `log(1 + z)` without cancellation for small `|z|`.
pub(crate) fn log1p_unchecked<T: Real>(z: Complex<T>) -> Complex<T> {
    let one = T::one();
    let w = cplx(one + z.re, z.im);
    let m2 = z.re * (z.re + one + one) + z.im * z.im;
    let re = if m2.abs() < lit_half() {
        m2.ln_1p() / (one + one)
    } else {
        w.re.hypot(w.im).ln()
    };
    cplx(re, principal_arg(w))
}

#[inline]
fn lit_half<T: Real>() -> T {
    T::one() / (T::one() + T::one())
}

const FACTORIALS: [u64; 21] = {
    let mut f = [1u64; 21];
    let mut i = 1;
    while i < 21 {
        f[i] = f[i - 1] * i as u64;
        i += 1;
    }
    f
};

/// `n!` in working precision: the exact integer for `n <= 20`, a running
/// product beyond.
pub fn factorial<T: Real>(n: usize) -> T {
    if n <= 20 {
        T::from_u64(FACTORIALS[n]).expect("factorial fits")
    } else {
        (21..=n).fold(T::from_u64(FACTORIALS[20]).unwrap(), |acc, i| {
            acc * from_usize::<T>(i)
        })
    }
}

/// Coefficient `(-1)^j log^j(z) / j!` of the inversion relation, given the
/// principal logarithm of `z`.
pub(crate) fn log_power_from_log<T: Real>(log_z: Complex<T>, j: usize) -> Complex<T> {
    if j <= 20 {
        let sign = if j.is_multiple_of(2) { T::one() } else { -T::one() };
        log_z.powu(j as u32) * (sign / factorial::<T>(j))
    } else {
        (1..=j).fold(Complex::new(T::one(), T::zero()), |acc, i| {
            acc * (-log_z / from_usize::<T>(i))
        })
    }
}

/// `(-1)^j (log z)^j / j!` on the principal branch.
pub fn log_power_term<T: Real>(z: Complex<T>, j: usize) -> Result<Complex<T>> {
    if j == 0 {
        return Err(PolylogError::Argument("log power j must be >= 1".into()));
    }
    require_domain(z, DomainId::CutPlaneDPrime)?;
    Ok(log_power_from_log(log_unchecked(z), j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn log_examples() {
        assert_eq!(principal_log(c(1.0, 0.0)).unwrap(), c(0.0, 0.0));
        let l = principal_log(c(E, 0.0)).unwrap();
        assert!((l.re - 1.0).abs() < 1e-15 && l.im == 0.0);
        let l = principal_log(c(-1.0, 0.0)).unwrap();
        assert!(l.re.abs() < 1e-16 && (l.im - PI).abs() < 1e-16);
        let l = principal_log(c(-1.0, -0.0)).unwrap();
        assert_eq!(l.im, PI);
        assert!(matches!(
            principal_log(c(0.0, 0.0)),
            Err(PolylogError::Domain(_))
        ));
    }

    #[test]
    fn membership_examples() {
        assert!(in_domain(c(0.5, 0.0), DomainId::Strip));
        assert!(!in_domain(c(2.0, 0.0), DomainId::CutPlaneD));
        assert!(!in_domain(c(2.0, 0.1), DomainId::Strip));
        assert!(in_domain(c(2.0, 0.1), DomainId::CutPlaneD));
        assert!(!in_domain(c(0.0, 0.3), DomainId::Strip));
        assert!(!in_domain(c(1.0, 0.3), DomainId::HalfPlanePlus));
        assert!(!in_domain(c(-0.5, 0.0), DomainId::CutPlaneDPrime));
        assert!(!in_domain(c(f64::NAN, 0.0), DomainId::CutPlaneD));
    }

    #[test]
    fn log_power_examples() {
        assert_eq!(log_power_term(c(1.0, 0.0), 3).unwrap(), c(0.0, 0.0));
        let t = log_power_term(c(E, 0.0), 1).unwrap();
        assert!((t.re + 1.0).abs() < 1e-15);
        let t = log_power_term(c(E, 0.0), 2).unwrap();
        assert!((t.re - 0.5).abs() < 1e-15);
        assert!(log_power_term(c(-2.0, 0.0), 2).is_err());
        assert!(log_power_term(c(0.0, 0.0), 1).is_err());
    }

    #[test]
    fn large_log_power_uses_running_product() {
        let z = c(E, 0.0);
        let t = log_power_term(z, 25).unwrap();
        let expect = -1.0 / factorial::<f64>(25);
        assert!(((t.re - expect) / expect).abs() < 1e-13);
    }

    #[test]
    fn log1p_small_arguments() {
        let z = c(1e-12, 3e-13);
        let l = log1p_unchecked(z);
        assert!((l.re - 1e-12).abs() < 1e-24);
        assert!((l.im - 3e-13).abs() < 1e-24);
    }
}
