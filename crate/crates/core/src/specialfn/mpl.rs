use num_complex::Complex;

use crate::domain::{factorial, log1p_unchecked, log_unchecked, require_domain, DomainId};
use crate::error::{PolylogError, Result};
use crate::quadrature::{adaptive_segment, rule};
use crate::scalar::{cplx, lit, real, CompensatedSum, Real};

use super::path::{PathSpec, PANEL_ORDER};

/// Absolute tolerance used by [`li21n`].
pub const LI21N_TOL: f64 = 1e-13;
/// Below this distance from `t = 1` the integral switches to `u = -log(1 - t)`.
const NEAR_ONE: f64 = 0.1;

/// `Li_{2,1,...,1}(w)` with `k - 2` ones: the integral from 0 to `w` of
/// `(-1)^(k-1) / (k-1)! * log^(k-1)(1 - t) / t` along a path in `D`.
pub fn li21n<T: Real>(k: usize, w: Complex<T>) -> Result<Complex<T>> {
    li21n_with_tol(k, w, lit(LI21N_TOL))
}

pub fn li21n_with_tol<T: Real>(k: usize, w: Complex<T>, tol: T) -> Result<Complex<T>> {
    if k < 2 {
        return Err(PolylogError::Argument(format!(
            "Li_{{2,1,...,1}} needs weight k >= 2, got {k}"
        )));
    }
    require_domain(w, DomainId::CutPlaneD)?;
    if w.norm() == T::zero() {
        return Ok(real(T::zero()));
    }
    let sign = if (k - 1).is_multiple_of(2) { T::one() } else { -T::one() };
    let coef = sign / factorial::<T>(k - 1);
    let p = (k - 1) as u32;
    let gl = rule::<T>(PANEL_ORDER);

    let integrand = |t: Complex<T>| -> Result<Complex<T>> {
        Ok(log1p_unchecked(-t).powu(p) / t * coef)
    };

    let one = real(T::one());
    let gap = (one - w).norm();
    let near = lit::<T>(NEAR_ONE);
    let mut total = CompensatedSum::new();

    if gap < near {
        // straight to the circle |t - 1| = 0.1 on the ray towards w, then in u
        let dir = (one - w) / gap;
        let t0 = one - dir * near;
        let (head, _) = adaptive_segment(&integrand, real(T::zero()), t0, tol, &gl)?;
        total.add(head);
        let u0 = -log_unchecked(one - t0);
        let u1 = -log_unchecked(one - w);
        // dt = e^{-u} du, log(1 - t) = -u, t = 1 - e^{-u}
        let in_u = |u: Complex<T>| -> Result<Complex<T>> {
            let e = (-u).exp();
            let t = one - e;
            Ok((-u).powu(p) * e / t * coef)
        };
        let (tail, _) = adaptive_segment(&in_u, u0, u1, tol, &gl)?;
        total.add(tail);
        return Ok(total.value());
    }

    let path = li21n_path(w);
    for seg in path.waypoints.windows(2) {
        let (v, _) = adaptive_segment(&integrand, seg[0], seg[1], tol, &gl)?;
        total.add(v);
    }
    Ok(total.value())
}

/// Path from 0 to `w` in `D`: straight when it keeps clear of `t = 1`,
/// otherwise through `+-i|w|`.
pub(crate) fn li21n_path<T: Real>(w: Complex<T>) -> PathSpec<T> {
    let zero = real(T::zero());
    let one = real(T::one());
    let straight = PathSpec {
        waypoints: vec![zero, w],
        nodes_per_segment: PANEL_ORDER,
    };
    let d_straight = straight.distance_to(one);
    if d_straight * lit(2.0) >= (one - w).norm() {
        return straight;
    }
    let sign = if w.im < T::zero() { -T::one() } else { T::one() };
    let detour = PathSpec {
        waypoints: vec![zero, cplx(T::zero(), sign * w.norm()), w],
        nodes_per_segment: PANEL_ORDER,
    };
    if detour.validate(DomainId::CutPlaneD).is_ok() && detour.distance_to(one) > d_straight {
        detour
    } else {
        straight
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_is_empty_integral() {
        for k in 2..6 {
            assert_eq!(li21n(k, Complex::new(0.0, 0.0)).unwrap(), real(0.0));
        }
    }

    #[test]
    fn weight_two_is_the_dilogarithm() {
        // Li_2 itself when there are no trailing ones
        let v = li21n(2, Complex::new(0.5_f64, 0.0)).unwrap();
        assert!((v.re - 0.582_240_526_465_012_5).abs() < 1e-14);
    }

    #[test]
    fn rejects_cut_and_low_weight() {
        assert!(li21n(2, Complex::new(1.5, 0.0)).is_err());
        assert!(li21n(1, Complex::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn detour_clears_the_branch_point() {
        let p = li21n_path(Complex::new(3.0, -0.01));
        assert_eq!(p.waypoints.len(), 3);
        assert!(p.validate(DomainId::CutPlaneD).is_ok());
    }
}
