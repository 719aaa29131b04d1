use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::domain::{check_finite, require_domain, DomainId};
use crate::error::{PolylogError, Result};
use crate::specialfn::{li, li21n};
use crate::scalar::{real, Real};

type Eval<T> = dyn Fn(Complex<T>) -> Result<Complex<T>> + Send + Sync;

/// A callable holomorphic function together with the open set it may be
/// evaluated on: a domain and, optionally, a range of real parts.
#[derive(Clone)]
pub struct FunctionHandle<T> {
    eval: Arc<Eval<T>>,
    pub domain: DomainId,
    pub re_bounds: Option<(T, T)>,
    pub label: String,
}

impl<T: Real> FunctionHandle<T> {
    pub fn new<F>(label: impl Into<String>, domain: DomainId, f: F) -> Self
    where
        F: Fn(Complex<T>) -> Result<Complex<T>> + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(f),
            domain,
            re_bounds: None,
            label: label.into(),
        }
    }

    /// Further restricts evaluation to `lo < Re z < hi`.
    pub fn with_re_bounds(mut self, lo: T, hi: T) -> Self {
        self.re_bounds = Some((lo, hi));
        self
    }

    pub fn accepts(&self, z: Complex<T>) -> bool {
        self.domain.contains(z)
            && self
                .re_bounds
                .is_none_or(|(lo, hi)| z.re > lo && z.re < hi)
    }

    pub fn eval(&self, z: Complex<T>) -> Result<Complex<T>> {
        check_finite(z)?;
        require_domain(z, self.domain)?;
        if let Some((lo, hi)) = self.re_bounds {
            if !(z.re > lo && z.re < hi) {
                return Err(PolylogError::Domain(format!(
                    "z = {z} outside {lo} < Re z < {hi} for {}",
                    self.label
                )));
            }
        }
        (self.eval)(z)
    }

    /// `Li_k` on `D`.
    pub fn li(k: usize) -> Self {
        Self::new(format!("Li_{k}"), DomainId::CutPlaneD, move |z| li(k, z))
    }

    /// `z -> Li_{2,1,...,1}(1 - z)` with `k - 2` trailing ones, on `D'`.
    pub fn li21n_reflected(k: usize) -> Self {
        Self::new(
            format!("Li_21..1({k}; 1 - z)"),
            DomainId::CutPlaneDPrime,
            move |z| li21n(k, real::<T>(T::one()) - z),
        )
    }

    pub fn zero(domain: DomainId) -> Self {
        Self::new("0", domain, |_| Ok(real(T::zero())))
    }
}

impl<T: fmt::Debug> fmt::Debug for FunctionHandle<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionHandle")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("re_bounds", &self.re_bounds)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_are_enforced() {
        let h = FunctionHandle::<f64>::li(2).with_re_bounds(0.1, 0.9);
        assert!(h.eval(Complex::new(0.5, 0.0)).is_ok());
        assert!(matches!(h.eval(Complex::new(0.95, 0.0)), Err(PolylogError::Domain(_))));
        assert!(matches!(h.eval(Complex::new(2.0, 0.0)), Err(PolylogError::Domain(_))));
        assert!(h.accepts(Complex::new(0.2, 5.0)));
        assert!(!h.accepts(Complex::new(0.05, 5.0)));
    }

    #[test]
    fn reflected_mpl_matches_dilog() {
        let h = FunctionHandle::<f64>::li21n_reflected(2);
        let v = h.eval(Complex::new(0.5, 0.0)).unwrap();
        assert!((v.re - 0.582_240_526_465_012_5).abs() < 1e-14);
    }
}
