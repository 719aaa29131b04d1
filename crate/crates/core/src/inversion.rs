//! Evaluation of the inversion relation
//! `Li_k(z) + sum_{j=1}^{k-1} (-1)^j log^j(z) / j! * Li_{k-j}(z) + Li_{2,1,...,1}(1 - z) = zeta(k)`
//! term by term, with residuals against `zeta(k)`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::domain::{log_power_from_log, log_unchecked, require_domain, DomainId};
use crate::error::{PolylogError, Result};
use crate::scalar::{cplx, from_usize, lit, real, CompensatedSum, Real};
use crate::specialfn::{li21n, li_all, zeta, ZetaTable};

/// One evaluation of the left-hand side at `(k, z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InversionResidual<T> {
    pub k: usize,
    pub z: Complex<T>,
    pub lhs: Complex<T>,
    /// `lhs - zeta(k)`, kept complex so branch slips stay visible.
    pub residual: Complex<T>,
    /// `[Li_k, L_1 Li_{k-1}, ..., L_{k-1} Li_1, Li_{2,1,...,1}(1 - z)]`.
    pub terms: Vec<Complex<T>>,
}

/// Evaluates the inversion relation at `z`, which must avoid both cuts.
pub fn inversion_lhs<T: Real>(k: usize, z: Complex<T>) -> Result<InversionResidual<T>> {
    inversion_lhs_with(k, z, &ZetaTable::default())
}

pub fn inversion_lhs_with<T: Real>(
    k: usize,
    z: Complex<T>,
    table: &ZetaTable<T>,
) -> Result<InversionResidual<T>> {
    if k < 2 {
        return Err(PolylogError::Argument(format!(
            "inversion relation needs k >= 2, got {k}"
        )));
    }
    require_domain(z, DomainId::CutPlaneD)?;
    require_domain(z, DomainId::CutPlaneDPrime)?;
    let lis = li_all(k, z)?;
    let log_z = log_unchecked(z);
    let mut terms = Vec::with_capacity(k + 1);
    terms.push(lis[k - 1]);
    for j in 1..k {
        terms.push(log_power_from_log(log_z, j) * lis[k - j - 1]);
    }
    terms.push(li21n(k, real::<T>(T::one()) - z)?);
    let lhs = terms.iter().copied().collect::<CompensatedSum<T>>().value();
    let residual = lhs - real(zeta(k, table)?);
    Ok(InversionResidual {
        k,
        z,
        lhs,
        residual,
        terms,
    })
}

/// Outcome at one grid point; failures are carried, not raised.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOutcome<T> {
    pub k: usize,
    pub z: Complex<T>,
    pub result: Result<InversionResidual<T>>,
}

/// Residuals for every `k in 2..=k_max` and grid point, ordered k-major then
/// by grid position. Points outside the strip yield a domain error entry.
pub fn residual_grid<T: Real>(k_max: usize, grid: &[Complex<T>]) -> Vec<GridOutcome<T>> {
    let table = ZetaTable::new(k_max.max(2), 6).expect("zeta table");
    let jobs: Vec<(usize, Complex<T>)> = (2..=k_max)
        .flat_map(|k| grid.iter().map(move |&z| (k, z)))
        .collect();
    jobs.par_iter()
        .map(|&(k, z)| GridOutcome {
            k,
            z,
            result: require_domain(z, DomainId::Strip)
                .and_then(|_| inversion_lhs_with(k, z, &table)),
        })
        .collect()
}

/// Inclusive range `min, min + step, ..., max` (rounded to the nearest count).
pub fn linspace_step<T: Real>(min: T, max: T, step: T) -> Result<Vec<T>> {
    if !(step > T::zero()) || max < min || !min.is_finite() || !max.is_finite() {
        return Err(PolylogError::Precondition(
            "range needs min <= max and a positive step".into(),
        ));
    }
    let n = ((max - min) / step + lit(1e-9)).floor().to_usize().unwrap_or(0) + 1;
    if n > 1_000_000 {
        return Err(PolylogError::Precondition("range has too many points".into()));
    }
    Ok((0..n).map(|i| min + step * from_usize::<T>(i)).collect())
}

/// Tensor grid, real part outer, imaginary part inner.
pub fn tensor_grid<T: Real>(re: &[T], im: &[T]) -> Vec<Complex<T>> {
    re.iter()
        .flat_map(|&x| im.iter().map(move |&y| cplx(x, y)))
        .collect()
}

/// The 45-point strip grid `{0.1, 0.3, ..., 0.9} x {-2, -1.5, ..., 2} i`.
pub fn default_grid<T: Real>() -> Vec<Complex<T>> {
    let re = linspace_step(lit(0.1), lit(0.9), lit(0.2)).expect("static range");
    let im = linspace_step(lit(-2.0), lit(2.0), lit(0.5)).expect("static range");
    tensor_grid(&re, &im)
}
