//! Splitting a jump across the strip into its two half-plane parts, and the
//! steps that turn the plus part into a polylogarithm.

use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;

use crate::domain::{log1p_unchecked, log_power_from_log, log_unchecked, require_domain, DomainId};
use crate::error::{PolylogError, Result};
use crate::quadrature::{rule, PanelPath};
use crate::scalar::{lit, real, CompensatedSum, Real};
use crate::specialfn::{li_all, li_derivative, PANEL_ORDER};

use super::contour::{ContourSpec, LineGrid};
use super::handle::FunctionHandle;

/// Panels of running integrals are kept below this fraction of their
/// distance to the nearest singular point.
pub(crate) const PATH_RATIO: f64 = 0.4;
/// Safety factor applied to the quadrature estimate in the scalar budget.
const BUDGET_SAFETY: f64 = 10.0;

/// Principal `log t`, accurate near `t = 1`.
pub(crate) fn log_accurate<T: Real>(t: Complex<T>) -> Complex<T> {
    let d = t - real(T::one());
    if d.norm() < lit(0.5) {
        log1p_unchecked(d)
    } else {
        log_unchecked(t)
    }
}

/// `(-1)^{k-1} log^{k-1}(t) / ((k - 1)! (1 - t))`, the minus-side part of the
/// jump: `g'_k(t) = Li_{k-1}(t) / t - minus_jump_part(k, t)`.
pub fn minus_jump_part<T: Real>(k: usize, t: Complex<T>) -> Complex<T> {
    let one = real::<T>(T::one());
    if t == one {
        return if k == 2 { one } else { real(T::zero()) };
    }
    log_power_from_log(log_accurate(t), k - 1) / (one - t)
}

/// `g'_k(z) = F_{k-1}(z) / z - (-1)^{k-1} log^{k-1}(z) / ((k-1)! (1 - z))`
/// on the strip, where `prior[j - 1]` is the level-`j` plus function.
pub fn jump_derivative<T: Real>(
    k: usize,
    prior: &[FunctionHandle<T>],
) -> Result<FunctionHandle<T>> {
    if k < 2 {
        return Err(PolylogError::Argument(format!(
            "jump derivative needs k >= 2, got {k}"
        )));
    }
    if prior.len() < k - 1 {
        return Err(PolylogError::Precondition(format!(
            "level {k} needs {} lower plus functions, got {}",
            k - 1,
            prior.len()
        )));
    }
    let lower = prior[k - 2].clone();
    Ok(FunctionHandle::new(
        format!("g'_{k}"),
        DomainId::Strip,
        move |z| Ok(lower.eval(z)? / z - minus_jump_part(k, z)),
    ))
}

/// Options of [`plemelj_split`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitOptions<T> {
    /// The jump is assumed to decay like `log^p|t| / |t|` along the lines.
    pub decay_power: u32,
    /// Fail with an accuracy error when the budget exceeds this.
    pub tolerance: Option<T>,
}

impl<T> Default for SplitOptions<T> {
    fn default() -> Self {
        Self {
            decay_power: 0,
            tolerance: None,
        }
    }
}

pub(crate) struct SplitCore<T> {
    pub left: Arc<LineGrid<T>>,
    pub right: Arc<LineGrid<T>>,
    pub left_vals: Vec<Complex<T>>,
    pub right_vals: Vec<Complex<T>>,
    pub jump: FunctionHandle<T>,
    pub decay_power: u32,
}

impl<T: Real> SplitCore<T> {
    fn jump_if(&self, grid: &LineGrid<T>, z: Complex<T>) -> Result<Option<Complex<T>>> {
        if grid.needs_subtraction(z) && self.jump.accepts(z) {
            self.jump.eval(z).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn h_plus(&self, z: Complex<T>) -> Result<Complex<T>> {
        let fz = self.jump_if(&self.right, z)?;
        Ok(self.right.cauchy(&self.right_vals, z, fz))
    }

    pub fn h_minus(&self, z: Complex<T>) -> Result<Complex<T>> {
        let fz = self.jump_if(&self.left, z)?;
        Ok(-self.left.cauchy(&self.left_vals, z, fz))
    }

    /// Quadrature and truncation estimates of `h_plus + h_minus` at `z`.
    fn estimates(&self, z: Complex<T>) -> Result<(T, T)> {
        let fz = if self.jump.accepts(z) {
            Some(self.jump.eval(z)?)
        } else {
            None
        };
        let p = self.decay_power;
        let (_, e1, t1) = self.right.cauchy_with_error(&self.right_vals, z, fz, p);
        let (_, e2, t2) = self.left.cauchy_with_error(&self.left_vals, z, fz, p);
        Ok((e1 + e2, t1 + t2))
    }
}

/// The two half-plane parts of a jump `h = h_plus + h_minus` on the strip
/// between the contour lines.
#[derive(Clone)]
pub struct SplitResult<T> {
    /// Holomorphic for `Re z < b`.
    pub h_plus: FunctionHandle<T>,
    /// Holomorphic for `Re z > a`.
    pub h_minus: FunctionHandle<T>,
    pub quadrature_error_estimate: T,
    pub tail_estimate: T,
    pub(crate) core: Arc<SplitCore<T>>,
}

impl<T: Real> std::fmt::Debug for SplitResult<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SplitResult")
            .field("substrip", &self.substrip())
            .field("quadrature_error_estimate", &self.quadrature_error_estimate)
            .field("tail_estimate", &self.tail_estimate)
            .finish()
    }
}

impl<T: Real> SplitResult<T> {
    pub(crate) fn from_core(core: SplitCore<T>) -> Result<Self> {
        let core = Arc::new(core);
        let (a, b) = (core.left.abscissa(), core.right.abscissa());
        let probes = budget_probes(a, b);
        let per_probe: Vec<(T, T)> = probes
            .par_iter()
            .map(|&z| core.estimates(z))
            .collect::<Result<_>>()?;
        let floor = T::epsilon() * lit(64.0);
        let quad = per_probe.iter().map(|e| e.0).fold(T::zero(), T::max);
        let tail = per_probe.iter().map(|e| e.1).fold(T::zero(), T::max);
        let cp = core.clone();
        let h_plus = FunctionHandle::new("h_plus", DomainId::HalfPlanePlus, move |z| cp.h_plus(z))
            .with_re_bounds(T::neg_infinity(), b);
        let cm = core.clone();
        let h_minus =
            FunctionHandle::new("h_minus", DomainId::HalfPlaneMinus, move |z| cm.h_minus(z))
                .with_re_bounds(a, T::infinity());
        Ok(Self {
            h_plus,
            h_minus,
            quadrature_error_estimate: quad * lit(BUDGET_SAFETY) + floor,
            tail_estimate: tail,
            core,
        })
    }

    /// Real parts `(a, b)` of the two contour lines.
    pub fn substrip(&self) -> (T, T) {
        (self.core.left.abscissa(), self.core.right.abscissa())
    }

    pub fn jump(&self) -> &FunctionHandle<T> {
        &self.core.jump
    }

    /// Combined bound used to accept a split.
    pub fn error_budget(&self) -> T {
        self.quadrature_error_estimate + self.tail_estimate
    }
}

/// Probe set for the scalar error budget: three abscissae across the
/// substrip at a few heights.
fn budget_probes<T: Real>(a: T, b: T) -> Vec<Complex<T>> {
    let inset = lit::<T>(0.05).min((b - a) * lit(0.25));
    let xs = [a + inset, (a + b) * lit(0.5), b - inset];
    let ys = [0.0, 0.5, -0.5, 2.0, -2.0];
    xs.iter()
        .flat_map(|&x| ys.iter().map(move |&y| Complex::new(x, lit(y))))
        .collect()
}

pub(crate) fn check_lines<T: Real>(left: &ContourSpec<T>, right: &ContourSpec<T>) -> Result<()> {
    left.validate()?;
    right.validate()?;
    if !(left.abscissa < right.abscissa) {
        return Err(PolylogError::Contour(format!(
            "contour abscissas must satisfy a < b (a = {}, b = {})",
            left.abscissa, right.abscissa
        )));
    }
    Ok(())
}

fn sample_line<T: Real>(
    h: &FunctionHandle<T>,
    grid: &LineGrid<T>,
) -> Result<Vec<Complex<T>>> {
    grid.quad_points().par_iter().map(|&t| h.eval(t)).collect()
}

/// Splits `h`, holomorphic on the strip with the declared decay along
/// vertical lines, as `h = h_plus + h_minus` with `h_plus` holomorphic left
/// of the right line and `h_minus` right of the left line.
pub fn plemelj_split<T: Real>(
    h: &FunctionHandle<T>,
    left: &ContourSpec<T>,
    right: &ContourSpec<T>,
    opts: SplitOptions<T>,
) -> Result<SplitResult<T>> {
    check_lines(left, right)?;
    let lg = Arc::new(LineGrid::new(*left)?);
    let rg = Arc::new(LineGrid::new(*right)?);
    let left_vals = sample_line(h, &lg)?;
    let right_vals = sample_line(h, &rg)?;
    let split = SplitResult::from_core(SplitCore {
        left: lg,
        right: rg,
        left_vals,
        right_vals,
        jump: h.clone(),
        decay_power: opts.decay_power,
    })?;
    if let Some(tol) = opts.tolerance {
        let budget = split.error_budget();
        if !(budget <= tol) {
            return Err(PolylogError::Accuracy(format!(
                "split error budget {budget:e} exceeds tolerance {tol:e}"
            )));
        }
    }
    Ok(split)
}

/// `max |h_plus(z) - d/dz Li_k(z)|` over test points in the substrip.
pub fn identify_liouville<T: Real>(
    split: &SplitResult<T>,
    k: usize,
    test_points: &[Complex<T>],
) -> Result<T> {
    let (a, b) = split.substrip();
    let errs: Vec<T> = test_points
        .par_iter()
        .map(|&z| {
            if !(z.re > a && z.re < b) {
                return Err(PolylogError::Domain(format!(
                    "test point {z} outside the substrip {a} < Re z < {b}"
                )));
            }
            Ok((split.h_plus.eval(z)? - li_derivative(k, z)?).norm())
        })
        .collect::<Result<_>>()?;
    Ok(errs.into_iter().fold(T::zero(), T::max))
}

/// An antiderivative and the additive constant that was applied to it.
#[derive(Debug, Clone)]
pub struct Antiderivative<T> {
    pub handle: FunctionHandle<T>,
    pub constant: Complex<T>,
}

/// Path-integrates `h_plus` from 0, where the result is normalised to vanish.
pub(crate) fn integrate_from<T, F>(
    origin: Complex<T>,
    z: Complex<T>,
    avoid: Complex<T>,
    f: F,
) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(Complex<T>) -> Result<Complex<T>> + Sync,
{
    if z == origin {
        return Ok(real(T::zero()));
    }
    let path = PanelPath::new(&[origin, z], &[avoid], lit(PATH_RATIO), rule(PANEL_ORDER))?;
    let vals: Vec<Complex<T>> = path.nodes().into_iter().map(&f).collect::<Result<_>>()?;
    Ok(path.integrate(&vals))
}

/// `f_k^+(z) = int_0^z h_plus(s) ds` on the substrip, normalised so that
/// `f_k^+(0) = 0`; the returned constant is that normalisation.
pub fn antiderivative_plus<T: Real>(split: &SplitResult<T>, k: usize) -> Result<Antiderivative<T>> {
    let (a, b) = split.substrip();
    let core = split.core.clone();
    let zero = real::<T>(T::zero());
    let one = real::<T>(T::one());
    // the raw antiderivative vanishes at its own anchor
    let constant = -integrate_from(zero, zero, one, |s| core.h_plus(s))?;
    let handle = FunctionHandle::new(format!("f_{k}^+"), DomainId::Strip, move |z| {
        Ok(integrate_from(zero, z, one, |s| core.h_plus(s))? + constant)
    })
    .with_re_bounds(a, b);
    Ok(Antiderivative { handle, constant })
}

/// `c_minus` from the inversion relation at the probe, with the plus value
/// `f_plus`, the un-normalised minus value `f_minus_raw` and the lower-level
/// values `lower[j - 1] = F_j(probe)` for `j < k`.
pub fn fix_c_minus_with<T: Real>(
    k: usize,
    probe: Complex<T>,
    f_plus: Complex<T>,
    f_minus_raw: Complex<T>,
    lower: &[Complex<T>],
    zeta_k: T,
) -> Result<Complex<T>> {
    require_domain(probe, DomainId::Strip)?;
    if lower.len() < k - 1 {
        return Err(PolylogError::Precondition(format!(
            "c_minus at level {k} needs {} lower values",
            k - 1
        )));
    }
    let log_p = log_accurate(probe);
    let mut acc = CompensatedSum::new();
    acc.add(real(zeta_k));
    acc.add(-f_plus);
    acc.add(-f_minus_raw);
    for j in 1..k {
        acc.add(-log_power_from_log(log_p, j) * lower[k - j - 1]);
    }
    Ok(acc.value())
}

/// `c_minus` using `Li_j` for the lower levels.
pub fn fix_c_minus<T: Real>(
    k: usize,
    f_plus: &FunctionHandle<T>,
    f_minus_raw: &FunctionHandle<T>,
    zeta_k: T,
    probe: Complex<T>,
) -> Result<Complex<T>> {
    if k < 2 {
        return Err(PolylogError::Argument(format!("c_minus needs k >= 2, got {k}")));
    }
    let lower = li_all(k - 1, probe)?;
    fix_c_minus_with(
        k,
        probe,
        f_plus.eval(probe)?,
        f_minus_raw.eval(probe)?,
        &lower,
        zeta_k,
    )
}

/// Splits the zero jump and returns the largest `|h_plus| + |h_minus|` over
/// the test points; exactly representable data must give exactly zero.
pub fn zero_jump_check<T: Real>(
    left: &ContourSpec<T>,
    right: &ContourSpec<T>,
    test_points: &[Complex<T>],
) -> Result<T> {
    let zero = FunctionHandle::zero(DomainId::Strip);
    let split = plemelj_split(&zero, left, right, SplitOptions::default())?;
    let mut worst = T::zero();
    for &z in test_points {
        let v = split.h_plus.eval(z)?.norm() + split.h_minus.eval(z)?.norm();
        worst = worst.max(v);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfn::li;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn lines() -> (ContourSpec<f64>, ContourSpec<f64>) {
        (ContourSpec::default_left(), ContourSpec::default_right())
    }

    #[test]
    fn minus_part_limits() {
        assert_eq!(minus_jump_part(2, c(1.0, 0.0)), c(1.0, 0.0));
        assert_eq!(minus_jump_part(3, c(1.0, 0.0)), c(0.0, 0.0));
        let near = minus_jump_part(2, c(1.0 + 1e-9, 0.0));
        assert!((near - 1.0).norm() < 1e-8);
    }

    #[test]
    fn rational_jump_splits_exactly() {
        // plus part from the pole right of the strip, minus part from the left
        let h = FunctionHandle::new("rational", DomainId::Strip, |z: Complex<f64>| {
            Ok(1.0 / (z - 2.0) + 1.0 / (z + 1.0))
        });
        let (l, r) = lines();
        let s = plemelj_split(&h, &l, &r, SplitOptions { decay_power: 0, tolerance: Some(1e-9) })
            .unwrap();
        for &z in &[c(0.5, 0.0), c(0.3, 1.5), c(0.7, -2.0)] {
            let hp = s.h_plus.eval(z).unwrap();
            let hm = s.h_minus.eval(z).unwrap();
            assert!((hp - 1.0 / (z - 2.0)).norm() < 1e-11);
            assert!((hm - 1.0 / (z + 1.0)).norm() < 1e-11);
        }
        assert!(s.error_budget() < 1e-9, "{s:?}");
    }

    #[test]
    fn zero_jump_is_zero() {
        let (l, r) = lines();
        let v = zero_jump_check(&l, &r, &[c(0.5, 0.0), c(0.2, 3.0)]).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn crossed_lines_rejected() {
        let (l, r) = lines();
        let h = FunctionHandle::zero(DomainId::Strip);
        assert!(matches!(
            plemelj_split(&h, &r, &l, SplitOptions::default()),
            Err(PolylogError::Contour(_))
        ));
    }

    #[test]
    fn oracle_jump_recovers_dilog_derivative() {
        let prior = [FunctionHandle::li(1)];
        let g = jump_derivative(2, &prior).unwrap();
        let (l, r) = lines();
        let s = plemelj_split(&g, &l, &r, SplitOptions { decay_power: 1, tolerance: None })
            .unwrap();
        let d = identify_liouville(&s, 2, &[c(0.5, 0.0), c(0.3, 1.0), c(0.8, -1.0)]).unwrap();
        assert!(d < 1e-8, "defect {d}");
        let anti = antiderivative_plus(&s, 2).unwrap();
        assert_eq!(anti.constant, c(0.0, 0.0));
        let z = c(0.5, 0.5);
        let err = (anti.handle.eval(z).unwrap() - li(2, z).unwrap()).norm();
        assert!(err < 1e-8, "err {err}");
    }

    #[test]
    fn c_minus_from_exact_parts_vanishes() {
        // with exact Li_k and the exact reflected function, c_minus = 0
        let k = 3;
        let z = c(0.5, 0.0);
        let fp = FunctionHandle::li(k);
        let fm = FunctionHandle::li21n_reflected(k);
        let zk = crate::specialfn::zeta_value::<f64>(k, 6).unwrap();
        let cm = fix_c_minus(k, &fp, &fm, zk, z).unwrap();
        assert!(cm.norm() < 1e-12, "{cm}");
    }
}
