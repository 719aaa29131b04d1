//! Vertical contour lines `Re t = c` under the map `t = c + i sinh(u)` and the
//! Cauchy integrals over them.

use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{PolylogError, Result};
use crate::quadrature::{rule, GaussLegendre};
use crate::scalar::{cplx, from_usize, lit, real, CompensatedSum, Real};

/// Discretisation of the mapped line integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuadratureRule {
    /// Trapezoid rule in `u`, exponentially convergent for the mapped
    /// integrands.
    TrapezoidMapped,
    /// Composite Gauss-Legendre panels in `u`; cross-check rule.
    GaussLegendrePanels,
}

impl QuadratureRule {
    pub fn name(self) -> &'static str {
        match self {
            QuadratureRule::TrapezoidMapped => "trapezoid_mapped",
            QuadratureRule::GaussLegendrePanels => "gauss_legendre_panels",
        }
    }
}

/// A vertical contour `Re t = abscissa`, truncated to `|u| <= u_max` in the
/// sinh-mapped coordinate and cut into `nodes` equal panels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec<T> {
    pub abscissa: T,
    pub u_max: T,
    /// Number of equal `u`-panels; the trapezoid rule uses their `nodes + 1`
    /// end points. Must be a multiple of 4 so the halved and quartered rules
    /// used for error estimates exist.
    pub nodes: usize,
    pub rule: QuadratureRule,
}

impl<T: Real> ContourSpec<T> {
    pub fn new(abscissa: T) -> Self {
        Self {
            abscissa,
            u_max: lit(30.0),
            nodes: 2048,
            rule: QuadratureRule::TrapezoidMapped,
        }
    }

    pub fn default_left() -> Self {
        Self::new(lit(0.1))
    }

    pub fn default_right() -> Self {
        Self::new(lit(0.9))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abscissa > T::zero() && self.abscissa < T::one()) {
            return Err(PolylogError::Contour(format!(
                "contour abscissa {} must lie in (0, 1)",
                self.abscissa
            )));
        }
        if !(self.u_max >= lit(10.0)) || !self.u_max.is_finite() {
            return Err(PolylogError::Contour(format!(
                "u_max = {} must be at least 10",
                self.u_max
            )));
        }
        if self.nodes < 64 || !self.nodes.is_multiple_of(4) {
            return Err(PolylogError::Contour(format!(
                "nodes = {} must be a multiple of 4 and at least 64",
                self.nodes
            )));
        }
        Ok(())
    }
}

/// Gauss-Legendre points per `u`-panel used for running integrals along a
/// line.
pub(crate) const INTERIOR_POINTS: usize = 6;
/// Pole subtraction kicks in when the target's image in the `u`-plane is
/// closer than this to the real axis.
const SUBTRACT_BELOW: f64 = 0.75;

/// Tracked points of one line: the panel end points `0..=M` followed by
/// `INTERIOR_POINTS` Gauss points in each panel.
#[derive(Debug)]
pub struct LineGrid<T> {
    pub spec: ContourSpec<T>,
    step: T,
    pub points: Vec<Complex<T>>,
    /// `dt/du = i cosh(u)` at each tracked point.
    pub dtdu: Vec<Complex<T>>,
    /// Tracked indices of the quadrature nodes.
    pub quad_index: Vec<usize>,
    quad_t: Vec<Complex<T>>,
    /// `w cosh(u) / (2 pi)` for the full, halved and quartered rules.
    w_full: Vec<T>,
    w_half: Vec<T>,
    w_quarter: Vec<T>,
    gl: Arc<GaussLegendre<T>>,
}

impl<T: Real> LineGrid<T> {
    pub fn new(spec: ContourSpec<T>) -> Result<Self> {
        spec.validate()?;
        let m = spec.nodes;
        let c = spec.abscissa;
        let step = lit::<T>(2.0) * spec.u_max / from_usize(m);
        let gl = rule::<T>(INTERIOR_POINTS);
        let u_end = |i: usize| -spec.u_max + step * from_usize::<T>(i);
        let mut us: Vec<T> = (0..=m).map(u_end).collect();
        // exact zero at the middle end point
        us[m / 2] = T::zero();
        let half = lit::<T>(0.5);
        for p in 0..m {
            let lo = us[p];
            for &x in &gl.nodes {
                us.push(lo + step * half * (x + T::one()));
            }
        }
        let points = us.iter().map(|&u| cplx(c, u.sinh())).collect();
        let dtdu = us.iter().map(|&u| cplx(T::zero(), u.cosh())).collect();
        let two_pi = T::PI() * lit(2.0);

        let (quad_index, w_full, w_half, w_quarter): (Vec<usize>, Vec<T>, Vec<T>, Vec<T>) =
            match spec.rule {
                QuadratureRule::TrapezoidMapped => {
                    let idx: Vec<usize> = (0..=m).collect();
                    let trap = |stride: usize| -> Vec<T> {
                        idx.iter()
                            .map(|&i| {
                                if i % stride != 0 {
                                    T::zero()
                                } else if i == 0 || i == m {
                                    step * from_usize::<T>(stride) * half
                                } else {
                                    step * from_usize::<T>(stride)
                                }
                            })
                            .collect()
                    };
                    let (f, h, q) = (trap(1), trap(2), trap(4));
                    (idx, f, h, q)
                }
                QuadratureRule::GaussLegendrePanels => {
                    // interior Gauss points carry the rule; end points carry
                    // the trapezoid comparison
                    let mut idx: Vec<usize> = (m + 1..m + 1 + m * INTERIOR_POINTS).collect();
                    let mut f: Vec<T> = (0..m)
                        .flat_map(|_| gl.weights.iter().map(|&w| w * step * half))
                        .collect();
                    let mut h = vec![T::zero(); f.len()];
                    let mut q = vec![T::zero(); f.len()];
                    for i in 0..=m {
                        idx.push(i);
                        f.push(T::zero());
                        let end = if i == 0 || i == m { half } else { T::one() };
                        h.push(step * end);
                        q.push(if i % 2 == 0 {
                            step * lit::<T>(2.0) * end
                        } else {
                            T::zero()
                        });
                    }
                    (idx, f, h, q)
                }
            };
        let scale = |w: Vec<T>| -> Vec<T> {
            w.iter()
                .zip(&quad_index)
                .map(|(&w, &i)| w * us[i].cosh() / two_pi)
                .collect()
        };
        let quad_t = quad_index.iter().map(|&i| cplx(c, us[i].sinh())).collect();
        Ok(Self {
            spec,
            step,
            points,
            dtdu,
            w_full: scale(w_full),
            w_half: scale(w_half),
            w_quarter: scale(w_quarter),
            quad_index,
            quad_t,
            gl,
        })
    }

    pub fn abscissa(&self) -> T {
        self.spec.abscissa
    }

    pub fn panel_count(&self) -> usize {
        self.spec.nodes
    }

    /// Tracked indices of the interior points of every panel, panel-major.
    pub fn interior_range(&self) -> std::ops::Range<usize> {
        let m = self.spec.nodes;
        m + 1..m + 1 + m * INTERIOR_POINTS
    }

    /// Tracked indices ordered by increasing `u` from `u = 0` upwards, and by
    /// decreasing `u` from `u = 0` downwards. Both start at the middle end
    /// point.
    pub fn march_orders(&self) -> (Vec<usize>, Vec<usize>) {
        let m = self.spec.nodes;
        let mid = m / 2;
        let interior = |p: usize, q: usize| m + 1 + p * INTERIOR_POINTS + q;
        let mut up = vec![mid];
        for p in mid..m {
            up.extend((0..INTERIOR_POINTS).map(|q| interior(p, q)));
            up.push(p + 1);
        }
        let mut down = vec![mid];
        for p in (0..mid).rev() {
            down.extend((0..INTERIOR_POINTS).rev().map(|q| interior(p, q)));
            down.push(p);
        }
        (up, down)
    }

    /// Picks out quadrature-node values from values at all tracked points.
    pub fn quad_values(&self, tracked: &[Complex<T>]) -> Vec<Complex<T>> {
        self.quad_index.iter().map(|&i| tracked[i]).collect()
    }

    pub fn quad_points(&self) -> &[Complex<T>] {
        &self.quad_t
    }

    /// Distance of the kernel pole at `z` from the real `u` axis.
    pub fn pole_depth(&self, z: Complex<T>) -> T {
        let w = cplx(z.im, self.spec.abscissa - z.re);
        // asinh is odd; evaluating it on the right half-plane avoids the
        // cancellation in log(w + sqrt(w^2 + 1)) for large negative Re w
        let w = if w.re < T::zero() { -w } else { w };
        w.asinh().im.abs()
    }

    pub fn needs_subtraction(&self, z: Complex<T>) -> bool {
        self.pole_depth(z) < lit(SUBTRACT_BELOW)
    }

    /// `(1 / 2 pi i) int_{Re t = c, upward} f(t) / (t - z) dt` from values of
    /// `f` at the quadrature nodes. `fz = f(z)` enables pole subtraction.
    pub fn cauchy(&self, vals: &[Complex<T>], z: Complex<T>, fz: Option<Complex<T>>) -> Complex<T> {
        let sub = fz.filter(|_| self.needs_subtraction(z)).map(|f| (f, self.companion(z)));
        let mut acc = CompensatedSum::new();
        for ((&t, &w), &f) in self.quad_t.iter().zip(&self.w_full).zip(vals) {
            if w == T::zero() {
                continue;
            }
            acc.add(self.term(t, f, z, sub) * w);
        }
        acc.value()
    }

    /// As [`cauchy`](Self::cauchy) with an error estimate from the coarser
    /// rules and a truncation estimate for `|u| > u_max`, assuming the data
    /// decays like `log^p|t| / |t|`.
    pub fn cauchy_with_error(
        &self,
        vals: &[Complex<T>],
        z: Complex<T>,
        fz: Option<Complex<T>>,
        decay_power: u32,
    ) -> (Complex<T>, T, T) {
        let sub = fz.filter(|_| self.needs_subtraction(z)).map(|f| (f, self.companion(z)));
        let mut full = CompensatedSum::new();
        let mut half = CompensatedSum::new();
        let mut quarter = CompensatedSum::new();
        let mut mag = T::zero();
        for (i, (&t, &f)) in self.quad_t.iter().zip(vals).enumerate() {
            let term = self.term(t, f, z, sub);
            let (wf, wh, wq) = (self.w_full[i], self.w_half[i], self.w_quarter[i]);
            if wf != T::zero() {
                full.add(term * wf);
                mag = mag + term.norm() * wf;
            }
            if wh != T::zero() {
                half.add(term * wh);
            }
            if wq != T::zero() {
                quarter.add(term * wq);
            }
        }
        let (f, h, q) = (full.value(), half.value(), quarter.value());
        let d1 = (f - h).norm();
        let d2 = (f - q).norm();
        let floor = T::epsilon() * lit(16.0) * mag;
        let est = match self.spec.rule {
            QuadratureRule::TrapezoidMapped => bailey_estimate(d1, d2),
            QuadratureRule::GaussLegendrePanels => d1,
        }
        .max(floor);

        // tail beyond u_max: integrand ~ u^p e^{-u}
        let u = self.spec.u_max;
        let p = from_usize::<T>(decay_power as usize);
        let growth = if u > p + T::one() { u / (u - p) } else { u };
        let two_pi = T::PI() * lit(2.0);
        let first = self.quad_first_last();
        let mut tail = (vals[first.0].norm() + vals[first.1].norm()) * growth / two_pi;
        if let Some((fz, w)) = sub {
            tail = tail + fz.norm() * (z - w).norm() * lit(2.0) / (u.sinh() * two_pi);
        }
        (f, est, tail)
    }

    fn quad_first_last(&self) -> (usize, usize) {
        // end points 0 and M are always among the quadrature entries
        let m = self.spec.nodes;
        let a = self.quad_index.iter().position(|&i| i == 0).unwrap_or(0);
        let b = self
            .quad_index
            .iter()
            .position(|&i| i == m)
            .unwrap_or(self.quad_index.len() - 1);
        (a, b)
    }

    /// Auxiliary pole `w` on the same side of the line as `z`, far from the
    /// real `u` axis.
    fn companion(&self, z: Complex<T>) -> Complex<T> {
        let side = if z.re >= self.spec.abscissa {
            T::one()
        } else {
            -T::one()
        };
        z + real(side * (T::one() + z.im.abs()))
    }

    #[inline]
    fn term(
        &self,
        t: Complex<T>,
        f: Complex<T>,
        z: Complex<T>,
        sub: Option<(Complex<T>, Complex<T>)>,
    ) -> Complex<T> {
        match sub {
            None => f / (t - z),
            Some((fz, w)) => {
                // [f(t) - f(z) (z - w) / (t - w)] / (t - z); the companion
                // term integrates to zero
                (f - fz * (z - w) / (t - w)) / (t - z)
            }
        }
    }

    /// Running integral along the line from `u = 0`, where it equals
    /// `start`. `integrand` holds `phi(u) = f(t(u)) dt/du` at the interior
    /// points; returns values at every tracked point.
    pub fn running_integral(&self, start: Complex<T>, integrand: &[Complex<T>]) -> Vec<Complex<T>> {
        let m = self.spec.nodes;
        let k = INTERIOR_POINTS;
        debug_assert_eq!(integrand.len(), m * k);
        let hw = self.step * lit(0.5);
        let panel_total: Vec<Complex<T>> = integrand
            .chunks(k)
            .map(|vals| {
                let s: CompensatedSum<T> =
                    self.gl.weights.iter().zip(vals).map(|(&w, &v)| v * w).collect();
                s.value() * hw
            })
            .collect();
        let mut ends = vec![real(T::zero()); m + 1];
        let mid = m / 2;
        ends[mid] = start;
        for p in mid..m {
            ends[p + 1] = ends[p] + panel_total[p];
        }
        for p in (0..mid).rev() {
            ends[p] = ends[p + 1] - panel_total[p];
        }
        let mut out = ends.clone();
        for (p, vals) in integrand.chunks(k).enumerate() {
            for row in &self.gl.cumulative {
                let s: CompensatedSum<T> = row.iter().zip(vals).map(|(&c, &v)| v * c).collect();
                out.push(ends[p] + s.value() * hw);
            }
        }
        out
    }
}

/// Error of the finest of three trapezoid sums with halving step sizes,
/// using the quadratic convergence of exponentially accurate rules:
/// `log e = (log d1)^2 / log d2`, never below `d1^2`.
fn bailey_estimate<T: Real>(d1: T, d2: T) -> T {
    if d1 == T::zero() {
        return T::zero();
    }
    if !(d2 > d1) || d2 >= T::one() {
        return d1;
    }
    let l1 = d1.ln();
    let l2 = d2.ln();
    let e = (l1 * l1 / l2).exp();
    e.max(d1 * d1).min(d1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn spec_validation() {
        assert!(ContourSpec::<f64>::default_left().validate().is_ok());
        let mut s = ContourSpec::<f64>::default_left();
        s.abscissa = 1.2;
        assert!(s.validate().is_err());
        s = ContourSpec::default_left();
        s.nodes = 66;
        assert!(s.validate().is_err());
        s = ContourSpec::default_left();
        s.u_max = 5.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn cauchy_of_a_pole_reproduces_residue_side() {
        // f = 1/(t - 2) is analytic left of the line: Cauchy integral gives f(z)
        let grid = LineGrid::new(ContourSpec::<f64>::default_right()).unwrap();
        let vals: Vec<_> = grid.quad_points().iter().map(|t| 1.0 / (t - 2.0)).collect();
        for &z in &[c(0.5, 0.0), c(0.85, 0.3), c(0.2, -3.0), c(0.6, 40.0)] {
            let fz = 1.0 / (z - 2.0);
            let v = grid.cauchy(&vals, z, Some(fz));
            assert!((v - fz).norm() < 1e-12, "z = {z}, err = {}", (v - fz).norm());
        }
        // a point right of the line sees nothing: pole at 2 is enclosed on the right
        let z = c(1.5, 0.0);
        let v = grid.cauchy(&vals, z, Some(1.0 / (z - 2.0)));
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn error_estimate_bounds_actual_error() {
        let grid = LineGrid::new(ContourSpec::<f64>::default_right()).unwrap();
        let vals: Vec<_> = grid.quad_points().iter().map(|t| 1.0 / (t - 2.0)).collect();
        let z = c(0.5, 0.2);
        let fz = 1.0 / (z - 2.0);
        let (v, est, tail) = grid.cauchy_with_error(&vals, z, Some(fz), 0);
        assert!((v - fz).norm() <= est + tail + 1e-15);
    }

    #[test]
    fn gauss_panel_rule_agrees() {
        let mut spec = ContourSpec::<f64>::default_right();
        spec.rule = QuadratureRule::GaussLegendrePanels;
        let grid = LineGrid::new(spec).unwrap();
        let vals: Vec<_> = grid.quad_points().iter().map(|t| 1.0 / (t - 2.0)).collect();
        let z = c(0.4, 0.7);
        let v = grid.cauchy(&vals, z, Some(1.0 / (z - 2.0)));
        assert!((v - 1.0 / (z - 2.0)).norm() < 1e-12);
    }

    #[test]
    fn running_integral_of_derivative() {
        // d/du sinh(u) = cosh(u): integrate i cosh(u) = dt/du to recover t - c
        let grid = LineGrid::new(ContourSpec::<f64>::default_left()).unwrap();
        let phi: Vec<_> = grid.interior_range().map(|i| grid.dtdu[i]).collect();
        let run = grid.running_integral(c(0.1, 0.0), &phi);
        for (i, (&t, &v)) in grid.points.iter().zip(&run).enumerate() {
            let rel = (t - v).norm() / t.norm().max(1.0);
            assert!(rel < 1e-13, "index {i}: {t} vs {v}");
        }
    }

    #[test]
    fn pole_depth_is_symmetric_at_large_heights() {
        let grid = LineGrid::new(ContourSpec::<f64>::default_right()).unwrap();
        for y in [1e3, 1e8, 1e12] {
            let up = grid.pole_depth(c(0.1, y));
            let down = grid.pole_depth(c(0.1, -y));
            assert!(up.is_finite() && (up - down).abs() <= 1e-12 * up.max(1e-300));
            assert!((up - 0.8 / y).abs() < 1e-6 * up);
        }
    }

    #[test]
    fn march_orders_are_monotone() {
        let grid = LineGrid::new(ContourSpec::<f64>::default_left()).unwrap();
        let (up, down) = grid.march_orders();
        assert_eq!(up.len() + down.len() - 1, grid.points.len());
        assert!(up.windows(2).all(|w| grid.points[w[0]].im < grid.points[w[1]].im));
        assert!(down.windows(2).all(|w| grid.points[w[0]].im > grid.points[w[1]].im));
    }

    #[test]
    fn bailey_is_conservative_when_not_converging() {
        assert_eq!(bailey_estimate(1e-3, 1e-4), 1e-3);
        let e = bailey_estimate(1e-5, 1e-2_f64);
        assert!((e - 1e-10).abs() < 1e-12);
    }
}
