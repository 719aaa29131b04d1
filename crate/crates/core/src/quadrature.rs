//! Gauss-Legendre rules, spectral integration matrices and composite panel
//! paths in the complex plane.

use std::any::{Any, TypeId};
use std::sync::{Arc, OnceLock};

use num_complex::Complex;

use crate::error::{PolylogError, Result};
use crate::scalar::{from_usize, lit, real, CompensatedSum, Real};

/// An `n`-point Gauss-Legendre rule on `[-1, 1]` together with its indefinite
/// integration matrix.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
    /// `cumulative[m][n] = int_{-1}^{x_m} l_n(x) dx` for the Lagrange basis `l_n`.
    pub cumulative: Vec<Vec<T>>,
}

/// Legendre polynomials `P_0..=P_n` at `x`.
fn legendre_all<T: Real>(n: usize, x: T) -> Vec<T> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(T::one());
    if n == 0 {
        return p;
    }
    p.push(x);
    for j in 1..n {
        let jj = from_usize::<T>(j);
        let next = ((jj + jj + T::one()) * x * p[j] - jj * p[j - 1]) / (jj + T::one());
        p.push(next);
    }
    p
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let two = lit::<T>(2.0);
        let nn = from_usize::<T>(n);
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        for i in 0..n {
            let guess = T::PI() * (from_usize::<T>(i) + lit(0.75)) / (nn + lit(0.5));
            let mut x = guess.cos();
            let mut dp = T::one();
            for _ in 0..100 {
                let p = legendre_all(n, x);
                dp = nn * (x * p[n] - p[n - 1]) / (x * x - T::one());
                let dx = p[n] / dp;
                x = x - dx;
                if dx.abs() <= T::epsilon() * lit(4.0) {
                    let p = legendre_all(n, x);
                    dp = nn * (x * p[n] - p[n - 1]) / (x * x - T::one());
                    break;
                }
            }
            // ascending order
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = two / ((T::one() - x * x) * dp * dp);
        }

        let half = lit::<T>(0.5);
        let basis: Vec<Vec<T>> = nodes.iter().map(|&x| legendre_all(n, x)).collect();
        let cumulative = nodes
            .iter()
            .map(|&xm| {
                let pm = legendre_all(n, xm);
                // Q_j(x) = int_{-1}^x P_j
                let q: Vec<T> = (0..n)
                    .map(|j| {
                        if j == 0 {
                            xm + T::one()
                        } else {
                            (pm[j + 1] - pm[j - 1]) / from_usize::<T>(2 * j + 1)
                        }
                    })
                    .collect();
                (0..n)
                    .map(|col| {
                        let s = (0..n).fold(T::zero(), |acc, j| {
                            acc + (from_usize::<T>(j) + half) * basis[col][j] * q[j]
                        });
                        weights[col] * s
                    })
                    .collect()
            })
            .collect();
        Self {
            nodes,
            weights,
            cumulative,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

type RuleCache = std::sync::Mutex<Vec<(TypeId, usize, Arc<dyn Any + Send + Sync>)>>;

/// Builds a rule in working precision, memoised per scalar type and size.
pub fn rule<T: Real>(n: usize) -> Arc<GaussLegendre<T>> {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().expect("rule cache poisoned");
    let id = TypeId::of::<T>();
    if let Some((_, _, r)) = guard.iter().find(|(t, m, _)| *t == id && *m == n) {
        if let Ok(r) = r.clone().downcast::<GaussLegendre<T>>() {
            return r;
        }
    }
    let r = Arc::new(GaussLegendre::<T>::new(n));
    guard.push((id, n, r.clone()));
    r
}

/// Straight panel `[start, end]` with the rule's nodes mapped onto it.
#[derive(Debug, Clone)]
pub struct Panel<T> {
    pub start: Complex<T>,
    pub end: Complex<T>,
    pub nodes: Vec<Complex<T>>,
}

impl<T: Real> Panel<T> {
    fn new(start: Complex<T>, end: Complex<T>, rule: &GaussLegendre<T>) -> Self {
        let half = lit::<T>(0.5);
        let mid = (start + end) * half;
        let hw = (end - start) * half;
        let nodes = rule.nodes.iter().map(|&x| mid + hw * x).collect();
        Self { start, end, nodes }
    }

    pub fn half_width(&self) -> Complex<T> {
        (self.end - self.start) * lit::<T>(0.5)
    }
}

/// Distance from `p` to the segment `[a, b]`.
pub fn segment_distance<T: Real>(a: Complex<T>, b: Complex<T>, p: Complex<T>) -> T {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == T::zero() {
        return (p - a).norm();
    }
    let s = ((p - a) * d.conj()).re / len2;
    let s = s.max(T::zero()).min(T::one());
    (a + d * s - p).norm()
}

/// Composite Gauss-Legendre discretisation of a polyline. Panels are sized so
/// that each is shorter than `ratio` times its distance to the nearest
/// singular point, which keeps the rule spectrally accurate for integrands
/// analytic away from those points.
#[derive(Debug, Clone)]
pub struct PanelPath<T> {
    pub panels: Vec<Panel<T>>,
    rule: Arc<GaussLegendre<T>>,
}

const MAX_SPLIT_DEPTH: usize = 64;

impl<T: Real> PanelPath<T> {
    pub fn new(
        waypoints: &[Complex<T>],
        singular: &[Complex<T>],
        ratio: T,
        rule: Arc<GaussLegendre<T>>,
    ) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(PolylogError::Path("a path needs at least two waypoints".into()));
        }
        let mut panels = Vec::new();
        for w in waypoints.windows(2) {
            if w[0] == w[1] {
                return Err(PolylogError::Path("consecutive waypoints coincide".into()));
            }
            split_segment(w[0], w[1], singular, ratio, &rule, 0, &mut panels)?;
        }
        Ok(Self { panels, rule })
    }

    pub fn rule(&self) -> &GaussLegendre<T> {
        &self.rule
    }

    pub fn start(&self) -> Complex<T> {
        self.panels[0].start
    }

    pub fn end(&self) -> Complex<T> {
        self.panels[self.panels.len() - 1].end
    }

    /// All quadrature nodes, panel by panel.
    pub fn nodes(&self) -> Vec<Complex<T>> {
        self.panels.iter().flat_map(|p| p.nodes.iter().copied()).collect()
    }

    pub fn node_count(&self) -> usize {
        self.panels.len() * self.rule.len()
    }

    /// Given integrand values at every node (in `nodes()` order), returns the
    /// running integral from the path start at every node and at the end.
    pub fn cumulative(
        &self,
        start_value: Complex<T>,
        integrand: &[Complex<T>],
    ) -> (Vec<Complex<T>>, Complex<T>) {
        let m = self.rule.len();
        debug_assert_eq!(integrand.len(), self.node_count());
        let mut out = Vec::with_capacity(integrand.len());
        let mut acc = start_value;
        for (panel, vals) in self.panels.iter().zip(integrand.chunks(m)) {
            let hw = panel.half_width();
            for row in &self.rule.cumulative {
                let s: CompensatedSum<T> = row.iter().zip(vals).map(|(&c, &v)| v * c).collect();
                out.push(acc + s.value() * hw);
            }
            let s: CompensatedSum<T> = self
                .rule
                .weights
                .iter()
                .zip(vals)
                .map(|(&w, &v)| v * w)
                .collect();
            acc = acc + s.value() * hw;
        }
        (out, acc)
    }

    /// Definite integral over the whole path.
    pub fn integrate(&self, integrand: &[Complex<T>]) -> Complex<T> {
        let m = self.rule.len();
        let mut acc = CompensatedSum::new();
        for (panel, vals) in self.panels.iter().zip(integrand.chunks(m)) {
            let hw = panel.half_width();
            for (&w, &v) in self.rule.weights.iter().zip(vals) {
                acc.add(v * hw * w);
            }
        }
        acc.value()
    }
}

fn split_segment<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    singular: &[Complex<T>],
    ratio: T,
    rule: &Arc<GaussLegendre<T>>,
    depth: usize,
    out: &mut Vec<Panel<T>>,
) -> Result<()> {
    let len = (b - a).norm();
    let dist = singular
        .iter()
        .map(|&s| segment_distance(a, b, s))
        .fold(T::infinity(), T::min);
    if len <= ratio * dist {
        out.push(Panel::new(a, b, rule));
        return Ok(());
    }
    if depth >= MAX_SPLIT_DEPTH {
        return Err(PolylogError::Path(
            "path passes through a singular point".into(),
        ));
    }
    let mid = (a + b) * lit::<T>(0.5);
    split_segment(a, mid, singular, ratio, rule, depth + 1, out)?;
    split_segment(mid, b, singular, ratio, rule, depth + 1, out)
}

/// Adaptive Gauss-Legendre quadrature of `f` over the segment `[a, b]`.
/// Panels are bisected until the whole-versus-halves difference falls below
/// the share of `tol` proportional to their length. Returns the integral and
/// the accumulated error estimate.
pub fn adaptive_segment<T, F>(
    f: &F,
    a: Complex<T>,
    b: Complex<T>,
    tol: T,
    rule: &GaussLegendre<T>,
) -> Result<(Complex<T>, T)>
where
    T: Real,
    F: Fn(Complex<T>) -> Result<Complex<T>>,
{
    let total = (b - a).norm();
    if total == T::zero() {
        return Ok((real(T::zero()), T::zero()));
    }
    let whole = gl_panel(f, a, b, rule)?;
    let mut sum = CompensatedSum::new();
    let mut err = T::zero();
    adaptive_rec(f, a, b, whole, tol, total, rule, 0, &mut sum, &mut err)?;
    Ok((sum.value(), err))
}

fn gl_panel<T, F>(f: &F, a: Complex<T>, b: Complex<T>, rule: &GaussLegendre<T>) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(Complex<T>) -> Result<Complex<T>>,
{
    let half = lit::<T>(0.5);
    let mid = (a + b) * half;
    let hw = (b - a) * half;
    let mut acc = CompensatedSum::new();
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        acc.add(f(mid + hw * x)? * w);
    }
    Ok(acc.value() * hw)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_rec<T, F>(
    f: &F,
    a: Complex<T>,
    b: Complex<T>,
    whole: Complex<T>,
    tol: T,
    total: T,
    rule: &GaussLegendre<T>,
    depth: usize,
    sum: &mut CompensatedSum<T>,
    err: &mut T,
) -> Result<()>
where
    T: Real,
    F: Fn(Complex<T>) -> Result<Complex<T>>,
{
    let mid = (a + b) * lit::<T>(0.5);
    let left = gl_panel(f, a, mid, rule)?;
    let right = gl_panel(f, mid, b, rule)?;
    let diff = (left + right - whole).norm();
    let share = tol * (b - a).norm() / total;
    let floor = T::epsilon() * lit(16.0) * (left.norm() + right.norm());
    if diff <= share.max(floor) {
        sum.add(left);
        sum.add(right);
        *err = *err + diff;
        return Ok(());
    }
    if depth >= MAX_SPLIT_DEPTH / 2 {
        return Err(PolylogError::Budget(format!(
            "adaptive quadrature did not converge (panel difference {:e})",
            diff.to_f64().unwrap_or(f64::NAN)
        )));
    }
    adaptive_rec(f, a, mid, left, tol, total, rule, depth + 1, sum, err)?;
    adaptive_rec(f, mid, b, right, tol, total, rule, depth + 1, sum, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let r = GaussLegendre::<f64>::new(15);
        // degree 29 is the last exact one
        let s: f64 = r.nodes.iter().zip(&r.weights).map(|(&x, &w)| w * x.powi(28)).sum();
        assert!((s - 2.0 / 29.0).abs() < 1e-15);
        let wsum: f64 = r.weights.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn integration_matrix_is_exact_for_low_degree() {
        let r = GaussLegendre::<f64>::new(8);
        // int_{-1}^{x} 3 s^2 ds = x^3 + 1
        for (m, &x) in r.nodes.iter().enumerate() {
            let s: f64 = r.cumulative[m]
                .iter()
                .zip(&r.nodes)
                .map(|(&c, &xn)| c * 3.0 * xn * xn)
                .sum();
            assert!((s - (x * x * x + 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn cached_rule_matches_generic() {
        let a = rule::<f64>(15);
        assert!(Arc::ptr_eq(&a, &rule::<f64>(15)));
        let b = GaussLegendre::<f64>::new(15);
        assert_eq!(a.nodes, b.nodes);
        let c = rule::<f32>(7);
        assert_eq!(c.len(), 7);
    }

    #[test]
    fn panel_path_cumulative_of_exponential() {
        let r = rule::<f64>(15);
        let z0 = Complex::new(0.0, 0.0);
        let z1 = Complex::new(2.0, 1.5);
        let path = PanelPath::new(&[z0, z1], &[Complex::new(3.0, 3.0)], 0.5, r).unwrap();
        let nodes = path.nodes();
        let vals: Vec<_> = nodes.iter().map(|z| z.exp()).collect();
        let (cum, end) = path.cumulative(Complex::new(1.0, 0.0), &vals);
        for (z, v) in nodes.iter().zip(&cum) {
            assert!((z.exp() - v).norm() < 1e-13);
        }
        assert!((end - z1.exp()).norm() < 1e-13);
    }

    #[test]
    fn panels_shrink_near_singular_points() {
        let r = rule::<f64>(5);
        let path = PanelPath::new(
            &[Complex::new(0.5, 0.0), Complex::new(1000.0, 0.0)],
            &[Complex::new(0.0, 0.0)],
            0.5,
            r,
        )
        .unwrap();
        let first = (path.panels[0].end - path.panels[0].start).norm();
        let last = path.panels.last().map(|p| (p.end - p.start).norm()).unwrap();
        assert!(first < last);
        assert!(PanelPath::new(
            &[Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)],
            &[Complex::new(0.0, 0.0)],
            0.5,
            rule::<f64>(5)
        )
        .is_err());
    }

    #[test]
    fn adaptive_handles_log_endpoint() {
        let r = rule::<f64>(15);
        let f = |z: Complex<f64>| Ok(z.ln());
        let (v, _) = adaptive_segment(&f, Complex::new(1e-9, 0.0), Complex::new(1.0, 0.0), 1e-12, &r)
            .unwrap();
        // int x ln x from eps..1 -> x ln x - x
        let eps = 1e-9f64;
        let exact = -1.0 - (eps * eps.ln() - eps);
        assert!((v.re - exact).abs() < 1e-11);
    }
}
