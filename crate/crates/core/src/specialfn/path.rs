use num_complex::Complex;

use crate::domain::{in_domain, log1p_unchecked, DomainId};
use crate::error::{PolylogError, Result};
use crate::quadrature::{rule, segment_distance, GaussLegendre, PanelPath};
use crate::scalar::{cplx, lit, real, Real};

use super::series::{li_series, SeriesConfig};

/// Default Gauss-Legendre order for path panels.
pub const PANEL_ORDER: usize = 15;
/// Panels are no longer than this fraction of their distance to `{0, 1}`.
pub(crate) const PANEL_RATIO: f64 = 0.4;

/// Polyline along which an iterated integral is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec<T> {
    pub waypoints: Vec<Complex<T>>,
    pub nodes_per_segment: usize,
}

impl<T: Real> PathSpec<T> {
    /// Checks that consecutive waypoints differ and that no segment touches
    /// the cut of `domain` (only `D` and `D'` carry cuts).
    pub fn validate(&self, domain: DomainId) -> Result<()> {
        if self.waypoints.len() < 2 {
            return Err(PolylogError::Path("path needs at least two waypoints".into()));
        }
        if self.nodes_per_segment == 0 {
            return Err(PolylogError::Path("nodes_per_segment must be positive".into()));
        }
        for w in self.waypoints.windows(2) {
            if w[0] == w[1] {
                return Err(PolylogError::Path("consecutive waypoints coincide".into()));
            }
            if !segment_in_domain(w[0], w[1], domain) {
                return Err(PolylogError::Path(format!(
                    "segment {}{:+}i -> {}{:+}i leaves {}",
                    w[0].re,
                    w[0].im,
                    w[1].re,
                    w[1].im,
                    domain.name()
                )));
            }
        }
        Ok(())
    }

    pub fn start(&self) -> Complex<T> {
        self.waypoints[0]
    }

    pub fn end(&self) -> Complex<T> {
        self.waypoints[self.waypoints.len() - 1]
    }

    /// Smallest distance from the polyline to `p`.
    pub fn distance_to(&self, p: Complex<T>) -> T {
        self.waypoints
            .windows(2)
            .map(|w| segment_distance(w[0], w[1], p))
            .fold(T::infinity(), T::min)
    }
}

/// Exact test of whether the closed segment avoids the cut of `domain`.
pub(crate) fn segment_in_domain<T: Real>(a: Complex<T>, b: Complex<T>, domain: DomainId) -> bool {
    if !in_domain(a, domain) || !in_domain(b, domain) {
        return false;
    }
    let (cut_hit, on_cut): (fn(T) -> bool, bool) = match domain {
        DomainId::CutPlaneD => (|x: T| x >= T::one(), true),
        DomainId::CutPlaneDPrime => (|x: T| x <= T::zero(), true),
        _ => (|_| false, false),
    };
    if !on_cut {
        // half planes and the strip are convex
        return true;
    }
    if a.im == T::zero() && b.im == T::zero() {
        // along the real axis: the endpoints are off the cut, and the cut is a ray
        return !(cut_hit(a.re.min(b.re)) || cut_hit(a.re.max(b.re)));
    }
    if (a.im > T::zero()) == (b.im > T::zero()) && a.im != T::zero() && b.im != T::zero() {
        return true;
    }
    // crosses or touches the real axis
    let s = a.im / (a.im - b.im);
    let x = a.re + (b.re - a.re) * s;
    !cut_hit(x)
}

/// Seed on the series disk followed by a path to `z` inside `D`: the radial
/// segment, unless it grazes `z = 1`, in which case a detour through
/// `+-r i` is used.
pub fn default_path<T: Real>(z: Complex<T>, radius_switch: T) -> Result<PathSpec<T>> {
    crate::domain::require_domain(z, DomainId::CutPlaneD)?;
    let r = z.norm();
    if r <= radius_switch {
        return Err(PolylogError::Precondition(
            "default path is only needed outside the series disk".into(),
        ));
    }
    let one = real(T::one());
    let sign = if z.im < T::zero() { -T::one() } else { T::one() };
    let radial = vec![z * (radius_switch / r), z];
    let up = cplx(T::zero(), sign * radius_switch);
    let candidates = [
        radial,
        vec![up, z],
        vec![up, cplx(T::zero(), sign * r), z],
    ];
    let mut best: Option<(T, PathSpec<T>)> = None;
    for wp in candidates {
        if wp.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let spec = PathSpec {
            waypoints: wp,
            nodes_per_segment: PANEL_ORDER,
        };
        if spec.validate(DomainId::CutPlaneD).is_err() {
            continue;
        }
        let d = spec.distance_to(one);
        let better = match &best {
            None => true,
            Some((bd, _)) => d > *bd * lit(1.5),
        };
        if better {
            best = Some((d, spec));
        }
    }
    best.map(|(_, s)| s)
        .ok_or_else(|| PolylogError::Path("no admissible path inside D".into()))
}

/// `Li_1(t) = -log(1 - t)` on the principal branch, unchecked.
#[inline]
pub(crate) fn li1_unchecked<T: Real>(t: Complex<T>) -> Complex<T> {
    -log1p_unchecked(-t)
}

/// Integrates `d/dt Li_j = Li_{j-1}(t) / t` for `j = 2..=k` simultaneously
/// along `path`, starting from series values at the first waypoint. Returns
/// `[Li_1(z), ..., Li_k(z)]` at the end point.
pub fn li_along_path<T: Real>(
    k: usize,
    path: &PathSpec<T>,
    cfg: &SeriesConfig<T>,
    tol: T,
) -> Result<Vec<Complex<T>>> {
    path.validate(DomainId::CutPlaneD)?;
    let seed = path.start();
    let mut state: Vec<Complex<T>> = (2..=k)
        .map(|j| li_series(j, seed, cfg))
        .collect::<Result<_>>()?;
    let gl = rule::<T>(path.nodes_per_segment);
    let singular = [real(T::zero()), real(T::one())];
    let panels = PanelPath::new(&path.waypoints, &singular, lit(PANEL_RATIO), gl.clone())?;
    let total: T = path
        .waypoints
        .windows(2)
        .map(|w| (w[1] - w[0]).norm())
        .fold(T::zero(), |a, b| a + b);
    for panel in &panels.panels {
        state = advance_adaptive(&state, panel.start, panel.end, &gl, tol, total, 0)?;
    }
    let z = path.end();
    let mut out = Vec::with_capacity(k);
    out.push(li1_unchecked(z));
    out.extend(state);
    Ok(out)
}

/// `[Li_1, ..., Li_k]` at every vertex of a polyline whose first vertex lies
/// on the series disk, marching the coupled integration from vertex to
/// vertex. Each segment is held to `tol` on its own.
pub fn li_all_along_polyline<T: Real>(
    k: usize,
    vertices: &[Complex<T>],
    cfg: &SeriesConfig<T>,
    tol: T,
) -> Result<Vec<Vec<Complex<T>>>> {
    let Some(&seed) = vertices.first() else {
        return Ok(Vec::new());
    };
    if seed.norm() > cfg.radius_switch {
        return Err(PolylogError::Path(format!(
            "polyline must start on the series disk, got {seed}"
        )));
    }
    let mut state: Vec<Complex<T>> = (2..=k)
        .map(|j| li_series(j, seed, cfg))
        .collect::<Result<_>>()?;
    let gl = rule::<T>(PANEL_ORDER);
    let singular = [real(T::zero()), real(T::one())];
    let record = |z: Complex<T>, state: &[Complex<T>]| {
        let mut v = Vec::with_capacity(k);
        v.push(li1_unchecked(z));
        v.extend_from_slice(state);
        v
    };
    let mut out = vec![record(seed, &state)];
    for w in vertices.windows(2) {
        if !segment_in_domain(w[0], w[1], DomainId::CutPlaneD) {
            return Err(PolylogError::Path(format!(
                "segment {} -> {} leaves the cut plane",
                w[0], w[1]
            )));
        }
        if w[0] != w[1] {
            let panels = PanelPath::new(w, &singular, lit(PANEL_RATIO), gl.clone())?;
            let len = (w[1] - w[0]).norm();
            for panel in &panels.panels {
                state = advance_adaptive(&state, panel.start, panel.end, &gl, tol, len, 0)?;
            }
        }
        out.push(record(w[1], &state));
    }
    Ok(out)
}

/// One panel of the coupled iterated integration. `state[j - 2]` holds
/// `Li_j(a)`.
fn advance_panel<T: Real>(
    state: &[Complex<T>],
    a: Complex<T>,
    b: Complex<T>,
    gl: &GaussLegendre<T>,
) -> Vec<Complex<T>> {
    let half = lit::<T>(0.5);
    let mid = (a + b) * half;
    let hw = (b - a) * half;
    let nodes: Vec<Complex<T>> = gl.nodes.iter().map(|&x| mid + hw * x).collect();
    let mut lower: Vec<Complex<T>> = nodes.iter().map(|&s| li1_unchecked(s) / s).collect();
    let mut end = Vec::with_capacity(state.len());
    for &start in state {
        let e = gl
            .weights
            .iter()
            .zip(&lower)
            .fold(real(T::zero()), |acc, (&w, &v)| acc + v * w);
        end.push(start + e * hw);
        lower = gl
            .cumulative
            .iter()
            .zip(&nodes)
            .map(|(row, &s)| {
                let i = row
                    .iter()
                    .zip(&lower)
                    .fold(real(T::zero()), |acc, (&c, &v)| acc + v * c);
                (start + i * hw) / s
            })
            .collect();
    }
    end
}

fn advance_adaptive<T: Real>(
    state: &[Complex<T>],
    a: Complex<T>,
    b: Complex<T>,
    gl: &GaussLegendre<T>,
    tol: T,
    total: T,
    depth: usize,
) -> Result<Vec<Complex<T>>> {
    if state.is_empty() {
        return Ok(Vec::new());
    }
    let whole = advance_panel(state, a, b, gl);
    let mid = (a + b) * lit::<T>(0.5);
    let left = advance_panel(state, a, mid, gl);
    let halves = advance_panel(&left, mid, b, gl);
    let scale = halves
        .iter()
        .map(|v| v.norm())
        .fold(T::one(), T::max);
    let diff = whole
        .iter()
        .zip(&halves)
        .map(|(x, y)| (*x - *y).norm())
        .fold(T::zero(), T::max);
    let share = tol * (b - a).norm() / total;
    if diff <= share.max(T::epsilon() * lit(8.0) * scale) {
        return Ok(halves);
    }
    if depth >= 40 {
        return Err(PolylogError::Budget(
            "iterated path integration did not converge".into(),
        ));
    }
    let left = advance_adaptive(state, a, mid, gl, tol, total, depth + 1)?;
    advance_adaptive(&left, mid, b, gl, tol, total, depth + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn segment_domain_checks() {
        assert!(segment_in_domain(c(0.5, 1.0), c(2.0, 0.5), DomainId::CutPlaneD));
        assert!(!segment_in_domain(c(2.0, 1.0), c(2.0, -1.0), DomainId::CutPlaneD));
        assert!(segment_in_domain(c(0.5, 1.0), c(0.5, -1.0), DomainId::CutPlaneD));
        assert!(!segment_in_domain(c(-1.0, 1.0), c(-1.0, -1.0), DomainId::CutPlaneDPrime));
        assert!(segment_in_domain(c(-2.0, 0.0), c(0.9, 0.0), DomainId::CutPlaneD));
    }

    #[test]
    fn default_path_avoids_the_branch_point() {
        let p = default_path(c(2.0, 0.01), 0.5).unwrap();
        assert!(p.distance_to(c(1.0, 0.0)) > 0.3);
        assert!(p.validate(DomainId::CutPlaneD).is_ok());
        let p = default_path(c(-3.0, 0.0), 0.5).unwrap();
        assert_eq!(p.waypoints, vec![c(-0.5, 0.0), c(-3.0, 0.0)]);
        assert!(default_path(c(3.0, 0.0), 0.5).is_err());
    }

    #[test]
    fn path_spec_rejects_bad_geometry() {
        let p = PathSpec {
            waypoints: vec![c(0.5, 0.0), c(0.5, 0.0)],
            nodes_per_segment: 15,
        };
        assert!(p.validate(DomainId::CutPlaneD).is_err());
        let p = PathSpec {
            waypoints: vec![c(0.5, 0.5), c(2.0, -0.5)],
            nodes_per_segment: 15,
        };
        assert!(p.validate(DomainId::CutPlaneD).is_err());
    }
}
