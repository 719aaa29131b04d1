//! The level-by-level reconstruction `Li_1 -> Li_2 -> ... -> Li_kmax`.
//!
//! In pure-recursive mode the only inputs are `Li_1 = -log(1 - z)` and the
//! zeta values. Level `k` needs the previous level on both contour lines and
//! at arbitrary points; the latter comes from chains of running integrals
//! along a path, and the former from running integrals along the lines.

use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{log_power_from_log, require_domain, DomainId};
use crate::error::{PolylogError, Result};
use crate::quadrature::{rule, PanelPath};
use crate::scalar::{lit, real, CompensatedSum, Real};
use crate::specialfn::{
    li, li1_unchecked, li21n, li_all, li_all_along_polyline, SeriesConfig, ZetaTable,
    LI_PATH_TOL, PANEL_ORDER,
};

use super::contour::{ContourSpec, LineGrid};
use super::handle::FunctionHandle;
use super::split::{
    check_lines, fix_c_minus_with, identify_liouville, log_accurate, minus_jump_part,
    SplitCore, SplitResult, PATH_RATIO,
};

pub const DEFAULT_DEFECT_CEILING: f64 = 1e-4;
/// Real probe point where `c_minus` is fixed.
pub const DEFAULT_PROBE: f64 = 0.5;

/// Where the lower level in the jump comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpMode {
    /// `F_{k-1}` is the reconstruction of the previous level.
    PureRecursive,
    /// `F_{k-1}` is the reference `Li_{k-1}`; isolates single-level error.
    OracleJump,
}

impl JumpMode {
    pub fn name(self) -> &'static str {
        match self {
            JumpMode::PureRecursive => "pure_recursive",
            JumpMode::OracleJump => "oracle_jump",
        }
    }
}

/// `{0.15, 0.5, 0.85} x {-1, 0, 1} i`.
pub fn default_test_points<T: Real>() -> Vec<Complex<T>> {
    let xs = [0.15, 0.5, 0.85];
    let ys = [-1.0, 0.0, 1.0];
    xs.iter()
        .flat_map(|&x| ys.iter().map(move |&y| Complex::new(lit(x), lit(y))))
        .collect()
}

#[derive(Debug, Clone)]
pub struct ReconstructionConfig<T> {
    pub k_max: usize,
    pub left: ContourSpec<T>,
    pub right: ContourSpec<T>,
    pub test_points: Vec<Complex<T>>,
    pub mode: JumpMode,
    pub probe: Complex<T>,
    pub defect_ceiling: T,
    pub zeta_tail_terms: usize,
}

impl<T: Real> ReconstructionConfig<T> {
    pub fn new(k_max: usize) -> Self {
        Self {
            k_max,
            left: ContourSpec::default_left(),
            right: ContourSpec::default_right(),
            test_points: default_test_points(),
            mode: JumpMode::PureRecursive,
            probe: real(lit(DEFAULT_PROBE)),
            defect_ceiling: lit(DEFAULT_DEFECT_CEILING),
            zeta_tail_terms: 6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_max < 1 {
            return Err(PolylogError::Argument(format!(
                "k_max must be at least 1, got {}",
                self.k_max
            )));
        }
        check_lines(&self.left, &self.right)?;
        let (a, b) = (self.left.abscissa, self.right.abscissa);
        for &z in self.test_points.iter().chain(std::iter::once(&self.probe)) {
            if !(z.re > a && z.re < b) || !z.im.is_finite() {
                return Err(PolylogError::Domain(format!(
                    "point {z} outside the substrip {a} < Re z < {b}"
                )));
            }
        }
        if !(self.defect_ceiling > T::zero()) {
            return Err(PolylogError::Argument("defect ceiling must be positive".into()));
        }
        Ok(())
    }
}

/// Reconstructed value against the reference at one test point.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleError<T> {
    pub z: Complex<T>,
    pub value: Complex<T>,
    pub reference: Complex<T>,
    pub error: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelDiagnostics<T> {
    pub quadrature_error_estimate: T,
    pub tail_estimate: T,
    pub line_points: usize,
    pub mode: JumpMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionReport<T> {
    pub k: usize,
    pub c_plus: Complex<T>,
    pub c_minus: Complex<T>,
    pub sample_errors_plus: Vec<SampleError<T>>,
    pub sample_errors_minus: Vec<SampleError<T>>,
    pub liouville_defect: T,
    pub diagnostics: LevelDiagnostics<T>,
}

impl<T: Real> ReconstructionReport<T> {
    pub fn max_error_plus(&self) -> T {
        self.sample_errors_plus
            .iter()
            .map(|s| s.error)
            .fold(T::zero(), T::max)
    }

    pub fn max_error_minus(&self) -> T {
        self.sample_errors_minus
            .iter()
            .map(|s| s.error)
            .fold(T::zero(), T::max)
    }
}

/// Reports of every completed level, the reconstructed functions, and the
/// error that stopped the ladder early, if any.
#[derive(Clone)]
pub struct Reconstruction<T> {
    pub reports: Vec<ReconstructionReport<T>>,
    plus: Vec<FunctionHandle<T>>,
    minus: Vec<FunctionHandle<T>>,
    splits: Vec<SplitResult<T>>,
    pub aborted: Option<PolylogError>,
}

impl<T: Real> std::fmt::Debug for Reconstruction<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Reconstruction")
            .field("reports", &self.reports)
            .field("aborted", &self.aborted)
            .finish()
    }
}

impl<T: Real> Reconstruction<T> {
    /// `f_k^+`, holomorphic left of the right contour; level 1 is `Li_1`.
    pub fn plus(&self, k: usize) -> Option<&FunctionHandle<T>> {
        k.checked_sub(1).and_then(|i| self.plus.get(i))
    }

    /// `f_k^-` with its constant applied, holomorphic right of the left
    /// contour away from `[1, inf)`.
    pub fn minus(&self, k: usize) -> Option<&FunctionHandle<T>> {
        k.checked_sub(2).and_then(|i| self.minus.get(i))
    }

    pub fn split(&self, k: usize) -> Option<&SplitResult<T>> {
        k.checked_sub(2).and_then(|i| self.splits.get(i))
    }

    pub fn completed(&self) -> usize {
        self.reports.last().map_or(1, |r| r.k)
    }
}

struct Geometry<T> {
    left: Arc<LineGrid<T>>,
    right: Arc<LineGrid<T>>,
}

#[derive(Clone)]
struct Level<T> {
    left_vals: Vec<Complex<T>>,
    right_vals: Vec<Complex<T>>,
    c_minus: Option<Complex<T>>,
}

/// Everything needed to evaluate the levels built so far at a point.
#[derive(Clone)]
struct Ladder<T> {
    geom: Arc<Geometry<T>>,
    /// `levels[k - 2]`.
    levels: Vec<Arc<Level<T>>>,
    mode: JumpMode,
    zeta: Arc<ZetaTable<T>>,
}

impl<T: Real> Ladder<T> {
    fn level(&self, k: usize) -> &Level<T> {
        &self.levels[k - 2]
    }

    fn zeta(&self, k: usize) -> Result<T> {
        self.zeta.get(k).ok_or_else(|| {
            PolylogError::Argument(format!("zeta({k}) not in the table"))
        })
    }

    fn path(from: Complex<T>, to: Complex<T>, avoid: Complex<T>) -> Result<PanelPath<T>> {
        PanelPath::new(&[from, to], &[avoid], lit(PATH_RATIO), rule(PANEL_ORDER))
    }

    /// `h_plus` of level `k` at path nodes, given `F_{k-1}` there.
    fn h_plus_nodes(&self, k: usize, nodes: &[Complex<T>], lower: &[Complex<T>]) -> Vec<Complex<T>> {
        let grid = &self.geom.right;
        let vals = &self.level(k).right_vals;
        nodes
            .iter()
            .zip(lower)
            .map(|(&s, &f)| {
                let g = f / s - minus_jump_part(k, s);
                grid.cauchy(vals, s, Some(g))
            })
            .collect()
    }

    fn h_minus_nodes(&self, k: usize, nodes: &[Complex<T>], lower: &[Complex<T>]) -> Vec<Complex<T>> {
        let grid = &self.geom.left;
        let vals = &self.level(k).left_vals;
        nodes
            .iter()
            .zip(lower)
            .map(|(&s, &f)| {
                let g = f / s - minus_jump_part(k, s);
                -grid.cauchy(vals, s, Some(g))
            })
            .collect()
    }

    /// `[F_1(z), ..., F_upto(z)]` by running integrals of `h_plus` from 0.
    fn plus_chain(&self, upto: usize, z: Complex<T>) -> Result<Vec<Complex<T>>> {
        let zero = real::<T>(T::zero());
        if z == zero {
            return Ok(vec![zero; upto]);
        }
        let path = Self::path(zero, z, real(T::one()))?;
        let nodes = path.nodes();
        let (mut out, mut prev, first) = match self.mode {
            JumpMode::OracleJump if upto >= 2 => {
                let out = li_all(upto - 1, z)?;
                let prev: Vec<Complex<T>> = nodes
                    .iter()
                    .map(|&s| li(upto - 1, s))
                    .collect::<Result<_>>()?;
                (out, prev, upto)
            }
            _ => (
                vec![li1_unchecked(z)],
                nodes.iter().map(|&s| li1_unchecked(s)).collect(),
                2,
            ),
        };
        for j in first..=upto {
            let hp = self.h_plus_nodes(j, &nodes, &prev);
            let (vals, end) = path.cumulative(zero, &hp);
            out.push(end);
            prev = vals;
        }
        Ok(out)
    }

    /// `G_j = zeta(j) - sum_{i<j} (-1)^i log^i / i! * F_{j-i}`, from the
    /// log and `lower[i - 1] = F_i`.
    fn inversion_remainder(&self, j: usize, log_s: Complex<T>, lower: &[Complex<T>]) -> Result<Complex<T>> {
        let mut acc = CompensatedSum::new();
        acc.add(real(self.zeta(j)?));
        for i in 1..j {
            acc.add(-log_power_from_log(log_s, i) * lower[j - i - 1]);
        }
        Ok(acc.value())
    }

    /// `([F_1(z), ..., F_{upto-1}(z)], raw f_upto^-(z))`, with the raw minus
    /// function anchored to vanish at 1.
    fn minus_chain(&self, upto: usize, z: Complex<T>) -> Result<(Vec<Complex<T>>, Complex<T>)> {
        let one = real::<T>(T::one());
        let zero = real::<T>(T::zero());
        if self.mode == JumpMode::OracleJump {
            let at_z = li_all(upto - 1, z)?;
            if z == one {
                return Ok((at_z, zero));
            }
            let path = Self::path(one, z, zero)?;
            let nodes = path.nodes();
            let prev: Vec<Complex<T>> = nodes
                .iter()
                .map(|&s| li(upto - 1, s))
                .collect::<Result<_>>()?;
            let hm = self.h_minus_nodes(upto, &nodes, &prev);
            return Ok((at_z, path.integrate(&hm)));
        }
        let mut at_z = vec![li1_unchecked(z)];
        if z == one {
            // F_j(1) = zeta(j) from the anchored minus functions
            for j in 2..upto {
                at_z.push(real(self.zeta(j)?) - self.level(j).c_minus.unwrap_or(zero));
            }
            return Ok((at_z, zero));
        }
        let path = Self::path(one, z, zero)?;
        let nodes = path.nodes();
        let logs: Vec<Complex<T>> = nodes.iter().map(|&s| log_accurate(s)).collect();
        let log_z = log_accurate(z);
        // at_nodes[i][n] = F_{i+1}(s_n)
        let mut at_nodes: Vec<Vec<Complex<T>>> = vec![nodes.iter().map(|&s| li1_unchecked(s)).collect()];
        for j in 2..=upto {
            let hm = self.h_minus_nodes(j, &nodes, &at_nodes[j - 2]);
            let (raw, raw_end) = path.cumulative(zero, &hm);
            if j == upto {
                return Ok((at_z, raw_end));
            }
            let c = self.level(j).c_minus.ok_or_else(|| {
                PolylogError::Precondition(format!("c_minus of level {j} not fixed"))
            })?;
            let mut level_vals = Vec::with_capacity(nodes.len());
            let mut lower = vec![zero; j - 1];
            for n in 0..nodes.len() {
                for (i, l) in lower.iter_mut().enumerate() {
                    *l = at_nodes[i][n];
                }
                level_vals.push(self.inversion_remainder(j, logs[n], &lower)? - raw[n] - c);
            }
            at_nodes.push(level_vals);
            at_z.push(self.inversion_remainder(j, log_z, &at_z)? - raw_end - c);
        }
        Ok((at_z, zero))
    }

    /// `F_j(z)` on the strip by whichever route is further from its contour.
    fn value_at(&self, j: usize, z: Complex<T>) -> Result<Complex<T>> {
        if j == 1 {
            return Ok(li1_unchecked(z));
        }
        if self.mode == JumpMode::OracleJump {
            return li(j, z);
        }
        let mid = (self.geom.left.abscissa() + self.geom.right.abscissa()) * lit(0.5);
        if z.re < mid {
            Ok(self.plus_chain(j, z)?[j - 1])
        } else {
            let (lower, raw) = self.minus_chain(j, z)?;
            let c = self.level(j).c_minus.ok_or_else(|| {
                PolylogError::Precondition(format!("c_minus of level {j} not fixed"))
            })?;
            Ok(self.inversion_remainder(j, log_accurate(z), &lower)? - raw - c)
        }
    }
}

/// `F_{k-1}` and `g'_k` at every tracked point of a line.
struct LineState<T> {
    /// `values[j - 1][i] = F_j(t_i)`.
    values: Vec<Vec<Complex<T>>>,
}

/// Visit order along a line and `[Li_1..Li_k]` at each visited point.
type MarchRun<T> = (Vec<usize>, Vec<Vec<Complex<T>>>);

fn oracle_line<T: Real>(grid: &LineGrid<T>, k: usize) -> Result<Vec<Vec<Complex<T>>>> {
    let (up, down) = grid.march_orders();
    let c = grid.abscissa();
    let cfg = SeriesConfig::<T>::default();
    let seed = c.min(cfg.radius_switch);
    let n = grid.points.len();
    let mut values = vec![vec![real(T::zero()); n]; k];
    let runs: Vec<Result<MarchRun<T>>> = [up, down]
        .into_par_iter()
        .map(|order| {
            let mut verts = vec![real(seed)];
            verts.extend(order.iter().map(|&i| grid.points[i]));
            let vals = li_all_along_polyline(k, &verts, &cfg, lit(LI_PATH_TOL))?;
            Ok((order, vals.into_iter().skip(1).collect()))
        })
        .collect();
    for run in runs {
        let (order, vals) = run?;
        for (&i, v) in order.iter().zip(vals) {
            for (j, x) in v.into_iter().enumerate() {
                values[j][i] = x;
            }
        }
    }
    Ok(values)
}

fn jump_on_line<T: Real>(grid: &LineGrid<T>, k: usize, lower: &[Complex<T>]) -> Vec<Complex<T>> {
    grid.points
        .par_iter()
        .zip(lower.par_iter())
        .map(|(&t, &f)| f / t - minus_jump_part(k, t))
        .collect()
}

/// Reconstructs levels `2..=k_max`. Stops at the first level whose Liouville
/// defect exceeds the ceiling or whose evaluation fails, keeping the levels
/// before it.
pub fn reconstruct<T: Real>(cfg: &ReconstructionConfig<T>) -> Result<Reconstruction<T>> {
    cfg.validate()?;
    let mut out = Reconstruction {
        reports: Vec::new(),
        plus: vec![FunctionHandle::li(1)],
        minus: Vec::new(),
        splits: Vec::new(),
        aborted: None,
    };
    if cfg.k_max == 1 {
        return Ok(out);
    }
    let zeta = Arc::new(ZetaTable::new(cfg.k_max, cfg.zeta_tail_terms)?);
    let geom = Arc::new(Geometry {
        left: Arc::new(LineGrid::new(cfg.left)?),
        right: Arc::new(LineGrid::new(cfg.right)?),
    });
    let mut ladder = Ladder {
        geom: geom.clone(),
        levels: Vec::new(),
        mode: cfg.mode,
        zeta,
    };
    let (left, right) = (&geom.left, &geom.right);
    let mut state_l;
    let mut state_r;
    match cfg.mode {
        JumpMode::PureRecursive => {
            state_l = LineState {
                values: vec![left.points.par_iter().map(|&t| li1_unchecked(t)).collect()],
            };
            state_r = LineState {
                values: vec![right.points.par_iter().map(|&t| li1_unchecked(t)).collect()],
            };
        }
        JumpMode::OracleJump => {
            state_l = LineState { values: oracle_line(left, cfg.k_max - 1)? };
            state_r = LineState { values: oracle_line(right, cfg.k_max - 1)? };
        }
    }

    for k in 2..=cfg.k_max {
        match build_level(cfg, &mut ladder, k, &mut state_l, &mut state_r) {
            Ok((report, split, plus, minus)) => {
                out.reports.push(report);
                out.splits.push(split);
                out.plus.push(plus);
                out.minus.push(minus);
            }
            Err(e) => {
                out.aborted = Some(e);
                break;
            }
        }
    }
    Ok(out)
}

/// As [`reconstruct`], returning only the reports and failing on an early
/// stop.
pub fn reconstruct_all<T: Real>(cfg: &ReconstructionConfig<T>) -> Result<Vec<ReconstructionReport<T>>> {
    let r = reconstruct(cfg)?;
    match r.aborted {
        Some(e) => Err(e),
        None => Ok(r.reports),
    }
}

type LevelOutput<T> = (
    ReconstructionReport<T>,
    SplitResult<T>,
    FunctionHandle<T>,
    FunctionHandle<T>,
);

fn build_level<T: Real>(
    cfg: &ReconstructionConfig<T>,
    ladder: &mut Ladder<T>,
    k: usize,
    state_l: &mut LineState<T>,
    state_r: &mut LineState<T>,
) -> Result<LevelOutput<T>> {
    let geom = ladder.geom.clone();
    let (left, right) = (&geom.left, &geom.right);
    let jump_l = jump_on_line(left, k, &state_l.values[k - 2]);
    let jump_r = jump_on_line(right, k, &state_r.values[k - 2]);
    ladder.levels.push(Arc::new(Level {
        left_vals: left.quad_values(&jump_l),
        right_vals: right.quad_values(&jump_r),
        c_minus: None,
    }));

    let snapshot = ladder.clone();
    let jump = FunctionHandle::new(format!("g'_{k}"), DomainId::Strip, move |z| {
        Ok(snapshot.value_at(k - 1, z)? / z - minus_jump_part(k, z))
    });
    let split = SplitResult::from_core(SplitCore {
        left: left.clone(),
        right: right.clone(),
        left_vals: ladder.level(k).left_vals.clone(),
        right_vals: ladder.level(k).right_vals.clone(),
        jump,
        decay_power: (k - 1) as u32,
    })?;

    let defect = identify_liouville(&split, k, &cfg.test_points)?;
    let ceiling = cfg.defect_ceiling;
    if !(defect <= ceiling) {
        return Err(PolylogError::Ceiling {
            k,
            defect: defect.to_f64().unwrap_or(f64::NAN),
            ceiling: ceiling.to_f64().unwrap_or(f64::NAN),
        });
    }

    let probe = cfg.probe;
    let plus_at_probe = ladder.plus_chain(k, probe)?;
    let (_, raw_at_probe) = ladder.minus_chain(k, probe)?;
    let c_minus = fix_c_minus_with(
        k,
        probe,
        plus_at_probe[k - 1],
        raw_at_probe,
        &plus_at_probe[..k - 1],
        ladder.zeta(k)?,
    )?;
    Arc::make_mut(&mut ladder.levels[k - 2]).c_minus = Some(c_minus);

    if cfg.mode == JumpMode::PureRecursive && k < cfg.k_max {
        advance_lines(ladder, k, &jump_l, &jump_r, state_l, state_r)?;
    }

    let (a, b) = (left.abscissa(), right.abscissa());
    let lp = ladder.clone();
    let plus = FunctionHandle::new(format!("f_{k}^+"), DomainId::HalfPlanePlus, move |z| {
        Ok(lp.plus_chain(k, z)?[k - 1])
    })
    .with_re_bounds(T::neg_infinity(), b);
    let lm = ladder.clone();
    let minus = FunctionHandle::new(format!("f_{k}^-"), DomainId::HalfPlaneMinus, move |z| {
        require_domain(z, DomainId::CutPlaneDPrime)?;
        require_domain(real::<T>(T::one()) - z, DomainId::CutPlaneDPrime)?;
        Ok(lm.minus_chain(k, z)?.1 + c_minus)
    })
    .with_re_bounds(a, T::infinity());

    let one = real::<T>(T::one());
    let samples: Vec<(SampleError<T>, SampleError<T>)> = cfg
        .test_points
        .par_iter()
        .map(|&z| {
            let vp = plus.eval(z)?;
            let rp = li(k, z)?;
            let vm = minus.eval(z)?;
            let rm = li21n(k, one - z)?;
            Ok((
                SampleError { z, value: vp, reference: rp, error: (vp - rp).norm() },
                SampleError { z, value: vm, reference: rm, error: (vm - rm).norm() },
            ))
        })
        .collect::<Result<_>>()?;
    let (sample_errors_plus, sample_errors_minus) = samples.into_iter().unzip();

    let report = ReconstructionReport {
        k,
        c_plus: real(T::zero()),
        c_minus,
        sample_errors_plus,
        sample_errors_minus,
        liouville_defect: defect,
        diagnostics: LevelDiagnostics {
            quadrature_error_estimate: split.quadrature_error_estimate,
            tail_estimate: split.tail_estimate,
            line_points: left.points.len() + right.points.len(),
            mode: cfg.mode,
        },
    };
    Ok((report, split, plus, minus))
}

/// `F_k` at every tracked point of both lines: on the left line from the
/// plus chain at `a` and a running integral of `h_plus`; on the right line
/// through the inversion relation from the minus function.
fn advance_lines<T: Real>(
    ladder: &Ladder<T>,
    k: usize,
    jump_l: &[Complex<T>],
    jump_r: &[Complex<T>],
    state_l: &mut LineState<T>,
    state_r: &mut LineState<T>,
) -> Result<()> {
    let geom = ladder.geom.clone();
    let (left, right) = (&geom.left, &geom.right);
    let level = ladder.level(k);
    let c_minus = level.c_minus.expect("fixed before advancing");
    let a = real::<T>(left.abscissa());
    let b = real::<T>(right.abscissa());

    let fa = ladder.plus_chain(k, a)?[k - 1];
    let phi_l: Vec<Complex<T>> = left
        .interior_range()
        .into_par_iter()
        .map(|i| {
            let t = left.points[i];
            right.cauchy(&level.right_vals, t, Some(jump_l[i])) * left.dtdu[i]
        })
        .collect();
    state_l.values.push(left.running_integral(fa, &phi_l));

    let (_, raw_b) = ladder.minus_chain(k, b)?;
    let phi_r: Vec<Complex<T>> = right
        .interior_range()
        .into_par_iter()
        .map(|i| {
            let t = right.points[i];
            -left.cauchy(&level.left_vals, t, Some(jump_r[i])) * right.dtdu[i]
        })
        .collect();
    let f_minus = right.running_integral(raw_b + c_minus, &phi_r);
    let lower = &state_r.values;
    let fk: Vec<Complex<T>> = (0..right.points.len())
        .into_par_iter()
        .map(|i| {
            let lower_i: Vec<Complex<T>> = lower.iter().map(|v| v[i]).collect();
            let g = ladder.inversion_remainder(k, log_accurate(right.points[i]), &lower_i)?;
            Ok(g - f_minus[i])
        })
        .collect::<Result<_>>()?;
    state_r.values.push(fk);
    Ok(())
}
