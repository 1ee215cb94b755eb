//! Motion generated by the dichromatic reduced action.
//!
//! Jacobi's theorem `t − τ = ∂W/∂E` gives time as a closed-form function of
//! position, so trajectories are tabulated in x rather than integrated in t.
//! Where the dwell density `∂t/∂x` changes sign the trajectory reverses in
//! time, the velocity is infinite and the effective quantum mass is zero.

use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::qshje::conjugate_momentum;
use crate::roots::scan_sign_changes;
use crate::wave_core::{born_density, DichromaticSpec};

/// Turning-point scan cell width, in units of 1/k.
pub const TURNING_SCAN_STEP: f64 = 0.05;
/// Guaranteed bracket width of a refined turning point. Bisection actually
/// runs until the bracket holds two adjacent floats.
pub const TURNING_ROOT_TOL: f64 = 1e-12;

/// `D + 4ABkx·sin(2kx + β)`: the numerator of `∂(x/D)/∂x·D²`. Its zeros are
/// the turning points.
#[inline]
fn reversal_bracket(spec: &DichromaticSpec, x: f64) -> f64 {
    let (a, b, k) = (spec.amplitude_a, spec.amplitude_b, spec.wavenumber);
    born_density(spec, x) + 4.0 * a * b * k * x * spec.interference_phase(x).sin()
}

#[inline]
fn time_scale(spec: &DichromaticSpec) -> f64 {
    spec.mass / (spec.hbar * spec.wavenumber)
}

/// `t_d(x) = τ + m·x·(A² − B²) / (ħk·D(x))`.
pub fn jacobi_time(spec: &DichromaticSpec, x: f64) -> Result<f64> {
    spec.require_nondegenerate()?;
    let ratio = spec.amplitude_contrast() / born_density(spec, x);
    Ok(spec.tau + spec.mass * x * ratio / (spec.hbar * spec.wavenumber))
}

/// Dwell density `∂t_d/∂x`, analytic.
pub fn dwell_density(spec: &DichromaticSpec, x: f64) -> Result<f64> {
    spec.require_nondegenerate()?;
    let d = born_density(spec, x);
    let ratio = spec.amplitude_contrast() / d;
    Ok(time_scale(spec) * ratio * (reversal_bracket(spec, x) / d))
}

/// Time spent between `x1` and `x2`; negative for net retrograde motion.
pub fn dwell_time(spec: &DichromaticSpec, x1: f64, x2: f64) -> Result<f64> {
    if x1 == x2 {
        spec.require_nondegenerate()?;
        return Ok(0.0);
    }
    Ok(jacobi_time(spec, x2)? - jacobi_time(spec, x1)?)
}

/// Velocity along a trajectory. At a turning point the magnitude is
/// infinite and only the sign is kept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Velocity {
    Finite(f64),
    PosInfinity,
    NegInfinity,
}

impl Velocity {
    pub fn as_f64(self) -> f64 {
        match self {
            Velocity::Finite(v) => v,
            Velocity::PosInfinity => f64::INFINITY,
            Velocity::NegInfinity => f64::NEG_INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        !matches!(self, Velocity::Finite(_))
    }

    pub fn signum(self) -> f64 {
        match self {
            Velocity::Finite(v) => {
                if v == 0.0 {
                    0.0
                } else {
                    v.signum()
                }
            }
            Velocity::PosInfinity => 1.0,
            Velocity::NegInfinity => -1.0,
        }
    }
}

/// `ẋ_d = 1/(∂t_d/∂x)`.
///
/// The sign of an infinite velocity is that of the finite velocity just to
/// the left of the turning point.
pub fn velocity(spec: &DichromaticSpec, x: f64) -> Result<Velocity> {
    spec.require_nondegenerate()?;
    let n = reversal_bracket(spec, x);
    let contrast = spec.amplitude_contrast();
    if n == 0.0 {
        return Ok(infinite_velocity(spec, x));
    }
    let d = born_density(spec, x);
    Ok(Velocity::Finite((d / contrast) * (d / n) / time_scale(spec)))
}

fn infinite_velocity(spec: &DichromaticSpec, x: f64) -> Velocity {
    let (a, b, k) = (spec.amplitude_a, spec.amplitude_b, spec.wavenumber);
    // d/dx of the reversal bracket
    let slope = 8.0 * a * b * k * k * x * spec.interference_phase(x).cos();
    let left_sign = if slope > 0.0 { -1.0 } else { 1.0 } * spec.amplitude_contrast().signum();
    if left_sign > 0.0 {
        Velocity::PosInfinity
    } else {
        Velocity::NegInfinity
    }
}

/// Faraggi-Matone effective quantum mass
/// `m(A² − B²)²·[D + 4ABkx·sin(2kx + β)] / D³`.
///
/// For A = B the mass is zero away from the nulls and infinite on them.
pub fn effective_mass(spec: &DichromaticSpec, x: f64) -> f64 {
    let d = born_density(spec, x);
    let contrast = spec.amplitude_contrast();
    if contrast == 0.0 {
        return if d == 0.0 { f64::INFINITY } else { 0.0 };
    }
    let ratio = contrast / d;
    spec.mass * ratio * ratio * (reversal_bracket(spec, x) / d)
}

/// `sgn(v)·v²/(1 + v²)` without overflow for large |v|.
fn saturate(v: f64) -> f64 {
    if v == 0.0 || v.is_nan() {
        return 0.0;
    }
    let magnitude = if v.abs() > 1.0 {
        1.0 / (1.0 + 1.0 / (v * v))
    } else {
        v * v / (1.0 + v * v)
    };
    v.signum() * magnitude
}

/// Bounded transforms of mass and velocity:
/// `M_Q = 0.8·sgn(m_Q)·m_Q²/(1 + m_Q²)` and `Ẋ = sgn(ẋ)·ẋ²/(1 + ẋ²)`.
pub fn transformed_mass_velocity(spec: &DichromaticSpec, x: f64) -> Result<(f64, f64)> {
    let v = velocity(spec, x)?;
    let mass = 0.8 * saturate(effective_mass(spec, x));
    let xdot = match v {
        Velocity::Finite(v) => saturate(v),
        other => other.signum(),
    };
    Ok((mass, xdot))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub x: f64,
    pub t: f64,
    pub p: f64,
    pub xdot: Velocity,
    pub m_q: f64,
    pub dwell_density: f64,
}

impl TrajectoryRow {
    pub fn at(spec: &DichromaticSpec, x: f64) -> Result<Self> {
        Ok(Self {
            x,
            t: jacobi_time(spec, x)?,
            p: conjugate_momentum(spec, x),
            xdot: velocity(spec, x)?,
            m_q: effective_mass(spec, x),
            dwell_density: dwell_density(spec, x)?,
        })
    }
}

/// A trajectory tabulated on a uniform x grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    pub spec: DichromaticSpec,
    pub x_range: (f64, f64),
    pub n_points: usize,
    pub rows: Vec<TrajectoryRow>,
}

pub(crate) fn check_range(x_min: f64, x_max: f64) -> Result<()> {
    if !x_min.is_finite() || !x_max.is_finite() || x_min >= x_max {
        return Err(Error::InvalidRange(format!(
            "need finite x_min < x_max, got [{x_min}, {x_max}]"
        )));
    }
    Ok(())
}

/// `n` points from `x_min` to `x_max` inclusive, the last one exact.
pub fn uniform_grid(x_min: f64, x_max: f64, n: usize) -> Vec<f64> {
    let last = n.saturating_sub(1).max(1);
    (0..n)
        .map(|i| {
            if i == last {
                x_max
            } else {
                x_min + (x_max - x_min) * i as f64 / last as f64
            }
        })
        .collect()
}

pub fn sample_trajectory(spec: &DichromaticSpec, x_min: f64, x_max: f64, n: usize) -> Result<TrajectorySample> {
    spec.require_nondegenerate()?;
    check_range(x_min, x_max)?;
    if n < 2 {
        return Err(Error::InvalidRange(format!("need at least 2 samples, got {n}")));
    }
    let rows = uniform_grid(x_min, x_max, n)
        .into_iter()
        .map(|x| TrajectoryRow::at(spec, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrajectorySample {
        spec: *spec,
        x_range: (x_min, x_max),
        n_points: n,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TurningKind {
    /// Local maximum of t: destructive interference.
    Upper,
    /// Local minimum of t: constructive interference.
    Lower,
}

impl TurningKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TurningKind::Upper => "upper",
            TurningKind::Lower => "lower",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoint {
    pub x: f64,
    pub t: f64,
    pub kind: TurningKind,
    /// `t − t_u(x)` for upper points, `t − t_ℓ(x)` for lower ones.
    pub locus_residual: f64,
}

/// Slopes of the straight lines through the upper and lower time reversals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeSlopes {
    pub upper: f64,
    pub lower: f64,
}

impl WedgeSlopes {
    pub fn line(&self, spec: &DichromaticSpec, kind: TurningKind, x: f64) -> f64 {
        let slope = match kind {
            TurningKind::Upper => self.upper,
            TurningKind::Lower => self.lower,
        };
        spec.tau + slope * x
    }
}

/// `((A+B)/(A−B)·m/(ħk), (A−B)/(A+B)·m/(ħk))`, independent of β.
pub fn turning_loci(spec: &DichromaticSpec) -> Result<WedgeSlopes> {
    spec.require_nondegenerate()?;
    let (a, b) = (spec.amplitude_a, spec.amplitude_b);
    let scale = time_scale(spec);
    Ok(WedgeSlopes {
        upper: (a + b) / (a - b) * scale,
        lower: (a - b) / (a + b) * scale,
    })
}

/// Time reversals in `[x_min, x_max]`, in increasing x.
pub fn find_turning_points(spec: &DichromaticSpec, x_min: f64, x_max: f64) -> Result<Vec<TurningPoint>> {
    spec.require_nondegenerate()?;
    check_range(x_min, x_max)?;
    let slopes = turning_loci(spec)?;
    let density = |x: f64| dwell_density(spec, x).unwrap_or(f64::NAN);
    let step = TURNING_SCAN_STEP / spec.wavenumber;
    scan_sign_changes(density, x_min, x_max, step, 0.0)
        .into_iter()
        .map(|change| {
            let kind = if change.falling {
                TurningKind::Upper
            } else {
                TurningKind::Lower
            };
            let t = jacobi_time(spec, change.root)?;
            Ok(TurningPoint {
                x: change.root,
                t,
                kind,
                locus_residual: t - slopes.line(spec, kind, change.root),
            })
        })
        .collect()
}

/// `∂t/∂β` at fixed x. Zero exactly where `2kx + β = nπ`.
pub fn time_phase_derivative(spec: &DichromaticSpec, x: f64) -> Result<f64> {
    spec.require_nondegenerate()?;
    let d = born_density(spec, x);
    let (a, b) = (spec.amplitude_a, spec.amplitude_b);
    let ratio = spec.amplitude_contrast() / d;
    Ok(time_scale(spec) * x * ratio * 2.0 * a * b * spec.interference_phase(x).sin() / d)
}

/// A turning point of one member of a phase-shift family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CausticPoint {
    pub x: f64,
    pub t: f64,
    pub beta: f64,
    pub side: TurningKind,
    /// Envelope condition `∂t/∂β` at the point.
    pub dt_dbeta: f64,
    /// Signed distance beyond the wedge line on `side`, relative to the
    /// line height. Positive means outside the wedge.
    pub wedge_offset: f64,
}

fn wedge_offset(spec: &DichromaticSpec, slopes: &WedgeSlopes, side: TurningKind, x: f64, t: f64) -> f64 {
    let upper = slopes.line(spec, TurningKind::Upper, x);
    let lower = slopes.line(spec, TurningKind::Lower, x);
    let (edge, other) = match side {
        TurningKind::Upper => (upper, lower),
        TurningKind::Lower => (lower, upper),
    };
    let height = (edge - spec.tau).abs();
    if height == 0.0 {
        return 0.0;
    }
    (edge - other).signum() * (t - edge) / height
}

/// Turning points of every trajectory in the family `β ∈ betas`, grouped by
/// β in input order. Their locus is the numerical caustic estimate.
pub fn caustic_scan(spec_base: &DichromaticSpec, betas: &[f64], x_min: f64, x_max: f64) -> Result<Vec<CausticPoint>> {
    if betas.is_empty() {
        return Err(Error::EmptyFamily);
    }
    spec_base.require_nondegenerate()?;
    check_range(x_min, x_max)?;
    let slopes = turning_loci(spec_base)?;
    let per_beta: Vec<Vec<CausticPoint>> = betas
        .par_iter()
        .map(|&beta| {
            let spec = spec_base.with_phase_shift(beta);
            find_turning_points(&spec, x_min, x_max)?
                .into_iter()
                .map(|tp| {
                    Ok(CausticPoint {
                        x: tp.x,
                        t: tp.t,
                        beta,
                        side: tp.kind,
                        dt_dbeta: time_phase_derivative(&spec, tp.x)?,
                        wedge_offset: wedge_offset(&spec, &slopes, tp.kind, tp.x, tp.t),
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per_beta.into_iter().flatten().collect())
}

/// A point where a family member touches a wedge line (`2kx + β = nπ`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangencyPoint {
    pub x: f64,
    pub t: f64,
    pub beta: f64,
    pub order: i64,
    /// Odd orders touch the upper line, even orders the lower one.
    pub side: TurningKind,
    pub line_t: f64,
    pub dwell_density: f64,
    pub line_slope: f64,
    pub dt_dbeta: f64,
}

/// Tangencies of the family with the wedge lines inside `[x_min, x_max]`,
/// excluding the apex x = 0.
pub fn envelope_tangencies(
    spec_base: &DichromaticSpec,
    betas: &[f64],
    x_min: f64,
    x_max: f64,
) -> Result<Vec<TangencyPoint>> {
    if betas.is_empty() {
        return Err(Error::EmptyFamily);
    }
    spec_base.require_nondegenerate()?;
    check_range(x_min, x_max)?;
    let slopes = turning_loci(spec_base)?;
    let k = spec_base.wavenumber;
    let mut out = Vec::new();
    for &beta in betas {
        let spec = spec_base.with_phase_shift(beta);
        let first = ((2.0 * k * x_min + beta) / PI).ceil() as i64;
        let last = ((2.0 * k * x_max + beta) / PI).floor() as i64;
        for order in first..=last {
            let x = (order as f64 * PI - beta) / (2.0 * k);
            if x == 0.0 || x < x_min || x > x_max {
                continue;
            }
            let side = if order.rem_euclid(2) == 1 {
                TurningKind::Upper
            } else {
                TurningKind::Lower
            };
            let line_slope = match side {
                TurningKind::Upper => slopes.upper,
                TurningKind::Lower => slopes.lower,
            };
            out.push(TangencyPoint {
                x,
                t: jacobi_time(&spec, x)?,
                beta,
                order,
                side,
                line_t: slopes.line(&spec, side, x),
                dwell_density: dwell_density(&spec, x)?,
                line_slope,
                dt_dbeta: time_phase_derivative(&spec, x)?,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitRow {
    pub epsilon: f64,
    pub amplitude_b: f64,
    pub t_probe: f64,
    /// Largest time within a quarter period either side of the null.
    pub t_null_max: f64,
    pub x_at_max: f64,
}

/// Approach to the standing wave from both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct StandingWaveDiagnostic {
    /// `B = A − ε`, probed at `x_probe` and `x_null` (x > 0).
    pub forward: Vec<LimitRow>,
    /// `B = A + ε`, probed at `−x_probe` and `−x_null` (x < 0).
    pub reversed: Vec<LimitRow>,
}

fn near_null_max(spec: &DichromaticSpec, x_null: f64) -> Result<(f64, f64)> {
    let half = PI / (2.0 * spec.wavenumber);
    let (lo, hi) = (x_null - half, x_null + half);
    let mut best = (jacobi_time(spec, lo)?, lo);
    let t_hi = jacobi_time(spec, hi)?;
    if t_hi > best.0 {
        best = (t_hi, hi);
    }
    for tp in find_turning_points(spec, lo, hi)? {
        if tp.kind == TurningKind::Upper && tp.t > best.0 {
            best = (tp.t, tp.x);
        }
    }
    Ok(best)
}

/// Trajectory times as `B → A` with `ħ = m = 1`, `β = τ = 0`.
///
/// Away from the nulls of `cos(kx)` the time falls off linearly in ε; at a
/// null it grows like 1/ε.
pub fn standing_wave_limit_diagnostic(
    a: f64,
    epsilons: &[f64],
    k: f64,
    x_probe: f64,
    x_null: f64,
) -> Result<StandingWaveDiagnostic> {
    DichromaticSpec::new(a, 0.0, k)?;
    if epsilons.is_empty() {
        return Err(Error::InvalidParameter("no epsilon values given".into()));
    }
    for (i, &eps) in epsilons.iter().enumerate() {
        if eps == 0.0 {
            return Err(Error::DegenerateAmplitudes);
        }
        if !(eps > 0.0 && eps <= a) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in (0, A], got {eps}"
            )));
        }
        if i > 0 && eps >= epsilons[i - 1] {
            return Err(Error::InvalidParameter("epsilons must be strictly decreasing".into()));
        }
    }
    const NULL_TOL: f64 = 1e-9;
    if !(x_probe.is_finite() && x_probe > 0.0) || (k * x_probe).cos().abs() < NULL_TOL {
        return Err(Error::InvalidProbe(format!(
            "x_probe = {x_probe} must be positive and off the nulls"
        )));
    }
    if !(x_null.is_finite() && x_null > 0.0) || (k * x_null).cos().abs() >= NULL_TOL {
        return Err(Error::InvalidProbe(format!(
            "x_null = {x_null} is not a positive null of cos(kx)"
        )));
    }

    let mut forward = Vec::with_capacity(epsilons.len());
    let mut reversed = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let spec = DichromaticSpec::new(a, a - eps, k)?;
        let (t_null_max, x_at_max) = near_null_max(&spec, x_null)?;
        forward.push(LimitRow {
            epsilon: eps,
            amplitude_b: a - eps,
            t_probe: jacobi_time(&spec, x_probe)?,
            t_null_max,
            x_at_max,
        });

        let spec = DichromaticSpec::new(a, 0.0, k)?.with_amplitude_b(a + eps).reversed();
        let (t_null_max, x_at_max) = near_null_max(&spec, -x_null)?;
        reversed.push(LimitRow {
            epsilon: eps,
            amplitude_b: a + eps,
            t_probe: jacobi_time(&spec, -x_probe)?,
            t_null_max,
            x_at_max,
        });
    }
    Ok(StandingWaveDiagnostic { forward, reversed })
}

/// Bohmian guidance `m·dx/dt = p_d(x)` integrated with classical RK4 at a
/// fixed step, for contrast with the Jacobi trajectory. Returns `(t, x)`.
pub fn bohmian_trajectory(spec: &DichromaticSpec, x0: f64, t_max: f64, dt: f64) -> Result<Vec<(f64, f64)>> {
    spec.require_nondegenerate()?;
    if !(dt > 0.0 && dt.is_finite()) || !(t_max > 0.0 && t_max.is_finite()) || !x0.is_finite() {
        return Err(Error::InvalidRange(format!(
            "need dt > 0, t_max > 0; got dt = {dt}, t_max = {t_max}"
        )));
    }
    let rate = |x: f64| conjugate_momentum(spec, x) / spec.mass;
    let steps = (t_max / dt - 1e-9).ceil().max(1.0) as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let mut x = x0;
    out.push((0.0, x));
    for i in 0..steps {
        let t0 = i as f64 * dt;
        let t1 = if i + 1 == steps { t_max } else { (i + 1) as f64 * dt };
        let h = t1 - t0;
        let k1 = rate(x);
        let k2 = rate(x + 0.5 * h * k1);
        let k3 = rate(x + 0.5 * h * k2);
        let k4 = rate(x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push((t1, x));
    }
    Ok(out)
}
