//! The separable two-dimensional problem: interference along x, a single
//! running wave along y.

use rayon::prelude::*;
use std::f64::consts::PI;

use crate::dynamics::{check_range, uniform_grid};
use crate::error::{Error, Result};
use crate::qshje::{conjugate_momentum, reduced_action, ActionValue};
use crate::wave_core::{born_density, eval_superposition, ComplexValue, DichromaticSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarSpec {
    pub amplitude_a: f64,
    pub amplitude_b: f64,
    pub phase_shift: f64,
    pub kx: f64,
    pub ky: f64,
    pub hbar: f64,
    pub mass: f64,
}

impl PlanarSpec {
    /// Spec with `β = 0` and `ħ = m = 1`.
    pub fn new(amplitude_a: f64, amplitude_b: f64, kx: f64, ky: f64) -> Result<Self> {
        let spec = Self {
            amplitude_a,
            amplitude_b,
            phase_shift: 0.0,
            kx,
            ky,
            hbar: 1.0,
            mass: 1.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_phase_shift(mut self, beta: f64) -> Self {
        self.phase_shift = beta;
        self
    }

    pub fn with_amplitude_b(mut self, b: f64) -> Self {
        self.amplitude_b = b;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.x_part().validate()?;
        if !(self.ky > 0.0 && self.ky.is_finite()) {
            return Err(Error::InvalidParameter(format!("ky must be > 0, got {}", self.ky)));
        }
        Ok(())
    }

    /// `E = ħ²(kx² + ky²)/(2m)`.
    pub fn energy(&self) -> f64 {
        self.hbar * self.hbar * (self.kx * self.kx + self.ky * self.ky) / (2.0 * self.mass)
    }

    /// The one-dimensional problem along x.
    pub fn x_part(&self) -> DichromaticSpec {
        DichromaticSpec {
            amplitude_a: self.amplitude_a,
            amplitude_b: self.amplitude_b,
            wavenumber: self.kx,
            phase_shift: self.phase_shift,
            hbar: self.hbar,
            mass: self.mass,
            tau: 0.0,
            allow_reversed: false,
        }
    }
}

/// `ψ(x, y) = [A·exp(ik_x x) + B·exp(−ik_x x − iβ)]·exp(ik_y y)`.
pub fn eval_psi_planar(spec: &PlanarSpec, x: f64, y: f64) -> ComplexValue {
    eval_superposition(&spec.x_part(), x) * ComplexValue::from_polar(1.0, spec.ky * y)
}

/// `W_i(x, y) = ħ·[unwrapped arctan term + k_y·y]`.
pub fn reduced_action_2d(spec: &PlanarSpec, x: f64, y: f64) -> Result<ActionValue> {
    let along_x = reduced_action(&spec.x_part(), x)?;
    Ok(ActionValue {
        value: along_x.value + spec.hbar * spec.ky * y,
        branch_count: along_x.branch_count,
    })
}

/// `y(x)` on the trajectory through constant coordinate `y0`.
pub fn trajectory_y(spec: &PlanarSpec, y0: f64, x: f64) -> Result<f64> {
    let xs = spec.x_part();
    xs.require_nondegenerate()?;
    let ratio = xs.amplitude_contrast() / born_density(&xs, x);
    Ok(y0 + ratio * (spec.ky * x / spec.kx))
}

/// `dy/dx` along a trajectory.
pub fn trajectory_slope(spec: &PlanarSpec, x: f64) -> Result<f64> {
    let xs = spec.x_part();
    xs.require_nondegenerate()?;
    let (a, b) = (spec.amplitude_a, spec.amplitude_b);
    let d = born_density(&xs, x);
    let bracket = d + 4.0 * a * b * spec.kx * x * xs.interference_phase(x).sin();
    Ok(xs.amplitude_contrast() / d * (bracket / d) * (spec.ky / spec.kx))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourPolyline {
    pub action_value: f64,
    pub points: Vec<(f64, f64)>,
}

/// The level set `W_i = w_target` as an explicit function `y(x)` sampled at
/// `n` uniform x values.
pub fn contour_of_action(
    spec: &PlanarSpec,
    w_target: f64,
    x_min: f64,
    x_max: f64,
    n: usize,
) -> Result<ContourPolyline> {
    spec.x_part().require_nondegenerate()?;
    check_range(x_min, x_max)?;
    if n < 2 {
        return Err(Error::InvalidRange(format!("need at least 2 samples, got {n}")));
    }
    let points = uniform_grid(x_min, x_max, n)
        .into_iter()
        .map(|x| {
            let along_x = reduced_action(&spec.x_part(), x)?.value;
            Ok((x, (w_target - along_x) / (spec.hbar * spec.ky)))
        })
        .collect::<Result<_>>()?;
    Ok(ContourPolyline {
        action_value: w_target,
        points,
    })
}

/// Sampling window for contour families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourWindow {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

/// `β` wrapped into (−π, π].
fn wrap_phase(beta: f64) -> f64 {
    let wrapped = beta.rem_euclid(2.0 * PI);
    if wrapped > PI {
        wrapped - 2.0 * PI
    } else {
        wrapped
    }
}

/// Staircase phase of the standing wave `2A·e^{−iβ/2}·cos(k_x x + β/2)`:
/// constant between nulls, rising by π across each. Returns the nulls in
/// `[x_min, x_max]` and the phase just left of the first one.
fn standing_staircase(kx: f64, beta: f64, x_min: f64, x_max: f64) -> (Vec<f64>, f64) {
    let beta = wrap_phase(beta);
    // null j sits at kx·x + β/2 = π/2 + jπ, i.e. index(x) = j
    let index = |x: f64| (kx * x + 0.5 * beta) / PI - 0.5;
    let null = |j: i64| (((j as f64 + 0.5) * PI - 0.5 * beta) / kx).clamp(x_min, x_max);
    let first = index(x_min).ceil() as i64;
    let last = index(x_max).floor() as i64;
    let nulls = (first..=last).map(null).collect();
    // the step with index in (j − 1, j) carries phase −β/2 + jπ; the origin
    // lies in (−1, 0] once β is wrapped, so its step has phase −β/2
    let start = -0.5 * beta + PI * first as f64;
    (nulls, start)
}

/// The `|B| = A` limit of a contour: horizontal runs joined by vertical
/// drops of `π/k_y` at the nulls of the standing wave, including nulls on
/// the window edges.
pub fn square_step_contour(spec: &PlanarSpec, w_target: f64, x_min: f64, x_max: f64) -> Result<ContourPolyline> {
    check_range(x_min, x_max)?;
    let (nulls, start) = standing_staircase(spec.kx, spec.phase_shift, x_min, x_max);
    let y_of = |phase: f64| (w_target / spec.hbar - phase) / spec.ky;
    let mut phase = start;
    let mut points = vec![(x_min, y_of(phase))];
    for x in nulls {
        if x > x_min {
            points.push((x, y_of(phase)));
        }
        phase += PI;
        points.push((x, y_of(phase)));
    }
    if points.last().map(|p| p.0) != Some(x_max) {
        points.push((x_max, y_of(phase)));
    }
    Ok(ContourPolyline {
        action_value: w_target,
        points,
    })
}

/// One contour per entry of `b_values`. Negative B is encoded as `|B|` with
/// β shifted by π; `|B| = A` yields the square-step limit.
pub fn contour_family(
    template: &PlanarSpec,
    b_values: &[f64],
    w_target: f64,
    window: ContourWindow,
) -> Result<Vec<ContourPolyline>> {
    let a = template.amplitude_a;
    for &b in b_values {
        if b.is_nan() || b.abs() > a {
            return Err(Error::InvalidParameter(format!("B = {b} outside [-A, A]")));
        }
    }
    b_values
        .par_iter()
        .map(|&b| {
            let beta = if b < 0.0 {
                template.phase_shift + PI
            } else {
                template.phase_shift
            };
            let spec = template.with_amplitude_b(b.abs()).with_phase_shift(beta);
            if b.abs() == a {
                square_step_contour(&spec, w_target, window.x_min, window.x_max)
            } else {
                contour_of_action(&spec, w_target, window.x_min, window.x_max, window.n)
            }
        })
        .collect()
}

/// Slopes of the lines through the y-direction turning points:
/// `((A+B)/(A−B)·k_y/k_x, (A−B)/(A+B)·k_y/k_x)`.
pub fn turning_loci_2d(spec: &PlanarSpec) -> Result<(f64, f64)> {
    spec.x_part().require_nondegenerate()?;
    let (a, b) = (spec.amplitude_a, spec.amplitude_b);
    let aspect = spec.ky / spec.kx;
    Ok(((a + b) / (a - b) * aspect, (a - b) / (a + b) * aspect))
}

/// Angle in [0, π/2] between the trajectory through `(x, y(x))` and the
/// contour of constant action there. π/2 means orthogonal, 0 tangent.
pub fn tangency_angle(spec: &PlanarSpec, y0: f64, x: f64) -> Result<f64> {
    let slope = trajectory_slope(spec, x)?;
    let grad = (conjugate_momentum(&spec.x_part(), x), spec.hbar * spec.ky);
    if grad.0 == 0.0 && grad.1 == 0.0 {
        return Err(Error::ZeroGradient {
            x,
            y: trajectory_y(spec, y0, x)?,
        });
    }
    // trajectory direction (1, slope); contour direction ⊥ ∇W
    let contour = (-grad.1, grad.0);
    let cross = contour.1 - slope * contour.0;
    let dot = contour.0 + slope * contour.1;
    Ok(cross.abs().atan2(dot.abs()))
}
