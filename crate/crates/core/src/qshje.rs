//! Reduced action, conjugate momentum and Bohm's quantum potential for the
//! dichromatic wave, plus the residual of the quantum stationary
//! Hamilton-Jacobi equation they jointly satisfy.

use crate::error::Result;
use crate::wave_core::{born_density, DichromaticSpec};

/// Branch-unwrapped reduced action.
///
/// `value` is `ħ·(principal arctan + branch_count·π)`; it is continuous and
/// monotone in x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionValue {
    pub value: f64,
    pub branch_count: i64,
}

/// Principal value of the single-argument arctangent form of the phase,
/// in [−π/2, π/2].
pub fn principal_phase(spec: &DichromaticSpec, x: f64) -> f64 {
    let (a, b, k, beta) = (spec.amplitude_a, spec.amplitude_b, spec.wavenumber, spec.phase_shift);
    let num = a * (k * x).sin() - b * (k * x + beta).sin();
    let den = a * (k * x).cos() + b * (k * x + beta).cos();
    (num / den).atan()
}

/// A continuous phase of ψ_d, correct up to a constant multiple of π.
///
/// Factoring out the dominant running wave leaves an argument that never
/// circles the origin, so its principal value is already continuous.
fn continuous_phase(spec: &DichromaticSpec, x: f64) -> f64 {
    let (a, b, k) = (spec.amplitude_a, spec.amplitude_b, spec.wavenumber);
    let theta = spec.interference_phase(x);
    if a > b {
        // ψ_d = e^{ikx}·(A + B·e^{−iθ})
        k * x + (-b * theta.sin()).atan2(a + b * theta.cos())
    } else {
        // ψ_d = e^{−ikx−iβ}·(B + A·e^{iθ})
        -k * x - spec.phase_shift + (a * theta.sin()).atan2(b + a * theta.cos())
    }
}

/// Unwrapped reduced action `W_d(x)`, anchored so that `W_d(0)` equals the
/// principal arctan value at the origin.
pub fn reduced_action(spec: &DichromaticSpec, x: f64) -> Result<ActionValue> {
    spec.require_nondegenerate()?;
    let phase = continuous_phase(spec, x) - continuous_phase(spec, 0.0) + principal_phase(spec, 0.0);
    let branch_count = ((phase - principal_phase(spec, x)) / std::f64::consts::PI).round() as i64;
    Ok(ActionValue {
        value: spec.hbar * phase,
        branch_count,
    })
}

/// `p_d = ∂W_d/∂x = ħk(A² − B²) / ρ_d(x)`.
pub fn conjugate_momentum(spec: &DichromaticSpec, x: f64) -> f64 {
    let contrast = spec.amplitude_contrast();
    if contrast == 0.0 {
        return 0.0;
    }
    spec.hbar * spec.wavenumber * (contrast / born_density(spec, x))
}

/// `p`, `∂p/∂x` and `∂²p/∂x²` from the closed form of the momentum.
pub fn momentum_derivatives(spec: &DichromaticSpec, x: f64) -> (f64, f64, f64) {
    let (a, b, k) = (spec.amplitude_a, spec.amplitude_b, spec.wavenumber);
    let theta = spec.interference_phase(x);
    let d = born_density(spec, x);
    let d1 = -4.0 * a * b * k * theta.sin();
    let d2 = -8.0 * a * b * k * k * theta.cos();
    let c = spec.hbar * k * spec.amplitude_contrast();
    let p = c / d;
    let p1 = -c * d1 / (d * d);
    let p2 = c * (2.0 * d1 * d1 / (d * d * d) - d2 / (d * d));
    (p, p1, p2)
}

/// Bohm's quantum potential `(ħ²/4m)[W‴/W′ − (3/2)(W″/W′)²]`.
pub fn quantum_potential(spec: &DichromaticSpec, x: f64) -> Result<f64> {
    spec.require_nondegenerate()?;
    let (p, p1, p2) = momentum_derivatives(spec, x);
    let curvature = p1 / p;
    Ok(spec.hbar * spec.hbar / (4.0 * spec.mass) * (p2 / p - 1.5 * curvature * curvature))
}

/// `p²/(2m) − E + Q`; zero up to rounding.
pub fn qshje_residual(spec: &DichromaticSpec, x: f64) -> Result<f64> {
    let q = quantum_potential(spec, x)?;
    let p = conjugate_momentum(spec, x);
    Ok(p * p / (2.0 * spec.mass) - spec.energy() + q)
}

/// `p_d·ρ_d`, which equals `ħk(A² − B²)` at every x.
pub fn momentum_density_product(spec: &DichromaticSpec, x: f64) -> f64 {
    conjugate_momentum(spec, x) * born_density(spec, x)
}
