//! The interfering plane waves and the dichromatic wave they synthesize.
//!
//! `ψ₊ = A·exp(ikx)` runs toward +x, `ψ₋ = B·exp(−ikx − iβ)` toward −x, and
//! their sum `ψ_d` is treated as a single free-particle solution of energy
//! `E = ħ²k²/(2m)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexValue = Complex64;

/// Parameters of a one-dimensional two-wave interference problem.
///
/// Fields are public; [`DichromaticSpec::new`] validates, the `with_*`
/// setters do not. Call [`DichromaticSpec::validate`] on hand-built values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DichromaticSpec {
    pub amplitude_a: f64,
    pub amplitude_b: f64,
    pub wavenumber: f64,
    pub phase_shift: f64,
    pub hbar: f64,
    pub mass: f64,
    pub tau: f64,
    /// Permit `B > A` (net motion toward −x).
    pub allow_reversed: bool,
}

impl DichromaticSpec {
    /// Spec with `β = 0`, `ħ = m = 1`, `τ = 0`.
    pub fn new(amplitude_a: f64, amplitude_b: f64, wavenumber: f64) -> Result<Self> {
        let spec = Self {
            amplitude_a,
            amplitude_b,
            wavenumber,
            phase_shift: 0.0,
            hbar: 1.0,
            mass: 1.0,
            tau: 0.0,
            allow_reversed: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_phase_shift(mut self, beta: f64) -> Self {
        self.phase_shift = beta;
        self
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = mass;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_amplitude_b(mut self, b: f64) -> Self {
        self.amplitude_b = b;
        self
    }

    pub fn with_wavenumber(mut self, k: f64) -> Self {
        self.wavenumber = k;
        self
    }

    pub fn reversed(mut self) -> Self {
        self.allow_reversed = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("A", self.amplitude_a),
            ("B", self.amplitude_b),
            ("k", self.wavenumber),
            ("beta", self.phase_shift),
            ("hbar", self.hbar),
            ("m", self.mass),
            ("tau", self.tau),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {value}")));
            }
        }
        if self.amplitude_a <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "A must be > 0, got {}",
                self.amplitude_a
            )));
        }
        if self.amplitude_b < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "B must be >= 0, got {}",
                self.amplitude_b
            )));
        }
        if self.amplitude_b > self.amplitude_a && !self.allow_reversed {
            return Err(Error::InvalidParameter(format!(
                "B = {} exceeds A = {}; enable reversed motion to allow B > A",
                self.amplitude_b, self.amplitude_a
            )));
        }
        for (name, value) in [("k", self.wavenumber), ("hbar", self.hbar), ("m", self.mass)] {
            if value <= 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {value}")));
            }
        }
        Ok(())
    }

    /// `E = ħ²k²/(2m)`.
    pub fn energy(&self) -> f64 {
        let hk = self.hbar * self.wavenumber;
        hk * hk / (2.0 * self.mass)
    }

    /// `A² − B²`, the running-wave weight.
    pub fn amplitude_contrast(&self) -> f64 {
        self.amplitude_a * self.amplitude_a - self.amplitude_b * self.amplitude_b
    }

    pub fn is_degenerate(&self) -> bool {
        self.amplitude_a == self.amplitude_b
    }

    pub(crate) fn require_nondegenerate(&self) -> Result<()> {
        if self.is_degenerate() {
            Err(Error::DegenerateAmplitudes)
        } else {
            Ok(())
        }
    }

    /// Interference phase `2kx + β`.
    #[inline]
    pub fn interference_phase(&self, x: f64) -> f64 {
        2.0 * self.wavenumber * x + self.phase_shift
    }
}

/// Modulus/phase form of a complex amplitude. The phase is the principal
/// value in (−π, π].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarWave {
    pub amplitude: f64,
    pub phase: f64,
}

impl PolarWave {
    pub fn to_complex(self) -> ComplexValue {
        ComplexValue::from_polar(self.amplitude, self.phase)
    }
}

#[inline]
fn forward_wave(spec: &DichromaticSpec, x: f64) -> ComplexValue {
    ComplexValue::from_polar(spec.amplitude_a, spec.wavenumber * x)
}

#[inline]
fn backward_wave(spec: &DichromaticSpec, x: f64) -> ComplexValue {
    ComplexValue::from_polar(spec.amplitude_b, -spec.wavenumber * x - spec.phase_shift)
}

/// `ψ_d(x) = A·exp(ikx) + B·exp(−ikx − iβ)`.
pub fn eval_superposition(spec: &DichromaticSpec, x: f64) -> ComplexValue {
    forward_wave(spec, x) + backward_wave(spec, x)
}

/// `ψ_dd(x) = A·exp(ikx) − B·exp(−ikx − iβ)`, the companion solution whose
/// sum with `ψ_d` is `2ψ₊`.
pub fn eval_psi_dd(spec: &DichromaticSpec, x: f64) -> ComplexValue {
    forward_wave(spec, x) - backward_wave(spec, x)
}

/// Polar form of `ψ_d`.
///
/// At an exact null (only reachable when A = B) the phase is the limit from
/// the left, `arg(−ψ_d'(x))`.
pub fn eval_polar(spec: &DichromaticSpec, x: f64) -> PolarWave {
    let psi = eval_superposition(spec, x);
    // |ψ| rather than sqrt(born_density): the closed form loses half its
    // digits to cancellation near a null.
    let amplitude = psi.norm();
    let scale = spec.amplitude_a + spec.amplitude_b;
    let phase = if amplitude <= f64::EPSILON * scale {
        let slope = ComplexValue::i() * spec.wavenumber * eval_psi_dd(spec, x);
        (-slope).arg()
    } else {
        psi.arg()
    };
    PolarWave { amplitude, phase }
}

/// `ρ_d(x) = A² + B² + 2AB·cos(2kx + β)`.
#[inline]
pub fn born_density(spec: &DichromaticSpec, x: f64) -> f64 {
    let (a, b) = (spec.amplitude_a, spec.amplitude_b);
    a * a + b * b + 2.0 * a * b * spec.interference_phase(x).cos()
}

/// Which wave to feed to [`schroedinger_residual_of`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    Dichromatic,
    Companion,
    Forward,
    Backward,
}

fn eval_kind(spec: &DichromaticSpec, kind: WaveKind, x: f64) -> ComplexValue {
    match kind {
        WaveKind::Dichromatic => eval_superposition(spec, x),
        WaveKind::Companion => eval_psi_dd(spec, x),
        WaveKind::Forward => forward_wave(spec, x),
        WaveKind::Backward => backward_wave(spec, x),
    }
}

/// `|−(ħ²/2m)·D²ψ(x) − E·ψ(x)|` with `D²` the central second difference of
/// step `h`. Falls off as `h²`.
pub fn schroedinger_residual(spec: &DichromaticSpec, x: f64, h: f64) -> f64 {
    schroedinger_residual_of(spec, WaveKind::Dichromatic, x, h)
}

pub fn schroedinger_residual_of(spec: &DichromaticSpec, kind: WaveKind, x: f64, h: f64) -> f64 {
    let centre = eval_kind(spec, kind, x);
    let second = (eval_kind(spec, kind, x + h) + eval_kind(spec, kind, x - h) - 2.0 * centre) / (h * h);
    let kinetic = -(spec.hbar * spec.hbar / (2.0 * spec.mass)) * second;
    (kinetic - spec.energy() * centre).norm()
}
