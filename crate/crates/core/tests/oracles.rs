//! Independent reconstructions of library quantities.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use dichromatic::dynamics::{bohmian_trajectory, find_turning_points, uniform_grid, TurningKind};
use dichromatic::planar::{contour_of_action, tangency_angle, trajectory_slope, trajectory_y};
use dichromatic::qshje::{conjugate_momentum, principal_phase, reduced_action};
use dichromatic::wave_core::eval_superposition;
use dichromatic::{ComplexValue, DichromaticSpec, PlanarSpec};

fn specs() -> Vec<DichromaticSpec> {
    let mut out = Vec::new();
    for b in [0.0, 0.25, 0.5, 0.9] {
        for beta in [0.0, FRAC_PI_4, PI] {
            out.push(DichromaticSpec::new(1.0, b, FRAC_PI_2).unwrap().with_phase_shift(beta));
        }
    }
    out
}

/// Sweep from 0 to `x`, adding π whenever the principal value drops.
fn swept_action(spec: &DichromaticSpec, x: f64) -> f64 {
    let (a, b) = (spec.amplitude_a, spec.amplitude_b);
    // phase advance per step stays below π
    let max_step = 0.25 / spec.wavenumber * (a - b) / (a + b);
    let steps = (x.abs() / max_step).ceil().max(1.0) as usize;
    let mut previous = principal_phase(spec, 0.0);
    let mut turns = 0.0;
    for i in 1..=steps {
        let xi = x * i as f64 / steps as f64;
        let current = principal_phase(spec, xi);
        if x > 0.0 && current < previous {
            turns += 1.0;
        } else if x < 0.0 && current > previous {
            turns -= 1.0;
        }
        previous = current;
    }
    spec.hbar * (previous + turns * PI)
}

#[test]
fn unwrapped_action_matches_sweep() {
    for spec in specs() {
        for x in uniform_grid(-10.0, 10.0, 401) {
            let closed = reduced_action(&spec, x).unwrap().value;
            let swept = swept_action(&spec, x);
            assert!(
                (closed - swept).abs() < 1e-12 * swept.abs().max(1.0),
                "B={} β={} x={x}: {closed} vs {swept}",
                spec.amplitude_b,
                spec.phase_shift
            );
        }
    }
}

#[test]
fn action_gradient_matches_momentum() {
    let h = 1e-5;
    for spec in specs() {
        for x in uniform_grid(-10.0, 10.0, 801) {
            let fd =
                (reduced_action(&spec, x + h).unwrap().value - reduced_action(&spec, x - h).unwrap().value) / (2.0 * h);
            let p = conjugate_momentum(&spec, x);
            assert!((fd - p).abs() <= 1e-8f64.max(1e-6 * p.abs()), "x={x}: {fd} vs {p}");
        }
    }
}

/// Time to reach `x` under `m·ẋ = p(x)`, from `∫ m/p dx` in closed form.
fn guidance_time(spec: &DichromaticSpec, x0: f64, x: f64) -> f64 {
    let (a, b, k, beta) = (spec.amplitude_a, spec.amplitude_b, spec.wavenumber, spec.phase_shift);
    let antiderivative = |x: f64| (a * a + b * b) * x + a * b / k * (2.0 * k * x + beta).sin();
    spec.mass * (antiderivative(x) - antiderivative(x0)) / (spec.hbar * k * (a * a - b * b))
}

#[test]
fn bohmian_matches_quadrature() {
    let spec = DichromaticSpec::new(1.0, 0.5, FRAC_PI_2).unwrap().with_phase_shift(0.4);
    let path = bohmian_trajectory(&spec, 0.3, 10.0, 1e-3).unwrap();
    for &(t, x) in path.iter().step_by(500) {
        let t_exact = guidance_time(&spec, 0.3, x);
        assert!((t - t_exact).abs() < 1e-9, "t={t}: quadrature gives {t_exact}");
    }
}

#[test]
fn bohmian_converges_at_fourth_order() {
    let spec = DichromaticSpec::new(1.0, 0.5, FRAC_PI_2).unwrap();
    let end = |dt: f64| bohmian_trajectory(&spec, 0.0, 4.0, dt).unwrap().last().unwrap().1;
    let (x1, x2, x3) = (end(0.01), end(0.005), end(0.0025));
    let ratio = (x1 - x2) / (x2 - x3);
    assert!((ratio - 16.0).abs() < 2.0, "refinement ratio {ratio}");
}

#[test]
fn upper_turning_gap_decays_like_inverse_x() {
    let spec = DichromaticSpec::new(1.0, 0.5, FRAC_PI_2).unwrap();
    let (a, b, k) = (spec.amplitude_a, spec.amplitude_b, spec.wavenumber);
    let limit = (a - b).powi(2) / (8.0 * a * b * k * k);
    let uppers: Vec<_> = find_turning_points(&spec, 0.0, 401.0)
        .unwrap()
        .into_iter()
        .filter(|tp| tp.kind == TurningKind::Upper)
        .collect();
    assert_eq!(uppers.len(), 200);
    for (i, tp) in uppers.iter().enumerate().skip(150) {
        let n = (i + 1) as f64;
        let null = (2.0 * n - 1.0) * PI / (2.0 * k);
        let scaled = (tp.x - null).abs() * tp.x;
        assert!(
            (scaled - limit).abs() < 0.01 * limit,
            "n={n}: gap·x = {scaled} vs {limit}"
        );
    }
    for pair in uppers.windows(2).skip(150) {
        let spacing = pair[1].x - pair[0].x;
        assert!((spacing - PI / k).abs() < 1e-3, "spacing {spacing}");
    }
}

#[test]
fn trajectory_becomes_tangent_to_contour_in_retrograde_stretch() {
    let spec = PlanarSpec::new(1.0, 0.5, FRAC_PI_2, FRAC_PI_2).unwrap();
    let turning = find_turning_points(&spec.x_part(), 0.5, 2.5).unwrap();
    let upper = turning.iter().find(|tp| tp.kind == TurningKind::Upper).unwrap().x;
    let lower = turning.iter().find(|tp| tp.kind == TurningKind::Lower).unwrap().x;
    // contour slope is −p_x/(ħk_y); tangency where the trajectory slope meets it
    let mismatch =
        |x: f64| trajectory_slope(&spec, x).unwrap() + conjugate_momentum(&spec.x_part(), x) / (spec.hbar * spec.ky);
    let grid = uniform_grid(upper, lower, 2001);
    let bracket = grid
        .windows(2)
        .find(|w| mismatch(w[0]).signum() != mismatch(w[1]).signum())
        .expect("no tangency between the reversals");
    let (mut lo, mut hi) = (bracket[0], bracket[1]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mismatch(mid).signum() == mismatch(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let angle = tangency_angle(&spec, 0.0, lo).unwrap();
    assert!(angle < 1e-8, "angle {angle} at x={lo}");
    assert!(lo - upper < 0.5, "tangency at {lo}, upper reversal at {upper}");
}

#[test]
fn contour_steepness_grows_with_interference() {
    let base = PlanarSpec::new(1.0, 0.0, FRAC_PI_2, FRAC_PI_2).unwrap();
    let mut previous = 0.0;
    for b in [0.0, 0.25, 0.5, 0.75, 0.9] {
        let spec = base.with_amplitude_b(b);
        let c = contour_of_action(&spec, 0.0, -2.0, 2.0, 40_001).unwrap();
        let steepest = c
            .points
            .windows(2)
            .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
            .fold(0.0f64, f64::max);
        let analytic = (1.0 + b) / (1.0 - b) * spec.kx / spec.ky;
        assert!(
            (steepest - analytic).abs() < 1e-3 * analytic,
            "B={b}: {steepest} vs {analytic}"
        );
        assert!(steepest > previous, "B={b}: {steepest} not above {previous}");
        previous = steepest;
    }
}

/// Phase of `ψ_d` at fixed x as a function of `k_y` on the energy shell.
fn shell_phase(spec: &PlanarSpec, total: f64, ky: f64, x: f64) -> f64 {
    let kx = (total * total - ky * ky).sqrt();
    let psi = ComplexValue::from_polar(spec.amplitude_a, kx * x)
        + ComplexValue::from_polar(spec.amplitude_b, -kx * x - spec.phase_shift);
    psi.arg()
}

#[test]
fn trajectory_from_constrained_action_derivative() {
    for (b, beta) in [(0.5, 0.0), (0.25, 1.0), (0.9, 2.5)] {
        let spec = PlanarSpec::new(1.0, b, 1.1, 0.7).unwrap().with_phase_shift(beta);
        let total = spec.kx.hypot(spec.ky);
        let h = 1e-6;
        for x in uniform_grid(-6.0, 6.0, 241) {
            let mut delta = shell_phase(&spec, total, spec.ky + h, x) - shell_phase(&spec, total, spec.ky - h, x);
            delta -= 2.0 * PI * (delta / (2.0 * PI)).round();
            // ∂W/∂k_y = ħ·y0 gives y − y0 = −∂φ/∂k_y
            let oracle = 0.7 - delta / (2.0 * h);
            let closed = trajectory_y(&spec, 0.7, x).unwrap();
            let shift = closed - 0.7;
            assert!(
                (oracle - closed).abs() <= 1e-6 * shift.abs().max(1e-3),
                "B={b} x={x}: {oracle} vs {closed}"
            );
        }
    }
}

#[test]
fn superposition_phase_is_action_over_hbar() {
    for spec in specs() {
        for x in uniform_grid(-5.0, 5.0, 201) {
            let w = reduced_action(&spec, x).unwrap().value / spec.hbar;
            let psi = eval_superposition(&spec, x);
            let offset = eval_superposition(&spec, 0.0).arg() - principal_phase(&spec, 0.0);
            let mut diff = psi.arg() - w - offset;
            diff -= 2.0 * PI * (diff / (2.0 * PI)).round();
            assert!(diff.abs() < 1e-12, "x={x}: phase mismatch {diff}");
        }
    }
}
