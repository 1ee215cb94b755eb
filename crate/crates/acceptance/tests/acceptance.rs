//! One test per exit criterion. Each prints a single PASS/FAIL line.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::process::Command;
use std::time::Instant;

use dichromatic::dynamics::dwell_density;
use dichromatic::dynamics::{
    caustic_scan, effective_mass, envelope_tangencies, find_turning_points, jacobi_time,
    standing_wave_limit_diagnostic, transformed_mass_velocity, turning_loci, uniform_grid, velocity, Velocity,
};
use dichromatic::planar::{reduced_action_2d, tangency_angle, trajectory_y, turning_loci_2d};
use dichromatic::qshje::{conjugate_momentum, momentum_density_product, quantum_potential};
use dichromatic::wave_core::born_density;
use dichromatic::{DichromaticSpec, PlanarSpec};
use dichromatic_acceptance::{cli_binary, rel, tolerance as tol, Verdict};
use sha2::{Digest, Sha256};

const GRID: usize = 10_001;

fn half_b() -> DichromaticSpec {
    DichromaticSpec::new(1.0, 0.5, FRAC_PI_2).unwrap()
}

fn half_b_planar() -> PlanarSpec {
    PlanarSpec::new(1.0, 0.5, FRAC_PI_2, FRAC_PI_2).unwrap()
}

/// A = 1, B ∈ {0.25, 0.5, 0.9}, β ∈ {0, π/4, π}, k = π/2.
fn identity_specs() -> Vec<DichromaticSpec> {
    let mut specs = Vec::new();
    for b in [0.25, 0.5, 0.9] {
        for beta in [0.0, FRAC_PI_4, PI] {
            specs.push(DichromaticSpec::new(1.0, b, FRAC_PI_2).unwrap().with_phase_shift(beta));
        }
    }
    specs
}

fn describe(spec: &DichromaticSpec) -> String {
    format!("B={} β={:.4}", spec.amplitude_b, spec.phase_shift)
}

#[test]
fn criterion_1_master_identity() {
    let mut v = Verdict::new(1, "master identity p²/2m − E + Q = 0");
    let start = Instant::now();
    let mut worst = 0.0f64;
    for spec in identity_specs() {
        let e = spec.energy();
        for x in uniform_grid(-10.0, 10.0, GRID) {
            let p = conjugate_momentum(&spec, x);
            let q = quantum_potential(&spec, x).unwrap();
            let residual = (p * p / (2.0 * spec.mass) - e + q).abs() / e;
            worst = worst.max(residual);
            if residual >= tol::MASTER_IDENTITY {
                v.check(false, format!("{} x={x}: residual {residual:.3e}·E", describe(&spec)));
            }
        }
    }
    v.timed(start.elapsed(), tol::FAST_RUNTIME);
    v.note(format!("worst {worst:.2e}·E"));
    v.finish();
}

#[test]
fn criterion_2_momentum_density() {
    let mut v = Verdict::new(2, "p·ρ = ħk(A² − B²)");
    let mut worst = 0.0f64;
    for spec in identity_specs() {
        let (a, b) = (spec.amplitude_a, spec.amplitude_b);
        let flux = spec.hbar * spec.wavenumber * (a * a - b * b);
        for x in uniform_grid(-10.0, 10.0, GRID) {
            // product built here from the two factors, and the library's own
            let direct = conjugate_momentum(&spec, x) * born_density(&spec, x);
            let err = rel(direct, flux).max(rel(momentum_density_product(&spec, x), flux));
            worst = worst.max(err);
            if err >= tol::MOMENTUM_DENSITY {
                v.check(false, format!("{} x={x}: relative {err:.3e}", describe(&spec)));
            }
        }
    }
    v.note(format!("worst {worst:.2e}"));
    v.finish();
}

/// `p(E)` with `k = √(2mE)/ħ`, written out independently.
fn momentum_at_energy(spec: &DichromaticSpec, energy: f64, x: f64) -> f64 {
    let (a, b, m, hbar) = (spec.amplitude_a, spec.amplitude_b, spec.mass, spec.hbar);
    let k = (2.0 * m * energy).sqrt() / hbar;
    let d = a * a + b * b + 2.0 * a * b * (2.0 * k * x + spec.phase_shift).cos();
    hbar * k * (a * a - b * b) / d
}

#[test]
fn criterion_3_velocity_mass_chain() {
    let mut v = Verdict::new(3, "ẋ·∂t/∂x = 1, p = m_Q·ẋ, ẋ = 1/(∂p/∂E)");
    let (mut chain_worst, mut oracle_worst, mut skipped, mut checked) = (0.0f64, 0.0f64, 0usize, 0usize);
    for spec in identity_specs() {
        let e = spec.energy();
        let h = tol::ENERGY_STEP * e;
        let guard = tol::TURNING_GUARD * spec.mass / (spec.hbar * spec.wavenumber);
        for x in uniform_grid(-10.0, 10.0, GRID) {
            let dwell = dwell_density(&spec, x).unwrap();
            if dwell.abs() <= guard {
                skipped += 1;
                continue;
            }
            checked += 1;
            let xdot = match velocity(&spec, x).unwrap() {
                Velocity::Finite(u) => u,
                other => {
                    v.check(
                        false,
                        format!("{} x={x}: velocity {other:?} off a turning point", describe(&spec)),
                    );
                    continue;
                }
            };
            let p = conjugate_momentum(&spec, x);
            let chain = (xdot * dwell - 1.0).abs().max(rel(effective_mass(&spec, x) * xdot, p));
            chain_worst = chain_worst.max(chain);
            if chain >= tol::VELOCITY_CHAIN {
                v.check(false, format!("{} x={x}: chain relative {chain:.3e}", describe(&spec)));
            }
            let dp_de = (momentum_at_energy(&spec, e + h, x) - momentum_at_energy(&spec, e - h, x)) / (2.0 * h);
            let oracle = rel(xdot, 1.0 / dp_de);
            oracle_worst = oracle_worst.max(oracle);
            if oracle >= tol::ENERGY_DERIVATIVE {
                v.check(
                    false,
                    format!("{} x={x}: energy oracle relative {oracle:.3e}", describe(&spec)),
                );
            }
        }
    }
    v.check(checked > 0, "no points checked");
    v.note(format!(
        "chain worst {chain_worst:.2e}, energy oracle worst {oracle_worst:.2e}, {skipped} near-turning points excluded"
    ));
    v.finish();
}

#[test]
fn criterion_4_trajectory_and_wedge() {
    let mut v = Verdict::new(4, "trajectory values, turning points and wedge for A=1, B=0.5, k=π/2");
    let start = Instant::now();
    let spec = half_b();
    for (x, expected) in [(1.0, 6.0 / PI), (2.0, 4.0 / (3.0 * PI))] {
        let t = jacobi_time(&spec, x).unwrap();
        let err = rel(t, expected);
        v.check(
            err < tol::CLOSED_FORM,
            format!("t({x}) = {t} vs {expected}, relative {err:.3e}"),
        );
    }

    let points = find_turning_points(&spec, 0.0, 20.0).unwrap();
    let in_window = points.iter().filter(|tp| tp.x > 1.0 && tp.x < 1.1).count();
    v.check(in_window == 1, format!("{in_window} turning points in (1.0, 1.1)"));

    let slopes = turning_loci(&spec).unwrap();
    let mut worst = f64::NEG_INFINITY;
    for tp in points.iter().filter(|tp| tp.x > 0.0) {
        let upper = spec.tau + slopes.upper * tp.x;
        let lower = spec.tau + slopes.lower * tp.x;
        let slack = tol::WEDGE_SLACK * upper.abs();
        // positive excess means outside the closed wedge
        let excess = (tp.t - upper).max(lower - tp.t);
        worst = worst.max(excess / upper.abs());
        v.check(
            tp.t <= upper + slack && tp.t >= lower - slack,
            format!("turning point x={} t={} outside [{lower}, {upper}]", tp.x, tp.t),
        );
    }
    v.check(
        points.len() >= 20,
        format!("only {} turning points in (0, 20]", points.len()),
    );

    for (name, got, expected) in [
        ("upper", slopes.upper, 6.0 / PI),
        ("lower", slopes.lower, 2.0 / (3.0 * PI)),
    ] {
        let err = rel(got, expected);
        v.check(err <= tol::SLOPE_ULPS, format!("{name} slope {got} vs {expected}"));
    }
    v.timed(start.elapsed(), tol::FAST_RUNTIME);
    v.note(format!(
        "{} turning points, largest relative excess over the wedge {worst:.2e}",
        points.len()
    ));
    v.finish();
}

#[test]
fn criterion_5_limits() {
    let mut v = Verdict::new(5, "B = 0 and standing-wave limits");
    let running = DichromaticSpec::new(1.0, 0.0, FRAC_PI_2).unwrap();
    let scale = running.hbar * running.wavenumber;
    for x in uniform_grid(-10.0, 10.0, GRID) {
        let t = jacobi_time(&running, x).unwrap();
        let expected = running.mass * x / scale;
        if t != expected {
            v.check(false, format!("B=0 x={x}: t = {t} vs {expected}"));
        }
        let m_q = effective_mass(&running, x);
        if m_q != running.mass {
            v.check(false, format!("B=0 x={x}: m_Q = {m_q}"));
        }
    }
    let reversals = find_turning_points(&running, -10.0, 10.0).unwrap();
    v.check(
        reversals.is_empty(),
        format!("B=0 has {} turning points", reversals.len()),
    );

    let diag = standing_wave_limit_diagnostic(1.0, &[1e-1, 1e-2, 1e-3], FRAC_PI_2, 0.5, 1.0).unwrap();
    let mut probe_ratios = Vec::new();
    let mut growth = Vec::new();
    for pair in diag.forward.windows(2) {
        let probe = pair[0].t_probe / pair[1].t_probe;
        probe_ratios.push(probe);
        v.check(
            (probe - 10.0).abs() <= tol::PROBE_LINEARITY * 10.0,
            format!("t(x_probe) ratio {probe:.4} per decade of ε"),
        );
        let g = pair[1].t_null_max / pair[0].t_null_max;
        growth.push(g);
        v.check(
            g >= tol::NULL_GROWTH_PER_DECADE,
            format!("near-null maximum grew {g:.4}× per decade"),
        );
    }
    v.note(format!(
        "probe ratios {probe_ratios:.4?}, near-null growth {growth:.4?}"
    ));
    v.finish();
}

#[test]
fn criterion_6_transformed_mass_velocity() {
    let mut v = Verdict::new(6, "bounded mass and velocity transforms");
    let spec = half_b();
    let mut mismatched = 0usize;
    for x in uniform_grid(0.0, 20.0, GRID) {
        let (mass, xdot) = transformed_mass_velocity(&spec, x).unwrap();
        if !(mass.abs() <= tol::MASS_BOUND && xdot.abs() <= tol::VELOCITY_BOUND) {
            v.check(false, format!("x={x}: M_Q = {mass}, Ẋ = {xdot}"));
        }
        let dwell = dwell_density(&spec, x).unwrap();
        if mass != 0.0 && dwell != 0.0 && mass.signum() != dwell.signum() {
            mismatched += 1;
            v.check(
                false,
                format!("x={x}: sign(M_Q) = {} but dwell density {dwell}", mass.signum()),
            );
        }
    }
    let points = find_turning_points(&spec, 0.0, 20.0).unwrap();
    let mut worst = 0.0f64;
    for tp in &points {
        let (mass, _) = transformed_mass_velocity(&spec, tp.x).unwrap();
        worst = worst.max(mass.abs());
        v.check(
            mass.abs() <= tol::TURNING_RESIDUAL,
            format!("turning point x={}: M_Q = {mass:e}", tp.x),
        );
    }
    v.check(!points.is_empty(), "no turning points found");
    v.note(format!(
        "{} turning points, worst |M_Q| there {worst:.2e}, {mismatched} sign mismatches",
        points.len()
    ));
    v.finish();
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>, String) {
    let output = Command::new(cli_binary())
        .args(args)
        .output()
        .expect("spawn dichromatic");
    (
        output.status.code().unwrap_or(-1),
        output.stdout,
        String::from_utf8_lossy(&output.stderr).into_owned(),
    )
}

#[test]
fn criterion_7_planar() {
    let mut v = Verdict::new(7, "planar trajectory, wedge, contours and orthogonality");
    let spec = half_b_planar();
    for (x, expected) in [(1.0, 3.0), (2.0, 2.0 / 3.0)] {
        let y = trajectory_y(&spec, 0.0, x).unwrap();
        let err = rel(y, expected);
        v.check(
            err < tol::CLOSED_FORM,
            format!("y({x}) = {y} vs {expected}, relative {err:.3e}"),
        );
    }
    let (upper, lower) = turning_loci_2d(&spec).unwrap();
    v.check(rel(upper, 3.0) <= tol::SLOPE_ULPS, format!("upper y-slope {upper}"));
    v.check(
        rel(lower, 1.0 / 3.0) <= tol::SLOPE_ULPS,
        format!("lower y-slope {lower}"),
    );

    let (code, stdout, stderr) = run_cli(&[
        "contour2d",
        "--A",
        "1",
        "--B",
        "0.5",
        "--levels",
        "h/4",
        "--window",
        "-2,2",
    ]);
    v.check(code == 0, format!("contour2d exited {code}: {}", stderr.trim()));
    let text = String::from_utf8(stdout).expect("utf-8 csv");
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    v.check(header == "level,x,y", format!("contour2d header {header:?}"));
    let (mut emitted, mut worst) = (0usize, 0.0f64);
    for line in lines.filter(|l| !l.is_empty()) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().expect("numeric cell")).collect();
        let (level, x, y) = (cols[0], cols[1], cols[2]);
        let w = reduced_action_2d(&spec, x, y).unwrap().value;
        let err = (w - level).abs() / spec.hbar;
        worst = worst.max(err);
        emitted += 1;
        if err >= tol::CONTOUR_IDENTITY {
            v.check(
                false,
                format!("point ({x}, {y}) on level {level}: |W − level| = {err:.3e}·ħ"),
            );
        }
    }
    v.check(emitted > 0, "contour2d emitted no points");

    let mut deviations = Vec::new();
    for b in [0.0, 0.25, 0.5, 0.9] {
        let s = spec.with_amplitude_b(b);
        let max_dev = uniform_grid(-10.0, 10.0, GRID)
            .into_iter()
            .map(|x| (tangency_angle(&s, 0.0, x).unwrap() - FRAC_PI_2).abs())
            .fold(0.0f64, f64::max);
        deviations.push(format!("B={b}: {max_dev:.3e}"));
        if b == 0.0 {
            v.check(
                max_dev <= tol::ORTHOGONAL,
                format!("B=0 angle off π/2 by {max_dev:.3e}"),
            );
        } else {
            v.check(
                max_dev > tol::NON_ORTHOGONAL,
                format!("B={b} stays within {max_dev:.3e} of π/2"),
            );
        }
    }
    v.note(format!(
        "{emitted} contour points, worst |W − level| {worst:.2e}·ħ, max angle deviation {}",
        deviations.join(", ")
    ));
    v.finish();
}

#[test]
fn criterion_8_caustic_family() {
    let mut v = Verdict::new(8, "β family caustic and tangency to the wedge lines");
    let start = Instant::now();
    let spec = half_b();
    let betas: Vec<f64> = (0..8).map(|i| i as f64 * FRAC_PI_4).collect();
    let points = caustic_scan(&spec, &betas, 0.0, 10.0).unwrap();
    let mut inside = 0usize;
    let mut worst = f64::INFINITY;
    for cp in &points {
        worst = worst.min(cp.wedge_offset);
        if cp.wedge_offset < -tol::WEDGE_SLACK {
            inside += 1;
        }
    }
    v.check(!points.is_empty(), "family has no turning points");
    v.check(
        inside == 0,
        format!(
            "{inside}/{} family turning points lie inside the wedge by more than {:e} (deepest {worst:.3e})",
            points.len(),
            tol::WEDGE_SLACK
        ),
    );

    let tangencies = envelope_tangencies(&spec, &betas, 0.0, 10.0).unwrap();
    let (mut t_worst, mut slope_worst) = (0.0f64, 0.0f64);
    for tp in &tangencies {
        let t_err = rel(tp.t, tp.line_t);
        let slope_err = rel(tp.dwell_density, tp.line_slope);
        t_worst = t_worst.max(t_err);
        slope_worst = slope_worst.max(slope_err);
        v.check(
            t_err <= tol::TANGENCY,
            format!(
                "β={:.4} x={}: t off the {} line by {t_err:.3e}",
                tp.beta,
                tp.x,
                tp.side.as_str()
            ),
        );
        v.check(
            slope_err <= tol::TANGENCY,
            format!(
                "β={:.4} x={}: slope off the {} line by {slope_err:.3e}",
                tp.beta,
                tp.x,
                tp.side.as_str()
            ),
        );
    }
    v.check(!tangencies.is_empty(), "no tangency points");
    v.timed(start.elapsed(), tol::CAUSTIC_RUNTIME);
    v.note(format!(
        "{} turning points, {} tangencies, worst time {t_worst:.2e}, worst slope {slope_worst:.2e}",
        points.len(),
        tangencies.len()
    ));
    v.finish();
}

#[test]
fn criterion_9_determinism() {
    let mut v = Verdict::new(9, "repeated CLI runs are byte-identical");
    let commands: [&[&str]; 8] = [
        &[
            "traj",
            "--A",
            "1",
            "--B",
            "0.5",
            "--k",
            "1.5707963",
            "--beta",
            "0",
            "--xmax",
            "10",
            "--n",
            "1001",
        ],
        &["turning", "--xmax", "20"],
        &["family", "--xmax", "10"],
        &["mass", "--xmax", "20"],
        &[
            "contour2d",
            "--A",
            "1",
            "--B",
            "0.5",
            "--levels",
            "h/4",
            "--window",
            "-2,2",
        ],
        &["traj2d", "--xmin", "-2", "--xmax", "2"],
        &["limits"],
        &["verify", "--suite", "all"],
    ];
    let mut runs = 0usize;
    for base in commands {
        let formats: &[&str] = if base[0] == "verify" {
            &[""]
        } else {
            &["csv", "json", "svg"]
        };
        for format in formats {
            let mut args = base.to_vec();
            if !format.is_empty() {
                args.extend(["--format", format]);
            }
            let digests: Vec<_> = (0..2)
                .map(|_| {
                    let (code, stdout, stderr) = run_cli(&args);
                    v.check(code == 0, format!("{args:?} exited {code}: {}", stderr.trim()));
                    v.check(!stdout.is_empty(), format!("{args:?} wrote nothing"));
                    Sha256::digest(&stdout)
                })
                .collect();
            runs += 2;
            v.check(
                digests[0] == digests[1],
                format!("{args:?} output differs between runs"),
            );
        }
    }
    v.note(format!("{runs} runs compared"));
    v.finish();
}
