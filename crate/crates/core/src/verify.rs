//! Invariant suites, one per module, runnable via `dichromatic verify`.
//!
//! Each check evaluates an identity over a grid of parameters and reports
//! the worst deviation it saw against a fixed tolerance.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write;

use crate::cli;
use crate::dynamics::{
    dwell_density, effective_mass, find_turning_points, jacobi_time, transformed_mass_velocity, turning_loci,
    uniform_grid, velocity, TrajectoryRow, TurningKind,
};
use crate::planar::{contour_of_action, reduced_action_2d, tangency_angle, trajectory_y, turning_loci_2d, PlanarSpec};
use crate::qshje::{conjugate_momentum, momentum_density_product, qshje_residual, quantum_potential, reduced_action};
use crate::wave_core::{
    born_density, eval_polar, eval_psi_dd, eval_superposition, schroedinger_residual_of, ComplexValue, DichromaticSpec,
    WaveKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    WaveCore,
    Qshje,
    Dynamics,
    Planar,
    Cli,
}

impl Suite {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "all" => Some(Suite::All),
            "wave_core" => Some(Suite::WaveCore),
            "qshje" => Some(Suite::Qshje),
            "dynamics" => Some(Suite::Dynamics),
            "planar" => Some(Suite::Planar),
            "cli" => Some(Suite::Cli),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Pass when `worst ≤ tol`; NaN fails.
fn bounded(suite: &'static str, name: &'static str, worst: f64, tol: f64) -> Check {
    Check {
        suite,
        name,
        passed: worst <= tol,
        detail: format!("worst {worst:.3e}, tolerance {tol:.0e}"),
    }
}

fn flag(suite: &'static str, name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        suite,
        name,
        passed,
        detail,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// A = 1, k = π/2 with every combination of the standard B and β values.
fn standard_specs(bs: &[f64]) -> Vec<DichromaticSpec> {
    let mut out = Vec::new();
    for &b in bs {
        for beta in [0.0, PI / 4.0, PI] {
            out.push(DichromaticSpec::new(1.0, b, FRAC_PI_2).unwrap().with_phase_shift(beta));
        }
    }
    out
}

pub fn run_suite(suite: Suite) -> Vec<Check> {
    match suite {
        Suite::All => [
            wave_core_suite(),
            qshje_suite(),
            dynamics_suite(),
            planar_suite(),
            cli_suite(),
        ]
        .concat(),
        Suite::WaveCore => wave_core_suite(),
        Suite::Qshje => qshje_suite(),
        Suite::Dynamics => dynamics_suite(),
        Suite::Planar => planar_suite(),
        Suite::Cli => cli_suite(),
    }
}

/// One `PASS`/`FAIL` line per check and a closing tally.
pub fn report(checks: &[Check]) -> String {
    let mut out = String::new();
    for c in checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{status} {}::{} ({})", c.suite, c.name, c.detail);
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    let _ = writeln!(out, "{passed}/{} invariants passed", checks.len());
    out
}

pub fn wave_core_suite() -> Vec<Check> {
    const S: &str = "wave_core";
    let pairs = [(1.0, 0.0), (1.0, 0.5), (1.0, 1.0), (10.0, 3.0), (10.0, 10.0)];
    let specs: Vec<DichromaticSpec> = pairs
        .iter()
        .flat_map(|&(a, b)| {
            [0.0, 1.1, PI].map(move |beta| DichromaticSpec::new(a, b, FRAC_PI_2).unwrap().with_phase_shift(beta))
        })
        .collect();
    let xs = uniform_grid(-10.0, 10.0, 4001);

    let (mut polar, mut companion, mut modulus) = (0.0f64, 0.0f64, 0.0f64);
    for s in &specs {
        let scale = (s.amplitude_a + s.amplitude_b).powi(2);
        for &x in &xs {
            let psi = eval_superposition(s, x);
            polar = polar.max((eval_polar(s, x).to_complex() - psi).norm());
            let twice = 2.0 * s.amplitude_a * ComplexValue::from_polar(1.0, s.wavenumber * x);
            companion = companion.max((psi + eval_psi_dd(s, x) - twice).norm());
            modulus = modulus.max((born_density(s, x) - psi.norm_sqr()).abs() / scale);
        }
    }

    // bounds hold everywhere and are attained at 2kx + β = nπ in every
    // window of length π/k
    let mut bounds = 0.0f64;
    for s in &specs {
        let (a, b, k) = (s.amplitude_a, s.amplitude_b, s.wavenumber);
        let (lo, hi) = ((a - b).powi(2), (a + b).powi(2));
        for &x in &xs {
            let d = born_density(s, x);
            bounds = bounds.max(lo - d).max(d - hi);
        }
        for start in [-10.0, -3.3, 0.0, 7.1] {
            let first = ((2.0 * k * start + s.phase_shift) / PI).ceil() as i64;
            let mut seen = [false; 2];
            for n in first..first + 2 {
                let x = (n as f64 * PI - s.phase_shift) / (2.0 * k);
                let target = if n.rem_euclid(2) == 0 { hi } else { lo };
                bounds = bounds.max((born_density(s, x) - target).abs() / hi);
                seen[n.rem_euclid(2) as usize] = x >= start && x <= start + PI / k;
            }
            if !seen.iter().all(|&v| v) {
                bounds = f64::INFINITY;
            }
        }
    }

    let mut order = f64::INFINITY;
    for s in &specs[..6] {
        for kind in [
            WaveKind::Dichromatic,
            WaveKind::Companion,
            WaveKind::Forward,
            WaveKind::Backward,
        ] {
            for x in [0.3, 1.7, -2.2] {
                let coarse = schroedinger_residual_of(s, kind, x, 1e-2);
                let fine = schroedinger_residual_of(s, kind, x, 5e-3);
                if coarse > 1e-12 {
                    order = order.min((coarse / fine).log2());
                }
            }
        }
    }

    vec![
        bounded(S, "polar_form_reconstructs_superposition", polar, 1e-12),
        bounded(S, "companion_sum_is_twice_forward_wave", companion, 1e-12),
        bounded(S, "born_density_is_squared_modulus", modulus, 1e-12),
        bounded(S, "born_density_bounds_attained", bounds, 1e-12),
        flag(
            S,
            "schroedinger_residual_second_order",
            (order - 2.0).abs() < 0.05,
            format!("smallest observed order {order:.4}"),
        ),
    ]
}

pub fn qshje_suite() -> Vec<Check> {
    const S: &str = "qshje";
    let specs = standard_specs(&[0.0, 0.25, 0.5, 0.9]);
    let xs = uniform_grid(-10.0, 10.0, 10_001);

    let (mut fd, mut product, mut master, mut potential) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut monotone = true;
    let h = 1e-5;
    for s in &specs {
        let e = s.energy();
        let invariant = s.hbar * s.wavenumber * s.amplitude_contrast();
        let mut previous = f64::NEG_INFINITY;
        for &x in &xs {
            let p = conjugate_momentum(s, x);
            let w = |x| reduced_action(s, x).unwrap().value;
            let slope = (w(x + h) - w(x - h)) / (2.0 * h);
            fd = fd.max((slope - p).abs() / (1e-6 * p.abs()).max(1e-8));
            product = product.max(rel(momentum_density_product(s, x), invariant));
            master = master.max(qshje_residual(s, x).unwrap().abs() / e);
            let q = quantum_potential(s, x).unwrap();
            potential = potential.max((q - (e - p * p / (2.0 * s.mass))).abs() / e);
            let now = w(x);
            monotone &= now > previous;
            previous = now;
        }
    }
    vec![
        bounded(S, "action_slope_matches_momentum", fd, 1.0),
        flag(S, "action_strictly_increasing", monotone, "10001-point grids".into()),
        bounded(S, "momentum_density_product_constant", product, 1e-12),
        bounded(S, "qshje_residual_vanishes", master, 1e-9),
        bounded(S, "potential_equals_energy_deficit", potential, 1e-9),
    ]
}

pub fn dynamics_suite() -> Vec<Check> {
    const S: &str = "dynamics";
    let specs = standard_specs(&[0.25, 0.5, 0.9]);
    let xs = uniform_grid(-10.0, 10.0, 10_001);

    let (mut chain, mut energy_oracle) = (0.0f64, 0.0f64);
    let mut sign_ok = true;
    for s in &specs {
        let guard = 1e-3 * s.mass / (s.hbar * s.wavenumber);
        for &x in &xs {
            let row = TrajectoryRow::at(s, x).unwrap();
            if row.dwell_density != 0.0 && !row.xdot.is_infinite() {
                let v = row.xdot.as_f64();
                chain = chain.max(rel(v * row.dwell_density, 1.0));
                chain = chain.max(rel(row.m_q * v, row.p));
            }
            sign_ok &= row.m_q.signum() == row.dwell_density.signum() || (row.m_q == 0.0 && row.dwell_density == 0.0);
            if row.dwell_density.abs() > guard {
                energy_oracle = energy_oracle.max(rel(energy_derivative_velocity(s, x), row.xdot.as_f64()));
            }
        }
    }

    // tangency to the wedge lines at 2kx + β = nπ
    let (mut on_line, mut slope_match) = (0.0f64, 0.0f64);
    for s in &specs {
        let slopes = turning_loci(s).unwrap();
        let k = s.wavenumber;
        for n in 1..=((40.0 * k + s.phase_shift) / PI) as i64 {
            let x = (n as f64 * PI - s.phase_shift) / (2.0 * k);
            if x <= 0.0 {
                continue;
            }
            let kind = if n % 2 == 1 {
                TurningKind::Upper
            } else {
                TurningKind::Lower
            };
            let slope = match kind {
                TurningKind::Upper => slopes.upper,
                TurningKind::Lower => slopes.lower,
            };
            on_line = on_line.max(rel(jacobi_time(s, x).unwrap(), slopes.line(s, kind, x)));
            slope_match = slope_match.max(rel(dwell_density(s, x).unwrap(), slope));
        }
    }

    // turning points: zero mass, inside the wedge, quasi-periodic spacing
    let (mut mass_at_root, mut outside) = (0.0f64, 0.0f64);
    let mut infinite_flags_massless = true;
    for s in &specs {
        let slopes = turning_loci(s).unwrap();
        for tp in find_turning_points(s, 0.0, 20.0).unwrap() {
            let m_q = effective_mass(s, tp.x);
            mass_at_root = mass_at_root.max(transformed_mass_velocity(s, tp.x).unwrap().0.abs());
            if velocity(s, tp.x).unwrap().is_infinite() {
                infinite_flags_massless &= m_q == 0.0;
            }
            let upper = slopes.line(s, TurningKind::Upper, tp.x);
            let lower = slopes.line(s, TurningKind::Lower, tp.x);
            outside = outside.max(tp.t - upper).max(lower - tp.t);
        }
    }

    let half_b = DichromaticSpec::new(1.0, 0.5, FRAC_PI_2).unwrap();
    let uppers: Vec<f64> = find_turning_points(&half_b, 0.0, 80.0)
        .unwrap()
        .into_iter()
        .filter(|t| t.kind == TurningKind::Upper)
        .map(|t| t.x)
        .collect();
    let period = PI / half_b.wavenumber;
    let scaled: Vec<f64> = uppers
        .windows(2)
        .map(|w| (w[1] - w[0] - period).abs() * 0.5 * (w[0] + w[1]))
        .collect();
    let periodic = scaled.len() > 30 && scaled.iter().all(|&v| v < 0.5) && scaled.last() < scaled.first();

    vec![
        bounded(S, "velocity_dwell_mass_chain", chain, 1e-10),
        bounded(S, "velocity_matches_energy_derivative", energy_oracle, 1e-6),
        bounded(S, "time_on_wedge_line_at_tangency", on_line, 1e-12),
        bounded(S, "dwell_density_matches_line_slope", slope_match, 1e-9),
        flag(
            S,
            "mass_sign_follows_dwell_density",
            sign_ok,
            "10001-point grids".into(),
        ),
        bounded(S, "transformed_mass_vanishes_at_turning_points", mass_at_root, 1e-9),
        flag(
            S,
            "infinite_velocity_implies_zero_mass",
            infinite_flags_massless,
            "exact roots".into(),
        ),
        bounded(S, "turning_points_inside_wedge", outside, 1e-9),
        flag(
            S,
            "upper_turning_points_quasi_periodic",
            periodic,
            format!(
                "{} gaps, |gap − π/k|·x ≤ {:.3e}",
                scaled.len(),
                scaled.iter().cloned().fold(0.0, f64::max)
            ),
        ),
    ]
}

/// `1/(∂p/∂E)` at fixed x, by central differences in E with `k = √(2mE)/ħ`.
pub fn energy_derivative_velocity(spec: &DichromaticSpec, x: f64) -> f64 {
    let e = spec.energy();
    let h = 1e-6 * e;
    let momentum_at = |energy: f64| {
        let k = (2.0 * spec.mass * energy).sqrt() / spec.hbar;
        conjugate_momentum(&spec.with_wavenumber(k), x)
    };
    2.0 * h / (momentum_at(e + h) - momentum_at(e - h))
}

pub fn planar_suite() -> Vec<Check> {
    const S: &str = "planar";
    let base = PlanarSpec::new(1.0, 0.5, FRAC_PI_2, FRAC_PI_2).unwrap();
    let specs: Vec<PlanarSpec> = [0.0, 0.25, 0.5, 0.9]
        .iter()
        .flat_map(|&b| [0.0, PI / 4.0, PI].map(move |beta| base.with_amplitude_b(b).with_phase_shift(beta)))
        .collect();
    let xs = uniform_grid(-4.0, 4.0, 801);

    let (mut separable, mut jacobi, mut contour) = (0.0f64, 0.0f64, 0.0f64);
    for s in &specs {
        for &x in &xs {
            let w0 = reduced_action_2d(s, x, 0.0).unwrap().value;
            for y in [-3.0, -0.7, 1.0, 2.5] {
                let w = reduced_action_2d(s, x, y).unwrap().value;
                let cyclic = s.hbar * s.ky * y;
                separable = separable.max((w - w0 - cyclic).abs() / cyclic.abs().max(w.abs()));
            }
            let shift = trajectory_y(s, 0.0, x).unwrap();
            if shift.abs() > 1e-3 {
                jacobi = jacobi.max(rel(constrained_displacement(s, x), shift));
            }
        }
        for level in [-PI, -0.5, 0.0, PI / 2.0, 7.0] {
            let c = contour_of_action(s, level, -4.0, 4.0, 401).unwrap();
            for &(x, y) in &c.points {
                contour = contour.max((reduced_action_2d(s, x, y).unwrap().value - level).abs() / s.hbar);
            }
        }
    }

    // the y0 = 0 trajectory stays between the y-direction loci for x > 0
    let mut outside = 0.0f64;
    let mut touch = 0.0f64;
    for s in specs.iter().filter(|s| s.amplitude_b > 0.0) {
        let (upper, lower) = turning_loci_2d(s).unwrap();
        for x in uniform_grid(1e-3, 20.0, 4001) {
            let y = trajectory_y(s, 0.0, x).unwrap();
            outside = outside
                .max((y - upper * x) / (upper * x))
                .max((lower * x - y) / (lower * x));
        }
        for n in 1..=((40.0 * s.kx + s.phase_shift) / PI) as i64 {
            let x = (n as f64 * PI - s.phase_shift) / (2.0 * s.kx);
            if x <= 0.0 {
                continue;
            }
            let line = if n % 2 == 1 { upper } else { lower } * x;
            touch = touch.max(rel(trajectory_y(s, 0.0, x).unwrap(), line));
        }
    }

    let mut straight = 0.0f64;
    let plane = base.with_amplitude_b(0.0);
    for &x in &xs {
        straight = straight.max((tangency_angle(&plane, 0.0, x).unwrap() - FRAC_PI_2).abs());
    }
    let mut bent = f64::INFINITY;
    for b in [0.1, 0.5, 0.9] {
        let s = base.with_amplitude_b(b);
        let deviation = uniform_grid(0.0, 4.0, 401)
            .into_iter()
            .map(|x| (tangency_angle(&s, 0.0, x).unwrap() - FRAC_PI_2).abs())
            .fold(0.0, f64::max);
        bent = bent.min(deviation);
    }

    vec![
        bounded(S, "action_separates_in_y", separable, 1e-12),
        bounded(S, "trajectory_is_constrained_action_derivative", jacobi, 1e-6),
        bounded(S, "contour_points_hold_their_action", contour, 1e-10),
        bounded(S, "trajectory_inside_y_wedge", outside, 1e-12),
        bounded(S, "trajectory_touches_y_wedge", touch, 1e-12),
        bounded(S, "orthogonal_without_interference", straight, 1e-12),
        flag(
            S,
            "not_orthogonal_with_interference",
            bent > 1e-3,
            format!("smallest maximum deviation {bent:.3e} rad"),
        ),
    ]
}

/// `y − y0` from `∂W/∂k_y` at fixed energy, by central differences in `k_y`
/// with `k_x = √(K² − k_y²)`.
pub fn constrained_displacement(spec: &PlanarSpec, x: f64) -> f64 {
    let total = spec.kx.hypot(spec.ky);
    let h = 1e-6 * spec.ky;
    let action = |ky: f64| {
        let mut s = *spec;
        s.ky = ky;
        s.kx = (total * total - ky * ky).sqrt();
        // y = 0 isolates the x-dependent part
        reduced_action_2d(&s, x, 0.0).unwrap().value
    };
    -(action(spec.ky + h) - action(spec.ky - h)) / (2.0 * h * spec.hbar)
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("dichromatic").chain(args.iter().copied());
    let code = cli::execute(argv, &mut out, &mut err);
    (code, out)
}

pub fn cli_suite() -> Vec<Check> {
    const S: &str = "cli";
    let runs: [&[&str]; 4] = [
        &["traj", "--betas", "0,pi", "--n", "501"],
        &["family", "--xmax", "6", "--format", "json"],
        &["mass", "--format", "svg", "--n", "501"],
        &["contour2d", "--levels", "h/4", "--window", "-2,2", "--format", "svg"],
    ];
    let deterministic = runs.iter().all(|args| {
        let first = run_cli(args);
        first.0 == 0 && first == run_cli(args)
    });

    let (code, csv) = run_cli(&["traj", "--n", "401", "--xmax", "20"]);
    let mut round_trip = if code == 0 { 0.0f64 } else { f64::INFINITY };
    let spec = DichromaticSpec::new(1.0, 0.5, FRAC_PI_2).unwrap();
    match cli::table::parse_csv(&String::from_utf8_lossy(&csv)) {
        Some((headers, rows)) if headers == ["x", "t", "p", "xdot", "m_q", "dwell_density"] && rows.len() == 401 => {
            for row in rows {
                let cells: Vec<f64> = row.iter().filter_map(|c| cli::table::parse_number(c)).collect();
                let fresh = TrajectoryRow::at(&spec, cells[0]).unwrap();
                let expected = [fresh.t, fresh.p, fresh.xdot.as_f64(), fresh.m_q, fresh.dwell_density];
                for (got, want) in cells[1..].iter().zip(expected) {
                    let err = if got == &want {
                        0.0
                    } else {
                        (got - want).abs() / want.abs().max(1.0)
                    };
                    round_trip = round_trip.max(err);
                }
            }
        }
        _ => round_trip = f64::INFINITY,
    }

    let statuses: [(&[&str], i32); 6] = [
        (&["traj", "--n", "11"], 0),
        (&["traj", "--k", "0"], 1),
        (&["traj", "--unknown"], 1),
        (&["turning", "--xmin", "3", "--xmax", "1"], 1),
        (&["traj", "--B", "1"], 2),
        (&["limits", "--x-null", "0.5"], 2),
    ];
    let mismatches: Vec<String> = statuses
        .iter()
        .filter_map(|(args, want)| {
            let got = run_cli(args).0;
            (got != *want).then(|| format!("{} gave {got}, want {want}", args.join(" ")))
        })
        .collect();

    vec![
        flag(
            S,
            "repeated_runs_byte_identical",
            deterministic,
            format!("{} commands", runs.len()),
        ),
        bounded(S, "csv_round_trip_recomputes", round_trip, 1e-12),
        flag(
            S,
            "exit_status_contract",
            mismatches.is_empty(),
            if mismatches.is_empty() {
                format!("{} cases", statuses.len())
            } else {
                mismatches.join("; ")
            },
        ),
    ]
}
