//! Exit-gate checks for the `dichromatic` crate.
//!
//! The thresholds below are fixed; the criterion tests in `tests/` read
//! them from here and nowhere else.

use std::io::Write;
use std::path::PathBuf;
use std::process::Command;
use std::time::Duration;

pub mod tolerance {
    use std::time::Duration;

    /// `|p²/2m − E + Q|`, relative to E.
    pub const MASTER_IDENTITY: f64 = 1e-9;
    /// `p·ρ` against `ħk(A² − B²)`, relative.
    pub const MOMENTUM_DENSITY: f64 = 1e-12;
    /// `ẋ·∂t/∂x = 1` and `p = m_Q·ẋ`, relative.
    pub const VELOCITY_CHAIN: f64 = 1e-10;
    /// Velocity against `1/(∂p/∂E)` by central differences, relative.
    pub const ENERGY_DERIVATIVE: f64 = 1e-6;
    /// Central-difference step in E, relative to E.
    pub const ENERGY_STEP: f64 = 1e-6;
    /// Points with `|∂t/∂x| < TURNING_GUARD·m/(ħk)` count as turning points.
    pub const TURNING_GUARD: f64 = 1e-3;

    /// Closed-form trajectory values.
    pub const CLOSED_FORM: f64 = 1e-12;
    /// Wedge slopes are exact up to a few ulps.
    pub const SLOPE_ULPS: f64 = 4.0 * f64::EPSILON;
    /// Distance allowed past a wedge line, relative to the line height.
    pub const WEDGE_SLACK: f64 = 1e-9;

    /// Near-null maximum growth per decade of ε.
    pub const NULL_GROWTH_PER_DECADE: f64 = 10.0;
    /// Allowed spread of the per-decade ratio of the probe time around 10.
    pub const PROBE_LINEARITY: f64 = 0.1;

    /// Bounds of the transformed mass and velocity.
    pub const MASS_BOUND: f64 = 0.8;
    pub const VELOCITY_BOUND: f64 = 1.0;
    /// Transformed mass at a refined turning point.
    pub const TURNING_RESIDUAL: f64 = 1e-9;

    /// Contour points against their level, in units of ħ.
    pub const CONTOUR_IDENTITY: f64 = 1e-10;
    /// Angle to π/2 when there is no interference.
    pub const ORTHOGONAL: f64 = 1e-12;
    /// Smallest departure from π/2 somewhere along an interfering trajectory.
    pub const NON_ORTHOGONAL: f64 = 1e-3;

    /// Trajectory time on the wedge line at tangency, relative.
    pub const TANGENCY: f64 = 1e-12;

    pub const FAST_RUNTIME: Duration = Duration::from_secs(1);
    pub const CAUSTIC_RUNTIME: Duration = Duration::from_secs(5);
}

/// Collects the outcome of one criterion and reports it.
#[derive(Debug)]
pub struct Verdict {
    number: u8,
    title: &'static str,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Verdict {
    pub fn new(number: u8, title: &'static str) -> Self {
        Self {
            number,
            title,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Record `message` as a failure unless `ok`.
    pub fn check(&mut self, ok: bool, message: impl Into<String>) {
        if !ok {
            self.failures.push(message.into());
        }
    }

    pub fn note(&mut self, message: impl Into<String>) {
        self.notes.push(message.into());
    }

    pub fn timed(&mut self, elapsed: Duration, limit: Duration) {
        self.note(format!("runtime {:.1} ms", elapsed.as_secs_f64() * 1e3));
        self.check(
            elapsed < limit,
            format!(
                "runtime {:.3} s exceeds {:.0} s",
                elapsed.as_secs_f64(),
                limit.as_secs_f64()
            ),
        );
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Print the one-line summary and fail the calling test if needed.
    ///
    /// The line goes straight to the stderr handle so that the test
    /// harness does not capture it.
    pub fn finish(self) {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let mut detail = self.failures.clone();
        detail.extend(self.notes.iter().cloned());
        let line = format!(
            "criterion {} {status}: {} [{}]\n",
            self.number,
            self.title,
            detail.join("; ")
        );
        let _ = std::io::stderr().write_all(line.as_bytes());
        assert!(
            self.passed(),
            "criterion {} failed: {}",
            self.number,
            self.failures.join("; ")
        );
    }
}

/// Relative difference `|a − b|/|b|`.
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Path to the `dichromatic` executable, building it when absent.
pub fn cli_binary() -> PathBuf {
    let exe = std::env::current_exe().expect("test executable path");
    // target/<profile>/deps/<test> → target/<profile>/dichromatic
    let profile_dir = exe.parent().and_then(|p| p.parent()).expect("target layout");
    let binary = profile_dir.join(format!("dichromatic{}", std::env::consts::EXE_SUFFIX));
    if !binary.exists() {
        let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
        let mut build = Command::new(cargo);
        build.args(["build", "-p", "dichromatic", "--bin", "dichromatic"]);
        if profile_dir.file_name().is_some_and(|n| n == "release") {
            build.arg("--release");
        }
        let status = build.status().expect("run cargo build");
        assert!(status.success(), "building the dichromatic binary failed");
    }
    binary
}
