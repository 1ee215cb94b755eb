//! Bracketing root search on a uniform grid.

/// Bisection on `[lo, hi]` where `f(lo)` and `f(hi)` have opposite signs.
///
/// Stops once the bracket is narrower than `tol` or cannot be split further
/// in floating point.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        if (hi - lo).abs() < tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// A sign change of a scanned function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignChange {
    pub root: f64,
    /// True for a + → − crossing.
    pub falling: bool,
}

/// Scan `[lo, hi]` with cells no wider than `max_step` and refine every sign
/// change by bisection. Touching zeros without a sign change are skipped.
pub fn scan_sign_changes<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, max_step: f64, tol: f64) -> Vec<SignChange> {
    let cells = ((hi - lo) / max_step).ceil().max(1.0) as usize;
    let width = hi - lo;
    let grid: Vec<f64> = (0..=cells)
        .map(|i| {
            if i == cells {
                hi
            } else {
                lo + width * i as f64 / cells as f64
            }
        })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();

    let mut out = Vec::new();
    for i in 0..cells {
        let (fa, fb) = (values[i], values[i + 1]);
        if fa == 0.0 {
            // an exact grid zero counts once, when both neighbours exist
            if i > 0 && values[i - 1] != 0.0 && fb != 0.0 && (values[i - 1] > 0.0) != (fb > 0.0) {
                out.push(SignChange {
                    root: grid[i],
                    falling: values[i - 1] > 0.0,
                });
            }
            continue;
        }
        if fb != 0.0 && (fa > 0.0) != (fb > 0.0) {
            out.push(SignChange {
                root: bisect(&f, grid[i], grid[i + 1], tol),
                falling: fa > 0.0,
            });
        }
    }
    out
}
