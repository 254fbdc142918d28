//! Shared oracles for the integration suites.

use num_complex::Complex64;

/// Exhaustive grid argmax of the array gain of `weights` at normalized
/// frequency `xi` over `theta in [lo, hi]` with uniform `step`.
///
/// The probe inner product is evaluated with incremental per-antenna
/// phasors (one complex multiply per antenna per grid point, no trig in the
/// inner loop), which keeps fine grids affordable. Returns `(theta, gain)`.
pub fn gain_grid_argmax(
    weights: &[Complex64],
    xi: f64,
    lo: f64,
    hi: f64,
    step: f64,
) -> (f64, f64) {
    let n = weights.len();
    let scale = 1.0 / (n as f64).sqrt();
    let mut terms: Vec<Complex64> = weights
        .iter()
        .enumerate()
        .map(|(k, w)| w * Complex64::from_polar(1.0, std::f64::consts::PI * k as f64 * xi * lo))
        .collect();
    let rot: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::PI * k as f64 * xi * step))
        .collect();
    let steps = ((hi - lo) / step).round() as usize;
    let mut best = (lo, -1.0);
    for j in 0..=steps {
        let s: Complex64 = terms.iter().sum();
        let g = s.norm() * scale;
        if g > best.1 {
            best = (lo + j as f64 * step, g);
        }
        for (t, r) in terms.iter_mut().zip(&rot) {
            *t *= *r;
        }
    }
    best
}

/// Two-stage argmax over the full direction range: a 1e-3 coarse pass
/// (dense relative to the 4/n mainlobe width of any beam considered here)
/// followed by a 1e-4 pass in a +/- 2e-3 window around the coarse winner.
pub fn refined_argmax(weights: &[Complex64], xi: f64) -> (f64, f64) {
    let (coarse, _) = gain_grid_argmax(weights, xi, -1.0, 1.0, 1e-3);
    let lo = (coarse - 2e-3).max(-1.0);
    let hi = (coarse + 2e-3).min(1.0);
    gain_grid_argmax(weights, xi, lo, hi, 1e-4)
}
