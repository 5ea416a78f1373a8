//! Log-log slope fitting over the asymptotic tail of a sweep, and the
//! three-way verdict that compares a fitted rate against a predicted
//! one. Predictions of the form "grows like x^e" are asymptotic, so
//! the fit windows the last portion of the samples (ordered toward the
//! limit) rather than the whole sweep.

use serde::Serialize;

use crate::error::{CslError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Match,
    Mismatch,
    /// The predicted rate is smaller than the resolvable band around
    /// zero, so the sweep cannot distinguish it from flatness.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    /// OLS standard error of the slope; 0 when the window has only two
    /// points (exact interpolation).
    pub stderr: f64,
    pub intercept: f64,
    /// Number of trailing samples the fit used.
    pub window: usize,
}

/// Least squares of ln(y) on ln(x) over the trailing `fraction` of the
/// samples (at least 2). Callers order samples toward the asymptotic
/// regime (growing axis for R -> infinity sweeps, shrinking for S -> 0).
pub fn fit_loglog(xs: &[f64], ys: &[f64], fraction: f64) -> Result<SlopeFit> {
    if xs.len() != ys.len() {
        return Err(CslError::InvalidParams(format!(
            "slope fit needs matching lengths, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 4 {
        return Err(CslError::InvalidParams(format!(
            "slope fit needs at least 4 samples, got {}",
            xs.len()
        )));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(CslError::InvalidParams(format!(
            "fit fraction must lie in (0, 1], got {fraction}"
        )));
    }
    let window = ((xs.len() as f64 * fraction).ceil() as usize).clamp(2, xs.len());
    let start = xs.len() - window;
    let (xs, ys) = (&xs[start..], &ys[start..]);
    for (&x, &y) in xs.iter().zip(ys) {
        if !(x > 0.0) || !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(CslError::InvalidParams(format!(
                "log-log fit needs positive finite samples, got ({x}, {y})"
            )));
        }
    }
    let n = window as f64;
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx <= 0.0 {
        return Err(CslError::InvalidParams(
            "slope fit needs at least two distinct axis values in the window".into(),
        ));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if window > 2 {
        let sse: f64 = lx
            .iter()
            .zip(&ly)
            .map(|(x, y)| {
                let r = y - (intercept + slope * x);
                r * r
            })
            .sum();
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(SlopeFit { slope, stderr, intercept, window })
}

/// Compares a fitted slope with a prediction. A zero prediction gets an
/// absolute band; a nonzero one a relative band. Predictions inside the
/// absolute band but not exactly zero are below the resolution of the
/// comparison and yield Inconclusive.
pub fn judge(fitted: f64, expected: f64, rel_tol: f64, abs_tol: f64) -> Verdict {
    if expected == 0.0 {
        if fitted.abs() <= abs_tol {
            Verdict::Match
        } else {
            Verdict::Mismatch
        }
    } else if expected.abs() <= abs_tol {
        Verdict::Inconclusive
    } else if (fitted - expected).abs() <= rel_tol * expected.abs() {
        Verdict::Match
    } else {
        Verdict::Mismatch
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn recovers_exact_power_law() {
        let xs: Vec<f64> = (0..8).map(|k| 2.0f64.powi(k)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.5 * x.powf(-0.875)).collect();
        let fit = fit_loglog(&xs, &ys, 0.5).unwrap();
        assert_eq!(fit.window, 4);
        assert_relative_eq!(fit.slope, -0.875, epsilon = 1e-12);
        assert_relative_eq!(fit.intercept, 3.5f64.ln(), epsilon = 1e-10);
        assert!(fit.stderr < 1e-12);
    }

    #[test]
    fn window_skips_preasymptotic_head() {
        // Head samples follow a different law; only the tail counts.
        let xs: Vec<f64> = (0..8).map(|k| 2.0f64.powi(k)).collect();
        let ys: Vec<f64> = xs
            .iter()
            .enumerate()
            .map(|(i, x)| if i < 4 { 100.0 } else { x.powf(2.0) })
            .collect();
        let fit = fit_loglog(&xs, &ys, 0.5).unwrap();
        assert_relative_eq!(fit.slope, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_loglog(&[1.0, 2.0, 4.0], &[1.0, 1.0, 1.0], 0.5).is_err());
        let xs = [1.0, 2.0, 4.0, 8.0];
        assert!(fit_loglog(&xs, &[1.0, 2.0, -3.0, 4.0], 1.0).is_err());
        assert!(fit_loglog(&[1.0; 4], &[1.0, 2.0, 3.0, 4.0], 1.0).is_err());
    }

    #[test]
    fn verdict_bands() {
        assert_eq!(judge(0.01, 0.0, 0.1, 0.02), Verdict::Match);
        assert_eq!(judge(0.05, 0.0, 0.1, 0.02), Verdict::Mismatch);
        assert_eq!(judge(0.0, 0.0165, 0.1, 0.02), Verdict::Inconclusive);
        assert_eq!(judge(0.14, 0.15, 0.1, 0.02), Verdict::Match);
        assert_eq!(judge(0.12, 0.15, 0.1, 0.02), Verdict::Mismatch);
        assert_eq!(judge(-0.86, -0.875, 0.1, 0.02), Verdict::Match);
    }
}
