//! One-dimensional quadrature: a 7/15 Gauss-Kronrod pair driving a
//! globally adaptive bisection scheme, plus Gauss-Legendre rules of
//! modest order for smooth cell integrals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{CslError, Result};

// 15-point Kronrod abscissae on [-1, 1] (nonnegative half; the rule is
// symmetric and never evaluates the interval endpoints).
const XK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Embedded 7-point Gauss weights (odd-index Kronrod nodes).
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One Gauss-Kronrod 7/15 application on [a, b]: returns the Kronrod
/// value and the |K15 - G7| error estimate.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = WK[7] * f(c);
    let mut gauss = WG[3] * f(c);
    for i in 0..7 {
        let x = h * XK[i];
        let pair = f(c - x) + f(c + x);
        kron += WK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kron * h, (kron - gauss).abs() * h.abs())
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-300, max_intervals: 4000 }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// Globally adaptive integral of f over [a, b]: repeatedly bisect the
/// segment with the largest error estimate until the summed estimate
/// meets max(abs_tol, rel_tol * |integral|), or fail with the best
/// value found once the interval budget is spent.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
    context: &str,
) -> Result<f64> {
    if !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(CslError::InvalidParams(format!(
            "integration bounds must be finite with a < b, got [{a}, {b}] in {context}"
        )));
    }
    let (value, error) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total_value = value;
    let mut total_error = error;
    while total_error > opts.abs_tol.max(opts.rel_tol * total_value.abs()) {
        if heap.len() >= opts.max_intervals {
            return Err(CslError::QuadratureNonConvergence {
                tol: opts.rel_tol,
                best: total_value,
                context: format!(
                    "{context}: error estimate {total_error:.3e} after {} intervals",
                    heap.len()
                ),
            });
        }
        let worst = heap.pop().expect("heap cannot be empty while error > 0");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Interval at floating-point resolution; its estimate can
            // shrink no further.
            return Err(CslError::QuadratureNonConvergence {
                tol: opts.rel_tol,
                best: total_value,
                context: format!("{context}: interval [{}, {}] at resolution limit", worst.a, worst.b),
            });
        }
        let (lv, le) = gk15(&f, worst.a, mid);
        let (rv, re) = gk15(&f, mid, worst.b);
        total_value += lv + rv - worst.value;
        total_error += le + re - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: lv, error: le });
        heap.push(Segment { a: mid, b: worst.b, value: rv, error: re });
    }
    Ok(total_value)
}

/// Gauss-Legendre nodes and weights on [-1, 1], built by Newton
/// iteration on the Legendre recurrence. n stays small here, so the
/// cost is negligible and constants need no tabulation.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!((1..=64).contains(&n), "rule order out of range: {n}");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n and P_n' at x by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn smooth_integral_hits_tight_tolerance() {
        let v = integrate_adaptive(|x: f64| x.exp(), 0.0, 3.0, QuadOptions::default(), "exp")
            .unwrap();
        assert_relative_eq!(v, 3.0f64.exp() - 1.0, epsilon = 1e-12);
    }

    #[test]
    fn integrable_endpoint_singularity_converges() {
        // The rule never samples the endpoints, so x^{-1/2} is fine.
        let v = integrate_adaptive(
            |x: f64| x.powf(-0.5),
            0.0,
            1.0,
            QuadOptions { rel_tol: 1e-9, ..Default::default() },
            "sqrt singularity",
        )
        .unwrap();
        assert_relative_eq!(v, 2.0, epsilon = 1e-8);
    }

    #[test]
    fn divergent_integrand_reports_best_value() {
        let err = integrate_adaptive(
            |x: f64| 1.0 / x,
            0.0,
            1.0,
            QuadOptions { max_intervals: 200, ..Default::default() },
            "log divergence",
        )
        .unwrap_err();
        match err {
            CslError::QuadratureNonConvergence { best, .. } => assert!(best > 10.0),
            other => panic!("expected non-convergence, got {other}"),
        }
    }

    #[test]
    fn gauss_legendre_exact_on_polynomials() {
        let (x, w) = gauss_legendre(8);
        // Degree 15 is the highest an 8-point rule integrates exactly.
        for k in [0usize, 3, 8, 15] {
            let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
            let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            assert_relative_eq!(got, exact, epsilon = 1e-13, max_relative = 1e-13);
        }
        let wsum: f64 = w.iter().sum();
        assert_relative_eq!(wsum, 2.0, epsilon = 1e-14);
    }
}
