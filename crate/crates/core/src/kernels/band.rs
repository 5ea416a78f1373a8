//! Near-diagonal cell-pair integrals.
//!
//! Point values are a poor quadrature for a kernel that blows up on
//! the diagonal, so for node pairs within the band the assembled
//! matrix carries the exact integral of a frozen singular model over
//! the cell pair (through the even double antiderivative of the model)
//! plus a small tensor Gauss correction for the smooth remainder. The
//! measure factor (r rho)^{d-1} is frozen at the cell midpoints; every
//! ingredient is then exactly homogeneous under grid dilation, which
//! the scaling tests rely on.

use std::sync::Arc;
use std::sync::OnceLock;

use crate::error::Result;
use crate::grid::RadialGrid;
use crate::kernels::point::{
    gagliardo_singular_model, kernel_value, riesz_singular_model, KernelKind, SingularModel,
};
use crate::quad::gauss_legendre;

/// Integral of r^{d-1} over [a, b], in the cancellation-free product
/// form (b^d - a^d)/d = (b - a) sum_k a^k b^{d-1-k} / d.
pub fn cell_mass(d: u32, a: f64, b: f64) -> f64 {
    let mut sum = 0.0;
    for k in 0..d {
        sum += a.powi(k as i32) * b.powi((d - 1 - k) as i32);
    }
    (b - a) * sum / d as f64
}

/// Correlation of two intervals against an even kernel f(r - rho) with
/// double antiderivative F:
///   int_{a1}^{b1} int_{a2}^{b2} f(r - rho) dr drho
///     = F(b1 - a2) + F(a1 - b2) - F(a1 - a2) - F(b1 - b2).
fn correlate<F: Fn(f64) -> f64>(f2: F, a1: f64, b1: f64, a2: f64, b2: f64) -> f64 {
    f2(b1 - a2) + f2(a1 - b2) - f2(a1 - a2) - f2(b1 - b2)
}

fn gl_cached(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static GL4: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static GL5: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    match n {
        4 => GL4.get_or_init(|| gauss_legendre(4)),
        5 => GL5.get_or_init(|| gauss_legendre(5)),
        _ => unreachable!("only orders 4 and 5 are used"),
    }
}

/// Tensor Gauss integral of f over [a1,b1] x [a2,b2] with per-axis
/// orders n1, n2. Unequal orders keep the nodes off the diagonal when
/// the two intervals coincide.
fn gauss_2d<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    a1: f64,
    b1: f64,
    a2: f64,
    b2: f64,
    n1: usize,
    n2: usize,
) -> f64 {
    let (x1, w1) = gl_cached(n1);
    let (x2, w2) = gl_cached(n2);
    let (c1, h1) = (0.5 * (a1 + b1), 0.5 * (b1 - a1));
    let (c2, h2) = (0.5 * (a2 + b2), 0.5 * (b2 - a2));
    let mut total = 0.0;
    for (xi, wi) in x1.iter().zip(w1) {
        let r = c1 + h1 * xi;
        for (xj, wj) in x2.iter().zip(w2) {
            total += wi * wj * f(r, c2 + h2 * xj);
        }
    }
    total * h1 * h2
}

/// Model of the kernel frozen at the midpoints of a cell pair,
/// optionally carrying the (r - rho)^2 weight of difference-quotient
/// entries folded into the exponent.
fn frozen_model(d: u32, kind: KernelKind, m1: f64, m2: f64, weighted: bool) -> SingularModel {
    let raw = match kind {
        KernelKind::Riesz { alpha } => riesz_singular_model(d, alpha, m1, m2),
        KernelKind::Gagliardo { s } => gagliardo_singular_model(d, s, m1, m2),
    };
    if weighted {
        // (r - rho)^2 * |delta|^e = |delta|^{e+2}; the log case never
        // arrives weighted.
        SingularModel {
            power_coeff: raw.power_coeff,
            exponent: raw.exponent + 2.0,
            log_coeff: raw.log_coeff,
        }
    } else {
        raw
    }
}

fn weight_fn(weighted: bool) -> impl Fn(f64, f64) -> f64 {
    move |r: f64, rho: f64| if weighted { (r - rho) * (r - rho) } else { 1.0 }
}

/// Integral over cell_i x cell_j of [ (r-rho)^2 ]? K(r,rho) (r rho)^{d-1},
/// as the frozen-model analytic part plus a Gauss remainder. For the
/// weighted form the log model never occurs (log kernels arise only
/// unweighted, for the interaction at alpha = 1).
pub fn cell_pair_integral(
    d: u32,
    kind: KernelKind,
    grid: &Arc<RadialGrid>,
    i: usize,
    j: usize,
    weighted: bool,
) -> Result<f64> {
    let (a1, b1) = grid.cell(i);
    let (a2, b2) = grid.cell(j);
    let (m1, m2) = (0.5 * (a1 + b1), 0.5 * (a2 + b2));
    let mu = (m1 * m2).powi(d as i32 - 1);
    let model = frozen_model(d, kind, m1, m2, weighted);
    let analytic = mu * correlate(|x| model.double_antiderivative(x), a1, b1, a2, b2);

    // The remainder is smooth enough for a small tensor rule; on the
    // diagonal cell unequal orders keep nodes off r = rho, where model
    // and kernel individually blow up but their difference stays
    // integrable.
    let wgt = weight_fn(weighted);
    let dm1 = d as i32 - 1;
    let mut kernel_err = None;
    let remainder = gauss_2d(
        |r, rho| {
            let k = match kernel_value(d, kind, r, rho) {
                Ok(v) => v,
                Err(e) => {
                    kernel_err = Some(e);
                    return 0.0;
                }
            };
            wgt(r, rho) * k * (r * rho).powi(dm1) - mu * model.eval(r - rho)
        },
        a1,
        b1,
        a2,
        b2,
        4,
        if i == j { 5 } else { 4 },
    );
    if let Some(e) = kernel_err {
        return Err(e);
    }
    Ok(analytic + remainder)
}
