//! Closed-form minimization over the dilation parameter of the
//! two-term bound A lambda^a + B lambda^b with
//!   a = 2d/p - d + 2s,    b = 2d/p - (d + alpha)/q.
//! Off the critical coupling, with p strictly between the endpoint
//! exponents, a and b have opposite signs and the minimum is interior;
//! at an endpoint one exponent vanishes and the bound is monotone in
//! the scale.

use serde::Serialize;

use crate::error::{CslError, Result};
use crate::exponents::ParamSet;

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum ScaleOutcome {
    /// Interior minimizer lambda* = (-b B / (a A))^{1/(a-b)}.
    Minimizer { lambda_star: f64, value: f64 },
    /// Exponents share a sign (or one vanishes): the bound improves
    /// monotonically toward the indicated scale limit.
    Monotone { toward_zero: bool, infimum: f64 },
    /// a = b = 0: the two-term bound is scale-free.
    ScaleFree { value: f64 },
}

pub fn scale_exponents(params: &ParamSet, p: f64) -> (f64, f64) {
    let d = params.d as f64;
    let a = 2.0 * d / p - d + 2.0 * params.s;
    let b = 2.0 * d / p - (d + params.alpha) / params.q;
    (a, b)
}

pub fn optimal_scale(a_grad: f64, b_coul: f64, params: &ParamSet, p: f64) -> Result<ScaleOutcome> {
    if !(a_grad > 0.0 && b_coul > 0.0) {
        return Err(CslError::InvalidParams(format!(
            "two-term coefficients must be positive, got A={a_grad}, B={b_coul}"
        )));
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(CslError::InvalidParams(format!("need finite p >= 1, got {p}")));
    }
    let (a, b) = scale_exponents(params, p);
    let e = |lambda: f64| a_grad * lambda.powf(a) + b_coul * lambda.powf(b);
    if a == 0.0 && b == 0.0 {
        return Ok(ScaleOutcome::ScaleFree { value: a_grad + b_coul });
    }
    if a * b < 0.0 {
        let lambda_star = (-(b * b_coul) / (a * a_grad)).powf(1.0 / (a - b));
        return Ok(ScaleOutcome::Minimizer { lambda_star, value: e(lambda_star) });
    }
    // Same sign, or exactly one exponent zero: no interior critical
    // point; the bound decreases toward lambda -> 0 when both exponents
    // are >= 0, toward infinity when both are <= 0.
    let toward_zero = a + b > 0.0;
    let infimum = if a == 0.0 || b == 0.0 {
        // The constant term survives the limit.
        if a == 0.0 {
            a_grad
        } else {
            b_coul
        }
    } else {
        0.0
    };
    Ok(ScaleOutcome::Monotone { toward_zero, infimum })
}
