//! Exponents of the weighted radial estimates used as cross-checks on
//! the main interpolation range: pointwise radial decay against the
//! order-s seminorm, weighted Lebesgue bounds, and the weak-type
//! exterior estimate available for s <= 1/2.

use crate::error::{CslError, Result};
use serde::Serialize;

use super::ParamSet;

/// Pointwise radial decay exponents: for d >= 2, s > 1/2, r > 1 and
/// -(d-1) <= a < d(r-1),
///
///   |x|^sigma |u(x)| <= C [u]^theta ||u||_{L^r(|x|^a dx)}^{1-theta}
///
/// with sigma = (2s(d-1) + (2s-1)a) / ((2s-1)r + 2) and
/// theta = 2 / ((2s-1)r + 2).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DenapoliExponents {
    pub d: u32,
    pub s: f64,
    pub r: f64,
    pub a: f64,
    pub sigma: f64,
    pub theta: f64,
}

pub fn denapoli_exponents(d: u32, s: f64, r: f64, a: f64) -> Result<DenapoliExponents> {
    if d < 2 {
        return Err(CslError::RadialTheoryUnavailable(d));
    }
    if !(s > 0.5 && s <= 1.0) {
        return Err(CslError::InvalidParams(format!(
            "radial decay exponents need 1/2 < s <= 1, got s={s}"
        )));
    }
    if !(r > 1.0) {
        return Err(CslError::InvalidParams(format!("need r > 1, got r={r}")));
    }
    let df = d as f64;
    if !(-(df - 1.0) <= a && a < df * (r - 1.0)) {
        return Err(CslError::InvalidParams(format!(
            "weight exponent a={a} outside [-(d-1), d(r-1)) = [{}, {})",
            -(df - 1.0),
            df * (r - 1.0)
        )));
    }
    let denom = (2.0 * s - 1.0) * r + 2.0;
    Ok(DenapoliExponents {
        d,
        s,
        r,
        a,
        sigma: (2.0 * s * (df - 1.0) + (2.0 * s - 1.0) * a) / denom,
        theta: 2.0 / denom,
    })
}

/// Weighted Sobolev trade-off on radial functions: for 0 < s < d/2,
/// r >= 2 and -(d-1)(1/2 - 1/r) <= beta < d/r,
///
///   || |x|^{-beta} u ||_r <= C [u]    with 1/r = 1/2 + (beta - s)/d.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RubinExponents {
    pub d: u32,
    pub s: f64,
    pub r: f64,
    pub beta: f64,
}

fn rubin_validate(d: u32, s: f64, r: f64, beta: f64) -> Result<RubinExponents> {
    let df = d as f64;
    if !(s > 0.0 && 2.0 * s < df) {
        return Err(CslError::InvalidParams(format!(
            "weighted Sobolev exponents need 0 < s < d/2, got s={s}, d={d}"
        )));
    }
    if !(r >= 2.0) {
        return Err(CslError::InvalidParams(format!("need r >= 2, got r={r}")));
    }
    let lo = -(df - 1.0) * (0.5 - 1.0 / r);
    let hi = df / r;
    if !(beta >= lo - 1e-12 && beta < hi) {
        return Err(CslError::InvalidParams(format!(
            "beta={beta} outside admissible range [{lo}, {hi})"
        )));
    }
    Ok(RubinExponents { d, s, r, beta })
}

/// Solves the balance 1/r = 1/2 + (beta - s)/d for beta given r.
pub fn rubin_beta_from_r(d: u32, s: f64, r: f64) -> Result<RubinExponents> {
    let df = d as f64;
    let beta = s + df * (1.0 / r - 0.5);
    rubin_validate(d, s, r, beta)
}

/// Solves the balance for r given beta.
pub fn rubin_r_from_beta(d: u32, s: f64, beta: f64) -> Result<RubinExponents> {
    let df = d as f64;
    let denom = df + 2.0 * (beta - s);
    if denom <= 0.0 {
        return Err(CslError::InvalidParams(format!(
            "no finite r balances beta={beta} at d={d}, s={s}"
        )));
    }
    rubin_validate(d, s, 2.0 * df / denom, beta)
}

/// The three distinguished points of the weighted Sobolev family.
/// "hardy" is (r=2, beta=s); "sobolev" is (r=2d/(d-2s), beta=0);
/// "limiting" (s < 1/2 only) is (r=2/(1-2s), beta=-(d-1)s), the corner
/// where the admissible range closes.
pub fn rubin_special_points(d: u32, s: f64) -> Result<Vec<(&'static str, RubinExponents)>> {
    let mut points = vec![
        ("hardy", rubin_beta_from_r(d, s, 2.0)?),
        ("sobolev", rubin_beta_from_r(d, s, 2.0 * d as f64 / (d as f64 - 2.0 * s))?),
    ];
    if s < 0.5 {
        points.push(("limiting", rubin_beta_from_r(d, s, 2.0 / (1.0 - 2.0 * s))?));
    }
    Ok(points)
}

/// Weak exterior decay for low regularity: for d >= 2, 0 < s <= 1/2 and
/// 1/2 - s <= 1/p <= 1/2 - s/d,
///
///   int_{|x|>R} |u|^p <= C R^{d - p(d/2 - s)} [u]^p,
///
/// which is the weighted bound at r = p, beta = (2d - p(d-2s))/(2p).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WeakNiExponents {
    pub d: u32,
    pub s: f64,
    pub p: f64,
    pub beta: f64,
    /// Exponent of R in the exterior bound: d - p(d/2 - s).
    pub exterior_exponent: f64,
}

pub fn weakni_exponents(d: u32, s: f64, p: f64) -> Result<WeakNiExponents> {
    if d < 2 {
        return Err(CslError::RadialTheoryUnavailable(d));
    }
    if !(s > 0.0 && s <= 0.5) {
        return Err(CslError::InvalidParams(format!(
            "weak exterior decay needs 0 < s <= 1/2, got s={s}"
        )));
    }
    let df = d as f64;
    let inv = 1.0 / p;
    let (lo, hi) = (0.5 - s, 0.5 - s / df);
    if !(inv >= lo - 1e-12 && inv <= hi + 1e-12) {
        return Err(CslError::InvalidParams(format!(
            "1/p = {inv} outside [1/2 - s, 1/2 - s/d] = [{lo}, {hi}]"
        )));
    }
    Ok(WeakNiExponents {
        d,
        s,
        p,
        beta: (2.0 * df - p * (df - 2.0 * s)) / (2.0 * p),
        exterior_exponent: df - p * (df / 2.0 - s),
    })
}

/// Bundle of the weighted-estimate exponents available at a parameter
/// set, used by the corpus checks. `ruiz_weight_exponent` is the base
/// decay (d-alpha)/2 of the interaction-controlled exterior integrals.
#[derive(Debug, Clone, Serialize)]
pub struct WeightedExponents {
    pub ruiz_weight_exponent: f64,
    pub rubin: Vec<(String, RubinExponents)>,
    pub weakni: Option<WeakNiExponents>,
    pub denapoli: Option<DenapoliExponents>,
}

/// Gathers every weighted estimate whose hypotheses `params` satisfies
/// (p is used only for the weak exterior bound).
pub fn weighted_exponents(params: &ParamSet, p: f64) -> WeightedExponents {
    let rubin = if params.d >= 2 && !params.is_supercritical_s() {
        rubin_special_points(params.d, params.s)
            .map(|v| v.into_iter().map(|(n, e)| (n.to_string(), e)).collect())
            .unwrap_or_default()
    } else {
        Vec::new()
    };
    let denapoli = if params.is_supercritical_s() {
        None
    } else {
        let r = 2.0 * params.d as f64 / (params.d as f64 - 2.0 * params.s);
        denapoli_exponents(params.d, params.s, r, 0.0).ok()
    };
    WeightedExponents {
        ruiz_weight_exponent: (params.d as f64 - params.alpha) / 2.0,
        rubin,
        weakni: weakni_exponents(params.d, params.s, p).ok(),
        denapoli,
    }
}
