//! Exponent algebra for the interpolation inequality
//! `||u||_p <= C [u]^beta D(u)^gamma` on radial fractional-order energy
//! spaces, where `[u]` is the order-s seminorm and `D(u)` the Riesz
//! interaction energy with density power q and potential exponent alpha.
//!
//! Everything in this module is exact arithmetic on the parameters; no
//! grids or quadrature are involved. Boundary classifications that the
//! rest of the crate branches on (critical coupling, supercritical s,
//! special width-driven families) are decided in exact rational
//! arithmetic on the binary values of the inputs, so `q = 2/(1-2s)` and
//! friends are recognized whenever the caller supplies the exact
//! floating-point quantities.

mod schedule;
mod weighted;

pub use schedule::{
    multibump_rescale_exponents, schedule_params, Direction, ScheduleKind, ScheduleLaw,
    ScheduleParams,
};
pub use weighted::{
    denapoli_exponents, rubin_beta_from_r, rubin_r_from_beta, rubin_special_points,
    weakni_exponents, weighted_exponents, DenapoliExponents, RubinExponents, WeakNiExponents,
    WeightedExponents,
};

use crate::error::{CslError, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Serialize, Serializer};

/// Serializes +/- infinity as JSON null, finite values as numbers.
pub(crate) fn ser_extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_some(v)
    } else {
        s.serialize_none()
    }
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite parameter")
}

fn int(n: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Core parameter tuple: dimension d, regularity s in (0,1], potential
/// exponent alpha in (0,d), density power q >= 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamSet {
    pub d: u32,
    pub s: f64,
    pub alpha: f64,
    pub q: f64,
}

impl ParamSet {
    pub fn new(d: u32, s: f64, alpha: f64, q: f64) -> Result<Self> {
        if d == 0 {
            return Err(CslError::InvalidParams("d must be a positive integer".into()));
        }
        if !(s > 0.0 && s <= 1.0) || !s.is_finite() {
            return Err(CslError::InvalidParams(format!("s must lie in (0, 1], got {s}")));
        }
        if !(alpha > 0.0 && alpha < d as f64) {
            return Err(CslError::InvalidParams(format!(
                "alpha must lie in (0, d) = (0, {d}), got {alpha}"
            )));
        }
        if !(q >= 1.0) || !q.is_finite() {
            return Err(CslError::InvalidParams(format!("q must satisfy q >= 1, got {q}")));
        }
        Ok(Self { d, s, alpha, q })
    }

    /// Exact test for the critical coupling q(d - 2s) = d + alpha, on
    /// which the interpolation exponents degenerate.
    pub fn is_critical_q(&self) -> bool {
        let d = int(self.d);
        rational(self.q) * (&d - int(2) * rational(self.s)) == d + rational(self.alpha)
    }

    /// Exact test for 2s >= d (no finite Sobolev endpoint).
    pub fn is_supercritical_s(&self) -> bool {
        int(2) * rational(self.s) >= int(self.d)
    }

    /// Exact test for the width-driven boundary q(1 - 2s) = 2, i.e.
    /// 1/q = (1-2s)/2 with s < 1/2.
    pub fn is_width_boundary(&self) -> bool {
        self.s < 0.5 && rational(self.q) * (int(1) - int(2) * rational(self.s)) == int(2)
    }

    pub fn critical_q_error(&self) -> CslError {
        CslError::CriticalQ { d: self.d, s: self.s, alpha: self.alpha, q: self.q }
    }

    fn df(&self) -> f64 {
        self.d as f64
    }
}

/// Location of q relative to the critical coupling, plus the s >= d/2
/// degeneration. The four cases are mutually exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// 2s >= d: no finite Sobolev endpoint, upper range unbounded.
    SupercriticalS,
    /// q(d-2s) < d+alpha, equivalently 1/q > (d-2s)/(d+alpha).
    BelowCriticalQ,
    /// q(d-2s) > d+alpha.
    AboveCriticalQ,
    /// q(d-2s) = d+alpha exactly: interpolation exponents undefined,
    /// the admissible range degenerates to the single Sobolev point.
    CriticalQ,
}

/// Closed/open interval of admissible p; `hi` may be +infinity (open).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PInterval {
    pub lo: f64,
    pub lo_closed: bool,
    #[serde(serialize_with = "ser_extended")]
    pub hi: f64,
    pub hi_closed: bool,
}

impl PInterval {
    pub fn contains(&self, p: f64) -> bool {
        let above = if self.lo_closed { p >= self.lo } else { p > self.lo };
        let below = if self.hi_closed { p <= self.hi } else { p < self.hi };
        above && below
    }

    /// True when p lies in the interior (never at an endpoint).
    pub fn contains_strictly(&self, p: f64) -> bool {
        p > self.lo && p < self.hi
    }

    pub fn describe(&self) -> String {
        let lo_b = if self.lo_closed { '[' } else { '(' };
        let hi_b = if self.hi_closed { ']' } else { ')' };
        if self.hi.is_finite() {
            format!("{lo_b}{}, {}{hi_b}", self.lo, self.hi)
        } else {
            format!("{lo_b}{}, inf)", self.lo)
        }
    }
}

/// Lower endpoint of the admissible range on the subcritical side:
/// p_endpoint = 2(2qs + alpha)/(2s + alpha).
pub fn endpoint_exponent(params: &ParamSet) -> f64 {
    2.0 * (2.0 * params.q * params.s + params.alpha) / (2.0 * params.s + params.alpha)
}

/// Sobolev exponent 2d/(d-2s), +infinity when 2s >= d.
pub fn sobolev_exponent(params: &ParamSet) -> f64 {
    if params.is_supercritical_s() {
        f64::INFINITY
    } else {
        2.0 * params.df() / (params.df() - 2.0 * params.s)
    }
}

/// Interpolation exponent pair (beta, gamma) with
/// `||u||_p <= C [u]^beta D(u)^gamma`:
///
///   beta  = (p(d+alpha) - 2dq) / (p(d+alpha - q(d-2s)))
///   gamma = (2d - p(d-2s)) / (2p(d+alpha - q(d-2s)))
///
/// The pair is pinned by the two scaling identities
/// beta + 2q gamma = 1 and d/p = beta(d/2 - s) + gamma(d + alpha),
/// which have a unique solution off the critical line. The pair
/// (1/2, 1/2) occasionally quoted for (d,s,alpha,q,p) = (3,1,2,2,3)
/// fails both identities; the consistent pair there is (1/3, 1/6).
pub fn gn_exponents(params: &ParamSet, p: f64) -> Result<(f64, f64)> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(CslError::InvalidParams(format!("p must satisfy p >= 1, got {p}")));
    }
    if params.is_critical_q() {
        return Err(params.critical_q_error());
    }
    let (d, s, alpha, q) = (params.df(), params.s, params.alpha, params.q);
    let delta = d + alpha - q * (d - 2.0 * s);
    let beta = (p * (d + alpha) - 2.0 * d * q) / (p * delta);
    let gamma = (2.0 * d - p * (d - 2.0 * s)) / (2.0 * p * delta);
    Ok((beta, gamma))
}

/// Exponent pair of the sharpened Sobolev bound at the critical coupling
/// q = (d+alpha)/(d-2s), p = 2d/(d-2s):
///
///   beta(eps)  = alpha(d-2s)/(d(2s+alpha)) + eps * 2(alpha+d)/(d-2s)
///   gamma(eps) = s(d-2s)/(d(2s+alpha)) - eps
///
/// for 0 <= eps <= s(d-2s)/(d(2s+alpha)). At eps = 0 this is the
/// interaction-refined Sobolev pair; at the upper limit gamma vanishes
/// and the bound degenerates to the classical Sobolev inequality.
pub fn refined_sobolev_exponents(params: &ParamSet, epsilon: f64) -> Result<(f64, f64)> {
    let (d, s, alpha) = (params.df(), params.s, params.alpha);
    if params.is_supercritical_s() {
        return Err(CslError::InvalidParams(format!(
            "refined Sobolev exponents need 0 < s < d/2, got s={s}, d={d}"
        )));
    }
    if !params.is_critical_q() {
        return Err(CslError::InvalidParams(format!(
            "refined Sobolev exponents are defined on the critical coupling q = (d+alpha)/(d-2s) = {}, got q={}",
            (d + alpha) / (d - 2.0 * s),
            params.q
        )));
    }
    let eps_max = s * (d - 2.0 * s) / (d * (2.0 * s + alpha));
    if !(0.0..=eps_max).contains(&epsilon) {
        return Err(CslError::InvalidParams(format!(
            "epsilon must lie in [0, {eps_max}], got {epsilon}"
        )));
    }
    let beta = alpha * (d - 2.0 * s) / (d * (2.0 * s + alpha)) + epsilon * 2.0 * (alpha + d) / (d - 2.0 * s);
    let gamma = s * (d - 2.0 * s) / (d * (2.0 * s + alpha)) - epsilon;
    Ok((beta, gamma))
}

/// Threshold exponent of the radial estimates:
///
///   p_rad = q + ((2s-1)q + 2)(d-alpha) / (2s(d+alpha-2) + d-alpha).
///
/// Requires d >= 2. For alpha > 1 the radial range extends strictly
/// past the non-radial one up to (or down to) p_rad; the two ranges
/// coincide when alpha <= 1, and p_rad equals the non-radial endpoint
/// exactly at alpha = 1.
pub fn p_rad(params: &ParamSet) -> Result<f64> {
    if params.d < 2 {
        return Err(CslError::RadialTheoryUnavailable(params.d));
    }
    let (d, s, alpha, q) = (params.df(), params.s, params.alpha, params.q);
    Ok(q + ((2.0 * s - 1.0) * q + 2.0) * (d - alpha) / (2.0 * s * (d + alpha - 2.0) + d - alpha))
}

/// Full classification of the admissible p-range for a parameter set.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeReport {
    pub regime: Regime,
    /// Range of p for which the inequality holds over all functions.
    pub p_interval: PInterval,
    /// Range of p for which it holds over radial functions (wider for
    /// alpha > 1; equal to `p_interval` for alpha <= 1 or d = 1).
    pub p_interval_radial: PInterval,
    /// True when the radial range adds nothing (alpha <= 1 or d = 1).
    pub radial_equals_nonradial: bool,
    /// Set on the critical coupling, where the range collapses to the
    /// Sobolev point and only the refined Sobolev family applies.
    pub critical_warning: Option<String>,
}

pub fn classify_regime(params: &ParamSet) -> RegimeReport {
    let p_end = endpoint_exponent(params);
    let p_sob = sobolev_exponent(params);

    let regime = if params.is_supercritical_s() {
        Regime::SupercriticalS
    } else if params.is_critical_q() {
        Regime::CriticalQ
    } else if rational(params.q) * (int(params.d) - int(2) * rational(params.s))
        < int(params.d) + rational(params.alpha)
    {
        Regime::BelowCriticalQ
    } else {
        Regime::AboveCriticalQ
    };

    let p_interval = match regime {
        Regime::SupercriticalS => PInterval { lo: p_end, lo_closed: true, hi: f64::INFINITY, hi_closed: false },
        Regime::BelowCriticalQ => PInterval { lo: p_end, lo_closed: true, hi: p_sob, hi_closed: true },
        Regime::AboveCriticalQ => PInterval { lo: p_sob, lo_closed: true, hi: p_end, hi_closed: true },
        Regime::CriticalQ => PInterval { lo: p_sob, lo_closed: true, hi: p_sob, hi_closed: true },
    };

    // alpha <= 1 decided exactly; there the radial range is not wider.
    let alpha_improves = rational(params.alpha) > int(1) && params.d >= 2;
    let p_interval_radial = if !alpha_improves || regime == Regime::CriticalQ {
        p_interval
    } else {
        let pr = p_rad(params).expect("d >= 2 checked");
        match regime {
            Regime::SupercriticalS => {
                PInterval { lo: pr, lo_closed: false, hi: f64::INFINITY, hi_closed: false }
            }
            Regime::BelowCriticalQ => PInterval { lo: pr, lo_closed: false, hi: p_sob, hi_closed: true },
            Regime::AboveCriticalQ => {
                if params.is_width_boundary() {
                    // 1/q = (1-2s)/2: p_rad = q and the range closes at q.
                    PInterval { lo: p_sob, lo_closed: true, hi: params.q, hi_closed: true }
                } else {
                    PInterval { lo: p_sob, lo_closed: true, hi: pr, hi_closed: false }
                }
            }
            Regime::CriticalQ => unreachable!(),
        }
    };

    let critical_warning = (regime == Regime::CriticalQ).then(|| {
        format!(
            "critical coupling q(d-2s) = d+alpha: admissible range degenerates to p = {p_sob}; interpolation exponents are undefined and only the refined Sobolev family applies"
        )
    });

    RegimeReport {
        regime,
        p_interval,
        p_interval_radial,
        radial_equals_nonradial: !alpha_improves,
        critical_warning,
    }
}

/// Everything `classify_regime` and the exponent maps produce for one
/// parameter set, with the interpolation pair evaluated at `p` when one
/// is supplied (and defined).
#[derive(Debug, Clone, Serialize)]
pub struct ExponentBundle {
    pub params: ParamSet,
    pub p: Option<f64>,
    pub p_endpoint: f64,
    #[serde(serialize_with = "ser_extended")]
    pub p_sobolev: f64,
    pub p_rad: Option<f64>,
    pub regime: Regime,
    pub p_interval: PInterval,
    pub p_interval_radial: PInterval,
    pub radial_equals_nonradial: bool,
    pub beta_gn: Option<f64>,
    pub gamma_gn: Option<f64>,
    pub critical_warning: Option<String>,
}

impl ExponentBundle {
    pub fn compute(params: &ParamSet, p: Option<f64>) -> Result<Self> {
        let report = classify_regime(params);
        let (beta_gn, gamma_gn) = match p {
            Some(p) if report.regime != Regime::CriticalQ => {
                let (b, g) = gn_exponents(params, p)?;
                (Some(b), Some(g))
            }
            _ => (None, None),
        };
        Ok(Self {
            params: *params,
            p,
            p_endpoint: endpoint_exponent(params),
            p_sobolev: sobolev_exponent(params),
            p_rad: (params.d >= 2).then(|| p_rad(params).expect("d >= 2")),
            regime: report.regime,
            p_interval: report.p_interval,
            p_interval_radial: report.p_interval_radial,
            radial_equals_nonradial: report.radial_equals_nonradial,
            beta_gn,
            gamma_gn,
            critical_warning: report.critical_warning,
        })
    }
}
