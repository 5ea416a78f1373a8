//! Parameter schedules for the annular test families that witness
//! sharpness of the admissible p-range. Each schedule ties the bump
//! amplitude and width to the bump radius R (or drives the width at
//! fixed radius) so that the seminorm and interaction energy stay
//! bounded while the L^p mass follows a known power law.

use crate::error::{CslError, Result};
use serde::Serialize;

use super::{endpoint_exponent, p_rad, ParamSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    /// alpha > 1, 1/q > (d-2s)/(alpha+d): R -> infinity, blow-up below p_rad.
    Table2Row1,
    /// alpha > 1, max(0,(1-2s)/2) < 1/q < (d-2s)/(alpha+d): R -> 0, blow-up above p_rad.
    Table2Row2,
    /// alpha > 1, s < 1/2, 1/q < (1-2s)/2: R -> infinity, blow-up above p_rad.
    Table2Row3,
    /// alpha <= 1, 1/q > (d-2s)/(alpha+d): R -> infinity, blow-up below the endpoint.
    Table3Row1,
    /// alpha <= 1, max(0,(1-2s)/(1+alpha)) < 1/q < (d-2s)/(alpha+d): R -> 0.
    Table3Row2,
    /// alpha <= 1, s < 1/2, 1/q < (1-2s)/(1+alpha): R -> infinity.
    Table3Row3,
    /// s < 1/2 on the width boundary (q(1-2s) = 2, or q(1-2s) = 1+alpha
    /// for alpha <= 1): R fixed, S -> 0 with lambda = S^{(2s-1)/2}.
    FixedRWidthVaries,
}

impl ScheduleKind {
    pub fn is_table2(self) -> bool {
        matches!(self, Self::Table2Row1 | Self::Table2Row2 | Self::Table2Row3)
    }

    pub fn is_table3(self) -> bool {
        matches!(self, Self::Table3Row1 | Self::Table3Row2 | Self::Table3Row3)
    }
}

/// Which way the driving variable runs to produce the blow-up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    RadiusGrows,
    RadiusShrinks,
    WidthShrinks,
}

/// How the bump is tied to the driving variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleLaw {
    /// lambda = R^beta, S = R^gamma, axis variable R.
    PowerOfRadius { beta: f64, gamma: f64 },
    /// R fixed, lambda = S^lambda_exp, axis variable S.
    WidthDriven { lambda_exp: f64 },
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScheduleParams {
    pub kind: ScheduleKind,
    pub law: ScheduleLaw,
    pub direction: Direction,
    /// Threshold exponent the schedule detects: p_rad for the alpha > 1
    /// rows, the endpoint exponent for alpha <= 1, and 2/(1-2s) for the
    /// width-driven family. The L^p mass along the schedule follows
    /// R^{beta (p - p_reference)} (resp. S^{1 - p(1-2s)/2}).
    pub p_reference: f64,
}

impl ScheduleParams {
    /// Exponent of the axis variable in the L^p mass law at a given p.
    pub fn lp_mass_exponent(&self, p: f64, s: f64) -> f64 {
        match self.law {
            ScheduleLaw::PowerOfRadius { beta, .. } => beta * (p - self.p_reference),
            ScheduleLaw::WidthDriven { .. } => 1.0 - p * (1.0 - 2.0 * s) / 2.0,
        }
    }
}

fn check(cond: bool, kind: ScheduleKind, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(CslError::InvalidParams(format!("{kind:?} requires {msg}")))
    }
}

/// Computes the schedule exponents for `kind` at `params`, validating
/// the row conditions and the resulting sign pattern.
pub fn schedule_params(params: &ParamSet, kind: ScheduleKind) -> Result<ScheduleParams> {
    let (d, s, alpha, q) = (params.d as f64, params.s, params.alpha, params.q);
    if params.d < 2 && kind != ScheduleKind::FixedRWidthVaries {
        return Err(CslError::RadialTheoryUnavailable(params.d));
    }
    let inv_q = 1.0 / q;
    let crit = (d - 2.0 * s) / (alpha + d);

    if kind.is_table2() {
        check(alpha > 1.0, kind, "alpha > 1")?;
        let beta = -(2.0 * (d - 1.0) + (d + alpha - 2.0) * (2.0 * s - 1.0))
            / (2.0 * q * (2.0 * s - 1.0) + 4.0);
        let gamma = (q * (d - 1.0) - (d + alpha - 2.0)) / (q * (2.0 * s - 1.0) + 2.0);
        let p_reference = p_rad(params)?;
        let (direction, sign_ok, cond, msg) = match kind {
            ScheduleKind::Table2Row1 => (
                Direction::RadiusGrows,
                beta < 0.0 && gamma > 0.0 && gamma < 1.0,
                inv_q > crit,
                "1/q > (d-2s)/(alpha+d)",
            ),
            ScheduleKind::Table2Row2 => (
                Direction::RadiusShrinks,
                beta < 0.0 && gamma > 1.0,
                inv_q < crit && (s >= 0.5 || inv_q > (1.0 - 2.0 * s) / 2.0),
                "max(0, (1-2s)/2) < 1/q < (d-2s)/(alpha+d)",
            ),
            ScheduleKind::Table2Row3 => (
                Direction::RadiusGrows,
                beta > 0.0 && gamma < 0.0,
                s < 0.5 && inv_q < (1.0 - 2.0 * s) / 2.0,
                "s < 1/2 and 1/q < (1-2s)/2",
            ),
            _ => unreachable!(),
        };
        check(cond, kind, msg)?;
        check(sign_ok, kind, "its sign pattern (internal consistency)")?;
        return Ok(ScheduleParams {
            kind,
            law: ScheduleLaw::PowerOfRadius { beta, gamma },
            direction,
            p_reference,
        });
    }

    if kind.is_table3() {
        check(alpha <= 1.0, kind, "alpha <= 1")?;
        let denom = q * (2.0 * s - 1.0) + 1.0 + alpha;
        if denom == 0.0 {
            return Err(CslError::InvalidParams(format!(
                "{kind:?} degenerates at q(1-2s) = 1+alpha; use FixedRWidthVaries"
            )));
        }
        let beta = -(d - 1.0) * (2.0 * s + alpha) / (2.0 * denom);
        let gamma = (d - 1.0) * (q - 1.0) / denom;
        let p_reference = endpoint_exponent(params);
        let low_cut = (1.0 - 2.0 * s) / (1.0 + alpha);
        let (direction, sign_ok, cond, msg) = match kind {
            ScheduleKind::Table3Row1 => (
                Direction::RadiusGrows,
                beta < 0.0 && gamma > 0.0 && gamma < 1.0,
                inv_q > crit,
                "1/q > (d-2s)/(alpha+d)",
            ),
            ScheduleKind::Table3Row2 => (
                Direction::RadiusShrinks,
                beta < 0.0 && gamma > 1.0,
                inv_q < crit && (s >= 0.5 || inv_q > low_cut),
                "max(0, (1-2s)/(1+alpha)) < 1/q < (d-2s)/(alpha+d)",
            ),
            ScheduleKind::Table3Row3 => (
                Direction::RadiusGrows,
                beta > 0.0 && gamma < 0.0,
                s < 0.5 && inv_q < low_cut,
                "s < 1/2 and 1/q < (1-2s)/(1+alpha)",
            ),
            _ => unreachable!(),
        };
        check(cond, kind, msg)?;
        check(sign_ok, kind, "its sign pattern (internal consistency)")?;
        return Ok(ScheduleParams {
            kind,
            law: ScheduleLaw::PowerOfRadius { beta, gamma },
            direction,
            p_reference,
        });
    }

    // Width-driven family on the boundary lines the radius schedules
    // exclude. lambda = S^{(2s-1)/2} keeps the seminorm bounded; the
    // coupling condition keeps the interaction energy bounded.
    check(s < 0.5, kind, "s < 1/2")?;
    let on_boundary = params.is_width_boundary()
        || (alpha <= 1.0 && {
            use num_rational::BigRational;
            let r = |x: f64| BigRational::from_float(x).expect("finite");
            r(q) * (r(1.0) - r(2.0) * r(s)) == r(1.0) + r(alpha)
        });
    check(
        on_boundary,
        kind,
        "the width boundary q(1-2s) = 2 (or q(1-2s) = 1+alpha when alpha <= 1)",
    )?;
    Ok(ScheduleParams {
        kind,
        law: ScheduleLaw::WidthDriven { lambda_exp: (2.0 * s - 1.0) / 2.0 },
        direction: Direction::WidthShrinks,
        p_reference: 2.0 / (1.0 - 2.0 * s),
    })
}

/// Rescaling exponents that turn the m-bump tower into a normalized
/// family: w(x) = m^theta v(x / m^sigma) with
///
///   sigma = (q-1)/Delta,  theta = -(2s+alpha)/(2 Delta),
///   Delta = d + alpha - q(d-2s),
///
/// chosen so that the seminorm and interaction energy of w stay of
/// order one while the L^p mass grows like m^{p theta + sigma d + 1}.
pub fn multibump_rescale_exponents(params: &ParamSet) -> Result<(f64, f64)> {
    if params.is_critical_q() {
        return Err(params.critical_q_error());
    }
    let (d, s, alpha, q) = (params.d as f64, params.s, params.alpha, params.q);
    let delta = d + alpha - q * (d - 2.0 * s);
    Ok(((q - 1.0) / delta, -(2.0 * s + alpha) / (2.0 * delta)))
}
