//! Weighted integral ratios whose boundedness the interaction energy
//! guarantees: origin-ball charge bounds, exterior/interior weighted
//! charge integrals, the (origin-centered) Morrey norm, and the
//! exterior decay ratio for low-order seminorms.

use serde::Serialize;

use crate::error::{CslError, Result};
use crate::functionals::omega;
use crate::grid::RadialGridFunction;

/// A scale-invariant ratio; `degenerate` marks the 0/0 convention
/// (zero profile), where the value is reported as 0 instead of failing
/// so that corpus sweeps never abort.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RatioOutcome {
    pub value: f64,
    pub degenerate: bool,
}

impl RatioOutcome {
    fn zero() -> Self {
        Self { value: 0.0, degenerate: true }
    }
}

/// ( int_{B_R} |u|^q )^2 / ( R^{d-alpha} D(u) ): the square of the
/// charge inside a ball, against the interaction energy at that scale.
pub fn ball_bound_ratio(
    f: &RadialGridFunction,
    q: f64,
    alpha: f64,
    r_ball: f64,
    coulomb: f64,
) -> Result<RatioOutcome> {
    let d = f.grid.d();
    if !(r_ball > 0.0) || r_ball > f.grid.r_max() * (1.0 + 1e-12) {
        return Err(CslError::InvalidParams(format!(
            "ball radius {r_ball} outside grid span (0, {}]",
            f.grid.r_max()
        )));
    }
    let g: Vec<f64> = f.values.iter().map(|v| v.abs().powf(q)).collect();
    let charge = omega(d) * f.grid.integrate_range(&g, 0.0, r_ball);
    if charge == 0.0 {
        return Ok(RatioOutcome::zero());
    }
    if !(coulomb > 0.0) {
        return Err(CslError::DegenerateQuotient(format!(
            "ball charge {charge} positive but interaction energy is {coulomb}"
        )));
    }
    Ok(RatioOutcome {
        value: charge * charge / (r_ball.powf(d as f64 - alpha) * coulomb),
        degenerate: false,
    })
}

fn ruiz_weighted_integral(
    f: &RadialGridFunction,
    q: f64,
    weight_exp: f64,
    lo: f64,
    hi: f64,
) -> f64 {
    let vals: Vec<f64> = f
        .grid
        .nodes()
        .iter()
        .zip(&f.values)
        .map(|(&r, v)| if r > 0.0 { v.abs().powf(q) * r.powf(weight_exp) } else { 0.0 })
        .collect();
    omega(f.grid.d()) * f.grid.integrate_range(&vals, lo, hi)
}

/// R^{eps} int_{r>R} |u|^q r^{-(d-alpha)/2 - eps} r^{d-1} dr omega
/// divided by sqrt(D); bounded uniformly in R.
pub fn ruiz_exterior(
    f: &RadialGridFunction,
    q: f64,
    alpha: f64,
    eps: f64,
    r: f64,
    coulomb: f64,
) -> Result<RatioOutcome> {
    ruiz_ratio(f, q, alpha, eps, r, coulomb, true)
}

/// R^{-eps} int_{r<R} |u|^q r^{-(d-alpha)/2 + eps} r^{d-1} dr omega
/// divided by sqrt(D); bounded uniformly in R.
pub fn ruiz_interior(
    f: &RadialGridFunction,
    q: f64,
    alpha: f64,
    eps: f64,
    r: f64,
    coulomb: f64,
) -> Result<RatioOutcome> {
    ruiz_ratio(f, q, alpha, eps, r, coulomb, false)
}

fn ruiz_ratio(
    f: &RadialGridFunction,
    q: f64,
    alpha: f64,
    eps: f64,
    r: f64,
    coulomb: f64,
    exterior: bool,
) -> Result<RatioOutcome> {
    if !(eps > 0.0 && r > 0.0) {
        return Err(CslError::InvalidParams(format!(
            "weighted charge ratios need eps > 0 and R > 0, got eps={eps}, R={r}"
        )));
    }
    let d = f.grid.d() as f64;
    let base = -(d - alpha) / 2.0;
    let integral = if exterior {
        ruiz_weighted_integral(f, q, base - eps, r, f.grid.r_max())
    } else {
        ruiz_weighted_integral(f, q, base + eps, 0.0, r)
    };
    if integral == 0.0 {
        return Ok(RatioOutcome::zero());
    }
    if !(coulomb > 0.0) {
        return Err(CslError::DegenerateQuotient(format!(
            "weighted charge {integral} positive but interaction energy is {coulomb}"
        )));
    }
    let scale = if exterior { r.powf(eps) } else { r.powf(-eps) };
    Ok(RatioOutcome { value: scale * integral / coulomb.sqrt(), degenerate: false })
}

/// sup over grid radii R of R^{gamma} ( average of |u|^{r_exp} over
/// B_R(0) )^{1/r_exp}. Origin-centered surrogate of the full norm.
pub fn morrey_norm(f: &RadialGridFunction, r_exp: f64, gamma_exp: f64) -> Result<f64> {
    if !(r_exp >= 1.0) {
        return Err(CslError::InvalidParams(format!("Morrey exponent needs r >= 1, got {r_exp}")));
    }
    let d = f.grid.d() as f64;
    let vals: Vec<f64> = f.values.iter().map(|v| v.abs().powf(r_exp)).collect();
    let prefix = f.grid.integrate_prefix(&vals);
    let mut sup: f64 = 0.0;
    for (i, &r) in f.grid.nodes().iter().enumerate() {
        if r <= 0.0 {
            continue;
        }
        // fint_{B_R} |u|^{r_exp} = d * prefix / R^d (sphere factors cancel).
        let avg = d * prefix[i] / r.powf(d);
        sup = sup.max(r.powf(gamma_exp) * avg.powf(1.0 / r_exp));
    }
    Ok(sup)
}

/// morrey_norm^{(d+alpha)/(d-2s)} / sqrt(D): the control of the Morrey
/// norm by the interaction energy, as a scale-invariant ratio.
pub fn morrey_control_ratio(
    f: &RadialGridFunction,
    s: f64,
    alpha: f64,
    coulomb: f64,
) -> Result<RatioOutcome> {
    let d = f.grid.d() as f64;
    if !(2.0 * s < d) {
        return Err(CslError::InvalidParams(format!(
            "Morrey control needs 2s < d, got s={s}, d={d}"
        )));
    }
    let m = morrey_norm(f, 1.0, 0.5 * (d - 2.0 * s))?;
    if m == 0.0 {
        return Ok(RatioOutcome::zero());
    }
    if !(coulomb > 0.0) {
        return Err(CslError::DegenerateQuotient(format!(
            "Morrey norm {m} positive but interaction energy is {coulomb}"
        )));
    }
    Ok(RatioOutcome {
        value: m.powf((d + alpha) / (d - 2.0 * s)) / coulomb.sqrt(),
        degenerate: false,
    })
}

/// Exterior decay ratio: int_{r>R} |u|^p r^{d-1} dr omega divided by
/// R^{d - p(d/2 - s)} seminorm^p; bounded for the low-order exterior
/// estimate's (s, p) range.
pub fn weakni_exterior_ratio(
    f: &RadialGridFunction,
    s: f64,
    p: f64,
    r: f64,
    seminorm_sq: f64,
) -> Result<RatioOutcome> {
    if !(r > 0.0) {
        return Err(CslError::InvalidParams(format!("need R > 0, got {r}")));
    }
    let d = f.grid.d() as f64;
    let vals: Vec<f64> = f.values.iter().map(|v| v.abs().powf(p)).collect();
    let tail = omega(f.grid.d()) * f.grid.integrate_range(&vals, r, f.grid.r_max());
    if tail == 0.0 {
        return Ok(RatioOutcome::zero());
    }
    if !(seminorm_sq > 0.0) {
        return Err(CslError::DegenerateQuotient(format!(
            "exterior mass {tail} positive but seminorm_sq is {seminorm_sq}"
        )));
    }
    let denom = r.powf(d - p * (0.5 * d - s)) * seminorm_sq.powf(0.5 * p);
    Ok(RatioOutcome { value: tail / denom, degenerate: false })
}

/// Weighted Lebesgue norm against the seminorm:
/// ( omega int |u|^r_exp r^{-beta_exp r_exp} r^{d-1} dr )^{1/r_exp}
/// divided by seminorm; scale invariant on the exponent balance
/// 1/r = 1/2 + (beta - s)/d.
pub fn rubin_weighted_ratio(
    f: &RadialGridFunction,
    r_exp: f64,
    beta_exp: f64,
    seminorm_sq: f64,
) -> Result<RatioOutcome> {
    if !(r_exp >= 1.0) {
        return Err(CslError::InvalidParams(format!("need r >= 1, got {r_exp}")));
    }
    let vals: Vec<f64> = f
        .values
        .iter()
        .zip(f.grid.nodes())
        .map(|(v, &r)| {
            // Origin node carries no measure; skipping it avoids 0 * inf
            // when the weight diverges there.
            if r > 0.0 { v.abs().powf(r_exp) * r.powf(-beta_exp * r_exp) } else { 0.0 }
        })
        .collect();
    let mass = omega(f.grid.d()) * f.grid.integrate(&vals);
    if mass == 0.0 {
        return Ok(RatioOutcome::zero());
    }
    if !(seminorm_sq > 0.0) {
        return Err(CslError::DegenerateQuotient(format!(
            "weighted mass {mass} positive but seminorm_sq is {seminorm_sq}"
        )));
    }
    Ok(RatioOutcome { value: mass.powf(1.0 / r_exp) / seminorm_sq.sqrt(), degenerate: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bump::{BumpSpec, Profile};
    use crate::exponents::ParamSet;
    use crate::functionals::EnergyEvaluator;
    use crate::grid::{RadialGrid, Spacing};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn setup() -> (Arc<RadialGrid>, RadialGridFunction, EnergyEvaluator) {
        let g = RadialGrid::new(3, 40.0, 800, Spacing::Uniform).unwrap();
        let f = BumpSpec { lambda: 1.0, center: 5.0, width: 1.0, profile: Profile::default() }
            .sample(&g)
            .unwrap();
        let ev = EnergyEvaluator::new(&ParamSet::new(3, 0.5, 2.0, 2.0).unwrap(), &g).unwrap();
        (g, f, ev)
    }

    #[test]
    fn ball_ratio_saturates_then_decays() {
        let (_, f, ev) = setup();
        let dd = ev.coulomb(&f).unwrap();
        let r1 = ball_bound_ratio(&f, 2.0, 2.0, 8.0, dd).unwrap();
        let r2 = ball_bound_ratio(&f, 2.0, 2.0, 16.0, dd).unwrap();
        assert!(!r1.degenerate && r1.value > 0.0);
        // Numerator saturated, denominator grows like R^{d-alpha}.
        assert_relative_eq!(r2.value / r1.value, 0.5, max_relative = 1e-9);
        // Zero profile: 0 with the degenerate flag.
        let z = RadialGridFunction::zero(f.grid.clone());
        assert!(ball_bound_ratio(&z, 2.0, 2.0, 8.0, 0.0).unwrap().degenerate);
    }

    #[test]
    fn ruiz_exterior_vanishes_past_support() {
        let (_, f, ev) = setup();
        let dd = ev.coulomb(&f).unwrap();
        let out = ruiz_exterior(&f, 2.0, 2.0, 0.1, 7.0, dd).unwrap();
        assert!(out.degenerate && out.value == 0.0);
        let out = ruiz_exterior(&f, 2.0, 2.0, 0.1, 3.0, dd).unwrap();
        assert!(!out.degenerate && out.value > 0.0);
        let inner = ruiz_interior(&f, 2.0, 2.0, 0.1, 7.0, dd).unwrap();
        assert!(inner.value > 0.0);
    }

    #[test]
    fn ruiz_ratios_are_dilation_invariant() {
        let (_, f, ev) = setup();
        let dd = ev.coulomb(&f).unwrap();
        let base_e = ruiz_exterior(&f, 2.0, 2.0, 0.2, 4.5, dd).unwrap().value;
        let base_i = ruiz_interior(&f, 2.0, 2.0, 0.2, 4.5, dd).unwrap().value;
        // Dilate nodes by t and R by t; D scales exactly by t^{d+alpha}
        // under node rescaling.
        let t = 3.0;
        let ft = f.rescaled(t, 1.0).unwrap();
        let evt = EnergyEvaluator::new(&ParamSet::new(3, 0.5, 2.0, 2.0).unwrap(), &ft.grid)
            .unwrap();
        let ddt = evt.coulomb(&ft).unwrap();
        let et = ruiz_exterior(&ft, 2.0, 2.0, 0.2, 4.5 * t, ddt).unwrap().value;
        let it = ruiz_interior(&ft, 2.0, 2.0, 0.2, 4.5 * t, ddt).unwrap().value;
        assert_relative_eq!(et, base_e, max_relative = 1e-9);
        assert_relative_eq!(it, base_i, max_relative = 1e-9);
    }

    #[test]
    fn morrey_norm_on_plateau() {
        // Plateau of height h on [0, a]: fint over B_R is h for R <= a,
        // then h (a/R)^d; sup of R^gamma * avg over R in the grid.
        let g = RadialGrid::new(3, 8.0, 1601, Spacing::Uniform).unwrap();
        let (a, h, gamma) = (2.0f64, 1.5f64, 1.0f64);
        let vals: Vec<f64> =
            g.nodes().iter().map(|&r| if r <= a { h } else { 0.0 }).collect();
        let f = RadialGridFunction::new(g, vals).unwrap();
        let got = morrey_norm(&f, 1.0, gamma).unwrap();
        // R^1 * h for R <= a grows to h*a; beyond, h a^3 / R^2 decays.
        assert_relative_eq!(got, h * a, max_relative = 2e-3);
    }

    #[test]
    fn morrey_dilation_covariance() {
        let (_, f, _) = setup();
        let gamma = 1.0;
        let m0 = morrey_norm(&f, 1.0, gamma).unwrap();
        // u(x/t) on nodes*t: averages carry over, radii scale by t.
        let t = 2.5f64;
        let ft = f.rescaled(t, 1.0).unwrap();
        let mt = morrey_norm(&ft, 1.0, gamma).unwrap();
        assert_relative_eq!(mt, t.powf(gamma) * m0, max_relative = 1e-10);
    }

    #[test]
    fn weakni_ratio_decays_past_support() {
        let (_, f, ev) = setup();
        let params = ParamSet::new(3, 0.25, 2.0, 2.0).unwrap();
        let evl = EnergyEvaluator::new(&params, &f.grid).unwrap();
        let _ = ev;
        let semi = evl.seminorm_sq(&f).unwrap();
        let inside = weakni_exterior_ratio(&f, 0.25, 4.0, 4.5, semi).unwrap();
        assert!(!inside.degenerate && inside.value > 0.0);
        let outside = weakni_exterior_ratio(&f, 0.25, 4.0, 10.0, semi).unwrap();
        assert!(outside.degenerate && outside.value == 0.0);
    }

    #[test]
    fn rubin_ratio_dilation_invariant_on_balance() {
        // 1/r = 1/2 + (beta - s)/d makes the ratio scale free; check
        // the Hardy point (r=2, beta=s) at s=1/2 by dilating.
        let (_, f, ev) = setup();
        let semi = ev.seminorm_sq(&f).unwrap();
        let base = rubin_weighted_ratio(&f, 2.0, 0.5, semi).unwrap();
        assert!(!base.degenerate && base.value > 0.0);
        let t = 3.0f64;
        let ft = f.rescaled(t, 1.0).unwrap();
        let evt = EnergyEvaluator::new(&ParamSet::new(3, 0.5, 2.0, 2.0).unwrap(), &ft.grid).unwrap();
        let semit = evt.seminorm_sq(&ft).unwrap();
        let scaled = rubin_weighted_ratio(&ft, 2.0, 0.5, semit).unwrap();
        assert_relative_eq!(scaled.value, base.value, max_relative = 1e-9);
    }
}
