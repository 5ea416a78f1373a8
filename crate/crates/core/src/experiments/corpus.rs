//! Randomized bump-superposition corpora: a seeded, counter-indexed
//! family of radial test functions used as boundedness witnesses. Each
//! function is a sum of annular bumps with log-uniform centers, widths
//! and amplitudes; function i is generated on stream i of the base
//! seed, so reports are reproducible and order-independent.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

use crate::bump::{BumpSpec, Profile, MIN_NODES_PER_BUMP};
use crate::error::{CslError, Result};
use crate::exponents::{classify_regime, rubin_special_points, weakni_exponents, ParamSet};
use crate::functionals::weighted::{
    ball_bound_ratio, morrey_control_ratio, rubin_weighted_ratio, ruiz_exterior, ruiz_interior,
    weakni_exterior_ratio, RatioOutcome,
};
use crate::functionals::{EnergyEvaluator, GridMeta};
use crate::grid::{composite_grid, RadialGrid, RadialGridFunction};

use super::ExperimentConfig;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CorpusSpec {
    pub seed: u64,
    pub count: usize,
    pub bumps_min: u32,
    pub bumps_max: u32,
    /// Bump centers, drawn log-uniformly.
    pub center_range: (f64, f64),
    /// Bump width as a fraction of the center, drawn log-uniformly;
    /// the upper bound must stay below 1 so supports avoid the origin.
    pub width_frac_range: (f64, f64),
    /// Bump amplitudes, drawn log-uniformly.
    pub amplitude_range: (f64, f64),
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            seed: 0x636f756c6f6d62,
            count: 200,
            bumps_min: 1,
            bumps_max: 4,
            center_range: (0.5, 16.0),
            width_frac_range: (0.1, 0.4),
            amplitude_range: (0.1, 10.0),
        }
    }
}

impl CorpusSpec {
    pub fn validate(&self) -> Result<()> {
        let ordered = |(lo, hi): (f64, f64)| lo > 0.0 && hi >= lo && hi.is_finite();
        if self.count < 2 {
            return Err(CslError::InvalidParams(format!(
                "corpus needs at least 2 functions, got {}",
                self.count
            )));
        }
        if self.bumps_min < 1 || self.bumps_max < self.bumps_min {
            return Err(CslError::InvalidParams(format!(
                "bump count range [{}, {}] is empty or starts at 0",
                self.bumps_min, self.bumps_max
            )));
        }
        if !ordered(self.center_range)
            || !ordered(self.width_frac_range)
            || !ordered(self.amplitude_range)
        {
            return Err(CslError::InvalidParams(
                "corpus ranges must be positive, finite and ordered".into(),
            ));
        }
        if self.width_frac_range.1 >= 1.0 {
            return Err(CslError::InvalidParams(format!(
                "width fraction must stay below 1, got upper bound {}",
                self.width_frac_range.1
            )));
        }
        Ok(())
    }
}

/// One shared grid resolving every bump the spec can draw: geometric
/// spacing fine enough for the narrowest width fraction, extended
/// outward for the nonlocal seminorm tail when s < 1.
pub fn corpus_grid(d: u32, s: f64, spec: &CorpusSpec) -> Result<Arc<RadialGrid>> {
    spec.validate()?;
    let f_min = spec.width_frac_range.0;
    let f_max = spec.width_frac_range.1;
    let window_decades = ((1.0 + f_min) / (1.0 - f_min)).log10();
    let per_decade = (1.15 * MIN_NODES_PER_BUMP as f64 / window_decades).ceil() as usize;
    let support_lo = spec.center_range.0 * (1.0 - f_max);
    let support_hi = spec.center_range.1 * (1.0 + f_max);
    let r_lo = support_lo / 20.0;
    let mut r_hi = 4.0 * support_hi;
    if s < 1.0 {
        // A 5% truncation target is plenty for factor-level spread
        // checks; the cap keeps the far field at a few dozen nodes.
        let factor = 0.05f64.powf(-0.5 / s).min(400.0);
        r_hi = r_hi.max(support_hi + spec.center_range.1 * f_max * factor);
    }
    composite_grid(d, r_lo, r_hi, per_decade, &[], 0)
}

fn log_uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    lo * (hi / lo).powf(rng.gen::<f64>())
}

/// Deterministic function i of the corpus: all randomness comes from
/// stream i of the seeded generator, independent of evaluation order.
pub fn corpus_function(
    spec: &CorpusSpec,
    grid: &Arc<RadialGrid>,
    index: usize,
) -> Result<(RadialGridFunction, Vec<BumpSpec>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64 + 1);
    let n_bumps = rng.gen_range(spec.bumps_min..=spec.bumps_max);
    let mut f = RadialGridFunction::zero(grid.clone());
    let mut bumps = Vec::with_capacity(n_bumps as usize);
    for _ in 0..n_bumps {
        let center = log_uniform(&mut rng, spec.center_range);
        let width = center * log_uniform(&mut rng, spec.width_frac_range);
        let lambda = log_uniform(&mut rng, spec.amplitude_range);
        let bump = BumpSpec { lambda, center, width, profile: Profile::default() };
        f = f.add(&bump.sample(grid)?)?;
        bumps.push(bump);
    }
    Ok((f, bumps))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CorpusStats {
    pub max: f64,
    pub argmax_index: usize,
    pub median: f64,
    /// max / median; the boundedness heuristic compares this against
    /// the configured spread factor.
    pub spread: f64,
    pub bounded: bool,
}

fn corpus_stats(values: &[f64], spread_factor: f64) -> Result<CorpusStats> {
    if values.len() < 2 {
        return Err(CslError::InvalidParams("need at least 2 corpus values".into()));
    }
    let mut argmax = 0usize;
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() || *v < 0.0 {
            return Err(CslError::InvalidParams(format!(
                "corpus value {v} at index {i} is not a finite nonnegative number"
            )));
        }
        if *v > values[argmax] {
            argmax = i;
        }
    }
    let max = values[argmax];
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median =
        if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };
    let spread = if median > 0.0 { max / median } else { f64::MAX };
    Ok(CorpusStats {
        max,
        argmax_index: argmax,
        median,
        spread,
        bounded: spread < spread_factor,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusReport {
    pub schema: u32,
    pub params: ParamSet,
    pub p: f64,
    pub spec: CorpusSpec,
    pub grid: GridMeta,
    pub config: ExperimentConfig,
    /// Quotient of function i, in index order.
    pub values: Vec<f64>,
    pub stats: CorpusStats,
    /// Bump recipe of the corpus maximizer.
    pub argmax_descriptor: Vec<BumpSpec>,
}

/// Evaluates the interpolation quotient over the corpus at a fixed p
/// and reports the spread statistics that witness boundedness.
pub fn run_boundedness(
    params: &ParamSet,
    p: f64,
    spec: &CorpusSpec,
    cfg: &ExperimentConfig,
) -> Result<CorpusReport> {
    if params.is_critical_q() {
        return Err(params.critical_q_error());
    }
    let regime = classify_regime(params);
    if !regime.p_interval.contains(p) {
        return Err(CslError::OutsideValidity {
            p,
            detail: format!("{:?} regime admits p in {}", regime.regime, regime.p_interval.describe()),
        });
    }
    let grid = corpus_grid(params.d, params.s, spec)?;
    let ev = EnergyEvaluator::new(params, &grid)?;
    let values: Vec<f64> = (0..spec.count)
        .into_par_iter()
        .map(|i| {
            let (f, _) = corpus_function(spec, &grid, i)?;
            ev.quotient(&f, p)
        })
        .collect::<Result<_>>()?;
    let stats = corpus_stats(&values, cfg.spread_factor)?;
    let (_, argmax_descriptor) = corpus_function(spec, &grid, stats.argmax_index)?;
    Ok(CorpusReport {
        schema: 1,
        params: *params,
        p,
        spec: *spec,
        grid: GridMeta::of(&grid),
        config: *cfg,
        values,
        stats,
        argmax_descriptor,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    /// Human-readable parameter point of the inequality instance.
    pub detail: String,
    pub stats: CorpusStats,
    /// Functions whose ratio degenerated to 0/0 (counted, not failed).
    pub n_degenerate: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightedReport {
    pub schema: u32,
    pub params: ParamSet,
    pub spec: CorpusSpec,
    pub grid: GridMeta,
    pub config: ExperimentConfig,
    /// Ball radii each ratio is maximized over.
    pub r_values: Vec<f64>,
    /// Weight perturbations for the interaction-controlled integrals.
    pub eps_values: Vec<f64>,
    pub checks: Vec<InequalityCheck>,
    pub skipped: Vec<String>,
}

/// The refined-exponent quotient family over the corpus, one check per
/// perturbation value; defined only on the critical coupling.
pub fn run_refined(
    params: &ParamSet,
    eps_values: &[f64],
    spec: &CorpusSpec,
    cfg: &ExperimentConfig,
) -> Result<WeightedReport> {
    if !params.is_critical_q() {
        return Err(CslError::Refused(format!(
            "the refined quotient family lives on the critical coupling q(d-2s) = d+alpha; \
             got q(d-2s) = {}, d+alpha = {}",
            params.q * (params.d as f64 - 2.0 * params.s),
            params.d as f64 + params.alpha
        )));
    }
    if eps_values.is_empty() {
        return Err(CslError::InvalidParams("need at least one perturbation value".into()));
    }
    let grid = corpus_grid(params.d, params.s, spec)?;
    let ev = EnergyEvaluator::new(params, &grid)?;
    let mut checks = Vec::with_capacity(eps_values.len());
    for &eps in eps_values {
        let values: Vec<f64> = (0..spec.count)
            .into_par_iter()
            .map(|i| {
                let (f, _) = corpus_function(spec, &grid, i)?;
                ev.refined_quotient(&f, eps)
            })
            .collect::<Result<_>>()?;
        checks.push(InequalityCheck {
            name: "refined_quotient".into(),
            detail: format!("eps={eps}"),
            stats: corpus_stats(&values, cfg.spread_factor)?,
            n_degenerate: 0,
        });
    }
    Ok(WeightedReport {
        schema: 1,
        params: *params,
        spec: *spec,
        grid: GridMeta::of(&grid),
        config: *cfg,
        r_values: Vec::new(),
        eps_values: eps_values.to_vec(),
        checks,
        skipped: Vec::new(),
    })
}

/// Per-function sup over the radius grid of a ratio, tracking how many
/// functions degenerated (zero mass on the probed region).
fn sup_over_radii(
    outcomes: impl Iterator<Item = Result<RatioOutcome>>,
) -> Result<(f64, bool)> {
    let mut sup = 0.0f64;
    let mut any = false;
    for o in outcomes {
        let o = o?;
        if !o.degenerate {
            any = true;
            sup = sup.max(o.value);
        }
    }
    Ok((sup, !any))
}

/// Runs the weighted-inequality ratio suite over the corpus: the
/// interaction-controlled exterior/interior integrals and ball bound
/// (swept over R and the weight perturbation), the weighted Lebesgue
/// estimates at their distinguished parameter points, and the exterior
/// decay bound at the ends of its p-range. Inapplicable hypotheses are
/// listed in `skipped` rather than failing the suite.
pub fn run_weighted_checks(
    params: &ParamSet,
    spec: &CorpusSpec,
    cfg: &ExperimentConfig,
) -> Result<WeightedReport> {
    let grid = corpus_grid(params.d, params.s, spec)?;
    let ev = EnergyEvaluator::new(params, &grid)?;
    let d = params.d;
    let (s, alpha, q) = (params.s, params.alpha, params.q);
    let r_values: Vec<f64> = (0..9).map(|k| 0.25 * 2.0f64.powi(k)).collect();
    let eps_values = vec![0.05, 0.1, 0.2];

    // Energies per function, computed once and shared by every check.
    let per_fn: Vec<(RadialGridFunction, f64, f64)> = (0..spec.count)
        .into_par_iter()
        .map(|i| {
            let (f, _) = corpus_function(spec, &grid, i)?;
            let semi = ev.seminorm_sq(&f)?;
            let coul = ev.coulomb(&f)?;
            Ok((f, semi, coul))
        })
        .collect::<Result<_>>()?;

    let mut checks = Vec::new();
    let mut skipped = Vec::new();

    let push_check = |name: &str,
                          detail: String,
                          values: Vec<(f64, bool)>,
                          checks: &mut Vec<InequalityCheck>|
     -> Result<()> {
        let vals: Vec<f64> = values.iter().map(|(v, _)| *v).collect();
        let n_degenerate = values.iter().filter(|(_, deg)| *deg).count();
        checks.push(InequalityCheck {
            name: name.to_string(),
            detail,
            stats: corpus_stats(&vals, cfg.spread_factor)?,
            n_degenerate,
        });
        Ok(())
    };

    for &eps in &eps_values {
        let ext: Vec<(f64, bool)> = per_fn
            .iter()
            .map(|(f, _, coul)| {
                sup_over_radii(
                    r_values.iter().map(|&r| ruiz_exterior(f, q, alpha, eps, r, *coul)),
                )
            })
            .collect::<Result<_>>()?;
        push_check("ruiz_exterior", format!("eps={eps}, sup over R"), ext, &mut checks)?;
        let int: Vec<(f64, bool)> = per_fn
            .iter()
            .map(|(f, _, coul)| {
                sup_over_radii(
                    r_values.iter().map(|&r| ruiz_interior(f, q, alpha, eps, r, *coul)),
                )
            })
            .collect::<Result<_>>()?;
        push_check("ruiz_interior", format!("eps={eps}, sup over R"), int, &mut checks)?;
    }

    let ball: Vec<(f64, bool)> = per_fn
        .iter()
        .map(|(f, _, coul)| {
            sup_over_radii(r_values.iter().map(|&r| ball_bound_ratio(f, q, alpha, r, *coul)))
        })
        .collect::<Result<_>>()?;
    push_check("ball_bound", "sup over R".to_string(), ball, &mut checks)?;

    if params.is_critical_q() && 2.0 * s < d as f64 {
        let morrey: Vec<(f64, bool)> = per_fn
            .iter()
            .map(|(f, _, coul)| {
                let o = morrey_control_ratio(f, s, alpha, *coul)?;
                Ok((o.value, o.degenerate))
            })
            .collect::<Result<_>>()?;
        push_check("morrey_control", "origin-centered".to_string(), morrey, &mut checks)?;
    } else {
        skipped.push(
            "morrey_control: applies on the critical coupling with 2s < d only".to_string(),
        );
    }

    if d >= 2 && 2.0 * s < d as f64 {
        for (name, pt) in rubin_special_points(d, s)? {
            let vals: Vec<(f64, bool)> = per_fn
                .iter()
                .map(|(f, semi, _)| {
                    let o = rubin_weighted_ratio(f, pt.r, pt.beta, *semi)?;
                    Ok((o.value, o.degenerate))
                })
                .collect::<Result<_>>()?;
            push_check(
                "rubin",
                format!("{name}: r={:.6}, beta={:.6}", pt.r, pt.beta),
                vals,
                &mut checks,
            )?;
        }
    } else {
        skipped.push("rubin: needs d >= 2 and 2s < d".to_string());
    }

    if d >= 2 && s <= 0.5 {
        let df = d as f64;
        let p_lo = 2.0 * df / (df - 2.0 * s);
        let mut p_points = vec![p_lo];
        if s < 0.5 {
            p_points.push(2.0 / (1.0 - 2.0 * s));
        } else {
            p_points.push(2.0 * p_lo);
        }
        for p in p_points {
            let we = weakni_exponents(d, s, p)?;
            let vals: Vec<(f64, bool)> = per_fn
                .iter()
                .map(|(f, semi, _)| {
                    sup_over_radii(
                        r_values.iter().map(|&r| weakni_exterior_ratio(f, s, p, r, *semi)),
                    )
                })
                .collect::<Result<_>>()?;
            push_check(
                "weakni",
                format!("p={p:.6}, exterior exponent {:.6}, sup over R", we.exterior_exponent),
                vals,
                &mut checks,
            )?;
        }
    } else {
        skipped.push("weakni: needs d >= 2 and s <= 1/2".to_string());
    }

    Ok(WeightedReport {
        schema: 1,
        params: *params,
        spec: *spec,
        grid: GridMeta::of(&grid),
        config: *cfg,
        r_values,
        eps_values,
        checks,
        skipped,
    })
}
