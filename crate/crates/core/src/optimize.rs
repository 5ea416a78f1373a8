//! Search for maximizers of the interpolation quotient by tangent-
//! projected gradient ascent under the double normalization
//! seminorm^2 = 1, interaction = 1.
//!
//! The iterate's values live on a fixed reference grid while dilation
//! is carried as a separate scale factor: both energies are exactly
//! homogeneous under node scaling, so the two-parameter amplitude +
//! dilation renormalization reduces to a 2x2 log-linear solve and
//! never resamples the function or reassembles a kernel matrix. The
//! quotient is invariant under both symmetries, so ascent progress is
//! measured directly by Q.
//!
//! Directions are taken in a radial first-order Sobolev metric
//! (stiffness plus mass, assembled on the same grid) rather than the
//! raw coordinate inner product: the measure weights vary over many
//! orders of magnitude and the constraint curvature scales like the
//! inverse square of the local spacing, so the unpreconditioned flow
//! needs step sizes far below anything useful. The metric is a fixed
//! symmetric positive tridiagonal solve per gradient, and the
//! constraint projection is carried out in the same inner product, so
//! stationarity still means the objective gradient lies in the span of
//! the two constraint gradients.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::io::Write;
use std::sync::Arc;

use crate::bump::{BumpSpec, Profile};
use crate::error::{CslError, Result};
use crate::exponents::{classify_regime, gn_exponents, ExponentBundle, ParamSet};
use crate::functionals::{omega, slopes, EnergyEvaluator, GridMeta};
use crate::grid::{composite_grid, RadialGrid, RadialGridFunction};

/// Magnitude floor inside fractional-power gradient factors |u|^{e}
/// with e < 1; zeros themselves keep a zero sub-gradient via the sign
/// factor.
const POWER_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct Gradients {
    /// d/du of ||u||_p^p (sphere factor included).
    pub lp: Vec<f64>,
    /// d/du of the squared order-s seminorm.
    pub seminorm: Vec<f64>,
    /// d/du of the interaction energy.
    pub coulomb: Vec<f64>,
    /// Set when f is identically zero; all gradients vanish.
    pub degenerate: bool,
}

/// First variations of the three energies at f, differentiating the
/// discrete formulas exactly. Fractional powers use a sub-gradient
/// convention at zeros: the sign factor makes the gradient vanish
/// there.
pub fn gradients(
    ev: &EnergyEvaluator,
    f: &RadialGridFunction,
    p: f64,
) -> Result<Gradients> {
    ev.lp_norm(f, p)?;
    let n = f.values.len();
    if f.is_zero() {
        return Ok(Gradients {
            lp: vec![0.0; n],
            seminorm: vec![0.0; n],
            coulomb: vec![0.0; n],
            degenerate: true,
        });
    }
    if !f.vanishes_at_outer_edge() {
        return Err(CslError::Grid(
            "gradients need the iterate to vanish at the outer grid edge".into(),
        ));
    }
    let params = &ev.params;
    let om = omega(params.d);
    let q = params.q;
    let u = &f.values;
    let w = f.grid.weights();
    let r = f.grid.nodes();

    let lp: Vec<f64> = u
        .iter()
        .zip(w)
        .map(|(&ui, &wi)| {
            om * p * ui.abs().max(POWER_FLOOR).powf(p - 1.0) * ui.signum() * wi
        })
        .collect();

    let seminorm = match ev.gagliardo_matrix() {
        None => {
            let dd = params.d as i32;
            let mut g = vec![0.0; n];
            for i in 0..n - 1 {
                let h = r[i + 1] - r[i];
                let t = (u[i + 1] - u[i]) / h;
                let m = (r[i + 1].powi(dd) - r[i].powi(dd)) / dd as f64;
                let c = 2.0 * om * t * m / h;
                g[i + 1] += c;
                g[i] -= c;
            }
            g
        }
        Some(k) => {
            let kw = k.matvec(w);
            let uw: Vec<f64> = u.iter().zip(w).map(|(u, w)| u * w).collect();
            let kuw = k.matvec(&uw);
            let mut g: Vec<f64> =
                (0..n).map(|i| 4.0 * w[i] * (u[i] * kw[i] - kuw[i])).collect();
            // Same-cell singular mass contracted with centered slopes.
            let sl = slopes(f);
            for i in 0..n {
                let (lo, hi) = if i == 0 {
                    (0, 1)
                } else if i + 1 == n {
                    (n - 2, n - 1)
                } else {
                    (i - 1, i + 1)
                };
                let c = 2.0 * sl[i] * k.diag_cell_mass[i] / (r[hi] - r[lo]);
                g[hi] += c;
                g[lo] -= c;
            }
            g
        }
    };

    let gw: Vec<f64> = u.iter().zip(w).map(|(u, w)| u.abs().powf(q) * w).collect();
    let kgw = ev.riesz_matrix().matvec(&gw);
    let coulomb: Vec<f64> = (0..n)
        .map(|j| {
            2.0 * q
                * u[j].abs().max(POWER_FLOOR).powf(q - 1.0)
                * u[j].signum()
                * w[j]
                * kgw[j]
        })
        .collect();

    Ok(Gradients { lp, seminorm, coulomb, degenerate: false })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Factored radial Sobolev metric M = stiffness + mass on the grid,
/// with the outer node decoupled so directions keep compact support.
/// Strictly diagonally dominant, so the LDL^T factorization needs no
/// pivoting.
struct Metric {
    sub: Vec<f64>,
    dinv: Vec<f64>,
}

impl Metric {
    fn new(grid: &RadialGrid, d: u32) -> Self {
        let r = grid.nodes();
        let w = grid.weights();
        let n = r.len();
        let om = omega(d);
        let dd = d as i32;
        let mut diag: Vec<f64> = w.iter().map(|&wi| 2.0 * om * wi).collect();
        let mut off = vec![0.0f64; n - 1];
        // Dirichlet-reduced stiffness: the last node is pinned at zero,
        // so its row decouples and the final cell only loads node n-2.
        for i in 0..n - 1 {
            let h = r[i + 1] - r[i];
            let m = (r[i + 1].powi(dd) - r[i].powi(dd)) / dd as f64;
            let k = 2.0 * om * m / (h * h);
            diag[i] += k;
            if i + 1 < n - 1 {
                diag[i + 1] += k;
                off[i] -= k;
            }
        }
        diag[n - 1] = 1.0;
        let mut sub = vec![0.0f64; n - 1];
        let mut dinv = vec![0.0f64; n];
        let mut piv = diag[0];
        dinv[0] = 1.0 / piv;
        for i in 1..n {
            let l = off[i - 1] * dinv[i - 1];
            sub[i - 1] = l;
            piv = diag[i] - l * off[i - 1];
            dinv[i] = 1.0 / piv;
        }
        Metric { sub, dinv }
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let mut x = rhs.to_vec();
        for i in 1..n {
            x[i] -= self.sub[i - 1] * x[i - 1];
        }
        for i in 0..n {
            x[i] *= self.dinv[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.sub[i] * x[i + 1];
        }
        x
    }
}

/// Central-difference (with one Richardson pass) check of the three
/// analytic gradients along seeded random directions; returns the
/// worst relative error.
pub fn fd_directional_check(
    ev: &EnergyEvaluator,
    f: &RadialGridFunction,
    p: f64,
    n_directions: usize,
    seed: u64,
) -> Result<f64> {
    let g = gradients(ev, f, p)?;
    if g.degenerate {
        return Err(CslError::InvalidParams(
            "finite-difference check needs a nonzero function".into(),
        ));
    }
    let n = f.values.len();
    let scale = f.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let om = omega(ev.params.d);
    let energies = |vals: Vec<f64>| -> Result<[f64; 3]> {
        let t = RadialGridFunction::new(f.grid.clone(), vals)?;
        Ok([
            om * crate::functionals::lp_pow(&t, p),
            ev.seminorm_sq(&t)?,
            ev.coulomb(&t)?,
        ])
    };
    let base = energies(f.values.clone())?;
    let mut worst = 0.0f64;
    for k in 0..n_directions {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64 + 1);
        let mut v: Vec<f64> = (0..n).map(|_| scale * rng.gen_range(-1.0..1.0)).collect();
        // Keep trial functions compactly supported.
        v[n - 1] = 0.0;
        let central = |h: f64| -> Result<[f64; 3]> {
            let plus =
                energies(f.values.iter().zip(&v).map(|(u, d)| u + h * d).collect())?;
            let minus =
                energies(f.values.iter().zip(&v).map(|(u, d)| u - h * d).collect())?;
            Ok([
                (plus[0] - minus[0]) / (2.0 * h),
                (plus[1] - minus[1]) / (2.0 * h),
                (plus[2] - minus[2]) / (2.0 * h),
            ])
        };
        let d1 = central(1e-6)?;
        let d2 = central(5e-7)?;
        let analytic = [dot(&g.lp, &v), dot(&g.seminorm, &v), dot(&g.coulomb, &v)];
        for i in 0..3 {
            let richardson = (4.0 * d2[i] - d1[i]) / 3.0;
            let denom = analytic[i].abs().max(1e-12 * base[i].abs() / scale.max(1e-300));
            worst = worst.max((richardson - analytic[i]).abs() / denom);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AscentConfig {
    pub max_iterations: usize,
    /// Convergence once the projected gradient norm falls below this
    /// fraction of the objective gradient norm.
    pub grad_tol: f64,
    pub armijo: f64,
    pub shrink: f64,
    /// Line-search attempts per iteration before declaring a stall.
    pub max_backtracks: usize,
    /// Allowed residual of the unit normalizations after each step.
    pub normalization_tol: f64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            grad_tol: 1e-6,
            armijo: 1e-4,
            shrink: 0.5,
            max_backtracks: 60,
            normalization_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AscentStatus {
    Converged,
    MaxIterations,
    Stalled,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HistoryEntry {
    pub iteration: usize,
    pub q: f64,
    pub step: f64,
    pub gradient_norm: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Normalization {
    pub seminorm_sq: f64,
    pub coulomb: f64,
}

#[derive(Debug, Clone)]
pub struct OptimizerState {
    /// Final candidate on its dilated grid.
    pub f: RadialGridFunction,
    pub params: ParamSet,
    pub p: f64,
    pub exponents: ExponentBundle,
    pub q_star: f64,
    pub status: AscentStatus,
    /// Last accepted step length.
    pub step: f64,
    pub history: Vec<HistoryEntry>,
    pub normalization: Normalization,
    /// Relative residual of the objective gradient against the span of
    /// the two constraint gradients, measured in the ascent metric
    /// (first-order optimality).
    pub stationarity_residual: f64,
    /// Cumulative dilation folded into the exported grid.
    pub dilation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AscentSummary {
    pub params: ParamSet,
    pub p: f64,
    pub q_star: f64,
    pub status: AscentStatus,
    pub iterations: usize,
    pub stationarity_residual: f64,
    pub normalization: Normalization,
    pub dilation: f64,
    pub grid: GridMeta,
    pub exponents: ExponentBundle,
    pub config: AscentConfig,
}

impl OptimizerState {
    pub fn summary(&self, cfg: &AscentConfig) -> AscentSummary {
        AscentSummary {
            params: self.params,
            p: self.p,
            q_star: self.q_star,
            status: self.status,
            iterations: self.history.len().saturating_sub(1),
            stationarity_residual: self.stationarity_residual,
            normalization: self.normalization,
            dilation: self.dilation,
            grid: GridMeta::of(&self.f.grid),
            exponents: self.exponents.clone(),
            config: *cfg,
        }
    }
}

/// One JSON line per recorded iteration.
pub fn write_trace<W: Write>(state: &OptimizerState, mut w: W) -> Result<()> {
    for h in &state.history {
        serde_json::to_writer(&mut w, h)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Solves the 2x2 log-linear system for amplitude c and cumulative
/// dilation T restoring seminorm^2 = 1 and interaction = 1, given the
/// reference-grid energies. Exact in exponent arithmetic.
fn renormalize(params: &ParamSet, semi_ref: f64, coulomb_ref: f64) -> (f64, f64) {
    let d = params.d as f64;
    let (a11, a12) = (2.0, d - 2.0 * params.s);
    let (a21, a22) = (2.0 * params.q, d + params.alpha);
    let det = a11 * a22 - a12 * a21;
    let (b1, b2) = (-semi_ref.ln(), -coulomb_ref.ln());
    let ln_c = (b1 * a22 - a12 * b2) / det;
    let ln_t = (a11 * b2 - b1 * a21) / det;
    (ln_c.exp(), ln_t.exp())
}

struct Energies {
    lp: f64,
    semi: f64,
    coulomb: f64,
    q: f64,
}

/// Maximizes ||f||_p over the doubly normalized set by tangent-projected
/// gradient ascent with Armijo backtracking. Refuses interval endpoints:
/// whether the quotient is attained there is not settled, so the search
/// runs strictly inside the admissible range.
pub fn ascend(
    params: &ParamSet,
    p: f64,
    initial: &RadialGridFunction,
    cfg: &AscentConfig,
) -> Result<OptimizerState> {
    let regime = classify_regime(params);
    if !regime.p_interval.contains(p) {
        return Err(CslError::OutsideValidity {
            p,
            detail: format!(
                "{:?} regime admits p in {}",
                regime.regime,
                regime.p_interval.describe()
            ),
        });
    }
    if !regime.p_interval.contains_strictly(p) {
        return Err(CslError::Refused(format!(
            "p = {p} is an endpoint of the admissible interval {}; attainment there \
             is an open question, so ascent only runs strictly inside",
            regime.p_interval.describe()
        )));
    }
    let d = params.d as f64;
    let delta = d + params.alpha - params.q * (d - 2.0 * params.s);
    // The endpoint check already excludes the critical coupling (its
    // interval is a single point); this guards the renormalization.
    assert!(
        delta.abs() > 1e-12,
        "amplitude/dilation renormalization is singular at this coupling"
    );
    let (beta, gamma) = gn_exponents(params, p)?;
    if !initial.vanishes_at_outer_edge() {
        return Err(CslError::Grid(
            "initial iterate must vanish at the outer grid edge".into(),
        ));
    }
    let ev = EnergyEvaluator::new(params, &initial.grid)?;
    let grid = ev.grid.clone();
    let n = grid.len();
    let metric = Metric::new(&grid, params.d);

    let eval = |vals: &[f64]| -> Result<Energies> {
        let t = RadialGridFunction::new(grid.clone(), vals.to_vec())?;
        let lp = ev.lp_norm(&t, p)?;
        let semi = ev.seminorm_sq(&t)?;
        let coulomb = ev.coulomb(&t)?;
        if !(lp > 0.0 && semi > 0.0 && coulomb > 0.0) {
            return Err(CslError::DegenerateQuotient(format!(
                "ascent needs positive energies; got lp={lp}, seminorm_sq={semi}, \
                 interaction={coulomb}"
            )));
        }
        let q = lp / (semi.powf(0.5 * beta) * coulomb.powf(gamma));
        Ok(Energies { lp, semi, coulomb, q })
    };

    let mut u = initial.values.clone();
    let mut cur = eval(&u)?;
    let (c, mut dilation) = renormalize(params, cur.semi, cur.coulomb);
    for v in &mut u {
        *v *= c;
    }
    cur.lp *= c;
    cur.semi *= c * c;
    cur.coulomb *= c.powf(2.0 * params.q);

    let mut history =
        vec![HistoryEntry { iteration: 0, q: cur.q, step: 0.0, gradient_norm: 0.0 }];
    let mut status = AscentStatus::MaxIterations;
    let mut step = 0.0f64;
    let mut residual = f64::NAN;

    for it in 1..=cfg.max_iterations {
        let f = RadialGridFunction::new(grid.clone(), u.clone())?;
        let g = gradients(&ev, &f, p)?;
        // Objective gradient: d/du of ||u||_p from the lp^p variation.
        let s_lp = cur.lp.powf(1.0 - p) / p;
        let mut gl: Vec<f64> = g.lp.iter().map(|v| v * s_lp).collect();
        let mut gs = g.seminorm;
        let mut gd = g.coulomb;
        // The outer node stays pinned at zero (compact support).
        gl[n - 1] = 0.0;
        gs[n - 1] = 0.0;
        gd[n - 1] = 0.0;

        if !(norm(&gs) > 0.0 && norm(&gd) > 0.0) {
            return Err(CslError::DegenerateQuotient(
                "constraint gradients vanished during ascent".into(),
            ));
        }
        // Project the objective gradient onto the constraint tangent in
        // the metric inner product: Gram-Schmidt on the pairs (g, M^-1 g)
        // is the stable form of the 2x2 Gram solve, and the projected
        // direction M^-1 y keeps <gl, dir> = <y, M^-1 y> >= 0.
        let zl = metric.solve(&gl);
        let zs = metric.solve(&gs);
        let zd = metric.solve(&gd);
        let a1 = dot(&gs, &zs);
        let cd = dot(&gd, &zs) / a1;
        let g2: Vec<f64> = gd.iter().zip(&gs).map(|(v, w)| v - cd * w).collect();
        let z2: Vec<f64> = zd.iter().zip(&zs).map(|(v, w)| v - cd * w).collect();
        let a2 = dot(&g2, &z2);
        let t1 = dot(&gl, &zs) / a1;
        let t2 = if a2 > 1e-24 * dot(&gd, &zd) { dot(&gl, &z2) / a2 } else { 0.0 };
        let dir: Vec<f64> = (0..n).map(|i| zl[i] - t1 * zs[i] - t2 * z2[i]).collect();
        let slope = dot(&gl, &dir).max(0.0);
        let gl_sq = dot(&gl, &zl);
        residual = if gl_sq > 0.0 { (slope / gl_sq).sqrt() } else { 0.0 };
        if residual <= cfg.grad_tol {
            status = AscentStatus::Converged;
            break;
        }
        let gnorm = slope.sqrt();

        // Directional derivative of Q itself along dir (the constraint
        // terms drop out by tangency).
        let slope_q = slope * cur.q / cur.lp;
        let unorm = norm(&u);
        let mut eta = if step > 0.0 { 2.0 * step } else { 0.1 * unorm / norm(&dir) };
        let mut accepted = false;
        for _ in 0..cfg.max_backtracks {
            let trial: Vec<f64> =
                u.iter().zip(&dir).map(|(v, d)| v + eta * d).collect();
            match eval(&trial) {
                Ok(next) if next.q >= cur.q + cfg.armijo * eta * slope_q => {
                    u = trial;
                    cur = next;
                    let (c, t) = renormalize(params, cur.semi, cur.coulomb);
                    for v in &mut u {
                        *v *= c;
                    }
                    cur.lp *= c;
                    cur.semi *= c * c;
                    cur.coulomb *= c.powf(2.0 * params.q);
                    dilation = t;
                    step = eta;
                    history.push(HistoryEntry {
                        iteration: it,
                        q: cur.q,
                        step: eta,
                        gradient_norm: gnorm,
                    });
                    accepted = true;
                    break;
                }
                _ => eta *= cfg.shrink,
            }
        }
        if !accepted {
            status = AscentStatus::Stalled;
            break;
        }
    }

    let ds = d - 2.0 * params.s;
    let normalization = Normalization {
        seminorm_sq: cur.semi * dilation.powf(ds),
        coulomb: cur.coulomb * dilation.powf(d + params.alpha),
    };
    debug_assert!(
        (normalization.seminorm_sq - 1.0).abs() <= cfg.normalization_tol
            && (normalization.coulomb - 1.0).abs() <= cfg.normalization_tol
    );
    let f_final = RadialGridFunction::new(grid, u)?.rescaled(dilation, 1.0)?;
    Ok(OptimizerState {
        f: f_final,
        params: *params,
        p,
        exponents: ExponentBundle::compute(params, Some(p))?,
        q_star: cur.q,
        status,
        step,
        history,
        normalization,
        stationarity_residual: residual,
        dilation,
    })
}

/// Reference grid for optimizer runs: geometric, fine enough to
/// resolve the random starts.
pub fn default_grid(d: u32) -> Result<Arc<RadialGrid>> {
    composite_grid(d, 0.05, 40.0, 256, &[], 0)
}

/// Default start: a single annular bump at radius 1, width 1/2.
pub fn default_start(grid: &Arc<RadialGrid>) -> Result<RadialGridFunction> {
    BumpSpec { lambda: 1.0, center: 1.0, width: 0.5, profile: Profile::default() }
        .sample(grid)
}

/// Seeded random bump superposition for multi-start runs.
pub fn random_start(
    grid: &Arc<RadialGrid>,
    seed: u64,
    index: usize,
) -> Result<RadialGridFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    let log_uniform = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| -> f64 {
        lo * (hi / lo).powf(rng.gen::<f64>())
    };
    let count = rng.gen_range(1..=3u32);
    let mut f = RadialGridFunction::zero(grid.clone());
    for _ in 0..count {
        let center = log_uniform(&mut rng, 0.3, 3.0);
        let width = center * log_uniform(&mut rng, 0.16, 0.4);
        let lambda = log_uniform(&mut rng, 0.5, 2.0);
        let b = BumpSpec { lambda, center, width, profile: Profile::default() };
        f = f.add(&b.sample(grid)?)?;
    }
    Ok(f)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct StartSummary {
    pub start_index: usize,
    pub q_star: f64,
    pub status: AscentStatus,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct MultiStartOutcome {
    pub best: OptimizerState,
    pub summaries: Vec<StartSummary>,
    /// (max - min) / max over the final quotients.
    pub relative_spread: f64,
}

/// Runs ascent from the default bump plus seeded random starts and
/// keeps the best candidate. Starts run sequentially in index order.
pub fn multi_start(
    params: &ParamSet,
    p: f64,
    n_starts: usize,
    seed: u64,
    cfg: &AscentConfig,
) -> Result<MultiStartOutcome> {
    if n_starts < 1 {
        return Err(CslError::InvalidParams("need at least one start".into()));
    }
    let grid = default_grid(params.d)?;
    let mut summaries = Vec::with_capacity(n_starts);
    let mut best: Option<OptimizerState> = None;
    for k in 0..n_starts {
        let init =
            if k == 0 { default_start(&grid)? } else { random_start(&grid, seed, k)? };
        let state = ascend(params, p, &init, cfg)?;
        summaries.push(StartSummary {
            start_index: k,
            q_star: state.q_star,
            status: state.status,
            iterations: state.history.len().saturating_sub(1),
        });
        if best.as_ref().map_or(true, |b| state.q_star > b.q_star) {
            best = Some(state);
        }
    }
    let (lo, hi) = summaries
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), s| (lo.min(s.q_star), hi.max(s.q_star)));
    Ok(MultiStartOutcome {
        best: best.expect("n_starts >= 1"),
        summaries,
        relative_spread: (hi - lo) / hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Spacing;

    fn coarse_grid() -> Arc<RadialGrid> {
        composite_grid(3, 0.05, 20.0, 96, &[], 0).unwrap()
    }

    #[test]
    fn finite_differences_confirm_gradients() {
        // s < 1 exercises the kernel-matrix seminorm path, q = 2 and
        // p = 3.5 keep the integrands smooth.
        let params = ParamSet::new(3, 0.5, 2.0, 2.0).unwrap();
        let grid = coarse_grid();
        let f = default_start(&grid).unwrap();
        let ev = EnergyEvaluator::new(&params, &grid).unwrap();
        let worst = fd_directional_check(&ev, &f, 3.5, 8, 7).unwrap();
        assert!(worst < 1e-5, "worst relative error {worst}");
    }

    #[test]
    fn finite_differences_confirm_local_seminorm_gradient() {
        let params = ParamSet::new(3, 1.0, 2.0, 2.0).unwrap();
        let grid = coarse_grid();
        let f = default_start(&grid).unwrap();
        let ev = EnergyEvaluator::new(&params, &grid).unwrap();
        let worst = fd_directional_check(&ev, &f, 4.0, 8, 11).unwrap();
        assert!(worst < 1e-5, "worst relative error {worst}");
    }

    #[test]
    fn zero_function_degenerates() {
        let params = ParamSet::new(3, 0.5, 2.0, 2.0).unwrap();
        let grid = coarse_grid();
        let ev = EnergyEvaluator::new(&params, &grid).unwrap();
        let z = RadialGridFunction::zero(grid.clone());
        let g = gradients(&ev, &z, 3.0).unwrap();
        assert!(g.degenerate);
        assert!(g.lp.iter().chain(&g.seminorm).chain(&g.coulomb).all(|v| *v == 0.0));
    }

    #[test]
    fn ascent_is_monotone_and_normalized() {
        let params = ParamSet::new(3, 1.0, 2.0, 2.0).unwrap();
        let grid = coarse_grid();
        let init = default_start(&grid).unwrap();
        let cfg = AscentConfig { max_iterations: 60, ..AscentConfig::default() };
        let state = ascend(&params, 4.0, &init, &cfg).unwrap();
        assert!(state.history.windows(2).all(|w| w[1].q >= w[0].q));
        assert!(state.q_star >= state.history[0].q);
        assert!(state.history.len() > 1, "no step was ever accepted");
        assert!((state.normalization.seminorm_sq - 1.0).abs() < 1e-10);
        assert!((state.normalization.coulomb - 1.0).abs() < 1e-10);
        // The exported candidate carries the dilation in its grid.
        assert!(state.f.grid.r_max() > 0.0 && state.dilation > 0.0);
    }

    #[test]
    fn ascent_refuses_endpoints_and_outside() {
        let params = ParamSet::new(3, 1.0, 2.0, 2.0).unwrap();
        let grid = RadialGrid::new(3, 12.0, 200, Spacing::Geometric { r_min: 0.05 }).unwrap();
        let init = default_start(&grid).unwrap();
        let cfg = AscentConfig::default();
        // Lower endpoint p = 3 and upper endpoint p = 6 are refused.
        assert!(matches!(
            ascend(&params, 3.0, &init, &cfg),
            Err(CslError::Refused(_))
        ));
        assert!(matches!(
            ascend(&params, 6.0, &init, &cfg),
            Err(CslError::Refused(_))
        ));
        assert!(matches!(
            ascend(&params, 7.0, &init, &cfg),
            Err(CslError::OutsideValidity { .. })
        ));
        // The critical coupling's interval is a single point, so every
        // p lands on an endpoint or outside; never ascends there.
        let critical = ParamSet::new(3, 1.0, 2.0, 5.0).unwrap();
        assert!(critical.is_critical_q());
        assert!(ascend(&critical, 6.0, &init, &cfg).is_err());
    }

    #[test]
    fn trace_is_one_json_object_per_line() {
        let params = ParamSet::new(3, 1.0, 2.0, 2.0).unwrap();
        let grid = coarse_grid();
        let init = default_start(&grid).unwrap();
        let cfg = AscentConfig { max_iterations: 5, ..AscentConfig::default() };
        let state = ascend(&params, 4.0, &init, &cfg).unwrap();
        let mut buf = Vec::new();
        write_trace(&state, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), state.history.len());
        for line in lines {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(v.get("iteration").is_some() && v.get("q").is_some());
        }
    }
}
