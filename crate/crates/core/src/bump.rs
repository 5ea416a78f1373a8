//! Compactly supported annular profiles, towers of them at
//! geometrically growing radii, and a 1-D translated-lattice surrogate
//! used to check linear-in-count energy growth.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{CslError, Result};
use crate::grid::{RadialGrid, RadialGridFunction};

/// Minimum node count across a bump window; below this the sampled
/// profile is too coarse for the quadrature rates the tests expect.
pub const MIN_NODES_PER_BUMP: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// eta(t) = (1 - t^2)^k on |t| <= 1, zero outside. k >= 4 keeps the
    /// profile C^3 at the support edge so quadrature error, not profile
    /// roughness, limits accuracy.
    PolyBump { k: u32 },
}

impl Profile {
    pub fn validate(&self) -> Result<()> {
        match self {
            Profile::PolyBump { k } if *k < 4 => Err(CslError::InvalidParams(format!(
                "polynomial bump needs smoothness degree k >= 4, got {k}"
            ))),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Profile::PolyBump { k } => {
                let q = 1.0 - t * t;
                if q <= 0.0 {
                    0.0
                } else {
                    q.powi(*k as i32)
                }
            }
        }
    }
}

impl Default for Profile {
    fn default() -> Self {
        Profile::PolyBump { k: 4 }
    }
}

/// One annular bump lambda * eta((r - center) / width).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BumpSpec {
    pub lambda: f64,
    pub center: f64,
    pub width: f64,
    pub profile: Profile,
}

impl BumpSpec {
    pub fn validate(&self) -> Result<()> {
        self.profile.validate()?;
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(CslError::InvalidParams(format!(
                "bump width must be positive, got {}",
                self.width
            )));
        }
        if !(self.center > self.width) {
            return Err(CslError::InvalidParams(format!(
                "bump support must stay away from the origin: need center > width, got center={} width={}",
                self.center, self.width
            )));
        }
        if !self.lambda.is_finite() {
            return Err(CslError::InvalidParams("bump amplitude must be finite".into()));
        }
        Ok(())
    }

    pub fn window(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.lambda * self.profile.eval((r - self.center) / self.width)
    }

    pub fn sample(&self, grid: &Arc<RadialGrid>) -> Result<RadialGridFunction> {
        self.validate()?;
        let (lo, hi) = self.window();
        if hi > grid.r_max() * (1.0 + 1e-12) || lo < grid.r_min() - 1e-12 * grid.r_max() {
            return Err(CslError::Grid(format!(
                "bump support [{lo}, {hi}] exceeds grid span [{}, {}]",
                grid.r_min(),
                grid.r_max()
            )));
        }
        let covered = grid.count_in(lo, hi);
        if covered < MIN_NODES_PER_BUMP {
            return Err(CslError::Grid(format!(
                "bump window [{lo}, {hi}] covered by {covered} nodes, need at least {MIN_NODES_PER_BUMP}; refine the grid"
            )));
        }
        let values = grid.nodes().iter().map(|&r| self.eval(r)).collect();
        RadialGridFunction::new(grid.clone(), values)
    }
}

/// Tower of bumps at radii R^k, k = 1..=count, with amplitude R^{k beta}
/// and width R^{k gamma}. With the flatness exponents of the annular
/// test families, each bump contributes equally to the quadratic
/// energies, so totals grow linearly in the count.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MultibumpSpec {
    pub base_radius: f64,
    pub count: u32,
    pub beta: f64,
    pub gamma: f64,
    pub profile: Profile,
}

impl MultibumpSpec {
    /// The individual bumps, after checking pairwise disjoint supports.
    pub fn bumps(&self) -> Result<Vec<BumpSpec>> {
        if !(self.base_radius > 1.0) {
            return Err(CslError::InvalidParams(format!(
                "tower base radius must exceed 1, got {}",
                self.base_radius
            )));
        }
        if self.count == 0 {
            return Err(CslError::InvalidParams("tower needs at least one bump".into()));
        }
        let r = self.base_radius;
        let bumps: Vec<BumpSpec> = (1..=self.count)
            .map(|k| BumpSpec {
                lambda: r.powf(k as f64 * self.beta),
                center: r.powi(k as i32),
                width: r.powf(k as f64 * self.gamma),
                profile: self.profile,
            })
            .collect();
        for b in &bumps {
            b.validate()?;
        }
        for k in 0..bumps.len() - 1 {
            let (_, hi) = bumps[k].window();
            let (lo, _) = bumps[k + 1].window();
            if hi >= lo {
                return Err(CslError::InvalidParams(format!(
                    "bumps {} and {} overlap: window up to {hi} meets window from {lo}; grow the base radius",
                    k + 1,
                    k + 2
                )));
            }
        }
        Ok(bumps)
    }

    pub fn windows(&self) -> Result<Vec<(f64, f64)>> {
        Ok(self.bumps()?.iter().map(|b| b.window()).collect())
    }

    pub fn sample(&self, grid: &Arc<RadialGrid>) -> Result<RadialGridFunction> {
        let mut sum = RadialGridFunction::zero(grid.clone());
        for b in self.bumps()? {
            sum = sum.add(&b.sample(grid)?)?;
        }
        Ok(sum)
    }
}

/// Report for the 1-D translated-bump lattice surrogate. The genuine
/// object lives on a periodic lattice in full space; this surrogate
/// replaces it with equal bumps on a line, an interaction kernel
/// |x - y|^{-(d - alpha)}, and a difference-quotient kernel
/// |x - y|^{-(1 + 2 s)}, and records how the three discrete energies
/// grow with the bump count.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeSurrogateReport {
    /// Always true: these numbers quantify the surrogate, not the
    /// full-space object.
    pub surrogate: bool,
    pub d: u32,
    pub alpha: f64,
    pub s: f64,
    pub p: f64,
    pub width: f64,
    pub separation: f64,
    pub m_values: Vec<u32>,
    pub lp_p: Vec<f64>,
    pub seminorm_sq: Vec<f64>,
    pub interaction: Vec<f64>,
    /// max over m of |lp_p(m) / (m * lp_p(1)) - 1|; additivity is exact
    /// up to rounding because every bump repeats the same node pattern.
    pub max_lp_additivity_dev: f64,
    /// max over m of |seminorm_sq(m) / (m * seminorm_sq(1)) - 1|.
    pub max_seminorm_ratio_dev: f64,
    /// max over m of interaction(m) / (m * interaction(1)) - 1; the
    /// cross terms are positive, so this measures superadditivity.
    pub max_interaction_excess: f64,
}

/// Build the lattice surrogate: `m_max` identical bumps of unit height,
/// centers spaced `separation` apart, each sampled on `nodes_per_bump`
/// uniform nodes across its support.
pub fn translate_bump_lattice(
    d: u32,
    alpha: f64,
    s: f64,
    q: f64,
    p: f64,
    width: f64,
    separation: f64,
    m_max: u32,
    nodes_per_bump: usize,
    profile: Profile,
) -> Result<LatticeSurrogateReport> {
    profile.validate()?;
    if !(d >= 1 && alpha > 0.0 && alpha < d as f64) {
        return Err(CslError::InvalidParams(format!(
            "interaction exponent needs 0 < alpha < d, got alpha={alpha}, d={d}"
        )));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(CslError::InvalidParams(format!(
            "difference-quotient order needs 0 < s < 1, got {s}"
        )));
    }
    if !(separation > 2.0 * width && width > 0.0) {
        return Err(CslError::InvalidParams(format!(
            "need separation > 2 * width for disjoint supports, got separation={separation}, width={width}"
        )));
    }
    if m_max == 0 || nodes_per_bump < MIN_NODES_PER_BUMP {
        return Err(CslError::InvalidParams(format!(
            "need m_max >= 1 and nodes_per_bump >= {MIN_NODES_PER_BUMP}"
        )));
    }

    let nb = nodes_per_bump;
    let h = 2.0 * width / (nb - 1) as f64;
    let kernel_int = |dx: f64| dx.abs().powf(-((d as f64) - alpha));
    let kernel_semi = |dx: f64| dx.abs().powf(-(1.0 + 2.0 * s));

    let build = |m: u32| -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut xs = Vec::with_capacity(m as usize * nb);
        let mut vals = Vec::with_capacity(m as usize * nb);
        let mut ws = Vec::with_capacity(m as usize * nb);
        for j in 0..m {
            let c = separation * (j + 1) as f64;
            for i in 0..nb {
                let x = c - width + i as f64 * h;
                xs.push(x);
                vals.push(profile.eval((x - c) / width));
                ws.push(if i == 0 || i + 1 == nb { 0.5 * h } else { h });
            }
        }
        (xs, vals, ws)
    };

    let energies = |m: u32| -> (f64, f64, f64) {
        let (xs, vals, ws) = build(m);
        let n = xs.len();
        let lp: f64 = vals.iter().zip(&ws).map(|(v, w)| v.abs().powf(p) * w).sum();
        let g: Vec<f64> = vals.iter().map(|v| v.abs().powf(q)).collect();
        let mut semi = 0.0;
        let mut inter = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let dx = xs[j] - xs[i];
                let dv = vals[i] - vals[j];
                semi += 2.0 * dv * dv * kernel_semi(dx) * ws[i] * ws[j];
                inter += 2.0 * g[i] * g[j] * kernel_int(dx) * ws[i] * ws[j];
            }
        }
        (lp, semi, inter)
    };

    let m_values: Vec<u32> = (1..=m_max).collect();
    let mut lp_p = Vec::new();
    let mut seminorm_sq = Vec::new();
    let mut interaction = Vec::new();
    for &m in &m_values {
        let (a, b, c) = energies(m);
        lp_p.push(a);
        seminorm_sq.push(b);
        interaction.push(c);
    }

    let dev = |series: &[f64], signed: bool| -> f64 {
        let single = series[0];
        series
            .iter()
            .zip(&m_values)
            .map(|(v, &m)| {
                let r = v / (m as f64 * single) - 1.0;
                if signed {
                    r
                } else {
                    r.abs()
                }
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };

    Ok(LatticeSurrogateReport {
        surrogate: true,
        d,
        alpha,
        s,
        p,
        width,
        separation,
        max_lp_additivity_dev: dev(&lp_p, false),
        max_seminorm_ratio_dev: dev(&seminorm_sq, false),
        max_interaction_excess: dev(&interaction, true),
        m_values,
        lp_p,
        seminorm_sq,
        interaction,
    })
}
