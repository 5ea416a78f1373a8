//! The three energies of the theory and the quotient they form.
//!
//! Conventions (fixed once, everything downstream is constant-free):
//! the L^p norm carries the unit-sphere area omega_{d-1}; the order-s
//! seminorm for s < 1 is the plain double radial integral of
//! |u(r) - u(rho)|^2 against the reduced difference-quotient kernel;
//! the interaction energy is the plain double radial integral of the
//! charge |u|^q against the reduced interaction kernel; and the s = 1
//! seminorm is the derivative form omega_{d-1} int |u'|^2 r^{d-1} dr.

pub mod scale;
pub mod weighted;

use std::sync::Arc;

use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{CslError, Result};
use crate::exponents::{gn_exponents, refined_sobolev_exponents, sobolev_exponent, ParamSet};
use crate::grid::{RadialGrid, RadialGridFunction};
use crate::kernels::{DiagonalPolicy, KernelMatrix, KernelSpec};

/// Surface area of the unit sphere in R^d: 2 pi^{d/2} / Gamma(d/2).
pub fn omega(d: u32) -> f64 {
    let dh = d as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(dh) / gamma(dh)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridMeta {
    pub d: u32,
    pub n: usize,
    pub r_min: f64,
    pub r_max: f64,
}

impl GridMeta {
    pub fn of(grid: &RadialGrid) -> Self {
        Self { d: grid.d(), n: grid.len(), r_min: grid.r_min(), r_max: grid.r_max() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub lp_norm: f64,
    pub seminorm_sq: f64,
    pub coulomb: f64,
    pub quotient: f64,
    pub p: f64,
    pub params: ParamSet,
    pub grid: GridMeta,
}

/// ( omega_{d-1} int |u|^p r^{d-1} dr )^{1/p}.
pub fn lp_norm(f: &RadialGridFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(CslError::InvalidParams(format!("lp norm needs finite p >= 1, got {p}")));
    }
    Ok((omega(f.grid.d()) * lp_pow(f, p)).powf(1.0 / p))
}

/// int |u|^p r^{d-1} dr without the sphere factor or the root; the
/// building block the sweep fits use.
pub fn lp_pow(f: &RadialGridFunction, p: f64) -> f64 {
    let vals: Vec<f64> = f.values.iter().map(|v| v.abs().powf(p)).collect();
    f.grid.integrate(&vals)
}

/// Local slopes by centered differences, one-sided at the ends.
pub fn slopes(f: &RadialGridFunction) -> Vec<f64> {
    let r = f.grid.nodes();
    let u = &f.values;
    let n = u.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (lo, hi) = if i == 0 {
            (0, 1)
        } else if i + 1 == n {
            (n - 2, n - 1)
        } else {
            (i - 1, i + 1)
        };
        out.push((u[hi] - u[lo]) / (r[hi] - r[lo]));
    }
    out
}

fn require_compact_support(f: &RadialGridFunction, what: &str) -> Result<()> {
    if !f.vanishes_at_outer_edge() {
        return Err(CslError::Grid(format!(
            "{what} needs the profile to vanish at the outer grid edge; enlarge r_max"
        )));
    }
    Ok(())
}

/// Caches the kernel matrices of a parameter set on one grid and
/// evaluates the energies against them.
pub struct EnergyEvaluator {
    pub params: ParamSet,
    pub grid: Arc<RadialGrid>,
    riesz: KernelMatrix,
    /// None exactly when s = 1 (derivative seminorm path).
    gagliardo: Option<KernelMatrix>,
}

impl EnergyEvaluator {
    pub fn new(params: &ParamSet, grid: &Arc<RadialGrid>) -> Result<Self> {
        let riesz = KernelMatrix::assemble(
            KernelSpec::riesz(params.d, params.alpha),
            grid,
            DiagonalPolicy::CellAveraged,
        )?;
        let gagliardo = if params.s < 1.0 {
            Some(KernelMatrix::assemble(
                KernelSpec::gagliardo(params.d, params.s),
                grid,
                DiagonalPolicy::CellAveraged,
            )?)
        } else {
            None
        };
        Ok(Self { params: *params, grid: grid.clone(), riesz, gagliardo })
    }

    pub fn riesz_matrix(&self) -> &KernelMatrix {
        &self.riesz
    }

    pub fn gagliardo_matrix(&self) -> Option<&KernelMatrix> {
        self.gagliardo.as_ref()
    }

    fn check_grid(&self, f: &RadialGridFunction) -> Result<()> {
        if !Arc::ptr_eq(&self.grid, &f.grid) && *self.grid != *f.grid {
            return Err(CslError::Grid("function lives on a different grid".into()));
        }
        Ok(())
    }

    pub fn lp_norm(&self, f: &RadialGridFunction, p: f64) -> Result<f64> {
        self.check_grid(f)?;
        lp_norm(f, p)
    }

    /// Order-s seminorm squared. For s < 1 the double integral splits
    /// into off-diagonal matrix terms plus the same-cell masses
    /// contracted with squared local slopes; for s = 1 it is the
    /// derivative form.
    pub fn seminorm_sq(&self, f: &RadialGridFunction) -> Result<f64> {
        self.check_grid(f)?;
        require_compact_support(f, "the order-s seminorm")?;
        let w = self.grid.weights();
        match &self.gagliardo {
            None => {
                // Forward differences against exact r^{d-1} cell moments
                // (the P1 Dirichlet form). Centered slopes would decouple
                // odd and even nodes, a null space an ascent search on
                // this energy would exploit.
                let r = self.grid.nodes();
                let u = &f.values;
                let dd = self.params.d as i32;
                let mut acc = 0.0;
                for i in 0..u.len() - 1 {
                    let t = (u[i + 1] - u[i]) / (r[i + 1] - r[i]);
                    let m = (r[i + 1].powi(dd) - r[i].powi(dd)) / dd as f64;
                    acc += t * t * m;
                }
                Ok(omega(self.params.d) * acc)
            }
            Some(k) => {
                // sum_{i != j} (u_i - u_j)^2 K_ij w_i w_j
                //   = 2 [ sum_i u_i^2 w_i (Kw)_i - (uw)^T K (uw) ].
                let kw = k.matvec(w);
                let uw: Vec<f64> = f.values.iter().zip(w).map(|(u, w)| u * w).collect();
                let kuw = k.matvec(&uw);
                let mut term1 = 0.0;
                let mut term2 = 0.0;
                for i in 0..uw.len() {
                    term1 += f.values[i] * f.values[i] * w[i] * kw[i];
                    term2 += uw[i] * kuw[i];
                }
                let sl = slopes(f);
                let diag: f64 = sl
                    .iter()
                    .zip(&k.diag_cell_mass)
                    .map(|(s, c)| s * s * c)
                    .sum();
                Ok(2.0 * (term1 - term2) + diag)
            }
        }
    }

    /// Interaction energy D(u): the double integral of the charge
    /// density |u|^q against the interaction kernel.
    pub fn coulomb(&self, f: &RadialGridFunction) -> Result<f64> {
        self.check_grid(f)?;
        require_compact_support(f, "the interaction energy")?;
        let w = self.grid.weights();
        let gw: Vec<f64> =
            f.values.iter().zip(w).map(|(u, w)| u.abs().powf(self.params.q) * w).collect();
        Ok(self.riesz.quadratic(&gw, &gw))
    }

    /// Q = ||u||_p / ( seminorm^beta * D^gamma ), invariant under both
    /// amplitude scaling and dilation.
    pub fn quotient(&self, f: &RadialGridFunction, p: f64) -> Result<f64> {
        let (beta, gamma) = gn_exponents(&self.params, p)?;
        self.quotient_with(f, p, beta, gamma)
    }

    /// The sharpened-exponent family at the critical coupling: same
    /// quotient shape, exponents perturbed by eps, p pinned to the
    /// critical integrability exponent.
    pub fn refined_quotient(&self, f: &RadialGridFunction, eps: f64) -> Result<f64> {
        let (beta, gamma) = refined_sobolev_exponents(&self.params, eps)?;
        let p = sobolev_exponent(&self.params);
        if !p.is_finite() {
            return Err(CslError::InvalidParams(
                "refined quotient needs 2s < d".into(),
            ));
        }
        self.quotient_with(f, p, beta, gamma)
    }

    fn quotient_with(
        &self,
        f: &RadialGridFunction,
        p: f64,
        beta: f64,
        gamma: f64,
    ) -> Result<f64> {
        let lp = self.lp_norm(f, p)?;
        if lp == 0.0 {
            return Ok(0.0);
        }
        let semi = self.seminorm_sq(f)?;
        let d_phi = self.coulomb(f)?;
        if !(semi > 0.0) || !(d_phi > 0.0) {
            return Err(CslError::DegenerateQuotient(format!(
                "nonzero lp norm with seminorm_sq={semi}, interaction={d_phi}"
            )));
        }
        Ok(lp / (semi.powf(0.5 * beta) * d_phi.powf(gamma)))
    }

    pub fn report(&self, f: &RadialGridFunction, p: f64) -> Result<EnergyReport> {
        Ok(EnergyReport {
            lp_norm: self.lp_norm(f, p)?,
            seminorm_sq: self.seminorm_sq(f)?,
            coulomb: self.coulomb(f)?,
            quotient: self.quotient(f, p)?,
            p,
            params: self.params,
            grid: GridMeta::of(&self.grid),
        })
    }
}
