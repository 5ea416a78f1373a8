//! Radial kernel matrices.
//!
//! A matrix row i holds, against each node j, an effective kernel value
//! ready to be contracted with nodal charges and grid weights: far
//! pairs carry the point value, pairs within the band carry
//! cell-averaged integrals, and the diagonal follows the selected
//! policy. Difference-quotient matrices additionally carry per-cell
//! diagonal masses for the slope-squared correction of the quadratic
//! form.

pub mod band;
pub mod bound;
pub mod io;
pub mod point;

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CslError, Result};
use crate::grid::RadialGrid;

pub use band::{cell_mass, cell_pair_integral};
pub use bound::{kernel_bound_check, BoundCheckReport};
pub use point::{
    gagliardo_singular_model, kernel_value, riesz_diagonal_value, riesz_singular_model,
    KernelKind, SingularModel,
};

/// Dense symmetric matrices only; beyond this the quadratic forms
/// should be restructured before they are sized up.
pub const MAX_KERNEL_NODES: usize = 4096;

/// Node pairs with |i - j| <= BAND_WIDTH get cell-pair integrals.
pub const BAND_WIDTH: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelSpec {
    pub d: u32,
    pub kind: KernelKind,
}

impl KernelSpec {
    pub fn riesz(d: u32, alpha: f64) -> Self {
        Self { d, kind: KernelKind::Riesz { alpha } }
    }

    pub fn gagliardo(d: u32, s: f64) -> Self {
        Self { d, kind: KernelKind::Gagliardo { s } }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(CslError::Kernel("dimension must be positive".into()));
        }
        self.kind.validate(self.d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagonalPolicy {
    /// Diagonal entries are zero; same-cell mass is dropped.
    Excluded,
    /// Diagonal entries average the kernel over the cell (interaction
    /// kernels), and same-cell masses feed the slope correction
    /// (difference-quotient kernels).
    CellAveraged,
}

#[derive(Debug, Clone)]
pub struct KernelMatrix {
    pub spec: KernelSpec,
    pub policy: DiagonalPolicy,
    nodes: Vec<f64>,
    n: usize,
    /// Row-major symmetric n x n effective kernel values.
    data: Vec<f64>,
    /// For difference-quotient kernels under CellAveraged: the integral
    /// of (r - rho)^2 K (r rho)^{d-1} over cell_i x cell_i, to be
    /// contracted with the squared local slope.
    pub diag_cell_mass: Vec<f64>,
}

impl KernelMatrix {
    pub fn assemble(
        spec: KernelSpec,
        grid: &Arc<RadialGrid>,
        policy: DiagonalPolicy,
    ) -> Result<Self> {
        spec.validate()?;
        let n = grid.len();
        if n > MAX_KERNEL_NODES {
            return Err(CslError::Kernel(format!(
                "grid of {n} nodes exceeds the dense kernel cap of {MAX_KERNEL_NODES}"
            )));
        }
        let nodes = grid.nodes().to_vec();
        let cell_masses: Vec<f64> = (0..n)
            .map(|i| {
                let (a, b) = grid.cell(i);
                cell_mass(spec.d, a, b)
            })
            .collect();

        let weighted = matches!(spec.kind, KernelKind::Gagliardo { .. });
        let rows: Vec<Result<Vec<f64>>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut row = vec![0.0; n];
                for j in i..n {
                    row[j] = if j == i {
                        match (policy, weighted) {
                            (DiagonalPolicy::Excluded, _) => 0.0,
                            // Same-cell mass of the weighted kernel is
                            // carried separately.
                            (DiagonalPolicy::CellAveraged, true) => 0.0,
                            (DiagonalPolicy::CellAveraged, false) => {
                                let raw = cell_pair_integral(spec.d, spec.kind, grid, i, i, false)?;
                                raw / (cell_masses[i] * cell_masses[i])
                            }
                        }
                    } else if j - i <= BAND_WIDTH {
                        let raw =
                            cell_pair_integral(spec.d, spec.kind, grid, i, j, weighted)?;
                        let denom = if weighted {
                            let dr = nodes[i] - nodes[j];
                            dr * dr * cell_masses[i] * cell_masses[j]
                        } else {
                            cell_masses[i] * cell_masses[j]
                        };
                        raw / denom
                    } else {
                        kernel_value(spec.d, spec.kind, nodes[i], nodes[j])?
                    };
                }
                Ok(row)
            })
            .collect();

        let mut data = vec![0.0; n * n];
        for (i, row) in rows.into_iter().enumerate() {
            let row = row?;
            data[i * n..(i + 1) * n].copy_from_slice(&row);
        }
        // Mirror the strict upper triangle.
        for i in 0..n {
            for j in 0..i {
                data[i * n + j] = data[j * n + i];
            }
        }

        let diag_cell_mass = if weighted && policy == DiagonalPolicy::CellAveraged {
            (0..n)
                .into_par_iter()
                .map(|i| cell_pair_integral(spec.d, spec.kind, grid, i, i, true))
                .collect::<Result<Vec<f64>>>()?
        } else {
            Vec::new()
        };

        Ok(Self { spec, policy, nodes, n, data, diag_cell_mass })
    }

    pub(crate) fn from_parts(
        spec: KernelSpec,
        policy: DiagonalPolicy,
        nodes: Vec<f64>,
        data: Vec<f64>,
        diag_cell_mass: Vec<f64>,
    ) -> Self {
        let n = nodes.len();
        debug_assert_eq!(data.len(), n * n);
        Self { spec, policy, nodes, n, data, diag_cell_mass }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// (K v)_i = sum_j K_ij v_j; callers fold grid weights into v.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.n);
        self.data
            .par_chunks(self.n)
            .map(|row| row.iter().zip(v).map(|(k, x)| k * x).sum())
            .collect()
    }

    /// sum_ij a_i K_ij b_j.
    pub fn quadratic(&self, a: &[f64], b: &[f64]) -> f64 {
        let kb = self.matvec(b);
        a.iter().zip(&kb).map(|(x, y)| x * y).sum()
    }
}
