//! Radial grids on [0, r_max] carrying quadrature weights against the
//! measure r^{d-1} dr, and sampled radial profiles on them.
//!
//! Weights integrate piecewise-linear functions exactly: on each cell
//! the two hat-function moments against r^{d-1} are evaluated in closed
//! form through the binomial expansion of (a + th)^{d-1}, which keeps
//! every term positive and avoids the cancellation that the naive
//! difference of antiderivatives would produce on thin cells.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{CslError, Result};

pub const MAX_GRID_NODES: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Uniform,
    Geometric { r_min: f64 },
}

/// Binomial coefficients C(k, 0..=k) as floats (k stays small: d - 1).
fn binomial_row(k: u32) -> Vec<f64> {
    let mut row = vec![1.0];
    for j in 0..k {
        let next = row[j as usize] * (k - j) as f64 / (j + 1) as f64;
        row.push(next);
    }
    row
}

/// Integrals over [a, b] (h = b - a) of the two linear hats against
/// r^k dr, divided by h:
///   left  = (1/h) int (b - r) r^k dr = h * sum_j C(k,j) a^{k-j} h^j / ((j+1)(j+2))
///   right = (1/h) int (r - a) r^k dr = h * sum_j C(k,j) a^{k-j} h^j / (j+2)
fn hat_moments(a: f64, h: f64, binom: &[f64]) -> (f64, f64) {
    let k = binom.len() - 1;
    let mut left = 0.0;
    let mut right = 0.0;
    let mut hj = 1.0;
    for (j, c) in binom.iter().enumerate() {
        let apow = a.powi((k - j) as i32);
        let term = c * apow * hj;
        left += term / (((j + 1) * (j + 2)) as f64);
        right += term / ((j + 2) as f64);
        hj *= h;
    }
    (left * h, right * h)
}

/// Strictly increasing radial nodes with r^{d-1} dr quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    d: u32,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl RadialGrid {
    pub fn from_nodes(d: u32, nodes: Vec<f64>) -> Result<Arc<Self>> {
        if d == 0 {
            return Err(CslError::Grid("d must be a positive integer".into()));
        }
        if nodes.len() < 2 {
            return Err(CslError::Grid("grid needs at least 2 nodes".into()));
        }
        if nodes.len() > MAX_GRID_NODES {
            return Err(CslError::Grid(format!(
                "grid of {} nodes exceeds the cap of {MAX_GRID_NODES}",
                nodes.len()
            )));
        }
        if nodes[0] < 0.0 || !nodes[0].is_finite() {
            return Err(CslError::Grid("nodes must be finite and nonnegative".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(CslError::Grid("nodes must be strictly increasing and finite".into()));
        }
        let binom = binomial_row(d - 1);
        let mut weights = vec![0.0; nodes.len()];
        for i in 0..nodes.len() - 1 {
            let (a, b) = (nodes[i], nodes[i + 1]);
            let (left, right) = hat_moments(a, b - a, &binom);
            weights[i] += left;
            weights[i + 1] += right;
        }
        Ok(Arc::new(Self { d, nodes, weights }))
    }

    pub fn new(d: u32, r_max: f64, n: usize, spacing: Spacing) -> Result<Arc<Self>> {
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(CslError::Grid(format!("r_max must be positive, got {r_max}")));
        }
        let nodes = match spacing {
            Spacing::Uniform => {
                (0..n).map(|i| r_max * i as f64 / (n - 1).max(1) as f64).collect()
            }
            Spacing::Geometric { r_min } => {
                if !(r_min > 0.0 && r_min < r_max) {
                    return Err(CslError::Grid(format!(
                        "geometric spacing needs 0 < r_min < r_max, got r_min={r_min}, r_max={r_max}"
                    )));
                }
                let ratio = r_max / r_min;
                (0..n)
                    .map(|i| r_min * ratio.powf(i as f64 / (n - 1).max(1) as f64))
                    .collect()
            }
        };
        Self::from_nodes(d, nodes)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    /// Averaging cell owned by node i: midpoints to the neighbours,
    /// clamped to the grid ends. Used for kernel cell averages.
    pub fn cell(&self, i: usize) -> (f64, f64) {
        let lo = if i == 0 { self.nodes[0] } else { 0.5 * (self.nodes[i - 1] + self.nodes[i]) };
        let hi = if i + 1 == self.nodes.len() {
            self.nodes[i]
        } else {
            0.5 * (self.nodes[i] + self.nodes[i + 1])
        };
        (lo, hi)
    }

    /// Exact integral of (the linear interpolant of) `values` times
    /// r^{d-1} over the whole grid.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.nodes.len());
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// Exact integral of the linear interpolant times r^{d-1} over
    /// [lo, hi] (clipped to the grid span; mass below the first node of
    /// a geometric grid is not represented).
    pub fn integrate_range(&self, values: &[f64], lo: f64, hi: f64) -> f64 {
        debug_assert_eq!(values.len(), self.nodes.len());
        let lo = lo.max(self.nodes[0]);
        let hi = hi.min(self.r_max());
        if !(hi > lo) {
            return 0.0;
        }
        let binom = binomial_row(self.d - 1);
        // First cell whose right end exceeds lo.
        let start = self.nodes.partition_point(|&r| r <= lo).saturating_sub(1);
        let mut total = 0.0;
        for i in start..self.nodes.len() - 1 {
            let (a, b) = (self.nodes[i], self.nodes[i + 1]);
            if a >= hi {
                break;
            }
            let (ca, cb) = (a.max(lo), b.min(hi));
            if !(cb > ca) {
                continue;
            }
            let h = b - a;
            let fa = values[i] + (values[i + 1] - values[i]) * (ca - a) / h;
            let fb = values[i] + (values[i + 1] - values[i]) * (cb - a) / h;
            let (l, r) = hat_moments(ca, cb - ca, &binom);
            total += fa * l + fb * r;
        }
        total
    }

    /// Cumulative integrals: out[i] = integral over [r_0, r_i].
    pub fn integrate_prefix(&self, values: &[f64]) -> Vec<f64> {
        debug_assert_eq!(values.len(), self.nodes.len());
        let binom = binomial_row(self.d - 1);
        let mut out = Vec::with_capacity(self.nodes.len());
        out.push(0.0);
        let mut acc = 0.0;
        for i in 0..self.nodes.len() - 1 {
            let (a, b) = (self.nodes[i], self.nodes[i + 1]);
            let (l, r) = hat_moments(a, b - a, &binom);
            acc += values[i] * l + values[i + 1] * r;
            out.push(acc);
        }
        out
    }

    /// Nodes scaled by `factor > 0` (weights recomputed; they scale as
    /// factor^d up to rounding).
    pub fn scaled(&self, factor: f64) -> Result<Arc<Self>> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(CslError::Grid(format!("scale factor must be positive, got {factor}")));
        }
        Self::from_nodes(self.d, self.nodes.iter().map(|r| r * factor).collect())
    }

    /// Number of nodes inside [lo, hi].
    pub fn count_in(&self, lo: f64, hi: f64) -> usize {
        self.nodes.iter().filter(|&&r| r >= lo && r <= hi).count()
    }
}

/// Union of a geometric backbone over [r_lo, r_hi] and uniform
/// refinements across each window, deduplicated. Windows must be
/// sub-intervals of [r_lo, r_hi].
pub fn composite_grid(
    d: u32,
    r_lo: f64,
    r_hi: f64,
    backbone_per_decade: usize,
    windows: &[(f64, f64)],
    nodes_per_window: usize,
) -> Result<Arc<RadialGrid>> {
    if !(r_lo > 0.0 && r_hi > r_lo) {
        return Err(CslError::Grid(format!(
            "composite grid needs 0 < r_lo < r_hi, got [{r_lo}, {r_hi}]"
        )));
    }
    let decades = (r_hi / r_lo).log10();
    let n_backbone = ((decades * backbone_per_decade as f64).ceil() as usize).max(2) + 1;
    let mut nodes: Vec<f64> = (0..n_backbone)
        .map(|i| r_lo * (r_hi / r_lo).powf(i as f64 / (n_backbone - 1) as f64))
        .collect();
    for &(lo, hi) in windows {
        if !(lo >= r_lo - 1e-12 * r_hi && hi <= r_hi * (1.0 + 1e-12) && hi > lo) {
            return Err(CslError::Grid(format!(
                "window [{lo}, {hi}] not contained in grid span [{r_lo}, {r_hi}]"
            )));
        }
        let m = nodes_per_window.max(8);
        for i in 0..m {
            nodes.push(lo + (hi - lo) * i as f64 / (m - 1) as f64);
        }
        // Geometric ladders bridge the spacing jump from the window to
        // the backbone. Row sums of integrable kernel singularities
        // accumulate most of their mass just outside a refined window;
        // without the bridge the first backbone step skips that range
        // and the quadrature error depends on accidental node placement.
        let h = (hi - lo) / (m - 1) as f64;
        let growth = 1.4f64;
        let backbone_gap = |r: f64| r * std::f64::consts::LN_10 / backbone_per_decade as f64;
        let mut t = h * growth;
        while hi + t <= r_hi && (growth - 1.0) * t < backbone_gap(hi + t) {
            nodes.push(hi + t);
            t *= growth;
        }
        t = h * growth;
        while lo - t >= r_lo && (growth - 1.0) * t < backbone_gap(lo - t) {
            nodes.push(lo - t);
            t *= growth;
        }
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Drop near-duplicates; keep the window resolution intact.
    let min_gap = windows
        .iter()
        .map(|&(lo, hi)| (hi - lo) / nodes_per_window.max(8) as f64)
        .fold(f64::INFINITY, f64::min)
        * 1e-6;
    let min_gap = if min_gap.is_finite() { min_gap } else { r_hi * 1e-12 };
    let mut merged: Vec<f64> = Vec::with_capacity(nodes.len());
    for r in nodes {
        match merged.last() {
            Some(&prev) if r - prev <= min_gap.max(prev * 1e-13) => {}
            _ => merged.push(r),
        }
    }
    RadialGrid::from_nodes(d, merged)
}

/// A radial profile sampled on a grid, with the inclusive index window
/// outside which its values vanish identically (when it has one).
#[derive(Debug, Clone)]
pub struct RadialGridFunction {
    pub grid: Arc<RadialGrid>,
    pub values: Vec<f64>,
    support: Option<(usize, usize)>,
}

impl RadialGridFunction {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(CslError::Grid(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CslError::Grid("values must be finite".into()));
        }
        let support = scan_support(&values);
        Ok(Self { grid, values, support })
    }

    pub fn zero(grid: Arc<RadialGrid>) -> Self {
        let n = grid.len();
        Self { grid, values: vec![0.0; n], support: None }
    }

    /// Inclusive index range of the nonzero values; None for the zero
    /// function.
    pub fn support(&self) -> Option<(usize, usize)> {
        self.support
    }

    pub fn refresh_support(&mut self) {
        self.support = scan_support(&self.values);
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_none()
    }

    /// True when the profile vanishes at the outer grid edge, so no
    /// mass is silently truncated there.
    pub fn vanishes_at_outer_edge(&self) -> bool {
        self.support.map_or(true, |(_, hi)| hi + 1 < self.grid.len())
    }

    /// Pointwise sum; both functions must live on the same grid.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && self.grid != other.grid {
            return Err(CslError::Grid("functions live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Self::new(self.grid.clone(), values)
    }

    /// The profile x -> amplitude * f(x / space) realized exactly by
    /// scaling the nodes: nodes become space * r, values amplitude * v.
    pub fn rescaled(&self, space: f64, amplitude: f64) -> Result<Self> {
        let grid = self.grid.scaled(space)?;
        let values = self.values.iter().map(|v| v * amplitude).collect();
        Self::new(grid, values)
    }

    /// Columnar text form: one header line, then one line per node with
    /// radius, value, weight at 17 significant digits.
    pub fn to_columnar(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# d={} n={}", self.grid.d(), self.grid.len()).unwrap();
        for i in 0..self.grid.len() {
            writeln!(
                out,
                "{:.16e} {:.16e} {:.16e}",
                self.grid.nodes()[i],
                self.values[i],
                self.grid.weights()[i]
            )
            .unwrap();
        }
        out
    }

    pub fn from_columnar(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| CslError::Format("empty input".into()))?;
        let header = header.trim();
        let rest = header
            .strip_prefix("# d=")
            .ok_or_else(|| CslError::Format(format!("bad header: {header:?}")))?;
        let (d_str, n_str) = rest
            .split_once(" n=")
            .ok_or_else(|| CslError::Format(format!("bad header: {header:?}")))?;
        let d: u32 = d_str.trim().parse().map_err(|e| CslError::Format(format!("bad d: {e}")))?;
        let n: usize = n_str.trim().parse().map_err(|e| CslError::Format(format!("bad n: {e}")))?;
        let mut nodes = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let mut next = |what: &str| -> Result<f64> {
                it.next()
                    .ok_or_else(|| {
                        CslError::Format(format!("line {}: missing {what}", lineno + 2))
                    })?
                    .parse()
                    .map_err(|e| CslError::Format(format!("line {}: {e}", lineno + 2)))
            };
            nodes.push(next("radius")?);
            values.push(next("value")?);
            next("weight")?;
        }
        if nodes.len() != n {
            return Err(CslError::Format(format!(
                "header promised {n} rows, found {}",
                nodes.len()
            )));
        }
        let grid = RadialGrid::from_nodes(d, nodes)?;
        Self::new(grid, values)
    }
}

fn scan_support(values: &[f64]) -> Option<(usize, usize)> {
    let first = values.iter().position(|&v| v != 0.0)?;
    let last = values.iter().rposition(|&v| v != 0.0).unwrap();
    Some((first, last))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_integrates_exactly() {
        // d=3, r_max=1: int r^2 dr = 1/3.
        let g = RadialGrid::new(3, 1.0, 81, Spacing::Uniform).unwrap();
        let vals = vec![1.0; g.len()];
        assert_relative_eq!(g.integrate(&vals), 1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn linear_integrates_exactly() {
        // d=2, f(r)=r on [0,2]: int r * r dr = 8/3.
        let g = RadialGrid::new(2, 2.0, 57, Spacing::Uniform).unwrap();
        let vals: Vec<f64> = g.nodes().to_vec();
        assert_relative_eq!(g.integrate(&vals), 8.0 / 3.0, epsilon = 1e-13);
        // Same on a geometric grid.
        let g = RadialGrid::new(2, 2.0, 200, Spacing::Geometric { r_min: 1e-6 }).unwrap();
        let vals: Vec<f64> = g.nodes().to_vec();
        assert_relative_eq!(g.integrate(&vals), 8.0 / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn smooth_profile_converges_at_order_two() {
        // f(r) = exp(-r), d=3, r_max=40; node doubling gains a factor
        // close to 4 once in the asymptotic range.
        let exact = 2.0 - (-40.0f64).exp() * (40.0f64 * 40.0 + 2.0 * 40.0 + 2.0);
        let err = |n: usize| {
            let g = RadialGrid::new(3, 40.0, n, Spacing::Uniform).unwrap();
            let vals: Vec<f64> = g.nodes().iter().map(|r| (-r).exp()).collect();
            (g.integrate(&vals) - exact).abs()
        };
        let (e1, e2, e3) = (err(501), err(1001), err(2001));
        let order12 = (e1 / e2).log2();
        let order23 = (e2 / e3).log2();
        assert!(order12 > 1.9, "observed order {order12}");
        assert!(order23 > 1.9, "observed order {order23}");
    }

    #[test]
    fn range_integration_clips_cells_exactly() {
        let g = RadialGrid::new(3, 2.0, 401, Spacing::Uniform).unwrap();
        let vals = vec![1.0; g.len()];
        // int_{0.3}^{1.1} r^2 dr, endpoints chosen off the nodes.
        let got = g.integrate_range(&vals, 0.3, 1.1);
        assert_relative_eq!(got, (1.1f64.powi(3) - 0.3f64.powi(3)) / 3.0, epsilon = 1e-13);
        // Prefix sums agree with ranges at the nodes.
        let prefix = g.integrate_prefix(&vals);
        let i = 250;
        assert_relative_eq!(
            prefix[i],
            g.integrate_range(&vals, 0.0, g.nodes()[i]),
            epsilon = 1e-13
        );
    }

    #[test]
    fn scaled_grid_weights_follow_power_law() {
        let g = RadialGrid::new(3, 2.0, 33, Spacing::Uniform).unwrap();
        let s = g.scaled(2.5).unwrap();
        for (w2, w1) in s.weights().iter().zip(g.weights()) {
            if *w1 > 0.0 {
                assert_relative_eq!(w2 / w1, 2.5f64.powi(3), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn composite_grid_covers_windows() {
        let g = composite_grid(3, 0.01, 100.0, 16, &[(2.0, 3.0), (20.0, 21.0)], 64).unwrap();
        assert!(g.count_in(2.0, 3.0) >= 64);
        assert!(g.count_in(20.0, 21.0) >= 64);
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
        assert_eq!(g.r_min(), 0.01);
        assert_relative_eq!(g.r_max(), 100.0, epsilon = 1e-12);
    }

    #[test]
    fn support_window_tracked() {
        let g = RadialGrid::new(3, 1.0, 11, Spacing::Uniform).unwrap();
        let mut vals = vec![0.0; 11];
        vals[3] = 1.0;
        vals[5] = -2.0;
        let f = RadialGridFunction::new(g.clone(), vals).unwrap();
        assert_eq!(f.support(), Some((3, 5)));
        assert!(f.vanishes_at_outer_edge());
        let z = RadialGridFunction::zero(g);
        assert!(z.is_zero());
    }

    #[test]
    fn columnar_round_trip_is_byte_identical() {
        let g = RadialGrid::new(3, 5.0, 33, Spacing::Geometric { r_min: 0.01 }).unwrap();
        let vals: Vec<f64> = g.nodes().iter().map(|r| (1.0 - r / 5.0).max(0.0)).collect();
        let f = RadialGridFunction::new(g, vals).unwrap();
        let text = f.to_columnar();
        let f2 = RadialGridFunction::from_columnar(&text).unwrap();
        assert_eq!(text, f2.to_columnar());
        assert_eq!(f.values, f2.values);
    }

    #[test]
    fn from_columnar_rejects_malformed_input() {
        assert!(RadialGridFunction::from_columnar("").is_err());
        assert!(RadialGridFunction::from_columnar("# d=3 n=2\n1.0 2.0\n").is_err());
        assert!(RadialGridFunction::from_columnar("# d=3 n=3\n0 1 1\n1 1 1\n").is_err());
        // Non-increasing nodes.
        assert!(RadialGridFunction::from_columnar("# d=3 n=2\n1 0 0\n1 0 0\n").is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(RadialGrid::new(3, -1.0, 8, Spacing::Uniform).is_err());
        assert!(RadialGrid::new(3, 1.0, 8, Spacing::Geometric { r_min: 0.0 }).is_err());
        assert!(RadialGrid::from_nodes(3, vec![0.0, 0.0, 1.0]).is_err());
        assert!(RadialGrid::from_nodes(0, vec![0.0, 1.0]).is_err());
    }
}
