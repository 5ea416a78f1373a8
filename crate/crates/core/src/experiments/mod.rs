//! Numerical experiments over the interpolation functionals: scaling
//! sweeps against predicted power laws, multibump towers, randomized
//! boundedness corpora and weighted-inequality ratio suites.

use serde::Serialize;

pub mod corpus;
pub mod fit;
pub mod sweep;

pub use corpus::{
    corpus_function, corpus_grid, run_boundedness, run_refined, run_weighted_checks,
    CorpusReport, CorpusSpec, CorpusStats, InequalityCheck, WeightedReport,
};
pub use fit::{fit_loglog, judge, SlopeFit, Verdict};
pub use sweep::{
    run_bump_law, run_multibump, run_schedule, Axis, BumpLawAxis, SeriesFit, SweepResult,
    SweepSample,
};

/// Shared tuning knobs for the experiment drivers. Defaults are sized
/// for the acceptance tolerances: half-window tail fits judged at 10%
/// relative (2% absolute near zero), grids resolving every bump with
/// dozens of nodes, and a 5-decade headroom heuristic for spread.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExperimentConfig {
    /// Relative tolerance when judging a fitted slope against a
    /// nonzero prediction.
    pub slope_rel_tol: f64,
    /// Absolute tolerance when the predicted slope is zero (and the
    /// inconclusive band around zero).
    pub slope_abs_tol: f64,
    /// Corpus max/median ratio below which the family counts as
    /// bounded.
    pub spread_factor: f64,
    /// Trailing fraction of samples used by the log-log fits.
    pub fit_fraction: f64,
    /// Geometric backbone density of sweep grids.
    pub backbone_per_decade: usize,
    /// Refinement nodes per bump window.
    pub nodes_per_window: usize,
    /// Bump center for width-driven sweeps.
    pub fixed_radius: f64,
    /// Relative truncation error budget for the nonlocal tail.
    pub tail_eps: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            slope_rel_tol: 0.1,
            slope_abs_tol: 0.02,
            spread_factor: 10.0,
            fit_fraction: 0.5,
            backbone_per_decade: 8,
            nodes_per_window: 128,
            fixed_radius: 4.0,
            tail_eps: 1e-3,
        }
    }
}
