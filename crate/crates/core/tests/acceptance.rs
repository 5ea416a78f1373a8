//! Full-surface checklist, one numbered test per criterion. Run with
//!
//!   cargo test -p csl-core --test acceptance -- --nocapture
//!
//! so each test prints its `criterion N: pass - ...` line; a failing
//! assertion carries the same prefix in its panic message.

use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use csl_core::bump::{BumpSpec, Profile};
use csl_core::experiments::{
    fit_loglog, run_boundedness, run_bump_law, run_multibump, run_refined, run_schedule,
    run_weighted_checks, BumpLawAxis, CorpusSpec, ExperimentConfig, SweepResult, Verdict,
};
use csl_core::exponents::{
    classify_regime, endpoint_exponent, gn_exponents, p_rad, schedule_params, sobolev_exponent,
    ParamSet, ScheduleKind, ScheduleLaw,
};
use csl_core::functionals::EnergyEvaluator;
use csl_core::grid::{composite_grid, RadialGrid, RadialGridFunction};
use csl_core::kernels::{kernel_bound_check, kernel_value, KernelKind};
use csl_core::optimize::{
    ascend, default_grid, default_start, fd_directional_check, multi_start, AscentConfig,
};
use csl_core::quad::{integrate_adaptive, QuadOptions};

fn pass(n: u32, started: Instant, detail: &str) {
    println!("criterion {n}: pass - {detail} ({:.1}s)", started.elapsed().as_secs_f64());
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo * (hi / lo).powf(rng.gen::<f64>())
}

/// Asserts that the named series of a sweep matched its predicted slope.
fn assert_series_match(n: u32, label: &str, res: &SweepResult, series: &str) {
    let fit = res
        .fit(series)
        .unwrap_or_else(|| panic!("criterion {n}: {label} has no series named {series}"));
    assert_eq!(
        fit.verdict,
        Verdict::Match,
        "criterion {n}: {label} {series} fitted {:.6} vs expected {:.6} ({:?}, warnings {:?})",
        fit.fitted_slope,
        fit.expected_slope,
        fit.verdict,
        res.warnings,
    );
}

#[test]
fn criterion_01_exponent_tables_and_identities() {
    let t0 = Instant::now();
    let golden = ParamSet::new(3, 1.0, 2.0, 2.0).unwrap();
    assert_eq!(endpoint_exponent(&golden), 3.0, "criterion 1: lower endpoint at (3,1,2,2)");
    assert_eq!(sobolev_exponent(&golden), 6.0, "criterion 1: Sobolev exponent at (3,1,2,2)");
    let pr = p_rad(&golden).unwrap();
    assert!((pr - 18.0 / 7.0).abs() < 1e-15, "criterion 1: radial threshold {pr} != 18/7");

    let reg = classify_regime(&golden);
    assert_eq!((reg.p_interval.lo, reg.p_interval.hi), (3.0, 6.0), "criterion 1: p range");
    assert!(reg.p_interval.lo_closed && reg.p_interval.hi_closed);

    for (p, want) in [
        (3.0, (1.0 / 3.0, 1.0 / 6.0)),
        (6.0, (1.0, 0.0)),
        (18.0 / 7.0, (1.0 / 9.0, 2.0 / 9.0)),
    ] {
        let (b, g) = gn_exponents(&golden, p).unwrap();
        assert!(
            (b - want.0).abs() < 1e-14 && (g - want.1).abs() < 1e-14,
            "criterion 1: interpolation pair at p={p}: got ({b}, {g}), want {want:?}"
        );
    }

    // Radial threshold at s = 1/2 collapses to q + (d - alpha)/(d - 1).
    let mut rng = ChaCha8Rng::seed_from_u64(0xc1);
    for _ in 0..20 {
        let d = rng.gen_range(2..=6u32);
        let alpha = rng.gen_range(0.05..d as f64 - 0.05);
        let q = rng.gen_range(1.05..8.0);
        let params = ParamSet::new(d, 0.5, alpha, q).unwrap();
        let expect = q + (d as f64 - alpha) / (d as f64 - 1.0);
        let got = p_rad(&params).unwrap();
        assert!(
            (got - expect).abs() < 1e-12,
            "criterion 1: s=1/2 radial threshold at d={d} alpha={alpha} q={q}: {got} vs {expect}"
        );
    }

    // Both scaling identities on 1000 random tuples with p drawn from
    // the admissible range of each tuple.
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    while accepted < 1000 {
        attempts += 1;
        assert!(attempts < 100_000, "criterion 1: tuple sampling stalled");
        let d = rng.gen_range(1..=5u32);
        let s = rng.gen_range(0.05..1.0f64);
        let alpha = rng.gen_range(0.02..d as f64 - 0.02);
        let q = rng.gen_range(1.05..8.0f64);
        let params = ParamSet::new(d, s, alpha, q).unwrap();
        let df = d as f64;
        if params.is_critical_q() || (df + alpha - q * (df - 2.0 * s)).abs() < 0.05 {
            continue;
        }
        let itv = classify_regime(&params).p_interval;
        let p = if itv.hi.is_finite() {
            itv.lo + rng.gen::<f64>() * (itv.hi - itv.lo)
        } else {
            itv.lo + rng.gen::<f64>() * 10.0
        };
        if !(p >= 1.0) {
            continue;
        }
        let (beta, gamma) = gn_exponents(&params, p).unwrap();
        let r1 = beta + 2.0 * q * gamma - 1.0;
        let r2 = beta * (df / 2.0 - s) + gamma * (df + alpha) - df / p;
        assert!(
            r1.abs() < 1e-12 && r2.abs() < 1e-12,
            "criterion 1: identity residuals ({r1:.3e}, {r2:.3e}) at {params:?}, p={p}"
        );
        accepted += 1;
    }
    assert!(t0.elapsed().as_secs_f64() < 1.0, "criterion 1: exceeded 1s");
    pass(1, t0, "golden exponents, s=1/2 collapse, 1000 tuples of identity residuals < 1e-12");
}

#[test]
fn criterion_02_kernel_values_and_diagonal_rates() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xc2);

    // d=3, alpha=2: the reduced kernel is exactly 1/max(r, rho).
    for _ in 0..100 {
        let r = log_uniform(&mut rng, 1e-3, 1e3);
        let rho = log_uniform(&mut rng, 1e-3, 1e3);
        let k = kernel_value(3, KernelKind::Riesz { alpha: 2.0 }, r, rho).unwrap();
        assert!(
            (k * r.max(rho) - 1.0).abs() < 1e-10,
            "criterion 2: 1/max law at r={r}, rho={rho}: got {k}"
        );
    }

    // d=3 closed forms against an independent adaptive angular
    // quadrature of the same spherical average.
    let opts = QuadOptions { rel_tol: 1e-12, abs_tol: 1e-300, max_intervals: 50_000 };
    let kinds = [
        KernelKind::Riesz { alpha: 0.4 },
        KernelKind::Riesz { alpha: 1.0 },
        KernelKind::Riesz { alpha: 1.7 },
        KernelKind::Riesz { alpha: 2.6 },
        KernelKind::Gagliardo { s: 0.3 },
        KernelKind::Gagliardo { s: 0.8 },
    ];
    let pairs = [(1.0, 2.0), (0.3, 5.0), (2.0, 2.4), (10.0, 11.0), (0.05, 0.07)];
    for kind in kinds {
        let c = kind.c(3);
        for (r, rho) in pairs {
            let closed = kernel_value(3, kind, r, rho).unwrap();
            let d2 = (r - rho) * (r - rho);
            let b = 4.0 * r * rho;
            let quad = integrate_adaptive(
                |t: f64| {
                    let (sin, cos) = t.sin_cos();
                    2.0 * sin * cos * (d2 + b * cos * cos).powf(-c)
                },
                0.0,
                std::f64::consts::FRAC_PI_2,
                opts,
                "angular cross-check",
            )
            .unwrap();
            assert!(
                ((closed - quad) / closed).abs() < 1e-10,
                "criterion 2: {kind:?} at ({r}, {rho}): closed {closed:.15e} vs quad {quad:.15e}"
            );
        }
    }

    // Divergence rate along the diagonal: K(1, 1+delta) ~ delta^rate.
    let deltas: Vec<f64> = (0..7).map(|k| 10f64.powf(-(3.0 + 0.5 * k as f64))).collect();
    for (kind, rate) in [
        (KernelKind::Riesz { alpha: 0.5 }, -0.5),
        (KernelKind::Gagliardo { s: 0.25 }, -1.5),
        (KernelKind::Gagliardo { s: 0.75 }, -2.5),
    ] {
        let ys: Vec<f64> =
            deltas.iter().map(|&dl| kernel_value(3, kind, 1.0, 1.0 + dl).unwrap()).collect();
        let fit = fit_loglog(&deltas, &ys, 0.6).unwrap();
        assert!(
            (fit.slope - rate).abs() <= 0.02,
            "criterion 2: diagonal rate for {kind:?}: fitted {:.4} vs {rate}",
            fit.slope
        );
    }
    assert!(t0.elapsed().as_secs_f64() < 10.0, "criterion 2: exceeded 10s");
    pass(2, t0, "closed forms vs quadrature at 1e-10, diagonal rates within 0.02");
}

#[test]
fn criterion_03_kernel_envelope_constants_stabilize() {
    let t0 = Instant::now();
    let mut details = Vec::new();
    for (d, alpha) in [(3u32, 2.0), (3, 1.0), (3, 0.5), (2, 1.5), (2, 0.5)] {
        let rep = kernel_bound_check(d, alpha, 0.01, 100.0, 48).unwrap();
        assert!(
            rep.sup_fine.is_finite() && rep.sup_fine > 0.0,
            "criterion 3: envelope constant degenerate at d={d}, alpha={alpha}"
        );
        assert!(
            rep.rel_change < 0.05,
            "criterion 3: constant moved {:.3}% under doubling at d={d}, alpha={alpha}",
            100.0 * rep.rel_change
        );
        details.push(format!("({d},{alpha}): {:.4}", rep.sup_fine));
    }
    assert!(t0.elapsed().as_secs_f64() < 30.0, "criterion 3: exceeded 30s");
    pass(3, t0, &format!("envelope constants stable under doubling: {}", details.join(", ")));
}

#[test]
fn criterion_04_single_bump_scaling_laws() {
    let t0 = Instant::now();
    let base = BumpSpec { lambda: 1.0, center: 4.0, width: 1.0, profile: Profile::default() };
    let amp_values: Vec<f64> = (0..5).map(|k| 10f64.powf(0.5 * k as f64)).collect();
    let radius_values: Vec<f64> = (1..=8).map(|k| 2f64.powi(k)).collect();
    let width_values: Vec<f64> = (0..8).map(|k| 2f64.powi(-k)).collect();
    let axes = [
        (BumpLawAxis::Amplitude, &amp_values),
        (BumpLawAxis::Radius, &radius_values),
        (BumpLawAxis::Width, &width_values),
    ];

    for s in [0.25, 0.5, 0.75, 1.0] {
        let params = ParamSet::new(3, s, 2.0, 2.0).unwrap();
        let cfg = ExperimentConfig {
            slope_rel_tol: if s == 0.5 { 0.10 } else { 0.05 },
            ..ExperimentConfig::default()
        };
        for (axis, values) in axes {
            let res = run_bump_law(&params, 3.0, axis, base, values, &cfg).unwrap();
            let label = format!("s={s} {axis:?}");
            for series in ["lp_p", "seminorm_sq", "coulomb"] {
                assert_series_match(4, &label, &res, series);
            }
        }
    }

    // Interaction-energy laws at and below the logarithmic order.
    for alpha in [0.5, 1.0] {
        let params = ParamSet::new(3, 0.75, alpha, 2.0).unwrap();
        let cfg = ExperimentConfig { slope_rel_tol: 0.05, ..ExperimentConfig::default() };
        for (axis, values) in [
            (BumpLawAxis::Radius, &radius_values),
            (BumpLawAxis::Width, &width_values),
        ] {
            let res = run_bump_law(&params, 3.0, axis, base, values, &cfg).unwrap();
            let label = format!("alpha={alpha} {axis:?}");
            for series in ["lp_p", "seminorm_sq", "coulomb"] {
                assert_series_match(4, &label, &res, series);
            }
            if alpha == 1.0 {
                assert!(
                    res.fit("coulomb").unwrap().log_corrected,
                    "criterion 4: alpha=1 interaction fit should divide out the log factor"
                );
            }
        }
    }
    assert!(t0.elapsed().as_secs_f64() < 300.0, "criterion 4: exceeded 5min");
    pass(4, t0, "amplitude/radius/width laws across s in {1/4,1/2,3/4,1} and alpha in {1/2,1,2}");
}

#[test]
fn criterion_05_annular_schedules_detect_thresholds() {
    let t0 = Instant::now();
    let r_values: Vec<f64> = (2..=12).map(|k| 2f64.powi(k)).collect();
    let cfg = ExperimentConfig::default();

    let params = ParamSet::new(3, 1.0, 2.0, 2.0).unwrap();
    let sched = schedule_params(&params, ScheduleKind::Table2Row1).unwrap();
    let ScheduleLaw::PowerOfRadius { beta, gamma } = sched.law else { unreachable!() };
    assert!((beta + 7.0 / 8.0).abs() < 1e-14 && (gamma - 0.25).abs() < 1e-14);

    // Below the radial threshold 18/7 the mass (hence the quotient)
    // grows; at p = 2.4 the rate is (-7/8)(2.4 - 18/7) = 0.15.
    let below = run_schedule(&params, &sched, 2.4, &r_values, &cfg).unwrap();
    for series in ["lp_p", "seminorm_sq", "coulomb"] {
        assert_series_match(5, "p=2.4 tower schedule", &below, series);
    }
    let lp = below.fit("lp_p").unwrap();
    assert!(
        (lp.fitted_slope - 0.15).abs() <= 0.015,
        "criterion 5: blow-up rate at p=2.4: fitted {:.4} vs 0.15",
        lp.fitted_slope
    );

    // Inside the admissible range the family stays bounded: at p = 3
    // the mass law gives slope (-7/8)(3 - 18/7) = -3/8, so the quotient
    // decays at -1/8 rather than flattening; boundedness shows up as
    // the absence of any upward drift.
    let inside = run_schedule(&params, &sched, 3.0, &r_values, &cfg).unwrap();
    for series in ["lp_p", "seminorm_sq", "coulomb", "quotient"] {
        assert_series_match(5, "p=3 tower schedule", &inside, series);
    }
    let quot = inside.fit("quotient").unwrap();
    assert!((quot.expected_slope + 0.125).abs() < 1e-12);
    assert!(
        quot.fitted_slope <= 0.02,
        "criterion 5: quotient grows at rate {:.4} inside the admissible range",
        quot.fitted_slope
    );

    // Low-order interaction: the same construction against the lower
    // endpoint 3.6 at alpha = 1/2; p = 3 sits below it, so the mass
    // grows at (-5/7)(3 - 3.6) = 3/7.
    let params3 = ParamSet::new(3, 1.0, 0.5, 2.0).unwrap();
    let sched3 = schedule_params(&params3, ScheduleKind::Table3Row1).unwrap();
    assert!((sched3.p_reference - 3.6).abs() < 1e-14);
    let low = run_schedule(&params3, &sched3, 3.0, &r_values, &cfg).unwrap();
    for series in ["lp_p", "seminorm_sq", "coulomb"] {
        assert_series_match(5, "alpha=1/2 endpoint schedule", &low, series);
    }
    let lp3 = low.fit("lp_p").unwrap();
    assert!(
        (lp3.fitted_slope - 3.0 / 7.0).abs() <= 0.1 * (3.0 / 7.0),
        "criterion 5: endpoint blow-up rate fitted {:.4} vs {:.4}",
        lp3.fitted_slope,
        3.0 / 7.0
    );
    assert!(t0.elapsed().as_secs_f64() < 600.0, "criterion 5: exceeded 10min");
    pass(
        5,
        t0,
        "threshold rates 0.15 and 3/7 match; inside the range the quotient decays at -1/8 \
         (flat energies, no blow-up)",
    );
}

#[test]
fn criterion_06_width_driven_family_at_fixed_radius() {
    let t0 = Instant::now();
    let params = ParamSet::new(3, 0.25, 2.0, 4.0).unwrap();
    let sched = schedule_params(&params, ScheduleKind::FixedRWidthVaries).unwrap();
    assert_eq!(sched.p_reference, 4.0);
    let s_values: Vec<f64> = (0..8).map(|k| 2f64.powi(-k)).collect();
    let cfg = ExperimentConfig { slope_rel_tol: 0.05, ..ExperimentConfig::default() };
    let mut fitted = Vec::new();
    for p in [3.0, 4.0, 5.0] {
        let res = run_schedule(&params, &sched, p, &s_values, &cfg).unwrap();
        for series in ["lp_p", "seminorm_sq", "coulomb"] {
            assert_series_match(6, &format!("width-driven p={p}"), &res, series);
        }
        let lp = res.fit("lp_p").unwrap();
        assert!(
            (lp.expected_slope - (1.0 - p / 4.0)).abs() < 1e-12,
            "criterion 6: width-law prediction at p={p}"
        );
        fitted.push(format!("p={p}: {:.4}", lp.fitted_slope));
    }
    assert!(t0.elapsed().as_secs_f64() < 300.0, "criterion 6: exceeded 5min");
    pass(6, t0, &format!("shrinking-width mass slopes match 1 - p/q: {}", fitted.join(", ")));
}

#[test]
fn criterion_07_multibump_tower_rates() {
    let t0 = Instant::now();
    let ms: Vec<u32> = (1..=8).collect();
    // Largest base whose m = 8 bump window is still resolvable in f64:
    // the window span relative to its center shrinks like base^{-m(1-gamma)},
    // and wider bases push it below the grid's duplicate-node floor.
    let base = 64.0;

    let params = ParamSet::new(3, 1.0, 2.0, 2.0).unwrap();
    let p = 18.0 / 7.0;
    let tight = ExperimentConfig { slope_rel_tol: 0.05, ..ExperimentConfig::default() };
    let un = run_multibump(&params, base, &ms, p, false, &tight).unwrap();
    assert_eq!(un.samples.len(), 8, "criterion 7: tower truncated: {:?}", un.warnings);
    for series in ["lp_p", "seminorm_sq", "coulomb"] {
        assert_series_match(7, "un-rescaled tower", &un, series);
        let f = un.fit(series).unwrap();
        assert!(
            (f.fitted_slope - 1.0).abs() <= 0.05,
            "criterion 7: un-rescaled {series} slope {:.4} not within 5% of 1",
            f.fitted_slope
        );
    }

    // After the concentration rescaling the profile energies are flat and
    // the p-th power of the quotient grows at 2/7. Adjacent-level pair
    // interactions add a positive base^{-(d-alpha)/2} tail to the coulomb
    // energy, so its slope carries a small superadditive excess that only
    // vanishes as the base grows; the quotient rate is the invariant
    // statement and gets the tight band.
    let cfg = ExperimentConfig::default();
    let re = run_multibump(&params, base, &ms, p, true, &cfg).unwrap();
    assert_series_match(7, "rescaled tower", &re, "seminorm_sq");
    let cross = re.fit("coulomb").unwrap();
    assert!(
        cross.fitted_slope > -0.01 && cross.fitted_slope < 0.06,
        "criterion 7: rescaled coulomb slope {:.4} outside the cross-term envelope",
        cross.fitted_slope
    );
    let qp = re.fit("quotient_p").unwrap();
    assert_eq!(qp.verdict, Verdict::Match, "criterion 7: rescaled quotient rate {qp:?}");
    assert!(
        (qp.fitted_slope - 2.0 / 7.0).abs() <= 0.1 * (2.0 / 7.0),
        "criterion 7: rescaled quotient^p slope {:.4} vs 2/7",
        qp.fitted_slope
    );

    // Near alpha = 1 the predicted rate degenerates below the absolute
    // resolution band, which the verdict must report as such. The fitted
    // value itself is dominated by a per-level transient that decays like
    // base^{-(1-gamma)(alpha-1)m}, far too slowly to clear at reachable
    // scales, which is exactly why the band exists.
    let near = ParamSet::new(3, 1.0, 1.05, 2.0).unwrap();
    let p_near = p_rad(&near).unwrap();
    let deg = run_multibump(&near, base, &ms, p_near, true, &cfg).unwrap();
    assert_eq!(deg.series, "quotient_p");
    assert!(
        (deg.expected_slope - 0.1 / 6.05).abs() < 1e-9,
        "criterion 7: degenerate rate prediction {:.6}",
        deg.expected_slope
    );
    assert_eq!(
        deg.verdict,
        Verdict::Inconclusive,
        "criterion 7: alpha=1.05 rate should fall below the resolution band, got fitted {:.4}",
        deg.fitted_slope
    );
    assert!(t0.elapsed().as_secs_f64() < 600.0, "criterion 7: exceeded 10min");
    pass(
        7,
        t0,
        &format!(
            "linear growth within 5%, rescaled rate {:.4} vs 2/7, alpha=1.05 inconclusive as expected",
            qp.fitted_slope
        ),
    );
}

#[test]
fn criterion_08_weighted_inequalities_on_a_random_corpus() {
    let t0 = Instant::now();
    let params = ParamSet::new(3, 0.25, 2.0, 2.0).unwrap();
    let report =
        run_weighted_checks(&params, &CorpusSpec::default(), &ExperimentConfig::default())
            .unwrap();
    assert!(report.skipped.is_empty(), "criterion 8: skipped checks {:?}", report.skipped);
    for name in ["ruiz_exterior", "ruiz_interior", "ball_bound", "morrey_control", "rubin", "weakni"]
    {
        assert!(
            report.checks.iter().any(|c| c.name == name),
            "criterion 8: missing check family {name}"
        );
    }
    let mut worst: f64 = 0.0;
    for c in &report.checks {
        assert!(
            c.stats.bounded,
            "criterion 8: {} ({}) spread {:.2} exceeds 10",
            c.name, c.detail, c.stats.spread
        );
        worst = worst.max(c.stats.spread);
    }
    assert!(t0.elapsed().as_secs_f64() < 600.0, "criterion 8: exceeded 10min");
    pass(
        8,
        t0,
        &format!(
            "{} ratio families over {} functions, worst max/median {:.2}",
            report.checks.len(),
            report.spec.count,
            worst
        ),
    );
}

#[test]
fn criterion_09_sharpened_critical_quotients() {
    let t0 = Instant::now();
    let params = ParamSet::new(3, 1.0, 2.0, 5.0).unwrap();
    let eps_values = [0.0, 1.0 / 24.0, 1.0 / 12.0];
    let report =
        run_refined(&params, &eps_values, &CorpusSpec::default(), &ExperimentConfig::default())
            .unwrap();
    assert_eq!(report.checks.len(), eps_values.len());
    for c in &report.checks {
        assert!(
            c.stats.bounded,
            "criterion 9: quotient family {} unbounded, spread {:.2}",
            c.detail, c.stats.spread
        );
    }

    // Both symmetries of the quotient, checked pointwise: rescaling the
    // amplitude and dilating the profile must leave it unchanged.
    let grid = composite_grid(3, 0.02, 50.0, 160, &[], 0).unwrap();
    let f = BumpSpec { lambda: 1.3, center: 2.0, width: 0.8, profile: Profile::default() }
        .sample(&grid)
        .unwrap();
    let ev = EnergyEvaluator::new(&params, &grid).unwrap();
    let amplified = RadialGridFunction::new(
        grid.clone(),
        f.values.iter().map(|v| 2.7 * v).collect(),
    )
    .unwrap();
    let dilated = f.rescaled(1.7, 1.0).unwrap();
    let ev_dilated = EnergyEvaluator::new(&params, &dilated.grid).unwrap();
    for eps in eps_values {
        let q0 = ev.refined_quotient(&f, eps).unwrap();
        let qa = ev.refined_quotient(&amplified, eps).unwrap();
        let qd = ev_dilated.refined_quotient(&dilated, eps).unwrap();
        assert!(
            ((qa - q0) / q0).abs() < 1e-10,
            "criterion 9: amplitude invariance at eps={eps}: {q0} vs {qa}"
        );
        assert!(
            ((qd - q0) / q0).abs() < 1e-10,
            "criterion 9: dilation invariance at eps={eps}: {q0} vs {qd}"
        );
    }
    assert!(t0.elapsed().as_secs_f64() < 300.0, "criterion 9: exceeded 5min");
    pass(9, t0, "bounded for eps in {0, 1/24, 1/12}; amplitude and dilation invariant to 1e-10");
}

#[test]
fn criterion_10_gradient_ascent_finds_a_stable_maximizer() {
    let t0 = Instant::now();
    let params = ParamSet::new(3, 1.0, 2.0, 2.0).unwrap();
    let p = 4.0;
    let cfg = AscentConfig::default();

    let grid = default_grid(3).unwrap();
    let ev = EnergyEvaluator::new(&params, &grid).unwrap();
    let f0 = default_start(&grid).unwrap();
    let fd = fd_directional_check(&ev, &f0, p, 20, 11).unwrap();
    assert!(fd < 1e-5, "criterion 10: finite-difference gradient error {fd:.3e}");

    let outcome = multi_start(&params, p, 5, 0x5eed, &cfg).unwrap();
    let best = &outcome.best;
    for w in best.history.windows(2) {
        assert!(
            w[1].q >= w[0].q - 1e-12,
            "criterion 10: quotient decreased from {} to {}",
            w[0].q,
            w[1].q
        );
    }
    for s in &outcome.summaries {
        assert!(
            (best.q_star - s.q_star) / best.q_star <= 0.01,
            "criterion 10: start {} reached {:.6} vs best {:.6} ({:?} after {} iterations)",
            s.start_index,
            s.q_star,
            best.q_star,
            s.status,
            s.iterations
        );
    }
    assert!(outcome.relative_spread <= 0.01, "criterion 10: spread {}", outcome.relative_spread);

    // The ascent limit dominates every function of the random corpus.
    let corpus =
        run_boundedness(&params, p, &CorpusSpec::default(), &ExperimentConfig::default()).unwrap();
    assert!(
        best.q_star > corpus.stats.max,
        "criterion 10: ascent landed at {:.6}, below the corpus max {:.6}",
        best.q_star,
        corpus.stats.max
    );

    // Grid refinement moves the limit by less than 1%.
    let fine: Arc<RadialGrid> = composite_grid(3, 0.05, 40.0, 512, &[], 0).unwrap();
    let refined = ascend(&params, p, &default_start(&fine).unwrap(), &cfg).unwrap();
    let drift = ((refined.q_star - best.q_star) / best.q_star).abs();
    assert!(
        drift <= 0.01,
        "criterion 10: maximum moved {:.3}% under grid doubling",
        100.0 * drift
    );
    assert!(t0.elapsed().as_secs_f64() < 900.0, "criterion 10: exceeded 15min");
    pass(
        10,
        t0,
        &format!(
            "gradient check {fd:.1e}; 5 starts agree at {:.6} (spread {:.4}); above corpus max \
             {:.6}; doubling drift {:.3}%",
            best.q_star,
            outcome.relative_spread,
            corpus.stats.max,
            100.0 * drift
        ),
    );
}

#[test]
fn criterion_11_reports_are_byte_identical_across_runs() {
    let t0 = Instant::now();
    let params = ParamSet::new(3, 1.0, 2.0, 2.0).unwrap();
    let spec = CorpusSpec { count: 48, ..CorpusSpec::default() };
    let cfg = ExperimentConfig::default();
    let corpus_a =
        serde_json::to_string(&run_boundedness(&params, 4.0, &spec, &cfg).unwrap()).unwrap();
    let corpus_b =
        serde_json::to_string(&run_boundedness(&params, 4.0, &spec, &cfg).unwrap()).unwrap();
    assert_eq!(corpus_a, corpus_b, "criterion 11: corpus reports differ between runs");

    let bump_params = ParamSet::new(3, 0.75, 2.0, 2.0).unwrap();
    let base = BumpSpec { lambda: 1.0, center: 4.0, width: 1.0, profile: Profile::default() };
    let values: Vec<f64> = (0..5).map(|k| 10f64.powf(0.5 * k as f64)).collect();
    let sweep_a = serde_json::to_string(
        &run_bump_law(&bump_params, 3.0, BumpLawAxis::Amplitude, base, &values, &cfg).unwrap(),
    )
    .unwrap();
    let sweep_b = serde_json::to_string(
        &run_bump_law(&bump_params, 3.0, BumpLawAxis::Amplitude, base, &values, &cfg).unwrap(),
    )
    .unwrap();
    assert_eq!(sweep_a, sweep_b, "criterion 11: sweep reports differ between runs");
    pass(
        11,
        t0,
        &format!(
            "corpus ({} bytes) and sweep ({} bytes) reports byte-identical across repeat runs",
            corpus_a.len(),
            sweep_a.len()
        ),
    );
}
