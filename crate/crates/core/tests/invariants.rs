use csl_core::exponents::{
    classify_regime, endpoint_exponent, gn_exponents, p_rad, rubin_beta_from_r,
    rubin_r_from_beta, ParamSet,
};
use csl_core::grid::{RadialGrid, RadialGridFunction, Spacing};
use proptest::prelude::*;

proptest! {
    /// The interpolation pair (beta, gamma) must satisfy both scaling
    /// identities at every admissible parameter tuple, the radial
    /// threshold must improve on the interpolation endpoint in the
    /// direction the regime's interval actually extends, and the
    /// weighted-exponent balance must invert exactly.
    #[test]
    fn exponent_algebra_holds_on_random_tuples(
        d in 1..=5u32,
        s in 0.051f64..0.999,
        a_frac in 0.01f64..0.99,
        q in 1.05f64..8.0,
        p_frac in 0.02f64..0.98,
        r in 2.0f64..8.0,
    ) {
        let df = d as f64;
        let alpha = a_frac * df;
        let params = ParamSet::new(d, s, alpha, q).unwrap();
        let delta = df + alpha - q * (df - 2.0 * s);
        prop_assume!(delta.abs() >= 0.05);

        let interval = classify_regime(&params).p_interval;
        let p = if interval.hi.is_finite() {
            prop_assume!(interval.hi > interval.lo);
            interval.lo + p_frac * (interval.hi - interval.lo)
        } else {
            interval.lo + p_frac * 10.0
        };
        prop_assume!(p >= 1.0);
        let (beta, gamma) = gn_exponents(&params, p).unwrap();
        prop_assert!((1.0 - beta - 2.0 * q * gamma).abs() < 1e-12);
        prop_assert!(
            (df / p - beta * (0.5 * df - s) - gamma * (df + alpha)).abs() < 1e-12
        );

        // Strictness of the radial gain degenerates as alpha drops to 1,
        // so the sign check keeps a margin above it.
        if d >= 2 && alpha > 1.05 {
            let gain = endpoint_exponent(&params) - p_rad(&params).unwrap();
            prop_assert!(
                gain * delta > 0.0,
                "radial threshold on the wrong side: gain {gain}, delta {delta}"
            );
        }

        if d >= 2 && 2.0 * s < df {
            // Below s = 1/2 the balance only admits r up to the
            // limiting exponent.
            let r_cap = if s < 0.5 { 2.0 / (1.0 - 2.0 * s) } else { f64::INFINITY };
            prop_assume!(r < 0.99 * r_cap);
            let fwd = rubin_beta_from_r(d, s, r).unwrap();
            let back = rubin_r_from_beta(d, s, fwd.beta).unwrap();
            prop_assert!((back.r - r).abs() <= 1e-12 * r);
            prop_assert_eq!(back.beta, fwd.beta);
        }
    }

    /// Columnar text serialization is lossless: nodes, values and
    /// weights survive bitwise, and re-serialization reproduces the
    /// text byte for byte.
    #[test]
    fn columnar_io_is_exact(
        d in 1..=5u32,
        values in prop::collection::vec(-1e6f64..1e6, 8..48),
        r_max in 0.5f64..50.0,
        geometric in any::<bool>(),
    ) {
        let spacing = if geometric {
            Spacing::Geometric { r_min: r_max / 1e3 }
        } else {
            Spacing::Uniform
        };
        let grid = RadialGrid::new(d, r_max, values.len(), spacing).unwrap();
        let f = RadialGridFunction::new(grid, values).unwrap();
        let text = f.to_columnar();
        let back = RadialGridFunction::from_columnar(&text).unwrap();
        prop_assert_eq!(back.grid.nodes(), f.grid.nodes());
        prop_assert_eq!(back.grid.weights(), f.grid.weights());
        prop_assert_eq!(&back.values, &f.values);
        prop_assert_eq!(back.to_columnar(), text);
    }
}
