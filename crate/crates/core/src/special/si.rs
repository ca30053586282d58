//! The sine integral Si(t) = ∫₀ᵗ sin(u)/u du.
//!
//! Two regimes meet at |t| = 16: the alternating power series below, and the
//! auxiliary-function representation Si(t) = π/2 − f(t)cos t − g(t)sin t
//! above, with f + ig obtained from the continued fraction for the
//! exponential integral E₁(it) evaluated by the modified Lentz algorithm.
//! Both regimes keep the absolute error below 1e−10 across the crossover
//! (the series loses ~5 digits to cancellation at t = 16, the continued
//! fraction is already fully converged there).

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

const SERIES_CUTOFF: f64 = 16.0;
const LENTZ_TINY: f64 = 1e-290;
const LENTZ_EPS: f64 = 1e-16;
const LENTZ_MAX_ITER: usize = 400;

/// Sine integral. Odd, Si(0) = 0, Si(t) → π/2 as t → ∞.
pub fn sine_integral(t: f64) -> f64 {
    let a = t.abs();
    let value = if a <= SERIES_CUTOFF {
        si_series(a)
    } else {
        si_asymptotic(a)
    };
    if t < 0.0 {
        -value
    } else {
        value
    }
}

/// Power series Σ (−1)^k t^(2k+1) / ((2k+1)(2k+1)!) for 0 ≤ t ≤ 16.
fn si_series(t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let t2 = t * t;
    let mut term = t; // t^(2k+1)/(2k+1)! at k = 0
    let mut sum = t;
    let mut k = 1u32;
    loop {
        let two_k = 2.0 * k as f64;
        term *= -t2 / (two_k * (two_k + 1.0));
        let contribution = term / (two_k + 1.0);
        sum += contribution;
        if contribution.abs() < 1e-17 * sum.abs().max(1.0) || k > 60 {
            return sum;
        }
        k += 1;
    }
}

/// Large-argument branch via E₁(it) = e^{−it}·CF(it); then
/// Si(t) = π/2 + Im E₁(it).
fn si_asymptotic(t: f64) -> f64 {
    let mut b = Complex64::new(1.0, t);
    let mut c = Complex64::new(1.0 / LENTZ_TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..LENTZ_MAX_ITER {
        let a = -((i * i) as f64);
        b += Complex64::new(2.0, 0.0);
        d = (a * d + b).inv();
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < LENTZ_EPS {
            break;
        }
    }
    let e1 = Complex64::new(t.cos(), -t.sin()) * h;
    FRAC_PI_2 + e1.im
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{integrate_adaptive, QuadratureRule};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    /// Brute-force oracle: high-order adaptive quadrature of sin(u)/u.
    fn si_oracle(t: f64) -> f64 {
        let rule = QuadratureRule::gauss_legendre(16).unwrap();
        integrate_adaptive(
            |u: f64| if u == 0.0 { 1.0 } else { u.sin() / u },
            0.0,
            t,
            1e-13,
            &rule,
        )
        .unwrap()
    }

    #[test]
    fn zero_at_origin() {
        assert_eq!(sine_integral(0.0), 0.0);
    }

    #[test]
    fn value_at_half_pi() {
        let t = PI / 2.0;
        assert_abs_diff_eq!(sine_integral(t), si_oracle(t), epsilon = 1e-12);
        // frozen oracle output, also the value reached by the quadrature above
        assert_abs_diff_eq!(sine_integral(t), 1.3707621681544885, epsilon = 1e-12);
    }

    #[test]
    fn frozen_reference_values() {
        // (t, Si(t)) pairs pinned from the adaptive oracle at tight tolerance
        let table = [
            (0.5, 0.4931074180430667),
            (1.0, 0.9460830703671830),
            (2.0, 1.6054129768026948),
            (5.0, 1.5499312449446742),
            (8.0, 1.5741868217069421),
            (12.0, 1.5049712415263734),
            (15.5, 1.6325809314229245),
            (16.0, 1.6313022682700329),
            (16.5, 1.6156261696817123),
            (20.0, 1.5482417010434398),
            (30.0, 1.5667565400303511),
            (50.0, 1.5516170724859359),
            (100.0, 1.5622254668890563),
            (500.0, 1.5725658822431687),
            (1000.0, 1.5702331219687712),
            (PI, 1.8519370519824662),
        ];
        for (t, expected) in table {
            assert_abs_diff_eq!(sine_integral(t), expected, epsilon = 2e-11);
        }
    }

    #[test]
    fn matches_oracle_across_both_regimes() {
        // scan [-50, 50] including points straddling the series/asymptotic
        // crossover at 16
        let mut t = -50.0;
        while t <= 50.0 {
            assert_abs_diff_eq!(sine_integral(t), si_oracle(t), epsilon = 1e-10);
            t += 1.375;
        }
        for t in [15.9, 15.99, 16.0, 16.01, 16.1, -15.95, -16.05] {
            assert_abs_diff_eq!(sine_integral(t), si_oracle(t), epsilon = 1e-10);
        }
    }

    #[test]
    fn approaches_half_pi() {
        assert_abs_diff_eq!(sine_integral(1e6), FRAC_PI_2, epsilon = 2e-6);
    }

    proptest! {
        #[test]
        fn odd_symmetry(t in -2000.0f64..2000.0) {
            let lhs = sine_integral(-t);
            let rhs = -sine_integral(t);
            prop_assert_eq!(lhs, rhs);
        }
    }
}
