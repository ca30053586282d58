//! Gauss–Legendre quadrature and adaptive bisection.

use crate::{Error, Result};

/// Maximum supported Gauss–Legendre order.
pub const MAX_ORDER: usize = 64;

/// A Gauss–Legendre rule on (−1, 1): `order` nodes, positive weights,
/// exact for polynomials of degree ≤ 2·order − 1.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Builds the rule of the given order by Newton iteration on the
    /// Legendre polynomial, seeded with the Chebyshev-like estimate
    /// cos(π(i − ¼)/(m + ½)). Converges to machine precision in a few steps
    /// for every order up to [`MAX_ORDER`].
    pub fn gauss_legendre(order: usize) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::UnsupportedOrder(order));
        }
        let m = order;
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        // roots come in ± pairs; compute the positive half
        for i in 0..m.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(m, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                    let (p2, d2) = legendre_with_derivative(m, x);
                    dp = d2;
                    x -= p2 / d2; // one polishing step
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[m - 1 - i] = x;
            weights[m - 1 - i] = w;
            nodes[i] = -x;
            weights[i] = w;
        }
        if m % 2 == 1 {
            // odd orders have the exact midpoint node
            let (_, d) = legendre_with_derivative(m, 0.0);
            nodes[m / 2] = 0.0;
            weights[m / 2] = 2.0 / (d * d);
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Oriented integral of `f` over [a, b] by affine transplantation of the
    /// rule: swapping the endpoints flips the sign, a degenerate interval
    /// integrates to zero.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let point = mid + half * x;
            let value = f(point);
            if !value.is_finite() {
                return Err(Error::NonFiniteIntegrand(point));
            }
            acc += w * value;
        }
        Ok(half * acc)
    }
}

/// Legendre polynomial P_m and its derivative at `x` via the three-term
/// recurrence.
fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=m {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive integration by recursive bisection.
///
/// Accepts a panel when the whole-panel estimate and the two-half estimate
/// agree within the panel's share of the absolute tolerance budget, halving
/// the budget on each split and giving up refinement at depth 40.
pub fn integrate_adaptive<F: Fn(f64) -> f64 + Copy>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    adaptive_step(f, a, b, tol, rule, 40)
}

fn adaptive_step<F: Fn(f64) -> f64 + Copy>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    rule: &QuadratureRule,
    depth: u32,
) -> Result<f64> {
    let whole = rule.integrate(f, a, b)?;
    let mid = 0.5 * (a + b);
    let split = rule.integrate(f, a, mid)? + rule.integrate(f, mid, b)?;
    if (whole - split).abs() <= tol || depth == 0 || mid == a || mid == b {
        return Ok(split);
    }
    Ok(adaptive_step(f, a, mid, 0.5 * tol, rule, depth - 1)?
        + adaptive_step(f, mid, b, 0.5 * tol, rule, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn order_one_is_midpoint_rule() {
        let rule = QuadratureRule::gauss_legendre(1).unwrap();
        assert_eq!(rule.nodes(), &[0.0]);
        assert_eq!(rule.weights(), &[2.0]);
    }

    #[test]
    fn order_two_classical_nodes() {
        let rule = QuadratureRule::gauss_legendre(2).unwrap();
        let r = 1.0 / 3.0f64.sqrt();
        assert_abs_diff_eq!(rule.nodes()[0], -r, epsilon = 1e-15);
        assert_abs_diff_eq!(rule.nodes()[1], r, epsilon = 1e-15);
        assert_abs_diff_eq!(rule.weights()[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rule.weights()[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_unsupported_orders() {
        assert!(matches!(
            QuadratureRule::gauss_legendre(0),
            Err(Error::UnsupportedOrder(0))
        ));
        assert!(matches!(
            QuadratureRule::gauss_legendre(65),
            Err(Error::UnsupportedOrder(65))
        ));
    }

    #[test]
    fn weights_sum_to_two_and_nodes_are_symmetric() {
        for m in [1, 2, 3, 5, 8, 13, 21, 40, 64] {
            let rule = QuadratureRule::gauss_legendre(m).unwrap();
            let sum: f64 = rule.weights().iter().sum();
            assert_abs_diff_eq!(sum, 2.0, epsilon = 1e-14);
            for (i, x) in rule.nodes().iter().enumerate() {
                assert_abs_diff_eq!(*x, -rule.nodes()[m - 1 - i], epsilon = 1e-15);
            }
            assert!(rule.weights().iter().all(|w| *w > 0.0));
        }
    }

    #[test]
    fn order_eight_integrates_x_sixth_exactly() {
        let rule = QuadratureRule::gauss_legendre(8).unwrap();
        let value = rule.integrate(|x| x.powi(6), -1.0, 1.0).unwrap();
        assert_abs_diff_eq!(value, 2.0 / 7.0, epsilon = 1e-14);
    }

    #[test]
    fn monomial_exactness_up_to_degree_bound() {
        // exact value of ∫_{-1}^{1} x^j dx is 0 (odd) or 2/(j+1) (even)
        for m in [2, 4, 8, 16, 32, 64] {
            let rule = QuadratureRule::gauss_legendre(m).unwrap();
            for j in 0..2 * m {
                let value = rule.integrate(|x| x.powi(j as i32), -1.0, 1.0).unwrap();
                let exact = if j % 2 == 1 { 0.0 } else { 2.0 / (j as f64 + 1.0) };
                assert!(
                    (value - exact).abs() <= 1e-13 * (1.0 + exact.abs()),
                    "m = {m}, j = {j}: {value} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn cosine_on_half_interval() {
        let rule = QuadratureRule::gauss_legendre(8).unwrap();
        let value = rule.integrate(|y| (PI * y).cos(), 0.0, 0.5).unwrap();
        assert_abs_diff_eq!(value, 1.0 / PI, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_interval_is_zero() {
        let rule = QuadratureRule::gauss_legendre(8).unwrap();
        assert_eq!(rule.integrate(|x| x.exp(), 0.3, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn orientation_flips_sign() {
        let rule = QuadratureRule::gauss_legendre(8).unwrap();
        let fwd = rule.integrate(|x| x * x + 1.0, 0.0, 0.7).unwrap();
        let bwd = rule.integrate(|x| x * x + 1.0, 0.7, 0.0).unwrap();
        assert_abs_diff_eq!(fwd, -bwd, epsilon = 1e-15);
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let rule = QuadratureRule::gauss_legendre(4).unwrap();
        let res = rule.integrate(|x| 1.0 / (x - 0.5), 0.0, 1.0);
        // 0.5 is not a node of the order-4 rule, so this integrand is fine
        assert!(res.is_ok());
        let res = rule.integrate(|_| f64::NAN, 0.0, 1.0);
        assert!(matches!(res, Err(Error::NonFiniteIntegrand(_))));
    }

    #[test]
    fn oscillatory_integrand_matches_finer_subdivision() {
        // the kind of integrand the nonlinear operator produces on [0, δₙ]
        let rule = QuadratureRule::gauss_legendre(8).unwrap();
        let f = |y: f64| (PI * y).cos() / (2.5 - y);
        let coarse = rule.integrate(f, 0.0, 0.05).unwrap();
        let mut fine = 0.0;
        for i in 0..10 {
            let a = 0.005 * i as f64;
            fine += rule.integrate(f, a, a + 0.005).unwrap();
        }
        assert_abs_diff_eq!(coarse, fine, epsilon = 1e-14);
    }

    #[test]
    fn integrate_is_linear_and_additive() {
        let rule = QuadratureRule::gauss_legendre(8).unwrap();
        let f = |x: f64| (1.3 * x).sin();
        let g = |x: f64| x * x;
        let combined = rule.integrate(|x| 2.0 * f(x) - 3.0 * g(x), -0.4, 1.1).unwrap();
        let separate = 2.0 * rule.integrate(f, -0.4, 1.1).unwrap()
            - 3.0 * rule.integrate(g, -0.4, 1.1).unwrap();
        assert_abs_diff_eq!(combined, separate, epsilon = 1e-12);

        let left = rule.integrate(f, -0.4, 0.3).unwrap();
        let right = rule.integrate(f, 0.3, 1.1).unwrap();
        let whole = rule.integrate(f, -0.4, 1.1).unwrap();
        assert_abs_diff_eq!(left + right, whole, epsilon = 1e-12);
    }

    #[test]
    fn adaptive_handles_kinked_integrand() {
        let rule = QuadratureRule::gauss_legendre(8).unwrap();
        let value = integrate_adaptive(|x: f64| x.abs(), -1.0, 1.0, 1e-12, &rule).unwrap();
        assert_abs_diff_eq!(value, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn adaptive_oscillatory_long_range() {
        let rule = QuadratureRule::gauss_legendre(8).unwrap();
        // ∫_0^{10π} sin x dx = 0
        let value =
            integrate_adaptive(|x: f64| x.sin(), 0.0, 10.0 * PI, 1e-12, &rule).unwrap();
        assert_abs_diff_eq!(value, 0.0, epsilon = 1e-10);
    }
}
