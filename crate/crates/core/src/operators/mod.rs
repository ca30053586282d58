//! The linear operator `A`, its explicit inverse `B`, the nonlinear
//! correction `Q`, the quadrature right-hand side `w`, and the
//! partial-fraction constants backing the operator-identity tests.
//!
//! The matrix of `A` is `a_{k,n} = 1/(n+k+½) + 1/(n−k+½)` (row k, column n);
//! all denominators are half-integers, so no entry is ever singular. `A` is
//! almost unitary after scaling by 1/π: for finitely supported x,
//!
//! ```text
//!     ‖Ax‖² + 2 (Σₙ xₙ/(n+½))² = π² ‖x‖²,
//! ```
//!
//! which pins ‖Ax‖ between 2√2‖x‖ and π‖x‖. The inverse has the closed-form
//! entry table produced by [`b_entry`]; as an operator it acts through the
//! transposed table (see [`apply_b`]).
//!
//! Everything acts on the leading N×N block fixed by [`OperatorTruncation`];
//! tails are dropped, not modeled. Sums run in ascending n, serially, so
//! results are bitwise deterministic for a fixed truncation.

mod fast;

use crate::seqspace::CoeffSequence;
use crate::special::QuadratureRule;
use crate::{Error, Result};
use std::f64::consts::PI;

/// Truncation block for the operator applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperatorTruncation {
    n: usize,
    fast_apply: bool,
}

impl OperatorTruncation {
    /// Requires N ≥ 4. `fast_apply` routes applies through the FFT-based
    /// Toeplitz + Hankel split instead of the naive O(N²) loops.
    pub fn new(n: usize, fast_apply: bool) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidConfig(format!(
                "operator truncation {n} below minimum 4"
            )));
        }
        Ok(Self { n, fast_apply })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fast_apply(&self) -> bool {
        self.fast_apply
    }
}

/// Matrix entry of the linear part: `a_{k,n} = 1/(n+k+½) + 1/(n−k+½)`.
pub fn a_entry(k: usize, n: usize) -> f64 {
    let k = k as f64;
    let n = n as f64;
    1.0 / (n + k + 0.5) + 1.0 / (n - k + 0.5)
}

/// Closed-form entry table of the inverse,
/// `b_{k,n} = (1 − (2n+1)⁻²) / (π² (1 − (2k)⁻²)) · a_{k,n}`.
///
/// The table inverts `A` through its transpose: Σₖ b_{k,m} a_{k,j} = δ_{mj}
/// (see [`apply_b`]), which is what the bilinear partial-fraction identities
/// behind it actually prove.
pub fn b_entry(k: usize, n: usize) -> f64 {
    let kf = k as f64;
    let nf = n as f64;
    let col = 1.0 - 1.0 / ((2.0 * nf + 1.0) * (2.0 * nf + 1.0));
    let row = 1.0 - 1.0 / ((2.0 * kf) * (2.0 * kf));
    col / (PI * PI * row) * a_entry(k, n)
}

/// Applies the truncated linear operator: `y_k = Σ_{n=1}^{N} a_{k,n} xₙ`
/// for k = 1..N.
pub fn apply_a(x: &CoeffSequence, trunc: &OperatorTruncation) -> Result<CoeffSequence> {
    apply_linear(x, trunc, false)
}

/// Applies the inverse operator.
///
/// In entry terms, `y_k = Σ_{n=1}^{N} b_{n,k} xₙ`: the transposed table, the
/// orientation in which the inverse identity holds for the row convention of
/// [`apply_a`]. Equivalently, `B = diag(cₖ/π²) · Aᵀ · diag(1/dₙ)` with
/// `cₖ = 1 − (2k+1)⁻²` and `dₙ = 1 − (2n)⁻²`, which is how both the naive and
/// the FFT path compute it. On ℓ², ‖Bx‖ ≤ (2√2)⁻¹‖x‖; truncation adds slack
/// that decays as N grows.
pub fn apply_b(x: &CoeffSequence, trunc: &OperatorTruncation) -> Result<CoeffSequence> {
    let n = trunc.n();
    if x.len() > n {
        return Err(Error::DimensionMismatch {
            len: x.len(),
            truncation: n,
        });
    }
    // scale in by 1/dₙ, apply Aᵀ, scale out by cₖ/π²
    let scaled: Vec<f64> = (1..=n)
        .map(|i| {
            let d = 1.0 - 1.0 / ((2.0 * i as f64) * (2.0 * i as f64));
            x.get(i) / d
        })
        .collect();
    let scaled = CoeffSequence::new(scaled)?;
    let applied = apply_linear(&scaled, trunc, true)?;
    let out: Vec<f64> = (1..=n)
        .map(|k| {
            let c = 1.0 - 1.0 / ((2.0 * k as f64 + 1.0) * (2.0 * k as f64 + 1.0));
            c / (PI * PI) * applied.get(k)
        })
        .collect();
    CoeffSequence::new(out)
}

/// Shared A / Aᵀ apply. The transpose only mirrors the Toeplitz kernel:
/// a_{k,n} = 1/(k+n+½) + 1/(n−k+½), a_{n,k} = 1/(k+n+½) + 1/(k−n+½).
fn apply_linear(
    x: &CoeffSequence,
    trunc: &OperatorTruncation,
    transpose: bool,
) -> Result<CoeffSequence> {
    let n = trunc.n();
    if x.len() > n {
        return Err(Error::DimensionMismatch {
            len: x.len(),
            truncation: n,
        });
    }
    if trunc.fast_apply() {
        return fast::apply_toeplitz_hankel(x, n, transpose);
    }
    let mut out = vec![0.0; n];
    for (row, slot) in out.iter_mut().enumerate() {
        let k = row + 1;
        let mut acc = 0.0;
        for j in 1..=x.len() {
            let entry = if transpose { a_entry(j, k) } else { a_entry(k, j) };
            acc += entry * x.get(j);
        }
        *slot = acc;
    }
    CoeffSequence::new(out)
}

/// Right-hand side vector `w_k = (1/π) ∫_{−½}^{½} cos(πx)/(x−k)² dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsVector {
    values: Vec<f64>,
    quad_order: usize,
}

impl RhsVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// 1-based access.
    pub fn get(&self, k: usize) -> f64 {
        self.values[k - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    pub fn as_coeffs(&self) -> CoeffSequence {
        CoeffSequence::new(self.values.clone()).expect("w entries are finite")
    }
}

/// Computes w₁..w_K by Gauss–Legendre quadrature on four equal panels of
/// [−½, ½]. Subdividing keeps the k = 1 integrand (whose pole at x = 1 is
/// only half a unit from the endpoint) at machine precision with a fixed
/// order-8 rule.
pub fn compute_w(k_len: usize, rule: &QuadratureRule) -> Result<RhsVector> {
    let mut values = Vec::with_capacity(k_len);
    for k in 1..=k_len {
        let kf = k as f64;
        let f = |x: f64| (PI * x).cos() / ((x - kf) * (x - kf));
        let mut total = 0.0;
        for p in 0..4 {
            let a = -0.5 + 0.25 * p as f64;
            total += rule.integrate(f, a, a + 0.25)?;
        }
        values.push(total / PI);
    }
    Ok(RhsVector {
        values,
        quad_order: rule.order(),
    })
}

/// Applies the nonlinear correction
///
/// ```text
/// (Qd)_k = Σₙ [ ∫₀^{dₙ} cos(πy)·(1/(n+½−y+k) + 1/(n+½−y−k)) dy  −  dₙ·a_{k,n} ],
/// ```
///
/// each inner integral evaluated by the fixed rule on the oriented interval
/// [0, dₙ]. Requires |dₙ| < ¼ so every denominator stays at least ¼ away
/// from zero; Q(0) = 0 exactly.
pub fn apply_q(d: &CoeffSequence, k_len: usize, rule: &QuadratureRule) -> Result<CoeffSequence> {
    check_q_domain(d)?;
    let mut out = vec![0.0; k_len];
    let nodes = rule.nodes();
    let weights = rule.weights();
    let mut y = vec![0.0; rule.order()];
    let mut cw = vec![0.0; rule.order()];
    for n in 1..=d.len() {
        let dn = d.get(n);
        if dn == 0.0 {
            continue;
        }
        let s = n as f64 + 0.5;
        let half = 0.5 * dn;
        // cos(πy)·weight at the transplanted nodes; the half-length factor
        // carries the orientation sign
        for (i, t) in nodes.iter().enumerate() {
            y[i] = half + half * t;
            cw[i] = half * weights[i] * (PI * y[i]).cos();
        }
        for (row, slot) in out.iter_mut().enumerate() {
            let k = (row + 1) as f64;
            let mut acc = 0.0;
            for i in 0..y.len() {
                acc += cw[i] * (1.0 / (s - y[i] + k) + 1.0 / (s - y[i] - k));
            }
            *slot += acc - dn * (1.0 / (s + k) + 1.0 / (s - k));
        }
    }
    CoeffSequence::new(out)
}

fn check_q_domain(d: &CoeffSequence) -> Result<()> {
    for n in 1..=d.len() {
        let v = d.get(n);
        if v.abs() >= 0.25 {
            return Err(Error::DeltaTooLarge {
                index: n,
                value: v.abs(),
            });
        }
    }
    Ok(())
}

/// Split of (Qd) into its linearisable part and a quadratically small rest:
/// `(Qd)_k = (A α)_k + remainder_k` with `αₙ = π⁻¹ sin(π dₙ) − dₙ`.
#[derive(Debug, Clone)]
pub struct QDecomposition {
    pub alpha: CoeffSequence,
    pub remainder: Vec<f64>,
}

/// Computes the decomposition above. The remainder carries the weighted β
/// terms of size O(dₙ²); `alpha` obeys |αₙ| ≤ (π²/6)|dₙ|³.
pub fn decompose_q(
    d: &CoeffSequence,
    k_len: usize,
    rule: &QuadratureRule,
) -> Result<QDecomposition> {
    let q = apply_q(d, k_len, rule)?;
    let alpha_values: Vec<f64> = d
        .values()
        .iter()
        .map(|dn| (PI * dn).sin() / PI - dn)
        .collect();
    let alpha = CoeffSequence::new(alpha_values)?;
    let trunc = OperatorTruncation::new(alpha.len().max(k_len).max(4), false)?;
    let a_alpha = apply_a(&alpha, &trunc)?;
    let remainder = (1..=k_len).map(|k| q.get(k) - a_alpha.get(k)).collect();
    Ok(QDecomposition { alpha, remainder })
}

/// Bilateral partial-fraction constant
/// `C(a₁,…,a_r) = Σ_{n∈ℤ} 1/((n+a₁+½)···(n+a_r+½))`, r ∈ {2, 3, 4},
/// integer shifts |aᵢ| ≤ 100, evaluated to ~1e−9 absolute accuracy.
///
/// Closed forms it must reproduce: 0 for distinct shifts, C(a,a) = π²,
/// C(a,b,b) = π²/(a−b), C(a,a,b,b) = 2π²/(a−b)².
///
/// For r = 2 the symmetric partial sum over |n| ≤ 10⁶ gets an integral tail
/// correction (the summand decays like 1/n²); for r ∈ {3, 4} plain
/// truncation at 10⁵ is already below the target accuracy.
pub fn partial_fraction_constant(shifts: &[i64]) -> Result<f64> {
    let r = shifts.len();
    if !(2..=4).contains(&r) {
        return Err(Error::UnsupportedArity(r));
    }
    if let Some(s) = shifts.iter().find(|s| s.abs() > 100) {
        return Err(Error::InvalidConfig(format!(
            "partial-fraction shift {s} outside |a| <= 100"
        )));
    }
    let s: Vec<f64> = shifts.iter().map(|a| *a as f64 + 0.5).collect();
    let m: i64 = if r == 2 { 1_000_000 } else { 100_000 };
    let term = |n: f64| -> f64 { s.iter().map(|si| 1.0 / (n + si)).product() };
    // symmetric sum, paired to keep intermediate magnitudes small
    let mut sum = term(0.0);
    for n in 1..=m {
        let nf = n as f64;
        sum += term(nf) + term(-nf);
    }
    if r == 2 {
        let x = m as f64 + 0.5;
        sum += tail_integral_pair(x, s[0], s[1]) + tail_integral_pair(x, -s[0], -s[1]);
    }
    Ok(sum)
}

/// ∫_x^∞ du / ((u+p)(u+q)), assuming x + p and x + q are positive.
fn tail_integral_pair(x: f64, p: f64, q: f64) -> f64 {
    if (p - q).abs() < 1e-12 {
        1.0 / (x + p)
    } else {
        ((x + q) / (x + p)).ln() / (q - p)
    }
}
