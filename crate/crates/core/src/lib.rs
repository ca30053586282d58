//! Zeros and sharp constants of the minimal-L¹ extremal function of
//! exponential type π.
//!
//! Among all entire functions of exponential type at most π with `f(0) = 1`,
//! there is a unique one of minimal L¹(ℝ) norm. It is even, has only real
//! simple zeros ±τ₁, ±τ₂, …, and each τₙ sits close to the half-integer
//! n + ½. Writing τₙ = n + ½ − δₙ, the deviations δ = (δₙ) solve a nonlinear
//! operator equation
//!
//! ```text
//!     A δ + Q δ = w
//! ```
//!
//! whose linear part `A` is an explicitly invertible Hilbert-type matrix and
//! whose nonlinear part `Q` is quadratically small. A Banach fixed-point
//! iteration started at `B w` (with `B` the inverse of `A`) converges to δ in
//! a handful of steps; from the zeros one evaluates the extremal function
//! itself as an infinite product, computes its L¹ norm, and obtains the lower
//! half of the bracket for the sharp constant of pointwise evaluation at 0 on
//! L¹-type Paley–Wiener functions,
//!
//! ```text
//!     0.5409288219 ≤ C₁ ≤ 0.5409288220.
//! ```
//!
//! The crate is organised along the pipeline:
//!
//! * [`seqspace`] — coefficient sequences, ℓ² norms, zero tables;
//! * [`special`] — Gauss–Legendre quadrature, adaptive integration, the sine
//!   integral Si;
//! * [`operators`] — the operators `A`, `B`, `Q`, the right-hand side `w`,
//!   and the partial-fraction constants used as test oracles;
//! * [`solver`] — the fixed-point iteration with convergence diagnostics and
//!   ball/contraction certificates;
//! * [`extremal`] — evaluation of the extremal function, its L¹ norm, the
//!   constant bracket, and an independent residual check through Si;
//! * [`cli`] — the `solve` / `verify` / `constants` / `eval` command-line
//!   front end with deterministic CSV/JSON outputs.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod cli;
mod error;
pub mod extremal;
pub mod operators;
pub mod seqspace;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
pub use extremal::{ConstantBracket, L1Norm, PhiEvaluator};
pub use seqspace::{CoeffSequence, ZeroTable};
pub use solver::{BallCertificates, ConvergenceTable, SolveReport, SolverConfig};
