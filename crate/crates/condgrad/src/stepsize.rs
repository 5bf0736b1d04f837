//! Stepsize rules: exact line search over the segment, Armijo-style
//! backtracking on the curve function, and the open-loop `2/(k+2)` baseline.

use crate::gap::{curve_gap, StepContext};
use crate::model::Problem;
use crate::real::Real;
use crate::{Error, Result};

/// Which rule the solver uses to pick `θ_k`. Carries the rule parameters so a
/// trajectory records exactly how it was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepsizeStrategy<S> {
    /// `θ_k = argmin_{θ∈[0,1]} (f+Ψ)(x_k + θ(s_k - x_k))`, to within
    /// `tolerance` in the argument.
    ExactLinesearch { tolerance: S },
    /// Largest `θ = ρ^j` with `D(x,s,θ) ≤ (1-c)·θ·gap`. Requires
    /// `c, ρ ∈ (0,1)` with `c + ρ > 1`; `ρ = 1` is additionally allowed and
    /// makes the rule accept `θ = 1` or fail immediately.
    Backtracking { c: S, rho: S },
    /// `θ_k = 2/(k+2)`, independent of the oracles.
    OpenLoop,
}

impl<S: Real> StepsizeStrategy<S> {
    pub fn exact() -> Self {
        StepsizeStrategy::ExactLinesearch { tolerance: S::of(1e-10) }
    }

    pub fn backtracking(c: S, rho: S) -> Result<Self> {
        let zero = S::zero();
        let one = S::one();
        if !(c > zero && c < one) {
            return Err(Error::Usage(format!("backtracking requires c in (0,1), got {c}")));
        }
        if !(rho > zero && rho <= one) {
            return Err(Error::Usage(format!("backtracking requires ρ in (0,1], got {rho}")));
        }
        if c + rho <= one {
            return Err(Error::Usage(format!(
                "backtracking requires c+ρ > 1, got c={c}, ρ={rho}"
            )));
        }
        Ok(StepsizeStrategy::Backtracking { c, rho })
    }
}

/// Minimizes `φ(θ) = (1-θ)·gap + D(x,s,θ)`, which equals
/// `(f+Ψ)(x + θ(s-x)) + dual_value` and is convex in `θ`. Uses the problem's
/// closed-form segment minimizer when present, otherwise golden-section
/// search.
pub fn exact_linesearch<S: Real>(
    problem: &Problem<S>,
    ctx: &StepContext<S>,
    tolerance: S,
) -> Result<S> {
    if tolerance <= S::zero() {
        return Err(Error::Usage("exact_linesearch tolerance must be positive".into()));
    }
    if let Some(theta) = problem.segment_minimizer(&ctx.x, &ctx.s) {
        let clamped = theta.max(S::zero()).min(S::one());
        return Ok(clamped);
    }
    let phi = |theta: S| -> Result<S> {
        Ok((S::one() - theta) * ctx.wolfe_gap + curve_gap(problem, &ctx.x, &ctx.s, theta)?)
    };
    golden_section(phi, S::zero(), S::one(), tolerance, 80)
}

fn golden_section<S: Real>(
    phi: impl Fn(S) -> Result<S>,
    mut a: S,
    mut b: S,
    tol: S,
    max_iters: usize,
) -> Result<S> {
    let inv_phi = S::of(0.618_033_988_749_894_9);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = phi(c)?;
    let mut fd = phi(d)?;
    for _ in 0..max_iters {
        if b - a <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = phi(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = phi(d)?;
        }
    }
    let mid = (a + b) * S::of(0.5);
    // Endpoints can win when the minimizer is at the boundary of [0,1].
    let candidates = [S::zero(), mid, S::one()];
    let mut best = mid;
    let mut best_val = phi(mid)?;
    for &t in &candidates {
        let v = phi(t)?;
        if v < best_val {
            best = t;
            best_val = v;
        }
    }
    Ok(best)
}

/// Armijo backtracking: starting from `θ = 1`, shrink by `ρ` until
/// `D(x,s,θ) ≤ (1-c)·θ·gap`. Returns the accepted `θ` together with a lower
/// certificate `θ̂_lower` for the exact threshold `θ̂` (the last failing trial
/// times `ρ`, or 1 when the first trial succeeds); the accepted step satisfies
/// `ρ·θ̂ ≤ θ ≤ θ̂`.
pub fn backtracking_step<S: Real>(
    problem: &Problem<S>,
    ctx: &StepContext<S>,
    c: S,
    rho: S,
) -> Result<(S, S)> {
    // Re-validate so direct callers get the same constructor guarantees.
    StepsizeStrategy::backtracking(c, rho)?;
    if ctx.wolfe_gap <= S::zero() {
        return Err(Error::Usage(
            "backtracking_step requires gap > 0; a zero gap means the iterate is optimal".into(),
        ));
    }
    let one = S::one();
    let mut theta = one;
    let mut last_failed: Option<S> = None;
    let floor = S::of(1e-16);
    // Near convergence the cancellation noise in D exceeds (1-c)·θ·gap for
    // every θ, so the test needs an absolute roundoff allowance.
    let slack = S::of(1e-12) * (one + ctx.primal_at_x.abs());
    loop {
        let d = curve_gap(problem, &ctx.x, &ctx.s, theta)?;
        if d <= (one - c) * theta * ctx.wolfe_gap + slack {
            let lower = match last_failed {
                Some(t) => t * rho,
                None => one,
            };
            return Ok((theta, lower));
        }
        last_failed = Some(theta);
        theta = theta * rho;
        if theta < floor {
            return Err(Error::OracleInconsistency(
                "backtracking shrank below 1e-16 without satisfying the descent condition; \
                 D(x,s,θ)/θ should fall below (1-c)·gap near 0"
                    .into(),
            ));
        }
    }
}

/// Open-loop schedule `θ_k = 2/(k+2)`.
pub fn open_loop_step<S: Real>(k: usize) -> S {
    S::of(2.0) / S::of(k as f64 + 2.0)
}
