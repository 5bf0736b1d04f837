//! Gap kernel: Bregman distance, Wolfe gap, derived dual values, the curve
//! function `D(x,s,θ)`, and the per-step gap-reduction identity.
//!
//! Conjugates are never represented as oracles. The dual value
//! `f*(g) + Ψ*(-g)` is always obtained by rearranging the Wolfe gap:
//! `dual = gap(x,g) - (f+Ψ)(x)`, which only uses primal oracles.

use crate::linalg::{convex_combine, dot, sub};
use crate::model::{primal_value, Problem, SmoothObjective};
use crate::real::Real;
use crate::{Error, Result, Vector};

/// One iteration's worth of oracle output: the iterate, its gradient, the LMO
/// answer, and the scalars derived from them. The dual value is memoized here
/// so later best-gap updates cost a stored scalar instead of an LMO call.
#[derive(Debug, Clone)]
pub struct StepContext<S> {
    pub x: Vector<S>,
    /// `∇f(x)`.
    pub g: Vector<S>,
    /// `argmin_y {⟨g,y⟩ + Ψ(y)}`.
    pub s: Vector<S>,
    pub wolfe_gap: S,
    /// `f*(g) + Ψ*(-g)`, derived via `wolfe_gap - primal_at_x`.
    pub dual_value: S,
    pub primal_at_x: S,
}

impl<S: Real> StepContext<S> {
    /// Runs both oracles at `x` and assembles the derived scalars. Negative
    /// Wolfe gaps within roundoff slack are clamped to zero; anything more
    /// negative means the LMO is not actually minimizing.
    pub fn evaluate(problem: &Problem<S>, x: &[S]) -> Result<Self> {
        problem.check_dim(x)?;
        let primal_at_x = primal_value(problem, x)?.expect_finite("primal value at x")?;
        let g = problem.f.gradient(x);
        let s = problem.psi.lmo(&g);
        problem.check_dim(&s)?;
        let mut gap = wolfe_gap(problem, x, &g, &s)?;
        let slack = S::of(1e-9) * (S::one() + primal_at_x.abs());
        if gap < S::zero() {
            if gap < -slack {
                return Err(Error::OracleInconsistency(format!(
                    "Wolfe gap {gap} is negative beyond roundoff slack; the lmo is not minimizing"
                )));
            }
            gap = S::zero();
        }
        let dual_value = gap - primal_at_x;
        Ok(StepContext { x: x.to_vec(), g, s, wolfe_gap: gap, dual_value, primal_at_x })
    }
}

/// Bregman distance `D_f(y,x) = f(y) - f(x) - ⟨∇f(x), y-x⟩`.
pub fn bregman<S: Real>(f: &SmoothObjective<S>, y: &[S], x: &[S]) -> Result<S> {
    if y.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    let fy = f.value(y);
    let fx = f.value(x);
    if !fy.is_finite() || !fx.is_finite() {
        return Err(Error::Domain("infinite f value in bregman".into()));
    }
    let g = f.gradient(x);
    Ok(fy - fx - dot(&g, &sub(y, x)))
}

/// Wolfe gap `⟨g, x-s⟩ + Ψ(x) - Ψ(s)` at `(x, g, s)`. For indicator Ψ this is
/// just `⟨g, x-s⟩`.
pub fn wolfe_gap<S: Real>(problem: &Problem<S>, x: &[S], g: &[S], s: &[S]) -> Result<S> {
    problem.check_dim(x)?;
    problem.check_dim(g)?;
    problem.check_dim(s)?;
    let linear = dot(g, &sub(x, s));
    if problem.psi.is_indicator() {
        check_membership(problem, x, "x")?;
        check_membership(problem, s, "s")?;
        return Ok(linear);
    }
    let psi_x = problem.psi.value(x).expect_finite("Ψ(x)")?;
    let psi_s = problem.psi.value(s).expect_finite("Ψ(s)")?;
    Ok(linear + psi_x - psi_s)
}

/// The dual objective value `f*(g) + Ψ*(-g)`, computed as
/// `wolfe_gap(x,g,s) - (f+Ψ)(x)`. Constant in `x` for fixed `g`.
pub fn dual_value<S: Real>(problem: &Problem<S>, x: &[S], g: &[S], s: &[S]) -> Result<S> {
    let gap = wolfe_gap(problem, x, g, s)?;
    let primal = primal_value(problem, x)?.expect_finite("primal value")?;
    Ok(gap - primal)
}

/// The curve function
/// `D(x,s,θ) = D_f(x+θ(s-x), x) + Ψ(x+θ(s-x)) - (1-θ)Ψ(x) - θΨ(s)`.
///
/// For indicator Ψ the three Ψ terms vanish on the segment, so only the
/// Bregman term remains. May be negative when Ψ is strictly convex.
pub fn curve_gap<S: Real>(problem: &Problem<S>, x: &[S], s: &[S], theta: S) -> Result<S> {
    if theta < S::zero() || theta > S::one() {
        return Err(Error::Usage(format!("curve_gap requires θ in [0,1], got {theta}")));
    }
    problem.check_dim(x)?;
    problem.check_dim(s)?;
    let z = convex_combine(x, s, theta);
    let breg = bregman(&problem.f, &z, x)?;
    if problem.psi.is_indicator() {
        check_membership(problem, x, "x")?;
        check_membership(problem, s, "s")?;
        return Ok(breg);
    }
    let psi_x = problem.psi.value(x).expect_finite("Ψ(x)")?;
    let psi_s = problem.psi.value(s).expect_finite("Ψ(s)")?;
    let psi_z = problem.psi.value(&z).expect_finite("Ψ(x+θ(s-x))")?;
    Ok(breg + psi_z - (S::one() - theta) * psi_x - theta * psi_s)
}

/// Residual of the gap-reduction identity
/// `gap(x+θ(s-x), g) = (1-θ)·gap(x,g) + D(x,s,θ)`,
/// with the left side computed independently as `primal(x₊) + dual_value`.
/// Analytically zero; the magnitude measures oracle/arithmetic consistency.
pub fn gap_reduction_residual<S: Real>(
    problem: &Problem<S>,
    ctx: &StepContext<S>,
    theta: S,
) -> Result<S> {
    let d = curve_gap(problem, &ctx.x, &ctx.s, theta)?;
    let z = convex_combine(&ctx.x, &ctx.s, theta);
    let primal_z = primal_value(problem, &z)?.expect_finite("primal at x+θ(s-x)")?;
    let lhs = primal_z + ctx.dual_value;
    let rhs = (S::one() - theta) * ctx.wolfe_gap + d;
    Ok((lhs - rhs).abs())
}

fn check_membership<S: Real>(problem: &Problem<S>, x: &[S], name: &str) -> Result<()> {
    if !problem.psi.contains(x) {
        return Err(Error::Domain(format!("{name} lies outside dom(Ψ)")));
    }
    Ok(())
}
