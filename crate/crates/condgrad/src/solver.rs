//! Iteration driver: `x_{k+1} = (1-θ_k)·x_k + θ_k·s_k` with best-duality-gap
//! tracking and gap-based stopping.

use std::time::Instant;

use crate::gap::StepContext;
use crate::linalg::convex_combine;
use crate::model::Problem;
use crate::real::Real;
use crate::stepsize::{backtracking_step, exact_linesearch, open_loop_step, StepsizeStrategy};
use crate::{Error, Result, Vector};

/// One recorded iteration. `theta` is the step taken *from* this iterate
/// (zero on the terminal record).
#[derive(Debug, Clone)]
pub struct IterateRecord<S> {
    pub k: usize,
    pub x: Vector<S>,
    pub theta: S,
    pub wolfe_gap: S,
    pub dual_value: S,
    /// `gap_k = primal(x_k) + min_{i≤k} dual_value_i`, nonincreasing in `k`.
    pub best_gap: S,
    pub primal: S,
    pub subopt: Option<S>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    GapTolerance,
    ZeroGap,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct Trajectory<S> {
    pub records: Vec<IterateRecord<S>>,
    pub problem_id: String,
    pub strategy: StepsizeStrategy<S>,
    pub stop_reason: StopReason,
    pub wall_time_secs: f64,
}

impl<S: Real> Trajectory<S> {
    pub fn best_gaps(&self) -> Vec<S> {
        self.records.iter().map(|r| r.best_gap).collect()
    }

    pub fn suboptimalities(&self) -> Option<Vec<S>> {
        self.records.iter().map(|r| r.subopt).collect()
    }

    pub fn final_record(&self) -> &IterateRecord<S> {
        self.records.last().expect("trajectory has at least one record")
    }

    /// Keeps every `m`-th record plus the last one, for long sweeps.
    pub fn thinned(&self, m: usize) -> Trajectory<S> {
        assert!(m >= 1);
        let last = self.records.len() - 1;
        let records = self
            .records
            .iter()
            .enumerate()
            .filter(|(i, _)| i % m == 0 || *i == last)
            .map(|(_, r)| r.clone())
            .collect();
        Trajectory { records, ..self.clone() }
    }
}

/// Best-gap update: `gap_k = primal(x_k) + min(running_min_dual, new_dual)`,
/// carrying the min forward. Seed `running_min_dual` with `+∞`.
pub fn best_gap_update<S: Real>(
    running_min_dual: S,
    new_dual: S,
    primal_at_xk: S,
) -> (S, S) {
    let updated = running_min_dual.min(new_dual);
    (primal_at_xk + updated, updated)
}

/// `subopt_k = primal_k - optimal_value` for each record. Errors when the
/// claimed optimum is not a lower bound on the recorded primals.
pub fn suboptimality_series<S: Real>(
    trajectory: &Trajectory<S>,
    optimal_value: S,
) -> Result<Vec<S>> {
    let slack = S::of(1e-9);
    for r in &trajectory.records {
        if optimal_value > r.primal + slack {
            return Err(Error::Usage(format!(
                "claimed optimal value {optimal_value} exceeds recorded primal {} at k={}",
                r.primal, r.k
            )));
        }
    }
    Ok(trajectory.records.iter().map(|r| r.primal - optimal_value).collect())
}

/// Runs the conditional gradient loop from `x0`. Stops on zero Wolfe gap, on
/// `best_gap ≤ gap_tol`, or after `max_iters` steps; the terminal iterate is
/// recorded with `θ = 0`, so a trajectory holds `steps + 1` records.
pub fn run<S: Real>(
    problem: &Problem<S>,
    strategy: StepsizeStrategy<S>,
    x0: &[S],
    max_iters: usize,
    gap_tol: S,
) -> Result<Trajectory<S>> {
    if max_iters == 0 {
        return Err(Error::Usage("run requires max_iters >= 1".into()));
    }
    if gap_tol < S::zero() {
        return Err(Error::Usage("run requires gap_tol >= 0".into()));
    }
    problem.check_dim(x0)?;
    if !problem.psi.contains(x0) {
        return Err(Error::Usage("x0 lies outside dom(Ψ)".into()));
    }

    let started = Instant::now();
    let mut records = Vec::new();
    let mut x = x0.to_vec();
    let mut running_min_dual = S::infinity();
    let optimum_value = problem.optimum.as_ref().map(|o| o.value);

    let stop_reason = loop {
        let k = records.len();
        let ctx = StepContext::evaluate(problem, &x)?;
        let (best_gap, updated) =
            best_gap_update(running_min_dual, ctx.dual_value, ctx.primal_at_x);
        running_min_dual = updated;
        let subopt = optimum_value.map(|v| ctx.primal_at_x - v);

        let zero_gap_slack = S::of(1e-14) * (S::one() + ctx.primal_at_x.abs());
        let stopping = if ctx.wolfe_gap <= zero_gap_slack {
            Some(StopReason::ZeroGap)
        } else if best_gap <= gap_tol {
            Some(StopReason::GapTolerance)
        } else if k == max_iters {
            Some(StopReason::MaxIterations)
        } else {
            None
        };

        if let Some(reason) = stopping {
            records.push(IterateRecord {
                k,
                x: ctx.x,
                theta: S::zero(),
                wolfe_gap: ctx.wolfe_gap,
                dual_value: ctx.dual_value,
                best_gap,
                primal: ctx.primal_at_x,
                subopt,
            });
            break reason;
        }

        let theta = match strategy {
            StepsizeStrategy::ExactLinesearch { tolerance } => {
                exact_linesearch(problem, &ctx, tolerance)?
            }
            StepsizeStrategy::Backtracking { c, rho } => {
                backtracking_step(problem, &ctx, c, rho)?.0
            }
            StepsizeStrategy::OpenLoop => open_loop_step(k),
        };

        let next = convex_combine(&ctx.x, &ctx.s, theta);
        records.push(IterateRecord {
            k,
            x: ctx.x,
            theta,
            wolfe_gap: ctx.wolfe_gap,
            dual_value: ctx.dual_value,
            best_gap,
            primal: ctx.primal_at_x,
            subopt,
        });
        x = next;
    };

    Ok(Trajectory {
        records,
        problem_id: problem.id.clone(),
        strategy,
        stop_reason,
        wall_time_secs: started.elapsed().as_secs_f64(),
    })
}
