//! Randomized invariants, mostly via proptest: identities and inequalities
//! that must hold on arbitrary instances, not just the frozen traces in the
//! unit tests.

use proptest::prelude::*;

use condgrad::analysis::{bly_bound, envelope_theorem1, envelope_theorem2};
use condgrad::gap::{bregman, curve_gap, gap_reduction_residual, StepContext};
use condgrad::linalg::{dot, norm2, sub};
use condgrad::problems::{
    quadratic_over_lp_ball, quadratic_over_simplex, smooth_plus_strongly_convex_with_center,
    SetDescriptor,
};
use condgrad::solver::run;
use condgrad::stepsize::{backtracking_step, StepsizeStrategy};

fn ball_point(dir: Vec<f64>, radial: f64) -> Vec<f64> {
    let n = norm2(&dir).max(1e-9);
    dir.iter().map(|v| v * radial / n).collect()
}

proptest! {
    #[test]
    fn gap_reduction_residual_vanishes(
        center in proptest::collection::vec(-2.0..2.0f64, 3),
        x_dir in proptest::collection::vec(-1.0..1.0f64, 3),
        radial in 0.0..0.999f64,
        theta in 0.0..1.0f64,
        seed in 0u64..50,
    ) {
        let p = quadratic_over_lp_ball(3, 2.0, 1.0, &center, seed).unwrap();
        let x = ball_point(x_dir, radial);
        let ctx = StepContext::evaluate(&p, &x).unwrap();
        let res = gap_reduction_residual(&p, &ctx, theta).unwrap();
        prop_assert!(res <= 1e-12 * (1.0 + ctx.wolfe_gap.abs()));
    }

    #[test]
    fn backtracking_accepts_valid_step(
        center in proptest::collection::vec(-2.0..2.0f64, 3),
        x_dir in proptest::collection::vec(-1.0..1.0f64, 3),
        radial in 0.0..0.999f64,
        c in 0.3..0.9f64,
        rho in 0.5..0.99f64,
    ) {
        prop_assume!(c + rho > 1.01);
        let p = quadratic_over_lp_ball(3, 2.0, 1.0, &center, 0).unwrap();
        let x = ball_point(x_dir, radial);
        let ctx = StepContext::evaluate(&p, &x).unwrap();
        prop_assume!(ctx.wolfe_gap > 1e-8);
        let (theta, lower) = backtracking_step(&p, &ctx, c, rho).unwrap();
        prop_assert!(theta > 0.0 && theta <= 1.0);
        prop_assert!(lower > 0.0 && lower <= 1.0);
        prop_assert!(theta >= rho * lower - 1e-15);
        let d = curve_gap(&p, &ctx.x, &ctx.s, theta).unwrap();
        let slack = 1e-12 * (1.0 + ctx.primal_at_x.abs());
        prop_assert!(d <= (1.0 - c) * theta * ctx.wolfe_gap + slack + 1e-15);
    }

    #[test]
    fn exact_linesearch_beats_grid(
        center in proptest::collection::vec(-2.0..2.0f64, 3),
        x_dir in proptest::collection::vec(-1.0..1.0f64, 3),
        radial in 0.0..0.999f64,
    ) {
        let p = quadratic_over_lp_ball(3, 2.0, 1.0, &center, 0).unwrap();
        let x = ball_point(x_dir, radial);
        let ctx = StepContext::evaluate(&p, &x).unwrap();
        prop_assume!(ctx.wolfe_gap > 1e-10);
        let theta = condgrad::stepsize::exact_linesearch(&p, &ctx, 1e-10).unwrap();
        let phi = |t: f64| {
            (1.0 - t) * ctx.wolfe_gap + curve_gap(&p, &ctx.x, &ctx.s, t).unwrap()
        };
        let best = phi(theta);
        for i in 0..=20 {
            prop_assert!(best <= phi(i as f64 / 20.0) + 1e-9 * (1.0 + best.abs()));
        }
    }

    #[test]
    fn bly_dominates_random_recurrences(
        p in 0.2..3.0f64,
        beta0 in 0.01..2.0f64,
        slacks in proptest::collection::vec(0.0..1.0f64, 30),
        rates in proptest::collection::vec(0.0..1.0f64, 30),
    ) {
        let mut beta = beta0;
        let mut deltas = Vec::new();
        for (u, s) in rates.iter().zip(&slacks) {
            let delta = if beta > 0.0 { u / beta.powf(p) } else { 0.0 };
            let k = deltas.len();
            let bound = bly_bound(p, beta0, &deltas, k).unwrap();
            prop_assert!(beta <= bound + 1e-10);
            beta = (0.5 + 0.5 * s) * beta * (1.0 - delta * beta.powf(p)).max(0.0);
            deltas.push(delta);
        }
    }

    #[test]
    fn envelope_dominates_recurrence_sequences(
        q in 1.2..3.0f64,
        r in 0.0..1.0f64,
        m in 0.5..10.0f64,
        b0 in 0.01..20.0f64,
        slacks in proptest::collection::vec(0.0..1.0f64, 40),
    ) {
        let env = envelope_theorem1(q, r, m, b0, slacks.len()).unwrap();
        // any sequence obeying the one-step inequality (here with extra
        // per-step shrink) must sit below the iterated envelope
        let a = (q - 1.0) / q;
        let mut b = b0;
        for (k, s) in slacks.iter().enumerate() {
            prop_assert!(b <= env.bounds[k] + 1e-9 * (1.0 + env.bounds[k]));
            let e = if r == 1.0 { 1.0 } else { b.powf(1.0 - r) };
            let arg = (e / m).powf(1.0 / (q - 1.0)).min(1.0);
            b = (0.5 + 0.5 * s) * b * (1.0 - a * arg);
        }
        // envelopes are nonincreasing
        for w in env.bounds.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-15);
        }
    }

    #[test]
    fn theorem2_envelope_dominates_theorem1(
        q in 1.2..3.0f64,
        r in 0.0..1.0f64,
        m in 0.5..10.0f64,
        b0 in 0.01..20.0f64,
        c in 0.3..0.9f64,
        rho in 0.5..0.99f64,
    ) {
        prop_assume!(c + rho > 1.01);
        // backtracking contracts no faster than the ideal exact-LS map when
        // its coefficient is weaker on both factors
        let e1 = envelope_theorem1(q, r, m, b0, 50).unwrap();
        let e2 = envelope_theorem2(q, r, m, c, rho, b0, 50).unwrap();
        let ideal_c = (q - 1.0) / q;
        if c + rho - 1.0 <= ideal_c && q * (1.0 - c) <= 1.0 {
            for (b1, b2) in e1.bounds.iter().zip(&e2.bounds) {
                prop_assert!(b1 <= &(b2 + 1e-12 * (1.0 + b2)));
            }
        }
    }

    #[test]
    fn lmo_minimizes_over_sampled_points(
        g in proptest::collection::vec(-3.0..3.0f64, 4),
        probe in proptest::collection::vec(-1.0..1.0f64, 4),
        radial in 0.0..1.0f64,
        p_sel in 0usize..3,
    ) {
        let p = [2.0, 3.0, 4.0][p_sel];
        let set = SetDescriptor::LpBall { p, radius: 1.0 };
        let s = set.lmo(&g);
        prop_assert!(set.contains(&s));
        let y = {
            let norm = probe.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p);
            if norm < 1e-9 {
                vec![0.0; 4]
            } else {
                probe.iter().map(|v| v * radial / norm).collect()
            }
        };
        prop_assert!(dot(&g, &s) <= dot(&g, &y) + 1e-10);
    }

    #[test]
    fn smoothness_metadata_bounds_bregman(
        x_dir in proptest::collection::vec(-1.0..1.0f64, 3),
        y_dir in proptest::collection::vec(-1.0..1.0f64, 3),
        rx in 0.0..1.0f64,
        ry in 0.0..1.0f64,
        center in proptest::collection::vec(-2.0..2.0f64, 3),
    ) {
        let p = quadratic_over_lp_ball(3, 2.0, 1.0, &center, 0).unwrap();
        let sm = p.metadata.smoothness.as_ref().unwrap();
        let x = ball_point(x_dir, rx);
        let y = ball_point(y_dir, ry);
        let d = bregman(&p.f, &y, &x).unwrap();
        let dist = norm2(&sub(&y, &x));
        prop_assert!(d <= sm.l / sm.q * dist.powf(sm.q) + 1e-12);
    }
}

#[test]
fn best_gap_series_invariants() {
    for seed in 0..20u64 {
        let p = quadratic_over_simplex::<f64>(8, seed).unwrap();
        let x0 = p.psi.lmo(&vec![1.0; 8]);
        for strategy in [
            StepsizeStrategy::exact(),
            StepsizeStrategy::backtracking(0.6, 0.7).unwrap(),
            StepsizeStrategy::OpenLoop,
        ] {
            let t = run(&p, strategy, &x0, 150, 0.0).unwrap();
            if !matches!(strategy, StepsizeStrategy::OpenLoop) {
                // monotonicity needs primal descent, which the open-loop
                // schedule does not guarantee
                for w in t.records.windows(2) {
                    assert!(w[1].best_gap <= w[0].best_gap + 1e-11 * (1.0 + w[0].best_gap.abs()));
                }
            }
            for r in &t.records {
                assert!(r.best_gap >= -1e-12);
                assert!(r.best_gap <= r.wolfe_gap + 1e-12);
                if let Some(s) = r.subopt {
                    // weak duality: any duality gap dominates suboptimality
                    assert!(s <= r.best_gap + 1e-10 * (1.0 + r.best_gap));
                }
            }
        }
    }
}

#[test]
fn strongly_convex_psi_lmo_is_unconstrained_argmin() {
    let p = smooth_plus_strongly_convex_with_center::<f64>(3, 2.0, vec![1.0, -1.0, 0.5]);
    for i in 0..50 {
        let g: Vec<f64> = (0..3).map(|j| ((i * 3 + j) as f64 * 0.77).sin() * 2.0).collect();
        let s = p.psi.lmo(&g);
        let obj = |y: &[f64]| dot(&g, y) + p.psi.value(y).finite().unwrap();
        let base = obj(&s);
        for j in 0..3 {
            for delta in [-1e-3, 1e-3] {
                let mut y = s.clone();
                y[j] += delta;
                assert!(base <= obj(&y) + 1e-12);
            }
        }
    }
}
