//! Affine-reparametrization harness: under `x = Ax̃ + b` with invertible `A`,
//! the gap, the curve function, and exact-line-search stepsizes are identical
//! between the original and transported problems, and iterates correspond
//! through the map. This module builds transported problems and runs the two
//! solves side by side.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{norm2, sub, Matrix};
use crate::model::{CompositePart, Problem, SmoothObjective};
use crate::real::Real;
use crate::solver::{run, Trajectory};
use crate::stepsize::StepsizeStrategy;
use crate::{Error, Result, Vector};

/// An invertible affine map `x̃ ↦ Ax̃ + b` with its cached inverse and a
/// condition-number estimate (product of operator 1-norms).
#[derive(Debug, Clone)]
pub struct Reparametrization<S> {
    pub a: Matrix<S>,
    pub b: Vector<S>,
    a_inv: Matrix<S>,
    pub condition: S,
}

impl<S: Real> Reparametrization<S> {
    pub fn new(a: Matrix<S>, b: Vector<S>) -> Result<Self> {
        if a.dim() != b.len() {
            return Err(Error::DimensionMismatch { expected: a.dim(), got: b.len() });
        }
        let a_inv = a.inverse()?;
        let condition = a.one_norm() * a_inv.one_norm();
        // sanity: A·A⁻¹ must reproduce the identity to within conditioning
        let prod = a.matmul(&a_inv);
        let n = a.dim();
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { S::one() } else { S::zero() };
                if (prod.get(i, j) - expect).abs() > S::of(1e-8) * condition {
                    return Err(Error::Internal(
                        "matrix inverse failed its roundtrip check".into(),
                    ));
                }
            }
        }
        Ok(Reparametrization { a, b, a_inv, condition })
    }

    pub fn identity(n: usize) -> Self {
        Reparametrization {
            a: Matrix::identity(n),
            b: vec![S::zero(); n],
            a_inv: Matrix::identity(n),
            condition: S::one(),
        }
    }

    /// Seeded map `A = Q₁·diag(d)·Q₂` with orthogonal factors and singular
    /// values in `[0.5, 5]` (spectral condition ≤ 10), plus a bounded shift.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q1 = random_orthogonal::<S>(n, &mut rng);
        let q2 = random_orthogonal::<S>(n, &mut rng);
        let d: Vec<S> = (0..n)
            .map(|_| S::of(10f64.powf(rng.gen_range(-0.30103..0.69897))))
            .collect();
        let mid = Matrix::from_fn(n, |i, j| if i == j { d[i] } else { S::zero() });
        let a = q1.matmul(&mid).matmul(&q2);
        let b: Vector<S> = (0..n).map(|_| S::of(rng.gen_range(-0.5..0.5))).collect();
        Self::new(a, b)
    }

    /// `x = Ax̃ + b`.
    pub fn forward(&self, x_tilde: &[S]) -> Vector<S> {
        let mut x = self.a.matvec(x_tilde);
        for (xi, &bi) in x.iter_mut().zip(&self.b) {
            *xi = *xi + bi;
        }
        x
    }

    /// `x̃ = A⁻¹(x - b)`.
    pub fn backward(&self, x: &[S]) -> Vector<S> {
        self.a_inv.matvec(&sub(x, &self.b))
    }

    /// `A⁻ᵀ g̃`, the gradient pull-back inverse.
    fn inv_transpose_apply(&self, g: &[S]) -> Vector<S> {
        self.a_inv.matvec_transpose(g)
    }
}

/// Builds the transported problem: `f̃(x̃) = f(Ax̃+b)`, `Ψ̃(x̃) = Ψ(Ax̃+b)`,
/// `∇f̃(x̃) = Aᵀ∇f(Ax̃+b)`, and the LMO realized through the original oracle
/// as `s̃ = A⁻¹(lmo(A⁻ᵀg̃) - b)`. Using the original oracle preserves its
/// tie-breaks, so paired trajectories correspond exactly in exact arithmetic.
///
/// Metadata is dropped: recorded constants are norm-dependent and do not
/// survive the change of variables.
pub fn transport_problem<S: Real>(
    problem: &Arc<Problem<S>>,
    rep: &Reparametrization<S>,
) -> Result<Problem<S>> {
    if rep.a.dim() != problem.dim {
        return Err(Error::DimensionMismatch { expected: problem.dim, got: rep.a.dim() });
    }
    let n = problem.dim;

    let p = Arc::clone(problem);
    let r = rep.clone();
    let f_value = move |x_tilde: &[S]| p.f.value(&r.forward(x_tilde));
    let p = Arc::clone(problem);
    let r = rep.clone();
    let f_grad = move |x_tilde: &[S]| {
        let g = p.f.gradient(&r.forward(x_tilde));
        r.a.matvec_transpose(&g)
    };
    let f = SmoothObjective::new(f_value, f_grad);

    let p = Arc::clone(problem);
    let r = rep.clone();
    let psi_value = move |x_tilde: &[S]| p.psi.value(&r.forward(x_tilde));
    let p = Arc::clone(problem);
    let r = rep.clone();
    let lmo = move |g_tilde: &[S]| {
        let g = r.inv_transpose_apply(g_tilde);
        r.backward(&p.psi.lmo(&g))
    };
    let p = Arc::clone(problem);
    let r = rep.clone();
    let contains = move |x_tilde: &[S]| p.psi.contains(&r.forward(x_tilde));
    let psi = CompositePart::new(psi_value, lmo, contains, problem.psi.is_indicator());

    let reference = rep.backward(&problem.reference_point);
    let mut transported = Problem::new(
        format!("{}@reparam(cond={:.3})", problem.id, rep.condition),
        n,
        f,
        psi,
        reference,
    );
    if let Some(opt) = &problem.optimum {
        transported = transported.with_optimum(rep.backward(&opt.point), opt.value);
    }
    if problem.has_segment_minimizer() {
        let p = Arc::clone(problem);
        let r = rep.clone();
        transported = transported.with_segment_minimizer(move |x_tilde: &[S], s_tilde: &[S]| {
            // the segment objective is invariant, so the original minimizer
            // applied to corresponding endpoints gives the same θ
            p.segment_minimizer(&r.forward(x_tilde), &r.forward(s_tilde))
                .expect("segment minimizer present")
        });
    }
    Ok(transported)
}

/// Per-iteration deviations of a paired run. `pass` applies the
/// condition-scaled thresholds; `condition_limited` flags maps too
/// ill-conditioned (> 1e3) for the strict thresholds to be meaningful.
#[derive(Debug, Clone)]
pub struct InvarianceReport<S> {
    pub iterations: usize,
    pub max_gap_deviation: S,
    pub max_best_gap_deviation: S,
    pub max_theta_deviation: S,
    pub max_iterate_deviation: S,
    pub condition: S,
    pub condition_limited: bool,
    pub pass: bool,
}

/// Runs the original problem from `x0` and the transported problem from
/// `A⁻¹(x0-b)`, then compares Wolfe gaps, best gaps, stepsizes, and mapped
/// iterates record by record.
pub fn paired_run<S: Real>(
    problem: &Arc<Problem<S>>,
    rep: &Reparametrization<S>,
    strategy: StepsizeStrategy<S>,
    x0: &[S],
    iters: usize,
) -> Result<(InvarianceReport<S>, Trajectory<S>, Trajectory<S>)> {
    let transported = transport_problem(problem, rep)?;
    let original = run(problem, strategy, x0, iters, S::zero())?;
    let x0_tilde = rep.backward(x0);
    let mirrored = run(&transported, strategy, &x0_tilde, iters, S::zero())?;

    let common = original.records.len().min(mirrored.records.len());
    let gap0 = original.records[0].wolfe_gap;
    let scale = (rep.condition / S::of(100.0)).max(S::one());
    let condition_limited = rep.condition > S::of(1e3);

    let mut max_gap = S::zero();
    let mut max_best = S::zero();
    let mut max_theta = S::zero();
    let mut max_iter_dev = S::zero();
    let mut pass = true;
    // The zero-gap stop can trigger early on one side only: its slack is at
    // roundoff scale, so the other run may keep iterating on noise. Unequal
    // lengths are fine as long as both gaps sat at roundoff where the
    // shorter run ended.
    if original.records.len() != mirrored.records.len() {
        let threshold = S::of(1e-8) * (S::one() + gap0) * scale;
        if original.records[common - 1].wolfe_gap > threshold
            || mirrored.records[common - 1].wolfe_gap > threshold
        {
            pass = false;
        }
    }
    for k in 0..common {
        let a = &original.records[k];
        let t = &mirrored.records[k];
        let gap_dev = (a.wolfe_gap - t.wolfe_gap).abs();
        let best_dev = (a.best_gap - t.best_gap).abs();
        let theta_dev = (a.theta - t.theta).abs();
        let iter_dev = norm2(&sub(&a.x, &rep.forward(&t.x)));
        max_gap = max_gap.max(gap_dev);
        max_best = max_best.max(best_dev);
        max_theta = max_theta.max(theta_dev);
        max_iter_dev = max_iter_dev.max(iter_dev);

        // Tolerances are relative to the run's initial scale: the LMO can be
        // merely Hölder in the gradient (ℓp balls, p > 2), so late-stage
        // roundoff amplification relative to the *current* gap is intrinsic,
        // not a transport error.
        let gap_tol = scale * S::of(1e-8) * (S::one() + gap0);
        if gap_dev > gap_tol || best_dev > gap_tol {
            pass = false;
        }
        // θ is a ratio of segment quantities that shrink with the gap while
        // the oracle noise they carry does not, so its tolerance widens like
        // 1/gap (vacuous once the gap reaches the noise floor).
        let theta_tol = scale
            * (S::of(1e-8)
                + S::of(1e-9) * (S::one() + gap0) / a.wolfe_gap.max(S::of(1e-300)));
        if theta_dev > theta_tol {
            pass = false;
        }
        if iter_dev > S::of(1e-7) * (S::one() + norm2(&a.x)) * rep.condition {
            pass = false;
        }
    }

    let report = InvarianceReport {
        iterations: common,
        max_gap_deviation: max_gap,
        max_best_gap_deviation: max_best,
        max_theta_deviation: max_theta,
        max_iterate_deviation: max_iter_dev,
        condition: rep.condition,
        condition_limited,
        pass,
    };
    Ok((report, original, mirrored))
}

fn random_orthogonal<S: Real>(n: usize, rng: &mut ChaCha8Rng) -> Matrix<S> {
    loop {
        let mut rows: Vec<Vector<S>> = (0..n)
            .map(|_| (0..n).map(|_| S::of(rng.gen_range(-1.0..1.0))).collect())
            .collect();
        let mut ok = true;
        for i in 0..n {
            for j in 0..i {
                let proj = crate::linalg::dot(&rows[i], &rows[j]);
                let (head, tail) = rows.split_at_mut(i);
                for (v, &w) in tail[0].iter_mut().zip(&head[j]) {
                    *v = *v - proj * w;
                }
            }
            let norm = norm2(&rows[i]);
            if norm < S::of(1e-6) {
                ok = false;
                break;
            }
            for v in rows[i].iter_mut() {
                *v = *v / norm;
            }
        }
        if ok {
            return Matrix::from_rows(rows);
        }
    }
}
